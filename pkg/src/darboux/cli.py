"""Command-line front end: ``darboux <command> [options]``.

Commands: verify-algebra, verify-quantum, trace, spectrum, embed, hj-check.
Exit codes: 0 pass, 1 verification failure, 2 usage, 3 numeric failure, 4 I/O.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import brackets, charts, dynamics, embeddings, operators, phase, spectra
from .errors import (DarbouxError, NodeMismatch, NoConvergence, NotBracketed, RangeError,
                     SpectrumUnbounded, UsageError)
from .phase import ModelSpec, PhasePoint

log = logging.getLogger("darboux")

COMMANDS = ("verify-algebra", "verify-quantum", "trace", "spectrum", "embed", "hj-check")
MODELS = {"free": "Free", "p1": "P1", "p2": "P2", "p3": "P3"}
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3, 4

ALGEBRA_TOL = 1e-9
ORACLE_TOL = 1e-6
FREE_QUANTUM_TOL = 1e-8
QUANTUM_TOL = 1e-6
CONSERVATION_TOL = 1e-8
SPECTRUM_TOL = 1e-6
METRIC_TOL = 1e-6
HJ_TOL = 1e-12
DEFAULT_STATE = (2.0, 0.5, 0.3, 0.4)


@dataclass
class Command:
    name: str
    model: str = "Free"
    params: dict = field(default_factory=dict)
    seed: int = 42
    samples: int = 1000
    out: str | None = None
    format: str = "json"
    h: float = 1e-3
    T: float = 10.0
    state: tuple = DEFAULT_STATE
    count: int = 5
    which: str = "euclidean"
    nu: int = 50
    nv: int = 50
    printed: bool = False

    def model_spec(self) -> ModelSpec:
        names = phase.PARAM_NAMES[self.model]
        return ModelSpec(self.model, tuple(self.params[n] for n in names))


# serialisation -------------------------------------------------------------------------

def _fmt(x):
    if x is None:
        return "null"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return "null"
        return format(x, ".17g")
    if isinstance(x, str):
        return json.dumps(x)
    raise TypeError(f"cannot serialise {type(x).__name__}")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with floats at 17 significant digits and sorted keys."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_fmt(str(k))}: {dumps(v, indent, _level + 1)}"
                 for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    return _fmt(obj)


# parsing -------------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text, n, flag):
    try:
        vals = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"{flag} expects {n} comma-separated numbers") from None
    if len(vals) != n:
        raise UsageError(f"{flag} expects {n} comma-separated numbers")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="darboux", description="Verification workflows for superintegrable systems on D1")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--model", choices=sorted(MODELS), default=None)
    p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--h", type=float, default=1e-3)
    p.add_argument("--T", type=float, default=10.0)
    p.add_argument("--state", default=None, metavar="U,V,PU,PV")
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--which", choices=(embeddings.EUCLIDEAN, embeddings.LORENTZIAN),
                   default=embeddings.EUCLIDEAN)
    p.add_argument("--nu", type=int, default=50)
    p.add_argument("--nv", type=int, default=50)
    p.add_argument("--printed", action="store_true",
                   help="count the published coefficients as checks (verify-quantum)")
    return p


SPECTRUM_DEFAULTS = {"P1": {"b1": 1.0, "b2": 0.0, "b3": 0.1875},
                     "P2": {"a1": 0.0, "a2": 0.3, "a3": 1.0}}


def parse_args(argv) -> Command:
    """Validated :class:`Command`; raises :class:`UsageError` naming the bad flag."""
    ns = build_parser().parse_args(list(argv))
    model = MODELS[ns.model or ("p1" if ns.command == "spectrum" else "free")]
    params = {}
    for item in ns.param:
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects NAME=VALUE, got {item!r}")
        if name not in phase.PARAM_NAMES[model]:
            raise UsageError(f"--param {name}: {model} takes {phase.PARAM_NAMES[model] or 'no parameters'}")
        try:
            params[name] = float(value)
        except ValueError:
            raise UsageError(f"--param {name}: {value!r} is not a number") from None
        if not math.isfinite(params[name]):
            raise UsageError(f"--param {name}: value must be finite")
    needed = phase.PARAM_NAMES[model]
    if ns.command == "spectrum":
        if model not in SPECTRUM_DEFAULTS:
            raise UsageError("--model: spectrum supports p1 and p2")
        if not params:
            params = dict(SPECTRUM_DEFAULTS[model])
    missing = [n for n in needed if n not in params]
    if missing:
        raise UsageError(f"--param: {model} requires {', '.join(missing)}")
    if ns.samples < 1:
        raise UsageError("--samples must be positive")
    if not (ns.h > 0 and ns.T > 0):
        raise UsageError("--h and --T must be positive")
    if ns.count < 1:
        raise UsageError("--count must be positive")
    if ns.nu < 2 or ns.nv < 2:
        raise UsageError("--nu and --nv must be at least 2")
    state = _floats(ns.state, 4, "--state") if ns.state else DEFAULT_STATE
    return Command(ns.command, model, params, ns.seed, ns.samples, ns.out, ns.format, ns.h, ns.T,
                   state, ns.count, ns.which, ns.nu, ns.nv, ns.printed)


# workflows -----------------------------------------------------------------------------

def _header(cmd: Command):
    return {"command": cmd.name, "model": cmd.model, "params": dict(cmd.params), "seed": cmd.seed}


def run_verify_algebra(cmd: Command):
    m = cmd.model_spec()
    rel = brackets.verify_model_relations(m, cmd.samples, cmd.seed, ALGEBRA_TOL)
    oracle = brackets.oracle_agreement(m, cmd.samples, cmd.seed)
    oracle_ok = max(oracle.values()) <= ORACLE_TOL
    rep = _header(cmd) | {
        "samples": cmd.samples,
        "relations": [r.to_dict() for r in rel],
        "oracle": {"max_scaled_gap": oracle, "tolerance": ORACLE_TOL, "passed": oracle_ok},
    }
    rep["passed"] = all(r.passed for r in rel) and oracle_ok
    return rep


def run_verify_quantum(cmd: Command):
    m = cmd.model_spec()
    tol = FREE_QUANTUM_TOL if m.potential == "Free" else QUANTUM_TOL
    out = []
    ok = True
    for name, lhs, basis in operators.quantum_relation_spec(m):
        fit = operators.fit_relation(name, lhs, basis)
        pred = operators.relation_residual(lhs, basis, [b[2] for b in basis])
        printed = operators.relation_residual(lhs, basis, [b[3] for b in basis])
        entry = fit.to_dict() | {
            "imag_coefficients": [complex(c).imag for c in fit.coefficients],
            "predicted_imag": [complex(c).imag for c in fit.predicted],
            "printed_imag": [complex(c).imag for c in fit.printed],
            "residual_predicted": pred, "residual_printed": printed, "tolerance": tol,
            "passed": pred <= tol and (printed <= tol or not cmd.printed),
        }
        ok &= entry["passed"]
        out.append(entry)
    return _header(cmd) | {"relations": out, "printed_counted": cmd.printed, "passed": ok}


def run_trace(cmd: Command):
    m = cmd.model_spec()
    s0 = PhasePoint(*cmd.state)
    traj = dynamics.integrate(s0, m, cmd.h, cmd.T)
    obs = ("H",) + tuple(m.integrals())
    report = dynamics.conservation_report(traj, obs)
    ok = traj.complete and report.max_rel_drift() <= CONSERVATION_TOL
    rep = _header(cmd) | {"h": cmd.h, "T": cmd.T, "state": list(cmd.state), "status": traj.status,
                          "steps": len(traj.times) - 1, "conservation": report.to_dict(),
                          "tolerance": CONSERVATION_TOL, "passed": ok}
    return rep, traj


def _spectrum_p1(cmd: Command):
    b1, b2, b3 = (cmd.params[n] for n in ("b1", "b2", "b3"))
    if b1 <= 0:
        raise SpectrumUnbounded("b1 <= 0: the u-problem has no decaying channel")
    beta = math.sqrt(b1)
    g2 = 4 * b3 + 0.25
    if g2 <= 0.25:
        raise UsageError("--param b3: the v-problem needs b3 > 0 (gamma > 1/2)")
    gamma = math.sqrt(g2)
    mus = [spectra.quantize_p1_v(beta, gamma, n) for n in range(cmd.count)]
    mu_num = [spectra.numerov_eigen(spectra.p1_v_problem(beta, gamma), n) for n in range(cmd.count)]
    Es = [spectra.quantize_p1_u(beta, b2, mus[0], n) for n in range(cmd.count)]
    E_num = [spectra.numerov_eigen(spectra.p1_u_problem(beta, b2, mus[0]), n) for n in range(cmd.count)]
    return {"beta": beta, "gamma": gamma}, mus, mu_num, Es, E_num


def _spectrum_p2(cmd: Command):
    a1, a2, a3 = (cmd.params[n] for n in ("a1", "a2", "a3"))
    if a3 <= 0:
        raise SpectrumUnbounded("a3 <= 0: the u-problem has no decaying channel")
    alpha = math.sqrt(a3)
    mus = [spectra.quantize_p2_v(alpha, a2, n) for n in range(cmd.count)]
    vp = spectra.p2_v_problem(alpha, a2)
    mu_num = [spectra.numerov_periodic(vp, n) for n in range(cmd.count)]
    Es = [spectra.quantize_p2_u(alpha, a1, mus[0], n) for n in range(cmd.count)]
    E_num = [spectra.numerov_eigen(spectra.p2_u_problem(alpha, a1, mus[0]), n) for n in range(cmd.count)]
    return {"alpha": alpha, "window": [0.0, 2 * math.pi]}, mus, mu_num, Es, E_num


def run_spectrum(cmd: Command):
    derived, mus, mu_num, Es, E_num = (_spectrum_p1 if cmd.model == "P1" else _spectrum_p2)(cmd)
    rel = lambda a, b: abs(a - b) / max(1.0, abs(b))  # noqa: E731
    levels = [{"n": n, "E": Es[n], "mu": mus[n], "E_numerov": E_num[n], "mu_numerov": mu_num[n],
               "delta_E": rel(Es[n], E_num[n]), "delta_mu": rel(mus[n], mu_num[n])}
              for n in range(cmd.count)]
    worst = max(max(lv["delta_E"], lv["delta_mu"]) for lv in levels)
    return _header(cmd) | {"derived": derived, "E_at_mu_index": 0, "levels": levels,
                           "max_relative_delta": worst, "tolerance": SPECTRUM_TOL,
                           "passed": worst <= SPECTRUM_TOL}


def run_embed(cmd: Command):
    if cmd.which == embeddings.EUCLIDEAN:
        ur, vr = (0.6, 3.0), (0.0, 2 * math.pi)
    else:
        ur, vr = (0.1, 3.0), (0.0, 2 * math.pi)
    resid = embeddings.metric_residual_grid(cmd.which, ur, vr, n=50)
    mesh_u = (0.5, 3.0) if cmd.which == embeddings.EUCLIDEAN else (0.0, 3.0)
    if cmd.format == "csv":
        artifact = embeddings.grid_csv(cmd.which, mesh_u, vr, cmd.nu, cmd.nv)
    else:
        artifact = embeddings.mesh_text(cmd.which, mesh_u, vr, cmd.nu, cmd.nv)
    rep = _header(cmd) | {"which": cmd.which, "grid": [50, 50], "u_range": list(ur),
                          "v_range": list(vr), "max_metric_residual": resid,
                          "tolerance": METRIC_TOL, "mesh": {"nu": cmd.nu, "nv": cmd.nv,
                                                            "u_range": list(mesh_u)},
                          "passed": resid <= METRIC_TOL}
    return rep, artifact


def run_hj_check(cmd: Command):
    rng = np.random.default_rng(cmd.seed)
    n = 100
    cases = {
        "native": ({"E": 1.0, "k": 1.0}, rng.uniform(0.5, 5.0, n), rng.uniform(-3.0, 3.0, n)),
        "rotated": ({"theta": math.pi / 4, "E": 1.0, "lam": 0.3},
                    rng.uniform(0.5, 3.0, n), rng.uniform(0.5, 3.0, n)),
        "parabolic": ({"E": 1.0, "a": 1.0, "lam": 0.5},
                      rng.uniform(0.5, 1.5, n), rng.uniform(0.0, 1.3, n)),
    }
    out = {}
    for kind, (prm, xs, ys) in cases.items():
        r = max(abs(charts.hj_residual(kind, prm, float(x), float(y))) for x, y in zip(xs, ys))
        out[kind] = {"params": prm, "points": n, "max_residual": r, "passed": r <= HJ_TOL}
    return _header(cmd) | {"actions": out, "tolerance": HJ_TOL,
                           "passed": all(v["passed"] for v in out.values())}


def _write(path, text):
    with open(path, "w") as fh:
        fh.write(text)


def run(cmd: Command, stdout=None) -> int:
    """Execute ``cmd``; the JSON report goes to stdout and ``--out`` receives the artifact."""
    stdout = sys.stdout if stdout is None else stdout
    artifact = None
    if cmd.name == "verify-algebra":
        rep = run_verify_algebra(cmd)
    elif cmd.name == "verify-quantum":
        rep = run_verify_quantum(cmd)
    elif cmd.name == "trace":
        rep, traj = run_trace(cmd)
        if cmd.format == "csv" and cmd.out:
            buf = io.StringIO()
            traj.to_csv(buf)
            artifact = buf.getvalue()
    elif cmd.name == "spectrum":
        rep = run_spectrum(cmd)
    elif cmd.name == "embed":
        rep, artifact = run_embed(cmd)
    elif cmd.name == "hj-check":
        rep = run_hj_check(cmd)
    else:  # pragma: no cover - parse_args restricts the choices
        raise UsageError(f"unknown command {cmd.name}")
    text = dumps(rep) + "\n"
    if cmd.out:
        _write(cmd.out, artifact if artifact is not None else text)
    stdout.write(text)
    log.info("%s finished: passed=%s", cmd.name, rep["passed"])
    return EXIT_OK if rep["passed"] else EXIT_FAIL


def configure_logging():
    level = {"quiet": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}.get(
        os.environ.get("DARBOUX_LOG", "quiet").lower(), logging.ERROR)
    if not log.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        log.addHandler(handler)
    log.setLevel(level)


def main(argv=None) -> int:
    configure_logging()
    argv = sys.argv[1:] if argv is None else argv
    try:
        cmd = parse_args(argv)
        return run(cmd)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NoConvergence, NotBracketed, NodeMismatch, SpectrumUnbounded, RangeError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except DarbouxError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
