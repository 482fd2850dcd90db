import time

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from darboux import brackets, phase
from darboux.brackets import QuadraticCoeffs
from darboux.errors import ModelMismatch, ZeroObservable
from darboux.phase import ModelSpec, PhasePoint

FREE = ModelSpec.free()
MODELS = [FREE, ModelSpec.p1(0.5, 0.2, 0.1), ModelSpec.p2(0.5, 0.3, 0.2), ModelSpec.p3(1.0)]
P = PhasePoint(1, 0, 1, 1)


def test_bracket_examples():
    assert brackets.poisson_bracket("K", "H", PhasePoint(2.3, -1.1, 0.4, 0.9), FREE) == 0.0
    assert brackets.poisson_bracket("K", "X1", P, FREE) == pytest.approx(1.0, abs=1e-14)
    assert brackets.poisson_bracket("X1", "X2", P, FREE) == pytest.approx(2.0, abs=1e-14)


def test_fd_oracle_examples():
    assert brackets.fd_bracket_oracle("K", "X1", P, FREE, 1e-4) == pytest.approx(1.0, abs=1e-7)
    assert brackets.fd_bracket_oracle("X1", "K", P, FREE, 1e-4) == pytest.approx(-1.0, abs=1e-7)
    assert brackets.fd_bracket_oracle("H", "H", PhasePoint(1.4, 0.2, -0.5, 0.3), FREE, 1e-4) == 0.0
    with pytest.raises(ValueError):
        brackets.fd_bracket_oracle("H", "K", P, FREE, 0.0)


def test_nested_bracket_examples():
    m = ModelSpec.p2(1, 0, 0)
    R = brackets.nested_bracket_R(P, m)
    assert R == pytest.approx(-6.0, abs=1e-13)
    H = phase.eval_hamiltonian(P, m)
    R2 = phase.eval_observable("R2", P, m)
    assert R * R == pytest.approx(16 * H * H * R2, abs=1e-12)
    assert brackets.nested_bracket_R(PhasePoint(1, 0, 0, 0), m) == 0.0


def test_verify_relation_examples():
    assert brackets.verify_relation("Free_Casimir", PhasePoint(2, 1, 0, 2), FREE) <= 1e-12
    assert brackets.verify_relation("P3_Casimir", PhasePoint(2, 1, 0, 2), ModelSpec.p3(1.0)) <= 1e-12
    p = PhasePoint(1.3, -0.7, 0.4, 1.9)
    assert brackets.verify_relation("Free_KX2", p, FREE) <= 1e-12 * brackets.relation_scale("Free_KX2", p, FREE)
    with pytest.raises(ModelMismatch):
        brackets.verify_relation("P1_RR1", p, FREE)


def test_kx2_against_fd_oracle():
    p = PhasePoint(1.3, -0.7, 0.4, 1.9)
    fd = brackets.fd_bracket_oracle("K", "X2", p, FREE, 1e-4)
    assert fd == pytest.approx(-phase.eval_observable("X1", p, FREE), rel=1e-8)


@pytest.mark.parametrize("m", MODELS, ids=lambda m: m.potential)
def test_all_relations_on_random_sample(m):
    t0 = time.perf_counter()
    reports = brackets.verify_model_relations(m, 1000, 42)
    assert time.perf_counter() - t0 < 10
    assert reports, "every model has relations"
    for r in reports:
        assert r.passed, r.to_dict()
        assert r.max_scaled_residual <= 1e-9


def test_fourteen_relations_enumerated():
    assert len(brackets.RELATIONS) == 14
    assert sum(len(brackets.relations_for(m)) for m in MODELS) == 14


@pytest.mark.parametrize("m", MODELS, ids=lambda m: m.potential)
def test_conservation_on_random_sample(m):
    pts = phase.sample_points(1000, 42, m)
    for name, (val, scale) in brackets.conservation_residuals(m, pts).items():
        assert np.max(np.abs(val) / scale) <= 1e-10, name


@pytest.mark.parametrize("m", MODELS, ids=lambda m: m.potential)
def test_closed_form_agrees_with_fd_oracle(m):
    gaps = brackets.oracle_agreement(m, 1000, 42)
    assert max(gaps.values()) <= 1e-6, gaps


@given(st.integers(0, 999))
def test_antisymmetry_exact(i):
    pts = phase.sample_points(1000, 42)
    p = PhasePoint(*pts[:, i])
    for f, g in (("K", "X1"), ("X1", "X2"), ("H", "X2")):
        assert brackets.poisson_bracket(f, g, p, FREE) == -brackets.poisson_bracket(g, f, p, FREE)


def test_fd_antisymmetry_within_oracle_tolerance():
    pts = phase.sample_points(20, 3)
    for i in range(20):
        p = PhasePoint(*pts[:, i])
        a = brackets.fd_bracket_oracle("X1", "X2", p, FREE)
        b = brackets.fd_bracket_oracle("X2", "X1", p, FREE)
        assert abs(a + b) <= 1e-8 * (1 + abs(a))


def test_jacobi_identity():
    pts = phase.sample_points(200, 5)
    r = brackets.jacobi_residual("K", "X1", "X2", pts, FREE)
    assert np.max(np.abs(r)) <= 1e-9


def test_adjoint_examples():
    assert brackets.adjoint_transform(QuadraticCoeffs(3, 1, 0), 3) == QuadraticCoeffs(0, 1, 0)
    assert brackets.adjoint_transform(QuadraticCoeffs(1, 0, 0), 17.0) == QuadraticCoeffs(1, 0, 0)
    assert brackets.adjoint_transform(QuadraticCoeffs(0, 0, 5), 2) == QuadraticCoeffs(0, 0, 5)


def test_classification_examples():
    assert brackets.classify_integral(QuadraticCoeffs(0, 0, 1)) == "K2type"
    assert brackets.classify_integral(QuadraticCoeffs(1, 0, 7)) == "X1type"
    c = QuadraticCoeffs(0.3, -2, 1)
    assert brackets.classify_integral(c) == "X2type"
    # normal form X2 + aK^2 is reached at alpha = a/b = -0.15
    assert brackets.adjoint_transform(c, -0.15).a == pytest.approx(0.0, abs=1e-15)
    assert brackets.normal_form(c) == QuadraticCoeffs(0.0, 1.0, -0.5)
    with pytest.raises(ZeroObservable):
        brackets.classify_integral(QuadraticCoeffs(0, 0, 0))


finite = st.floats(-10, 10)


@given(finite, finite, finite, finite)
def test_classification_invariant_under_adjoint_flow(a, b, c, alpha):
    q = QuadraticCoeffs(a, b, c)
    if a == 0 and b == 0 and c == 0:
        return
    moved = brackets.adjoint_transform(q, alpha)
    if moved.a == 0 and moved.b == 0 and moved.c == 0:
        return
    assert brackets.classify_integral(moved) == brackets.classify_integral(q)


def test_adjoint_flow_is_generated_by_k():
    # d/dalpha of X2 along the K-flow equals {X2, K} = X1 modulo the sign convention
    p = PhasePoint(1.6, 0.3, -0.8, 0.5)
    assert brackets.poisson_bracket("X2", "K", p, FREE) == pytest.approx(
        phase.eval_observable("X1", p, FREE), rel=1e-13)
