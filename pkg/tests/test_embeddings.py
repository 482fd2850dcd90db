import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from darboux import embeddings as emb
from darboux.errors import DomainError


def _z_oracle(u):
    return float(mpmath.quad(lambda t: mpmath.sqrt(2 * t - 1 / (2 * t)), [0.5, u]))


def test_euclidean_examples():
    np.testing.assert_allclose(emb.embed_euclidean(0.5, 0.0).as_array(), [1, 0, 0], atol=1e-15)
    np.testing.assert_allclose(emb.embed_euclidean(0.5, math.pi / 2).as_array(), [0, 1, 0], atol=1e-15)
    assert emb.z_profile(1.0) == pytest.approx(_z_oracle(1.0), abs=1e-12)


def test_pseudo_examples():
    p = emb.embed_pseudo(1.0, 2.0)
    np.testing.assert_allclose(p.as_array(), [2 * math.sqrt(2), -2.7, -3.7], atol=1e-14)
    assert p.signature == emb.LORENTZIAN
    np.testing.assert_array_equal(emb.embed_pseudo(0.0, 3.3).as_array(), [0, 0, 0])


@given(st.floats(0, 10), st.floats(-10, 10))
def test_pseudo_y_minus_t(u, v):
    p = emb.embed_pseudo(u, v)
    assert p.Y - p.third == pytest.approx(math.sqrt(u), abs=1e-12 * (1 + abs(p.Y)))


def test_domain_errors():
    with pytest.raises(DomainError):
        emb.embed_euclidean(0.49, 0.0)
    with pytest.raises(DomainError):
        emb.embed_pseudo(-0.1, 0.0)
    with pytest.raises(ValueError):
        emb.embed("spherical", 1.0, 0.0)


@pytest.mark.parametrize("u", [0.5, 0.7, 1.0, 2.5, 6.0])
def test_z_against_mpmath(u):
    assert emb.z_profile(u) == pytest.approx(_z_oracle(u), abs=1e-12)


def test_adaptive_quad_oracle():
    assert emb.adaptive_quad(np.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-14)
    assert emb.adaptive_quad(lambda x: np.sqrt(x), 0.0, 1.0) == pytest.approx(2 / 3, abs=1e-12)


@pytest.mark.parametrize("u", [0.5, 0.8, 1.0, 3.0, 10.0])
def test_closed_form_cross_check(u):
    assert emb.z_closed_form(u) == pytest.approx(emb.z_profile(u), abs=1e-12)
    assert not emb.direct_amplitude_valid(u)


def test_z_increasing():
    us = np.linspace(0.5, 5, 60)
    zs = [emb.z_profile(u) for u in us]
    assert np.all(np.diff(zs) > 0)


def test_z_cache_accuracy():
    cache = emb.z_cache(4.0)
    us = np.linspace(0.5, 4.0, 37)
    ref = np.array([emb.z_profile(u) for u in us])
    np.testing.assert_allclose(cache(us), ref, atol=1e-9)
    with pytest.raises(DomainError):
        cache(4.5)


@given(st.floats(0.5, 5), st.floats(-4, 4), st.floats(-4, 4))
def test_rotational_symmetry(u, v, s):
    a = emb.embed_euclidean(u, v).as_array()
    b = emb.embed_euclidean(u, v + s).as_array()
    c, d = math.cos(s), math.sin(s)
    rot = np.array([c * a[0] - d * a[1], d * a[0] + c * a[1], a[2]])
    np.testing.assert_allclose(b, rot, atol=1e-12)


def test_metric_examples():
    assert emb.induced_metric_residual(emb.LORENTZIAN, 1.0, 2.0, 1e-5) <= 1e-8
    assert emb.induced_metric_residual(emb.EUCLIDEAN, 1.0, 0.3, 1e-5) <= 1e-8
    assert emb.induced_metric_residual(emb.EUCLIDEAN, 0.5, 0.3, 1e-5) <= 1e-5


def test_metric_grids():
    assert emb.metric_residual_grid(emb.EUCLIDEAN, (0.6, 3.0), (0.0, 2 * math.pi)) <= 1e-6
    assert emb.metric_residual_grid(emb.LORENTZIAN, (0.1, 3.0), (0.0, 2 * math.pi)) <= 1e-6


def test_metric_components_for_pseudo():
    guu, gvv, guv = emb.induced_metric(emb.LORENTZIAN, 1.3, -0.7)
    assert guu == pytest.approx(2.6, abs=1e-8)
    assert gvv == pytest.approx(2.6, abs=1e-8)
    assert guv == pytest.approx(0.0, abs=1e-8)


def test_mesh_two_by_two():
    text = emb.mesh_text(emb.EUCLIDEAN, (0.5, 1.0), (0.0, 1.0), 2, 2)
    verts, faces = emb.parse_obj(text)
    assert verts.shape == (4, 3)
    assert faces == [[1, 3, 4, 2]]


def test_mesh_rings_share_radius():
    verts, _ = emb.parse_obj(emb.mesh_text(emb.EUCLIDEAN, (0.6, 2.0), (0.0, 2 * math.pi), 5, 9))
    rings = verts.reshape(5, 9, 3)
    for i, u in enumerate(np.linspace(0.6, 2.0, 5)):
        r = np.hypot(rings[i, :, 0], rings[i, :, 1])
        np.testing.assert_allclose(r, math.sqrt(2 * u), rtol=1e-14)
        assert np.ptp(rings[i, :, 2]) == 0


def test_lorentzian_mesh_header_and_column(tmp_path):
    path = tmp_path / "m.obj"
    text = emb.export_mesh(emb.LORENTZIAN, (0.1, 1.0), (-1.0, 1.0), 3, 4, path)
    assert path.read_text() == text
    assert "# signature (+,+,-): third column is T" in text.splitlines()[:3]
    verts, faces = emb.parse_obj(text)
    assert len(faces) == 2 * 3
    u, v = 0.1, -1.0
    assert verts[0, 2] == pytest.approx(emb.embed_pseudo(u, v).third, abs=1e-15)


def test_grid_csv():
    text = emb.grid_csv(emb.EUCLIDEAN, (0.5, 1.0), (0.0, 1.0), 3, 2)
    lines = text.splitlines()
    assert lines[0] == "u,v,X,Y,Z"
    assert len(lines) == 7
    assert emb.grid_csv(emb.LORENTZIAN, (0.0, 1.0), (0.0, 1.0), 2, 2).startswith("u,v,X,Y,T\n")


def test_mesh_validation():
    with pytest.raises(ValueError):
        emb.mesh_text(emb.EUCLIDEAN, (0.5, 1.0), (0.0, 1.0), 1, 3)
    with pytest.raises(DomainError):
        emb.mesh_text(emb.EUCLIDEAN, (0.3, 1.0), (0.0, 1.0), 3, 3)
