import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wcsbundle import hyperdual as hd
from wcsbundle.geometry import (
    ChartMetric,
    DegeneracyError,
    GeometryError,
    christoffel,
    compatible_triple,
    constant_form,
    euclidean_metric,
    fubini_study_form,
    fubini_study_metric,
    nabla_J,
    riemann,
    round_sphere_metric,
    sectional_curvature,
    sphere_product_form,
    sphere_product_metric,
    thurston_metric,
    thurston_symplectic_form,
)
from wcsbundle.tensor import normal_form_J

from conftest import warped_metric

unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
polar = st.floats(min_value=0.3, max_value=math.pi - 0.3, allow_nan=False)


def test_sphere_christoffel_and_curvature():
    th = 1.1
    gam = christoffel(round_sphere_metric(), [th, 0.4])
    assert gam[0, 1, 1] == pytest.approx(-math.sin(th) * math.cos(th), rel=1e-12)
    assert gam[1, 0, 1] == pytest.approx(1.0 / math.tan(th), rel=1e-12)
    assert gam[1, 1, 0] == pytest.approx(1.0 / math.tan(th), rel=1e-12)
    assert abs(gam[0, 0, 0]) < 1e-14
    for r in (1.0, 2.0):
        cd = riemann(round_sphere_metric(r), [th, 0.4])
        assert sectional_curvature(cd, [1, 0], [0, 1]) == pytest.approx(1 / r**2, rel=1e-12)
        assert cd.riemann[0, 1, 1, 0] > 0


def test_flat_metric_has_zero_curvature():
    cd = riemann(euclidean_metric(4), np.zeros(4))
    assert np.abs(cd.riemann).max() == 0.0


def check_symmetries(R, tol):
    s = max(1.0, np.abs(R).max())
    assert np.abs(R + R.transpose(1, 0, 2, 3)).max() < tol * s
    assert np.abs(R + R.transpose(0, 1, 3, 2)).max() < tol * s
    assert np.abs(R - R.transpose(2, 3, 0, 1)).max() < tol * s
    bianchi = R + np.einsum("jkil->ijkl", R) + np.einsum("kijl->ijkl", R)
    assert np.abs(bianchi).max() < tol * s


@settings(max_examples=15, deadline=None)
@given(st.lists(unit, min_size=4, max_size=4), st.sampled_from([1.0, 2.0, -3.0]))
def test_curvature_symmetries_thurston(x, kappa):
    tri = compatible_triple(thurston_metric(), thurston_symplectic_form(kappa))
    check_symmetries(riemann(tri.gtilde, x).riemann, 1e-8)


@settings(max_examples=10, deadline=None)
@given(st.lists(st.floats(-0.7, 0.7), min_size=3, max_size=3), st.integers(0, 5))
def test_curvature_symmetries_warped(x, seed):
    check_symmetries(riemann(warped_metric(3, seed), x).riemann, 1e-8)


@settings(max_examples=15, deadline=None)
@given(st.lists(unit, min_size=4, max_size=4), st.sampled_from([1.0, 2.0, -1.0]))
def test_triple_invariants(x, kappa):
    tri = compatible_triple(thurston_metric(), thurston_symplectic_form(kappa))
    J = tri.J(x)
    gt = tri.gtilde(x)
    om = tri.omega_at(x)
    assert np.abs(J @ J + np.eye(4)).max() < 1e-12
    assert np.abs(J @ gt - om).max() < 1e-12  # omega(u, v) = gtilde(J u, v)
    assert np.abs(J @ gt @ J.T - gt).max() < 1e-12  # J is gtilde-orthogonal
    assert np.all(np.linalg.eigvalsh(gt) > 0)
    # A* = -A for this metric
    assert np.abs(tri.A_adjoint(x) + tri.A(x)).max() < 1e-12


@pytest.mark.parametrize("t", [0.0, 0.3, 0.75, 1.0])
def test_thurston_triple_closed_forms(t):
    kappa = 2.0
    b = 1 + t - t * t
    tri = compatible_triple(thurston_metric(), thurston_symplectic_form(kappa))
    x = [0.2, t, 0.5, 0.1]
    A = np.array(
        [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, t * kappa / b, kappa / b], [0, 0, (-1 - t) * kappa / b, -t * kappa / b]]
    )
    r = math.sqrt(b)
    J = np.array([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, t / r, 1 / r], [0, 0, (-1 - t) / r, -t / r]])
    gt = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, kappa / r, -t * kappa / r], [0, 0, -t * kappa / r, (1 + t) * kappa / r]])
    np.testing.assert_allclose(tri.A(x), A, atol=1e-13)
    np.testing.assert_allclose(tri.J(x), J, atol=1e-13)
    np.testing.assert_allclose(tri.gtilde(x), gt, atol=1e-13)
    assert np.linalg.det(thurston_metric()(x)) == pytest.approx(b, abs=1e-14)


def test_thurston_gluing_identities():
    g = thurston_metric()
    g0, g1 = g([0, 0, 0, 0]), g([0, 1, 0, 0])
    assert (g0[2, 3], g1[2, 3], g0[3, 3], g1[3, 3]) == (0.0, -1.0, 1.0, 2.0)
    assert np.linalg.det(g0) == pytest.approx(np.linalg.det(g1))


@settings(max_examples=10, deadline=None)
@given(polar, unit, polar, unit)
def test_kahler_examples_have_parallel_J(t1, p1, t2, p2):
    tri = compatible_triple(sphere_product_metric(), sphere_product_form())
    x = [t1, 6 * p1, t2, 6 * p2]
    assert np.abs(nabla_J(tri, x)).max() < 1e-10
    np.testing.assert_allclose(tri.gtilde(x), sphere_product_metric()(x), atol=1e-13)
    fs = compatible_triple(fubini_study_metric(), fubini_study_form())
    assert np.abs(nabla_J(fs, [p1 - 0.5, t1 - 1.5, p2, 0.1])).max() < 1e-10


def test_flat_parallel_J():
    tri = compatible_triple(euclidean_metric(4), constant_form(normal_form_J(4)))
    assert np.abs(nabla_J(tri, np.zeros(4))).max() == 0.0


@settings(max_examples=10, deadline=None)
@given(st.lists(unit, min_size=4, max_size=4))
def test_thurston_nabla_J_cyclic_identity(x):
    # d omega = 0 makes the cyclic sum of g((nabla_X J) Y, Z) vanish
    tri = compatible_triple(thurston_metric(), thurston_symplectic_form(1.0))
    nJ = nabla_J(tri, x)
    low = np.einsum("ijk,kl->ijl", nJ, tri.gtilde(x))
    cyc = low + np.einsum("jki->ijk", low) + np.einsum("kij->ijk", low)
    assert np.abs(cyc).max() < 1e-10
    assert np.abs(nJ).max() > 1e-3  # not Kahler


def test_degenerate_inputs():
    with pytest.raises(DegeneracyError):
        compatible_triple(euclidean_metric(2), constant_form(np.zeros((2, 2)))).J([0, 0])
    with pytest.raises(GeometryError):
        constant_form(np.ones((2, 2)))
    bad = ChartMetric(2, lambda c: np.array([[1.0, 0.0], [0.0, -1.0]]), "indefinite")
    with pytest.raises(GeometryError):
        bad([0.0, 0.0])
