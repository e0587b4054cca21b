import csv
import io
import math

import numpy as np
import pytest

from wcsbundle.thurston import (
    QuadratureSpec,
    ThurstonConfig,
    acoth,
    beta,
    beta_integrals,
    closed_form_integral,
    closed_form_integrand,
    direct_integrand,
    inner_integral_closed_form,
    node_csv,
    node_table,
    nonvanishing_check,
    quartic_roots,
    thurston_base,
    thurston_density,
    thurston_integral,
    thurston_integrand,
)


def chebyshev_nodes(n):
    k = np.arange(n)
    return 0.5 * (1 - np.cos((2 * k + 1) * np.pi / (2 * n)))


def test_base_examples():
    tri = thurston_base(3)
    np.testing.assert_allclose(tri.A([0, 0, 0, 0])[2], [0, 0, 0, 3], atol=1e-14)
    np.testing.assert_allclose(tri.J([0, 0, 0, 0])[2:, 2:], [[0, 1], [-1, 0]], atol=1e-14)
    assert beta(0.0) == beta(1.0) == 1.0
    with pytest.raises(ValueError):
        thurston_base(0)
    with pytest.raises(ValueError):
        ThurstonConfig(kappa=0, p=1)


def test_integrand_examples():
    assert thurston_integrand(1, 1, 0.0) == pytest.approx(150.4375, rel=1e-12)
    assert thurston_integrand(1, 1, 1.0) == pytest.approx(150.4375, rel=1e-12)
    expected = (4 / 16) * (3072 * 16 - 640 * 4 / 1.5625 - 25 / 2.44140625)
    assert closed_form_integrand(2, 0.5) == pytest.approx(expected, rel=1e-14)
    assert thurston_integrand(2, 1, 0.5) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(ValueError):
        thurston_integrand(0, 1, 0.5)


@pytest.mark.parametrize("kappa", [1, 2])
def test_pointwise_identity(kappa):
    for t in chebyshev_nodes(20):
        d = thurston_density(kappa, t)
        for p in (1, 2, 3):
            assert d(p) == pytest.approx(closed_form_integrand(p, t), rel=1e-6)


def test_density_coefficients_exact():
    # 192 p^6 - 40 beta^-2 p^4 - (25/16) beta^-4 p^2, no odd powers
    t = 0.3
    b = beta(t)
    d = thurston_density(1, t)
    assert set(d.coeffs) == {2, 4, 6}
    assert d[6] == pytest.approx(192.0, rel=1e-12)
    assert d[4] == pytest.approx(-40.0 / b**2, rel=1e-12)
    assert d[2] == pytest.approx(-25.0 / 16.0 / b**4, rel=1e-12)


def test_independent_of_other_coordinates(rng):
    for p in (1.0, 2.0):
        for t in (0.2, 0.7):
            ref = closed_form_integrand(p, t)
            vals = []
            for _ in range(3):
                x5 = rng.uniform(-2, 2, 5)
                x5[2] = t
                vals.append(direct_integrand(p, 1, x5))
            assert max(abs(v - ref) for v in vals) <= 1e-10 * abs(ref)


def test_coordinate_integrand_linear_in_kappa():
    for t in (0.1, 0.6):
        for p in (1.0, 3.0):
            base = thurston_integrand(p, 1, t, frame="coordinate")
            for kappa in (2, 3, -1, -2):
                val = thurston_integrand(p, kappa, t, frame="coordinate")
                assert val == pytest.approx(kappa * base, rel=1e-8)


def test_orthonormal_integrand_sign_tracks_orientation():
    t = 0.4
    assert thurston_integrand(1, -1, t) == pytest.approx(-closed_form_integrand(1, t), rel=1e-10)
    with pytest.raises(ValueError):
        thurston_density(1, t, frame="polar")


def test_quadrature_rule():
    q = QuadratureSpec(64)
    x, w = q.rule()
    assert w.sum() == pytest.approx(1.0, abs=1e-14)
    assert np.all((x > 0) & (x < 1))
    assert q.integrate(x**5) == pytest.approx(1 / 6, rel=1e-14)
    with pytest.raises(ValueError):
        QuadratureSpec(1)


def test_beta_integrals():
    i2, i4 = beta_integrals()
    assert round(i2, 6) == 0.744327
    assert round(i4, 6) == 0.564398
    q = QuadratureSpec(64)
    x, _ = q.rule()
    assert q.integrate(beta(x) ** -2) == pytest.approx(i2, abs=1e-10)
    assert q.integrate(beta(x) ** -4) == pytest.approx(i4, abs=1e-10)
    # antiderivative of 1/beta: (1/sqrt5) ln((sqrt5 + 2t - 1)/(sqrt5 - 2t + 1))
    r5 = math.sqrt(5)
    assert q.integrate(1 / beta(x)) == pytest.approx(2 * math.log((r5 + 1) / (r5 - 1)) / r5, abs=1e-12)
    assert acoth(r5) == pytest.approx(math.atanh(1 / r5), rel=1e-15)


def test_inner_integral_and_nonvanishing_expression():
    assert inner_integral_closed_form(1) == pytest.approx(2581.5, abs=0.05)
    for p in (1, 2, 5):
        v, _ = nonvanishing_check(p)
        assert inner_integral_closed_form(p) == pytest.approx(16 / 15 * v, rel=1e-12)


@pytest.mark.parametrize("p,kappa", [(1, 1), (2, 1), (1, 2), (-2, 1)])
def test_integral_matches_closed_form(p, kappa):
    assert thurston_integral(p, kappa) == pytest.approx(closed_form_integral(p, kappa), rel=1e-8)


def test_integral_threads_identical():
    q = QuadratureSpec(8)
    assert thurston_integral(2, 1, q, threads=1) == thurston_integral(2, 1, q, threads=4)


def test_integral_errors():
    with pytest.raises(ValueError):
        thurston_integral(0, 1)
    with pytest.raises(ValueError):
        closed_form_integral(0, 1)
    with pytest.raises(ValueError):
        thurston_integral(1, 0)


def test_nonvanishing():
    v, nz = nonvanishing_check(1)
    assert v == pytest.approx(2420.2, abs=0.05)
    assert nz
    for p in range(-10, 11):
        if p:
            assert nonvanishing_check(p)[1]


def test_quartic_roots():
    roots = quartic_roots()
    real = [r.real for r in roots if r.imag == 0]
    imag = [r.imag for r in roots if r.real == 0]
    assert sorted(abs(r) for r in real) == pytest.approx([0.424868] * 2, abs=1e-4)
    assert sorted(abs(r) for r in imag) == pytest.approx([0.159514] * 2, abs=1e-4)
    for r in real:
        assert abs(nonvanishing_check(r)[0]) < 1e-9
    # imaginary roots: p^2 = -s^2
    r5 = math.sqrt(5)
    for s in imag:
        q = -(s * s)
        val = 10 * (-1 - 24 * q + 288 * q * q) - 3 * r5 * (1 + 64 * q) * acoth(r5)
        assert abs(val) < 1e-9


def test_node_csv():
    rows = node_table(2, 1, QuadratureSpec(6))
    text = node_csv(rows)
    parsed = list(csv.DictReader(io.StringIO(text)))
    assert list(parsed[0]) == ["theta2", "beta", "integrand", "closed_form", "abs_diff"]
    assert len(parsed) == 6
    assert all(float(r["abs_diff"]) < 1e-6 for r in parsed)
    neg = node_table(1, -2, QuadratureSpec(4))
    assert max(r[4] / abs(r[3]) for r in neg) < 1e-10
