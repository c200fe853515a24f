import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from besselmult import DiagonalError, GridFunction, OverlapError, QuadGrid, QuadratureCeilingError, ValidationError
from besselmult.grids import panel_grid_1d
from besselmult.impower import (
    KB_DIRECT_CEILING,
    c_constants,
    decomposition_sweep,
    impower_apply,
    kb_auto,
    kb_decomposed,
    kb_direct,
    kb_direct_many,
    kb_integralrep,
    kb_lifted,
    kernel_matrix,
    remainder_scale,
    term1,
    term2,
)


def test_constants_vanish_at_zero():
    assert c_constants(0.5, 0.0) == (0j, 0j, 0j)
    small = c_constants(0.5, 1e-9)
    assert all(abs(c) < 1e-8 for c in small)


def test_c2_modulus_example():
    assert abs(c_constants(0.3, 1.0)[1]) == pytest.approx(math.sqrt(math.tanh(math.pi) / math.pi), rel=1e-10)
    # the commonly quoted 0.563138 is mis-rounded (true value 0.5631370)
    assert abs(abs(c_constants(0.3, 1.0)[1]) - 0.563138) < 2e-6


@pytest.mark.parametrize("b", [0.3, 1.0, 4.0, 17.0, -2.5])
def test_constant_moduli_identities(b):
    ab = abs(b)
    c1, c2, c3 = c_constants(1.0, b)
    assert abs(c3) == pytest.approx(math.sqrt(ab * math.sinh(math.pi * ab) / math.pi), rel=1e-10)
    assert abs(c2) == pytest.approx(math.sqrt(ab * math.tanh(math.pi * ab) / math.pi), rel=1e-10)
    # alpha = 1: |Gamma(1+ib)/Gamma(-ib)| = |b|, so |c1| = 2|b|
    assert abs(c1) == pytest.approx(2 * ab, rel=1e-10)


def test_c1_growth_alpha1_limit():
    ratios = [abs(c_constants(1.0, b)[0]) / b for b in (10.0, 100.0, 400.0)]
    assert all(r == pytest.approx(2.0, rel=1e-10) for r in ratios)


@pytest.mark.parametrize("alpha", [-0.5, 0.5, 2.0])
def test_c1_growth_exponent(alpha):
    bs = np.array([50.0, 100.0, 200.0, 400.0])
    mods = np.array([abs(c_constants(alpha, b)[0]) for b in bs])
    slope = np.polyfit(np.log(bs), np.log(mods), 1)[0]
    assert slope == pytest.approx((alpha + 1) / 2, abs=1e-3)


def test_quarter_variant_ratio():
    alpha, b = 2.0, 1.3
    c1 = c_constants(alpha, b)[0]
    c1p = c_constants(alpha, b, "quarter")[0]
    assert c1p / c1 == pytest.approx(math.gamma(1.5) / math.gamma(0.75), rel=1e-12)
    with pytest.raises(ValidationError):
        c_constants(alpha, b, "nope")


def test_kb_direct_basic():
    assert kb_direct(0.5, 0.0, 1.0, 2.0) == 0
    a = kb_direct(0.5, 1.3, 1.0, 2.5)
    assert a == pytest.approx(kb_direct(0.5, 1.3, 2.5, 1.0), rel=1e-12)
    with pytest.raises(DiagonalError):
        kb_direct(0.5, 1.0, 1.0, 1.0)
    with pytest.raises(DiagonalError):
        kb_direct(0.5, 1.0, 1.0, 1.0005)
    with pytest.raises(QuadratureCeilingError):
        kb_direct(0.5, KB_DIRECT_CEILING + 1, 1.0, 2.0)
    with pytest.raises(ValidationError):
        kb_direct(-1.0, 1.0, 1.0, 2.0)
    with pytest.raises(ValidationError):
        kb_direct(0.5, 1.0, -1.0, 2.0)


def test_kb_direct_many_matches_single():
    x = np.array([0.3, 1.0, 4.0])
    y = np.array([1.0, 2.2, 0.7])
    many = kb_direct_many(0.5, [0.5, 2.0], x, y)
    for i, b in enumerate((0.5, 2.0)):
        assert np.allclose(many[i], kb_direct(0.5, b, x, y), rtol=1e-10, atol=0)


XY = [(1.0, 3.0), (1.0, 1.5), (0.2, 5.0), (4.0, 3.1), (0.5, 0.45), (7.0, 0.1)]


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("b", [0.5, 2.0])
def test_integralrep_matches_direct(alpha, b):
    x, y = np.array(XY).T
    d = kb_direct(alpha, b, x, y)
    r = kb_integralrep(alpha, b, x, y)
    assert np.max(np.abs(r - d) / np.abs(d)) < 1e-6


@pytest.mark.parametrize("alpha", [-0.5, -0.2, 0.0, 0.5, 2.0])
@pytest.mark.parametrize("b", [0.5, 3.0])
def test_lifted_matches_direct(alpha, b):
    x, y = np.array(XY).T
    d = kb_direct(alpha, b, x, y)
    r = kb_lifted(alpha, b, x, y)
    assert np.max(np.abs(r - d) / np.abs(d)) < 1e-6


def test_integralrep_rejects_nonpositive_alpha():
    with pytest.raises(ValidationError):
        kb_integralrep(0.0, 1.0, 1.0, 2.0)
    with pytest.raises(ValidationError):
        kb_integralrep(-0.5, 1.0, 1.0, 2.0)


def test_integralrep_far_field():
    # x >> y: the s-integral degenerates to B(1/2, alpha/2) x^{-2ib-alpha-1},
    # which is exactly the c1 term
    for alpha in (0.5, 1.0, 2.0):
        x, y = 100.0, 0.01
        v = kb_integralrep(alpha, 1.0, x, y)
        c1 = c_constants(alpha, 1.0)[0]
        approx = c1 * np.exp(-(2j + alpha + 1) * np.log(x))
        assert abs(v / approx - 1) < 1e-3


@settings(max_examples=30, deadline=None)
@given(alpha=st.floats(-0.9, 3.0), b=st.floats(0.2, 20.0), x=st.floats(0.05, 20.0), r=st.floats(0.05, 0.9))
def test_kernel_symmetry_property(alpha, b, x, r):
    y = x * (1 + r)
    a = kb_auto(alpha, b, x, y)
    c = kb_auto(alpha, b, y, x)
    assert abs(a - c) <= 1e-10 * abs(a)


def test_conjugate_symmetry_in_b():
    a = kb_auto(0.5, 2.0, 1.0, 2.0)
    c = kb_auto(0.5, -2.0, 1.0, 2.0)
    assert c == pytest.approx(np.conj(a), rel=1e-10)


def test_decomposition_regions():
    b, alpha = 1.0, 0.5
    local = kb_decomposed(alpha, b, 1.0, 1.5)
    c2 = c_constants(alpha, b)[1]
    assert local.term2 != 0
    assert abs(local.term2) == pytest.approx(abs(c2) * 1.5 ** (-alpha / 2) / 0.5, rel=1e-12)
    glob = kb_decomposed(alpha, b, 1.0, 3.0)
    assert glob.term2 == 0
    assert glob.remainder_bound >= 0
    assert glob.remainder_measured == pytest.approx(glob.direct - glob.term1, rel=1e-12)


def test_decomposition_example_alpha05():
    d = kb_decomposed(0.5, 1.0, 1.0, 3.0)
    c3 = c_constants(0.5, 1.0)[2]
    # cross-check reference
    assert d.direct == pytest.approx(kb_integralrep(0.5, 1.0, 1.0, 3.0), rel=1e-6)
    assert float(d.normalized_remainder(c3)) < 10


def test_decomposition_reference_auto():
    a = kb_decomposed(0.5, 1.0, [0.5, 2.0], [1.7, 0.6])
    b = kb_decomposed(0.5, 1.0, [0.5, 2.0], [1.7, 0.6], reference="auto")
    assert np.allclose(a.remainder_measured, b.remainder_measured, rtol=1e-5)
    with pytest.raises(ValidationError):
        kb_decomposed(0.5, 1.0, 1.0, 2.0, reference="x")


@pytest.mark.parametrize("alpha", [-0.5, 0.5, 2.0])
def test_normalized_remainder_homogeneous(alpha):
    # K_b and both main terms scale like lambda^{-2ib-alpha-1}; so does the bound
    b = 1.0
    c3 = c_constants(alpha, b)[2]
    r1 = kb_decomposed(alpha, b, 0.4, 1.0, reference="auto").normalized_remainder(c3)
    r2 = kb_decomposed(alpha, b, 4.0, 10.0, reference="auto").normalized_remainder(c3)
    assert r1 == pytest.approx(r2, rel=1e-8)


def test_decomposition_sweep_small():
    out = decomposition_sweep(0.5, [0.5, 1.0], 9, variants=("corrected", "quarter"))
    assert set(out) == {("corrected", 0.5), ("corrected", 1.0), ("quarter", 0.5), ("quarter", 1.0)}
    assert all(np.isfinite(v) and v > 0 for v in out.values())


def test_remainder_scale():
    assert remainder_scale(1.0, 1.0, 1.0) == pytest.approx(1 / 16)


def test_kernel_matrix_methods():
    xs = np.array([0.2, 3.0])
    ys = np.array([1.0, 1.2, 1.4])
    auto = kernel_matrix(0.5, 1.0, xs, ys)
    assert auto.shape == (2, 3)
    for m in ("lifted", "integralrep", "direct"):
        assert np.allclose(kernel_matrix(0.5, 1.0, xs, ys, m), auto, rtol=1e-6)
    assert np.allclose(kernel_matrix(0.5, 1.0, xs, ys, "term1"), term1(0.5, 1.0, xs[:, None], ys[None, :]))
    assert np.allclose(kernel_matrix(0.5, 1.0, xs, ys, "term2"), term2(0.5, 1.0, xs[:, None], ys[None, :]))
    with pytest.raises(ValidationError):
        kernel_matrix(0.5, 1.0, xs, ys, "bogus")


@pytest.fixture(scope="module")
def source():
    alpha = -0.5
    grid = panel_grid_1d([1.0, 1.05, 1.1], alpha, 20)
    f = GridFunction.from_callable(grid, lambda y: 1.0 + y[:, 0])
    ev = QuadGrid(np.array([[0.5], [1.3], [2.0]]), np.ones(3))
    return alpha, grid, f, ev


def test_impower_apply_overlap(source):
    alpha, grid, f, _ = source
    bad = QuadGrid(np.array([[1.02], [3.0]]), np.ones(2))
    with pytest.raises(OverlapError):
        impower_apply(alpha, 1.0, f, bad)


def test_impower_apply_linearity(source):
    alpha, grid, f, ev = source
    g = GridFunction.from_callable(grid, lambda y: np.cos(3 * y[:, 0]))
    lhs = impower_apply(alpha, 2.0, f * 2.5 + g, ev).values
    rhs = 2.5 * impower_apply(alpha, 2.0, f, ev).values + impower_apply(alpha, 2.0, g, ev).values
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=0)
    assert np.allclose(impower_apply(alpha, 2.0, f * -3.0, ev).values,
                       -3.0 * impower_apply(alpha, 2.0, f, ev).values, rtol=1e-13)


def test_impower_apply_b_zero(source):
    alpha, _, f, ev = source
    assert np.all(impower_apply(alpha, 0.0, f, ev).values == 0)


def test_impower_apply_dominated_by_c2_term():
    alpha = -0.5
    for b in (5.0, 10.0, 20.0):
        eps = 0.05 / b
        grid = panel_grid_1d([1.0, 1.0 + eps], alpha, 40)
        f = GridFunction.from_callable(grid, lambda y: np.ones(len(y)))
        x = 1.0 + 3 * eps
        ev = QuadGrid(np.array([[x]]), np.ones(1))
        full = impower_apply(alpha, b, f, ev).values[0]
        local = impower_apply(alpha, b, f, ev, method="term2").values[0]
        # analytic-quadrature oracle for the integrated c2 term
        c2 = c_constants(alpha, b)[1]
        kern = lambda y: c2 * (x * y) ** (-alpha / 2) * np.exp(-(2j * b + 1) * np.log(x - y)) * y ** alpha
        re, _ = integrate.quad(lambda y: kern(y).real, 1.0, 1.0 + eps, epsabs=1e-14)
        im, _ = integrate.quad(lambda y: kern(y).imag, 1.0, 1.0 + eps, epsabs=1e-14)
        assert local == pytest.approx(re + 1j * im, rel=1e-10)
        assert abs(full - local) / abs(full) < 0.1
