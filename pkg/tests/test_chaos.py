import math

import numpy as np
import pytest

from chaoskit import reference
from chaoskit.chaos import (
    ChaosElement,
    contraction_profile,
    eval_chaos_element,
    eval_integral,
    excess_kurtosis_exact,
    fourth_moment_exact,
    hermite,
    product_formula,
    sample_integral,
    sample_integral2_spectral,
    second_moment_exact,
)
from chaoskit.rng import stream
from chaoskit.tensors import SymTensor, basis_tensor, sym, symmetrize, tensor


def test_hermite_low_orders():
    x = np.linspace(-3.0, 3.0, 7)
    np.testing.assert_allclose(hermite(0, x), np.ones_like(x))
    np.testing.assert_allclose(hermite(1, x), x)
    np.testing.assert_allclose(hermite(2, x), x * x - 1.0)
    np.testing.assert_allclose(hermite(3, x), x**3 - 3.0 * x)
    np.testing.assert_allclose(hermite(4, x), x**4 - 6.0 * x * x + 3.0)


def test_eval_integral_order1():
    f = sym(np.array([2.0, -1.0]))
    xi = np.array([[1.0, 3.0]])
    assert eval_integral(f, xi)[0] == pytest.approx(-1.0)


def test_eval_integral_order2_is_quadratic_form_minus_trace():
    rng = stream(5, "chaos:order2")
    a = rng.standard_normal((3, 3))
    f = sym(a)
    xi = rng.standard_normal((50, 3))
    got = eval_integral(f, xi)
    want = np.einsum("ni,ij,nj->n", xi, f.coeffs, xi) - np.trace(f.coeffs)
    np.testing.assert_allclose(got, want, rtol=1e-12)


def test_eval_integral_diagonal_gives_squared_hermite():
    # I_2(e1x e1) = He_2(xi_1) = xi_1^2 - 1
    f = sym(basis_tensor(3, 0, 0).coeffs)
    xi = stream(5, "chaos:diag").standard_normal((20, 3))
    np.testing.assert_allclose(eval_integral(f, xi), xi[:, 0] ** 2 - 1.0)


def test_eval_integral_cross_gives_product():
    # I_2(symmetrize(e1 x e2)) = xi_1 xi_2
    f = symmetrize(basis_tensor(2, 0, 1))
    xi = stream(5, "chaos:cross").standard_normal((20, 2))
    np.testing.assert_allclose(eval_integral(f, xi), xi[:, 0] * xi[:, 1],
                               rtol=1e-12)


def test_eval_integral_order3_mixed():
    # I_3 on symmetrize(e1 x e1 x e2) evaluates to He_2(x1) He_1(x2)
    f = symmetrize(basis_tensor(2, 0, 0, 1))
    xi = stream(5, "chaos:order3").standard_normal((20, 2))
    want = (xi[:, 0] ** 2 - 1.0) * xi[:, 1]
    np.testing.assert_allclose(eval_integral(f, xi), want, rtol=1e-12)


def test_eval_integral_accepts_single_point():
    f = symmetrize(basis_tensor(2, 0, 1))
    assert eval_integral(f, np.array([1.0, 2.0])) == pytest.approx(2.0)


def test_eval_integral_symmetrizes_higher_order_input():
    rng = stream(5, "chaos:implicit")
    raw = tensor(rng.standard_normal((2, 2, 2)))
    xi = rng.standard_normal((10, 2))
    np.testing.assert_allclose(eval_integral(raw, xi),
                               eval_integral(symmetrize(raw), xi), rtol=1e-12)


@pytest.mark.parametrize("n,d", [(1, 2), (2, 2), (2, 4), (3, 2), (3, 4)])
def test_eval_integral_matches_polynomial_oracle(n, d):
    rng = stream(17, f"chaos:polyref:{n}:{d}")
    f = sym(rng.standard_normal((d,) * n))
    xi = rng.standard_normal((25, d))
    want = [reference.eval_polynomial(reference.integral_polynomial(f), x)
            for x in xi]
    np.testing.assert_allclose(eval_integral(f, xi), want,
                               rtol=0, atol=1e-10)


def test_chaos_element_mean_and_call():
    const = tensor(np.array(2.5))
    f = sym(np.array([1.0, 0.0]))
    c = ChaosElement({0: const, 1: f})
    assert c.mean == 2.5
    xi = np.array([[1.0, 7.0], [0.0, 0.0]])
    np.testing.assert_allclose(c(xi), [3.5, 2.5])


def test_chaos_element_order_mismatch():
    with pytest.raises(ValueError):
        ChaosElement({2: sym(np.array([1.0, 0.0]))})


def test_product_formula_squared_gaussian():
    # I_1(e1)^2 = He_2(xi) + 1: constant 1 plus the diagonal order-2 kernel
    f = sym(basis_tensor(2, 0).coeffs)
    c = product_formula(f, f)
    assert c.orders() == [0, 2]
    assert c.mean == pytest.approx(1.0)
    np.testing.assert_allclose(c.terms[2].coeffs, basis_tensor(2, 0, 0).coeffs)


def test_product_formula_disjoint_supports_have_no_constant():
    f = sym(basis_tensor(2, 0).coeffs)
    g = sym(basis_tensor(2, 1).coeffs)
    c = product_formula(f, g)
    assert c.orders() == [2]
    assert c.mean == 0.0


def test_product_formula_requires_symmetric():
    with pytest.raises(TypeError):
        product_formula(tensor(np.ones(2)), sym(np.ones(2)))


def test_product_formula_dim_mismatch():
    with pytest.raises(ValueError):
        product_formula(sym(np.ones(2)), sym(np.ones(3)))


@pytest.mark.parametrize("n,m", [(1, 1), (1, 2), (2, 2), (2, 3), (3, 3)])
def test_product_formula_pointwise(n, m):
    rng = stream(23, f"chaos:product:{n}:{m}")
    d = 3
    f = sym(rng.standard_normal((d,) * n))
    g = sym(rng.standard_normal((d,) * m))
    xi = rng.standard_normal((200, d))
    lhs = eval_integral(f, xi) * eval_integral(g, xi)
    rhs = eval_chaos_element(product_formula(f, g), xi)
    np.testing.assert_allclose(rhs, lhs, rtol=0,
                               atol=1e-9 * (1.0 + np.abs(lhs).max()))


def test_second_moment_frozen_values():
    assert second_moment_exact(sym(basis_tensor(2, 0).coeffs)) == pytest.approx(1.0)
    assert second_moment_exact(sym(basis_tensor(2, 0, 0).coeffs)) == pytest.approx(2.0)
    cross = symmetrize(basis_tensor(2, 0, 1))
    assert second_moment_exact(cross) == pytest.approx(1.0)


def test_fourth_moment_frozen_values():
    # E[xi^4] = 3; E[He_2(xi)^4] = 60; E[(xi1 xi2)^4] = 9
    assert fourth_moment_exact(sym(basis_tensor(2, 0).coeffs)) == pytest.approx(3.0)
    assert fourth_moment_exact(sym(basis_tensor(2, 0, 0).coeffs)) == pytest.approx(60.0)
    cross = symmetrize(basis_tensor(2, 0, 1))
    assert fourth_moment_exact(cross) == pytest.approx(9.0)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_moments_match_bruteforce_oracle(n):
    rng = stream(29, f"chaos:moments:{n}")
    for d in (1, 2, 3):
        f = sym(rng.standard_normal((d,) * n))
        assert second_moment_exact(f) == pytest.approx(
            reference.moment_bruteforce(f, 2), rel=1e-10)
        assert fourth_moment_exact(f) == pytest.approx(
            reference.moment_bruteforce(f, 4), rel=1e-10)


def test_excess_kurtosis_nonnegative():
    rng = stream(29, "chaos:excess")
    for n in (1, 2, 3):
        for _ in range(10):
            f = sym(rng.standard_normal((3,) * n))
            assert excess_kurtosis_exact(f) >= -1e-9


def test_contraction_profile_cross_kernel():
    # ||f (x)_1 f||^2 = 1/8 for the normalized cross kernel
    cross = symmetrize(basis_tensor(2, 0, 1))
    prof = contraction_profile(cross)
    assert len(prof) == 1
    assert prof[0] == pytest.approx(math.sqrt(0.125))


def test_orthogonality_across_orders():
    rng = stream(31, "chaos:ortho")
    d = 3
    f1 = sym(rng.standard_normal(d))
    f2 = sym(rng.standard_normal((d, d)))
    f3 = sym(rng.standard_normal((d, d, d)))
    xi = rng.standard_normal((200000, d))
    v1, v2, v3 = (np.asarray(eval_integral(f, xi)) for f in (f1, f2, f3))
    for a, b in ((v1, v2), (v1, v3), (v2, v3)):
        prod = a * b
        se = prod.std(ddof=1) / math.sqrt(prod.size)
        assert abs(prod.mean()) <= 4.0 * se


def test_sample_integral_isometry():
    rng = stream(31, "chaos:iso")
    for n in (1, 2, 3):
        f = sym(rng.standard_normal((3,) * n))
        draws = sample_integral(f, 200000, stream(31, f"chaos:iso:{n}"))
        sq = draws * draws
        se = sq.std(ddof=1) / math.sqrt(sq.size)
        assert abs(sq.mean() - second_moment_exact(f)) <= 4.0 * se


def test_spectral_sampler_agrees_in_distribution():
    f = sym(stream(37, "chaos:spec").standard_normal((4, 4)))
    a = sample_integral2_spectral(f, 100000, stream(37, "chaos:spec:a"))
    b = sample_integral(f, 100000, stream(37, "chaos:spec:b"))
    for power in (2, 3):
        ma, mb = (a**power).mean(), (b**power).mean()
        se = math.hypot((a**power).std(ddof=1), (b**power).std(ddof=1))
        se /= math.sqrt(a.size)
        assert abs(ma - mb) <= 4.0 * se


def test_spectral_sampler_requires_order2():
    with pytest.raises(ValueError):
        sample_integral2_spectral(sym(np.ones(2)), 100, stream(0, "x"))


def test_sample_integral_deterministic_given_stream():
    f = sym(stream(41, "chaos:det").standard_normal((3, 3)))
    a = sample_integral(f, 5000, stream(41, "chaos:det:draws"))
    b = sample_integral(f, 5000, stream(41, "chaos:det:draws"))
    np.testing.assert_array_equal(a, b)
