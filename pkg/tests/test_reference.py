"""Sanity for the brute-force oracle itself, against hand-computed values.

The oracle backs the moment and contraction tests elsewhere, so its own
checks use nothing but pencil-and-paper results.
"""

import math

import numpy as np
import pytest

from chaoskit import reference
from chaoskit.tensors import basis_tensor, sym, symmetrize


def test_hermite_coefficients():
    assert reference.hermite_coefficients(0) == [1]
    assert reference.hermite_coefficients(1) == [0, 1]
    assert reference.hermite_coefficients(2) == [-1, 0, 1]
    assert reference.hermite_coefficients(3) == [0, -3, 0, 1]
    assert reference.hermite_coefficients(4) == [3, 0, -6, 0, 1]


def test_gaussian_expectation_monomials():
    # E[x^2] = 1, E[x^4] = 3, E[x^2 y^4] = 3, odd moments vanish
    assert reference.gaussian_expectation({(2,): 1.0}) == pytest.approx(1.0)
    assert reference.gaussian_expectation({(4,): 1.0}) == pytest.approx(3.0)
    assert reference.gaussian_expectation({(2, 4): 1.0}) == pytest.approx(3.0)
    assert reference.gaussian_expectation({(1, 2): 5.0}) == 0.0
    assert reference.gaussian_expectation({(6,): 1.0}) == pytest.approx(15.0)


def test_integral_polynomial_cross_kernel():
    f = symmetrize(basis_tensor(2, 0, 1))
    poly = reference.integral_polynomial(f)
    assert poly == {(1, 1): pytest.approx(1.0)}


def test_integral_polynomial_diagonal_kernel():
    # I_2(e1 x e1) = x^2 - 1
    f = sym(basis_tensor(2, 0, 0).coeffs)
    poly = reference.integral_polynomial(f)
    assert poly[(2, 0)] == pytest.approx(1.0)
    assert poly[(0, 0)] == pytest.approx(-1.0)


def test_eval_polynomial():
    poly = {(2, 0): 1.0, (0, 0): -1.0, (1, 1): 2.0}
    assert reference.eval_polynomial(poly, [3.0, 0.5]) == pytest.approx(
        9.0 - 1.0 + 3.0)


def test_moment_bruteforce_hand_values():
    e1 = sym(basis_tensor(2, 0).coeffs)
    assert reference.moment_bruteforce(e1, 2) == pytest.approx(1.0)
    assert reference.moment_bruteforce(e1, 4) == pytest.approx(3.0)
    diag = sym(basis_tensor(2, 0, 0).coeffs)
    assert reference.moment_bruteforce(diag, 2) == pytest.approx(2.0)
    assert reference.moment_bruteforce(diag, 4) == pytest.approx(60.0)
    cross = symmetrize(basis_tensor(2, 0, 1))
    assert reference.moment_bruteforce(cross, 4) == pytest.approx(9.0)


def test_contraction_bruteforce_hand_value():
    cross = symmetrize(basis_tensor(2, 0, 1))
    out = reference.contraction_bruteforce(cross, cross, 1)
    np.testing.assert_allclose(out.coeffs, np.array([[0.25, 0.0], [0.0, 0.25]]))


def test_symmetrize_bruteforce_hand_value():
    out = reference.symmetrize_bruteforce(basis_tensor(2, 0, 1))
    np.testing.assert_allclose(out.coeffs, np.array([[0.0, 0.5], [0.5, 0.0]]))


def test_sheet_variance_quadrature_hand_value():
    # n = 1, beta = 0: 2 * 1/(2*0+3) = 2/3
    got = reference.sheet_power_variance_quadrature((0.0,))
    assert got == pytest.approx(2.0 / 3.0, rel=1e-8)
