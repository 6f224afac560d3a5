"""Multiple integrals of a finite Gaussian system and their algebra.

With xi = (xi_1, ..., xi_d) i.i.d. standard normal, the order-n integral
of a symmetric kernel f is the polynomial

    I_n(f)(xi) = sum over index tuples t of f[t] * prod_j He_{m_j}(xi_j)

where m_j counts how often coordinate j appears in t and He_k is the
probabilists' Hermite polynomial.  The I_n are centered for n >= 1,
orthogonal across orders, and satisfy E[I_n(f)^2] = n! * ||f||^2.

This module evaluates these polynomials, multiplies them (the product of
two integrals expands into a finite chaos sum via contractions), and
computes second and fourth moments in closed form.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .tensors import (
    SymTensor,
    Tensor,
    contract,
    contraction_norm_sq,
    norm_sq,
    scale,
    symmetrize,
)

__all__ = [
    "hermite",
    "hermite_table",
    "eval_integral",
    "ChaosElement",
    "eval_chaos_element",
    "product_formula",
    "second_moment_exact",
    "fourth_moment_exact",
    "excess_kurtosis_exact",
    "contraction_profile",
    "sample_integral",
    "sample_integral2_spectral",
]


def hermite(k: int, x):
    """Probabilists' Hermite polynomial He_k evaluated elementwise.

    He_0 = 1, He_1 = x, He_{k+1} = x*He_k - k*He_{k-1}.
    """
    if k < 0 or k != int(k):
        raise ValueError("degree must be a nonnegative integer")
    x = np.asarray(x, dtype=float)
    return hermite_table(int(k), x)[-1]


def hermite_table(kmax: int, x: np.ndarray) -> np.ndarray:
    """He_0..He_kmax stacked along a new leading axis."""
    out = np.empty((kmax + 1,) + x.shape)
    out[0] = 1.0
    if kmax >= 1:
        out[1] = x
    for k in range(1, kmax):
        out[k + 1] = x * out[k] - k * out[k - 1]
    return out


def eval_integral(f: Tensor, xi) -> np.ndarray | float:
    """Evaluate I_n(f) at one or many standard-normal coordinate vectors.

    Parameters
    ----------
    f : Tensor
        Kernel of order n.  Only the symmetric part contributes to the
        integral, so a SymTensor is expected; plain tensors are accepted
        and symmetrized implicitly for orders >= 3 (the n <= 2 paths are
        already symmetric in effect).
    xi : array_like
        Shape (d,) or (N, d).  Returns a scalar or an (N,) array.

    For n = 1 this is f . xi; for n = 2 it is xi'F xi - trace(F); higher
    orders walk the sorted index tuples.
    """
    xi = np.asarray(xi, dtype=float)
    single = xi.ndim == 1
    if single:
        xi = xi[None, :]
    if xi.ndim != 2:
        raise ValueError("xi must have shape (d,) or (N, d)")
    n = f.order
    if n == 0:
        out = np.full(xi.shape[0], f.coeffs[()])
        return float(out[0]) if single else out
    if f.dim != xi.shape[1]:
        raise ValueError(f"kernel dimension {f.dim} vs coordinate dimension {xi.shape[1]}")
    a = f.coeffs
    if n == 1:
        out = xi @ a
    elif n == 2:
        s = 0.5 * (a + a.T)
        out = np.einsum("ni,ij,nj->n", xi, s, xi) - np.trace(s)
    else:
        if not isinstance(f, SymTensor):
            f = symmetrize(f)
            a = f.coeffs
        d = f.dim
        ht = hermite_table(n, xi)  # (n+1, N, d)
        out = np.zeros(xi.shape[0])
        for t in itertools.combinations_with_replacement(range(d), n):
            c = a[t]
            if c == 0.0:
                continue
            coords, mults = np.unique(t, return_counts=True)
            w = c * math.factorial(n)
            for m in mults:
                w /= math.factorial(m)
            term = ht[mults[0], :, coords[0]].copy()
            for j in range(1, len(coords)):
                term *= ht[mults[j], :, coords[j]]
            out += w * term
    return float(out[0]) if single else out


@dataclass(frozen=True)
class ChaosElement:
    """Finite sum of multiple integrals, one symmetric kernel per order.

    terms maps order -> kernel; the order-0 entry, if present, is a
    shape-() tensor holding the constant part.
    """

    terms: dict

    def __post_init__(self):
        for n, f in self.terms.items():
            if f.order != n:
                raise ValueError(f"kernel stored at order {n} has order {f.order}")

    @property
    def mean(self) -> float:
        t0 = self.terms.get(0)
        return t0.item() if t0 is not None else 0.0

    def orders(self):
        return sorted(self.terms)

    def __call__(self, xi):
        return eval_chaos_element(self, xi)


def eval_chaos_element(c: ChaosElement, xi):
    xi = np.asarray(xi, dtype=float)
    single = xi.ndim == 1
    vals = xi[None, :] if single else xi
    out = np.zeros(vals.shape[0])
    for f in c.terms.values():
        out = out + eval_integral(f, vals)
    return float(out[0]) if single else out


def product_formula(f: SymTensor, g: SymTensor) -> ChaosElement:
    """Expand I_n(f) * I_m(g) as a chaos element.

    I_n(f) I_m(g) = sum_{r=0}^{min(n,m)} r! C(n,r) C(m,r)
                    I_{n+m-2r}(symmetrize(f (x)_r g)).

    The identity is exact for the polynomial evaluation above, so both
    sides agree pointwise, not only in distribution.
    """
    if not isinstance(f, SymTensor) or not isinstance(g, SymTensor):
        raise TypeError("product formula needs symmetric kernels")
    n, m = f.order, g.order
    if n < 1 or m < 1:
        raise ValueError("orders must be >= 1")
    if f.dim != g.dim:
        raise ValueError(f"dimension mismatch: {f.dim} vs {g.dim}")
    terms = {}
    for r in range(min(n, m) + 1):
        coeff = math.factorial(r) * math.comb(n, r) * math.comb(m, r)
        h = symmetrize(contract(f, g, r))
        if not np.any(h.coeffs):
            continue  # identically zero contribution, e.g. disjoint supports
        terms[n + m - 2 * r] = scale(h, coeff)
    return ChaosElement(terms)


def second_moment_exact(f: SymTensor) -> float:
    """E[I_n(f)^2] = n! * ||f||^2."""
    n = f.order
    if n < 1:
        raise ValueError("order must be >= 1")
    return math.factorial(n) * norm_sq(f)


def fourth_moment_exact(f: SymTensor) -> float:
    """E[I_n(f)^4], exactly.

    General order: squaring I_n(f) with the product formula and applying
    the second-moment rule to each resulting order gives

        E[I_n(f)^4] = sum_{p=0}^{n} (p! C(n,p)^2)^2 (2n-2p)!
                      ||symmetrize(f (x)_p f)||^2.

    Order 2 avoids materializing order-4 intermediates: with F the
    kernel matrix, E = 12||F||^4 + 48 trace(F^4).
    """
    n = f.order
    if n < 1:
        raise ValueError("order must be >= 1")
    if n == 1:
        return 3.0 * norm_sq(f) ** 2
    if n == 2:
        h2 = norm_sq(f)
        h4 = norm_sq(contract(f, f, 1))  # trace(F^4) for symmetric F
        return 12.0 * h2 * h2 + 48.0 * h4
    total = 0.0
    for p in range(n + 1):
        c = math.factorial(p) * math.comb(n, p) ** 2
        w = c * c * math.factorial(2 * n - 2 * p)
        total += w * norm_sq(symmetrize(contract(f, f, p)))
    return total


def excess_kurtosis_exact(f: SymTensor) -> float:
    """E[I_n(f)^4]/E[I_n(f)^2]^2 - 3 for a nonzero kernel."""
    v = second_moment_exact(f)
    if v <= 0.0:
        raise ValueError("kernel has zero variance")
    return fourth_moment_exact(f) / (v * v) - 3.0


def contraction_profile(f: SymTensor) -> tuple:
    """Norms ||f (x)_p f|| for p = 1..n-1, the fourth-moment certificates.

    All of them vanishing in a sequence with fixed variance is equivalent
    to the sequence's fourth moments approaching the Gaussian value.
    """
    n = f.order
    if n < 1:
        raise ValueError("order must be >= 1")
    return tuple(math.sqrt(contraction_norm_sq(f, p)) for p in range(1, n))


def sample_integral(f: Tensor, n_samples: int, rng: np.random.Generator,
                    block: int = 4096) -> np.ndarray:
    """Monte Carlo draws of I_n(f) from fresh standard-normal coordinates.

    Draws are generated in fixed-size blocks so the stream consumption,
    and hence the output, does not depend on n_samples alignment.
    """
    d = f.dim if f.dim is not None else 1
    out = np.empty(n_samples)
    done = 0
    while done < n_samples:
        take = min(block, n_samples - done)
        xi = rng.standard_normal((take, d))
        out[done:done + take] = eval_integral(f, xi)
        done += take
    return out


def sample_integral2_spectral(f: SymTensor, n_samples: int,
                              rng: np.random.Generator,
                              block: int = 8192) -> np.ndarray:
    """Draws of an order-2 integral through its eigendecomposition.

    I_2(F) equals sum_k lambda_k (eta_k^2 - 1) in distribution with eta
    i.i.d. standard normal, which costs O(d) per draw instead of O(d^2)
    and is the workhorse for the large sweep grids.
    """
    if f.order != 2:
        raise ValueError("spectral sampling is for order-2 kernels")
    lam = np.linalg.eigvalsh(f.coeffs)
    out = np.empty(n_samples)
    done = 0
    while done < n_samples:
        take = min(block, n_samples - done)
        eta = rng.standard_normal((take, lam.size))
        out[done:done + take] = (eta * eta - 1.0) @ lam
        done += take
    return out
