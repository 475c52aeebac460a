"""Lower bounds on the S^p -> S^p norm of the antidiagonal-averaging projection.

The maximization of ``||P(A)||_p / ||A||_p`` over matrices supported on the
``m x m`` window is nonconvex for ``p != 2``. We run the nonlinear power
method: push the iterate through ``P``, take the norming dual element in
``S^{p'}``, pull back with the adjoint, and take the norming element of that
in ``S^p``. Each step does not decrease the ratio, and every value reported is
attained by an explicit input, so it is a certified lower bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hankel import antidiagonal_sums, hankel_matrix, p_hank_paper, schatten_from_singular_values
from .series import FormalSeries


def dual_element(Y: np.ndarray, p: float) -> tuple[np.ndarray, float]:
    """Norming functional of ``Y`` in ``S^{p'}``: ``U (S/||S||_p)^{p-1} V^*``.

    Returns the element and ``||Y||_p``; pairs with ``Y`` (real trace pairing)
    to give ``||Y||_p``.
    """
    U, s, Vh = np.linalg.svd(Y, full_matrices=False)
    norm = schatten_from_singular_values(s, p)
    if norm == 0.0:
        return np.zeros_like(Y), 0.0
    return (U * (s / norm) ** (p - 1.0)) @ Vh, norm


def _forward(X: np.ndarray) -> np.ndarray:
    return p_hank_paper(X).entries


def _adjoint(Z: np.ndarray, m: int) -> np.ndarray:
    sums = antidiagonal_sums(Z)[: 2 * m - 1]
    n = np.arange(sums.shape[0])
    return hankel_matrix(FormalSeries(sums / (n + 1.0)[:, None, None]), 0.0, 0.0, m).entries


def _normalize(X: np.ndarray, p: float) -> np.ndarray:
    s = np.linalg.svd(X, compute_uv=False)
    return X / schatten_from_singular_values(s, p)


def projection_ratio(X: np.ndarray, p: float) -> float:
    """``||P(X)||_p / ||X||_p`` with ``P`` applied to the zero-padded input."""
    num = schatten_from_singular_values(np.linalg.svd(_forward(X), compute_uv=False), p)
    den = schatten_from_singular_values(np.linalg.svd(X, compute_uv=False), p)
    return num / den


def ascend(X0: np.ndarray, p: float, max_iter: int = 200, rtol: float = 1e-6) -> tuple[float, np.ndarray, int]:
    """Run the monotone ascent from ``X0``; returns (best ratio, maximizer, iterations)."""
    m = X0.shape[0]
    q = p / (p - 1.0)
    X = _normalize(X0, p)
    best, best_X = projection_ratio(X, p), X
    it = 0
    for it in range(1, max_iter + 1):
        Z, _ = dual_element(_forward(X), p)
        W = _adjoint(Z, m)
        Xn, wnorm = dual_element(W, q)
        if wnorm == 0.0:
            break
        X = _normalize(Xn, p)
        val = projection_ratio(X, p)
        improved = val - best
        if val > best:
            best, best_X = val, X
        if improved <= rtol * best:
            break
    return best, best_X, it


def initial_points(m: int, starts: int, rng: np.random.Generator) -> list[tuple[str, np.ndarray]]:
    """Seed family: complex Gaussian matrices alternating with antidiagonal-sparse ones."""
    out = []
    for i in range(starts):
        if i % 2 == 0:
            X = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
            out.append(("gaussian", X))
        else:
            X = np.zeros((m, m), dtype=complex)
            j = np.arange(m)
            n = int(rng.integers(m - 1, 2 * m - 1))
            mask = (j[:, None] + j[None, :]) == n
            X[mask] = rng.standard_normal(int(mask.sum())) + 1j * rng.standard_normal(int(mask.sum()))
            X += 1e-3 * (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)))
            out.append(("antidiagonal", X))
    return out


@dataclass
class ProjectionNormEstimate:
    p: float
    m: int
    estimate: float
    per_start: list[float] = field(default_factory=list)
    seeds: list[str] = field(default_factory=list)
    iterations: list[int] = field(default_factory=list)

    @property
    def reference(self) -> float:
        return reference_profile(self.p)


def reference_profile(p: float) -> float:
    """``sqrt(p^2 / (p - 1))``."""
    return float(np.sqrt(p * p / (p - 1.0)))


def estimate_projection_norm(p: float, m: int, starts: int = 8, max_iter: int = 200,
                             rtol: float = 1e-6, seed: int = 0) -> ProjectionNormEstimate:
    """Best-so-far lower bound on the projection norm over ``starts`` ascents."""
    if not 1.0 < p < np.inf:
        raise ValueError("the projection is unbounded at p = 1 and p = inf; need 1 < p < inf")
    if m < 1 or starts < 1:
        raise ValueError("m and starts must be >= 1")
    rng = np.random.default_rng(seed)
    est = ProjectionNormEstimate(p=p, m=m, estimate=1.0)
    # the rank-one Hankel E_00 is a fixed point, so 1 is always attained
    for kind, X0 in initial_points(m, starts, rng):
        val, _, it = ascend(X0, p, max_iter, rtol)
        est.per_start.append(val)
        est.seeds.append(kind)
        est.iterations.append(it)
        est.estimate = max(est.estimate, val)
    return est
