"""Norm functionals on formal series: circle L^p norms, Besov norms built from
the dyadic kernels, weighted sequence norms, weighted disc norms, the
complementation map and the bilinear duality pairing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .report import CheckReport
from .series import (FormalSeries, KernelId, _next_pow2, evaluate_on_grid,
                     kernel_convolve, max_kernel_index)

INF = math.inf

# radial quadrature policy
_NODES_PER_SLICE = 16
_SLICE_CUTOFF = 1e-6
_SUP_OVERSAMPLE = 8


@dataclass(frozen=True)
class BesovParams:
    p: float
    q: float
    s: float

    def __post_init__(self):
        if not (self.p >= 1 and self.q >= 1):
            raise ValueError(f"Besov exponents must satisfy p, q >= 1 (got p={self.p}, q={self.q})")


@dataclass(frozen=True)
class GridSpec:
    """Angular grid size ``M`` (power of two) and radial nodes per dyadic slice ``R``."""

    M: int = 256
    R: int = _NODES_PER_SLICE

    def __post_init__(self):
        if self.M < 4 or self.M & (self.M - 1):
            raise ValueError(f"angular grid M must be a power of two >= 4, got {self.M}")
        if self.R < 8:
            raise ValueError(f"radial node count R must be >= 8, got {self.R}")

    @classmethod
    def for_degree(cls, degree: int, oversample: int = 16, R: int = _NODES_PER_SLICE) -> "GridSpec":
        return cls(M=max(64, _next_pow2(oversample * (degree + 1))), R=R)


@dataclass(frozen=True)
class PointwiseNorm:
    """Norm applied to each block value: ``absolute`` (d = 1) or Schatten ``p_E``."""

    kind: str = "absolute"
    p_E: float = 2.0

    def __post_init__(self):
        if self.kind not in ("absolute", "schatten"):
            raise ValueError(f"unknown pointwise norm {self.kind!r}")
        if self.kind == "schatten" and not self.p_E >= 1:
            raise ValueError("schatten pointwise norm requires p_E >= 1")

    @classmethod
    def schatten(cls, p_E: float) -> "PointwiseNorm":
        return cls("schatten", float(p_E))

    def __call__(self, values: np.ndarray) -> np.ndarray:
        """Norms of a stack of blocks of shape ``(..., d, d)``."""
        if self.kind == "absolute":
            if values.shape[-1] != 1:
                raise ValueError("absolute pointwise norm requires block_dim == 1")
            return np.abs(values[..., 0, 0])
        if values.shape[-1] == 1:
            return np.abs(values[..., 0, 0])
        sv = np.linalg.svd(values, compute_uv=False)
        return _lp(sv, self.p_E, axis=-1)


def _lp(x: np.ndarray, p: float, axis: int = -1):
    x = np.abs(x)
    if p == INF:
        return np.max(x, axis=axis)
    if p == 1:
        return np.sum(x, axis=axis)
    if p == 2:
        return np.sqrt(np.sum(x * x, axis=axis))
    top = np.max(x, axis=axis, keepdims=True)
    safe = np.where(top > 0, top, 1.0)
    return np.squeeze(safe, axis=axis) * np.sum((x / safe) ** p, axis=axis) ** (1.0 / p)


def _default_pw(f: FormalSeries, p_E: float = 2.0) -> PointwiseNorm:
    return PointwiseNorm() if f.block_dim == 1 else PointwiseNorm.schatten(p_E)


def _circle_mean(values_norms: np.ndarray, p: float) -> float:
    if p == INF:
        return float(np.max(values_norms))
    if p == 1:
        return float(np.mean(values_norms))
    top = float(np.max(values_norms))
    if top == 0.0:
        return 0.0
    return top * float(np.mean((values_norms / top) ** p)) ** (1.0 / p)


def circle_lp_norm(f: FormalSeries, p: float, pw: PointwiseNorm | None = None,
                   grid: GridSpec | None = None) -> float:
    """``(mean_m ||f(z_m)||^p)^(1/p)`` over the grid; the grid maximum for ``p = inf``."""
    if not p >= 1:
        raise ValueError("p must be >= 1")
    pw = pw or _default_pw(f)
    grid = grid or GridSpec.for_degree(f.degree)
    M = grid.M
    if M < 2 * (f.degree + 1):
        raise ValueError(f"grid M={M} too small for degree {f.degree}; need >= {2 * (f.degree + 1)}")
    if p == INF:
        M = max(M, _next_pow2(_SUP_OVERSAMPLE * (f.degree + 1)))
    return _circle_mean(pw(evaluate_on_grid(f, M)), p)


def _dyadic_pieces(f: FormalSeries, p: float, pw: PointwiseNorm, grid: GridSpec) -> np.ndarray:
    """``||W_n * f||_p`` for ``n = 0..n_max``."""
    return np.array([circle_lp_norm(kernel_convolve(n, f), p, pw, grid)
                     for n in range(max_kernel_index(f.degree) + 1)])


def weighted_lps_norm(x: Sequence[float], p: float, s: float) -> float:
    """``|| (2^{ns} x_n)_n ||_p``."""
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        return 0.0
    return float(_lp(x * 2.0 ** (s * np.arange(x.size)), p))


def besov_norm(f: FormalSeries, bp: BesovParams, pw: PointwiseNorm | None = None,
               grid: GridSpec | None = None) -> float:
    """``|| (2^{ns} ||W_n * f||_p)_n ||_q``."""
    pw = pw or _default_pw(f, bp.p)
    grid = grid or GridSpec.for_degree(f.degree)
    return weighted_lps_norm(_dyadic_pieces(f, bp.p, pw, grid), bp.q, bp.s)


@lru_cache(maxsize=64)
def radial_rule(gamma: float, nodes: int = _NODES_PER_SLICE) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for ``int_0^1 g(r) (1-r)^gamma dr``.

    Composite Gauss-Legendre on the dyadic slices ``[1-2^-m, 1-2^-m-1]`` until
    the slice width drops below the cutoff, then Gauss-Jacobi with the exact
    endpoint weight on the remaining ``[1-h, 1]``.
    """
    if not gamma > -1:
        raise ValueError("weight exponent must exceed -1")
    x, w = roots_legendre(nodes)
    rs, ws = [], []
    m = 0
    while 2.0 ** (-m) >= _SLICE_CUTOFF:
        a, b = 1.0 - 2.0 ** (-m), 1.0 - 2.0 ** (-m - 1)
        r = 0.5 * (b - a) * x + 0.5 * (a + b)
        rs.append(r)
        ws.append(0.5 * (b - a) * w * (1.0 - r) ** gamma)
        m += 1
    h = 2.0 ** (-m)
    # 1 - r = h u, u = (1 + y)/2, y in [-1, 1] with weight (1 + y)^gamma
    y, wy = roots_jacobi(nodes, 0.0, gamma)
    u = 0.5 * (1.0 + y)
    rs.append(1.0 - h * u)
    ws.append(wy * h ** (gamma + 1.0) * 0.5 ** (gamma + 1.0))
    r = np.concatenate(rs)
    wt = np.concatenate(ws)
    r.setflags(write=False)
    wt.setflags(write=False)
    return r, wt


def _dilation_lp_norms(f: FormalSeries, r: np.ndarray, p: float, pw: PointwiseNorm,
                       grid: GridSpec) -> np.ndarray:
    """``||f_r||_p`` for every radius in ``r``."""
    M = grid.M
    if M < 2 * (f.degree + 1):
        raise ValueError(f"grid M={M} too small for degree {f.degree}; need >= {2 * (f.degree + 1)}")
    k = np.arange(f.degree + 1)
    out = np.empty(r.size)
    chunk = max(1, 2 ** 22 // (M * f.block_dim ** 2))
    for start in range(0, r.size, chunk):
        rr = r[start:start + chunk]
        coeffs = (rr[:, None] ** k[None, :])[:, :, None, None] * f.coeffs[None]
        padded = np.zeros((rr.size, M, f.block_dim, f.block_dim), dtype=complex)
        padded[:, : f.degree + 1] = coeffs
        vals = M * np.fft.ifft(padded, axis=1)
        norms = pw(vals)
        for i in range(rr.size):
            out[start + i] = _circle_mean(norms[i], p)
    return out


def weighted_disc_norm(f: FormalSeries, p: float, s: float, pw: PointwiseNorm | None = None,
                       grid: GridSpec | None = None) -> float:
    """``( int_0^1 (1-r)^{ps-1} ||f_r||_p^p r dr )^{1/p}`` with normalized angle."""
    if p == INF:
        raise ValueError("weighted_disc_norm requires p < inf")
    if s <= 0:
        raise ValueError(f"s must be > 0 for a convergent weight (got s={s})")
    pw = pw or _default_pw(f)
    grid = grid or GridSpec.for_degree(f.degree)
    r, w = radial_rule(float(p * s - 1.0), grid.R)
    vals = _dilation_lp_norms(f, r, p, pw, grid)
    return float(np.sum(w * r * vals ** p)) ** (1.0 / p)


def weighted_disc_norm_derivative(f: FormalSeries, p: float, s: float,
                                  pw: PointwiseNorm | None = None,
                                  grid: GridSpec | None = None) -> float:
    """``||f(0)|| + ||(1-|z|)^{1+s-1/p} f'||_{L^p(disc)}``."""
    if s <= -1:
        raise ValueError("s must be > -1")
    pw = pw or _default_pw(f)
    grid = grid or GridSpec.for_degree(f.degree)
    head = float(pw(f.coeffs[:1])[0])
    if f.degree == 0:
        return head
    return head + weighted_disc_norm(f.derivative(), p, s + 1.0, pw, grid)


def complementation_constant(s: float) -> float:
    return 4.0 * sum(2.0 ** (e * s) for e in (-2, -1, 0, 1, 2))


def complementation_map(pieces: Sequence[FormalSeries], bp: BesovParams,
                        pw: PointwiseNorm | None = None, grid: GridSpec | None = None,
                        slack: float = 1e-3) -> tuple[FormalSeries, CheckReport]:
    """``P((a_n)) = sum_n V_n * a_n`` together with its norm-bound report."""
    if not pieces:
        raise ValueError("need at least one component")
    d = pieces[0].block_dim
    out = FormalSeries.zero(d)
    for n, a in enumerate(pieces):
        out = out + kernel_convolve(KernelId(n, "V"), a)
    deg = max(max(a.degree for a in pieces), out.degree)
    pw = pw or _default_pw(out, bp.p)
    grid = grid or GridSpec.for_degree(deg)
    source = weighted_lps_norm([circle_lp_norm(a, bp.p, pw, grid) for a in pieces], bp.q, bp.s)
    image = besov_norm(out, bp, pw, grid)
    C = complementation_constant(bp.s)
    report = CheckReport("complementation_bound",
                         {"p": bp.p, "q": bp.q, "s": bp.s, "components": len(pieces)},
                         measured=image, bound=C * source, tolerance=slack,
                         notes=f"constant={C:.6g}, source_norm={source:.6g}")
    return out, report


def duality_pairing(f: FormalSeries, g: FormalSeries) -> complex:
    """Bilinear ``sum_n sum_{u,v} f^(n)_{uv} g^(n)_{uv}`` (no conjugation)."""
    if f.block_dim != g.block_dim:
        raise ValueError("block dimensions differ")
    n = min(f.degree, g.degree) + 1
    return complex(np.sum(f.coeffs[:n] * g.coeffs[:n]))


def weighted_l2_norm(f: FormalSeries, s: float) -> float:
    """``( sum_k ||a_k||_F^2 (1+k)^{-2s} )^{1/2}``."""
    k = np.arange(f.degree + 1)
    return float(np.sqrt(np.sum(np.abs(f.coeffs) ** 2 * ((1.0 + k) ** (-2.0 * s))[:, None, None])))
