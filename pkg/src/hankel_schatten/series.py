"""Formal analytic series with matrix-block coefficients and the coefficientwise
operators acting on them: dyadic kernels, Fourier multipliers, and the power
and binomial weightings ``I_t`` / ``I~_t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .report import CheckReport

_LOG_SPACE_THRESHOLD = 64


def _next_pow2(n: int) -> int:
    return 1 << max(0, int(n - 1).bit_length())


class FormalSeries:
    """Polynomial ``sum_k c_k z^k`` with ``d x d`` complex block coefficients.

    Coefficients are stored densely as an array of shape ``(N + 1, d, d)``.
    Instances are treated as immutable; the coefficient array is made
    read-only on construction.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs, block_dim: int | None = None):
        c = np.asarray(coeffs, dtype=complex)
        if c.ndim == 1:
            if block_dim not in (None, 1):
                raise ValueError("scalar coefficient list given with block_dim != 1")
            c = c.reshape(-1, 1, 1)
        elif c.ndim != 3 or c.shape[1] != c.shape[2]:
            raise ValueError(f"coefficients must have shape (N+1, d, d), got {c.shape}")
        if block_dim is not None and c.shape[1] != block_dim:
            raise ValueError(f"block_dim={block_dim} but blocks are {c.shape[1]}x{c.shape[2]}")
        if c.shape[0] == 0:
            c = np.zeros((1,) + c.shape[1:], dtype=complex)
        if c.shape[1] < 1:
            raise ValueError("block_dim must be >= 1")
        c = c.copy()
        c.setflags(write=False)
        self._coeffs = c

    # construction helpers
    @classmethod
    def zero(cls, block_dim: int = 1) -> "FormalSeries":
        return cls(np.zeros((1, block_dim, block_dim)))

    @classmethod
    def monomial(cls, k: int, coeff=1.0, block_dim: int | None = None) -> "FormalSeries":
        block = np.atleast_2d(np.asarray(coeff, dtype=complex))
        if block.shape == (1, 1) and block_dim:
            block = block[0, 0] * np.eye(block_dim)
        c = np.zeros((k + 1,) + block.shape, dtype=complex)
        c[k] = block
        return cls(c)

    @classmethod
    def from_terms(cls, terms: Mapping[int, object], block_dim: int = 1) -> "FormalSeries":
        """Build from a sparse ``{degree: coefficient}`` mapping."""
        if not terms:
            return cls.zero(block_dim)
        if min(terms) < 0:
            raise ValueError("degrees must be non-negative")
        c = np.zeros((max(terms) + 1, block_dim, block_dim), dtype=complex)
        for k, v in terms.items():
            c[k] = np.asarray(v, dtype=complex).reshape(block_dim, block_dim)
        return cls(c)

    # accessors
    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    @property
    def block_dim(self) -> int:
        return self._coeffs.shape[1]

    @property
    def degree(self) -> int:
        """Largest stored index (the stored block may be zero)."""
        return self._coeffs.shape[0] - 1

    @property
    def scalar_coeffs(self) -> np.ndarray:
        if self.block_dim != 1:
            raise ValueError("scalar_coeffs requires block_dim == 1")
        return self._coeffs[:, 0, 0]

    def coeff(self, k: int) -> np.ndarray:
        if 0 <= k <= self.degree:
            return self._coeffs[k]
        return np.zeros((self.block_dim, self.block_dim), dtype=complex)

    def padded(self, length: int) -> np.ndarray:
        """Coefficient array of exactly ``length`` blocks (truncating or zero-padding)."""
        out = np.zeros((length, self.block_dim, self.block_dim), dtype=complex)
        n = min(length, self._coeffs.shape[0])
        out[:n] = self._coeffs[:n]
        return out

    def terms(self) -> dict[int, np.ndarray]:
        """Sparse view: nonzero blocks keyed by degree."""
        nz = np.flatnonzero(np.any(self._coeffs != 0, axis=(1, 2)))
        return {int(k): self._coeffs[k] for k in nz}

    def trim(self) -> "FormalSeries":
        nz = np.flatnonzero(np.any(self._coeffs != 0, axis=(1, 2)))
        top = int(nz[-1]) + 1 if nz.size else 1
        return FormalSeries(self._coeffs[:top])

    def derivative(self) -> "FormalSeries":
        if self.degree == 0:
            return FormalSeries.zero(self.block_dim)
        k = np.arange(1, self.degree + 1)
        return FormalSeries(self._coeffs[1:] * k[:, None, None])

    def scale_coeffs(self, weights) -> "FormalSeries":
        """Multiply coefficient ``k`` by ``weights[k]`` (scalar per degree)."""
        w = np.asarray(weights)
        return FormalSeries(self._coeffs * w[: self.degree + 1, None, None])

    # arithmetic
    def _binary(self, other, op):
        if not isinstance(other, FormalSeries):
            return NotImplemented
        if other.block_dim != self.block_dim:
            raise ValueError("block dimensions differ")
        n = max(self.degree, other.degree) + 1
        return FormalSeries(op(self.padded(n), other.padded(n)))

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, c):
        if isinstance(c, FormalSeries):
            return NotImplemented
        return FormalSeries(self._coeffs * complex(c))

    __rmul__ = __mul__

    def __neg__(self):
        return FormalSeries(-self._coeffs)

    def allclose(self, other: "FormalSeries", atol: float = 1e-12, rtol: float = 0.0) -> bool:
        n = max(self.degree, other.degree) + 1
        return self.block_dim == other.block_dim and np.allclose(
            self.padded(n), other.padded(n), atol=atol, rtol=rtol)

    def __repr__(self):
        return f"FormalSeries(degree={self.degree}, block_dim={self.block_dim})"


@dataclass(frozen=True)
class MultiplierSymbol:
    """Finitely supported symbol ``lambda_k`` on the window ``[start, stop]``."""

    start: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex).ravel()
        if v.size == 0:
            raise ValueError("multiplier window must contain at least one index")
        object.__setattr__(self, "values", v)

    @property
    def stop(self) -> int:
        return self.start + self.values.size - 1

    def __call__(self, k):
        k = np.asarray(k)
        idx = k - self.start
        inside = (idx >= 0) & (idx < self.values.size)
        out = np.zeros(k.shape, dtype=complex)
        out[inside] = self.values[idx[inside]]
        return out

    @classmethod
    def from_kernel(cls, kernel: "KernelId") -> "MultiplierSymbol":
        lo, hi = kernel.support()
        return cls(lo, kernel_hat(kernel, np.arange(lo, hi + 1)))

    def l2(self) -> float:
        return float(np.linalg.norm(self.values))

    def diff_l2(self) -> float:
        """l2 norm of ``(lambda_{k+1} - lambda_k)`` over all of Z, boundary steps included."""
        padded = np.concatenate(([0.0], self.values, [0.0]))
        return float(np.linalg.norm(np.diff(padded)))


@dataclass(frozen=True)
class KernelId:
    """Dyadic kernel ``W_n`` or the widened kernel ``V_n``."""

    n: int
    variant: str = "W"

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("kernel index must be >= 0")
        if self.variant not in ("W", "V"):
            raise ValueError("variant must be 'W' or 'V'")

    def components(self) -> tuple[int, ...]:
        if self.variant == "W":
            return (self.n,)
        return tuple(j for j in (self.n - 1, self.n, self.n + 1) if j >= 0)

    def support(self) -> tuple[int, int]:
        lo = min(_w_support(j)[0] for j in self.components())
        hi = max(_w_support(j)[1] for j in self.components())
        return lo, hi


def _w_support(n: int) -> tuple[int, int]:
    if n == 0:
        return 0, 1
    return 2 ** (n - 1), 2 ** (n + 1)


def dn(n: int, alpha: float) -> float:
    """Generalized binomial coefficient ``prod_{j=1}^n (1 + alpha/j)``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return 1.0
    factors = 1.0 + alpha / np.arange(1, n + 1)
    if n > _LOG_SPACE_THRESHOLD and np.all(factors > 0):
        return float(np.exp(np.sum(np.log(factors))))
    return float(np.prod(factors))


def dn_table(n_max: int, alpha: float) -> np.ndarray:
    """``[D_0^alpha, ..., D_{n_max}^alpha]``, agreeing with :func:`dn` entrywise."""
    if n_max < 0:
        return np.zeros(0)
    factors = 1.0 + alpha / np.arange(1, n_max + 1)
    out = np.empty(n_max + 1)
    out[0] = 1.0
    head = min(n_max, _LOG_SPACE_THRESHOLD)
    out[1:head + 1] = np.cumprod(factors[:head])
    if n_max > _LOG_SPACE_THRESHOLD:
        if np.all(factors > 0):
            out[head + 1:] = np.exp(np.cumsum(np.log(factors))[head:])
        else:
            out[head + 1:] = np.cumprod(factors)[head:]
    return out


def wn_hat(n: int, k):
    """Fourier coefficient ``W_n^(k)`` of the dyadic kernel (vectorized over ``k``)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    k = np.asarray(k)
    if n == 0:
        out = ((k == 0) | (k == 1)).astype(float)
    else:
        lo, mid, hi = 2 ** (n - 1), 2 ** n, 2 ** (n + 1)
        kf = k.astype(float)
        rising = 2.0 ** (-n + 1) * (kf - lo)
        falling = 2.0 ** (-n) * (hi - kf)
        out = np.where((k >= lo) & (k <= mid), rising,
                       np.where((k > mid) & (k <= hi), falling, 0.0))
    return float(out) if out.ndim == 0 else out


def kernel_hat(kernel: KernelId, k):
    k = np.asarray(k)
    total = sum(np.asarray(wn_hat(j, k), dtype=float) for j in kernel.components())
    return float(total) if np.ndim(total) == 0 else total


def kernel_convolve(kernel: KernelId | int, f: FormalSeries) -> FormalSeries:
    """Coefficientwise product ``K^(k) f^(k)``."""
    if not isinstance(kernel, KernelId):
        kernel = KernelId(int(kernel))
    return f.scale_coeffs(kernel_hat(kernel, np.arange(f.degree + 1)))


def max_kernel_index(degree: int) -> int:
    """Largest ``n`` for which ``W_n`` can meet degrees ``0..degree``."""
    if degree <= 1:
        return 0 if degree <= 0 else 1
    return int(math.floor(math.log2(degree))) + 1


def partition_of_unity_check(k_max: int, tolerance: float = 1e-14) -> CheckReport:
    """Verify ``sum_n W_n^(k) = 1`` for ``0 <= k <= k_max``."""
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    k = np.arange(k_max + 1)
    total = np.zeros(k_max + 1)
    for n in range(max_kernel_index(k_max) + 2):
        total += wn_hat(n, k)
    dev = float(np.max(np.abs(total - 1.0)))
    return CheckReport("partition_of_unity", {"k_max": k_max}, measured=dev, bound=0.0,
                       tolerance=tolerance, kind="identity",
                       notes="max |sum_n W_n(k) - 1|")


def apply_multiplier(symbol: MultiplierSymbol, f: FormalSeries) -> FormalSeries:
    return f.scale_coeffs(symbol(np.arange(f.degree + 1)))


def i_t(f: FormalSeries, t: float) -> FormalSeries:
    """Scale coefficient ``k`` by ``(1 + k)^t``."""
    return f.scale_coeffs((1.0 + np.arange(f.degree + 1)) ** t)


def i_tilde(f: FormalSeries, t: float, inverse: bool = False) -> FormalSeries:
    """Scale coefficient ``k`` by ``D_k^t`` (or its reciprocal when ``inverse``)."""
    w = dn_table(f.degree, t)
    return f.scale_coeffs(1.0 / w if inverse else w)


def evaluate_on_grid(f: FormalSeries, M: int) -> np.ndarray:
    """Values ``f(e^{2 pi i m / M'})``, ``m = 0..M'-1``, with ``M'`` the next power of two.

    Returns an array of shape ``(M', d, d)``.
    """
    need = 2 * (f.degree + 1)
    if M < need:
        raise ValueError(f"grid size {M} too small for degree {f.degree}; need M >= {need}")
    M = _next_pow2(M)
    return M * np.fft.ifft(f.padded(M), axis=0)


def lacunary_series(a, block_dim: int = 1) -> FormalSeries:
    """``sum_k a_k z^(2^k)``."""
    a = list(np.asarray(a, dtype=complex).ravel()) if block_dim == 1 else list(a)
    if not a:
        raise ValueError("coefficient list must be nonempty")
    return FormalSeries.from_terms({2 ** k: v for k, v in enumerate(a)}, block_dim=block_dim)
