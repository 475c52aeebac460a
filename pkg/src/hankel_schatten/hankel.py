"""Matrix-side constructions: generalized (block) Hankel matrices, diagonal
weights, Schatten norms, FFT Hankel products, power iteration and the
antidiagonal-averaging projections.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import LinearOperator, aslinearoperator

from .series import FormalSeries, _next_pow2, dn_table

INF = math.inf

#: Largest dense dimension ``m * d`` for which full SVDs are computed.
SVD_LIMIT = 4096


@dataclass(frozen=True)
class BlockMatrix:
    """Dense ``(m d) x (m d)`` complex matrix made of ``d x d`` blocks."""

    entries: np.ndarray
    d: int = 1

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"block matrix must be square, got shape {a.shape}")
        if self.d < 1 or a.shape[0] % self.d or a.shape[0] == 0:
            raise ValueError(f"size {a.shape[0]} is not a positive multiple of d={self.d}")
        object.__setattr__(self, "entries", a)

    @property
    def m(self) -> int:
        return self.entries.shape[0] // self.d

    def block(self, j: int, k: int) -> np.ndarray:
        d = self.d
        return self.entries[j * d:(j + 1) * d, k * d:(k + 1) * d]

    @classmethod
    def from_blocks(cls, blocks: np.ndarray) -> "BlockMatrix":
        """From an array of shape ``(m, m, d, d)`` indexed ``[j, k, u, v]``."""
        m, _, d, _ = blocks.shape
        return cls(blocks.transpose(0, 2, 1, 3).reshape(m * d, m * d), d)

    def to_blocks(self) -> np.ndarray:
        m, d = self.m, self.d
        return self.entries.reshape(m, d, m, d).transpose(0, 2, 1, 3)

    def __matmul__(self, other):
        other_entries = other.entries if isinstance(other, BlockMatrix) else other
        return BlockMatrix(self.entries @ other_entries, self.d)


def _entries(A) -> np.ndarray:
    return A.entries if isinstance(A, BlockMatrix) else np.asarray(A)


def _weighted_hankel(f: FormalSeries, row_w: np.ndarray, col_w: np.ndarray, m: int) -> BlockMatrix:
    if m < 1:
        raise ValueError("m must be >= 1")
    c = f.padded(2 * m - 1)
    j = np.arange(m)
    blocks = c[j[:, None] + j[None, :]] * (row_w[:, None] * col_w[None, :])[:, :, None, None]
    return BlockMatrix.from_blocks(blocks)


def hankel_matrix(f: FormalSeries, alpha: float = 0.0, beta: float = 0.0, m: int | None = None) -> BlockMatrix:
    """Block ``(j, k)`` equal to ``(1+j)^alpha (1+k)^beta f^(j+k)``, ``0 <= j, k < m``."""
    m = f.degree + 1 if m is None else m
    w = 1.0 + np.arange(m)
    return _weighted_hankel(f, w ** alpha, w ** beta, m)


def singular_values(A) -> np.ndarray:
    a = _entries(A)
    if a.shape[0] > SVD_LIMIT:
        raise ValueError(f"dense SVD refused for dimension {a.shape[0]} > {SVD_LIMIT}; "
                         "use operator_norm_power for the operator norm")
    return np.linalg.svd(a, compute_uv=False)


def schatten_from_singular_values(sv: np.ndarray, p: float) -> float:
    sv = np.asarray(sv, dtype=float)
    if sv.size == 0:
        return 0.0
    top = float(np.max(sv))
    if p == INF or top == 0.0:
        return top
    return top * float(np.sum((sv / top) ** p)) ** (1.0 / p)


def schatten_norm(A, p: float) -> float:
    """``(sum sigma_i^p)^(1/p)``; the largest singular value for ``p = inf``."""
    if not p >= 1:
        raise ValueError("Schatten exponent must be >= 1")
    return schatten_from_singular_values(singular_values(A), p)


def hankel_matvec_fft(coeffs, x) -> np.ndarray:
    """``y_j = sum_k c_{j+k} x_k`` for ``j < m`` via FFT correlation.

    ``coeffs`` has length ``2m - 1`` (shorter input is zero-padded); ``x`` has
    length ``m`` or shape ``(m, r)`` for several right-hand sides.
    """
    x = np.asarray(x)
    coeffs = np.asarray(coeffs)
    m = x.shape[0]
    c = np.zeros(2 * m - 1, dtype=complex)
    cin = coeffs.astype(complex).ravel()[: 2 * m - 1]
    c[: cin.size] = cin
    L = _next_pow2(2 * m - 1)
    cf = np.fft.fft(c, L)
    xf = np.fft.fft(x[::-1], L, axis=0)
    if x.ndim == 2:
        cf = cf[:, None]
    y = np.fft.ifft(cf * xf, axis=0)[m - 1: 2 * m - 1]
    if not (np.iscomplexobj(x) or np.iscomplexobj(coeffs)):
        y = y.real
    return y


class HankelOperator(LinearOperator):
    """Matrix-free scalar Hankel operator ``(c_{j+k})_{0 <= j,k < m}``."""

    def __init__(self, coeffs, m: int):
        self.coeffs = np.zeros(2 * m - 1, dtype=complex)
        cin = np.asarray(coeffs, dtype=complex).ravel()[: 2 * m - 1]
        self.coeffs[: cin.size] = cin
        super().__init__(dtype=complex, shape=(m, m))

    @classmethod
    def from_series(cls, f: FormalSeries, m: int | None = None) -> "HankelOperator":
        m = f.degree + 1 if m is None else m
        return cls(f.scalar_coeffs, m)

    def _matvec(self, x):
        return hankel_matvec_fft(self.coeffs, np.asarray(x).reshape(self.shape[1]))

    def _matmat(self, X):
        return hankel_matvec_fft(self.coeffs, X)

    def _rmatvec(self, x):
        # Hankel matrices are symmetric, so A^H x = conj(A conj(x))
        return np.conj(self._matvec(np.conj(x)))

    def todense(self) -> np.ndarray:
        j = np.arange(self.shape[0])
        return self.coeffs[j[:, None] + j[None, :]]


def operator_norm_power(A, iters: int = 500, tol: float = 1e-10, seed: int = 0) -> float:
    """Largest singular value by power iteration on ``A^H A``.

    The returned value is ``max ||A v||`` over the unit iterates, hence always a
    lower bound on ``sigma_1``. A :class:`RuntimeWarning` is emitted when the
    iteration cap is reached before the relative change drops below ``tol``.
    """
    if isinstance(A, BlockMatrix):
        A = A.entries
    op = aslinearoperator(A)
    n_rows, n_cols = op.shape
    if n_rows != n_cols:
        raise ValueError("operator must be square")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n_cols) + 1j * rng.standard_normal(n_cols)
    v /= np.linalg.norm(v)
    best = 0.0
    prev = 0.0
    for _ in range(max(1, iters)):
        u = op.matvec(v)
        est = float(np.linalg.norm(u))
        best = max(best, est)
        if est == 0.0:
            return 0.0
        w = op.rmatvec(u)
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            return best
        v = w / nw
        if abs(est - prev) <= tol * est:
            return best
        prev = est
    warnings.warn(f"power iteration stopped at the cap of {iters} iterations "
                  f"(last relative change {abs(est - prev) / est:.2e}); returning best lower bound",
                  RuntimeWarning, stacklevel=2)
    return best


def antidiagonal_sums(A) -> np.ndarray:
    """Block sums ``S_n = sum_{s+t=n} A_{s,t}``, ``n = 0..2m-2``, shape ``(2m-1, d, d)``."""
    A = A if isinstance(A, BlockMatrix) else BlockMatrix(A)
    blocks = A.to_blocks()
    m, d = A.m, A.d
    out = np.zeros((2 * m - 1, d, d), dtype=complex)
    j = np.arange(m)
    np.add.at(out, (j[:, None] + j[None, :]).ravel(), blocks.reshape(m * m, d, d))
    return out


def p_hank_paper(A) -> BlockMatrix:
    """Antidiagonal averaging with divisor ``j+k+1`` of the zero-padded input.

    The output is reported at size ``2m - 1``, which holds every nonzero entry.
    """
    A = A if isinstance(A, BlockMatrix) else BlockMatrix(A)
    sums = antidiagonal_sums(A)
    n = np.arange(sums.shape[0])
    symbol = FormalSeries(sums / (n + 1.0)[:, None, None])
    return hankel_matrix(symbol, 0.0, 0.0, 2 * A.m - 1)


def p_hank_windowed(A) -> BlockMatrix:
    """Frobenius-orthogonal projection onto Hankel matrices inside the ``m x m`` window."""
    A = A if isinstance(A, BlockMatrix) else BlockMatrix(A)
    m = A.m
    sums = antidiagonal_sums(A)
    n = np.arange(2 * m - 1)
    counts = np.minimum(n, 2 * m - 2 - n) + 1.0
    return hankel_matrix(FormalSeries(sums / counts[:, None, None]), 0.0, 0.0, m)


def d_power(m: int, t: float, d: int = 1) -> BlockMatrix:
    """Diagonal ``(1+j)^{-t}`` (each entry repeated over a ``d x d`` identity block)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    diag = np.repeat((1.0 + np.arange(m)) ** (-t), d)
    return BlockMatrix(np.diag(diag).astype(complex), d)


def _half_inv(p: float) -> float:
    return 0.0 if p == INF else 1.0 / (2.0 * p)


def tp_matrix(f: FormalSeries, alpha: float, beta: float, p: float, m: int) -> BlockMatrix:
    """``(1+j)^{alpha-1/2p} (1+k)^{beta-1/2p} f^(j+k) / (1+j+k)^{alpha+beta}``."""
    h = _half_inv(p)
    w = 1.0 + np.arange(m)
    base = _weighted_hankel(f, w ** (alpha - h), w ** (beta - h), m)
    j = np.arange(m)
    denom = (1.0 + j[:, None] + j[None, :]) ** (alpha + beta)
    blocks = base.to_blocks() / denom[:, :, None, None]
    return BlockMatrix.from_blocks(blocks)


def gamma_tilde_11(g: FormalSeries, alpha: float, beta: float, m: int) -> BlockMatrix:
    """``D_j^{alpha+1}/(1+j)^alpha * D_k^{beta+1}/(1+k)^beta * g^(j+k)``."""
    w = 1.0 + np.arange(m)
    row = dn_table(m - 1, alpha + 1.0) / w ** alpha
    col = dn_table(m - 1, beta + 1.0) / w ** beta
    return _weighted_hankel(g, row, col, m)


def trace_pairing(A, B) -> complex:
    """Bilinear entrywise pairing ``sum A_{ab} B_{ab}`` (no conjugation)."""
    a, b = _entries(A), _entries(B)
    if a.shape != b.shape:
        raise ValueError(f"size mismatch: {a.shape} vs {b.shape}")
    return complex(np.sum(a * b))


def rank_one_l2_factor(m: int, alpha: float) -> float:
    """``|| ((1+j)^alpha)_{j<m} ||_2``."""
    return float(np.linalg.norm((1.0 + np.arange(m)) ** alpha))
