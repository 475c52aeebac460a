"""Named verifiers for the explicit identities and inequalities.

Every function returns a :class:`~hankel_schatten.report.CheckReport`. Random
inputs come from a ``numpy.random.Generator`` the caller supplies, so each
check is reproducible from its seed.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad

from .hankel import (HankelOperator, SVD_LIMIT, d_power, gamma_tilde_11, hankel_matrix,
                     hankel_matvec_fft, operator_norm_power, rank_one_l2_factor,
                     schatten_norm, trace_pairing)
from .norms import (BesovParams, GridSpec, PointwiseNorm, besov_norm, circle_lp_norm,
                    weighted_disc_norm, weighted_l2_norm)
from .report import CheckReport
from .series import (FormalSeries, KernelId, MultiplierSymbol, _next_pow2, dn, dn_table,
                     lacunary_series, max_kernel_index, wn_hat)

INF = math.inf

#: Relative slack on the measured side for quadrature-based inequality checks.
QUADRATURE_SLACK = 1e-3
#: Slack for checks that are exact up to roundoff (Parseval, p = 2).
EXACT_SLACK = 1e-10

MULTIPLIER_CONSTANT = 2.0 / math.sqrt(math.pi)
KERNEL_L1_BOUND = 2.0 * math.sqrt(3.0 / math.pi)


def random_series(rng: np.random.Generator, degree: int, block_dim: int = 1) -> FormalSeries:
    """I.i.d. standard complex Gaussian coefficients."""
    shape = (degree + 1, block_dim, block_dim)
    return FormalSeries((rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2))


def _slack(p: float) -> float:
    return EXACT_SLACK if p == 2 else QUADRATURE_SLACK


# Fourier multipliers

def multiplier_l1(symbol: MultiplierSymbol, grid: GridSpec | None = None) -> float:
    """``|| sum_k lambda_k z^k ||_{L^1(T)}`` by an oversampled grid mean."""
    n = symbol.values.size
    M = max(grid.M if grid else 0, 4096, _next_pow2(64 * n))
    # |sum lambda_k z^k| is unchanged by shifting the window to start at 0
    vals = M * np.fft.ifft(symbol.values, M)
    return float(np.mean(np.abs(vals)))


def check_multiplier_l1(symbol: MultiplierSymbol, grid: GridSpec | None = None,
                        slack: float = QUADRATURE_SLACK) -> CheckReport:
    """Convolution-kernel norm against ``(2/sqrt(pi)) sqrt(||lambda||_2 ||Delta lambda||_2)``."""
    measured = multiplier_l1(symbol, grid)
    bound = MULTIPLIER_CONSTANT * math.sqrt(symbol.l2() * symbol.diff_l2())
    return CheckReport("multiplier_l1", {"start": symbol.start, "stop": symbol.stop},
                       measured=measured, bound=bound, tolerance=slack,
                       notes=f"l2={symbol.l2():.6g} diff_l2={symbol.diff_l2():.6g}")


def check_kernel_l1(n: int, slack: float = QUADRATURE_SLACK) -> CheckReport:
    """L^1 norm of the dyadic kernel ``W_n`` against ``2 sqrt(3/pi)``."""
    symbol = MultiplierSymbol.from_kernel(KernelId(n))
    return CheckReport("kernel_l1", {"n": n}, measured=multiplier_l1(symbol),
                       bound=KERNEL_L1_BOUND, tolerance=slack)


def restricted_multiplier_bound(symbol: MultiplierSymbol, interval: tuple[int, int]) -> float:
    """``2 max(sup_I |lambda|, sqrt(N sup_I |lambda| sup |lambda_k - lambda_{k+1}|))``.

    ``N`` is the number of integers in ``I``; the difference supremum runs over
    ``a <= k < b``.
    """
    a, b = interval
    ks = np.arange(a, b + 1)
    lam = symbol(ks)
    sup = float(np.max(np.abs(lam)))
    step = float(np.max(np.abs(np.diff(lam)))) if ks.size > 1 else 0.0
    N = b - a + 1
    return 2.0 * max(sup, math.sqrt(N * sup * step))


def check_restricted_multiplier(symbol: MultiplierSymbol, interval: tuple[int, int], p: float,
                                trials: int, seed: int | np.random.Generator = 0,
                                slack: float | None = None) -> CheckReport:
    """Worst ``||M_lambda f||_p / ||f||_p`` over random ``f`` with spectrum in ``interval``."""
    a, b = interval
    if a < 0 or b < a:
        raise ValueError(f"interval must satisfy 0 <= a <= b, got {interval}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    slack = _slack(p) if slack is None else slack
    grid = GridSpec.for_degree(b)
    mult = symbol(np.arange(b + 1))
    worst = 0.0
    for _ in range(trials):
        c = np.zeros(b + 1, dtype=complex)
        c[a:] = rng.standard_normal(b - a + 1) + 1j * rng.standard_normal(b - a + 1)
        f = FormalSeries(c)
        nf = circle_lp_norm(f, p, grid=grid)
        if nf == 0.0:
            continue
        worst = max(worst, circle_lp_norm(FormalSeries(c * mult), p, grid=grid) / nf)
    bound = restricted_multiplier_bound(symbol, interval)
    return CheckReport("restricted_multiplier",
                       {"interval": [a, b], "p": p, "trials": trials},
                       measured=worst, bound=bound, tolerance=slack,
                       notes="measured is the worst operator ratio over the trials")


# closed-form identities

def check_d_convolution(n: int, alpha: float, beta: float, tolerance: float = 1e-10) -> CheckReport:
    """``sum_{j+k=n} D_j^alpha D_k^beta = D_n^{alpha+beta+1}``."""
    a = dn_table(n, alpha)
    b = dn_table(n, beta)
    lhs = float(np.dot(a, b[::-1]))
    rhs = dn(n, alpha + beta + 1.0)
    measured = lhs / rhs if rhs != 0 else lhs
    return CheckReport("d_convolution", {"n": n, "alpha": alpha, "beta": beta},
                       measured=measured, bound=1.0 if rhs != 0 else 0.0,
                       tolerance=tolerance, kind="identity",
                       notes=f"lhs={lhs!r} rhs={rhs!r}; measured is lhs/rhs")


def beta_integral_closed_form(s: float, k: int) -> float:
    return 1.0 / (2.0 * s * dn(2 * k + 1, 2.0 * s))


def check_beta_integral(s: float, k: int, tolerance: float = 1e-6) -> CheckReport:
    """Adaptive quadrature of ``int_0^1 (1-r)^{2s-1} r^{2k+1} dr`` against its closed form."""
    if s <= 0:
        raise ValueError("s must be > 0")
    val, _ = quad(lambda r: r ** (2 * k + 1), 0.0, 1.0, weight="alg", wvar=(0.0, 2.0 * s - 1.0),
                  epsabs=0.0, epsrel=1e-13, limit=200)
    target = beta_integral_closed_form(s, k)
    return CheckReport("beta_integral", {"s": s, "k": k}, measured=val / target, bound=1.0,
                       tolerance=tolerance, kind="identity",
                       notes=f"quadrature={val!r} closed_form={target!r}; measured is the ratio")


def check_factorization(f: FormalSeries, alpha: float, beta: float, p: float, m: int,
                        tolerance: float = 1e-12) -> CheckReport:
    """``Gamma^{a,b} = D^{1/2p} Gamma^{a+1/2p, b+1/2p} D^{1/2p}`` entrywise."""
    h = 0.0 if p == INF else 1.0 / (2.0 * p)
    direct = hankel_matrix(f, alpha, beta, m).entries
    D = d_power(m, h, f.block_dim).entries
    factored = D @ hankel_matrix(f, alpha + h, beta + h, m).entries @ D
    dev = float(np.max(np.abs(direct - factored) / np.maximum(1.0, np.abs(direct))))
    return CheckReport("factorization", {"alpha": alpha, "beta": beta, "p": p, "m": m,
                                         "degree": f.degree, "block_dim": f.block_dim},
                       measured=dev, bound=0.0, tolerance=tolerance, kind="identity",
                       notes="max entrywise |difference| / max(1, |entry|)")


def check_duality_identity(phi: FormalSeries, psi: FormalSeries, alpha: float, beta: float, m: int,
                           tolerance: float = 1e-10) -> CheckReport:
    """``<Gamma^{a,b}_phi, Gamma~_psi> = sum_n D_n^{a+b+3} phi^(n) psi^(n)``."""
    need = phi.degree + psi.degree + 1
    if m < need:
        raise ValueError(f"m={m} leaves antidiagonals incomplete; need m >= {need}")
    lhs = trace_pairing(hankel_matrix(phi, alpha, beta, m), gamma_tilde_11(psi, alpha, beta, m))
    n = min(phi.degree, psi.degree) + 1
    weights = dn_table(n - 1, alpha + beta + 3.0)
    terms = weights[:, None, None] * phi.coeffs[:n] * psi.coeffs[:n]
    rhs = complex(np.sum(terms))
    scale = float(np.sum(np.abs(terms))) or 1.0
    return CheckReport("duality_identity", {"alpha": alpha, "beta": beta, "m": m,
                                            "deg_phi": phi.degree, "deg_psi": psi.degree},
                       measured=abs(lhs - rhs) / scale, bound=0.0, tolerance=tolerance,
                       kind="identity", notes=f"lhs={lhs!r} rhs={rhs!r}; measured is |lhs-rhs|/scale")


def check_s1_bound(f: FormalSeries, alpha: float, beta: float, m: int,
                   tolerance: float = EXACT_SLACK) -> CheckReport:
    """Trace norm against ``||((1+j)^a)||_2 ||((1+k)^b)||_2 ||f||_1``.

    The L^1 norm is the mean over ``M > max(deg f, 2m - 2)`` equispaced nodes;
    at that size the matrix is exactly the grid average of the rank-one terms,
    so the bound holds for the discrete mean itself.
    """
    if f.block_dim != 1:
        raise ValueError("S^1 bound check is scalar")
    M = _next_pow2(max(2 * (f.degree + 1), 2 * m, 64))
    l1 = circle_lp_norm(f, 1.0, grid=GridSpec(M=M))
    s1 = schatten_norm(hankel_matrix(f, alpha, beta, m), 1.0)
    bound = rank_one_l2_factor(m, alpha) * rank_one_l2_factor(m, beta) * l1 + 1e-6
    return CheckReport("s1_bound", {"alpha": alpha, "beta": beta, "m": m, "degree": f.degree},
                       measured=s1, bound=bound, tolerance=tolerance)


def check_rank_one(p: float, tolerance: float = 1e-10) -> CheckReport:
    """``f = 1``: both the Schatten norm and the Besov norm equal 1."""
    f = FormalSeries([1.0])
    s = 0.0 if p == INF else 1.0 / p
    sp = schatten_norm(hankel_matrix(f, 0.0, 0.0, 4), p)
    bn = besov_norm(f, BesovParams(p, p, s))
    return CheckReport("rank_one", {"p": p}, measured=max(abs(sp - 1.0), abs(bn - 1.0)),
                       bound=0.0, tolerance=tolerance, kind="identity",
                       notes=f"schatten={sp!r} besov={bn!r}")


def check_fft_matvec(m: int, rng: np.random.Generator, tolerance: float = 1e-10) -> CheckReport:
    c = rng.standard_normal(2 * m - 1) + 1j * rng.standard_normal(2 * m - 1)
    x = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    j = np.arange(m)
    dense = c[j[:, None] + j[None, :]] @ x
    fast = hankel_matvec_fft(c, x)
    rel = float(np.linalg.norm(fast - dense) / np.linalg.norm(dense))
    return CheckReport("fft_matvec", {"m": m}, measured=rel, bound=0.0, tolerance=tolerance,
                       kind="identity", notes="relative l2 error against the dense product")


# Hankel norm estimates

PALEY_MAX_SIZE = 2 ** 14


def paley_operator_norm(a, seed: int = 0, iters: int = 2000, tol: float = 1e-12) -> float:
    """Power-iteration lower bound on ``||Gamma_{phi_a}||_{B(l^2)}`` at size ``2^n + 1``."""
    a = np.asarray(a, dtype=complex).ravel()
    n = a.size - 1
    m = 2 ** n + 1
    if m > PALEY_MAX_SIZE + 1:
        raise ValueError(f"size 2^{n}+1 exceeds the mat-vec cap 2^14")
    if not np.any(a):
        return 0.0
    return operator_norm_power(HankelOperator.from_series(lacunary_series(a), m), iters, tol, seed)


def check_paley_lower_bound(a, tol: float = 1e-3, seed: int = 0) -> CheckReport:
    """``||Gamma_{phi_a}|| >= ||a||_2 / 3``, certified by the operator norm."""
    a = np.asarray(a, dtype=complex).ravel()
    measured = paley_operator_norm(a, seed)
    return CheckReport("paley_lower_bound", {"n": a.size - 1, "a_l2": float(np.linalg.norm(a))},
                       measured=measured, bound=float(np.linalg.norm(a)) / 3.0, tolerance=tol,
                       kind="lower_bound", notes="operator norm via FFT mat-vec + power iteration")


def hankel_besov_ratio(f: FormalSeries, p: float, alpha: float = 0.0, beta: float = 0.0,
                       m: int | None = None, grid: GridSpec | None = None) -> float:
    """``||Gamma^{a,b}_f||_{S^p} / ||f||_{B_p^{1/p + a + b}}`` (block case uses Schatten-p blocks)."""
    m = f.degree + 1 if m is None else m
    if f.degree >= m:
        raise ValueError(f"degree {f.degree} must be < m={m} so the window holds the symbol")
    if m * f.block_dim > SVD_LIMIT:
        raise ValueError(f"m*d={m * f.block_dim} exceeds the dense SVD limit {SVD_LIMIT}")
    s = (0.0 if p == INF else 1.0 / p) + alpha + beta
    pw = PointwiseNorm() if f.block_dim == 1 else PointwiseNorm.schatten(p)
    num = schatten_norm(hankel_matrix(f, alpha, beta, m), p)
    den = besov_norm(f, BesovParams(p, p, s), pw, grid)
    return num / den


def default_envelope(p: float, alpha: float, beta: float) -> tuple[float, float]:
    """Generous two-sided envelope for the ratio; the true constants are not explicit.

    The upper end follows the growth ``(min(alpha, beta) + 1/2p)^{-(1+1/p)/2}``.
    """
    h = 0.0 if p == INF else 1.0 / (2.0 * p)
    expo = 0.5 * (1.0 + (0.0 if p == INF else 1.0 / p))
    return 1.0 / 50.0, 50.0 / (min(alpha, beta) + h) ** expo


def check_main_inequality(f: FormalSeries, p: float, alpha: float = 0.0, beta: float = 0.0,
                          m: int | None = None, grid: GridSpec | None = None,
                          envelope: tuple[float, float] | None = None,
                          tolerance: float = QUADRATURE_SLACK) -> CheckReport:
    h = 0.0 if p == INF else 1.0 / (2.0 * p)
    if not (alpha > -h and beta > -h):
        raise ValueError(f"need alpha, beta > -1/(2p) = {-h}")
    envelope = envelope or default_envelope(p, alpha, beta)
    rho = hankel_besov_ratio(f, p, alpha, beta, m, grid)
    return CheckReport("main_inequality", {"p": p, "alpha": alpha, "beta": beta,
                                           "m": m if m is not None else f.degree + 1,
                                           "degree": f.degree, "block_dim": f.block_dim,
                                           "envelope": list(envelope)},
                       measured=rho, bound=envelope[1], tolerance=tolerance, kind="envelope",
                       notes="ratio Schatten/Besov; envelope is empirical")


def hilbert_norms(f: FormalSeries, s: float, grid: GridSpec | None = None) -> tuple[float, float, float]:
    """Besov ``B_2^{-s}``, weighted l^2, and ``sqrt(s)`` times the disc norm."""
    grid = grid or GridSpec.for_degree(f.degree)
    pw = PointwiseNorm() if f.block_dim == 1 else PointwiseNorm.schatten(2.0)
    b = besov_norm(f, BesovParams(2, 2, -s), pw, grid)
    w = weighted_l2_norm(f, s)
    d = math.sqrt(s) * weighted_disc_norm(f, 2.0, s, pw, grid)
    return b, w, d


def hilbert_weights(s: float, degree: int) -> np.ndarray:
    """Per-coefficient squared weights of the three norms, shape ``(3, degree + 1)``.

    All three are diagonal in the coefficients, so ``||f||^2 = sum_k w_k |a_k|^2``
    for each row: Besov ``B_2^{-s}``, weighted l^2, and ``s`` times the squared
    disc norm (from the closed-form Beta integral).
    """
    k = np.arange(degree + 1)
    besov = sum(wn_hat(n, k) ** 2 * 2.0 ** (-2.0 * n * s) for n in range(max_kernel_index(degree) + 1))
    wl2 = (1.0 + k) ** (-2.0 * s)
    disc = np.array([s * beta_integral_closed_form(s, int(j)) for j in k])
    return np.array([besov, wl2, disc])


def hilbert_equivalence_constant(s: float, degree: int) -> float:
    """Exact ``sup_f max/min`` of the three norms over symbols of degree ``<= degree``."""
    w = hilbert_weights(s, degree)
    return float(max(np.sqrt(np.max(w[i] / w[j])) for i in range(3) for j in range(3) if i != j))


def check_hilbert_equivalence(f: FormalSeries, s: float, grid: GridSpec | None = None,
                              constant: float = 10.0) -> CheckReport:
    params = {"s": s, "degree": f.degree}
    if not np.any(f.coeffs):
        return CheckReport("hilbert_equivalence", params, measured=0.0, bound=constant,
                           tolerance=0.0, notes="zero symbol; skipped")
    b, w, d = hilbert_norms(f, s, grid)
    spread = max(b, w, d) / min(b, w, d)
    return CheckReport("hilbert_equivalence", params, measured=spread, bound=constant,
                       tolerance=EXACT_SLACK,
                       notes=f"besov={b:.6g} weighted_l2={w:.6g} disc={d:.6g}; measured is max/min")
