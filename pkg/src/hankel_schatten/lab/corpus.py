"""Seeded random corpus for the check suite.

Each family maps ``(rng, index, slack)`` to one CheckReport. The generator for
instance ``index`` of family ``name`` is derived from ``(seed, name, index)``
only, so instances can be run in any order or on their own.
"""

from __future__ import annotations

import math
import zlib
from typing import Callable

import numpy as np

from .. import checks
from ..norms import BesovParams, complementation_map
from ..report import CheckReport
from ..series import FormalSeries, KernelId, MultiplierSymbol, partition_of_unity_check

INF = math.inf
CONVOLUTION_EXPONENTS = (-0.4, 0.0, 0.7, 1.0, 2.3)
BETA_S = (0.1, 0.5, 1.0, 2.0)
HILBERT_S = (0.1, 0.5, 1.0, 2.0, 3.0)
RESTRICTED_P = (1.0, 2.0, 4.0, INF)
RANK_ONE_P = (1.0, 1.5, 2.0, 3.0, INF)


def derive_rng(seed: int, name: str, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed % 2 ** 64, zlib.crc32(name.encode()), index]))


def _complex(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def random_window_symbol(rng: np.random.Generator, index: int) -> MultiplierSymbol:
    """Windowed symbol; alternates rough, smooth and tent-shaped profiles."""
    start = int(rng.integers(-20, 41))
    n = int(rng.integers(1, 65))
    kind = index % 3
    if kind == 0:
        values = _complex(rng, n)
    elif kind == 1:
        values = np.cumsum(_complex(rng, n)) / math.sqrt(n)
    else:
        t = np.linspace(0.0, 1.0, n + 2)[1:-1]
        values = (1.0 - np.abs(2.0 * t - 1.0)) * complex(*rng.standard_normal(2))
    return MultiplierSymbol(start, values)


def _restricted_instance(rng: np.random.Generator, index: int):
    a = int(rng.integers(0, 33))
    N = int(rng.integers(1, 33))
    b = a + N - 1
    kind = index % 3
    ks = np.arange(a, b + 1)
    if kind == 0:
        values = _complex(rng, N)
    elif kind == 1:
        t = float(rng.uniform(-2.0, 2.0))
        values = ((1.0 + ks) / (1.0 + b)) ** t + 0j
    else:
        values = np.cumsum(_complex(rng, N)) / math.sqrt(N)
    return MultiplierSymbol(a, values), (a, b), RESTRICTED_P[(index // 3) % len(RESTRICTED_P)]


def fam_partition_of_unity(rng, index, slack):
    return partition_of_unity_check(2 ** (index % 16))


def fam_d_convolution(rng, index, slack):
    return checks.check_d_convolution(int(rng.integers(0, 65)),
                                      float(rng.choice(CONVOLUTION_EXPONENTS)),
                                      float(rng.choice(CONVOLUTION_EXPONENTS)))


def fam_beta_integral(rng, index, slack):
    return checks.check_beta_integral(BETA_S[index % len(BETA_S)], int(rng.integers(0, 9)))


def random_factorization_case(rng):
    m = int(rng.integers(1, 33))
    f = checks.random_series(rng, int(rng.integers(0, 2 * m - 1)), int(rng.choice([1, 1, 2])))
    p = float(rng.choice([1.0, 1.5, 2.0, 3.0, 7.0, INF]))
    return f, float(rng.uniform(-0.45, 2.0)), float(rng.uniform(-0.45, 2.0)), p, m


def fam_factorization(rng, index, slack):
    return checks.check_factorization(*random_factorization_case(rng))


def random_duality_case(rng):
    dp, dq = int(rng.integers(0, 17)), int(rng.integers(0, 17))
    d = int(rng.choice([1, 1, 2]))
    phi = checks.random_series(rng, dp, d)
    psi = checks.random_series(rng, dq, d)
    m = dp + dq + 1 + int(rng.integers(0, 4))
    return phi, psi, float(rng.uniform(-0.45, 2.0)), float(rng.uniform(-0.45, 2.0)), m


def fam_duality_identity(rng, index, slack):
    return checks.check_duality_identity(*random_duality_case(rng))


def fam_multiplier_l1(rng, index, slack):
    s = checks.QUADRATURE_SLACK if slack is None else slack
    if index % 4 == 3:
        return checks.check_kernel_l1((index // 4) % 11, slack=s)
    return checks.check_multiplier_l1(random_window_symbol(rng, index), slack=s)


def fam_restricted_multiplier(rng, index, slack):
    sym, interval, p = _restricted_instance(rng, index)
    return checks.check_restricted_multiplier(sym, interval, p, trials=3, seed=rng, slack=slack)


def random_s1_case(rng):
    m = int(rng.integers(1, 65))
    f = checks.random_series(rng, int(rng.integers(0, m)))
    return f, float(rng.uniform(-0.45, 2.0)), float(rng.uniform(-0.45, 2.0)), m


def fam_s1_bound(rng, index, slack):
    s = checks.EXACT_SLACK if slack is None else slack
    return checks.check_s1_bound(*random_s1_case(rng), tolerance=s)


def fam_rank_one(rng, index, slack):
    return checks.check_rank_one(RANK_ONE_P[index % len(RANK_ONE_P)])


def fam_paley(rng, index, slack):
    n = 1 + index % 12
    return checks.check_paley_lower_bound(np.ones(n + 1), seed=int(rng.integers(2 ** 31)))


def fam_fft_matvec(rng, index, slack):
    m = int(rng.choice([int(rng.integers(1, 65)), 1000]))
    return checks.check_fft_matvec(m, rng)


def fam_main_inequality(rng, index, slack):
    p = float(rng.choice([1.0, 1.5, 2.0, 3.0, 4.0, INF]))
    h = 0.0 if p == INF else 1.0 / (2.0 * p)
    lo = -h + 0.05 if p != INF else 0.05
    alpha, beta = (float(rng.uniform(lo, 1.0)) for _ in range(2))
    f = checks.random_series(rng, int(rng.integers(0, 16)), int(rng.choice([1, 1, 2])))
    s = checks.QUADRATURE_SLACK if slack is None else slack
    return checks.check_main_inequality(f, p, alpha, beta, tolerance=s)


def fam_hilbert(rng, index, slack):
    f = checks.random_series(rng, int(rng.integers(0, 65)))
    return checks.check_hilbert_equivalence(f, HILBERT_S[index % len(HILBERT_S)])


def random_complementation_case(rng, index):
    s = float((-2, -1, 0, 1, 2)[index % 5])
    p = float(rng.choice([1.0, 2.0, 4.0]))
    q = float(rng.choice([1.0, 2.0, INF]))
    count = int(rng.integers(1, 6))
    pieces = [checks.random_series(rng, int(rng.integers(0, 2 ** (n + 2)))) for n in range(count)]
    return pieces, BesovParams(p, q, s)


def fam_complementation(rng, index, slack):
    pieces, bp = random_complementation_case(rng, index)
    _, report = complementation_map(pieces, bp, slack=checks.QUADRATURE_SLACK if slack is None else slack)
    return report


FAMILIES: dict[str, Callable[[np.random.Generator, int, float | None], CheckReport]] = {
    "partition_of_unity": fam_partition_of_unity,
    "d_convolution": fam_d_convolution,
    "beta_integral": fam_beta_integral,
    "factorization": fam_factorization,
    "duality_identity": fam_duality_identity,
    "multiplier_l1": fam_multiplier_l1,
    "restricted_multiplier": fam_restricted_multiplier,
    "s1_bound": fam_s1_bound,
    "rank_one": fam_rank_one,
    "paley_lower_bound": fam_paley,
    "fft_matvec": fam_fft_matvec,
    "main_inequality": fam_main_inequality,
    "hilbert_equivalence": fam_hilbert,
    "complementation": fam_complementation,
}


def run_instance(name: str, seed: int, index: int, slack: float | None = None) -> CheckReport:
    report = FAMILIES[name](derive_rng(seed, name, index), index, slack)
    report.params = {"family": name, "seed": seed, "index": index, **report.params}
    return report


def repro_command(report: CheckReport) -> str:
    p = report.params
    return (f"hankel-lab check-suite --seed {p['seed']} --only {p['family']} "
            f"--index {p['index']} --out repro.csv")


__all__ = ["FAMILIES", "derive_rng", "run_instance", "repro_command", "random_window_symbol",
           "KernelId", "FormalSeries"]
