import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hankel_schatten import checks
from hankel_schatten.hankel import hankel_matrix, singular_values
from hankel_schatten.report import FIELDS, CheckReport
from hankel_schatten.series import FormalSeries, KernelId, MultiplierSymbol, dn, kernel_hat, lacunary_series

from conftest import series

INF = math.inf


# ---- report


def test_report_kinds():
    assert CheckReport("a", {}, 1.0, 1.0, 0.0).passed
    assert not CheckReport("a", {}, 1.1, 1.0, 0.05).passed
    assert CheckReport("a", {}, 1.0 + 1e-12, 1.0, 1e-10, kind="identity").passed
    assert CheckReport("a", {}, 0.9995, 1.0, 1e-3, kind="lower_bound").passed
    assert not CheckReport("a", {}, 0.99, 1.0, 1e-3, kind="lower_bound").passed
    assert CheckReport("a", {"envelope": (0.5, 2.0)}, 1.5, 2.0, 0.0, kind="envelope").passed
    assert not CheckReport("a", {"envelope": (0.5, 2.0)}, 0.4, 2.0, 0.0, kind="envelope").passed
    assert not CheckReport("a", {}, math.nan, 1.0, 0.1).passed
    with pytest.raises(ValueError):
        CheckReport("a", {}, 1.0, 1.0, 0.0, kind="weird")


def test_report_json_fields():
    rep = CheckReport("x", {"p": INF, "z": 1 + 2j, "v": np.float64(2.5)}, 3.0, 0.0, 0.0, kind="identity")
    d = json.loads(rep.to_json())
    assert tuple(d) == FIELDS
    assert d["params"] == {"p": "inf", "z": [1.0, 2.0], "v": 2.5}
    assert d["ratio"] == "inf" and d["pass"] is False
    assert rep.line().startswith("[FAIL] x:")


# ---- multiplier bounds


def test_multiplier_examples():
    delta = checks.check_multiplier_l1(MultiplierSymbol(0, [1.0]))
    assert delta.passed
    assert delta.measured == pytest.approx(1.0)
    assert delta.bound == pytest.approx(2 / math.sqrt(math.pi) * math.sqrt(math.sqrt(2)))
    zero = checks.check_multiplier_l1(MultiplierSymbol(4, [0.0, 0.0]))
    assert zero.passed and zero.measured == 0.0


@pytest.mark.parametrize("n", range(0, 11))
def test_kernel_l1(n):
    assert checks.check_kernel_l1(n).passed
    assert checks.check_multiplier_l1(MultiplierSymbol.from_kernel(KernelId(n))).passed


@given(st.integers(-30, 30), st.integers(1, 50), st.integers(0, 2 ** 32 - 1))
def test_multiplier_bound_random(start, n, seed):
    g = np.random.default_rng(seed)
    sym = MultiplierSymbol(start, g.standard_normal(n) + 1j * g.standard_normal(n))
    assert checks.check_multiplier_l1(sym).passed


def test_restricted_examples():
    const = checks.check_restricted_multiplier(MultiplierSymbol(0, np.full(20, 3.0)), (5, 12), 2.0, 5)
    assert const.passed and const.ratio <= 0.5 + 1e-12
    ramp = checks.check_restricted_multiplier(MultiplierSymbol(0, np.arange(40.0)), (8, 16), 2.0, 50)
    assert ramp.passed
    lo, hi = KernelId(3).support()
    w3 = MultiplierSymbol(lo, kernel_hat(KernelId(3), np.arange(lo, hi + 1)))
    assert checks.check_restricted_multiplier(w3, (lo, hi), 4.0, 10).passed
    with pytest.raises(ValueError):
        checks.check_restricted_multiplier(w3, (5, 2), 2.0, 1)


def test_restricted_bound_value():
    sym = MultiplierSymbol(0, [1.0, 2.0, 4.0])
    # sup = 4, largest step = 2, N = 3
    assert checks.restricted_multiplier_bound(sym, (0, 2)) == pytest.approx(2 * max(4, math.sqrt(3 * 4 * 2)))


# ---- identities


@pytest.mark.parametrize("alpha", [-0.4, 0.0, 0.7, 1.0, 2.3])
@pytest.mark.parametrize("beta", [-0.4, 0.0, 0.7, 1.0, 2.3])
def test_d_convolution(alpha, beta):
    for n in range(65):
        assert checks.check_d_convolution(n, alpha, beta).passed


@pytest.mark.parametrize("s, k, expected", [(0.5, 0, 0.5), (1.0, 1, 1 / 20)])
def test_beta_examples(s, k, expected):
    assert checks.beta_integral_closed_form(s, k) == pytest.approx(expected)
    assert checks.check_beta_integral(s, k).passed


def test_factorization_examples():
    assert checks.check_factorization(FormalSeries([1.0]), 0.2, 0.4, 2.0, 5).measured == 0.0
    f = checks.random_series(np.random.default_rng(0), 16)
    assert checks.check_factorization(f, 0.3, -0.1, 3.0, 20).passed
    assert checks.check_factorization(f, 0.3, -0.1, INF, 20).measured == 0.0


@given(series(max_degree=30, block_dim=2), st.floats(-0.45, 2), st.floats(-0.45, 2),
       st.sampled_from([1.0, 1.5, 3.0, INF]))
def test_factorization_block(f, a, b, p):
    assert checks.check_factorization(f, a, b, p, 16).passed


def test_duality_examples():
    one = FormalSeries([1.0])
    rep = checks.check_duality_identity(one, one, 0.4, 1.1, 1)
    assert rep.passed
    z = FormalSeries.monomial(1)
    rep = checks.check_duality_identity(z, FormalSeries.monomial(2), 0.0, 0.0, 4)
    assert rep.passed and rep.measured == 0.0
    g = np.random.default_rng(2)
    rep = checks.check_duality_identity(checks.random_series(g, 16), checks.random_series(g, 16), 0.0, 0.0, 33)
    assert rep.passed
    with pytest.raises(ValueError):
        checks.check_duality_identity(z, z, 0.0, 0.0, 2)


def test_s1_bound_random(rng):
    for _ in range(20):
        m = int(rng.integers(1, 40))
        f = checks.random_series(rng, int(rng.integers(0, m)))
        assert checks.check_s1_bound(f, rng.uniform(-0.45, 2), rng.uniform(-0.45, 2), m).passed


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0, INF])
def test_rank_one(p):
    assert checks.check_rank_one(p).passed


def test_fft_matvec_check(rng):
    assert checks.check_fft_matvec(33, rng).passed


# ---- Hankel norm checks


def test_paley_examples():
    rep = checks.check_paley_lower_bound([1.0])
    assert rep.passed and rep.measured == pytest.approx(1.0, rel=1e-9)
    rep = checks.check_paley_lower_bound(np.ones(7))
    assert rep.passed and rep.measured >= math.sqrt(7) / 3
    assert checks.check_paley_lower_bound(np.zeros(3)).passed
    with pytest.raises(ValueError):
        checks.paley_operator_norm(np.ones(16))


def test_paley_matches_dense_svd():
    a = np.random.default_rng(4).standard_normal(7)
    dense = singular_values(hankel_matrix(lacunary_series(a), m=2 ** 6 + 1))[0]
    assert checks.paley_operator_norm(a) == pytest.approx(dense, rel=1e-8)


@pytest.mark.parametrize("p", [1.0, 2.0, 3.0, INF])
def test_main_inequality_examples(p):
    assert checks.hankel_besov_ratio(FormalSeries([1.0]), p) == pytest.approx(1.0)
    expected = 1.0 if p == INF else 2 ** (1 / p)
    assert checks.hankel_besov_ratio(FormalSeries.monomial(1), p) == pytest.approx(expected)
    if p == INF:
        # the weights must satisfy alpha, beta > -1/2p, which is strict at p = inf
        with pytest.raises(ValueError):
            checks.check_main_inequality(FormalSeries.monomial(1), p)
        assert checks.check_main_inequality(FormalSeries.monomial(1), p, 0.1, 0.1).passed
    else:
        assert checks.check_main_inequality(FormalSeries.monomial(1), p).passed


@pytest.mark.parametrize("p", [1.0, 2.0, 3.0, 5.0])
def test_lacunary_ratio_lower_bound(p):
    n = int(p)
    rho = checks.hankel_besov_ratio(lacunary_series(np.ones(n + 1)), p, m=2 ** n + 1)
    assert rho >= math.sqrt(n + 1) / 12


def test_main_inequality_rejects_bad_weights():
    with pytest.raises(ValueError):
        checks.check_main_inequality(FormalSeries([1.0]), 2.0, -0.3, 0.0)


def test_hilbert_examples():
    assert checks.check_hilbert_equivalence(FormalSeries([1.0]), 1.0).passed
    rep = checks.check_hilbert_equivalence(FormalSeries.zero(), 1.0)
    assert rep.passed and "skipped" in rep.notes


@pytest.mark.parametrize("s", [0.1, 0.5, 1.0, 2.0, 3.0])
@pytest.mark.parametrize("k", [0, 1, 3, 17])
def test_hilbert_monomial_closed_form(s, k):
    b, w, d = checks.hilbert_norms(FormalSeries.monomial(k), s)
    assert d == pytest.approx(math.sqrt(s / (2 * s * dn(2 * k + 1, 2 * s))), rel=1e-10)
    assert w == pytest.approx((1 + k) ** -s, rel=1e-12)


@pytest.mark.parametrize("s", [0.1, 0.5, 1.0, 2.0, 3.0])
def test_hilbert_weights_reproduce_norms(s, rng):
    f = checks.random_series(rng, 40)
    w = checks.hilbert_weights(s, 40)
    direct = np.sqrt(w @ np.abs(f.scalar_coeffs) ** 2)
    assert np.allclose(checks.hilbert_norms(f, s), direct, rtol=1e-9)


def test_hilbert_worst_case_constant():
    # the spread is largest for f = z when s = 3: sqrt(D_3^6 / 3) = sqrt(168)
    assert checks.hilbert_equivalence_constant(3.0, 64) == pytest.approx(math.sqrt(168), rel=1e-12)
    b, w, d = checks.hilbert_norms(FormalSeries.monomial(1), 3.0)
    assert max(b, w, d) / min(b, w, d) == pytest.approx(math.sqrt(168), rel=1e-10)
    for s in (0.1, 0.5, 1.0, 2.0):
        assert checks.hilbert_equivalence_constant(s, 64) < 10.0


@given(series(max_degree=64), st.sampled_from([0.1, 0.5, 1.0, 2.0]))
def test_hilbert_equivalence_below_three(f, s):
    assert checks.check_hilbert_equivalence(f, s).passed
