"""Experiment runners.

Every experiment is split into independent cells, usually one per
``(p, trial)``. Each cell draws from its own stream derived from the master
seed, so the rows do not depend on the worker count. Rows are sorted before
emission.

CSV columns per experiment are fixed (see ``COLUMNS``).
"""

from __future__ import annotations

import csv
import io
import json
import math
import subprocess
import warnings
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable

import numpy as np

from .. import __version__, checks
from ..hankel import hankel_matrix, schatten_norm
from ..norms import BesovParams, GridSpec, PointwiseNorm, besov_norm
from ..projection import estimate_projection_norm, reference_profile
from ..series import FormalSeries, lacunary_series
from . import corpus
from .config import ExperimentConfig

INF = math.inf

COLUMNS = {
    "ratio_sweep": ["p", "trial", "family", "degree", "m", "block_dim", "alpha", "beta",
                    "schatten", "besov", "rho"],
    "block_sweep": ["p", "trial", "kind", "block_dim", "degree", "m", "schatten", "besov", "rho"],
    "lacunary_growth": ["p", "trial", "n", "m", "a_l2", "operator_norm", "besov", "besov_closed_form",
                        "paley_bound", "lower_bound", "best_lower_bound", "sqrt_p", "best_over_sqrt_p"],
    "projection_norm": ["p", "trial", "m", "starts", "estimate", "best_estimate", "reference",
                        "best_over_reference", "iterations"],
    "check_suite": ["family", "index", "name", "kind", "pass", "measured", "bound", "ratio",
                    "tolerance", "params", "notes"],
}

#: Relative tolerance for rho agreement across block sizes for ``pattern (x) I_d``.
BLOCK_IDENTITY_TOL = 1e-9
#: Random-block rho must lie in the scalar envelope widened by this factor.
BLOCK_ENVELOPE_FACTOR = 4.0
#: Paley check slack on the certified operator-norm lower bound.
PALEY_SLACK = 1e-3


@dataclass
class ExperimentResult:
    experiment: str
    rows: list[dict[str, Any]]
    summary: dict[str, Any]
    provenance: dict[str, Any]
    columns: list[str]
    passed: bool = True
    plot: list[tuple[float, float, float]] = field(default_factory=list)


def cell_rng(seed: int, *key) -> np.random.Generator:
    """Stream for one cell, derived from the master seed and a tuple key.

    String parts of the key are hashed with CRC32 and non-negative integers are
    used as they are.
    """
    words = [seed % 2 ** 64]
    for part in key:
        words.append(zlib.crc32(part.encode()) if isinstance(part, str) else int(part))
    return np.random.default_rng(np.random.SeedSequence(words))


def version_string() -> str:
    try:
        rev = subprocess.run(["git", "rev-parse", "--short", "HEAD"], cwd=Path(__file__).parent,
                             capture_output=True, text=True, timeout=5, check=True).stdout.strip()
    except (OSError, subprocess.SubprocessError):
        rev = ""
    return f"{__version__}+g{rev}" if rev else __version__


def _provenance(cfg: ExperimentConfig, **extra) -> dict[str, Any]:
    return {"config": cfg.as_dict(), "version": version_string(), "seed": cfg.seed, **extra}


def _map(fn: Callable, items: Iterable, jobs: int) -> list:
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _p_key(p: float) -> str:
    return "inf" if p == INF else repr(float(p))


def _loglog_slope(ps, values) -> float | None:
    pts = [(math.log(p), math.log(v)) for p, v in zip(ps, values) if p != INF and v > 0]
    if len(pts) < 2 or len({x for x, _ in pts}) < 2:
        return None
    x, y = np.array(pts).T
    return float(np.polyfit(x, y, 1)[0])


# ---------------------------------------------------------------------------
# symbols


def lacunary_indices(degree: int) -> int:
    """Largest ``K`` with ``2^K <= degree`` (``-1`` when ``degree == 0``)."""
    return int(math.floor(math.log2(degree))) if degree >= 1 else -1


def sample_symbol(family: str, degree: int, block_dim: int, rng: np.random.Generator) -> FormalSeries:
    """One symbol of the named family; non-Gaussian families are ``pattern (x) I_d``."""
    if family == "gaussian":
        return checks.random_series(rng, degree, block_dim)
    if family == "constant":
        c = complex(*rng.standard_normal(2)) / math.sqrt(2)
        scalar = FormalSeries(np.array([c]))
    elif family == "monomial":
        scalar = FormalSeries.monomial(degree, 1.0)
    elif family == "lacunary":
        K = lacunary_indices(degree)
        scalar = lacunary_series(np.ones(K + 1)) if K >= 0 else FormalSeries(np.array([1.0]))
    else:
        raise ValueError(f"unknown family {family!r}")
    return tensor_identity(scalar, block_dim)


def tensor_identity(f: FormalSeries, d: int) -> FormalSeries:
    """Coefficients ``c_n I_d``."""
    if d == 1:
        return f
    return FormalSeries(f.scalar_coeffs[:, None, None] * np.eye(d)[None])


def schatten_besov(f: FormalSeries, p: float, alpha: float, beta: float, m: int,
                   grid: GridSpec | None = None) -> tuple[float, float]:
    """``(||Gamma^{alpha,beta}_f||_{S^p}, ||f||_{B_p^{1/p+alpha+beta}})``."""
    s = (0.0 if p == INF else 1.0 / p) + alpha + beta
    pw = PointwiseNorm() if f.block_dim == 1 else PointwiseNorm.schatten(p)
    num = schatten_norm(hankel_matrix(f, alpha, beta, m), p)
    den = besov_norm(f, BesovParams(p, p, s), pw, grid)
    return num, den


# ---------------------------------------------------------------------------
# ratio sweep


def _ratio_row(cfg: ExperimentConfig, p: float, trial: int, f: FormalSeries, **extra) -> dict:
    num, den = schatten_besov(f, p, cfg.alpha, cfg.beta, cfg.m)
    return {"p": p, "trial": trial, "degree": f.degree, "m": cfg.m, "block_dim": f.block_dim,
            "schatten": num, "besov": den, "rho": num / den if den > 0 else math.nan, **extra}


def _trial_symbols(cfg: ExperimentConfig, block_dim: int) -> list[FormalSeries]:
    return [sample_symbol(cfg.family, cfg.degree, block_dim, cell_rng(cfg.seed, "ratio_sweep", t, block_dim))
            for t in range(cfg.trials)]


def run_ratio_sweep(cfg: ExperimentConfig, jobs: int = 1) -> ExperimentResult:
    """rho(p) = Schatten-p norm of the Hankel matrix over the Besov norm, per (p, trial).

    The symbol of a trial is shared by every ``p`` so that each trial traces a
    curve ``p -> rho(p)``.
    """
    symbols = _trial_symbols(cfg, cfg.block_dim)
    cells = [(p, t) for p in cfg.p_grid for t in range(cfg.trials)]
    rows = _map(lambda c: _ratio_row(cfg, c[0], c[1], symbols[c[1]], family=cfg.family,
                                     alpha=cfg.alpha, beta=cfg.beta), cells, jobs)
    rows.sort(key=lambda r: (r["p"], r["trial"]))
    max_rho = {}
    for r in rows:
        max_rho[_p_key(r["p"])] = max(max_rho.get(_p_key(r["p"]), -INF), r["rho"])
    ps = list(dict.fromkeys(r["p"] for r in rows))
    maxima = [max_rho[_p_key(p)] for p in ps]
    summary = {"max_rho": max_rho, "loglog_slope": _loglog_slope(ps, maxima),
               "min_rho": min(r["rho"] for r in rows)}
    passed = all(math.isfinite(r["rho"]) and r["rho"] > 0 for r in rows)
    return ExperimentResult("ratio_sweep", rows, summary, _provenance(cfg), COLUMNS["ratio_sweep"], passed,
                            plot=[(p, v, math.sqrt(p) if p != INF else INF) for p, v in zip(ps, maxima)])


# ---------------------------------------------------------------------------
# block sweep


def block_sizes(block_dim: int) -> list[int]:
    sizes, d = [], 1
    while d <= block_dim:
        sizes.append(d)
        d *= 2
    return sizes


def run_block_sweep(cfg: ExperimentConfig, jobs: int = 1) -> ExperimentResult:
    """Compare rho for ``pattern (x) I_d`` and for random ``d x d`` blocks, ``d = 1, 2, 4, ...``.

    ``pattern`` rows use one scalar Gaussian symbol per trial for every ``d``;
    ``random`` rows draw the same symbols as :func:`run_ratio_sweep` with
    ``block_dim = d`` and the Gaussian family.
    """
    sizes = block_sizes(cfg.block_dim)
    patterns = [checks.random_series(cell_rng(cfg.seed, "block_pattern", t), cfg.degree)
                for t in range(cfg.trials)]
    gauss_cfg = ExperimentConfig(**{**cfg.__dict__, "family": "gaussian"})
    randoms = {d: _trial_symbols(gauss_cfg, d) for d in sizes}
    cells = [(p, t, kind, d) for p in cfg.p_grid for t in range(cfg.trials)
             for kind in ("pattern", "random") for d in sizes]

    def run(cell):
        p, t, kind, d = cell
        f = tensor_identity(patterns[t], d) if kind == "pattern" else randoms[d][t]
        return _ratio_row(cfg, p, t, f, kind=kind)

    rows = _map(run, cells, jobs)
    rows.sort(key=lambda r: (r["p"], r["trial"], r["kind"], r["block_dim"]))
    per_p = {}
    passed = True
    for p in cfg.p_grid:
        sel = [r for r in rows if r["p"] == p]
        scalar = [r["rho"] for r in sel if r["kind"] == "pattern" and r["block_dim"] == 1]
        lo, hi = min(scalar), max(scalar)
        spread = 0.0
        for t in range(cfg.trials):
            vals = [r["rho"] for r in sel if r["kind"] == "pattern" and r["trial"] == t]
            spread = max(spread, (max(vals) - min(vals)) / min(vals))
        rand = [r["rho"] for r in sel if r["kind"] == "random"]
        in_env = all(lo / BLOCK_ENVELOPE_FACTOR <= v <= hi * BLOCK_ENVELOPE_FACTOR for v in rand)
        envelopes = {str(d): [min(r["rho"] for r in sel if r["kind"] == "random" and r["block_dim"] == d),
                              max(r["rho"] for r in sel if r["kind"] == "random" and r["block_dim"] == d)]
                     for d in sizes}
        per_p[_p_key(p)] = {"scalar_envelope": [lo, hi], "pattern_max_rel_spread": spread,
                            "random_envelopes": envelopes, "random_within_envelope": in_env,
                            "pattern_identical": spread <= BLOCK_IDENTITY_TOL}
        passed &= in_env and spread <= BLOCK_IDENTITY_TOL
    summary = {"block_sizes": sizes, "per_p": per_p, "identity_tol": BLOCK_IDENTITY_TOL,
               "envelope_factor": BLOCK_ENVELOPE_FACTOR}
    plot = [(p, max(r["rho"] for r in rows if r["p"] == p), per_p[_p_key(p)]["scalar_envelope"][1])
            for p in cfg.p_grid]
    return ExperimentResult("block_sweep", rows, summary, _provenance(cfg), COLUMNS["block_sweep"], passed, plot)


# ---------------------------------------------------------------------------
# lacunary growth


def lacunary_besov_closed_form(n: int, p: float) -> float:
    """``||sum_{k<=n} z^{2^k}||`` in ``B_p^{1/p}``: each monomial sits in one kernel block."""
    return (2.0 ** (n + 1) - 1.0) ** (1.0 / p)


def run_lacunary_growth(cfg: ExperimentConfig, jobs: int = 1) -> ExperimentResult:
    """Certified lower bounds on ``||Gamma||_{S^p} / ||phi||`` for all-ones lacunary symbols.

    ``n = floor(p)`` and the window is ``2^n + 1``. The Schatten norm is bounded
    below by the operator norm, itself bounded below by power iteration; trials
    differ only in the power-iteration start, and ``best_lower_bound`` keeps
    the best value seen so far.
    """
    for p in cfg.p_grid:
        if 2 ** math.floor(p) + 1 > checks.PALEY_MAX_SIZE:
            raise ValueError(f"p={p} needs size 2^{math.floor(p)}+1 above the cap 2^14")
    besov_cache = {}
    for p in cfg.p_grid:
        n = int(math.floor(p))
        f = lacunary_series(np.ones(n + 1))
        besov_cache[p] = besov_norm(f, BesovParams(p, p, 1.0 / p))

    def run(cell):
        p, t = cell
        n = int(math.floor(p))
        a = np.ones(n + 1)
        seed = int(cell_rng(cfg.seed, "lacunary_growth", t).integers(2 ** 31))
        op = checks.paley_operator_norm(a, seed=seed)
        besov = besov_cache[p]
        a_l2 = float(np.linalg.norm(a))
        return {"p": p, "trial": t, "n": n, "m": 2 ** n + 1, "a_l2": a_l2, "operator_norm": op,
                "besov": besov, "besov_closed_form": lacunary_besov_closed_form(n, p),
                "paley_bound": a_l2 / (3.0 * besov), "lower_bound": op / besov, "sqrt_p": math.sqrt(p)}

    rows = _map(run, [(p, t) for p in cfg.p_grid for t in range(cfg.trials)], jobs)
    rows.sort(key=lambda r: (r["p"], r["trial"]))
    best = {}
    for r in rows:
        best[r["p"]] = max(best.get(r["p"], 0.0), r["lower_bound"])
        r["best_lower_bound"] = best[r["p"]]
        r["best_over_sqrt_p"] = best[r["p"]] / r["sqrt_p"]
    paley_ok = all(r["operator_norm"] >= r["a_l2"] / 3.0 - PALEY_SLACK for r in rows)
    trend = {_p_key(p): best[p] / math.sqrt(p) for p in best}
    summary = {"best_lower_bound": {_p_key(p): v for p, v in best.items()},
               "best_over_sqrt_p": trend, "min_best_over_sqrt_p": min(trend.values()),
               "paley_bound_holds": paley_ok,
               "max_besov_closed_form_error": max(abs(r["besov"] - r["besov_closed_form"]) for r in rows)}
    plot = [(p, v, math.sqrt(p) / 12.0) for p, v in best.items()]
    return ExperimentResult("lacunary_growth", rows, summary, _provenance(cfg), COLUMNS["lacunary_growth"],
                            paley_ok, plot)


# ---------------------------------------------------------------------------
# projection norm


def run_projection_norm(cfg: ExperimentConfig, jobs: int = 1) -> ExperimentResult:
    """Multi-start ascent lower bounds on the norm of the antidiagonal-averaging projection."""
    def run(cell):
        p, t = cell
        seed = int(cell_rng(cfg.seed, "projection_norm", _p_key(p), t).integers(2 ** 63))
        est = estimate_projection_norm(p, cfg.m, cfg.starts, cfg.max_iter, seed=seed)
        return {"p": p, "trial": t, "m": cfg.m, "starts": cfg.starts, "estimate": est.estimate,
                "reference": est.reference, "iterations": int(sum(est.iterations)),
                "seed_kinds": sorted(set(est.seeds))}

    rows = _map(run, [(p, t) for p in cfg.p_grid for t in range(cfg.trials)], jobs)
    rows.sort(key=lambda r: (r["p"], r["trial"]))
    best = {}
    for r in rows:
        best[r["p"]] = max(best.get(r["p"], 0.0), r["estimate"])
        r["best_estimate"] = best[r["p"]]
        r["best_over_reference"] = best[r["p"]] / r["reference"]
        r.pop("seed_kinds")
    pairs = {}
    for p in best:
        q = p / (p - 1.0)
        match = [x for x in best if abs(x - q) <= 1e-9 * q]
        if p < 2.0 and match:
            pairs[f"{_p_key(p)}|{_p_key(match[0])}"] = abs(best[p] - best[match[0]]) / best[p]
    floor_ok = all(v >= 1.0 - 1e-6 for v in best.values())
    two_ok = all(v <= 1.0 + 1e-6 for p, v in best.items() if p == 2.0)
    summary = {"best_estimate": {_p_key(p): v for p, v in best.items()},
               "reference": {_p_key(p): reference_profile(p) for p in best},
               "duality_rel_gap": pairs, "at_least_one": floor_ok, "p2_contraction": two_ok}
    prov = _provenance(cfg, initialization="complex Gaussian and antidiagonal-sparse seeds, alternating")
    plot = [(p, v, reference_profile(p)) for p, v in best.items()]
    return ExperimentResult("projection_norm", rows, summary, prov, COLUMNS["projection_norm"],
                            floor_ok and two_ok, plot)


# ---------------------------------------------------------------------------
# check suite


def run_check_suite(cfg: ExperimentConfig, jobs: int = 1, only: list[str] | None = None,
                    index: int | None = None) -> ExperimentResult:
    """Run ``trials`` corpus instances of each check family (or one instance with ``index``)."""
    families = list(only) if only else list(corpus.FAMILIES)
    unknown = [f for f in families if f not in corpus.FAMILIES]
    if unknown:
        raise ValueError(f"unknown check family {unknown[0]!r}; choose from {', '.join(corpus.FAMILIES)}")
    indices = [index] if index is not None else list(range(cfg.trials))
    cells = [(fam, i) for fam in families for i in indices]
    if not cells:
        warnings.warn("check corpus is empty; nothing to run", RuntimeWarning, stacklevel=2)
    reports = _map(lambda c: corpus.run_instance(c[0], cfg.seed, c[1], cfg.slack), cells, jobs)
    rows = []
    for (fam, i), rep in zip(cells, reports):
        params = {k: v for k, v in rep.to_dict()["params"].items() if k not in ("family", "seed", "index")}
        rows.append({"family": fam, "index": i, "name": rep.name, "kind": rep.kind, "pass": rep.passed,
                     "measured": rep.measured, "bound": rep.bound, "ratio": rep.ratio,
                     "tolerance": rep.tolerance, "params": json.dumps(params, sort_keys=True),
                     "notes": rep.notes})
    order = sorted(range(len(rows)), key=lambda k: (rows[k]["family"], rows[k]["index"]))
    rows = [rows[k] for k in order]
    reports = [reports[k] for k in order]
    counts = {}
    for r in rows:
        c = counts.setdefault(r["family"], {"total": 0, "failed": 0})
        c["total"] += 1
        c["failed"] += not r["pass"]
    failures = [{"family": rep.params["family"], "index": rep.params["index"],
                 "repro": corpus.repro_command(rep), "report": rep.to_dict()}
                for rep in reports if not rep.passed]
    summary = {"total": len(rows), "failed": len(failures), "per_family": counts, "failures": failures}
    plot = [(float(k), r["ratio"], 1.0) for k, r in enumerate(rows)]
    return ExperimentResult("check_suite", rows, summary, _provenance(cfg), COLUMNS["check_suite"],
                            not failures, plot)


RUNNERS = {
    "ratio_sweep": run_ratio_sweep,
    "block_sweep": run_block_sweep,
    "lacunary_growth": run_lacunary_growth,
    "projection_norm": run_projection_norm,
    "check_suite": run_check_suite,
}


# ---------------------------------------------------------------------------
# output


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return "inf" if v == INF else ("-inf" if v == -INF else repr(v))
    return str(value)


def rows_to_csv(columns: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_cell(r[c]) for c in columns])
    return buf.getvalue()


def _json_safe(obj):
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else ("nan" if math.isnan(v) else ("inf" if v > 0 else "-inf"))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def sidecar_path(out: Path) -> Path:
    return out.with_suffix(".json")


def plot_path(out: Path) -> Path:
    return out.with_name(out.stem + ".plot.csv")


def write_result(result: ExperimentResult, out: str | Path, emit_plot_data: bool = False) -> list[Path]:
    """CSV rows at ``out``, JSON summary at ``out`` with ``.json``, optional plot triplets."""
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(rows_to_csv(result.columns, result.rows), encoding="utf-8", newline="")
    side = {"experiment": result.experiment, "pass": result.passed, "columns": result.columns,
            "rows": len(result.rows), "summary": result.summary, "provenance": result.provenance}
    sidecar_path(out).write_text(json.dumps(_json_safe(side), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    written = [out, sidecar_path(out)]
    if emit_plot_data:
        plot_rows = [{"x": x, "y": y, "reference": ref} for x, y, ref in result.plot]
        plot_path(out).write_text(rows_to_csv(["x", "y", "reference"], plot_rows), encoding="utf-8", newline="")
        written.append(plot_path(out))
    return written
