"""Monte Carlo harness: seeded trials, sweeps over n, slope fits, CSV I/O.

A trial draws a ground-truth matrix on a fixed topology (true ranking =
identity), samples observations under a random assignment, runs one
estimator, and records error metrics.  Sweeps are reproducible: every
trial's generator is seeded by a stated 64-bit mix of (master_seed, n,
trial_index), records are emitted sorted by (n, trial) regardless of
execution order, and the CSV serialization is byte-stable.

Wall-clock runtime is carried on each record but written to CSV only on
request, so that re-runs of the same spec produce identical bytes.
"""

from __future__ import annotations

import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .estimators import asp_estimate, bap_estimate
from .graphs import Graph, degree_functional, make_topology
from .models import (
    frobenius_error,
    identity_permutation,
    kt_distance,
    make_noisy_sorting,
    sample_sst_bands,
)
from .observation import assign_random, observe

__all__ = [
    "ExperimentSpec",
    "TrialRecord",
    "SlopeFit",
    "derive_seed",
    "build_graph",
    "run_trial",
    "run_sweep",
    "fit_slope",
    "records_to_csv",
    "records_from_csv",
    "summarize",
    "parse_config",
    "CSV_HEADER",
]

CSV_HEADER = "graph,n,trial,seed,estimator,model,frob_err,kt,lambda_hat,deg_functional,runtime_ms"

_MODELS = ("ns", "sst")
_ESTIMATORS = ("asp", "bap", "bap1")
_MODES = ("bernoulli", "expectation")
_GRAPH_STREAM_TAG = 0x67726170680AF00D  # distinct stream for graph randomness

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class ExperimentSpec:
    """One sweep: a graph family, a model, an estimator, and seeds."""

    graph_family: str
    n_values: tuple[int, ...]
    model: str = "ns"
    lambda_star: float = 0.4
    estimator: str = "asp"
    trials: int = 10
    master_seed: int = 0
    mode: str = "bernoulli"
    bipartite_alpha: float | None = None
    edge_probability: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if len(self.n_values) == 0 or any(
            b <= a for a, b in zip(self.n_values, self.n_values[1:])
        ):
            raise ValueError("n_values must be nonempty and strictly increasing")
        if self.model not in _MODELS:
            raise ValueError(f"model must be one of {_MODELS}")
        if self.estimator not in _ESTIMATORS:
            raise ValueError(f"estimator must be one of {_ESTIMATORS}")
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}")
        if self.model == "ns" and not 0.0 <= self.lambda_star <= 0.5:
            raise ValueError("lambda_star must lie in [0, 1/2]")


@dataclass(frozen=True)
class TrialRecord:
    graph_family: str
    n: int
    trial_index: int
    seed: int
    estimator: str
    model: str
    frob_err: float | None
    kt_dist: int | None
    lambda_hat: float | None
    degree_functional: float | None
    runtime_ms: float | None
    error: str | None = None


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(master_seed: int, *parts: int) -> int:
    """Deterministic 64-bit trial seed: fold each part through splitmix64."""
    h = _splitmix64(master_seed & _MASK64)
    for p in parts:
        h = _splitmix64(h ^ (p & _MASK64))
    return h


def build_graph(spec: ExperimentSpec, n: int) -> Graph:
    """Topology for one sweep point; Erdos-Renyi is seeded by (master_seed, n)
    only, so the graph is fixed across trials."""
    rng = None
    if spec.graph_family == "erdos_renyi":
        rng = np.random.default_rng(derive_seed(spec.master_seed, n, _GRAPH_STREAM_TAG))
    return make_topology(
        spec.graph_family,
        n,
        alpha=spec.bipartite_alpha,
        p=spec.edge_probability,
        rng=rng,
    )


def run_trial(
    spec: ExperimentSpec, n: int, trial_index: int, graph: Graph | None = None
) -> TrialRecord:
    """Run one seeded trial; estimator failures become failed records."""
    seed = derive_seed(spec.master_seed, n, trial_index)
    start = time.perf_counter()
    try:
        g = graph if graph is not None else build_graph(spec, n)
        rng = np.random.default_rng(seed)
        pi_star = identity_permutation(n)
        if spec.model == "ns":
            m_star = make_noisy_sorting(pi_star, spec.lambda_star)
        else:
            m_star = sample_sst_bands(n, rng)
        sigma1 = assign_random(g, rng)
        value_rng = rng if spec.mode == "bernoulli" else None
        s1 = observe(m_star, g, sigma1, spec.mode, value_rng)
        kt = None
        lam_hat = None
        if spec.estimator == "asp":
            result = asp_estimate(s1)
            m_hat = result.m_hat
            kt = kt_distance(pi_star, result.pi_hat)
            lam_hat = result.lambda_hat
        elif spec.estimator == "bap":
            sigma2 = assign_random(g, rng)
            s2 = observe(m_star, g, sigma2, spec.mode, value_rng)
            m_hat = bap_estimate(s1, s2, g)
        else:  # bap1
            m_hat = bap_estimate(s1, None, g, single_sample=True)
        record = TrialRecord(
            graph_family=spec.graph_family,
            n=n,
            trial_index=trial_index,
            seed=seed,
            estimator=spec.estimator,
            model=spec.model,
            frob_err=frobenius_error(m_hat, m_star),
            kt_dist=kt,
            lambda_hat=lam_hat,
            degree_functional=degree_functional(g),
            runtime_ms=(time.perf_counter() - start) * 1e3,
        )
    except Exception as exc:  # noqa: BLE001 - failed trials are data, not crashes
        record = TrialRecord(
            graph_family=spec.graph_family,
            n=n,
            trial_index=trial_index,
            seed=seed,
            estimator=spec.estimator,
            model=spec.model,
            frob_err=None,
            kt_dist=None,
            lambda_hat=None,
            degree_functional=None,
            runtime_ms=(time.perf_counter() - start) * 1e3,
            error=f"{type(exc).__name__}: {exc}",
        )
    return record


def _run_task(args) -> TrialRecord:
    spec, n, trial_index = args
    return run_trial(spec, n, trial_index, graph=_graph_cached(spec, n))


_GRAPH_CACHE: dict[tuple, Graph] = {}


def _graph_cached(spec: ExperimentSpec, n: int) -> Graph:
    key = (
        spec.graph_family,
        n,
        spec.bipartite_alpha,
        spec.edge_probability,
        spec.master_seed if spec.graph_family == "erdos_renyi" else None,
    )
    if key not in _GRAPH_CACHE:
        _GRAPH_CACHE[key] = build_graph(spec, n)
    return _GRAPH_CACHE[key]


def run_sweep(spec: ExperimentSpec, workers: int = 1) -> list[TrialRecord]:
    """All (n, trial) combinations, output sorted by (n, trial_index)."""
    tasks = [(spec, n, t) for n in spec.n_values for t in range(spec.trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_task, tasks, chunksize=4))
    else:
        records = [_run_task(task) for task in tasks]
    records.sort(key=lambda r: (r.n, r.trial_index))
    return records


@dataclass(frozen=True)
class SlopeFit:
    slope: float | None
    intercept: float | None
    r_squared: float | None
    n_points: int
    status: str = "ok"  # "ok" or "exact" (some mean error is zero)


def _successful(records) -> list[TrialRecord]:
    return [r for r in records if r.error is None]


def mean_errors(records) -> dict[int, float]:
    """Arithmetic mean of frob_err over successful trials, keyed by n."""
    by_n: dict[int, list[float]] = {}
    for r in _successful(records):
        by_n.setdefault(r.n, []).append(r.frob_err)
    return {n: float(np.mean(v)) for n, v in sorted(by_n.items())}


def fit_slope(
    records,
    group_key: tuple[str, ...] = ("graph_family", "estimator", "model"),
) -> dict[tuple, SlopeFit]:
    """Per-group OLS of log(mean error) on log(n)."""
    groups: dict[tuple, list[TrialRecord]] = {}
    for r in _successful(records):
        key = tuple(getattr(r, f) for f in group_key)
        groups.setdefault(key, []).append(r)
    out: dict[tuple, SlopeFit] = {}
    for key, group in groups.items():
        means = mean_errors(group)
        if len(means) < 2:
            raise ValueError(f"group {key} has fewer than 2 distinct n values")
        if any(v == 0.0 for v in means.values()):
            out[key] = SlopeFit(None, None, None, len(means), status="exact")
            continue
        x = np.log(np.fromiter(means.keys(), dtype=np.float64))
        y = np.log(np.fromiter(means.values(), dtype=np.float64))
        slope, intercept = np.polyfit(x, y, 1)
        resid = y - (slope * x + intercept)
        ss_tot = float(np.sum((y - y.mean()) ** 2))
        r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid**2)) / ss_tot
        out[key] = SlopeFit(float(slope), float(intercept), r2, len(means))
    return out


# ---------------------------------------------------------------------------
# CSV and config
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def records_to_csv(records, include_runtime: bool = False) -> str:
    """Stable CSV; runtime_ms stays empty unless include_runtime is set,
    keeping re-runs of the same spec byte-identical."""
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for r in records:
        runtime = r.runtime_ms if include_runtime else None
        fields = (
            r.graph_family,
            r.n,
            r.trial_index,
            r.seed,
            r.estimator,
            r.model,
            r.frob_err,
            r.kt_dist,
            r.lambda_hat,
            r.degree_functional,
            runtime,
        )
        buf.write(",".join(_fmt(f) for f in fields) + "\n")
    return buf.getvalue()


def records_from_csv(text: str) -> list[TrialRecord]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError("missing or unexpected CSV header")
    records = []
    for ln in lines[1:]:
        f = ln.split(",")
        if len(f) != 11:
            raise ValueError(f"expected 11 fields, got {len(f)}: {ln!r}")
        records.append(
            TrialRecord(
                graph_family=f[0],
                n=int(f[1]),
                trial_index=int(f[2]),
                seed=int(f[3]),
                estimator=f[4],
                model=f[5],
                frob_err=float(f[6]) if f[6] else None,
                kt_dist=int(f[7]) if f[7] else None,
                lambda_hat=float(f[8]) if f[8] else None,
                degree_functional=float(f[9]) if f[9] else None,
                runtime_ms=float(f[10]) if f[10] else None,
                error=None if f[6] else "failed (metrics absent in CSV)",
            )
        )
    return records


def summarize(records) -> str:
    """Mean error per n plus a failure footer."""
    lines = []
    means = mean_errors(records)
    for n, err in means.items():
        lines.append(f"n={n}: mean frob_err={err:.6g}")
    failures = [r for r in records if r.error is not None]
    if failures:
        lines.append(f"failed trials: {len(failures)}")
        for r in failures:
            lines.append(f"  n={r.n} trial={r.trial_index}: {r.error}")
    else:
        lines.append("failed trials: 0")
    return "\n".join(lines) + "\n"


_CONFIG_KEYS = {
    "graph": "graph_family",
    "n_list": "n_values",
    "model": "model",
    "lambda": "lambda_star",
    "estimator": "estimator",
    "trials": "trials",
    "seed": "master_seed",
    "mode": "mode",
    "alpha": "bipartite_alpha",
    "p": "edge_probability",
}

_ESTIMATOR_ALIASES = {"asp": "asp", "bap": "bap", "bap1": "bap1"}
_MODEL_ALIASES = {"ns": "ns", "sst": "sst"}


def parse_config(text: str) -> ExperimentSpec:
    """Flat key = value lines with # comments; keys mirror the CLI flags."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ValueError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        raw[key] = value
    if "graph" not in raw or "n_list" not in raw:
        raise ValueError("config requires at least 'graph' and 'n_list'")
    kwargs: dict = {
        "graph_family": raw["graph"],
        "n_values": tuple(int(tok) for tok in raw["n_list"].split(",")),
    }
    if "model" in raw:
        kwargs["model"] = _MODEL_ALIASES.get(raw["model"], raw["model"])
    if "lambda" in raw:
        kwargs["lambda_star"] = float(raw["lambda"])
    if "estimator" in raw:
        kwargs["estimator"] = _ESTIMATOR_ALIASES.get(raw["estimator"], raw["estimator"])
    if "trials" in raw:
        kwargs["trials"] = int(raw["trials"])
    if "seed" in raw:
        kwargs["master_seed"] = int(raw["seed"])
    if "mode" in raw:
        kwargs["mode"] = raw["mode"]
    if "alpha" in raw:
        kwargs["bipartite_alpha"] = float(raw["alpha"])
    if "p" in raw:
        kwargs["edge_probability"] = float(raw["p"])
    return ExperimentSpec(**kwargs)
