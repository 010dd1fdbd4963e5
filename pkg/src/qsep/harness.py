"""Monte Carlo measurement harness.

Three mutually checking evaluators for the certificate-guided collision
walk (full-start enumeration, a closed-form sum over the realized
structures, and an unfloored analytic form), seeded trial runners with a
per-trial witness soundness check, paired separation experiments with
pilot-calibrated budgets, and log-log slope fitting.

Seeding layout: every trial derives generator, relabeling, and detector
streams from SeedSequence([master_seed, point, trial]) spawns, so a run
is reproducible from the master seed alone and no stream is shared
between trial components. Wall-clock time is never written to output
files; timing belongs on stdout only.
"""

from __future__ import annotations

import csv
import hashlib
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, is_dataclass
from fractions import Fraction

import numpy as np

from qsep.detectors import (
    BUDGET_EXCEEDED,
    EXHAUSTED,
    FOUND,
    cert_claw_search,
    cert_collision_search,
    cert_fixedpoint_search,
    cert_star_search,
    cert_starpath_search,
    edge_wedge_search,
    multiscale_collision_search,
    path_k_search,
    uniform_probe_baseline,
)
from qsep.generators import (
    FixedPointParams,
    ScaleParams,
    gen_claw_graph,
    gen_collision_function,
    gen_fixedpoint_function,
    gen_star_graph,
    gen_starpath_graph,
)
from qsep.oracle import (
    CountedOracle,
    _unrelabel_witness,
    canonical_json,
    validate_witness,
)

# ---------------------------------------------------------------------------
# exact evaluators for the capped collision walk


@dataclass(frozen=True)
class CertExpectation:
    """Per-attempt law of a capped forward walk from a uniform start.

    success_prob: P(walk certifies a collision before the cap)
    cost_per_attempt: E[queries spent by one walk]
    expected_total: E[queries until first success] under independent
    restarts (None when success is impossible).
    """

    success_prob: Fraction
    cost_per_attempt: Fraction
    expected_total: Fraction | None

    def as_floats(self) -> tuple[float, float, float]:
        return (float(self.success_prob), float(self.cost_per_attempt),
                math.inf if self.expected_total is None else float(self.expected_total))


def _default_scale(instance, t):
    if t is not None:
        return int(t)
    t = instance.meta.extras.get("t")
    if t is None:
        raise ValueError("instance carries no scale; pass t explicitly")
    return int(t)


def exact_cert_expectation(instance, t=None) -> CertExpectation:
    """Enumerate every start of the capped walk on a function instance.

    Works for any functional graph; never reads structure metadata. The
    walk from x costs min(tau + sigma, 2^t) queries and succeeds exactly
    when tau >= 1 and tau + sigma <= 2^t, where tau is the distance from
    x to its cycle and sigma that cycle's length.
    """
    if instance.model != "function":
        raise ValueError("exact enumeration needs a function instance")
    t = _default_scale(instance, t)
    cap = 1 << t
    n = instance.n
    dtype = np.int32 if n < (1 << 31) else np.int64
    succ = instance.succ.astype(dtype)

    levels = max(1, math.ceil(math.log2(max(n, 2)))) + 1
    jumps = [succ]
    for _ in range(levels):
        jumps.append(jumps[-1][jumps[-1]])
    far = jumps[-1]  # 2^levels >= 2n steps: on-cycle for every start

    on_cycle = np.zeros(n, dtype=bool)
    on_cycle[np.unique(far)] = True
    cyc_len = np.zeros(n, dtype=np.int64)
    seen = np.zeros(n, dtype=bool)
    raw = instance.succ
    for c in np.flatnonzero(on_cycle).tolist():
        if seen[c]:
            continue
        ring = [c]
        seen[c] = True
        x = int(raw[c])
        while x != c:
            ring.append(x)
            seen[x] = True
            x = int(raw[x])
        cyc_len[ring] = len(ring)
    sigma = cyc_len[far]

    tau = np.zeros(n, dtype=np.int64)
    cur = np.arange(n, dtype=dtype)
    for k in range(levels, -1, -1):
        nxt = jumps[k][cur]
        off = ~on_cycle[nxt]
        tau[off] += 1 << k
        cur[off] = nxt[off]
    tau += ~on_cycle[np.arange(n)]

    cost = np.minimum(tau + sigma, cap)
    good = (tau >= 1) & (tau + sigma <= cap)
    cost_sum = int(cost.sum())
    good_sum = int(good.sum())
    return CertExpectation(
        Fraction(good_sum, n),
        Fraction(cost_sum, n),
        Fraction(cost_sum, good_sum) if good_sum else None,
    )


def meta_cert_expectation(instance, t=None) -> CertExpectation:
    """Closed-form sum over the realized structure list.

    A cycle of length lam contributes lam * min(lam, cap) cost and no
    successes; an open path of length L rewired at offset m contributes m
    successes and m*L - m*(m-1)/2 + (L-m)^2 cost; an isolated element
    costs one query. Must agree exactly with exact_cert_expectation.
    """
    t = _default_scale(instance, t)
    cap = 1 << t
    n = instance.n
    offsets = [int(m) for m in instance.meta.extras.get("witness_offsets", [])]
    path_idx = 0
    cost_sum = 0
    good_sum = 0
    for kind, length, _ in instance.meta.structures():
        if kind == "cycle":
            cost_sum += length * min(length, cap)
        elif kind == "path":
            m = offsets[path_idx]
            path_idx += 1
            good_sum += m
            cost_sum += m * length - m * (m - 1) // 2 + (length - m) ** 2
        elif kind == "isolated":
            cost_sum += length
        else:
            raise ValueError(f"unexpected structure kind {kind!r}")
    if path_idx != len(offsets):
        raise ValueError("witness offset list does not match path structures")
    return CertExpectation(
        Fraction(good_sum, n),
        Fraction(cost_sum, n),
        Fraction(cost_sum, good_sum) if good_sum else None,
    )


def analytic_cert_expectation(n: int, params: ScaleParams, t: int,
                              rho: float) -> tuple[float, float, float]:
    """Unfloored analytic form of the per-attempt walk law.

    Path counts are kept real-valued (no floors) and the witness offset
    is averaged over its uniform range, so this tracks the realized
    instance only up to rounding and offset sampling noise. Returns
    (success_prob, cost_per_attempt, expected_total) as floats.
    """
    cap = float(1 << t)
    length = 1 << t
    a = {i: max(rho * n / params.beta ** i, 1.0)
         for i in range(params.i_min, params.i_max + 1)}
    b = min(max(rho * n ** (1.0 - params.c) / params.gamma ** t, 1.0), a[t])

    ms = np.arange(1, length - 1, dtype=np.float64)
    path_cost = float(np.mean(ms * length - ms * (ms - 1) / 2 + (length - ms) ** 2))
    path_good = float(np.mean(ms))

    cost = 0.0
    for i, a_i in a.items():
        cycles = a_i - (b if i == t else 0.0)
        cost += cycles * (1 << i) * min(float(1 << i), cap)
    cost += b * path_cost
    leftover = max(n - sum(a_i * (1 << i) for i, a_i in a.items()), 0.0)
    cost += leftover
    p = b * path_good / n
    per = cost / n
    return p, per, per / p


# ---------------------------------------------------------------------------
# registries


def _scale_params(params) -> ScaleParams:
    if params is None:
        return ScaleParams()
    if isinstance(params, dict):
        return ScaleParams(**params)
    return params


def _fp_params(params) -> FixedPointParams:
    if params is None:
        return FixedPointParams()
    if isinstance(params, dict):
        return FixedPointParams(**params)
    return params


def _gen_collision(n, seed, params=None, **kw):
    inst, cert, _ = gen_collision_function(n, _scale_params(params), seed, **kw)
    return inst, cert


def _gen_claw(n, seed, params=None, **kw):
    inst, cert, _ = gen_claw_graph(n, _scale_params(params), seed, **kw)
    return inst, cert


def _gen_fixedpoint(n, seed, params=None, h_spec="fixed-point", **kw):
    inst, cert, _ = gen_fixedpoint_function(n, _fp_params(params), h_spec, seed, **kw)
    return inst, cert


def _gen_star(n, seed, h_spec="triangle", **kw):
    inst, cert, _ = gen_star_graph(n, h_spec, seed, **kw)
    return inst, cert


def _gen_starpath(n, seed, k=4, **kw):
    inst, cert, _ = gen_starpath_graph(n, k, seed, **kw)
    return inst, cert


GENERATORS = {
    "collision-fn": _gen_collision,
    "claw-graph": _gen_claw,
    "fixedpoint-fn": _gen_fixedpoint,
    "star-graph": _gen_star,
    "starpath-graph": _gen_starpath,
}


def _det_cert_collision(oracle, cert, seed, **kw):
    return cert_collision_search(oracle, cert, seed=seed, **kw)


def _det_multiscale(oracle, cert, seed, **kw):
    return multiscale_collision_search(oracle, seed=seed, **kw)


def _det_cert_claw(oracle, cert, seed, **kw):
    return cert_claw_search(oracle, cert, seed=seed, **kw)


def _det_cert_fixedpoint(oracle, cert, seed, **kw):
    return cert_fixedpoint_search(oracle, cert, seed=seed, **kw)


def _det_cert_star(oracle, cert, seed, **kw):
    return cert_star_search(oracle, cert, seed=seed, **kw)


def _det_cert_starpath(oracle, cert, seed, **kw):
    return cert_starpath_search(oracle, cert, seed=seed, **kw)


def _det_path_k(oracle, cert, seed, **kw):
    return path_k_search(oracle, seed=seed, **kw)


def _det_edge_wedge(oracle, cert, seed, **kw):
    return edge_wedge_search(oracle, seed=seed, **kw)


def _det_uniform_probe(oracle, cert, seed, **kw):
    return uniform_probe_baseline(oracle, seed=seed, **kw)


DETECTORS = {
    "cert-collision": _det_cert_collision,
    "multiscale": _det_multiscale,
    "cert-claw": _det_cert_claw,
    "cert-fixedpoint": _det_cert_fixedpoint,
    "cert-star": _det_cert_star,
    "cert-starpath": _det_cert_starpath,
    "path-k": _det_path_k,
    "edge-wedge": _det_edge_wedge,
    "uniform-probe": _det_uniform_probe,
}


# ---------------------------------------------------------------------------
# trial running


def _jsonable(obj):
    if is_dataclass(obj) and not isinstance(obj, type):
        return {k: _jsonable(v) for k, v in asdict(obj).items()}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


@dataclass
class TrialConfig:
    generator: str
    detector: str
    n: int
    trials: int
    master_seed: int
    gen_kwargs: dict = field(default_factory=dict)
    det_kwargs: dict = field(default_factory=dict)
    budget: int | None = None
    relabel: bool = True
    point: int = 0

    def config_hash(self) -> str:
        blob = canonical_json(_jsonable(self)).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


def _wilson(k: int, n: int, z: float = 1.96) -> tuple[float, float]:
    if n == 0:
        return (0.0, 1.0)
    p = k / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass
class TrialStats:
    trials: int
    successes: int
    success_rate: float
    rate_ci95: tuple[float, float]
    mean_queries: float
    stderr_queries: float
    queries_ci95: tuple[float, float]
    status_counts: dict
    empty: bool = False

    @classmethod
    def from_rows(cls, rows) -> "TrialStats":
        qs = [r["queries"] for r in rows]
        statuses = [r["status"] for r in rows]
        m = len(rows)
        if m == 0:
            return cls(0, 0, 0.0, (0.0, 1.0), 0.0, 0.0, (0.0, 0.0), {}, empty=True)
        successes = sum(1 for s in statuses if s == FOUND)
        mean = float(np.mean(qs))
        stderr = float(np.std(qs, ddof=1) / math.sqrt(m)) if m > 1 else 0.0
        return cls(
            trials=m,
            successes=successes,
            success_rate=successes / m,
            rate_ci95=_wilson(successes, m),
            mean_queries=mean,
            stderr_queries=stderr,
            queries_ci95=(mean - 1.96 * stderr, mean + 1.96 * stderr),
            status_counts=dict(Counter(statuses)),
        )


def _seed_int(ss: np.random.SeedSequence) -> int:
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _run_single_trial(config: TrialConfig, trial: int) -> dict:
    ss = np.random.SeedSequence([config.master_seed, config.point, trial])
    gen_ss, rel_ss, det_ss = ss.spawn(3)
    instance, cert = GENERATORS[config.generator](
        config.n, np.random.default_rng(gen_ss), **config.gen_kwargs)
    oracle = CountedOracle(
        instance,
        relabel_seed=_seed_int(rel_ss) if config.relabel else None,
        budget=config.budget,
    )
    outcome = DETECTORS[config.detector](
        oracle, cert, np.random.default_rng(det_ss), **config.det_kwargs)
    if outcome.queries != oracle.count:
        raise RuntimeError(
            f"query accounting drift: outcome {outcome.queries} vs oracle {oracle.count}")
    if outcome.found:
        raw = _unrelabel_witness(oracle, outcome.witness)
        if not validate_witness(instance, raw):
            raise RuntimeError(
                f"{config.detector} returned an invalid witness on trial {trial} "
                f"(seed {config.master_seed}, n {config.n})")
    scales = instance.meta.extras.get("scales")
    return {
        "config": config.config_hash(),
        "generator": config.generator,
        "detector": config.detector,
        "n": config.n,
        "s": len(scales) if scales is not None else "",
        "trial": trial,
        "seed": config.master_seed,
        "status": outcome.status,
        "queries": outcome.queries,
    }


def _trial_worker(args):
    config, trial = args
    return _run_single_trial(config, trial)


def run_trials(config: TrialConfig, workers: int = 1):
    """Run config.trials independent seeded trials; returns (stats, rows)."""
    tasks = [(config, i) for i in range(config.trials)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_trial_worker, tasks, chunksize=1))
    else:
        rows = [_run_single_trial(config, i) for i in range(config.trials)]
    return TrialStats.from_rows(rows), rows


# ---------------------------------------------------------------------------
# paired separation experiments


@dataclass
class SeparationPoint:
    """One x-axis point of a separation experiment."""

    x: float
    n: int
    generator: str
    gen_kwargs: dict = field(default_factory=dict)
    cert_detector: str = "cert-collision"
    cert_kwargs: dict = field(default_factory=dict)
    baseline_detector: str = "multiscale"
    baseline_kwargs: dict = field(default_factory=dict)


@dataclass
class SeparationReport:
    xs: list
    ns: list
    budgets: list
    cert_stats: list
    base_stats: list
    rows: list

    @property
    def cert_means(self):
        return [s.mean_queries for s in self.cert_stats]

    @property
    def base_means(self):
        return [s.mean_queries for s in self.base_stats]

    @property
    def ratios(self):
        return [b / c if c else math.inf
                for b, c in zip(self.base_means, self.cert_means)]

    def to_jsonable(self) -> dict:
        return {
            "xs": list(self.xs),
            "ns": list(self.ns),
            "budgets": list(self.budgets),
            "cert": [_jsonable(s) for s in self.cert_stats],
            "baseline": [_jsonable(s) for s in self.base_stats],
            "ratios": self.ratios,
        }


def _sep_pair(point: SeparationPoint, point_idx: int, trial: int,
              master_seed: int, budget, pilot: bool):
    """Run one paired trial: same instance and relabeling for both sides."""
    tag = trial + (1 << 30) if pilot else trial
    ss = np.random.SeedSequence([master_seed, point_idx, tag])
    gen_ss, rel_ss, cert_ss, base_ss = ss.spawn(4)
    instance, cert = GENERATORS[point.generator](
        point.n, np.random.default_rng(gen_ss), **point.gen_kwargs)
    rel_seed = _seed_int(rel_ss)

    def one(detector, det_kwargs, det_ss):
        oracle = CountedOracle(instance, relabel_seed=rel_seed, budget=budget)
        out = DETECTORS[detector](oracle, cert, np.random.default_rng(det_ss),
                                  **det_kwargs)
        if out.found:
            raw = _unrelabel_witness(oracle, out.witness)
            if not validate_witness(instance, raw):
                raise RuntimeError(
                    f"{detector} returned an invalid witness "
                    f"(point {point_idx}, trial {trial}, seed {master_seed})")
        scales = instance.meta.extras.get("scales")
        return {
            "config": f"sep-{master_seed}-{point_idx}",
            "generator": point.generator,
            "detector": detector,
            "n": point.n,
            "s": len(scales) if scales is not None else "",
            "trial": tag,
            "seed": master_seed,
            "status": out.status,
            "queries": out.queries,
        }

    row_c = one(point.cert_detector, point.cert_kwargs, cert_ss)
    if pilot:
        return row_c, None
    row_b = one(point.baseline_detector, point.baseline_kwargs, base_ss)
    return row_c, row_b


def _sep_worker(args):
    return _sep_pair(*args)


def separation_experiment(points, trials: int, master_seed: int,
                          budget_factor: float = 50.0, pilot_trials: int = 6,
                          workers: int = 1) -> SeparationReport:
    """Paired query-cost comparison across a list of SeparationPoints.

    Per point: a small unbudgeted pilot of the certificate side fixes a
    query budget of budget_factor times its mean cost, then both sides
    run `trials` paired trials under that budget on fresh instances.
    """
    xs, ns, budgets, cert_stats, base_stats, all_rows = [], [], [], [], [], []
    for idx, pt in enumerate(points):
        pilot_rows = [
            _sep_pair(pt, idx, i, master_seed, None, True)[0]
            for i in range(pilot_trials)
        ]
        pilot_mean = float(np.mean([r["queries"] for r in pilot_rows]))
        budget = max(1, math.ceil(budget_factor * pilot_mean))

        tasks = [(pt, idx, i, master_seed, budget, False) for i in range(trials)]
        if workers > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                pairs = list(pool.map(_sep_worker, tasks, chunksize=1))
        else:
            pairs = [_sep_pair(*t) for t in tasks]
        rows_c = [c for c, _ in pairs]
        rows_b = [b for _, b in pairs]

        xs.append(pt.x)
        ns.append(pt.n)
        budgets.append(budget)
        cert_stats.append(TrialStats.from_rows(rows_c))
        base_stats.append(TrialStats.from_rows(rows_b))
        all_rows.extend(rows_c)
        all_rows.extend(rows_b)
    return SeparationReport(xs, ns, budgets, cert_stats, base_stats, all_rows)


# ---------------------------------------------------------------------------
# slope fitting


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    stderr: float
    r2: float
    points: int


def slope_fit(xs, ys) -> SlopeFit:
    """OLS fit of log(y) against log(x).

    Needs at least three points spanning a factor of four in x.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if len(xs) < 3:
        raise ValueError("slope fit needs at least three points")
    if (xs <= 0).any() or (ys <= 0).any():
        raise ValueError("slope fit needs positive values")
    if xs.max() / xs.min() < 4.0:
        raise ValueError("slope fit needs x values spanning a factor of four")
    lx, ly = np.log(xs), np.log(ys)
    mx = lx.mean()
    varx = float(((lx - mx) ** 2).sum())
    slope = float(((lx - mx) * (ly - ly.mean())).sum() / varx)
    intercept = float(ly.mean() - slope * mx)
    resid = ly - (intercept + slope * lx)
    sse = float((resid ** 2).sum())
    sst = float(((ly - ly.mean()) ** 2).sum())
    dof = len(xs) - 2
    stderr = math.sqrt(sse / dof / varx) if dof > 0 else 0.0
    r2 = 1.0 - sse / sst if sst > 0 else 1.0
    return SlopeFit(slope, intercept, stderr, r2, len(xs))


# ---------------------------------------------------------------------------
# result files (byte-deterministic; no wall-clock content)


CSV_FIELDS = ["config", "generator", "detector", "n", "s",
              "trial", "seed", "status", "queries"]


def write_trials_csv(path, rows, config_hash: str | None = None) -> None:
    with open(path, "w", newline="") as fh:
        if config_hash is not None:
            fh.write(f"# config {config_hash}\n")
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k, "") for k in CSV_FIELDS})


def read_trials_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        body = (line for line in fh if not line.startswith("#"))
        return list(csv.DictReader(body))


def write_report_json(path, obj) -> None:
    with open(path, "w") as fh:
        fh.write(canonical_json(_jsonable(obj)))
        fh.write("\n")
