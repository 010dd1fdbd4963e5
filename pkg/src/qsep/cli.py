"""Command-line surface: gen, run, bench, verify, adversary-test, report.

Every command is deterministic given its flags and master seed; wall-clock
readings go to stdout only, never into output files. Stdout is line
oriented: zero or more ``key=value`` status lines, then one JSON record.
Exit codes: 0 ok, 1 verification failure, 2 infeasible parameters,
3 model mismatch, 4 I/O.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from qsep.adversary import AdversarySession
from qsep.detectors import brute_force_find, corrupt_certificate
from qsep.generators import (
    CapacityError,
    FixedPointParams,
    ParameterError,
    PrimeShortageError,
    ScaleParams,
    gen_claw_graph,
    gen_collision_function,
    gen_fixedpoint_function,
    gen_star_graph,
    gen_starpath_graph,
)
from qsep.harness import (
    DETECTORS,
    SeparationPoint,
    TrialConfig,
    _seed_int,
    canonical_json,
    read_trials_csv,
    run_trials,
    separation_experiment,
    slope_fit,
    write_report_json,
    write_trials_csv,
)
from qsep.oracle import (
    Certificate,
    CountedOracle,
    ModelMismatchError,
    _unrelabel_witness,
    instance_to_jsonable,
    read_certificate,
    read_instance,
    validate_witness,
)
from qsep.svg import line_chart

EXIT_OK, EXIT_VERIFY, EXIT_PARAMS, EXIT_MODEL, EXIT_IO = 0, 1, 2, 3, 4

FUNCTION_CONSTRUCTIONS = {"collision-fn", "fixedpoint-fn"}
CONSTRUCTIONS = sorted(FUNCTION_CONSTRUCTIONS |
                       {"claw-graph", "star-graph", "starpath-graph"})
_ALIASES = {"collision": "collision-fn", "fixedpoint": "fixedpoint-fn",
            "claw": "claw-graph", "star": "star-graph",
            "starpath": "starpath-graph"}


def _config_hash(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()[:12]


def _emit(record: dict) -> None:
    print(canonical_json(record))


def _master_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return int(args.seed)
    env = os.environ.get("QSEP_SEED")
    return int(env) if env else 0


def _sub_seed(master: int, *tags: int) -> int:
    return _seed_int(np.random.SeedSequence([int(master), *map(int, tags)]))


def _parse_scales(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise ParameterError(f"expected A..B scale window, got {text!r}")
    return int(lo), int(hi)


def _out_path(args, name: str) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out / name


# ---------------------------------------------------------------------------
# gen


def _scale_params(args) -> ScaleParams:
    kw = {}
    if args.scales:
        kw["i_min"], kw["i_max"] = _parse_scales(args.scales)
    for name in ("beta", "gamma", "c"):
        v = getattr(args, name)
        if v is not None:
            kw[name] = v
    if args.rho is not None:
        kw["rho"] = args.rho if args.rho == "auto" else float(args.rho)
    return ScaleParams(**kw)


def _fixedpoint_params(args) -> FixedPointParams:
    kw = {"widen": args.widen_primes}
    for flag, name in (("alpha", "alpha"), ("cycle_len", "cycle_len"),
                       ("feeder_len", "feeder_len"), ("T", "T")):
        v = getattr(args, flag)
        if v is not None:
            kw[name] = v
    return FixedPointParams(**kw)


def _capacity_line(construction: str, n: int, extras: dict) -> str:
    if construction in ("collision-fn", "claw-graph"):
        used = sum(a << i for a, i in zip(extras["a"], extras["scales"]))
        return (f"capacity used={used} n={n} rho={extras['rho']!r} "
                f"window={extras['scales'][0]}..{extras['scales'][-1]} "
                f"t={extras['t']} b_t={extras['b_t']}")
    if construction == "fixedpoint-fn":
        used = sum(extras["cycle_lens"]) + \
            sum(extras["feeders_per_cycle"]) * extras["feeder_len"]
        lo, hi = extras["window"]
        return (f"capacity used={used} n={n} cycles={extras['N']} "
                f"primes={len(extras['primes'])} window={lo:.6g}..{hi:.6g} "
                f"widened={extras['widened']}")
    if construction == "star-graph":
        used = sum(d + 1 for d in extras["degrees"])
        return (f"capacity used={used} n={n} centers={len(extras['degrees'])} "
                f"h={extras['h']}")
    used = sum(extras["sizes"]) if "sizes" in extras else n
    return (f"capacity used={used} n={n} s={extras['s']} "
            f"k={extras['k']} k_star={extras['k_star']}")


def cmd_gen(args) -> int:
    t0 = time.perf_counter()
    seed = _master_seed(args)
    construction = _ALIASES.get(args.construction, args.construction)
    n = args.n
    if construction == "collision-fn":
        filler = "cycles" if args.no_fixed_points else "fixed"
        inst, cert, meta = gen_collision_function(
            n, _scale_params(args), seed=seed, filler=filler,
            b_override=args.b_override, t_override=args.t_override)
    elif construction == "claw-graph":
        inst, cert, meta = gen_claw_graph(
            n, _scale_params(args), seed=seed,
            b_override=args.b_override, t_override=args.t_override)
    elif construction == "fixedpoint-fn":
        inst, cert, meta = gen_fixedpoint_function(
            n, _fixedpoint_params(args), seed=seed)
    elif construction == "star-graph":
        h_spec = args.H if args.H is not None else "triangle"
        if h_spec not in ("triangle",):
            h_spec = int(h_spec)
        inst, cert, meta = gen_star_graph(n, h_spec, seed=seed)
    elif construction == "starpath-graph":
        inst, cert, meta = gen_starpath_graph(n, args.k, seed=seed)
    else:
        raise ParameterError(f"unknown construction {construction!r}")

    config = {"command": "gen", "construction": construction, "n": n,
              "seed": seed, "parameters": inst.info.get("parameters", {})}
    h = _config_hash(config)
    prefix = args.prefix or construction
    paths = {kind: _out_path(args, f"{prefix}.{kind}.json")
             for kind in ("instance", "certificate", "meta")}

    inst_doc = instance_to_jsonable(inst, include_meta=True)
    inst_doc["config_hash"] = h
    cert_doc = cert.to_jsonable()
    cert_doc["config_hash"] = h
    meta_doc = {"format": "qsep-meta", "version": 1, "config_hash": h,
                "construction": construction, "n": n, "seed": seed,
                "meta": meta.to_jsonable()}
    for doc, path in ((inst_doc, paths["instance"]),
                      (cert_doc, paths["certificate"]),
                      (meta_doc, paths["meta"])):
        path.write_text(canonical_json(doc) + "\n")

    print(_capacity_line(construction, n, meta.extras))
    _emit({"command": "gen", "construction": construction, "n": n,
           "seed": seed, "config-hash": h,
           "files": {k: str(p) for k, p in paths.items()},
           "witnesses": len(meta.witness_locations),
           "wall-ms": round((time.perf_counter() - t0) * 1e3, 3)})
    return EXIT_OK


# ---------------------------------------------------------------------------
# run


def _detector_kwargs(args) -> dict:
    kw = {}
    if args.budget is not None:
        kw["budget"] = args.budget
    if args.detector == "multiscale":
        lo, hi = _parse_scales(args.scales or "2..8")
        kw["i_min"], kw["i_max"] = lo, hi
    if args.detector == "path-k":
        kw["k"] = args.k if args.k is not None else 2
    if args.detector == "edge-wedge":
        kw["target"] = args.target or "edge"
    if args.detector == "uniform-probe":
        kw["target"] = args.target or "fixed-point"
        if args.k is not None:
            kw["k"] = args.k
    if args.detector == "cert-fixedpoint" and args.C is not None:
        kw["C"] = args.C
    if args.max_attempts is not None and args.detector in (
            "cert-collision", "multiscale", "cert-claw", "edge-wedge",
            "uniform-probe"):
        kw["max_attempts"] = args.max_attempts
    return kw


def cmd_run(args) -> int:
    t0 = time.perf_counter()
    seed = _master_seed(args)
    inst = read_instance(args.instance)
    cert = read_certificate(args.cert) if args.cert else None
    if args.corrupt_cert:
        if cert is None:
            raise ParameterError("--corrupt-cert needs --cert")
        window = _parse_scales(args.scales) if args.scales else None
        index_range = None
        if inst.meta is not None and "s" in inst.meta.extras:
            index_range = inst.meta.extras["s"]
        cert = corrupt_certificate(cert, seed=_sub_seed(seed, 2),
                                   scale_window=window,
                                   index_range=index_range)
    relabel_seed = None if args.no_relabel else _sub_seed(seed, 0)
    oracle = CountedOracle(inst, relabel_seed=relabel_seed,
                           budget=args.budget)
    outcome = DETECTORS[args.detector](oracle, cert, _sub_seed(seed, 1),
                                       **_detector_kwargs(args))
    valid = None
    if outcome.found:
        valid = validate_witness(inst, _unrelabel_witness(oracle,
                                                          outcome.witness))
    record = {
        "command": "run",
        "detector": args.detector,
        "instance-ref": str(args.instance),
        "seed": seed,
        "status": outcome.status,
        "queries": outcome.queries,
        "attempts": outcome.attempts,
        "witness": list(outcome.witness.vertices) if outcome.found else None,
        "valid": valid,
        "corrupted-cert": bool(args.corrupt_cert),
        "wall-ms": round((time.perf_counter() - t0) * 1e3, 3),
    }
    _emit(record)
    return EXIT_OK if valid in (None, True) else EXIT_VERIFY


# ---------------------------------------------------------------------------
# bench


def _plot_rows(path, series, **axes) -> None:
    path.write_text(line_chart(series, **axes))


def _bench_separation(spec: dict, args, master: int, h: str) -> int:
    points = [SeparationPoint(
        x=p["x"], n=p["n"], generator=p["generator"],
        gen_kwargs=p.get("gen_kwargs", {}),
        cert_detector=p.get("cert_detector", "cert-collision"),
        cert_kwargs=p.get("cert_kwargs", {}),
        baseline_detector=p.get("baseline_detector", "multiscale"),
        baseline_kwargs=p.get("baseline_kwargs", {}),
    ) for p in spec["points"]]
    rep = separation_experiment(
        points, trials=spec.get("trials", 20), master_seed=master,
        budget_factor=spec.get("budget_factor", 50.0),
        pilot_trials=spec.get("pilot_trials", 6), workers=args.threads)

    prefix = args.prefix or "separation"
    csv_path = _out_path(args, f"{prefix}.trials.csv")
    write_trials_csv(csv_path, rep.rows, config_hash=h)
    rows = [{"x": x, "n": n, "budget": b, "cert_mean": cm, "base_mean": bm,
             "ratio": r}
            for x, n, b, cm, bm, r in zip(rep.xs, rep.ns, rep.budgets,
                                          rep.cert_means, rep.base_means,
                                          rep.ratios)]
    report = {"config_hash": h, "kind": "separation", "rows": rows,
              "report": rep.to_jsonable()}
    write_report_json(_out_path(args, f"{prefix}.report.json"), report)
    if args.plot:
        series = [("certificate", rep.xs, rep.cert_means),
                  ("baseline", rep.xs, rep.base_means)]
        _plot_rows(_out_path(args, f"{prefix}.svg"), series,
                   title="mean queries per point", xlabel="x",
                   ylabel="queries", logy=True, header=f"config {h}")
    warn = 0
    for x, cs, bs in zip(rep.xs, rep.cert_stats, rep.base_stats):
        print(f"point x={x} cert_mean={cs.mean_queries!r} "
              f"base_mean={bs.mean_queries!r} "
              f"cert_found={cs.successes}/{cs.trials} "
              f"base_found={bs.successes}/{bs.trials}")
        warn += cs.trials - cs.successes
    _emit({"command": "bench", "kind": "separation", "seed": master,
           "config-hash": h, "points": len(points),
           "ratios": rep.ratios, "warnings": warn,
           "wall-ms": round((time.perf_counter() - args.t0) * 1e3, 3)})
    return EXIT_VERIFY if args.strict and warn else EXIT_OK


def _bench_slope(spec: dict, args, master: int, h: str) -> int:
    all_rows, summary, svg_series, warn = [], [], [], 0
    for si, series in enumerate(spec["series"]):
        label = series["label"]
        means = []
        for ni, n in enumerate(series["ns"]):
            cfg = TrialConfig(
                generator=series["generator"], detector=series["detector"],
                n=int(n), trials=series.get("trials", 10),
                master_seed=master,
                gen_kwargs=series.get("gen_kwargs", {}),
                det_kwargs=series.get("det_kwargs", {}),
                budget=series.get("budget"), point=si * 1000 + ni)
            stats, rows = run_trials(cfg, workers=args.threads)
            all_rows.extend(rows)
            means.append(stats.mean_queries)
            warn += stats.trials - stats.successes
            summary.append({
                "label": label, "n": int(n), "trials": stats.trials,
                "successes": stats.successes,
                "mean_queries": stats.mean_queries,
                "stderr_queries": stats.stderr_queries})
            print(f"series label={label} n={n} "
                  f"mean_queries={stats.mean_queries!r} "
                  f"found={stats.successes}/{stats.trials}")
        fit = None
        ns = [float(n) for n in series["ns"]]
        if len(ns) >= 3 and max(ns) / min(ns) >= 4 and all(m > 0 for m in means):
            f = slope_fit(ns, means)
            fit = {"slope": f.slope, "intercept": f.intercept,
                   "stderr": f.stderr, "r2": f.r2}
            print(f"series label={label} slope={f.slope!r} r2={f.r2!r}")
        svg_series.append((label, ns, means))
        series.setdefault("_fit", fit)
    csv_path = _out_path(args, f"{args.prefix or 'slope'}.trials.csv")
    write_trials_csv(csv_path, all_rows, config_hash=h)
    report = {"config_hash": h, "kind": "slope", "rows": summary,
              "fits": {s["label"]: s.get("_fit") for s in spec["series"]}}
    write_report_json(_out_path(args, f"{args.prefix or 'slope'}.report.json"),
                      report)
    if args.plot:
        _plot_rows(_out_path(args, f"{args.prefix or 'slope'}.svg"),
                   svg_series, title="query scaling", xlabel="n",
                   ylabel="mean queries", logx=True, logy=True,
                   header=f"config {h}")
    _emit({"command": "bench", "kind": "slope", "seed": master,
           "config-hash": h, "rows": len(summary), "warnings": warn,
           "wall-ms": round((time.perf_counter() - args.t0) * 1e3, 3)})
    return EXIT_VERIFY if args.strict and warn else EXIT_OK


def cmd_bench(args) -> int:
    args.t0 = time.perf_counter()
    spec = json.loads(Path(args.battery).read_text())
    if args.seed is not None:
        master = int(args.seed)
    elif os.environ.get("QSEP_SEED"):
        master = int(os.environ["QSEP_SEED"])
    else:
        master = int(spec.get("master_seed", 0))
    h = _config_hash({"battery": {k: v for k, v in spec.items()
                                  if not k.startswith("_")},
                      "master_seed": master})
    kind = spec.get("kind")
    if kind == "separation":
        return _bench_separation(spec, args, master, h)
    if kind == "slope":
        return _bench_slope(spec, args, master, h)
    raise ParameterError(f"battery kind must be separation|slope, got {kind!r}")


# ---------------------------------------------------------------------------
# verify


class _VerifyFailure(Exception):
    def __init__(self, invariant: str, detail: str):
        super().__init__(detail)
        self.invariant = invariant


def _check_function_structures(inst) -> None:
    succ, meta = inst.succ, inst.meta
    for kind, _, members in meta.structures():
        m = np.asarray(members)
        if kind in ("path", "feeder"):
            if not np.array_equal(succ[m[:-1]], m[1:]):
                raise _VerifyFailure(
                    "partition", f"{kind} interior does not chain under f")
        elif kind == "cycle":
            if not np.array_equal(succ[m], np.roll(m, -1)):
                raise _VerifyFailure("partition", "cycle does not close under f")
        elif kind == "isolated":
            if not np.array_equal(succ[m], m):
                raise _VerifyFailure("partition", "isolated element not fixed")


def _check_graph_arrays(inst) -> None:
    indptr, indices = inst.indptr, inst.indices
    if indptr[0] != 0 or indptr[-1] != len(indices) or np.any(np.diff(indptr) < 0):
        raise _VerifyFailure("model-arrays", "malformed CSR index arrays")
    # symmetry: every arc has its reverse
    n = inst.n
    src = np.repeat(np.arange(n), np.diff(indptr))
    fwd = {(int(u), int(v)) for u, v in zip(src, indices)}
    if any((v, u) not in fwd for u, v in fwd):
        raise _VerifyFailure("model-arrays", "adjacency is not symmetric")


_BRUTE_TARGETS = {
    "collision-fn": ("collision", "collisions"),
    "fixedpoint-fn": ("fixed-point", "fixed points"),
    "claw-graph": ("claw", "claws"),
    "star-graph": ("clique", "cliques"),
    "starpath-graph": ("k-star", "k-stars"),
}


def _verify_witness_counts(inst, construction: str) -> str:
    target, label = _BRUTE_TARGETS[construction]
    extras = inst.meta.extras
    kw = {}
    if target == "clique":
        kw["h"] = extras["h"]
        if extras["h"] == 0:
            return f"{label}: 0 expected / 0 found (no planted copy)"
    if target == "k-star":
        kw["k"] = extras["k"]
    hits = brute_force_find(inst, target, **kw)
    expected = len(inst.meta.witness_locations)
    if len(hits) != expected:
        raise _VerifyFailure(
            "witness-count", f"{label}: {expected} expected / {len(hits)} found")
    return f"{label}: {expected} expected / {len(hits)} found"


def cmd_verify(args) -> int:
    t0 = time.perf_counter()
    inst = read_instance(args.instance)
    if inst.meta is None:
        raise ParameterError("instance file has no meta block to verify against")
    construction = inst.info.get("construction")
    if construction not in _BRUTE_TARGETS:
        raise ParameterError(f"unknown construction {construction!r}")
    limit = 1 << 13
    if inst.n > limit:
        raise ParameterError(
            f"n = {inst.n} exceeds the brute-force guard {limit}")
    checks: list[str] = []
    try:
        if not inst.meta.check_partition(inst.n):
            raise _VerifyFailure("partition",
                                 "structures do not partition the domain")
        if inst.model == "function":
            if inst.succ.shape != (inst.n,) or inst.succ.min() < 0 \
                    or inst.succ.max() >= inst.n:
                raise _VerifyFailure("model-arrays", "succ is not a self-map")
            _check_function_structures(inst)
        else:
            _check_graph_arrays(inst)
        checks.append("partition: ok")
        checks.append(_verify_witness_counts(inst, construction))

        extras = inst.meta.extras
        if construction == "fixedpoint-fn":
            ps, lens = extras["primes"], extras["cycle_lens"]
            if len(set(ps)) != len(ps):
                raise _VerifyFailure("prime-spacing", "primes are not distinct")
            if any(ln % p for p, ln in zip(ps, lens)):
                raise _VerifyFailure(
                    "prime-spacing", "cycle length not a multiple of its prime")
            checks.append(f"prime-spacing: ok ({len(ps)} cycles)")
        if construction == "star-graph":
            degs = [int(d) for d in extras["degrees"]]
            if len(set(degs)) != len(degs):
                raise _VerifyFailure("degree-uniqueness",
                                     "center degrees collide")
            checks.append(f"degree-uniqueness: ok ({len(degs)} centers)")
        if args.cert:
            cert = read_certificate(args.cert)
            _verify_certificate(inst, cert, construction)
            checks.append(f"certificate: ok ({cert.kind})")
    except _VerifyFailure as vf:
        for line in checks:
            print(line)
        print(f"FAIL {vf.invariant}: {vf}")
        _emit({"command": "verify", "instance-ref": str(args.instance),
               "ok": False, "failed": vf.invariant,
               "wall-ms": round((time.perf_counter() - t0) * 1e3, 3)})
        return EXIT_VERIFY
    for line in checks:
        print(line)
    _emit({"command": "verify", "instance-ref": str(args.instance),
           "ok": True, "checks": len(checks),
           "wall-ms": round((time.perf_counter() - t0) * 1e3, 3)})
    return EXIT_OK


def _verify_certificate(inst, cert: Certificate, construction: str) -> None:
    extras = inst.meta.extras
    if construction in ("collision-fn", "claw-graph"):
        if cert.kind not in ("CollisionScale", "ClawScale") \
                or int(cert.payload["t"]) != int(extras["t"]):
            raise _VerifyFailure("certificate", "good scale mismatch")
    elif construction == "fixedpoint-fn":
        if cert.kind != "FixedPointPrimes" \
                or sorted(cert.payload["primes"]) != sorted(extras["primes"]):
            raise _VerifyFailure("certificate", "prime set mismatch")
    elif construction == "star-graph":
        hosts = extras.get("host_stars", [])
        good = sorted(int(extras["degrees"][i]) for i in hosts)
        if cert.kind != "StarDegrees" \
                or sorted(map(int, cert.payload["degrees"])) != good:
            raise _VerifyFailure("certificate", "good degree set mismatch")
    else:
        if cert.kind != "BackboneIndex" \
                or int(cert.payload["index"]) != int(extras["k_star"]) \
                or int(cert.payload["k"]) != int(extras["k"]):
            raise _VerifyFailure("certificate", "backbone index mismatch")


# ---------------------------------------------------------------------------
# adversary-test


def cmd_adversary_test(args) -> int:
    t0 = time.perf_counter()
    seed = _master_seed(args)
    lo, hi = _parse_scales(args.scales or "2..4")
    params = ScaleParams(i_min=lo, i_max=hi, **(
        {"rho": float(args.rho)} if args.rho not in (None, "auto") else {}))
    session = AdversarySession(args.n, params, seed=_sub_seed(seed, 0))
    rng = np.random.default_rng(_sub_seed(seed, 1))
    transcript = []
    for _ in range(args.probes):
        v = int(rng.integers(args.n))
        if rng.random() < 0.5:
            transcript.append(("degree", v, None, session.probe_degree(v)))
        else:
            i = int(rng.integers(3))
            try:
                ans = session.probe_neighbor(v, i)
            except IndexError:
                ans = "index-error"
            transcript.append(("neighbor", v, i, ans))
    inst = session.finalize()
    offline = CountedOracle(inst)
    consistent = True
    for op, v, i, ans in transcript:
        if op == "degree":
            replay = offline.query_degree(v)
        else:
            try:
                replay = offline.query_neighbor(v, i)
            except IndexError:
                replay = "index-error"
        if replay != ans:
            consistent = False
            break
    prefix = args.prefix or "adversary"
    trace_path = _out_path(args, f"{prefix}.trace.jsonl")
    session.write_trace(trace_path)
    h = _config_hash({"command": "adversary-test", "n": args.n,
                      "scales": [lo, hi], "probes": args.probes,
                      "seed": seed})
    write_report_json(_out_path(args, f"{prefix}.summary.json"), {
        "config_hash": h, "n": args.n, "scales": [lo, hi],
        "probes": args.probes, "good_scale": session.good,
        "consistent": consistent})
    _emit({"command": "adversary-test", "n": args.n, "seed": seed,
           "config-hash": h, "probes": args.probes,
           "good-scale": session.good, "consistent": consistent,
           "wall-ms": round((time.perf_counter() - t0) * 1e3, 3)})
    return EXIT_OK if consistent else EXIT_VERIFY


# ---------------------------------------------------------------------------
# report


def cmd_report(args) -> int:
    t0 = time.perf_counter()
    rows = []
    for path in args.csv:
        rows.extend(read_trials_csv(path))
    groups: dict[tuple, dict[int, list[int]]] = {}
    for r in rows:
        key = (r["generator"], r["detector"])
        groups.setdefault(key, {}).setdefault(int(r["n"]), []).append(
            int(r["queries"]))
    summary, svg_series = [], []
    for (gen, det), per_n in sorted(groups.items()):
        ns = sorted(per_n)
        means = [float(np.mean(per_n[n])) for n in ns]
        fit = None
        if len(ns) >= 3 and max(ns) / min(ns) >= 4 and all(m > 0 for m in means):
            f = slope_fit([float(n) for n in ns], means)
            fit = {"slope": f.slope, "stderr": f.stderr, "r2": f.r2}
        summary.append({"generator": gen, "detector": det, "ns": ns,
                        "mean_queries": means, "fit": fit})
        svg_series.append((f"{gen}/{det}", [float(n) for n in ns], means))
        line = f"group generator={gen} detector={det} points={len(ns)}"
        if fit:
            line += f" slope={fit['slope']!r} r2={fit['r2']!r}"
        print(line)
    # hash input contents, not paths, so moving the CSVs does not change it
    digests = [hashlib.sha256(Path(p).read_bytes()).hexdigest()
               for p in args.csv]
    h = _config_hash({"command": "report", "inputs": digests})
    write_report_json(_out_path(args, f"{args.prefix or 'report'}.json"),
                      {"config_hash": h, "groups": summary})
    if args.plot and svg_series:
        _plot_rows(_out_path(args, f"{args.prefix or 'report'}.svg"),
                   svg_series, title="query scaling", xlabel="n",
                   ylabel="mean queries", logx=True, logy=True,
                   header=f"config {h}")
    _emit({"command": "report", "groups": len(summary), "config-hash": h,
           "wall-ms": round((time.perf_counter() - t0) * 1e3, 3)})
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument surface


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qsep",
        description="planted-substructure instances, certificate-aided "
                    "search, and query-count experiments")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=None,
                       help="master seed (default: $QSEP_SEED, then 0)")
        p.add_argument("--out-dir", default=".",
                       help="directory for output files")
        p.add_argument("--prefix", default=None,
                       help="output filename prefix")

    g = sub.add_parser("gen", help="generate an instance with certificate")
    common(g)
    g.add_argument("--construction", required=True,
                   choices=CONSTRUCTIONS + sorted(_ALIASES))
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--scales", default=None, help="scale window A..B")
    g.add_argument("--beta", type=float, default=None)
    g.add_argument("--gamma", type=float, default=None)
    g.add_argument("--c", type=float, default=None)
    g.add_argument("--rho", default=None, help="density in (0,1] or 'auto'")
    g.add_argument("--b-override", type=int, default=None, dest="b_override")
    g.add_argument("--t-override", type=int, default=None, dest="t_override")
    g.add_argument("--no-fixed-points", action="store_true",
                   dest="no_fixed_points",
                   help="fill leftovers with 2-/3-cycles instead")
    g.add_argument("--alpha", type=float, default=None)
    g.add_argument("--cycle-len", type=int, default=None, dest="cycle_len")
    g.add_argument("--feeder-len", type=int, default=None, dest="feeder_len")
    g.add_argument("--T", type=int, default=None)
    g.add_argument("--widen-primes", action="store_true", dest="widen_primes")
    g.add_argument("--k", type=int, default=4)
    g.add_argument("--H", default=None, help="clique spec: 'triangle' or size")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="run one detector against an instance file")
    common(r)
    r.add_argument("--instance", required=True)
    r.add_argument("--cert", default=None)
    r.add_argument("--detector", required=True, choices=sorted(DETECTORS))
    r.add_argument("--budget", type=int, default=None)
    r.add_argument("--corrupt-cert", action="store_true", dest="corrupt_cert")
    r.add_argument("--no-relabel", action="store_true", dest="no_relabel")
    r.add_argument("--scales", default=None, help="window A..B (multiscale)")
    r.add_argument("--k", type=int, default=None)
    r.add_argument("--target", default=None)
    r.add_argument("--C", type=float, default=None)
    r.add_argument("--max-attempts", type=int, default=None,
                   dest="max_attempts")
    r.set_defaults(func=cmd_run)

    b = sub.add_parser("bench", help="run a battery spec file")
    common(b)
    b.add_argument("--battery", required=True, help="battery spec JSON")
    b.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    b.add_argument("--plot", action="store_true")
    b.add_argument("--strict", action="store_true",
                   help="exit 1 if any trial misses its witness")
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("verify", help="offline ground-truth checks")
    common(v)
    v.add_argument("--instance", required=True)
    v.add_argument("--cert", default=None)
    v.set_defaults(func=cmd_verify)

    a = sub.add_parser("adversary-test",
                       help="probe the online constructor and replay the "
                            "transcript offline")
    common(a)
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--scales", default=None, help="scale window A..B")
    a.add_argument("--rho", default=None)
    a.add_argument("--probes", type=int, default=256)
    a.set_defaults(func=cmd_adversary_test)

    rp = sub.add_parser("report", help="aggregate trial CSVs")
    common(rp)
    rp.add_argument("--csv", nargs="+", required=True)
    rp.add_argument("--plot", action="store_true")
    rp.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PrimeShortageError as e:
        print(f"error: {e}", file=sys.stderr)
        print("hint: widen the prime window with --widen-primes",
              file=sys.stderr)
        return EXIT_PARAMS
    except ParameterError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARAMS
    except ModelMismatchError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_MODEL
    except (OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
