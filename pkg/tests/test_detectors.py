"""Detector behavior: worked examples, soundness, budgets, oracle purity."""

import math

import numpy as np
import pytest

from qsep import (
    Certificate,
    CountedOracle,
    FixedPointParams,
    ScaleParams,
    Witness,
    brute_force_find,
    cert_claw_search,
    cert_collision_search,
    cert_fixedpoint_search,
    cert_star_search,
    cert_starpath_search,
    collision_attempt_battery,
    corrupt_certificate,
    edge_wedge_search,
    exact_cert_expectation,
    gen_claw_graph,
    gen_collision_function,
    gen_fixedpoint_function,
    gen_star_graph,
    gen_starpath_graph,
    multiscale_collision_search,
    path_k_search,
    uniform_probe_baseline,
    validate_witness,
)
from qsep.oracle import FunctionInstance, _unrelabel_witness, graph_from_edges

PAR = ScaleParams(i_min=2, i_max=5)


def found_and_valid(instance, oracle, outcome):
    assert outcome.found, outcome.status
    raw = _unrelabel_witness(oracle, outcome.witness)
    assert validate_witness(instance, raw), (outcome.witness, raw)


class TestWorkedExamples:
    def test_wedge_from_middle_of_two_edge_path_costs_three(self):
        g = graph_from_edges(3, [(0, 1), (1, 2)])
        seed = next(s for s in range(50)
                    if np.random.default_rng(s).integers(3) == 1)
        out = edge_wedge_search(CountedOracle(g), "wedge", seed=seed)
        assert out.found and out.queries == 3 and out.attempts == 1
        assert out.witness.vertices[0] == 1
        assert set(out.witness.vertices) == {0, 1, 2}

    def test_path_search_on_identity_exhausts(self):
        inst = FunctionInstance(n=64, succ=np.arange(64), meta=None, info={})
        out = path_k_search(CountedOracle(inst), k=1, seed=0)
        assert out.status == "Exhausted"
        assert out.attempts == 64 and out.queries == 64

    def test_path_search_on_full_cycle_finds_immediately(self):
        succ = np.roll(np.arange(64), -1)
        inst = FunctionInstance(n=64, succ=succ, meta=None, info={})
        out = path_k_search(CountedOracle(inst), k=5, seed=3)
        assert out.found and out.attempts == 1 and out.queries == 5
        assert len(set(out.witness.vertices)) == 6

    def test_brute_force_on_three_element_example(self):
        inst = FunctionInstance(n=3, succ=np.array([1, 0, 0]), meta=None, info={})
        hits = brute_force_find(inst, "collision")
        assert hits == [Witness("collision", (1, 2, 0))]

    def test_edge_search_single_planted_edge(self):
        g = graph_from_edges(16, [(3, 9)])
        out = edge_wedge_search(CountedOracle(g), "edge", seed=4)
        assert out.found
        assert set(out.witness.vertices[:2]) == {3, 9}
        assert out.queries == out.attempts + 1


class TestCollisionDetectors:
    def test_battery_rate_matches_exact_enumeration(self):
        inst, cert, _ = gen_collision_function(4096, PAR, seed=3)
        p = float(exact_cert_expectation(inst).success_prob)
        res = collision_attempt_battery(CountedOracle(inst), cert.payload["t"],
                                        20000, seed=11)
        z = abs(res["success_rate"] - p) / math.sqrt(p * (1 - p) / 20000)
        assert z < 4, (res["success_rate"], p)
        assert res["attempts"] == 20000 and not res["truncated"]
        for w in res["witnesses"]:
            assert validate_witness(inst, w)

    def test_battery_budget_truncates(self):
        inst, cert, _ = gen_collision_function(4096, PAR, seed=3)
        o = CountedOracle(inst)
        res = collision_attempt_battery(o, cert.payload["t"], 20000, seed=1,
                                        budget=500)
        assert res["truncated"] and res["queries"] <= 500
        assert o.count == res["queries"]

    def test_cert_search_finds_and_validates(self):
        inst, cert, _ = gen_collision_function(4096, PAR, seed=5)
        for s in range(10):
            o = CountedOracle(inst, relabel_seed=s)
            out = cert_collision_search(o, cert, seed=s)
            found_and_valid(inst, o, out)
            assert out.queries == o.count

    def test_cert_search_respects_budget_exactly(self):
        inst, _, _ = gen_collision_function(1024, ScaleParams(2, 4), seed=1,
                                            b_override=0)
        out = cert_collision_search(CountedOracle(inst),
                                    Certificate("CollisionScale", {"t": 3}),
                                    seed=0, budget=777)
        assert out.status == "BudgetExceeded" and out.queries <= 777

    def test_cert_search_exhausts_on_attempt_cap(self):
        inst, _, _ = gen_collision_function(1024, ScaleParams(2, 4), seed=1,
                                            b_override=0)
        out = cert_collision_search(CountedOracle(inst),
                                    Certificate("CollisionScale", {"t": 3}),
                                    seed=0, max_attempts=200)
        assert out.status == "Exhausted"
        assert out.attempts == 200

    def test_multiscale_finds_and_validates(self):
        inst, _, _ = gen_collision_function(4096, PAR, seed=7)
        for s in range(6):
            o = CountedOracle(inst, relabel_seed=s)
            out = multiscale_collision_search(o, 2, 5, seed=s)
            found_and_valid(inst, o, out)

    def test_multiscale_reaches_top_scale_witness(self):
        # witness only at the top of the window
        inst, _, _ = gen_collision_function(4096, PAR, seed=2, t_override=5)
        o = CountedOracle(inst)
        out = multiscale_collision_search(o, 2, 5, seed=9)
        found_and_valid(inst, o, out)

    def test_multiscale_budget_exact_on_witness_free_instance(self):
        inst, _, _ = gen_collision_function(1024, ScaleParams(2, 4), seed=1,
                                            b_override=0)
        for budget in (100, 500, 2500):
            out = multiscale_collision_search(CountedOracle(inst), 2, 4,
                                              seed=42, budget=budget)
            assert out.status == "BudgetExceeded"
            assert out.queries <= budget


class TestClawDetector:
    def test_finds_and_validates(self):
        inst, cert, _ = gen_claw_graph(4096, PAR, seed=7)
        for s in range(8):
            o = CountedOracle(inst, relabel_seed=s)
            out = cert_claw_search(o, cert, seed=s)
            found_and_valid(inst, o, out)

    def test_witness_free_instance_exhausts(self):
        inst, _, _ = gen_claw_graph(1024, ScaleParams(2, 4), seed=3, b_override=0)
        out = cert_claw_search(CountedOracle(inst),
                               Certificate("ClawScale", {"t": 3}),
                               seed=1, max_attempts=300)
        assert out.status == "Exhausted" and out.witness is None

    def test_budget_honored(self):
        inst, cert, _ = gen_claw_graph(4096, PAR, seed=7)
        out = cert_claw_search(CountedOracle(inst), cert, seed=123, budget=20)
        assert out.queries <= 20


class TestFixedpointDetector:
    def test_single_iteration_success_rate(self):
        # high-effort setting: one round of walks alone should usually win
        inst, cert, _ = gen_fixedpoint_function(1 << 16, FixedPointParams(), seed=5)
        wins = 0
        for s in range(200):
            o = CountedOracle(inst, relabel_seed=s)
            out = cert_fixedpoint_search(o, cert, seed=s, C=8.0, max_iterations=1)
            if out.found:
                wins += 1
                assert validate_witness(inst, _unrelabel_witness(o, out.witness))
        assert wins >= 100, f"only {wins}/200 single-iteration successes"

    def test_prime_follow_phase_rarely_false(self):
        # long host cycle: phase walks cannot finish it, so the residue
        # trigger carries the load
        inst, cert, _ = gen_fixedpoint_function(
            1 << 16, FixedPointParams(cycle_len=1 << 13, feeder_len=8), seed=9)
        follows = false_q = follow_q = 0
        for s in range(20):
            o = CountedOracle(inst, relabel_seed=s)
            out = cert_fixedpoint_search(o, cert, seed=s, C=2.0, max_iterations=8)
            assert out.found
            d = out.details
            follows += d["triggers"]
            follow_q += d["follow_queries"]
            false_q += d["false_follow_queries"]
        assert follows >= 5, "trigger phase never exercised"
        assert false_q <= 0.05 * follow_q, (false_q, follow_q)

    def test_fixed_point_free_instance_never_found(self):
        inst, _, _ = gen_collision_function(1024, ScaleParams(2, 4, rho=0.25),
                                            seed=5, filler="cycles")
        assert brute_force_find(inst, "fixed-point") == []
        cert = Certificate("FixedPointPrimes", {"primes": [3]})
        out = cert_fixedpoint_search(CountedOracle(inst), cert, seed=0, C=1.0,
                                     max_iterations=3)
        assert out.status == "Exhausted" and out.witness is None

    def test_budget_honored(self):
        inst, cert, _ = gen_fixedpoint_function(4096, FixedPointParams(), seed=2)
        out = cert_fixedpoint_search(CountedOracle(inst), cert, seed=3, C=2.0,
                                     budget=150)
        assert out.queries <= 150


class TestStarDetector:
    def test_finds_planted_clique(self):
        inst, cert, _ = gen_star_graph(4096, "triangle", seed=23)
        for s in range(6):
            o = CountedOracle(inst, relabel_seed=s)
            out = cert_star_search(o, cert, seed=s)
            found_and_valid(inst, o, out)
            assert set(_unrelabel_witness(o, out.witness).vertices) == \
                set(inst.meta.witness_locations[0])

    def test_empty_certificate_skips_enumeration(self):
        inst, _, _ = gen_star_graph(4096, "triangle", seed=23)
        out = cert_star_search(CountedOracle(inst),
                               Certificate("StarDegrees", {"degrees": []}),
                               seed=1)
        assert out.status == "Exhausted" and out.witness is None
        # sampling plus at most one hop and one degree check per sample,
        # but no center enumeration
        assert out.queries <= 2 * out.attempts + 100

    def test_query_bound_at_mid_size(self):
        inst, cert, _ = gen_star_graph(1 << 14, "triangle", seed=31)
        for s in range(5):
            o = CountedOracle(inst, relabel_seed=s)
            out = cert_star_search(o, cert, seed=s)
            found_and_valid(inst, o, out)
            n = inst.n
            assert out.queries <= 40 * math.sqrt(n) * math.log2(n)

    def test_no_planted_clique_exhausts(self):
        inst, cert, _ = gen_star_graph(4096, 0, seed=11)
        assert cert.payload["degrees"] == []
        out = cert_star_search(CountedOracle(inst), cert, seed=2)
        assert out.status == "Exhausted"


class TestStarpathDetector:
    def test_finds_planted_center(self):
        inst, cert, _ = gen_starpath_graph(4096, 4, seed=29)
        for s in range(8):
            o = CountedOracle(inst, relabel_seed=s)
            out = cert_starpath_search(o, cert, seed=s)
            found_and_valid(inst, o, out)
            got = _unrelabel_witness(o, out.witness)
            assert got.vertices[0] == inst.meta.witness_locations[0][0]

    def test_corrupted_index_never_yields_invalid_witness(self):
        inst, cert, _ = gen_starpath_graph(4096, 4, seed=29)
        s_count = math.isqrt(4096)
        for seed in range(12):
            bad = corrupt_certificate(cert, seed=seed, index_range=s_count)
            assert bad.payload["index"] != cert.payload["index"]
            o = CountedOracle(inst, relabel_seed=seed)
            out = cert_starpath_search(o, bad, seed=seed,
                                       budget=40 * math.isqrt(4096))
            if out.found:
                assert validate_witness(inst, _unrelabel_witness(o, out.witness))

    def test_budget_honored(self):
        inst, cert, _ = gen_starpath_graph(4096, 4, seed=29)
        out = cert_starpath_search(CountedOracle(inst), cert, seed=5, budget=30)
        assert out.queries <= 30
        assert out.status in ("Found", "BudgetExceeded")


class TestUniformProbe:
    def test_fixed_point_sample_count_is_half_n(self):
        # single fixed point, samples drawn without replacement: the hit
        # index is uniform on 1..n, mean (n+1)/2
        n = 512
        succ = np.roll(np.arange(n), -1)
        succ[100] = 100
        succ[99] = 101  # keep it a function; 100 is the only fixed point
        inst = FunctionInstance(n=n, succ=succ, meta=None, info={})
        samples = []
        for s in range(60):
            out = uniform_probe_baseline(CountedOracle(inst), "fixed-point",
                                         seed=s, chunk=1)
            assert out.found and out.witness.vertices == (100,)
            samples.append(out.attempts)
        mean = np.mean(samples)
        target = (n + 1) / 2
        stderr = n / math.sqrt(12) / math.sqrt(len(samples))
        assert abs(mean - target) < 4 * stderr, (mean, target)

    def test_k_star_target_on_starpath(self):
        inst, _, _ = gen_starpath_graph(2048, 4, seed=3)
        o = CountedOracle(inst, relabel_seed=1)
        out = uniform_probe_baseline(o, "k-star", seed=2, k=4)
        found_and_valid(inst, o, out)

    def test_edge_and_wedge_targets(self):
        g = graph_from_edges(64, [(0, 1), (1, 2)])
        out = uniform_probe_baseline(CountedOracle(g), "edge", seed=1)
        assert out.found
        out = uniform_probe_baseline(CountedOracle(g), "wedge", seed=1)
        assert out.found and out.witness.vertices[0] == 1

    def test_unsupported_target_rejected(self):
        inst = FunctionInstance(n=8, succ=np.arange(8), meta=None, info={})
        with pytest.raises(ValueError):
            uniform_probe_baseline(CountedOracle(inst), "collision", seed=0)

    def test_budget_exceeded_status(self):
        inst = FunctionInstance(n=4096, succ=np.roll(np.arange(4096), -1),
                                meta=None, info={})
        out = uniform_probe_baseline(CountedOracle(inst), "fixed-point",
                                     seed=0, budget=100, chunk=32)
        assert out.status == "BudgetExceeded" and out.queries <= 100


class TestBruteForce:
    def test_collision_agreement_on_random_functions(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            n = 256
            succ = rng.integers(0, n, size=n)
            inst = FunctionInstance(n=n, succ=succ, meta=None, info={})
            hits = brute_force_find(inst, "collision")
            values, counts = np.unique(succ, return_counts=True)
            expected = int(sum(c * (c - 1) // 2 for c in counts))
            assert len(hits) == expected
            for w in hits[:50]:
                assert validate_witness(inst, w)

    def test_fixed_point_agreement(self):
        rng = np.random.default_rng(1)
        succ = rng.integers(0, 256, size=256)
        inst = FunctionInstance(n=256, succ=succ, meta=None, info={})
        hits = brute_force_find(inst, "fixed-point")
        assert len(hits) == int((succ == np.arange(256)).sum())

    def test_claw_count_matches_construction(self):
        inst, _, meta = gen_claw_graph(1024, ScaleParams(2, 4, rho=0.25), seed=9)
        hits = brute_force_find(inst, "claw")
        assert len(hits) == 2 * meta.extras["b_t"]
        for w in hits:
            assert validate_witness(inst, w)

    def test_clique_count_on_star_instance(self):
        inst, _, meta = gen_star_graph(1024, "triangle", seed=12)
        hits = brute_force_find(inst, "clique", h=3)
        assert len(hits) == 1
        assert set(hits[0].vertices) == set(meta.witness_locations[0])

    def test_size_guards(self):
        big = FunctionInstance(n=1 << 14, succ=np.arange(1 << 14), meta=None,
                               info={})
        with pytest.raises(ValueError):
            brute_force_find(big, "path", k=2)


class TestCorruptCertificate:
    def test_each_kind_changes_payload(self):
        _, c1, _ = gen_collision_function(1024, ScaleParams(2, 4, rho=0.25), seed=1)
        bad = corrupt_certificate(c1, seed=0, scale_window=(2, 4))
        assert bad.kind == c1.kind and bad.payload["t"] != c1.payload["t"]
        assert 2 <= bad.payload["t"] <= 4

        _, c2, _ = gen_fixedpoint_function(4096, FixedPointParams(), seed=2)
        bad = corrupt_certificate(c2, seed=0)
        assert bad.payload["primes"] != c2.payload["primes"]
        assert len(bad.payload["primes"]) == len(c2.payload["primes"])

        _, c3, _ = gen_star_graph(1024, "triangle", seed=3)
        bad = corrupt_certificate(c3, seed=0)
        assert bad.payload["degrees"] != c3.payload["degrees"]

        _, c4, _ = gen_starpath_graph(1024, 4, seed=4)
        bad = corrupt_certificate(c4, seed=0, index_range=32)
        assert bad.payload["index"] != c4.payload["index"]
        assert bad.payload["k"] == 4

    def test_single_scale_window_has_no_wrong_value(self):
        _, cert, _ = gen_collision_function(1024, ScaleParams(3, 3, rho=0.25),
                                            seed=1)
        with pytest.raises(ValueError):
            corrupt_certificate(cert, seed=0, scale_window=(3, 3))


ALLOWED_SURFACE = {
    "n", "count", "remaining",
    "query_function", "query_function_many",
    "query_degree", "query_neighbor",
    "query_degree_many", "query_neighbor_many",
}


class _PureFacade:
    """Exposes only the query surface; anything else is a purity breach."""

    def __init__(self, oracle):
        self.__dict__["_o"] = oracle

    def __getattr__(self, name):
        if name in ALLOWED_SURFACE:
            return getattr(self.__dict__["_o"], name)
        raise AssertionError(f"detector touched non-query attribute {name!r}")


class TestOraclePurity:
    def test_function_detectors_use_only_the_query_surface(self):
        inst, cert, _ = gen_collision_function(2048, ScaleParams(2, 4), seed=6)
        o = _PureFacade(CountedOracle(inst))
        assert cert_collision_search(o, cert, seed=1).found
        o = _PureFacade(CountedOracle(inst))
        assert multiscale_collision_search(o, 2, 4, seed=1).found

        fp, fpc, _ = gen_fixedpoint_function(4096, FixedPointParams(), seed=7)
        o = _PureFacade(CountedOracle(fp))
        assert cert_fixedpoint_search(o, fpc, seed=1, C=4.0).found
        o = _PureFacade(CountedOracle(fp))
        assert uniform_probe_baseline(o, "fixed-point", seed=1).found
        o = _PureFacade(CountedOracle(fp))
        path_k_search(o, k=2, seed=1)
        bat = collision_attempt_battery(_PureFacade(CountedOracle(inst)),
                                        cert.payload["t"], 200, seed=2)
        assert bat["attempts"] == 200

    def test_graph_detectors_use_only_the_query_surface(self):
        claw, clc, _ = gen_claw_graph(2048, ScaleParams(2, 4), seed=8)
        o = _PureFacade(CountedOracle(claw))
        assert cert_claw_search(o, clc, seed=1).found

        star, stc, _ = gen_star_graph(2048, "triangle", seed=9)
        o = _PureFacade(CountedOracle(star))
        assert cert_star_search(o, stc, seed=1).found

        sp, spc, _ = gen_starpath_graph(2048, 4, seed=10)
        o = _PureFacade(CountedOracle(sp))
        assert cert_starpath_search(o, spc, seed=1).found
        o = _PureFacade(CountedOracle(sp))
        assert edge_wedge_search(o, "edge", seed=1).found
        o = _PureFacade(CountedOracle(sp))
        assert uniform_probe_baseline(o, "k-star", seed=1, k=4).found
