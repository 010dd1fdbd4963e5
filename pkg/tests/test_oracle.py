"""Oracle layer: counting, relabeling, witnesses, serialization."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsep import (
    BudgetExceeded,
    Certificate,
    CountedOracle,
    FunctionInstance,
    ModelMismatchError,
    Witness,
    apply_permutation,
    read_certificate,
    read_instance,
    relabel,
    validate_witness,
    write_certificate,
    write_instance,
)
from qsep.oracle import graph_from_edges, invert_permutation, random_permutation


def identity_instance(n):
    return FunctionInstance(n=n, succ=np.arange(n, dtype=np.int64))


def test_identity_query_counts():
    oracle = CountedOracle(identity_instance(8))
    assert oracle.count == 0
    assert oracle.query_function(5) == 5
    assert oracle.count == 1


def test_three_cycle_query():
    inst = FunctionInstance(n=3, succ=np.array([1, 2, 0], dtype=np.int64))
    oracle = CountedOracle(inst)
    assert oracle.query_function(2) == 0


def test_repeated_queries_count():
    oracle = CountedOracle(identity_instance(4))
    for _ in range(5):
        oracle.query_function(1)
    assert oracle.count == 5
    assert oracle.transcript_length == 5


def test_out_of_range_does_not_count():
    oracle = CountedOracle(identity_instance(4))
    with pytest.raises(ValueError):
        oracle.query_function(4)
    with pytest.raises(ValueError):
        oracle.query_function(-1)
    assert oracle.count == 0


def test_model_mismatch():
    oracle = CountedOracle(identity_instance(4))
    with pytest.raises(ModelMismatchError):
        oracle.query_degree(0)
    g = graph_from_edges(2, np.array([[0, 1]]))
    go = CountedOracle(g)
    with pytest.raises(ModelMismatchError):
        go.query_function(0)


def test_budget_enforced():
    oracle = CountedOracle(identity_instance(8), budget=2)
    oracle.query_function(0)
    oracle.query_function(1)
    with pytest.raises(BudgetExceeded):
        oracle.query_function(2)
    assert oracle.count == 2
    assert oracle.remaining() == 0


def test_query_many_matches_singles_and_is_all_or_nothing():
    rng = np.random.default_rng(0)
    succ = rng.integers(0, 32, size=32).astype(np.int64)
    inst = FunctionInstance(n=32, succ=succ)
    o1 = CountedOracle(inst, relabel_seed=5)
    o2 = CountedOracle(inst, relabel_seed=5)
    xs = rng.integers(0, 32, size=10)
    batch = o1.query_function_many(xs)
    singles = [o2.query_function(int(x)) for x in xs]
    assert batch.tolist() == singles
    assert o1.count == o2.count == 10
    o3 = CountedOracle(inst, budget=5)
    with pytest.raises(BudgetExceeded):
        o3.query_function_many(xs)
    assert o3.count == 0


def test_transcript_records_queries():
    inst = FunctionInstance(n=4, succ=np.array([1, 2, 3, 0], dtype=np.int64))
    oracle = CountedOracle(inst)
    oracle.query_function(0)
    oracle.query_function_many([1, 2])
    assert list(oracle.iter_transcript()) == [(0, 1), (1, 2), (2, 3)]
    assert oracle.transcript_length == oracle.count == 3


def test_graph_basics_single_edge():
    g = graph_from_edges(2, np.array([[0, 1]]))
    oracle = CountedOracle(g)
    assert oracle.query_degree(0) == 1
    assert oracle.query_degree(1) == 1
    assert oracle.query_neighbor(0, 0) == 1
    assert oracle.count == 3
    with pytest.raises(IndexError):
        oracle.query_neighbor(0, 1)
    assert oracle.count == 3


def test_graph_wedge_middle_vertex():
    g = graph_from_edges(3, np.array([[0, 1], [1, 2]]))
    oracle = CountedOracle(g)
    assert oracle.query_degree(1) == 2
    nbrs = {oracle.query_neighbor(1, 0), oracle.query_neighbor(1, 1)}
    assert nbrs == {0, 2}
    w = Witness("wedge", (1, 0, 2))
    assert validate_witness(g, w)


def test_graph_symmetric_closure_random():
    rng = np.random.default_rng(3)
    for _ in range(20):
        n = int(rng.integers(2, 30))
        m = int(rng.integers(1, 40))
        raw = rng.integers(0, n, size=(m, 2))
        raw = raw[raw[:, 0] != raw[:, 1]]
        seen, edges = set(), []
        for u, v in raw:
            key = (min(u, v), max(u, v))
            if key not in seen:
                seen.add(key)
                edges.append((u, v))
        if not edges:
            continue
        g = graph_from_edges(n, np.array(edges))
        assert int(g.degrees.sum()) == 2 * len(edges)
        for u, v in edges:
            assert g.has_edge(u, v) and g.has_edge(v, u)


def cycle_type(succ):
    n = len(succ)
    seen = np.zeros(n, bool)
    f = np.asarray(succ)
    lengths = []
    for x in range(n):
        path = []
        v = x
        while not seen[v]:
            seen[v] = True
            path.append(v)
            v = int(f[v])
        if v in path:
            lengths.append(len(path) - path.index(v))
    return sorted(lengths)


def test_conjugation_preserves_cycle_structure():
    rng = np.random.default_rng(7)
    for _ in range(10):
        n = int(rng.integers(4, 64))
        succ = rng.integers(0, n, size=n).astype(np.int64)
        inst = FunctionInstance(n=n, succ=succ)
        rel = relabel(inst, seed=int(rng.integers(1 << 30)))
        assert cycle_type(rel.succ) == cycle_type(succ)
        assert int((rel.succ == np.arange(n)).sum()) == int((succ == np.arange(n)).sum())


def test_relabeled_walk_replays_raw_walk():
    rng = np.random.default_rng(11)
    n = 40
    succ = rng.integers(0, n, size=n).astype(np.int64)
    inst = FunctionInstance(n=n, succ=succ)
    perm = random_permutation(n, rng)
    oracle = CountedOracle(inst, perm=perm)
    x = 17
    vis_x = int(perm[x])
    for _ in range(25):
        vis_y = oracle.query_function(vis_x)
        x = int(succ[x])
        assert vis_y == int(perm[x])
        vis_x = vis_y


def test_double_relabel_bit_exact():
    rng = np.random.default_rng(13)
    n = 50
    succ = rng.integers(0, n, size=n).astype(np.int64)
    inst = FunctionInstance(n=n, succ=succ)
    perm = random_permutation(n, rng)
    back = apply_permutation(apply_permutation(inst, perm), invert_permutation(perm))
    assert back.succ.tobytes() == inst.succ.tobytes()

    edges = np.array([[0, 1], [1, 2], [2, 3], [3, 0], [1, 3]])
    g = graph_from_edges(5, edges)
    gperm = random_permutation(5, rng)
    gback = apply_permutation(apply_permutation(g, gperm), invert_permutation(gperm))
    assert gback.indptr.tobytes() == g.indptr.tobytes()
    assert gback.indices.tobytes() == g.indices.tobytes()


def test_oracle_relabel_seed_equals_relabeled_instance():
    rng = np.random.default_rng(17)
    n = 64
    succ = rng.integers(0, n, size=n).astype(np.int64)
    inst = FunctionInstance(n=n, succ=succ)
    o1 = CountedOracle(inst, relabel_seed=99)
    o2 = CountedOracle(relabel(inst, seed=99))
    xs = rng.integers(0, n, size=50)
    assert [o1.query_function(int(x)) for x in xs] == \
           [o2.query_function(int(x)) for x in xs]


def test_info_hiding_and_witness_translation():
    # a two-preimage value: 0 -> 2 and 1 -> 2
    inst = FunctionInstance(n=4, succ=np.array([2, 2, 3, 3], dtype=np.int64))
    oracle = CountedOracle(inst, relabel_seed=5)
    assert set(oracle.public_state()) == {"model", "n", "count", "budget",
                                          "transcript_length"}
    # find the collision through the oracle only
    ys = [oracle.query_function(x) for x in range(4)]
    pairs = [(x, y) for x, y in enumerate(ys)]
    byval = {}
    witness = None
    for x, y in pairs:
        if y in byval and byval[y] != x:
            witness = Witness("collision", (byval[y], x, y))
        byval[y] = x
    assert witness is not None
    # valid in the visible labeling, i.e. against the relabeled instance
    assert validate_witness(relabel(inst, seed=5), witness)


def brute_collisions(succ):
    out = []
    n = len(succ)
    for x in range(n):
        for y in range(x + 1, n):
            if succ[x] == succ[y]:
                out.append((x, y, int(succ[x])))
    return out


def test_witness_validation_sound_and_complete_small():
    rng = np.random.default_rng(23)
    for _ in range(10):
        n = int(rng.integers(3, 64))
        succ = rng.integers(0, n, size=n).astype(np.int64)
        inst = FunctionInstance(n=n, succ=succ)
        valid = set(brute_collisions(succ))
        for x, y, z in valid:
            assert validate_witness(inst, Witness("collision", (x, y, z)))
            assert validate_witness(inst, Witness("collision", (y, x, z)))
        for _ in range(30):
            x, y, z = (int(v) for v in rng.integers(0, n, size=3))
            claim = validate_witness(inst, Witness("collision", (x, y, z)))
            truth = x != y and succ[x] == z and succ[y] == z
            assert claim == truth
        fixed = {x for x in range(n) if succ[x] == x}
        for x in range(n):
            assert validate_witness(inst, Witness("fixed-point", (x,))) == (x in fixed)


def test_path_witness_validation():
    inst = FunctionInstance(n=5, succ=np.array([1, 2, 3, 4, 0], dtype=np.int64))
    assert validate_witness(inst, Witness("path", (0, 1, 2, 3)))
    assert not validate_witness(inst, Witness("path", (0, 2, 3, 4)))
    assert not validate_witness(inst, Witness("path", (0, 1, 0)))


def test_graph_witness_kinds():
    # claw at 0 with leaves 1,2,3 plus an extra edge 1-4
    g = graph_from_edges(5, np.array([[0, 1], [0, 2], [0, 3], [1, 4]]))
    assert validate_witness(g, Witness("claw", (0, 1, 2, 3)))
    assert validate_witness(g, Witness("k-star", (0, 1, 2, 3)))
    assert not validate_witness(g, Witness("claw", (0, 1, 2, 4)))
    assert not validate_witness(g, Witness("claw", (0, 1, 1, 2)))
    assert validate_witness(g, Witness("edge", (1, 4)))
    assert not validate_witness(g, Witness("edge", (2, 3)))
    tri = graph_from_edges(3, np.array([[0, 1], [1, 2], [2, 0]]))
    assert validate_witness(tri, Witness("clique", (0, 1, 2)))
    assert not validate_witness(g, Witness("clique", (0, 1, 2)))


def test_unknown_witness_kind_rejected():
    inst = identity_instance(4)
    assert not validate_witness(inst, Witness("mystery", (0,)))


def test_instance_file_roundtrip(tmp_path):
    rng = np.random.default_rng(31)
    succ = rng.integers(0, 16, size=16).astype(np.int64)
    inst = FunctionInstance(n=16, succ=succ,
                            info={"construction": "demo", "seed": 4,
                                  "parameters": {"n": 16}})
    p = tmp_path / "inst.json"
    write_instance(inst, p)
    again = read_instance(p)
    assert np.array_equal(again.succ, succ)
    assert again.info["construction"] == "demo"
    first = p.read_bytes()
    write_instance(inst, p)
    assert p.read_bytes() == first
    blob = json.loads(first)
    assert blob["format"] == "qsep-instance"

    g = graph_from_edges(4, np.array([[0, 1], [2, 3]]))
    gp = tmp_path / "graph.json"
    write_instance(g, gp)
    g2 = read_instance(gp)
    assert np.array_equal(g2.indptr, g.indptr)
    assert np.array_equal(g2.indices, g.indices)


def test_certificate_roundtrip(tmp_path):
    cert = Certificate("CollisionScale", {"t": 5})
    p = tmp_path / "cert.json"
    write_certificate(cert, p)
    again = read_certificate(p)
    assert again.kind == cert.kind and again.payload == cert.payload


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 40), st.integers(0, 2 ** 31 - 1))
def test_relabel_roundtrip_property(n, seed):
    rng = np.random.default_rng(seed)
    succ = rng.integers(0, n, size=n).astype(np.int64)
    inst = FunctionInstance(n=n, succ=succ)
    perm = random_permutation(n, rng)
    back = apply_permutation(apply_permutation(inst, perm), invert_permutation(perm))
    assert np.array_equal(back.succ, succ)
