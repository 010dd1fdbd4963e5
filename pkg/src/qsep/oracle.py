"""Black-box instances, query accounting, witnesses, and relabeling.

Two query models share one accounting discipline:

* function model: a total map f on {0..n-1}; the only query is x -> f(x)
* graph model: adjacency lists; queries are degree(v) and neighbor(v, i)

``CountedOracle`` wraps an instance behind this query surface. It counts
every query (repeated queries count again), keeps a transcript, enforces
an optional hard budget, and can apply a hidden relabeling permutation so
that algorithms only ever see conjugated labels. Ground-truth structure
travels with the instance as ``StructureMeta``; the oracle never exposes
it, and nothing in the public query API reveals the permutation.
"""

from __future__ import annotations

import json
from array import array
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

# structure kind codes used by StructureMeta
KIND_PATH = 0
KIND_CYCLE = 1
KIND_FEEDER = 2
KIND_STAR = 3
KIND_BACKBONE = 4
KIND_ISOLATED = 5
KIND_GADGET = 6
KIND_NAMES = ("path", "cycle", "feeder", "star", "backbone", "isolated", "witness-gadget")


class BudgetExceeded(RuntimeError):
    """Raised by an oracle when a query would pass the hard budget."""


class ModelMismatchError(TypeError):
    """A function query hit a graph oracle, or the other way around."""


def _as_index_array(a) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(a, dtype=np.int64))


@dataclass
class StructureMeta:
    """Ground-truth layout of a generated instance.

    Structures are stored in columnar form: ``kinds[i]`` is a kind code,
    and the members of structure i are ``members[offsets[i]:offsets[i+1]]``
    in walk order. ``witness_locations`` holds the planted witnesses as
    element tuples; ``extras`` carries construction-specific values that
    are not element ids (counts, primes, degrees, realized parameters).
    """

    kinds: np.ndarray
    offsets: np.ndarray
    members: np.ndarray
    good_index: int | None = None
    witness_locations: list[tuple[int, ...]] = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    @property
    def count(self) -> int:
        return len(self.kinds)

    def length(self, i: int) -> int:
        return int(self.offsets[i + 1] - self.offsets[i])

    def members_of(self, i: int) -> np.ndarray:
        return self.members[self.offsets[i]:self.offsets[i + 1]]

    def kind_name(self, i: int) -> str:
        return KIND_NAMES[self.kinds[i]]

    def structures(self) -> Iterator[tuple[str, int, np.ndarray]]:
        for i in range(self.count):
            yield self.kind_name(i), self.length(i), self.members_of(i)

    def check_partition(self, n: int) -> bool:
        """Member lists are pairwise disjoint and cover {0..n-1}."""
        if len(self.members) != n:
            return False
        return bool(np.array_equal(np.sort(self.members), np.arange(n)))

    def scale_census(self) -> dict[int, int]:
        """Count path/cycle structures by length (power-of-two lengths only)."""
        census: dict[int, int] = {}
        lengths = np.diff(self.offsets)
        for k, ln in zip(self.kinds, lengths):
            if k in (KIND_PATH, KIND_CYCLE):
                ln = int(ln)
                if ln >= 4 and ln & (ln - 1) == 0:
                    census[ln] = census.get(ln, 0) + 1
        return census

    def transport(self, perm: np.ndarray) -> "StructureMeta":
        """Relabel every element id through perm (old label -> new label)."""
        return StructureMeta(
            kinds=self.kinds.copy(),
            offsets=self.offsets.copy(),
            members=perm[self.members],
            good_index=self.good_index,
            witness_locations=[tuple(int(perm[v]) for v in loc) for loc in self.witness_locations],
            extras=dict(self.extras),
        )

    def to_jsonable(self) -> dict:
        return {
            "ground-truth": True,
            "kinds": self.kinds.tolist(),
            "offsets": self.offsets.tolist(),
            "members": self.members.tolist(),
            "good_index": self.good_index,
            "witness_locations": [list(map(int, loc)) for loc in self.witness_locations],
            "extras": _jsonable(self.extras),
        }

    @staticmethod
    def from_jsonable(d: dict) -> "StructureMeta":
        return StructureMeta(
            kinds=np.asarray(d["kinds"], dtype=np.int8),
            offsets=_as_index_array(d["offsets"]),
            members=_as_index_array(d["members"]),
            good_index=d.get("good_index"),
            witness_locations=[tuple(loc) for loc in d.get("witness_locations", [])],
            extras=d.get("extras", {}),
        )


class MetaBuilder:
    """Accumulates structures and freezes them into a StructureMeta."""

    def __init__(self) -> None:
        self._kinds: list[np.ndarray] = []
        self._lengths: list[np.ndarray] = []
        self._members: list[np.ndarray] = []

    def add(self, kind: int, members) -> None:
        m = _as_index_array(members)
        self._kinds.append(np.full(1, kind, dtype=np.int8))
        self._lengths.append(np.full(1, len(m), dtype=np.int64))
        self._members.append(m)

    def add_blocks(self, kind: int, flat, block_len: int) -> None:
        """Many structures of equal length, concatenated in ``flat``."""
        m = _as_index_array(flat)
        if block_len <= 0 or len(m) % block_len:
            raise ValueError("flat length must be a multiple of block_len")
        k = len(m) // block_len
        self._kinds.append(np.full(k, kind, dtype=np.int8))
        self._lengths.append(np.full(k, block_len, dtype=np.int64))
        self._members.append(m)

    def freeze(self, good_index=None, witness_locations=None, extras=None) -> StructureMeta:
        kinds = np.concatenate(self._kinds) if self._kinds else np.zeros(0, dtype=np.int8)
        lengths = np.concatenate(self._lengths) if self._lengths else np.zeros(0, dtype=np.int64)
        members = np.concatenate(self._members) if self._members else np.zeros(0, dtype=np.int64)
        offsets = np.zeros(len(lengths) + 1, dtype=np.int64)
        np.cumsum(lengths, out=offsets[1:])
        return StructureMeta(
            kinds=kinds,
            offsets=offsets,
            members=members,
            good_index=good_index,
            witness_locations=witness_locations or [],
            extras=extras or {},
        )


@dataclass
class FunctionInstance:
    n: int
    succ: np.ndarray
    meta: StructureMeta | None = None
    info: dict = field(default_factory=dict)

    model = "function"

    def __post_init__(self) -> None:
        self.succ = _as_index_array(self.succ)
        if len(self.succ) != self.n:
            raise ValueError("succ length must equal n")


@dataclass
class GraphInstance:
    """Undirected graph in CSR form; adjacency order is fixed at build time."""

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    meta: StructureMeta | None = None
    info: dict = field(default_factory=dict)

    model = "graph"

    def __post_init__(self) -> None:
        self.indptr = _as_index_array(self.indptr)
        self.indices = _as_index_array(self.indices)
        if len(self.indptr) != self.n + 1:
            raise ValueError("indptr length must equal n + 1")

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        return bool(np.any(self.neighbors(u) == v))


def graph_from_edges(n: int, edges: np.ndarray) -> GraphInstance:
    """Build a CSR graph from an (m, 2) edge array.

    Each undirected edge appears once in ``edges``; both directions are
    materialized. Neighbor order is the order in which edges were listed,
    which keeps builds reproducible for a fixed seed.
    """
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    src = np.concatenate([edges[:, 0], edges[:, 1]])
    dst = np.concatenate([edges[:, 1], edges[:, 0]])
    deg = np.bincount(src, minlength=n).astype(np.int64)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(deg, out=indptr[1:])
    order = np.argsort(src, kind="stable")
    indices = dst[order]
    return GraphInstance(n=n, indptr=indptr, indices=indices)


@dataclass
class Certificate:
    """Untrusted structural hint handed to a search algorithm."""

    kind: str
    payload: dict

    def to_jsonable(self) -> dict:
        return {"format": "qsep-certificate", "version": 1, "kind": self.kind, "payload": _jsonable(self.payload)}

    @staticmethod
    def from_jsonable(d: dict) -> "Certificate":
        if d.get("format") != "qsep-certificate":
            raise ValueError("not a certificate file")
        return Certificate(kind=d["kind"], payload=d["payload"])


@dataclass(frozen=True)
class Witness:
    kind: str
    vertices: tuple[int, ...]


def validate_witness(instance, w: Witness) -> bool:
    """Check a witness against ground truth. Sound and complete per kind."""
    n = instance.n
    vs = w.vertices
    if any(not (0 <= int(v) < n) for v in vs):
        return False
    if instance.model == "function":
        f = instance.succ
        if w.kind == "collision":
            if len(vs) != 3:
                return False
            x, y, z = vs
            return x != y and f[x] == z and f[y] == z
        if w.kind == "k-collision":
            *xs, z = vs
            return len(set(xs)) == len(xs) >= 2 and all(f[x] == z for x in xs)
        if w.kind == "fixed-point":
            return len(vs) == 1 and f[vs[0]] == vs[0]
        if w.kind == "path":
            if len(set(vs)) != len(vs) or len(vs) < 2:
                return False
            return all(f[vs[i]] == vs[i + 1] for i in range(len(vs) - 1))
        return False
    if instance.model == "graph":
        if w.kind == "edge":
            if len(vs) != 2 or vs[0] == vs[1]:
                return False
            return instance.has_edge(vs[0], vs[1])
        if w.kind == "wedge":
            if len(vs) != 3:
                return False
            c, a, b = vs
            return a != b and instance.has_edge(c, a) and instance.has_edge(c, b)
        if w.kind in ("claw", "k-star"):
            c, *leaves = vs
            if len(set(leaves)) != len(leaves) or len(leaves) < 1 or c in leaves:
                return False
            if w.kind == "claw" and len(leaves) != 3:
                return False
            nbrs = set(instance.neighbors(c).tolist())
            return all(l in nbrs for l in leaves)
        if w.kind == "clique":
            if len(set(vs)) != len(vs) or len(vs) < 2:
                return False
            return all(
                instance.has_edge(vs[i], vs[j])
                for i in range(len(vs))
                for j in range(i + 1, len(vs))
            )
        return False
    raise ModelMismatchError(f"unknown instance model {instance.model!r}")


# ---------------------------------------------------------------------------
# permutations and relabeling


def random_permutation(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.permutation(n).astype(np.int64)


def invert_permutation(perm: np.ndarray) -> np.ndarray:
    inv = np.empty_like(perm)
    inv[perm] = np.arange(len(perm), dtype=perm.dtype)
    return inv


def apply_permutation(instance, perm: np.ndarray):
    """Relabel an instance through perm (old label -> new label).

    Functions are conjugated, so the relabeled object is again a function
    on the same label space and the cycle type is preserved. Graphs keep
    each adjacency list's internal order, so applying perm and then its
    inverse reproduces the original arrays bit for bit.
    """
    perm = _as_index_array(perm)
    n = instance.n
    if len(perm) != n:
        raise ValueError("permutation size mismatch")
    meta = instance.meta.transport(perm) if instance.meta is not None else None
    if instance.model == "function":
        new_succ = np.empty(n, dtype=np.int64)
        new_succ[perm] = perm[instance.succ]
        return FunctionInstance(n=n, succ=new_succ, meta=meta, info=dict(instance.info))
    deg = instance.degrees
    new_deg = np.empty(n, dtype=np.int64)
    new_deg[perm] = deg
    new_indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(new_deg, out=new_indptr[1:])
    m = len(instance.indices)
    new_indices = np.empty(m, dtype=np.int64)
    if m:
        within = np.arange(m, dtype=np.int64) - np.repeat(instance.indptr[:-1], deg)
        new_indices[np.repeat(new_indptr[perm], deg) + within] = perm[instance.indices]
    return GraphInstance(n=n, indptr=new_indptr, indices=new_indices, meta=meta, info=dict(instance.info))


def relabel(instance, seed: int):
    """Compose the instance with a uniformly random permutation drawn from seed."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    return apply_permutation(instance, random_permutation(instance.n, rng))


# ---------------------------------------------------------------------------
# the counted oracle

_OP_DEG = 0
_OP_NBR = 1


class CountedOracle:
    """Query access to one instance with strict accounting.

    The oracle optionally conjugates labels through a hidden permutation
    drawn from ``relabel_seed`` (or given as ``perm``, visible label ->
    internal label direction is handled internally; pass the same kind of
    permutation ``apply_permutation`` takes). Algorithms must treat the
    oracle as the only window onto the instance.
    """

    def __init__(self, instance, relabel_seed: int | None = None,
                 perm: np.ndarray | None = None, budget: int | None = None):
        self.n = instance.n
        self.model = instance.model
        self.budget = budget
        self._count = 0
        if instance.model == "function":
            self._succ = instance.succ
            self._rec = array("q")
        else:
            self._indptr = instance.indptr
            self._indices = instance.indices
            self._rec = array("q")
        if perm is not None and relabel_seed is not None:
            raise ValueError("pass either relabel_seed or perm, not both")
        if relabel_seed is not None:
            rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(relabel_seed)))
            perm = random_permutation(self.n, rng)
        if perm is None:
            self._out = None   # internal -> visible
            self._in = None    # visible -> internal
        else:
            perm = _as_index_array(perm)
            self._out = perm
            self._in = invert_permutation(perm)

    # -- accounting ---------------------------------------------------------

    @property
    def count(self) -> int:
        return self._count

    @property
    def transcript_length(self) -> int:
        return self._count

    def remaining(self) -> int | None:
        return None if self.budget is None else self.budget - self._count

    def _charge(self, k: int = 1) -> None:
        if self.budget is not None and self._count + k > self.budget:
            raise BudgetExceeded(f"budget {self.budget} reached at count {self._count}")
        self._count += k

    def public_state(self) -> dict:
        return {
            "model": self.model,
            "n": self.n,
            "count": self._count,
            "budget": self.budget,
            "transcript_length": self.transcript_length,
        }

    def iter_transcript(self):
        """Yield (query, answer) pairs in query order."""
        r = self._rec
        if self.model == "function":
            for i in range(0, len(r), 2):
                yield (r[i], r[i + 1])
        else:
            for i in range(0, len(r), 3):
                op, va, ans = r[i], r[i + 1], r[i + 2]
                if op >= 0:
                    yield (("nbr", va, op), ans)
                else:
                    yield (("deg", va), ans)

    # -- function queries ---------------------------------------------------

    def query_function(self, x: int) -> int:
        if self.model != "function":
            raise ModelMismatchError("function query on a graph oracle")
        x = int(x)
        if not 0 <= x < self.n:
            raise ValueError(f"element {x} out of range")
        self._charge()
        xi = self._in[x] if self._in is not None else x
        yi = self._succ[xi]
        y = self._out[yi] if self._out is not None else yi
        self._rec.append(x)
        self._rec.append(y)
        return int(y)

    def query_function_many(self, xs) -> np.ndarray:
        """Batch form of query_function; counts len(xs) queries."""
        if self.model != "function":
            raise ModelMismatchError("function query on a graph oracle")
        xs = _as_index_array(xs)
        if len(xs) == 0:
            return xs
        if xs.min() < 0 or xs.max() >= self.n:
            raise ValueError("element out of range")
        self._charge(len(xs))
        xi = self._in[xs] if self._in is not None else xs
        yi = self._succ[xi]
        ys = self._out[yi] if self._out is not None else yi
        flat = np.empty(2 * len(xs), dtype=np.int64)
        flat[0::2] = xs
        flat[1::2] = ys
        self._rec.frombytes(flat.tobytes())
        return ys

    # -- graph queries ------------------------------------------------------

    def query_degree(self, v: int) -> int:
        if self.model != "graph":
            raise ModelMismatchError("degree query on a function oracle")
        v = int(v)
        if not 0 <= v < self.n:
            raise ValueError(f"vertex {v} out of range")
        self._charge()
        vi = self._in[v] if self._in is not None else v
        d = int(self._indptr[vi + 1] - self._indptr[vi])
        self._rec.append(-1)
        self._rec.append(v)
        self._rec.append(d)
        return d

    def query_neighbor(self, v: int, i: int) -> int:
        if self.model != "graph":
            raise ModelMismatchError("neighbor query on a function oracle")
        v, i = int(v), int(i)
        if not 0 <= v < self.n:
            raise ValueError(f"vertex {v} out of range")
        vi = self._in[v] if self._in is not None else v
        d = int(self._indptr[vi + 1] - self._indptr[vi])
        if not 0 <= i < d:
            raise IndexError(f"neighbor index {i} out of range for degree {d}")
        self._charge()
        wi = self._indices[self._indptr[vi] + i]
        w = self._out[wi] if self._out is not None else wi
        self._rec.append(i)
        self._rec.append(v)
        self._rec.append(w)
        return int(w)

    def query_degree_many(self, vs) -> np.ndarray:
        """Batch form of query_degree; counts len(vs) queries."""
        if self.model != "graph":
            raise ModelMismatchError("degree query on a function oracle")
        vs = _as_index_array(vs)
        if len(vs) == 0:
            return vs
        if vs.min() < 0 or vs.max() >= self.n:
            raise ValueError("vertex out of range")
        self._charge(len(vs))
        vi = self._in[vs] if self._in is not None else vs
        ds = self._indptr[vi + 1] - self._indptr[vi]
        flat = np.empty(3 * len(vs), dtype=np.int64)
        flat[0::3] = -1
        flat[1::3] = vs
        flat[2::3] = ds
        self._rec.frombytes(flat.tobytes())
        return ds

    def query_neighbor_many(self, vs, is_) -> np.ndarray:
        """Batch form of query_neighbor; counts len(vs) queries."""
        if self.model != "graph":
            raise ModelMismatchError("neighbor query on a function oracle")
        vs = _as_index_array(vs)
        is_ = _as_index_array(is_)
        if vs.shape != is_.shape:
            raise ValueError("vs and is_ must have matching shapes")
        if len(vs) == 0:
            return vs
        if vs.min() < 0 or vs.max() >= self.n:
            raise ValueError("vertex out of range")
        vi = self._in[vs] if self._in is not None else vs
        ds = self._indptr[vi + 1] - self._indptr[vi]
        if (is_ < 0).any() or (is_ >= ds).any():
            raise IndexError("neighbor index out of range")
        self._charge(len(vs))
        wi = self._indices[self._indptr[vi] + is_]
        ws = self._out[wi] if self._out is not None else wi
        flat = np.empty(3 * len(vs), dtype=np.int64)
        flat[0::3] = is_
        flat[1::3] = vs
        flat[2::3] = ws
        self._rec.frombytes(flat.tobytes())
        return ws


def _unrelabel_witness(oracle: CountedOracle, w: Witness) -> Witness:
    """Map a witness from oracle-visible labels back to instance labels.

    Trusted harness helper; not part of the query surface.
    """
    if oracle._in is None:
        return w
    return Witness(kind=w.kind, vertices=tuple(int(oracle._in[v]) for v in w.vertices))


# ---------------------------------------------------------------------------
# file format


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def canonical_json(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, separators=(",", ":"))


def instance_to_jsonable(instance, include_meta: bool = True) -> dict:
    header = {
        "model": instance.model,
        "n": instance.n,
        "construction": instance.info.get("construction"),
        "seed": instance.info.get("seed"),
        "parameters": _jsonable(instance.info.get("parameters", {})),
    }
    if instance.model == "function":
        payload = {"succ": instance.succ.tolist()}
    else:
        payload = {"indptr": instance.indptr.tolist(), "indices": instance.indices.tolist()}
    doc = {"format": "qsep-instance", "version": 1, "header": header, "payload": payload}
    if include_meta and instance.meta is not None:
        doc["meta"] = instance.meta.to_jsonable()
    return doc


def instance_from_jsonable(doc: dict):
    if doc.get("format") != "qsep-instance":
        raise ValueError("not an instance file")
    header = doc["header"]
    meta = StructureMeta.from_jsonable(doc["meta"]) if "meta" in doc else None
    info = {
        "construction": header.get("construction"),
        "seed": header.get("seed"),
        "parameters": header.get("parameters", {}),
    }
    if header["model"] == "function":
        return FunctionInstance(n=header["n"], succ=np.asarray(doc["payload"]["succ"], dtype=np.int64),
                                meta=meta, info=info)
    return GraphInstance(
        n=header["n"],
        indptr=np.asarray(doc["payload"]["indptr"], dtype=np.int64),
        indices=np.asarray(doc["payload"]["indices"], dtype=np.int64),
        meta=meta,
        info=info,
    )


def write_instance(instance, path, include_meta: bool = True) -> None:
    with open(path, "w") as fh:
        fh.write(canonical_json(instance_to_jsonable(instance, include_meta)))
        fh.write("\n")


def read_instance(path):
    with open(path) as fh:
        return instance_from_jsonable(json.load(fh))


def write_certificate(cert: Certificate, path) -> None:
    with open(path, "w") as fh:
        fh.write(canonical_json(cert.to_jsonable()))
        fh.write("\n")


def read_certificate(path) -> Certificate:
    with open(path) as fh:
        return Certificate.from_jsonable(json.load(fh))
