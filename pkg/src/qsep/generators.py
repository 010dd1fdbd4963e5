"""Seeded generators for the planted-substructure distributions.

Each generator is a pure function of (n, params, seed) returning
(instance, certificate, meta). The certificate carries the structural
parameters an informed search algorithm would hold; meta is the full
ground-truth layout for verification tools only.

Capacity accounting is explicit: path counts follow a_i = floor(rho *
n / beta^i) and witness counts b_i = floor(rho * n^(1-c) / gamma^i),
with rho either given or auto-fit to the largest value <= 1 for which
every structure plus witness overhead fits inside n elements.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, asdict
from math import isqrt

import numpy as np

from qsep.oracle import (
    KIND_BACKBONE,
    KIND_CYCLE,
    KIND_FEEDER,
    KIND_GADGET,
    KIND_ISOLATED,
    KIND_PATH,
    KIND_STAR,
    Certificate,
    FunctionInstance,
    GraphInstance,
    MetaBuilder,
    graph_from_edges,
)


class ParameterError(ValueError):
    """Parameters outside the construction's legal ranges."""


class CapacityError(ParameterError):
    """Requested structures do not fit inside n elements."""


class PrimeShortageError(ParameterError):
    """The prime window holds fewer primes than cycles needed."""


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _seed_repr(seed):
    return int(seed) if isinstance(seed, (int, np.integer)) else None


# ---------------------------------------------------------------------------
# multi-scale path layout (collision and claw families)


@dataclass(frozen=True)
class ScaleParams:
    """Scale window and density knobs for the multi-scale constructions."""

    i_min: int = 4
    i_max: int = 8
    beta: float = 2.2
    gamma: float = 1.1
    c: float = 0.3
    rho: float | str = "auto"

    def validate(self) -> None:
        if self.i_min < 2:
            raise ParameterError("i_min must be >= 2 (witness paths need an interior)")
        if self.i_min > self.i_max:
            raise ParameterError("i_min must not exceed i_max")
        if not 1.0 < self.gamma < self.beta:
            raise ParameterError("need 1 < gamma < beta")
        if not 0.0 < self.c < 0.5:
            raise ParameterError("need 0 < c < 1/2")
        if self.rho != "auto" and not 0.0 < float(self.rho) <= 1.0:
            raise ParameterError("rho must lie in (0, 1] or be 'auto'")


@dataclass
class ScaleTable:
    """Realized per-scale counts for one (n, params) pair."""

    n: int
    scales: np.ndarray        # the exponents i_min..i_max
    a: np.ndarray             # paths per scale
    b: np.ndarray             # witness paths per scale (clamped to [1, a_i])
    rho: float
    witness_overhead: int     # extra elements consumed per witness path
    path_elements: int        # sum of a_i * 2^i
    capacity: int             # path_elements + witness-overhead reserve

    @property
    def num_scales(self) -> int:
        return len(self.scales)

    def index_of(self, t: int) -> int:
        return int(t) - int(self.scales[0])


def _counts(n, scales, beta, gamma, c, rho, witness_overhead, clamp_warn=False):
    fs = scales.astype(np.float64)
    a = np.floor(rho * n / beta ** fs).astype(np.int64)
    a = np.maximum(a, 1)
    b_raw = np.floor(rho * n ** (1.0 - c) / gamma ** fs).astype(np.int64)
    if clamp_warn and (b_raw < 1).any():
        low = [int(s) for s, v in zip(scales, b_raw) if v < 1]
        warnings.warn(f"witness count clamped up to 1 at scales {low}", stacklevel=3)
    b = np.minimum(np.maximum(b_raw, 1), a)
    path_elements = int((a * (1 << scales.astype(np.int64))).sum())
    capacity = path_elements + witness_overhead * int(b.max())
    return a, b, path_elements, capacity


def scale_table(n: int, params: ScaleParams, witness_overhead: int = 0) -> ScaleTable:
    """Resolve rho and the per-scale counts; raise CapacityError if unfit."""
    params.validate()
    scales = np.arange(params.i_min, params.i_max + 1, dtype=np.int64)
    if params.rho == "auto":
        _, _, _, cap_floor = _counts(n, scales, params.beta, params.gamma, params.c,
                                     0.0, witness_overhead)
        if cap_floor > n:
            raise CapacityError(
                f"even one path per scale needs {cap_floor} > n = {n} elements")
        _, _, _, cap_one = _counts(n, scales, params.beta, params.gamma, params.c,
                                   1.0, witness_overhead)
        if cap_one <= n:
            rho = 1.0
        else:
            lo, hi = 0.0, 1.0
            for _ in range(64):
                mid = (lo + hi) / 2
                cap_mid = _counts(n, scales, params.beta, params.gamma, params.c,
                                  mid, witness_overhead)[3]
                if cap_mid <= n:
                    lo = mid
                else:
                    hi = mid
            rho = lo
    else:
        rho = float(params.rho)
    a, b, path_elements, capacity = _counts(
        n, scales, params.beta, params.gamma, params.c, rho, witness_overhead,
        clamp_warn=True)
    if capacity > n:
        raise CapacityError(
            f"capacity {capacity} (paths {path_elements} + overhead) exceeds n = {n} "
            f"at rho = {rho}")
    return ScaleTable(n=n, scales=scales, a=a, b=b, rho=rho,
                      witness_overhead=witness_overhead,
                      path_elements=path_elements, capacity=capacity)


def _carve_blocks(sigma: np.ndarray, table: ScaleTable):
    """Cut sigma's prefix into per-scale path blocks, reserve the witness
    pool from its suffix. Returns (blocks, pool, spare) where blocks[j] is
    an (a_j, 2^i_j) array, pool holds the witness-overhead reserve, and
    spare is everything in between."""
    blocks = []
    cursor = 0
    for j in range(table.num_scales):
        length = 1 << int(table.scales[j])
        cnt = int(table.a[j])
        blocks.append(sigma[cursor:cursor + cnt * length].reshape(cnt, length))
        cursor += cnt * length
    reserve = table.witness_overhead * int(table.b.max())
    pool = sigma[len(sigma) - reserve:] if reserve else sigma[len(sigma):]
    spare = sigma[cursor:len(sigma) - reserve]
    return blocks, pool, spare


def _close_or_fix(succ, spare, builder, filler: str):
    """Wire the unused elements: fixed points, or 2-/3-cycles on request."""
    if len(spare) == 0:
        return
    if filler == "fixed":
        succ[spare] = spare
        builder.add(KIND_ISOLATED, spare)
        return
    if filler != "cycles":
        raise ParameterError(f"unknown filler {filler!r}")
    rest = spare
    if len(rest) == 1:
        # a lone element has no cycle partner; a fixed point is unavoidable
        warnings.warn("one leftover element became a fixed point", stacklevel=3)
        succ[rest] = rest
        builder.add(KIND_ISOLATED, rest)
        return
    if len(rest) % 2:
        tri = rest[:3]
        succ[tri] = np.roll(tri, -1)
        builder.add(KIND_CYCLE, tri)
        rest = rest[3:]
    pairs = rest.reshape(-1, 2)
    succ[pairs[:, 0]] = pairs[:, 1]
    succ[pairs[:, 1]] = pairs[:, 0]
    builder.add_blocks(KIND_CYCLE, pairs.reshape(-1), 2)


def gen_collision_function(n: int, params: ScaleParams, seed,
                           filler: str = "fixed",
                           b_override: int | None = None,
                           t_override: int | None = None):
    """Multi-scale collision instance.

    Paths of 2^i elements are laid over a random permutation of [n] for
    every scale i in the window. A secret good scale t is drawn uniformly;
    b_t of its paths have their last element redirected to a uniform
    interior element, creating exactly one collision per witness path.
    All other paths close into cycles. Leftovers become fixed points, or
    2-/3-cycles under filler="cycles".
    """
    rng = _rng(seed)
    table = scale_table(n, params, witness_overhead=0)
    sigma = rng.permutation(n).astype(np.int64)
    t = int(rng.integers(params.i_min, params.i_max + 1)) if t_override is None \
        else int(t_override)
    if not params.i_min <= t <= params.i_max:
        raise ParameterError(f"t = {t} outside scale window")
    blocks, _, spare = _carve_blocks(sigma, table)

    j_good = table.index_of(t)
    length_t = 1 << t
    b_t = int(table.b[j_good]) if b_override is None else int(b_override)
    if not 0 <= b_t <= int(table.a[j_good]):
        raise ParameterError(f"witness count {b_t} outside [0, a_t]")

    succ = np.empty(n, dtype=np.int64)
    builder = MetaBuilder()
    for j in range(table.num_scales):
        block = blocks[j]
        succ[block[:, :-1]] = block[:, 1:]
        if j == j_good:
            wit, closed = block[:b_t], block[b_t:]
        else:
            wit, closed = block[:0], block
        succ[closed[:, -1]] = closed[:, 0]
        if len(wit):
            builder.add_blocks(KIND_PATH, wit.reshape(-1), block.shape[1])
        if len(closed):
            builder.add_blocks(KIND_CYCLE, closed.reshape(-1), block.shape[1])

    witness_block = blocks[j_good][:b_t]
    m = rng.integers(1, length_t - 1, size=b_t).astype(np.int64)
    rows = np.arange(b_t)
    succ[witness_block[:, -1]] = witness_block[rows, m]
    witness_locations = [
        (int(witness_block[r, m[r] - 1]), int(witness_block[r, -1]),
         int(witness_block[r, m[r]]))
        for r in range(b_t)
    ]

    _close_or_fix(succ, spare, builder, filler)

    extras = {
        "scales": table.scales.tolist(),
        "a": table.a.tolist(),
        "b": table.b.tolist(),
        "rho": table.rho,
        "t": t,
        "b_t": b_t,
        "witness_offsets": m.tolist(),
        "filler": filler,
    }
    meta = builder.freeze(good_index=t, witness_locations=witness_locations,
                          extras=extras)
    if not meta.check_partition(n):
        raise AssertionError("structure lists do not partition [n]")
    info = {
        "construction": "collision-fn",
        "seed": _seed_repr(seed),
        "parameters": {**asdict(params), "rho_resolved": table.rho,
                       "filler": filler, "n": n},
    }
    inst = FunctionInstance(n=n, succ=succ, meta=meta, info=info)
    cert = Certificate("CollisionScale", {"t": t})
    return inst, cert, meta


# claw family: same layout, undirected, witness paths keep both ends open
# and each end gains two fresh leaves (so every witness path yields two
# degree-3 claw centers)

_CLAW_OVERHEAD = 4


def _claw_edges_and_meta(n, table, blocks, pool, spare, t, b_t):
    """Assemble the undirected claw instance for good scale t.

    Edge order is fixed (path edges scale by scale, then leaf edges), so
    the CSR layout is a deterministic function of the layout draw. The
    online adversary resolves through this same builder.
    """
    builder = MetaBuilder()
    chunks = []
    for j in range(table.num_scales):
        block = blocks[j]
        e = np.empty((block.shape[0] * (block.shape[1] - 1), 2), dtype=np.int64)
        e[:, 0] = block[:, :-1].reshape(-1)
        e[:, 1] = block[:, 1:].reshape(-1)
        chunks.append(e)
        builder.add_blocks(KIND_PATH, block.reshape(-1), block.shape[1])
    j_good = table.index_of(t)
    wit = blocks[j_good][:b_t]
    leaves = pool[:_CLAW_OVERHEAD * b_t].reshape(b_t, _CLAW_OVERHEAD)
    gadget = np.empty((b_t * _CLAW_OVERHEAD, 2), dtype=np.int64)
    gadget[0::4, 0] = wit[:, 0]
    gadget[0::4, 1] = leaves[:, 0]
    gadget[1::4, 0] = wit[:, 0]
    gadget[1::4, 1] = leaves[:, 1]
    gadget[2::4, 0] = wit[:, -1]
    gadget[2::4, 1] = leaves[:, 2]
    gadget[3::4, 0] = wit[:, -1]
    gadget[3::4, 1] = leaves[:, 3]
    chunks.append(gadget)
    edges = np.concatenate(chunks) if chunks else np.zeros((0, 2), dtype=np.int64)
    inst = graph_from_edges(n, edges)

    if b_t:
        builder.add_blocks(KIND_GADGET, leaves.reshape(-1), _CLAW_OVERHEAD)
    idle = np.concatenate([spare, pool[_CLAW_OVERHEAD * b_t:]])
    if len(idle):
        builder.add(KIND_ISOLATED, idle)
    witness_locations = []
    for r in range(b_t):
        witness_locations.append((int(wit[r, 0]), int(wit[r, 1]),
                                  int(leaves[r, 0]), int(leaves[r, 1])))
        witness_locations.append((int(wit[r, -1]), int(wit[r, -2]),
                                  int(leaves[r, 2]), int(leaves[r, 3])))
    extras = {
        "scales": table.scales.tolist(),
        "a": table.a.tolist(),
        "b": table.b.tolist(),
        "rho": table.rho,
        "t": t,
        "b_t": b_t,
        "pool_size": len(pool),
    }
    meta = builder.freeze(good_index=t, witness_locations=witness_locations,
                          extras=extras)
    inst.meta = meta
    if not meta.check_partition(n):
        raise AssertionError("structure lists do not partition [n]")
    return inst, meta


def gen_claw_graph(n: int, params: ScaleParams, seed,
                   b_override: int | None = None,
                   t_override: int | None = None):
    """Undirected multi-scale instance whose good scale carries 2*b_t claws."""
    rng = _rng(seed)
    table = scale_table(n, params, witness_overhead=_CLAW_OVERHEAD)
    sigma = rng.permutation(n).astype(np.int64)
    t = int(rng.integers(params.i_min, params.i_max + 1)) if t_override is None \
        else int(t_override)
    if not params.i_min <= t <= params.i_max:
        raise ParameterError(f"t = {t} outside scale window")
    blocks, pool, spare = _carve_blocks(sigma, table)
    b_t = int(table.b[table.index_of(t)]) if b_override is None else int(b_override)
    if not 0 <= b_t <= int(table.a[table.index_of(t)]):
        raise ParameterError(f"witness count {b_t} outside [0, a_t]")
    inst, meta = _claw_edges_and_meta(n, table, blocks, pool, spare, t, b_t)
    inst.info = {
        "construction": "claw-graph",
        "seed": _seed_repr(seed),
        "parameters": {**asdict(params), "rho_resolved": table.rho, "n": n},
    }
    cert = Certificate("ClawScale", {"t": t})
    return inst, cert, meta


# ---------------------------------------------------------------------------
# prime-spaced fixed-point construction


@dataclass(frozen=True)
class FixedPointParams:
    """Knobs for the prime-spaced cycle construction."""

    alpha: float = 0.125
    cycle_len: int | None = None      # default: floor(n^(3/4))
    feeder_len: int | None = None     # default: floor(n^(1/4))
    prime_lo: float | None = None     # default: n^(1/4) / 4
    prime_hi: float | None = None     # default: n^(1/4) / 2
    T: int = 1
    widen: bool = False


def primes_in_range(lo: float, hi: float) -> list[int]:
    """All primes p with lo < p < hi, ascending (exclusive bounds)."""
    if hi <= 2:
        return []
    limit = int(math.ceil(hi))
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return [int(p) for p in np.flatnonzero(sieve) if lo < p < hi]


def gen_fixedpoint_function(n: int, params: FixedPointParams,
                            h_spec: str = "fixed-point", seed=None):
    """Cycles with prime-spaced feeder entries, one planted fixed point
    per host cycle.

    Each of N cycles gets a unique prime p_i; its length is the nearest
    multiple of p_i to the target length, so consecutive feeder entries
    are spaced exactly p_i apart all the way around. T entry elements on
    distinct cycles are cut into fixed points. Filler is always cycles
    (a stray fixed point would be a spurious witness).
    """
    if h_spec != "fixed-point":
        raise ParameterError(f"unsupported H-spec {h_spec!r}; only 'fixed-point' "
                             "is wired up")
    if params.T < 1:
        raise ParameterError("T must be >= 1")
    rng = _rng(seed)
    q4 = n ** 0.25
    cycle_len = params.cycle_len if params.cycle_len is not None else int(n ** 0.75)
    feeder_len = params.feeder_len if params.feeder_len is not None else max(1, int(q4))
    lo = params.prime_lo if params.prime_lo is not None else q4 / 4
    hi = params.prime_hi if params.prime_hi is not None else q4 / 2
    n_raw = int(params.alpha * q4 / math.log2(n))
    N = max(1, n_raw)
    if params.T > N:
        raise ParameterError(f"T = {params.T} exceeds cycle count N = {N}")

    primes = primes_in_range(lo, hi)
    hi_used = hi
    if len(primes) < N:
        if not params.widen:
            raise PrimeShortageError(
                f"window ({lo:g}, {hi:g}) holds {len(primes)} primes, need {N}; "
                "enable widening to grow the window")
        while len(primes) < N:
            hi_used *= 1.25
            primes = primes_in_range(lo, hi_used)
    ps = primes[:N]

    lens = [p * max(1, round(cycle_len / p)) for p in ps]
    feeders_per = [length // p for length, p in zip(lens, ps)]
    used = sum(length + f * feeder_len for length, f in zip(lens, feeders_per))
    if used > n:
        raise CapacityError(f"cycles and feeders need {used} > n = {n} elements")

    sigma = rng.permutation(n).astype(np.int64)
    succ = np.empty(n, dtype=np.int64)
    builder = MetaBuilder()
    cursor = 0
    cycles = []
    for p, length, f_cnt in zip(ps, lens, feeders_per):
        cyc = sigma[cursor:cursor + length]
        cursor += length
        succ[cyc] = np.roll(cyc, -1)
        builder.add(KIND_CYCLE, cyc)
        cycles.append(cyc)
        feed = sigma[cursor:cursor + f_cnt * feeder_len].reshape(f_cnt, feeder_len)
        cursor += f_cnt * feeder_len
        if feeder_len > 1:
            succ[feed[:, :-1]] = feed[:, 1:]
        succ[feed[:, -1]] = cyc[np.arange(f_cnt) * p]
        if f_cnt:
            builder.add_blocks(KIND_FEEDER, feed.reshape(-1), feeder_len)

    # plant T fixed points on distinct cycles, entry element uniform per cycle
    order = list(range(N))
    witness_locations = []
    hosts = []
    for _ in range(params.T):
        weights = np.array([len(cycles[i]) for i in order], dtype=np.float64)
        pick = order[int(rng.choice(len(order), p=weights / weights.sum()))]
        order.remove(pick)
        hosts.append(pick)
        x = int(cycles[pick][rng.integers(len(cycles[pick]))])
        succ[x] = x
        witness_locations.append((x,))

    # leftover elements: plain cycles near the target length, never fixed points
    rest = sigma[cursor:]
    while len(rest):
        take = len(rest) if len(rest) < 2 * cycle_len else cycle_len
        if len(rest) - take == 1:
            take += 1  # avoid stranding a single element
        chunk = rest[:take]
        rest = rest[take:]
        if len(chunk) == 1:
            warnings.warn("one leftover element became a filler fixed point",
                          stacklevel=2)
            succ[chunk] = chunk
            builder.add(KIND_ISOLATED, chunk)
            continue
        succ[chunk] = np.roll(chunk, -1)
        builder.add(KIND_CYCLE, chunk)

    extras = {
        "primes": ps,
        "cycle_lens": lens,
        "feeders_per_cycle": feeders_per,
        "feeder_len": feeder_len,
        "N": N,
        "T": params.T,
        "hosts": hosts,
        "window": [lo, hi_used],
        "widened": hi_used != hi,
    }
    meta = builder.freeze(good_index=None, witness_locations=witness_locations,
                          extras=extras)
    if not meta.check_partition(n):
        raise AssertionError("structure lists do not partition [n]")
    info = {
        "construction": "fixedpoint-fn",
        "seed": _seed_repr(seed),
        "parameters": {**asdict(params), "h_spec": h_spec, "n": n},
    }
    inst = FunctionInstance(n=n, succ=succ, meta=meta, info=info)
    cert = Certificate("FixedPointPrimes", {"primes": sorted(ps[h] for h in hosts)})
    return inst, cert, meta


# ---------------------------------------------------------------------------
# star forest with a planted leaf clique


def _clique_size(h_spec) -> int:
    if isinstance(h_spec, (int, np.integer)):
        return int(h_spec)
    if h_spec == "triangle":
        return 3
    if h_spec in ("none", None):
        return 0
    if isinstance(h_spec, str) and h_spec.startswith("clique:"):
        return int(h_spec.split(":", 1)[1])
    raise ParameterError(f"unsupported H-spec {h_spec!r}")


def star_degree_set(n: int) -> list[int]:
    """sqrt(n) pairwise-distinct center degrees summing to exactly n - sqrt(n).

    A run of consecutive integers is centered on the mean, then the
    largest r degrees are bumped by one to repair the sum (distinctness
    is preserved since the run steps by one).
    """
    s = isqrt(n)
    total = n - s
    base = (total - s * (s - 1) // 2) // s
    degrees = [base + j for j in range(s)]
    r = total - sum(degrees)
    if not 0 <= r < s:
        raise ParameterError(f"degree repair out of range (n = {n})")
    for j in range(s - r, s):
        degrees[j] += 1
    lo, hi = math.sqrt(n) / 4, 3 * math.sqrt(n) / 2
    if degrees[0] < lo or degrees[-1] > hi:
        raise ParameterError(
            f"degree set [{degrees[0]}, {degrees[-1]}] escapes window "
            f"[{lo:g}, {hi:g}] at n = {n}")
    return degrees


def gen_star_graph(n: int, h_spec, seed):
    """Disjoint stars with pairwise-distinct center degrees; |H| leaves of
    distinct stars form the one planted clique."""
    h = _clique_size(h_spec)
    if h == 1:
        raise ParameterError("clique size must be 0 (absent) or >= 2")
    degrees = star_degree_set(n)
    s = len(degrees)
    if h > s:
        raise ParameterError(f"clique size {h} exceeds star count {s}")
    if h and degrees[0] <= h:
        raise ParameterError("clique degree would collide with center degrees")
    rng = _rng(seed)
    sigma = rng.permutation(n).astype(np.int64)
    centers = sigma[:s]
    leaves = sigma[s:]

    deg_arr = np.asarray(degrees, dtype=np.int64)
    stops = np.zeros(s + 1, dtype=np.int64)
    np.cumsum(deg_arr, out=stops[1:])
    star_edges = np.empty((n - s, 2), dtype=np.int64)
    star_edges[:, 0] = np.repeat(centers, deg_arr)
    star_edges[:, 1] = leaves

    builder = MetaBuilder()
    for j in range(s):
        builder.add(KIND_STAR,
                    np.concatenate([centers[j:j + 1], leaves[stops[j]:stops[j + 1]]]))

    witness_locations = []
    host_stars = []
    chunks = [star_edges]
    if h:
        host_stars = sorted(int(x) for x in rng.choice(s, size=h, replace=False))
        picks = [int(leaves[stops[j] + rng.integers(deg_arr[j])]) for j in host_stars]
        cl = np.array([[picks[x], picks[y]]
                       for x in range(h) for y in range(x + 1, h)], dtype=np.int64)
        chunks.append(cl)
        witness_locations.append(tuple(picks))
    inst = graph_from_edges(n, np.concatenate(chunks))

    extras = {
        "degrees": degrees,
        "h": h,
        "host_stars": host_stars,
    }
    meta = builder.freeze(good_index=None, witness_locations=witness_locations,
                          extras=extras)
    inst.meta = meta
    if not meta.check_partition(n):
        raise AssertionError("structure lists do not partition [n]")
    inst.info = {
        "construction": "star-graph",
        "seed": _seed_repr(seed),
        "parameters": {"h": h, "n": n},
    }
    cert = Certificate("StarDegrees",
                       {"degrees": sorted(degrees[j] for j in host_stars)})
    return inst, cert, meta


# ---------------------------------------------------------------------------
# backbone path with hanging paths and one planted k-star


def gen_starpath_graph(n: int, k: int, seed):
    """Backbone v_1..v_s with pendant v_0, one hanging path below each v_i,
    and k fresh pendants on one uniformly random structural vertex."""
    if k < 4:
        raise ParameterError("k must be >= 4 (k = 3 belongs to the claw family)")
    s = isqrt(n)
    hang_total = n - s - 1 - k
    if s < 3 or hang_total < s:
        raise ParameterError(f"n = {n} too small for the backbone layout")
    q, r = divmod(hang_total, s)

    rng = _rng(seed)
    sigma = rng.permutation(n).astype(np.int64)
    v0 = int(sigma[0])
    backbone = sigma[1:s + 1]
    pendants = sigma[n - k:]
    structural = n - k  # everything except the fresh pendants

    sizes = [q + 1 if j < r else q for j in range(s)]
    builder = MetaBuilder()
    builder.add(KIND_BACKBONE, np.concatenate([[v0], backbone]))
    chunks = [np.array([[v0, backbone[0]]], dtype=np.int64)]
    spine = np.empty((s - 1, 2), dtype=np.int64)
    spine[:, 0] = backbone[:-1]
    spine[:, 1] = backbone[1:]
    chunks.append(spine)

    hang = []
    cursor = s + 1
    for j in range(s):
        path = sigma[cursor:cursor + sizes[j]]
        cursor += sizes[j]
        hang.append(path)
        e = np.empty((sizes[j], 2), dtype=np.int64)
        e[0] = (backbone[j], path[0])
        e[1:, 0] = path[:-1]
        e[1:, 1] = path[1:]
        chunks.append(e)
        builder.add(KIND_PATH, path)
    builder.add(KIND_GADGET, pendants)

    u = int(sigma[rng.integers(structural)])
    star = np.empty((k, 2), dtype=np.int64)
    star[:, 0] = u
    star[:, 1] = pendants
    chunks.append(star)
    inst = graph_from_edges(n, np.concatenate(chunks))

    # certificate: index of the hanging path holding u (a backbone vertex
    # v_j or the pendant v_0 maps to its own column)
    pos = int(np.flatnonzero(sigma == u)[0])
    if pos == 0:
        k_star = 1
    elif pos <= s:
        k_star = pos
    else:
        k_star = 1 + int(np.searchsorted(np.cumsum(sizes), pos - s, side="left"))

    extras = {"k": k, "k_star": k_star, "sizes": sizes, "s": s}
    meta = builder.freeze(good_index=k_star,
                          witness_locations=[(u, *map(int, pendants))],
                          extras=extras)
    inst.meta = meta
    if not meta.check_partition(n):
        raise AssertionError("structure lists do not partition [n]")
    inst.info = {
        "construction": "starpath-graph",
        "seed": _seed_repr(seed),
        "parameters": {"k": k, "n": n},
    }
    cert = Certificate("BackboneIndex", {"index": k_star, "k": k})
    return inst, cert, meta
