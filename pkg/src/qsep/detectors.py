"""Search algorithms over counted oracles.

Every routine here sees the instance only through the oracle's query
surface, so the reported query counts are the true cost. A Found
outcome always carries a witness in the oracle's visible labeling.

Collision-walk bookkeeping: a predecessor map stores, per element, the
edge over which it was first reached (None for a walk start). Arriving
at a recorded element over a different edge certifies a collision;
arriving over the same edge, or at a recorded start, just ends the walk
(cycle closure). Certificate walkers and the multi-scale walker share
that map across walks; the per-attempt battery gives every attempt a
fresh map, which is what the exact enumerator models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from qsep.oracle import Certificate, Witness

FOUND = "Found"
EXHAUSTED = "Exhausted"
BUDGET_EXCEEDED = "BudgetExceeded"


@dataclass
class SearchOutcome:
    status: str
    witness: Witness | None
    queries: int
    attempts: int
    details: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.status == FOUND

    def to_jsonable(self) -> dict:
        return {
            "status": self.status,
            "witness": None if self.witness is None else
                {"kind": self.witness.kind, "vertices": list(self.witness.vertices)},
            "queries": self.queries,
            "attempts": self.attempts,
            "details": self.details,
        }


class _Budget:
    """Combined view of a caller budget and the oracle's own hard budget."""

    def __init__(self, oracle, budget):
        self._oracle = oracle
        self._limit = budget
        self._start = oracle.count

    def spent(self) -> int:
        return self._oracle.count - self._start

    def remaining(self):
        vals = []
        if self._limit is not None:
            vals.append(self._limit - self.spent())
        hard = self._oracle.remaining()
        if hard is not None:
            vals.append(hard)
        return min(vals) if vals else None

    def allows(self, k: int) -> bool:
        rem = self.remaining()
        return rem is None or rem >= k


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


# ---------------------------------------------------------------------------
# collision walkers


def _arrival(pred: dict, u: int, y: int):
    """Process one step u -> y against a predecessor map.

    Returns ("found", witness_prev) | ("stop", None) | ("go", None).
    """
    prev = pred.get(y, _MISSING)
    if prev is _MISSING:
        pred[y] = u
        return _GO
    if prev is None or prev == u:
        return _STOP
    return ("found", prev)


_MISSING = object()
_GO = ("go", None)
_STOP = ("stop", None)


def collision_attempt_battery(oracle, t: int, attempts: int, seed=None,
                              batch: int = 512, budget=None) -> dict:
    """Run independent single walk attempts at scale t, each with a fresh
    predecessor map, in lockstep batches. Per-attempt statistics match the
    exact all-starts enumeration."""
    rng = _rng(seed)
    bud = _Budget(oracle, budget)
    n = oracle.n
    cap = 1 << int(t)
    starts = rng.integers(0, n, size=attempts)

    lanes = min(batch, attempts)
    front = [0] * lanes
    steps = [0] * lanes
    preds: list[dict] = [dict() for _ in range(lanes)]
    next_attempt = 0
    live: list[int] = []

    def spawn(lane: int) -> bool:
        nonlocal next_attempt
        if next_attempt >= attempts:
            return False
        s = int(starts[next_attempt])
        next_attempt += 1
        front[lane] = s
        steps[lane] = 0
        preds[lane] = {s: None}
        return True

    for lane in range(lanes):
        if spawn(lane):
            live.append(lane)

    successes = 0
    finished = 0
    sample_witnesses: list[Witness] = []
    truncated = False
    while live:
        rem = bud.remaining()
        if rem is not None and rem < len(live):
            live = live[:rem]
            truncated = True
            if not live:
                break
        ys = oracle.query_function_many([front[k] for k in live]).tolist()
        nxt_live = []
        for lane, y in zip(live, ys):
            u = front[lane]
            steps[lane] += 1
            kind, prev = _arrival(preds[lane], u, y)
            if kind == "go" and steps[lane] < cap:
                front[lane] = y
                nxt_live.append(lane)
                continue
            if kind == "found":
                successes += 1
                if len(sample_witnesses) < 32:
                    sample_witnesses.append(Witness("collision", (u, prev, y)))
            finished += 1
            if spawn(lane):
                nxt_live.append(lane)
        live = nxt_live

    return {
        "attempts": finished,
        "successes": successes,
        "queries": bud.spent(),
        "success_rate": successes / finished if finished else 0.0,
        "witnesses": sample_witnesses,
        "truncated": truncated,
    }


def cert_collision_search(oracle, cert: Certificate, seed=None, budget=None,
                          batch: int = 16, max_attempts=None) -> SearchOutcome:
    """Walk forward up to 2^t steps per attempt at the certified scale t,
    sharing the predecessor map across attempts."""
    t = int(cert.payload["t"])
    rng = _rng(seed)
    bud = _Budget(oracle, budget)
    n = oracle.n
    cap = 1 << t

    pred: dict = {}
    front = [0] * batch
    steps = [0] * batch
    attempts = 0
    live: list[int] = []

    def spawn(lane: int) -> bool:
        nonlocal attempts
        if max_attempts is not None and attempts >= max_attempts:
            return False
        s = int(rng.integers(n))
        attempts += 1
        front[lane] = s
        steps[lane] = 0
        pred.setdefault(s, None)
        return True

    for lane in range(batch):
        if spawn(lane):
            live.append(lane)

    while live:
        rem = bud.remaining()
        if rem is not None and rem < len(live):
            live = live[:rem]
            if not live:
                return SearchOutcome(BUDGET_EXCEEDED, None, bud.spent(), attempts,
                                     {"t": t})
        ys = oracle.query_function_many([front[k] for k in live]).tolist()
        nxt_live = []
        for lane, y in zip(live, ys):
            u = front[lane]
            steps[lane] += 1
            kind, prev = _arrival(pred, u, y)
            if kind == "found":
                w = Witness("collision", (u, prev, y))
                return SearchOutcome(FOUND, w, bud.spent(), attempts, {"t": t})
            if kind == "go" and steps[lane] < cap:
                front[lane] = y
                nxt_live.append(lane)
            elif spawn(lane):
                nxt_live.append(lane)
        live = nxt_live
    return SearchOutcome(EXHAUSTED, None, bud.spent(), attempts, {"t": t})


def multiscale_collision_search(oracle, i_min: int, i_max: int, seed=None,
                                budget=None, max_attempts=None) -> SearchOutcome:
    """One walk per scale in strict round-robin, lowest scale first, one
    step per walk per round. A walk restarts at a fresh uniform element
    when it reaches 2^i steps or a terminal arrival. All walks share the
    predecessor map, so cross-walk arrivals certify collisions too."""
    rng = _rng(seed)
    bud = _Budget(oracle, budget)
    n = oracle.n
    scales = list(range(int(i_min), int(i_max) + 1))
    caps = [1 << i for i in scales]
    s = len(scales)

    pred: dict = {}
    front = [0] * s
    steps = [0] * s
    attempts = 0

    def spawn(lane: int) -> bool:
        nonlocal attempts
        if max_attempts is not None and attempts >= max_attempts:
            return False
        x = int(rng.integers(n))
        attempts += 1
        front[lane] = x
        steps[lane] = 0
        pred.setdefault(x, None)
        return True

    lanes = [lane for lane in range(s) if spawn(lane)]
    while lanes:
        rem = bud.remaining()
        if rem is not None and rem < len(lanes):
            lanes = lanes[:rem]
            if not lanes:
                return SearchOutcome(BUDGET_EXCEEDED, None, bud.spent(), attempts,
                                     {"scales": scales})
        ys = oracle.query_function_many([front[k] for k in lanes]).tolist()
        nxt = []
        for lane, y in zip(lanes, ys):
            u = front[lane]
            steps[lane] += 1
            kind, prev = _arrival(pred, u, y)
            if kind == "found":
                w = Witness("collision", (u, prev, y))
                return SearchOutcome(FOUND, w, bud.spent(), attempts,
                                     {"scales": scales})
            if kind == "go" and steps[lane] < caps[lane]:
                front[lane] = y
                nxt.append(lane)
            elif spawn(lane):
                nxt.append(lane)
        lanes = nxt
    return SearchOutcome(EXHAUSTED, None, bud.spent(), attempts, {"scales": scales})


# ---------------------------------------------------------------------------
# claw walker


def cert_claw_search(oracle, cert: Certificate, seed=None, budget=None,
                     max_attempts=None) -> SearchOutcome:
    """Chain-walk up to 2^t steps from uniform starts until a degree-3
    vertex appears, then report it with three of its neighbors."""
    t = int(cert.payload["t"])
    rng = _rng(seed)
    bud = _Budget(oracle, budget)
    n = oracle.n
    cap = 1 << t
    attempts = 0

    def out(status, w=None):
        return SearchOutcome(status, w, bud.spent(), attempts, {"t": t})

    while max_attempts is None or attempts < max_attempts:
        if not bud.allows(1):
            return out(BUDGET_EXCEEDED)
        attempts += 1
        v = int(rng.integers(n))
        d = oracle.query_degree(v)
        if d >= 3:
            if not bud.allows(3):
                return out(BUDGET_EXCEEDED)
            leaves = tuple(oracle.query_neighbor(v, j) for j in range(3))
            return out(FOUND, Witness("claw", (v, *leaves)))
        if d == 0:
            continue
        prev = None
        cur = v
        for _ in range(cap):
            # pick the forward neighbor
            if not bud.allows(2):
                return out(BUDGET_EXCEEDED)
            if d == 1:
                nxt = oracle.query_neighbor(cur, 0)
                if nxt == prev:
                    break  # dead end
            else:
                if prev is None:
                    nxt = oracle.query_neighbor(cur, int(rng.integers(2)))
                else:
                    nxt = oracle.query_neighbor(cur, 0)
                    if nxt == prev:
                        if not bud.allows(1):
                            return out(BUDGET_EXCEEDED)
                        nxt = oracle.query_neighbor(cur, 1)
            if not bud.allows(1):
                return out(BUDGET_EXCEEDED)
            prev, cur = cur, nxt
            d = oracle.query_degree(cur)
            if d >= 3:
                if not bud.allows(3):
                    return out(BUDGET_EXCEEDED)
                leaves = tuple(oracle.query_neighbor(cur, j) for j in range(3))
                return out(FOUND, Witness("claw", (cur, *leaves)))
            if d == 1:
                # path end; one more probe confirms the dead end next loop
                continue
    return out(EXHAUSTED)


# ---------------------------------------------------------------------------
# fixed-point search via prime-spaced intersections


def _fixed_walk_batch(oracle, starts, length, bud):
    """Advance all walks `length` steps in lockstep, recording trajectories.
    Returns (traj, fp, truncated): traj is (lanes, length+1) with -1 padding,
    fp is a fixed-point witness element or None."""
    lanes = len(starts)
    traj = np.full((lanes, length + 1), -1, dtype=np.int64)
    traj[:, 0] = starts
    active = np.arange(lanes)
    for r in range(length):
        rem = bud.remaining()
        if rem is not None and rem < len(active):
            active = active[:rem]
            if len(active) == 0:
                return traj, None, True
        fronts = traj[active, r]
        ys = oracle.query_function_many(fronts)
        traj[active, r + 1] = ys
        hit = np.flatnonzero(ys == fronts)
        if len(hit):
            return traj, int(fronts[hit[0]]), False
    return traj, None, False


def cert_fixedpoint_search(oracle, cert: Certificate, seed=None, C: float = 2.0,
                           budget=None, max_iterations: int = 64) -> SearchOutcome:
    """Short walks, long walks, then follow long walks whose intersection
    pattern with short walks is spaced by a certified prime.

    An intersection is the first element of a short walk's trajectory met
    along the long walk; three or more intersections whose pairwise long-
    walk distances share a certified prime divisor trigger following the
    long walk until it closes a cycle (mismatch) or sits on a fixed point.
    """
    primes = [int(p) for p in cert.payload["primes"]]
    rng = _rng(seed)
    bud = _Budget(oracle, budget)
    n = oracle.n
    rt4 = max(1, math.ceil(n ** 0.25))
    rt2 = max(1, math.ceil(math.sqrt(n)))
    k_short, len_short = math.ceil(C * rt2), math.ceil(C * rt4)
    k_long, len_long = math.ceil(C * rt4), math.ceil(C * rt2)

    pos = np.full(n, -1, dtype=np.int64)
    iterations = 0
    stats = {"triggers": 0, "false_follows": 0, "follow_queries": 0,
             "false_follow_queries": 0, "found_via": None}

    def out(status, w=None):
        return SearchOutcome(status, w, bud.spent(), iterations,
                             {"C": C, "primes": primes, **stats})

    while iterations < max_iterations:
        iterations += 1
        short_traj, fp, trunc = _fixed_walk_batch(
            oracle, rng.integers(0, n, size=k_short), len_short, bud)
        if fp is not None:
            stats["found_via"] = "walk"
            return out(FOUND, Witness("fixed-point", (fp,)))
        if trunc:
            return out(BUDGET_EXCEEDED)
        long_traj, fp, trunc = _fixed_walk_batch(
            oracle, rng.integers(0, n, size=k_long), len_long, bud)
        if fp is not None:
            stats["found_via"] = "walk"
            return out(FOUND, Witness("fixed-point", (fp,)))
        if trunc:
            return out(BUDGET_EXCEEDED)

        safe = np.where(short_traj >= 0, short_traj, 0)
        for row in long_traj:
            row = row[row >= 0]
            if len(row) == 0:
                continue
            # first-occurrence positions along this long walk
            pos[row[::-1]] = np.arange(len(row) - 1, -1, -1)
            hits = np.where(short_traj >= 0, pos[safe], -1)
            masked = np.where(hits >= 0, hits, np.iinfo(np.int64).max)
            first = masked.min(axis=1)
            js = first[first < np.iinfo(np.int64).max]
            pos[row] = -1
            if len(js) < 4:
                continue
            # prime signature: several short walks first-met in one residue
            # class, and that class dominates (feeder entries sit p apart,
            # so host-cycle intersections concentrate; a plain cycle
            # spreads them uniformly)
            need = max(4, math.ceil(2 * len(js) / 3))
            if not any(np.bincount(js % p).max() >= need
                       for p in primes if p > 1):
                continue
            # follow this long walk to termination
            stats["triggers"] += 1
            seen = set(row.tolist())
            cur = int(row[-1])
            spent = 0
            while True:
                if not bud.allows(1):
                    return out(BUDGET_EXCEEDED)
                y = oracle.query_function(cur)
                spent += 1
                stats["follow_queries"] += 1
                if y == cur:
                    stats["found_via"] = "follow"
                    return out(FOUND, Witness("fixed-point", (cur,)))
                if y in seen:
                    # closed a cycle without a fixed point: mismatch
                    stats["false_follows"] += 1
                    stats["false_follow_queries"] += spent
                    break
                seen.add(y)
                cur = y
    return out(EXHAUSTED)


# ---------------------------------------------------------------------------
# star search guided by the certified degree set


def cert_star_search(oracle, cert: Certificate, seed=None, budget=None,
                     sample_factor: float = 2.0) -> SearchOutcome:
    """Sample for leaves, hop to their centers, keep centers whose degree
    is certified, then enumerate their leaves and assemble the planted
    clique among leaves of matching degree."""
    degrees = sorted(int(d) for d in cert.payload["degrees"])
    h = len(degrees)
    rng = _rng(seed)
    bud = _Budget(oracle, budget)
    n = oracle.n
    q = math.ceil(sample_factor * math.sqrt(n) * math.log2(max(n, 2)))

    def clipped(batch):
        rem = bud.remaining()
        if rem is not None and len(batch) > rem:
            return batch[:rem], True
        return batch, False

    samples = rng.integers(0, n, size=q)
    samples, trunc = clipped(samples)
    attempts = len(samples)

    def out(status, w=None):
        return SearchOutcome(status, w, bud.spent(), attempts,
                             {"certified-degrees": degrees})

    if trunc and len(samples) == 0:
        return out(BUDGET_EXCEEDED)
    ds = oracle.query_degree_many(samples)
    leaves = samples[ds == 1]
    if len(leaves) == 0:
        return out(EXHAUSTED)
    leaves, trunc = clipped(leaves)
    if len(leaves) == 0:
        return out(BUDGET_EXCEEDED)
    centers = np.unique(oracle.query_neighbor_many(leaves, np.zeros(len(leaves),
                                                                    dtype=np.int64)))
    centers, trunc = clipped(centers)
    if len(centers) == 0:
        return out(BUDGET_EXCEEDED)
    cds = oracle.query_degree_many(centers)
    good = centers[np.isin(cds, degrees)]
    good_deg = cds[np.isin(cds, degrees)]
    if h == 0 or len(good) == 0:
        return out(EXHAUSTED)

    flagged = []
    for g, dg in zip(good.tolist(), good_deg.tolist()):
        if not bud.allows(int(dg)):
            return out(BUDGET_EXCEEDED)
        nbrs = oracle.query_neighbor_many(np.full(dg, g, dtype=np.int64),
                                          np.arange(dg, dtype=np.int64))
        if not bud.allows(len(nbrs)):
            return out(BUDGET_EXCEEDED)
        nds = oracle.query_degree_many(nbrs)
        flagged.extend(int(x) for x in nbrs[nds == h])
    if len(flagged) < h:
        return out(EXHAUSTED)

    adj = {}
    for x in flagged:
        if not bud.allows(h):
            return out(BUDGET_EXCEEDED)
        adj[x] = set(oracle.query_neighbor_many(
            np.full(h, x, dtype=np.int64), np.arange(h, dtype=np.int64)).tolist())
    for group in combinations(sorted(flagged), h):
        if all(b in adj[a] for a, b in combinations(group, 2)):
            return out(FOUND, Witness("clique", tuple(group)))
    return out(EXHAUSTED)


# ---------------------------------------------------------------------------
# backbone-indexed k-star search


def cert_starpath_search(oracle, cert: Certificate, seed=None,
                         budget=None) -> SearchOutcome:
    """Navigate to the backbone, count to the certified column, and sweep
    its hanging path for the planted high-degree center."""
    k = int(cert.payload["k"])
    k_star = int(cert.payload["index"])
    rng = _rng(seed)
    bud = _Budget(oracle, budget)
    n = oracle.n
    state = {"attempts": 0}

    def out(status, w=None):
        return SearchOutcome(status, w, bud.spent(), state["attempts"],
                             {"index": k_star, "k": k})

    class _Stop(Exception):
        pass

    def deg(v):
        if not bud.allows(1):
            raise _Stop
        return oracle.query_degree(v)

    def nbr(v, i):
        if not bud.allows(1):
            raise _Stop
        return oracle.query_neighbor(v, i)

    def neighbors(v, d):
        return [nbr(v, j) for j in range(d)]

    def star_at(v, d):
        """Assemble the k-star witness at a suspected center."""
        pend = []
        for w in neighbors(v, d):
            if deg(w) == 1:
                pend.append(w)
            if len(pend) == k:
                return Witness("k-star", (v, *pend))
        return None

    def check(v, d):
        if d >= k + 1:
            w = star_at(v, d)
            if w is not None:
                raise _FoundStar(w)

    class _FoundStar(Exception):
        def __init__(self, w):
            self.w = w

    def walk_to_junction(v):
        """Follow the chain until a degree>=3 vertex; turn around at ends."""
        d = deg(v)
        check(v, d)
        if d == 0:
            return None
        prev = None
        turned = False
        cur = v
        while True:
            if d >= 3:
                return cur
            if d == 1:
                if prev is not None:
                    if turned:
                        return None  # isolated path, no junction
                    turned = True
                    prev = None  # restart the walk from this endpoint
                nxt = nbr(cur, 0)
            else:
                nxt = nbr(cur, 0)
                if nxt == prev:
                    nxt = nbr(cur, 1)
            prev, cur = cur, nxt
            d = deg(cur)
            check(cur, d)

    def chain_step(cur, prev):
        """Next backbone vertex (degree 3, not prev); None at a chain end.
        Also reports the non-chain neighbors for side checks."""
        d = deg(cur)
        check(cur, d)
        nbrs = neighbors(cur, d)
        options = []
        for w in nbrs:
            if w == prev:
                continue
            dw = deg(w)
            check(w, dw)
            if dw >= 3:
                options.append(w)
        return nbrs, options

    def sweep_down(top, origin):
        """Descend a path from `top` away from `origin`, checking degrees."""
        prev, cur = origin, top
        while True:
            d = deg(cur)
            check(cur, d)
            if d == 1:
                return
            if d == 2:
                nxt = nbr(cur, 0)
                if nxt == prev:
                    nxt = nbr(cur, 1)
                prev, cur = cur, nxt
            else:
                return  # back on the backbone; stop

    try:
        state["attempts"] = 1
        junction = None
        for _ in range(8):
            junction = walk_to_junction(int(rng.integers(n)))
            if junction is not None:
                break
            state["attempts"] += 1
        if junction is None:
            return out(EXHAUSTED)

        # walk to a chain end, preferring the end with a degree-1 neighbor (v_1)
        prev = None
        cur = junction
        visited = 0
        while visited <= 2 * math.isqrt(n) + 4:
            visited += 1
            nbrs, options = chain_step(cur, prev)
            if not options:
                break
            prev, cur = cur, options[0]
        # cur is a chain end: v_1 iff some neighbor has degree 1
        d = deg(cur)
        end_nbrs = neighbors(cur, d)
        has_pendant = False
        for w in end_nbrs:
            dw = deg(w)
            check(w, dw)
            if dw == 1:
                has_pendant = True
        if not has_pendant:
            # we are at v_{s-1}; the true v_1 lies at the other chain end
            prev_dir = None
            back = cur
            while True:
                nbrs, options = chain_step(back, prev_dir)
                nxt = [w for w in options if w != prev_dir]
                if not nxt:
                    break
                prev_dir, back = back, nxt[0]
            cur = back
        # count along the chain from v_1 = cur to column k_star
        index = 1
        prev = None
        while index < k_star:
            nbrs, options = chain_step(cur, prev)
            forward = [w for w in options if w != prev]
            if not forward:
                # chain ends at v_{s-1}; columns s-1 and s sit past here
                two = [w for w in nbrs if w != prev]
                for w in two:
                    sweep_down(w, cur)
                return out(EXHAUSTED)
            prev, cur = cur, forward[0]
            index += 1
        # at v_{k*}: sweep every non-backbone direction downward
        d = deg(cur)
        for w in neighbors(cur, d):
            if w == prev:
                continue
            dw = deg(w)
            check(w, dw)
            if dw < 3:
                sweep_down(w, cur)
        return out(EXHAUSTED)
    except _FoundStar as hit:
        return out(FOUND, hit.w)
    except _Stop:
        return out(BUDGET_EXCEEDED)


# ---------------------------------------------------------------------------
# certificate-free baselines


def path_k_search(oracle, k: int, seed=None, budget=None) -> SearchOutcome:
    """Walk k steps from each start (drawn without replacement); Found when
    the k+1 visited elements are distinct."""
    rng = _rng(seed)
    bud = _Budget(oracle, budget)
    n = oracle.n
    attempts = 0
    for x in rng.permutation(n).tolist():
        attempts += 1
        visited = [x]
        seen = {x}
        for _ in range(k):
            if not bud.allows(1):
                return SearchOutcome(BUDGET_EXCEEDED, None, bud.spent(), attempts, {})
            y = oracle.query_function(visited[-1])
            if y in seen:
                break
            visited.append(y)
            seen.add(y)
        if len(visited) == k + 1:
            w = Witness("path", tuple(visited))
            return SearchOutcome(FOUND, w, bud.spent(), attempts, {})
    return SearchOutcome(EXHAUSTED, None, bud.spent(), attempts, {})


def edge_wedge_search(oracle, target: str, seed=None, budget=None,
                      max_attempts=None) -> SearchOutcome:
    """Uniform sampling with replacement; local degree/neighbor probes."""
    if target not in ("edge", "wedge"):
        raise ValueError(f"target must be 'edge' or 'wedge', got {target!r}")
    rng = _rng(seed)
    bud = _Budget(oracle, budget)
    n = oracle.n
    attempts = 0
    while max_attempts is None or attempts < max_attempts:
        if not bud.allows(1):
            return SearchOutcome(BUDGET_EXCEEDED, None, bud.spent(), attempts, {})
        attempts += 1
        v = int(rng.integers(n))
        d = oracle.query_degree(v)
        if target == "edge":
            if d >= 1:
                if not bud.allows(1):
                    return SearchOutcome(BUDGET_EXCEEDED, None, bud.spent(),
                                         attempts, {})
                w = oracle.query_neighbor(v, 0)
                return SearchOutcome(FOUND, Witness("edge", (v, w)), bud.spent(),
                                     attempts, {})
            continue
        if d >= 2:
            if not bud.allows(2):
                return SearchOutcome(BUDGET_EXCEEDED, None, bud.spent(), attempts, {})
            a = oracle.query_neighbor(v, 0)
            b = oracle.query_neighbor(v, 1)
            return SearchOutcome(FOUND, Witness("wedge", (v, a, b)), bud.spent(),
                                 attempts, {})
        if d == 1:
            if not bud.allows(2):
                return SearchOutcome(BUDGET_EXCEEDED, None, bud.spent(), attempts, {})
            w = oracle.query_neighbor(v, 0)
            dw = oracle.query_degree(w)
            if dw >= 2:
                if not bud.allows(2):
                    return SearchOutcome(BUDGET_EXCEEDED, None, bud.spent(),
                                         attempts, {})
                a = oracle.query_neighbor(w, 0)
                b = oracle.query_neighbor(w, 1)
                return SearchOutcome(FOUND, Witness("wedge", (w, a, b)), bud.spent(),
                                     attempts, {})
    return SearchOutcome(EXHAUSTED, None, bud.spent(), attempts, {})


def uniform_probe_baseline(oracle, target: str, seed=None, budget=None,
                           k: int | None = None, chunk: int = 256) -> SearchOutcome:
    """Sample elements without replacement; verify the target locally."""
    rng = _rng(seed)
    bud = _Budget(oracle, budget)
    n = oracle.n
    order = rng.permutation(n)
    attempts = 0

    def out(status, w=None):
        return SearchOutcome(status, w, bud.spent(), attempts, {"target": target})

    if target == "fixed-point":
        for lo in range(0, n, chunk):
            xs = order[lo:lo + chunk]
            rem = bud.remaining()
            if rem is not None and rem < len(xs):
                xs = xs[:rem]
                if len(xs) == 0:
                    return out(BUDGET_EXCEEDED)
            ys = oracle.query_function_many(xs)
            attempts += len(xs)
            hits = np.flatnonzero(ys == xs)
            if len(hits):
                x = int(xs[hits[0]])
                attempts -= len(xs) - int(hits[0]) - 1  # samples after the hit
                return out(FOUND, Witness("fixed-point", (x,)))
        return out(EXHAUSTED)

    if target == "k-star":
        if k is None:
            raise ValueError("k-star target needs k")
        for lo in range(0, n, chunk):
            xs = order[lo:lo + chunk]
            rem = bud.remaining()
            if rem is not None and rem < len(xs):
                xs = xs[:rem]
                if len(xs) == 0:
                    return out(BUDGET_EXCEEDED)
            ds = oracle.query_degree_many(xs)
            attempts += len(xs)
            for j in np.flatnonzero(ds >= k):
                v = int(xs[j])
                d = int(ds[j])
                if not bud.allows(2 * d):
                    return out(BUDGET_EXCEEDED)
                nbrs = oracle.query_neighbor_many(np.full(d, v, dtype=np.int64),
                                                  np.arange(d, dtype=np.int64))
                nds = oracle.query_degree_many(nbrs)
                pend = nbrs[nds == 1]
                if len(pend) >= k:
                    w = Witness("k-star", (v, *(int(x) for x in pend[:k])))
                    return out(FOUND, w)
        return out(EXHAUSTED)

    if target in ("edge", "wedge"):
        need = 1 if target == "edge" else 2
        for x in order.tolist():
            if not bud.allows(1):
                return out(BUDGET_EXCEEDED)
            attempts += 1
            d = oracle.query_degree(x)
            if d >= need:
                if not bud.allows(need):
                    return out(BUDGET_EXCEEDED)
                ns = [oracle.query_neighbor(x, j) for j in range(need)]
                kind = "edge" if target == "edge" else "wedge"
                return out(FOUND, Witness(kind, (x, *ns)))
        return out(EXHAUSTED)

    raise ValueError(f"unsupported target {target!r}")


# ---------------------------------------------------------------------------
# ground-truth search (no oracle, no counting)


def brute_force_find(instance, target: str, k: int | None = None,
                     h: int | None = None) -> list[Witness]:
    """Exhaustive witness enumeration straight off the raw instance."""
    n = instance.n
    if target == "collision":
        succ = instance.succ
        order = np.argsort(succ, kind="stable")
        vals = succ[order]
        out = []
        start = 0
        for stop in range(1, n + 1):
            if stop == n or vals[stop] != vals[start]:
                group = order[start:stop]
                for i in range(len(group)):
                    for j in range(i + 1, len(group)):
                        out.append(Witness("collision",
                                           (int(group[i]), int(group[j]),
                                            int(vals[start]))))
                start = stop
        return out
    if target == "fixed-point":
        succ = instance.succ
        return [Witness("fixed-point", (int(x),))
                for x in np.flatnonzero(succ == np.arange(n))]
    if target == "path":
        if k is None:
            raise ValueError("path target needs k")
        if n > 1 << 13:
            raise ValueError("instance too large for exhaustive path search")
        succ = instance.succ
        out = []
        for x in range(n):
            visited = [x]
            seen = {x}
            for _ in range(k):
                y = int(succ[visited[-1]])
                if y in seen:
                    break
                visited.append(y)
                seen.add(y)
            if len(visited) == k + 1:
                out.append(Witness("path", tuple(visited)))
        return out
    if target in ("claw", "k-star"):
        kk = 3 if target == "claw" else k
        if kk is None:
            raise ValueError("k-star target needs k")
        degs = instance.degrees
        out = []
        for v in np.flatnonzero(degs >= kk):
            leaves = tuple(int(x) for x in instance.neighbors(int(v))[:kk])
            out.append(Witness(target, (int(v), *leaves)))
        return out
    if target == "clique":
        if h is None:
            raise ValueError("clique target needs h")
        if n > 1 << 13:
            raise ValueError("instance too large for exhaustive clique search")
        degs = instance.degrees
        cands = [int(v) for v in np.flatnonzero(degs >= h - 1)]
        adj = {v: set(instance.neighbors(v).tolist()) for v in cands}
        out = []
        for group in combinations(cands, h):
            if all(b in adj[a] for a, b in combinations(group, 2)):
                out.append(Witness("clique", group))
        return out
    if target == "edge":
        out = []
        for v in range(n):
            for w in instance.neighbors(v):
                if v < int(w):
                    out.append(Witness("edge", (v, int(w))))
        return out
    if target == "wedge":
        out = []
        for v in range(n):
            nbrs = instance.neighbors(v).tolist()
            for a, b in combinations(sorted(nbrs), 2):
                out.append(Witness("wedge", (v, int(a), int(b))))
        return out
    raise ValueError(f"unsupported target {target!r}")


# ---------------------------------------------------------------------------
# certificate corruption for robustness tests


def _next_prime(p: int) -> int:
    q = p + 1
    while True:
        if q > 2 and all(q % d for d in range(2, math.isqrt(q) + 1)):
            return q
        q += 1


def corrupt_certificate(cert: Certificate, seed=None, scale_window=None,
                        index_range=None) -> Certificate:
    """Produce a well-formed certificate that is wrong for its instance."""
    rng = _rng(seed)
    kind, payload = cert.kind, dict(cert.payload)
    if kind in ("CollisionScale", "ClawScale"):
        t = int(payload["t"])
        if scale_window is not None:
            lo, hi = scale_window
            choices = [i for i in range(int(lo), int(hi) + 1) if i != t]
            if not choices:
                raise ValueError("single-scale window has no wrong value")
            payload["t"] = int(choices[int(rng.integers(len(choices)))])
        else:
            payload["t"] = t + 1
        return Certificate(kind, payload)
    if kind == "FixedPointPrimes":
        shifted = []
        for p in payload["primes"]:
            q = _next_prime(int(p))
            while q in payload["primes"] or q in shifted:
                q = _next_prime(q)
            shifted.append(q)
        return Certificate(kind, {"primes": shifted})
    if kind == "StarDegrees":
        payload["degrees"] = sorted({int(d) + 1 for d in payload["degrees"]})
        return Certificate(kind, payload)
    if kind == "BackboneIndex":
        idx = int(payload["index"])
        hi = index_range if index_range is not None else idx + 1
        choices = [j for j in range(1, int(hi) + 1) if j != idx]
        payload["index"] = int(choices[int(rng.integers(len(choices)))])
        return Certificate(kind, payload)
    raise ValueError(f"unsupported certificate kind {kind!r}")
