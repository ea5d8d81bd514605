"""Constructive schedule synthesis.

decide_reachability answers yes/no; this module produces the actual move
schedule for the yes answers, without searching the exponential state
space except as a last-resort fallback.  The toolbox, bottom up:

  * double_move_trick -- alternating moves at two anchor vertices of one
    edge; each round restores the anchors and adds +2 to every other
    vertex of the edge, so (p+1)/2 or (p-1)/2 rounds add exactly +1 or
    -1.  Works whenever the anchor values are a "good pair" (not both 0,
    not both p-1).
  * single_edge_schedule -- full synthesis on one edge.  A minimum-norm
    solution of the move-counting system prescribes how often each
    vertex must move; the descent executes those moves directly while
    legal and otherwise spends trick rounds to emulate one forced move
    at a charge-less vertex.  Four emulation gadgets plus two terminal
    batches cover every blocked shape; the dispatch is exhaustive, which
    the test suite checks by exhausting small instances.
  * propagate_path -- carries one unit of charge along a chain of
    edges; the backward variant then re-solves each edge of the chain so
    that everything except the endpoints is restored.
  * synthesize_schedule -- on multi-edge hypergraphs, picks a bridging
    edge whose removal splits the instance into components the solver
    can recurse on, borrows charge across that edge for components that
    start empty, and rebalances the edge with trick rounds.  When no
    bridging edge qualifies, a descent on the counted moves runs as far
    as it can and a bounded breadth-first search bridges the remainder
    (SynthesisIncomplete if that search exceeds its cap).

Everything returned here is replay-verified before it escapes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .decision import ReachSystem, build_system
from .dynamics import (
    DEFAULT_MAX_STATES,
    EMPTY_SCHEDULE,
    Move,
    Schedule,
    State,
    apply_move,
    extract_schedule,
    has_predecessor,
    orbit_bfs,
    replay_schedule,
    validate_state,
)
from .errors import (
    EnumerationTooLarge,
    HypothesisViolated,
    InternalSynthesisFailure,
    NonzeroRequired,
    NoPath,
    NotGood,
    PairNotGood,
    StateSpaceTooLarge,
    SynthesisIncomplete,
    UnreachableTarget,
    Unsolvable,
)
from .hypergraph import (
    EdgePath,
    Hypergraph,
    connected_components,
    is_good,
    shortest_edge_path,
)
from .zp_algebra import (
    DEFAULT_ENUMERATION_CAP,
    ZpMatrixSystem,
    gaussian_solve,
    system_norm,
    validate_modulus,
)

FORWARD = "forward"
BACKWARD = "backward"


def is_good_pair(p: int, a: int, b: int) -> bool:
    """Can two vertices holding values (a, b) sustain alternating rounds?

    The excluded corners: (0, 0) has no legal first move, and (p-1, p-1)
    has no legal second move in either order.
    """
    validate_modulus(p)
    for x in (a, b):
        if not 0 <= x < p:
            raise ValueError(f"value {x} is not a residue in [0, {p})")
    return (a, b) != (0, 0) and (a, b) != (p - 1, p - 1)


def double_move_trick(
    G: Hypergraph, p: int, w: State, edge: int, a: int, b: int, direction: int
) -> Schedule:
    """Alternating rounds at anchors a, b of an edge.

    Net effect: +direction (mod p) at every vertex of the edge except the
    anchors, which come back to their starting values.  direction is +1
    or -1; the anchor values must form a good pair (PairNotGood).
    """
    validate_modulus(p)
    w = validate_state(p, G.n, w)
    if not 0 <= edge < G.m:
        raise ValueError(f"edge {edge} outside [0, {G.m})")
    members = G.edges[edge]
    if a == b or a not in members or b not in members:
        raise ValueError(f"anchors ({a}, {b}) must be two distinct vertices of edge {edge}")
    if direction not in (1, -1):
        raise ValueError(f"direction must be +1 or -1, got {direction}")
    if not is_good_pair(p, w[a], w[b]):
        raise PairNotGood(
            f"anchor values ({w[a]}, {w[b]}) at vertices ({a}, {b}) admit no alternating rounds"
        )
    rounds = (p + 1) // 2 if direction == 1 else (p - 1) // 2
    # Within a round the first mover needs charge and hands one unit to
    # the second; this order works for every good pair.
    first, second = (a, b) if w[a] != 0 and w[b] != p - 1 else (b, a)
    schedule = Schedule((Move(first, edge), Move(second, edge)) * rounds)
    final = replay_schedule(G, p, w, schedule)
    expected = list(w)
    for u in members:
        if u != a and u != b:
            expected[u] = (expected[u] + direction) % p
    if final != tuple(expected):
        raise InternalSynthesisFailure("alternating rounds missed their advertised net effect")
    return schedule


@dataclass
class _Builder:
    """Simulate-as-you-emit schedule accumulator.

    emit applies the move to the tracked state before recording it, so
    an illegal move in a construction surfaces at the exact step that
    produced it instead of at final replay.
    """

    G: Hypergraph
    p: int
    state: State
    moves: list[Move] = field(default_factory=list)

    def emit(self, move: Move) -> None:
        self.state = apply_move(self.G, self.p, self.state, move)
        self.moves.append(move)

    def emit_all(self, moves) -> None:
        for move in moves:
            self.emit(move)

    def trick(self, edge: int, a: int, b: int, direction: int) -> None:
        self.emit_all(double_move_trick(self.G, self.p, self.state, edge, a, b, direction))


def single_edge_schedule(G: Hypergraph, p: int, w1: State, w2: State) -> Schedule:
    """Witness schedule w1 -> w2 on a hypergraph with exactly one edge.

    The edge needs at least 3 vertices (the tricks need a third vertex
    to park charge on).  Raises UnreachableTarget when the source is
    inert or the target has no predecessor, Unsolvable when the
    move-counting system rules the pair out.
    """
    validate_modulus(p)
    if G.m != 1:
        raise ValueError(f"expected exactly one edge, got {G.m}")
    e = G.edges[0]
    if len(e) < 3:
        raise ValueError("need an edge with at least 3 vertices")
    w1 = validate_state(p, G.n, w1)
    w2 = validate_state(p, G.n, w2)
    if w1 == w2:
        return EMPTY_SCHEDULE
    eset = set(e)
    mismatched = [v for v in range(G.n) if v not in eset and w1[v] != w2[v]]
    if mismatched:
        raise Unsolvable(
            f"states differ at vertex {mismatched[0]}, which the edge cannot touch"
        )
    if e != tuple(range(G.n)):
        # Work on the canonical restriction and map the moves back.
        sub = Hypergraph(len(e), (tuple(range(len(e))),))
        inner = single_edge_schedule(
            sub, p, tuple(w1[v] for v in e), tuple(w2[v] for v in e)
        )
        return Schedule(tuple(Move(e[m.vertex], 0) for m in inner.moves))
    if all(x == 0 for x in w1):
        raise UnreachableTarget("the all-zero state admits no moves")
    if not has_predecessor(G, p, w2):
        raise UnreachableTarget("the target state has no predecessor")
    return _descend_single_edge(G, p, w1, w2)


def _descend_single_edge(G: Hypergraph, p: int, w1: State, w2: State) -> Schedule:
    """Core single-edge descent; G is canonical (one edge over all vertices)."""
    k = G.n
    reach = build_system(G, p, w1, w2)
    space = gaussian_solve(reach.system)
    if not space.solvable:
        raise Unsolvable("the move-counting system has no solution")
    # Kernel dimension is at most 1 on a single edge, so this is cheap.
    _, solution = system_norm(space)
    counts = list(solution)  # variables are (edge 0, vertex v) in vertex order
    b = _Builder(G, p, w1)
    while True:
        total = sum(counts)
        if total == 0:
            break
        live = [v for v in range(k) if counts[v] > 0 and b.state[v] != 0]
        if live:
            chosen = None
            for v in live:
                nxt = apply_move(G, p, b.state, Move(v, 0))
                # Landing on the inert all-zero state is only allowed for
                # the final counted move (then it IS the target).
                if any(nxt) or total == 1:
                    chosen = v
                    break
            if chosen is not None:
                b.emit(Move(chosen, 0))
                counts[chosen] -= 1
                continue
            # Every available move kills the state.  That forces the
            # shape [1 @ v, p-1 elsewhere] with all remaining count at v:
            # spend trick rounds instead of moving v directly.
            v = live[0]
            x = counts[v]
            if b.state != tuple(1 if u == v else p - 1 for u in range(k)) or x < 2:
                raise InternalSynthesisFailure("descent misread a blocked state")
            j = 0 if v != 0 else 1
            for _ in range(2 * x):
                b.trick(0, v, j, +1)
            for _ in range(p - x):
                b.emit(Move(j, 0))
            counts[v] = 0
            continue
        # Some count remains but every counted vertex is empty: emulate a
        # single move at the lowest such vertex with trick rounds.
        i0 = next(v for v in range(k) if counts[v] > 0)
        others = [v for v in range(k) if v != i0]
        high = [j for j in others if b.state[j] == p - 1]
        if high:
            # Drain a full-valued vertex, then give two rounds back.
            j = high[0]
            for _ in range(p - 1):
                b.emit(Move(j, 0))
            for _ in range(2):
                b.trick(0, i0, j, +1)
        else:
            flexible = [j for j in others if b.state[j] not in (0, p - 2)]
            if flexible:
                j = flexible[0]
                u = next(v for v in range(k) if v != i0 and v != j)
                r = 0 if b.state[u] != 0 else 1
                for _ in range(r):
                    b.trick(0, i0, j, +1)
                for _ in range(p - 2):
                    b.trick(0, j, u, +1)
                b.emit(Move(u, 0))
                for _ in range(2 - r):
                    b.trick(0, i0, j, +1)
            else:
                # Everything except i0 sits at 0 or p-2.
                zeros = [z for z in others if b.state[z] == 0]
                mids = [j for j in others if b.state[j] == p - 2]
                if zeros and mids:
                    z, j = zeros[0], mids[0]
                    b.trick(0, z, j, -1)
                    b.emit(Move(i0, 0))
                    b.trick(0, z, j, +1)
                elif mids:
                    # Exactly [0 @ i0, p-2 elsewhere]; finish in one batch.
                    x = counts[i0]
                    if total != x or x < 2:
                        raise InternalSynthesisFailure("descent misread a blocked state")
                    j, j2 = others[0], others[1]
                    if x >= 3:
                        b.trick(0, j, j2, -1)
                        for _ in range(x):
                            b.emit(Move(i0, 0))
                        b.trick(0, j, j2, +1)
                    elif p == 3:
                        b.trick(0, i0, j, -1)
                        b.emit(Move(j, 0))
                        b.trick(0, i0, j, -1)
                    else:
                        # x == 2, p >= 5: solve the value-mirrored problem,
                        # whose descent terminates directly, and replay it
                        # backwards.  A move is exactly as legal on the
                        # mirrored successor as on the original state, so
                        # the reversed move list is legal here.
                        target = list(b.state)
                        target[i0] = (target[i0] - x) % p
                        for u in others:
                            target[u] = (target[u] + x) % p
                        mirrored = single_edge_schedule(
                            G,
                            p,
                            tuple((p - 1 - y) % p for y in target),
                            tuple((p - 1 - y) % p for y in b.state),
                        )
                        b.emit_all(reversed(mirrored.moves))
                    counts[i0] = 0
                    continue
                else:
                    raise InternalSynthesisFailure("descent reached the inert zero state")
        counts[i0] -= 1
    if b.state != w2:
        raise InternalSynthesisFailure("single-edge descent finished off target")
    return Schedule(tuple(b.moves))


def _on_edge(G: Hypergraph, p: int, current: State, edge: int, target) -> Schedule:
    """Schedule moving only on one edge, from current to target values.

    target is anything indexable by original vertex id (full state tuple
    or a dict covering the edge's vertices).
    """
    e = G.edges[edge]
    sub = Hypergraph(len(e), (tuple(range(len(e))),))
    inner = single_edge_schedule(
        sub, p, tuple(current[v] for v in e), tuple(target[v] for v in e)
    )
    return Schedule(tuple(Move(e[m.vertex], edge) for m in inner.moves))


def undo_on_edge(G: Hypergraph, p: int, w1: State, w2: State, edge: int) -> Schedule:
    """Schedule from w2 back to w1 moving only on the given edge.

    The states must agree everywhere off the edge (ValueError).  Raises
    NonzeroRequired when w2 carries no charge on the edge, and the usual
    single-edge errors when the restriction is not reachable.
    """
    validate_modulus(p)
    if not 0 <= edge < G.m:
        raise ValueError(f"edge {edge} outside [0, {G.m})")
    w1 = validate_state(p, G.n, w1)
    w2 = validate_state(p, G.n, w2)
    members = set(G.edges[edge])
    mismatched = [v for v in range(G.n) if v not in members and w1[v] != w2[v]]
    if mismatched:
        raise ValueError(
            f"states differ at vertex {mismatched[0]}, which edge {edge} cannot touch"
        )
    if w1 == w2:
        return EMPTY_SCHEDULE
    if all(w2[v] == 0 for v in G.edges[edge]):
        raise NonzeroRequired("the edge carries no charge in the state to undo from")
    return _on_edge(G, p, w2, edge, w1)


def _validate_path(G: Hypergraph, path: EdgePath) -> None:
    edges = path.edges
    if not edges:
        raise ValueError("empty edge path")
    for ei in edges:
        if not 0 <= ei < G.m:
            raise ValueError(f"edge {ei} outside [0, {G.m})")
    if len(set(edges)) != len(edges):
        raise ValueError("edge path repeats an edge")
    if len(path.connectors) != len(edges) - 1:
        raise ValueError(
            f"{len(edges)} edges need {len(edges) - 1} connectors, got {len(path.connectors)}"
        )
    sets = [set(G.edges[ei]) for ei in edges]
    if path.start_vertex not in sets[0]:
        raise ValueError(f"start vertex {path.start_vertex} is not on edge {edges[0]}")
    for i, c in enumerate(path.connectors):
        shared = sets[i] & sets[i + 1]
        if c not in shared:
            raise ValueError(f"connector {c} is not shared by edges {edges[i]} and {edges[i + 1]}")
        if shared != {c}:
            raise HypothesisViolated("consecutive path edges overlap beyond their connector")
    for i in range(len(edges)):
        for j in range(i + 2, len(edges)):
            if sets[i] & sets[j]:
                raise HypothesisViolated("non-consecutive path edges intersect")
    if len(edges) >= 2 and path.start_vertex in sets[1]:
        raise HypothesisViolated("the start vertex reappears as the first connector")


def propagate_path(
    G: Hypergraph,
    p: int,
    w: State,
    path: EdgePath,
    direction: str,
    end_vertex: int | None = None,
) -> Schedule:
    """Carry charge along a chain of edges.

    Precondition: the start vertex holds charge and every other vertex
    on the path's edges is zero (HypothesisViolated otherwise).

    Forward: one move per edge, entering each edge at the previous
    connector.  Net effect: -1 at the start vertex, +1 at every
    non-connector vertex of the path, connectors restored to zero.

    Backward (end_vertex required, on the last edge, different from the
    vertex that entered it): after the forward sweep, re-solves each
    edge from the last to the first so the net effect is just -1 at the
    start vertex and +1 at end_vertex, everything else restored.
    """
    validate_modulus(p)
    w = validate_state(p, G.n, w)
    _validate_path(G, path)
    if direction not in (FORWARD, BACKWARD):
        raise ValueError(f"direction must be {FORWARD!r} or {BACKWARD!r}, got {direction!r}")
    edges = path.edges
    k = len(edges)
    v1 = path.start_vertex
    union = {u for ei in edges for u in G.edges[ei]}
    if w[v1] == 0:
        raise HypothesisViolated("the start vertex carries no charge")
    dirty = sorted(u for u in union if u != v1 and w[u] != 0)
    if dirty:
        raise HypothesisViolated(f"path vertex {dirty[0]} must be zero before propagation")
    movers = [v1] + list(path.connectors)
    forward = [Move(movers[i], edges[i]) for i in range(k)]
    if direction == FORWARD:
        if end_vertex is not None:
            raise ValueError("end_vertex only applies to backward propagation")
        b = _Builder(G, p, w)
        b.emit_all(forward)
        expected = list(w)
        expected[v1] = (expected[v1] - 1) % p
        connectors = set(path.connectors)
        for u in union:
            if u != v1 and u not in connectors:
                expected[u] = (expected[u] + 1) % p
        if b.state != tuple(expected):
            raise InternalSynthesisFailure("forward propagation missed its net effect")
        return Schedule(tuple(b.moves))
    entry = movers[-1]
    if end_vertex is None:
        raise ValueError("backward propagation needs end_vertex")
    if end_vertex not in G.edges[edges[-1]] or end_vertex == entry:
        raise ValueError(
            f"end_vertex must lie on edge {edges[-1]} and differ from vertex {entry}"
        )
    b = _Builder(G, p, w)
    b.emit_all(forward)
    for i in range(k - 1, -1, -1):
        target = {u: 0 for u in G.edges[edges[i]]}
        if i == k - 1:
            target[end_vertex] = 1
        if i == 0:
            target[v1] = (w[v1] - 1) % p
        b.emit_all(_on_edge(G, p, b.state, edges[i], target))
    expected = list(w)
    expected[v1] = (expected[v1] - 1) % p
    expected[end_vertex] = (expected[end_vertex] + 1) % p
    if b.state != tuple(expected):
        raise InternalSynthesisFailure("backward propagation missed its net effect")
    return Schedule(tuple(b.moves))


class _GuardFailure(Exception):
    """Internal: one decomposition attempt does not apply; try the next."""


def synthesize_schedule(
    G: Hypergraph,
    p: int,
    w1: State,
    w2: State,
    max_states: int = DEFAULT_MAX_STATES,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> Schedule:
    """Synthesize a replayable schedule from w1 to w2 on a well-shaped hypergraph.

    Raises UnreachableTarget / Unsolvable when no schedule exists,
    NotGood off the well-shaped family, and SynthesisIncomplete when the
    constructive machinery gave up and the bounded fallback search blew
    its state budget.  The returned schedule is replay-verified.
    """
    validate_modulus(p)
    report = is_good(G)
    if not report.good:
        kinds = sorted({v.kind for v in report.violations})
        raise NotGood(f"schedule synthesis needs a well-shaped hypergraph ({', '.join(kinds)})")
    w1 = validate_state(p, G.n, w1)
    w2 = validate_state(p, G.n, w2)
    schedule = _synthesize(G, p, w1, w2, max_states, cap)
    if replay_schedule(G, p, w1, schedule) != w2:
        raise InternalSynthesisFailure("synthesized schedule fails replay")
    return schedule


def _synthesize(
    G: Hypergraph, p: int, w1: State, w2: State, max_states: int, cap: int
) -> Schedule:
    """Synthesis core; assumes a well-shaped G and validated states."""
    if w1 == w2:
        return EMPTY_SCHEDULE
    if all(x == 0 for x in w1):
        raise UnreachableTarget("the all-zero state admits no moves")
    if not has_predecessor(G, p, w2):
        raise UnreachableTarget("the target state has no predecessor")
    reach = build_system(G, p, w1, w2)
    space = gaussian_solve(reach.system)
    if not space.solvable:
        raise Unsolvable("the move-counting system has no solution")
    if G.m == 1:
        return single_edge_schedule(G, p, w1, w2)
    for l in range(G.m):
        try:
            return _attempt_split(G, p, w1, w2, l, max_states, cap)
        except _GuardFailure:
            continue
    return _bridge_descent(G, p, w1, w2, reach, space, max_states, cap)


def _component_env(
    G: Hypergraph, removed_edge: int, comp: tuple[int, ...]
) -> tuple[Hypergraph, list[int]]:
    """Component of G minus one edge as its own hypergraph.

    Returns (sub, emap) where comp[i] is the original id of sub-vertex i
    and emap[j] the original index of sub-edge j.  Every surviving edge
    lies entirely inside one component, so membership of its first
    vertex decides.
    """
    vmap = {v: i for i, v in enumerate(comp)}
    sub_edges = []
    emap = []
    for ei, e in enumerate(G.edges):
        if ei == removed_edge or e[0] not in vmap:
            continue
        sub_edges.append(tuple(vmap[v] for v in e))
        emap.append(ei)
    return Hypergraph(len(comp), tuple(sub_edges)), emap


def _recurse_into(
    b: _Builder,
    G: Hypergraph,
    p: int,
    removed_edge: int,
    comp: tuple[int, ...],
    source,
    target,
    max_states: int,
    cap: int,
) -> None:
    """Recursively schedule one component and emit the mapped-back moves.

    A sub-instance that turns out unreachable or over budget aborts the
    whole decomposition attempt (_GuardFailure), not the synthesis.
    """
    s = tuple(source[v] for v in comp)
    t = tuple(target[v] for v in comp)
    if s == t:
        return
    sub, emap = _component_env(G, removed_edge, comp)
    try:
        inner = _synthesize(sub, p, s, t, max_states, cap)
    except (Unsolvable, UnreachableTarget, SynthesisIncomplete) as err:
        raise _GuardFailure(str(err)) from None
    b.emit_all(Move(comp[m.vertex], emap[m.edge]) for m in inner.moves)


def _anchors_ok(p: int, va: int, vb: int, t: int) -> bool:
    """Will anchor values (va, vb) support trick rounds both before and
    after the bridging edge's refill shifts them down by t?"""
    return is_good_pair(p, va, vb) and is_good_pair(p, (va - t) % p, (vb - t) % p)


def _attempt_split(
    G: Hypergraph,
    p: int,
    w1: State,
    w2: State,
    l: int,
    max_states: int,
    cap: int,
    allow_transfer: bool = True,
) -> Schedule:
    """One decomposition attempt across bridging edge l.

    Keeps no partial work on failure: raises _GuardFailure and the
    caller tries the next edge.
    """
    reach = build_system(G, p, w1, w2)
    keep = [j for j, (ei, _) in enumerate(reach.variables) if ei != l]
    dropped = ZpMatrixSystem(
        tuple(tuple(row[j] for j in keep) for row in reach.system.rows),
        reach.system.rhs,
        p,
        len(keep),
    )
    if not gaussian_solve(dropped).solvable:
        raise _GuardFailure(f"the difference needs moves on edge {l}")
    comps = connected_components(G, removed_edge=l)
    comp_of = {v: ci for ci, comp in enumerate(comps) for v in comp}
    kind = {}
    for ci, comp in enumerate(comps):
        if all(w1[v] == w2[v] for v in comp):
            kind[ci] = "settled"
        elif all(w1[v] == 0 for v in comp):
            kind[ci] = "seedless"
        else:
            kind[ci] = "live"
    b = _Builder(G, p, w1)
    if "seedless" not in kind.values():
        # Every component either already matches the target or carries
        # its own charge; no moves on l are needed at all.
        for ci, comp in enumerate(comps):
            if kind[ci] == "live":
                _recurse_into(b, G, p, l, comp, w1, w2, max_states, cap)
        if b.state != w2:
            raise InternalSynthesisFailure("component recursion finished off target")
        return Schedule(tuple(b.moves))
    e_l = G.edges[l]
    z1 = next((z for z in e_l if w1[z] != 0), None)
    if z1 is None:
        # No charge anywhere on l: walk one unit over from the nearest
        # charged vertex, then retry this same edge once.
        if not allow_transfer:
            raise _GuardFailure("no charge reaches the bridging edge")
        prefix, shifted = _transfer_into_edge(G, p, w1, l)
        inner = _attempt_split(G, p, shifted, w2, l, max_states, cap, allow_transfer=False)
        return Schedule(tuple(prefix.moves) + tuple(inner.moves))
    t = w1[z1]
    in_l = set(e_l)
    # Stage 1: drain z1, handing t units of charge to every other vertex
    # of l -- in particular into each seedless component.
    for _ in range(t):
        b.emit(Move(z1, l))
    # Stage 2: solve each seedless component while it holds the borrowed
    # charge, aiming t above the target on its l-vertices (the refill
    # below takes those t units back).
    for ci, comp in enumerate(comps):
        if kind[ci] != "seedless":
            continue
        target = {v: (w2[v] + t) % p if v in in_l else w2[v] for v in comp}
        _recurse_into(b, G, p, l, comp, b.state, target, max_states, cap)
    # Values now sitting on l's other vertices; two of them must anchor
    # the trick rounds around the refill.
    vals = {z: b.state[z] for z in e_l if z != z1}
    rest = [z for z in e_l if z != z1]
    pair = None
    for i in range(len(rest)):
        for j in range(i + 1, len(rest)):
            if _anchors_ok(p, vals[rest[i]], vals[rest[j]], t):
                pair = (rest[i], rest[j])
                break
        if pair:
            break
    cleanup_edge = None
    if pair is None:
        pair, cleanup_edge = _nudge_for_anchors(
            b, G, p, w2, l, z1, t, comp_of, kind, vals
        )
    z2, z3 = pair
    # Stage 3: refill z1.  A -1 round gives z1 the charge to move,
    # p - t moves at z1 pull the borrowed units back (z1 passes from
    # p-1 down to t-1), and a +1 round restores the anchors; every
    # other vertex of l nets exactly -t across the three steps.
    b.trick(l, z2, z3, -1)
    for _ in range(p - t):
        b.emit(Move(z1, l))
    b.trick(l, z2, z3, +1)
    # Undo the anchor nudge when it landed in a component nothing will
    # touch again.
    if cleanup_edge is not None:
        patched = list(b.state)
        for v in G.edges[cleanup_edge]:
            patched[v] = w2[v]
        b.emit_all(undo_on_edge(G, p, tuple(patched), b.state, cleanup_edge))
    # Stage 4: components that had their own charge all along.
    for ci, comp in enumerate(comps):
        if kind[ci] == "live":
            _recurse_into(b, G, p, l, comp, b.state, w2, max_states, cap)
    if b.state != w2:
        raise InternalSynthesisFailure("draining left a residue off the target")
    return Schedule(tuple(b.moves))


def _nudge_for_anchors(
    b: _Builder,
    G: Hypergraph,
    p: int,
    w2: State,
    l: int,
    z1: int,
    t: int,
    comp_of: dict[int, int],
    kind: dict[int, str],
    vals: dict[int, int],
) -> tuple[tuple[int, int], int | None]:
    """All anchor candidates on l share one unusable value; nudge one.

    Emits a single legal move on a neighboring edge that changes exactly
    one l-vertex's value by 1, making a usable (unequal) anchor pair.
    Returns that pair and, when the nudge landed in a component the
    synthesis will not revisit, the edge to undo explicitly at the end
    (a live component instead absorbs the nudge into its own recursion).
    """
    e_l = G.edges[l]
    in_l = set(e_l)
    for ep in range(G.m):
        if ep == l:
            continue
        shared = [v for v in G.edges[ep] if v in in_l]
        if len(shared) != 1 or shared[0] == z1:
            continue
        z = shared[0]
        partner = next(y for y in e_l if y != z1 and y != z)
        ci = comp_of[z]
        for u in G.edges[ep]:
            if b.state[u] == 0:
                continue
            nxt = apply_move(G, p, b.state, Move(u, ep))
            if not _anchors_ok(p, nxt[z], vals[partner], t):
                continue
            if kind[ci] != "live":
                # Nothing will revisit this component: the nudge must be
                # undoable on ep alone once the refill has run its course.
                end_values = [
                    (w2[v] + nxt[v] - b.state[v]) % p for v in G.edges[ep]
                ]
                if not any(end_values):
                    continue
                if all(w2[v] == p - 1 for v in G.edges[ep]):
                    continue
                cleanup = ep
            else:
                cleanup = None
            b.emit(Move(u, ep))
            vals[z] = nxt[z]
            return (min(z, partner), max(z, partner)), cleanup
    raise _GuardFailure("no legal nudge frees an anchor pair on the bridging edge")


def _transfer_into_edge(
    G: Hypergraph, p: int, w1: State, l: int
) -> tuple[Schedule, State]:
    """Move one unit of charge from the nearest charged vertex onto edge l.

    Uses backward path propagation over the shortest edge path, which
    requires the corridor to be otherwise empty (_GuardFailure when some
    intermediate vertex already holds charge).
    """
    best = None
    for v in range(G.n):
        if w1[v] == 0:
            continue
        path = shortest_edge_path(G, v, l)
        key = (len(path.edges), v)
        if best is None or key < best[0]:
            best = (key, v, path)
    if best is None:
        raise _GuardFailure("no vertex carries charge")
    _, vstar, path = best
    if len(path.edges) < 2:
        raise InternalSynthesisFailure("transfer requested although the edge holds charge")
    corridor = EdgePath(vstar, path.edges[:-1], path.connectors[:-1])
    entry = path.connectors[-1]
    union = {u for ei in corridor.edges for u in G.edges[ei]}
    if any(w1[u] != 0 for u in union if u != vstar):
        raise _GuardFailure("the corridor toward the bridging edge is not clear")
    try:
        schedule = propagate_path(G, p, w1, corridor, BACKWARD, end_vertex=entry)
    except (HypothesisViolated, NoPath, Unsolvable, UnreachableTarget) as err:
        raise _GuardFailure(str(err)) from None
    return schedule, replay_schedule(G, p, w1, schedule)


def _unblock_counted(b: _Builder, reach: ReachSystem, counts: list[int]) -> bool:
    """Execute one blocked counted move via a cancelling trick sandwich.

    A counted move whose mover currently holds zero can still be
    realized exactly: an ascending trick on an edge containing the
    mover raises it to one, the move fires, and the descending twin
    trick cancels the rest.  The two tricks together are p paired moves
    on the same anchors, so their combined effect vanishes and the
    sandwich nets precisely the blocked move's effect.  Returns True
    when some blocked count was consumed.
    """
    G, p = b.G, b.p
    for j, (ei, v) in enumerate(reach.variables):
        if counts[j] == 0 or b.state[v] != 0:
            continue
        bumped = set(G.edges[ei])
        for hi, helper in enumerate(G.edges):
            if v not in helper:
                continue
            for va, vb in itertools.combinations((u for u in helper if u != v), 2):
                now_a, now_b = b.state[va], b.state[vb]
                # anchor values when the descending trick starts: the
                # fired move bumps every vertex of its edge except the
                # mover, and the ascending trick restores its anchors
                then_a = (now_a + 1) % p if va in bumped else now_a
                then_b = (now_b + 1) % p if vb in bumped else now_b
                if not (is_good_pair(p, now_a, now_b) and is_good_pair(p, then_a, then_b)):
                    continue
                b.trick(hi, va, vb, 1)
                b.emit(Move(v, ei))
                b.trick(hi, va, vb, -1)
                counts[j] -= 1
                return True
    return False


def _bridge_descent(
    G: Hypergraph,
    p: int,
    w1: State,
    w2: State,
    reach: ReachSystem,
    space,
    max_states: int,
    cap: int,
) -> Schedule:
    """Last resort: walk the counted moves greedily, search the gap.

    Executes moves from a (preferably minimum-norm) solution of the
    move-counting system while any counted move is legal and does not
    strand the walk on the inert zero state; counted moves whose mover
    ran dry are freed with cancelling trick sandwiches.  Any remaining
    gap is closed by bounded breadth-first search from the state
    actually reached -- progress made by the descent is kept.
    """
    try:
        _, solution = system_norm(space, cap=cap)
    except EnumerationTooLarge:
        solution = space.particular
    counts = list(solution)
    b = _Builder(G, p, w1)
    while sum(counts) > 0:
        progressed = False
        for j, (ei, v) in enumerate(reach.variables):
            if counts[j] == 0 or b.state[v] == 0:
                continue
            nxt = apply_move(G, p, b.state, Move(v, ei))
            if nxt == w2:
                b.emit(Move(v, ei))
                return Schedule(tuple(b.moves))
            if any(nxt):
                b.emit(Move(v, ei))
                counts[j] -= 1
                progressed = True
                break
        if not progressed and not _unblock_counted(b, reach, counts):
            break
    if b.state == w2:
        return Schedule(tuple(b.moves))
    try:
        orbit = orbit_bfs(G, p, b.state, max_states=max_states, stop_at=w2)
    except StateSpaceTooLarge:
        raise SynthesisIncomplete(
            f"constructive descent stalled {sum(counts)} counted moves short of the "
            f"target and the bridging search exceeded {max_states} states"
        ) from None
    if w2 not in orbit:
        raise InternalSynthesisFailure(
            "bridging search exhausted an orbit that should contain the target"
        )
    b.emit_all(extract_schedule(orbit, w2))
    return Schedule(tuple(b.moves))
