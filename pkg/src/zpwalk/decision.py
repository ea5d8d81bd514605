"""Decision layer: the balance system and the fast reachability answers.

The balance system for a pair of states counts moves: one unknown per
(edge, vertex) incidence, one equation per vertex saying the net effect
of all counted moves explains the difference between the two states.
Solvability of that system is necessary for reachability on every
hypergraph.  On well-shaped hypergraphs (is_good) it is also sufficient,
with two corrections that exhaustive search forced on us:

  * the zero state has no legal moves, so nothing but itself is
    reachable from it, whatever the system says;
  * a state with no predecessor (exactly the all-(p-1) state whenever
    every vertex lies on an edge) is reachable only from itself, yet the
    system can still be solvable for it.

decide_reachability / decide_recurrence / classify_state implement the
corrected rules, can cross-check themselves against the exhaustive
oracle (mode "both"), and refuse non-well-shaped inputs in algebraic
mode rather than answer with a one-sided test.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from . import dynamics
from .dynamics import DEFAULT_MAX_STATES, State, extract_schedule, orbit_bfs
from .errors import MismatchError, NotGood
from .hypergraph import Hypergraph, is_good
from .zp_algebra import (
    SolutionSpace,
    ZpMatrixSystem,
    gaussian_solve,
    validate_modulus,
)

MODE_ALGEBRAIC = "algebraic"
MODE_ORACLE = "oracle"
MODE_BOTH = "both"
_MODES = (MODE_ALGEBRAIC, MODE_ORACLE, MODE_BOTH)


@dataclass(frozen=True)
class ReachSystem:
    """Move-counting system for a (w1, w2) pair on a hypergraph.

    variables[i] is the (edge index, vertex) incidence that column i
    counts.  Row v reads: sum over edges e containing v of
    [X_{e,v} - sum of X_{e,u} for the other u in e]  =  w1(v) - w2(v),
    i.e. a solution records how many times (mod p) each incidence is
    moved in a schedule from w1 to w2.
    """

    p: int
    n: int
    variables: tuple[tuple[int, int], ...]
    system: ZpMatrixSystem


def build_system(G: Hypergraph, p: int, w1: State, w2: State) -> ReachSystem:
    validate_modulus(p)
    w1 = dynamics.validate_state(p, G.n, w1)
    w2 = dynamics.validate_state(p, G.n, w2)
    variables = tuple((i, v) for i, e in enumerate(G.edges) for v in e)
    col = {pair: j for j, pair in enumerate(variables)}
    rows = [[0] * len(variables) for _ in range(G.n)]
    for i, e in enumerate(G.edges):
        for v in e:
            j = col[(i, v)]
            rows[v][j] = 1
            for u in e:
                if u != v:
                    rows[u][j] = p - 1
    rhs = tuple((a - b) % p for a, b in zip(w1, w2))
    system = ZpMatrixSystem(
        tuple(tuple(r) for r in rows), rhs, p, len(variables)
    )
    return ReachSystem(p, G.n, variables, system)


@dataclass(frozen=True)
class Certificate:
    """Typed evidence attached to a Decision.

    kinds: "solution_vector" (a solution of the balance system),
    "unsolvability" (ranks of the plain and augmented matrices),
    "schedule" (replayable witness), "orbit_exhausted" (the full orbit
    was searched), "garden_of_eden" (target has no predecessor),
    "absorbing_source" (the zero state has no legal moves),
    "zero_state_reachable" / "escape_state" (recurrence refuters).
    """

    kind: str
    data: dict


@dataclass(frozen=True)
class Decision:
    answer: bool
    method: str
    certificate: Certificate
    oracle_certificate: Certificate | None = None


class StateClass(Enum):
    TRANSIENT = "transient"
    RECURRENT_OR_INACCESSIBLE = "recurrent_or_inaccessible"


def _require_mode(mode: str) -> None:
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}, got {mode!r}")


def _gate_algebraic(G: Hypergraph, p: int) -> None:
    validate_modulus(p)
    report = is_good(G)
    if not report.good:
        kinds = sorted({v.kind for v in report.violations})
        raise NotGood(
            f"hypergraph is not well-shaped ({', '.join(kinds)}); "
            "the algebraic rule is only proven there -- use oracle mode, "
            "or the necessity-only filter for sound negatives"
        )


def _solve_pair(G: Hypergraph, p: int, w1: State, w2: State) -> SolutionSpace:
    return gaussian_solve(build_system(G, p, w1, w2).system)


def _unsolvability_certificate(space_sys: ZpMatrixSystem) -> Certificate:
    plain = gaussian_solve(
        ZpMatrixSystem(space_sys.rows, (0,) * len(space_sys.rhs), space_sys.p,
                       space_sys.ncols)
    )
    rank = space_sys.ncols - plain.dimension
    return Certificate("unsolvability", {"rank": rank, "augmented_rank": rank + 1})


def _algebraic_reach(G: Hypergraph, p: int, w1: State, w2: State) -> Decision:
    if w1 == w2:
        cert = Certificate("solution_vector", {"solution": [0] * sum(map(len, G.edges))})
        return Decision(True, MODE_ALGEBRAIC, cert)
    if all(x == 0 for x in w1):
        return Decision(False, MODE_ALGEBRAIC,
                        Certificate("absorbing_source", {"source": list(w1)}))
    if not dynamics.has_predecessor(G, p, w2):
        return Decision(False, MODE_ALGEBRAIC,
                        Certificate("garden_of_eden", {"target": list(w2)}))
    reach = build_system(G, p, w1, w2)
    space = gaussian_solve(reach.system)
    if space.solvable:
        return Decision(True, MODE_ALGEBRAIC,
                        Certificate("solution_vector",
                                    {"solution": list(space.particular)}))
    return Decision(False, MODE_ALGEBRAIC, _unsolvability_certificate(reach.system))


def _oracle_reach(G: Hypergraph, p: int, w1: State, w2: State,
                  max_states: int) -> Decision:
    orbit = orbit_bfs(G, p, w1, max_states=max_states, stop_at=w2)
    if w2 in orbit:
        schedule = extract_schedule(orbit, w2)
        cert = Certificate("schedule", {"moves": [[m.vertex, m.edge] for m in schedule]})
        return Decision(True, MODE_ORACLE, cert)
    return Decision(False, MODE_ORACLE,
                    Certificate("orbit_exhausted", {"orbit_size": len(orbit)}))


def decide_reachability(
    G: Hypergraph,
    p: int,
    w1: State,
    w2: State,
    mode: str = MODE_BOTH,
    max_states: int = DEFAULT_MAX_STATES,
) -> Decision:
    """Is w2 reachable from w1 by legal moves?"""
    _require_mode(mode)
    w1 = dynamics.validate_state(p, G.n, w1)
    w2 = dynamics.validate_state(p, G.n, w2)
    if mode == MODE_ORACLE:
        return _oracle_reach(G, p, w1, w2, max_states)
    _gate_algebraic(G, p)
    algebraic = _algebraic_reach(G, p, w1, w2)
    if mode == MODE_ALGEBRAIC:
        return algebraic
    oracle = _oracle_reach(G, p, w1, w2, max_states)
    if algebraic.answer != oracle.answer:
        raise MismatchError(_mismatch_dump("reachability", G, p, w1, w2,
                                           algebraic.answer, oracle.answer))
    return Decision(algebraic.answer, MODE_BOTH, algebraic.certificate,
                    oracle.certificate)


def _algebraic_recur(G: Hypergraph, p: int, w1: State, w2: State) -> Decision:
    zero = (0,) * G.n
    if w1 == zero:
        if w2 == zero:
            return Decision(True, MODE_ALGEBRAIC,
                            Certificate("solution_vector",
                                        {"solution": [0] * sum(map(len, G.edges))}))
        return Decision(False, MODE_ALGEBRAIC,
                        Certificate("absorbing_source", {"source": list(w1)}))
    zero_space = _solve_pair(G, p, w1, zero)
    if w2 == zero:
        # Recurrent iff the orbit can fall into the absorbing zero state:
        # once the zero state is reachable at all, it stays reachable from
        # every intermediate state (solution differences), and it is the
        # only state reachable from itself.
        if zero_space.solvable:
            return Decision(True, MODE_ALGEBRAIC,
                            Certificate("solution_vector",
                                        {"solution": list(zero_space.particular)}))
        return Decision(False, MODE_ALGEBRAIC,
                        _unsolvability_certificate(build_system(G, p, w1, zero).system))
    if not dynamics.has_predecessor(G, p, w2):
        return Decision(False, MODE_ALGEBRAIC,
                        Certificate("garden_of_eden", {"target": list(w2)}))
    if zero_space.solvable:
        return Decision(False, MODE_ALGEBRAIC,
                        Certificate("zero_state_reachable",
                                    {"solution": list(zero_space.particular)}))
    reach = build_system(G, p, w1, w2)
    space = gaussian_solve(reach.system)
    if space.solvable:
        return Decision(True, MODE_ALGEBRAIC,
                        Certificate("solution_vector",
                                    {"solution": list(space.particular)}))
    return Decision(False, MODE_ALGEBRAIC, _unsolvability_certificate(reach.system))


def _oracle_recur(G: Hypergraph, p: int, w1: State, w2: State,
                  max_states: int) -> Decision:
    orbit = orbit_bfs(G, p, w1, max_states=max_states)
    if w2 not in orbit:
        return Decision(False, MODE_ORACLE,
                        Certificate("orbit_exhausted", {"orbit_size": len(orbit)}))
    # Reverse sweep from w2 over the orbit; any state it misses refutes.
    moves = dynamics.all_moves(G)
    reverse: dict[State, list[State]] = {w: [] for w in orbit.order}
    for w in orbit.order:
        for move in moves:
            if w[move.vertex] != 0:
                reverse[dynamics.apply_move(G, p, w, move)].append(w)
    seen = {w2}
    stack = [w2]
    while stack:
        t = stack.pop()
        for s in reverse[t]:
            if s not in seen:
                seen.add(s)
                stack.append(s)
    if len(seen) == len(orbit):
        return Decision(True, MODE_ORACLE,
                        Certificate("orbit_exhausted", {"orbit_size": len(orbit)}))
    witness = next(w for w in orbit.order if w not in seen)
    return Decision(False, MODE_ORACLE,
                    Certificate("escape_state", {"state": list(witness)}))


def decide_recurrence(
    G: Hypergraph,
    p: int,
    w1: State,
    w2: State,
    mode: str = MODE_BOTH,
    max_states: int = DEFAULT_MAX_STATES,
) -> Decision:
    """Is w2 reachable from every state reachable from w1?"""
    _require_mode(mode)
    w1 = dynamics.validate_state(p, G.n, w1)
    w2 = dynamics.validate_state(p, G.n, w2)
    if mode == MODE_ORACLE:
        return _oracle_recur(G, p, w1, w2, max_states)
    _gate_algebraic(G, p)
    algebraic = _algebraic_recur(G, p, w1, w2)
    if mode == MODE_ALGEBRAIC:
        return algebraic
    oracle = _oracle_recur(G, p, w1, w2, max_states)
    if algebraic.answer != oracle.answer:
        raise MismatchError(_mismatch_dump("recurrence", G, p, w1, w2,
                                           algebraic.answer, oracle.answer))
    return Decision(algebraic.answer, MODE_BOTH, algebraic.certificate,
                    oracle.certificate)


def classify_state(
    G: Hypergraph,
    p: int,
    w: State,
    mode: str = MODE_BOTH,
    max_states: int = DEFAULT_MAX_STATES,
) -> StateClass:
    """Transient (accessible and able to escape forever) or not.

    The complementary class is deliberately named for what it contains:
    genuinely recurrent states, plus inaccessible ones (no predecessor)
    for which escape is a one-way exit nothing can ever revisit.
    """
    _require_mode(mode)
    w = dynamics.validate_state(p, G.n, w)
    answers: dict[str, StateClass] = {}
    if mode in (MODE_ALGEBRAIC, MODE_BOTH):
        _gate_algebraic(G, p)
        zero = (0,) * G.n
        if w == zero or not dynamics.has_predecessor(G, p, w):
            answers[MODE_ALGEBRAIC] = StateClass.RECURRENT_OR_INACCESSIBLE
        elif _solve_pair(G, p, w, zero).solvable:
            answers[MODE_ALGEBRAIC] = StateClass.TRANSIENT
        else:
            answers[MODE_ALGEBRAIC] = StateClass.RECURRENT_OR_INACCESSIBLE
    if mode in (MODE_ORACLE, MODE_BOTH):
        self_recurrent = _oracle_recur(G, p, w, w, max_states).answer
        accessible = dynamics.has_predecessor(G, p, w)
        answers[MODE_ORACLE] = (
            StateClass.TRANSIENT if (not self_recurrent) and accessible
            else StateClass.RECURRENT_OR_INACCESSIBLE
        )
    if mode == MODE_BOTH and answers[MODE_ALGEBRAIC] != answers[MODE_ORACLE]:
        raise MismatchError(_mismatch_dump("classification", G, p, w, w,
                                           answers[MODE_ALGEBRAIC].value,
                                           answers[MODE_ORACLE].value))
    return answers[MODE_ALGEBRAIC if mode != MODE_ORACLE else MODE_ORACLE]


def necessity_filter(G: Hypergraph, p: int, w1: State, w2: State) -> Decision | None:
    """Sound negative-only filter, valid on every hypergraph.

    A schedule from w1 to w2 yields a solution of the balance system by
    counting its moves, so an unsolvable system proves unreachability.
    Returns a negative Decision, or None when inconclusive.
    """
    validate_modulus(p)
    w1 = dynamics.validate_state(p, G.n, w1)
    w2 = dynamics.validate_state(p, G.n, w2)
    if w1 == w2:
        return None
    reach = build_system(G, p, w1, w2)
    if gaussian_solve(reach.system).solvable:
        return None
    return Decision(False, MODE_ALGEBRAIC, _unsolvability_certificate(reach.system))


def _mismatch_dump(problem: str, G: Hypergraph, p: int, w1: State, w2: State,
                   algebraic, oracle) -> str:
    return (
        f"{problem} disagreement: algebraic={algebraic} oracle={oracle}\n"
        f"  p = {p}\n"
        f"  n = {G.n}\n"
        f"  edges = {list(G.edges)}\n"
        f"  w1 = {dynamics.format_state(w1)}\n"
        f"  w2 = {dynamics.format_state(w2)}\n"
        "capture this instance as a regression test"
    )
