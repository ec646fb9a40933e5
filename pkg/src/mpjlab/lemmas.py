"""Collision finders and the stage-advancing fooling-pair constructions.

A fooling state at stage ``j`` holds a prefix ``start, f_2..f_j``, the
messages ``alpha_1..alpha_j`` and two strings ``x, y`` over layer ``j``
that every player ``h <= j`` answers identically, yet which disagree at
the vertex reached by the prefix.  Each push variant extends the prefix by
one pointer function ``f_{j+1}`` chosen so that ``x = x1 o f_{j+1}`` and
``y = y1 o f_{j+1}`` for a colliding pair ``(x1, y1)`` of the next speaker.

All searches walk candidates in a fixed order and return the first hit,
so results are reproducible.  Candidate strings are handled as integers
with position 1 as the most significant bit, which makes numeric order
coincide with lexicographic order.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .core import (
    BitString,
    PointerFn,
    ceil_log2,
    chain_string,
    dominance_less,
    index_partition,
    is_crossing,
)
from .errors import BudgetViolation, ConstructionFailed, NoCollision, PreconditionViolated

__all__ = [
    "MessageOracle",
    "FoolingState",
    "chain_threshold",
    "crossing_threshold",
    "find_any_collision",
    "find_chain_collision",
    "find_pinned_collision",
    "find_crossing_collision",
    "start_from_collision",
    "start_from_chain",
    "push",
    "crosspush",
    "chainpush",
]


def chain_threshold(n: int) -> int:
    """Budgets strictly below ``ceil(log2(n+1)) - 2`` qualify for the chain phase."""
    return ceil_log2(n + 1) - 2


def crossing_threshold(n: int) -> int:
    """Largest budget ``n - ceil(log2(n)/2) - 2`` for which a crossing collision must exist."""
    return n - (ceil_log2(n) + 1) // 2 - 2


@dataclass(frozen=True)
class MessageOracle:
    """A speaker's message as a function of its suffix composition alone."""

    fn: Callable[[BitString], object]
    budget: int
    speaker: int = 0

    def __call__(self, s: BitString) -> BitString:
        message = self.fn(s)
        if not isinstance(message, BitString):
            message = BitString(message)
        if len(message) != self.budget:
            raise BudgetViolation(self.speaker, self.budget, len(message))
        return message


@dataclass(frozen=True)
class FoolingState:
    n: int
    k: int
    start: int
    fns: tuple  # f_2 .. f_j
    alphas: tuple  # alpha_1 .. alpha_j
    x: BitString
    y: BitString
    v: int

    def __post_init__(self):
        if len(self.alphas) != len(self.fns) + 1:
            raise ValueError("a stage-j state carries j messages and j-1 middle functions")
        if len(self.x) != self.n or len(self.y) != self.n:
            raise ValueError("fooling strings must have length n")
        if self.x.bit(self.v) == self.y.bit(self.v):
            raise ValueError(f"not fooling: x and y agree at vertex {self.v}")

    @property
    def j(self) -> int:
        return len(self.alphas)

    @property
    def has_dominance(self) -> bool:
        return dominance_less(self.x, self.y)

    @property
    def has_crossing(self) -> bool:
        return is_crossing(self.x, self.y)

    def to_dict(self) -> dict:
        return {
            "j": self.j,
            "f_prefix": [self.start] + [list(f.table) for f in self.fns],
            "alphas": [str(a) for a in self.alphas],
            "x": str(self.x),
            "y": str(self.y),
            "v": self.v,
            "flags": {"dominance": self.has_dominance, "crossing": self.has_crossing},
        }


def _bits(value: int, n: int) -> BitString:
    return BitString.from_int(value, n)


def _first_collision(oracle, n, candidates):
    """First candidate whose message repeats; returns ``(earlier, later)`` integers."""
    seen = {}
    for value in candidates:
        message = oracle(_bits(value, n))
        if message in seen:
            return seen[message], value
        seen[message] = value
    raise NoCollision(f"no two candidates share a message under a {oracle.budget}-bit oracle")


def find_any_collision(oracle: MessageOracle, n: int):
    """Lexicographically first pair of distinct strings with equal messages."""
    if oracle.budget >= n:
        raise PreconditionViolated(f"budget {oracle.budget} >= n = {n}: no collision is forced")
    a, b = _first_collision(oracle, n, range(1 << n))
    return _bits(a, n), _bits(b, n)


def find_chain_collision(oracle: MessageOracle, n: int, enforce_budget: bool = True):
    """Equal-message pair ``x < y`` among interior chain strings.

    Scans ``chain_string(n, i)`` for ``i = 1..n-1``; the later (more zeroed)
    string of the first collision becomes ``x``.  Both ends of the chain
    are excluded so positions 1 and ``n`` give nonempty 00 and 11 classes.
    """
    if enforce_budget and (n < 3 or 2 ** oracle.budget >= n - 1):
        raise PreconditionViolated(
            f"chain collision needs 2**t < n-1, got t={oracle.budget}, n={n}"
        )
    seen = {}
    for i in range(1, n):
        s = chain_string(n, i)
        message = oracle(s)
        if message in seen:
            return s, chain_string(n, seen[message])
        seen[message] = i
    raise NoCollision(f"interior chain of length {n - 1} has no repeated message")


def find_pinned_collision(oracle: MessageOracle, n: int):
    """Equal-message pair among strings starting ``01``, plus a split index ``d > 2``.

    The pair is oriented so that ``x1(d) = 0`` and ``y1(d) = 1``; ``d`` is the
    smallest such index.
    """
    if n < 3 or oracle.budget > n - 3:
        raise PreconditionViolated(f"pinned collision needs t <= n-3, got t={oracle.budget}, n={n}")
    base = 1 << (n - 2)
    a, b = _first_collision(oracle, n, range(base, 2 * base))
    x1, y1 = _bits(a, n), _bits(b, n)
    split = [d for d in range(3, n + 1) if (x1.bit(d), y1.bit(d)) == (0, 1)]
    if not split:
        x1, y1 = y1, x1
        split = [d for d in range(3, n + 1) if (x1.bit(d), y1.bit(d)) == (0, 1)]
    return x1, y1, split[0]


def _crosses(a: int, b: int, mask: int) -> bool:
    return bool(a & b and a & ~b & mask and ~a & b & mask and ~(a | b) & mask)


def find_crossing_collision(oracle: MessageOracle, n: int, enforce_budget: bool = True):
    """First crossing pair with equal messages.

    Pairs ``(a, b)`` with ``a < b`` are ordered by ``b`` first, then ``a``, so
    the scan can stop at the first hit.
    """
    limit = crossing_threshold(n)
    if enforce_budget and oracle.budget > limit:
        raise PreconditionViolated(
            f"crossing collision needs t <= n - ceil(log2(n)/2) - 2 = {limit}, got t={oracle.budget}"
        )
    mask = (1 << n) - 1
    buckets = {}
    for b in range(1 << n):
        message = oracle(_bits(b, n))
        bucket = buckets.setdefault(message, [])
        for a in bucket:
            if _crosses(a, b, mask):
                return _bits(a, n), _bits(b, n)
        bucket.append(b)
    raise NoCollision(
        f"no crossing pair shares a message under a {oracle.budget}-bit oracle at n={n}"
    )


def start_from_collision(oracle: MessageOracle, n: int, k: int) -> FoolingState:
    """Stage-1 state from any two strings the first speaker cannot tell apart."""
    x, y = find_any_collision(oracle, n)
    start = min(j for j in range(1, n + 1) if x.bit(j) != y.bit(j))
    return FoolingState(n, k, start, (), (oracle(x),), x, y, start)


def start_from_chain(oracle: MessageOracle, n: int, k: int) -> FoolingState:
    """Stage-1 state with ``x < y`` from a chain collision; start is the smallest 01 index."""
    x, y = find_chain_collision(oracle, n)
    start = min(index_partition(x, y).i01)
    return FoolingState(n, k, start, (), (oracle(x),), x, y, start)


def _advance(state: FoolingState, oracle, x1, y1, table, step) -> FoolingState:
    f = PointerFn(tuple(table))
    n = state.n
    for s in range(1, n + 1):
        if state.x.bit(s) != x1.bit(f(s)) or state.y.bit(s) != y1.bit(f(s)):
            raise ConstructionFailed(
                f"{step}: reconstruction fails at position {s} "
                f"(x={state.x}, y={state.y}, x1={x1}, y1={y1}, f={list(f.table)})"
            )
    alpha = oracle(x1)
    if oracle(y1) != alpha:
        raise ConstructionFailed(f"{step}: messages on {x1} and {y1} differ")
    v = f(state.v)
    if x1.bit(v) == y1.bit(v):
        raise ConstructionFailed(f"{step}: new vertex {v} does not separate {x1} and {y1}")
    return FoolingState(n, state.k, state.start, state.fns + (f,), state.alphas + (alpha,), x1, y1, v)


def _class_map(x, y, reps):
    return [reps[(x.bit(s), y.bit(s))] for s in range(1, len(x) + 1)]


def push(state: FoolingState, oracle: MessageOracle) -> FoolingState:
    """Advance a dominated pair past a speaker with at most ``n - 3`` bits."""
    n = state.n
    if oracle.budget > n - 3:
        raise PreconditionViolated(f"push needs t <= n-3 = {n - 3}, got t={oracle.budget}")
    if not state.has_dominance:
        raise PreconditionViolated("push needs a state with x < y")
    x1, y1, d = find_pinned_collision(oracle, n)
    reps = {(0, 0): 1, (1, 1): 2, (0, 1): d}
    return _advance(state, oracle, x1, y1, _class_map(state.x, state.y, reps), "push")


def crosspush(state: FoolingState, oracle: MessageOracle) -> FoolingState:
    """Advance any fooling pair to a crossing pair of the next speaker."""
    limit = crossing_threshold(state.n)
    if oracle.budget > limit:
        raise PreconditionViolated(f"crosspush needs t <= {limit}, got t={oracle.budget}")
    x1, y1 = find_crossing_collision(oracle, state.n)
    reps = index_partition(x1, y1).representatives()
    return _advance(state, oracle, x1, y1, _class_map(state.x, state.y, reps), "crosspush")


def chainpush(state: FoolingState, oracle: MessageOracle) -> FoolingState:
    """Advance a dominated pair to another dominated pair past a very quiet speaker."""
    limit = chain_threshold(state.n)
    if oracle.budget >= limit:
        raise PreconditionViolated(
            f"chainpush needs t < ceil(log2(n+1)) - 2 = {limit}, got t={oracle.budget}"
        )
    if not state.has_dominance:
        raise PreconditionViolated("chainpush needs a state with x < y")
    x1, y1 = find_chain_collision(oracle, state.n)
    reps = index_partition(x1, y1).representatives()
    return _advance(state, oracle, x1, y1, _class_map(state.x, state.y, reps), "chainpush")
