"""Brute-force ground truth at small sizes.

``exhaustive_correctness`` covers every instance of a space.  By default it
does so by lazy case splitting: the protocol runs on a probe instance whose
entries are unknown until read, and each read of an unknown entry forks
the run over that entry's domain.  A finished run has read a set of
entries; every instance agreeing on them produces the same run, so the
leaf speaks for all of them at once.  The covered-instance counts of all
leaves add up to the size of the space, which the engine asserts.  This
relies only on oracles being deterministic functions of their views.

``lazy=False`` enumerates instances one by one instead.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import groupby
from typing import Callable, Optional

import numpy as np

from .adversary import FoolingCertificate
from .core import BitString, Instance, InstanceSpace, evaluate
from .errors import CapExceeded
from .protocol import ProtocolDef, run

__all__ = [
    "DEFAULT_CAP",
    "CorrectnessReport",
    "exhaustive_report",
    "exhaustive_correctness",
    "brute_force_fooling_search",
    "popcount_monotone_check",
    "explore",
]

DEFAULT_CAP = 10 ** 7


class _Undecided(BaseException):
    # BaseException so that oracles catching Exception cannot swallow it.
    def __init__(self, key):
        super().__init__(key)
        self.key = key


class _ProbeBits:
    """Read-only bit string whose bits are produced on demand."""

    def __init__(self, get_bit, n):
        self._get = get_bit
        self._n = n

    def bit(self, j):
        if not 1 <= j <= self._n:
            raise IndexError(f"position {j} outside 1..{self._n}")
        return self._get(j)

    def prefix(self, m):
        if not 0 <= m <= self._n:
            raise IndexError(f"prefix length {m} outside 0..{self._n}")
        return BitString(tuple(self._get(j) for j in range(1, m + 1)))

    @property
    def bits(self):
        return tuple(self._get(j) for j in range(1, self._n + 1))

    def to_int(self):
        return BitString(self.bits).to_int()

    def __len__(self):
        return self._n

    def __iter__(self):
        return iter(self.bits)

    def __str__(self):
        return "".join(map(str, self.bits))


class _ProbePointer:
    def __init__(self, probe, layer):
        self._probe = probe
        self._layer = layer

    def __call__(self, v):
        if not 1 <= v <= self._probe.n:
            raise IndexError(f"vertex {v} outside 1..{self._probe.n}")
        return self._probe.get(("f", self._layer, v))

    @property
    def table(self):
        return tuple(self(v) for v in range(1, self._probe.n + 1))

    def __len__(self):
        return self._probe.n


class _Probe:
    """Duck-typed ``Instance`` backed by a partial assignment of entries."""

    def __init__(self, space: InstanceSpace, assignment: dict):
        self.n = space.n
        self.k = space.k
        self._assignment = assignment
        self.middles = tuple(_ProbePointer(self, j) for j in range(2, self.k))
        self.x = _ProbeBits(lambda s: self.get(("x", s)), self.n)

    def get(self, key):
        try:
            return self._assignment[key]
        except KeyError:
            raise _Undecided(key) from None

    @property
    def start(self):
        return self.get(("start",))

    def f(self, j):
        if not 2 <= j <= self.k - 1:
            raise IndexError(f"no middle function f_{j} when k={self.k}")
        return self.middles[j - 2]

    def suffix(self, j):
        if not 1 <= j <= self.k - 1:
            raise ValueError(f"layer {j} outside 1..{self.k - 1}")
        if j == self.k - 1:
            return self.x
        fns = [self.f(m) for m in range(j + 1, self.k)]

        def bit(s):
            v = s
            for f in fns:
                v = f(v)
            return self.x.bit(v)

        return _ProbeBits(bit, self.n)


def explore(space: InstanceSpace, check: Callable, cap: int = DEFAULT_CAP):
    """Yield ``(assignment, result, covered)`` for each leaf of the lazy case split.

    ``check`` receives a probe instance.  ``covered`` is the number of
    instances of ``space`` that agree with ``assignment``.
    """
    total = space.size()
    stack = [{}]
    executions = 0
    covered_sum = 0
    while stack:
        assignment = stack.pop()
        executions += 1
        if executions > cap:
            raise CapExceeded(f"lazy enumeration exceeded {cap} executions")
        try:
            result = check(_Probe(space, assignment))
        except _Undecided as undecided:
            for value in reversed(space.domain(undecided.key)):
                stack.append({**assignment, undecided.key: value})
            continue
        fixed = math.prod(len(space.domain(key)) for key in assignment)
        covered = total // fixed
        covered_sum += covered
        yield assignment, result, covered
    if covered_sum != total:
        raise AssertionError(f"leaves cover {covered_sum} instances, space has {total}")


@dataclass(frozen=True)
class CorrectnessReport:
    total: int
    correct: int
    runs: int
    counterexample: Optional[Instance]

    @property
    def ok(self) -> bool:
        return self.correct == self.total


def _space_for(protocol: ProtocolDef, space):
    space = space or InstanceSpace(protocol.n, protocol.k)
    if (space.n, space.k) != (protocol.n, protocol.k):
        raise ValueError(
            f"space has n={space.n}, k={space.k} but protocol expects n={protocol.n}, k={protocol.k}"
        )
    return space


def exhaustive_report(protocol: ProtocolDef, space=None, cap: int = DEFAULT_CAP, lazy: bool = True):
    """Run ``protocol`` against every instance of ``space`` (default: all instances).

    With ``lazy=True`` the cap bounds the number of protocol executions;
    otherwise it bounds the size of the space.
    """
    space = _space_for(protocol, space)
    correct = 0
    runs = 0
    counterexample = None
    if lazy:
        def check(probe):
            return run(protocol, probe).output == evaluate(probe)

        for assignment, ok, covered in explore(space, check, cap):
            runs += 1
            if ok:
                correct += covered
            elif counterexample is None:
                counterexample = space.complete(assignment)
        return CorrectnessReport(space.size(), correct, runs, counterexample)

    size = space.size()
    if size > cap:
        raise CapExceeded(f"space has {size} instances, cap is {cap}")
    for inst in space.instances():
        runs += 1
        if run(protocol, inst).output == evaluate(inst):
            correct += 1
        elif counterexample is None:
            counterexample = inst
    return CorrectnessReport(size, correct, runs, counterexample)


def exhaustive_correctness(protocol: ProtocolDef, space=None, cap: int = DEFAULT_CAP, lazy: bool = True) -> bool:
    return exhaustive_report(protocol, space, cap, lazy).ok


def brute_force_fooling_search(protocol: ProtocolDef, space=None, cap: int = DEFAULT_CAP):
    """First pair of inputs that share ``(start, middles)`` and transcript but not the answer.

    Instances are scanned lexicographically; within a ``(start, middles)``
    group the pair returned is ``(earliest string with the other answer,
    first string that completes a pair)``.  Returns ``None`` when no pair exists.
    """
    space = _space_for(protocol, space)
    size = space.size()
    if size > cap:
        raise CapExceeded(f"space has {size} instances, cap is {cap}")
    for _, group in groupby(space.instances(), key=lambda inst: (inst.start, inst.middles)):
        seen = {}
        for inst in group:
            transcript = run(protocol, inst)
            answer = evaluate(inst)
            by_answer = seen.setdefault(transcript, {})
            if 1 - answer in by_answer:
                earlier = by_answer[1 - answer]
                return FoolingCertificate(
                    n=inst.n,
                    k=inst.k,
                    protocol=protocol.identifier(),
                    start=inst.start,
                    middles=inst.middles,
                    x=earlier.x,
                    x_prime=inst.x,
                    transcript=transcript.messages,
                    outputs=(1 - answer, answer),
                )
            by_answer.setdefault(answer, inst)
    return None


def _popcount_table(n):
    values = np.arange(1 << n, dtype=np.int64)
    counts = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        counts += (values >> i) & 1
    return counts


def popcount_monotone_check(n: int, f=None, samples: Optional[int] = None, seed: int = 0) -> bool:
    """Check ``f(x) < f(y)`` for dominance-comparable ``x < y`` (``f`` defaults to popcount).

    ``f`` maps integer-encoded strings to numbers.  Without ``samples`` the
    check is exhaustive over all comparable pairs for ``n <= 10`` and over
    covering pairs (``y = x`` plus one extra 1) beyond that, which suffices
    because ``<`` is the transitive closure of its covering pairs.  With
    ``samples`` it draws that many random comparable pairs.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if f is None:
        table = _popcount_table(n)
    else:
        table = np.array([f(v) for v in range(1 << n)])

    if samples is not None:
        rng = random.Random(seed)
        for _ in range(samples):
            y = rng.randrange(1, 1 << n)
            x = y & rng.randrange(0, 1 << n)
            if x == y:
                x = y & ~(1 << rng.choice([i for i in range(n) if y >> i & 1]))
            if not table[x] < table[y]:
                return False
        return True

    if n <= 10:
        for y in range(1, 1 << n):
            x = (y - 1) & y
            while True:
                if not table[x] < table[y]:
                    return False
                if x == 0:
                    break
                x = (x - 1) & y
        return True

    values = np.arange(1 << n, dtype=np.int64)
    for i in range(n):
        lower = values[(values >> i) & 1 == 0]
        if not np.all(table[lower] < table[lower | (1 << i)]):
            return False
    return True
