"""Input atoms of pointer jumping and the combinatorics on bit strings.

Everything public here is 1-indexed: string positions, vertices and
pointer values all live in ``1..n``.  An instance is the tuple
``(start, f_2, ..., f_{k-1}, x)``; ``start`` plays the role of ``f_1``.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

__all__ = [
    "BitString",
    "PointerFn",
    "Instance",
    "IndexPartition",
    "InstanceSpace",
    "evaluate",
    "follow",
    "compose_suffix",
    "dominance_less",
    "index_partition",
    "is_crossing",
    "chain_string",
    "random_instance",
    "ceil_log2",
]


def ceil_log2(m: int) -> int:
    """Smallest ``c >= 0`` with ``2**c >= m`` (integer arithmetic, ``m >= 1``)."""
    if m < 1:
        raise ValueError(f"ceil_log2 needs m >= 1, got {m}")
    return (m - 1).bit_length()


@dataclass(frozen=True)
class BitString:
    """Immutable 0/1 string. ``bit(1)`` is the leftmost position.

    Accepts a ``str`` of 0/1 characters or any iterable of 0/1 values.
    Zero-length strings are allowed (empty messages).
    """

    bits: tuple

    def __post_init__(self):
        raw = self.bits
        if isinstance(raw, str):
            if any(c not in "01" for c in raw):
                raise ValueError(f"not a bit string: {raw!r}")
            bits = tuple(1 if c == "1" else 0 for c in raw)
        else:
            bits = tuple(raw)
            for b in bits:
                if b not in (0, 1) or isinstance(b, float):
                    raise ValueError(f"bit values must be 0 or 1, got {b!r}")
            bits = tuple(int(b) for b in bits)
        object.__setattr__(self, "bits", bits)

    @classmethod
    def _trusted(cls, bits: tuple) -> "BitString":
        obj = object.__new__(cls)
        object.__setattr__(obj, "bits", bits)
        return obj

    @classmethod
    def from_int(cls, value: int, n: int) -> "BitString":
        """Big-endian: position 1 is the most significant of the ``n`` bits."""
        if value < 0 or value >> n:
            raise ValueError(f"{value} does not fit in {n} bits")
        return cls._trusted(tuple((value >> (n - 1 - i)) & 1 for i in range(n)))

    @classmethod
    def zeros(cls, n: int) -> "BitString":
        return cls._trusted((0,) * n)

    def to_int(self) -> int:
        value = 0
        for b in self.bits:
            value = (value << 1) | b
        return value

    def bit(self, j: int) -> int:
        if not 1 <= j <= len(self.bits):
            raise IndexError(f"position {j} outside 1..{len(self.bits)}")
        return self.bits[j - 1]

    def prefix(self, m: int) -> "BitString":
        if not 0 <= m <= len(self.bits):
            raise IndexError(f"prefix length {m} outside 0..{len(self.bits)}")
        return BitString._trusted(self.bits[:m])

    def __len__(self):
        return len(self.bits)

    def __iter__(self):
        return iter(self.bits)

    def __str__(self):
        return "".join("1" if b else "0" for b in self.bits)

    def __repr__(self):
        return f"BitString('{self}')"


@dataclass(frozen=True)
class PointerFn:
    """Total map ``[n] -> [n]`` stored as its 1-indexed value table."""

    table: tuple

    def __post_init__(self):
        table = tuple(int(v) for v in self.table)
        n = len(table)
        if n < 1:
            raise ValueError("pointer function needs n >= 1")
        for v in table:
            if not 1 <= v <= n:
                raise ValueError(f"pointer value {v} outside 1..{n}")
        object.__setattr__(self, "table", table)

    @classmethod
    def identity(cls, n: int) -> "PointerFn":
        return cls(tuple(range(1, n + 1)))

    def __call__(self, v: int) -> int:
        if not 1 <= v <= len(self.table):
            raise IndexError(f"vertex {v} outside 1..{len(self.table)}")
        return self.table[v - 1]

    def __len__(self):
        return len(self.table)

    def __repr__(self):
        return f"PointerFn({list(self.table)})"


@dataclass(frozen=True)
class Instance:
    """One input ``(start, f_2, ..., f_{k-1}, x)`` of the k-layer problem."""

    n: int
    k: int
    start: int
    middles: tuple
    x: BitString

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if not 1 <= self.start <= self.n:
            raise ValueError(f"start {self.start} outside 1..{self.n}")
        middles = tuple(f if isinstance(f, PointerFn) else PointerFn(f) for f in self.middles)
        if len(middles) != self.k - 2:
            raise ValueError(f"expected {self.k - 2} middle functions, got {len(middles)}")
        for f in middles:
            if len(f) != self.n:
                raise ValueError(f"middle function of length {len(f)} in an n={self.n} instance")
        x = self.x if isinstance(self.x, BitString) else BitString(self.x)
        if len(x) != self.n:
            raise ValueError(f"x has length {len(x)}, expected {self.n}")
        object.__setattr__(self, "middles", middles)
        object.__setattr__(self, "x", x)

    def f(self, j: int) -> PointerFn:
        """The pointer function from layer ``j-1`` to layer ``j`` (``2 <= j <= k-1``)."""
        if not 2 <= j <= self.k - 1:
            raise IndexError(f"no middle function f_{j} when k={self.k}")
        return self.middles[j - 2]

    def suffix(self, j: int) -> BitString:
        return compose_suffix(self, j)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "start": self.start,
            "middles": [list(f.table) for f in self.middles],
            "x": str(self.x),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Instance":
        return cls(
            n=int(data["n"]),
            k=int(data["k"]),
            start=int(data["start"]),
            middles=tuple(PointerFn(tuple(f)) for f in data["middles"]),
            x=BitString(data["x"]),
        )


def follow(inst, layer: int) -> int:
    """Vertex reached at ``layer`` (1-based) when following pointers from ``start``."""
    v = inst.start
    for j in range(2, layer + 1):
        v = inst.f(j)(v)
    return v


def evaluate(inst) -> int:
    """The answer bit ``x(f_{k-1}(...f_2(start)...))``, computed iteratively."""
    return inst.x.bit(follow(inst, inst.k - 1))


def compose_suffix(inst, j: int) -> BitString:
    """String ``g`` over layer ``j`` with ``g(s) = x(f_{k-1}(...f_{j+1}(s)...))``.

    For ``j = k-1`` the composition is empty and ``x`` is returned unchanged.
    """
    k = inst.k
    if not 1 <= j <= k - 1:
        raise ValueError(f"layer {j} outside 1..{k - 1}")
    if j == k - 1:
        return inst.x
    fns = [inst.f(m) for m in range(j + 1, k)]
    bits = []
    for s in range(1, inst.n + 1):
        v = s
        for f in fns:
            v = f(v)
        bits.append(inst.x.bit(v))
    return BitString._trusted(tuple(bits))


def _check_same_length(x: BitString, y: BitString):
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")


def dominance_less(x: BitString, y: BitString) -> bool:
    """Strict coordinatewise order: ``x <= y`` everywhere and ``x != y``."""
    _check_same_length(x, y)
    return x.bits != y.bits and all(a <= b for a, b in zip(x.bits, y.bits))


@dataclass(frozen=True)
class IndexPartition:
    """Positions grouped by the bit pattern ``(x(j), y(j))``."""

    i00: frozenset
    i01: frozenset
    i10: frozenset
    i11: frozenset

    def cls(self, a: int, b: int) -> frozenset:
        return (self.i00, self.i01, self.i10, self.i11)[2 * a + b]

    def representatives(self) -> dict:
        """Smallest index of each nonempty class, keyed by ``(a, b)``."""
        return {
            (a, b): min(self.cls(a, b))
            for a in (0, 1)
            for b in (0, 1)
            if self.cls(a, b)
        }


def index_partition(x: BitString, y: BitString) -> IndexPartition:
    _check_same_length(x, y)
    groups = ([], [], [], [])
    for j, (a, b) in enumerate(zip(x.bits, y.bits), start=1):
        groups[2 * a + b].append(j)
    return IndexPartition(*(frozenset(g) for g in groups))


def is_crossing(x: BitString, y: BitString) -> bool:
    part = index_partition(x, y)
    return bool(part.i00 and part.i01 and part.i10 and part.i11)


def chain_string(n: int, i: int) -> BitString:
    """``i`` zeros followed by ``n - i`` ones."""
    if not 0 <= i <= n:
        raise ValueError(f"chain index {i} outside 0..{n}")
    return BitString._trusted((0,) * i + (1,) * (n - i))


def random_instance(n: int, k: int, rng: random.Random) -> Instance:
    return Instance(
        n=n,
        k=k,
        start=rng.randint(1, n),
        middles=tuple(
            PointerFn(tuple(rng.randint(1, n) for _ in range(n))) for _ in range(k - 2)
        ),
        x=BitString(tuple(rng.randint(0, 1) for _ in range(n))),
    )


class InstanceSpace:
    """A product set of instances, enumerated lexicographically over ``(start, middles, x)``.

    Entries are addressed by keys ``("start",)``, ``("f", j, v)`` and
    ``("x", s)``; subclasses restrict the per-key domains.
    """

    def __init__(self, n: int, k: int):
        if n < 1 or k < 2:
            raise ValueError(f"need n >= 1 and k >= 2, got n={n}, k={k}")
        self.n = n
        self.k = k

    def start_domain(self) -> Sequence[int]:
        return range(1, self.n + 1)

    def pointer_domain(self, layer: int, v: int) -> Sequence[int]:
        return range(1, self.n + 1)

    def domain(self, key: tuple) -> Sequence[int]:
        kind = key[0]
        if kind == "start":
            return self.start_domain()
        if kind == "f":
            return self.pointer_domain(key[1], key[2])
        if kind == "x":
            return (0, 1)
        raise KeyError(key)

    def keys(self) -> Iterator[tuple]:
        yield ("start",)
        for j in range(2, self.k):
            for v in range(1, self.n + 1):
                yield ("f", j, v)
        for s in range(1, self.n + 1):
            yield ("x", s)

    def size(self) -> int:
        return math.prod(len(self.domain(key)) for key in self.keys())

    def instance_from(self, values: Iterable[int]) -> Instance:
        values = list(values)
        n, k = self.n, self.k
        middles = tuple(
            PointerFn(tuple(values[1 + (j - 2) * n: 1 + (j - 1) * n])) for j in range(2, k)
        )
        return Instance(n, k, values[0], middles, BitString(tuple(values[1 + (k - 2) * n:])))

    def instances(self) -> Iterator[Instance]:
        domains = [self.domain(key) for key in self.keys()]
        for values in itertools.product(*domains):
            yield self.instance_from(values)

    def complete(self, assignment: dict) -> Instance:
        """Fill unassigned keys with the first value of their domain."""
        return self.instance_from(
            assignment.get(key, self.domain(key)[0]) for key in self.keys()
        )

    def contains(self, inst: Instance) -> bool:
        if inst.n != self.n or inst.k != self.k:
            return False
        if inst.start not in self.start_domain():
            return False
        return all(
            inst.f(j)(v) in self.pointer_domain(j, v)
            for j in range(2, self.k)
            for v in range(1, self.n + 1)
        )
