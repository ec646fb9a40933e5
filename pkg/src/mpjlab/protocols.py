"""Built-in protocols: the upper-bound constructions and under-budgeted targets.

The cheating protocols are deliberately wrong but total and deterministic,
so the adversary and the brute-force oracle can query them anywhere.
"""
from __future__ import annotations

from .core import BitString, InstanceSpace, ceil_log2
from .errors import PreconditionViolated
from .protocol import PlayerView, ProtocolDef, ViewModel, follow_view

__all__ = [
    "TpjShape",
    "TreeShapeError",
    "trivial_protocol",
    "reordered_protocol",
    "tpj_protocol",
    "cheating_protocol",
    "uniform_truncation_protocol",
    "protocol_from_name",
    "crossing_budget_limit",
    "uniform_budget_limit",
    "CHEATING_BASES",
]

CHEATING_BASES = ("truncated-trivial", "silent", "first-player")

EMPTY = BitString(())


def _silent(view: PlayerView) -> BitString:
    return EMPTY


def _emit_composition(view: PlayerView):
    return view.composition


def _emit_prefix(budget):
    def oracle(view: PlayerView):
        return view.composition.prefix(budget)
    return oracle


def crossing_budget_limit(n: int) -> int:
    """Largest budget ``n - ceil(log2(n) / 2) - 2`` under which crossing collisions are guaranteed."""
    return n - (ceil_log2(n) + 1) // 2 - 2


def uniform_budget_limit(n: int) -> int:
    return crossing_budget_limit(n) - 1


def trivial_protocol(n: int, k: int) -> ProtocolDef:
    """Player ``k-1`` writes ``x``; player ``k`` walks to layer ``k-1`` and reads the answer."""

    def answer(view):
        return view.messages[k - 2].bit(follow_view(view, k - 1))

    return ProtocolDef(
        n=n,
        k=k,
        view_model=ViewModel.COLLAPSING,
        budgets=(0,) * (k - 2) + (n,),
        messages=(_silent,) * (k - 2) + (_emit_composition,),
        output=answer,
        name="trivial",
    )


def reordered_protocol(n: int, k: int, j: int, i: int) -> ProtocolDef:
    """Two-speaker protocol for a speaking order in which player ``j`` precedes player ``i < j``.

    Player ``j`` announces the layer ``j-1`` vertex in ``ceil(log2 n)`` bits;
    player ``i`` follows ``f_j..f_{k-1}`` from it and writes the answer bit,
    which the final speaker copies.  When ``i`` itself is the final speaker
    (only possible for ``k = 2``) it answers directly.
    """
    if not 1 <= i < j <= k:
        raise PreconditionViolated(f"reordered protocol needs 1 <= i < j <= k, got i={i}, j={j}, k={k}")
    width = ceil_log2(n)
    order = (j, i) + tuple(p for p in range(1, k + 1) if p not in (i, j))

    def announce(view):
        return BitString.from_int(follow_view(view, j - 1) - 1, width)

    def finish(view):
        v = view.messages[0].to_int() + 1
        for layer in range(j, k):
            v = view.f(layer)(v)
        return view.x.bit(v)

    if k == 2:
        messages = (announce,)
        budgets = (width,)
        output = finish
    else:
        messages = (announce, lambda view: BitString((finish(view),))) + (_silent,) * (k - 3)
        budgets = (width, 1) + (0,) * (k - 3)

        def output(view):
            return view.messages[1].bit(1)

    return ProtocolDef(
        n=n,
        k=k,
        view_model=ViewModel.GENERAL_NOF,
        budgets=budgets,
        messages=messages,
        output=output,
        speaking_order=order,
        name="reordered",
        params={"i": i, "j": j},
    )


class TreeShapeError(ValueError):
    """Instance does not respect the tree layout of a TPJ shape."""


class TpjShape(InstanceSpace):
    """Tree-shaped instances: ``b`` children per vertex, ``n = b**(k-1)`` leaves.

    Layer ``j`` holds ``b**j`` tree vertices numbered ``1..b**j``; vertex ``v``
    of layer ``j-1`` owns the child block ``(v-1)*b + 1 .. v*b``.  Entries of
    vertices outside the tree are fixed to 1 in the enumeration and ignored
    by ``check``.
    """

    def __init__(self, b: int, k: int):
        if b < 2:
            raise ValueError(f"branching must be >= 2, got {b}")
        super().__init__(b ** (k - 1), k)
        self.b = b

    @classmethod
    def from_n(cls, n: int, k: int) -> "TpjShape":
        b = round(n ** (1 / (k - 1)))
        for cand in (b - 1, b, b + 1):
            if cand >= 2 and cand ** (k - 1) == n:
                return cls(cand, k)
        raise PreconditionViolated(f"n={n} is not a perfect power b**{k - 1} with b >= 2")

    def tree_size(self, layer: int) -> int:
        return self.b ** layer

    def start_domain(self):
        return range(1, self.b + 1)

    def pointer_domain(self, layer, v):
        if v <= self.tree_size(layer - 1):
            return range((v - 1) * self.b + 1, v * self.b + 1)
        return (1,)

    def check(self, start, fns) -> None:
        """Raise ``TreeShapeError`` unless ``start`` and the visible ``f_j`` respect the tree."""
        if start is not None and not 1 <= start <= self.b:
            raise TreeShapeError(f"start {start} is not a layer-1 tree vertex (1..{self.b})")
        for layer, f in fns.items():
            for v in range(1, self.tree_size(layer - 1) + 1):
                if f(v) not in self.pointer_domain(layer, v):
                    raise TreeShapeError(f"f_{layer}({v}) = {f(v)} leaves the child block of {v}")


def tpj_protocol(shape: TpjShape) -> ProtocolDef:
    """Player 1 tabulates the answer for every layer-1 tree vertex; player ``k`` indexes it by start."""
    b, k, n = shape.b, shape.k, shape.n

    def table(view):
        shape.check(None, view.middles)
        bits = []
        for u in range(1, b + 1):
            v = u
            for layer in range(2, k):
                v = view.f(layer)(v)
            bits.append(view.x.bit(v))
        return BitString(tuple(bits))

    def answer(view):
        shape.check(view.start, {})
        return view.messages[0].bit(view.start)

    return ProtocolDef(
        n=n,
        k=k,
        view_model=ViewModel.GENERAL_NOF,
        budgets=(b,) + (0,) * (k - 2),
        messages=(table,) + (_silent,) * (k - 2),
        output=answer,
        name="tpj",
        params={"b": b},
    )


def cheating_protocol(base: str, n: int, k: int, budget_total=None) -> ProtocolDef:
    """Collapsing protocol with total budget at most ``n - 3`` (0 when ``n <= 3``).

    ``truncated-trivial``: player ``k-1`` writes the first ``budget`` bits of
    ``x`` and the output defaults to 0 past them.  ``first-player``: player 1
    writes the first ``budget`` bits of its composition, which is the answer
    table indexed by start.  ``silent``: nobody writes and the output is 0.
    """
    if base not in CHEATING_BASES:
        raise ValueError(f"unknown cheating base {base!r}; expected one of {CHEATING_BASES}")
    limit = max(n - 3, 0)
    if base == "silent":
        budget = 0
    else:
        budget = limit if budget_total is None else int(budget_total)
    if budget < 0 or budget > limit:
        raise PreconditionViolated(
            f"budget {budget} violates sum(t) <= n-3 = {n - 3} for a cheating protocol"
        )

    if base == "silent":
        return ProtocolDef(
            n=n, k=k, view_model=ViewModel.COLLAPSING,
            budgets=(0,) * (k - 1), messages=(_silent,) * (k - 1),
            output=lambda view: 0, name="silent",
        )

    if base == "truncated-trivial":
        def guess(view):
            v = follow_view(view, k - 1)
            return view.messages[k - 2].bit(v) if v <= budget else 0

        return ProtocolDef(
            n=n, k=k, view_model=ViewModel.COLLAPSING,
            budgets=(0,) * (k - 2) + (budget,),
            messages=(_silent,) * (k - 2) + (_emit_prefix(budget),),
            output=guess, name=base, params={"budget": budget},
        )

    def optimistic(view):
        return view.messages[0].bit(view.start) if view.start <= budget else 0

    return ProtocolDef(
        n=n, k=k, view_model=ViewModel.COLLAPSING,
        budgets=(budget,) + (0,) * (k - 2),
        messages=(_emit_prefix(budget),) + (_silent,) * (k - 2),
        output=optimistic, name=base, params={"budget": budget},
    )


def uniform_truncation_protocol(n: int, k: int, budget=None) -> ProtocolDef:
    """Every speaker writes a prefix of its composition; each budget stays below the max-cost bound."""
    limit = uniform_budget_limit(n)
    budget = limit if budget is None else int(budget)
    if budget < 0 or budget > limit:
        raise PreconditionViolated(
            f"per-speaker budget {budget} exceeds n - ceil(log2(n)/2) - 3 = {limit}"
        )

    def guess(view):
        if view.start <= budget:
            return view.messages[0].bit(view.start)
        v = follow_view(view, k - 1)
        return view.messages[k - 2].bit(v) if v <= budget else 0

    return ProtocolDef(
        n=n, k=k, view_model=ViewModel.COLLAPSING,
        budgets=(budget,) * (k - 1),
        messages=(_emit_prefix(budget),) * (k - 1),
        output=guess, name="uniform-truncated", params={"budget": budget},
    )


def protocol_from_name(descriptor: str, n: int, k: int) -> ProtocolDef:
    """Build a protocol from ``NAME[:PARAM[:PARAM]]``.

    ``trivial``, ``silent``, ``truncated-trivial[:B]``, ``first-player[:B]``,
    ``uniform-truncated[:B]``, ``reordered[:I:J]`` (default ``1:2``) and
    ``tpj[:B]`` (branching inferred from ``n`` and ``k`` when omitted).
    """
    name, *args = descriptor.split(":")
    try:
        ints = [int(a) for a in args]
    except ValueError:
        raise ValueError(f"protocol parameters must be integers: {descriptor!r}") from None
    if name == "trivial" and not ints:
        return trivial_protocol(n, k)
    if name in CHEATING_BASES and len(ints) <= 1:
        return cheating_protocol(name, n, k, ints[0] if ints else None)
    if name == "uniform-truncated" and len(ints) <= 1:
        return uniform_truncation_protocol(n, k, ints[0] if ints else None)
    if name == "reordered" and len(ints) in (0, 2):
        i, j = ints or (1, 2)
        return reordered_protocol(n, k, j=j, i=i)
    if name == "tpj" and len(ints) <= 1:
        shape = TpjShape.from_n(n, k)
        if ints and ints[0] != shape.b:
            raise PreconditionViolated(f"tpj:{ints[0]} needs n = {ints[0]}**{k - 1}, got n={n}")
        return tpj_protocol(shape)
    raise ValueError(f"unknown protocol {descriptor!r}")
