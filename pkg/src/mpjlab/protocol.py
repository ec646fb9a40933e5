"""One-round, fixed-order blackboard protocols and their cost accounting.

A protocol for ``k`` players has ``k - 1`` message-sending positions in its
speaking order; the player at position ``k`` writes the single output bit.
Each sender has a fixed budget, and ``run`` rejects any message of the
wrong length.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

from .core import BitString, PointerFn
from .errors import BudgetViolation

__all__ = [
    "ViewModel",
    "PlayerView",
    "ProtocolDef",
    "Transcript",
    "build_view",
    "collapsing_view",
    "run",
    "total_cost",
    "max_cost",
    "follow_view",
]


class ViewModel(str, enum.Enum):
    GENERAL_NOF = "GeneralNOF"
    COLLAPSING = "Collapsing"
    CONSERVATIVE = "Conservative"
    MYOPIC = "Myopic"


@dataclass(frozen=True)
class PlayerView:
    """What a player sees when it is their turn.

    ``middles`` maps a layer index ``j`` to the visible ``f_j``.  Fields the
    view model hides are ``None`` (or absent from ``middles``).
    """

    player: int
    messages: tuple = ()
    start: Optional[int] = None
    middles: Mapping[int, PointerFn] = field(default_factory=dict)
    composition: Optional[BitString] = None
    x: Optional[BitString] = None
    behind: Optional[int] = None

    def f(self, j: int) -> PointerFn:
        try:
            return self.middles[j]
        except KeyError:
            raise KeyError(f"f_{j} is not visible to player {self.player}") from None


def follow_view(view: PlayerView, layer: int) -> int:
    """Follow pointers from the visible start through ``f_2..f_layer``."""
    v = view.start
    if v is None:
        raise KeyError(f"start is not visible to player {view.player}")
    for j in range(2, layer + 1):
        v = view.f(j)(v)
    return v


@dataclass(frozen=True)
class ProtocolDef:
    """A deterministic protocol.

    ``messages[s - 1]`` is the oracle of the speaker at position ``s`` and
    must return a string of exactly ``budgets[s - 1]`` bits.  ``output``
    maps the final speaker's view (carrying all ``k - 1`` messages) to a bit.
    """

    n: int
    k: int
    view_model: ViewModel
    budgets: tuple
    messages: tuple
    output: Callable[[PlayerView], int]
    speaking_order: Optional[tuple] = None
    name: str = "custom"
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        k = self.k
        if self.n < 1 or k < 2:
            raise ValueError(f"need n >= 1 and k >= 2, got n={self.n}, k={k}")
        object.__setattr__(self, "view_model", ViewModel(self.view_model))
        object.__setattr__(self, "budgets", tuple(int(t) for t in self.budgets))
        object.__setattr__(self, "messages", tuple(self.messages))
        if len(self.budgets) != k - 1 or len(self.messages) != k - 1:
            raise ValueError(f"a {k}-player protocol needs {k - 1} budgets and message oracles")
        if any(t < 0 for t in self.budgets):
            raise ValueError(f"negative budget in {self.budgets}")
        order = tuple(range(1, k + 1)) if self.speaking_order is None else tuple(self.speaking_order)
        if sorted(order) != list(range(1, k + 1)):
            raise ValueError(f"speaking order {order} is not a permutation of 1..{k}")
        object.__setattr__(self, "speaking_order", order)

    @property
    def total_cost(self) -> int:
        return sum(self.budgets)

    @property
    def max_cost(self) -> int:
        return max(self.budgets)

    def identifier(self) -> dict:
        return {"name": self.name, "params": dict(self.params), "budgets": list(self.budgets)}


def total_cost(protocol: ProtocolDef) -> int:
    return protocol.total_cost


def max_cost(protocol: ProtocolDef) -> int:
    return protocol.max_cost


@dataclass(frozen=True)
class Transcript:
    messages: tuple
    output: int

    @property
    def total_cost(self) -> int:
        return sum(len(m) for m in self.messages)

    @property
    def max_cost(self) -> int:
        return max((len(m) for m in self.messages), default=0)

    def to_dict(self) -> dict:
        return {
            "messages": [str(m) for m in self.messages],
            "output": self.output,
            "total_cost": self.total_cost,
            "max_cost": self.max_cost,
        }


def collapsing_view(player, k, messages=(), start=None, middles=None, composition=None):
    """Collapsing view assembled from parts rather than from a full instance.

    Used by the adversary, which knows only the prefix and a candidate suffix
    composition.  ``middles`` must hold exactly ``f_2..f_{player-1}``.
    """
    return PlayerView(
        player=player,
        messages=tuple(messages),
        start=start if player >= 2 else None,
        middles=dict(middles or {}),
        composition=composition if player < k else None,
    )


def build_view(inst, protocol: ProtocolDef, position: int, messages=()) -> PlayerView:
    """View of the speaker at ``position`` (1-based) in ``protocol.speaking_order``."""
    n, k = protocol.n, protocol.k
    if inst.n != n or inst.k != k:
        raise ValueError(
            f"instance has n={inst.n}, k={inst.k} but protocol expects n={n}, k={k}"
        )
    if not 1 <= position <= k:
        raise ValueError(f"speaker position {position} outside 1..{k}")
    player = protocol.speaking_order[position - 1]
    messages = tuple(messages)
    model = protocol.view_model

    if model is ViewModel.GENERAL_NOF:
        return PlayerView(
            player=player,
            messages=messages,
            start=inst.start if player != 1 else None,
            middles={j: inst.f(j) for j in range(2, k) if j != player},
            x=inst.x if player != k else None,
        )
    if model is ViewModel.COLLAPSING:
        return PlayerView(
            player=player,
            messages=messages,
            start=inst.start if player >= 2 else None,
            middles={j: inst.f(j) for j in range(2, player)},
            composition=inst.suffix(player) if player < k else None,
        )
    if model is ViewModel.CONSERVATIVE:
        behind = None
        if player >= 2:
            behind = inst.start
            for j in range(2, player):
                behind = inst.f(j)(behind)
        return PlayerView(
            player=player,
            messages=messages,
            behind=behind,
            middles={j: inst.f(j) for j in range(player + 1, k)},
            x=inst.x if player < k else None,
        )
    if model is ViewModel.MYOPIC:
        middles = {j: inst.f(j) for j in range(2, player)}
        if player + 1 <= k - 1:
            middles[player + 1] = inst.f(player + 1)
        return PlayerView(
            player=player,
            messages=messages,
            start=inst.start if player >= 2 else None,
            middles=middles,
            x=inst.x if player == k - 1 else None,
        )
    raise ValueError(f"unknown view model {model!r}")


def _as_bits(message) -> BitString:
    if isinstance(message, BitString):
        return message
    return BitString(tuple(message) if not isinstance(message, str) else message)


def run(protocol: ProtocolDef, inst) -> Transcript:
    """Execute ``protocol`` on ``inst`` in speaking order."""
    k = protocol.k
    messages = []
    for position in range(1, k):
        view = build_view(inst, protocol, position, messages)
        message = _as_bits(protocol.messages[position - 1](view))
        if len(message) != protocol.budgets[position - 1]:
            raise BudgetViolation(position, protocol.budgets[position - 1], len(message))
        messages.append(message)
    final = build_view(inst, protocol, k, messages)
    output = protocol.output(final)
    if output not in (0, 1):
        raise ValueError(f"output oracle returned {output!r}, expected a bit")
    return Transcript(tuple(messages), int(output))
