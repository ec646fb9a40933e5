"""Constructive attack on collapsing protocols that communicate too little.

Given a collapsing protocol whose budgets sum to at most ``n - 3``, the
attack builds two inputs that share ``start, f_2..f_{k-1}``, produce the
same transcript, and have different answers.  The result is a
``FoolingCertificate`` that anyone can re-check with ``verify_certificate``
using nothing but the protocol and the evaluation function.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import NamedTuple

from .core import BitString, Instance, PointerFn, compose_suffix, evaluate
from .errors import ConstructionFailed, NoCollision, PreconditionViolated
from .lemmas import (
    FoolingState,
    MessageOracle,
    chain_threshold,
    chainpush,
    crossing_threshold,
    crosspush,
    push,
    start_from_chain,
    start_from_collision,
)
from .protocol import ProtocolDef, ViewModel, collapsing_view, run

__all__ = [
    "FoolingCertificate",
    "Verification",
    "attack",
    "attack_uniform",
    "attack_trace",
    "speaker_oracle",
    "is_consistent",
    "verify_certificate",
    "stage_pairs",
    "MIN_N",
]

log = logging.getLogger(__name__)

MIN_N = 8


@dataclass(frozen=True)
class FoolingCertificate:
    n: int
    k: int
    protocol: dict
    start: int
    middles: tuple
    x: BitString
    x_prime: BitString
    transcript: tuple
    outputs: tuple

    def instances(self):
        a = Instance(self.n, self.k, self.start, self.middles, self.x)
        b = Instance(self.n, self.k, self.start, self.middles, self.x_prime)
        return a, b

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "protocol": {
                "name": self.protocol["name"],
                "params": dict(self.protocol.get("params", {})),
                "budgets": list(self.protocol["budgets"]),
            },
            "start": self.start,
            "middles": [list(f.table) for f in self.middles],
            "x": str(self.x),
            "x_prime": str(self.x_prime),
            "transcript": [str(m) for m in self.transcript],
            "outputs": list(self.outputs),
        }

    def to_json(self) -> str:
        """One top-level field per line; byte-identical for equal certificates."""
        fields = [f"  {json.dumps(key)}: {json.dumps(value)}" for key, value in self.to_dict().items()]
        return "{\n" + ",\n".join(fields) + "\n}\n"

    @classmethod
    def from_dict(cls, data: dict) -> "FoolingCertificate":
        """Parse a certificate; raises ``ValueError`` on any malformed field."""
        try:
            proto = data["protocol"]
            return cls(
                n=int(data["n"]),
                k=int(data["k"]),
                protocol={
                    "name": str(proto["name"]),
                    "params": dict(proto.get("params", {})),
                    "budgets": [int(t) for t in proto["budgets"]],
                },
                start=int(data["start"]),
                middles=tuple(PointerFn(tuple(f)) for f in data["middles"]),
                x=BitString(str(data["x"])),
                x_prime=BitString(str(data["x_prime"])),
                transcript=tuple(BitString(str(m)) for m in data["transcript"]),
                outputs=tuple(int(b) for b in data["outputs"]),
            )
        except (KeyError, TypeError, AttributeError) as exc:
            raise ValueError(f"malformed certificate: {exc!r}") from exc

    @classmethod
    def from_json(cls, text: str) -> "FoolingCertificate":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"malformed certificate JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ValueError("certificate JSON must be an object")
        return cls.from_dict(data)


class Verification(NamedTuple):
    ok: bool
    reason: str

    def __bool__(self):
        return self.ok


def speaker_oracle(protocol: ProtocolDef, speaker: int, state=None) -> MessageOracle:
    """The message of ``speaker`` as a function of its suffix composition.

    Everything else the speaker sees (start, ``f_2..f_{speaker-1}`` and the
    earlier messages) is frozen from ``state``.
    """
    if speaker == 1:
        start, middles, alphas = None, {}, ()
    else:
        if state is None or state.j != speaker - 1:
            raise ValueError(f"speaker {speaker} needs a stage-{speaker - 1} state")
        start = state.start
        middles = {j: f for j, f in enumerate(state.fns, start=2)}
        alphas = state.alphas
    message = protocol.messages[speaker - 1]
    k = protocol.k

    def fn(composition):
        return message(collapsing_view(speaker, k, alphas, start, middles, composition))

    return MessageOracle(fn, protocol.budgets[speaker - 1], speaker)


def is_consistent(protocol: ProtocolDef, state: FoolingState) -> bool:
    """Replay players ``1..j`` on views derived from ``x`` and from ``y``."""
    fns = {j: f for j, f in enumerate(state.fns, start=2)}
    for string in (state.x, state.y):
        for h in range(1, state.j + 1):
            composed = string
            # compose back through f_j .. f_{h+1}
            for layer in range(state.j, h, -1):
                f = fns[layer]
                composed = BitString(tuple(composed.bit(f(s)) for s in range(1, state.n + 1)))
            view = collapsing_view(
                h, protocol.k, state.alphas[: h - 1], state.start,
                {j: fns[j] for j in range(2, h)}, composed,
            )
            message = protocol.messages[h - 1](view)
            if not isinstance(message, BitString):
                message = BitString(message)
            if message != state.alphas[h - 1]:
                return False
    return True


def _check_attackable(protocol: ProtocolDef):
    n, k = protocol.n, protocol.k
    if protocol.view_model is not ViewModel.COLLAPSING:
        raise PreconditionViolated(f"attack needs a Collapsing protocol, got {protocol.view_model.value}")
    if protocol.speaking_order != tuple(range(1, k + 1)):
        raise PreconditionViolated("attack needs the identity speaking order")
    if k < 3:
        raise PreconditionViolated(f"attack needs k >= 3, got k={k}")
    if n < MIN_N:
        raise PreconditionViolated(f"attack needs n >= {MIN_N}, got n={n}")


def _run_stage(step, state, oracle):
    try:
        return step(state, oracle)
    except NoCollision as exc:
        raise ConstructionFailed(f"{step.__name__} at speaker {oracle.speaker}: {exc}") from exc


def attack_trace(protocol: ProtocolDef):
    """Run the construction and return ``[(step_name, state), ...]`` for stages ``1..k-1``."""
    _check_attackable(protocol)
    n, k = protocol.n, protocol.k
    budgets = protocol.budgets
    total = sum(budgets)
    if total > n - 3:
        raise PreconditionViolated(f"total budget {total} violates sum(t) <= n-3 = {n - 3}")
    quiet = chain_threshold(n)
    cross_limit = crossing_threshold(n)

    first = speaker_oracle(protocol, 1)
    trace = []
    try:
        if budgets[0] >= quiet:
            trace.append(("collision-start", start_from_collision(first, n, k)))
            chain_alive = False
        else:
            trace.append(("chain-start", start_from_chain(first, n, k)))
            chain_alive = True
    except NoCollision as exc:
        raise ConstructionFailed(f"speaker 1: {exc}") from exc

    for speaker in range(2, k):
        state = trace[-1][1]
        oracle = speaker_oracle(protocol, speaker, state)
        if chain_alive and speaker < k - 1 and budgets[speaker - 1] < quiet:
            step = chainpush
        elif chain_alive:
            step = push
            chain_alive = False
        else:
            if budgets[speaker - 1] > cross_limit:
                raise ConstructionFailed(
                    f"speaker {speaker} has {budgets[speaker - 1]} bits, above the crossing "
                    f"limit {cross_limit}; this cannot happen when sum(t) <= n-3"
                )
            step = crosspush
        trace.append((step.__name__, _run_stage(step, state, oracle)))
        log.debug("stage %d via %s: %s", speaker, step.__name__, trace[-1][1].to_dict())
    return trace


def _certificate(protocol: ProtocolDef, state: FoolingState) -> FoolingCertificate:
    a = Instance(protocol.n, protocol.k, state.start, state.fns, state.x)
    b = Instance(protocol.n, protocol.k, state.start, state.fns, state.y)
    cert = FoolingCertificate(
        n=protocol.n,
        k=protocol.k,
        protocol=protocol.identifier(),
        start=state.start,
        middles=state.fns,
        x=state.x,
        x_prime=state.y,
        transcript=state.alphas,
        outputs=(evaluate(a), evaluate(b)),
    )
    verdict = verify_certificate(protocol, cert)
    if not verdict:
        raise ConstructionFailed(f"constructed certificate does not verify: {verdict.reason}")
    return cert


def attack(protocol: ProtocolDef) -> FoolingCertificate:
    """Fooling certificate against a collapsing protocol with total budget at most ``n - 3``."""
    trace = attack_trace(protocol)
    return _certificate(protocol, trace[-1][1])


def attack_uniform(protocol: ProtocolDef) -> FoolingCertificate:
    """Fooling certificate when every speaker after the first stays below the max-cost bound.

    Requires ``t_1 <= n - 1`` and ``t_i <= n - ceil(log2(n)/2) - 3`` for ``i >= 2``.
    """
    _check_attackable(protocol)
    n, k = protocol.n, protocol.k
    if protocol.budgets[0] > n - 1:
        raise PreconditionViolated(f"speaker 1 budget {protocol.budgets[0]} violates t_1 <= n-1 = {n - 1}")
    limit = crossing_threshold(n) - 1
    for speaker, t in enumerate(protocol.budgets[1:], start=2):
        if t > limit:
            raise PreconditionViolated(
                f"speaker {speaker} budget {t} violates t_i <= n - ceil(log2(n)/2) - 3 = {limit}"
            )
    try:
        state = start_from_collision(speaker_oracle(protocol, 1), n, k)
    except NoCollision as exc:
        raise ConstructionFailed(f"speaker 1: {exc}") from exc
    for speaker in range(2, k):
        state = _run_stage(crosspush, state, speaker_oracle(protocol, speaker, state))
    return _certificate(protocol, state)


def verify_certificate(protocol: ProtocolDef, cert: FoolingCertificate) -> Verification:
    """Independently re-check a certificate against ``protocol``.

    Raises ``ValueError`` only on dimension mismatch; every other defect
    yields a false ``Verification`` carrying the reason.
    """
    if cert.n != protocol.n or cert.k != protocol.k:
        raise ValueError(
            f"certificate is for n={cert.n}, k={cert.k}; protocol has n={protocol.n}, k={protocol.k}"
        )
    ident = protocol.identifier()
    if cert.protocol.get("name") != ident["name"] or list(cert.protocol.get("budgets", [])) != ident["budgets"]:
        return Verification(False, f"certificate names protocol {cert.protocol}, not {ident}")
    if dict(cert.protocol.get("params", {})) != ident["params"]:
        return Verification(False, f"certificate parameters {cert.protocol.get('params')} differ from {ident['params']}")
    try:
        a, b = cert.instances()
    except ValueError as exc:
        return Verification(False, f"certificate inputs are not valid instances: {exc}")
    ea, eb = evaluate(a), evaluate(b)
    if ea == eb:
        return Verification(False, f"both inputs evaluate to {ea}")
    if tuple(cert.outputs) != (ea, eb):
        return Verification(False, f"claimed outputs {list(cert.outputs)} but inputs evaluate to {[ea, eb]}")
    ta, tb = run(protocol, a), run(protocol, b)
    if ta != tb:
        return Verification(False, "the protocol distinguishes the two inputs")
    if tuple(ta.messages) != tuple(cert.transcript):
        return Verification(
            False,
            f"recorded transcript {[str(m) for m in cert.transcript]} differs from "
            f"replayed {[str(m) for m in ta.messages]}",
        )
    wrong = [name for name, truth in (("A", ea), ("B", eb)) if ta.output != truth]
    if not wrong:
        return Verification(False, "protocol output is correct on both inputs")
    return Verification(True, f"protocol outputs {ta.output} on both inputs; wrong on {wrong[0]}")


def stage_pairs(cert: FoolingCertificate):
    """Suffix compositions of both certificate inputs at layers ``1..k-1``."""
    a, b = cert.instances()
    return [(compose_suffix(a, j), compose_suffix(b, j)) for j in range(1, cert.k)]
