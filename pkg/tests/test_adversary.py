import dataclasses
import json
import random

import pytest

from mpjlab.adversary import (
    FoolingCertificate,
    attack,
    attack_trace,
    attack_uniform,
    is_consistent,
    speaker_oracle,
    stage_pairs,
    verify_certificate,
)
from mpjlab.core import BitString, PointerFn, compose_suffix, evaluate
from mpjlab.errors import PreconditionViolated
from mpjlab.protocol import ProtocolDef, ViewModel, build_view, run
from mpjlab.protocols import (
    cheating_protocol,
    reordered_protocol,
    trivial_protocol,
    uniform_truncation_protocol,
)

from conftest import hashed_protocol, random_budgets


def collapsing_views(protocol, inst, transcript):
    return [build_view(inst, protocol, s, transcript.messages[: s - 1]) for s in range(1, protocol.k)]


def test_truncated_trivial_n10():
    p = cheating_protocol("truncated-trivial", 10, 3, 7)
    cert = attack(p)
    assert verify_certificate(p, cert)
    assert cert.outputs[0] != cert.outputs[1]
    assert cert.protocol == {"name": "truncated-trivial", "params": {"budget": 7}, "budgets": [0, 7]}


def test_silent_n8_k4():
    p = cheating_protocol("silent", 8, 4)
    cert = attack(p)
    assert [str(m) for m in cert.transcript] == ["", "", ""]
    assert sorted(cert.outputs) == [0, 1]
    assert verify_certificate(p, cert)


def test_trivial_is_out_of_scope():
    with pytest.raises(PreconditionViolated, match="n-3"):
        attack(trivial_protocol(8, 3))


@pytest.mark.parametrize("make", [
    lambda: reordered_protocol(8, 3, j=2, i=1),
    lambda: cheating_protocol("silent", 7, 3),
    lambda: cheating_protocol("silent", 8, 2),
])
def test_attack_preconditions(make):
    with pytest.raises(PreconditionViolated):
        attack(make())


def test_attack_uniform_examples():
    p = cheating_protocol("silent", 8, 5)
    assert verify_certificate(p, attack_uniform(p))
    p = uniform_truncation_protocol(12, 3)
    # 12 - ceil(0.5 * log2 12) - 3 = 7
    assert p.budgets == (7, 7)
    assert verify_certificate(p, attack_uniform(p))


def test_attack_uniform_rejects_full_budget():
    p = ProtocolDef(8, 3, ViewModel.COLLAPSING, (0, 8),
                    (lambda v: "", lambda v: v.composition), lambda v: 0)
    with pytest.raises(PreconditionViolated):
        attack_uniform(p)
    p = ProtocolDef(8, 3, ViewModel.COLLAPSING, (8, 0),
                    (lambda v: v.composition, lambda v: ""), lambda v: 0)
    with pytest.raises(PreconditionViolated):
        attack_uniform(p)


def test_attack_uniform_allows_large_first_speaker():
    p = ProtocolDef(8, 3, ViewModel.COLLAPSING, (7, 0),
                    (lambda v: v.composition.prefix(7), lambda v: ""), lambda v: 0)
    assert verify_certificate(p, attack_uniform(p))


@pytest.mark.parametrize("seed", range(40))
def test_soundness_on_hashed_protocols(seed):
    rng = random.Random(seed)
    n, k = rng.choice([8, 9, 10]), rng.randint(3, 5)
    budgets = random_budgets(rng, n, k, n - 3)
    p = hashed_protocol(n, k, budgets, seed)
    cert = attack(p)
    assert verify_certificate(p, cert)
    a, b = cert.instances()
    ta, tb = run(p, a), run(p, b)
    # transcript-blindness: the views differ only in the compositions, which the messages cannot separate
    for h, (va, vb) in enumerate(zip(collapsing_views(p, a, ta), collapsing_views(p, b, tb)), start=1):
        assert dataclasses.replace(va, composition=None) == dataclasses.replace(vb, composition=None)
        assert va.composition == compose_suffix(a, h) and vb.composition == compose_suffix(b, h)
        assert p.messages[h - 1](va) == p.messages[h - 1](vb) == cert.transcript[h - 1]


@pytest.mark.parametrize("seed", range(15))
def test_stage_invariant_replay(seed):
    rng = random.Random(100 + seed)
    n, k = 8, rng.randint(3, 6)
    p = hashed_protocol(n, k, random_budgets(rng, n, k, n - 3), seed)
    trace = attack_trace(p)
    assert len(trace) == k - 1
    cert = attack(p)
    pairs = stage_pairs(cert)
    for j, (_, st) in enumerate(trace, start=1):
        assert st.j == j
        assert (st.x, st.y) == pairs[j - 1]
        assert is_consistent(p, st)
        assert compose_suffix(cert.instances()[0], j) == st.x


def test_trace_follows_the_case_split():
    # budgets (0, 0, 0, 2, 0): chain phase for speakers 2 and 3, push at 4, crosspush at 5
    p = hashed_protocol(8, 6, (0, 0, 0, 2, 0), 1)
    steps = [name for name, _ in attack_trace(p)]
    assert steps == ["chain-start", "chainpush", "chainpush", "push", "crosspush"]
    # a quiet chain reaching the last speaker ends with one push
    p = cheating_protocol("silent", 8, 4)
    assert [name for name, _ in attack_trace(p)] == ["chain-start", "chainpush", "push"]
    # a loud first speaker switches to crossing pairs
    p = cheating_protocol("first-player", 8, 4, 5)
    assert [name for name, _ in attack_trace(p)] == ["collision-start", "crosspush", "crosspush"]


def test_is_consistent_detects_wrong_messages():
    p = hashed_protocol(8, 4, (1, 1, 1), 5)
    st = attack_trace(p)[-1][1]
    assert is_consistent(p, st)
    flipped = BitString((1 - st.alphas[1].bit(1),))
    bad = dataclasses.replace(st, alphas=(st.alphas[0], flipped, st.alphas[2]))
    assert not is_consistent(p, bad)


def test_speaker_oracle_needs_matching_stage():
    p = hashed_protocol(8, 4, (1, 1, 1), 5)
    with pytest.raises(ValueError):
        speaker_oracle(p, 2)
    st = attack_trace(p)[0][1]
    assert speaker_oracle(p, 2, st).budget == 1


def test_verify_rejects_equal_strings():
    p = cheating_protocol("silent", 8, 4)
    cert = dataclasses.replace(attack(p), x_prime=attack(p).x)
    verdict = verify_certificate(p, cert)
    assert not verdict and "both inputs" in verdict.reason


def test_verify_rejects_every_middle_mutation():
    p = cheating_protocol("truncated-trivial", 8, 4, 5)
    cert = attack(p)
    assert verify_certificate(p, cert)
    rejected = 0
    for layer, f in enumerate(cert.middles):
        for v in range(1, 9):
            for w in range(1, 9):
                if w == f(v):
                    continue
                table = list(f.table)
                table[v - 1] = w
                middles = cert.middles[:layer] + (PointerFn(tuple(table)),) + cert.middles[layer + 1:]
                mutated = dataclasses.replace(cert, middles=middles)
                a, b = mutated.instances()
                still_fools = (evaluate(a) != evaluate(b)
                               and (evaluate(a), evaluate(b)) == cert.outputs
                               and run(p, a) == run(p, b)
                               and run(p, a).messages == cert.transcript)
                assert bool(verify_certificate(p, mutated)) == still_fools
                rejected += not still_fools
    assert rejected > 0


def test_verify_rejects_flipped_outputs_and_wrong_transcript():
    p = cheating_protocol("first-player", 10, 3, 7)
    cert = attack(p)
    assert not verify_certificate(p, dataclasses.replace(cert, outputs=cert.outputs[::-1]))
    wrong = tuple(BitString((1 - m.bit(1),) + m.bits[1:]) if len(m) else m for m in cert.transcript)
    assert not verify_certificate(p, dataclasses.replace(cert, transcript=wrong))


def test_verify_rejects_other_protocol():
    cert = attack(cheating_protocol("truncated-trivial", 10, 3, 7))
    verdict = verify_certificate(cheating_protocol("truncated-trivial", 10, 3, 6), cert)
    assert not verdict
    with pytest.raises(ValueError):
        verify_certificate(cheating_protocol("silent", 9, 3), cert)


def test_certificate_json_roundtrip():
    cert = attack(cheating_protocol("truncated-trivial", 10, 3, 7))
    text = cert.to_json()
    assert FoolingCertificate.from_json(text) == cert
    data = json.loads(text)
    assert list(data) == ["n", "k", "protocol", "start", "middles", "x", "x_prime", "transcript", "outputs"]
    assert data["transcript"][1] == data["x"][:7]


@pytest.mark.parametrize("text", ['{"n": 3', "[]", '{"n": 3}', '{"n": 3, "k": 3, "protocol": 5}'])
def test_malformed_certificates(text):
    with pytest.raises(ValueError):
        FoolingCertificate.from_json(text)
