import hashlib
import random

import pytest

from mpjlab.core import BitString, dominance_less
from mpjlab.lemmas import FoolingState, MessageOracle
from mpjlab.protocol import ProtocolDef, ViewModel


def _digest(*parts):
    h = hashlib.blake2b(repr(parts).encode(), digest_size=16)
    return int.from_bytes(h.digest(), "big")


def hashed_oracle(t, seed, speaker=0):
    """Pseudo-random message oracle on strings; deterministic in ``seed``."""
    mask = (1 << t) - 1

    def fn(s):
        return BitString.from_int(_digest(seed, s.bits) & mask, t)

    return MessageOracle(fn, t, speaker)


def _view_key(view):
    return (
        view.player,
        tuple(str(m) for m in view.messages),
        view.start,
        tuple(sorted((j, f.table) for j, f in view.middles.items())),
        None if view.composition is None else view.composition.bits,
    )


def hashed_protocol(n, k, budgets, seed):
    """Collapsing protocol whose messages and output are hashes of the full view."""

    def make(t):
        mask = (1 << t) - 1
        return lambda view: BitString.from_int(_digest(seed, _view_key(view)) & mask, t)

    return ProtocolDef(
        n=n,
        k=k,
        view_model=ViewModel.COLLAPSING,
        budgets=tuple(budgets),
        messages=tuple(make(t) for t in budgets),
        output=lambda view: _digest(seed, "out", _view_key(view)) & 1,
        name="hashed",
        params={"seed": seed},
    )


def random_budgets(rng, n, k, total_max):
    total = rng.randint(0, total_max)
    cuts = sorted(rng.randint(0, total) for _ in range(k - 2))
    edges = [0] + cuts + [total]
    return [b - a for a, b in zip(edges, edges[1:])]


def random_dominated_state(rng, n, k=6):
    """Stage-1 fooling state with ``x < y``."""
    while True:
        y = [rng.randint(0, 1) for _ in range(n)]
        x = [b if rng.random() < 0.5 else 0 for b in y]
        if x != y:
            break
    xs, ys = BitString(x), BitString(y)
    assert dominance_less(xs, ys)
    v = rng.choice([j for j in range(1, n + 1) if x[j - 1] != y[j - 1]])
    return FoolingState(n, k, v, (), (BitString(()),), xs, ys, v)


def random_fooling_state(rng, n, k=6):
    while True:
        x = [rng.randint(0, 1) for _ in range(n)]
        y = [rng.randint(0, 1) for _ in range(n)]
        if x != y:
            break
    v = rng.choice([j for j in range(1, n + 1) if x[j - 1] != y[j - 1]])
    return FoolingState(n, k, v, (), (BitString(()),), BitString(x), BitString(y), v)


@pytest.fixture
def rng():
    return random.Random(20240611)


# one line per acceptance criterion at the end of the run
_ACCEPTANCE = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _ACCEPTANCE.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _ACCEPTANCE:
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}")
