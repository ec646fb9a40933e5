"""Exception types shared across the package."""


class PreconditionViolated(ValueError):
    """Raised when an operation is called outside the range where it is guaranteed to work."""


class BudgetViolation(ValueError):
    """A message oracle emitted a message whose length differs from its declared budget."""

    def __init__(self, speaker, expected, got):
        self.speaker = speaker
        self.expected = expected
        self.got = got
        super().__init__(
            f"speaker {speaker} emitted {got} bits but its budget is {expected}"
        )


class NoCollision(RuntimeError):
    """A pigeonhole search exhausted its candidates without finding a collision."""


class ConstructionFailed(RuntimeError):
    """The adversary could not complete a fooling construction."""


class CapExceeded(RuntimeError):
    """An exhaustive enumeration would exceed the configured work cap."""
