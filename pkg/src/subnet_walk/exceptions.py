"""Exception types callers may want to catch individually."""


class TrainingDivergedError(RuntimeError):
    """Raised when the SGD loss becomes non-finite or exceeds the abort threshold."""

    def __init__(self, step, loss_value):
        self.step = int(step)
        self.loss_value = loss_value
        super().__init__(f"training diverged at step {step} (loss={loss_value!r})")


class IdxFormatError(ValueError):
    """Malformed IDX file: bad magic, inconsistent counts, or truncated payload."""


class GraphDisconnectedError(ValueError):
    """A resistance query was made between nodes in different components."""


class IllConditionedWarning(UserWarning):
    """A Laplacian solve had condition number above the trust threshold."""


class ConfigError(ValueError):
    """Invalid experiment configuration; carries the offending field name."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
