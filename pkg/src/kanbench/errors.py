"""Exception types shared across the library."""


class ShapeError(ValueError):
    """Array dimensions do not satisfy an operation's contract."""


class ConfigError(ValueError):
    """A configuration value is invalid (bad sizes, inverted ranges, ...)."""


class DataError(ValueError):
    """A dataset violates its schema (bad cell, unknown label, bad class)."""


class UsageError(RuntimeError):
    """An API was called out of order, e.g. backward with a foreign cache."""


class DivergenceError(RuntimeError):
    """Training produced a non-finite loss.

    Carries the epoch index at which the divergence was detected, the
    network state at that point, and the losses of the completed epochs so
    callers can still evaluate the (diverged) model.
    """

    def __init__(self, epoch, network, losses):
        super().__init__(f"non-finite training loss at epoch {epoch}")
        self.epoch = epoch
        self.network = network
        self.losses = losses
