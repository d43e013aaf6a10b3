"""Exception types shared across the package."""


class WeakApproxError(Exception):
    """Base class for all package errors."""


class ContractError(WeakApproxError, ValueError):
    """An argument violates a documented precondition (shape, range)."""


class DomainError(WeakApproxError, ValueError):
    """A state or argument lies outside the domain of a function."""


class ConfigurationError(WeakApproxError, ValueError):
    """Invalid model parameters, run settings or data tables."""


class FlowDivergence(WeakApproxError, ArithmeticError):
    """A numerical flow produced non-finite values.

    ``sub_time`` is the fraction of the requested flow time reached when the
    first non-finite value appeared.
    """

    def __init__(self, message, sub_time=None):
        super().__init__(message)
        self.sub_time = sub_time


class StepFailure(WeakApproxError, ArithmeticError):
    """A scheme step failed (non-finite result or rejected state).

    Attributes
    ----------
    step : int or None
        Zero-based time step index, attached by the path simulator.
    sample : int or None
        Index of the first failing sample within the batch.
    state : ndarray or None
        State of that sample at the point of failure.
    point_index : int or None
        Global point index, attached by the estimator.
    """

    def __init__(self, message, step=None, sample=None, state=None):
        super().__init__(message)
        self.reason = message
        self.step = step
        self.sample = sample
        self.state = state
        self.point_index = None

    def __str__(self):
        parts = [self.reason]
        if self.step is not None:
            parts.append(f"step={self.step}")
        if self.point_index is not None:
            parts.append(f"point={self.point_index}")
        elif self.sample is not None:
            parts.append(f"sample={self.sample}")
        if self.state is not None:
            parts.append(f"state={list(map(float, self.state))}")
        return " ".join(parts)


class EstimationError(WeakApproxError, ArithmeticError):
    """The sampled function returned a non-finite value."""

    def __init__(self, message, point_index):
        super().__init__(message)
        self.point_index = point_index
