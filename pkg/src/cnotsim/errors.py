"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the domain an operation is defined on."""


class DegenerateBlockError(DomainError):
    """A two-level block carries no population, so Bloch data cannot be embedded."""


class InvalidStateError(ValueError):
    """A state object violates a physical invariant beyond tolerance."""


class StepSizeError(ValueError):
    """Integrator step size too coarse for the fastest scheduled oscillation."""


class NumericalFailureError(RuntimeError):
    """Integration drifted beyond acceptable numerical tolerances.

    Carries the partial trace accumulated up to the failure so callers can
    flush it before aborting.
    """

    def __init__(self, message, partial_trace=None):
        super().__init__(message)
        self.partial_trace = partial_trace


class ConfigError(ValueError):
    """Scenario configuration is malformed; message carries key/line diagnostics."""


class ValidityWarning(UserWarning):
    """A modelling assumption (strong field, coherence budget) is violated."""
