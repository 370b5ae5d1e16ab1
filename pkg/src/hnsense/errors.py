"""Exception types shared across the package.

Validation problems are ValueErrors, numerical breakdowns are
ArithmeticErrors, and runaway dynamics is a RuntimeError, so callers can
catch by builtin base class without importing this module.
"""


class DomainError(ValueError):
    """A configuration value violates a documented invariant."""


class SingularError(ArithmeticError):
    """A matrix factorization hit an (effectively) zero pivot."""


class DegenerateError(ArithmeticError):
    """A closed-form denominator vanished: the configuration sits on a
    singular point of the perturbed system."""


class DivergenceError(RuntimeError):
    """Time integration blew up; the configuration is dynamically unstable."""


class StepSizeError(ValueError):
    """Integration step/horizon violates the explicit-stability precondition."""
