"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside the domain of an operation (bad index, non-ideal, ring mismatch)."""


class CapacityError(RuntimeError):
    """A desk-scale guard was exceeded (matrix size, term count, search space)."""


class EvaluationError(ArithmeticError):
    """Evaluation over F_p hit a denominator divisible by p."""


class NotDivisible(ArithmeticError):
    """Exact division failed.

    ``witness`` holds the offending term (as a one-term polynomial) so callers
    can report why divisibility failed.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
