class PredicateError(ValueError):
    """A weight (or parameter) fails a hypothesis the computation relies on."""


class BudgetExceeded(RuntimeError):
    """An explicit work budget ran out before the computation finished.

    ``partial`` carries whatever was counted before stopping.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class MembershipError(PredicateError):
    """An eigenvector field does not belong to the weighted space."""


class IllConditionedError(ArithmeticError):
    def __init__(self, message, condition):
        super().__init__(message)
        self.condition = condition
