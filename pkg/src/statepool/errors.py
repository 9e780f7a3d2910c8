"""Exception types shared across the toolkit.

All domain errors subclass ValueError so callers that do not care about
the distinction can catch a single type.
"""


class StatePoolError(ValueError):
    """Base class for all domain errors raised by this package."""


class DimensionMismatchError(StatePoolError):
    """Operands act on incompatible spaces."""


class NotPSDError(StatePoolError):
    """An operator required to be positive semidefinite is not."""


class ImpossibleConditioningError(StatePoolError):
    """Conditioning on an event/outcome with zero probability or support."""


class IncompatibleAssignmentsError(StatePoolError):
    """The two agents' state assignments have disjoint supports."""


class PriorSupportError(StatePoolError):
    """The posteriors' common support escapes the support of the prior."""


class NonHermitianPoolingProductError(StatePoolError):
    """The pooling product s1 @ pinv(prior) @ s2 failed the Hermiticity check.

    Signals that the conditional-independence precondition of the pooling
    formula does not hold for these inputs.
    """

    def __init__(self, residual, message=None):
        self.residual = float(residual)
        super().__init__(
            message or f"non-Hermitian pooling product (relative residual {residual:.3e})"
        )
