"""Exception types raised across the package."""


class RatesError(Exception):
    """Base class for all package errors."""


class InvalidOrderError(RatesError, ValueError):
    """Constellation order not admissible for the requested family."""


class InvalidSpecError(RatesError, ValueError):
    """Ring geometry inconsistent with the requested constellation."""


class DegenerateEnergyError(RatesError, ValueError):
    """Constellation has zero average energy and cannot be normalized."""


class InvalidInputError(RatesError, ValueError):
    pass


class ContractError(RatesError, ValueError):
    """An estimator received input outside its contract (e.g. unnormalized points)."""


class PreconditionError(RatesError, ValueError):
    """Channel parameters violate a modelling precondition (e.g. degradedness)."""


class TooLargeError(RatesError, ValueError):
    """Joint alphabet exceeds the quadrature size limit."""


class NumericalError(RatesError, ArithmeticError):
    """A non-finite intermediate value appeared in an estimator."""
