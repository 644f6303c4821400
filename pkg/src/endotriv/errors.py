class EndotrivError(Exception):
    """Base class for all library errors."""


class ValidationError(EndotrivError, ValueError):
    """Malformed input: a module, group, embedding or schema violation."""


class FieldMismatch(ValidationError):
    pass


class DimensionError(ValidationError):
    pass


class NoSolution(EndotrivError, ArithmeticError):
    pass


class CapExceeded(EndotrivError):
    def __init__(self, cap, message):
        super().__init__(message)
        self.cap = cap


class NotHomomorphism(ValidationError):
    def __init__(self, pair, message=None):
        super().__init__(message or f"images do not respect the product {pair}")
        self.pair = pair


class NotInjective(ValidationError):
    pass


class NotAPGroup(ValidationError):
    pass


class UnsupportedGroupShape(EndotrivError):
    pass


class NotEndotrivial(EndotrivError):
    pass


class ExpressionNotFound(EndotrivError):
    pass


class Undetermined(EndotrivError):
    """A search ran out before it could prove either answer."""
