"""Exception types shared across the package."""


class SelmonError(Exception):
    """Base class for all package errors."""


class TypeMismatch(SelmonError):
    """A value, table, or sequence does not fit the expected finite type."""


class CardinalityExceeded(SelmonError):
    """An enumeration would exceed the configured cardinality cap."""

    def __init__(self, what, cardinality, cap):
        super().__init__(f"{what}: cardinality {cardinality} exceeds cap {cap}")
        self.what = what
        self.cardinality = cardinality
        self.cap = cap


class DepthExceeded(SelmonError):
    """A controlled recursion ran past its depth guard.

    Signals a stopping function that violates its declared bound.
    """


class ParseError(SelmonError):
    """Input file is not valid JSON."""


class SchemaError(SelmonError):
    """JSON input does not match the instance schema."""

    def __init__(self, message, location=""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


class InvariantError(SelmonError):
    """A structurally valid instance violates a semantic invariant."""
