"""Exception hierarchy. Each class carries a stable ``code`` used by the CLI."""


class ZonolipError(Exception):
    """Base class for all errors raised by this package."""

    code = "error"


class DimensionMismatch(ZonolipError):
    """Operands have incompatible dimensions."""

    code = "dimension-mismatch"


class SchemaError(ZonolipError):
    """A model file violates the zonolip-net/1 schema."""

    code = "schema"


class ChainMismatchError(ZonolipError):
    """Adjacent layer dimensions of a model file do not chain."""

    code = "chain-mismatch"


class NonFiniteWeightError(ZonolipError):
    """A model file contains NaN or infinite weights."""

    code = "non-finite-weight"


class InternalInvariantError(ZonolipError):
    """An internal invariant was violated; indicates a bug, not bad input."""

    code = "internal"
