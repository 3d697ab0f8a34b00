"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or out-of-range input."""


class UnsupportedVariantError(InputError):
    """The operation is not available for this kind of space."""


class ResourceError(RuntimeError):
    """An iteration or size cap was hit."""


class InvariantViolation(AssertionError):
    """A checked mathematical invariant failed beyond tolerance."""
