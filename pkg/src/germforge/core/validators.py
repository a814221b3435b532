"""
Input validators, configuration constants and errors for germforge
"""

import os
from typing import Iterable, Sequence, Tuple


# Default truncation order N of the example pipelines
DEFAULT_ORDER = 12

# Smallest N accepted by the example pipelines
MIN_PIPELINE_ORDER = 6

# Theorem A exploration depth beyond the resolution
DEFAULT_DEPTH = 3

# Sampled generic points per family of singular points
DEFAULT_SAMPLES = 3

# Depth of infinitely-near walks and invariant-curve jets
DEFAULT_CURVE_DEPTH = 8

# Interval sign tests (bits)
START_PRECISION = 53
DEFAULT_PRECISION_CAP = 512
PRECISION_CAP_ENV = "GERMFORGE_PRECISION_CAP"

# Output formats of the command line
SUPPORTED_FORMATS = {
    "json": "JSON document (sorted keys, 2-space indent)",
    "text": "Aligned text tables",
    "dot": "Graphviz DOT (modification trees only)",
}

# Exit codes of the command line
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARSE = 2
EXIT_INVARIANT = 3
EXIT_UNDECIDABLE = 4


class ValidationError(Exception):
    """Custom validation error"""
    pass


class GermParseError(ValidationError):
    """Malformed germ, instance or scalar input"""
    pass


class InvariantViolation(ValidationError):
    """A named structural invariant does not hold"""
    pass


class ClosureFalsification(InvariantViolation):
    """A blow-up child disagrees with the closure table"""

    def __init__(self, direction, expected: str, observed: str):
        self.direction = direction
        self.expected = expected
        self.observed = observed
        super().__init__(
            f"Closure table falsified at direction {direction}\n"
            f"Expected: {expected}\n"
            f"Observed: {observed}"
        )


class UndecidableError(Exception):
    """Exact decision not reached within the configured limits"""
    pass


class InsufficientPrecisionError(UndecidableError):
    """Certified jet degree too low for the requested verdict; raise N"""
    pass


def validate_exponents(exps: Sequence[int]) -> Tuple[int, int, int]:
    """
    Validate an exponent triple

    Args:
        exps: Three non-negative integers

    Returns:
        Exponent triple as a tuple

    Raises:
        GermParseError: If the triple is malformed
    """
    try:
        triple = tuple(int(e) for e in exps)
    except (TypeError, ValueError) as exc:
        raise GermParseError(f"Invalid exponent triple: {exps!r}") from exc

    if len(triple) != 3 or any(e < 0 for e in triple):
        raise GermParseError(
            f"Invalid exponent triple: {exps!r}\n"
            f"Expected three non-negative integers"
        )
    return triple  # type: ignore[return-value]


def validate_divisor(divisor: Sequence[int]) -> Tuple[int, int, int]:
    """Validate a divisor exponent triple (same rules as monomial exponents)."""
    return validate_exponents(divisor)


def validate_positive(name: str, value: int) -> int:
    """
    Validate a positive integer parameter

    Args:
        name: Parameter name used in the message
        value: Value to check

    Returns:
        The value

    Raises:
        ValidationError: If value is not a positive integer
    """
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise ValidationError(
            f"Invalid {name}: {value!r}\n"
            f"Must be a positive integer"
        )
    return value


def validate_order(order: int, minimum: int = 2) -> int:
    """
    Validate a truncation order

    Args:
        order: Truncation total degree N
        minimum: Smallest admissible value

    Returns:
        The order

    Raises:
        ValidationError: If order is below the minimum
    """
    validate_positive("order", order)
    if order < minimum:
        raise ValidationError(
            f"Truncation order too small: {order}\n"
            f"Must be at least {minimum}"
        )
    return order


def validate_format(fmt: str, allowed: Iterable[str] = ()) -> str:
    """
    Validate an output format name

    Raises:
        ValidationError: If the format is unknown or not allowed for the command
    """
    fmt_lower = fmt.lower()
    allowed = tuple(allowed) or tuple(SUPPORTED_FORMATS)
    if fmt_lower not in SUPPORTED_FORMATS or fmt_lower not in allowed:
        raise ValidationError(
            f"Unsupported format: {fmt}\n"
            f"Supported here: {', '.join(allowed)}"
        )
    return fmt_lower


def resolve_precision_cap() -> int:
    """
    Read the interval sign-test precision cap from the environment

    Returns:
        Cap in bits (default DEFAULT_PRECISION_CAP)

    Raises:
        ValidationError: If the variable is set to an invalid value
    """
    raw = os.environ.get(PRECISION_CAP_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_PRECISION_CAP
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ValidationError(f"Invalid {PRECISION_CAP_ENV}: {raw!r}") from exc
    if cap < START_PRECISION:
        raise ValidationError(
            f"Invalid {PRECISION_CAP_ENV}: {cap}\n"
            f"Must be at least {START_PRECISION} bits"
        )
    return cap
