"""Common utility functions used in polypart"""

from fractions import Fraction


def parse_rational(value):
    """Parse a value into an exact rational number.

    Accepts integers, Fractions, and strings like "3", "-7/4" or "0.25".
    Decimal strings are parsed exactly ("0.1" is 1/10, not the binary
    float). Floats are refused, they have no business in exact predicates.

    Args:
        value (int, Fraction or str)

    Returns:
        Fraction
    """
    if isinstance(value, bool):
        raise TypeError("Booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise TypeError("Floats must be converted explicitly, got %r" % value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as err:
            raise ValueError("Could not parse %r as a rational" % value) from err
    raise TypeError("Unsupported type for a rational: %s" % type(value))


def format_rational(value):
    """Canonical string for a rational, "p/q" or "p" when integral."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return "%d/%d" % (value.numerator, value.denominator)


def format_approx(value, digits=6):
    """String for a derived real-valued quantity.

    These are marked with a leading "~" so they can never be mistaken
    for an exact value in a report.
    """
    return "~" + format(float(value), ".%dg" % digits)


def point_to_ints(point):
    """Flatten a rational point into [num_1, den_1, num_2, den_2, ...]"""
    ints = []
    for coord in point:
        coord = Fraction(coord)
        ints.extend([coord.numerator, coord.denominator])
    return ints


def ints_to_point(ints):
    """Inverse of point_to_ints"""
    if len(ints) % 2:
        raise ValueError("Point must be given as num/den pairs, got %s" % ints)
    return tuple(
        Fraction(int(ints[idx]), int(ints[idx + 1])) for idx in range(0, len(ints), 2)
    )


def ceil_fraction(value):
    """Ceiling of a rational, as an integer"""
    value = Fraction(value)
    return -((-value.numerator) // value.denominator)

