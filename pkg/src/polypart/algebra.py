"""Exact polynomial arithmetic over the rationals

Everything geometric in polypart bottoms out here: evaluation and sign of
multivariate polynomials at rational points, restriction of a polynomial
to a line or segment, and counting of real roots of the restricted
univariate polynomial with Sturm sequences.

Coefficients are :class:`fractions.Fraction` everywhere. The hot paths
(signs, restrictions, Sturm sequences) clear denominators first and run
on Python integers, scaled by positive constants so that signs and roots
are unchanged.
"""

import logging
import math
from fractions import Fraction
from functools import cached_property, lru_cache, reduce
from types import MappingProxyType

from .util import format_rational, parse_rational

logger = logging.getLogger(__name__)

Rational = Fraction

VARIABLE_NAMES = ("x", "y", "z")


class ZeroPolynomialError(ValueError):
    """Raised when an operation is undefined for the zero polynomial.

    For restrictions to lines and segments this is the
    "contained in the zero set" case, which callers handle explicitly.
    """


class ContainedInZ(object):
    """Marker result: the line lies entirely in the zero set"""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ContainedInZ"

    def __reduce__(self):
        return (ContainedInZ, ())


CONTAINED_IN_Z = ContainedInZ()


def monomial_count(d, D):
    """Number of nonconstant monomials of degree at most D in d variables.

    This is binom(D+d, d) - 1, the dimension of the lifted space.

    Args:
        d (int): number of variables, at least 1
        D (int): degree, at least 0

    Returns:
        int
    """
    if d < 1 or D < 0:
        raise ValueError("monomial_count needs d >= 1 and D >= 0, got %d, %d" % (d, D))
    return math.comb(D + d, d) - 1


def _exponents_of_degree(d, total):
    if d == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _exponents_of_degree(d - 1, total - first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def monomials(d, D):
    """All exponent tuples of total degree at most D, in the fixed order.

    The order is ascending total degree, ties broken by descending
    exponent of the first variable, then the second, and so on. For d=2,
    D=2 this is 1, x, y, x^2, xy, y^2.

    Returns:
        tuple of tuples, the constant monomial first.
    """
    if d < 1 or D < 0:
        raise ValueError("monomials needs d >= 1 and D >= 0")
    exps = []
    for total in range(D + 1):
        exps.extend(_exponents_of_degree(d, total))
    return tuple(exps)


@lru_cache(maxsize=None)
def monomial_index(d, D):
    """Map from exponent tuple to its position in monomials(d, D)"""
    return {exps: idx for idx, exps in enumerate(monomials(d, D))}


def monomial_sort_key(exps):
    """Sort key realising the fixed monomial order"""
    return (sum(exps), tuple(-e for e in exps))


def _lcm(values):
    return reduce(lambda a, b: a * b // math.gcd(a, b), values, 1)


class MultiPoly(object):
    """A d-variate polynomial with exact rational coefficients.

    The polynomial is stored as a dense map from exponent tuples to
    nonzero Fractions. Objects are immutable after construction; all
    arithmetic returns new objects.

    Args:
        num_vars (int): number of variables d >= 1
        coeffs (dict): exponent tuple -> rational (int, Fraction or str).
            Zero coefficients are dropped.
        max_degree (int): declared degree bound D. Defaults to the actual
            degree. Every stored exponent must satisfy sum(e) <= D.
    """

    def __init__(self, num_vars, coeffs=None, max_degree=None):
        if num_vars < 1:
            raise ValueError("A polynomial needs at least one variable")
        self._num_vars = int(num_vars)
        cleaned = {}
        for exps, value in (coeffs or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != self._num_vars:
                raise ValueError(
                    "Exponent %s does not match %d variables" % (exps, self._num_vars)
                )
            if any(e < 0 for e in exps):
                raise ValueError("Negative exponent in %s" % (exps,))
            value = parse_rational(value)
            if value:
                cleaned[exps] = cleaned.get(exps, 0) + value
                if not cleaned[exps]:
                    del cleaned[exps]
        self._terms = tuple(
            sorted(cleaned.items(), key=lambda item: monomial_sort_key(item[0]))
        )
        self._coeffs = dict(self._terms)
        self._degree = max((sum(exps) for exps in self._coeffs), default=0)
        if max_degree is None:
            max_degree = self._degree
        if max_degree < self._degree:
            raise ValueError(
                "Declared max_degree %d is below the degree %d"
                % (max_degree, self._degree)
            )
        self._max_degree = int(max_degree)

    @classmethod
    def zero(cls, num_vars):
        return cls(num_vars)

    @classmethod
    def constant(cls, num_vars, value):
        return cls(num_vars, {(0,) * num_vars: value})

    @classmethod
    def variable(cls, num_vars, index):
        """The polynomial x_index (0-based)"""
        exps = [0] * num_vars
        exps[index] = 1
        return cls(num_vars, {tuple(exps): 1})

    @classmethod
    def linear(cls, normal, constant=0):
        """The affine polynomial <normal, x> + constant"""
        num_vars = len(normal)
        coeffs = {(0,) * num_vars: constant}
        for idx, value in enumerate(normal):
            exps = [0] * num_vars
            exps[idx] = 1
            coeffs[tuple(exps)] = value
        return cls(num_vars, coeffs)

    @classmethod
    def from_dense(cls, num_vars, max_degree, vector):
        """Build from a coefficient vector over monomials(num_vars, max_degree)"""
        exps = monomials(num_vars, max_degree)
        if len(vector) != len(exps):
            raise ValueError(
                "Dense vector has %d entries, expected %d" % (len(vector), len(exps))
            )
        return cls(num_vars, dict(zip(exps, vector)), max_degree=max_degree)

    @property
    def num_vars(self):
        return self._num_vars

    @property
    def max_degree(self):
        return self._max_degree

    @property
    def coeffs(self):
        """Read-only view of the exponent -> coefficient map"""
        return MappingProxyType(self._coeffs)

    def terms(self):
        """List of (exponents, coefficient) in the fixed monomial order"""
        return list(self._terms)

    def degree(self):
        """Total degree; 0 for constants and for the zero polynomial"""
        return self._degree

    def is_zero(self):
        return not self._terms

    def to_dense(self, max_degree=None):
        """Coefficient vector over monomials(num_vars, max_degree)"""
        if max_degree is None:
            max_degree = self._max_degree
        if max_degree < self._degree:
            raise ValueError("max_degree below the degree of the polynomial")
        return [self._coeffs.get(exps, Fraction(0)) for exps in monomials(self._num_vars, max_degree)]

    def with_max_degree(self, max_degree):
        return MultiPoly(self._num_vars, self._coeffs, max_degree=max_degree)

    # Arithmetic

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            if other.num_vars != self._num_vars:
                raise ValueError(
                    "Variable count mismatch: %d vs %d" % (self._num_vars, other.num_vars)
                )
            return other
        return MultiPoly.constant(self._num_vars, parse_rational(other))

    def __add__(self, other):
        other = self._coerce(other)
        coeffs = dict(self._coeffs)
        for exps, value in other.terms():
            coeffs[exps] = coeffs.get(exps, 0) + value
        return MultiPoly(
            self._num_vars, coeffs, max(self._max_degree, other.max_degree)
        )

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(
            self._num_vars, {e: -c for e, c in self._terms}, self._max_degree
        )

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            scalar = parse_rational(other)
            return MultiPoly(
                self._num_vars,
                {e: c * scalar for e, c in self._terms},
                self._max_degree,
            )
        other = self._coerce(other)
        coeffs = {}
        for exps_a, coeff_a in self._terms:
            for exps_b, coeff_b in other.terms():
                exps = tuple(a + b for a, b in zip(exps_a, exps_b))
                coeffs[exps] = coeffs.get(exps, 0) + coeff_a * coeff_b
        return MultiPoly(
            self._num_vars, coeffs, self._max_degree + other.max_degree
        )

    __rmul__ = __mul__

    def __pow__(self, power):
        if not isinstance(power, int) or power < 0:
            raise ValueError("Only nonnegative integer powers are supported")
        result = MultiPoly.constant(self._num_vars, 1)
        base = self
        while power:
            if power & 1:
                result = result * base
            base = base * base
            power >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self._num_vars == other.num_vars and self._terms == other._terms

    def __hash__(self):
        return hash((self._num_vars, self._terms))

    # Evaluation

    def _check_point(self, point):
        if len(point) != self._num_vars:
            raise ValueError(
                "Point of dimension %d given to a polynomial in %d variables"
                % (len(point), self._num_vars)
            )

    def eval(self, point):
        """Exact value at a rational point"""
        self._check_point(point)
        point = [parse_rational(coord) for coord in point]
        powers = [[Fraction(1)] for _ in point]
        for idx, coord in enumerate(point):
            for _ in range(self._degree):
                powers[idx].append(powers[idx][-1] * coord)
        total = Fraction(0)
        for exps, coeff in self._terms:
            term = coeff
            for idx, power in enumerate(exps):
                if power:
                    term *= powers[idx][power]
            total += term
        return total

    __call__ = eval

    @cached_property
    def _integer_terms(self):
        if not self._terms:
            return 1, ()
        denominator = _lcm(c.denominator for _, c in self._terms)
        ints = [(exps, int(c * denominator)) for exps, c in self._terms]
        content = reduce(math.gcd, (abs(c) for _, c in ints))
        return Fraction(denominator, content), tuple(
            (exps, c // content) for exps, c in ints
        )

    def integer_coefficients(self):
        """Integer version of the polynomial up to a positive factor.

        Returns:
            (scale, terms): scale is a positive Fraction and terms a tuple
            of (exponents, int) with self == sum(terms) / scale.
        """
        return self._integer_terms

    @cached_property
    def _var_degrees(self):
        return tuple(
            max((exps[idx] for exps, _ in self._terms), default=0)
            for idx in range(self._num_vars)
        )

    def sign_at(self, point):
        """Exact sign (-1, 0, 1) of the value at a rational point.

        Runs on integers only: the value is multiplied by a positive
        integer that clears all denominators.
        """
        self._check_point(point)
        if not self._terms:
            return 0
        _, terms = self._integer_terms
        nums = []
        dens = []
        for idx, coord in enumerate(point):
            coord = parse_rational(coord)
            top = self._var_degrees[idx]
            num_powers = [1]
            den_powers = [1]
            for _ in range(top):
                num_powers.append(num_powers[-1] * coord.numerator)
                den_powers.append(den_powers[-1] * coord.denominator)
            nums.append(num_powers)
            dens.append(den_powers)
        total = 0
        for exps, coeff in terms:
            term = coeff
            for idx, power in enumerate(exps):
                top = self._var_degrees[idx]
                term *= nums[idx][power] * dens[idx][top - power]
            total += term
        return (total > 0) - (total < 0)

    def compose_affine(self, scales, offsets):
        """The polynomial x -> f(scales * x + offsets), coordinatewise.

        Exact; used to map a polynomial found on normalised coordinates
        back to the original coordinates.
        """
        if len(scales) != self._num_vars or len(offsets) != self._num_vars:
            raise ValueError("Affine map dimension does not match")
        scales = [parse_rational(s) for s in scales]
        offsets = [parse_rational(o) for o in offsets]
        expansions = []
        for scale, offset in zip(scales, offsets):
            table = []
            for power in range(self._degree + 1):
                # (scale*x + offset)^power as {exponent: coefficient}
                table.append(
                    {
                        j: math.comb(power, j) * scale**j * offset ** (power - j)
                        for j in range(power + 1)
                    }
                )
            expansions.append(table)
        coeffs = {}
        for exps, coeff in self._terms:
            partial = {(): coeff}
            for idx, power in enumerate(exps):
                nxt = {}
                for prefix, value in partial.items():
                    for j, factor in expansions[idx][power].items():
                        if factor:
                            key = prefix + (j,)
                            nxt[key] = nxt.get(key, 0) + value * factor
                partial = nxt
            for key, value in partial.items():
                coeffs[key] = coeffs.get(key, 0) + value
        return MultiPoly(self._num_vars, coeffs, self._max_degree)

    # Text format

    def to_text(self):
        """Fixture text: one "e1 ... ed : num/den" line per monomial"""
        return "".join(
            "%s : %s\n" % (" ".join(str(e) for e in exps), format_rational(coeff))
            for exps, coeff in self._terms
        )

    @classmethod
    def from_text(cls, text, num_vars=None, max_degree=None):
        """Parse the fixture text format. Line order does not matter.

        Args:
            text (str): fixture text. Blank lines and lines starting with
                '#' are ignored.
            num_vars (int): required if the text has no monomials.
        """
        coeffs = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if ":" not in line:
                raise ValueError("Line %d of polynomial text lacks ':'" % lineno)
            exps_str, value_str = line.split(":", 1)
            exps = tuple(int(token) for token in exps_str.split())
            if num_vars is None:
                num_vars = len(exps)
            if exps in coeffs:
                raise ValueError("Monomial %s given twice" % (exps,))
            coeffs[exps] = parse_rational(value_str)
        if num_vars is None:
            raise ValueError("Empty polynomial text needs num_vars")
        return cls(num_vars, coeffs, max_degree=max_degree)

    def __str__(self):
        if not self._terms:
            return "0"
        if self._num_vars <= len(VARIABLE_NAMES):
            names = VARIABLE_NAMES[: self._num_vars]
        else:
            names = tuple("x%d" % (idx + 1) for idx in range(self._num_vars))
        pieces = []
        for exps, coeff in reversed(self._terms):
            factors = [
                name if power == 1 else "%s^%d" % (name, power)
                for name, power in zip(names, exps)
                if power
            ]
            if not factors:
                pieces.append(format_rational(coeff))
            elif coeff == 1:
                pieces.append("*".join(factors))
            elif coeff == -1:
                pieces.append("-" + "*".join(factors))
            else:
                pieces.append(format_rational(coeff) + "*" + "*".join(factors))
        return " + ".join(pieces).replace("+ -", "- ")

    def __repr__(self):
        return "<MultiPoly d=%d deg=%d: %s>" % (self._num_vars, self._degree, self)


def product(polys, num_vars=None):
    """Product of a sequence of polynomials (1 for an empty sequence)"""
    polys = list(polys)
    if not polys:
        if num_vars is None:
            raise ValueError("Empty product needs num_vars")
        return MultiPoly.constant(num_vars, 1)
    return reduce(lambda a, b: a * b, polys)


def eval_poly(f, point):
    """Exact value of f at a rational point"""
    return f.eval(point)


# Univariate polynomials


def _trim(coeffs):
    coeffs = list(coeffs)
    while coeffs and not coeffs[-1]:
        coeffs.pop()
    return coeffs


class UniPoly(object):
    """Dense univariate polynomial, coefficients from low to high degree"""

    def __init__(self, coeffs=None):
        self._coeffs = tuple(_trim(parse_rational(c) for c in (coeffs or [])))

    @property
    def coeffs(self):
        return list(self._coeffs)

    def degree(self):
        """Degree, -1 for the zero polynomial"""
        return len(self._coeffs) - 1

    def is_zero(self):
        return not self._coeffs

    def eval(self, value):
        value = parse_rational(value)
        total = Fraction(0)
        for coeff in reversed(self._coeffs):
            total = total * value + coeff
        return total

    __call__ = eval

    def __eq__(self, other):
        if isinstance(other, UniPoly):
            return self._coeffs == other._coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self._coeffs)

    def __add__(self, other):
        size = max(len(self._coeffs), len(other._coeffs))
        return UniPoly(
            [
                (self._coeffs[i] if i < len(self._coeffs) else 0)
                + (other._coeffs[i] if i < len(other._coeffs) else 0)
                for i in range(size)
            ]
        )

    def __neg__(self):
        return UniPoly([-c for c in self._coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, UniPoly):
            scalar = parse_rational(other)
            return UniPoly([c * scalar for c in self._coeffs])
        if self.is_zero() or other.is_zero():
            return UniPoly()
        result = [Fraction(0)] * (len(self._coeffs) + len(other._coeffs) - 1)
        for i, a in enumerate(self._coeffs):
            for j, b in enumerate(other._coeffs):
                result[i + j] += a * b
        return UniPoly(result)

    __rmul__ = __mul__

    def derivative(self):
        return UniPoly([i * c for i, c in enumerate(self._coeffs)][1:])

    def deflate(self, root):
        """Divide by (t - root); root must be a root"""
        root = parse_rational(root)
        if self.eval(root):
            raise ValueError("%s is not a root" % root)
        quotient = []
        carry = Fraction(0)
        for coeff in reversed(self._coeffs[1:]):
            carry = carry * root + coeff
            quotient.append(carry)
        return UniPoly(list(reversed(quotient)))

    def to_integer(self):
        """Primitive integer coefficient list, a positive multiple of self"""
        return _to_integer(self._coeffs)

    def root_bound(self):
        """Strict Cauchy bound: every real root t has |t| < bound"""
        if self.degree() < 1:
            return Fraction(1)
        lead = abs(self._coeffs[-1])
        return 1 + max(abs(c) / lead for c in self._coeffs[:-1])

    def sturm_sequence(self):
        """Sturm sequence over the integers (primitive pseudo-remainders)"""
        if self.is_zero():
            raise ZeroPolynomialError("Sturm sequence of the zero polynomial")
        return _sturm_sequence(self.to_integer())

    def __repr__(self):
        return "<UniPoly %s>" % [format_rational(c) for c in self._coeffs]


def _to_integer(coeffs):
    coeffs = _trim(coeffs)
    if not coeffs:
        return []
    denominator = _lcm(Fraction(c).denominator for c in coeffs)
    ints = [int(Fraction(c) * denominator) for c in coeffs]
    content = reduce(math.gcd, (abs(c) for c in ints))
    return [c // content for c in ints]


def _primitive(ints):
    ints = _trim(ints)
    if not ints:
        return []
    content = reduce(math.gcd, (abs(c) for c in ints))
    return [c // content for c in ints]


def _int_derivative(ints):
    return [i * c for i, c in enumerate(ints)][1:]


def _pseudo_remainder(dividend, divisor):
    """Remainder of |lc(divisor)|^k * dividend modulo divisor, in integers"""
    remainder = list(dividend)
    lead = divisor[-1]
    abs_lead = abs(lead)
    sign_lead = 1 if lead > 0 else -1
    shift_max = len(divisor) - 1
    while len(remainder) - 1 >= shift_max and remainder:
        top = remainder[-1]
        shift = len(remainder) - 1 - shift_max
        remainder = [c * abs_lead for c in remainder]
        for idx, coeff in enumerate(divisor):
            remainder[idx + shift] -= top * sign_lead * coeff
        remainder = _trim(remainder)
    return remainder


def _sturm_sequence(ints):
    ints = _primitive(ints)
    sequence = [ints]
    derivative = _primitive(_int_derivative(ints))
    if not derivative:
        return sequence
    sequence.append(derivative)
    while True:
        remainder = _pseudo_remainder(sequence[-2], sequence[-1])
        if not remainder:
            break
        sequence.append(_primitive([-c for c in remainder]))
        if len(sequence[-1]) == 1:
            break
    return sequence


def _int_sign_at(ints, value):
    """Sign of an integer polynomial at a rational point"""
    value = Fraction(value)
    num, den = value.numerator, value.denominator
    degree = len(ints) - 1
    total = 0
    num_power = 1
    den_powers = [1]
    for _ in range(degree):
        den_powers.append(den_powers[-1] * den)
    for idx, coeff in enumerate(ints):
        total += coeff * num_power * den_powers[degree - idx]
        num_power *= num
    return (total > 0) - (total < 0)


def _variations(signs):
    signs = [s for s in signs if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _sturm_variations(sequence, value):
    return _variations([_int_sign_at(poly, value) for poly in sequence])


def _count_open(sequence, low, high):
    """Distinct roots in (low, high); low and high must not be roots"""
    return _sturm_variations(sequence, low) - _sturm_variations(sequence, high)


def count_roots_in_interval(g, a, b, open_interval=True):
    """Exact number of distinct real roots of g in an interval.

    Args:
        g (UniPoly): nonzero polynomial
        a, b (Rational): interval ends, a < b
        open_interval (bool): count in (a, b) if True, in [a, b] otherwise

    Returns:
        int

    Raises:
        ZeroPolynomialError: g is identically zero (contained-in-zero-set case)
    """
    if g.is_zero():
        raise ZeroPolynomialError("Root count of the zero polynomial")
    a = parse_rational(a)
    b = parse_rational(b)
    if not a < b:
        raise ValueError("Interval needs a < b, got %s, %s" % (a, b))
    endpoint_roots = 0
    reduced = g
    for end in (a, b):
        if not reduced.eval(end):
            endpoint_roots += 1
            while not reduced.eval(end):
                reduced = reduced.deflate(end)
    if reduced.degree() < 1:
        inside = 0
    else:
        inside = _count_open(reduced.sturm_sequence(), a, b)
    if open_interval:
        return inside
    return inside + endpoint_roots


def isolate_roots(g, low=None, high=None):
    """Disjoint rational isolating intervals for the real roots of g.

    Args:
        g (UniPoly): nonzero polynomial
        low, high (Rational): search range; defaults to the Cauchy bound.
            Must not be roots of g.

    Returns:
        Sorted list of (lo, hi) with lo < hi, one root strictly inside
        each, no root at any endpoint.
    """
    if g.is_zero():
        raise ZeroPolynomialError("Cannot isolate roots of the zero polynomial")
    if g.degree() < 1:
        return []
    bound = g.root_bound()
    low = -bound if low is None else parse_rational(low)
    high = bound if high is None else parse_rational(high)
    if not g.eval(low) or not g.eval(high):
        raise ValueError("Isolation range endpoints must not be roots")
    sequence = g.sturm_sequence()
    ints = sequence[0]
    intervals = []
    stack = [(low, high, _count_open(sequence, low, high))]
    while stack:
        lo, hi, count = stack.pop()
        if count == 0:
            continue
        if count == 1:
            intervals.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        step = (hi - lo) / 8
        while _int_sign_at(ints, mid) == 0:
            mid += step
            step /= 2
        left = _count_open(sequence, lo, mid)
        stack.append((mid, hi, count - left))
        stack.append((lo, mid, left))
    intervals.sort()
    return intervals


def descartes_unit_variations(ints):
    """Sign variations of (1+t)^n g(1/(1+t)); bounds the roots of g in (0, 1).

    Zero variations proves there is no root in (0, 1), one proves there
    is exactly one.
    """
    coeffs = list(reversed(_trim(ints)))
    size = len(coeffs)
    # Taylor shift by one
    for i in range(size):
        for j in range(size - 2, i - 1, -1):
            coeffs[j] += coeffs[j + 1]
    return _variations([(c > 0) - (c < 0) for c in coeffs])


def _restrict_integer(f, p, q):
    """Integer polynomial F with F(t) = scale * f(p + t (q - p)), scale > 0"""
    d = f.num_vars
    if len(p) != d or len(q) != d:
        raise ValueError("Segment endpoints do not match %d variables" % d)
    p = [parse_rational(c) for c in p]
    q = [parse_rational(c) for c in q]
    if p == q:
        raise ValueError("Segment endpoints coincide")
    common = _lcm([c.denominator for c in p + q])
    linear = [
        (int(pc * common), int((qc - pc) * common)) for pc, qc in zip(p, q)
    ]
    scale_f, terms = f.integer_coefficients()
    if not terms:
        return [], 1
    degree = f.degree()
    common_powers = [1]
    for _ in range(degree):
        common_powers.append(common_powers[-1] * common)

    def horner(sub_terms, var, budget):
        if var == d:
            return [sum(c for _, c in sub_terms) * common_powers[budget]]
        groups = {}
        for exps, coeff in sub_terms:
            groups.setdefault(exps[var], []).append((exps, coeff))
        top = max(groups)
        const, slope = linear[var]
        result = []
        for power in range(top, -1, -1):
            if result:
                shifted = [0] * (len(result) + 1)
                for idx, value in enumerate(result):
                    shifted[idx] += value * const
                    shifted[idx + 1] += value * slope
                result = shifted
            if power in groups:
                partial = horner(groups[power], var + 1, budget - power)
                if len(partial) > len(result):
                    result = result + [0] * (len(partial) - len(result))
                for idx, value in enumerate(partial):
                    result[idx] += value
        return result

    ints = _trim(horner(list(terms), 0, degree))
    scale = Fraction(common**degree) * scale_f
    return ints, scale


def restrict_to_segment(f, p, q):
    """The univariate polynomial g(t) = f(p + t (q - p)).

    t=0 is p and t=1 is q; deg(g) <= deg(f).

    Raises:
        ValueError: p == q or dimension mismatch
    """
    ints, scale = _restrict_integer(f, p, q)
    return UniPoly([Fraction(c) / scale for c in ints])


def line_points(line):
    """Two distinct rational points on a line given as (a, b, c) or two points"""
    if len(line) == 2:
        p, q = (tuple(parse_rational(c) for c in pt) for pt in line)
        if p == q:
            raise ValueError("Line given by two equal points")
        return p, q
    a, b, c = (parse_rational(v) for v in line)
    if a == 0 and b == 0:
        raise ValueError("Line coefficients (a, b) must not both vanish")
    if b != 0:
        return (Fraction(0), -c / b), (Fraction(1), -(a + c) / b)
    return (-c / a, Fraction(0)), (-c / a, Fraction(1))


def line_zero_intersections(f, line):
    """Intersection of a line with the zero set of a bivariate polynomial.

    Either the line lies in Z(f), or it meets Z(f) in at most deg(f)
    points.

    Args:
        f (MultiPoly): nonzero, 2 variables
        line: (a, b, c) for ax+by+c=0, or a pair of distinct points

    Returns:
        CONTAINED_IN_Z, or the exact number of intersection points.
    """
    if f.num_vars != 2:
        raise ValueError("line_zero_intersections needs a bivariate polynomial")
    if f.is_zero():
        raise ZeroPolynomialError("The zero polynomial vanishes everywhere")
    p, q = line_points(line)
    g = restrict_to_segment(f, p, q)
    if g.is_zero():
        return CONTAINED_IN_Z
    if g.degree() < 1:
        return 0
    bound = g.root_bound()
    count = count_roots_in_interval(g, -bound, bound, open_interval=True)
    if count > f.degree():
        # Cannot happen for a correct root count
        logger.error("Line meets Z(f) in %d > deg %d points", count, f.degree())
    return count


def segment_has_root(f, p, q):
    """True if f vanishes somewhere on the closed segment [p, q].

    A polynomial identically zero on the segment counts as vanishing.
    """
    ints, _ = _restrict_integer(f, p, q)
    if not ints:
        return True
    if ints[0] == 0 or sum(ints) == 0:
        return True
    if len(ints) == 1:
        return False
    variations = descartes_unit_variations(ints)
    if variations == 0:
        return False
    if variations == 1:
        return True
    sequence = _sturm_sequence(ints)
    return _count_open(sequence, Fraction(0), Fraction(1)) > 0


def normalize_line(a, b, c):
    """Canonical form of the line ax+by+c=0.

    The triple is scaled to coprime integers with the first nonzero entry
    positive, so equal lines get equal triples.

    Returns:
        tuple of three Fractions (all integral)
    """
    a, b, c = (parse_rational(v) for v in (a, b, c))
    if a == 0 and b == 0:
        raise ValueError("Line coefficients (a, b) must not both vanish")
    denominator = _lcm([a.denominator, b.denominator, c.denominator])
    ints = [int(v * denominator) for v in (a, b, c)]
    content = reduce(math.gcd, (abs(v) for v in ints))
    ints = [v // content for v in ints]
    leading = next(v for v in ints if v)
    if leading < 0:
        ints = [-v for v in ints]
    return tuple(Fraction(v) for v in ints)


def line_through(p, q):
    """Normalized (a, b, c) of the line through two distinct points"""
    (px, py), (qx, qy) = (
        tuple(parse_rational(v) for v in p),
        tuple(parse_rational(v) for v in q),
    )
    if (px, py) == (qx, qy):
        raise ValueError("A line needs two distinct points")
    a = qy - py
    b = px - qx
    return normalize_line(a, b, -(a * px + b * py))


def line_polynomial(line):
    """The linear MultiPoly ax+by+c of a line triple"""
    a, b, c = line
    return MultiPoly.linear((a, b), c)


def lines_contained(f, lines):
    """Indices of the lines lying entirely in Z(f).

    A nonzero bivariate f of degree D contains at most D lines.
    """
    contained = [
        idx
        for idx, line in enumerate(lines)
        if line_zero_intersections(f, line) is CONTAINED_IN_Z
    ]
    if len(contained) > f.degree():
        logger.error(
            "%d lines in Z(f) for a polynomial of degree %d", len(contained), f.degree()
        )
    return contained


def product_of_restrictions(factors, p, q):
    """The restriction of prod(factors) to the line through p and q"""
    result = UniPoly([1])
    for f in factors:
        g = restrict_to_segment(f, p, q)
        if g.is_zero():
            return g
        result = result * g
    return result
