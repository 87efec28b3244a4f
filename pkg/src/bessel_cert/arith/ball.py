# Copyright (c) 2025 knguyen1
#
# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in all
# copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE.

"""
Midpoint-radius ball arithmetic on top of mpmath's raw float routines.

A :class:`Ball` stores an arbitrary-precision midpoint and a nonnegative
radius held at a short fixed precision. Every operation rounds the midpoint
in both directions and folds the gap into the radius, so the exact result
for any pair of points in the operand balls stays inside the output ball.
Elementary functions go through mpmath's interval library (``libmpi``),
which evaluates endpoints with directed rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Literal

from mpmath import mp, mpf
from mpmath.libmp import (
    fone,
    from_float,
    from_int,
    from_rational,
    from_str,
    fzero,
    libmpi,
    mpf_abs,
    mpf_add,
    mpf_cmp,
    mpf_div,
    mpf_mul,
    mpf_neg,
    mpf_pi,
    mpf_shift,
    mpf_sub,
    round_ceiling,
    round_floor,
    round_nearest,
    to_int,
    to_rational,
    to_str,
)

from bessel_cert.exceptions import DivisionByEnclosedZero, DomainViolation

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable

    RawMpf = tuple[int, int, int, int]

MAG_BITS = 30
"""Precision of radius arithmetic; radii are always rounded up."""

MIN_BITS = 53
DEFAULT_BITS = 128

Number = int | float | Fraction | str | mpf


@dataclass(frozen=True, slots=True)
class Precision:
    """
    Working precision in bits.

    Parameters
    ----------
    bits : int
        Binary digits carried by ball midpoints, at least 53.
    """

    bits: int = DEFAULT_BITS

    def __post_init__(self) -> None:
        """Validate the bit count."""
        if self.bits < MIN_BITS:
            msg = f"Precision must be at least {MIN_BITS} bits, got {self.bits}"
            raise ValueError(msg)

    def extended(self, extra: int) -> Precision:
        """Return this precision raised by ``extra`` bits."""
        return Precision(self.bits + max(0, extra))

    @property
    def tolerance(self) -> Ball:
        """Target enclosure radius for a single special-function value."""
        return Ball.from_raw(mpf_shift(fone, -(self.bits - 20)))


DEFAULT_PRECISION = Precision()


# Raw helpers. Midpoints are rounded down and up; the gap becomes radius.


def _round_pair(
    op: Callable[..., RawMpf], a: RawMpf, b: RawMpf, bits: int
) -> tuple[RawMpf, RawMpf]:
    lo = op(a, b, bits, round_floor)
    hi = op(a, b, bits, round_ceiling)
    if lo == hi:
        return lo, fzero
    return lo, mpf_sub(hi, lo, MAG_BITS, round_ceiling)


def _rsum(*terms: RawMpf) -> RawMpf:
    total = fzero
    for term in terms:
        if term != fzero:
            total = mpf_add(total, term, MAG_BITS, round_ceiling)
    return total


def _rmul(a: RawMpf, b: RawMpf) -> RawMpf:
    if a == fzero or b == fzero:
        return fzero
    return mpf_mul(a, b, MAG_BITS, round_ceiling)


def raw_add(
    am: RawMpf, ar: RawMpf, bm: RawMpf, br: RawMpf, bits: int
) -> tuple[RawMpf, RawMpf]:
    """Add two balls given as raw ``(mid, rad)`` pairs."""
    mid, err = _round_pair(mpf_add, am, bm, bits)
    return mid, _rsum(ar, br, err)


def raw_mul(
    am: RawMpf, ar: RawMpf, bm: RawMpf, br: RawMpf, bits: int
) -> tuple[RawMpf, RawMpf]:
    """Multiply two balls given as raw ``(mid, rad)`` pairs."""
    mid, err = _round_pair(mpf_mul, am, bm, bits)
    if ar == fzero and br == fzero:
        return mid, err
    return mid, _rsum(_rmul(mpf_abs(am), br), _rmul(mpf_abs(bm), ar), _rmul(ar, br), err)


def _to_raw(value: Number, bits: int) -> tuple[RawMpf, RawMpf]:
    """Convert a plain number to a raw ball, exactly when possible."""
    if isinstance(value, bool):
        value = int(value)
    if isinstance(value, int):
        return from_int(value), fzero
    if isinstance(value, float):
        if not math.isfinite(value):
            msg = f"Cannot enclose non-finite value {value!r}"
            raise DomainViolation(msg)
        return from_float(value), fzero
    if isinstance(value, mpf):
        return value._mpf_, fzero
    if isinstance(value, Fraction):
        lo = from_rational(value.numerator, value.denominator, bits, round_floor)
        hi = from_rational(value.numerator, value.denominator, bits, round_ceiling)
    elif isinstance(value, str):
        lo = from_str(value, bits, round_floor)
        hi = from_str(value, bits, round_ceiling)
    else:
        msg = f"Unsupported number type {type(value).__name__}"
        raise TypeError(msg)
    if lo == hi:
        return lo, fzero
    return lo, mpf_sub(hi, lo, MAG_BITS, round_ceiling)


class Ball:
    """
    Rigorous enclosure ``[mid - rad, mid + rad]`` of a real number.

    Balls are immutable and carry no precision of their own; every
    arithmetic method takes the working :class:`Precision` explicitly so
    results never depend on global state.

    Parameters
    ----------
    mid : int, float, Fraction, str or mpf, default 0
        Midpoint. Values that are not binary-representable are rounded at
        ``DEFAULT_PRECISION`` and the rounding gap is added to the radius.
    rad : int, float, Fraction, str or mpf, default 0
        Nonnegative radius, rounded up.

    Examples
    --------
    >>> third = Ball(1).div(Ball(3), Precision(53))
    >>> third.contains(Fraction(1, 3))
    True
    """

    __slots__ = ("_mid", "_rad")

    def __init__(self, mid: Number = 0, rad: Number = 0):
        """Build a ball from plain numbers."""
        m, err = _to_raw(mid, DEFAULT_BITS)
        r, r_err = _to_raw(rad, MAG_BITS)
        if mpf_cmp(r, fzero) < 0:
            msg = "Ball radius must be nonnegative"
            raise DomainViolation(msg)
        self._mid = m
        self._rad = _rsum(r, r_err, err)

    @classmethod
    def from_raw(cls, mid: RawMpf, rad: RawMpf = fzero) -> Ball:
        """Wrap raw mpmath tuples without conversion."""
        ball = object.__new__(cls)
        ball._mid = mid
        ball._rad = rad
        return ball

    @classmethod
    def exact(cls, value: Number, prec: Precision = DEFAULT_PRECISION) -> Ball:
        """Enclose ``value`` at ``prec``; exact when representable."""
        return cls.from_raw(*_to_raw(value, prec.bits))

    @classmethod
    def from_endpoints(cls, lo: RawMpf, hi: RawMpf, bits: int) -> Ball:
        """Smallest ball (up to rounding) containing ``[lo, hi]``."""
        mid = mpf_shift(mpf_add(lo, hi, bits, round_nearest), -1)
        rad = mpf_sub(hi, mid, MAG_BITS, round_ceiling)
        rad_lo = mpf_sub(mid, lo, MAG_BITS, round_ceiling)
        if mpf_cmp(rad_lo, rad) > 0:
            rad = rad_lo
        if mpf_cmp(rad, fzero) < 0:
            rad = fzero
        return cls.from_raw(mid, rad)

    @classmethod
    def pi(cls, prec: Precision = DEFAULT_PRECISION) -> Ball:
        """Enclosure of pi."""
        return cls.from_endpoints(
            mpf_pi(prec.bits, round_floor), mpf_pi(prec.bits, round_ceiling), prec.bits
        )

    # Accessors

    @property
    def raw(self) -> tuple[RawMpf, RawMpf]:
        """Raw ``(mid, rad)`` mpmath tuples."""
        return self._mid, self._rad

    @property
    def mid(self) -> mpf:
        """Midpoint as an mpmath number."""
        return mp.make_mpf(self._mid)

    @property
    def rad(self) -> mpf:
        """Radius as an mpmath number."""
        return mp.make_mpf(self._rad)

    def lower(self) -> mpf:
        """Exact lower endpoint."""
        return mp.make_mpf(mpf_sub(self._mid, self._rad))

    def upper(self) -> mpf:
        """Exact upper endpoint."""
        return mp.make_mpf(mpf_add(self._mid, self._rad))

    def is_exact(self) -> bool:
        """Return whether the radius is zero."""
        return self._rad == fzero

    def is_finite(self) -> bool:
        """Return whether midpoint and radius are finite numbers."""
        return mp.isfinite(self.mid) and mp.isfinite(self.rad)

    # Comparisons

    def contains(self, value: Number | Ball) -> bool:
        """Return whether ``value`` (a number or ball) lies inside this ball."""
        other = value if isinstance(value, Ball) else Ball.exact(value, Precision(512))
        lo = mpf_sub(other._mid, other._rad)
        hi = mpf_add(other._mid, other._rad)
        return (
            mpf_cmp(mpf_sub(self._mid, self._rad), lo) <= 0
            and mpf_cmp(hi, mpf_add(self._mid, self._rad)) <= 0
        )

    def overlaps(self, other: Ball) -> bool:
        """Return whether the two intervals intersect."""
        gap = mpf_abs(mpf_sub(self._mid, other._mid))
        return mpf_cmp(gap, mpf_add(self._rad, other._rad)) <= 0

    def contains_zero(self) -> bool:
        """Return whether zero lies inside the ball."""
        return mpf_cmp(mpf_abs(self._mid), self._rad) <= 0

    def is_positive(self) -> bool:
        """Return whether every point of the ball is positive."""
        return mpf_cmp(self._mid, self._rad) > 0

    def is_negative(self) -> bool:
        """Return whether every point of the ball is negative."""
        return mpf_cmp(mpf_neg(self._mid), self._rad) > 0

    def __eq__(self, other: object) -> bool:
        """Bit-identical equality of midpoint and radius."""
        if not isinstance(other, Ball):
            return NotImplemented
        return self._mid == other._mid and self._rad == other._rad

    def __hash__(self) -> int:
        """Hash consistent with bit-identical equality."""
        return hash((self._mid, self._rad))

    def __repr__(self) -> str:
        """Debug representation."""
        return f"Ball({self.to_decimal()!r})"

    def __str__(self) -> str:
        """Decimal ``mid ± rad`` form."""
        return self.to_decimal()

    def __getstate__(self) -> tuple[RawMpf, RawMpf]:
        """Pickle as raw tuples."""
        return self._mid, self._rad

    def __setstate__(self, state: tuple[RawMpf, RawMpf]) -> None:
        """Restore from raw tuples."""
        self._mid, self._rad = state

    # Arithmetic

    def neg(self) -> Ball:
        """Exact negation."""
        return Ball.from_raw(mpf_neg(self._mid), self._rad)

    def abs(self) -> Ball:
        """Enclosure of ``{|x| : x in self}``."""
        if not self.contains_zero():
            return Ball.from_raw(mpf_abs(self._mid), self._rad)
        half = mpf_shift(mpf_add(mpf_abs(self._mid), self._rad, MAG_BITS, round_ceiling), -1)
        return Ball.from_raw(half, half)

    def add(self, other: Ball | Number, prec: Precision = DEFAULT_PRECISION) -> Ball:
        """Sum."""
        b = _coerce(other, prec)
        return Ball.from_raw(*raw_add(self._mid, self._rad, b._mid, b._rad, prec.bits))

    def sub(self, other: Ball | Number, prec: Precision = DEFAULT_PRECISION) -> Ball:
        """Difference."""
        b = _coerce(other, prec)
        mid, err = _round_pair(mpf_sub, self._mid, b._mid, prec.bits)
        return Ball.from_raw(mid, _rsum(self._rad, b._rad, err))

    def mul(self, other: Ball | Number, prec: Precision = DEFAULT_PRECISION) -> Ball:
        """Product."""
        b = _coerce(other, prec)
        return Ball.from_raw(*raw_mul(self._mid, self._rad, b._mid, b._rad, prec.bits))

    def div(self, other: Ball | Number, prec: Precision = DEFAULT_PRECISION) -> Ball:
        """
        Quotient.

        Raises
        ------
        DivisionByEnclosedZero
            If the divisor's interval contains zero.
        """
        b = _coerce(other, prec)
        if b.contains_zero():
            msg = f"Divisor {b} contains zero"
            raise DivisionByEnclosedZero(msg)
        mid, err = _round_pair(mpf_div, self._mid, b._mid, prec.bits)
        if self._rad == fzero and b._rad == fzero:
            return Ball.from_raw(mid, err)
        abs_bm = mpf_abs(b._mid)
        num = _rsum(_rmul(mpf_abs(self._mid), b._rad), _rmul(abs_bm, self._rad))
        den = mpf_mul(abs_bm, mpf_sub(abs_bm, b._rad, MAG_BITS, round_floor), MAG_BITS, round_floor)
        return Ball.from_raw(mid, _rsum(mpf_div(num, den, MAG_BITS, round_ceiling), err))

    def mul_2exp(self, exponent: int) -> Ball:
        """Exact multiplication by a power of two."""
        return Ball.from_raw(mpf_shift(self._mid, exponent), mpf_shift(self._rad, exponent))

    def widen(self, extra: Ball | Number) -> Ball:
        """Add the upper bound of ``|extra|`` to the radius."""
        e = _coerce(extra, DEFAULT_PRECISION).abs()
        bound = mpf_add(e._mid, e._rad, MAG_BITS, round_ceiling)
        return Ball.from_raw(self._mid, _rsum(self._rad, bound))

    def intersect(self, other: Ball, prec: Precision = DEFAULT_PRECISION) -> Ball | None:
        """
        Return a ball enclosing the intersection, or ``None`` if disjoint.

        The midpoint is kept at no less than ``prec``, so a narrow
        intersection of wide operands is not inflated by rounding.
        """
        if not self.overlaps(other):
            return None
        lo_a, lo_b = mpf_sub(self._mid, self._rad), mpf_sub(other._mid, other._rad)
        hi_a, hi_b = mpf_add(self._mid, self._rad), mpf_add(other._mid, other._rad)
        lo = lo_a if mpf_cmp(lo_a, lo_b) >= 0 else lo_b
        hi = hi_a if mpf_cmp(hi_a, hi_b) <= 0 else hi_b
        bits = max(self._mid[3], other._mid[3], prec.bits) + 2
        return Ball.from_endpoints(lo, hi, bits)

    def upper_fraction(self) -> Fraction:
        """Exact upper endpoint as a fraction."""
        p, q = to_rational(mpf_add(self._mid, self._rad))
        return Fraction(int(p), int(q))

    def lower_fraction(self) -> Fraction:
        """Exact lower endpoint as a fraction."""
        p, q = to_rational(mpf_sub(self._mid, self._rad))
        return Fraction(int(p), int(q))

    def round(self, prec: Precision) -> Ball:
        """Round the midpoint to ``prec``, moving the error into the radius."""
        lo = mpf_add(self._mid, fzero, prec.bits, round_floor)
        hi = mpf_add(self._mid, fzero, prec.bits, round_ceiling)
        if lo == hi:
            return Ball.from_raw(lo, self._rad)
        return Ball.from_raw(lo, _rsum(self._rad, mpf_sub(hi, lo, MAG_BITS, round_ceiling)))

    # Elementary functions

    def _apply(self, fn: Callable[..., tuple[RawMpf, RawMpf]], prec: Precision) -> Ball:
        lo = mpf_sub(self._mid, self._rad, prec.bits, round_floor)
        hi = mpf_add(self._mid, self._rad, prec.bits, round_ceiling)
        image_lo, image_hi = fn((lo, hi), prec.bits)
        return Ball.from_endpoints(image_lo, image_hi, prec.bits)

    def sqrt(self, prec: Precision = DEFAULT_PRECISION) -> Ball:
        """Square root; the ball must not reach below zero."""
        if mpf_cmp(self._mid, self._rad) < 0:
            msg = f"sqrt of {self} is undefined"
            raise DomainViolation(msg)
        lo = mpf_sub(self._mid, self._rad, prec.bits, round_floor)
        if mpf_cmp(lo, fzero) < 0:
            lo = fzero
        hi = mpf_add(self._mid, self._rad, prec.bits, round_ceiling)
        image_lo, image_hi = libmpi.mpi_sqrt((lo, hi), prec.bits)
        return Ball.from_endpoints(image_lo, image_hi, prec.bits)

    def exp(self, prec: Precision = DEFAULT_PRECISION) -> Ball:
        """Exponential."""
        return self._apply(libmpi.mpi_exp, prec)

    def ln(self, prec: Precision = DEFAULT_PRECISION) -> Ball:
        """Natural logarithm; the ball must be strictly positive."""
        if not self.is_positive():
            msg = f"ln of {self} is undefined"
            raise DomainViolation(msg)
        return self._apply(libmpi.mpi_log, prec)

    def sin(self, prec: Precision = DEFAULT_PRECISION) -> Ball:
        """Sine."""
        return self._apply(libmpi.mpi_sin, prec)

    def cos(self, prec: Precision = DEFAULT_PRECISION) -> Ball:
        """Cosine."""
        return self._apply(libmpi.mpi_cos, prec)

    def pow_int(self, n: int, prec: Precision = DEFAULT_PRECISION) -> Ball:
        """Integer power; negative powers need a zero-free ball."""
        if n < 0:
            return Ball(1).div(self.pow_int(-n, prec), prec)
        return self._apply(lambda s, bits: libmpi.mpi_pow_int(s, n, bits), prec)

    def gamma(self, prec: Precision = DEFAULT_PRECISION) -> Ball:
        """Gamma function; the ball must avoid the nonpositive integers."""
        if not self.is_positive():
            first = to_int(mpf_sub(self._mid, self._rad), round_ceiling)
            last = to_int(mpf_add(self._mid, self._rad), round_floor)
            if first <= min(last, 0):
                msg = f"gamma of {self} meets a pole"
                raise DomainViolation(msg)
        return self._apply(libmpi.mpi_gamma, prec)

    # Decimal serialization

    def to_decimal(self) -> str:
        """
        Serialize as ``"mid ± rad"``.

        The printed radius covers the decimal rounding of the midpoint, so
        :meth:`from_decimal` always yields a ball containing this one.
        """
        bits = max(self._mid[3], 1)
        dps = math.ceil(bits * math.log10(2)) + 3
        text = to_str(self._mid, dps)
        exact = from_str(text, bits + 64, round_floor) == self._mid and (
            from_str(text, bits + 64, round_ceiling) == self._mid
        )
        rad = self._rad
        if not exact:
            ulp = from_str(f"1e{_decimal_exponent(self._mid) - dps + 2}", MAG_BITS, round_ceiling)
            rad = _rsum(rad, ulp)
        if rad == fzero:
            return f"{text} ± 0"
        rad = mpf_mul(rad, from_str("1.0001", MAG_BITS, round_ceiling), MAG_BITS, round_ceiling)
        return f"{text} ± {to_str(rad, 6)}"

    @classmethod
    def from_decimal(cls, text: str, prec: Precision = DEFAULT_PRECISION) -> Ball:
        """Parse the ``"mid ± rad"`` form (``+/-`` is also accepted)."""
        normalized = text.replace("+/-", "±")
        mid_text, _, rad_text = normalized.partition("±")
        mid, err = _to_raw(mid_text.strip(), prec.bits)
        rad = fzero
        if rad_text.strip():
            rad = from_str(rad_text.strip(), MAG_BITS, round_ceiling)
            if mpf_cmp(rad, fzero) < 0:
                msg = f"Negative radius in {text!r}"
                raise DomainViolation(msg)
        return cls.from_raw(mid, _rsum(rad, err))


def _decimal_exponent(value: RawMpf) -> int:
    """Upper bound on the decimal exponent of ``value``."""
    if value == fzero:
        return 0
    _, _, exp, bc = value
    return math.ceil((exp + bc) * math.log10(2)) + 1


def _coerce(value: Ball | Number, prec: Precision) -> Ball:
    if isinstance(value, Ball):
        return value
    return Ball.exact(value, prec)


ZERO = Ball(0)
ONE = Ball(1)


def ball_binop(
    op: Literal["add", "sub", "mul", "div"], a: Ball, b: Ball, p: Precision
) -> Ball:
    """
    Apply a binary arithmetic operation.

    Parameters
    ----------
    op : {"add", "sub", "mul", "div"}
        The operation.
    a, b : Ball
        Operands.
    p : Precision
        Working precision of the midpoint.

    Returns
    -------
    Ball
        Enclosure of ``a op b`` over all points of the operands.

    Raises
    ------
    DivisionByEnclosedZero
        For ``div`` when ``b`` contains zero.
    """
    operations = {"add": Ball.add, "sub": Ball.sub, "mul": Ball.mul, "div": Ball.div}
    try:
        operation = operations[op]
    except KeyError:
        msg = f"Unknown ball operation {op!r}"
        raise ValueError(msg) from None
    return operation(a, b, p)


def ball_elem(
    fn: Literal["sqrt", "exp", "ln", "sin", "cos", "pow_int", "gamma"],
    a: Ball,
    p: Precision,
    n: int | None = None,
) -> Ball:
    """
    Apply an elementary function, rounding the image outward.

    ``n`` is the exponent for ``pow_int`` and ignored otherwise.

    Raises
    ------
    DomainViolation
        If ``a`` leaves the domain of ``fn``.
    """
    if fn == "pow_int":
        if n is None:
            msg = "pow_int needs an exponent"
            raise ValueError(msg)
        return a.pow_int(n, p)
    functions = {
        "sqrt": Ball.sqrt,
        "exp": Ball.exp,
        "ln": Ball.ln,
        "sin": Ball.sin,
        "cos": Ball.cos,
        "gamma": Ball.gamma,
    }
    try:
        function = functions[fn]
    except KeyError:
        msg = f"Unknown elementary function {fn!r}"
        raise ValueError(msg) from None
    return function(a, p)


def ball_union(a: Ball, b: Ball, prec: Precision = DEFAULT_PRECISION) -> Ball:
    """Return a ball containing both input intervals, midpoint at ``prec`` or finer."""
    if a == b:
        return a
    lo_a, hi_a = mpf_sub(a._mid, a._rad), mpf_add(a._mid, a._rad)
    lo_b, hi_b = mpf_sub(b._mid, b._rad), mpf_add(b._mid, b._rad)
    lo = lo_a if mpf_cmp(lo_a, lo_b) <= 0 else lo_b
    hi = hi_a if mpf_cmp(hi_a, hi_b) >= 0 else hi_b
    bits = max(a._mid[3], b._mid[3], prec.bits) + 2
    return Ball.from_endpoints(lo, hi, bits)


def ball_sum(terms: Iterable[Ball], prec: Precision) -> Ball:
    """Sum balls strictly left to right."""
    mid, rad = fzero, fzero
    for term in terms:
        mid, rad = raw_add(mid, rad, term._mid, term._rad, prec.bits)
    return Ball.from_raw(mid, rad)
