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

"""Gauss-Legendre rules with certified nodes, panel sums and their error bounds."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import TYPE_CHECKING

from mpmath import mp, mpf

from bessel_cert.arith.ball import (
    DEFAULT_PRECISION,
    ONE,
    ZERO,
    Ball,
    Number,
    Precision,
    ball_sum,
    ball_union,
)
from bessel_cert.exceptions import DivisionByEnclosedZero, RootIsolationFailure, ValidityViolation

if TYPE_CHECKING:
    from collections.abc import Callable

logger = logging.getLogger(__name__)

MAX_RULE_POINTS = 64
CUTOFF_FACTOR = Fraction(19, 20)
STRIP_CONSTANT = Fraction(336, 100)


def to_fraction(value: Number) -> Fraction:
    """Exact rational for a run parameter; floats are read as their decimal literal."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True, slots=True)
class GaussRule:
    """
    Gauss-Legendre rule on ``[-1, 1]``.

    Attributes
    ----------
    n : int
        Number of points.
    nodes : tuple[Ball, ...]
        Strictly increasing node enclosures, exactly symmetric about zero.
    weights : tuple[Ball, ...]
        Positive weight enclosures matching ``nodes``.
    """

    n: int
    nodes: tuple[Ball, ...]
    weights: tuple[Ball, ...]

    def to_lines(self, digits: int = 40) -> list[str]:
        """Decimal ``node weight`` lines of midpoints at ``digits`` significant digits."""
        return [
            f"{mp.nstr(x.mid, digits, strip_zeros=False)} {mp.nstr(w.mid, digits, strip_zeros=False)}"
            for x, w in zip(self.nodes, self.weights, strict=True)
        ]


def _recurrence_coefficients(n: int, wp: Precision) -> list[Ball]:
    return [Ball.exact(Fraction(k * k, 4 * k * k - 1), wp) for k in range(1, n)]


def _monic_legendre(x: Ball, betas: list[Ball], wp: Precision) -> tuple[Ball, Ball]:
    """Evaluate the monic Legendre polynomial and its derivative."""
    p_prev, p = ONE, x
    d_prev, d = ZERO, ONE
    for beta in betas:
        p_next = x.mul(p, wp).sub(beta.mul(p_prev, wp), wp)
        d_next = p.add(x.mul(d, wp), wp).sub(beta.mul(d_prev, wp), wp)
        p_prev, p = p, p_next
        d_prev, d = d, d_next
    return p, d


def _sign(value: Ball) -> int:
    if value.is_positive():
        return 1
    if value.is_negative():
        return -1
    return 0


def _brackets(n: int, betas: list[Ball], wp: Precision) -> list[tuple[Ball, Ball, int]]:
    """Sign-change brackets of the positive roots on a grid uniform in angle."""
    last = 2 * n if n % 2 == 0 else 2 * n - 1
    grid = [Ball(math.cos(j * math.pi / (4 * n))) for j in range(last)]
    grid[0] = ONE
    if n % 2 == 0:
        grid.append(ZERO)
    else:
        grid.append(Ball(math.cos(last * math.pi / (4 * n))))
    signs = []
    for point in grid:
        sign = _sign(_monic_legendre(point, betas, wp)[0])
        if sign == 0:
            msg = f"Cannot decide the sign of p_{n} at grid point {point}"
            raise RootIsolationFailure(msg)
        signs.append(sign)
    found = [
        (grid[j + 1], grid[j], signs[j + 1])
        for j in range(len(grid) - 1)
        if signs[j] != signs[j + 1]
    ]
    if len(found) != n // 2:
        msg = f"Isolated {len(found)} positive roots of p_{n}, expected {n // 2}"
        raise RootIsolationFailure(msg)
    return found[::-1]


def _refine(
    lo: Ball, hi: Ball, sign_lo: int, betas: list[Ball], wp: Precision, p: Precision
) -> Ball:
    """
    Shrink a sign-change bracket by interval Newton steps and bisection.

    Stops once the radius is below ``2^-(p.bits + 24)`` or a step shrinks it
    by less than a quarter. The bracket contains the root throughout, so the
    last one is returned as long as it is narrower than ``2^-p.bits``.
    """
    n = len(betas) + 1
    target = mpf(2) ** -(p.bits + 24)
    accept = mpf(2) ** -p.bits
    box = ball_union(lo, hi, wp)
    for _ in range(4 * wp.bits):
        if box.rad <= target:
            return box
        previous = box.rad
        mid = Ball.from_raw(box.raw[0])
        value = _monic_legendre(mid, betas, wp)[0]
        sign = _sign(value)
        if sign != 0:
            lo_end = Ball.exact(box.lower(), wp)
            hi_end = Ball.exact(box.upper(), wp)
            box = ball_union(mid, hi_end, wp) if sign == sign_lo else ball_union(lo_end, mid, wp)
            mid = Ball.from_raw(box.raw[0])
            value = _monic_legendre(mid, betas, wp)[0]
        slope = _monic_legendre(box, betas, wp)[1]
        try:
            step = mid.sub(value.div(slope, wp), wp)
        except DivisionByEnclosedZero:
            if sign == 0:
                msg = f"Interval Newton stalled on {box} for p_{n} at {wp.bits} bits"
                raise RootIsolationFailure(msg) from None
            continue
        narrowed = step.intersect(box, wp)
        if narrowed is None:
            msg = f"Newton image of {box} misses the bracket of p_{n} at {wp.bits} bits"
            raise RootIsolationFailure(msg)
        box = narrowed
        if box.rad > previous * 3 / 4:
            break
    if box.rad > accept:
        msg = f"Root bracket {box} of p_{n} did not shrink below {accept} at {wp.bits} bits"
        raise RootIsolationFailure(msg)
    logger.debug("Root of p_%d settled at radius %s (%d bits)", n, box.rad, wp.bits)
    return box


def _weight(root: Ball, betas: list[Ball], lead: Ball, wp: Precision) -> Ball:
    slope = _monic_legendre(root, betas, wp)[1].mul(lead, wp)
    one_minus = ONE.sub(root.mul(root, wp), wp)
    return Ball(2).div(one_minus.mul(slope.mul(slope, wp), wp), wp)


@lru_cache(maxsize=32)
def legendre_rule(n: int, p: Precision = DEFAULT_PRECISION) -> GaussRule:
    """
    Certified ``n``-point Gauss-Legendre rule.

    Positive roots of the monic Legendre polynomial are bracketed by sign
    changes on a grid of ``4n`` cells uniform in the angle ``x = cos(t)``,
    refined by interval Newton and bisection until the radius falls below
    ``2^-(bits + 24)`` or stops shrinking, and mirrored. Weights are
    ``2 / ((1 - x^2) P_n'(x)^2)``.

    Parameters
    ----------
    n : int
        Number of points, ``1 <= n <= 64``.
    p : Precision
        Output precision.

    Returns
    -------
    GaussRule
        The rule.

    Raises
    ------
    RootIsolationFailure
        If the bracket count is wrong or a bracket cannot be refined.
    """
    if not 1 <= n <= MAX_RULE_POINTS:
        msg = f"Rule size must be between 1 and {MAX_RULE_POINTS}, got {n}"
        raise ValueError(msg)
    wp = p.extended(32)
    betas = _recurrence_coefficients(n, wp)
    lead = Ball.exact(Fraction(math.factorial(2 * n), 2**n * math.factorial(n) ** 2), wp)

    positive = [_refine(lo, hi, sign, betas, wp, p) for lo, hi, sign in _brackets(n, betas, wp)]
    rounded = [r.round(p) for r in positive]
    nodes = [r.neg() for r in reversed(rounded)]
    if n % 2:
        nodes.append(ZERO)
    nodes.extend(rounded)

    half = [_weight(r, betas, lead, wp).round(p) for r in positive]
    weights = list(reversed(half))
    if n % 2:
        weights.append(_weight(ZERO, betas, lead, wp).round(p))
    weights.extend(half)
    logger.info("Built %d-point Gauss-Legendre rule at %d bits", n, p.bits)
    return GaussRule(n=n, nodes=tuple(nodes), weights=tuple(weights))


@dataclass(frozen=True, slots=True)
class PanelLayout:
    """
    ``K`` panels of half-width ``d`` covering ``[a, b]`` exactly.

    Endpoints and widths are rationals, so ``2 d K == b - a`` is checked
    without rounding.
    """

    a: Fraction
    b: Fraction
    K: int
    d: Fraction

    def __post_init__(self) -> None:
        """Validate the layout."""
        if self.K < 1 or self.d <= 0:
            msg = f"Panel layout needs K >= 1 and d > 0, got K={self.K}, d={self.d}"
            raise ValueError(msg)
        if 2 * self.d * self.K != self.b - self.a:
            msg = f"2*d*K = {2 * self.d * self.K} does not equal b - a = {self.b - self.a}"
            raise ValueError(msg)

    @classmethod
    def covering(cls, a: Number, b: Number, d: Number) -> PanelLayout:
        """Layout of half-width ``d`` on ``[a, b]``; the width must divide evenly."""
        a, b, d = to_fraction(a), to_fraction(b), to_fraction(d)
        count = (b - a) / (2 * d)
        if count.denominator != 1:
            msg = f"[{a}, {b}] is not a whole number of panels of width {2 * d}"
            raise ValueError(msg)
        return cls(a, b, int(count), d)

    def center(self, j: int) -> Fraction:
        """Midpoint of panel ``j``."""
        return self.a + self.d * (2 * j + 1)

    def nodes(self, rule: GaussRule, p: Precision = DEFAULT_PRECISION) -> list[Ball]:
        """Mapped nodes, panel by panel, each panel in rule order."""
        half = Ball.exact(self.d, p)
        scaled = [half.mul(x, p) for x in rule.nodes]
        return [
            Ball.exact(self.center(j), p).add(offset, p)
            for j in range(self.K)
            for offset in scaled
        ]

    def factors(self, rule: GaussRule, p: Precision = DEFAULT_PRECISION) -> list[Ball]:
        """Per-node weights ``d * w_i`` matching :meth:`nodes`."""
        half = Ball.exact(self.d, p)
        scaled = [half.mul(w, p) for w in rule.weights]
        return scaled * self.K


@dataclass
class EvaluationMeter:
    """Counter of integrand evaluations."""

    count: int = 0
    by_key: dict[object, int] = field(default_factory=dict)

    def tick(self, calls: int = 1, key: object | None = None) -> None:
        """Record ``calls`` evaluations, optionally attributed to ``key``."""
        self.count += calls
        if key is not None:
            self.by_key[key] = self.by_key.get(key, 0) + calls

    def reset(self) -> None:
        """Zero the counter."""
        self.count = 0
        self.by_key.clear()


def panel_sum(
    f: Callable[[Ball], Ball],
    layout: PanelLayout,
    rule: GaussRule,
    p: Precision = DEFAULT_PRECISION,
    meter: EvaluationMeter | None = None,
) -> Ball:
    """
    Composite Gauss-Legendre sum of ``f`` over ``layout``.

    The result encloses the quadrature sum only; the analytic quadrature
    error is bounded separately by :func:`bound_0S` and :func:`bound_ST`.
    Terms are added left to right in panel order.
    """
    nodes = layout.nodes(rule, p)
    factors = layout.factors(rule, p)
    total = ball_sum((w.mul(f(x), p) for x, w in zip(nodes, factors, strict=True)), p)
    if meter is not None:
        meter.tick(len(nodes))
    return total


def _prefactor(d: Fraction, n: int, p: Precision) -> Ball:
    """``pi 2^(-2n-1) d^(2n)``."""
    return Ball.pi(p).mul(Ball.exact(d ** (2 * n) / 2 ** (2 * n + 1), p), p)


def minimal_cutoff(band_limit: int, p: Precision = DEFAULT_PRECISION) -> Ball:
    """Enclosure of ``0.95 N^(3/2) ln N + 1``, the smallest admissible first cutoff."""
    big_n = Ball(band_limit)
    growth = big_n.mul(big_n.sqrt(p), p).mul(big_n.ln(p), p)
    return growth.mul(Ball.exact(CUTOFF_FACTOR, p), p).add(ONE, p)


def bound_0S(s: Number, d: Number, n: int, p: Precision = DEFAULT_PRECISION) -> Ball:
    """
    Quadrature error bound on ``[0, S]``: ``pi 2^(-2n-1) d^(2n) e^6 (S + 2d + 1)^2``.

    Uniform in the Bessel orders through ``|J_k(z)| <= e`` on the strip
    ``|Im z| <= 1``.

    Parameters
    ----------
    s : number
        First cutoff ``S > 0``.
    d : number
        Panel half-width ``d > 0``.
    n : int
        Rule size.

    Returns
    -------
    Ball
        Enclosure of the bound; use its upper end.
    """
    s, d = to_fraction(s), to_fraction(d)
    if s <= 0 or d <= 0 or n < 1:
        msg = f"bound_0S needs S > 0, d > 0, n >= 1; got S={s}, d={d}, n={n}"
        raise ValueError(msg)
    reach = Ball.exact(s + 2 * d + 1, p)
    return _prefactor(d, n, p).mul(Ball(6).exp(p), p).mul(reach.mul(reach, p), p)


def bound_ST(
    s: Number,
    t: Number,
    d: Number,
    n: int,
    band_limit: int,
    p: Precision = DEFAULT_PRECISION,
    *,
    check: bool = True,
) -> Ball:
    """
    Quadrature error bound on ``[S, T]``: ``pi 2^(-2n-1) d^(2n) 3.36^6 / (S - 1 - 2d)``.

    The bound uses ``|J_k(z)| <= 3.36 |z|^(-1/2)`` near the real axis, which
    holds for orders up to ``N`` once ``S >= 0.95 N^(3/2) ln N + 1``. It
    does not depend on ``T``.

    Parameters
    ----------
    s, t : number
        Cutoffs ``S < T``.
    d : number
        Panel half-width.
    n : int
        Rule size.
    band_limit : int
        Band limit ``N``; the largest Bessel order covered is ``N``.
    p : Precision
        Working precision.
    check : bool, default True
        Enforce ``T > S`` and the cutoff condition on ``S``.

    Raises
    ------
    ValidityViolation
        If ``S - 1 - 2d <= 0``. With ``check`` set, also if ``T <= S`` or
        ``S`` is below :func:`minimal_cutoff` of ``band_limit``.
    """
    s, t, d = to_fraction(s), to_fraction(t), to_fraction(d)
    gap = s - 1 - 2 * d
    if gap <= 0:
        msg = f"S - 1 - 2d must be positive, got {gap}"
        raise ValidityViolation(msg)
    if check:
        if t <= s:
            msg = f"T = {t} must exceed S = {s}"
            raise ValidityViolation(msg)
        if minimal_cutoff(band_limit, p).upper_fraction() > s:
            msg = f"S = {s} is below 0.95 N^1.5 ln N + 1 for N = {band_limit}"
            raise ValidityViolation(msg)
    strip = Ball.exact(STRIP_CONSTANT, p).pow_int(6, p)
    return _prefactor(d, n, p).mul(strip, p).div(Ball.exact(gap, p), p)
