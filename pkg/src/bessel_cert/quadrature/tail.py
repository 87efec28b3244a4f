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
Asymptotic tail of six-fold Bessel products on ``[T, inf)``.

Each Bessel factor is replaced by the first terms of its large-argument
expansion, ``J_n(z) ~ sqrt(2/(pi z)) (a + b/z + c/z^2 + d/z^3)``, with phase
``w = z - pi/4 - n pi/2``. Multiplying six of them and the measure ``z``
leaves ``(2/pi)^3 (A z^-2 + B z^-3 + C z^-4)`` plus a remainder covered by
:func:`tail_error`. ``A``, ``B`` and ``C`` are expanded into short cosine
sums whose phases stay exact multiples of ``pi/4``, and every cosine term is
integrated exactly.
"""

from __future__ import annotations

import itertools
import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import TYPE_CHECKING

from bessel_cert.arith.ball import DEFAULT_PRECISION, ONE, ZERO, Ball, Number, Precision, ball_sum
from bessel_cert.exceptions import NonConvergence, OddSumKey, ValidityViolation
from bessel_cert.quadrature.gauss import to_fraction

if TYPE_CHECKING:
    from collections.abc import Sequence

logger = logging.getLogger(__name__)

REMAINDER_CONSTANT = Fraction(43, 10_000)
TAIL_POWERS = (2, 3, 4)
MAX_PARTS_DEPTH = 400

_SIGN_VECTORS = tuple((1, *rest) for rest in itertools.product((1, -1), repeat=5))


def shifted_cos(c: Ball, s: Ball, eighths: int, p: Precision = DEFAULT_PRECISION) -> Ball:
    """
    ``cos(t + eighths * pi/4)`` from ``c = cos t`` and ``s = sin t``.

    Only the exact rotations by multiples of ``pi/4`` are used, so no
    enclosure of pi enters.
    """
    q = eighths % 8
    if q == 0:
        return c
    if q == 2:
        return s.neg()
    if q == 4:
        return c.neg()
    if q == 6:
        return s
    root2 = Ball(2).sqrt(p)
    if q == 1:
        return c.sub(s, p).div(root2, p)
    if q == 3:
        return c.add(s, p).neg().div(root2, p)
    if q == 5:
        return s.sub(c, p).div(root2, p)
    return c.add(s, p).div(root2, p)


@dataclass(frozen=True, slots=True)
class TrigTerm:
    """
    ``coeff * cos(freq * z + phase_eighths * pi/4)``.

    ``freq`` is even and nonnegative, ``phase_eighths`` lies in ``0..3``
    and ``coeff`` is an exact rational.
    """

    freq: int
    phase_eighths: int
    coeff: Fraction

    def phase(self, p: Precision = DEFAULT_PRECISION) -> Ball:
        """Phase in radians."""
        return Ball.pi(p).mul(Fraction(self.phase_eighths, 4), p)

    def coefficient(self, p: Precision = DEFAULT_PRECISION) -> Ball:
        """Coefficient as a ball."""
        return Ball.exact(self.coeff, p)

    def evaluate(self, z: Ball, p: Precision = DEFAULT_PRECISION) -> Ball:
        """Value of the term at ``z``."""
        arg = z.mul(self.freq, p)
        return self.coefficient(p).mul(shifted_cos(arg.cos(p), arg.sin(p), self.phase_eighths, p), p)


def _normalize(freq: int, eighths: int) -> tuple[int, int, int]:
    """Return ``(freq, eighths, sign)`` with ``freq >= 0`` and ``eighths`` in ``0..3``."""
    if freq < 0:
        freq, eighths = -freq, -eighths
    eighths %= 8
    sign = 1
    if eighths >= 4:
        eighths, sign = eighths - 4, -1
    return freq, eighths, sign


def _cos_product(
    phases: Sequence[int], coeff: Fraction, into: dict[tuple[int, int], Fraction]
) -> None:
    """Add ``coeff * prod_j cos(z + phases[j] pi/4)`` to ``into`` as a cosine sum."""
    share = coeff / 32
    for signs in _SIGN_VECTORS:
        freq = sum(signs)
        eighths = sum(s * q for s, q in zip(signs, phases, strict=True))
        freq, eighths, sign = _normalize(freq, eighths)
        if freq == 0 and eighths % 2 == 0:
            # constant cos(eighths pi/4): 1 or 0
            if eighths == 0:
                into[0, 0] += sign * share
            continue
        into[freq, eighths] += sign * share


def _terms(collected: dict[tuple[int, int], Fraction]) -> tuple[TrigTerm, ...]:
    return tuple(
        TrigTerm(freq, eighths, coeff)
        for (freq, eighths), coeff in sorted(collected.items())
        if coeff != 0
    )


def b_prefactor(n: int) -> Fraction:
    """``(n^2 - 1/4) / 2``."""
    return (n * n - Fraction(1, 4)) / 2


def c_prefactor(n: int) -> Fraction:
    """``(n^2 - 1/4)(n^2 - 9/4) / 8``."""
    return (n * n - Fraction(1, 4)) * (n * n - Fraction(9, 4)) / 8


def d_prefactor(n: int) -> Fraction:
    """``(n^2 - 1/4)(n^2 - 9/4)(n^2 - 25/4) / 48``."""
    return (n * n - Fraction(1, 4)) * (n * n - Fraction(9, 4)) * (n * n - Fraction(25, 4)) / 48


def _phase_eighths(n: int) -> int:
    """``w = z - pi/4 - n pi/2 = z + q pi/4``."""
    return -1 - 2 * n


@dataclass(frozen=True, slots=True)
class TailCoefficients:
    """
    Cosine-sum forms of ``A``, ``B`` and ``C`` for one order 6-tuple.

    ``A_terms``, ``B_terms`` and ``C_terms`` multiply ``z^-2``, ``z^-3`` and
    ``z^-4``. ``b_prefactors`` and ``c_prefactors`` are the per-factor
    rationals ``(n^2 - 1/4)/2`` and ``(n^2 - 1/4)(n^2 - 9/4)/8``.
    """

    orders: tuple[int, ...]
    A_terms: tuple[TrigTerm, ...]
    B_terms: tuple[TrigTerm, ...]
    C_terms: tuple[TrigTerm, ...]
    b_prefactors: tuple[Fraction, ...]
    c_prefactors: tuple[Fraction, ...]

    def by_power(self) -> tuple[tuple[int, tuple[TrigTerm, ...]], ...]:
        """``(power, terms)`` pairs for ``z^-2``, ``z^-3`` and ``z^-4``."""
        return tuple(zip(TAIL_POWERS, (self.A_terms, self.B_terms, self.C_terms), strict=True))

    def evaluate(self, z: Ball, p: Precision = DEFAULT_PRECISION) -> tuple[Ball, Ball, Ball]:
        """Evaluate the three cosine sums at ``z``."""
        a, b, c = (ball_sum((t.evaluate(z, p) for t in terms), p) for _, terms in self.by_power())
        return a, b, c


@lru_cache(maxsize=4096)
def _expand(orders: tuple[int, ...]) -> TailCoefficients:
    phases = [_phase_eighths(n) for n in orders]
    b_pre = tuple(b_prefactor(n) for n in orders)
    c_pre = tuple(c_prefactor(n) for n in orders)

    a_sum: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
    _cos_product(phases, Fraction(1), a_sum)

    b_sum: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
    for j in range(6):
        shifted = list(phases)
        shifted[j] -= 2
        _cos_product(shifted, -b_pre[j], b_sum)

    c_sum: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
    for j, k in itertools.combinations(range(6), 2):
        shifted = list(phases)
        shifted[j] -= 2
        shifted[k] -= 2
        _cos_product(shifted, b_pre[j] * b_pre[k], c_sum)
    c_total = sum(c_pre, Fraction(0))
    for slot, coeff in a_sum.items():
        c_sum[slot] -= c_total * coeff

    return TailCoefficients(
        orders=orders,
        A_terms=_terms(a_sum),
        B_terms=_terms(b_sum),
        C_terms=_terms(c_sum),
        b_prefactors=b_pre,
        c_prefactors=c_pre,
    )


def expand_products(k: Sequence[int]) -> TailCoefficients:
    """
    Expand ``A``, ``B`` and ``C`` for the orders ``k`` into cosine sums.

    Parameters
    ----------
    k : Sequence[int]
        Six signed Bessel orders with even sum.

    Returns
    -------
    TailCoefficients
        The expansion. ``A`` has at most 32 terms before merging and
        16 after.

    Raises
    ------
    OddSumKey
        If the orders have odd sum; the error budget assumes the parity
        cancellation that only even sums provide.
    """
    orders = tuple(k)
    if len(orders) != 6:
        msg = f"Expected six orders, got {len(orders)}"
        raise ValueError(msg)
    if sum(orders) % 2:
        msg = f"Orders {orders} have odd sum"
        raise OddSumKey(msg)
    return _expand(orders)


def defining_products(k: Sequence[int], z: Ball, p: Precision = DEFAULT_PRECISION) -> tuple[Ball, Ball, Ball]:
    """Evaluate ``A``, ``B`` and ``C`` directly from their products of sines and cosines."""
    c_z, s_z = z.cos(p), z.sin(p)
    cosines = [shifted_cos(c_z, s_z, _phase_eighths(n), p) for n in k]
    sines = [shifted_cos(c_z, s_z, _phase_eighths(n) - 2, p) for n in k]

    def product(factors: Sequence[Ball]) -> Ball:
        result = ONE
        for f in factors:
            result = result.mul(f, p)
        return result

    a = product(cosines)
    b = ZERO
    for j, n in enumerate(k):
        factors = [sines[i] if i == j else cosines[i] for i in range(6)]
        b = b.sub(product(factors).mul(b_prefactor(n), p), p)
    c = a.mul(sum((c_prefactor(n) for n in k), Fraction(0)), p).neg()
    for j, i in itertools.combinations(range(6), 2):
        factors = [sines[t] if t in (j, i) else cosines[t] for t in range(6)]
        weight = b_prefactor(k[j]) * b_prefactor(k[i])
        c = c.add(product(factors).mul(weight, p), p)
    return a, b, c


@lru_cache(maxsize=1024)
def _unit_integral(
    freq: int, eighths: int, power: int, t: Fraction, p: Precision, depth: int | None
) -> Ball:
    """
    ``int_T^inf cos(freq z + eighths pi/4) z^-power dz``.

    The by-parts series is asymptotic: its remainder majorants shrink only
    while ``power + m - 1 < freq T``. Without a fixed ``depth`` the series is
    cut at the target or at the first majorant that fails to shrink,
    whichever comes first, and that majorant joins the radius.
    """
    t_ball = Ball.exact(t, p)
    if freq == 0:
        constant = shifted_cos(ONE, ZERO, eighths, p)
        return constant.mul(t_ball.pow_int(1 - power, p), p).div(power - 1, p)
    if freq * t < power + 4:
        msg = f"Cannot certify the by-parts series: freq*T = {freq * t} < {power + 4}"
        raise NonConvergence(msg)
    arg = t_ball.mul(freq, p)
    c, s = arg.cos(p), arg.sin(p)
    inv_t = ONE.div(t_ball, p)
    target = Ball(1).mul_2exp(-(p.bits + 4)).upper()

    # term m: -(power)_m / F^m * T^-(power+m) * sin(FT + phi - m pi/2) / F
    scale = t_ball.pow_int(-power, p).div(freq, p)
    terms = []
    previous = None
    m = 0
    while True:
        sine = shifted_cos(c, s, eighths - 2 - 2 * m, p)
        terms.append(scale.mul(sine, p).neg())
        m += 1
        scale = scale.mul(power + m - 1, p).div(freq, p).mul(inv_t, p)
        majorant = scale.mul(t_ball, p).mul(freq, p).div(power + m - 1, p)
        if depth is not None:
            if m >= depth:
                break
            continue
        bound = majorant.upper()
        if bound <= target or m >= MAX_PARTS_DEPTH:
            break
        if previous is not None and bound >= previous:
            logger.debug(
                "By-parts series for freq=%d, power=%d cut at depth %d with remainder %s",
                freq,
                power,
                m,
                bound,
            )
            break
        previous = bound
    return ball_sum(terms, p).widen(majorant)


def integrate_trig_term(
    term: TrigTerm,
    power: int,
    T: Number,
    p: Precision = DEFAULT_PRECISION,
    depth: int | None = None,
) -> Ball:
    """
    Enclose ``int_T^inf coeff cos(freq z + phase) z^-power dz``.

    Zero frequencies integrate in closed form. Other frequencies are
    integrated by parts until the remainder majorant
    ``(power)_m / F^m * T^(1-power-m) / (power+m-1)`` falls below
    ``2^-(bits+4)`` or stops shrinking, or for exactly ``depth`` steps when
    given; the majorant is then added to the radius.

    Raises
    ------
    NonConvergence
        If ``freq * T < power + 4``.
    """
    if power < 2:
        msg = f"The tail integral diverges for power {power}"
        raise ValueError(msg)
    unit = _unit_integral(term.freq, term.phase_eighths, power, to_fraction(T), p, depth)
    return unit.mul(term.coefficient(p), p)


def tail_main(
    k: Sequence[int],
    T: Number,
    p: Precision = DEFAULT_PRECISION,
    depth: int | None = None,
    band_limit: int | None = None,
) -> Ball:
    """
    Enclose ``(2/pi)^3 int_T^inf (A z^-2 + B z^-3 + C z^-4) dz``.

    Parameters
    ----------
    k : Sequence[int]
        Six orders with even sum.
    T : number
        Second cutoff.
    p : Precision
        Working precision.
    depth : int, optional
        Fixed integration-by-parts depth for nonzero frequencies.
    band_limit : int, optional
        When given, ``T >= 10 N^2`` is enforced.

    Raises
    ------
    ValidityViolation
        If ``band_limit`` is given and ``T < 10 N^2``.
    """
    t = to_fraction(T)
    if band_limit is not None and t < 10 * band_limit**2:
        msg = f"T = {t} is below 10 N^2 = {10 * band_limit**2}"
        raise ValidityViolation(msg)
    coefficients = expand_products(k)
    parts = [
        integrate_trig_term(term, power, t, p, depth)
        for power, terms in coefficients.by_power()
        for term in terms
    ]
    scale = Ball(2).div(Ball.pi(p), p).pow_int(3, p)
    return ball_sum(parts, p).mul(scale, p)


def tail_error(N: int, T: Number, p: Precision = DEFAULT_PRECISION, *, check: bool = True) -> Ball:
    """
    Uniform bound on the tail approximation error.

    ``19 N^6 T^-5 + 0.68 N^8 T^-5 + 0.35 N^10 T^-6 + 0.13 N^12 T^-7 + 16 N^14 T^-8``,
    evaluated exactly in rationals and rounded outward.

    Raises
    ------
    ValidityViolation
        With ``check`` set, if ``N < 20`` or ``T < 10 N^2``.
    """
    t = to_fraction(T)
    if check and (N < 20 or t < 10 * N * N):
        msg = f"tail_error needs N >= 20 and T >= 10 N^2; got N={N}, T={t}"
        raise ValidityViolation(msg)
    if t <= 0:
        msg = f"T must be positive, got {t}"
        raise ValidityViolation(msg)
    n = Fraction(N)
    bound = (
        19 * n**6 / t**5
        + Fraction(68, 100) * n**8 / t**5
        + Fraction(35, 100) * n**10 / t**6
        + Fraction(13, 100) * n**12 / t**7
        + 16 * n**14 / t**8
    )
    return Ball.exact(bound, p)


def four_term_expansion(n: int, z: Ball, p: Precision = DEFAULT_PRECISION) -> Ball:
    """``sqrt(2/(pi z)) (a + b/z + c/z^2 + d/z^3)``, the order-4 large-argument form of ``J_n``."""
    c_z, s_z = z.cos(p), z.sin(p)
    q = _phase_eighths(n)
    cos_w = shifted_cos(c_z, s_z, q, p)
    sin_w = shifted_cos(c_z, s_z, q - 2, p)
    inv_z = ONE.div(z, p)
    a = cos_w
    b = sin_w.mul(b_prefactor(n), p).neg()
    c = cos_w.mul(c_prefactor(n), p).neg()
    d = sin_w.mul(d_prefactor(n), p)
    poly = d.mul(inv_z, p).add(c, p).mul(inv_z, p).add(b, p).mul(inv_z, p).add(a, p)
    amp = Ball(2).div(Ball.pi(p).mul(z, p), p).sqrt(p)
    return poly.mul(amp, p)


def expansion_remainder(N: int, z: Ball, p: Precision = DEFAULT_PRECISION) -> Ball:
    """``0.0043 N^8 / z^4 * sqrt(2/(pi z))``, the bound on ``|J_n - four_term_expansion|``."""
    amp = Ball(2).div(Ball.pi(p).mul(z, p), p).sqrt(p)
    return Ball.exact(REMAINDER_CONSTANT * N**8, p).div(z.pow_int(4, p), p).mul(amp, p)
