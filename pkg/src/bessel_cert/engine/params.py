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

"""Scheme parameters: cutoffs, panel widths, rule size and precision."""

from __future__ import annotations

import hashlib
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Literal

from bessel_cert.arith.ball import DEFAULT_BITS, Ball, Number, Precision
from bessel_cert.exceptions import InvalidBandLimit, InvalidSchemeParams
from bessel_cert.quadrature.gauss import (
    MAX_RULE_POINTS,
    PanelLayout,
    bound_0S,
    bound_ST,
    minimal_cutoff,
    to_fraction,
)
from bessel_cert.quadrature.tail import tail_error

logger = logging.getLogger(__name__)

Mode = Literal["certify", "explore"]

DEFAULT_D0 = Fraction(1, 4)
DEFAULT_D1 = Fraction(4, 5)
DEFAULT_NODES = 12
T_MARGIN = Fraction(1024, 1000)
MIN_CERTIFIED_N = 20
MIN_EXPLORE_N = 2


@dataclass(frozen=True, slots=True)
class SchemeParams:
    """
    Resolved parameters of the integration scheme.

    Attributes
    ----------
    N : int
        Band limit.
    S : Fraction
        First cutoff; ``[0, S]`` is covered by panels of half-width ``d0``.
    T : Fraction
        Second cutoff; ``[S, T]`` is covered by panels of half-width ``d1``.
    d0, d1 : Fraction
        Panel half-widths.
    n : int
        Gauss-Legendre points per panel.
    bits : int
        Working precision.
    certified : bool
        ``False`` in explore mode, where the analytic error bounds do not
        apply.
    """

    N: int
    S: Fraction
    T: Fraction
    d0: Fraction = DEFAULT_D0
    d1: Fraction = DEFAULT_D1
    n: int = DEFAULT_NODES
    bits: int = DEFAULT_BITS
    certified: bool = True

    def __post_init__(self) -> None:
        """Check the grids line up exactly."""
        if self.d0 <= 0 or self.d1 <= 0:
            msg = f"Panel half-widths must be positive, got d0={self.d0}, d1={self.d1}"
            raise InvalidSchemeParams(msg)
        if not 1 <= self.n <= MAX_RULE_POINTS:
            msg = f"Rule size must be between 1 and {MAX_RULE_POINTS}, got {self.n}"
            raise InvalidSchemeParams(msg)
        if not 0 < self.S < self.T:
            msg = f"Cutoffs must satisfy 0 < S < T, got S={self.S}, T={self.T}"
            raise InvalidSchemeParams(msg)
        if (self.S / (2 * self.d0)).denominator != 1:
            msg = f"S = {self.S} is not a multiple of 2*d0 = {2 * self.d0}"
            raise InvalidSchemeParams(msg)
        if ((self.T - self.S) / (2 * self.d1)).denominator != 1:
            msg = f"T - S = {self.T - self.S} is not a multiple of 2*d1 = {2 * self.d1}"
            raise InvalidSchemeParams(msg)

    @property
    def precision(self) -> Precision:
        """Working precision as a :class:`Precision`."""
        return Precision(self.bits)

    @property
    def K0(self) -> int:  # noqa: N802
        """Number of panels on ``[0, S]``."""
        return int(self.S / (2 * self.d0))

    @property
    def K1(self) -> int:  # noqa: N802
        """Number of panels on ``[S, T]``."""
        return int((self.T - self.S) / (2 * self.d1))

    @property
    def near_layout(self) -> PanelLayout:
        """Panels on ``[0, S]``."""
        return PanelLayout(Fraction(0), self.S, self.K0, self.d0)

    @property
    def far_layout(self) -> PanelLayout:
        """Panels on ``[S, T]``."""
        return PanelLayout(self.S, self.T, self.K1, self.d1)

    @property
    def node_count(self) -> int:
        """Quadrature nodes shared by every integral."""
        return (self.K0 + self.K1) * self.n

    @property
    def max_order(self) -> int:
        """Largest Bessel order any required key can reach (``|m - n| <= 2N``)."""
        return 2 * self.N

    @property
    def mode(self) -> Mode:
        """``"certify"`` or ``"explore"``."""
        return "certify" if self.certified else "explore"

    def canonical(self) -> str:
        """Canonical ``key=value;...`` form hashed into :attr:`scheme_hash`."""
        return (
            f"N={self.N};S={self.S};T={self.T};d0={self.d0};d1={self.d1};"
            f"n={self.n};bits={self.bits}"
        )

    @property
    def scheme_hash(self) -> str:
        """SHA-256 of :meth:`canonical`; identical integrals share a hash across modes."""
        return hashlib.sha256(self.canonical().encode("utf-8")).hexdigest()

    def describe(self) -> dict[str, str | int | bool]:
        """Plain values for printing."""
        return {
            "N": self.N,
            "S": str(self.S),
            "T": str(self.T),
            "d0": str(self.d0),
            "d1": str(self.d1),
            "n": self.n,
            "bits": self.bits,
            "mode": self.mode,
            "K0": self.K0,
            "K1": self.K1,
            "nodes": self.node_count,
            "scheme_hash": self.scheme_hash,
        }


def _smallest_multiple(bound: Fraction, step: Fraction, start: Fraction = Fraction(0)) -> Fraction:
    """Smallest ``start + k*step >= bound`` with ``k >= 1``."""
    k = max(1, math.ceil((bound - start) / step))
    return start + k * step


def scheme_params(
    N: int,  # noqa: N803
    mode: Mode = "certify",
    *,
    d0: Number | None = None,
    d1: Number | None = None,
    s: Number | None = None,
    t: Number | None = None,
    n: int = DEFAULT_NODES,
    bits: int = DEFAULT_BITS,
) -> SchemeParams:
    """
    Resolve the scheme for band limit ``N``.

    Parameters
    ----------
    N : int
        Band limit. Certify mode needs ``N >= 20`` and even; explore mode
        accepts any even ``N >= 2``.
    mode : {"certify", "explore"}, default "certify"
        Explore mode keeps the grids but marks the error bounds invalid.
    d0, d1 : number, optional
        Panel half-widths, defaulting to 1/4 and 4/5.
    s, t : number, optional
        Cutoffs. By default ``S`` is the smallest multiple of ``2*d0`` above
        ``0.95 N^(3/2) ln N + 1`` and ``T`` the smallest ``S + k*2*d1`` above
        ``1.024 * 10 N^2``.
    n : int, default 12
        Gauss-Legendre points per panel.
    bits : int, default 128
        Working precision.

    Returns
    -------
    SchemeParams
        The validated parameters.

    Raises
    ------
    InvalidBandLimit
        If ``N`` is not admissible for ``mode``.
    InvalidSchemeParams
        If overrides break alignment or, in certify mode, the validity
        conditions of the error bounds.

    Examples
    --------
    >>> p = scheme_params(20)
    >>> (p.S, p.T)
    (Fraction(256, 1), Fraction(4096, 1))
    """
    if mode not in {"certify", "explore"}:
        msg = f"Unknown mode {mode!r}"
        raise InvalidSchemeParams(msg)
    certified = mode == "certify"
    floor = MIN_CERTIFIED_N if certified else MIN_EXPLORE_N
    if N < floor or N % 2:
        msg = f"{mode} mode needs an even N >= {floor}, got {N}"
        raise InvalidBandLimit(msg)
    Precision(bits)

    step0 = 2 * (DEFAULT_D0 if d0 is None else to_fraction(d0))
    step1 = 2 * (DEFAULT_D1 if d1 is None else to_fraction(d1))
    cutoff = minimal_cutoff(N, Precision(bits)).upper_fraction()
    far = T_MARGIN * 10 * N * N
    s_value = _smallest_multiple(cutoff, step0) if s is None else to_fraction(s)
    t_value = _smallest_multiple(far, step1, s_value) if t is None else to_fraction(t)

    if certified:
        if s_value < cutoff:
            msg = f"S = {s_value} is below 0.95 N^1.5 ln N + 1 = {float(cutoff):.4f}"
            raise InvalidSchemeParams(msg)
        if t_value < 10 * N * N:
            msg = f"T = {t_value} is below 10 N^2 = {10 * N * N}"
            raise InvalidSchemeParams(msg)
    params = SchemeParams(
        N=N,
        S=s_value,
        T=t_value,
        d0=step0 / 2,
        d1=step1 / 2,
        n=n,
        bits=bits,
        certified=certified,
    )
    if not certified:
        logger.warning("Explore mode at N=%d: error bounds are not valid for these parameters", N)
    logger.info("Scheme for N=%d: S=%s T=%s (%d nodes)", N, params.S, params.T, params.node_count)
    return params


@lru_cache(maxsize=16)
def scheme_error(params: SchemeParams) -> Ball:
    """
    Uniform bound on ``|I_k - I~_k|`` for every admissible key.

    The sum of the two quadrature bounds and the tail bound. In explore mode
    the same formulas are evaluated without their validity checks, so the
    value is indicative only.

    Raises
    ------
    ValidityViolation
        In certify mode, if any of the bounds' hypotheses fail.
    """
    p = params.precision
    check = params.certified
    near = bound_0S(params.S, params.d0, params.n, p)
    far = bound_ST(params.S, params.T, params.d1, params.n, params.N, p, check=check)
    tail = tail_error(params.N, params.T, p, check=check)
    return near.add(far, p).add(tail, p)


def evaluation_counts(params: SchemeParams) -> tuple[int, int]:
    """Integrand evaluations per integral on ``[0, S]`` and on ``[S, T]``."""
    return params.K0 * params.n, params.K1 * params.n
