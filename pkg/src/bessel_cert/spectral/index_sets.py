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
Index sets of the Q-matrix blocks and the integrals each entry needs.

For a block label ``D``, ``X_D`` holds the sorted triples of even integers
in ``[-N, N]`` summing to ``D`` (the zero triple excluded) and ``Z_D``
their distinct permutations. An entry ``Q_{m,n}`` is the average over the
six permutations ``n_sigma`` of ``R_{m,n_sigma} - L_{m,n_sigma}`` with

    L_{m,n} = 2 I(m, -n) + sum_tau I(m, -n + s_tau)
    R_{m,n} = 2 I(m - n, 0) + sum_tau I(m - n, s_tau)

where ``s_tau`` runs over the permutations of ``(1, -1, 0)``.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import NamedTuple

from bessel_cert.engine.keys import ModeKey, canonical_orders

SHIFTS: tuple[tuple[int, int, int], ...] = tuple(sorted(set(itertools.permutations((1, -1, 0)))))
ZERO_SHIFT = (0, 0, 0)


class Triple(NamedTuple):
    """Three even mode indices."""

    m1: int
    m2: int
    m3: int

    @property
    def norm2(self) -> int:
        """``m1^2 + m2^2 + m3^2``."""
        return self.m1 * self.m1 + self.m2 * self.m2 + self.m3 * self.m3

    @property
    def label(self) -> str:
        """``m1_m2_m3`` for file names."""
        return f"{self.m1}_{self.m2}_{self.m3}"

    def permutations(self) -> list[Triple]:
        """Distinct permutations in lexicographic order."""
        return sorted({Triple(*p) for p in itertools.permutations(self)})

    def sorted(self) -> Triple:
        """The representative with ``m1 <= m2 <= m3``."""
        return Triple(*sorted(self))


def _check_block(N: int, D: int) -> None:  # noqa: N803
    if N < 2 or N % 2:
        msg = f"N must be even and at least 2, got {N}"
        raise ValueError(msg)
    if D % 2 or not 0 <= D <= 3 * N:
        msg = f"D must be even with 0 <= D <= 3N = {3 * N}, got {D}"
        raise ValueError(msg)


def block_labels(N: int) -> list[int]:  # noqa: N803
    """Every block label ``D = 0, 2, ..., 3N``."""
    return list(range(0, 3 * N + 1, 2))


def enumerate_X_D(N: int, D: int) -> list[Triple]:  # noqa: N802, N803
    """
    Sorted triples of the block ``D``.

    Parameters
    ----------
    N : int
        Band limit, even.
    D : int
        Block label, even, ``0 <= D <= 3N``.

    Returns
    -------
    list[Triple]
        Lexicographically sorted, duplicate-free.

    Examples
    --------
    >>> enumerate_X_D(4, 0)
    [Triple(m1=-4, m2=0, m3=4), Triple(m1=-4, m2=2, m3=2), Triple(m1=-2, m2=-2, m3=4), Triple(m1=-2, m2=0, m3=2)]
    """
    _check_block(N, D)
    triples = []
    for m1 in range(-N, N + 1, 2):
        for m2 in range(m1, N + 1, 2):
            m3 = D - m1 - m2
            if m3 < m2:
                break
            if m3 > N or (m1, m2, m3) == ZERO_SHIFT:
                continue
            triples.append(Triple(m1, m2, m3))
    return triples


def hexagon_labels(N: int, D: int) -> list[Triple]:  # noqa: N803
    """All permutations of the triples of ``X_D``, lexicographically sorted (the set ``Z_D``)."""
    return sorted({p for m in enumerate_X_D(N, D) for p in m.permutations()})


def disc_indices(N: int) -> list[Triple]:  # noqa: N803
    """Triples of ``X_0`` with ``m1^2 + m2^2 + m3^2 <= (3/2) N^2``."""
    return [m for m in enumerate_X_D(N, 0) if 2 * m.norm2 <= 3 * N * N]


def multiplicity(m: tuple[int, int, int]) -> int:
    """Number of distinct permutations of ``m``: 1, 3 or 6."""
    return len(set(itertools.permutations(m)))


def _add(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, int, int]:
    return a[0] + b[0], a[1] + b[1], a[2] + b[2]


def _neg(a: tuple[int, ...]) -> tuple[int, int, int]:
    return -a[0], -a[1], -a[2]


def entry_terms(m: tuple[int, int, int], n: tuple[int, int, int]) -> list[tuple[Fraction, tuple[int, ...]]]:
    """
    The signed integrals making up ``Q_{m,n}`` with their coefficients.

    Returns
    -------
    list[tuple[Fraction, tuple[int, ...]]]
        ``(coefficient, k)`` pairs, ``k`` a signed six-tuple. There are
        ``6 * (1 + 6 + 1 + 6)`` terms; their sum with ``I_k`` substituted
        is ``Q_{m,n}``.
    """
    m = tuple(m)
    terms: list[tuple[Fraction, tuple[int, ...]]] = []
    right_double, right_single = Fraction(2, 6), Fraction(1, 6)
    for sigma in itertools.permutations(range(3)):
        n_sigma = tuple(n[i] for i in sigma)
        diff = _add(m, _neg(n_sigma))
        terms.append((right_double, diff + ZERO_SHIFT))
        terms.extend((right_single, diff + shift) for shift in SHIFTS)
        minus_n = _neg(n_sigma)
        terms.append((-right_double, m + minus_n))
        terms.extend((-right_single, m + _add(minus_n, shift)) for shift in SHIFTS)
    return terms


def entry_combination(m: tuple[int, int, int], n: tuple[int, int, int]) -> list[tuple[Fraction, ModeKey]]:
    """
    ``Q_{m,n}`` as a combination of unsigned canonical keys.

    Terms of :func:`entry_terms` that reduce to the same key are merged,
    with reflection signs folded into the coefficients; zero coefficients
    are dropped and the result is sorted by key.
    """
    merged: dict[tuple[int, ...], Fraction] = {}
    for coefficient, k in entry_terms(m, n):
        flipped = sum(-o for o in k if o < 0)
        signed = -coefficient if flipped % 2 else coefficient
        orders = canonical_orders(k)
        merged[orders] = merged.get(orders, Fraction(0)) + signed
    return [(c, ModeKey(orders)) for orders, c in sorted(merged.items()) if c]


def _difference_keys(diff: tuple[int, int, int], keys: set[tuple[int, ...]]) -> None:
    keys.add(canonical_orders(diff + ZERO_SHIFT))
    for shift in SHIFTS:
        keys.add(canonical_orders(diff + shift))


def required_keys(N: int) -> set[ModeKey]:  # noqa: N803
    """
    Every unsigned key needed to assemble all blocks at band limit ``N``.

    The left-hand integrals only need the identity permutation of ``n``
    since permuting ``n`` permutes the shifted sums, and the right-hand
    integrals depend only on the difference vectors ``m - n_sigma``.

    Examples
    --------
    >>> len(required_keys(2))
    19
    """
    keys: set[tuple[int, ...]] = set()
    for D in block_labels(N):
        triples = enumerate_X_D(N, D)
        differences: set[tuple[int, int, int]] = set()
        for m in triples:
            for n in triples:
                minus_n = _neg(n)
                keys.add(canonical_orders(m + minus_n))
                for shift in SHIFTS:
                    keys.add(canonical_orders(m + _add(minus_n, shift)))
                for sigma in itertools.permutations(n):
                    differences.add(_add(m, _neg(sigma)))
        for diff in differences:
            _difference_keys(diff, keys)
    return {ModeKey(orders) for orders in keys}
