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

"""Q-matrix blocks assembled from stored integrals."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from mpmath.libmp import mpf_add, round_ceiling, to_float

from bessel_cert.arith.ball import ZERO, Ball, Precision, ball_sum
from bessel_cert.engine.params import scheme_error
from bessel_cert.exceptions import AsymmetricBlock, MissingData, ZeroDiagonal
from bessel_cert.spectral.index_sets import (
    Triple,
    disc_indices,
    entry_combination,
    enumerate_X_D,
    hexagon_labels,
    multiplicity,
)

if TYPE_CHECKING:
    from bessel_cert.engine.integrals import IntegralStore
    from bessel_cert.engine.params import SchemeParams

logger = logging.getLogger(__name__)

ENTRY_INTEGRALS = 16
COEFFICIENT_DENOMINATOR = 6


def _upper(value: Ball) -> float:
    mid, rad = value.raw
    return to_float(mpf_add(mid, rad, 53, round_ceiling), rnd=round_ceiling)


@dataclass(frozen=True, eq=False)
class BlockMatrix:
    """
    The matrix ``(Q_{m,n})`` for ``m, n`` in ``X_D``, as assembled.

    Parameters
    ----------
    N : int
        Band limit.
    D : int
        Block label.
    index : tuple[Triple, ...]
        Row and column labels, lexicographically sorted.
    entries : tuple[tuple[Ball, ...], ...]
        Assembled entries. These enclose the scheme's approximation of
        ``Q``; the true entries lie within a further ``scheme_eps``.
    scheme_eps : Ball
        Per-entry scheme error, ``16 * scheme_error``.
    bits : int
        Working precision the entries were combined at.
    """

    N: int
    D: int
    index: tuple[Triple, ...]
    entries: tuple[tuple[Ball, ...], ...]
    scheme_eps: Ball
    bits: int

    @property
    def dim(self) -> int:
        """``|X_D|``."""
        return len(self.index)

    @property
    def precision(self) -> Precision:
        """Working precision of the entries."""
        return Precision(self.bits)

    def position(self, m: tuple[int, int, int]) -> int:
        """Row of the sorted representative of ``m``."""
        label = Triple(*sorted(m))
        try:
            return self.index.index(label)
        except ValueError:
            msg = f"{label} is not in X_{self.D} for N={self.N}"
            raise MissingData(msg) from None

    def entry(self, m: tuple[int, int, int], n: tuple[int, int, int]) -> Ball:
        """Symmetrised entry for any labels of ``Z_D``."""
        i, j = self.position(m), self.position(n)
        return self.symmetric_entry(i, j)

    def symmetric_entry(self, i: int, j: int) -> Ball:
        """``(e_ij + e_ji) / 2`` by position."""
        if i == j:
            return self.entries[i][i]
        return self.entries[i][j].add(self.entries[j][i], self.precision).mul_2exp(-1)

    def symmetrized(self) -> tuple[tuple[Ball, ...], ...]:
        """``(e_ij + e_ji) / 2`` for every pair."""
        return tuple(tuple(self.symmetric_entry(i, j) for j in range(self.dim)) for i in range(self.dim))

    def midpoints(self) -> np.ndarray:
        """Symmetrised midpoints as a float matrix."""
        rows = self.symmetrized()
        return np.array([[float(value.mid) for value in row] for row in rows], dtype=float)

    def radius_norm(self) -> float:
        """Largest row sum of the symmetrised entry radii, rounded up."""
        if not self.dim:
            return 0.0
        p = self.precision
        return max(
            _upper(ball_sum((Ball.from_raw(value.raw[1]) for value in row), p)) for row in self.symmetrized()
        )

    def asymmetries(self) -> list[tuple[int, int]]:
        """Index pairs whose entries differ by more than their radii and ``2 * scheme_eps``."""
        p = self.precision
        allowance = self.scheme_eps.mul_2exp(1).upper()
        return [
            (i, j)
            for i in range(self.dim)
            for j in range(i + 1, self.dim)
            if self.entries[i][j].sub(self.entries[j][i], p).abs().lower() > allowance
        ]


def entry_value(
    m: tuple[int, int, int], n: tuple[int, int, int], store: IntegralStore, p: Precision
) -> Ball:
    """
    Enclose ``Q_{m,n}`` from stored integrals.

    The coefficients are sixths, so the sum is taken over integer
    multiples and divided by six once.

    Raises
    ------
    MissingKey
        If the store lacks one of the integrals.
    """
    terms = [
        store.get(key).mul(int(coefficient * COEFFICIENT_DENOMINATOR), p)
        for coefficient, key in entry_combination(m, n)
    ]
    return ball_sum(terms, p).div(COEFFICIENT_DENOMINATOR, p)


def assemble_block(
    N: int,  # noqa: N803
    D: int,  # noqa: N803
    store: IntegralStore,
    params: SchemeParams,
    strict: bool | None = None,
) -> BlockMatrix:
    """
    Assemble the block ``D`` at band limit ``N``.

    Parameters
    ----------
    N : int
        Band limit.
    D : int
        Block label.
    store : IntegralStore
        Integrals for ``params``.
    params : SchemeParams
        The scheme; its error sets ``scheme_eps``.
    strict : bool, optional
        Raise on asymmetry instead of warning. Defaults to
        ``params.certified``.

    Returns
    -------
    BlockMatrix
        Every entry computed independently, including both triangles.

    Raises
    ------
    MissingKey
        If an integral is missing from the store.
    AsymmetricBlock
        If ``strict`` and two mirrored entries cannot be equal.
    """
    if store.scheme_hash != params.scheme_hash:
        msg = "Integral store belongs to a different scheme"
        raise ValueError(msg)
    strict = params.certified if strict is None else strict
    p = params.precision
    index = tuple(enumerate_X_D(N, D))
    entries = tuple(tuple(entry_value(m, n, store, p) for n in index) for m in index)
    scheme_eps = scheme_error(params).mul(ENTRY_INTEGRALS, p)
    block = BlockMatrix(N, D, index, entries, scheme_eps, params.bits)
    mismatched = block.asymmetries()
    if mismatched:
        i, j = mismatched[0]
        msg = (
            f"Block D={D} has {len(mismatched)} asymmetric pairs, first "
            f"{index[i]}/{index[j]}: {entries[i][j]} vs {entries[j][i]}"
        )
        if strict:
            raise AsymmetricBlock(msg)
        logger.warning(msg)
    logger.debug("Assembled block D=%d of size %d", D, block.dim)
    return block


@dataclass(frozen=True, eq=False)
class LabelledMatrix:
    """A float matrix with triple labels on both axes."""

    labels: tuple[Triple, ...]
    values: np.ndarray

    def column(self, m: tuple[int, int, int]) -> np.ndarray:
        """Column of label ``m``."""
        try:
            return self.values[:, self.labels.index(Triple(*m))]
        except ValueError:
            msg = f"{tuple(m)} is not a label of this matrix"
            raise MissingData(msg) from None


def hexagon_block(
    N: int,  # noqa: N803
    D: int,  # noqa: N803
    store: IntegralStore,
    params: SchemeParams,
    *,
    block: BlockMatrix | None = None,
) -> LabelledMatrix:
    """
    Expand block ``D`` to all permutations of its labels (the set ``Z_D``).

    ``Q`` is unchanged when rows and columns are permuted together and
    when the column label alone is permuted, so an entry only depends on
    the sorted labels and is read from the block.
    """
    block = block or assemble_block(N, D, store, params)
    labels = tuple(hexagon_labels(N, D))
    rows = np.array([block.index.index(m.sorted()) for m in labels], dtype=int)
    base = block.midpoints()
    return LabelledMatrix(labels, base[np.ix_(rows, rows)])


def disc_block(
    N: int,  # noqa: N803
    store: IntegralStore,
    params: SchemeParams,
    *,
    block: BlockMatrix | None = None,
) -> LabelledMatrix:
    """
    ``(p_m Q_{m,n} p_n)`` over the triples of ``X_0`` inside the disc ``|m|^2 <= 3N^2/2``.

    The labels may be empty for small ``N``.
    """
    block = block or assemble_block(N, 0, store, params)
    labels = tuple(disc_indices(N))
    rows = np.array([block.index.index(m) for m in labels], dtype=int)
    weights = np.array([multiplicity(m) for m in labels], dtype=float)
    values = block.midpoints()[np.ix_(rows, rows)] * np.outer(weights, weights)
    return LabelledMatrix(labels, values)


def diag_ratio(
    N: int,  # noqa: N803
    D: int,  # noqa: N803
    m: tuple[int, int, int],
    store: IntegralStore,
    params: SchemeParams,
    *,
    block: BlockMatrix | None = None,
) -> Ball:
    """
    Enclose ``r_m = |Q_{m,m}|^-1 sum_{n != m} |Q_{m,n}|``.

    Raises
    ------
    ZeroDiagonal
        If the diagonal enclosure contains zero.
    MissingData
        If ``m`` is not a label of the block.
    """
    block = block or assemble_block(N, D, store, params)
    return _row_ratio(block, block.position(m))


def _row_ratio(block: BlockMatrix, i: int) -> Ball:
    p = block.precision
    diagonal = block.entries[i][i]
    if diagonal.contains_zero():
        msg = f"Diagonal entry of {block.index[i]} in block D={block.D} contains zero: {diagonal}"
        raise ZeroDiagonal(msg)
    if block.dim == 1:
        return ZERO
    off = ball_sum((block.symmetric_entry(i, j).abs() for j in range(block.dim) if j != i), p)
    return off.div(diagonal.abs(), p)


def min_diag_ratio(block: BlockMatrix) -> float | None:
    """Smallest ``r_m`` midpoint of the block, or ``None`` when a diagonal encloses zero."""
    try:
        return min(float(_row_ratio(block, i).mid) for i in range(block.dim))
    except ZeroDiagonal:
        logger.debug("Block D=%d has a diagonal entry enclosing zero", block.D)
        return None
