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
Certified enclosure of the smallest eigenvalue of a block.

A floating-point eigenpair from :func:`numpy.linalg.eigh` gives the
candidate. Its residual, evaluated in ball arithmetic, bounds the
distance to an eigenvalue of the midpoint matrix, and the entry radii
add their row-sum norm. The lower end is then proven by an interval
``LDL^T`` factorisation: if every pivot of ``B - sigma I`` is positive
for the whole enclosure ``B``, no eigenvalue lies below ``sigma``.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from mpmath.libmp import fone, from_float, mpf_shift

from bessel_cert.arith.ball import Ball, ball_sum
from bessel_cert.exceptions import EigensolveFailure

if TYPE_CHECKING:
    from collections.abc import Sequence

    from bessel_cert.arith.ball import Precision
    from bessel_cert.spectral.blocks import BlockMatrix

logger = logging.getLogger(__name__)

WIDENING_FACTOR = 16
MAX_WIDENINGS = 12


def _ball_vector(values: np.ndarray) -> list[Ball]:
    return [Ball.from_raw(from_float(float(v))) for v in values]


def _norm(vector: Sequence[Ball], p: Precision) -> Ball:
    return ball_sum((v.mul(v, p) for v in vector), p).sqrt(p)


def residual_bound(
    centers: Sequence[Sequence[Ball]], value: float, vector: np.ndarray, p: Precision
) -> Ball:
    """
    Enclose ``||M x - value x|| / ||x||`` for the exact midpoint matrix ``M``.

    Parameters
    ----------
    centers : Sequence[Sequence[Ball]]
        Midpoints of the block, as exact balls.
    value : float
        Approximate eigenvalue.
    vector : numpy.ndarray
        Approximate eigenvector.
    p : Precision
        Working precision.
    """
    x = _ball_vector(vector)
    lam = Ball.from_raw(from_float(float(value)))
    residual = [
        ball_sum((a.mul(xj, p) for a, xj in zip(row, x, strict=True)), p).sub(lam.mul(xi, p), p)
        for row, xi in zip(centers, x, strict=True)
    ]
    return _norm(residual, p).div(_norm(x, p), p)


def ldl_positive(entries: Sequence[Sequence[Ball]], shift: Ball, p: Precision) -> bool:
    """
    Return whether every symmetric matrix in ``entries - shift I`` is positive definite.

    Only the lower triangle is read. The factorisation stops at the first
    pivot that is not certainly positive.
    """
    n = len(entries)
    lower: list[list[Ball]] = [[] for _ in range(n)]
    scaled: list[list[Ball]] = [[] for _ in range(n)]
    pivots: list[Ball] = []
    for j in range(n):
        pivot = entries[j][j].sub(shift, p)
        pivot = pivot.sub(ball_sum((lower[j][k].mul(scaled[j][k], p) for k in range(j)), p), p)
        if not pivot.is_positive():
            logger.debug("Pivot %d of %d is not certainly positive: %s", j, n, pivot)
            return False
        pivots.append(pivot)
        for i in range(j + 1, n):
            w = entries[i][j].sub(ball_sum((lower[i][k].mul(scaled[j][k], p) for k in range(j)), p), p)
            scaled[i].append(w)
            lower[i].append(w.div(pivot, p))
    return True


def min_eig(block: BlockMatrix) -> Ball:
    """
    Enclose the smallest eigenvalue over every symmetric matrix in the block.

    Parameters
    ----------
    block : BlockMatrix
        Assembled block; its symmetrised entries are used.

    Returns
    -------
    Ball
        ``[sigma, lam + eta + rho]`` where ``lam`` is the floating-point
        eigenvalue, ``eta`` the certified residual and ``rho`` the row-sum
        norm of the radii.

    Raises
    ------
    EigensolveFailure
        If the eigensolver fails or no lower bound could be certified.

    Examples
    --------
    A block whose symmetrised entries are ``diag(1, 2)`` gives a ball
    containing 1.
    """
    p = block.precision
    entries = block.symmetrized()
    if not entries:
        msg = f"Block D={block.D} is empty"
        raise EigensolveFailure(msg)
    midpoints = block.midpoints()
    try:
        values, vectors = np.linalg.eigh(midpoints)
    except np.linalg.LinAlgError as e:
        msg = f"Eigensolver failed on block D={block.D}: {e}"
        raise EigensolveFailure(msg) from e
    lam = float(values[0])
    centers = [[Ball.from_raw(value.raw[0]) for value in row] for row in entries]
    eta = residual_bound(centers, lam, vectors[:, 0], p)
    rho = Ball(block.radius_norm())
    spread = eta.add(rho, p)
    upper = Ball.from_raw(from_float(lam)).add(spread, p).upper()

    scale = max(1.0, float(np.abs(midpoints).sum(axis=1).max()))
    delta = Ball.from_raw(mpf_shift(fone, -(p.bits // 2))).mul(Ball(scale), p)
    for attempt in range(MAX_WIDENINGS):
        sigma = Ball.from_raw(from_float(lam)).sub(spread.mul_2exp(1), p).sub(delta, p)
        shift = Ball.from_raw(sigma.lower()._mpf_)
        if ldl_positive(entries, shift, p):
            logger.debug(
                "Block D=%d: lambda in [%s, %s] after %d widenings", block.D, shift.mid, upper, attempt
            )
            return Ball.from_endpoints(shift.raw[0], upper._mpf_, p.bits)
        delta = delta.mul(WIDENING_FACTOR, p)
    msg = f"Could not certify a lower eigenvalue bound for block D={block.D} after {MAX_WIDENINGS} widenings"
    raise EigensolveFailure(msg)
