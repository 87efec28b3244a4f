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
Certified Bessel functions of the first kind, J_n for integer n, x >= 0.

Two evaluation paths share one containment contract:

* Hankel's asymptotic expansion for ``x >= max(60, n^2/4)``. Once the
  number of retained terms reaches ``n/2`` the remainder of each of the
  two auxiliary sums is bounded by its first neglected term.
* The alternating power series otherwise, carried at a precision raised by
  ``x log2(e)`` bits to absorb cancellation. The tail is bounded by the
  first omitted term once the terms decrease monotonically.

Arguments with a radius are evaluated at their midpoint and widened by the
radius, since ``|J_n'| <= 1`` on the real line.
"""

from __future__ import annotations

import gzip
import logging
import math
import time
from dataclasses import dataclass
from typing import TYPE_CHECKING

from joblib import Parallel, delayed
from mpmath import mpf

from bessel_cert.arith.ball import (
    DEFAULT_PRECISION,
    ONE,
    ZERO,
    Ball,
    Precision,
    ball_sum,
)
from bessel_cert.exceptions import CacheCorruption, DomainViolation, PrecisionExhausted

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence
    from pathlib import Path

    from bessel_cert.arith.ball import RawMpf

logger = logging.getLogger(__name__)

HANKEL_MIN_ARG = 60
MAX_SERIES_TERMS = 20_000
LOG2_E = 1.4426950408889634
TABLE_HEADER = "# bessel-cert table v1"


def _remainder_target(prec: Precision) -> mpf:
    return mpf(2) ** -(prec.bits + 4)


@dataclass(frozen=True, slots=True)
class _HankelNode:
    """Order-independent quantities at one argument."""

    x: float
    cos_theta: Ball
    sin_theta: Ball
    inv_x: Ball
    amp: Ball


def _hankel_node(x: Ball, wp: Precision) -> _HankelNode:
    inv_x = ONE.div(x, wp)
    amp = inv_x.mul_2exp(1).div(Ball.pi(wp), wp).sqrt(wp)
    c, s = x.cos(wp), x.sin(wp)
    root2 = Ball(2).sqrt(wp)
    # theta = x - pi/4
    return _HankelNode(
        x=float(x.mid),
        cos_theta=c.add(s, wp).div(root2, wp),
        sin_theta=s.sub(c, wp).div(root2, wp),
        inv_x=inv_x,
        amp=amp,
    )


def _rotate(node: _HankelNode, n: int) -> tuple[Ball, Ball]:
    """Return ``(cos w, sin w)`` for ``w = x - pi/4 - n pi/2``."""
    c, s = node.cos_theta, node.sin_theta
    quarter = n % 4
    if quarter == 0:
        return c, s
    if quarter == 1:
        return s, c.neg()
    if quarter == 2:
        return c.neg(), s.neg()
    return s.neg(), c


def _hankel(n: int, node: _HankelNode, prec: Precision) -> Ball | None:
    """Hankel expansion, or ``None`` when its terms stall above the target."""
    wp = prec.extended(32)
    target = _remainder_target(prec)
    mu = 4 * n * n
    amp_hi = node.amp.upper()
    terms = [ONE]

    def extend(index: int) -> None:
        while len(terms) <= index:
            k = len(terms)
            step = terms[-1].mul(mu - (2 * k - 1) ** 2, wp).div(8 * k, wp)
            terms.append(step.mul(node.inv_x, wp))

    ell = max(1, (n + 1) // 2)
    while True:
        extend(2 * ell + 1)
        tail = terms[2 * ell].abs().add(terms[2 * ell + 1].abs(), wp)
        if tail.upper() * amp_hi <= target:
            break
        if 2 * ell > 2 * node.x + 2 * n:
            return None
        ell += 1

    p_sum = ball_sum((terms[2 * k] if k % 2 == 0 else terms[2 * k].neg() for k in range(ell)), wp)
    q_sum = ball_sum(
        (terms[2 * k + 1] if k % 2 == 0 else terms[2 * k + 1].neg() for k in range(ell)), wp
    )
    cos_w, sin_w = _rotate(node, n)
    core = p_sum.mul(cos_w, wp).sub(q_sum.mul(sin_w, wp), wp)
    return core.mul(node.amp, wp).widen(tail.mul(node.amp, wp))


def _series(n: int, x: Ball, prec: Precision) -> Ball:
    """Power series ``(x/2)^n / n! * sum_m (-y)^m n! / (m! (m+n)!)``, ``y = (x/2)^2``."""
    wp = prec.extended(math.ceil(float(x.upper()) * LOG2_E) + 32)
    target = _remainder_target(prec)
    half = x.mul_2exp(-1)
    y = half.mul(half, wp)
    y_hi = y.upper()
    prefix = half.pow_int(n, wp).div(math.factorial(n), wp)
    prefix_hi = prefix.abs().upper()

    total, term = ONE, ONE
    for m in range(MAX_SERIES_TERMS):
        nxt = term.mul(y, wp).div(-(m + 1) * (m + 1 + n), wp)
        decreasing = (m + 2) * (m + 2 + n) > y_hi
        if decreasing and nxt.abs().upper() * prefix_hi <= target:
            total = total.widen(nxt)
            break
        total = total.add(nxt, wp)
        term = nxt
    else:
        msg = f"Power series for J_{n}({x}) did not settle in {MAX_SERIES_TERMS} terms"
        raise PrecisionExhausted(msg)
    return total.mul(prefix, wp)


def _use_hankel(n: int, x: float) -> bool:
    return x >= max(HANKEL_MIN_ARG, n * n / 4)


def _point_value(
    n: int,
    x: Ball,
    prec: Precision,
    tolerance: Ball,
    node: _HankelNode | None = None,
) -> Ball:
    """Enclose ``J_n(x)`` for an exact point ``x >= 0`` and ``n >= 0``."""
    if x.contains_zero():
        return ONE if n == 0 else ZERO
    value = None
    if _use_hankel(n, float(x.mid)):
        node = node or _hankel_node(x, prec.extended(32))
        value = _hankel(n, node, prec)
        if value is None:
            logger.debug("Hankel expansion stalled for J_%d(%s); using the series", n, x.mid)
    if value is None:
        value = _series(n, x, prec)
    if value.rad > tolerance.upper():
        msg = f"Enclosure of J_{n}({x.mid}) has radius {value.rad}, above {tolerance}"
        raise PrecisionExhausted(msg)
    return value.round(prec)


def bessel_j(
    n: int,
    x: Ball,
    p: Precision = DEFAULT_PRECISION,
    tolerance: Ball | None = None,
) -> Ball:
    """
    Certified enclosure of ``J_n`` over the interval of ``x``.

    Parameters
    ----------
    n : int
        Order. Negative orders reduce to ``|n|`` through
        ``J_{-n} = (-1)^n J_n``.
    x : Ball
        Argument; its interval must lie in ``[0, inf)``.
    p : Precision
        Working precision.
    tolerance : Ball, optional
        Largest acceptable radius before the argument radius is added.
        Defaults to ``p.tolerance``, that is ``2^-(bits - 20)``.

    Returns
    -------
    Ball
        Enclosure of ``{J_n(t) : t in x}``.

    Raises
    ------
    DomainViolation
        If ``x`` reaches below zero.
    PrecisionExhausted
        If the requested tolerance cannot be met at ``p``.
    """
    if x.lower() < 0:
        msg = f"J_n needs a nonnegative argument, got {x}"
        raise DomainViolation(msg)
    if n < 0:
        value = bessel_j(-n, x, p, tolerance)
        return value if n % 2 == 0 else value.neg()
    point = Ball.from_raw(x.raw[0])
    value = _point_value(n, point, p, tolerance or p.tolerance)
    if x.is_exact():
        return value
    return value.widen(x.rad)


def _node_column(x: Ball, max_order: int, prec: Precision) -> list[Ball]:
    """All orders ``0..max_order`` at one exact node, sharing trig values."""
    tolerance = prec.tolerance
    node = None
    xf = float(x.mid)
    if xf >= HANKEL_MIN_ARG:
        node = _hankel_node(x, prec.extended(32))
    return [_point_value(o, x, prec, tolerance, node) for o in range(max_order + 1)]


def _chunk_columns(nodes: Sequence[Ball], max_order: int, prec: Precision) -> list[list[Ball]]:
    columns = []
    for x in nodes:
        column = _node_column(Ball.from_raw(x.raw[0]), max_order, prec)
        if not x.is_exact():
            column = [value.widen(x.rad) for value in column]
        columns.append(column)
    return columns


class BesselTable:
    """
    Read-only table of enclosures ``J_o(x_i)`` for ``o = 0..max_order``.

    Rows are indexed by order and columns by node. The key ties a table to
    the scheme it was built for; it is carried through serialization.

    Parameters
    ----------
    rows : Sequence[Sequence[Ball]]
        ``rows[o][i]`` encloses ``J_o(x_i)``.
    bits : int
        Precision the table was built at.
    key : str, default ""
        Scheme hash or any other identifying string.
    """

    def __init__(self, rows: Sequence[Sequence[Ball]], bits: int, key: str = ""):
        """Freeze the rows."""
        if not rows:
            msg = "A Bessel table needs at least order 0"
            raise ValueError(msg)
        sizes = {len(row) for row in rows}
        if len(sizes) != 1:
            msg = f"Ragged Bessel table rows: sizes {sorted(sizes)}"
            raise ValueError(msg)
        self._rows = tuple(tuple(row) for row in rows)
        self.bits = bits
        self.key = key
        self._raw: tuple[tuple[tuple[RawMpf, RawMpf], ...], ...] | None = None

    @property
    def max_order(self) -> int:
        """Largest tabulated order."""
        return len(self._rows) - 1

    @property
    def size(self) -> int:
        """Number of nodes."""
        return len(self._rows[0])

    def value(self, order: int, index: int) -> Ball:
        """Enclosure of ``J_order`` at node ``index``; negative orders reflect."""
        ball = self._rows[abs(order)][index]
        if order < 0 and order % 2:
            return ball.neg()
        return ball

    def row(self, order: int) -> tuple[Ball, ...]:
        """Enclosures of ``J_order`` at every node (``order >= 0``)."""
        return self._rows[order]

    def column(self, index: int) -> tuple[Ball, ...]:
        """Enclosures of ``J_0, ..., J_max_order`` at node ``index``."""
        return tuple(row[index] for row in self._rows)

    def raw_rows(self) -> tuple[tuple[tuple[RawMpf, RawMpf], ...], ...]:
        """Rows as raw ``(mid, rad)`` tuples for the summation loop."""
        if self._raw is None:
            self._raw = tuple(tuple(ball.raw for ball in row) for row in self._rows)
        return self._raw

    def __eq__(self, other: object) -> bool:
        """Bit-identical equality of every entry and the metadata."""
        if not isinstance(other, BesselTable):
            return NotImplemented
        return (self.bits, self.key, self._rows) == (other.bits, other.key, other._rows)

    __hash__ = None  # type: ignore[assignment]

    # Serialization

    def header(self) -> str:
        """Header line naming order count, node count, key and precision."""
        return (
            f"{TABLE_HEADER} max_order={self.max_order} nodes={self.size} "
            f"scheme={self.key or '-'} bits={self.bits}"
        )

    def to_lines(self) -> Iterable[str]:
        """Yield the header, then one ``mid ± rad`` line per entry, row-major."""
        yield self.header()
        for row in self._rows:
            for ball in row:
                yield ball.to_decimal()

    @classmethod
    def from_lines(cls, lines: Iterable[str], expected_key: str | None = None) -> BesselTable:
        """
        Parse the output of :meth:`to_lines`.

        Raises
        ------
        CacheCorruption
            If the header is malformed, the key differs from
            ``expected_key`` or the entry count does not match the header.
        """
        it = iter(lines)
        fields = _parse_header(next(it, "").strip())
        key = "" if fields["scheme"] == "-" else fields["scheme"]
        if expected_key is not None and key != expected_key:
            msg = f"Table built for scheme {key!r}, expected {expected_key!r}"
            raise CacheCorruption(msg)
        orders, size, bits = int(fields["max_order"]) + 1, int(fields["nodes"]), int(fields["bits"])
        prec = Precision(bits)
        try:
            values = [Ball.from_decimal(line, prec) for line in it if line.strip()]
        except (ValueError, TypeError) as e:
            msg = f"Unreadable Bessel table entry: {e}"
            raise CacheCorruption(msg) from e
        if len(values) != orders * size:
            msg = f"Bessel table holds {len(values)} entries, header says {orders * size}"
            raise CacheCorruption(msg)
        rows = [values[o * size : (o + 1) * size] for o in range(orders)]
        return cls(rows, bits, key)

    def round_trip(self) -> BesselTable:
        """Return the table as it reads back from its own serialization."""
        return BesselTable.from_lines(self.to_lines())

    def save(self, path: Path) -> None:
        """Write the table gzip-compressed, replacing ``path`` atomically."""
        partial = path.with_name(path.name + ".partial")
        with gzip.open(partial, "wt", encoding="utf-8") as fh:
            for line in self.to_lines():
                fh.write(line + "\n")
        partial.replace(path)
        logger.info("Saved Bessel table (%d orders x %d nodes) to %s", self.max_order + 1, self.size, path)

    @classmethod
    def load(cls, path: Path, expected_key: str | None = None) -> BesselTable:
        """Read a table written by :meth:`save`."""
        try:
            with gzip.open(path, "rt", encoding="utf-8") as fh:
                return cls.from_lines(fh, expected_key)
        except (gzip.BadGzipFile, EOFError) as e:
            msg = f"Corrupt Bessel table file {path}: {e}"
            raise CacheCorruption(msg) from e


def _parse_header(line: str) -> dict[str, str]:
    if not line.startswith(TABLE_HEADER):
        msg = f"Not a Bessel table header: {line[:60]!r}"
        raise CacheCorruption(msg)
    fields = dict(item.split("=", 1) for item in line[len(TABLE_HEADER) :].split() if "=" in item)
    missing = {"max_order", "nodes", "scheme", "bits"} - fields.keys()
    if missing:
        msg = f"Bessel table header lacks {sorted(missing)}"
        raise CacheCorruption(msg)
    return fields


def bessel_table(
    max_order: int,
    nodes: Sequence[Ball],
    p: Precision = DEFAULT_PRECISION,
    key: str = "",
    workers: int = 1,
) -> BesselTable:
    """
    Tabulate ``J_0 .. J_max_order`` at every node.

    Parameters
    ----------
    max_order : int
        Largest order, ``K`` in ``0..K``.
    nodes : Sequence[Ball]
        Nonnegative arguments. Each node is evaluated at its midpoint and
        the enclosures are widened by the node radius.
    p : Precision
        Working precision.
    key : str, default ""
        Identifier stored with the table.
    workers : int, default 1
        joblib worker count. Nodes are split into contiguous chunks, so the
        table does not depend on this value.

    Returns
    -------
    BesselTable
        The freshly computed table. Callers that need results independent
        of caching use :meth:`BesselTable.round_trip` or reload a saved copy.
    """
    if max_order < 0:
        msg = f"max_order must be nonnegative, got {max_order}"
        raise ValueError(msg)
    for x in nodes:
        if x.lower() < 0:
            msg = f"Bessel table node {x} is negative"
            raise DomainViolation(msg)
    start = time.perf_counter()
    chunk = max(1, math.ceil(len(nodes) / (8 * max(1, workers))))
    chunks = [nodes[i : i + chunk] for i in range(0, len(nodes), chunk)]
    if workers > 1:
        parts = Parallel(n_jobs=workers)(delayed(_chunk_columns)(c, max_order, p) for c in chunks)
    else:
        parts = [_chunk_columns(c, max_order, p) for c in chunks]
    columns = [column for part in parts for column in part]
    rows = [[column[o] for column in columns] for o in range(max_order + 1)]
    table = BesselTable(rows, p.bits, key)
    logger.info(
        "Built Bessel table: %d orders x %d nodes in %.1f s",
        max_order + 1,
        len(nodes),
        time.perf_counter() - start,
    )
    return table
