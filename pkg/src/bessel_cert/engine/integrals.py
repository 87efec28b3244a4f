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
Enclosures of ``I_k = int_0^inf r prod_j J_{k_j}(r) dr``.

Every key at fixed parameters is integrated on the same node set, so one
Bessel table serves all of them. The quadrature part of each integral is a
weighted sum over the table, taken in fixed node order; the part beyond
``T`` comes from the asymptotic expansion.
"""

from __future__ import annotations

import logging
import time
from collections import OrderedDict
from dataclasses import dataclass
from typing import TYPE_CHECKING

from mpmath.libmp import fzero

from bessel_cert.arith.ball import Ball, raw_add, raw_mul
from bessel_cert.engine.keys import KEY_LENGTH, ModeKey, canonical_key
from bessel_cert.exceptions import CacheCorruption, MissingKey
from bessel_cert.quadrature.gauss import GaussRule, legendre_rule
from bessel_cert.quadrature.tail import tail_main
from bessel_cert.special.bessel import BesselTable, bessel_table

if TYPE_CHECKING:
    from collections.abc import Iterable, Iterator, Sequence
    from pathlib import Path

    from bessel_cert.arith.ball import RawMpf
    from bessel_cert.engine.params import SchemeParams
    from bessel_cert.quadrature.gauss import EvaluationMeter

logger = logging.getLogger(__name__)

SANITY_BOUND = 10
PREFIX_ORDERS = 3
PREFIX_CACHE_SIZE = 256


@dataclass(frozen=True)
class QuadratureGrid:
    """
    Nodes and weights of the composite rule on ``[0, S]`` followed by ``[S, T]``.

    ``factors[i]`` is ``d * w_i * x_i``, so the quadrature part of an
    integral is ``sum_i factors[i] * prod_j J_{k_j}(x_i)``.
    """

    nodes: tuple[Ball, ...]
    factors: tuple[Ball, ...]
    split: int

    @classmethod
    def build(cls, params: SchemeParams, rule: GaussRule | None = None) -> QuadratureGrid:
        """Lay out both panel ranges for ``params``."""
        p = params.precision
        rule = rule or legendre_rule(params.n, p)
        near, far = params.near_layout, params.far_layout
        nodes = near.nodes(rule, p) + far.nodes(rule, p)
        weights = near.factors(rule, p) + far.factors(rule, p)
        factors = tuple(w.mul(x, p) for w, x in zip(weights, nodes, strict=True))
        return cls(nodes=tuple(nodes), factors=factors, split=near.K * rule.n)

    def __len__(self) -> int:
        """Number of nodes."""
        return len(self.nodes)

    def raw_factors(self) -> list[tuple[RawMpf, RawMpf]]:
        """Factors as raw ``(mid, rad)`` pairs."""
        return [factor.raw for factor in self.factors]


@dataclass(frozen=True)
class SchemeTables:
    """Everything an integral needs at fixed parameters: grid and Bessel table."""

    params: SchemeParams
    grid: QuadratureGrid
    table: BesselTable

    def __post_init__(self) -> None:
        """Check the table belongs to the grid."""
        if self.table.size != len(self.grid):
            msg = f"Bessel table has {self.table.size} nodes, grid has {len(self.grid)}"
            raise CacheCorruption(msg)

    @classmethod
    def build(
        cls,
        params: SchemeParams,
        workers: int = 1,
        max_order: int | None = None,
        table_path: Path | None = None,
    ) -> SchemeTables:
        """
        Build the grid and its Bessel table.

        The table is saved to ``table_path`` and read back, or round-tripped
        in memory without a path, so the result is the same as loading a
        cached copy.
        """
        start = time.perf_counter()
        grid = QuadratureGrid.build(params)
        orders = params.max_order if max_order is None else max_order
        table = bessel_table(orders, grid.nodes, params.precision, params.scheme_hash, workers)
        logger.info(
            "Built tables for N=%d: %d nodes, orders 0..%d in %.1fs",
            params.N,
            len(grid),
            orders,
            time.perf_counter() - start,
        )
        if table_path is None:
            return cls(params, grid, table.round_trip())
        table.save(table_path)
        return cls(params, grid, BesselTable.load(table_path, params.scheme_hash))


class ProductSummer:
    """
    Weighted sums of six-fold Bessel products over the shared table.

    Products of the first three orders are cached per prefix; keys that are
    processed in sorted order share prefixes, which saves about half of the
    multiplications. The products are formed in the same order whether or
    not the prefix was cached, so results do not depend on cache state.
    """

    def __init__(self, tables: SchemeTables, cache_size: int = PREFIX_CACHE_SIZE):
        """Bind to ``tables``."""
        self.tables = tables
        self._rows = tables.table.raw_rows()
        self._factors = tables.grid.raw_factors()
        self._bits = tables.params.bits
        self._cache_size = cache_size
        self._prefixes: OrderedDict[tuple[int, ...], list[tuple[RawMpf, RawMpf]]] = OrderedDict()

    def _prefix(self, head: tuple[int, ...]) -> list[tuple[RawMpf, RawMpf]]:
        cached = self._prefixes.get(head)
        if cached is not None:
            self._prefixes.move_to_end(head)
            return cached
        bits = self._bits
        first, second, third = (self._rows[o] for o in head)
        products = []
        for (m1, r1), (m2, r2), (m3, r3) in zip(first, second, third, strict=True):
            m, r = raw_mul(m1, r1, m2, r2, bits)
            products.append(raw_mul(m, r, m3, r3, bits))
        self._prefixes[head] = products
        if len(self._prefixes) > self._cache_size:
            self._prefixes.popitem(last=False)
        return products

    def quadrature_sum(self, orders: Sequence[int]) -> Ball:
        """``sum_i factors[i] * prod_j J_{orders[j]}(x_i)`` for nonnegative orders."""
        bits = self._bits
        head = self._prefix(tuple(orders[:PREFIX_ORDERS]))
        fourth, fifth, sixth = (self._rows[o] for o in orders[PREFIX_ORDERS:])
        mid, rad = fzero, fzero
        for (pm, pr), (m4, r4), (m5, r5), (m6, r6), (fm, fr) in zip(
            head, fourth, fifth, sixth, self._factors, strict=True
        ):
            m, r = raw_mul(pm, pr, m4, r4, bits)
            m, r = raw_mul(m, r, m5, r5, bits)
            m, r = raw_mul(m, r, m6, r6, bits)
            m, r = raw_mul(m, r, fm, fr, bits)
            mid, rad = raw_add(mid, rad, m, r, bits)
        return Ball.from_raw(mid, rad)


@dataclass(frozen=True, slots=True)
class IntegralRecord:
    """Enclosure of ``I~_k`` before the scheme error is added."""

    key: ModeKey
    value: Ball
    scheme_hash: str

    def __post_init__(self) -> None:
        """Reject non-finite values."""
        if not self.value.is_finite():
            msg = f"Integral {self.key} has a non-finite enclosure"
            raise ValueError(msg)

    def to_line(self) -> str:
        """``o1 o2 o3 o4 o5 o6 mid ± rad`` for the unsigned record."""
        value = self.value if self.key.sign == 1 else self.value.neg()
        return f"{self.key.to_text()} {value.to_decimal()}"

    @classmethod
    def from_line(cls, line: str, params: SchemeParams) -> IntegralRecord:
        """Parse the output of :meth:`to_line` for the scheme ``params``."""
        fields = line.split(maxsplit=KEY_LENGTH)
        if len(fields) != KEY_LENGTH + 1:
            msg = f"Malformed integral record {line!r}"
            raise ValueError(msg)
        key = ModeKey.from_text(" ".join(fields[:KEY_LENGTH]))
        value = Ball.from_decimal(fields[KEY_LENGTH], params.precision)
        return cls(key, value, params.scheme_hash)


def compute_integral(
    key: ModeKey,
    params: SchemeParams,
    tables: SchemeTables,
    meter: EvaluationMeter | None = None,
    summer: ProductSummer | None = None,
) -> IntegralRecord:
    """
    Enclose ``sign * (I~^{0,S} + I~^{S,T} + I~^{T,inf})`` for ``key``.

    Parameters
    ----------
    key : ModeKey
        Canonical key; the record carries its sign.
    params : SchemeParams
        Scheme the tables were built for.
    tables : SchemeTables
        Shared grid and Bessel table.
    meter : EvaluationMeter, optional
        Counts one integrand evaluation per node.
    summer : ProductSummer, optional
        Reused across calls to share prefix products.

    Returns
    -------
    IntegralRecord
        The true integral lies within ``value`` widened by
        :func:`~bessel_cert.engine.params.scheme_error`.
    """
    if tables.params.scheme_hash != params.scheme_hash:
        msg = "Tables were built for a different scheme"
        raise ValueError(msg)
    if key.max_order > tables.table.max_order:
        msg = f"Key {key.orders} exceeds the tabulated order {tables.table.max_order}"
        raise ValueError(msg)
    p = params.precision
    summer = summer or ProductSummer(tables)
    value = summer.quadrature_sum(key.orders).add(tail_main(key.orders, params.T, p), p)
    if meter is not None:
        meter.tick(len(tables.grid), key.orders)
    if abs(float(value.mid)) > SANITY_BOUND:
        logger.warning("Integral %s has an unusually large value %s", key.orders, value.mid)
    if key.sign < 0:
        value = value.neg()
    return IntegralRecord(key, value, params.scheme_hash)


class IntegralStore:
    """
    Unsigned integral enclosures for one scheme, looked up by signed key.

    Parameters
    ----------
    scheme_hash : str
        Hash of the scheme every record belongs to.
    """

    def __init__(self, scheme_hash: str, values: dict[tuple[int, ...], Ball] | None = None):
        """Start from ``values`` keyed by sorted orders."""
        self.scheme_hash = scheme_hash
        self._values: dict[tuple[int, ...], Ball] = dict(values or {})

    def add(self, record: IntegralRecord) -> None:
        """Store ``record`` with its sign removed."""
        if record.scheme_hash != self.scheme_hash:
            msg = f"Record for scheme {record.scheme_hash[:12]} added to store {self.scheme_hash[:12]}"
            raise ValueError(msg)
        value = record.value if record.key.sign == 1 else record.value.neg()
        self._values[record.key.orders] = value

    def __len__(self) -> int:
        """Number of stored keys."""
        return len(self._values)

    def __contains__(self, key: object) -> bool:
        """Membership by :class:`ModeKey` or sorted orders."""
        orders = key.orders if isinstance(key, ModeKey) else key
        return orders in self._values

    def __iter__(self) -> Iterator[ModeKey]:
        """Unsigned keys in sorted order."""
        return (ModeKey(orders) for orders in sorted(self._values))

    def get(self, key: ModeKey) -> Ball:
        """Enclosure for ``key``, sign applied."""
        try:
            value = self._values[key.orders]
        except KeyError:
            msg = f"No integral stored for orders {key.orders}"
            raise MissingKey(msg) from None
        return value if key.sign == 1 else value.neg()

    def signed(self, k: Sequence[int]) -> Ball:
        """Enclosure of ``I_k`` for a signed six-tuple."""
        return self.get(canonical_key(k))

    def records(self) -> Iterator[IntegralRecord]:
        """Unsigned records in sorted key order."""
        for orders in sorted(self._values):
            yield IntegralRecord(ModeKey(orders), self._values[orders], self.scheme_hash)

    def to_lines(self) -> Iterable[str]:
        """Serialized records in sorted key order."""
        return (record.to_line() for record in self.records())

    def __eq__(self, other: object) -> bool:
        """Bit-identical contents and scheme."""
        if not isinstance(other, IntegralStore):
            return NotImplemented
        return (self.scheme_hash, self._values) == (other.scheme_hash, other._values)

    __hash__ = None  # type: ignore[assignment]
