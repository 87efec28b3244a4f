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

"""Tests for the shared grid, product sums and single integrals."""

import logging
import math
import random
from fractions import Fraction
from unittest.mock import patch

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import jv

from bessel_cert.arith import Ball
from bessel_cert.engine.integrals import (
    IntegralRecord,
    IntegralStore,
    ProductSummer,
    QuadratureGrid,
    SchemeTables,
    compute_integral,
)
from bessel_cert.engine.keys import ModeKey, canonical_key
from bessel_cert.engine.params import scheme_error, scheme_params
from bessel_cert.exceptions import CacheCorruption, MissingKey
from bessel_cert.quadrature.gauss import EvaluationMeter
from bessel_cert.special.bessel import BesselTable

SCALE = (2 / math.pi) ** 3


def product_integrand(orders):
    """``r prod_j J_{o_j}(r)`` in double precision."""

    def f(r):
        value = r
        for o in orders:
            value = value * jv(o, r)
        return value

    return f


def chunked_quad(f, a: float, b: float, pieces: int) -> float:
    """Adaptive quadrature on equal pieces, summed with fsum."""
    edges = np.linspace(a, b, pieces + 1)
    return math.fsum(quad(f, lo, hi, limit=200, epsabs=1e-15, epsrel=1e-13)[0] for lo, hi in zip(edges, edges[1:]))


def gauss_oracle(orders, upper: float, width: float = 5.0, points: int = 40) -> float:
    """Fixed Gauss-Legendre from numpy on panels of ``width``, vectorized a block at a time."""
    x, w = np.polynomial.legendre.leggauss(points)
    f = product_integrand(orders)
    parts = []
    for block in np.arange(0.0, upper, 1e5):
        starts = np.arange(block, min(block + 1e5, upper), width)
        nodes = (starts[:, None] + width / 2 * (x[None, :] + 1)).ravel()
        weights = np.tile(w * width / 2, len(starts))
        parts.append(math.fsum(weights * f(nodes)))
    return math.fsum(parts)


def tail_oracle(orders, upper: float) -> tuple[float, float]:
    """Leading non-oscillating tail term beyond ``upper`` and a crude majorant of the rest."""
    z = np.linspace(0.0, 2 * math.pi, 64, endpoint=False)
    product = np.ones_like(z)
    for o in orders:
        product = product * np.cos(z - o * math.pi / 2 - math.pi / 4)
    mean = float(np.mean(product))
    spread = sum((o * o - 0.25) / 2 for o in orders)
    majorant = SCALE * (2 + 3 * spread) / upper**2
    return SCALE * mean / upper, majorant


class TestQuadratureGrid:
    """Test cases for QuadratureGrid."""

    def test_layout(self, small_params, small_tables) -> None:
        """Test node count, ordering and the split between ranges."""
        grid = small_tables.grid
        assert len(grid) == small_params.node_count == 360
        assert grid.split == small_params.K0 * small_params.n == 72
        mids = [float(x.mid) for x in grid.nodes]
        assert mids == sorted(mids)
        assert 0 < mids[0] and mids[-1] < float(small_params.T)
        assert float(grid.nodes[grid.split - 1].mid) < 3 < float(grid.nodes[grid.split].mid)

    def test_factors_integrate_r(self, small_params, small_tables) -> None:
        """Test that the factors integrate ``r`` exactly over ``[0, T]``."""
        p = small_params.precision
        total = Ball(0)
        for factor in small_tables.grid.factors:
            total = total.add(factor, p)
        assert total.contains(small_params.T**2 / 2)

    def test_build_matches_fixture(self, small_params, small_tables) -> None:
        """Test that building twice gives identical grids."""
        assert QuadratureGrid.build(small_params) == small_tables.grid


class TestSchemeTables:
    """Test cases for SchemeTables."""

    def test_size_mismatch(self, small_params, four_tables) -> None:
        """Test that a table from another grid is rejected."""
        grid = QuadratureGrid.build(small_params)
        with pytest.raises(CacheCorruption, match="nodes"):
            SchemeTables(small_params, grid, four_tables.table)

    def test_table_is_round_tripped(self, small_tables) -> None:
        """Test that the in-memory table equals its serialized form."""
        assert small_tables.table.round_trip() == small_tables.table

    def test_saved_table(self, small_params, tmp_path) -> None:
        """Test that a saved table reads back identically."""
        path = tmp_path / "table.gz"
        tables = SchemeTables.build(small_params, max_order=2, table_path=path)
        assert path.exists()
        assert BesselTable.load(path, small_params.scheme_hash) == tables.table
        assert tables.table.max_order == 2

    def test_table_orders(self, small_params, small_tables) -> None:
        """Test the default table covers orders up to 2N."""
        assert small_tables.table.max_order == small_params.max_order == 4


class TestProductSummer:
    """Test cases for ProductSummer."""

    @pytest.mark.parametrize("orders", [(0, 0, 0, 0, 0, 0), (0, 0, 1, 1, 2, 2), (1, 1, 1, 1, 2, 4)])
    def test_matches_scipy(self, small_params, small_tables, orders) -> None:
        """Test the quadrature part against adaptive quadrature on ``[0, T]``."""
        value = ProductSummer(small_tables).quadrature_sum(orders)
        oracle = chunked_quad(product_integrand(orders), 0.0, float(small_params.T), 40)
        assert abs(float(value.mid) - oracle) <= 1e-11 + float(value.rad)

    def test_prefix_cache_is_transparent(self, small_tables) -> None:
        """Test that cached prefixes give bit-identical sums."""
        warm = ProductSummer(small_tables)
        warm.quadrature_sum((0, 0, 1, 1, 2, 2))
        shared = warm.quadrature_sum((0, 0, 1, 1, 3, 3))
        cold = ProductSummer(small_tables, cache_size=0).quadrature_sum((0, 0, 1, 1, 3, 3))
        assert shared == cold

    def test_radius_is_small(self, small_tables) -> None:
        """Test that the arithmetic radius stays far below the scheme error."""
        value = ProductSummer(small_tables).quadrature_sum((0, 1, 1, 2, 2, 4))
        assert value.rad < 1e-25


class TestComputeIntegral:
    """Test cases for compute_integral."""

    def test_sign_contract(self, small_params, small_tables) -> None:
        """Test that a signed key returns the signed value of its orders."""
        key = canonical_key((1, -1, 0, 0, 2, -2))
        assert key.sign == -1
        signed = compute_integral(key, small_params, small_tables)
        unsigned = compute_integral(key.unsigned(), small_params, small_tables)
        assert signed.value == unsigned.value.neg()
        assert signed.key == key
        assert signed.scheme_hash == small_params.scheme_hash

    def test_meter(self, small_params, small_tables) -> None:
        """Test one evaluation per node."""
        meter = EvaluationMeter()
        key = ModeKey((0, 0, 0, 0, 0, 0))
        compute_integral(key, small_params, small_tables, meter=meter)
        assert meter.count == 360
        assert meter.by_key == {key.orders: 360}

    def test_wrong_tables(self, small_tables) -> None:
        """Test that tables for another scheme are refused."""
        other = scheme_params(2, "explore", bits=96)
        with pytest.raises(ValueError, match="different scheme"):
            compute_integral(ModeKey((0,) * 6), other, small_tables)

    def test_order_beyond_table(self, small_params, small_tables) -> None:
        """Test that orders above the table are refused."""
        with pytest.raises(ValueError, match="exceeds"):
            compute_integral(ModeKey((0, 0, 0, 0, 5, 5)), small_params, small_tables)

    def test_sanity_warning(self, small_params, small_tables, caplog) -> None:
        """Test the warning for implausibly large values."""
        with (
            patch.object(ProductSummer, "quadrature_sum", return_value=Ball(50)),
            caplog.at_level(logging.WARNING),
        ):
            compute_integral(ModeKey((0,) * 6), small_params, small_tables)
        assert "unusually large" in caplog.text

    def test_refinement_consistency(self, four_params, four_tables) -> None:
        """Test that halving both panel widths gives intersecting widened enclosures."""
        fine = scheme_params(4, "explore", d0=Fraction(1, 8), d1=Fraction(2, 5), s=four_params.S, t=four_params.T)
        fine_tables = SchemeTables.build(fine, max_order=6)
        coarse_eps, fine_eps = scheme_error(four_params), scheme_error(fine)
        rng = random.Random(5)
        for _ in range(10):
            key = canonical_key(tuple(rng.choice((-2, 0, 2, 4, 6)) for _ in range(6)))
            coarse = compute_integral(key, four_params, four_tables).value.widen(coarse_eps)
            refined = compute_integral(key, fine, fine_tables).value.widen(fine_eps)
            assert coarse.overlaps(refined), key

    @pytest.mark.slow
    def test_oracle_n20(self) -> None:
        """Test 20 random keys at N=20 against an independent oracle on ``[0, 10^6]``."""
        params = scheme_params(20)
        rng = random.Random(20)
        keys = set()
        while len(keys) < 20:
            k = [rng.randint(-21, 21) for _ in range(6)]
            if sum(k) % 2 == 0:
                keys.add(canonical_key(k).unsigned())
        tables = SchemeTables.build(params, workers=4, max_order=max(k.max_order for k in keys))
        eps = scheme_error(params)
        upper = 1e6
        for key in sorted(keys):
            value = compute_integral(key, params, tables).value
            lead, majorant = tail_oracle(key.orders, upper)
            oracle = gauss_oracle(key.orders, upper) + lead
            tolerance = float(eps.upper()) + majorant + 1e-10
            assert abs(float(value.mid) - oracle) <= tolerance + float(value.rad), key.orders


class TestIntegralRecord:
    """Test cases for IntegralRecord."""

    def test_line_round_trip(self, small_params) -> None:
        """Test the cache line form of a signed record."""
        value = Ball(1).div(Ball(3), small_params.precision)
        record = IntegralRecord(ModeKey((0, 0, 1, 1, 2, 2), -1), value, small_params.scheme_hash)
        line = record.to_line()
        assert line.startswith("0 0 1 1 2 2 -")
        parsed = IntegralRecord.from_line(line, small_params)
        assert parsed.key == ModeKey((0, 0, 1, 1, 2, 2))
        assert parsed.value.contains(value.neg())

    def test_malformed_line(self, small_params) -> None:
        """Test that a truncated line is rejected."""
        with pytest.raises(ValueError, match="Malformed"):
            IntegralRecord.from_line("0 0 1 1", small_params)

    def test_non_finite(self, small_params) -> None:
        """Test that non-finite enclosures are refused."""
        with pytest.raises(ValueError, match="non-finite"):
            IntegralRecord(ModeKey((0,) * 6), Ball(0, "inf"), small_params.scheme_hash)


class TestIntegralStore:
    """Test cases for IntegralStore."""

    def test_signed_lookup(self, small_params) -> None:
        """Test that lookups apply the key sign."""
        store = IntegralStore(small_params.scheme_hash)
        store.add(IntegralRecord(ModeKey((0, 0, 1, 1, 2, 2), -1), Ball(-2), small_params.scheme_hash))
        assert store.get(ModeKey((0, 0, 1, 1, 2, 2))) == Ball(2)
        assert store.signed((1, -1, 0, 0, 2, -2)) == Ball(-2)
        assert store.signed((2, 2, 1, 1, 0, 0)) == Ball(2)
        assert ModeKey((0, 0, 1, 1, 2, 2)) in store
        assert len(store) == 1

    def test_missing_key(self, small_params) -> None:
        """Test MissingKey for absent orders."""
        store = IntegralStore(small_params.scheme_hash)
        with pytest.raises(MissingKey, match="No integral"):
            store.signed((0, 0, 0, 0, 0, 0))

    def test_scheme_mismatch(self, small_params) -> None:
        """Test that records from another scheme are refused."""
        store = IntegralStore(small_params.scheme_hash)
        with pytest.raises(ValueError, match="added to store"):
            store.add(IntegralRecord(ModeKey((0,) * 6), Ball(1), "other"))

    def test_sorted_iteration(self, small_params) -> None:
        """Test records come back in sorted key order."""
        store = IntegralStore(small_params.scheme_hash)
        for orders in [(0, 0, 0, 0, 2, 2), (0, 0, 0, 0, 0, 0), (0, 0, 0, 0, 1, 1)]:
            store.add(IntegralRecord(ModeKey(orders), Ball(1), small_params.scheme_hash))
        assert [k.orders[-1] for k in store] == [0, 1, 2]
        assert len(list(store.to_lines())) == 3
