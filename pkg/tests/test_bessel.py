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

"""Tests for certified Bessel evaluation and tables."""

import gzip
import random
from fractions import Fraction
from math import factorial
from pathlib import Path

import pytest
from mpmath import mp, mpf
from scipy.special import jv

from bessel_cert.arith import ONE, ZERO, Ball, Precision
from bessel_cert.exceptions import CacheCorruption, DomainViolation, PrecisionExhausted
from bessel_cert.special.bessel import BesselTable, bessel_j, bessel_table

P128 = Precision(128)


def reference(n: int, x: float | str) -> mpf:
    """High-precision mpmath value of J_n(x)."""
    with mp.workprec(300):
        return mp.besselj(n, mpf(x))


class TestBesselJ:
    """Test cases for bessel_j."""

    def test_j0_at_zero(self) -> None:
        """Test J_0(0) = 1."""
        assert bessel_j(0, ZERO, P128).contains(1)

    def test_j3_at_zero(self) -> None:
        """Test J_3(0) = 0."""
        assert bessel_j(3, ZERO, P128).contains(0)

    def test_j0_at_one_against_series(self) -> None:
        """Test J_0(1) against an exact rational partial sum with its remainder."""
        partial = sum(Fraction((-1) ** m, 4**m * factorial(m) ** 2) for m in range(30))
        remainder = Fraction(1, 4**30 * factorial(30) ** 2)
        oracle = Ball.exact(partial, Precision(512)).widen(Ball.exact(remainder, Precision(512)))
        value = bessel_j(0, ONE, P128)
        assert value.overlaps(oracle)
        assert value.contains(reference(0, 1))
        assert abs(float(value.mid) - 0.76519768655796655) < 1e-15

    @pytest.mark.parametrize(
        ("n", "x"),
        [
            (0, "0.5"),
            (1, "2.75"),
            (7, "3"),
            (21, "10"),
            (0, "59.9"),
            (0, "60"),
            (5, "100"),
            (21, "110.25"),
            (21, "109.5"),
            (12, "256.125"),
            (20, "4096.5"),
            (3, "1000"),
        ],
    )
    def test_against_mpmath(self, n: int, x: str) -> None:
        """Test enclosures on both sides of the series/asymptotic switch."""
        value = bessel_j(n, Ball(x), P128)
        assert value.contains(reference(n, x))
        assert value.rad <= P128.tolerance.mid

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 11])
    def test_reflection(self, n: int) -> None:
        """Test J_-n = (-1)^n J_n bit for bit."""
        x = Ball("37.5")
        expected = bessel_j(n, x, P128)
        if n % 2:
            expected = expected.neg()
        assert bessel_j(-n, x, P128) == expected

    def test_argument_radius(self) -> None:
        """Test that an argument radius widens the enclosure over the interval."""
        value = bessel_j(0, Ball(1, "1e-10"), P128)
        assert value.contains(reference(0, "0.9999999999"))
        assert value.contains(reference(0, "1.0000000001"))

    def test_negative_argument(self) -> None:
        """Test that negative arguments are rejected."""
        with pytest.raises(DomainViolation, match="nonnegative"):
            bessel_j(0, Ball(-1), P128)

    def test_precision_exhausted(self) -> None:
        """Test an unreachable tolerance."""
        with pytest.raises(PrecisionExhausted):
            bessel_j(2, Ball(5), P128, tolerance=Ball(mpf(2) ** -400))

    def test_scipy_agreement(self) -> None:
        """Test agreement with scipy in double precision."""
        for n, x in [(0, 2.5), (4, 30.0), (15, 75.0), (21, 300.0)]:
            assert abs(float(bessel_j(n, Ball(x), P128).mid) - jv(n, x)) < 1e-12


def _random_samples(count: int, seed: int) -> list[tuple[int, float]]:
    rng = random.Random(seed)
    return [(rng.randint(1, 20), round(rng.uniform(0.05, 400.0), 6)) for _ in range(count)]


def _check_invariants(samples: list[tuple[int, float]], band_limit: int = 20) -> None:
    cutoff = 0.95 * band_limit**1.5 * 2.995732273553991
    for n, xf in samples:
        x = Ball(xf)
        prev, cur, nxt = (bessel_j(o, x, P128) for o in (n - 1, n, n + 1))
        residual = prev.add(nxt, P128).sub(cur.mul(Ball(2 * n).div(x, P128), P128), P128)
        assert residual.contains_zero(), (n, xf)
        for value in (prev, cur, nxt):
            assert abs(value.mid) - value.rad <= 1
        if xf > cutoff:
            assert abs(cur.mid) - cur.rad <= mpf("3.36") / mp.sqrt(xf)


class TestBesselInvariants:
    """Test cases for recurrence, bound and decay properties."""

    def test_invariants_sample(self) -> None:
        """Test the invariants on a small random sample."""
        _check_invariants(_random_samples(60, seed=11))

    @pytest.mark.slow
    def test_invariants_thousand(self) -> None:
        """Test the invariants on a thousand random samples."""
        _check_invariants(_random_samples(1000, seed=12))


class TestBesselTable:
    """Test cases for BesselTable and bessel_table."""

    def test_column_at_zero(self) -> None:
        """Test the column (1, 0) at node zero."""
        table = bessel_table(1, [ZERO], P128)
        assert table.column(0) == (ONE, ZERO)

    def test_values_and_reflection(self) -> None:
        """Test table lookups against direct evaluation."""
        nodes = [Ball("0.5"), Ball("12.25"), Ball("80")]
        table = bessel_table(4, nodes, P128)
        assert table.max_order == 4
        assert table.size == 3
        for order in range(5):
            for i, x in enumerate(nodes):
                assert table.value(order, i) == bessel_j(order, x, P128)
        assert table.value(-3, 1) == table.value(3, 1).neg()
        assert table.value(-2, 1) == table.value(2, 1)

    def test_column_recurrence(self) -> None:
        """Test the three-term recurrence on a table column."""
        x = Ball("7.5")
        table = bessel_table(10, [x], P128)
        column = table.column(0)
        for n in range(1, 10):
            residual = column[n - 1].add(column[n + 1], P128)
            residual = residual.sub(column[n].mul(Ball(2 * n).div(x, P128), P128), P128)
            assert residual.contains_zero()

    def test_round_trip_contains(self) -> None:
        """Test that the serialized table encloses the computed one."""
        table = bessel_table(3, [Ball("1.5"), Ball("65")], P128, key="abc")
        restored = table.round_trip()
        assert restored.key == "abc"
        assert restored.bits == 128
        for order in range(4):
            for i in range(2):
                assert restored.value(order, i).contains(table.value(order, i))

    def test_save_load(self, tmp_path: Path) -> None:
        """Test the gzip file format."""
        table = bessel_table(2, [Ball("3"), Ball("4")], P128, key="k1")
        path = tmp_path / "t.table.gz"
        table.save(path)
        with gzip.open(path, "rt", encoding="utf-8") as fh:
            header = fh.readline()
        assert header.startswith("# bessel-cert table v1 max_order=2 nodes=2 scheme=k1 bits=128")
        assert BesselTable.load(path, expected_key="k1") == table.round_trip()

    def test_load_wrong_key(self, tmp_path: Path) -> None:
        """Test that a table for another scheme is rejected."""
        path = tmp_path / "t.table.gz"
        bessel_table(1, [Ball("3")], P128, key="k1").save(path)
        with pytest.raises(CacheCorruption, match="expected 'k2'"):
            BesselTable.load(path, expected_key="k2")

    def test_load_truncated(self, tmp_path: Path) -> None:
        """Test that a truncated table is rejected."""
        path = tmp_path / "t.table.gz"
        lines = list(bessel_table(1, [Ball("3"), Ball("5")], P128).to_lines())
        with gzip.open(path, "wt", encoding="utf-8") as fh:
            fh.write("\n".join(lines[:-1]) + "\n")
        with pytest.raises(CacheCorruption, match="entries"):
            BesselTable.load(path)

    def test_workers_identical(self) -> None:
        """Test that parallel construction gives the same table."""
        nodes = [Ball(x) for x in ("0.75", "9.5", "61", "130.5", "200")]
        assert bessel_table(6, nodes, P128, workers=2) == bessel_table(6, nodes, P128, workers=1)

    def test_negative_node(self) -> None:
        """Test that negative nodes are rejected."""
        with pytest.raises(DomainViolation):
            bessel_table(1, [Ball(-2)], P128)
