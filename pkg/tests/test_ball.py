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

"""Tests for ball arithmetic."""

import pickle
import random
from fractions import Fraction

import pytest
from mpmath import mp, mpf

from bessel_cert.arith import (
    ONE,
    ZERO,
    Ball,
    Precision,
    ball_binop,
    ball_elem,
    ball_sum,
    ball_union,
)
from bessel_cert.exceptions import DivisionByEnclosedZero, DomainViolation

P53 = Precision(53)


class TestPrecision:
    """Test cases for Precision."""

    def test_default_bits(self) -> None:
        """Test the default working precision."""
        assert Precision().bits == 128

    def test_rejects_low_precision(self) -> None:
        """Test that fewer than 53 bits is rejected."""
        with pytest.raises(ValueError, match="at least 53"):
            Precision(52)

    def test_tolerance(self) -> None:
        """Test the per-value tolerance 2^-(bits-20)."""
        assert Precision(64).tolerance.mid == mpf(2) ** -44


class TestBallBinop:
    """Test cases for ball_binop."""

    def test_add_exact_integers(self) -> None:
        """Test that adding exact integers is exact."""
        result = ball_binop("add", Ball(1), Ball(2), P53)
        assert result.contains(3)
        assert result.is_exact()

    def test_mul_by_zero(self) -> None:
        """Test that zero annihilates with zero radius."""
        result = ball_binop("mul", ZERO, Ball("0.1", "0.01"), P53)
        assert result.mid == 0
        assert result.rad == 0

    def test_div_third(self) -> None:
        """Test that 1/3 gets a positive radius at 53 bits."""
        result = ball_binop("div", ONE, Ball(3), P53)
        assert result.contains(Fraction(1, 3))
        assert result.rad > 0

    def test_div_by_enclosed_zero(self) -> None:
        """Test division by a ball containing zero."""
        with pytest.raises(DivisionByEnclosedZero, match="contains zero"):
            ball_binop("div", ONE, Ball(0, "0.5"), P53)

    def test_unknown_operation(self) -> None:
        """Test an unknown operation name."""
        with pytest.raises(ValueError, match="Unknown ball operation"):
            ball_binop("pow", ONE, ONE, P53)  # type: ignore[arg-type]

    def test_containment_monotonicity(self) -> None:
        """Test that sub-balls map into the image of the enclosing balls."""
        rng = random.Random(7)
        for _ in range(200):
            a = Ball(rng.uniform(-5, 5), rng.uniform(0, 0.5))
            b = Ball(rng.uniform(0.6, 5), rng.uniform(0, 0.5))
            for op in ("add", "sub", "mul", "div"):
                outer = ball_binop(op, a, b, P53)
                for _ in range(3):
                    x = a.mid + a.rad * mpf(rng.uniform(-0.99, 0.99))
                    y = b.mid + b.rad * mpf(rng.uniform(-0.99, 0.99))
                    inner = ball_binop(op, Ball(x), Ball(y), P53)
                    assert outer.contains(inner), (op, a, b, x, y)

    def test_precision_does_not_widen_point_results(self) -> None:
        """Test that doubling precision on point inputs never grows the radius."""
        low = ball_binop("div", Ball(2), Ball(7), Precision(64))
        high = ball_binop("div", Ball(2), Ball(7), Precision(128))
        assert high.rad <= low.rad

    def test_determinism(self) -> None:
        """Test that repeated operations are bit-identical."""
        a, b = Ball("1.25", "1e-10"), Ball("3.5", "2e-12")
        assert ball_binop("mul", a, b, P53) == ball_binop("mul", a, b, P53)


class TestBallElem:
    """Test cases for ball_elem."""

    def test_cos_zero(self) -> None:
        """Test cos(0) = 1."""
        assert ball_elem("cos", ZERO, P53).contains(1)

    def test_ln_exp(self) -> None:
        """Test that ln inverts exp."""
        assert ball_elem("ln", ball_elem("exp", ONE, P53), P53).contains(1)

    def test_gamma_half(self) -> None:
        """Test Gamma(1/2) = sqrt(pi)."""
        with mp.workprec(200):
            expected = mp.sqrt(mp.pi)
        result = ball_elem("gamma", Ball("0.5"), Precision(128))
        assert result.contains(expected)

    def test_pow_int(self) -> None:
        """Test integer powers, including negative exponents."""
        assert ball_elem("pow_int", Ball(3), P53, n=4).contains(81)
        assert ball_elem("pow_int", Ball(2), P53, n=-3).contains(Fraction(1, 8))

    def test_pow_int_needs_exponent(self) -> None:
        """Test that pow_int requires n."""
        with pytest.raises(ValueError, match="exponent"):
            ball_elem("pow_int", ONE, P53)

    @pytest.mark.parametrize(
        ("fn", "arg"),
        [
            ("sqrt", Ball(-1)),
            ("ln", Ball(0)),
            ("ln", Ball("0.5", "1")),
            ("gamma", Ball(-2)),
            ("gamma", Ball("-0.5", "0.75")),
        ],
    )
    def test_domain_violation(self, fn: str, arg: Ball) -> None:
        """Test arguments outside the domain."""
        with pytest.raises(DomainViolation):
            ball_elem(fn, arg, P53)  # type: ignore[arg-type]

    def test_sin_interval(self) -> None:
        """Test that sin over an interval covers the image."""
        wide = ball_elem("sin", Ball(0, 2), P53)
        assert wide.contains(1)
        assert wide.contains(-1)


class TestBallUnion:
    """Test cases for ball_union."""

    def test_identical(self) -> None:
        """Test the union of a ball with itself."""
        assert ball_union(ONE, ONE) == ONE

    def test_disjoint(self) -> None:
        """Test the union of disjoint balls covers the hull."""
        hull = ball_union(Ball(0, 1), Ball(2))
        assert hull.contains(-1)
        assert hull.contains(2)

    def test_contains_both(self) -> None:
        """Test that random unions contain both inputs."""
        rng = random.Random(3)
        for _ in range(100):
            a = Ball(rng.uniform(-3, 3), rng.uniform(0, 1))
            b = Ball(rng.uniform(-3, 3), rng.uniform(0, 1))
            union = ball_union(a, b)
            assert union.contains(a)
            assert union.contains(b)
            assert ball_union(a, a).contains(a)


class TestBall:
    """Test cases for Ball helpers and serialization."""

    def test_negative_radius(self) -> None:
        """Test that a negative radius is rejected."""
        with pytest.raises(DomainViolation, match="nonnegative"):
            Ball(1, -1)

    def test_intersect(self) -> None:
        """Test intersections of overlapping and disjoint balls."""
        both = Ball(0, 2).intersect(Ball(1, 2))
        assert both is not None
        assert both.contains(Ball("0.5", "1"))
        assert Ball(0, 1).intersect(Ball(5, 1)) is None

    def test_intersect_keeps_working_precision(self) -> None:
        """Test that a narrow overlap of coarse balls is not widened by midpoint rounding."""
        tiny = mpf(2) ** -200
        overlap = Ball(0, 1).intersect(Ball(1, tiny), Precision(256))
        assert overlap is not None
        assert overlap.rad <= tiny / 2
        assert overlap.contains(1)
        assert overlap.contains(Ball(1).sub(Ball(tiny), Precision(256)))
        hull = ball_union(Ball(0, tiny), Ball(tiny), Precision(256))
        assert hull.contains(Ball(0, tiny))
        assert hull.rad <= tiny

    def test_abs_straddling_zero(self) -> None:
        """Test |x| for a ball containing zero."""
        result = Ball(0, 2).abs()
        assert result.contains(0)
        assert result.contains(2)
        assert result.lower() >= 0

    def test_fraction_endpoints(self) -> None:
        """Test exact endpoint fractions."""
        ball = Ball("0.5", "0.25")
        assert ball.lower_fraction() == Fraction(1, 4)
        assert ball.upper_fraction() == Fraction(3, 4)

    @pytest.mark.parametrize(
        "ball",
        [Ball(1).div(Ball(3), Precision(256)), Ball("1e40", "3"), Ball(5).sqrt(Precision(128)).neg()],
    )
    def test_fraction_endpoints_are_builtin(self, ball: Ball) -> None:
        """Test that endpoint fractions use plain ints and compare with other fractions."""
        low, high = ball.lower_fraction(), ball.upper_fraction()
        for value in (low, high):
            assert type(value.numerator) is int
            assert type(value.denominator) is int
        assert low < high < low + 1000

    def test_ball_sum_left_to_right(self) -> None:
        """Test summing a list of balls."""
        total = ball_sum([Ball(1), Ball(2), Ball(3)], P53)
        assert total == Ball(6)

    @pytest.mark.parametrize(
        "ball",
        [
            Ball(0),
            Ball(1),
            Ball(-7, 0),
            Ball("0.1"),
            Ball(1).div(Ball(3), Precision(128)),
            Ball("123456.789", "1e-20"),
            Ball("-1e-30", "1e-45"),
        ],
    )
    def test_decimal_round_trip(self, ball: Ball) -> None:
        """Test that parsing the decimal form yields a containing ball."""
        parsed = Ball.from_decimal(ball.to_decimal(), Precision(128))
        assert parsed.contains(ball)

    def test_decimal_plus_minus(self) -> None:
        """Test the ASCII +/- spelling."""
        assert Ball.from_decimal("2 +/- 0.5").contains(Ball("2.25"))

    def test_pickle(self) -> None:
        """Test that balls survive pickling bit-identically."""
        ball = Ball(1).div(Ball(7), Precision(128))
        assert pickle.loads(pickle.dumps(ball)) == ball
