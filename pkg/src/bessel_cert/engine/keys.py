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
Canonical keys for the six-fold Bessel product integrals.

An integral ``int_0^inf r prod_j J_{k_j}(r) dr`` is unchanged by permuting
``k`` and picks up ``(-1)^{|k_j|}`` when ``k_j`` changes sign, so every
signed six-tuple reduces to sorted absolute orders and a sign.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from bessel_cert.exceptions import OddSumKey

if TYPE_CHECKING:
    from collections.abc import Sequence

KEY_LENGTH = 6


@dataclass(frozen=True, slots=True, order=True)
class ModeKey:
    """
    Canonical integral key.

    Attributes
    ----------
    orders : tuple[int, ...]
        Six nonnegative orders in non-decreasing order.
    sign : int
        ``+1`` or ``-1``; the signed integral equals ``sign`` times the
        integral over ``orders``.
    """

    orders: tuple[int, ...]
    sign: int = 1

    def __post_init__(self) -> None:
        """Validate the key."""
        if len(self.orders) != KEY_LENGTH:
            msg = f"A key has {KEY_LENGTH} orders, got {len(self.orders)}"
            raise ValueError(msg)
        if any(o < 0 for o in self.orders) or list(self.orders) != sorted(self.orders):
            msg = f"Key orders must be sorted and nonnegative, got {self.orders}"
            raise ValueError(msg)
        if self.sign not in {1, -1}:
            msg = f"Key sign must be +1 or -1, got {self.sign}"
            raise ValueError(msg)

    @property
    def max_order(self) -> int:
        """Largest order in the key."""
        return self.orders[-1]

    def unsigned(self) -> ModeKey:
        """The same orders with sign ``+1``."""
        return self if self.sign == 1 else ModeKey(self.orders)

    def to_text(self) -> str:
        """Orders separated by spaces, as used in cache files."""
        return " ".join(str(o) for o in self.orders)

    @classmethod
    def from_text(cls, text: str) -> ModeKey:
        """Parse the output of :meth:`to_text`."""
        return cls(tuple(int(field) for field in text.split()))


def canonical_key(k: Sequence[int]) -> ModeKey:
    """
    Reduce a signed six-tuple to its canonical key.

    Parameters
    ----------
    k : Sequence[int]
        Signed Bessel orders.

    Returns
    -------
    ModeKey
        Sorted absolute orders, with the sign collected from
        ``J_{-n} = (-1)^n J_n``.

    Raises
    ------
    OddSumKey
        If the orders have an odd sum.

    Examples
    --------
    >>> canonical_key((2, -2, 0, 1, -1, 0))
    ModeKey(orders=(0, 0, 1, 1, 2, 2), sign=-1)
    """
    if len(k) != KEY_LENGTH:
        msg = f"A key has {KEY_LENGTH} orders, got {len(k)}"
        raise ValueError(msg)
    if sum(k) % 2:
        msg = f"Orders {tuple(k)} have an odd sum"
        raise OddSumKey(msg)
    flipped = sum(-o for o in k if o < 0)
    return ModeKey(tuple(sorted(abs(o) for o in k)), -1 if flipped % 2 else 1)


def canonical_orders(k: Sequence[int]) -> tuple[int, ...]:
    """Sorted absolute orders of ``k`` without validation."""
    return tuple(sorted(map(abs, k)))
