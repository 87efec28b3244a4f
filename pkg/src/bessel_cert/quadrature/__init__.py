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

"""Composite Gauss-Legendre quadrature and the asymptotic tail."""

from bessel_cert.quadrature.gauss import (
    EvaluationMeter,
    GaussRule,
    PanelLayout,
    bound_0S,
    bound_ST,
    legendre_rule,
    minimal_cutoff,
    panel_sum,
)
from bessel_cert.quadrature.tail import (
    TailCoefficients,
    TrigTerm,
    expand_products,
    tail_error,
    tail_main,
)

__all__ = [
    "EvaluationMeter",
    "GaussRule",
    "PanelLayout",
    "TailCoefficients",
    "TrigTerm",
    "bound_0S",
    "bound_ST",
    "expand_products",
    "legendre_rule",
    "minimal_cutoff",
    "panel_sum",
    "tail_error",
    "tail_main",
]
