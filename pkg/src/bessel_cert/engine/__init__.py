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

"""Integral engine: canonical keys, scheme parameters, evaluation and caching."""

from bessel_cert.engine.batch import CacheLog, batch_compute, load_tables
from bessel_cert.engine.integrals import (
    IntegralRecord,
    IntegralStore,
    QuadratureGrid,
    SchemeTables,
    compute_integral,
)
from bessel_cert.engine.keys import ModeKey, canonical_key
from bessel_cert.engine.params import (
    SchemeParams,
    evaluation_counts,
    scheme_error,
    scheme_params,
)

__all__ = [
    "CacheLog",
    "IntegralRecord",
    "IntegralStore",
    "ModeKey",
    "QuadratureGrid",
    "SchemeParams",
    "SchemeTables",
    "batch_compute",
    "canonical_key",
    "compute_integral",
    "evaluation_counts",
    "load_tables",
    "scheme_error",
    "scheme_params",
]
