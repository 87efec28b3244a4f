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

"""Test fixtures for the bessel-cert package."""

import pytest

from bessel_cert.arith import Ball
from bessel_cert.engine.batch import batch_compute
from bessel_cert.engine.integrals import IntegralStore, SchemeTables
from bessel_cert.engine.params import SchemeParams, scheme_params
from bessel_cert.spectral.blocks import BlockMatrix
from bessel_cert.spectral.index_sets import Triple, required_keys


@pytest.fixture(scope="session")
def small_params() -> SchemeParams:
    """Explore-mode scheme at N=2: S=3, T=41.4, 360 nodes."""
    return scheme_params(2, "explore")


@pytest.fixture(scope="session")
def small_tables(small_params: SchemeParams) -> SchemeTables:
    """Grid and Bessel table for ``small_params``."""
    return SchemeTables.build(small_params)


@pytest.fixture(scope="session")
def four_params() -> SchemeParams:
    """Explore-mode scheme at N=4: S=12, T=164, 1428 nodes."""
    return scheme_params(4, "explore")


@pytest.fixture(scope="session")
def four_tables(four_params: SchemeParams) -> SchemeTables:
    """Grid and Bessel table for ``four_params``."""
    return SchemeTables.build(four_params)


@pytest.fixture
def cache_path(tmp_path):
    """Integral cache location inside a fresh temporary directory."""
    return tmp_path / "integrals.log"


@pytest.fixture(scope="session")
def small_store(small_params: SchemeParams, small_tables: SchemeTables) -> IntegralStore:
    """Every integral needed at N=2."""
    return batch_compute(required_keys(2), small_params, tables=small_tables)


@pytest.fixture(scope="session")
def four_store(four_params: SchemeParams, four_tables: SchemeTables) -> IntegralStore:
    """Every integral needed at N=4."""
    return batch_compute(required_keys(4), four_params, tables=four_tables)


@pytest.fixture
def make_block():
    """Build a BlockMatrix from rows of numbers or ``(mid, rad)`` pairs."""

    def build(rows, D=0, eps=0):  # noqa: N803
        index = tuple(Triple(-2 * i - 2, 0, 2 * i + 2) for i in range(len(rows)))
        entries = tuple(
            tuple(Ball(*value) if isinstance(value, tuple) else Ball(value) for value in row) for row in rows
        )
        return BlockMatrix(len(rows) * 2, D, index, entries, Ball(eps), 128)

    return build
