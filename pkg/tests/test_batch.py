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

"""Tests for batch evaluation and the integral cache."""

import itertools
import logging
from unittest.mock import patch

import joblib
import pytest

from bessel_cert.engine.batch import (
    CACHE_HEADER,
    CacheLog,
    _worker_tables,
    batch_compute,
    load_tables,
    table_cache_path,
)
from bessel_cert.engine.integrals import SchemeTables, compute_integral
from bessel_cert.engine.keys import ModeKey, canonical_key
from bessel_cert.exceptions import CacheCorruption
from bessel_cert.quadrature.gauss import EvaluationMeter
from bessel_cert.special.bessel import BesselTable
from bessel_cert.spectral.index_sets import required_keys

SMALL_KEYS = [
    canonical_key(k)
    for k in [
        (0, 0, 0, 0, 0, 0),
        (1, -1, 0, 0, 2, -2),
        (2, 2, 0, 0, -2, -2),
        (1, 1, 1, 1, 0, 0),
        (3, -1, 0, 0, 0, -2),
        (4, -4, 2, -2, 0, 0),
    ]
]


class TestCacheLog:
    """Test cases for CacheLog."""

    def test_missing_file(self, small_params, cache_path) -> None:
        """Test that a missing log reads as empty."""
        assert CacheLog(cache_path, small_params).read() == {}

    def test_header_mismatch(self, small_params, four_params, cache_path) -> None:
        """Test that a log for another scheme is refused."""
        CacheLog(cache_path, four_params).ensure_header()
        with pytest.raises(CacheCorruption, match="does not match"):
            CacheLog(cache_path, small_params).read()

    def test_rewrite_is_atomic(self, small_params, cache_path) -> None:
        """Test that a rewrite leaves no temporary files behind."""
        log = CacheLog(cache_path, small_params)
        log.rewrite(["0 0 0 0 0 0 1 ± 0"])
        assert cache_path.read_text(encoding="utf-8").splitlines()[0] == log.header()
        assert [p.name for p in cache_path.parent.iterdir()] == [cache_path.name]

    def test_skips_torn_line(self, small_params, cache_path, caplog) -> None:
        """Test that an interrupted trailing line is skipped with a warning."""
        log = CacheLog(cache_path, small_params)
        log.rewrite(["0 0 0 0 0 0 1 ± 0"])
        with cache_path.open("a", encoding="utf-8") as fh:
            fh.write("0 0 0 0 1")
        with caplog.at_level(logging.WARNING):
            values = log.read()
        assert list(values) == [(0, 0, 0, 0, 0, 0)]
        assert "unreadable cache line" in caplog.text


class TestBatchCompute:
    """Test cases for batch_compute."""

    def test_empty_keys(self, small_params, small_tables, cache_path) -> None:
        """Test that no keys leave the cache untouched."""
        store = batch_compute([], small_params, cache_path, tables=small_tables)
        assert len(store) == 0
        assert not cache_path.exists()
        cache_path.write_text("anything\n", encoding="utf-8")
        batch_compute(set(), small_params, cache_path, tables=small_tables)
        assert cache_path.read_text(encoding="utf-8") == "anything\n"

    def test_matches_compute_integral(self, small_params, small_tables) -> None:
        """Test that batch values enclose the direct results."""
        store = batch_compute(SMALL_KEYS, small_params, tables=small_tables)
        assert len(store) == len({k.orders for k in SMALL_KEYS})
        for key in SMALL_KEYS:
            direct = compute_integral(key, small_params, small_tables).value
            assert store.get(key).contains(direct)

    def test_second_run_hits_cache(self, small_params, small_tables, cache_path) -> None:
        """Test zero evaluations and identical stores on a warm rerun."""
        cold_meter, warm_meter = EvaluationMeter(), EvaluationMeter()
        cold = batch_compute(SMALL_KEYS, small_params, cache_path, tables=small_tables, meter=cold_meter)
        before = cache_path.read_bytes()
        warm = batch_compute(SMALL_KEYS, small_params, cache_path, tables=small_tables, meter=warm_meter)
        assert cold_meter.count == len(cold) * 360
        assert warm_meter.count == 0
        assert warm == cold
        assert cache_path.read_bytes() == before

    def test_cache_file_sorted(self, small_params, small_tables, cache_path) -> None:
        """Test the header and the sorted record order."""
        batch_compute(reversed(SMALL_KEYS), small_params, cache_path, tables=small_tables)
        lines = cache_path.read_text(encoding="utf-8").splitlines()
        assert lines[0].startswith(CACHE_HEADER)
        assert small_params.scheme_hash in lines[0]
        orders = [tuple(int(f) for f in line.split()[:6]) for line in lines[1:]]
        assert orders == sorted(orders)

    def test_partial_cache(self, small_params, small_tables, cache_path) -> None:
        """Test that only missing keys are computed and old records are kept."""
        batch_compute(SMALL_KEYS[:3], small_params, cache_path, tables=small_tables)
        meter = EvaluationMeter()
        store = batch_compute(SMALL_KEYS[2:], small_params, cache_path, tables=small_tables, meter=meter)
        assert set(meter.by_key) == {k.orders for k in SMALL_KEYS[3:]}
        assert len(store) == len(SMALL_KEYS) - 2
        assert len(cache_path.read_text(encoding="utf-8").splitlines()) == 1 + len(SMALL_KEYS)

    def test_hash_mismatch_recomputes(self, small_params, four_params, small_tables, cache_path, caplog) -> None:
        """Test that a foreign cache is rewritten after a warning."""
        CacheLog(cache_path, four_params).rewrite(["0 0 0 0 0 0 5 ± 0"])
        meter = EvaluationMeter()
        with caplog.at_level(logging.WARNING):
            store = batch_compute(SMALL_KEYS[:1], small_params, cache_path, tables=small_tables, meter=meter)
        assert "Recomputing" in caplog.text
        assert meter.count == 360
        assert not store.get(SMALL_KEYS[0]).contains(5)
        assert CacheLog(cache_path, small_params).read().keys() == {SMALL_KEYS[0].orders}

    def test_warm_equals_cold(self, small_params, small_tables, cache_path) -> None:
        """Test that cached and freshly computed stores are bit-identical."""
        cold = batch_compute(SMALL_KEYS, small_params, tables=small_tables)
        batch_compute(SMALL_KEYS, small_params, cache_path, tables=small_tables)
        warm = batch_compute(SMALL_KEYS, small_params, cache_path, tables=small_tables)
        assert warm == cold

    def test_progress(self, small_params, small_tables) -> None:
        """Test progress reports end at total."""
        calls = []
        batch_compute(SMALL_KEYS, small_params, tables=small_tables, progress=lambda d, t: calls.append((d, t)))
        assert calls[0] == (0, 6)
        assert calls[-1] == (6, 6)

    def test_table_cache(self, small_params, cache_path) -> None:
        """Test that the Bessel table is saved next to the cache and reused."""
        batch_compute(SMALL_KEYS[:2], small_params, cache_path)
        table_file = table_cache_path(cache_path)
        assert table_file.name == "integrals.log.table.gz"
        assert table_file.exists()
        with patch.object(SchemeTables, "build") as build:
            tables = load_tables(small_params, cache_path, max_order=2)
        build.assert_not_called()
        assert tables.table == BesselTable.load(table_file, small_params.scheme_hash)

    def test_table_cache_too_small(self, small_params, cache_path) -> None:
        """Test that a cached table with too few orders is rebuilt."""
        load_tables(small_params, cache_path, max_order=1)
        tables = load_tables(small_params, cache_path, max_order=3)
        assert tables.table.max_order == 3
        assert BesselTable.load(table_cache_path(cache_path)).max_order == 3

    @pytest.mark.slow
    def test_worker_count_is_irrelevant(self, four_params, four_tables) -> None:
        """Test that 1 and 8 workers give bit-identical serialized stores on 100 keys."""
        keys = [
            ModeKey(orders)
            for orders in itertools.combinations_with_replacement(range(9), 6)
            if sum(orders) % 2 == 0
        ][::7][:100]
        assert len(keys) == 100
        single = batch_compute(keys, four_params, workers=1, tables=four_tables)
        many = batch_compute(keys, four_params, workers=8, tables=four_tables)
        assert list(single.to_lines()) == list(many.to_lines())

    def test_two_workers_match_one(self, small_params, small_tables) -> None:
        """Test that the N=2 explore store is byte-equal for 1 and 2 workers."""
        keys = required_keys(2)
        single = batch_compute(keys, small_params, workers=1, tables=small_tables)
        double = batch_compute(keys, small_params, workers=2, tables=small_tables)
        assert single == double
        assert list(single.to_lines()) == list(double.to_lines())

    def test_two_workers_match_cold_cache(self, small_params, cache_path, tmp_path) -> None:
        """Test that a cold two-worker run reproduces the single-worker cache file byte for byte."""
        other = tmp_path / "other" / "integrals.log"
        other.parent.mkdir()
        keys = required_keys(2)
        batch_compute(keys, small_params, cache_path, workers=1)
        batch_compute(keys, small_params, other, workers=2)
        assert other.read_bytes() == cache_path.read_bytes()


class TestWorkerTables:
    """Test cases for the table hand-off to worker processes."""

    def test_pickled_table_is_identical(self, small_params, small_tables, tmp_path) -> None:
        """Test that workers see the in-memory table bit for bit."""
        path = tmp_path / "table.pkl"
        joblib.dump(small_tables.table, path)
        tables, _ = _worker_tables.__wrapped__(str(path), (0, 0), small_params)
        assert tables.table == small_tables.table

    def test_foreign_scheme_rejected(self, small_params, four_params, small_tables, tmp_path) -> None:
        """Test that a table built for another scheme is refused."""
        path = tmp_path / "table.pkl"
        joblib.dump(small_tables.table, path)
        with pytest.raises(CacheCorruption, match="built for scheme"):
            _worker_tables.__wrapped__(str(path), (0, 0), four_params)
