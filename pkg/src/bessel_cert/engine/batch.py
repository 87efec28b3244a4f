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
Batch evaluation of integrals with a persistent, resumable cache.

The cache is a plain-text log: a header naming the scheme hash and
precision, then one ``o1 .. o6 mid ± rad`` line per unsigned key. Chunks
are appended as they finish, so an interrupted run resumes where it
stopped; at the end the log is rewritten in sorted order through a
temporary file and :func:`os.replace`.

Every value, whether computed now or read back, passes through the same
decimal serialization before it reaches the store, so the store does not
depend on the cache state. Worker processes receive the Bessel table
pickled by :func:`joblib.dump`, which keeps every ball bit-identical, so
the store does not depend on the worker count either.
"""

from __future__ import annotations

import logging
import os
import tempfile
import time
from contextlib import ExitStack
from functools import lru_cache
from pathlib import Path
from typing import TYPE_CHECKING

import joblib
from joblib import Parallel, delayed

from bessel_cert.engine.integrals import (
    IntegralRecord,
    IntegralStore,
    ProductSummer,
    QuadratureGrid,
    SchemeTables,
    compute_integral,
)
from bessel_cert.engine.keys import ModeKey
from bessel_cert.exceptions import CacheCorruption
from bessel_cert.special.bessel import BesselTable

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable, Sequence

    from bessel_cert.arith.ball import Ball
    from bessel_cert.engine.params import SchemeParams
    from bessel_cert.quadrature.gauss import EvaluationMeter

logger = logging.getLogger(__name__)

CACHE_HEADER = "# bessel-cert integrals v1"
CHUNK_SIZE = 64

Orders = tuple[int, ...]


def table_cache_path(cache: Path) -> Path:
    """Location of the Bessel table kept next to the integral cache."""
    return cache.with_name(cache.name + ".table.gz")


class CacheLog:
    """
    Append-only integral log for one scheme.

    Parameters
    ----------
    path : Path
        Log file.
    params : SchemeParams
        Scheme whose hash and precision the header must carry.
    """

    def __init__(self, path: Path, params: SchemeParams):
        """Bind the log to ``path``."""
        self.path = Path(path)
        self.params = params

    def header(self) -> str:
        """The expected first line."""
        return f"{CACHE_HEADER} scheme={self.params.scheme_hash} bits={self.params.bits}"

    def read(self) -> dict[Orders, Ball]:
        """
        Load every readable record.

        Malformed lines, as left by an interrupted append, are skipped with a
        warning.

        Raises
        ------
        CacheCorruption
            If the header belongs to another scheme or precision.
        """
        if not self.path.exists():
            return {}
        values: dict[Orders, Ball] = {}
        with self.path.open(encoding="utf-8") as fh:
            first = fh.readline().rstrip("\n")
            if not first:
                return {}
            if first != self.header():
                msg = f"Cache {self.path} header {first[:80]!r} does not match {self.header()[:80]!r}"
                raise CacheCorruption(msg)
            for number, line in enumerate(fh, start=2):
                if not line.strip():
                    continue
                try:
                    record = IntegralRecord.from_line(line.strip(), self.params)
                except (ValueError, TypeError) as e:
                    logger.warning("Skipping unreadable cache line %d of %s: %s", number, self.path, e)
                    continue
                values[record.key.orders] = record.value
        return values

    def ensure_header(self) -> None:
        """Create the log with its header if it does not exist yet."""
        if not self.path.exists() or self.path.stat().st_size == 0:
            self.rewrite([])

    def append(self, lines: Iterable[str]) -> None:
        """Append record lines and flush them to disk."""
        with self.path.open("a", encoding="utf-8") as fh:
            for line in lines:
                fh.write(line + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def rewrite(self, lines: Iterable[str]) -> None:
        """Replace the log with a header and ``lines``, atomically."""
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fd, partial = tempfile.mkstemp(prefix=self.path.name, suffix=".partial", dir=self.path.parent)
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(self.header() + "\n")
            for line in lines:
                fh.write(line + "\n")
        Path(partial).replace(self.path)


def load_tables(
    params: SchemeParams,
    cache: Path | None = None,
    workers: int = 1,
    max_order: int | None = None,
) -> SchemeTables:
    """
    Grid and Bessel table for ``params``, reusing ``<cache>.table.gz`` when it fits.

    Parameters
    ----------
    params : SchemeParams
        The scheme.
    cache : Path, optional
        Integral cache whose sibling table file is read and written.
    workers : int, default 1
        joblib workers for building a missing table.
    max_order : int, optional
        Largest order needed; defaults to ``params.max_order``.

    Returns
    -------
    SchemeTables
        Tables whose values come from the serialized form.
    """
    order = params.max_order if max_order is None else max_order
    path = table_cache_path(cache) if cache is not None else None
    if path is not None and path.exists():
        try:
            table = BesselTable.load(path, params.scheme_hash)
            tables = SchemeTables(params, QuadratureGrid.build(params), table)
        except CacheCorruption as e:
            logger.warning("Discarding Bessel table %s: %s", path, e)
        else:
            if table.max_order >= order:
                logger.info("Loaded Bessel table from %s (orders 0..%d)", path, table.max_order)
                return tables
            logger.info("Cached Bessel table stops at order %d; rebuilding to %d", table.max_order, order)
    return SchemeTables.build(params, workers, order, path)


@lru_cache(maxsize=1)
def _worker_tables(
    path: str, stamp: tuple[int, int], params: SchemeParams
) -> tuple[SchemeTables, ProductSummer]:
    """Tables loaded once per worker process; ``stamp`` invalidates stale files."""
    table: BesselTable = joblib.load(path)
    if table.key != params.scheme_hash:
        msg = f"Worker table {path} was built for scheme {table.key!r}"
        raise CacheCorruption(msg)
    tables = SchemeTables(params, QuadratureGrid.build(params), table)
    return tables, ProductSummer(tables)


def _chunk_lines(
    chunk: Sequence[Orders], params: SchemeParams, tables: SchemeTables, summer: ProductSummer
) -> list[str]:
    return [
        compute_integral(ModeKey(orders), params, tables, summer=summer).to_line()
        for orders in chunk
    ]


def _worker_chunk(
    chunk: Sequence[Orders], params: SchemeParams, path: str, stamp: tuple[int, int]
) -> list[str]:
    tables, summer = _worker_tables(path, stamp, params)
    return _chunk_lines(chunk, params, tables, summer)


def _file_stamp(path: Path) -> tuple[int, int]:
    stat = path.stat()
    return stat.st_mtime_ns, stat.st_size


def batch_compute(
    keys: Iterable[ModeKey],
    params: SchemeParams,
    cache: Path | None = None,
    workers: int = 1,
    *,
    tables: SchemeTables | None = None,
    progress: Callable[[int, int], None] | None = None,
    meter: EvaluationMeter | None = None,
) -> IntegralStore:
    """
    Resolve every key from the cache or by computation.

    Parameters
    ----------
    keys : Iterable[ModeKey]
        Keys to resolve; signs are ignored since the store is unsigned.
    params : SchemeParams
        The scheme.
    cache : Path, optional
        Integral log. A log written for another scheme is discarded with a
        warning and rebuilt.
    workers : int, default 1
        joblib worker processes. Keys are split into sorted chunks of
        64, so results do not depend on this value.
    tables : SchemeTables, optional
        Prebuilt tables; otherwise they are loaded or built on demand.
    progress : callable, optional
        Called as ``progress(done, total)`` after the cache lookup and
        after every chunk.
    meter : EvaluationMeter, optional
        Counts integrand evaluations of the computed keys.

    Returns
    -------
    IntegralStore
        Unsigned enclosures for every requested key.
    """
    wanted = sorted({key.orders for key in keys})
    store = IntegralStore(params.scheme_hash)
    if not wanted:
        return store

    log = CacheLog(cache, params) if cache is not None else None
    cached: dict[Orders, Ball] = {}
    stale = False
    if log is not None:
        try:
            cached = log.read()
        except CacheCorruption as e:
            logger.warning("Recomputing: %s", e)
            stale = True
    for orders in wanted:
        if orders in cached:
            store.add(IntegralRecord(ModeKey(orders), cached[orders], params.scheme_hash))
    missing = [orders for orders in wanted if orders not in cached]
    logger.info("Integral cache: %d hits, %d to compute", len(wanted) - len(missing), len(missing))
    done, total = len(wanted) - len(missing), len(wanted)
    if progress is not None:
        progress(done, total)
    if not missing:
        return store

    if log is not None:
        if stale:
            log.rewrite([])
        else:
            log.ensure_header()
    needed = max(orders[-1] for orders in missing)
    if tables is None or tables.table.max_order < needed:
        tables = load_tables(params, cache, workers, needed)
    chunks = [missing[i : i + CHUNK_SIZE] for i in range(0, len(missing), CHUNK_SIZE)]
    start = time.perf_counter()
    with ExitStack() as stack:
        if workers > 1:
            scratch = Path(stack.enter_context(tempfile.TemporaryDirectory(prefix="bessel-cert-")))
            table_file = scratch / "table.pkl"
            joblib.dump(tables.table, table_file)
            stamp = _file_stamp(table_file)
            results = Parallel(n_jobs=workers, return_as="generator")(
                delayed(_worker_chunk)(chunk, params, str(table_file), stamp) for chunk in chunks
            )
        else:
            summer = ProductSummer(tables)
            results = (_chunk_lines(chunk, params, tables, summer) for chunk in chunks)
        for chunk, lines in zip(chunks, results, strict=True):
            for line in lines:
                store.add(IntegralRecord.from_line(line, params))
            if log is not None:
                log.append(lines)
            if meter is not None:
                for orders in chunk:
                    meter.tick(len(tables.grid), orders)
            done += len(chunk)
            logger.debug("Computed %d / %d integrals", done, total)
            if progress is not None:
                progress(done, total)
    logger.info("Computed %d integrals in %.1fs", len(missing), time.perf_counter() - start)

    if log is not None:
        merged = IntegralStore(params.scheme_hash, cached)
        for record in store.records():
            merged.add(record)
        log.rewrite(merged.to_lines())
    return store
