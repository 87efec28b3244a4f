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

"""Bessel-cert pipeline client."""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING

from bessel_cert.arith.ball import DEFAULT_BITS
from bessel_cert.engine.batch import batch_compute, load_tables
from bessel_cert.engine.params import DEFAULT_NODES, Mode, scheme_params
from bessel_cert.quadrature.gauss import legendre_rule
from bessel_cert.spectral.blocks import assemble_block, disc_block, hexagon_block
from bessel_cert.spectral.certificate import certify
from bessel_cert.spectral.index_sets import required_keys

if TYPE_CHECKING:
    from collections.abc import Callable

    from bessel_cert.arith.ball import Number
    from bessel_cert.engine.integrals import IntegralStore, SchemeTables
    from bessel_cert.engine.params import SchemeParams
    from bessel_cert.quadrature.gauss import GaussRule
    from bessel_cert.spectral.blocks import BlockMatrix, LabelledMatrix
    from bessel_cert.spectral.certificate import Certificate

logger = logging.getLogger(__name__)

DEFAULT_OUT = Path("bessel-cert-out")


@dataclass(frozen=True)
class RunConfig:
    """
    Options of one command-line run.

    Attributes
    ----------
    n : int
        Band limit ``N``.
    mode : {"certify", "explore"}
        Certify mode validates every error bound.
    cache : Path, optional
        Integral log; the Bessel table is cached next to it.
    workers : int
        joblib worker processes.
    prec : int
        Working precision in bits.
    out : Path
        Directory for certificates and figure data.
    d0, d1, s, t : number, optional
        Scheme overrides.
    nodes : int
        Gauss-Legendre points per panel.
    """

    n: int = 20
    mode: Mode = "certify"
    cache: Path | None = None
    workers: int = 1
    prec: int = DEFAULT_BITS
    out: Path = DEFAULT_OUT
    d0: Number | None = None
    d1: Number | None = None
    s: Number | None = None
    t: Number | None = None
    nodes: int = DEFAULT_NODES

    def for_band_limit(self, n: int) -> RunConfig:
        """
        The same run at band limit ``n`` without cutoff overrides.

        The cache gains an ``.N<n>`` suffix so runs at different band
        limits never overwrite each other's log.
        """
        if n == self.n:
            return self
        cache = None if self.cache is None else self.cache.with_name(f"{self.cache.name}.N{n}")
        return dataclasses.replace(self, n=n, cache=cache, s=None, t=None)


class PipelineClient:
    """
    Lazily built pipeline state for one :class:`RunConfig`.

    Parameters, rule, tables, integrals, blocks and the certificate are
    each computed on first request and reused afterwards, so the command
    sections can ask for what they need in any order.

    Parameters
    ----------
    config : RunConfig
        The run options.
    progress : callable, optional
        Receives ``(label, done, total)`` for integral and block progress.

    Examples
    --------
    >>> client = PipelineClient(RunConfig(n=4, mode="explore"))
    >>> client.get_params().node_count
    1428
    """

    def __init__(self, config: RunConfig, progress: Callable[[str, int, int], None] | None = None):
        """Initialize the client without computing anything."""
        self.config = config
        self.progress = progress
        self._params: SchemeParams | None = None
        self._rule: GaussRule | None = None
        self._tables: SchemeTables | None = None
        self._store: IntegralStore | None = None
        self._certificate: Certificate | None = None
        self._blocks: dict[int, BlockMatrix] = {}

    def _report(self, label: str) -> Callable[[int, int], None] | None:
        if self.progress is None:
            return None
        progress = self.progress
        return lambda done, total: progress(label, done, total)

    def get_params(self) -> SchemeParams:
        """
        Get the resolved scheme.

        Raises
        ------
        InvalidSchemeParams
            If the band limit or an override is not admissible.
        """
        if self._params is None:
            c = self.config
            self._params = scheme_params(
                c.n, c.mode, d0=c.d0, d1=c.d1, s=c.s, t=c.t, n=c.nodes, bits=c.prec
            )
        return self._params

    def get_rule(self) -> GaussRule:
        """Get the certified Gauss-Legendre rule of the scheme."""
        if self._rule is None:
            params = self.get_params()
            self._rule = legendre_rule(params.n, params.precision)
        return self._rule

    def get_tables(self) -> SchemeTables:
        """Get the grid and Bessel table, from the table cache when possible."""
        if self._tables is None:
            self._tables = load_tables(self.get_params(), self.config.cache, self.config.workers)
        return self._tables

    def get_store(self) -> IntegralStore:
        """Get every integral the blocks need, from the cache or computed."""
        if self._store is None:
            params = self.get_params()
            keys = required_keys(params.N)
            logger.info("Band limit %d needs %d integrals", params.N, len(keys))
            self._store = batch_compute(
                keys,
                params,
                self.config.cache,
                self.config.workers,
                tables=self._tables,
                progress=self._report("integrals"),
            )
        return self._store

    def get_block(self, D: int) -> BlockMatrix:  # noqa: N803
        """Get the assembled block ``D``."""
        if D not in self._blocks:
            params = self.get_params()
            self._blocks[D] = assemble_block(params.N, D, self.get_store(), params)
        return self._blocks[D]

    def get_hexagon(self, D: int) -> LabelledMatrix:  # noqa: N803
        """Get block ``D`` expanded to all label permutations."""
        params = self.get_params()
        return hexagon_block(params.N, D, self.get_store(), params, block=self.get_block(D))

    def get_disc(self) -> LabelledMatrix:
        """Get the weighted disc matrix of block 0."""
        params = self.get_params()
        return disc_block(params.N, self.get_store(), params, block=self.get_block(0))

    def get_certificate(self) -> Certificate:
        """Get the certificate over every block."""
        if self._certificate is None:
            params = self.get_params()
            self._certificate = certify(
                params.N, params, self.get_store(), self.config.workers, progress=self._report("blocks")
            )
        return self._certificate

    def for_band_limit(self, n: int) -> PipelineClient:
        """A client for the same run at another band limit."""
        if n == self.config.n:
            return self
        return PipelineClient(self.config.for_band_limit(n), self.progress)
