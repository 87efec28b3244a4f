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

"""Positive-definiteness certificate over every block of a band limit."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import TYPE_CHECKING, Literal

from joblib import Parallel, delayed

from bessel_cert.engine.params import scheme_error
from bessel_cert.spectral.blocks import assemble_block, min_diag_ratio
from bessel_cert.spectral.eigen import min_eig
from bessel_cert.spectral.index_sets import Triple, block_labels

if TYPE_CHECKING:
    from collections.abc import Callable
    from pathlib import Path

    from bessel_cert.arith.ball import Ball
    from bessel_cert.engine.integrals import IntegralStore
    from bessel_cert.engine.params import SchemeParams
    from bessel_cert.spectral.blocks import BlockMatrix

logger = logging.getLogger(__name__)

Verdict = Literal["pass", "fail", "unverified"]

CERTIFICATE_REPORT = "certificate.txt"
CERTIFICATE_TABLE = "certificate.dat"
TABLE_COLUMNS = "D dim lambda_mid lambda_rad op_norm_err verdict"

# Smallest eigenvalue of the D=0 block and diagonal-dominance ratios at N=120.
REFERENCE_N = 120
REFERENCE_LAMBDA_MIN = 0.0000369980
REFERENCE_RATIOS: dict[Triple, float] = {
    Triple(-2, 0, 2): 3.1,
    Triple(-90, 40, 50): 1.9,
    Triple(-4, 2, 2): 0.7,
}


def block_verdict(lambda_min: Ball, op_norm_err: Ball, certified: bool = True) -> Verdict:
    """``pass`` iff the lower end of ``lambda_min`` exceeds the upper end of ``op_norm_err``."""
    if not certified:
        return "unverified"
    return "pass" if lambda_min.lower() - op_norm_err.upper() > 0 else "fail"


@dataclass(frozen=True)
class BlockCertificate:
    """
    Result for one block.

    Attributes
    ----------
    D : int
        Block label.
    dim : int
        ``|X_D|``.
    lambda_min : Ball
        Enclosure of the smallest eigenvalue of the assembled block.
    op_norm_err : Ball
        ``dim * 16 * scheme_error``, bounding the operator norm of the
        difference to the true ``Q``.
    verdict : {"pass", "fail", "unverified"}
        Outcome for this block.
    radius_norm : float
        Row-sum norm of the entry radii, informational.
    diag_min_ratio : float or None
        Smallest diagonal-dominance ratio, informational.
    """

    D: int
    dim: int
    lambda_min: Ball
    op_norm_err: Ball
    verdict: Verdict
    radius_norm: float
    diag_min_ratio: float | None

    @property
    def margin(self) -> float:
        """Lower end of ``lambda_min`` minus the operator-norm error."""
        return float(self.lambda_min.lower() - self.op_norm_err.upper())

    def to_row(self) -> str:
        """Line of ``certificate.dat``."""
        return (
            f"{self.D} {self.dim} {float(self.lambda_min.mid):.12e} "
            f"{float(self.lambda_min.rad):.6e} {float(self.op_norm_err.upper()):.6e} {self.verdict}"
        )


def certify_block(block: BlockMatrix, params: SchemeParams) -> BlockCertificate:
    """Enclose the smallest eigenvalue of ``block`` and compare it with the operator-norm error."""
    lambda_min = min_eig(block)
    op_norm_err = block.scheme_eps.mul(block.dim, params.precision)
    verdict = block_verdict(lambda_min, op_norm_err, params.certified)
    return BlockCertificate(
        D=block.D,
        dim=block.dim,
        lambda_min=lambda_min,
        op_norm_err=op_norm_err,
        verdict=verdict,
        radius_norm=block.radius_norm(),
        diag_min_ratio=min_diag_ratio(block),
    )


def _certify_label(N: int, D: int, store: IntegralStore, params: SchemeParams) -> BlockCertificate:  # noqa: N803
    return certify_block(assemble_block(N, D, store, params), params)


@dataclass(frozen=True)
class Certificate:
    """
    Verdicts for every block ``D = 0, 2, ..., 3N``.

    The global verdict is ``pass`` only in certify mode and only when every
    block passes. In explore mode it is ``unverified``.
    """

    N: int
    params: SchemeParams
    scheme_error: Ball
    blocks: tuple[BlockCertificate, ...]

    @property
    def verdict(self) -> Verdict:
        """Global verdict."""
        if not self.params.certified:
            return "unverified"
        return "pass" if all(block.verdict == "pass" for block in self.blocks) else "fail"

    @property
    def passed(self) -> bool:
        """Whether the global verdict is ``pass``."""
        return self.verdict == "pass"

    @property
    def minimal_block(self) -> int:
        """Label of the block with the smallest eigenvalue midpoint."""
        return min(self.blocks, key=lambda block: (block.lambda_min.mid, block.D)).D

    @property
    def monotone(self) -> bool:
        """Whether the smallest eigenvalue is attained at ``D = 0``."""
        return self.minimal_block == 0

    def block(self, D: int) -> BlockCertificate:  # noqa: N803
        """Result for block ``D``."""
        for block in self.blocks:
            if block.D == D:
                return block
        msg = f"No block D={D} in the certificate for N={self.N}"
        raise KeyError(msg)

    def table(self) -> str:
        """Contents of ``certificate.dat``."""
        return "\n".join([f"# {TABLE_COLUMNS}", *(block.to_row() for block in self.blocks)]) + "\n"

    def report(self) -> str:
        """Contents of ``certificate.txt``."""
        lines = [f"bessel-cert certificate for N = {self.N}", ""]
        lines.extend(f"{name} = {value}" for name, value in self.params.describe().items())
        lines.extend([
            f"scheme_error = {self.scheme_error.to_decimal()}",
            f"entry_error = 16 * scheme_error = {float(self.scheme_error.upper()) * 16:.6e}",
            "",
        ])
        for block in self.blocks:
            ratio = "n/a" if block.diag_min_ratio is None else f"{block.diag_min_ratio:.4f}"
            lines.append(
                f"D = {block.D:4d}  dim = {block.dim:5d}  "
                f"lambda_min in [{float(block.lambda_min.lower()):.12e}, {float(block.lambda_min.upper()):.12e}]  "
                f"op_norm_err <= {float(block.op_norm_err.upper()):.6e}  "
                f"radius_norm = {block.radius_norm:.3e}  diag_min_ratio = {ratio}  {block.verdict}"
            )
        lines.extend([
            "",
            f"blocks = {len(self.blocks)}",
            f"minimal block = D {self.minimal_block}" + ("" if self.monotone else " (not D = 0)"),
            f"verdict = {self.verdict}",
        ])
        return "\n".join(lines) + "\n"

    def write(self, out: Path) -> tuple[Path, Path]:
        """Write ``certificate.txt`` and ``certificate.dat`` into ``out``."""
        out.mkdir(parents=True, exist_ok=True)
        report, table = out / CERTIFICATE_REPORT, out / CERTIFICATE_TABLE
        report.write_text(self.report(), encoding="utf-8")
        table.write_text(self.table(), encoding="utf-8")
        logger.info("Wrote %s and %s", report, table)
        return report, table


def certify(
    N: int,  # noqa: N803
    params: SchemeParams,
    store: IntegralStore,
    workers: int = 1,
    progress: Callable[[int, int], None] | None = None,
) -> Certificate:
    """
    Certify every block at band limit ``N``.

    Parameters
    ----------
    N : int
        Band limit; must match ``params.N``.
    params : SchemeParams
        The scheme the store was computed with.
    store : IntegralStore
        Every integral of :func:`~bessel_cert.spectral.index_sets.required_keys`.
    workers : int, default 1
        joblib workers; blocks are independent.
    progress : callable, optional
        Called as ``progress(done, total)`` after each block.

    Returns
    -------
    Certificate
        Block results in increasing ``D``.

    Raises
    ------
    MissingKey
        If the store lacks an integral.
    AsymmetricBlock
        In certify mode, if a block fails the symmetry check.
    EigensolveFailure
        If a lower eigenvalue bound cannot be certified.
    """
    if N != params.N:
        msg = f"Scheme was built for N={params.N}, not N={N}"
        raise ValueError(msg)
    labels = block_labels(N)
    start = time.perf_counter()
    if workers > 1:
        results = Parallel(n_jobs=workers, return_as="generator")(
            delayed(_certify_label)(N, D, store, params) for D in labels
        )
    else:
        results = (_certify_label(N, D, store, params) for D in labels)
    blocks = []
    for result in results:
        blocks.append(result)
        logger.info(
            "Block D=%d (dim %d): lambda_min = %s, op_norm_err <= %.3e, %s",
            result.D,
            result.dim,
            result.lambda_min,
            float(result.op_norm_err.upper()),
            result.verdict,
        )
        if progress is not None:
            progress(len(blocks), len(labels))
    certificate = Certificate(N, params, scheme_error(params), tuple(blocks))
    if not certificate.monotone:
        logger.warning(
            "Smallest eigenvalue is attained at D=%d rather than D=0", certificate.minimal_block
        )
    logger.info(
        "Certified %d blocks in %.1fs: %s", len(blocks), time.perf_counter() - start, certificate.verdict
    )
    return certificate
