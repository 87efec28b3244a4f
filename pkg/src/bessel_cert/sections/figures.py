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

"""Figure data and fit section for bessel-cert."""

import logging
from pathlib import Path
from typing import Any

import click
import numpy as np

from bessel_cert import analysis
from bessel_cert.client.pipeline import PipelineClient
from bessel_cert.exceptions import BesselCertError
from bessel_cert.sections.options import finish, make_client, run_options, split_options
from bessel_cert.spectral.index_sets import block_labels

logger = logging.getLogger(__name__)

DEFAULT_COLUMN = (-2, 0, 2)


def parse_triple(text: str) -> tuple[int, int, int]:
    """Parse ``m1,m2,m3``."""
    parts = text.replace(" ", "").split(",")
    if len(parts) != 3:
        msg = f"Expected three comma-separated integers, got {text!r}"
        raise click.BadParameter(msg)
    try:
        return int(parts[0]), int(parts[1]), int(parts[2])
    except ValueError as e:
        msg = f"Expected integers in {text!r}"
        raise click.BadParameter(msg) from e


def parse_band_limits(text: str | None) -> list[int]:
    """Parse ``20,30,40`` into a sorted list without duplicates."""
    if not text:
        return []
    try:
        return sorted({int(part) for part in text.split(",") if part.strip()})
    except ValueError as e:
        msg = f"Expected comma-separated integers, got {text!r}"
        raise click.BadParameter(msg) from e


class FiguresSection:
    """Figure data and power-law fit commands."""

    def __init__(self, cli: click.Group):
        """
        Initialize the Figures section.

        Parameters
        ----------
        cli : click.Group
            The command group to register commands with
        """
        self.cli = cli
        self._register_commands()

    def _register_commands(self) -> None:
        """Register the figures and fit commands."""

        @self.cli.command("figures")
        @run_options
        @split_options
        @click.argument("which", nargs=-1, type=click.Choice(analysis.FIGURES))
        @click.option("--block", "block", type=int, default=0, show_default=True, help="Block D for f3 and f7")
        @click.option("--column", default="-2,0,2", show_default=True, help="Column label m1,m2,m3 for f4 to f6")
        @click.option("--n-list", help="Band limits for f2 and f9, e.g. 20,30,40")
        def figures_command(
            options: dict[str, Any], which: tuple[str, ...], block: int, column: str, n_list: str | None
        ) -> None:
            """Write figure data files (all figures when none are named)."""
            result = self.figures(
                make_client(options),
                which or analysis.FIGURES,
                block,
                parse_triple(column),
                parse_band_limits(n_list),
            )
            finish(result)
            for path in result["files"]:
                click.echo(path)

        @self.cli.command("fit")
        @click.argument("data", type=click.Path(exists=True, dir_okay=False, path_type=Path))
        def fit_command(data: Path) -> None:
            """Fit lambda = a N^b to (N, lambda) rows of DATA."""
            result = self.fit(data)
            finish(result)
            click.echo(f"{result['amplitude']:.6g} {result['exponent']:.6g}")

    def figures(
        self,
        client: PipelineClient,
        which: tuple[str, ...],
        block: int = 0,
        column: tuple[int, int, int] = DEFAULT_COLUMN,
        band_limits: list[int] | None = None,
    ) -> dict[str, Any]:
        """
        Write the requested figure data.

        Parameters
        ----------
        client : PipelineClient
            The run at the main band limit.
        which : tuple[str, ...]
            Figure ids among ``f1`` to ``f9``.
        block : int, default 0
            Block for the spectrum and eigenvector figures.
        column : tuple[int, int, int], default (-2, 0, 2)
            Column label for the heatmap and radial figures; it selects the
            block ``D = m1 + m2 + m3``.
        band_limits : list[int], optional
            Band limits for the figures across ``N``; defaults to the
            client's own.

        Returns
        -------
        dict[str, Any]
            Paths of the written files.
        """
        out = client.config.out
        band_limits = band_limits or [client.config.n]
        figures: list[analysis.FigureData] = []
        try:
            if "f1" in which:
                params = client.get_params()
                figures.append(analysis.min_eigenvalue_table([client.get_block(D) for D in block_labels(params.N)]))
            if "f2" in which:
                points = []
                for n in band_limits:
                    matrix = client.for_band_limit(n).get_block(0).midpoints()
                    points.append((n, float(np.linalg.eigvalsh(matrix)[0])))
                figures.append(analysis.min_eigenvalue_by_n(points))
            if "f3" in which:
                figures.append(analysis.spectrum(client.get_block(block)))
            if {"f4", "f5", "f6"} & set(which):
                hexagon = client.get_hexagon(sum(column))
                if "f4" in which:
                    figures.append(analysis.column_heatmap(hexagon, column))
                if "f5" in which:
                    figures.append(analysis.column_heatmap(hexagon, column, prefix="f5"))
                    figures.append(analysis.ellipse_table(column, sum(column)))
                    values = dict(zip(hexagon.labels, hexagon.column(column), strict=True))
                    fraction = analysis.ellipse_peak_fraction(values, column)
                    logger.info(
                        "%.0f%% of the largest entries of column %s lie near its ellipse", 100 * fraction, column
                    )
                if "f6" in which:
                    figures.append(analysis.radial_profile(hexagon, column))
            if "f7" in which:
                figures.append(analysis.eigenvector_heatmap(client.get_hexagon(block), block))
            if "f8" in which:
                figures.extend(analysis.disc_eigenvectors(client.get_disc()))
            if "f9" in which:
                figures.extend(
                    analysis.disc_profile(client.for_band_limit(n).get_disc(), n) for n in band_limits
                )
            paths = [figure.write(out) for figure in figures]
            result = {"success": True, "files": [str(path) for path in paths]}
        except (BesselCertError, OSError, ValueError) as e:
            logger.exception("Error writing figure data")
            return {"success": False, "error": f"Error writing figure data: {e}"}
        else:
            return result

    def fit(self, data: Path) -> dict[str, Any]:
        """
        Fit a power law to ``(N, lambda)`` rows.

        Parameters
        ----------
        data : Path
            Whitespace-separated file; lines starting with ``#`` are skipped.

        Returns
        -------
        dict[str, Any]
            Amplitude and exponent.
        """
        try:
            rows = np.loadtxt(data, comments="#", ndmin=2)
            amplitude, exponent = analysis.fit_power_law(rows[:, :2])
            result = {"success": True, "amplitude": amplitude, "exponent": exponent, "points": len(rows)}
        except (BesselCertError, OSError, ValueError, IndexError) as e:
            logger.exception("Error fitting %s", data)
            return {"success": False, "error": f"Error fitting {data}: {e}"}
        else:
            return result


__all__ = ["FiguresSection", "parse_band_limits", "parse_triple"]
