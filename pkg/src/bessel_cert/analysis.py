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
Figure data and the power-law fit of the smallest eigenvalues.

Everything here works with block midpoints in double precision. These
are diagnostics; only the certificate is rigorous.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from bessel_cert.exceptions import DegenerateFit, MissingData
from bessel_cert.spectral.index_sets import Triple

if TYPE_CHECKING:
    from collections.abc import Mapping, Sequence
    from pathlib import Path

    from bessel_cert.spectral.blocks import BlockMatrix, LabelledMatrix

logger = logging.getLogger(__name__)

LOG_CLIP = -16.0
FIT_AMPLITUDE = 0.153
FIT_EXPONENT = -1.74
PEAK_COUNT = 40
PEAK_WIDTH = 2.0
ELLIPSE_POINTS = 360
DISC_EIGENVECTORS = 5
FIGURES = ("f1", "f2", "f3", "f4", "f5", "f6", "f7", "f8", "f9")


@dataclass(frozen=True, eq=False)
class FigureData:
    """
    One whitespace-separated data file.

    Attributes
    ----------
    name : str
        File name inside the output directory.
    columns : tuple[str, ...]
        Column names for the ``#`` header line.
    rows : numpy.ndarray
        Two-dimensional data, one row per line.
    formats : tuple[str, ...]
        printf-style format per column.
    """

    name: str
    columns: tuple[str, ...]
    rows: np.ndarray
    formats: tuple[str, ...]

    def write(self, out: Path) -> Path:
        """Write the file into ``out`` and return its path."""
        out.mkdir(parents=True, exist_ok=True)
        path = out / self.name
        rows = np.asarray(self.rows, dtype=float).reshape(-1, len(self.columns))
        np.savetxt(path, rows, fmt=list(self.formats), header=" ".join(self.columns), comments="# ")
        logger.info("Wrote %s (%d rows)", path, len(rows))
        return path


def _label_text(m: Sequence[int]) -> str:
    return "_".join(str(v) for v in m)


def log_magnitude(values: np.ndarray) -> np.ndarray:
    """``ln|x|`` clipped below at -16; zeros map to the clip value."""
    magnitude = np.abs(np.asarray(values, dtype=float))
    with np.errstate(divide="ignore"):
        logs = np.log(magnitude)
    return np.maximum(logs, LOG_CLIP)


def _oriented(vector: np.ndarray) -> np.ndarray:
    """Flip the sign so the component of largest magnitude is positive."""
    pivot = int(np.argmax(np.abs(vector)))
    return vector if vector[pivot] >= 0 else -vector


def _norms(labels: Sequence[Triple]) -> np.ndarray:
    return np.array([math.sqrt(m.norm2) for m in labels], dtype=float)


def min_eigenvalue_table(blocks: Sequence[BlockMatrix]) -> FigureData:
    """``(D, lambda_min)`` for every block."""
    rows = [(block.D, np.linalg.eigvalsh(block.midpoints())[0]) for block in blocks]
    return FigureData("f1_min_eigenvalues.dat", ("D", "lambda_min"), np.array(rows), ("%d", "%.12e"))


def min_eigenvalue_by_n(points: Sequence[tuple[int, float]]) -> FigureData:
    """``(N, lambda_min)`` of the ``D = 0`` block across band limits."""
    return FigureData(
        "f2_min_eigenvalue_by_n.dat", ("N", "lambda_min"), np.array(sorted(points)), ("%d", "%.12e")
    )


def spectrum(block: BlockMatrix) -> FigureData:
    """Sorted eigenvalues of one block, numbered from 1."""
    values = np.linalg.eigvalsh(block.midpoints())
    rows = np.column_stack([np.arange(1, len(values) + 1), values])
    return FigureData(f"f3_spectrum_D{block.D}.dat", ("index", "eigenvalue"), rows, ("%d", "%.12e"))


def column_heatmap(hexagon: LabelledMatrix, m: Sequence[int], prefix: str = "f4") -> FigureData:
    """``(n1, n2, ln|Q_{n,m}|)`` over the hexagon for the column ``m``."""
    column = hexagon.column(m)
    labels = np.array(hexagon.labels, dtype=float).reshape(-1, 3)
    rows = np.column_stack([labels[:, 0], labels[:, 1], log_magnitude(column)])
    return FigureData(
        f"{prefix}_column_{_label_text(m)}.dat", ("n1", "n2", "log_abs_entry"), rows, ("%d", "%d", "%.8f")
    )


def ellipse_points(m: Sequence[int], D: int, count: int = ELLIPSE_POINTS) -> np.ndarray:  # noqa: N803
    """
    Sample ``{n : n1 + n2 + n3 = D, |n|^2 = |m|^2}`` in ``(n1, n2)`` coordinates.

    Parameters
    ----------
    m : Sequence[int]
        Column label; its norm fixes the circle.
    D : int
        Plane of the block.
    count : int
        Number of equally spaced samples.

    Returns
    -------
    numpy.ndarray
        Array of shape ``(count, 2)``.

    Raises
    ------
    ValueError
        If the sphere does not meet the plane.
    """
    radius2 = sum(v * v for v in m) - D * D / 3
    if radius2 < 0:
        msg = f"|m|^2 = {sum(v * v for v in m)} is below D^2/3 = {D * D / 3}"
        raise ValueError(msg)
    center = np.full(3, D / 3)
    u = np.array([1.0, -1.0, 0.0]) / math.sqrt(2)
    v = np.array([1.0, 1.0, -2.0]) / math.sqrt(6)
    angles = 2 * math.pi * np.arange(count) / count
    points = center + math.sqrt(radius2) * (np.outer(np.cos(angles), u) + np.outer(np.sin(angles), v))
    return points[:, :2]


def ellipse_peak_fraction(
    column: Mapping[Triple, float],
    m: Sequence[int],
    count: int = PEAK_COUNT,
    width: float = PEAK_WIDTH,
) -> float:
    """
    Share of the largest off-diagonal entries lying near the ellipse of ``m``.

    Parameters
    ----------
    column : Mapping[Triple, float]
        Column of a hexagon matrix by row label.
    m : Sequence[int]
        Column label; its own row is skipped.
    count : int, default 40
        Number of entries of largest magnitude to inspect.
    width : float, default 2
        Allowed distance ``| |n| - |m| |``.

    Returns
    -------
    float
        Fraction in ``[0, 1]``.
    """
    target = Triple(*m)
    entries = sorted(
        ((abs(value), label) for label, value in column.items() if label != target),
        key=lambda item: (-item[0], item[1]),
    )[:count]
    if not entries:
        msg = f"Column {target} has no off-diagonal entries"
        raise MissingData(msg)
    radius = math.sqrt(target.norm2)
    near = sum(1 for _, label in entries if abs(math.sqrt(label.norm2) - radius) <= width)
    return near / len(entries)


def ellipse_table(m: Sequence[int], D: int, count: int = ELLIPSE_POINTS) -> FigureData:  # noqa: N803
    """Ellipse samples for the f5 overlay."""
    return FigureData(
        f"f5_ellipse_{_label_text(m)}.dat", ("n1", "n2"), ellipse_points(m, D, count), ("%.8f", "%.8f")
    )


def radial_profile(hexagon: LabelledMatrix, m: Sequence[int]) -> FigureData:
    """``(|n|, Q_{n,m})`` for the column ``m``, sorted by radius."""
    rows = np.column_stack([_norms(hexagon.labels), hexagon.column(m)])
    rows = rows[np.lexsort((rows[:, 1], rows[:, 0]))]
    return FigureData(f"f6_radial_{_label_text(m)}.dat", ("radius", "entry"), rows, ("%.8f", "%.12e"))


def eigenvector_heatmap(hexagon: LabelledMatrix, D: int) -> FigureData:  # noqa: N803
    """``(n1, n2, v_n)`` for the eigenvector of the smallest eigenvalue over the hexagon."""
    _, vectors = np.linalg.eigh(hexagon.values)
    vector = _oriented(vectors[:, 0])
    labels = np.array(hexagon.labels, dtype=float).reshape(-1, 3)
    rows = np.column_stack([labels[:, 0], labels[:, 1], vector])
    return FigureData(f"f7_eigenvector_D{D}.dat", ("n1", "n2", "entry"), rows, ("%d", "%d", "%.12e"))


def disc_eigenvectors(disc: LabelledMatrix, count: int = DISC_EIGENVECTORS) -> list[FigureData]:
    """``(|n|, v_n)`` for the eigenvectors of the smallest eigenvalues of the disc matrix."""
    if not disc.labels:
        msg = "The disc matrix is empty at this band limit"
        raise MissingData(msg)
    _, vectors = np.linalg.eigh(disc.values)
    norms = _norms(disc.labels)
    figures = []
    for i in range(min(count, len(disc.labels))):
        rows = np.column_stack([norms, _oriented(vectors[:, i])])
        rows = rows[np.lexsort((rows[:, 1], rows[:, 0]))]
        figures.append(
            FigureData(f"f8_disc_eigenvector_{i + 1}.dat", ("radius", "entry"), rows, ("%.8f", "%.12e"))
        )
    return figures


def disc_profile(disc: LabelledMatrix, N: int) -> FigureData:  # noqa: N803
    """``(|n| / (sqrt(3/2) N), v_n)`` for the lowest disc eigenvector."""
    if not disc.labels:
        msg = f"The disc matrix is empty at N={N}"
        raise MissingData(msg)
    _, vectors = np.linalg.eigh(disc.values)
    scaled = _norms(disc.labels) / (math.sqrt(1.5) * N)
    rows = np.column_stack([scaled, _oriented(vectors[:, 0])])
    rows = rows[np.lexsort((rows[:, 1], rows[:, 0]))]
    return FigureData(f"f9_disc_profile_N{N}.dat", ("scaled_radius", "entry"), rows, ("%.8f", "%.12e"))


def fit_power_law(data: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """
    Least-squares fit of ``lambda = a N^b`` on a log-log scale.

    Parameters
    ----------
    data : Sequence[tuple[float, float]]
        ``(N, lambda)`` pairs.

    Returns
    -------
    tuple[float, float]
        Amplitude ``a`` and exponent ``b``.

    Raises
    ------
    DegenerateFit
        With fewer than three points, fewer than two distinct ``N`` or a
        nonpositive value.

    Examples
    --------
    >>> fit_power_law([(n, 0.153 * n**-1.74) for n in (20, 40, 80)])  # doctest: +SKIP
    (0.153, -1.74)
    """
    points = np.asarray(data, dtype=float).reshape(-1, 2)
    if len(points) < 3:
        msg = f"A power-law fit needs at least three points, got {len(points)}"
        raise DegenerateFit(msg)
    if len({float(n) for n in points[:, 0]}) < 2:
        msg = "A power-law fit needs at least two distinct band limits"
        raise DegenerateFit(msg)
    if np.any(points <= 0):
        msg = "A power-law fit needs positive band limits and eigenvalues"
        raise DegenerateFit(msg)
    exponent, intercept = np.polyfit(np.log(points[:, 0]), np.log(points[:, 1]), 1)
    logger.info("Fitted lambda = %.4g N^%.4f to %d points", math.exp(intercept), exponent, len(points))
    return math.exp(intercept), float(exponent)
