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

"""Options shared by every pipeline command."""

from __future__ import annotations

import functools
import logging
import sys
from pathlib import Path
from typing import TYPE_CHECKING, Any

import click

from bessel_cert.arith.ball import DEFAULT_BITS, MIN_BITS
from bessel_cert.client.pipeline import DEFAULT_OUT, PipelineClient, RunConfig
from bessel_cert.engine.params import DEFAULT_NODES
from bessel_cert.exceptions import InvalidSchemeParams

if TYPE_CHECKING:
    from collections.abc import Callable

logger = logging.getLogger(__name__)


def run_options(func: Callable[..., Any]) -> Callable[..., Any]:
    """Attach the band-limit, scheme and output options to a command."""
    options = [
        click.option("--n", "n", type=int, default=20, show_default=True, help="Band limit N (even)"),
        click.option(
            "--mode",
            type=click.Choice(["certify", "explore"]),
            default="certify",
            show_default=True,
            help="certify validates every error bound; explore also accepts small N",
        ),
        click.option(
            "--cache",
            type=click.Path(dir_okay=False, path_type=Path),
            envvar="BESSEL_CERT_CACHE",
            help="Integral cache file; the Bessel table is cached next to it",
        ),
        click.option(
            "--workers",
            type=click.IntRange(min=1),
            envvar="BESSEL_CERT_WORKERS",
            default=1,
            show_default=True,
            help="Worker processes",
        ),
        click.option(
            "--prec",
            type=click.IntRange(min=MIN_BITS),
            default=DEFAULT_BITS,
            show_default=True,
            help="Working precision in bits",
        ),
        click.option(
            "--out",
            type=click.Path(file_okay=False, path_type=Path),
            default=DEFAULT_OUT,
            show_default=True,
            help="Output directory",
        ),
        click.option("--d0", help="Half-width of the panels on [0, S], e.g. 1/4"),
        click.option("--d1", help="Half-width of the panels on [S, T], e.g. 4/5"),
        click.option("--s", "s", help="First cutoff S"),
        click.option("--t", "t", help="Second cutoff T"),
        click.option(
            "--nodes", type=int, default=DEFAULT_NODES, show_default=True, help="Gauss-Legendre points per panel"
        ),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def echo_progress(label: str, done: int, total: int) -> None:
    """Write ``label: done / total`` to standard error."""
    click.echo(f"{label}: {done} / {total}", err=True)


def make_client(options: dict[str, Any]) -> PipelineClient:
    """
    Build the client for the parsed options and resolve its scheme.

    Raises
    ------
    click.UsageError
        If the band limit or an override is not admissible.
    """
    config = RunConfig(**options)
    client = PipelineClient(config, progress=echo_progress)
    try:
        client.get_params()
    except InvalidSchemeParams as e:
        raise click.UsageError(str(e)) from e
    return client


def finish(result: dict[str, Any]) -> None:
    """Exit with status 1 and the error message when ``result`` failed."""
    if not result["success"]:
        click.echo(result["error"], err=True)
        sys.exit(1)


def split_options(func: Callable[..., Any]) -> Callable[..., Any]:
    """Pass the run options as one ``options`` dict and the rest as keywords."""
    names = {"n", "mode", "cache", "workers", "prec", "out", "d0", "d1", "s", "t", "nodes"}

    @functools.wraps(func)
    def wrapper(**kwargs: Any) -> Any:
        options = {name: kwargs.pop(name) for name in names}
        return func(options, **kwargs)

    return wrapper
