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

"""Quadrature scheme section for bessel-cert."""

import logging
from typing import Any

import click

from bessel_cert.client.pipeline import PipelineClient
from bessel_cert.engine.params import evaluation_counts, scheme_error
from bessel_cert.exceptions import BesselCertError
from bessel_cert.sections.options import finish, make_client, run_options, split_options

logger = logging.getLogger(__name__)


class SchemeSection:
    """Commands that show the quadrature scheme of a run."""

    def __init__(self, cli: click.Group):
        """
        Initialize the Scheme section.

        Parameters
        ----------
        cli : click.Group
            The command group to register commands with
        """
        self.cli = cli
        self._register_commands()

    def _register_commands(self) -> None:
        """Register the rule and params commands."""

        @self.cli.command("rule")
        @run_options
        @split_options
        @click.option("--digits", type=click.IntRange(min=1), default=40, show_default=True)
        def rule_command(options: dict[str, Any], digits: int) -> None:
            """Print the certified Gauss-Legendre nodes and weights."""
            result = self.rule(make_client(options), digits)
            finish(result)
            for line in result["lines"]:
                click.echo(line)

        @self.cli.command("params")
        @run_options
        @split_options
        def params_command(options: dict[str, Any]) -> None:
            """Print the resolved scheme and its error bound."""
            result = self.params(make_client(options))
            finish(result)
            for name, value in result["params"].items():
                click.echo(f"{name} = {value}")

    def rule(self, client: PipelineClient, digits: int = 40) -> dict[str, Any]:
        """
        Get the node and weight lines of the scheme's rule.

        Parameters
        ----------
        client : PipelineClient
            The run whose rule is printed.
        digits : int, default 40
            Significant digits per value.

        Returns
        -------
        dict[str, Any]
            The ``node weight`` lines.
        """
        try:
            rule = client.get_rule()
            result = {"success": True, "n": rule.n, "lines": rule.to_lines(digits)}
        except BesselCertError as e:
            logger.exception("Error building the Gauss-Legendre rule")
            return {"success": False, "error": f"Error building the Gauss-Legendre rule: {e}"}
        else:
            return result

    def params(self, client: PipelineClient) -> dict[str, Any]:
        """
        Describe the scheme of a run.

        Parameters
        ----------
        client : PipelineClient
            The run to describe.

        Returns
        -------
        dict[str, Any]
            Scheme values, the uniform error bound and evaluation counts.
        """
        try:
            params = client.get_params()
            near, far = evaluation_counts(params)
            values: dict[str, Any] = params.describe()
            values["max_order"] = params.max_order
            values["scheme_error"] = scheme_error(params).to_decimal()
            values["evaluations_0S"] = near
            values["evaluations_ST"] = far
            result = {"success": True, "params": values}
        except BesselCertError as e:
            logger.exception("Error evaluating the scheme error bound")
            return {"success": False, "error": f"Error evaluating the scheme error bound: {e}"}
        else:
            return result
