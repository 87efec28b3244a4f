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

"""Certification section for bessel-cert."""

import logging
import sys
from typing import Any

import click

from bessel_cert.client.pipeline import PipelineClient
from bessel_cert.exceptions import BesselCertError
from bessel_cert.sections.options import finish, make_client, run_options, split_options

logger = logging.getLogger(__name__)


class CertifySection:
    """Certification and integral commands."""

    def __init__(self, cli: click.Group):
        """
        Initialize the Certify section.

        Parameters
        ----------
        cli : click.Group
            The command group to register commands with
        """
        self.cli = cli
        self._register_commands()

    def _register_commands(self) -> None:
        """Register the certify and integrals commands."""

        @self.cli.command("certify")
        @run_options
        @split_options
        def certify_command(options: dict[str, Any]) -> None:
            """Certify positive definiteness of every block at band limit N."""
            result = self.certify(make_client(options))
            finish(result)
            click.echo(result["report_text"], nl=False)
            if result["verdict"] != "pass":
                sys.exit(1)

        @self.cli.command("integrals")
        @run_options
        @split_options
        @click.option("--list", "show", is_flag=True, help="Print every record")
        def integrals_command(options: dict[str, Any], show: bool) -> None:
            """Compute or load every integral the blocks need."""
            result = self.integrals(make_client(options), show)
            finish(result)
            for line in result.get("records", []):
                click.echo(line)
            click.echo(f"{result['count']} integrals for scheme {result['scheme_hash']}")

    def certify(self, client: PipelineClient) -> dict[str, Any]:
        """
        Run the pipeline and write the certificate.

        Parameters
        ----------
        client : PipelineClient
            The run to certify.

        Returns
        -------
        dict[str, Any]
            Verdict, block count, written files and the report text.
        """
        try:
            certificate = client.get_certificate()
            report, table = certificate.write(client.config.out)
            result = {
                "success": True,
                "verdict": certificate.verdict,
                "blocks": len(certificate.blocks),
                "minimal_block": certificate.minimal_block,
                "report": str(report),
                "table": str(table),
                "report_text": certificate.report(),
            }
        except (BesselCertError, OSError) as e:
            logger.exception("Error certifying N=%d", client.config.n)
            return {"success": False, "error": f"Error certifying: {e}"}
        else:
            return result

    def integrals(self, client: PipelineClient, show: bool = False) -> dict[str, Any]:
        """
        Fill the integral cache.

        Parameters
        ----------
        client : PipelineClient
            The run whose integrals are needed.
        show : bool, default False
            Include the serialized records.

        Returns
        -------
        dict[str, Any]
            Record count, scheme hash and optionally the records.
        """
        try:
            store = client.get_store()
            result: dict[str, Any] = {
                "success": True,
                "count": len(store),
                "scheme_hash": store.scheme_hash,
            }
            if show:
                result["records"] = list(store.to_lines())
        except (BesselCertError, OSError) as e:
            logger.exception("Error computing integrals")
            return {"success": False, "error": f"Error computing integrals: {e}"}
        else:
            return result
