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

"""Index sets, block assembly and the eigenvalue certificate."""

from bessel_cert.spectral.blocks import (
    BlockMatrix,
    LabelledMatrix,
    assemble_block,
    diag_ratio,
    disc_block,
    hexagon_block,
)
from bessel_cert.spectral.certificate import BlockCertificate, Certificate, certify
from bessel_cert.spectral.eigen import min_eig
from bessel_cert.spectral.index_sets import (
    Triple,
    enumerate_X_D,
    multiplicity,
    required_keys,
)

__all__ = [
    "BlockCertificate",
    "BlockMatrix",
    "Certificate",
    "LabelledMatrix",
    "Triple",
    "assemble_block",
    "certify",
    "diag_ratio",
    "disc_block",
    "enumerate_X_D",
    "hexagon_block",
    "min_eig",
    "multiplicity",
    "required_keys",
]
