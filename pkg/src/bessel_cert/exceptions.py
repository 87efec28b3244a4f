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

"""Exception hierarchy for bessel-cert."""


class BesselCertError(Exception):
    """Base class for every error raised by bessel-cert."""


class DivisionByEnclosedZero(BesselCertError, ZeroDivisionError):
    """Raised when a ball divisor contains zero."""


class DomainViolation(BesselCertError, ValueError):
    """Raised when a ball argument leaves the domain of a function."""


class PrecisionExhausted(BesselCertError, ArithmeticError):
    """Raised when an enclosure cannot reach the requested radius."""


class NonConvergence(BesselCertError, ArithmeticError):
    """Raised when an integration-by-parts majorant cannot be certified."""


class RootIsolationFailure(BesselCertError, ArithmeticError):
    """Raised when Legendre roots cannot be bracketed disjointly."""


class EigensolveFailure(BesselCertError, ArithmeticError):
    """Raised when a minimal eigenvalue enclosure cannot be certified."""


class ZeroDiagonal(BesselCertError, ArithmeticError):
    """Raised when a diagonal entry enclosure contains zero."""


class AsymmetricBlock(BesselCertError, ArithmeticError):
    """Raised when mirrored block entries disagree beyond their error budget."""


class ValidityViolation(BesselCertError, ValueError):
    """Raised when an error-bound formula is used outside its hypotheses."""


class InvalidSchemeParams(BesselCertError, ValueError):
    """Raised for inconsistent or inadmissible scheme parameters."""


class InvalidBandLimit(InvalidSchemeParams):
    """Raised when the band limit N is not admissible for the mode."""


class OddSumKey(BesselCertError, ValueError):
    """Raised for order tuples whose component sum is odd."""


class DegenerateFit(BesselCertError, ValueError):
    """Raised when a power-law fit is underdetermined."""


class CacheCorruption(BesselCertError, ValueError):
    """Raised when a cache file cannot be trusted."""


class MissingKey(BesselCertError, LookupError):
    """Raised when an integral is absent from the store."""


class MissingData(BesselCertError, LookupError):
    """Raised when figure data needs blocks that were not computed."""
