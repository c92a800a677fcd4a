"""
Exact Gaussian dilation of the amplitude-damping channel and the
Wigner-entropic decomposition of its entropy production.
"""

import cmath
import logging

_logging_level = logging.INFO

__version__ = "0.1.0"

class WigDilWarning(Warning):
    """
    wigdil warning.

    wigdil should use this warning (or subclasses of it), making it easy to
    silence all its warnings should you wish to.

    >>> import warnings
    >>> from wigdil import WigDilWarning
    >>> warnings.simplefilter('ignore', WigDilWarning)
    """

def _warning(message, category, filename, lineno, file=None, line=None):
    import sys
    print(f"{filename}:{lineno}: {category.__name__}: {message}", file = sys.stderr)

class WigDilError(Exception):
    """
    wigdil exception.

    wigdil raises this exception (or subclasses of it) for every failure it
    can explain, so that the CLI can print a message instead of a traceback.
    (i.e. Traceback is reserved for errors of unknown origin.)
    """
    exit_code = 1
    def __init__(self, message):
        super().__init__(message)
        self.message = message
        self.prefix = type(self).__name__
    def __repr__(self):
        return self.message
    def print_message(self):
        import sys
        print(f"{self.prefix}: {self.message}", file = sys.stderr)
        return

##############
##  CONFIG  ##
##############

class ConfigError(WigDilError):
    exit_code = 2

class ParseError(ConfigError):
    def __init__(self, message, line = None, field = None):
        self.line = line
        self.field = field
        where = ', '.join(x for x in [None if line is None else f"line {line}",
                                      None if field is None else f"field '{field}'"] if x)
        super().__init__(message + ('' if not where else f" ({where})"))

class UnknownBathType(ConfigError):
    def __init__(self, bath_type, line = None):
        self.bath_type = bath_type
        self.line = line
        super().__init__( f"Unknown bath type '{bath_type}'. Valid types: tim, discrete, spectral." +
                          ('' if line is None else f" (line {line})") )

class InvalidPath(ConfigError):
    def __init__(self, path):
        super().__init__( f"{path} is not a valid path." )

###############
##  PHYSICS  ##
###############

class PhysicsError(WigDilError):
    exit_code = 3

class UnphysicalInit(PhysicsError):
    def __init__(self, N, M):
        bound = N * (N + 1)
        if not (cmath.isfinite(bound) and cmath.isfinite(M)):
            super().__init__( f"Initial moments must be finite (N = {N}, M = {M})." )
        else:
            super().__init__( f"|M|^2 = {abs(M) * abs(M):.6g} exceeds N(N+1) = {bound:.6g}." )

class NonPositiveDeterminant(PhysicsError):
    def __init__(self, what = "covariance"):
        super().__init__( f"The {what} is not positive definite." )

class DimensionMismatch(PhysicsError):
    def __init__(self, n1, n2):
        super().__init__( f"States have different numbers of modes ({n1} vs {n2})." )

class SingularReference(PhysicsError):
    def __init__(self):
        super().__init__( "Reference covariance is singular." )

class BadPartition(PhysicsError):
    def __init__(self, split, n_modes):
        super().__init__( f"{split} does not partition modes 0..{n_modes - 1}." )

class BadIndex(PhysicsError):
    def __init__(self, modes, n_modes):
        super().__init__( f"Mode indices {modes} out of range for {n_modes} mode(s)." )

class EmptyBand(PhysicsError):
    def __init__(self, band, K):
        super().__init__( f"Band {band} with K = {K} contains no modes." )

class ToleranceFailure(PhysicsError):
    def __init__(self, message):
        super().__init__( f"Integrator failed to meet tolerances: {message}" )

class VanishingG(PhysicsError):
    def __init__(self, t):
        super().__init__( f"|g| vanishes at t = {t:.6g}; Gamma is undefined." )

class VanishingGamma(PhysicsError):
    def __init__(self, t):
        super().__init__( f"Gamma vanishes at t = {t:.6g}; current integral is singular." )

class VanishingGdot(PhysicsError):
    def __init__(self, t):
        super().__init__( f"dg/dt vanishes at t = {t:.6g}; per-mode currents are undefined." )

class SingularTransfer(PhysicsError):
    def __init__(self, t):
        super().__init__( f"df_k/dt is singular at t = {t:.6g}." )

class InsufficientData(PhysicsError):
    def __init__(self, n, required = 3):
        super().__init__( f"{n} record point(s) supplied; at least {required} required." )

##################
##  INVARIANTS  ##
##################

class InvariantViolation(WigDilError):
    exit_code = 4
    def __init__(self, name, deviation, tolerance):
        self.name = name
        self.deviation = deviation
        self.tolerance = tolerance
        super().__init__( f"{name}: deviation {deviation:.3e} exceeds tolerance {tolerance:.1e}." )
