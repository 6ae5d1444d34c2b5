"""Exception types shared across the library."""


class TubeletError(Exception):
    """Base class for all library errors."""


class DescriptorMismatch(TubeletError):
    """Operands live in different Jordan algebras."""


class SingularElement(TubeletError):
    """Jordan inverse requested for a (numerically) singular element."""


class LeftTube(TubeletError):
    """A conformal word pushed an intermediate point out of the tube."""


class LeftDomain(TubeletError):
    """A Moebius word pushed a point out of the upper half-plane."""


class PathLeftDomain(TubeletError):
    """Branch continuation path hit a zero of the tracked function."""


class StripViolation(TubeletError):
    """Strip-map argument outside 0 <= Im z <= pi."""


class FactorizationFailed(TubeletError):
    """Semigroup element could not be factored in polar form."""


class NotStandard(TubeletError):
    """A (Delta, J) pair did not produce a standard subspace."""


class EmptyRegion(TubeletError):
    """Smearing region carries no test functions."""


class ContinuationUnavailable(TubeletError):
    """Model cannot continue the modular orbit of the given vector."""


class GridCoverage(TubeletError):
    """Dilated grid function leaks significant mass outside the grid."""


class GridUnderflow(TubeletError):
    """Oscillatory factor underflows across the whole quadrature grid."""


class SupportOverflow(TubeletError):
    """Convolution support exits the modeled coordinate window."""


class FrameMismatch(TubeletError):
    """Coefficient vectors belong to different kernel frames."""


class FrameInsufficiency(TubeletError):
    """Kernel frame cannot represent a vector to the requested residual."""


class QuadratureNotConverged(TubeletError):
    """Refinement ladder exhausted without meeting the tolerance."""


class HypothesisViolated(TubeletError):
    """Preconditions of an inclusion test failed numerically."""


class DuplicatePointsWarning(UserWarning):
    """Gram point set contains (numerically) duplicate points."""


class ConfigError(TubeletError):
    """Invalid suite configuration."""
