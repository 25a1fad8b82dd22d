"""Exception types shared across the package."""


class HalfsphereError(Exception):
    """Base class for all package-specific errors."""


class UnsupportedDimension(HalfsphereError):
    """Dimension outside the supported range, or no closed form available."""


class NearHorizon(HalfsphereError):
    """Point too close to the horizon of the projection chart."""


class TooFewPoints(HalfsphereError):
    """Fewer points than needed for a full-dimensional hull."""


class DegenerateHull(HalfsphereError):
    """Input points do not span a pointed, full-dimensional cone."""


class IterationLimit(HalfsphereError):
    """Active-set projection exceeded its iteration budget."""


class NonConvergence(HalfsphereError):
    """Quadrature failed to reach the requested tolerance."""
