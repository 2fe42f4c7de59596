"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid grid, field or experiment parameters."""


class DealiasingError(ValueError):
    """Input bandwidth leaves no headroom for exact products on the grid."""


class DegenerateRatioError(ZeroDivisionError):
    """A ratio was requested whose denominator vanishes."""


class SingularityError(ValueError):
    """Kernel evaluated at (or a stencil touching) its singular point."""
