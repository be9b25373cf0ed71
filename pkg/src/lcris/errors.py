"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Scenario configuration could not be parsed or validated."""


class GeometryError(ValueError):
    """Degenerate geometry (coincident points, zero-length boresight, ...)."""


class RegimeError(ValueError):
    """An operation was called outside the regime where it is exact."""


class InfeasibleDesignError(RuntimeError):
    """SNR targets unreachable even at the per-user co-phased optimum.

    Carries ``max_snr`` (per-user upper bounds, linear) and ``thresholds``.
    """

    def __init__(self, message, max_snr=None, thresholds=None):
        super().__init__(message)
        self.max_snr = max_snr
        self.thresholds = thresholds
