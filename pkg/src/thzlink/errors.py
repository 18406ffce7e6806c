"""Exception types shared across the package."""


class ThzLinkError(Exception):
    """Base class for all package-specific errors."""


class LineListError(ThzLinkError):
    """Malformed line-list input; carries the offending line number and field."""

    def __init__(self, message, line_number=None, field=None):
        self.line_number = line_number
        self.field = field
        prefix = ""
        if line_number is not None:
            prefix += f"line {line_number}"
        if field is not None:
            prefix += f", field '{field}'" if prefix else f"field '{field}'"
        super().__init__(f"{prefix}: {message}" if prefix else message)


class OutOfBandError(ThzLinkError):
    """Frequency outside the validity band of an approximate model."""


class GeometryError(ThzLinkError):
    """Invalid array geometry or indexing."""


class ChannelError(ThzLinkError):
    """Channel synthesis failure (overlapping arrays, dimension mismatch...)."""


class RankDeficiencyError(ThzLinkError):
    """Channel matrix is rank deficient for the requested stream count."""

    def __init__(self, smallest_singular_value):
        self.smallest_singular_value = smallest_singular_value
        super().__init__(
            "channel is rank deficient for the selected streams "
            f"(smallest singular value {smallest_singular_value:.3e})"
        )


class IllConditionedPlanError(ThzLinkError):
    """Sensing frequency plan yields singular normal equations."""


class ConfigError(ThzLinkError):
    """Scenario configuration violation; carries the config key path."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class GratingLobeWarning(UserWarning):
    """Antenna-element spacing exceeds half a wavelength."""
