"""Exception types raised across the package."""


class ForceTrackError(Exception):
    """Base class for all errors raised by forcetrack."""


class DimensionError(ForceTrackError, ValueError):
    pass


class RankError(ForceTrackError, ValueError):
    pass


class DefinitenessError(ForceTrackError, ValueError):
    pass


class InfeasibleError(RankError):
    """Unbiased input estimation is impossible because H @ B lacks full column rank."""


class ModelError(ForceTrackError, ValueError):
    """A model failed validation; ``violations`` lists every broken invariant."""

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class SequencingError(ForceTrackError, ValueError):
    pass


class ExhaustedError(ForceTrackError, IndexError):
    """A file-backed force signal ran out of samples."""


class ConfigError(ForceTrackError, ValueError):
    pass
