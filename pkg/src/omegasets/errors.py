"""Exception hierarchy shared by every module."""


class OmegaError(Exception):
    """Base class for all library errors."""


class OversizeRequest(OmegaError):
    pass


class AmbientViolation(OmegaError):
    pass


class LengthMismatch(OmegaError):
    pass


class UnsupportedPattern(OmegaError):
    pass


class DepthTooLarge(OmegaError):
    pass


class AlphabetMismatch(OmegaError):
    pass


class Reducible(OmegaError):
    pass


class WeightSum(OmegaError):
    pass


class UnsupportedSchedule(OmegaError):
    pass


class SyndeticCenterNonEmpty(OmegaError):
    pass


class Indeterminate(OmegaError):
    pass


class GenericityFailure(OmegaError):
    pass


class NotTransitive(OmegaError):
    pass


class ConfigViolatesGrowth(OmegaError):
    pass


class AmbientTooSmall(OmegaError):
    pass


class NotProperSubset(OmegaError):
    pass


class SlackTooTight(OmegaError):
    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class DepthCap(OmegaError):
    pass


class GrowthViolated(OmegaError):
    pass


class BoundaryValue(OmegaError):
    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class DegenerateObservable(OmegaError):
    pass


class NotAPseudoOrbit(OmegaError):
    pass


class PseudoOrbitTooLoose(OmegaError):
    pass


class PreconditionError(OmegaError, ValueError):
    """Raised for malformed inputs that no dedicated error covers."""
