"""Exception types raised across the package."""


class OvprobeError(Exception):
    """Base class for every error raised by ovprobe."""


class MissingFile(OvprobeError, FileNotFoundError):
    pass


class BadMagic(OvprobeError, ValueError):
    pass


class DimensionMismatch(OvprobeError, ValueError):
    pass


class DanglingReference(OvprobeError, ValueError):
    pass


class InvalidDataset(OvprobeError, ValueError):
    """A dataset invariant (disjoint class sets, value ranges) is violated."""


class InvalidConfig(OvprobeError, ValueError):
    pass


class IoFailure(OvprobeError, OSError):
    pass


class EmptySampleSet(OvprobeError, ValueError):
    pass


class UnknownClassInTargets(OvprobeError, ValueError):
    pass


class OverlappingClassIds(OvprobeError, ValueError):
    pass


class EmptyPseudoLabelSet(OvprobeError, ValueError):
    pass


class ParseError(OvprobeError, ValueError):
    pass


class RangeError(OvprobeError, ValueError):
    """A config value is outside its allowed range; ``field`` names it."""

    def __init__(self, field, message=None):
        self.field = field
        super().__init__(message or field)
