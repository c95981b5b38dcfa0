"""Exception taxonomy shared across the package."""


class FaarError(Exception):
    """Base class for all package errors."""


class ShapeMismatch(FaarError):
    pass


class NonFinite(FaarError):
    pass


class EmptyInput(FaarError):
    pass


class BandOutOfRange(FaarError):
    pass


class TooShort(FaarError):
    pass


class ZeroVariance(FaarError):
    pass


class WindowTooShort(FaarError):
    pass


class TooFewWindows(FaarError):
    pass


class ReferenceUnavailable(FaarError):
    pass


class ModelMismatch(FaarError):
    pass


class TooFewPoints(FaarError):
    pass


class NotSorted(FaarError):
    pass


class TooFewEpochs(FaarError):
    pass


class DegenerateFeatures(FaarError):
    pass


class NotSpd(FaarError):
    pass


class SingleClass(FaarError):
    pass


class InsufficientFolds(FaarError):
    pass


class SubjectMismatch(FaarError):
    pass


class TooFewSubjects(FaarError):
    pass


class BadConfig(FaarError):
    pass


class LabelOutOfRange(FaarError):
    pass


class BadMagic(FaarError):
    pass


class BadVersion(FaarError):
    pass


class HeaderMismatch(FaarError):
    pass


class TruncatedPayload(FaarError):
    pass
