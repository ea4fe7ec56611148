"""Exception hierarchy shared by all modules."""


class SpectraError(Exception):
    """Base class for library errors."""


class ValidationError(SpectraError, ValueError):
    """Input data violates a structural invariant."""


class DegenerateRows(ValidationError):
    pass


class IrregularBC(SpectraError):
    pass


class UnsupportedForm(SpectraError):
    pass


class EndpointAtom(ValidationError):
    pass


class WrongCase(SpectraError):
    pass


class SingularAlpha(SpectraError):
    pass


class NumericalError(SpectraError):
    """A numerical procedure could not certify its result."""


class RootLoss(NumericalError):
    pass


class CircleTooClose(NumericalError):
    pass


class NearPole(NumericalError):
    pass


class NormalizationBreakdown(NumericalError):
    pass


class UnseparableSpectrum(NumericalError):
    pass


class ClusterMismatch(NumericalError):
    pass


class InsufficientTerms(NumericalError):
    pass
