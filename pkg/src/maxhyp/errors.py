"""Exception hierarchy shared by every maxhyp module."""


class MaxhypError(Exception):
    """Base class for all library errors."""


class SingularTensor(MaxhypError):
    pass


class NotPositiveDefinite(MaxhypError):
    pass


class NonpositiveVolume(MaxhypError):
    pass


class NonpositiveArgument(MaxhypError):
    pass


class NonpositiveRelaxationTime(MaxhypError):
    pass


class InadmissiblePerturbation(MaxhypError):
    """A finite-difference stencil left the admissible set even after shrinking."""


class InsufficientSamples(MaxhypError):
    pass


class AdmissibilityLoss(MaxhypError):
    """A time step produced a state with detF <= 0, non-SPD Y, or non-finite values."""

    def __init__(self, message, cell=None, time=None):
        super().__init__(message)
        self.cell = cell
        self.time = time


class ParseError(MaxhypError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(MaxhypError):
    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field
