"""Exception hierarchy shared by the library and the command line."""


class QchipError(Exception):
    """Base class for every error raised by qchip."""

    exit_code = 2


class UsageError(QchipError):
    """Bad command-line input or configuration."""

    exit_code = 1


class ValidationFailure(QchipError):
    """A precondition of an operation does not hold."""


class NotNormalized(ValidationFailure):
    exit_code = 1


class OutOfRange(ValidationFailure):
    exit_code = 1


class NonHermitian(ValidationFailure):
    pass


class TraceNotOne(ValidationFailure):
    pass


class SingularBasis(ValidationFailure):
    pass


class OutsideSupport(ValidationFailure):
    pass


class DegenerateMarginal(ValidationFailure):
    pass


class SingularParameter(ValidationFailure):
    pass


class Unphysical(ValidationFailure):
    pass


class NumericalFailure(QchipError):
    """A computation ran but did not meet its tolerance."""


class IntegrationFailure(NumericalFailure):
    pass


class CheckFailure(NumericalFailure):
    def __init__(self, suite: str, check: str, message: str):
        super().__init__(f"[{suite}] {check}: {message}")
        self.suite = suite
        self.check = check
        self.detail = message

    def to_dict(self):
        return {"suite": self.suite, "check": self.check, "message": self.detail}


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, QchipError):
        return exc.exit_code
    return 2
