"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .report import Report


class AlgebroidKitError(Exception):
    """Base class for all errors raised by algebroidkit."""


class PolySyntaxError(AlgebroidKitError, ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownVariableError(PolySyntaxError):
    pass


class FieldMismatchError(AlgebroidKitError, ValueError):
    pass


class ChartMismatch(AlgebroidKitError, ValueError):
    pass


class BundleMismatch(AlgebroidKitError, ValueError):
    pass


class NonConstantDeterminant(AlgebroidKitError, ValueError):
    pass


class ZeroDeterminant(AlgebroidKitError, ValueError):
    pass


class DegenerateForm(AlgebroidKitError, ValueError):
    pass


class NotComposable(AlgebroidKitError, ValueError):
    pass


class NonAffineBaseMap(AlgebroidKitError, ValueError):
    pass


class NonInvertibleFiberData(AlgebroidKitError, ValueError):
    pass


class NotActionAlgebroid(AlgebroidKitError, ValueError):
    pass


class ProvenanceMismatch(AlgebroidKitError, ValueError):
    pass


class AnchorMismatch(AlgebroidKitError, ValueError):
    pass


class CheckFailed(AlgebroidKitError):
    """A verification failed; ``report`` carries the witness."""

    def __init__(self, report: Report, message: str | None = None):
        failure = report.first_failure()
        detail = message or (failure.describe() if failure else report.subject)
        super().__init__(detail)
        self.report = report


class NotFlat(CheckFailed):
    pass


class CurvatureMismatch(CheckFailed):
    pass


class MomentMapMismatch(CheckFailed):
    pass


class PoissonBracketMismatch(CheckFailed):
    pass


class RelatorFailure(CheckFailed):
    pass
