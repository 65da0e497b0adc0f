"""Exception hierarchy.

NumericalFailure subclasses are the ones the CLI maps to exit code 2.
"""


class TanPlaneError(Exception):
    pass


class NumericalFailure(TanPlaneError):
    pass


class PoleProximity(NumericalFailure):
    pass


class BranchPointHit(NumericalFailure):
    pass


class RefinementDiverged(NumericalFailure):
    pass


class NotMinimalPeriod(NumericalFailure):
    def __init__(self, period, divisor):
        super().__init__(f"period {period} reduces to {divisor}")
        self.period = period
        self.divisor = divisor


class ZeroInCycle(TanPlaneError):
    pass


class SineVanishes(TanPlaneError):
    pass


class TangentVanishes(TanPlaneError):
    pass


class DomainError(TanPlaneError):
    pass


class Diverged(NumericalFailure):
    pass


class HitSingularity(NumericalFailure):
    pass


class WrongBasin(NumericalFailure):
    pass


class BracketFailed(NumericalFailure):
    pass


class ContinuationStalled(NumericalFailure):
    pass


class LostCycle(NumericalFailure):
    pass
