"""Exception hierarchy shared by every module."""


class HamDecompError(Exception):
    """Base class for all library errors."""


class InputError(HamDecompError, ValueError):
    """Raised for malformed or out-of-contract input."""


class SelfLoop(InputError):
    pass


class DuplicateOrAntiparallelEdge(InputError):
    pass


class VertexOutOfRange(InputError):
    pass


class EvenOrder(InputError):
    pass


class InvalidConnectionSet(InputError):
    pass


class InfeasibleDegreeWindow(HamDecompError):
    pass


class NotRegular(InputError):
    pass


class NoPerfectMatching(HamDecompError):
    pass


class ResampleBudgetExhausted(HamDecompError):
    pass


class PrescriptionUnbalanced(InputError):
    pass


class PairInfeasible(HamDecompError):
    def __init__(self, message, cut=None):
        super().__init__(message)
        self.cut = cut


class UnbalancedRedEdges(InputError):
    pass


class HypothesisViolated(HamDecompError):
    pass


class NoClosingEdge(HamDecompError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness or {}


class ReserveDepleted(HamDecompError):
    pass


class BudgetExceeded(HamDecompError):
    pass


class MergeStuck(HamDecompError):
    """No linking or closing move exists for the current factor and reserve."""


class TooLargeForExhaustive(InputError):
    pass


class TooManyBadVertices(HamDecompError):
    pass


class RetryBudgetExhausted(HamDecompError):
    pass


class UnequalClusters(InputError):
    pass


class DegreeHypothesisViolated(HamDecompError):
    pass


class ReservoirSelectionFailed(HamDecompError):
    pass


class PatchingFailed(HamDecompError):
    def __init__(self, message, path=None, candidates=None):
        super().__init__(message)
        self.path = path
        self.candidates = candidates


class ConnectingEdgeNotFound(HamDecompError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DegreeWindowUnreachable(HamDecompError):
    pass


class TooLarge(InputError):
    pass


class Unsupported(InputError):
    pass
