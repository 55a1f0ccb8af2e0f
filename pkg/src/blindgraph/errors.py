"""Exception types raised by blindgraph."""


class BlindGraphError(Exception):
    pass


class DimensionMismatch(BlindGraphError, ValueError):
    pass


class NonDiagonalizable(BlindGraphError):
    """Eigenvector matrix too ill-conditioned to invert reliably."""


class EigenFailure(BlindGraphError):
    pass


class NotNormal(BlindGraphError):
    pass


class ZeroMatrix(BlindGraphError, ValueError):
    pass


class TooLarge(BlindGraphError, ValueError):
    pass


class DegenerateIterate(BlindGraphError):
    pass
