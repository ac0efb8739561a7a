"""Exception hierarchy shared by all shadowlab modules."""


class ShadowlabError(Exception):
    """Base class for every error raised by shadowlab."""


class DimensionError(ShadowlabError, ValueError):
    """Wrong shape, order mismatch or zero dimension."""


class DomainError(ShadowlabError, ValueError):
    """Input outside the mathematical domain (e.g. non-Hermitian H)."""


class DegenerateProjectionError(DomainError):
    """The matrix is a multiple of the identity, so the projection is constant."""


class FrameError(DomainError):
    """A pair of matrices is not a Hermitian orthonormal frame."""


class EmptySectionError(ShadowlabError, ValueError):
    """No sample fell inside a cross-section strip."""


class ParseError(ShadowlabError, ValueError):
    """Malformed matrix file or unknown builtin name."""


class ContractViolation(ShadowlabError, RuntimeError):
    """A numerical contract was broken (e.g. a sample outside W(A))."""


class MatrixShapeError(ParseError, DimensionError):
    """A matrix file has the wrong number of rows or ragged rows."""
