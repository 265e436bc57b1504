"""Exception types raised across the package."""


class YangianError(Exception):
    """Base class for all errors raised by this package."""


class NonTriangularRelations(YangianError):
    pass


class OddSymplecticDimension(YangianError):
    pass


class DimensionMismatch(YangianError):
    pass


class IndexOutOfRange(YangianError):
    pass


class UnknownSymbol(YangianError):
    pass


class ExpressionSyntaxError(YangianError):
    """Malformed expression text. ``offset`` is the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class NonCentralSquare(YangianError):
    pass


class DuplicateSymbol(YangianError):
    pass


class DegreeCapExceeded(YangianError):
    pass


class SlotCollision(YangianError):
    pass


class SlotOutOfRange(YangianError):
    pass


class UnsupportedFamily(YangianError):
    pass


class UnknownAlgebraSpec(YangianError):
    pass


class UnsupportedOrder(YangianError):
    pass


class W12Nonzero(YangianError):
    pass


class NonCentralCasimir(YangianError):
    pass


class LieViolation(YangianError):
    pass


class AlgebraMismatch(YangianError):
    """Two elements from unrelated algebras were combined."""
