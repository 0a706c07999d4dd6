"""Exception hierarchy shared by every module of the package."""


class AECError(Exception):
    """Base class for all errors raised by :mod:`aec`."""


class MixedDomainError(AECError, TypeError):
    """Arithmetic between a rational and a rational function was attempted."""


class DivisionByZero(AECError, ZeroDivisionError):
    """Exact division by zero. Search code prunes on this, never aborts."""


class VanishingDenominator(DivisionByZero):
    pass


class MissingVariable(AECError, KeyError):
    pass


class ParseError(AECError, ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class EmptyInstance(AECError, ValueError):
    pass


class BoundExceeded(AECError):
    """Instance too large for an exponential search or brute-force decider."""


class LeafCountMismatch(AECError, ValueError):
    pass


class UnsupportedSpec(AECError, ValueError):
    pass


class NonSquareProduct(AECError, ValueError):
    """The product of the source values is not a perfect square.

    Equal-product halves force a square product, so the source is a NO
    instance; the generator refuses rather than guessing.
    """


class InvalidSourceWitness(AECError, ValueError):
    pass


class WitnessShapeUnexpected(AECError):
    """An expression attains the target but is not in the expected normal form."""
