"""Exception types shared across the package."""


class ClassGroupError(Exception):
    """Base class for all errors raised by this package."""


class NonMonic(ClassGroupError):
    """Defining polynomial is not monic."""


class Reducible(ClassGroupError):
    """Defining polynomial is reducible over the rationals."""


class BasisNotUnimodularScaling(ClassGroupError):
    """Integral-basis matrix determinant is inconsistent with the polynomial
    discriminant (index squared must divide disc(T))."""


class PrecisionExhausted(ClassGroupError):
    """Interval widths exceed the tolerance required by the operation; the
    caller must retry at a higher precision."""


class IndexDivisor(ClassGroupError):
    """A rational prime divides the index [O_K : Z[theta]]; splitting such a
    prime is unsupported."""

    def __init__(self, p, message=None):
        self.p = p
        super().__init__(message or f"prime {p} divides the order index")


class EmptyFactorBase(ClassGroupError):
    """No prime ideal has norm within the requested bound."""


class RankDeficient(ClassGroupError):
    """Matrix does not have the rank required by the operation."""


class DeterminantTooLarge(ClassGroupError):
    """Lattice determinant violates the sublattice-reduction precondition."""


class DimensionCap(ClassGroupError):
    """Enumeration dimension exceeds the configured cap."""


class AlphaOrder(ClassGroupError):
    """Smoothness probability needs alpha1 > alpha2."""


class DomainTooSmall(ClassGroupError):
    """L-notation evaluation needs N >= 16 so that log log N > 0."""


class DegreeOne(ClassGroupError):
    """Degree-1 fields (the rationals) are not classified."""


class ZeroVolume(ClassGroupError):
    """Kernel spans fewer independent unit-log vectors than the unit rank."""


class Stalled(ClassGroupError):
    """Relation collection exhausted its trial budget without progress."""

    def __init__(self, message, stats=None):
        self.stats = stats or {}
        super().__init__(message)
