"""Engine-specific exception types."""


class FrobhierError(Exception):
    """Base class for engine errors."""


class TruncationInsufficient(FrobhierError):
    """A requested coefficient lies outside the declared truncation bounds."""


class NotAntisymmetric(FrobhierError):
    """Bivector coefficients violate the antisymmetry identity."""

    def __init__(self, i, j, s, message=None):
        self.indices = (i, j, s)
        super().__init__(message or f"antisymmetry fails at (i,j,s)=({i},{j},{s})")


class DimensionMismatch(FrobhierError):
    pass


class NonInvertibleJacobian(FrobhierError):
    pass


class ResonanceUnresolved(FrobhierError):
    """The Levelt normalization system is singular for the given spectrum."""


class UnsupportedModel(FrobhierError):
    pass


class Degenerate(FrobhierError):
    """The bihamiltonian recursion operator is degenerate (half-integer spectrum)."""


class NonMonotoneSeed(FrobhierError):
    pass


class InadmissibleSolution(FrobhierError):
    pass
