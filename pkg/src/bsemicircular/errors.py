"""Exception hierarchy shared by every module of the package."""


class BSemicircularError(ValueError):
    """Base class for all errors raised by this package."""


class NonPositiveWeight(BSemicircularError):
    pass


class WeightSumMismatch(BSemicircularError):
    pass


class EmptyAlgebra(BSemicircularError):
    pass


class StructureViolation(BSemicircularError):
    """A matrix has non-zero entries outside the declared algebra structure."""


class AlgebraMismatch(BSemicircularError):
    pass


class VariableCountMismatch(BSemicircularError):
    pass


class LetterOutOfRange(BSemicircularError):
    pass


class DepthExceeded(BSemicircularError):
    """A Fock-space computation would need words longer than the truncation depth."""


class SpaceMismatch(BSemicircularError):
    pass


class MalformedPartition(BSemicircularError):
    pass


class EmptyPairs(BSemicircularError):
    pass


class MixedLetters(BSemicircularError):
    pass


class DuplicateSignature(BSemicircularError):
    pass


class TraceSymmetryRequired(BSemicircularError):
    pass


class BlockOverflow(BSemicircularError):
    pass


class DecompositionFailure(BSemicircularError):
    pass


class TruncationExceeded(BSemicircularError):
    pass


class ConfigError(BSemicircularError):
    pass


class ParseError(BSemicircularError):
    pass
