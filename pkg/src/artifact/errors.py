"""Exception hierarchy.

Every error that reports a mathematical failure carries a ``witness``: the
smallest piece of data (a morphism, a triple, an index set) that exhibits it.
"""


class ArtifactError(Exception):
    """Base class for all errors raised by this package."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class InputError(ArtifactError):
    """Malformed or inconsistent input data."""


class MathError(ArtifactError):
    """A mathematical check failed."""


# core algebra
class IndexNotContained(InputError):
    pass


class NoSolution(MathError):
    pass


class InvalidGroup(InputError):
    pass


# groupoid kernel
class NotComposable(InputError):
    pass


class NotNonsingular(MathError):
    pass


class NoUniqueMinimum(MathError):
    pass


class InvalidAction(MathError):
    pass


class AlphaLawViolation(MathError):
    pass


class FunctorialityFailure(MathError):
    pass


class EquivalenceFailure(MathError):
    pass


# etale data and the groupoids built from it
class NotNested(MathError):
    pass


class InvalidEtaleData(MathError):
    pass


class CompositionFailure(MathError):
    pass


# ambient reduction
class InvalidAtlas(MathError):
    pass


class NoAdmissibleShrinking(MathError):
    pass


# bundles and multisections
class InvalidBundle(MathError):
    pass


class IncompatibleSection(MathError):
    pass


class CocycleFailure(MathError):
    pass


class StructureViolation(MathError):
    pass


class NotWellDefined(MathError):
    pass


class NotMorphismInvariant(MathError):
    pass


# stabilization
class StabilizationFailure(MathError):
    pass


# interchange format
class ParseError(InputError):
    pass


class SchemaError(InputError):
    pass
