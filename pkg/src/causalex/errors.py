"""Exception hierarchy shared across the package."""


class CausalExError(Exception):
    """Base class for all package errors."""


class OutOfRange(CausalExError):
    """A span lies outside its sentence."""


class PartialOverlap(CausalExError):
    """Two spans overlap without sharing identical boundaries."""


class MalformedTags(CausalExError):
    """A tag sequence fails BIO well-formedness."""


class NoCausality(CausalExError):
    """No causal spans present where at least one is required."""


class CombinatorialBlowup(CausalExError):
    """Combination search exceeded the configured size caps."""


class ParseError(CausalExError):
    """Malformed input file; message carries the line number."""


class ValidationError(CausalExError):
    """Structurally parseable input that violates a data invariant."""


class DimMismatch(CausalExError):
    """A vector's length disagrees with the declared dimension."""


class MissingToken(CausalExError):
    """A contextual store lacks vectors for some token of a sentence."""


class MissingSentence(CausalExError):
    """A contextual store has no record for the requested sentence id."""


class ShapeMismatch(CausalExError):
    """Tensor shapes disagree with the model dimensions."""


class IndexOutOfAlphabet(CausalExError):
    """A character index exceeds the character table."""


class LengthMismatch(CausalExError):
    """Sequence lengths disagree (tags vs. emissions, etc.)."""


class TooSmall(CausalExError):
    """A corpus is too small for the requested split."""


class IdMismatch(CausalExError):
    """Gold and predicted results cover different sentence id sets."""


class NonFiniteLoss(CausalExError):
    """Training produced a NaN/inf loss."""
