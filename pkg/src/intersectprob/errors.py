"""Exception hierarchy shared by all modules."""


class IntersectProbError(Exception):
    """Base class for every error raised by the package."""


class InputError(IntersectProbError, ValueError):
    """Malformed input: bad tables, probabilities, instance files, arguments."""


class PredicateSyntaxError(InputError):
    """Syntax or typing error in a predicate expression.

    ``position`` is the 1-based column where the problem was detected;
    end of input is ``len(text) + 1``.
    """

    def __init__(self, message, position=None, text=None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)


class ResourceError(IntersectProbError):
    """An enumeration or subset budget would be exceeded."""


class PlanConstructionError(IntersectProbError):
    """No validated interpolation plan could be built."""


class NumericError(IntersectProbError):
    """Root finding failed to converge; ``partial`` holds whatever was found."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class DegenerateProbabilityError(IntersectProbError):
    """Some event is certain, so the target probability is 0 and has no logarithm."""
