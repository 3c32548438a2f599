class TransformError(ValueError):
    """A proof transformation was handed input of the wrong shape."""


class SplitError(TransformError):
    """No interpolant of the requested shape was found."""


class ContextReduceError(TransformError):
    """The context cannot be reduced to a single implication."""


class TranslationError(TransformError):
    """The proof cannot be translated into the requested system."""
