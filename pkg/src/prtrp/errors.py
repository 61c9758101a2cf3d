class EngineLimitError(RuntimeError):
    """A solver refused the input: too many vertices or a label cap was hit."""
