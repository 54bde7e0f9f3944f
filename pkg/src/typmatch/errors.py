class FormatError(ValueError):
    """Input text does not follow one of the package's file formats."""


class GuardExceeded(ValueError):
    """A brute-force routine was asked for an instance above its size guard."""


class SmallCellWarning(UserWarning):
    """A joint-distribution cell is close enough to 0 to void the achievability condition."""
