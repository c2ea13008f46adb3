"""Exception types shared across the package."""


class BudgetExceededError(ValueError):
    """An enumeration or decoding budget would be exceeded."""


class InconsistentOutcomeError(ValueError):
    """No defective set reproduces the supplied outcome vector."""


class DesignGenerationError(RuntimeError):
    """A randomized design construction exhausted its retry budget."""


class DesignFormatError(ValueError):
    """A design file does not conform to the text format."""


class ScanLimitError(RuntimeError):
    """A certified minimum scan hit its hard cap before terminating."""
