"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or inconsistent user input (bad vectors, dimensions, flags)."""


class InfeasibleBoundsError(RuntimeError):
    """A bounding LP has no feasible point.

    Raised when the supplied moments or intersection probabilities are
    mutually inconsistent, i.e. no probability distribution can produce
    them.  The offending solver result is kept on ``result``.
    """

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result
