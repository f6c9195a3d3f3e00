"""Exception hierarchy shared by all fforge modules."""


class FForgeError(Exception):
    """Base class for every error raised by the package."""


class InputError(FForgeError, ValueError):
    """Bad user input: malformed trees, labels, parameters or files."""


class NotATree(InputError):
    pass


class BadLabel(InputError):
    pass


class BadParam(InputError):
    pass


class NotALeaf(InputError):
    pass


class TooSmall(InputError):
    pass


class BadSequence(InputError):
    pass


class DomainError(InputError):
    pass


class NumericalFailure(FForgeError, ArithmeticError):
    """An iterative numerical procedure did not produce a trustworthy answer."""


class ConvergenceFailure(NumericalFailure):
    pass


class NoRoot(NumericalFailure):
    pass


class StructureViolation(NumericalFailure):
    """A Fiedler vector does not have the shape the tree structure theorem guarantees."""


class DegenerateEigenspace(NumericalFailure):
    """lambda_2 is not simple, so there is no unique Fiedler direction."""
