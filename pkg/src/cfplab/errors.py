"""Exception hierarchy shared by every cfplab module."""


class CfpError(Exception):
    """Base class for all library errors."""


class ArgumentError(CfpError, ValueError):
    pass


class DomainError(CfpError, ValueError):
    """A point (or a composition) fell outside the domain of a map or space."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class ParseError(CfpError, ValueError):
    """Syntax error in function text, with the character offset of the problem."""

    def __init__(self, message, position=None, text=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position
        self.text = text


class StructureError(CfpError, ValueError):
    """Piece intervals overlap, leave gaps, or disagree with the declared domain."""


class EvalError(CfpError, ArithmeticError):
    pass


class InversionError(CfpError):
    """A non-monotone piece could not be bracketed for inversion."""


class ZeroDenominator(CfpError, ArithmeticError):
    """Rational inequality form evaluated where d(Ax, Ay) vanishes."""


class NotFound(CfpError, KeyError):
    pass


class ConfigError(CfpError, ValueError):
    pass
