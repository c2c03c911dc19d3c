from typing import Optional


class SpectralMercError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(SpectralMercError, ValueError):
    """Shapes, dimensions or values of an input do not satisfy an operation's preconditions."""


class InvalidConfig(SpectralMercError, ValueError):
    """A hyperparameter, synthetic-corpus spec or settings value is out of range."""


class NumericalError(SpectralMercError, ArithmeticError):
    """A non-finite value or an unexpected imaginary residue appeared during computation."""


class ParseError(SpectralMercError, ValueError):
    """
    A corpus or config file does not match its schema.

    Attributes:
        path (Optional[str]): The file being parsed.
        line (Optional[int]): 1-based line of a JSON syntax error, when known.
        field (Optional[str]): Dotted location of the offending field, when known.
    """
    def __init__(self, message: str, path: Optional[str] = None,
                 line: Optional[int] = None, field: Optional[str] = None):
        self.path = path
        self.line = line
        self.field = field
        where = []
        if path:
            where.append(path)
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(f"field '{field}'")
        prefix = ": ".join([", ".join(where)]) + ": " if where else ""
        super().__init__(f"{prefix}{message}")
