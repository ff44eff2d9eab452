"""Exception hierarchy shared across the toolkit."""


class CtxkitError(Exception):
    """Base class for all toolkit errors."""


class ScenarioError(CtxkitError):
    """Invalid scenario structure (uncovered variable, unknown variable, ...)."""


class ModelError(CtxkitError):
    """Invalid model data (wrong context, subpresheaf law violation, ...)."""


class DegenerateBundleError(ModelError):
    """A bundle simplex carries two vertices over the same variable."""


class FormulaError(CtxkitError):
    """Ill-sorted formula or unknown symbol."""


class ParseError(CtxkitError):
    """Syntax error with source position."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        loc = ""
        if line is not None:
            loc = f" at line {line}" + (f", column {column}" if column is not None else "")
        super().__init__(message + loc)


class FragmentError(CtxkitError):
    """Formula's free variables do not form a member context."""


class ResourceLimitError(CtxkitError):
    """Enumeration would exceed the configured product-size guard."""
