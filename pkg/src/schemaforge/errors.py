"""Exception types shared across the package.

The CLI maps these onto distinct exit codes, so library code should raise
the most specific one that applies.
"""

from __future__ import annotations


class SchemaforgeError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(SchemaforgeError):
    """A schema, rule or graph violates a structural invariant."""


class ParseError(SchemaforgeError):
    """Malformed input text. Carries the source name and line number."""

    def __init__(self, message: str, source: str = "<string>", line: int = 0):
        self.source = source
        self.line = line
        super().__init__(f"{source}:{line}: {message}" if line else f"{source}: {message}")


class BudgetExceededError(SchemaforgeError):
    """A configured resource budget (wall clock, triple count, depth) ran out."""


class CriticalInstanceTooLargeError(BudgetExceededError):
    """The critical instance would exceed the configured triple budget."""


class ChaseNonterminationError(BudgetExceededError):
    """The existential chase did not reach a fixpoint within its step bound.

    This signals a rule set outside the terminating (weakly acyclic) class.
    """


class RewriteDepthExceededError(BudgetExceededError):
    """Backward rewriting kept producing new rewritings past the depth bound."""


class UnsupportedShaclError(SchemaforgeError):
    """A SHACL shape does not match any supported template."""

    def __init__(self, shape: str, detail: str):
        self.shape = shape
        self.detail = detail
        super().__init__(f"unsupported SHACL shape {shape}: {detail}")
