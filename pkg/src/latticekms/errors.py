"""Shared exception types.

Violations found by verifiers are data, not exceptions; the classes here
signal genuine faults: rejected inputs, exhausted budgets, and internal
invariant failures that indicate a bug rather than a mathematical finding.
"""


class SizeGuardError(ValueError):
    """A truncation level or dimension exceeds the configured desk-scale cap."""


class RegimeError(ValueError):
    """An operation was invoked outside the parameter regime it is defined for."""


class BudgetError(RuntimeError):
    """A requested series tolerance is unreachable within the size guard."""


class TruncationDepthError(RuntimeError):
    """The truncated dilation window is too shallow for the requested query.

    Raised instead of returning a silently wrong answer; increase the
    truncation level m.
    """


class ScopeEscalationError(RuntimeError):
    """A quantity that must be constant for verified inputs deviated.

    Signals that the functional handed in was not actually KMS at the
    scope it was claimed to be.
    """


class InvariantFault(AssertionError):
    """Two independent computations of the same quantity disagree.

    This is an implementation bug, never a property of the input.
    """


class ConfigError(ValueError):
    """Malformed job configuration; message carries line/field diagnostics."""
