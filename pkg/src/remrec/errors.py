"""Exception hierarchy shared by all modules.

Every error carries a stable machine-readable ``code`` so the CLI can emit
consistent diagnostics regardless of where the failure originated.
"""


class RemrecError(Exception):
    code = "error"


class EmptyInput(RemrecError):
    code = "empty-input"


class NonPositiveModulus(RemrecError):
    code = "non-positive-modulus"


class NonCoprimeModuli(RemrecError):
    code = "non-coprime-moduli"


class NoiseBoundExceeded(RemrecError):
    code = "noise-bound-exceeded"


class PeakDeficit(RemrecError):
    code = "peak-deficit"


class NonIntegralFolding(RemrecError):
    code = "non-integral-folding"


class NoFeasibleProposal(RemrecError):
    code = "no-feasible-proposal"


class InsufficientDistinctClusters(RemrecError):
    code = "insufficient-distinct-clusters"


class ModulusTooSmall(RemrecError):
    code = "modulus-too-small"


class TooManyModuli(RemrecError):
    code = "too-many-moduli"


class BudgetExceeded(RemrecError):
    code = "budget-exceeded"


class NoPairInWindow(RemrecError):
    code = "no-pair-in-window"


class InsufficientLags(RemrecError):
    code = "insufficient-lags"


class DynamicRangeWarning(UserWarning):
    """Source value lies outside the dynamic range of the chosen moduli."""
