"""Exception hierarchy shared by all thinlab modules.

The CLI maps these onto distinct exit codes, so keep the categories coarse:
input/parse problems, contract violations by user-supplied objects, budget
exhaustion, and internal invariant failures (always a thinlab bug).
"""


class ThinlabError(Exception):
    """Base class for all errors raised by thinlab."""


class LengthMismatchError(ThinlabError):
    """Two words were combined that do not have the same length."""


class IndexRangeError(ThinlabError):
    """A bit index or xor mask is out of range for the given word."""


class HorizonExceededError(ThinlabError):
    """A generated stream was probed beyond its declared horizon."""


class NotClosedFormError(ThinlabError):
    """Exact stream arithmetic was requested on a non-closed-form stream.

    Use hd_prefix for finite-horizon probing instead.
    """


class CodeError(ThinlabError):
    """A code violates a precondition (too few words, wrong member kind...)."""


class StrategyContractError(ThinlabError):
    """A strategy returned something other than a nonempty word."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = history


class OracleContractError(ThinlabError):
    """A target-set oracle changed a settled verdict on a longer prefix."""


class CaptureInvariantError(ThinlabError):
    """The reply-enumeration bookkeeping of a capture run broke down."""


class BudgetExceededError(ThinlabError):
    """An exact computation was asked for outside the configured budget."""

    def __init__(self, message, lower=None, upper=None):
        super().__init__(message)
        self.lower = lower
        self.upper = upper


class InternalCheckError(ThinlabError):
    """Two redundant internal routes disagreed; indicates a thinlab bug."""
