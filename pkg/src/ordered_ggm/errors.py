"""Exception hierarchy.

Every error raised by the library derives from :class:`OrderedGGMError`.
The CLI maps the three families below to exit codes.
"""


class OrderedGGMError(Exception):
    """Base class for all library errors."""


class ConfigError(OrderedGGMError, ValueError):
    """Invalid user input: shapes, parameter ranges, malformed config."""


class ModelError(OrderedGGMError, ValueError):
    """Numerically or structurally invalid model."""


class InternalError(OrderedGGMError, AssertionError):
    """An invariant that must hold by construction was violated."""


# graph
class NotDecomposable(ModelError):
    def __init__(self, k, message=None):
        self.k = k
        super().__init__(message or f"graph: running intersection fails at clique k={k}")


class NodeCoverage(ConfigError):
    pass


class IndexMismatch(ConfigError):
    pass


class BadShape(ConfigError):
    pass


# model
class NotSpd(ModelError):
    pass


class InconsistentSeparator(ModelError):
    def __init__(self, k, max_dev):
        self.k = k
        self.max_dev = max_dev
        super().__init__(
            f"model: separator S_{k} covariance disagrees between clique {k} and its "
            f"parent clique (max deviation {max_dev:.3e})"
        )


class DegenerateInput(ConfigError):
    pass


class CholeskyFailure(ModelError):
    pass


# statistic
class GammaOutOfRange(ConfigError):
    pass


class BadPriors(ConfigError):
    pass


class DimensionMismatch(ConfigError):
    pass


# bounds
class BadK(ConfigError):
    pass


# protocol
class EquivalenceViolation(InternalError):
    pass
