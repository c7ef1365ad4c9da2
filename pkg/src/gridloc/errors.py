"""Exception types shared across the package."""


class GridlocError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(GridlocError, ValueError):
    """A configuration object violates its invariants."""


class PlanningError(GridlocError, ValueError):
    """A deployment-planning request has no feasible solution."""


class ContractViolationError(GridlocError, RuntimeError):
    """A caller broke an operation's precondition (bad call order, unsorted input)."""


class NoCandidatesError(GridlocError, ValueError):
    """Centroid requested over an empty candidate set; caller should hold its previous estimate."""


class FineLocalizationUnavailableError(GridlocError, RuntimeError):
    """Fewer than three non-collinear reference nodes in range for a fine fix."""


class UndefinedOverheadError(GridlocError, ArithmeticError):
    """Overhead ratio undefined because the baseline fired zero fine localizations."""


class EmptyTraceError(GridlocError, ValueError):
    """Metrics requested for a label with no trace samples."""


class ScenarioFormatError(GridlocError, ValueError):
    """Scenario file failed schema validation.

    ``field`` holds the dotted path of the offending key when known.
    """

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field


class ModelValidityWarning(UserWarning):
    """Parameters are outside the band where the analytical error model is derived."""
