"""Exception hierarchy.

Every error carries a short machine-readable ``code`` which the command line
front end reports together with a nonzero exit status.
"""


class ModulusError(Exception):
    code = "E_GENERIC"
    exit_status = 1


class ConfigError(ModulusError):
    code = "E_CONFIG"
    exit_status = 2


class ExpressionError(ConfigError):
    code = "E_EXPRESSION"


class NonPositiveDefinite(ModulusError):
    code = "E_METRIC_NOT_SPD"
    exit_status = 3


class TrajectoryLeftChart(ModulusError):
    code = "E_LEFT_CHART"
    exit_status = 3


class StepFailure(ModulusError):
    code = "E_STEP_FAILURE"
    exit_status = 3


class OutsideNormalRange(ModulusError):
    code = "E_OUTSIDE_NORMAL_RANGE"
    exit_status = 3


class RadiusTooLarge(ModulusError):
    code = "E_RADIUS_TOO_LARGE"
    exit_status = 3


class DegenerateTangent(ModulusError):
    code = "E_DEGENERATE_TANGENT"
    exit_status = 3


class EmptyShell(ModulusError):
    code = "E_EMPTY_SHELL"
    exit_status = 4


class SolverNotConverged(ModulusError):
    code = "E_SOLVER_NOT_CONVERGED"
    exit_status = 4


class NotNormalized(ModulusError):
    code = "E_NOT_NORMALIZED"
    exit_status = 4


class UnsupportedExponent(ModulusError):
    code = "E_UNSUPPORTED_EXPONENT"
    exit_status = 4


class NotDifferentiable(ModulusError):
    code = "E_NOT_DIFFERENTIABLE"
    exit_status = 5


class ImageLeftChart(ModulusError):
    code = "E_IMAGE_LEFT_CHART"
    exit_status = 5
