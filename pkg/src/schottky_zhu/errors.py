"""Exception hierarchy shared by all modules."""


class SchottkyZhuError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(SchottkyZhuError):
    """Invalid user configuration (CLI exit code 2)."""


class ParseError(ConfigError):
    pass


class SchemaError(ConfigError):
    pass


class ParameterSpaceError(ConfigError):
    """Schottky parameters violate the disc condition."""


class DegenerateFixedPoints(ConfigError):
    pass


class MultiplierOutOfRange(ConfigError):
    pass


class NoAdmissibleRoot(ConfigError):
    pass


class ImageOutsideParameterSpace(SchottkyZhuError):
    pass


class InsufficientDistinctPoints(SchottkyZhuError):
    pass


class EvaluationAtBasepoint(SchottkyZhuError):
    pass


class EvaluationAtCentre(SchottkyZhuError):
    pass


class CoincidentPoints(SchottkyZhuError):
    pass


class SingularResolvent(SchottkyZhuError):
    pass


class PathThroughSingularity(SchottkyZhuError):
    pass


class ChargeNotNeutral(SchottkyZhuError):
    pass


class UnsupportedChargeCount(SchottkyZhuError):
    pass


class CapExceeded(SchottkyZhuError):
    pass


class NonConvergentTheta(SchottkyZhuError):
    pass


class GenusTooSmall(SchottkyZhuError):
    pass


class PerturbationLeavesParameterSpace(SchottkyZhuError):
    pass


class PoleHit(SchottkyZhuError):
    pass


class BranchPoint(SchottkyZhuError):
    pass
