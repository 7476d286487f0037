"""Exception hierarchy.

Errors split into two families that the CLI maps onto exit codes:
configuration problems (bad input, inconsistent scenario) and numerical
failures (truncation risk, quadrature trouble, norm drift).
"""


class GravabError(Exception):
    """Base class for every error raised by the package."""

    kind = "error"

    def to_dict(self):
        return {"type": type(self).__name__, "kind": self.kind, "message": str(self)}


class ConfigError(GravabError, ValueError):
    kind = "config"


class GeometryError(ConfigError):
    """Arm and source positions that make a distance vanish."""


class ScenarioInconsistencyError(ConfigError):
    """Requested scenario contradicts the light-travel times of the geometry."""


class NumericalError(GravabError, ArithmeticError):
    kind = "numerical"


class SingularModeError(NumericalError):
    """A field mode with zero frequency has a divergent coupling."""


class TruncationRiskError(NumericalError):
    """The Fock truncation is too small for the requested displacement."""


class NumericalInstabilityError(NumericalError):
    """Norm drift after evolution exceeded tolerance."""


class CutoffTooSmallError(NumericalError):
    """Mode cutoff too low for the oscillatory tail to be controlled."""

    def __init__(self, message, required_k_max=None):
        super().__init__(message)
        self.required_k_max = required_k_max

    def to_dict(self):
        out = super().to_dict()
        out["required_k_max_per_m"] = self.required_k_max
        return out


class SingularIntegrandError(NumericalError):
    """Field point sits inside the current-carrying region."""
