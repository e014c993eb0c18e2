"""Exception hierarchy shared by all modules.

The CLI maps these onto distinct exit codes: configuration / input
validation errors (2), physics-validity failures such as truncation or
positivity problems (3), and numerical-method failures (4).
"""


class ValidationError(ValueError):
    """Invalid physical parameter or configuration value."""


class ConfigError(ValidationError):
    """Malformed run configuration (unknown key, bad type, empty grid)."""


class PhysicsValidityError(RuntimeError):
    """A computed state fails a physical validity requirement."""


class CutoffError(PhysicsValidityError):
    """Fock truncation could not be validated within the allowed cutoff."""


class DegenerateSteadyStateError(PhysicsValidityError):
    """The Liouvillian has more than one stationary direction."""


class UndefinedStatisticsError(PhysicsValidityError):
    """Photon statistics requested for an (almost) empty cavity."""


class NumericalError(RuntimeError):
    """A numerical method failed beyond its fallback options."""
