"""Domain exceptions shared across the package."""


class EcosplitError(Exception):
    """Base class for all domain errors."""


class EqualDensity(EcosplitError):
    """Shockwave speed is undefined when both traffic states share a density."""


class NoWindowInHorizon(EcosplitError):
    """No passable green window exists within the searched number of cycles."""


class OutOfEnvelope(EcosplitError):
    """Operating point lies outside a table hull or component power envelope."""


class InfeasibleDemand(EcosplitError):
    """Traction demand cannot be met by engine plus battery within limits."""


class NoFeasiblePolicy(EcosplitError):
    """Dynamic program has no finite-cost control at some reachable state."""


class ZeroBaseline(EcosplitError):
    """Improvement index is undefined for a zero baseline quantity."""


class ConfigError(EcosplitError):
    """Scenario or component configuration failed validation."""
