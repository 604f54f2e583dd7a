"""Exception taxonomy.

ConfigError is for malformed user input (scenario files, bad dimension tags).
PhysicsError subclasses mark conditions where the requested computation is
ill-defined at the evaluation point; the CLI maps ConfigError to exit code 2
and PhysicsError to exit code 3.
"""


class ConfigError(ValueError):
    """Malformed scenario or configuration input."""


class PhysicsError(RuntimeError):
    """Base class for physics-level failures."""


class DegeneratePointError(PhysicsError):
    """Band identity cannot be tracked (eigenvector overlap too small, or gap closed)."""


class InfiniteMassError(PhysicsError):
    """Band curvature vanishes at an inflection point; effective mass diverges."""


class BoundaryProximityError(PhysicsError):
    """A grid wavepacket drifted too close to the domain boundary."""


class EnergyDriftError(PhysicsError):
    """Conserved energy drifted beyond tolerance in a conservative integration."""
