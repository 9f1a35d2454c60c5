"""Exception hierarchy for hypsurf.

Library code raises these; only the CLI handlers in
``hypsurf.cli_tools.command_registry`` catch them and turn them into an
exit status.
"""

from __future__ import annotations


class HypSurfError(Exception):
    """Base class for every error raised by the library."""


class InvalidParameter(HypSurfError, ValueError):
    """A numeric argument violates an operation's precondition."""


class ConfigError(HypSurfError):
    """A run configuration file or override is malformed."""


# ── hyp-core ────────────────────────────────────────────────────


class EllipticOrParabolic(HypSurfError):
    """The element is not hyperbolic (|trace| <= 2 within tolerance)."""


class DegenerateConfiguration(HypSurfError):
    """Boundary endpoints coincide within tolerance."""


class NotFactorable(HypSurfError):
    """The matrix lies outside the flow-box coordinate chart."""


# ── surface-model ───────────────────────────────────────────────


class RelatorViolation(HypSurfError):
    """A relator does not evaluate to the identity."""


class NotTransitive(HypSurfError):
    """A permutation representation does not act transitively."""


class RejectionBudgetExceeded(HypSurfError):
    """Rejection sampling ran out of attempts."""


class NoGeodesicInRange(HypSurfError):
    """No closed geodesic was found below the search length."""


# ── geodesic-census ─────────────────────────────────────────────


class BudgetExceeded(HypSurfError):
    """Enumeration grew beyond the configured element cap."""


class ToleranceCollision(HypSurfError):
    """Two distinct elements cannot be told apart at the configured tolerance."""


class BandExceedsCensus(HypSurfError):
    """A length band reaches past the census cutoff."""


# ── curve-topology ──────────────────────────────────────────────


class BallTooSmall(HypSurfError):
    """The enumerated ball cannot certify the requested computation."""


class DegenerateCrossing(HypSurfError):
    """Two lifts are tangent or share an endpoint within tolerance."""


class NonTransverseInput(HypSurfError):
    """Intersection data contains non-transverse double points."""


# ── flowbox-dynamics ────────────────────────────────────────────


class ChartRadiusExceeded(HypSurfError):
    """A flow box is wider than the safe lift-search radius."""


class PackingFailure(HypSurfError):
    """Greedy disc packing failed to produce a 3r-covering net."""


# ── random-models ───────────────────────────────────────────────


class Disconnected(HypSurfError):
    """A ribbon graph's half-edge action is not transitive."""
