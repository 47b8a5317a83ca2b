"""Exception types shared across the solver modules."""


class QsmoluError(Exception):
    """Base class for all errors raised by this package."""


class GridMismatchError(QsmoluError):
    """Fields live on incompatible grids, or a grid violates an operation's
    boundary-condition requirement."""


class GridResolutionError(QsmoluError):
    """Grid too coarse for the requested stencil or mode count."""


class DegenerateDensityError(QsmoluError):
    """A density-derived quantity came out non-finite despite the floor."""

    def __init__(self, node: int, message: str | None = None):
        self.node = node
        super().__init__(message or f"degenerate density at node {node}")


class NodeFormationError(QsmoluError):
    """Density fell below the floor at an interior node, so phase-based
    quantities are undefined there.

    ``last_state`` holds the last propagation-valid state when raised by a
    time stepper, ``step`` the failing step index.
    """

    def __init__(self, node: int, step: int | None = None, last_state=None):
        self.node = node
        self.step = step
        self.last_state = last_state
        where = f" at step {step}" if step is not None else ""
        super().__init__(f"node formation (density under floor) at grid node {node}{where}")


class StabilityError(QsmoluError):
    """Requested time step exceeds the computed explicit stability bound."""

    def __init__(self, dt: float, bound: float):
        self.dt = dt
        self.bound = bound
        super().__init__(f"dt = {dt:g} exceeds stability bound {bound:g}")


class BlowupError(QsmoluError):
    """An SDE path produced a non-finite state."""

    def __init__(self, path: int, step: int):
        self.path = path
        self.step = step
        super().__init__(f"non-finite state on path {path} at step {step}")


class TruncationError(QsmoluError):
    """Too few spectral modes for the requested reciprocal temperature."""


class PositivityLossError(QsmoluError):
    """Crank-Nicolson step turned an everywhere-positive field negative;
    the beta step is too large."""


class EtaInstabilityError(QsmoluError):
    """Dispersion integration produced a non-monotone eta column."""

    def __init__(self, t: float, beta: float):
        self.t = t
        self.beta = beta
        super().__init__(f"eta became non-increasing at t = {t:g}, beta = {beta:g}")


class BetaGridError(QsmoluError):
    """Beta grid too coarse: trapezoid halving error above tolerance."""


class ConfigError(QsmoluError):
    """Scenario configuration failed validation.

    ``violations`` lists every problem found, each as ``(field_path, message)``.
    """

    def __init__(self, violations: list[tuple[str, str]]):
        self.violations = violations
        lines = "; ".join(f"{path}: {msg}" for path, msg in violations)
        super().__init__(f"invalid configuration: {lines}")


class AliasingWarning(UserWarning):
    """Spectral content reached the top third of the wavenumber band."""
