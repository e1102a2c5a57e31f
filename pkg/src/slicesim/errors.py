"""Exception types shared across the package."""


class SimulatorError(Exception):
    """Base class for all slicesim errors."""


class DeploymentError(SimulatorError):
    """A manager operation violated its preconditions (unknown entity,
    dependency still present, duplicate registration, missing policy)."""


class SimulationError(SimulatorError):
    """The event engine was driven outside its contract (e.g. an arrival
    scheduled in the simulated past)."""


class ScenarioError(SimulatorError):
    """A scenario file could not be read or parsed at all."""
