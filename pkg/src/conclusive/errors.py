"""Exception types raised by the simulator."""


class SimulationError(ValueError):
    """Base class for invalid inputs to any simulator routine."""


class ZeroNorm(SimulationError):
    pass


class BadShape(SimulationError):
    pass


class DuplicateLabel(SimulationError):
    pass


class UnknownLabel(SimulationError):
    pass


class LabelMismatch(SimulationError):
    pass


class DimensionMismatch(SimulationError):
    pass


class InvalidMeasurement(SimulationError):
    pass


class InvalidPovm(SimulationError):
    pass


class NotPsd(SimulationError):
    pass


class BadSpec(SimulationError):
    """Channel or input-qubit parameters violate their invariants."""


class UnknownProtocol(SimulationError):
    pass


class InputDependence(SimulationError):
    """An exact success probability changed with the input state."""
