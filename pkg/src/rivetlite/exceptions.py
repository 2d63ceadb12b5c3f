"""Exception hierarchy. The CLI maps these onto exit codes."""


class RivetLiteError(Exception):
    """Base class for all package errors."""


class CircuitError(RivetLiteError):
    """Malformed circuit, gate, binding, or Pauli string."""


class BackendError(RivetLiteError):
    """Invalid or unknown device model."""


class TranspileError(RivetLiteError):
    """Pipeline failure: width mismatch, non-translatable gate, bad stitch."""


class SimulationError(RivetLiteError):
    """Simulator misuse: width guard, unbound symbols, missing measurements."""
