"""Package-wide exception types."""


class MqptError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(MqptError):
    """Invalid experiment configuration (bad file, unknown gate, invalid pass count)."""


class ConvergenceError(MqptError):
    """An iterative solver failed to reach its tolerance within the iteration budget."""


class IncompleteCircuitSetError(MqptError):
    """The tomography design matrix is rank deficient; the circuit set does not
    span the space of channels."""
