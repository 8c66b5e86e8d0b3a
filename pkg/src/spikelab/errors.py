"""Exception hierarchy shared by every spikelab module."""


class SpikelabError(Exception):
    """Base class for all errors raised by spikelab."""


class DomainError(SpikelabError, ValueError):
    """An argument lies outside the domain of a closed-form map."""


class OutsideOutlierRegime(DomainError):
    """A spike with ``|theta| <= sigma`` was used where an outlier is required."""


class IntervalInsideSupport(SpikelabError, ValueError):
    """The interval ``[a, b]`` meets the limiting support ``K_sigma``."""


class InvalidSplit(SpikelabError, ValueError):
    """The preimage interval ``[a', b']`` contains an eigenvalue of the deformation."""


class ConvergenceError(SpikelabError, RuntimeError):
    """An iterative eigenvalue routine hit its iteration cap.

    Attributes
    ----------
    index : int
        Position (0-based) of the eigenvalue that failed to converge.
    """

    def __init__(self, message, index=-1):
        super().__init__(message)
        self.index = index


class SingularResolvent(SpikelabError, ZeroDivisionError):
    """The spectral parameter coincides with an eigenvalue."""


class ConfigError(SpikelabError, ValueError):
    """An experiment configuration is malformed or inconsistent."""
