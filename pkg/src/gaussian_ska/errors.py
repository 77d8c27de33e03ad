"""Exception and warning types raised across the package."""


class GaussianSKAError(ValueError):
    """Base class for parameter and consistency errors."""


class InvalidParams(GaussianSKAError):
    pass


class DegenerateChannel(GaussianSKAError):
    """A degraded construction would divide by a zero correlation."""


class WrongOrder(GaussianSKAError):
    """The operation needs the other channel ordering."""


class NotPSD(GaussianSKAError):
    pass


class InvalidAlpha(GaussianSKAError):
    pass


class RatesInfeasible(GaussianSKAError):
    """The slack gamma leaves no positive secret-key rate."""


class TooLarge(GaussianSKAError):
    """The codebook would exceed the configured memory ceiling."""


class LengthMismatch(GaussianSKAError):
    pass


class OutOfRange(GaussianSKAError):
    pass


class Underpowered(UserWarning):
    """Histogram cells are too sparse for a reliable plug-in estimate."""
