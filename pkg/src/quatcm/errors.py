"""Exception types shared across the library."""


class QuatCMError(Exception):
    pass


class HypothesisFailure(QuatCMError):
    """An arithmetic hypothesis required by an operation does not hold."""


class CeilingExceeded(QuatCMError):
    """A configured search or enumeration ceiling was reached without an answer."""


class IndeterminateSign(QuatCMError):
    """A rigorous sign/comparison could not be decided at the maximum precision."""


class PrecisionFloor(QuatCMError):
    """Local arithmetic would drop below the configured precision floor."""
