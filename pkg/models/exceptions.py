# models/exceptions.py
"""Error hierarchy shared by every module"""

from typing import Any, Optional


class BatchLpnError(Exception):
    """Base class for every precondition error raised by the toolkit"""


class DimensionMismatchError(BatchLpnError, ValueError):
    pass


class ParameterRangeError(BatchLpnError, ValueError):
    pass


class InvalidDistributionError(BatchLpnError, ValueError):
    pass


class SizeGuardError(BatchLpnError, ValueError):
    pass


class InsufficientSamplesError(BatchLpnError, ValueError):
    pass


class FileFormatError(BatchLpnError, ValueError):
    pass


class ZeroMassPrefixError(BatchLpnError, ValueError):
    """A conditional was requested on a prefix the distribution never produces"""

    def __init__(self, index: int, prefix: Any):
        self.index = index
        self.prefix = prefix
        super().__init__(
            f"prefix {prefix} before bit {index} has zero mass; "
            "the distribution is not delta-SV for any delta < 1/2"
        )


class NotSanthaVaziraniError(BatchLpnError, ValueError):
    """Some conditional bias exceeds the claimed SV parameter"""

    def __init__(self, index: int, prefix: Any, bias: Any, delta: Any):
        self.index = index
        self.prefix = prefix
        self.bias = bias
        self.delta = delta
        super().__init__(
            f"bit {index} given prefix {prefix} has conditional bias {bias}, "
            f"which exceeds delta = {delta}"
        )


class BiasRangeError(BatchLpnError, ValueError):
    """The bias function is too far from 1/2 for the linearization to apply"""

    def __init__(self, deviation: Any, bound: Any, k: Optional[int] = None):
        self.deviation = deviation
        self.bound = bound
        self.k = k
        super().__init__(
            f"||q - 1/2||_inf = {deviation} exceeds the bound 2^-(k+3) = {bound}"
            + (f" for k = {k}" if k is not None else "")
        )


class SimplexViolationError(RuntimeError):
    """Internal error: a constructed coefficient distribution left the simplex.

    Not a BatchLpnError: in-range inputs can never trigger it.
    """
