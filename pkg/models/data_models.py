# models/data_models.py
"""Data models for samples, configurations and verification reports"""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from core.gf2 import BitVector
from models.exceptions import DimensionMismatchError
from utils.helpers import format_number


@dataclass(frozen=True)
class SecretKey:
    """n-bit secret"""
    sk: BitVector

    @property
    def n(self) -> int:
        return self.sk.length


@dataclass(frozen=True)
class LpnSample:
    """(u, <u, sk> + e)"""
    u: BitVector
    y: int

    @property
    def n(self) -> int:
        return self.u.length

    def to_json(self) -> Dict[str, Any]:
        return {"u": str(self.u), "y": self.y}


@dataclass(frozen=True)
class Batch:
    """k LPN samples sharing one dimension n"""
    samples: Tuple[LpnSample, ...]

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        dims = {s.n for s in self.samples}
        if len(dims) > 1:
            raise DimensionMismatchError(f"batch mixes dimensions {sorted(dims)}")

    @property
    def k(self) -> int:
        return len(self.samples)

    @property
    def n(self) -> int:
        return self.samples[0].n if self.samples else 0

    def to_json(self) -> Dict[str, Any]:
        return {"n": self.n, "k": self.k, "samples": [s.to_json() for s in self.samples]}


@dataclass(frozen=True)
class ReductionConfig:
    """Parameters of one reduction run: dimension, batch size, SV parameter, target law"""
    n: int
    k: int
    delta: Any
    p: Any  # core.distributions.NoiseDistribution

    @property
    def input_bias(self) -> Any:
        """Bias 2^(k+2) delta of the input samples (noise level 1/2 - input_bias)"""
        return (1 << (self.k + 2)) * self.delta

    def descriptor(self, sk: Optional[SecretKey] = None) -> Dict[str, Any]:
        data = {
            "n": self.n,
            "k": self.k,
            "delta": format_number(self.delta),
            "p_digest": self.p.digest(),
        }
        if sk is not None:
            data["sk"] = str(sk.sk)
        return data


@dataclass
class ChiSquareResult:
    """Pearson goodness-of-fit outcome for one histogram"""
    name: str
    statistic: float
    degrees_of_freedom: int
    p_value: float
    cells: int
    passed: bool


@dataclass
class VerificationReport:
    """Outcome of one exact or statistical reduction check"""
    instance: Dict[str, Any]
    mode: str  # "exact" | "statistical"
    tv_distance: Any
    passed: bool
    runtime: float
    chi_square: List[ChiSquareResult] = field(default_factory=list)
    significance: Optional[float] = None
    seed: Optional[int] = None

    def to_json(self) -> Dict[str, Any]:
        return {
            "instance": self.instance,
            "mode": self.mode,
            "tv_distance": format_number(self.tv_distance),
            "chi_square": [asdict(c) for c in self.chi_square],
            "significance": self.significance,
            "seed": self.seed,
            "pass": self.passed,
            "runtime": self.runtime,
        }


@dataclass
class CounterexampleReport:
    """Statistics of the two-bit shared-coin source that defeats product noise"""
    delta: Any
    sv_param: Any
    tv_xor: Any
    implied_min_product_bias: Any
    exact: bool

    def to_json(self) -> Dict[str, Any]:
        return {
            "delta": format_number(self.delta),
            "sv_param": format_number(self.sv_param),
            "tv_xor": format_number(self.tv_xor),
            "implied_min_product_bias": format_number(self.implied_min_product_bias),
            "exact": self.exact,
        }


@dataclass
class Lemma2Report:
    """Exact identities certified for the inner-product matrix B"""
    k: int
    row_sums_ok: bool
    square_identity_ok: bool
    inverse_ok: bool
    sigma_min: str
    sigma_min_value: float
    bound_met: bool
    implication: List[str]
    runtime: float

    @property
    def passed(self) -> bool:
        return self.row_sums_ok and self.square_identity_ok and self.inverse_ok and self.bound_met

    def to_json(self) -> Dict[str, Any]:
        data = asdict(self)
        data["pass"] = self.passed
        return data


@dataclass
class RunManifest:
    """Everything needed to rerun one CLI command byte-exactly"""
    command: str
    argv: List[str]
    parameters: Dict[str, Any]
    seed: Optional[int]
    tool_version: str
    inputs: Dict[str, str] = field(default_factory=dict)
    outputs: Dict[str, str] = field(default_factory=dict)

    def to_json(self) -> Dict[str, Any]:
        return asdict(self)
