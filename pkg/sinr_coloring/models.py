"""
Pydantic models for physical parameters, network files, solver results and
sweep statistics.
"""

from decimal import Decimal
from enum import Enum
from fractions import Fraction
from typing import Annotated, Any, Dict, List, Optional

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PlainSerializer,
    PlainValidator,
    field_validator,
    model_validator,
)


# ---------------------------------------------------------------------------
# Rational helpers
# ---------------------------------------------------------------------------


def parse_rational(v: Any) -> Fraction:
    """Accept Fraction, int, Decimal, or strings like "11/2", "6", "0.25"."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(v, (int, Decimal)):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"not a rational: {v!r}") from e
    raise ValueError(f"cannot interpret {type(v).__name__} as a rational")


def format_rational(v: Fraction) -> str:
    """Always ``p/q``; integers come out as ``n/1``."""
    return f"{v.numerator}/{v.denominator}"


def format_decimal(v: Fraction) -> str:
    """
    Exact decimal string for a rational whose denominator is 2^a * 5^b.

    Raises ValueError for values without a finite decimal expansion.
    """
    den = v.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        raise ValueError(f"{v} has no finite decimal expansion")
    digits = max(twos, fives)
    if digits == 0:
        return str(v.numerator)
    scaled = v * 10**digits
    sign = "-" if scaled < 0 else ""
    text = str(abs(scaled.numerator)).rjust(digits + 1, "0")
    return f"{sign}{text[:-digits]}.{text[-digits:]}"


def _parse_decimal_rational(v: Any) -> Fraction:
    q = parse_rational(v)
    format_decimal(q)  # rejects non-terminating values
    return q


Rational = Annotated[
    Fraction,
    PlainValidator(parse_rational),
    PlainSerializer(format_rational, return_type=str),
]

DecimalRational = Annotated[
    Fraction,
    PlainValidator(_parse_decimal_rational),
    PlainSerializer(format_decimal, return_type=str),
]


# ---------------------------------------------------------------------------
# Enums
# ---------------------------------------------------------------------------


class FilterReason(str, Enum):
    EMPTY = "empty"
    TOO_MANY_LINKS = "too_many_links"
    TOO_MANY_MATCHINGS = "too_many_matchings"


class Verdict(str, Enum):
    STRICT = "strict"
    EQUAL = "equal"


class FamilySource(str, Enum):
    ENUMERATED = "enumerated"
    EXPLICIT = "explicit"


class SeparationMode(str, Enum):
    FAMILY = "family"
    BRANCH_AND_BOUND = "branch_and_bound"
    UNRESTRICTED = "unrestricted"


class InstanceOutcome(str, Enum):
    PASS = "pass"
    FAIL_EMPTY = "empty"
    FAIL_LINKS = "too_many_links"
    FAIL_MATCHINGS = "too_many_matchings"
    BUDGET_EXCEEDED = "budget_exceeded"


# ---------------------------------------------------------------------------
# Physical model and network files
# ---------------------------------------------------------------------------


class PhysParams(BaseModel):
    """
    Transmit power P, noise floor gamma (both mW), decode threshold beta and
    path-loss exponent alpha.
    """

    power_mw: Decimal = Field(gt=0)
    noise_mw: Decimal = Field(gt=0)
    beta: Decimal = Field(gt=1)
    alpha: Decimal = Field(gt=2)

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    @property
    def alpha_is_even(self) -> bool:
        """Even integer alpha keeps d**alpha rational for rational coordinates."""
        return self.alpha == self.alpha.to_integral_value() and int(self.alpha) % 2 == 0

    @property
    def power(self) -> Fraction:
        return Fraction(self.power_mw)

    @property
    def noise(self) -> Fraction:
        return Fraction(self.noise_mw)

    @property
    def threshold(self) -> Fraction:
        return Fraction(self.beta)


class Node(BaseModel):
    id: int = Field(ge=0)
    x: DecimalRational
    y: DecimalRational

    model_config = ConfigDict(frozen=True)


class LinkRecord(BaseModel):
    id: int = Field(ge=0)
    sender: int = Field(ge=0)
    receiver: int = Field(ge=0)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_endpoints(self) -> "LinkRecord":
        if self.sender == self.receiver:
            raise ValueError(f"link {self.id} has sender == receiver")
        return self


class Provenance(BaseModel):
    """Tool version, the command line that produced a file, and its seed."""

    tool: str = "sinr-coloring"
    version: str
    argv: List[str] = Field(default_factory=list)
    seed: Optional[int] = None


class NetworkDocument(BaseModel):
    """On-disk JSON form of a network."""

    params: PhysParams
    side_m: DecimalRational
    seed: Optional[int] = None
    nodes: List[Node] = Field(default_factory=list)
    links: List[LinkRecord] = Field(default_factory=list)
    provenance: Optional[Provenance] = None

    @field_validator("side_m")
    @classmethod
    def positive_side(cls, v: Fraction) -> Fraction:
        if v <= 0:
            raise ValueError("side_m must be positive")
        return v


# ---------------------------------------------------------------------------
# Solver results
# ---------------------------------------------------------------------------


class SupportEntry(BaseModel):
    matching: List[int]
    x: Rational


class ResultDocument(BaseModel):
    """JSON written by ``solve``; fields not produced by a mode stay null."""

    mode: str
    n_links: int
    approximate_feasibility: bool = False
    n_matchings: Optional[int] = None
    chi_star: Optional[Rational] = None
    chi_int: Optional[int] = None
    verdict: Optional[Verdict] = None
    ilp_solved: Optional[bool] = None
    support: List[SupportEntry] = Field(default_factory=list)
    partition: Optional[List[List[int]]] = None
    z_star: Optional[Rational] = None
    y: Optional[List[Rational]] = None
    cuts_added: Optional[int] = None
    timings_ms: Dict[str, float] = Field(default_factory=dict)
    provenance: Optional[Provenance] = None


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

LINK_CAPACITY = 128


class SweepLimits(BaseModel):
    # matchings are bitsets over at most LINK_CAPACITY links
    max_links: int = Field(default=LINK_CAPACITY, gt=0, le=LINK_CAPACITY)
    max_matchings: int = Field(default=50_000_000, gt=0)


class SweepConfig(BaseModel):
    node_counts: List[int]
    side_lengths_km: List[Decimal]
    instances_per_cell: int = Field(default=100, gt=0)
    master_seed: int = Field(default=0, ge=0)
    limits: SweepLimits = Field(default_factory=SweepLimits)
    params: PhysParams
    coord_digits: int = Field(default=6, ge=0)
    budget_s: Optional[float] = Field(default=300.0, gt=0)
    jobs: int = Field(default=1, gt=0)
    record_timings: bool = True

    @field_validator("node_counts")
    @classmethod
    def check_nodes(cls, v: List[int]) -> List[int]:
        if not v or any(n < 2 for n in v):
            raise ValueError("node counts must be non-empty and each >= 2")
        return v

    @field_validator("side_lengths_km")
    @classmethod
    def check_sides(cls, v: List[Decimal]) -> List[Decimal]:
        if not v or any(d <= 0 for d in v):
            raise ValueError("side lengths must be non-empty and positive")
        return v


class InstanceRecord(BaseModel):
    """One generated instance of a sweep cell."""

    index: int
    seed: int
    outcome: InstanceOutcome
    n_links: int
    approximate_feasibility: bool = False
    n_matchings: Optional[int] = None
    chi_star: Optional[Rational] = None
    chi_int: Optional[int] = None
    verdict: Optional[Verdict] = None
    enum_ms: Optional[float] = None
    lp_ms: Optional[float] = None
    ilp_ms: Optional[float] = None


class CellStats(BaseModel):
    """Aggregates for one (|N|, d) cell."""

    n_nodes: int
    side_km: Decimal
    n_instances: int
    n_pass: int = 0
    n_fail_empty: int = 0
    n_fail_links: int = 0
    n_fail_matchings: int = 0
    n_budget_exceeded: int = 0
    n_strict: int = 0
    ratios: List[Rational] = Field(default_factory=list)
    mean_ratio: Optional[float] = None
    ci95_halfwidth: Optional[float] = None
    mean_enum_ms: Optional[float] = None
    mean_lp_ms: Optional[float] = None
    mean_ilp_ms: Optional[float] = None

    @model_validator(mode="after")
    def check_conservation(self) -> "CellStats":
        total = (
            self.n_pass
            + self.n_fail_empty
            + self.n_fail_links
            + self.n_fail_matchings
            + self.n_budget_exceeded
        )
        if total != self.n_instances:
            raise ValueError(f"cell counts sum to {total}, expected {self.n_instances}")
        if self.n_strict > self.n_pass:
            raise ValueError("more strict verdicts than passing instances")
        if any(r <= 1 for r in self.ratios):
            raise ValueError("capacity ratios of strict instances must exceed 1")
        return self

    @property
    def node_density(self) -> float:
        """Nodes per square metre."""
        side_m = float(self.side_km) * 1000.0
        return self.n_nodes / (side_m * side_m)


__all__ = [
    "parse_rational",
    "format_rational",
    "format_decimal",
    "Rational",
    "DecimalRational",
    "FilterReason",
    "Verdict",
    "FamilySource",
    "SeparationMode",
    "InstanceOutcome",
    "PhysParams",
    "Node",
    "LinkRecord",
    "Provenance",
    "NetworkDocument",
    "SupportEntry",
    "ResultDocument",
    "SweepLimits",
    "SweepConfig",
    "InstanceRecord",
    "CellStats",
]
