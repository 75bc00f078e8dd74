"""Core data models for the discrete annealing toolkit.

Enumerations shared across subpackages and the Pydantic v2 report models that
operations return and the CLI serializes. Numerical containers (distributions,
kernels, capacities) live in the subpackages; the models here hold plain
floats and lists so they round-trip through JSON unchanged.
"""

from __future__ import annotations

import math
from enum import Enum

from pydantic import BaseModel, Field, computed_field, model_validator
from scipy.stats import poisson


# ---------------------------------------------------------------------------
# Enums
# ---------------------------------------------------------------------------


class ScheduleKind(str, Enum):
    """Shape of an inverse-temperature schedule."""

    LINEAR_UP = "linear-up"  # beta(s) = beta * s
    LINEAR_DOWN = "linear-down"  # beta(s) = beta0 - (beta0 - beta) * s
    CUSTOM = "custom"


class QuadratureRule(str, Enum):
    SIMPSON = "simpson"


class MlsiMode(str, Enum):
    """How a modified log-Sobolev constant is obtained."""

    EXACT_GRID = "exact-grid"  # certified on |Omega| <= 4
    ASCENT = "ascent"  # lower-bound estimate


class RunMode(str, Enum):
    EXACT = "exact"
    SAMPLE = "sample"


class ModelKind(str, Enum):
    ISING = "ising"
    POTTS = "potts"


class StateSpace(str, Enum):
    """Which state space an annealing problem runs on."""

    FULL = "full"
    PROJECTED = "projected"
    FOLDED = "folded"


class LandscapeShape(str, Enum):
    """Shape of a one-dimensional measure profile."""

    INCREASING = "increasing"
    DECREASING = "decreasing"
    UNIMODAL = "unimodal"
    CONSTANT = "constant"
    OTHER = "other"


class HorizonRule(str, Enum):
    """How the time horizon T is chosen."""

    ACTION = "action"  # T = 2A / eps from the computed action
    THEOREM = "theorem"  # closed-form horizon of the model's complexity bound


class CommandName(str, Enum):
    ACTION = "action"
    ANNEAL = "anneal"
    VERIFY = "verify"
    LANDSCAPE = "landscape"


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"


# ---------------------------------------------------------------------------
# Transport
# ---------------------------------------------------------------------------


class ActionReport(BaseModel):
    """Quadrature of squared metric derivatives along a curve."""

    value: float = Field(ge=0.0)
    grid: list[float] = Field(default_factory=list)
    samples: list[float] = Field(default_factory=list)
    rule: QuadratureRule = QuadratureRule.SIMPSON
    error: float = Field(default=0.0, ge=0.0)
    horizon: float = 1.0

    @model_validator(mode="after")
    def samples_match_grid(self) -> ActionReport:
        if len(self.samples) != len(self.grid):
            raise ValueError("samples and grid must have the same length")
        if any(v < 0.0 for v in self.samples):
            raise ValueError("squared metric derivatives must be nonnegative")
        return self


class MlsiEstimate(BaseModel):
    """Modified log-Sobolev constant estimate.

    ``exact-grid`` values are suprema over a simplex grid with a refinement error;
    ``ascent`` values are lower bounds.
    """

    value: float = Field(ge=0.0)
    error: float = Field(default=0.0, ge=0.0)
    mode: MlsiMode
    resolution: int = 0

    @property
    def certified(self) -> float:
        """Grid value plus refinement error."""
        return self.value + self.error


# ---------------------------------------------------------------------------
# Annealing
# ---------------------------------------------------------------------------


class AnnealConfig(BaseModel):
    """Horizon, layering and randomness of one annealing run."""

    horizon: float = Field(ge=0.0, description="Total continuous time T")
    layers: int = Field(default=1, ge=1, description="Number of layers N")
    seed: int = Field(default=0, ge=0, lt=2**64)
    replicates: int = Field(default=1, ge=1)
    max_jumps: int | None = Field(default=None, ge=0)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def dt(self) -> float:
        """Layer duration T / N (the Poisson mean per layer)."""
        return self.horizon / self.layers

    @computed_field  # type: ignore[prop-decorator]
    @property
    def truncation_tv(self) -> float:
        """Union bound N * P[Pois(dt) > max_jumps] on the truncation error."""
        if self.max_jumps is None or self.dt == 0.0:
            return 0.0
        return min(1.0, self.layers * float(poisson.sf(self.max_jumps, self.dt)))

    @staticmethod
    def suggest_max_jumps(dt: float, layers: int, tv_budget: float) -> int:
        """Smallest cap M with N * P[Pois(dt) > M] <= tv_budget."""
        if dt == 0.0:
            return 0
        per_layer = tv_budget / layers
        return int(poisson.isf(per_layer, dt)) if per_layer < 1.0 else 0


class AnnealResult(BaseModel):
    """Output of a sampler or exact run."""

    mode: RunMode
    final_states: list[int] | None = None
    final_marginal: list[float] | None = None
    total_jumps: int = 0
    layer_jumps: list[int] = Field(default_factory=list)
    elapsed_s: float = 0.0
    seed: int | None = None

    @model_validator(mode="after")
    def output_matches_mode(self) -> AnnealResult:
        if self.mode == RunMode.SAMPLE and self.final_states is None:
            raise ValueError("sampler results carry final states")
        if self.mode == RunMode.EXACT:
            if self.final_marginal is None:
                raise ValueError("exact results carry a final marginal")
            if not math.isclose(sum(self.final_marginal), 1.0, abs_tol=1e-9):
                raise ValueError("final marginal must sum to 1")
        return self

    def empirical_counts(self, size: int) -> list[int]:
        """Histogram of sampled final states over ``size`` states."""
        counts = [0] * size
        for s in self.final_states or []:
            counts[s] += 1
        return counts


class ErrorBoundReport(BaseModel):
    """Measured final KL next to the action and stability terms of the bound."""

    eps: float
    action: float
    horizon: float
    layers: int
    delta: float = Field(description="Measured local stability over one layer")
    init_kl: float
    action_term: float = Field(description="(1 + delta) * A / (4T)")
    stability_term: float = Field(description="2 * delta * T")
    bound: float
    measured_kl: float
    passed: bool
    decomposition_holds: bool

    def __repr__(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"<ErrorBoundReport {status} kl={self.measured_kl:.3e} eps={self.eps} "
            f"bound={self.bound:.3e}>"
        )


# ---------------------------------------------------------------------------
# Symmetry
# ---------------------------------------------------------------------------


class SymmetryReport(BaseModel):
    """Outcome of checking that a projection preserves a chain's symmetry."""

    passed: bool
    measure_violation: float = 0.0
    measure_fiber: str | None = None
    kernel_violation: float = 0.0
    kernel_fiber: str | None = None
    failures: list[str] = Field(default_factory=list)


class MetricDerivativeComparison(BaseModel):
    """Squared metric derivatives on a full and a projected space."""

    full: float
    projected: float
    gap: float = Field(description="Relative gap |full - projected| / max(full, tiny)")


# ---------------------------------------------------------------------------
# Models
# ---------------------------------------------------------------------------


class LandscapeReport(BaseModel):
    """Shape of the projected measure on nonnegative magnetizations."""

    n: int
    beta: float
    shape: LandscapeShape
    mode: int = Field(description="Magnetization maximizing the projected measure")
    mode_bound: float | None = None
    mode_bound_holds: bool | None = None
    must_decrease: bool = False
    middle_bound_holds: bool | None = None

    @property
    def consistent(self) -> bool:
        """True when every landscape check that applies at this beta holds."""
        if self.mode_bound_holds is False or self.middle_bound_holds is False:
            return False
        if self.must_decrease and self.shape != LandscapeShape.DECREASING:
            return False
        return self.shape != LandscapeShape.OTHER


class IsingComplexityReport(BaseModel):
    n: int
    beta: float
    eps: float
    action: float
    curve: ActionReport = Field(description="Per-node speeds and quadrature error")
    action_bound: float
    horizon: float
    layers: int
    horizon_rule: HorizonRule
    stability_window: float
    final_kl: float | None = None
    passed: bool | None = None


class PottsActionReport(BaseModel):
    """Exact folded-chain action next to the constructive flux bound."""

    exact: ActionReport
    constructive: float
    constructive_samples: list[float] = Field(default_factory=list)
    holds: bool


class InitCertificate(BaseModel):
    """KL between the low-temperature Gibbs measure and the initializer mixture."""

    n: int
    q: int
    eps: float
    beta0: float
    kl: float
    threshold: float
    monochrome_mass: float
    space: StateSpace
    certified: bool


class PottsComplexityReport(BaseModel):
    n: int
    q: int
    beta: float
    beta0: float
    eps: float
    action: float
    horizon: float
    layers: int
    horizon_rule: HorizonRule
    init_kl: float
    final_kl: float | None = None
    full_space_kl: float | None = None
    stability: float | None = None
    passed: bool | None = None


# ---------------------------------------------------------------------------
# Verification suites
# ---------------------------------------------------------------------------


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""
    elapsed_s: float = 0.0


class SuiteReport(BaseModel):
    suite: str
    checks: list[CheckResult] = Field(default_factory=list)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)
