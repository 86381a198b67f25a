"""The distributed-training inefficiency factor eta and its subfactors.

eta = eta_h * eta_comp * eta_rep * eta_act, each in (0, 1]:

* eta_h      -- staleness from taking h local steps between syncs,
                1 - alpha(N) log10(h).
* eta_comp   -- quality loss from pseudo-gradient compression.
* eta_rep    -- divergence from averaging across replicas. Modeled as
                R^(-gamma) where gamma grows with the token staleness of a
                sync interval (h * tokens_per_step) and shrinks with model
                size: more replicas, longer intervals, and smaller models
                all diverge more.
* eta_act    -- activation compression across pipeline boundaries,
                f_act^(stages - 1); only applied in pipeline mode.

The gamma and alpha shapes are calibrated against observed multi-node runs
(see benchmarks.calibration_rows); calibrate_efficiency refits them.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import least_squares

from .errors import DegenerateFitError

DEFAULT_TOKENS_PER_STEP = 524288.0


class Mode(enum.Enum):
    FLAT = "flat"
    HIERARCHICAL = "hierarchical"
    PIPELINE = "pipeline"

    @classmethod
    def parse(cls, text: str) -> "Mode":
        t = text.strip().lower()
        for m in cls:
            if m.value.startswith(t) and t:
                return m
        raise ValueError(f"unknown mode {text!r} (flat, hierarchical, or pipeline)")


class ScenarioMode(enum.Enum):
    OPTIMISTIC = "optimistic"
    EXPECTED = "expected"
    CONSERVATIVE = "conservative"

    @classmethod
    def parse(cls, text: str) -> "ScenarioMode":
        t = text.strip().lower()
        for m in cls:
            if m.value == t:
                return m
        raise ValueError(f"unknown scenario mode {text!r}")


# Per-scenario anchors: compression quality factor at 150x, and the
# per-pipeline-boundary activation factor. The conservative activation value
# compounds to ~0.56 over an 8-stage pipeline.
COMPRESSION_ANCHOR_150 = {
    ScenarioMode.OPTIMISTIC: 0.995,
    ScenarioMode.EXPECTED: 0.99,
    ScenarioMode.CONSERVATIVE: 0.97,
}
F_ACT = {
    ScenarioMode.OPTIMISTIC: 0.98,
    ScenarioMode.EXPECTED: 0.95,
    ScenarioMode.CONSERVATIVE: 0.92,
}


@dataclass(frozen=True)
class DilocoConfig:
    """Low-communication training settings for one run."""

    h: int  # inner steps between syncs
    compression: float = 150.0  # pseudo-gradient compression ratio
    mode: Mode = Mode.FLAT
    replicas: int = 1  # model copies averaging into the global update
    groups: tuple[int, int] | None = None  # hierarchical (outer, inner)
    stages: int = 1  # pipeline stages per replica

    def __post_init__(self):
        if self.h < 1:
            raise ValueError("h must be >= 1")
        if self.compression < 1:
            raise ValueError("compression must be >= 1")
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")
        if self.stages < 1:
            raise ValueError("stages must be >= 1")
        if self.mode is not Mode.PIPELINE and self.stages != 1:
            raise ValueError("stages > 1 requires pipeline mode")


@dataclass(frozen=True)
class EfficiencyParams:
    """Calibrated constants behind the eta subfactors."""

    alpha0: float = 0.05  # sync-penalty coefficient at n_ref
    n_ref: float = 250e9  # reference model size, parameters
    kappa: float = 0.0  # size-scaling exponent of alpha(N)
    gamma0: float = 0.270  # divergence exponent at n_ref, fully stale
    gamma_slope: float = 0.029  # size-scaling exponent of gamma(N)
    sync_tokens_ref: float = 393216.0  # staleness onset, tokens per sync
    sync_tokens_scale: float = 0.35  # log10-width of the staleness ramp
    eta_comp_table: tuple[tuple[float, float], ...] = ((1.0, 1.0), (150.0, 0.99))
    f_act: float = 0.95  # per-pipeline-boundary activation factor
    scenario: ScenarioMode = ScenarioMode.EXPECTED
    floor: float = 0.01  # clamp floor for every factor

    @classmethod
    def for_scenario(cls, scenario: ScenarioMode, **overrides) -> "EfficiencyParams":
        base = cls(
            eta_comp_table=((1.0, 1.0), (150.0, COMPRESSION_ANCHOR_150[scenario])),
            f_act=F_ACT[scenario],
            scenario=scenario,
        )
        return replace(base, **overrides) if overrides else base

    def alpha(self, n_params: float) -> float:
        return self.alpha0 * (self.n_ref / n_params) ** self.kappa

    def gamma(self, n_params: float, sync_tokens: float) -> float:
        """Replica-divergence exponent at a given per-sync token staleness."""
        return self.gamma0 * (self.n_ref / n_params) ** self.gamma_slope * self.staleness(
            sync_tokens
        )

    def staleness(self, sync_tokens: float) -> float:
        """Saturating ramp in log10(tokens between syncs), in [0, 1)."""
        if sync_tokens <= self.sync_tokens_ref:
            return 0.0
        return math.tanh(
            math.log10(sync_tokens / self.sync_tokens_ref) / self.sync_tokens_scale
        )


@dataclass(frozen=True)
class EfficiencyBreakdown:
    eta_h: float
    eta_comp: float
    eta_rep: float
    eta_act: float
    eta: float
    clamped: tuple[str, ...] = ()


def _clamp(value: float, p: EfficiencyParams) -> tuple[float, bool]:
    if value > 1.0:
        return 1.0, True
    if value < p.floor:
        return p.floor, True
    return value, False


def sync_penalty(n_params: float, h: int, p: EfficiencyParams | None = None) -> float:
    """eta_h = 1 - alpha(N) log10(h)."""
    if h < 1:
        raise ValueError("h must be >= 1")
    p = p or EfficiencyParams()
    value, _ = _clamp(1.0 - p.alpha(n_params) * math.log10(h), p)
    return value


def compression_penalty(ratio: float, p: EfficiencyParams | None = None) -> float:
    """Quality factor for a pseudo-gradient compression ratio.

    Log-linear interpolation between the anchors in eta_comp_table; the last
    segment extrapolates beyond the table.
    """
    if ratio < 1:
        raise ValueError("compression ratio must be >= 1")
    p = p or EfficiencyParams()
    table = sorted(p.eta_comp_table)
    if ratio <= table[0][0]:
        return table[0][1]
    lo = table[0]
    hi = table[-1]
    for a, b in zip(table, table[1:]):
        if ratio <= b[0]:
            lo, hi = a, b
            break
    else:
        lo, hi = table[-2], table[-1]
    t = (math.log(ratio) - math.log(lo[0])) / (math.log(hi[0]) - math.log(lo[0]))
    value, _ = _clamp(lo[1] + t * (hi[1] - lo[1]), p)
    return value


def replica_penalty(
    replicas: int,
    n_params: float,
    p: EfficiencyParams | None = None,
    sync_tokens: float = 19 * DEFAULT_TOKENS_PER_STEP,
) -> float:
    """eta_rep = replicas^(-gamma(N, sync_tokens))."""
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    if replicas == 1:
        return 1.0
    p = p or EfficiencyParams()
    value, _ = _clamp(replicas ** (-p.gamma(n_params, sync_tokens)), p)
    return value


def activation_penalty(
    stages: int, p: EfficiencyParams | None = None, f_act: float | None = None
) -> float:
    """eta_act = f_act^(stages - 1); one factor per pipeline boundary."""
    if stages < 1:
        raise ValueError("stages must be >= 1")
    p = p or EfficiencyParams()
    f = p.f_act if f_act is None else f_act
    value, _ = _clamp(f ** (stages - 1), p)
    return value


def total_inefficiency(
    cfg: DilocoConfig,
    n_params: float,
    p: EfficiencyParams | None = None,
    tokens_per_step: float = DEFAULT_TOKENS_PER_STEP,
) -> EfficiencyBreakdown:
    """Combine the subfactors for one configuration.

    Replica divergence counts every model copy: in hierarchical mode each node
    still trains its own copy, so cfg.replicas is the full node count there;
    in pipeline mode it is the number of pipeline groups. eta_act is applied
    only in pipeline mode.
    """
    p = p or EfficiencyParams()
    clamps: list[str] = []

    value = 1.0 - p.alpha(n_params) * math.log10(cfg.h)
    eta_h, c = _clamp(value, p)
    if c and (value < p.floor or value > 1.0):
        clamps.append("eta_h")

    eta_comp = compression_penalty(cfg.compression, p)

    if cfg.replicas == 1:
        eta_rep = 1.0
    else:
        raw = cfg.replicas ** (-p.gamma(n_params, cfg.h * tokens_per_step))
        eta_rep, c = _clamp(raw, p)
        if c:
            clamps.append("eta_rep")

    if cfg.mode is Mode.PIPELINE and cfg.stages > 1:
        raw = p.f_act ** (cfg.stages - 1)
        eta_act, c = _clamp(raw, p)
        if c:
            clamps.append("eta_act")
    else:
        eta_act = 1.0

    eta = eta_h * eta_comp * eta_rep * eta_act
    return EfficiencyBreakdown(
        eta_h=eta_h,
        eta_comp=eta_comp,
        eta_rep=eta_rep,
        eta_act=eta_act,
        eta=eta,
        clamped=tuple(clamps),
    )


@dataclass(frozen=True)
class CalibrationRow:
    """One observed run: configuration plus measured efficiency."""

    diloco: DilocoConfig
    n_params: float
    eta: float
    tokens_per_step: float = DEFAULT_TOKENS_PER_STEP


def calibrate_efficiency(
    rows: list[CalibrationRow], base: EfficiencyParams | None = None
) -> EfficiencyParams:
    """Least-squares fit of (kappa, gamma0, gamma_slope) to observed etas.

    eta_comp and eta_act stay at their anchored values. gamma_slope is
    bounded at zero from below so the divergence penalty never shrinks for
    smaller models. Deterministic for a fixed input ordering.
    """
    base = base or EfficiencyParams()
    if len(rows) < 3:
        raise DegenerateFitError(f"need >= 3 rows to fit 3 parameters, got {len(rows)}")
    if len({row.n_params for row in rows}) < 2:
        raise DegenerateFitError("need >= 2 distinct model sizes to identify kappa")
    if len({row.diloco.replicas for row in rows}) < 2:
        raise DegenerateFitError("need >= 2 distinct replica counts to identify gamma")

    log_eta = np.array([math.log(row.eta) for row in rows])

    def residuals(x: np.ndarray) -> np.ndarray:
        params = replace(base, kappa=x[0], gamma0=x[1], gamma_slope=x[2])
        pred = [
            total_inefficiency(r.diloco, r.n_params, params, r.tokens_per_step).eta
            for r in rows
        ]
        return np.log(np.array(pred)) - log_eta

    fit = least_squares(
        residuals,
        x0=np.array([base.kappa, base.gamma0, base.gamma_slope]),
        bounds=(np.array([0.0, 0.01, 0.0]), np.array([2.0, 1.0, 0.5])),
        xtol=1e-14,
        ftol=1e-14,
        gtol=1e-14,
    )
    return replace(base, kappa=float(fit.x[0]), gamma0=float(fit.x[1]), gamma_slope=float(fit.x[2]))
