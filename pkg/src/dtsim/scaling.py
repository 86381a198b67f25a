"""Parametric loss scaling: compute identity C = 6ND, compute-optimal
allocation, overtraining ratio, and the quality penalty chi.

chi compares a model against the compute-optimal frontier: it is the ratio
C_equivalent / C where C_equivalent is the (smaller) compute at which an
optimally allocated model reaches the same loss.
"""

from __future__ import annotations

from dataclasses import dataclass

# Default scaling-law constants: the corrected replication fit of the
# compute-optimal training law L = E + A/N^alpha + B/D^beta.
DEFAULT_E = 1.8172
DEFAULT_A = 482.01
DEFAULT_B = 2085.43
DEFAULT_ALPHA = 0.3478
DEFAULT_BETA = 0.3658

# Baseline tokens-per-parameter ratio defining the overtraining ratio OT = 1.
DEFAULT_R_OPT = 20.0


@dataclass(frozen=True)
class ChinchillaParams:
    """Coefficients of L(N, D) = E + A/N^alpha + B/D^beta."""

    E: float = DEFAULT_E
    A: float = DEFAULT_A
    B: float = DEFAULT_B
    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA

    def __post_init__(self):
        if min(self.E, self.A, self.B, self.alpha, self.beta) <= 0:
            raise ValueError("all scaling-law constants must be positive")
        if not (0 < self.alpha < 1 and 0 < self.beta < 1):
            raise ValueError("alpha and beta must lie in (0, 1)")

    @property
    def loss_decay_exponent(self) -> float:
        """Excess loss on the optimal frontier falls as (C/6)^-c with this c."""
        return self.alpha * self.beta / (self.alpha + self.beta)


@dataclass(frozen=True)
class TrainedModel:
    """A (parameters, training tokens) pair."""

    n_params: float
    d_tokens: float

    def __post_init__(self):
        if self.n_params <= 0 or self.d_tokens <= 0:
            raise ValueError("n_params and d_tokens must be positive")


def training_compute(model: TrainedModel) -> float:
    """Total training FLOPs, C = 6ND."""
    return 6.0 * model.n_params * model.d_tokens


def loss(model: TrainedModel, p: ChinchillaParams | None = None) -> float:
    p = p or ChinchillaParams()
    return p.E + p.A / model.n_params**p.alpha + p.B / model.d_tokens**p.beta


def chinchilla_optimal(compute: float, p: ChinchillaParams | None = None) -> TrainedModel:
    """The (N*, D*) allocation minimizing loss subject to 6ND = compute.

    Closed form: N* = G (C/6)^a with a = beta/(alpha+beta) and
    G = (alpha A / (beta B))^(1/(alpha+beta)).
    """
    if compute <= 0:
        raise ValueError("compute must be positive")
    p = p or ChinchillaParams()
    a = p.beta / (p.alpha + p.beta)
    g = (p.alpha * p.A / (p.beta * p.B)) ** (1.0 / (p.alpha + p.beta))
    n_opt = g * (compute / 6.0) ** a
    return TrainedModel(n_params=n_opt, d_tokens=compute / 6.0 / n_opt)


def overtraining_ratio(model: TrainedModel, r_opt: float = DEFAULT_R_OPT) -> float:
    """Training tokens relative to the r_opt tokens-per-parameter baseline."""
    return model.d_tokens / (r_opt * model.n_params)


def quality_penalty(model: TrainedModel, p: ChinchillaParams | None = None) -> float:
    """chi in (0, 1]: fraction of the model's compute an optimally allocated
    run would need to reach the same loss.

    With excess loss dL = L - E, the frontier satisfies dL*(C) ~ (C/6)^-c, so
    chi = (dL*(C) / dL(model))^(1/c) with c = alpha beta / (alpha + beta).
    Evaluating dL*(C) through chinchilla_optimal keeps chi == 1.0 exact on the
    frontier.
    """
    p = p or ChinchillaParams()
    compute = training_compute(model)
    excess = loss(model, p) - p.E
    excess_opt = loss(chinchilla_optimal(compute, p), p) - p.E
    if excess <= 0:
        return 1.0
    chi = (excess_opt / excess) ** (1.0 / p.loss_decay_exponent)
    return min(1.0, max(chi, 1e-12))
