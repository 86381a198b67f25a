"""Exception types shared across the simulator."""


class DtsimError(Exception):
    """Base class for all simulator errors."""


class UnknownPresetError(DtsimError):
    """Raised when a hardware preset name is not in the catalog."""

    def __init__(self, name: str, suggestion: str | None = None):
        self.name = name
        self.suggestion = suggestion
        msg = f"unknown hardware preset {name!r}"
        if suggestion:
            msg += f" (did you mean {suggestion!r}?)"
        super().__init__(msg)


class UnpricedNodeError(DtsimError):
    """Raised when a cost is requested for a preset that carries no price."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(
            f"preset {name!r} has no per-chip price; supply price_usd to cost it"
        )


class InfeasibleConfigError(DtsimError):
    """A run configuration violates a hard constraint.

    ``constraint`` names the binding constraint so callers (CLI exit code 3,
    HTTP 422) can surface it.
    """

    def __init__(self, constraint: str, detail: str):
        self.constraint = constraint
        self.detail = detail
        super().__init__(f"infeasible configuration [{constraint}]: {detail}")


class InfeasibleTargetError(DtsimError):
    """No point in the search grid reaches the optimization target."""

    def __init__(self, target_metric: str, target_value: float, best_achieved: float):
        self.target_metric = target_metric
        self.target_value = target_value
        self.best_achieved = best_achieved
        super().__init__(
            f"no feasible configuration reaches {target_metric} >= {target_value:.3e}"
            f" (best achieved: {best_achieved:.3e})"
        )


class DegenerateFitError(DtsimError):
    """Calibration input does not identify the fit parameters."""


class UnboundedTimeError(DtsimError):
    """All growth rates are zero, so the training-time bound is infinite."""


class ScenarioParseError(DtsimError):
    """A scenario file failed to parse; carries the offending line and key."""

    def __init__(self, line_no: int, key: str, detail: str):
        self.line_no = line_no
        self.key = key
        self.detail = detail
        super().__init__(f"line {line_no}: key {key!r}: {detail}")
