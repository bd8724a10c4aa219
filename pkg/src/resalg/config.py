"""Run configuration and centralized tolerances."""

from __future__ import annotations

from dataclasses import dataclass, field, asdict


@dataclass
class Tolerances:
    """Default numeric gates, as pinned by the acceptance criteria."""

    relations: float = 1e-10        # operator algebra relations on blocks
    casimir: float = 1e-10          # Casimir block values
    anchor: float = 1e-12           # the exact 2x2 model eigenvalue pair
    model_match: float = 1e-10      # model spectrum vs independent routes
    jacobi: float = 1e-10           # cyclic residual at sampled points
    kernel: float = 1e-8            # coherent-state norm vs kernel
    intertwine: float = 1e-10       # intertwining residual
    kahler: float = 1e-6            # quantized-leaf integrals
    growth_factor: float = 3.0      # allowed growth of the h^2 constant
    slope_dev: float = 0.2          # conjugation-residual slope tolerance
    quartic_oracle: float = 1e-10   # symbolic vs time-quadrature averages
    drift: float = 1e-8             # Casimir/energy drift over long runs
    closed_form: float = 1e-8       # reduced closed form vs direct integration
    ebk_rel: float = 0.05           # area ladder vs model spread at n = 40

    def merged(self, overrides: dict | None) -> "Tolerances":
        if not overrides:
            return self
        data = asdict(self)
        for k, v in overrides.items():
            if k not in data:
                raise KeyError(f"unknown tolerance {k!r}")
            data[k] = float(v)
        return Tolerances(**data)


@dataclass
class RunConfig:
    """One CLI invocation, echoed verbatim into the result envelope."""

    command: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    out: str | None = None
    fmt: str = "json"
    profile: str = "fast"
    tolerances: Tolerances = field(default_factory=Tolerances)

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "params": self.params,
            "seed": self.seed,
            "format": self.fmt,
            "profile": self.profile,
            "tolerances": asdict(self.tolerances),
        }
