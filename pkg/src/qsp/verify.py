"""Certification: rebuild the circuit effect from angles and measure deviation."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .algebra import AngleSequence, LowElement, primitive_factor, product, xrotation
from .laurent import LaurentPoly


@dataclass
class RunReport:
    """Error certificate for one angle-finding run."""

    max_error: float
    unitarity: float
    min_success_prob: float
    degree: int
    mode: str = ""
    wall_times: dict = field(default_factory=dict)
    achievable: bool | None = None

    def to_json_dict(self) -> dict:
        return {
            "max_error": self.max_error,
            "unitarity": self.unitarity,
            "min_success_prob": self.min_success_prob,
            "degree": self.degree,
            "mode": self.mode,
            "wall_times": dict(self.wall_times),
            "achievable": self.achievable,
        }


def reconstruct(angles: AngleSequence) -> LowElement:
    """Left-to-right product E(a_d)···E(a_1)·Rx(a_0), multiplied as a balanced
    tree so roundoff accumulates with the logarithm of the factor count."""
    factors = [primitive_factor(a) for a in angles.angles]
    factors.append(xrotation(angles.alpha0))
    return product(factors)


def measure(
    angles: AngleSequence,
    F_target: LaurentPoly,
    samples: int | None = None,
    eps: float | None = None,
    mode: str = "",
    wall_times: dict | None = None,
) -> RunReport:
    """Compare the reconstructed effect against the target on the unit circle.

    Records the sampled sup deviation of the upper-left entry from the target,
    the unitarity residual of the reconstruction, and the smallest sampled
    |F_target|^2 as a floor on the post-selection success probability.
    """
    d = len(angles)
    min_samples = 4 * (d + 1)
    if samples is None:
        samples = 8 * (d + 1)
    if samples < min_samples:
        raise ValueError(f"need at least {min_samples} samples for {d} angles")
    t0 = time.perf_counter()
    rebuilt = reconstruct(angles)
    f_vals = F_target.eval_grid(samples)
    a_vals = rebuilt.A.eval_grid(samples)
    max_error = float(np.max(np.abs(a_vals - f_vals)))
    unitarity = rebuilt.unitarity_residual(samples)
    min_success = float(np.min(np.abs(f_vals) ** 2))
    times = dict(wall_times or {})
    times["verification"] = time.perf_counter() - t0
    return RunReport(
        max_error=max_error,
        unitarity=unitarity,
        min_success_prob=min_success,
        degree=d,
        mode=mode,
        wall_times=times,
        achievable=None if eps is None else bool(max_error <= eps),
    )
