"""Target polynomials for Hamiltonian simulation: truncated, scaled Bessel series."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .laurent import LaurentPoly, Parity

# Truncating the series to guarantee a tenth of the error budget leaves the
# rest for completion and decomposition.
TAIL_BUDGET_FRACTION = 0.1

# Magnitudes are rescaled mid-recurrence past this point to dodge overflow.
_RESCALE_LIMIT = 1e280


@dataclass(frozen=True)
class HamsimSpec:
    """Inputs for the simulation target exp(tau·(w^2 - w^-2)/2)."""

    tau: float
    eps: float
    eta: float
    cap_coeff: float
    seed: int = 0

    def __post_init__(self):
        if self.tau < 0:
            raise ValueError("tau must be nonnegative")
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        if not 0 < self.eta < 1:
            raise ValueError("eta must lie in (0, 1)")
        if self.cap_coeff < 0:
            raise ValueError("cap_coeff must be nonnegative")


def bessel_coeffs(tau: float, kmax: int) -> np.ndarray:
    """J_0(tau)..J_kmax(tau) by Miller's downward recurrence.

    The trial sequence starts well above both kmax and the turning point
    k ~ tau, runs J_{k-1} = (2k/tau) J_k - J_{k+1} downward, and is fixed by
    the normalization J_0 + 2 sum_j J_{2j} = 1. Relative accuracy is around
    1e-14 for every entry above the underflow floor.
    """
    if kmax < 1:
        raise ValueError("kmax must be at least 1")
    if tau == 0.0:
        out = np.zeros(kmax + 1)
        out[0] = 1.0
        return out
    # Start offset calibrated against the power-series values at tau in
    # {1, 10, 100}: sqrt growth keeps the seeded error below 1e-14 after the
    # downward sweep.
    top = max(kmax, int(math.ceil(abs(tau))))
    start = top + max(32, int(math.ceil(2.0 * math.sqrt(40.0 * (top + 1)))))
    vals = np.zeros(start + 2)
    vals[start + 1] = 0.0
    vals[start] = 1e-30
    for k in range(start, 0, -1):
        vals[k - 1] = (2.0 * k / tau) * vals[k] - vals[k + 1]
        if abs(vals[k - 1]) > _RESCALE_LIMIT:
            vals[k - 1 :] /= _RESCALE_LIMIT
    norm = vals[0] + 2.0 * np.sum(vals[2::2])
    return vals[: kmax + 1] / norm


def truncation_degree(tau: float, eps: float) -> int:
    """Smallest even n with twice the Bessel tail beyond n/2 at or below a
    tenth of eps, capped by the closed-form degree 2*ceil((e/2)tau + ln(1/eps))."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    cap_half = int(math.ceil((math.e / 2.0) * tau + math.log(1.0 / eps)))
    k_hi = cap_half + 40
    js = np.abs(bessel_coeffs(tau, k_hi))
    # tails[m] = 2 * sum_{k > m} |J_k|; beyond k_hi the terms are negligible.
    tails = 2.0 * (np.cumsum(js[::-1])[::-1] - js)
    budget = TAIL_BUDGET_FRACTION * eps
    below = np.nonzero(tails <= budget)[0]
    m = int(below[0]) if below.size else cap_half
    return 2 * min(m, cap_half)


def build_F(spec: HamsimSpec) -> LaurentPoly:
    """eta-scaled truncation of sum_k J_k(tau) w^{2k}; even parity, real."""
    if spec.tau == 0.0:
        return LaurentPoly([spec.eta])
    n = truncation_degree(spec.tau, spec.eps)
    half = n // 2
    if half == 0:
        j0 = float(bessel_coeffs(spec.tau, 1)[0])
        return LaurentPoly([spec.eta * j0])
    js = bessel_coeffs(spec.tau, half)
    coeffs = np.zeros(2 * n + 1)
    for k in range(-half, half + 1):
        # J_{-k} = (-1)^k J_k
        jk = js[abs(k)] * (-1.0 if (k < 0 and k % 2 != 0) else 1.0)
        coeffs[2 * k + n] = spec.eta * jk
    return LaurentPoly(coeffs)


def min_coeff_magnitude(F: LaurentPoly) -> float:
    """The smallest retained coefficient magnitude (the stability parameter
    the capitalization step is meant to lift)."""
    mags = np.abs(F.coeffs)
    mags = mags[mags > 0]
    return float(np.min(mags)) if mags.size else 0.0


def capitalize(F: LaurentPoly, cap_coeff: float) -> LaurentPoly:
    """Add cap_coeff·(w^m + w^-m) at m = deg(F) + 2, lifting the leading
    coefficients to the size of the error budget without changing parity."""
    if cap_coeff == 0.0:
        return F
    if F.parity() is Parity.MIXED:
        raise ValueError("capitalization needs a parity-pure polynomial")
    deg = F.degree
    m = (0 if deg == -math.inf else int(deg)) + 2
    return F + LaurentPoly.from_coeff_map({m: cap_coeff, -m: cap_coeff})
