"""Angle sequences for quantum signal processing in plain double precision.

Given a real Laurent polynomial bounded by 1 on the unit circle, the pipeline
completes it to a unitary element (root finding), splits that element into
degree-1 factors (recursive halving, with sequential carving as a baseline),
reads off the X-rotation angles, and certifies the result by rebuilding the
circuit effect.
"""

from .algebra import (
    ANGLE_CONVENTION,
    AngleSequence,
    HaahElement,
    LowElement,
    identity_element,
    primitive_factor,
    product,
    unitarity_residual,
    w_tilde,
    xrotation,
)
from .cli_bench import (
    BenchRecord,
    bench_region,
    bench_runtime,
    default_eta,
    find_angles,
    run_hamsim,
)
from .completion import (
    CompletionReport,
    NegativeConstant,
    NormTooLarge,
    PairingFailed,
    ParityMismatch,
    RootFindingDiverged,
    RootPairing,
    build_G,
    build_target_poly,
    complete,
    find_roots,
    pair_roots,
)
from .decomposition import (
    DegreeMismatch,
    HalvingSystem,
    IllConditionedWarning,
    NotPrimitive,
    build_halving_system,
    carve,
    decompose,
    extract_angles,
    solve_half,
)
from .hamsim import (
    HamsimSpec,
    bessel_coeffs,
    build_F,
    capitalize,
    min_coeff_magnitude,
    truncation_degree,
)
from .laurent import LaurentPoly, Parity
from .verify import RunReport, measure, reconstruct

__all__ = [
    "ANGLE_CONVENTION",
    "AngleSequence",
    "BenchRecord",
    "CompletionReport",
    "DegreeMismatch",
    "HaahElement",
    "HalvingSystem",
    "HamsimSpec",
    "IllConditionedWarning",
    "LaurentPoly",
    "LowElement",
    "NegativeConstant",
    "NormTooLarge",
    "NotPrimitive",
    "PairingFailed",
    "Parity",
    "ParityMismatch",
    "RootFindingDiverged",
    "RootPairing",
    "RunReport",
    "bench_region",
    "bench_runtime",
    "bessel_coeffs",
    "build_F",
    "build_G",
    "build_halving_system",
    "build_target_poly",
    "capitalize",
    "carve",
    "complete",
    "decompose",
    "default_eta",
    "extract_angles",
    "find_angles",
    "find_roots",
    "identity_element",
    "measure",
    "min_coeff_magnitude",
    "pair_roots",
    "primitive_factor",
    "product",
    "reconstruct",
    "run_hamsim",
    "solve_half",
    "truncation_degree",
    "unitarity_residual",
    "w_tilde",
    "xrotation",
]
