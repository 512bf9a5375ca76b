import math

import numpy as np
import pytest

from qsp.completion import (
    NormTooLarge,
    PairingFailed,
    ParityMismatch,
    RootPairing,
    build_G,
    build_target_poly,
    complete,
    find_roots,
    pair_roots,
)
from qsp.laurent import LaurentPoly, Parity


def lp(coeff_map):
    return LaurentPoly.from_coeff_map(coeff_map)


def random_parity_target(rng, max_deg=64, sup=0.99):
    """Random even or odd real polynomial scaled to the requested sup-norm."""
    par = int(rng.integers(0, 2))
    n = int(rng.integers(1, max_deg + 1))
    n -= (n % 2) != par
    if n < 1:
        n = 1 + par
    ks = np.arange(-n, n + 1)
    coeffs = np.zeros(2 * n + 1)
    mask = (ks % 2 == 0) if par == 0 else (ks % 2 != 0)
    coeffs[mask] = rng.standard_normal(int(mask.sum()))
    F = LaurentPoly(coeffs)
    return (sup / F.supnorm(64 * (n + 1))) * F


def test_target_poly_of_unimodular_is_zero():
    P = build_target_poly(LaurentPoly.monomial(1))
    assert P.is_zero()


def test_target_poly_of_cosine():
    P = build_target_poly(lp({1: 0.5, -1: 0.5}))
    assert P == lp({0: 0.5, 2: -0.25, -2: -0.25})


def test_target_poly_of_zero():
    assert build_target_poly(LaurentPoly.zero()) == LaurentPoly.one()


def test_target_poly_rejects_large_norm():
    with pytest.raises(NormTooLarge):
        build_target_poly(lp({1: 0.8, -1: 0.8}))


def test_find_roots_of_cosine_target():
    # P = (2 - w^2 - w^-2)/4 has the double roots {1, 1, -1, -1}
    P = lp({0: 0.5, 2: -0.25, -2: -0.25})
    roots = np.sort_complex(find_roots(P))
    assert np.allclose(roots, [-1, -1, 1, 1], atol=1e-7)


def test_find_roots_rejects_degenerate():
    with pytest.raises(ValueError):
        find_roots(LaurentPoly.zero())


def test_find_roots_closure_on_random_instance():
    rng = np.random.default_rng(10)
    F = random_parity_target(rng, max_deg=8)
    P = build_target_poly(F)
    roots = find_roots(P)
    assert roots.size == 2 * P.degree
    as_set = np.sort_complex(roots)
    for mapped in (1.0 / roots, np.conj(roots)):
        assert np.allclose(np.sort_complex(mapped), as_set, atol=1e-6)


def test_pair_roots_constructed_input():
    roots = [2.0, 0.5, 3j, -3j, 1j / 3, -1j / 3]
    pairing = pair_roots(roots)
    assert len(pairing.real_pairs) == 1
    assert sorted(abs(z) for z in pairing.real_pairs[0]) == pytest.approx([0.5, 2.0])
    assert len(pairing.quads) == 1
    assert len(pairing.unit_roots) == 0


def test_pair_roots_unit_doubles():
    pairing = pair_roots([1.0, 1.0, -1.0, -1.0])
    assert len(pairing.unit_roots) == 2
    assert not pairing.real_pairs and not pairing.quads


def test_pair_roots_group_sizes_on_random_instance():
    rng = np.random.default_rng(11)
    F = random_parity_target(rng, max_deg=8, sup=0.9)
    P = build_target_poly(F)
    pairing = pair_roots(find_roots(P))
    total = 2 * len(pairing.real_pairs) + 4 * len(pairing.quads) + 2 * len(pairing.unit_roots)
    assert total == 2 * P.degree


def test_pair_roots_reports_orphans():
    with pytest.raises(PairingFailed):
        pair_roots([2.0, 0.5, 3.0])


def test_build_G_cosine_worked_example():
    F = lp({1: 0.5, -1: 0.5})
    P = build_target_poly(F)
    pairing = pair_roots(find_roots(P))
    G, report = build_G(pairing, P, rng_seed=0, parity=Parity.ODD)
    sign = 1.0 if G[1].real > 0 else -1.0
    assert sign * G == lp({1: 0.5, -1: -0.5})
    assert report.residual <= 1e-12
    assert report.prop_constant == pytest.approx(0.25)


def test_build_G_random_instance_residual():
    rng = np.random.default_rng(12)
    F = random_parity_target(rng, max_deg=8, sup=0.9)
    P = build_target_poly(F)
    G, report = build_G(pair_roots(find_roots(P)), P, rng_seed=5, parity=F.parity())
    assert report.residual <= 1e-10
    assert G.is_real


def test_complete_unimodular():
    U, report = complete(LaurentPoly.monomial(1))
    assert U.B.is_zero()
    assert report.residual <= 1e-14


def test_complete_monomial_scalar():
    # F = 0.6 w needs an odd G with G G* = 1 - 0.36
    U, report = complete(lp({1: 0.6}), rng_seed=3)
    assert U.B.parity() is Parity.ODD
    assert U.unitarity_residual() <= 1e-12


def test_complete_cosine_gives_planar_rotation():
    F = lp({1: 0.5, -1: 0.5})
    U, _ = complete(F, rng_seed=0)
    theta = 0.73
    c, s = math.cos(theta), math.sin(theta)
    got = U(theta)
    want = np.array([[c, -s], [s, c]])
    if not np.allclose(got, want, atol=1e-12):
        want = np.array([[c, s], [-s, c]])  # mirrored branch G -> -G
    assert np.allclose(got, want, atol=1e-12)


def test_complete_rejects_mixed_parity():
    with pytest.raises(ParityMismatch):
        complete(lp({0: 0.3, 1: 0.3}))


def test_complete_random_parity_targets():
    rng = np.random.default_rng(13)
    for trial in range(25):
        F = random_parity_target(rng)
        U, report = complete(F, rng_seed=trial)
        assert report.residual <= 1e-9
        assert U.B.is_zero() or U.B.parity() == F.parity()
        assert U.B.is_real


def test_complete_determinism():
    rng = np.random.default_rng(14)
    F = random_parity_target(rng, max_deg=24, sup=0.95)
    U1, r1 = complete(F, rng_seed=42)
    U2, r2 = complete(F, rng_seed=42)
    assert np.array_equal(U1.B.coeffs, U2.B.coeffs)
    assert r1.prop_constant == r2.prop_constant
    U3, _ = complete(F, rng_seed=43)
    # a different seed picks different roots almost surely for degree > 2
    if F.degree > 2:
        assert not np.array_equal(U1.B.coeffs, U3.B.coeffs)


def test_hamsim_target_completion():
    from qsp.hamsim import HamsimSpec, build_F

    spec = HamsimSpec(tau=10.0, eps=1e-3, eta=0.999, cap_coeff=0.45e-3)
    U, report = complete(build_F(spec), rng_seed=0)
    assert U.unitarity_residual() <= 1e-8


def test_root_pairing_dataclass_roundtrip():
    pairing = RootPairing(real_pairs=[(2.0, 0.5)], quads=[], unit_roots=[], tol=1e-7)
    assert pairing.all_roots().size == 2
