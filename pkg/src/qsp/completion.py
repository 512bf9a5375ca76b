"""Unitary completion: find real G with F·F* + G·G* = 1 by factoring 1 - F·F*."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import LowElement
from .laurent import LaurentPoly, Parity

# Sampled sup-norms at exactly 1 are legitimate (the target touches the circle
# at isolated points, producing double roots there); only genuine excess fails.
NORM_SLACK = 1e-9

PAIRING_TOL = 1e-7
ROOT_RESIDUAL_TOL = 1e-6
POLISH_ITERS = 3


class CompletionError(Exception):
    pass


class NormTooLarge(CompletionError):
    pass


class RootFindingDiverged(CompletionError):
    pass


class PairingFailed(CompletionError):
    pass


class ParityMismatch(CompletionError):
    pass


class NegativeConstant(CompletionError):
    pass


@dataclass
class RootPairing:
    """Roots of the completion target grouped by the z -> 1/z and z -> conj(z) maps.

    ``unit_roots`` holds the pairs {z, 1/conj(z)} whose members sit within the
    pairing tolerance of the unit circle (double roots split by noise).
    """

    real_pairs: list = field(default_factory=list)
    quads: list = field(default_factory=list)
    unit_roots: list = field(default_factory=list)
    tol: float = PAIRING_TOL

    def all_roots(self) -> np.ndarray:
        items = []
        for grp in (*self.real_pairs, *self.quads, *self.unit_roots):
            items.extend(grp)
        return np.asarray(items, dtype=np.complex128)


@dataclass
class CompletionReport:
    prop_constant: float
    residual: float
    root_count: int
    rng_seed: int

    def to_json_dict(self) -> dict:
        return {
            "prop_constant": self.prop_constant,
            "residual": self.residual,
            "root_count": self.root_count,
            "rng_seed": self.rng_seed,
        }


def build_target_poly(F: LaurentPoly, samples: int | None = None) -> LaurentPoly:
    """P = 1 - F·F*, the nonnegative trig polynomial whose roots determine G."""
    if not F.is_real:
        raise ValueError("completion target must have real coefficients")
    if samples is None and not F.is_zero():
        samples = max(64, 16 * (F.n + 1))
    sup = F.supnorm(samples)
    if sup > 1.0 + NORM_SLACK:
        raise NormTooLarge(f"sampled sup-norm {sup} exceeds 1")
    P = 1.0 - F * F.star()
    # F F* is palindromic up to summation order; symmetrize so P == P* exactly.
    c = P.coeffs.real
    P = LaurentPoly((c + c[::-1]) / 2.0)
    if not P.is_zero():
        # |F| may poke above 1 between the sup-norm samples; P going negative
        # is the definitive sign, and dooms the real factorization.
        low = float(np.min(P.eval_grid(max(64, 8 * (P.n + 1))).real))
        if low < -NORM_SLACK:
            raise NormTooLarge(f"target exceeds 1 on the circle (min P = {low})")
    return P


def _is_even_support(c: np.ndarray, n: int) -> bool:
    ks = np.arange(-n, n + 1)
    return bool(np.all(c[ks % 2 != 0] == 0))


def _newton_polish(coeffs_asc: np.ndarray, roots: np.ndarray, iters: int) -> tuple:
    """Refine roots of the ordinary polynomial, mapping |z|>1 to 1/z on the
    reversed polynomial so evaluation never leaves the unit disk."""
    outside = np.abs(roots) > 1.0
    y = np.where(outside, 1.0 / roots, roots)
    direct_desc = coeffs_asc[::-1]
    reversed_desc = coeffs_asc  # y^N q(1/y) read in np.polyval's descending order
    dd = np.polyder(direct_desc)
    rd = np.polyder(reversed_desc)
    for _ in range(iters):
        val = np.where(outside, np.polyval(reversed_desc, y), np.polyval(direct_desc, y))
        der = np.where(outside, np.polyval(rd, y), np.polyval(dd, y))
        step = np.zeros_like(y)
        ok = np.abs(der) > 0
        step[ok] = val[ok] / der[ok]
        # Reject wild steps; near multiple roots Newton may stall but not escape.
        trust = np.abs(step) < 0.25 * (1.0 + np.abs(y))
        y = np.where(trust, y - step, y)
    val = np.where(outside, np.polyval(reversed_desc, y), np.polyval(direct_desc, y))
    scale = np.where(
        outside,
        np.polyval(np.abs(reversed_desc), np.abs(y)),
        np.polyval(np.abs(direct_desc), np.abs(y)),
    )
    rel = np.abs(val) / np.maximum(scale, 1e-300)
    polished = np.where(outside, 1.0 / y, y)
    return polished, float(np.max(rel)) if len(rel) else 0.0


def find_roots(
    P: LaurentPoly,
    polish_iters: int = POLISH_ITERS,
    residual_tol: float = ROOT_RESIDUAL_TOL,
) -> np.ndarray:
    """All 2·deg(P) roots of w^deg(P)·P(w), with multiplicity.

    When P has even support the companion solve runs on the half-degree
    polynomial in u = w^2 and the w-roots are emitted as exact ± pairs; this
    both halves the eigenproblem and makes the negation symmetry of the root
    multiset exact.
    """
    if P.is_zero() or P.degree < 1:
        raise ValueError("root finding needs deg P >= 1")
    m = P.n
    c = P.real_coeffs() if P.is_real else P.coeffs
    if P.is_real and _is_even_support(P.coeffs, m):
        q_asc = c[::2]
        u = np.roots(q_asc[::-1]).astype(np.complex128)
        u, rel = _newton_polish(q_asc, u, polish_iters)
        if rel > residual_tol:
            raise RootFindingDiverged(f"relative residual {rel} after polishing")
        sq = np.sqrt(u)
        roots = np.concatenate([sq, -sq])
    else:
        q_asc = c
        roots = np.roots(q_asc[::-1])
        roots, rel = _newton_polish(q_asc, roots, polish_iters)
        if rel > residual_tol:
            raise RootFindingDiverged(f"relative residual {rel} after polishing")
    order = np.lexsort((roots.imag, roots.real))
    return roots[order]


def _cluster_by_angle(roots: np.ndarray, ang_tol: float) -> list:
    """Split roots into groups of nearly equal argument (reciprocal-conjugate
    partners share their argument exactly, up to rounding)."""
    ang = np.angle(roots)
    order = np.argsort(ang, kind="stable")
    clusters = []
    current = [order[0]]
    for i in order[1:]:
        if ang[i] - ang[current[-1]] <= ang_tol:
            current.append(i)
        else:
            clusters.append(current)
            current = [i]
    clusters.append(current)
    # Arguments wrap at +-pi; merge the first and last clusters if they touch.
    if len(clusters) > 1:
        first, last = clusters[0], clusters[-1]
        if (ang[first[0]] + 2 * math.pi) - ang[last[-1]] <= ang_tol:
            clusters[0] = last + first
            clusters.pop()
    return [[roots[i] for i in cl] for cl in clusters]


def _pair_reciprocal(values: list, tol: float, what: str) -> list:
    """Match values into {v, 1/v} pairs by log-magnitude, innermost first."""
    ordered = sorted(values, key=lambda z: (abs(z), z.real, z.imag))
    pairs = []
    lo, hi = 0, len(ordered) - 1
    while lo < hi:
        a, b = ordered[lo], ordered[hi]
        if abs(math.log(abs(a)) + math.log(abs(b))) > 4 * tol:
            raise PairingFailed(f"unmatched {what} root {a}")
        pairs.append((a, b))
        lo += 1
        hi -= 1
    if lo == hi:
        raise PairingFailed(f"orphan {what} root {ordered[lo]}")
    return pairs


def pair_roots(roots, tol: float = PAIRING_TOL) -> RootPairing:
    """Group roots of a real star-symmetric polynomial into real pairs {r, 1/r},
    quadruples {z, 1/z, conj z, 1/conj z}, and near-unit pairs {z, 1/conj z}."""
    roots = np.asarray(roots, dtype=np.complex128)
    pairing = RootPairing(tol=tol)
    if roots.size == 0:
        return pairing
    if np.any(roots == 0):
        raise PairingFailed("zero is not a root of a star-symmetric polynomial")

    mags = np.abs(roots)
    unit_mask = np.abs(np.log(mags)) <= tol
    real_mask = ~unit_mask & (np.abs(roots.imag) <= tol * np.maximum(1.0, mags))

    # Near-unit roots: same argument, reciprocal magnitudes.
    units = roots[unit_mask]
    if units.size:
        for cluster in _cluster_by_angle(units, tol):
            if len(cluster) % 2 != 0:
                raise PairingFailed(f"orphan unit-circle root {cluster[0]}")
            ordered = sorted(cluster, key=abs)
            while ordered:
                pairing.unit_roots.append((ordered[0], ordered[-1]))
                ordered = ordered[1:-1]

    # Real roots: per sign, reciprocal magnitudes.
    reals = roots[real_mask]
    for sign in (1.0, -1.0):
        vals = [complex(z) for z in reals if z.real * sign > 0]
        if vals:
            pairing.real_pairs.extend(_pair_reciprocal(vals, tol, "real"))

    # Genuinely complex roots: quadruples built from the upper half plane.
    cmask = ~unit_mask & ~real_mask
    upper = roots[cmask & (roots.imag > 0)]
    lower = roots[cmask & (roots.imag < 0)]
    if upper.size != lower.size:
        raise PairingFailed("complex roots not closed under conjugation")
    if upper.size:
        lw = np.sort_complex(np.conj(lower))
        up = np.sort_complex(upper)
        if not np.allclose(lw, up, rtol=0, atol=tol * np.maximum(1.0, np.abs(up))):
            raise PairingFailed("complex roots not closed under conjugation")
        for cluster in _cluster_by_angle(upper, tol):
            for z_in, z_out in _pair_reciprocal(cluster, tol, "complex"):
                pairing.quads.append(
                    (z_in, np.conj(z_out), np.conj(z_in), z_out)
                )

    grouped = (
        2 * len(pairing.real_pairs) + 4 * len(pairing.quads) + 2 * len(pairing.unit_roots)
    )
    if grouped != roots.size:
        raise PairingFailed(f"grouped {grouped} of {roots.size} roots")
    return pairing


def _select_unit_members(unit_pairs, tol, rng) -> tuple:
    """One member from each near-unit pair {z, 1/conj z}, coin-flipped between
    the inner and outer member with the coins coupled across conjugate-mirror
    pairs so the chosen set stays closed under conjugation.

    Valid in both regimes the unit bucket mixes: for a genuinely split double
    root the members coincide to within the pairing noise, and for a narrowly
    separated true pair the member is exactly a root (a midpoint would sit a
    whole pair-width off, which is an O(1) relative error next to the root).
    """
    reals, pairs = [], []
    items = sorted(
        unit_pairs, key=lambda p: (abs(np.angle(p[0])), np.angle(p[0]), abs(p[0]))
    )
    used = [False] * len(items)
    for i, pair in enumerate(items):
        if used[i]:
            continue
        used[i] = True
        inner, outer = sorted(pair, key=abs)
        pick = inner if rng.integers(2) == 0 else outer
        ang = np.angle(pick)
        if min(abs(ang), abs(abs(ang) - math.pi)) <= tol:
            reals.append(float(pick.real))
            continue
        partner = None
        for j in range(i + 1, len(items)):
            if used[j]:
                continue
            cand = min(items[j], key=lambda z: abs(z - np.conj(pick)))
            if abs(cand - np.conj(pick)) <= 8 * tol * max(1.0, abs(pick)):
                partner = j
                break
        if partner is None:
            raise PairingFailed(f"unit-circle root {pick} lacks a conjugate partner")
        used[partner] = True
        pairs.append(complex(pick) if pick.imag > 0 else complex(np.conj(pick)))
    return reals, pairs


def _poly_from_roots(reals, pairs) -> np.ndarray:
    """Ascending real coefficients proportional to prod (x - r) prod (x - z)(x - conj z).

    Synthesized from values on the unit circle by FFT: pointwise root products
    are stable regardless of root clustering, and the DFT is perfectly
    conditioned, unlike expanding the product by convolution. The overall
    scale is arbitrary (it lands in the proportionality constant), which
    permits periodic rescaling — the raw product spans hundreds of decades at
    degrees in the thousands.
    """
    deg = len(reals) + 2 * len(pairs)
    if deg == 0:
        return np.array([1.0])
    n_grid = 1 << int(math.ceil(math.log2(deg + 1)))
    grid = np.exp(2j * math.pi * np.arange(n_grid) / n_grid)
    pending = [np.real(r) + 0j for r in reals]
    for z in pairs:
        pending.append(complex(z))
        pending.append(complex(np.conj(z)))
    pending = np.asarray(pending, dtype=np.complex128)
    # Accumulate in log space: partial products in value space can straddle
    # hundreds of decades pointwise even when the full product is tame, and
    # exp(sum of principal logs) still equals the product exactly mod 2*pi*i.
    lnv = np.zeros(n_grid, dtype=np.complex128)
    for start in range(0, pending.size, 64):
        chunk = pending[start : start + 64]
        lnv += np.sum(np.log(grid[None, :] - chunk[:, None]), axis=0)
    vals = np.exp(lnv - np.max(lnv.real))
    coeffs = np.fft.fft(vals)[: deg + 1] / n_grid
    coeffs = coeffs.real
    # Keep the spec'd monic normalization whenever the leading coefficient is
    # representable; at degrees in the thousands it can underflow, and then
    # the proportionality constant simply absorbs the scale.
    if abs(coeffs[-1]) > 1e-100:
        coeffs = coeffs / coeffs[-1]
    return coeffs


def _select_groups(pairing: RootPairing, rng) -> tuple:
    """One root per real pair, one conjugate pair per quadruple, one member per
    near-unit pair; every coin picks the inner member (|z| <= 1) or the outer
    with probability 1/2, keeping the product's coefficients from growing or
    decaying exponentially."""
    real_sel = []
    for pair in sorted(pairing.real_pairs, key=lambda p: (min(p, key=abs).real, abs(p[0]))):
        inner, outer = sorted(pair, key=abs)
        real_sel.append(float((inner if rng.integers(2) == 0 else outer).real))
    conj_sel = []
    for quad in sorted(pairing.quads, key=lambda q: (q[0].real, q[0].imag)):
        members = sorted(quad, key=abs)
        inner = min((z for z in quad if z.imag > 0), key=abs, default=members[0])
        outer = max((z for z in quad if z.imag > 0), key=abs, default=members[-1])
        conj_sel.append(complex(inner if rng.integers(2) == 0 else outer))
    unit_reals, unit_pairs = _select_unit_members(pairing.unit_roots, pairing.tol, rng)
    real_sel.extend(unit_reals)
    conj_sel.extend(unit_pairs)
    return real_sel, conj_sel


def build_G(
    pairing: RootPairing,
    P: LaurentPoly,
    rng_seed: int,
    parity: Parity | None = None,
    samples: int | None = None,
) -> tuple:
    """Assemble G = sqrt(alpha) * w^-s * prod(w - root) from one root choice.

    For even-support P the selection runs on the u = w^2 roots, which makes G
    exactly real and parity pure; the recentering shift s is then chosen to put
    G in the parity class required for the completed element (spec'd by
    ``parity``; None keeps the balanced shift).
    """
    if not P.is_real:
        raise ValueError("completion target must be real")
    rng = np.random.default_rng(rng_seed)
    m = 0 if P.is_zero() else P.n
    even = m > 0 and _is_even_support(P.coeffs, m)

    if even:
        # Keep one member of every exact {z, -z} duo, then regroup in u = w^2.
        roots = pairing.all_roots()
        keep = (roots.real > 0) | (
            (np.abs(roots.real) <= pairing.tol * np.abs(roots)) & (roots.imag > 0)
        )
        u_roots = roots[keep] ** 2
        if 2 * u_roots.size != roots.size:
            raise PairingFailed("root multiset is not closed under negation")
        u_pairing = pair_roots(u_roots, tol=4 * pairing.tol)
        reals, pairs = _select_groups(u_pairing, rng)
        q = _poly_from_roots(reals, pairs)  # in x = w^2
        g0 = np.zeros(2 * q.size - 1)
        g0[::2] = q
    else:
        reals, pairs = _select_groups(pairing, rng)
        g0 = _poly_from_roots(reals, pairs)

    n_g = len(g0) - 1
    shift = n_g // 2
    if parity is not None and parity is not Parity.MIXED:
        want_odd = parity is Parity.ODD
        if shift % 2 != int(want_odd):
            shift -= 1
    lp_g0 = LaurentPoly(np.concatenate([np.zeros(n_g), g0]))  # exponents 0..n_g

    # Least-squares ratio of P to g0·g0* on the circle; robust to tiny leading
    # coefficients where the leading-coefficient ratio would be noise.
    n_fit = samples or max(64, 4 * (max(m, n_g) + 1))
    p_vals = P.eval_grid(n_fit).real
    q_vals = np.abs(lp_g0.eval_grid(n_fit)) ** 2
    denom = float(np.dot(q_vals, q_vals))
    if denom == 0.0:
        raise NegativeConstant("G candidate vanishes identically")
    alpha = float(np.dot(p_vals, q_vals)) / denom
    if alpha <= 0.0:
        raise NegativeConstant(f"fitted proportionality constant {alpha} <= 0")

    G = (math.sqrt(alpha) * lp_g0).shift(-shift)
    if not G.is_real:  # pragma: no cover - real by construction
        G = G.real_part()
    if parity is not None and parity is not Parity.MIXED and G.parity() != parity:
        raise ParityMismatch(
            f"no recentering shift gives G parity {parity.value}"
        )
    residual = float(np.max(np.abs(p_vals - alpha * q_vals)))
    report = CompletionReport(
        prop_constant=alpha,
        residual=residual,
        root_count=int(pairing.all_roots().size),
        rng_seed=int(rng_seed),
    )
    return G, report


def complete(
    F: LaurentPoly,
    rng_seed: int = 0,
    pairing_tol: float = PAIRING_TOL,
    samples: int | None = None,
) -> tuple:
    """Complete F to U = F + G·iX with U a (near-)unitary parity element."""
    if not F.is_real:
        raise ValueError("completion target must have real coefficients")
    parity = F.parity()
    if parity is Parity.MIXED:
        raise ParityMismatch("completion target must have pure parity")
    P = build_target_poly(F, samples=samples)
    if P.max_abs_coeff() <= 1e-14:
        # Unimodular target: |F| = 1 on the whole circle, nothing to add.
        G = LaurentPoly.zero()
        residual = float(np.max(np.abs(P.eval_grid(max(64, 4 * (F.n + 1))))))
        report = CompletionReport(1.0, residual, 0, int(rng_seed))
        return LowElement(F, G), report
    roots = find_roots(P) if P.n >= 1 else np.array([], dtype=np.complex128)
    pairing = pair_roots(roots, tol=pairing_tol)
    G, report = build_G(pairing, P, rng_seed, parity=parity, samples=samples)
    return LowElement(F, G), report
