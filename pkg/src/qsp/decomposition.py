"""Decompose parity Low elements into degree-1 factors by recursive halving."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .algebra import AngleSequence, LowElement, primitive_factor, xrotation
from .laurent import LaurentPoly, Parity

UNITARITY_GATE = 1e-4
COND_LIMIT = 1e12
PRIMITIVE_SHAPE_TOL = 1e-6


class DegreeMismatch(ValueError):
    pass


class NotPrimitive(ValueError):
    pass


class IllConditionedWarning(UserWarning):
    """The halving system's condition estimate exceeded the limit; the result
    is still returned — retrying with a different completion seed may help."""


@dataclass
class HalvingSystem:
    """The (4l+2) x 2(l+1) real system whose solution is the left factor's star.

    Rows 0..4l-1 force the degree of V1*·U below d-l (the coefficient overflow
    constraints); the last two rows pin V1*(1) = I via sum(x) = 1, sum(y) = 0.
    Only exponents of l's parity carry unknowns.
    """

    matrix: np.ndarray
    rhs: np.ndarray
    l: int
    degree: int


def _dense_real(p: LaurentPoly, n: int) -> np.ndarray:
    return p.window(n).real


def _gather(padded: np.ndarray, idx: np.ndarray, valid: np.ndarray) -> np.ndarray:
    safe = np.where(valid, idx, padded.size - 1)
    return padded[safe]


def build_halving_system(U: LowElement, l: int) -> HalvingSystem:
    d = U.degree
    if not isinstance(d, int) and d == -math.inf:
        raise DegreeMismatch("cannot split the zero element")
    d = int(d)
    if not 1 <= l < d:
        raise DegreeMismatch(f"need 1 <= l < deg U, got l={l}, deg={d}")
    if U.parity() is Parity.MIXED:
        raise DegreeMismatch("halving needs a parity element")

    a = _dense_real(U.A, d)
    b = _dense_real(U.B, d)
    a_pad = np.append(a, 0.0)
    b_pad = np.append(b, 0.0)

    nx = np.arange(-l, l + 1, 2)  # unknown exponents, parity of l
    n_pos = np.arange(d - l + 2, d + l + 1, 2)
    n_over = np.concatenate([-n_pos[::-1], n_pos])  # 2l overflow exponents

    diff = n_over[:, None] - nx[None, :]
    idx_p = diff + d
    idx_m = 2 * d - idx_p
    valid_p = (idx_p >= 0) & (idx_p <= 2 * d)
    valid_m = (idx_m >= 0) & (idx_m <= 2 * d)

    cols = nx.size
    matrix = np.zeros((4 * l + 2, 2 * cols))
    # Product coefficient at n: sum_k a_{n-k} x_k - b_{k-n} y_k (A component)
    #                           sum_k b_{n-k} x_k + a_{k-n} y_k (B component)
    matrix[: 2 * l, :cols] = _gather(a_pad, idx_p, valid_p)
    matrix[: 2 * l, cols:] = -_gather(b_pad, idx_m, valid_m)
    matrix[2 * l : 4 * l, :cols] = _gather(b_pad, idx_p, valid_p)
    matrix[2 * l : 4 * l, cols:] = _gather(a_pad, idx_m, valid_m)
    matrix[4 * l, :cols] = 1.0
    matrix[4 * l + 1, cols:] = 1.0

    rhs = np.zeros(4 * l + 2)
    rhs[4 * l] = 1.0
    return HalvingSystem(matrix=matrix, rhs=rhs, l=l, degree=d)


def lstsq_pivoted(matrix: np.ndarray, rhs: np.ndarray, cond_limit: float = COND_LIMIT):
    """Minimum-norm least squares by rank-revealing QR with column pivoting.

    Rows and columns are equilibrated first: the constraint rows scale like
    products of the element's edge coefficients, which decay exponentially for
    generic angle chains while carrying full relative accuracy, so without
    equilibration the factorization squanders that accuracy. Returns
    (solution, condition estimate). Never forms normal equations.
    """
    row_norms = np.linalg.norm(matrix, axis=1)
    row_scale = 1.0 / np.where(row_norms > 0, row_norms, 1.0)
    scaled = matrix * row_scale[:, None]
    col_norms = np.linalg.norm(scaled, axis=0)
    col_scale = 1.0 / np.where(col_norms > 0, col_norms, 1.0)
    scaled *= col_scale[None, :]
    sol, cond_est = _lstsq_qr(scaled, rhs * row_scale, cond_limit)
    return sol * col_scale, cond_est


def _lstsq_qr(matrix: np.ndarray, rhs: np.ndarray, cond_limit: float):
    qtb_row, R, piv = scipy.linalg.qr_multiply(
        matrix, rhs.reshape(1, -1), mode="right", pivoting=True
    )
    qtb = qtb_row.ravel()
    ncols = matrix.shape[1]
    diag = np.abs(np.diag(R))
    if diag[0] == 0.0:
        return np.zeros(ncols), math.inf
    rank_tol = diag[0] * max(matrix.shape) * np.finfo(float).eps
    rank = int(np.count_nonzero(diag > rank_tol))
    rank = max(rank, 1)
    cond_est = diag[0] / diag[rank - 1]
    if cond_est > cond_limit:
        warnings.warn(
            f"halving system condition estimate {cond_est:.3e} exceeds {cond_limit:.1e}",
            IllConditionedWarning,
            stacklevel=2,
        )
    if rank == ncols:
        x_piv = scipy.linalg.solve_triangular(R[:ncols], qtb[:ncols])
    else:
        # Complete the orthogonal factorization for the minimum-norm solution.
        R1 = R[:rank]
        Z, T = scipy.linalg.qr(R1.T, mode="economic")
        u = scipy.linalg.solve_triangular(T.T, qtb[:rank], lower=True)
        x_piv = Z @ u
    x = np.empty(ncols)
    x[piv] = x_piv
    return x, float(cond_est)


def _lattice_poly(values: np.ndarray, l: int) -> LaurentPoly:
    arr = np.zeros(2 * l + 1)
    arr[::2] = values
    return LaurentPoly(arr)


def _unitarity_rows(sol: np.ndarray, l: int) -> tuple:
    """Coefficient residual of V1*·(V1*)* - I and its Jacobian in the unknowns.

    For a Low element (A, B) the product with its star has B component zero and
    A component sum_m x_m x_{m-k} + y_m y_{m-k}; palindromic, so exponents
    k >= 0 suffice.
    """
    cols = l + 1
    x, y = sol[:cols], sol[cols:]
    corr = np.correlate(x, x, "full") + np.correlate(y, y, "full")
    res = corr[l:].copy()  # lags 0..l in lattice steps (exponents 0, 2, .., 2l)
    res[0] -= 1.0
    lag = np.arange(cols)[:, None]
    j = np.arange(cols)[None, :]
    xp = np.concatenate([x, [0.0]])
    yp = np.concatenate([y, [0.0]])
    jm = np.where((j - lag >= 0) & (j - lag <= l), j - lag, cols)
    jp = np.where((j + lag >= 0) & (j + lag <= l), j + lag, cols)
    jac = np.zeros((cols, 2 * cols))
    jac[:, :cols] = xp[jm] + xp[jp]
    jac[:, cols:] = yp[jm] + yp[jp]
    return res, jac


def _refine_unitary(
    sol: np.ndarray,
    system: HalvingSystem,
    cond_limit: float,
    tol: float = 5e-15,
    max_iters: int = 12,
) -> np.ndarray:
    """Gauss-Newton on degree constraints + unitarity + normalization.

    The linear system alone turns numerically rank deficient when the
    element's edge coefficients sit far below its central ones (generic angle
    chains); the spurious directions are exactly those breaking unitarity, so
    the uniqueness argument applies once V1·V1* = I joins the residual. All
    residuals are judged in the graded metric (each row relative to its own
    scale) — the raw metric would accept drifted solutions whose tiny-row
    residuals are absolutely small yet relatively enormous.
    """
    l = system.l
    deg_block = system.matrix[: 4 * l]
    norm_block = system.matrix[4 * l :]
    norm_rhs = system.rhs[4 * l :]
    w = np.linalg.norm(deg_block, axis=1)
    deg_graded = deg_block * (1.0 / np.where(w > 0, w, 1.0))[:, None]

    def graded_parts(v):
        ru, ju = _unitarity_rows(v, l)
        scale = np.correlate(np.abs(v[: l + 1]), np.abs(v[: l + 1]), "full")
        scale = scale + np.correlate(np.abs(v[l + 1 :]), np.abs(v[l + 1 :]), "full")
        us = 1.0 / np.maximum(scale[l:], 0.25)
        return (
            np.concatenate([deg_graded @ v, ru * us, norm_block @ v - norm_rhs]),
            np.vstack([deg_graded, ju * us[:, None], norm_block]),
        )

    v = sol.copy()
    r, jac = graded_parts(v)
    best, best_norm = v.copy(), float(np.linalg.norm(r))
    lam = 1e-12
    ncols = sol.size
    for _ in range(max_iters):
        if float(np.max(np.abs(r))) <= tol:
            break
        prev_norm = best_norm
        col_scale = np.linalg.norm(jac, axis=0)
        col_scale[col_scale == 0] = 1.0
        accepted = False
        for _try in range(4):
            # Levenberg damping through augmented rows; keeps the solve QR-based.
            aug = np.vstack([jac, math.sqrt(lam) * np.diag(col_scale)])
            rhs = np.concatenate([-r, np.zeros(ncols)])
            step, _ = lstsq_pivoted(aug, rhs, cond_limit)
            cand = v + step
            rc, jc = graded_parts(cand)
            if float(np.linalg.norm(rc)) < best_norm:
                v, r, jac = cand, rc, jc
                best, best_norm = cand.copy(), float(np.linalg.norm(rc))
                lam = max(lam / 4.0, 1e-14)
                accepted = True
                break
            lam *= 256.0
            if lam > 1e8:
                break
        if not accepted:
            break
        # Near-quadratic convergence stalls only at the consistency floor of a
        # not-exactly-unitary input; more factorizations there are waste.
        if best_norm > 0.25 * prev_norm:
            break
    return best


def solve_half(U: LowElement, l: int, cond_limit: float = COND_LIMIT) -> LowElement:
    """The unique degree-l parity left factor V1 with deg(V1*·U) <= deg(U) - l."""
    system = build_halving_system(U, l)
    sol, _cond = lstsq_pivoted(system.matrix, system.rhs, cond_limit)
    unit_res, _ = _unitarity_rows(sol, l)
    if np.max(np.abs(unit_res)) > 1e-13:
        # Pull the factor onto the unitary manifold. Without this, every level
        # of the recursion inherits its parent's unitarity defect scaled by
        # the system's condition number, which compounds geometrically.
        sol = _refine_unitary(sol, system, cond_limit)
    cols = l + 1
    v1_star = LowElement(_lattice_poly(sol[:cols], l), _lattice_poly(sol[cols:], l))
    return v1_star.star()


def _validate_input(U: LowElement, residual_gate: float) -> int:
    d = U.degree
    if d == -math.inf or int(d) < 1:
        raise DegreeMismatch("decomposition needs degree >= 1")
    if U.parity() is Parity.MIXED:
        raise DegreeMismatch("decomposition needs a parity element")
    resid = U.unitarity_residual()
    if resid > residual_gate:
        raise ValueError(
            f"input is too far from unitary (residual {resid:.3e} > {residual_gate:.1e})"
        )
    return int(d)


def _normalize_terminal(U: LowElement) -> LowElement:
    # Right-multiply by U(1)^-1 so every recursive target fixes w = 1 to I.
    a1, b1 = U.value_at_one()
    return U * xrotation(-math.atan2(b1, a1))


def decompose(
    U: LowElement,
    residual_gate: float = UNITARITY_GATE,
    cond_limit: float = COND_LIMIT,
) -> list:
    """Split a near-unitary parity element into deg(U) degree-1 parity factors.

    The left-to-right product of the factors reproduces U up to its terminal
    constant rotation. Splits at l = ceil(d/2), recursing depth-first
    left-before-right so the factor order matches the product order.
    """
    d = _validate_input(U, residual_gate)
    return _decompose_rec(_normalize_terminal(U), d, cond_limit)


def _decompose_rec(M: LowElement, d: int, cond_limit: float) -> list:
    if d == 1:
        return [M]
    l = (d + 1) // 2
    v1 = solve_half(M, l, cond_limit)
    rest = (v1.star() * M).truncate(d - l)
    return _decompose_rec(v1, l, cond_limit) + _decompose_rec(rest, d - l, cond_limit)


def carve(
    U: LowElement,
    residual_gate: float = UNITARITY_GATE,
    cond_limit: float = COND_LIMIT,
) -> list:
    """Sequential baseline: peel one degree-1 factor at a time from the left."""
    d = _validate_input(U, residual_gate)
    M = _normalize_terminal(U)
    factors = []
    while d > 1:
        v1 = solve_half(M, 1, cond_limit)
        factors.append(v1)
        M = (v1.star() * M).truncate(d - 1)
        d -= 1
    factors.append(M)
    return factors


def extract_angles(
    factors, U: LowElement, shape_tol: float = PRIMITIVE_SHAPE_TOL
) -> AngleSequence:
    """Read the rotation angle off each degree-1 factor and the terminal
    rotation off U(1).

    For the primitive factor the w^1 coefficients are (cos^2 a, sin a cos a)
    and the w^-1 coefficients (sin^2 a, -sin a cos a), so the angle comes from
    the doubled-angle form atan2(2 b_1, a_1 - a_-1) / 2, which stays valid at
    a = pi/2 where both w^1 coefficients vanish.
    """
    angles = []
    for f in factors:
        if f.degree != 1:
            raise NotPrimitive(f"factor degree {f.degree} != 1")
        a1 = f.A[1].real
        am1 = f.A[-1].real
        b1 = f.B[1].real
        alpha = 0.5 * math.atan2(2.0 * b1, a1 - am1)
        model = primitive_factor(alpha)
        dev = max(
            (f.A - model.A).max_abs_coeff(), (f.B - model.B).max_abs_coeff()
        )
        if dev > shape_tol:
            raise NotPrimitive(
                f"factor deviates from the primitive shape by {dev:.3e}"
            )
        angles.append(alpha)
    a1, b1 = U.value_at_one()
    alpha0 = math.atan2(b1, a1)
    return AngleSequence(tuple(angles), alpha0)
