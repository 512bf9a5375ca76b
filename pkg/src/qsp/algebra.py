"""Elements A + B·iX (+ C·iY + D·iZ) over real Laurent polynomials, as 2x2 matrices of w."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .laurent import LaurentPoly, Parity, ZERO_DEGREE

# Angle files and AngleSequence carry this tag; the factor list multiplies
# left to right, ending in the constant X-rotation.
ANGLE_CONVENTION = "left-to-right: E(a_d)...E(a_1).Rx(a0)"


class LowElement:
    """A(w~) + B(w~)·iX with real A, B.

    Evaluation at w = exp(i*theta) gives [[A(w), iB(w)], [iB(1/w), A(1/w)]].
    """

    __slots__ = ("A", "B")

    def __init__(self, A: LaurentPoly, B: LaurentPoly) -> None:
        if not (A.is_real and B.is_real):
            raise ValueError("Low element components must be real")
        self.A = A
        self.B = B

    @property
    def degree(self):
        return max(self.A.degree, self.B.degree)

    def __mul__(self, other: "LowElement") -> "LowElement":
        # (A1 + B1 iX)(A2 + B2 iX) expanded through the matrix representation.
        A = self.A * other.A - self.B * other.B.star()
        B = self.A * other.B + self.B * other.A.star()
        return LowElement(A, B)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LowElement):
            return NotImplemented
        return self.A == other.A and self.B == other.B

    def __repr__(self) -> str:
        return f"LowElement(A={self.A!r}, B={self.B!r})"

    def star(self) -> "LowElement":
        # iX anti-commutes with the signal: B(w~)·iX starred is -B(w~)·iX,
        # with no exponent reflection on B.
        return LowElement(self.A.star(), -self.B)

    def __call__(self, theta: float) -> np.ndarray:
        a = self.A(theta)
        b = self.B(theta)
        return np.array(
            [[a, 1j * b], [1j * np.conj(b), np.conj(a)]], dtype=np.complex128
        )

    def eval_grid(self, samples: int) -> np.ndarray:
        """(samples, 2, 2) matrix values at equispaced theta."""
        a = self.A.eval_grid(samples)
        b = self.B.eval_grid(samples)
        out = np.empty((samples, 2, 2), dtype=np.complex128)
        out[:, 0, 0] = a
        out[:, 0, 1] = 1j * b
        out[:, 1, 0] = 1j * np.conj(b)
        out[:, 1, 1] = np.conj(a)
        return out

    def unitarity_residual(self, samples: int | None = None) -> float:
        return unitarity_residual(self, samples)

    def parity(self) -> Parity:
        return _combined_parity([self.A, self.B])

    def value_at_one(self) -> tuple[float, float]:
        """(A(1), B(1)) — the constant rotation the element reduces to at w = 1."""
        return (
            float(np.sum(self.A.coeffs).real),
            float(np.sum(self.B.coeffs).real),
        )

    def truncate(self, max_degree: int) -> "LowElement":
        return LowElement(self.A.truncate(max_degree), self.B.truncate(max_degree))

    def to_haah(self) -> "HaahElement":
        zero = LaurentPoly.zero()
        return HaahElement(self.A, self.B, zero, zero)

    def to_json_dict(self) -> dict:
        return {"A": self.A.to_json_dict(), "B": self.B.to_json_dict()}

    @classmethod
    def from_json_dict(cls, data: dict) -> "LowElement":
        return cls(
            LaurentPoly.from_json_dict(data["A"]), LaurentPoly.from_json_dict(data["B"])
        )


class HaahElement:
    """A(w~) + B(w~)·iX + C(w~)·iY + D(w~)·iZ with real components."""

    __slots__ = ("A", "B", "C", "D")

    def __init__(self, A, B, C, D) -> None:
        for p in (A, B, C, D):
            if not p.is_real:
                raise ValueError("Haah element components must be real")
        self.A, self.B, self.C, self.D = A, B, C, D

    @property
    def degree(self):
        return max(p.degree for p in (self.A, self.B, self.C, self.D))

    def _matrix_entries(self):
        # [[A + iD, C + iB], [i B* - C*, A* - i D*]]; star = reflection for real polys.
        m00 = self.A + 1j * self.D
        m01 = self.C + 1j * self.B
        m10 = 1j * self.B.star() - self.C.star()
        m11 = self.A.star() - 1j * self.D.star()
        return m00, m01, m10, m11

    def __mul__(self, other: "HaahElement") -> "HaahElement":
        # Multiply through the 2x2 Laurent-matrix representation, then read the
        # components back off: the top row determines (A, B, C, D) exactly.
        m00, m01, m10, m11 = self._matrix_entries()
        n00, n01, n10, n11 = other._matrix_entries()
        p00 = m00 * n00 + m01 * n10
        p01 = m00 * n01 + m01 * n11
        A = LaurentPoly(p00.coeffs.real)
        D = LaurentPoly(p00.coeffs.imag)
        C = LaurentPoly(p01.coeffs.real)
        B = LaurentPoly(p01.coeffs.imag)
        return HaahElement(A, B, C, D)

    def __eq__(self, other) -> bool:
        if not isinstance(other, HaahElement):
            return NotImplemented
        return all(
            getattr(self, f) == getattr(other, f) for f in ("A", "B", "C", "D")
        )

    def __repr__(self) -> str:
        return (
            f"HaahElement(A={self.A!r}, B={self.B!r}, C={self.C!r}, D={self.D!r})"
        )

    def star(self) -> "HaahElement":
        # iX and iY anti-commute with the signal, iZ commutes: the conjugate
        # transpose reflects exponents on A and D only.
        return HaahElement(self.A.star(), -self.B, -self.C, -self.D.star())

    def __sub__(self, other: "HaahElement") -> "HaahElement":
        return HaahElement(
            self.A - other.A, self.B - other.B, self.C - other.C, self.D - other.D
        )

    def max_abs_coeff(self) -> float:
        return max(p.max_abs_coeff() for p in (self.A, self.B, self.C, self.D))

    def __call__(self, theta: float) -> np.ndarray:
        w00 = self.A(theta) + 1j * self.D(theta)
        w01 = self.C(theta) + 1j * self.B(theta)
        return np.array(
            [[w00, w01], [-np.conj(w01), np.conj(w00)]], dtype=np.complex128
        )

    def eval_grid(self, samples: int) -> np.ndarray:
        w00 = self.A.eval_grid(samples) + 1j * self.D.eval_grid(samples)
        w01 = self.C.eval_grid(samples) + 1j * self.B.eval_grid(samples)
        out = np.empty((samples, 2, 2), dtype=np.complex128)
        out[:, 0, 0] = w00
        out[:, 0, 1] = w01
        out[:, 1, 0] = -np.conj(w01)
        out[:, 1, 1] = np.conj(w00)
        return out

    def unitarity_residual(self, samples: int | None = None) -> float:
        return unitarity_residual(self, samples)

    def parity(self) -> Parity:
        return _combined_parity([self.A, self.B, self.C, self.D])

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return (self - self.star()).max_abs_coeff() <= tol


def _combined_parity(polys) -> Parity:
    classes = {p.parity() for p in polys if not p.is_zero()}
    if not classes:
        return Parity.EVEN
    if len(classes) > 1:
        return Parity.MIXED
    return classes.pop()


def unitarity_residual(element, samples: int | None = None) -> float:
    """Max over sampled theta of ||M(theta) M(theta)^dagger - I||_F."""
    deg = element.degree
    deg = 0 if deg == ZERO_DEGREE else int(deg)
    min_samples = 4 * (deg + 1)
    if samples is None:
        samples = max(64, 2 * min_samples)
    if samples < min_samples:
        raise ValueError(f"need at least {min_samples} samples for degree {deg}")
    m = element.eval_grid(samples)
    gram = np.einsum("nij,nkj->nik", m, np.conj(m))
    gram[:, 0, 0] -= 1.0
    gram[:, 1, 1] -= 1.0
    return float(np.max(np.sqrt(np.sum(np.abs(gram) ** 2, axis=(1, 2)))))


def w_tilde(power: int = 1) -> LowElement:
    """The signal element diag(w, 1/w), raised to an integer power."""
    return LowElement(LaurentPoly.monomial(power), LaurentPoly.zero())


def identity_element() -> LowElement:
    return LowElement(LaurentPoly.one(), LaurentPoly.zero())


def xrotation(alpha: float) -> LowElement:
    """cos(alpha)·I + sin(alpha)·iX."""
    return LowElement(
        LaurentPoly([math.cos(alpha)]), LaurentPoly([math.sin(alpha)])
    )


def primitive_factor(alpha: float) -> LowElement:
    """The degree-1 building block E(alpha), equal to the identity at w = 1.

    Closed form A = cos^2(a)·w + sin^2(a)/w, B = sin(a)cos(a)·(w - 1/w); this
    is the conjugation of the signal by the X-rotation with the sign fixed so
    that the w^1 coefficients are (cos^2 a, sin a cos a).
    """
    c, s = math.cos(alpha), math.sin(alpha)
    A = LaurentPoly([s * s, 0.0, c * c])
    B = LaurentPoly([-s * c, 0.0, s * c])
    return LowElement(A, B)


def product(factors) -> LowElement:
    """Balanced product tree; keeps roundoff depth at log(len) instead of len."""
    items = list(factors)
    if not items:
        return identity_element()
    while len(items) > 1:
        nxt = [
            items[i] * items[i + 1] if i + 1 < len(items) else items[i]
            for i in range(0, len(items), 2)
        ]
        items = nxt
    return items[0]


@dataclass(frozen=True)
class AngleSequence:
    """X-rotation angles a_d..a_1 plus the terminal rotation a_0."""

    angles: tuple
    alpha0: float
    convention: str = ANGLE_CONVENTION

    def __post_init__(self):
        object.__setattr__(self, "angles", tuple(float(a) for a in self.angles))

    def __len__(self) -> int:
        return len(self.angles)

    def to_json_dict(self) -> dict:
        return {
            "convention": self.convention,
            "angles": list(self.angles),
            "alpha0": self.alpha0,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "AngleSequence":
        conv = data.get("convention", ANGLE_CONVENTION)
        if conv != ANGLE_CONVENTION:
            raise ValueError(f"unsupported angle convention: {conv!r}")
        return cls(tuple(data["angles"]), float(data["alpha0"]), conv)
