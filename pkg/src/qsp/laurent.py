"""Laurent polynomials with dense coefficient storage, evaluated on the unit circle."""

from __future__ import annotations

import enum
import math

import numpy as np

# Relative threshold below which prune() drops coefficients. Pruning happens
# only through explicit calls; arithmetic never drops small terms on its own.
PRUNE_REL_TOL = 1e-14

# Degree of the zero polynomial. Kept as -inf so it can never collide with a
# valid exponent.
ZERO_DEGREE = -math.inf


class Parity(enum.Enum):
    EVEN = "even"
    ODD = "odd"
    MIXED = "mixed"

    def flip(self) -> "Parity":
        if self is Parity.EVEN:
            return Parity.ODD
        if self is Parity.ODD:
            return Parity.EVEN
        return Parity.MIXED


class LaurentPoly:
    """A polynomial in w and 1/w, stored densely over the window [-n, n].

    ``coeffs[k + n]`` holds the coefficient of w^k. The window is trimmed to
    the largest exponent with an exactly nonzero coefficient; numerically tiny
    coefficients are kept until :meth:`prune` is called explicitly.
    """

    __slots__ = ("coeffs", "n")

    def __init__(self, coeffs) -> None:
        c = np.array(coeffs, dtype=np.complex128)
        if c.ndim != 1 or c.size % 2 != 1:
            raise ValueError("coefficient array must be 1-D with odd length 2n+1")
        n = (c.size - 1) // 2
        nz = np.nonzero(c)[0]
        if nz.size == 0:
            c, n = np.zeros(1, dtype=np.complex128), 0
        else:
            m = max(abs(int(nz[0]) - n), abs(int(nz[-1]) - n))
            if m != n:
                c = c[n - m : n + m + 1].copy()
                n = m
        c.setflags(write=False)
        self.coeffs = c
        self.n = n

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls([0.0])

    @classmethod
    def one(cls) -> "LaurentPoly":
        return cls([1.0])

    @classmethod
    def monomial(cls, k: int, c=1.0) -> "LaurentPoly":
        n = abs(int(k))
        arr = np.zeros(2 * n + 1, dtype=np.complex128)
        arr[k + n] = c
        return cls(arr)

    @classmethod
    def from_coeff_map(cls, coeff_map: dict) -> "LaurentPoly":
        if not coeff_map:
            return cls.zero()
        n = max(abs(int(k)) for k in coeff_map)
        arr = np.zeros(2 * n + 1, dtype=np.complex128)
        for k, c in coeff_map.items():
            arr[int(k) + n] += c
        return cls(arr)

    # -- basic accessors ----------------------------------------------------

    def __getitem__(self, k: int) -> complex:
        if abs(k) > self.n:
            return 0j
        return complex(self.coeffs[k + self.n])

    def coeff_map(self) -> dict:
        return {k - self.n: complex(c) for k, c in enumerate(self.coeffs) if c != 0}

    def window(self, n: int) -> np.ndarray:
        """Coefficients over [-n, n], zero padded; n must cover the support."""
        if n < self.n:
            raise ValueError(f"window {n} smaller than support {self.n}")
        out = np.zeros(2 * n + 1, dtype=np.complex128)
        out[n - self.n : n + self.n + 1] = self.coeffs
        return out

    @property
    def degree(self):
        """Max |k| over exactly nonzero coefficients; -inf for the zero polynomial."""
        if self.is_zero():
            return ZERO_DEGREE
        return self.n

    def is_zero(self) -> bool:
        return self.n == 0 and self.coeffs[0] == 0

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.coeffs.imag == 0.0))

    def real_coeffs(self) -> np.ndarray:
        if not self.is_real:
            raise ValueError("polynomial has nonzero imaginary coefficients")
        return self.coeffs.real

    def max_abs_coeff(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = _as_poly(other)
        n = max(self.n, other.n)
        return LaurentPoly(self.window(n) + other.window(n))

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_poly(other)
        n = max(self.n, other.n)
        return LaurentPoly(self.window(n) - other.window(n))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __neg__(self):
        return LaurentPoly(-self.coeffs)

    def __mul__(self, other):
        if np.isscalar(other):
            return LaurentPoly(self.coeffs * other)
        other = _as_poly(other)
        return LaurentPoly(np.convolve(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.coeffs, other.coeffs))

    def __repr__(self) -> str:
        terms = ", ".join(f"w^{k}: {c:.6g}" for k, c in sorted(self.coeff_map().items()))
        return f"LaurentPoly({{{terms or '0'}}})"

    def star(self) -> "LaurentPoly":
        """Conjugate coefficients and swap w with 1/w: c_k -> conj(c_{-k})."""
        return LaurentPoly(np.conj(self.coeffs[::-1]))

    # -- evaluation on the unit circle --------------------------------------

    def __call__(self, theta):
        """Value at w = exp(i*theta); theta may be a scalar or an array.

        Every term has unit modulus, so plain summation stays well scaled
        even for supports of several thousand exponents.
        """
        ks = np.arange(-self.n, self.n + 1)
        th = np.asarray(theta, dtype=np.float64)
        if th.ndim == 0:
            return complex(np.dot(self.coeffs, np.exp(1j * ks * float(th))))
        return np.exp(1j * np.multiply.outer(th, ks)) @ self.coeffs

    def eval_grid(self, samples: int) -> np.ndarray:
        """Values at theta_j = 2*pi*j/samples via FFT; exact for samples > 2n."""
        if samples < 1:
            raise ValueError("samples must be positive")
        buf = np.zeros(samples, dtype=np.complex128)
        ks = np.arange(-self.n, self.n + 1) % samples
        np.add.at(buf, ks, self.coeffs)
        return np.fft.ifft(buf) * samples

    def supnorm(self, samples: int | None = None) -> float:
        """Max of |p| over equispaced unit-circle samples (a lower bound on the
        true sup-norm; oversampling factor >= 4 is enforced)."""
        if self.is_zero():
            return 0.0
        min_samples = 4 * (self.n + 1)
        if samples is None:
            samples = max(64, 2 * min_samples)
        if samples < min_samples:
            raise ValueError(f"need at least {min_samples} samples for degree {self.n}")
        return float(np.max(np.abs(self.eval_grid(samples))))

    # -- structure ----------------------------------------------------------

    def parity(self, rel_tol: float = PRUNE_REL_TOL) -> Parity:
        """Even/odd/mixed support classification.

        Coefficients at or below ``rel_tol`` times the largest magnitude are
        treated as zero, mirroring an explicit prune before the exact test.
        """
        if self.is_zero():
            return Parity.EVEN
        cutoff = rel_tol * self.max_abs_coeff()
        ks = np.arange(-self.n, self.n + 1)
        live = np.abs(self.coeffs) > cutoff
        has_even = bool(np.any(live & (ks % 2 == 0)))
        has_odd = bool(np.any(live & (ks % 2 != 0)))
        if has_even and has_odd:
            return Parity.MIXED
        return Parity.ODD if has_odd else Parity.EVEN

    def prune(self, rel_tol: float = PRUNE_REL_TOL) -> "LaurentPoly":
        """Drop coefficients below rel_tol * max |c_k|. The only lossy operation."""
        if self.is_zero():
            return self
        cutoff = rel_tol * self.max_abs_coeff()
        c = self.coeffs.copy()
        c[np.abs(c) <= cutoff] = 0.0
        return LaurentPoly(c)

    def truncate(self, max_degree: int) -> "LaurentPoly":
        """Restrict support to |k| <= max_degree, discarding the rest."""
        if max_degree < 0:
            raise ValueError("max_degree must be nonnegative")
        if self.n <= max_degree:
            return self
        return LaurentPoly(self.coeffs[self.n - max_degree : self.n + max_degree + 1])

    def shift(self, j: int) -> "LaurentPoly":
        """Multiply by w^j."""
        n = self.n + abs(j)
        out = np.zeros(2 * n + 1, dtype=np.complex128)
        out[j + n - self.n : j + n + self.n + 1] = self.coeffs
        return LaurentPoly(out)

    def real_part(self) -> "LaurentPoly":
        return LaurentPoly(self.coeffs.real.astype(np.complex128))

    # -- JSON coefficient format --------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "parity": self.parity().value,
            "coeffs": [
                {"k": int(k), "re": float(c.real), "im": float(c.imag)}
                for k, c in sorted(self.coeff_map().items())
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "LaurentPoly":
        entries = data["coeffs"]
        ks = [int(e["k"]) for e in entries]
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise ValueError("coefficient exponents must be strictly increasing")
        return cls.from_coeff_map(
            {k: complex(e.get("re", 0.0), e.get("im", 0.0)) for k, e in zip(ks, entries)}
        )


def _as_poly(x) -> LaurentPoly:
    if isinstance(x, LaurentPoly):
        return x
    if np.isscalar(x):
        return LaurentPoly([x])
    raise TypeError(f"cannot interpret {type(x).__name__} as LaurentPoly")
