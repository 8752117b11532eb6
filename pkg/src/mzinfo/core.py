"""Exact phase-polynomial algebra.

Every amplitude produced by the interferometer is a polynomial in
``z = exp(i*phi)`` with constant complex coefficients, and every outcome
probability is the squared modulus of such a polynomial, i.e. a real
trigonometric polynomial in ``phi``.  Keeping both forms exact lets the
metrics take analytic derivatives and integrate with spectral accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# trailing coefficients below this fraction of the largest one are dropped
TRIM_RTOL = 1e-14


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PhasePolynomial:
    """Polynomial ``sum_p coeffs[p] * z**p`` with ``z = exp(i*phi)``.

    Construction trims trailing near-zero coefficients, so the zero
    polynomial has an empty coefficient array.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        if not np.all(np.isfinite(c)):
            raise ValueError("PhasePolynomial coefficients must be finite")
        if c.size:
            scale = np.max(np.abs(c))
            keep = np.nonzero(np.abs(c) > TRIM_RTOL * scale)[0]
            c = c[: keep[-1] + 1] if keep.size else c[:0]
        object.__setattr__(self, "coeffs", _readonly(c))

    @classmethod
    def constant(cls, value: complex) -> PhasePolynomial:
        return cls(np.array([value], dtype=complex))

    @classmethod
    def monomial(cls, power: int, value: complex = 1.0) -> PhasePolynomial:
        c = np.zeros(power + 1, dtype=complex)
        c[power] = value
        return cls(c)

    @classmethod
    def zero(cls) -> PhasePolynomial:
        return cls(np.zeros(0, dtype=complex))

    @property
    def degree(self) -> int:
        """Degree in ``z``; -1 for the zero polynomial."""
        return self.coeffs.size - 1

    def is_zero(self) -> bool:
        return self.coeffs.size == 0

    def __call__(self, phi):
        phi = np.asarray(phi, dtype=float)
        if self.is_zero():
            return np.zeros_like(phi, dtype=complex)
        return np.polynomial.polynomial.polyval(np.exp(1j * phi), self.coeffs)

    def __mul__(self, other):
        if isinstance(other, PhasePolynomial):
            return poly_mul(self, other)
        return PhasePolynomial(self.coeffs * complex(other))

    __rmul__ = __mul__

    def __add__(self, other: PhasePolynomial) -> PhasePolynomial:
        n = max(self.coeffs.size, other.coeffs.size)
        c = np.zeros(n, dtype=complex)
        c[: self.coeffs.size] += self.coeffs
        c[: other.coeffs.size] += other.coeffs
        return PhasePolynomial(c)

    def __neg__(self) -> PhasePolynomial:
        return PhasePolynomial(-self.coeffs)

    def __sub__(self, other: PhasePolynomial) -> PhasePolynomial:
        return self + (-other)

    def __pow__(self, k: int) -> PhasePolynomial:
        return poly_pow(self, k)

    def conj_at(self, phi):
        """Complex conjugate of the value at ``phi``."""
        return np.conj(self(phi))

    def __repr__(self):
        return f"PhasePolynomial({np.array2string(self.coeffs, precision=6)})"

    def to_text(self, precision: int = 6) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for p, c in enumerate(self.coeffs):
            if c == 0:
                continue
            term = f"({c.real:.{precision}g}{c.imag:+.{precision}g}j)"
            if p == 1:
                term += "*z"
            elif p > 1:
                term += f"*z^{p}"
            parts.append(term)
        return " + ".join(parts)


@dataclass(frozen=True, eq=False)
class TrigSpectrum:
    """Real trigonometric polynomial

    ``mean + sum_p cos_coeffs[p-1]*cos(p*phi) + sin_coeffs[p-1]*sin(p*phi)``.
    """

    mean: float
    cos_coeffs: np.ndarray
    sin_coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.cos_coeffs, dtype=float).ravel()
        s = np.array(self.sin_coeffs, dtype=float).ravel()
        n = max(c.size, s.size)
        c = np.pad(c, (0, n - c.size))
        s = np.pad(s, (0, n - s.size))
        if not (np.isfinite(self.mean) and np.all(np.isfinite(c)) and np.all(np.isfinite(s))):
            raise ValueError("TrigSpectrum coefficients must be finite")
        object.__setattr__(self, "mean", float(self.mean))
        object.__setattr__(self, "cos_coeffs", _readonly(c))
        object.__setattr__(self, "sin_coeffs", _readonly(s))

    @classmethod
    def constant(cls, value: float) -> TrigSpectrum:
        return cls(value, np.zeros(0), np.zeros(0))

    @classmethod
    def zero(cls) -> TrigSpectrum:
        return cls.constant(0.0)

    @property
    def order(self) -> int:
        return self.cos_coeffs.size

    def __call__(self, phi):
        phi = np.asarray(phi, dtype=float)
        out = np.full(phi.shape, self.mean)
        if self.order:
            p = np.arange(1, self.order + 1)
            arg = phi[..., None] * p
            out = out + np.cos(arg) @ self.cos_coeffs + np.sin(arg) @ self.sin_coeffs
        return out

    evaluate = __call__

    def derivative(self) -> TrigSpectrum:
        return spectrum_derivative(self)

    def __add__(self, other: TrigSpectrum) -> TrigSpectrum:
        n = max(self.order, other.order)
        c = np.zeros(n)
        s = np.zeros(n)
        c[: self.order] += self.cos_coeffs
        c[: other.order] += other.cos_coeffs
        s[: self.order] += self.sin_coeffs
        s[: other.order] += other.sin_coeffs
        return TrigSpectrum(self.mean + other.mean, c, s)

    def __mul__(self, k: float) -> TrigSpectrum:
        k = float(k)
        return TrigSpectrum(self.mean * k, self.cos_coeffs * k, self.sin_coeffs * k)

    __rmul__ = __mul__

    def shifted(self, c: float) -> TrigSpectrum:
        """Spectrum of ``phi -> self(phi + c)``."""
        p = np.arange(1, self.order + 1)
        cc, sc = np.cos(p * c), np.sin(p * c)
        a, b = self.cos_coeffs, self.sin_coeffs
        return TrigSpectrum(self.mean, a * cc + b * sc, b * cc - a * sc)

    def max_abs_coeff(self) -> float:
        parts = [abs(self.mean)]
        if self.order:
            parts += [np.max(np.abs(self.cos_coeffs)), np.max(np.abs(self.sin_coeffs))]
        return float(max(parts))

    def __repr__(self):
        return (f"TrigSpectrum(mean={self.mean:.6g}, cos={np.round(self.cos_coeffs, 6)}, "
                f"sin={np.round(self.sin_coeffs, 6)})")


def poly_mul(a: PhasePolynomial, b: PhasePolynomial) -> PhasePolynomial:
    if a.is_zero() or b.is_zero():
        return PhasePolynomial.zero()
    return PhasePolynomial(np.convolve(a.coeffs, b.coeffs))


def poly_pow(a: PhasePolynomial, k: int) -> PhasePolynomial:
    if k < 0:
        raise ValueError("poly_pow needs a non-negative exponent")
    result = PhasePolynomial.constant(1.0)
    base = a
    # square-and-multiply
    while k:
        if k & 1:
            result = poly_mul(result, base)
        k >>= 1
        if k:
            base = poly_mul(base, base)
    return result


def abs_square(a: PhasePolynomial) -> TrigSpectrum:
    """``|a(exp(i*phi))|**2`` as an exact trigonometric polynomial.

    With ``w_d = sum_q c[q+d] * conj(c[q])`` the lag-``d`` cross terms give
    ``2*Re(w_d)*cos(d*phi) - 2*Im(w_d)*sin(d*phi)``.
    """
    c = a.coeffs
    if c.size == 0:
        return TrigSpectrum.zero()
    # full autocorrelation; index size-1+d holds lag d
    w = np.correlate(c, c, mode="full")[c.size - 1:]
    return TrigSpectrum(w[0].real, 2.0 * w[1:].real, -2.0 * w[1:].imag)


def spectrum_derivative(s: TrigSpectrum) -> TrigSpectrum:
    p = np.arange(1, s.order + 1, dtype=float)
    return TrigSpectrum(0.0, p * s.sin_coeffs, -p * s.cos_coeffs)
