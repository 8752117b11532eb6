"""Scattering matrices of the lossless and lossy Mach-Zehnder interferometer.

Mode order for the lossy device is inputs ``(a1, a2, v1, v2)`` and outputs
``(b1, b2, d1, d2)``; ``v*`` carry vacuum and ``d*`` are the loss channels.
The matrix acts on annihilation operators, ``b = S a``, so an input creation
operator expands over output creation operators along a column:
``a_j^dagger = sum_i S[i, j] b_i^dagger``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .core import PhasePolynomial


@dataclass(frozen=True)
class LossParameters:
    """Loss beam-splitter amplitudes and (balanced) path lengths.

    ``r_x`` and ``r_y`` are the reflection amplitudes of the loss splitters
    in the two arms.  ``L``, ``l`` and ``omega_over_c`` only set global phase
    factors; they cancel in every probability.
    """

    r_x: float = 0.0
    r_y: float = 0.0
    L: float = 0.0
    l: float = 0.0
    omega_over_c: float = 0.0

    def __post_init__(self):
        for name in ("r_x", "r_y"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")
        for name in ("L", "l", "omega_over_c"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass(frozen=True, eq=False)
class ScatteringMatrix:
    """Square matrix of :class:`PhasePolynomial` entries.

    The first two output modes are the detected ports; any further output
    modes are loss channels that get traced out.
    """

    entries: tuple
    label: str = ""

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.entries)
        n = len(rows)
        if n < 2 or any(len(r) != n for r in rows):
            raise ValueError("scattering matrix must be square with at least 2 modes")
        object.__setattr__(self, "entries", rows)

    @property
    def n_modes(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij) -> PhasePolynomial:
        i, j = ij
        return self.entries[i][j]

    def column(self, j: int) -> list[PhasePolynomial]:
        return [row[j] for row in self.entries]

    def evaluate(self, phi: float) -> np.ndarray:
        """Numeric matrix at a single phase."""
        return np.array([[complex(e(phi)) for e in row] for row in self.entries])

    def max_degree(self) -> int:
        return max(e.degree for row in self.entries for e in row)

    def scaled_entry(self, i: int, j: int, factor: complex) -> ScatteringMatrix:
        """Copy with one entry multiplied by ``factor`` (used for perturbation checks)."""
        rows = [list(r) for r in self.entries]
        rows[i][j] = rows[i][j] * factor
        return ScatteringMatrix(rows, self.label + "*")


def build_lossy_mz(params: LossParameters) -> ScatteringMatrix:
    """4x4 phase-dependent scattering matrix of the lossy interferometer."""
    rx, ry = params.r_x, params.r_y
    tx, ty = np.sqrt(1.0 - rx * rx), np.sqrt(1.0 - ry * ry)
    k = params.omega_over_c
    gL = cmath.exp(1j * params.L * k)
    gLl = cmath.exp(1j * (params.L - params.l) * k)
    gl = cmath.exp(1j * params.l * k)
    s2 = 1.0 / np.sqrt(2.0)
    P = PhasePolynomial
    zero = P.zero()

    rows = [
        [P([0.5j * gL * ty, -0.5j * gL * tx]),
         P([-0.5 * gL * ty, -0.5 * gL * tx]),
         P.constant(1j * s2 * rx * gLl),
         P.constant(s2 * ry * gLl)],
        [P([-0.5 * gL * ty, -0.5 * gL * tx]),
         P([-0.5j * gL * ty, 0.5j * gL * tx]),
         P.constant(s2 * rx * gLl),
         P.constant(1j * s2 * ry * gLl)],
        [P.monomial(1, -1j * s2 * rx * gl),
         P.monomial(1, -s2 * rx * gl),
         P.constant(-1j * tx),
         zero],
        [P.constant(-s2 * ry * gl),
         P.constant(-1j * s2 * ry * gl),
         zero,
         P.constant(-1j * ty)],
    ]
    return ScatteringMatrix(rows, f"lossy(r_x={rx}, r_y={ry})")


def build_lossless_mz_2x2(convention: str = "halfangle") -> ScatteringMatrix:
    """Two-port lossless interferometer in the single-photon-mixture convention.

    Its ``|S11|**2`` is ``cos(phi/2)**2``; the lossy matrix at zero loss has
    ``sin(phi/2)**2`` there instead.
    """
    if convention != "halfangle":
        raise ValueError(f"unknown 2x2 convention {convention!r}")
    P = PhasePolynomial
    rows = [
        [P([-0.5j, -0.5j]), P([-0.5, 0.5])],
        [P([-0.5, 0.5]), P([0.5j, 0.5j])],
    ]
    return ScatteringMatrix(rows, "lossless-2x2")


def unitarity_defect(S: ScatteringMatrix, phase_grid) -> float:
    """Largest entry of ``|S^dagger S - I|`` over the phase grid."""
    grid = np.atleast_1d(np.asarray(phase_grid, dtype=float))
    if grid.size == 0:
        raise ValueError("phase grid must not be empty")
    eye = np.eye(S.n_modes)
    worst = 0.0
    for phi in grid:
        m = S.evaluate(phi)
        worst = max(worst, float(np.max(np.abs(m.conj().T @ m - eye))))
    return worst
