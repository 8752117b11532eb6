"""Information measures on outcome distributions.

Distributions are any mapping ``label -> TrigSpectrum`` (an
``OutcomeDistribution`` or the result of ``pipeline_distribution``).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .core import TrigSpectrum

log = logging.getLogger(__name__)

P_NOISE = 64 * np.finfo(float).eps  # roundoff scale of an evaluated spectrum
DP_FLOOR = 1e-9
NORM_TOL = 1e-8
LOG_FLOOR = 1e-300
MIN_NODES = 64
MAX_NODES = 2 ** 20

H1_LOSSLESS = 1.0 / math.log(2.0) - 1.0


class ConvergenceError(RuntimeError):
    """Quadrature did not reach the requested tolerance within the node budget."""


class UnreachableOutcomeError(ValueError):
    """Outcome has zero marginal probability under the prior."""


def _spectra(dist) -> dict:
    probs = getattr(dist, "probs", dist)
    return dict(probs)


@dataclass(frozen=True)
class PhasePrior:
    """Prior density on ``[-pi, pi)``.

    ``kind == "uniform"`` or ``"tabulated"``; a tabulated prior is linearly
    interpolated with periodic wraparound and normalized on construction.
    """

    kind: str = "uniform"
    phi: np.ndarray | None = None
    weight: np.ndarray | None = None

    def __post_init__(self):
        if self.kind == "uniform":
            return
        if self.kind != "tabulated":
            raise ValueError(f"unknown prior kind {self.kind!r}")
        phi = np.asarray(self.phi, dtype=float)
        w = np.asarray(self.weight, dtype=float)
        if phi.ndim != 1 or phi.shape != w.shape or phi.size < 2:
            raise ValueError("tabulated prior needs matching 1-d phi and weight arrays")
        if np.any(w < 0):
            raise ValueError("prior weights must be non-negative")
        if np.any(np.abs(phi) > math.pi + 1e-12):
            raise ValueError("prior support must lie in [-pi, pi]")
        order = np.argsort(phi)
        phi, w = phi[order], w[order]
        area = self._area(phi, w)
        if area <= 0:
            raise ValueError("prior has zero mass")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "weight", w / area)

    @staticmethod
    def _area(phi, w) -> float:
        # trapezoid over the periodic piecewise-linear interpolant
        xs = np.append(phi, phi[0] + 2 * math.pi)
        ys = np.append(w, w[0])
        return float(np.sum(0.5 * (ys[1:] + ys[:-1]) * np.diff(xs)))

    @classmethod
    def uniform(cls) -> PhasePrior:
        return cls("uniform")

    @classmethod
    def tabulated(cls, phi, weight) -> PhasePrior:
        return cls("tabulated", phi, weight)

    def __call__(self, phi):
        phi = np.asarray(phi, dtype=float)
        if self.kind == "uniform":
            return np.full(phi.shape, 1.0 / (2 * math.pi))
        return np.interp(phi, self.phi, self.weight, period=2 * math.pi)

    def integral(self) -> float:
        if self.kind == "uniform":
            return 1.0
        return self._area(self.phi, self.weight)


@dataclass(frozen=True)
class FisherReport:
    phi: float
    fisher: float
    cramer_rao_bound: float
    diagnostic: str = ""


def fisher_information(dist, phi: float) -> FisherReport:
    """Classical Fisher information ``sum (dP/dphi)**2 / P`` at ``phi``.

    Derivatives are exact.  Where ``P`` is indistinguishable from zero (below
    the roundoff level of its own spectrum) the term is replaced by its limit
    ``2 * P''``, which is what a non-negative smooth ``P`` with a double zero
    gives; a slope too steep for a double zero is reported as infinite
    information.  Small but resolvable ``P`` always gets the exact term.
    """
    spectra = _spectra(dist)
    phi = float(phi)
    total = 0.0
    fisher = 0.0
    diagnostic = ""
    for label, s in spectra.items():
        p = float(s(phi))
        total += p
        ds = s.derivative()
        dp = float(ds(phi))
        if p > P_NOISE * (s.order + 1) * s.max_abs_coeff():
            fisher += dp * dp / p
            continue
        d2p = float(ds.derivative()(phi))
        if abs(dp) < DP_FLOOR or dp * dp <= 4.0 * abs(d2p) * max(p, 0.0) + DP_FLOOR ** 2:
            fisher += 2.0 * max(d2p, 0.0)
        else:
            fisher = math.inf
            diagnostic = f"outcome {label!r}: P={p:.3g} with dP/dphi={dp:.3g} at phi={phi:.6g}"
            log.warning("Fisher information diverges: %s", diagnostic)
    if abs(total - 1.0) > NORM_TOL:
        raise ValueError(f"distribution not normalized at phi={phi}: sum={total!r}")
    crb = math.inf if fisher <= 0.0 else 1.0 / fisher
    return FisherReport(phi, fisher, crb, diagnostic)


def _uniform_nodes(n: int) -> np.ndarray:
    return -math.pi + 2 * math.pi * np.arange(n) / n


def _mutual_information(values: list[np.ndarray], prior_vals: np.ndarray) -> float:
    n = prior_vals.size
    dphi = 2 * math.pi / n
    h = 0.0
    for P in values:
        joint = P * prior_vals
        marginal = joint.sum() * dphi
        if marginal <= 0.0:
            continue
        ratio = np.maximum(P, LOG_FLOOR) / marginal
        term = np.where(P > 0.0, joint * np.log2(ratio), 0.0)
        h += term.sum() * dphi
    return float(h)


@dataclass(frozen=True)
class FidelityResult:
    bits: float
    nodes: int


def fidelity_detailed(dist, prior: PhasePrior | None = None, tol: float = 1e-8,
                      max_nodes: int = MAX_NODES) -> FidelityResult:
    """Mutual information (bits) between outcome and phase.

    Periodic trapezoidal rule, doubling the node count from 64 until two
    successive estimates agree to ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    prior = prior or PhasePrior.uniform()
    spectra = list(_spectra(dist).values())
    n = MIN_NODES
    prev = None
    while n <= max_nodes:
        nodes = _uniform_nodes(n)
        vals = [np.clip(s(nodes), 0.0, None) for s in spectra]
        h = _mutual_information(vals, prior(nodes))
        if prev is not None and abs(h - prev) < tol:
            return FidelityResult(max(h, 0.0), n)
        prev = h
        n *= 2
    raise ConvergenceError(f"fidelity did not converge to tol={tol} within {max_nodes} nodes")


def fidelity(dist, prior: PhasePrior | None = None, tol: float = 1e-8) -> float:
    return fidelity_detailed(dist, prior, tol).bits


@dataclass(frozen=True)
class Posterior:
    phi: np.ndarray
    density: np.ndarray

    def integral(self) -> float:
        return float(self.density.sum() * 2 * math.pi / self.phi.size)


def posterior(dist, outcome, prior: PhasePrior | None = None, grid_size: int = 256) -> Posterior:
    """Bayes posterior ``p(phi | outcome)`` tabulated on a uniform periodic grid."""
    if grid_size < 16:
        raise ValueError("grid_size must be at least 16")
    prior = prior or PhasePrior.uniform()
    spectra = _spectra(dist)
    key = outcome if isinstance(outcome, str) else tuple(outcome)
    s = spectra.get(key, TrigSpectrum.zero())
    grid = _uniform_nodes(grid_size)
    joint = np.clip(s(grid), 0.0, None) * prior(grid)
    marginal = joint.sum() * 2 * math.pi / grid_size
    if marginal < 1e-15:
        raise UnreachableOutcomeError(f"outcome {outcome!r} is unreachable under this prior")
    return Posterior(grid, joint / marginal)


def small_loss_fidelity_series(state: str, r_x: float, r_y: float) -> float:
    """Low-loss expansions of the uniform-prior fidelity, truncated at order r**4.

    ``state`` is ``"fock1"`` or ``"fock2"``.  Only meant as a cross-check for
    ``r_x, r_y <= 0.3``.
    """
    if r_x < 0 or r_y < 0 or r_x > 0.3 or r_y > 0.3:
        raise ValueError("series only valid for 0 <= r_x, r_y <= 0.3")
    ln2, ln3 = math.log(2.0), math.log(3.0)
    a, b = r_x * r_x, r_y * r_y
    if state == "fock1":
        return H1_LOSSLESS * (1.0 - 0.5 * (a + b))
    if state == "fock2":
        return ((8 - 4 * ln2 - 3 * ln3) / (4 * ln2)
                + (a + b) * (3 * ln3 / (4 * ln2) - 1 / ln2)
                + a * b * (1 + ln2 - ln3) / (2 * ln2))
    raise ValueError(f"unknown series {state!r}")
