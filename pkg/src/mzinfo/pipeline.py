"""Preparation -> interferometer -> detection composition.

``P(xi|phi) = sum_j P_D(xi|j) sum_k P_I(j|k, phi) P_S(k)``.  Preparation is a
diagonal mixture of pure states, the transfer stage is either a scattering
matrix pushed through the engine or a tabulated transfer matrix, and the
detection stage is a stochastic kernel over outcome labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Union

import numpy as np

from .core import TrigSpectrum
from .engine import (OutcomeDistribution, PureState, fock_state, mixed_outcome_distribution,
                     outcome_distribution)
from .interferometer import ScatteringMatrix

INCONCLUSIVE = "inconclusive"
ROW_TOL = 1e-12


@dataclass(frozen=True)
class PreparationModel:
    components: tuple

    def __post_init__(self):
        comps = tuple((float(p), s) for p, s in self.components)
        ps = np.array([p for p, _ in comps])
        if np.any(ps < 0):
            raise ValueError("preparation probabilities must be non-negative")
        if abs(ps.sum() - 1.0) > 1e-12:
            raise ValueError(f"preparation probabilities sum to {ps.sum()!r}, not 1")
        object.__setattr__(self, "components", comps)

    @classmethod
    def deterministic(cls, state: PureState) -> PreparationModel:
        return cls(((1.0, state),))


@dataclass(frozen=True, eq=False)
class TabulatedTransfer:
    """Transfer matrix ``P_I(out | in, phi)`` given directly per Fock input.

    ``table`` maps an input occupation ``(n_a1, n_a2, 0, 0)`` to a map from
    outcome ``(n, m)`` to a spectrum.
    """

    table: dict
    label: str = "tabulated"

    def distribution(self, state: PureState) -> OutcomeDistribution:
        if len(state.terms) != 1:
            raise ValueError("a tabulated transfer only accepts single Fock-basis inputs")
        (_, occ), = state.terms
        if occ not in self.table:
            raise ValueError(f"no transfer row for input {occ}")
        row = self.table[occ]
        return OutcomeDistribution(dict(row), sum(occ))


def full_angle_transfer() -> TabulatedTransfer:
    """Lossless single-photon transfer with ``sin(phi)**2`` / ``cos(phi)**2``.

    This is the convention printed for the imperfect-detector example; note
    the full angle, unlike the half-angle of the 2x2 matrix.
    """
    sin2 = TrigSpectrum(0.5, [0.0, -0.5], [0.0, 0.0])
    cos2 = TrigSpectrum(0.5, [0.0, 0.5], [0.0, 0.0])
    return TabulatedTransfer({fock_state(1).terms[0][1]: {(1, 0): sin2, (0, 1): cos2}},
                             "fullangle")


Transfer = Union[ScatteringMatrix, TabulatedTransfer]


@dataclass(frozen=True, eq=False)
class DetectionModel:
    """Stochastic kernel from true outcomes to reported labels.

    ``rows`` maps a true outcome to ``{label: probability}``.  True outcomes
    without a row are reported as themselves.  ``rows_at`` optionally gives
    a phase-dependent kernel ``phi -> rows``.
    """

    rows: Mapping = field(default_factory=dict)
    rows_at: Callable | None = None

    def __post_init__(self):
        rows = {tuple(k) if not isinstance(k, str) else k: dict(v) for k, v in self.rows.items()}
        _validate_rows(rows)
        object.__setattr__(self, "rows", rows)

    @property
    def phase_dependent(self) -> bool:
        return self.rows_at is not None

    def kernel(self, phi: float | None = None) -> dict:
        if self.rows_at is None:
            return self.rows
        rows = {tuple(k) if not isinstance(k, str) else k: dict(v)
                for k, v in self.rows_at(phi).items()}
        _validate_rows(rows)
        return rows


def _validate_rows(rows: Mapping) -> None:
    for true, row in rows.items():
        vals = np.array(list(row.values()), dtype=float)
        if np.any(vals < 0) or np.any(vals > 1):
            raise ValueError(f"detection row {true} has entries outside [0, 1]")
        if abs(vals.sum() - 1.0) > ROW_TOL:
            raise ValueError(f"detection row {true} sums to {vals.sum()!r}, not 1")


def ideal_detection(inconclusive: bool = False) -> DetectionModel:
    """Perfect photon counting; optionally relabel (0, 0) as inconclusive."""
    if inconclusive:
        return DetectionModel({(0, 0): {INCONCLUSIVE: 1.0}})
    return DetectionModel({})


def binary_flip_detection(p_x: float) -> DetectionModel:
    """Single-photon detector that swaps (1,0) and (0,1) with probability ``p_x``."""
    if not 0.0 <= p_x <= 1.0:
        raise ValueError(f"p_x must lie in [0, 1], got {p_x!r}")
    p_d = 1.0 - p_x
    return DetectionModel({
        (1, 0): {(1, 0): p_d, (0, 1): p_x},
        (0, 1): {(1, 0): p_x, (0, 1): p_d},
    })


@dataclass(frozen=True, eq=False)
class MeasurementModel:
    prep: PreparationModel
    S: Transfer
    detect: DetectionModel = field(default_factory=DetectionModel)


def transfer_distribution(model: MeasurementModel) -> OutcomeDistribution:
    """``sum_k P_I(j|k, phi) P_S(k)`` for every true outcome ``j``."""
    if isinstance(model.S, ScatteringMatrix):
        return mixed_outcome_distribution(model.prep.components, model.S)
    probs: dict = {}
    n_max = 0
    for p, state in model.prep.components:
        d = model.S.distribution(state)
        n_max = max(n_max, d.n_max)
        for key, s in d.items():
            probs[key] = probs.get(key, TrigSpectrum.zero()) + p * s
    return OutcomeDistribution(dict(sorted(probs.items())), n_max)


def _label_key(label):
    return (1, (), label) if isinstance(label, str) else (0, tuple(label), "")


def _apply_kernel(true_probs: Mapping, rows: Mapping, zero):
    out: dict = {}
    for true, prob in true_probs.items():
        row = rows.get(true, {true: 1.0})
        for label, w in row.items():
            out[label] = out.get(label, zero) + w * prob
    return dict(sorted(out.items(), key=lambda kv: _label_key(kv[0])))


def pipeline_distribution(model: MeasurementModel) -> dict:
    """Final ``label -> TrigSpectrum`` for a phase-independent detector."""
    if model.detect.phase_dependent:
        raise ValueError("phase-dependent detection has no exact spectrum; "
                         "use pipeline_values on a phase grid")
    return _apply_kernel(transfer_distribution(model).probs, model.detect.kernel(),
                         TrigSpectrum.zero())


def pipeline_values(model: MeasurementModel, phases) -> dict:
    """Final probabilities ``label -> array`` on a phase grid.

    Works for any detector; phase-dependent kernels are applied point by point.
    """
    phases = np.atleast_1d(np.asarray(phases, dtype=float))
    true = transfer_distribution(model)
    if not model.detect.phase_dependent:
        spectra = _apply_kernel(true.probs, model.detect.kernel(), TrigSpectrum.zero())
        return {k: s(phases) for k, s in spectra.items()}
    cols: dict = {}
    for i, phi in enumerate(phases):
        vals = {k: float(s(phi)) for k, s in true.items()}
        for label, v in _apply_kernel(vals, model.detect.kernel(phi), 0.0).items():
            cols.setdefault(label, np.zeros(phases.size))[i] = v
    return dict(sorted(cols.items(), key=lambda kv: _label_key(kv[0])))


def flip_label(label):
    """Swap (1,0) <-> (0,1); other labels unchanged."""
    return {(1, 0): (0, 1), (0, 1): (1, 0)}.get(label, label)
