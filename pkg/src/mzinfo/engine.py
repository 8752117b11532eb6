"""Exact evolution of Fock-basis input states through a scattering matrix.

An input state ``prod_j (a_j^dagger)**n_j / sqrt(n_j!) |0>`` is rewritten
in output creation operators by multinomial expansion of each column of the
scattering matrix.  Amplitudes stay exact phase polynomials; detected-port
probabilities are obtained by squaring and summing over the loss-port counts.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .core import PhasePolynomial, TrigSpectrum, abs_square, poly_mul, poly_pow
from .interferometer import ScatteringMatrix

MAX_PHOTONS = 12
N_INPUT_MODES = 4


def _compositions(total: int, parts: int):
    """All tuples of ``parts`` non-negative ints summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class PureState:
    """Superposition ``sum amplitude * |n_a1, n_a2, n_v1, n_v2>``.

    Terms with identical occupations are merged. Loss-port inputs must be
    vacuum.
    """

    terms: tuple

    def __post_init__(self):
        merged: dict[tuple, complex] = {}
        for amp, occ in self.terms:
            occ = tuple(int(n) for n in occ)
            occ = occ + (0,) * (N_INPUT_MODES - len(occ))
            if len(occ) != N_INPUT_MODES or min(occ) < 0:
                raise ValueError(f"bad occupation {occ!r}")
            if occ[2] or occ[3]:
                raise ValueError("loss-port inputs v1, v2 must be vacuum")
            merged[occ] = merged.get(occ, 0j) + complex(amp)
        terms = tuple((a, o) for o, a in sorted(merged.items()) if a != 0)
        if not terms:
            raise ValueError("state has no nonzero terms")
        norm = sum(abs(a) ** 2 for a, _ in terms)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state is not normalized (norm^2 = {norm!r})")
        object.__setattr__(self, "terms", terms)

    @property
    def photon_numbers(self) -> set[int]:
        return {sum(o) for _, o in self.terms}

    @property
    def photon_number(self) -> int:
        """Largest total photon number among the terms."""
        return max(self.photon_numbers)

    def __repr__(self):
        body = " + ".join(f"({a:.6g})|{''.join(map(str, o))}>" for a, o in self.terms)
        return f"PureState({body})"


def vacuum() -> PureState:
    return PureState(((1.0, (0, 0, 0, 0)),))


def fock_state(n: int, m: int = 0) -> PureState:
    """``|n m 0 0>``."""
    return PureState(((1.0, (n, m, 0, 0)),))


def noon_state(n: int) -> PureState:
    """``(|N000> + |0N00>)/sqrt(2)``."""
    if n < 1:
        raise ValueError("N00N state needs at least one photon")
    s = 1.0 / math.sqrt(2.0)
    return PureState(((s, (n, 0, 0, 0)), (s, (0, n, 0, 0))))


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    """Detected-port probabilities ``P(n, m | phi)`` as exact spectra."""

    probs: dict
    n_max: int

    def __getitem__(self, outcome) -> TrigSpectrum:
        return self.probs.get(tuple(outcome), TrigSpectrum.zero())

    def __iter__(self):
        return iter(self.probs)

    def __len__(self):
        return len(self.probs)

    def items(self):
        return self.probs.items()

    def keys(self):
        return self.probs.keys()

    def evaluate(self, phi) -> dict:
        return {k: s(phi) for k, s in self.probs.items()}

    def total(self, phi):
        return sum(s(phi) for s in self.probs.values())


def _check_matrix_fits(S: ScatteringMatrix, occ: tuple) -> tuple:
    if any(occ[S.n_modes:]):
        raise ValueError(f"occupation {occ} uses modes beyond the {S.n_modes}-mode matrix")
    return occ[: S.n_modes]


def expand_input_mode(S: ScatteringMatrix, input_mode: int, power: int,
                      _powers=None) -> dict:
    """Expand ``(a_j^dagger)**power / sqrt(power!) |0>`` over output occupations.

    ``input_mode`` is a 0-based column index.  Returns a map from output
    occupation ``k`` to ``(amplitude, weight)`` where ``weight`` is the
    multinomial ``power!/prod(k_i!)`` and ``amplitude`` is
    ``sqrt(weight) * prod_i S[i, j]**k_i``, the normalized ket amplitude.
    """
    if power < 0:
        raise ValueError("power must be non-negative")
    if not 0 <= input_mode < S.n_modes:
        raise ValueError(f"input mode {input_mode} out of range")
    col = S.column(input_mode)
    powers = _powers if _powers is not None else {}

    def entry_pow(i, k):
        key = (i, input_mode, k)
        if key not in powers:
            powers[key] = poly_pow(col[i], k)
        return powers[key]

    out = {}
    for occ in _compositions(power, S.n_modes):
        weight = math.factorial(power)
        for k in occ:
            weight //= math.factorial(k)
        amp = PhasePolynomial.constant(math.sqrt(weight))
        for i, k in enumerate(occ):
            if k:
                amp = poly_mul(amp, entry_pow(i, k))
        out[occ] = (amp, weight)
    return out


def _operator_expansion(S: ScatteringMatrix, occ: tuple, powers: dict) -> dict:
    """Coefficients of ``prod_j (a_j^dagger)**n_j / sqrt(n_j!)`` as a
    polynomial in output creation operators (monomial exponents -> poly)."""
    acc = {(0,) * S.n_modes: PhasePolynomial.constant(1.0)}
    for j, n in enumerate(occ):
        if n == 0:
            continue
        # ket amplitude / sqrt(prod k!) gives the operator coefficient
        part = {k: amp * (1.0 / math.sqrt(math.prod(math.factorial(x) for x in k)))
                for k, (amp, _) in expand_input_mode(S, j, n, powers).items()}
        nxt: dict = defaultdict(PhasePolynomial.zero)
        for k1, c1 in acc.items():
            for k2, c2 in part.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                nxt[k] = nxt[k] + poly_mul(c1, c2)
        acc = dict(nxt)
    return acc


def evolve(state: PureState, S: ScatteringMatrix) -> dict:
    """Output ket amplitudes, one phase polynomial per output occupation.

    Branches of a superposition are summed per occupation before anything
    is squared.
    """
    if state.photon_number > MAX_PHOTONS:
        raise ValueError(f"photon number {state.photon_number} exceeds ceiling {MAX_PHOTONS}")
    powers: dict = {}
    out: dict = defaultdict(PhasePolynomial.zero)
    for amp, occ in state.terms:
        occ = _check_matrix_fits(S, occ)
        for k, coeff in _operator_expansion(S, occ, powers).items():
            norm = math.sqrt(math.prod(math.factorial(x) for x in k))
            out[k] = out[k] + coeff * (amp * norm)
    return dict(out)


def outcome_distribution(state: PureState, S: ScatteringMatrix) -> OutcomeDistribution:
    """``P(n, m | phi)`` with loss-port counts summed out."""
    probs: dict = {}
    for occ, amp in evolve(state, S).items():
        key = occ[:2]
        probs[key] = probs.get(key, TrigSpectrum.zero()) + abs_square(amp)
    return OutcomeDistribution(dict(sorted(probs.items())), state.photon_number)


def _check_weights(weights) -> None:
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0):
        raise ValueError("mixture weights must be non-negative")
    if abs(w.sum() - 1.0) > 1e-12:
        raise ValueError(f"mixture weights sum to {w.sum()!r}, not 1")


def mixed_outcome_distribution(mixture, S: ScatteringMatrix) -> OutcomeDistribution:
    """Probability-weighted sum over a diagonal mixture ``[(p, PureState), ...]``."""
    mixture = list(mixture)
    _check_weights([p for p, _ in mixture])
    probs: dict = {}
    n_max = 0
    for p, state in mixture:
        d = outcome_distribution(state, S)
        n_max = max(n_max, d.n_max)
        for key, spec in d.items():
            probs[key] = probs.get(key, TrigSpectrum.zero()) + p * spec
    return OutcomeDistribution(dict(sorted(probs.items())), n_max)


__all__ = [
    "PureState", "OutcomeDistribution", "vacuum", "fock_state", "noon_state",
    "expand_input_mode", "evolve", "outcome_distribution",
    "mixed_outcome_distribution", "MAX_PHOTONS",
]

