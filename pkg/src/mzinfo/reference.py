"""Independent oracles for the engine and metrics.

Two kinds live here: closed-form expressions for the few-photon cases,
transcribed formula by formula, and a brute-force evolver that works at a
single numeric phase by multiplying out creation-operator polynomials.
Neither path touches :mod:`mzinfo.core`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

BRUTE_FORCE_MAX_PHOTONS = 4


def _t(r):
    return math.sqrt(1.0 - r * r)


def lossy_mz_numeric(r_x: float, r_y: float, phi: float) -> np.ndarray:
    """The 4x4 lossy scattering matrix at one phase (path-length phases = 1)."""
    tx, ty = _t(r_x), _t(r_y)
    e = complex(math.cos(phi), math.sin(phi))
    s = 1.0 / math.sqrt(2.0)
    return np.array([
        [0.5j * (ty - e * tx), -0.5 * (ty + e * tx), 1j * s * r_x, s * r_y],
        [-0.5 * (ty + e * tx), -0.5j * (ty - e * tx), s * r_x, 1j * s * r_y],
        [-1j * s * r_x * e, -s * r_x * e, -1j * tx, 0.0],
        [-s * r_y, -1j * s * r_y, 0.0, -1j * ty],
    ], dtype=complex)


@dataclass(frozen=True)
class ClosedForm:
    name: str
    eval: Callable
    source: str


def _fock1(sign):
    def f(r_x, r_y, phi, **_):
        a, b = r_x ** 2, r_y ** 2
        return 0.25 * (2 - a - b + sign * 2 * math.sqrt((1 - a) * (1 - b)) * math.cos(phi))
    return f


def _fock2_same(sign):
    def f(r_x, r_y, phi, **_):
        a, b = r_x ** 2, r_y ** 2
        return (6 - 6 * a - 6 * b
                + sign * 4 * math.sqrt((a - 1) * (b - 1)) * (a + b - 2) * math.cos(phi)
                + 2 * (a - 1) * (b - 1) * math.cos(2 * phi)
                + 4 * a * b + a * a + b * b) / 16.0
    return f


def _fock2_11(r_x, r_y, phi, **_):
    a, b = r_x ** 2, r_y ** 2
    return (2 - 2 * a - 2 * b + a * a + b * b - 2 * (1 - a) * (1 - b) * math.cos(2 * phi)) / 8.0


def _fock2_one_lost(sign):
    def f(r_x, r_y, phi, **_):
        a, b = r_x ** 2, r_y ** 2
        return 0.25 * (a + b) * (2 - a - b + sign * 2 * math.sqrt((1 - a) * (1 - b)) * math.cos(phi))
    return f


def _noon2(kind):
    def f(r_x, r_y, phi, **_):
        a, b = r_x ** 2, r_y ** 2
        return {"20": 0.5 * (1 - a - b + a * b), "11": 0.0,
                "10": 0.5 * (a + b - 2 * a * b), "00": a * b}[kind]
    return f


def _detector(first, second):
    def f(r_x, r_y, phi, p_x=0.0, **_):
        w = {"d": 1.0 - p_x, "x": p_x}
        return w[first] * math.sin(phi) ** 2 + w[second] * math.cos(phi) ** 2
    return f


def _mixture(kind):
    def f(r_x, r_y, phi, p_1=1.0, **_):
        return {"10": p_1 * math.cos(phi / 2) ** 2, "01": p_1 * math.sin(phi / 2) ** 2,
                "i": 1.0 - p_1}[kind]
    return f


CLOSED_FORMS = {c.name: c for c in [
    ClosedForm("fock1-P10", _fock1(-1), "1-photon Fock outcome (1,0)"),
    ClosedForm("fock1-P01", _fock1(+1), "1-photon Fock outcome (0,1)"),
    ClosedForm("fock1-P00", lambda r_x, r_y, phi, **_: 0.5 * (r_x ** 2 + r_y ** 2),
               "1-photon Fock, photon absorbed"),
    ClosedForm("fock2-P20", _fock2_same(+1), "2-photon Fock outcome (2,0)"),
    ClosedForm("fock2-P02", _fock2_same(-1), "2-photon Fock outcome (0,2)"),
    ClosedForm("fock2-P11", _fock2_11, "2-photon Fock outcome (1,1)"),
    ClosedForm("fock2-P10", _fock2_one_lost(-1), "2-photon Fock outcome (1,0)"),
    ClosedForm("fock2-P01", _fock2_one_lost(+1), "2-photon Fock outcome (0,1)"),
    ClosedForm("fock2-P00", lambda r_x, r_y, phi, **_: 0.25 * (r_x ** 2 + r_y ** 2) ** 2,
               "2-photon Fock, both absorbed"),
    ClosedForm("noon2-P20", _noon2("20"), "2-photon N00N outcome (2,0)"),
    ClosedForm("noon2-P02", _noon2("20"), "2-photon N00N outcome (0,2)"),
    ClosedForm("noon2-P11", _noon2("11"), "2-photon N00N outcome (1,1)"),
    ClosedForm("noon2-P10", _noon2("10"), "2-photon N00N outcome (1,0)"),
    ClosedForm("noon2-P01", _noon2("10"), "2-photon N00N outcome (0,1)"),
    ClosedForm("noon2-P00", _noon2("00"), "2-photon N00N, both absorbed"),
    ClosedForm("detector-P10", _detector("d", "x"), "binary-flip detector, reported (1,0)"),
    ClosedForm("detector-P01", _detector("x", "d"), "binary-flip detector, reported (0,1)"),
    ClosedForm("mixture-P10", _mixture("10"), "vacuum/1-photon mixture, lossless 2x2, (1,0)"),
    ClosedForm("mixture-P01", _mixture("01"), "vacuum/1-photon mixture, lossless 2x2, (0,1)"),
    ClosedForm("mixture-Pi", _mixture("i"), "vacuum/1-photon mixture, inconclusive"),
]}

# (n, m) outcome keys of each closed-form family
CASE_OUTCOMES = {
    "fock1": {(1, 0): "fock1-P10", (0, 1): "fock1-P01", (0, 0): "fock1-P00"},
    "fock2": {(2, 0): "fock2-P20", (0, 2): "fock2-P02", (1, 1): "fock2-P11",
              (1, 0): "fock2-P10", (0, 1): "fock2-P01", (0, 0): "fock2-P00"},
    "noon2": {(2, 0): "noon2-P20", (0, 2): "noon2-P02", (1, 1): "noon2-P11",
              (1, 0): "noon2-P10", (0, 1): "noon2-P01", (0, 0): "noon2-P00"},
}


def ref_probability(case: str, r_x: float = 0.0, r_y: float = 0.0, phi: float = 0.0,
                    **params) -> float:
    try:
        form = CLOSED_FORMS[case]
    except KeyError:
        raise ValueError(f"unknown closed-form case {case!r}") from None
    return float(form.eval(r_x, r_y, phi, **params))


def ref_fisher_1photon(r_x: float, r_y: float, phi: float) -> float:
    a, b = r_x ** 2, r_y ** 2
    num = 2 * (1 - a) * (1 - b) * (2 - a - b) * math.sin(phi) ** 2
    den = (2 - a - b) ** 2 - 4 * (1 - a) * (1 - b) * math.cos(phi) ** 2
    if den == 0.0:
        # r_x = r_y = 0 at phi = 0, pi: the phi-independent limit
        return (1 - a) if a == b else 0.0
    return num / den


def ref_fidelity_fock1_equal_loss(r: float) -> float:
    return (1 / math.log(2) - 1) * (1 - r * r)


def ref_fidelity_fock2_equal_loss(r: float) -> float:
    ln2, ln3 = math.log(2), math.log(3)
    return (1 - r * r) / (4 * ln2) * (8 - 4 * ln2 - 3 * ln3 + 2 * r * r * math.atanh(11 / 43))


def ref_fock2_series(r: float, phi: float) -> dict:
    """Equal-loss 2-photon probabilities to order r**2."""
    s2, c2 = math.sin(phi / 2) ** 2, math.cos(phi / 2) ** 2
    a = r * r
    return {(2, 0): s2 ** 2 * (1 - 2 * a), (0, 2): c2 ** 2 * (1 - 2 * a),
            (1, 1): math.sin(phi) ** 2 * (0.5 - a),
            (1, 0): a * (1 - math.cos(phi)), (0, 1): a * (1 + math.cos(phi)),
            (0, 0): 0.0}


# --- brute force -----------------------------------------------------------

def _poly_times_linear(poly: dict, column: np.ndarray) -> dict:
    """Multiply an operator polynomial by ``sum_i column[i] * b_i^dagger``."""
    out: dict = {}
    for mono, c in poly.items():
        for i, s in enumerate(column):
            if s == 0:
                continue
            m = list(mono)
            m[i] += 1
            m = tuple(m)
            out[m] = out.get(m, 0j) + c * s
    return out


def _basis(n_modes: int, max_total: int) -> list:
    basis = []

    def rec(prefix, left):
        if len(prefix) == n_modes:
            basis.append(tuple(prefix))
            return
        for k in range(left + 1):
            rec(prefix + [k], left - k)

    rec([], max_total)
    return basis


def brute_force_evolve(state, S, phi: float):
    """Dense output amplitude vector at one phase.

    ``S`` is a numeric matrix or anything with ``evaluate(phi)``.  Returns
    ``(basis, amplitudes)`` over every occupation with total <= N.
    """
    m = np.asarray(S.evaluate(phi) if hasattr(S, "evaluate") else S, dtype=complex)
    n_modes = m.shape[0]
    N = max(sum(o) for _, o in state.terms)
    if N > BRUTE_FORCE_MAX_PHOTONS:
        raise ValueError(f"brute force limited to N <= {BRUTE_FORCE_MAX_PHOTONS}")
    basis = _basis(n_modes, N)
    index = {b: i for i, b in enumerate(basis)}
    vec = np.zeros(len(basis), dtype=complex)
    for amp, occ in state.terms:
        occ = tuple(occ)
        if any(occ[n_modes:]):
            raise ValueError("state uses modes the matrix does not have")
        poly = {(0,) * n_modes: complex(amp)}
        for j, n in enumerate(occ[:n_modes]):
            for _ in range(n):
                poly = _poly_times_linear(poly, m[:, j])
            poly = {k: v / math.sqrt(math.factorial(n)) for k, v in poly.items()}
        for mono, c in poly.items():
            vec[index[mono]] += c * math.sqrt(math.prod(math.factorial(k) for k in mono))
    return basis, vec


def brute_force_marginals(state, S, phi: float) -> dict:
    basis, vec = brute_force_evolve(state, S, phi)
    out: dict = {}
    for occ, a in zip(basis, vec):
        out[occ[:2]] = out.get(occ[:2], 0.0) + abs(a) ** 2
    return out
