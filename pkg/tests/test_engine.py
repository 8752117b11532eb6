import math

import numpy as np
import pytest
import sympy

from mzinfo.core import PhasePolynomial
from mzinfo.engine import (MAX_PHOTONS, PureState, evolve, expand_input_mode, fock_state,
                           mixed_outcome_distribution, noon_state, outcome_distribution, vacuum)
from mzinfo.interferometer import LossParameters, build_lossless_mz_2x2, build_lossy_mz
from mzinfo.metrics import fisher_information
from mzinfo.reference import brute_force_marginals

GRID32 = np.linspace(-math.pi, math.pi, 32)
LOSS_GRID = [(a, b) for a in np.linspace(0, 1, 5) for b in np.linspace(0, 1, 5)]


def lossy(rx, ry):
    return build_lossy_mz(LossParameters(rx, ry))


def test_power_zero_is_vacuum():
    out = expand_input_mode(lossy(0.3, 0.4), 0, 0)
    assert list(out) == [(0, 0, 0, 0)]
    amp, w = out[(0, 0, 0, 0)]
    assert np.array_equal(amp.coeffs, [1]) and w == 1


def test_single_photon_zero_loss():
    out = {k: v for k, v in expand_input_mode(lossy(0, 0), 0, 1).items() if not v[0].is_zero()}
    assert set(out) == {(1, 0, 0, 0), (0, 1, 0, 0)}
    assert np.allclose(out[(1, 0, 0, 0)][0].coeffs, [0.5j, -0.5j], atol=0)
    assert np.allclose(out[(0, 1, 0, 0)][0].coeffs, [-0.5, -0.5], atol=0)


def test_power_three_matches_symbolic_expansion():
    S = lossy(0.3, 0.4)
    z = sympy.symbols("z")
    b = sympy.symbols("b1:5")
    entries = [sum(complex(c) * z ** p for p, c in enumerate(S[i, 0].coeffs)) for i in range(4)]
    expr = sympy.expand(sum(e * bi for e, bi in zip(entries, b)) ** 3 / sympy.sqrt(6))
    poly = sympy.Poly(expr, *b)
    got = expand_input_mode(S, 0, 3)
    assert len(got) == 20
    for occ, (amp, weight) in got.items():
        assert weight == math.factorial(3) // math.prod(math.factorial(k) for k in occ)
        coeff = poly.coeff_monomial(math.prod(bi ** k for bi, k in zip(b, occ)))
        # operator coefficient * sqrt(prod k!) = ket amplitude
        ket = sympy.Poly(sympy.expand(coeff * sympy.sqrt(math.prod(math.factorial(k) for k in occ))), z)
        ref = np.array([complex(c) for c in ket.all_coeffs()[::-1]]) if coeff != 0 else np.zeros(0)
        n = max(ref.size, amp.coeffs.size)
        assert np.max(np.abs(np.pad(ref, (0, n - ref.size)) - np.pad(amp.coeffs, (0, n - amp.coeffs.size))),
                      initial=0.0) < 1e-12


def test_vacuum_evolves_to_vacuum():
    out = evolve(vacuum(), lossy(0.3, 0.4))
    assert list(out) == [(0, 0, 0, 0)]
    assert np.array_equal(out[(0, 0, 0, 0)].coeffs, [1])


def test_single_photon_lossless_stays_in_sector():
    d = outcome_distribution(fock_state(1), lossy(0, 0))
    total = d[(1, 0)](GRID32) + d[(0, 1)](GRID32)
    assert np.max(np.abs(total - 1)) < 1e-14


@pytest.mark.parametrize("rx,ry", [(0.0, 0.0), (0.3, 0.4), (1.0, 0.2), (0.9, 0.9)])
def test_two_photon_noon_has_no_coincidences(rx, ry):
    amps = evolve(noon_state(2), lossy(rx, ry))
    a = amps.get((1, 1, 0, 0), PhasePolynomial.zero())
    assert np.max(np.abs(a(GRID32)), initial=0.0) < 1e-15


def test_one_photon_closed_form():
    rx, ry = 0.3, 0.4
    d = outcome_distribution(fock_state(1), lossy(rx, ry))
    tx, ty = math.sqrt(1 - rx * rx), math.sqrt(1 - ry * ry)
    expect10 = 0.25 * (2 - rx ** 2 - ry ** 2 - 2 * tx * ty * np.cos(GRID32))
    assert np.max(np.abs(d[(1, 0)](GRID32) - expect10)) < 1e-15
    assert np.max(np.abs(d[(0, 0)](GRID32) - (rx ** 2 + ry ** 2) / 2)) < 1e-15


def test_two_photon_absorbed_both():
    rx, ry = 0.6, 0.8
    d = outcome_distribution(fock_state(2), lossy(rx, ry))
    assert np.max(np.abs(d[(0, 0)](GRID32) - 0.25 * (rx * rx + ry * ry) ** 2)) < 1e-14


def test_three_photons_match_dense_oracle():
    S = lossy(0.2, 0.5)
    d = outcome_distribution(fock_state(3), S)
    for phi in np.linspace(-math.pi, math.pi, 16):
        ref = brute_force_marginals(fock_state(3), S, phi)
        for key in set(ref) | set(d.keys()):
            assert abs(float(d[key](phi)) - ref.get(key, 0.0)) < 1e-10


def test_no_keys_beyond_photon_number():
    d = outcome_distribution(fock_state(3), lossy(0.2, 0.5))
    assert all(n + m <= 3 for n, m in d.keys())
    assert d.n_max == 3


@pytest.mark.parametrize("make", [fock_state, noon_state])
@pytest.mark.parametrize("N", [1, 2, 3, 4, 5])
def test_normalization(make, N):
    for rx, ry in LOSS_GRID:
        d = outcome_distribution(make(N), lossy(rx, ry))
        assert np.max(np.abs(d.total(GRID32) - 1)) < 1e-10


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_lossless_conservation(N):
    d = outcome_distribution(fock_state(N), lossy(0, 0))
    for (n, m), s in d.items():
        if n + m != N:
            assert np.max(np.abs(s(GRID32))) < 1e-14


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_loss_symmetry(N):
    for rx, ry in [(0.3, 0.4), (0.1, 0.9), (0.0, 0.6)]:
        d1 = outcome_distribution(fock_state(N), lossy(rx, ry))
        d2 = outcome_distribution(fock_state(N), lossy(ry, rx))
        for key in set(d1.keys()) | set(d2.keys()):
            assert np.max(np.abs(d1[key](GRID32) - d2[key](GRID32))) < 1e-12


def test_fock_fisher_scaling():
    for rx, ry in [(0.3, 0.4), (0.75, 0.25), (0.5, 0.5)]:
        f1 = outcome_distribution(fock_state(1), lossy(rx, ry))
        for N in (2, 3):
            fN = outcome_distribution(fock_state(N), lossy(rx, ry))
            for phi in GRID32:
                assert abs(fisher_information(fN, phi).fisher
                           - N * fisher_information(f1, phi).fisher) < 1e-9


def test_one_photon_noon_equivalence():
    for rx, ry in [(0.3, 0.4), (0.8, 0.1)]:
        dn = outcome_distribution(noon_state(1), lossy(rx, ry))
        df = outcome_distribution(fock_state(1), lossy(rx, ry))
        for key in df.keys():
            assert np.max(np.abs(dn[key](GRID32) - df[key](math.pi / 2 - GRID32))) < 1e-12


def test_mixture_single_component_identity():
    S = lossy(0.3, 0.4)
    a = mixed_outcome_distribution([(1.0, fock_state(2))], S)
    b = outcome_distribution(fock_state(2), S)
    for key in b.keys():
        assert np.array_equal(a[key].cos_coeffs, b[key].cos_coeffs)
        assert a[key].mean == b[key].mean


def test_mixture_vacuum_single_photon_lossless_2x2():
    p1 = 0.7
    d = mixed_outcome_distribution([(1 - p1, vacuum()), (p1, fock_state(1))],
                                   build_lossless_mz_2x2())
    assert np.max(np.abs(d[(1, 0)](GRID32) - p1 * np.cos(GRID32 / 2) ** 2)) < 1e-15
    assert np.max(np.abs(d[(0, 1)](GRID32) - p1 * np.sin(GRID32 / 2) ** 2)) < 1e-15
    assert np.max(np.abs(d[(0, 0)](GRID32) - (1 - p1))) < 1e-15


def test_mixture_of_both_ports_is_flat():
    d = mixed_outcome_distribution([(0.5, fock_state(1)), (0.5, fock_state(0, 1))], lossy(0, 0))
    assert np.max(np.abs(d[(1, 0)](GRID32) - 0.5)) < 1e-15
    assert np.max(np.abs(d[(0, 1)](GRID32) - 0.5)) < 1e-15


@pytest.mark.parametrize("weights", [[0.5, 0.6], [-0.1, 1.1]])
def test_mixture_weights_validated(weights):
    with pytest.raises(ValueError):
        mixed_outcome_distribution(list(zip(weights, [vacuum(), fock_state(1)])), lossy(0, 0))


def test_state_validation():
    with pytest.raises(ValueError):
        PureState(((1.0, (1, 0, 1, 0)),))
    with pytest.raises(ValueError):
        PureState(((0.5, (1, 0, 0, 0)),))
    s = PureState(((0.6, (1, 0)), (0.8, (0, 1))))
    assert s.photon_number == 1 and len(s.terms) == 2


def test_photon_ceiling():
    with pytest.raises(ValueError):
        evolve(fock_state(MAX_PHOTONS + 1), lossy(0.1, 0.1))


def test_two_mode_matrix_rejects_extra_modes():
    with pytest.raises(ValueError):
        expand_input_mode(build_lossless_mz_2x2(), 2, 1)


def test_separate_inputs_in_both_ports():
    S = lossy(0.3, 0.4)
    d = outcome_distribution(fock_state(1, 1), S)
    for phi in np.linspace(-math.pi, math.pi, 7):
        ref = brute_force_marginals(fock_state(1, 1), S, phi)
        for key in ref:
            assert abs(float(d[key](phi)) - ref[key]) < 1e-12
