"""Write plot-ready CSV data for the phase-estimation figures.

    python3 scripts/regenerate_figures.py --out figures/

One CSV per figure quantity, named by content.  No plotting here.
"""

import argparse
import csv
import math
import os
import time

import numpy as np

from mzinfo import (LossParameters, build_lossless_mz_2x2, build_lossy_mz, fidelity,
                    fisher_information, fock_state, noon_state, outcome_distribution, posterior)
from mzinfo.engine import mixed_outcome_distribution, vacuum
from mzinfo.pipeline import (MeasurementModel, PreparationModel, binary_flip_detection,
                             pipeline_distribution, full_angle_transfer)


def write(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
    print(f"wrote {path} ({len(rows)} rows)")


def lossy(rx, ry):
    return build_lossy_mz(LossParameters(float(rx), float(ry)))


def single_photon_probabilities(out):
    rows = []
    phis = np.linspace(-math.pi, math.pi, 181)
    for rx, ry in [(0.0, 0.0), (0.3, 0.4), (0.6, 0.2), (0.8, 0.8)]:
        d = outcome_distribution(fock_state(1), lossy(rx, ry))
        for phi in phis:
            rows.append([rx, ry, phi] + [float(d[k](phi)) for k in ((1, 0), (0, 1), (0, 0))])
    write(os.path.join(out, "single_photon_probabilities.csv"),
          ["r_x", "r_y", "phi", "P10", "P01", "P00"], rows)


def single_photon_fidelity_vs_loss(out):
    rows = []
    for r in np.linspace(0, 1, 21):
        h = fidelity(outcome_distribution(fock_state(1), lossy(r, r)))
        rows.append([r, r * r, h])
    write(os.path.join(out, "single_photon_fidelity_vs_r2.csv"), ["r", "r_squared", "fidelity_bits"], rows)


def single_photon_fidelity_grid(out):
    grid = np.linspace(0, 1, 21)
    rows = [[rx, ry, fidelity(outcome_distribution(fock_state(1), lossy(rx, ry)))]
            for rx in grid for ry in grid]
    write(os.path.join(out, "single_photon_fidelity_grid.csv"), ["r_x", "r_y", "fidelity_bits"], rows)


def single_photon_fisher_grid(out):
    grid = np.linspace(0, 1, 21)
    rows = []
    for phi in (0.0, 0.125, math.pi / 2, 3.0, 3.1, math.pi):
        for rx in grid:
            for ry in grid:
                d = outcome_distribution(fock_state(1), lossy(rx, ry))
                rows.append([phi, rx, ry, fisher_information(d, phi).fisher])
    write(os.path.join(out, "single_photon_fisher_grid.csv"), ["phi", "r_x", "r_y", "fisher"], rows)


def fock_vs_noon_fisher(out):
    phi = math.pi / 4
    grid = np.linspace(0, 1, 21)
    rows = []
    for label, pairs in [("equal", [(r, r) for r in grid]),
                         ("ry=0.1", [(r, 0.1) for r in grid]),
                         ("ry=0.9", [(r, 0.9) for r in grid])]:
        for rx, ry in pairs:
            S = lossy(rx, ry)
            for N in range(1, 6):
                ff = fisher_information(outcome_distribution(fock_state(N), S), phi).fisher
                fn = fisher_information(outcome_distribution(noon_state(N), S), phi).fisher
                rows.append([label, rx, ry, N, ff, fn])
    write(os.path.join(out, "fock_vs_noon_fisher_phi_pi4.csv"),
          ["slice", "r_x", "r_y", "N", "fisher_fock", "fisher_noon"], rows)


def noon_fisher_vs_phase(out):
    S = lossy(0.3, 0.4)
    phis = np.linspace(-math.pi, math.pi, 181)
    rows = []
    for N in range(1, 6):
        d = outcome_distribution(noon_state(N), S)
        rows += [[N, phi, fisher_information(d, phi).fisher] for phi in phis]
    write(os.path.join(out, "noon_fisher_vs_phase_rx0.3_ry0.4.csv"), ["N", "phi", "fisher"], rows)


def fidelity_comparison(out):
    grid = np.linspace(0, 1, 21)
    states = [("fock:1", fock_state(1)), ("fock:2", fock_state(2)), ("fock:3", fock_state(3)),
              ("noon:1", noon_state(1)), ("noon:2", noon_state(2))]
    rows = [[name, r, fidelity(outcome_distribution(st, lossy(r, r)))]
            for name, st in states for r in grid]
    write(os.path.join(out, "fidelity_comparison_equal_loss.csv"), ["state", "r", "fidelity_bits"], rows)


def preparation_mixture(out):
    rows = []
    for p1 in np.linspace(0, 1, 11):
        d = mixed_outcome_distribution([(1 - p1, vacuum()), (p1, fock_state(1))],
                                       build_lossless_mz_2x2())
        rows.append([p1, fisher_information(d, 0.7).fisher, fidelity(d)])
    write(os.path.join(out, "preparation_mixture.csv"), ["p1", "fisher", "fidelity_bits"], rows)


def detector_model(out):
    prep = PreparationModel.deterministic(fock_state(1))
    fid_rows, post_rows = [], []
    for p_x in np.linspace(0, 1, 21):
        d = pipeline_distribution(MeasurementModel(prep, full_angle_transfer(), binary_flip_detection(p_x)))
        fid_rows.append([p_x, fidelity(d)])
        if round(p_x * 20) % 4 == 0:
            post = posterior(d, (1, 0), grid_size=128)
            post_rows += [[p_x, phi, dens] for phi, dens in zip(post.phi, post.density)]
    write(os.path.join(out, "detector_fidelity_vs_px.csv"), ["p_x", "fidelity_bits"], fid_rows)
    write(os.path.join(out, "detector_posterior_outcome10.csv"), ["p_x", "phi", "density"], post_rows)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="figures")
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    t0 = time.perf_counter()
    for job in (single_photon_probabilities, single_photon_fidelity_vs_loss,
                single_photon_fidelity_grid, single_photon_fisher_grid, fock_vs_noon_fisher,
                noon_fisher_vs_phase, fidelity_comparison, preparation_mixture, detector_model):
        job(args.out)
    print(f"done in {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
