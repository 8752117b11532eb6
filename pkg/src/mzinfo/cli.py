"""Command-line front end.

    mzinfo probs    --state fock:2 --rx 0.3 --ry 0.4 --phi-grid -pi:pi:9
    mzinfo fisher   --state noon:1 --rx 0.3 --ry 0.4 --phi-grid 0:pi/2:5
    mzinfo fidelity --state fock:1
    mzinfo posterior --state fock:2 --outcome 1,1 --grid-size 64
    mzinfo sweep    --metric fidelity --state fock:1 --state noon:2 --rx-grid 0:1:21 --equal-loss
    mzinfo smatrix  --rx 0.3 --ry 0.4

Exit codes: 0 success, 2 configuration error, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import io
import json
import logging
import math
import os
import re
import sys
from dataclasses import dataclass, field

import numpy as np

from .engine import PureState, fock_state, noon_state, vacuum
from .interferometer import (LossParameters, ScatteringMatrix, build_lossless_mz_2x2,
                             build_lossy_mz, unitarity_defect)
from .metrics import (ConvergenceError, PhasePrior, UnreachableOutcomeError,
                      fidelity_detailed, fisher_information, posterior)
from .pipeline import (INCONCLUSIVE, DetectionModel, MeasurementModel, PreparationModel,
                       binary_flip_detection, ideal_detection, pipeline_distribution,
                       full_angle_transfer)

log = logging.getLogger("mzinfo")

EXIT_CONFIG = 2
EXIT_NONCONVERGENCE = 3
MIX_TOL = 1e-9
PRIOR_RENORM_WARN = 1e-6
DEFAULT_PHI_GRID = "-pi:pi:33"


class ConfigError(ValueError):
    pass


class SpecSyntaxError(ConfigError):
    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position} in {text!r}")
        self.position = position


# --- state grammar ---------------------------------------------------------
#   state   := "vac" | "fock:" INT | "noon:" INT | "mix:" comp ("," comp)*
#   comp    := NAME "=" FLOAT ":" pure
#   pure    := "vac" | "fock:" INT | "noon:" INT

_PURE_RE = re.compile(r"vac|fock:(\d+)|noon:(\d+)")
_COMP_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)=([-+0-9.eE]+):")


@dataclass(frozen=True)
class Mixture:
    components: tuple  # ((probability, PureState, pure_text), ...)

    def as_pairs(self):
        return [(p, s) for p, s, _ in self.components]


def _parse_pure(text: str, pos: int, full: str):
    m = _PURE_RE.match(text, pos)
    if not m:
        raise SpecSyntaxError("expected 'vac', 'fock:N' or 'noon:N'", full, pos)
    if m.group(1) is not None:
        state = fock_state(int(m.group(1)))
    elif m.group(2) is not None:
        n = int(m.group(2))
        if n < 1:
            raise SpecSyntaxError("N00N state needs N >= 1", full, m.start(2))
        state = noon_state(n)
    else:
        state = vacuum()
    return state, m.group(0), m.end()


def parse_state_spec(text: str):
    """Parse a state description into a :class:`PureState` or :class:`Mixture`."""
    s = re.sub(r"\s+", "", text)
    if not s.startswith("mix:"):
        state, _, end = _parse_pure(s, 0, s)
        if end != len(s):
            raise SpecSyntaxError("unexpected trailing text", s, end)
        return state
    pos = 4
    comps = []
    while True:
        m = _COMP_RE.match(s, pos)
        if not m:
            raise SpecSyntaxError("expected 'name=probability:state'", s, pos)
        try:
            p = float(m.group(2))
        except ValueError:
            raise SpecSyntaxError("bad probability", s, m.start(2)) from None
        if p < 0 or not math.isfinite(p):
            raise SpecSyntaxError("probability must be non-negative", s, m.start(2))
        state, pure_text, pos = _parse_pure(s, m.end(), s)
        comps.append((p, state, pure_text))
        if pos == len(s):
            break
        if s[pos] != ",":
            raise SpecSyntaxError("expected ','", s, pos)
        pos += 1
    total = sum(p for p, _, _ in comps)
    if abs(total - 1.0) > MIX_TOL:
        raise ConfigError(f"mixture probabilities sum to {total!r}, not 1")
    return Mixture(tuple(comps))


def render_state(state) -> str:
    """Inverse of :func:`parse_state_spec` for states it can produce."""
    if isinstance(state, Mixture):
        return "mix:" + ",".join(f"p{i}={p!r}:{t}" for i, (p, _, t) in enumerate(state.components))
    occs = sorted(o for _, o in state.terms)
    if occs == [(0, 0, 0, 0)]:
        return "vac"
    if len(occs) == 1 and occs[0][1:] == (0, 0, 0):
        return f"fock:{occs[0][0]}"
    if len(occs) == 2:
        n = occs[1][0]
        amps = {o: a for a, o in state.terms}
        if occs == [(0, n, 0, 0), (n, 0, 0, 0)] and all(
                abs(a - 1 / math.sqrt(2)) < 1e-15 for a in amps.values()):
            return f"noon:{n}"
    raise ValueError(f"state {state!r} has no text form")


def as_preparation(state) -> PreparationModel:
    if isinstance(state, Mixture):
        return PreparationModel(tuple(state.as_pairs()))
    return PreparationModel.deterministic(state)


# --- other specs -----------------------------------------------------------

_PI_TERM = re.compile(r"^([-+]?)(\d*\.?\d*(?:[eE][-+]?\d+)?)\*?(pi)?(?:/(\d*\.?\d+))?$")


def parse_angle(text: str) -> float:
    """Radians; accepts plain numbers and forms like ``-pi``, ``pi/2``, ``3pi/4``."""
    t = text.strip().lower()
    try:
        return float(t)
    except ValueError:
        pass
    m = _PI_TERM.match(t)
    if not m or not (m.group(2) or m.group(3)):
        raise ConfigError(f"cannot parse angle {text!r}")
    value = float(m.group(2)) if m.group(2) else 1.0
    if m.group(3):
        value *= math.pi
    if m.group(4):
        value /= float(m.group(4))
    return -value if m.group(1) == "-" else value


def parse_grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid must look like start:stop:count, got {text!r}")
    start, stop = parse_angle(parts[0]), parse_angle(parts[1])
    try:
        count = int(parts[2])
    except ValueError:
        raise ConfigError(f"grid count must be an integer, got {parts[2]!r}") from None
    if count < 1:
        raise ConfigError("grid count must be positive")
    return np.linspace(start, stop, count)


def _parse_label(obj):
    if isinstance(obj, str):
        if obj.strip().lower() in ("i", INCONCLUSIVE):
            return INCONCLUSIVE
        obj = [int(x) for x in obj.split(",")]
    n, m = obj
    return (int(n), int(m))


def parse_detect_spec(text: str | None) -> DetectionModel:
    """``ideal``, ``inconclusive``, ``flip:px=0.2`` or a path to a JSON kernel.

    JSON kernel: ``{"rows": [{"true": [1, 0], "reported": {"1,0": 0.8, "0,1": 0.2}}]}``;
    the label ``"inconclusive"`` is also allowed on the reported side.
    """
    if text is None or text.strip() == "ideal":
        return ideal_detection()
    t = text.strip()
    if t == "inconclusive":
        return ideal_detection(inconclusive=True)
    m = re.fullmatch(r"flip:px=([-+0-9.eE]+)", t.replace(" ", ""))
    if m:
        try:
            return binary_flip_detection(float(m.group(1)))
        except ValueError as e:
            raise ConfigError(str(e)) from None
    if os.path.exists(t):
        try:
            with open(t, encoding="utf-8") as fh:
                doc = json.load(fh)
            rows = {_parse_label(r["true"]): {_parse_label(k): float(v)
                                              for k, v in r["reported"].items()}
                    for r in doc["rows"]}
            return DetectionModel(rows)
        except (OSError, KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"bad detection kernel file {t!r}: {e}") from None
    raise ConfigError(f"cannot parse detection spec {text!r}")


def load_prior(text: str | None) -> PhasePrior:
    """``uniform`` or a two-column CSV (phi, weight) in radians."""
    if text is None or text.strip() == "uniform":
        return PhasePrior.uniform()
    try:
        data = np.loadtxt(text, delimiter=",", comments="#", ndmin=2)
    except (OSError, ValueError):
        try:
            data = np.loadtxt(text, delimiter=",", skiprows=1, ndmin=2)
        except (OSError, ValueError) as e:
            raise ConfigError(f"cannot read prior file {text!r}: {e}") from None
    if data.shape[1] != 2:
        raise ConfigError("prior file must have two columns: phi, weight")
    try:
        raw = PhasePrior._area(np.sort(data[:, 0]), data[np.argsort(data[:, 0]), 1])
        prior = PhasePrior.tabulated(data[:, 0], data[:, 1])
    except ValueError as e:
        raise ConfigError(str(e)) from None
    if abs(raw - 1.0) > PRIOR_RENORM_WARN:
        log.warning("prior integrates to %.6g; renormalized", raw)
    return prior


# --- run configuration -----------------------------------------------------

@dataclass
class RunConfig:
    state_text: str
    state: object
    r_x: float = 0.0
    r_y: float = 0.0
    phases: np.ndarray = field(default_factory=lambda: np.array([0.0]))
    detect: DetectionModel = field(default_factory=ideal_detection)
    prior: PhasePrior = field(default_factory=PhasePrior.uniform)
    convention: str = "lossy"
    tol: float = 1e-8

    def transfer(self):
        if self.convention == "lossy":
            return build_lossy_mz(LossParameters(self.r_x, self.r_y))
        if self.convention == "lossless2x2":
            return build_lossless_mz_2x2()
        if self.convention == "fullangle":
            return full_angle_transfer()
        raise ConfigError(f"unknown convention {self.convention!r}")

    def model(self) -> MeasurementModel:
        return MeasurementModel(as_preparation(self.state), self.transfer(), self.detect)

    def distribution(self) -> dict:
        try:
            return pipeline_distribution(self.model())
        except ValueError as e:
            raise ConfigError(str(e)) from None


def _config(args, state_text: str, r_x=None, r_y=None) -> RunConfig:
    try:
        state = parse_state_spec(state_text)
        canonical = render_state(state)
    except ValueError as e:
        raise ConfigError(str(e)) from None
    r_x = args.rx if r_x is None else r_x
    r_y = args.ry if r_y is None else r_y
    if not (0 <= r_x <= 1 and 0 <= r_y <= 1):
        raise ConfigError("--rx and --ry must lie in [0, 1]")
    cfg = RunConfig(
        state_text=canonical, state=state, r_x=r_x, r_y=r_y,
        phases=parse_grid(args.phi_grid or DEFAULT_PHI_GRID),
        detect=parse_detect_spec(getattr(args, "detect", None)),
        prior=load_prior(getattr(args, "prior", None)),
        convention=args.convention, tol=getattr(args, "tol", 1e-8))
    if cfg.tol <= 0:
        raise ConfigError("--tol must be positive")
    return cfg


def _state_text(args) -> str:
    if args.prep and args.state:
        raise ConfigError("give either --state or --prep, not both")
    if args.prep:
        t = args.prep.strip()
        return t if t.startswith("mix:") else "mix:" + t
    return args.state or "fock:1"


# --- record producers (pure; run in workers) ------------------------------

PROBS_COLUMNS = ["state", "r_x", "r_y", "phi", "outcome_n", "outcome_m", "probability"]
FISHER_COLUMNS = ["state", "r_x", "r_y", "phi", "fisher", "crb"]
FIDELITY_COLUMNS = ["state", "r_x", "r_y", "fidelity_bits", "quadrature_nodes"]
POSTERIOR_COLUMNS = ["state", "r_x", "r_y", "outcome", "phi", "density"]


def _outcome_cells(label):
    if isinstance(label, str):
        return label, ""
    return label[0], label[1]


def probs_records(cfg: RunConfig) -> list:
    dist = cfg.distribution()
    rows = []
    for phi in cfg.phases:
        for label, s in dist.items():
            n, m = _outcome_cells(label)
            rows.append({"state": cfg.state_text, "r_x": cfg.r_x, "r_y": cfg.r_y,
                         "phi": float(phi), "outcome_n": n, "outcome_m": m,
                         "probability": float(s(phi))})
    return rows


def fisher_records(cfg: RunConfig) -> list:
    dist = cfg.distribution()
    rows = []
    for phi in cfg.phases:
        rep = fisher_information(dist, phi)
        rows.append({"state": cfg.state_text, "r_x": cfg.r_x, "r_y": cfg.r_y,
                     "phi": float(phi), "fisher": rep.fisher, "crb": rep.cramer_rao_bound})
    return rows


def fidelity_records(cfg: RunConfig) -> list:
    res = fidelity_detailed(cfg.distribution(), cfg.prior, cfg.tol)
    return [{"state": cfg.state_text, "r_x": cfg.r_x, "r_y": cfg.r_y,
             "fidelity_bits": res.bits, "quadrature_nodes": res.nodes}]


def posterior_records(cfg: RunConfig, outcome, grid_size: int) -> list:
    post = posterior(cfg.distribution(), outcome, cfg.prior, grid_size)
    label = outcome if isinstance(outcome, str) else f"{outcome[0]},{outcome[1]}"
    return [{"state": cfg.state_text, "r_x": cfg.r_x, "r_y": cfg.r_y, "outcome": label,
             "phi": float(p), "density": float(d)} for p, d in zip(post.phi, post.density)]


METRICS = {
    "probs": (probs_records, PROBS_COLUMNS),
    "fisher": (fisher_records, FISHER_COLUMNS),
    "fidelity": (fidelity_records, FIDELITY_COLUMNS),
}


def _run_metric(job):
    metric, cfg = job
    return METRICS[metric][0](cfg)


# --- output ----------------------------------------------------------------

def _cell(v):
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        return repr(v)
    return str(v)


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return "inf" if v > 0 else "-inf"
    if isinstance(v, np.integer):
        return int(v)
    return v


def write_records(records: list, columns: list, out: str | None, fmt: str) -> None:
    if fmt == "json":
        text = json.dumps([{c: _json_value(r[c]) for c in columns} for r in records],
                          indent=1) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in records:
            w.writerow([_cell(r[c]) for c in columns])
        text = buf.getvalue()
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def worker_count() -> int:
    n = os.cpu_count() or 1
    cap = os.environ.get("MZI_THREADS")
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise ConfigError(f"MZI_THREADS must be an integer, got {cap!r}") from None
    return n


def run_jobs(jobs: list) -> list:
    """Evaluate jobs, preserving submission order regardless of completion order."""
    workers = min(worker_count(), len(jobs))
    if workers <= 1:
        results = [_run_metric(j) for j in jobs]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_run_metric, jobs))
    return [r for chunk in results for r in chunk]


# --- subcommands -----------------------------------------------------------

def cmd_probs(args):
    cfg = _config(args, _state_text(args))
    write_records(probs_records(cfg), PROBS_COLUMNS, args.out, args.format)


def cmd_fisher(args):
    cfg = _config(args, _state_text(args))
    write_records(fisher_records(cfg), FISHER_COLUMNS, args.out, args.format)


def cmd_fidelity(args):
    cfg = _config(args, _state_text(args))
    write_records(fidelity_records(cfg), FIDELITY_COLUMNS, args.out, args.format)


def cmd_posterior(args):
    cfg = _config(args, _state_text(args))
    try:
        outcome = _parse_label(args.outcome)
    except (ValueError, TypeError):
        raise ConfigError(f"bad outcome {args.outcome!r}; use n,m or inconclusive") from None
    try:
        recs = posterior_records(cfg, outcome, args.grid_size)
    except UnreachableOutcomeError as e:
        raise ConfigError(str(e)) from None
    write_records(recs, POSTERIOR_COLUMNS, args.out, args.format)


def cmd_sweep(args):
    states = args.state or ["fock:1"]
    if args.prep:
        raise ConfigError("sweep takes mixtures through --state mix:...")
    rx_grid = parse_grid(args.rx_grid) if args.rx_grid else np.array([args.rx])
    if args.equal_loss:
        pairs = [(float(r), float(r)) for r in rx_grid]
    else:
        ry_grid = parse_grid(args.ry_grid) if args.ry_grid else np.array([args.ry])
        pairs = [(float(a), float(b)) for a in rx_grid for b in ry_grid]
    jobs = [(args.metric, _config(args, st, rx, ry)) for st in states for rx, ry in pairs]
    records = run_jobs(jobs)
    write_records(records, METRICS[args.metric][1], args.out, args.format)


def cmd_smatrix(args):
    if args.convention == "fullangle":
        raise ConfigError("the fullangle convention is a tabulated transfer, not a scattering matrix")
    cfg = RunConfig("", None, args.rx, args.ry, convention=args.convention)
    try:
        S: ScatteringMatrix = cfg.transfer()
    except ValueError as e:
        raise ConfigError(str(e)) from None
    grid = parse_grid(args.phi_grid) if args.phi_grid else np.linspace(-math.pi, math.pi, 32)
    defect = unitarity_defect(S, grid)
    if args.format == "json":
        doc = {"r_x": args.rx, "r_y": args.ry, "convention": args.convention,
               "entries": [[{"z_power": p, "re": c.real, "im": c.imag}
                            for p, c in enumerate(S[i, j].coeffs)]
                           for i in range(S.n_modes) for j in range(S.n_modes)],
               "n_modes": S.n_modes, "unitarity_defect": defect}
        text = json.dumps(doc, indent=1) + "\n"
    else:
        lines = [f"S[{i + 1},{j + 1}] = {S[i, j].to_text()}"
                 for i in range(S.n_modes) for j in range(S.n_modes)]
        lines.append(f"unitarity_defect = {defect!r}")
        text = "\n".join(lines) + "\n"
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rx", type=float, default=0.0, help="loss amplitude, arm x")
    common.add_argument("--ry", type=float, default=0.0, help="loss amplitude, arm y")
    common.add_argument("--phi-grid", help="start:stop:count in radians, pi allowed (default -pi:pi:33)")
    common.add_argument("--convention", default="lossy",
                        choices=["lossy", "lossless2x2", "fullangle"],
                        help="transfer stage: lossy 4x4 matrix (default), lossless 2x2 "
                             "matrix, or the tabulated sin^2/cos^2 single-photon transfer")
    common.add_argument("--out", default="-", help="output path; '-' for stdout")

    stateful = argparse.ArgumentParser(add_help=False, parents=[common])
    stateful.add_argument("--prep", help="preparation mixture, e.g. p0=0.3:vac,p1=0.7:fock:1")
    stateful.add_argument("--detect", help="ideal | inconclusive | flip:px=P | kernel.json")
    stateful.add_argument("--prior", help="uniform | path to phi,weight CSV")
    stateful.add_argument("--tol", type=float, default=1e-8, help="fidelity tolerance (bits)")
    stateful.add_argument("--format", choices=["csv", "json"], default="csv")

    p = argparse.ArgumentParser(prog="mzinfo", description=__doc__.splitlines()[0] if __doc__ else None)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    for name, fn in [("probs", cmd_probs), ("fisher", cmd_fisher), ("fidelity", cmd_fidelity)]:
        sp = sub.add_parser(name, parents=[stateful])
        sp.add_argument("--state", help="vac | fock:N | noon:N | mix:name=p:state,...")
        sp.set_defaults(func=fn)

    sp = sub.add_parser("posterior", parents=[stateful])
    sp.add_argument("--state")
    sp.add_argument("--outcome", required=True, help="n,m or inconclusive")
    sp.add_argument("--grid-size", type=int, default=256)
    sp.set_defaults(func=cmd_posterior)

    sp = sub.add_parser("sweep", parents=[stateful])
    sp.add_argument("--metric", choices=sorted(METRICS), default="fidelity")
    sp.add_argument("--state", action="append", help="repeatable")
    sp.add_argument("--rx-grid", help="start:stop:count")
    sp.add_argument("--ry-grid", help="start:stop:count")
    sp.add_argument("--equal-loss", action="store_true", help="tie r_y to r_x")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("smatrix", parents=[common])
    sp.add_argument("--format", choices=["text", "json"], default="text")
    sp.set_defaults(func=cmd_smatrix)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        args.func(args)
    except ConfigError as e:
        print(f"mzinfo: error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as e:
        print(f"mzinfo: error: {e}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    return 0


if __name__ == "__main__":
    sys.exit(main())
