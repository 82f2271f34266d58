"""Command line interface: ``circlet run | diagram | synth | reproduce``.

Exit codes: 0 on success, 1 for input, configuration and other errors, 2
when no class qualifies or the integer lift fails.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .cohomology import check_prime, diagram, diagram_records, persistent_cohomology
from .coords import HARMONIC, INTEGER, evaluate_all, winding_number
from .errors import ConvergenceError, FormatError, LiftFailureError, NoQualifyingClassError, \
    ValidationError
from .filtration import build_rips
from .harmonic import TAPERED, UNIFORM, WeightScheme
from .metric_io import (dump_json, format_float, load_distance_matrix, load_point_cloud,
                        write_angles_csv, write_json, write_matrix_csv, write_points_csv)
from .pipeline import (MOST_PERSISTENT, class_coordinates, parse_selector, qualifying_pairs,
                       select_landmarks, stage)
from .svg import diagram_panel, scatter_panel, write_figure
from .synth import SHAPES, SynthSpec, generate, torus_embedding

EXIT_OK, EXIT_ERROR, EXIT_TOPOLOGY = 0, 1, 2


class ConfigError(ValueError):
    stage = "config"


class _Parser(argparse.ArgumentParser):
    """Usage errors are configuration errors (exit 1), not argparse's 2."""

    def error(self, message):
        raise ConfigError(message)


HINTS = {
    FileNotFoundError: "check the --input path",
    FormatError: "check --delimiter and --header; every row needs the same number of numeric fields",
    ValidationError: "a distance matrix must be square, symmetric and nonnegative with zero diagonal",
    NoQualifyingClassError: "use more landmarks (smaller r_L), select another --class, "
                            "or raise --threshold",
    LiftFailureError: "rerun with a different --prime",
    ConvergenceError: "loosen --tol or use --solver dense-svd",
    ConfigError: "see 'circlet <command> --help'",
}


def _hint(exc):
    for cls, text in HINTS.items():
        if isinstance(exc, cls):
            return text
    return None


def _exit_code(exc):
    return EXIT_TOPOLOGY if isinstance(exc, (NoQualifyingClassError, LiftFailureError)) else EXIT_ERROR


def _report(exc):
    where = getattr(exc, "stage", "internal")
    print(f"circlet: error in stage '{where}': {exc}", file=sys.stderr)
    hint = _hint(exc)
    if hint:
        print(f"hint: {hint}", file=sys.stderr)
    return _exit_code(exc)


# ---------------------------------------------------------------------------
# parser and config file

def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0 or not np.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _open_unit(text):
    v = float(text)
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"expected a number strictly between 0 and 1, got {text}")
    return v


def _prime(text):
    v = int(text)
    try:
        check_prime(v)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return v


def _delimiter(text):
    text = "\t" if text in ("\\t", "tab") else text
    if len(text) != 1:
        raise argparse.ArgumentTypeError("delimiter must be a single character")
    return text


def _add_input_options(p):
    g = p.add_argument_group("input")
    g.add_argument("--input", help="CSV file with points (one per row) or a distance matrix")
    g.add_argument("--kind", choices=("point-cloud", "matrix"), default="point-cloud")
    g.add_argument("--delimiter", type=_delimiter, default=",")
    g.add_argument("--header", action="store_true", help="skip one header line")
    g.add_argument("--config", help="key=value file; command line flags take precedence")
    g = p.add_argument_group("landmarks and persistence")
    g.add_argument("--landmarks", type=_positive_int, help="number of landmarks N")
    g.add_argument("--sampling", choices=("maxmin", "random"), default="maxmin")
    g.add_argument("--start", type=_nonneg_int, default=0, help="first maxmin landmark")
    g.add_argument("--seed", type=_nonneg_int, default=0, help="seed for random sampling")
    g.add_argument("--prime", type=_prime, default=47, help="coefficient field Z/q")
    g.add_argument("--threshold", type=_positive_float, default=None,
                   help="Rips threshold (default: landmark diameter)")
    g = p.add_argument_group("outputs")
    g.add_argument("--diagram", help="persistence diagram JSON")
    g.add_argument("--meta", help="run metadata JSON")
    g.add_argument("--svg", help="SVG figure")
    g.add_argument("--dump-filtration", help="CSV rows dim,i,j,k,diameter")


def build_parser():
    parser = _Parser(prog="circlet", description="Sparse circular coordinates for point clouds "
                                                  "and finite metric spaces.")
    parser.add_argument("--version", action="version", version=f"circlet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="compute circular coordinates")
    _add_input_options(run)
    g = run.add_argument_group("coordinates")
    g.add_argument("--t", type=_open_unit, default=0.5, help="scale interpolation t in (0, 1)")
    g.add_argument("--class", dest="classes", action="append", metavar="SEL",
                   help="K, K1+K2 or most-persistent (repeatable)")
    g.add_argument("--weights", choices=(TAPERED, UNIFORM), default=TAPERED)
    g.add_argument("--solver", choices=("iterative", "dense-svd"), default="iterative")
    g.add_argument("--tol", type=_positive_float, default=1e-10)
    g.add_argument("--mode", choices=(HARMONIC, INTEGER), default=HARMONIC)
    g.add_argument("--turns", action="store_true", help="report values in [0, 1) instead of radians")
    g.add_argument("--out", help="coordinates CSV")
    g.add_argument("--dump-cocycle", help="CSV rows i,j,value of the integer cocycle")

    dg = sub.add_parser("diagram", help="persistence diagram only")
    _add_input_options(dg)

    sy = sub.add_parser("synth", help="generate a synthetic data set")
    sy.add_argument("--shape", choices=SHAPES, required=True)
    sy.add_argument("--n", type=_positive_int, required=True)
    sy.add_argument("--sigma", type=float, default=0.0)
    sy.add_argument("--seed", type=_nonneg_int, default=0)
    sy.add_argument("--out", required=True, help="points CSV (distance matrix for klein)")
    sy.add_argument("--meta", help="CSV of generating parameters per point")

    rp = sub.add_parser("reproduce", help="rerun a reference experiment")
    rp.add_argument("figure", choices=tuple(REPRODUCTIONS))
    rp.add_argument("--outdir", default=".")
    rp.add_argument("--seed", type=_nonneg_int, default=0)
    return parser


def read_config(path):
    """Parse a ``key=value`` file (``#`` comments, blank lines ignored)."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


_BOOL = {"1": True, "true": True, "yes": True, "0": False, "false": False, "no": False}


def _apply_config(subparser, values):
    """Turn config strings into typed defaults of ``subparser``."""
    actions = {}
    for a in subparser._actions:
        if a.dest in ("help", "config"):
            continue
        for opt in a.option_strings:
            actions[opt.lstrip("-").replace("-", "_")] = a
    defaults, classes = {}, None
    for key, text in values.items():
        if key not in actions:
            raise ConfigError(f"unknown config key {key!r}")
        action = actions[key]
        key = action.dest
        if key == "classes":
            classes = [s.strip() for s in text.split(",") if s.strip()]
            continue
        if isinstance(action, argparse._StoreTrueAction):
            if text.lower() not in _BOOL:
                raise ConfigError(f"config key {key!r} expects true or false")
            defaults[key] = _BOOL[text.lower()]
            continue
        try:
            value = action.type(text) if action.type else text
        except (argparse.ArgumentTypeError, ValueError) as exc:
            raise ConfigError(f"config key {key!r}: {exc}") from None
        if action.choices is not None and value not in action.choices:
            raise ConfigError(f"config key {key!r} must be one of {list(action.choices)}")
        defaults[key] = value
    subparser.set_defaults(**defaults)
    return classes


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        sub = parser._subparsers._group_actions[0].choices[args.command]
        classes = _apply_config(sub, read_config(args.config))
        args = parser.parse_args(argv)
        if args.command == "run" and args.classes is None:
            args.classes = classes
    if args.command == "run" and not args.classes:
        args.classes = [MOST_PERSISTENT]
    if args.command in ("run", "diagram"):
        if not args.input:
            raise ConfigError("--input is required")
        if args.landmarks is None:
            raise ConfigError("--landmarks is required")
        if args.command == "run":
            for sel in args.classes:
                try:
                    parse_selector(sel)
                except ValueError as exc:
                    raise ConfigError(str(exc)) from None
    return args


def effective_config(args):
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "config"}
    cfg["config_file"] = getattr(args, "config", None)
    return cfg


# ---------------------------------------------------------------------------
# shared pipeline driver

def _ordered_timings(timings, wall):
    """Stage records in execution order with cumulative end offsets."""
    rows, total = [], 0.0
    for name, seconds in timings.items():
        total += seconds
        rows.append({"stage": name, "seconds": seconds, "cumulative": total})
    return {"stages": rows, "wall": max(wall, total)}


def _pair_record(index, pair):
    return {"index": index, "birth": pair.birth,
            "death": pair.death if pair.is_finite else None,
            "persistence": pair.persistence if pair.is_finite else None}


class Run:
    """Pipeline state collected for metadata, artifacts and error reports."""

    def __init__(self, config):
        self.config = config
        self.timings = {}
        self.t0 = time.perf_counter()
        self.src = None
        self.landmarks = None
        self.filt = None
        self.pairs = None
        self.classes = []
        self.lift_status = "not-run"
        self.error = None
        self.extra = {}

    def load(self, path, kind, delimiter, header):
        with stage("metric_io", self.timings):
            loader = load_point_cloud if kind == "point-cloud" else load_distance_matrix
            self.src = loader(path, delimiter=delimiter, header=header)

    def persistence(self, n_landmarks, sampling, start, seed, q, threshold):
        with stage("landmarks", self.timings):
            self.landmarks = select_landmarks(self.src, n_landmarks, sampling, start, seed)
        with stage("filtration", self.timings):
            D = self.src.submatrix(self.landmarks.indices)
            thr = float(D.max()) if threshold is None else float(threshold)
            if not thr > 0:
                raise ValueError("landmark set has zero diameter; nothing to filter")
            self.filt = build_rips(D, thr)
        with stage("cohomology", self.timings):
            self.pairs = persistent_cohomology(self.filt, q)

    def coordinate(self, selector, q, t, weights, solver, tol, mode, targets=None):
        try:
            res = class_coordinates(self.src, self.landmarks, self.filt, self.pairs,
                                    parse_selector(selector), q, t, weights, solver, tol,
                                    mode, targets, self.timings)
        except LiftFailureError:
            self.lift_status = "failed"
            raise
        self.lift_status = "ok"
        self.classes.append(res)
        return res

    def metadata(self):
        dim1 = diagram(self.pairs, 1) if self.pairs is not None else []
        r_L = self.landmarks.coverage_radius if self.landmarks is not None else None
        classes = []
        for c in self.classes:
            sols = [h for h in c.harmonics if h is not None]
            classes.append({
                "label": c.label,
                "combination": c.path,
                "pairs": [_pair_record(k, dim1[k]) for k in c.indices],
                "alpha": [m.alpha for m in c.models],
                "mode": c.models[0].mode,
                "lift_values": sorted({int(v) for e in c.lifts for v in e.values.values()}),
                "solver": [{"name": h.solver, "objective": h.residual,
                            "normal_residual": h.normal_residual,
                            "iterations": h.iterations} for h in sols],
                "not_covered": c.assignment.n_markers,
            })
        meta = {
            "tool": "circlet",
            "version": __version__,
            "status": "ok" if self.error is None else "error",
            "error": self.error,
            "config": self.config,
            "n_points": None if self.src is None else self.src.n,
            "n_landmarks": None if self.landmarks is None else len(self.landmarks),
            "r_L": r_L,
            "threshold": None if self.filt is None else self.filt.threshold,
            "q": self.config.get("prime"),
            "t": self.config.get("t"),
            "n_pairs": {"dim0": len(diagram(self.pairs or [], 0)), "dim1": len(dim1)},
            "qualifying": self._qualifying(dim1, r_L),
            "classes": classes,
            "lift_status": self.lift_status,
            "timings": _ordered_timings(self.timings, time.perf_counter() - self.t0),
        }
        meta.update(self.extra)
        return meta

    def _qualifying(self, dim1, r_L):
        if r_L is None or self.filt is None:
            return None
        ok = {id(p) for p in qualifying_pairs(dim1, r_L, self.filt.threshold)}
        return [k for k, p in enumerate(dim1) if id(p) in ok]

    def fail(self, exc):
        self.error = {"stage": getattr(exc, "stage", "internal"), "type": type(exc).__name__,
                      "message": str(exc), "exit_code": _exit_code(exc)}


def _write_filtration(path, filt):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("dim,i,j,k,diameter\n")
        for v in range(filt.n_vertices):
            fh.write(f"0,{v},-1,-1,0.0\n")
        for dim, i, j, k, d in filt.to_rows():
            fh.write(f"{dim},{i},{j},{k},{format_float(d)}\n")


def _write_cocycles(path, result_classes):
    lifts = [(m.class_id, eta) for c in result_classes for m, eta in zip(c.models, c.lifts)]
    p = Path(path)
    for cid, eta in lifts:
        target = p if len(lifts) == 1 else p.with_name(f"{p.stem}_{cid.replace('+', '-')}{p.suffix}")
        with open(target, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("i,j,value\n")
            for (i, j), v in sorted(eta.values.items()):
                if v:
                    fh.write(f"{i},{j},{v}\n")


def _scatter_xy(src):
    if src.points is None:
        return None
    P = src.points
    return P[:, :2] if P.shape[1] >= 2 else np.column_stack([P[:, 0], np.zeros(len(P))])


def _drive(args, compute_coords):
    run = Run(effective_config(args))
    try:
        run.load(args.input, args.kind, args.delimiter, args.header)
        run.persistence(args.landmarks, args.sampling, args.start, args.seed, args.prime,
                        args.threshold)
        with stage("output", run.timings):
            if args.diagram:
                write_json(args.diagram, diagram_records(run.pairs))
            if args.dump_filtration:
                _write_filtration(args.dump_filtration, run.filt)
        if compute_coords:
            weights = WeightScheme(edge_rule=args.weights)
            for sel in args.classes:
                run.coordinate(sel, args.prime, args.t, weights, args.solver, args.tol, args.mode)
            with stage("output", run.timings):
                _write_run_outputs(args, run)
        elif args.svg:
            with stage("output", run.timings):
                write_figure(args.svg, [diagram_panel(run.pairs)])
    except Exception as exc:
        run.fail(exc)
        if args.meta and run.src is not None:
            write_json(args.meta, run.metadata())
        raise
    if args.meta:
        write_json(args.meta, run.metadata())
    return run


def _write_run_outputs(args, run):
    if args.out:
        cols = [c.assignment.turns() if args.turns else c.assignment.angles for c in run.classes]
        names = ["angle"] + [f"angle_{k + 1}" for k in range(1, len(cols))]
        write_angles_csv(args.out, range(run.src.n), cols, names)
    if args.dump_cocycle:
        _write_cocycles(args.dump_cocycle, run.classes)
    if args.svg:
        xy = _scatter_xy(run.src)
        if xy is None:
            print("circlet: warning: --svg needs a point cloud; skipped", file=sys.stderr)
            run.extra["svg"] = "skipped: distance-matrix input"
        else:
            lxy = xy[np.asarray(run.landmarks.indices)]
            panels = [scatter_panel(xy, c.assignment.angles, lxy, f"class {c.label}")
                      for c in run.classes]
            write_figure(args.svg, panels)


def run_pipeline(argv):
    """Run ``circlet run`` with the given flag list and return its metadata dict.

    Errors propagate with their ``stage`` attribute set.
    """
    return _drive(parse_args(["run", *argv]), compute_coords=True).metadata()


def cmd_run(args):
    _drive(args, compute_coords=True)
    return EXIT_OK


def cmd_diagram(args):
    run = _drive(args, compute_coords=False)
    if not args.diagram:
        sys.stdout.write(dump_json(diagram_records(run.pairs)))
    return EXIT_OK


def cmd_synth(args):
    with_stage = {}
    with stage("synth", with_stage):
        data = generate(SynthSpec(args.shape, args.n, args.sigma, args.seed))
    with stage("output", with_stage):
        if data.source.points is not None:
            write_points_csv(args.out, data.source.points)
        else:
            write_matrix_csv(args.out, data.source.matrix)
        if args.meta:
            params = np.atleast_2d(data.params.T).T
            names = {"circle": ["t"], "torus": ["phi1", "phi2"], "klein": ["a", "b"]}[args.shape]
            with open(args.meta, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(",".join(["point_id", *names]) + "\n")
                for i, row in enumerate(params):
                    fh.write(",".join([str(i), *(format_float(v) for v in row)]) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# reference experiments

def _reproduce(figure, outdir, seed, shape, n, sigma, n_landmarks, q, selectors, modes,
               names, plot_params):
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    data = generate(SynthSpec(shape, n, sigma, seed))
    stem = out / figure
    if data.source.points is not None:
        write_points_csv(f"{stem}_data.csv", data.source.points)
    else:
        write_matrix_csv(f"{stem}_data.csv", data.source.matrix)
    config = {"figure": figure, "shape": shape, "n": n, "sigma": sigma, "seed": seed,
              "landmarks": n_landmarks, "sampling": "maxmin", "start": 0, "prime": q,
              "t": 0.5, "classes": list(selectors), "modes": list(modes), "weights": TAPERED,
              "solver": "iterative", "tol": 1e-10}
    run = Run(config)
    run.src = data.source
    try:
        run.persistence(n_landmarks, "maxmin", 0, 0, q, None)
        write_json(f"{stem}_diagram.json", diagram_records(run.pairs))
        for sel, mode in zip(selectors, modes):
            run.coordinate(sel, q, 0.5, WeightScheme(), "iterative", 1e-10, mode)
    except Exception as exc:
        run.fail(exc)
        write_json(f"{stem}_meta.json", run.metadata())
        raise
    cols = [c.assignment.angles for c in run.classes]
    write_angles_csv(f"{stem}_coords.csv", range(data.source.n), cols, names)
    params = np.atleast_2d(data.params.T).T
    xy = (params[:, :2] if plot_params else _scatter_xy(data.source))
    lxy = xy[np.asarray(run.landmarks.indices)]
    panels = [diagram_panel(run.pairs, f"{figure}: persistence")]
    panels += [scatter_panel(xy, c, lxy, name) for c, name in zip(cols, names)]
    write_figure(f"{stem}.svg", panels)
    run.extra["checks"] = _checks(figure, data, run)
    write_json(f"{stem}_meta.json", run.metadata())
    return run


def _checks(figure, data, run):
    dim1 = diagram(run.pairs, 1)
    qual = qualifying_pairs(dim1, run.landmarks.coverage_radius, run.filt.threshold)
    checks = {"qualifying_pairs": len(qual),
              "not_covered": [c.assignment.n_markers for c in run.classes]}
    if figure == "circle":
        order = np.argsort(data.params, kind="stable")
        checks["winding"] = [winding_number(c.assignment.angles[order]) for c in run.classes]
    if figure == "torus":
        s = np.linspace(0.0, 2.0 * np.pi, 2000, endpoint=False)
        loops = [torus_embedding(np.column_stack([s, np.full_like(s, 0.3)])),
                 torus_embedding(np.column_stack([np.full_like(s, 0.3), s]))]
        W = [[winding_number(evaluate_all(m, data.source, loop).angles) for loop in loops]
             for m in (c.models[0] for c in run.classes)]
        checks["winding_matrix"] = W
        checks["det"] = int(round(np.linalg.det(np.array(W, dtype=float))))
    return checks


REPRODUCTIONS = {
    "circle": dict(shape="circle", n=1000, sigma=0.1, n_landmarks=50, q=47,
                   selectors=(MOST_PERSISTENT, MOST_PERSISTENT), modes=(HARMONIC, INTEGER),
                   names=("harmonic", "integer"), plot_params=False),
    "torus": dict(shape="torus", n=1000, sigma=0.0, n_landmarks=100, q=47,
                  selectors=("0", "1"), modes=(HARMONIC, HARMONIC),
                  names=("angle", "angle_2"), plot_params=True),
    "klein": dict(shape="klein", n=1000, sigma=0.0, n_landmarks=100, q=13,
                  selectors=(MOST_PERSISTENT,), modes=(HARMONIC,),
                  names=("angle",), plot_params=True),
}


def reproduce(figure, outdir=".", seed=0):
    """Run one reference experiment and write its artifacts into ``outdir``."""
    return _reproduce(figure, outdir, seed, **REPRODUCTIONS[figure])


def cmd_reproduce(args):
    run = reproduce(args.figure, args.outdir, args.seed)
    print(dump_json(run.extra["checks"]), end="")
    return EXIT_OK


COMMANDS = {"run": cmd_run, "diagram": cmd_diagram, "synth": cmd_synth,
            "reproduce": cmd_reproduce}


def main(argv=None):
    try:
        args = parse_args(sys.argv[1:] if argv is None else argv)
        return COMMANDS[args.command](args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_OK
    except Exception as exc:
        return _report(exc)


if __name__ == "__main__":
    sys.exit(main())
