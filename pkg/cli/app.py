"""
cli/app.py

Command-line controller for topophase.

    topophase phase   <file> [--path NAME] [--tol R] [--preset P]
    topophase check   <file> [--format text|json] [--preset P]
    topophase sweep   <file> --param KEY --values V1,V2,... --out FILE [--path NAME]
    topophase fields  <file> --grid x0:x1:nx,y0:y1:ny,z0:z1:nz --out FILE
    topophase duality <file> --out FILE

Exit codes: 0 success (or topological), 1 non-topological classification,
2 input error.
"""

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from cli.output import FIELDS_HEADER, SWEEP_HEADER, phase_report, report_json, write_csv
from core.errors import Diagnostic, ScenarioError, SingularityProximityError, TopoPhaseError
from core.rules import ACCURACY_PRESETS, DEFAULT_PRESET, SINGULARITY_MARGIN, TOPOLOGICAL, preset
from core.scenario import (
    load_scenario,
    parse_scenario,
    read_document,
    resolve_dotted,
    scenario_from_document,
    serialize,
    set_dotted,
)
from core.veccalc import FDParams
from physics.phase import line_phase, phase_vector_field
from physics.relkit import duality_map
from physics.topocheck import classify

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NOT_TOPOLOGICAL = 1
EXIT_INPUT_ERROR = 2


@dataclass(frozen=True)
class SweepSpec:
    param: str
    values: tuple
    out: str

    @classmethod
    def parse(cls, param, values_text, out):
        parts = [v.strip() for v in values_text.split(",") if v.strip()]
        if not parts:
            raise ScenarioError("empty sweep", [Diagnostic("EMPTY_SWEEP", "no sweep values given", "--values")])
        try:
            values = tuple(float(v) for v in parts)
        except ValueError as exc:
            raise ScenarioError(
                f"sweep values must be reals: {exc}",
                [Diagnostic("BAD_SWEEP_VALUE", str(exc), "--values")],
            ) from exc
        return cls(param, values, out)


def parse_grid(spec):
    """'x0:x1:nx,y0:y1:ny,z0:z1:nz' -> (N, 3) points, x slowest, z fastest."""
    axes = spec.split(",")
    if len(axes) != 3:
        raise ScenarioError(
            f"grid spec needs three axes, got '{spec}'",
            [Diagnostic("BAD_GRID", "grid spec needs three comma-separated axes", "--grid")],
        )
    coords = []
    for axis in axes:
        try:
            lo, hi, n = axis.split(":")
            lo, hi, n = float(lo), float(hi), int(n)
        except ValueError as exc:
            raise ScenarioError(
                f"bad grid axis '{axis}' (expected lo:hi:n)",
                [Diagnostic("BAD_GRID", f"bad grid axis '{axis}'", "--grid")],
            ) from exc
        if n < 1:
            raise ScenarioError(
                f"grid axis '{axis}' needs n >= 1",
                [Diagnostic("BAD_GRID", f"grid axis '{axis}' needs n >= 1", "--grid")],
            )
        coords.append(np.array([lo]) if n == 1 else np.linspace(lo, hi, n))
    X, Y, Z = np.meshgrid(*coords, indexing="ij")
    return np.stack([X.ravel(), Y.ravel(), Z.ravel()], axis=-1)


class TopoPhaseCLI:
    """
    Command controller: loads scenarios, applies the accuracy preset and
    dispatches to the phase, topology and duality engines.
    """

    def __init__(self, preset_name=DEFAULT_PRESET, stdout=None):
        settings = preset(preset_name)
        self.preset_name = preset_name
        self.tol = settings['tol']
        self.fd = FDParams(order=settings['fd_order'])
        self.stdout = stdout or sys.stdout

    def _emit(self, text):
        self.stdout.write(text)

    @staticmethod
    def _pick_path(scenario, name):
        if name is not None:
            return scenario.path(name)
        closed = scenario.closed_paths()
        return closed[0] if closed else next(iter(scenario.paths.values()))

    # ---------------------------------------------------------
    # Commands
    # ---------------------------------------------------------
    def cmd_phase(self, file, path_name=None, tol=None):
        scenario = load_scenario(file)
        path = self._pick_path(scenario, path_name)
        tol = self.tol if tol is None else tol
        T = phase_vector_field(scenario)
        result = line_phase(T, path, tol)
        self._emit(phase_report(path.name, T.kind, result, tol))
        return EXIT_OK

    def cmd_check(self, file, fmt="text"):
        scenario = load_scenario(file)
        report = classify(scenario, tol=self.tol, p=self.fd)
        self._emit(report_json(report) if fmt == "json" else report.to_flat_text())
        return EXIT_OK if report.classification == TOPOLOGICAL else EXIT_NOT_TOPOLOGICAL

    def cmd_sweep(self, file, spec, path_name=None):
        document = read_document(file)
        resolve_dotted(document, spec.param)
        rows = []
        for value in spec.values:
            scenario = scenario_from_document(set_dotted(document, spec.param, value))
            path = self._pick_path(scenario, path_name)
            result = line_phase(phase_vector_field(scenario), path, self.tol)
            report = classify(scenario, tol=self.tol, p=self.fd)
            logger.debug("sweep %s=%r -> %r", spec.param, value, result.value)
            rows.append((value, result.value, result.abs_error_estimate, report.classification))
        write_csv(spec.out, SWEEP_HEADER, rows)
        return EXIT_OK

    def cmd_fields(self, file, grid, out):
        scenario = load_scenario(file)
        pts = parse_grid(grid)
        for side, F in (("E", scenario.E), ("B", scenario.B)):
            dist = F.singularity_distance(pts)
            if np.any(dist <= SINGULARITY_MARGIN):
                bad = pts[int(np.argmin(dist))]
                raise SingularityProximityError(
                    f"grid point ({bad[0]:g}, {bad[1]:g}, {bad[2]:g}) lies on a {side}-field singularity"
                )
        T = phase_vector_field(scenario)
        table = np.concatenate([pts, scenario.E(pts), scenario.B(pts), T(pts)], axis=1)
        write_csv(out, FIELDS_HEADER, table.tolist())
        return EXIT_OK

    def cmd_duality(self, file, out):
        scenario = load_scenario(file)
        dual = duality_map(scenario)
        text = serialize(dual)
        parse_scenario(text)
        Path(out).write_text(text, encoding="utf-8")
        return EXIT_OK


# =========================================================
# ARGUMENT PARSING
# =========================================================

def build_parser():
    parser = argparse.ArgumentParser(
        prog="topophase",
        description="Topological phases of induced dipoles: loop phases, topology checks, sweeps and duality.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on standard error")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_preset(p):
        p.add_argument(
            "--preset",
            choices=sorted(ACCURACY_PRESETS),
            default=DEFAULT_PRESET,
            help="accuracy preset: " + "; ".join(f"{k}: {v['description']}" for k, v in ACCURACY_PRESETS.items()),
        )
        return p

    p = with_preset(sub.add_parser("phase", help="loop/line phase along one path"))
    p.add_argument("file")
    p.add_argument("--path", dest="path_name")
    p.add_argument("--tol", type=float)

    p = with_preset(sub.add_parser("check", help="classify the scenario's phase"))
    p.add_argument("file")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = with_preset(sub.add_parser("sweep", help="phase versus one scenario parameter, as CSV"))
    p.add_argument("file")
    p.add_argument("--param", required=True, help="dotted key, e.g. fields.B.0.params.magnitude")
    p.add_argument("--values", required=True, help="comma-separated reals")
    p.add_argument("--out", required=True)
    p.add_argument("--path", dest="path_name")

    p = with_preset(sub.add_parser("fields", help="E, B and T sampled on a grid, as CSV"))
    p.add_argument("file")
    p.add_argument("--grid", required=True, help="x0:x1:nx,y0:y1:ny,z0:z1:nz")
    p.add_argument("--out", required=True)

    p = sub.add_parser("duality", help="write the electric/magnetic dual scenario")
    p.add_argument("file")
    p.add_argument("--out", required=True)
    return parser


def configure_logging(verbose):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


def main(argv=None, stdout=None):
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    app = TopoPhaseCLI(getattr(args, "preset", DEFAULT_PRESET), stdout=stdout)

    try:
        if args.command == "phase":
            return app.cmd_phase(args.file, args.path_name, args.tol)
        if args.command == "check":
            return app.cmd_check(args.file, args.format)
        if args.command == "sweep":
            return app.cmd_sweep(args.file, SweepSpec.parse(args.param, args.values, args.out), args.path_name)
        if args.command == "fields":
            return app.cmd_fields(args.file, args.grid, args.out)
        if args.command == "duality":
            return app.cmd_duality(args.file, args.out)
    except TopoPhaseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    return EXIT_INPUT_ERROR
