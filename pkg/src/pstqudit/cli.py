"""Command-line front end: ``pstqudit {analyze,spectrum,design,evolve,verify,catalog}``.

Exit codes: 0 success, 2 parse/usage error, 3 infeasible network,
4 tolerance violation, 5 oracle dimension cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import catalog, oracle, solver
from .graph import Graph, GraphError, IntersectionNumbers, load_document
from .pipeline import Network, NotPseudoDistanceRegular, analyze
from .spectral import SpectralError, qd_from_graph, spectral_report

EXIT_OK, EXIT_PARSE, EXIT_INFEASIBLE, EXIT_TOLERANCE, EXIT_DIMENSION = 0, 2, 3, 4, 5
TOLERANCE_ENV = "PST_SEED_TOLERANCE"


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    input: Path | None = None
    catalog_name: str | None = None
    reference: int = 0
    theta: float = 0.0
    t0: float = 1.0
    branch_l: list[int] | None = None
    phase_factor: float = 2
    d: int = 2
    grid: tuple[float, float, int] | None = None
    tolerance: float = solver.PST_TOL
    out: Path | None = None
    paper_couplings: bool = False
    phase_candidates: tuple[float, ...] = field(default=oracle.PHASE_CANDIDATES)

    def __post_init__(self) -> None:
        if self.t0 <= 0:
            raise CliError("--t0 must be positive", EXIT_PARSE)
        if self.tolerance <= 0:
            raise CliError("tolerance must be positive", EXIT_PARSE)
        if self.grid is not None:
            t_min, t_max, samples = self.grid
            if samples < 2:
                raise CliError("--grid needs at least 2 samples", EXIT_PARSE)
            if not t_min <= self.t0 <= t_max:
                raise CliError(f"t0 = {self.t0} lies outside the grid [{t_min}, {t_max}]", EXIT_PARSE)

    @property
    def time_grid(self) -> np.ndarray:
        t_min, t_max, samples = self.grid or (0.0, 2 * self.t0, 201)
        return solver.time_grid(t_min, t_max, samples, self.t0)


def _round(obj: Any) -> Any:
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, (float, np.floating)):
        x = float(f"{float(obj):.12g}")
        return 0.0 if x == 0 else x
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_round(x) for x in obj]
    return str(obj)


def dumps(doc: dict[str, Any]) -> str:
    """Deterministic JSON with floats cut to 12 significant digits."""
    return json.dumps(_round(doc), indent=2) + "\n"


def _load(cfg: RunConfig) -> Graph | IntersectionNumbers:
    if cfg.catalog_name is not None:
        try:
            return catalog.get(cfg.catalog_name).construct()
        except KeyError as exc:
            raise CliError(str(exc.args[0]), EXIT_PARSE) from None
    if cfg.input is None:
        raise CliError("one of --input or --catalog is required", EXIT_PARSE)
    try:
        text = Path(cfg.input).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {cfg.input}: {exc}", EXIT_PARSE) from None
    try:
        return load_document(text)
    except GraphError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None


def _network(cfg: RunConfig) -> Network:
    obj = _load(cfg)
    if isinstance(obj, Graph) and not 0 <= cfg.reference < obj.n_vertices:
        raise CliError(f"reference vertex {cfg.reference} out of range", EXIT_PARSE)
    try:
        return analyze(obj, cfg.reference)
    except NotPseudoDistanceRegular as exc:
        raise CliError(str(exc), EXIT_INFEASIBLE) from None
    except (GraphError, SpectralError) as exc:
        raise CliError(str(exc), EXIT_INFEASIBLE) from None
    except solver.ToleranceError as exc:
        raise CliError(str(exc), EXIT_TOLERANCE) from None


def _numbers_doc(net: Network) -> dict[str, Any]:
    num = net.numbers
    return {
        "b": [float(x) for x in num.b],
        "c": [float(x) for x in num.c],
        "a": [float(x) for x in num.a],
        "kappa": num.kappa,
    }


def cmd_analyze(cfg: RunConfig) -> dict[str, Any]:
    obj = _load(cfg)
    doc: dict[str, Any] = {"name": obj.name}
    if isinstance(obj, Graph):
        from .graph import intersection_numbers, stratify

        if not 0 <= cfg.reference < obj.n_vertices:
            raise CliError(f"reference vertex {cfg.reference} out of range", EXIT_PARSE)
        strat = stratify(obj, cfg.reference)
        report = intersection_numbers(obj, strat)
        doc.update(
            reference=cfg.reference,
            strata=[list(s) for s in strat.strata],
            valencies=list(strat.valencies),
            diameter=strat.diameter,
            regular=obj.is_regular,
            pseudo_distance_regular=report.is_pseudo_distance_regular,
        )
        if not report.is_pseudo_distance_regular:
            k, b1, b2 = report.witness
            doc["witness"] = {"stratum": k, "vertices": [b1, b2]}
            return doc
        try:
            qd = qd_from_graph(obj, strat)
            doc["stratum_span_invariant"] = True
            doc["qd_from_strata"] = qd.to_document()
        except SpectralError:
            doc["stratum_span_invariant"] = False
    net = _network(cfg)
    doc["intersection_numbers"] = _numbers_doc(net)
    doc["valencies"] = list(net.valencies)
    doc["feasible"] = net.feasibility.feasible
    if not net.feasibility.feasible:
        doc["infeasibility"] = net.feasibility.reason
    return doc


def cmd_spectrum(cfg: RunConfig) -> dict[str, Any]:
    net = _network(cfg)
    return {"name": net.name, **spectral_report(net.qd, net.polys, net.dist)}


def infer_branches(J: np.ndarray, pm: solver.PMatrix, theta: float, t0: float, c: float) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Branch integers ``(l, f)`` reproducing a given coupling vector."""
    f = solver.sign_branches(pm)
    phases = -c * t0 * solver.spectrum_sums(J, pm)
    l = tuple(int(round((p - theta - fk * math.pi) / (2 * math.pi))) for p, fk in zip(phases, f))
    return l, f


def _design(cfg: RunConfig, net: Network) -> solver.CouplingDesign:
    if not net.feasibility.feasible:
        raise CliError(f"infeasible network: {net.feasibility.reason}", EXIT_INFEASIBLE)
    if cfg.paper_couplings:
        entry = catalog.CATALOG.get(cfg.catalog_name or "")
        if entry is None or entry.couplings is None:
            raise CliError("--paper-couplings needs a catalog entry with published couplings", EXIT_PARSE)
        J = entry.couplings(cfg.theta, cfg.t0)
        l, f = infer_branches(J, net.pm, cfg.theta, cfg.t0, cfg.phase_factor)
        design = solver.CouplingDesign(J, cfg.theta, cfg.t0, l, f, cfg.phase_factor)
    else:
        if cfg.branch_l is not None and len(cfg.branch_l) != net.qd.D + 1:
            raise CliError(f"--branch needs {net.qd.D + 1} integers", EXIT_PARSE)
        try:
            design = solver.design_couplings(
                net.pm, cfg.theta, cfg.t0, cfg.branch_l, phase_factor=cfg.phase_factor
            )
        except solver.ToleranceError as exc:
            raise CliError(str(exc), EXIT_TOLERANCE) from None
    res = solver.round_trip_residual(design, net.pm)
    if res > cfg.tolerance:
        raise CliError(f"couplings fail the round trip by {res:.3e}", EXIT_TOLERANCE)
    return design


def cmd_design(cfg: RunConfig) -> dict[str, Any]:
    net = _network(cfg)
    design = _design(cfg, net)
    return {"name": net.name, **design.to_document()}


def cmd_evolve(cfg: RunConfig) -> tuple[str, dict[str, Any]]:
    net = _network(cfg)
    design = _design(cfg, net)
    report = solver.evolve(design, net.pm, cfg.time_grid)
    doc = {"name": net.name, **report.to_document()}
    doc["perfect_transfer"] = (
        report.fidelity_at_t0 >= 1 - cfg.tolerance and report.max_leakage <= cfg.tolerance
    )
    return solver.curve_csv(report), doc


def cmd_verify(cfg: RunConfig) -> dict[str, Any]:
    net = _network(cfg)
    if net.graph is None:
        raise CliError("verify needs an explicit graph, not an intersection array", EXIT_PARSE)
    design = _design(cfg, net)
    try:
        report = oracle.full_transfer_experiment(
            net.graph, design, net.polys, net.pm, cfg.d,
            reference=cfg.reference, candidates=cfg.phase_candidates,
        )
    except oracle.DimensionCapError as exc:
        raise CliError(str(exc), EXIT_DIMENSION) from None
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None
    return report.to_document()


def _parse_grid(text: str) -> tuple[float, float, int]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("--grid takes t_min,t_max,samples")
    try:
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _parse_ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pstqudit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--input", type=Path, help="graph or intersection-array JSON document")
    src.add_argument("--catalog", dest="catalog_name", help="catalog entry name")
    common.add_argument("--ref", dest="reference", type=int, default=0)
    common.add_argument("--out", type=Path, help="output directory (default: stdout)")

    design = argparse.ArgumentParser(add_help=False)
    design.add_argument("--theta", type=float, default=0.0)
    design.add_argument("--t0", type=float, default=1.0)
    design.add_argument("--branch", dest="branch_l", type=_parse_ints)
    design.add_argument("--phase-factor", type=float, default=2, choices=[1, 2])
    design.add_argument("--paper-couplings", action="store_true")

    sub.add_parser("analyze", parents=[common], help="stratification and pseudo-distance-regularity")
    sub.add_parser("spectrum", parents=[common], help="Jacobi parameters, quadrature, polynomials")
    sub.add_parser("design", parents=[common, design], help="coupling constants")
    ev = sub.add_parser("evolve", parents=[common, design], help="reduced dynamics and fidelity curve")
    ev.add_argument("--grid", type=_parse_grid, help="t_min,t_max,samples")
    ver = sub.add_parser("verify", parents=[common, design], help="full d**N oracle experiment")
    ver.add_argument("--d", type=int, default=2)
    ver.add_argument("--phase-candidates", type=_parse_floats, default=oracle.PHASE_CANDIDATES)

    cat = sub.add_parser("catalog", help="list or export catalog entries")
    cat.add_argument("action", choices=["list", "export"])
    cat.add_argument("name", nargs="?")
    return parser


def _emit(out: Path | None, filename: str, text: str) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    out.mkdir(parents=True, exist_ok=True)
    with open(out / filename, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _config(args: argparse.Namespace) -> RunConfig:
    tolerance = solver.PST_TOL
    if os.environ.get(TOLERANCE_ENV):
        try:
            tolerance = float(os.environ[TOLERANCE_ENV])
        except ValueError:
            raise CliError(f"{TOLERANCE_ENV} must be a number", EXIT_PARSE) from None
    return RunConfig(
        input=args.input,
        catalog_name=args.catalog_name,
        reference=args.reference,
        theta=getattr(args, "theta", 0.0),
        t0=getattr(args, "t0", 1.0),
        branch_l=getattr(args, "branch_l", None),
        phase_factor=getattr(args, "phase_factor", 2),
        d=getattr(args, "d", 2),
        grid=getattr(args, "grid", None),
        tolerance=tolerance,
        out=args.out,
        paper_couplings=getattr(args, "paper_couplings", False),
        phase_candidates=tuple(getattr(args, "phase_candidates", oracle.PHASE_CANDIDATES)),
    )


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        if args.command == "catalog":
            if args.action == "list":
                sys.stdout.write("".join(f"{name}\n" for name in catalog.CATALOG))
                return EXIT_OK
            if not args.name:
                raise CliError("catalog export needs a name", EXIT_PARSE)
            try:
                obj = catalog.get(args.name).construct()
            except KeyError as exc:
                raise CliError(str(exc.args[0]), EXIT_PARSE) from None
            sys.stdout.write(json.dumps(obj.to_document()) + "\n")
            return EXIT_OK
        cfg = _config(args)
        if args.command == "analyze":
            _emit(cfg.out, "analysis.json", dumps(cmd_analyze(cfg)))
        elif args.command == "spectrum":
            _emit(cfg.out, "spectrum.json", dumps(cmd_spectrum(cfg)))
        elif args.command == "design":
            _emit(cfg.out, "design.json", dumps(cmd_design(cfg)))
        elif args.command == "evolve":
            csv, doc = cmd_evolve(cfg)
            if cfg.out is None:
                sys.stdout.write(dumps(doc))
            else:
                _emit(cfg.out, "curve.csv", csv)
                _emit(cfg.out, "transfer.json", dumps(doc))
            if not doc["perfect_transfer"]:
                raise CliError("perfect transfer not reached at t0", EXIT_TOLERANCE)
        elif args.command == "verify":
            doc = cmd_verify(cfg)
            _emit(cfg.out, "verify.json", dumps(doc))
            if doc["phase_factor_resolved"] is None:
                errs = ", ".join(f"c={c}: {e:.3e}" for c, e in doc["reduced_errors"].items())
                raise CliError(f"no unique phase factor reproduces the oracle ({errs})", EXIT_TOLERANCE)
    except CliError as exc:
        print(f"pstqudit: error: {exc}", file=sys.stderr)
        return exc.code
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
