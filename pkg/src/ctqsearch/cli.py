"""Command-line interface.

Six subcommands cover the simulator surface: ``simulate`` (trajectory and
measurement statistics), ``verify`` (reduced model vs. brute-force evolution),
``estimate`` (overlap from register sampling), ``count`` (target counting),
``sweep`` (misplaced-confidence curve), and ``compare`` (structured vs.
uniform preparation).  Outputs are deterministic for a fixed seed: JSON is
written with sorted keys and no timestamps, so identical runs produce
identical bytes.

Exit codes: 0 on success, 1 on invalid input, 2 when an internal check fails.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .analysis import (
    BoundReport,
    check_scenario_bounds,
    compare_structured_unstructured,
    misplaced_confidence_curve,
    misplaced_structure,
)
from .dynamics import optimal_time, success_distribution, trajectory
from .fullsim import evolve_on_grid, full_hamiltonian, project_reduced
from .phase_estimation import (
    measurement_distribution,
    run_counting,
    run_phase_estimation,
)
from .scenario import ScenarioError, SearchScenario, load_scenario, scenario_to_dict
from .stateprep import weighted_superposition

SCHEMA_VERSION = "1.0"
VERIFY_TOL = 1e-10


class CliInputError(ValueError):
    """Invalid command line or scenario input."""


class InternalCheckError(RuntimeError):
    """An internal consistency check failed; exit code 2."""


class _Parser(argparse.ArgumentParser):
    # route argparse failures through the normal invalid-input path (exit 1)
    def error(self, message):
        raise CliInputError(message)


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--scenario", required=True, help="path to a scenario JSON file")
    sub.add_argument("--energy", type=float, default=None, help="override the energy scale")
    sub.add_argument("--out", default="results", help="output directory (created if missing)")
    sub.add_argument("--format", choices=("json", "csv", "both"), default="both")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ctqsearch", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("simulate", help="trajectory and success statistics")
    _add_common(p)
    p.add_argument("--points", type=int, default=256, help="trajectory grid size")
    p.add_argument("--t-max", type=float, default=None, help="trajectory horizon (default 2T)")

    p = subs.add_parser("verify", help="check the reduced model against brute force")
    _add_common(p)
    p.add_argument("--grid-points", type=int, default=64)

    p = subs.add_parser("estimate", help="estimate the overlap y from register samples")
    _add_common(p)
    p.add_argument("--m-size", type=int, default=64, help="register size (power of two)")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)

    p = subs.add_parser("count", help="estimate the number of targets in the support")
    _add_common(p)
    p.add_argument("--m-size", type=int, default=None, help="register size (default: auto)")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)

    p = subs.add_parser("sweep", help="misplaced-confidence cost curve")
    _add_common(p)
    p.add_argument("--alpha2-min", type=float, default=0.05)
    p.add_argument("--alpha2-max", type=float, default=0.999)
    p.add_argument("--alpha2-points", type=int, default=64)

    p = subs.add_parser("compare", help="structured vs. uniform preparation")
    _add_common(p)
    return parser


def _load(args) -> SearchScenario:
    scenario = load_scenario(args.scenario)
    if args.energy is not None:
        scenario = dataclasses.replace(scenario, energy=args.energy)
    return scenario


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, payload: dict) -> None:
    document = {"schema_version": SCHEMA_VERSION, **payload}
    path.write_text(json.dumps(document, sort_keys=True, indent=2) + "\n")
    print(f"wrote {path}")


def _write_csv(path: Path, header, rows) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    print(f"wrote {path}")


def _wants_json(args) -> bool:
    return args.format in ("json", "both")


def _wants_csv(args) -> bool:
    return args.format in ("csv", "both")


def _bound_dict(report: BoundReport) -> dict:
    return {
        "kind": report.bound_kind.value,
        "bound_on": report.bound_on,
        "y": report.y,
        "time": report.time,
        "bound_value": report.bound_value,
        "satisfied": report.satisfied,
        "margin": report.margin,
    }


def cmd_simulate(args) -> None:
    scenario = _load(args)
    prep = weighted_superposition(scenario)
    t_opt = optimal_time(prep.y, scenario.energy)
    traj = trajectory(prep, scenario.energy, t_max=args.t_max, n_points=args.points)
    dist = success_distribution(prep, scenario.energy, t_opt)
    out = _outdir(args)
    if _wants_json(args):
        _write_json(
            out / "simulate.json",
            {
                "command": "simulate",
                "scenario": scenario_to_dict(scenario),
                "y": prep.y,
                "nu": prep.nu,
                "r_count": prep.r_count,
                "optimal_time": t_opt,
                "success_distribution": {
                    "targets": {str(i): p for i, p in dist.target_probs.items()},
                    "failure": dist.failure,
                },
                "trajectory": {"points": int(args.points), "t_max": float(traj.times[-1])},
            },
        )
    if _wants_csv(args):
        _write_csv(
            out / "trajectory.csv",
            ["t", "re(a)", "im(a)", "re(b)", "im(b)", "success_prob"],
            [
                [t, a.real, a.imag, b.real, b.imag, s]
                for t, a, b, s in zip(traj.times, traj.a, traj.b, traj.success)
            ],
        )
        rows = [[i, dist.target_probs[i]] for i in sorted(dist.target_probs)]
        rows.append(["failure", dist.failure])
        _write_csv(out / "success_distribution.csv", ["item", "probability"], rows)
    print(f"y={prep.y:.6f} T={t_opt:.6f} success={dist.success:.6f}")


def cmd_verify(args) -> None:
    scenario = _load(args)
    prep = weighted_superposition(scenario)
    t_opt = optimal_time(prep.y, scenario.energy)
    times = np.linspace(0.0, 2.0 * t_opt, args.grid_points)
    h = full_hamiltonian(scenario, prep)
    states = evolve_on_grid(h, prep.beta, times)
    traj = trajectory(prep, scenario.energy, t_max=2.0 * t_opt, n_points=args.grid_points)
    max_leak = 0.0
    max_dev = 0.0
    for i, row in enumerate(states):
        a, b, leak = project_reduced(prep, row)
        max_leak = max(max_leak, leak)
        max_dev = max(max_dev, float(abs(a - traj.a[i])), float(abs(b - traj.b[i])))
    passed = bool(max_leak <= VERIFY_TOL and max_dev <= VERIFY_TOL)
    out = _outdir(args)
    _write_json(
        out / "verify.json",
        {
            "command": "verify",
            "scenario": scenario_to_dict(scenario),
            "grid_points": int(args.grid_points),
            "t_max": 2.0 * t_opt,
            "max_subspace_leak": max_leak,
            "max_trajectory_deviation": max_dev,
            "tolerance": VERIFY_TOL,
            "passed": passed,
        },
    )
    print(f"max_leak={max_leak:.3e} max_deviation={max_dev:.3e} passed={passed}")
    if not passed:
        raise InternalCheckError(
            f"reduced model disagrees with brute force: leak={max_leak:.3e}, "
            f"deviation={max_dev:.3e}, tolerance={VERIFY_TOL}"
        )


def cmd_estimate(args) -> None:
    scenario = _load(args)
    prep = weighted_superposition(scenario)
    est, samples = run_phase_estimation(
        scenario, m_size=args.m_size, n_samples=args.samples, seed=args.seed
    )
    out = _outdir(args)
    counts = np.bincount(samples, minlength=args.m_size)
    if _wants_json(args):
        _write_json(
            out / "estimate.json",
            {
                "command": "estimate",
                "scenario": scenario_to_dict(scenario),
                "m_size": int(args.m_size),
                "n_samples": int(args.samples),
                "seed": int(args.seed),
                "k_histogram": {str(k): int(c) for k, c in enumerate(counts) if c},
                "k_mode": est.k_mode,
                "y_candidates": list(est.y_candidates),
                "y_hat": est.y_hat,
                "resolution": est.resolution,
                "cluster_counts": list(est.cluster_counts),
                "true_y": prep.y,
            },
        )
    if _wants_csv(args):
        dist = measurement_distribution(prep.y, args.m_size)
        _write_csv(
            out / "register_distribution.csv",
            ["k", "p_total", "p_phase_y", "p_phase_complement"],
            [
                [k, dist.total[k], dist.branch_phase_y[k], dist.branch_phase_complement[k]]
                for k in range(args.m_size)
            ],
        )
    print(f"y_hat={est.y_hat:.6f} candidates={est.y_candidates} true_y={prep.y:.6f}")


def cmd_count(args) -> None:
    scenario = _load(args)
    result = run_counting(
        scenario, m_size=args.m_size, n_samples=args.samples, seed=args.seed
    )
    out = _outdir(args)
    _write_json(
        out / "count.json",
        {
            "command": "count",
            "scenario": scenario_to_dict(scenario),
            "disjoint_scenario": scenario_to_dict(result.scenario),
            "support_size": result.support_size,
            "m_size": result.m_size,
            "n_samples": int(args.samples),
            "seed": int(args.seed),
            "y_hat": result.estimate.y_hat,
            "count_estimate": result.count_estimate,
            "true_count": scenario.n_targets,
        },
    )
    print(
        f"count_estimate={result.count_estimate} true_count={scenario.n_targets} "
        f"support={result.support_size}"
    )


def cmd_sweep(args) -> None:
    scenario = _load(args)
    structure = misplaced_structure(scenario)
    if not 0.0 < args.alpha2_min < args.alpha2_max < 1.0:
        raise CliInputError("need 0 < --alpha2-min < --alpha2-max < 1")
    if args.alpha2_points < 2:
        raise CliInputError("--alpha2-points must be >= 2")
    grid = np.linspace(args.alpha2_min, args.alpha2_max, args.alpha2_points)
    curve = misplaced_confidence_curve(
        structure.l, structure.n1, structure.n2, structure.n12, grid, scenario.energy
    )
    times = [p.time for p in curve]
    reports = check_scenario_bounds(scenario)
    out = _outdir(args)
    if _wants_json(args):
        _write_json(
            out / "sweep.json",
            {
                "command": "sweep",
                "scenario": scenario_to_dict(scenario),
                "structure": dataclasses.asdict(structure),
                "alpha2_grid": {
                    "min": float(args.alpha2_min),
                    "max": float(args.alpha2_max),
                    "points": int(args.alpha2_points),
                },
                "time_at_min": times[0],
                "time_at_max": times[-1],
                "divergence_ratio": times[-1] / times[0],
                "monotone_increasing": bool(np.all(np.diff(times) > 0)),
                "bound_reports": [_bound_dict(r) for r in reports],
            },
        )
    if _wants_csv(args):
        _write_csv(
            out / "sweep_curve.csv",
            ["alpha2", "nu", "y", "T"],
            [[p.alpha2, p.nu, p.y, p.time] for p in curve],
        )
    print(
        f"alpha2 in [{args.alpha2_min}, {args.alpha2_max}]: "
        f"T grows {times[-1] / times[0]:.1f}x"
    )


def cmd_compare(args) -> None:
    scenario = _load(args)
    report = compare_structured_unstructured(scenario)
    out = _outdir(args)
    _write_json(
        out / "compare.json",
        {
            "command": "compare",
            "scenario": scenario_to_dict(scenario),
            "y_structured": report.y_structured,
            "y_uniform": report.y_uniform,
            "time_structured": report.time_structured,
            "time_uniform": report.time_uniform,
            "time_ratio": report.time_ratio,
            "speedup": report.speedup,
            "confidence": report.confidence.value,
            "support_exponent": report.support_exponent,
        },
    )
    print(
        f"structured T={report.time_structured:.4f} uniform T={report.time_uniform:.4f} "
        f"speedup={report.speedup:.4f}"
    )


COMMANDS = {
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "estimate": cmd_estimate,
    "count": cmd_count,
    "sweep": cmd_sweep,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        COMMANDS[args.command](args)
    except (CliInputError, ScenarioError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InternalCheckError as exc:
        print(f"internal check failed: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
