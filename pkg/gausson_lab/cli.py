"""Command-line front end: `python -m gausson_lab <subcommand> [flags]`."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .artifacts import prepare_output_dir, write_csv, write_failures, write_json
from .config import ExperimentConfig, load_config
from .dynamics import TRACE_COLUMNS, conservation_drift, evolve
from .errors import GaussonLabError
from .functionals import gausson
from .groundstate import SWEEP_COLUMNS, continuation_sweep, solve_ground_state
from .operator import build_hamiltonian, ground_eigenpair
from .stability import PERTURBATIONS, reference_profile, stability_experiment
from .verify import CHECK_COLUMNS, run_identity_suite

logger = logging.getLogger(__name__)

Failure = Dict[str, object]


def _failure(check: str, value: float, threshold: float) -> Failure:
    return {"check": check, "value": float(value), "threshold": float(threshold)}


def _status(ok: bool, message: str):
    print(f"{'✅' if ok else '❌'} {message}")


def _profile_rows(config: ExperimentConfig, profile, analytic):
    x = config.grid().x
    for j in range(x.size):
        yield {
            "x": float(x[j]),
            "re": float(profile.values[j].real),
            "im": float(profile.values[j].imag),
            "analytic": float(analytic.values[j].real),
        }


# ============================================================================
# SUBCOMMANDS
# ============================================================================


def cmd_verify(config: ExperimentConfig, out: Path) -> List[Failure]:
    """Analytic identity suite (Gausson residual, jump, Nehari, d bounds, Orlicz)."""
    print(f"\n🔍 Identity suite for gamma={config.gamma:g}, omega={config.omega:g}")
    checks = run_identity_suite(config)
    width = max(len(c.name) for c in checks)
    for c in checks:
        print(f"   {'PASS' if c.passed else 'FAIL'}  {c.name:<{width}}  {c.value:.3e}")
    write_csv(out / "verify.csv", CHECK_COLUMNS, (c.as_row() for c in checks), config)
    return [_failure(c.name, c.value, c.threshold) for c in checks if not c.passed]


def cmd_groundstate(config: ExperimentConfig, out: Path) -> List[Failure]:
    """Nehari-descent ground state compared with the analytic profile."""
    p = config.params()
    print(f"\n⚙️  Ground state for gamma={config.gamma:g}, omega={config.omega:g}")
    result = solve_ground_state(p, config.grid(), config.solver())
    ref = gausson(p)
    analytic = ref.sample(config.grid())
    error = float(np.max(np.abs(result.profile.values - analytic.values)) / np.max(np.abs(analytic.values)))
    d_quadrature = 0.5 * ref.mass_by_quadrature()

    _status(result.converged, f"converged={result.converged} after {result.iterations} iterations (residual {result.final_residual:.3e})")
    print(f"   d estimate:    {result.d_estimate:.12g}")
    print(f"   d quadrature:  {d_quadrature:.12g}")
    print(f"   d closed form: {ref.d_value:.12g}")
    print(f"   sup-norm relative error vs analytic profile: {error:.3e}")

    write_csv(out / "groundstate.csv", ("x", "re", "im", "analytic"), _profile_rows(config, result.profile, analytic), config)
    write_json(
        out / "groundstate.json",
        {
            "d_estimate": result.d_estimate,
            "d_quadrature": d_quadrature,
            "d_closed_form": ref.d_value,
            "iterations": result.iterations,
            "final_residual": result.final_residual,
            "converged": result.converged,
            "sup_relative_error": error,
            "drift_flagged": result.drift_flagged,
        },
        config,
    )
    failures = []
    if not result.converged:
        failures.append(_failure("ground state converged", result.final_residual, config.tol))
    if config.gamma >= 0 and error > 1e-3:
        failures.append(_failure("profile matches analytic Gausson", error, 1e-3))
    if config.gamma > 0 and abs(result.d_estimate - d_quadrature) > 1e-3 * d_quadrature:
        failures.append(_failure("d estimate matches quadrature", abs(result.d_estimate - d_quadrature) / d_quadrature, 1e-3))
    return failures


def cmd_spectrum(config: ExperimentConfig, out: Path) -> List[Failure]:
    """Ground eigenpair of the delta Hamiltonian against -gamma^2/4."""
    print(f"\n⚙️  Ground eigenpair of H for gamma={config.gamma:g}")
    lam, _ = ground_eigenpair(build_hamiltonian(config.grid(), config.gamma))
    payload = {"eigenvalue": lam, "gamma": config.gamma}
    failures = []
    if config.gamma > 0:
        target = -config.gamma**2 / 4.0
        error = abs(lam - target)
        payload.update(target=target, error=error)
        _status(error <= 5e-2, f"lambda = {lam:.12g}, target -gamma^2/4 = {target:.12g}, error {error:.3e}")
        if error > 5e-2:
            failures.append(_failure("eigenvalue near -gamma^2/4", error, 5e-2))
    else:
        _status(lam >= -1e-6, f"lambda = {lam:.12g} (no bound state expected)")
        if lam < -1e-6:
            failures.append(_failure("no bound state", lam, -1e-6))
    write_json(out / "spectrum.json", payload, config)
    return failures


def cmd_evolve(config: ExperimentConfig, out: Path) -> List[Failure]:
    """Standing-wave trajectory with conservation diagnostics."""
    p = config.params()
    print(f"\n⚙️  Standing-wave evolution to T={config.T:g} with dt={config.dt:g}")
    u0 = reference_profile(p, config.grid(), config.solver())
    _, trace = evolve(u0, p, config.integrator(), progress=sys.stderr.isatty())
    write_csv(out / "trace.csv", TRACE_COLUMNS, (r.as_row() for r in trace), config)
    charge_drift, energy_drift = conservation_drift(trace)
    _status(charge_drift <= 1e-10, f"charge drift {charge_drift:.3e}")
    _status(energy_drift <= 1e-4, f"energy drift {energy_drift:.3e}")
    failures = []
    if charge_drift > 1e-10:
        failures.append(_failure("charge drift", charge_drift, 1e-10))
    if energy_drift > 1e-4:
        failures.append(_failure("energy drift", energy_drift, 1e-4))
    return failures


def cmd_stability(config: ExperimentConfig, out: Path) -> List[Failure]:
    """Perturbation experiment with JSON report and distance trace."""
    p = config.params()
    spec = config.perturbation_spec()
    print(f"\n⚙️  Stability run: {spec.kind}, epsilon={spec.epsilon:g}, seed={spec.seed}")
    if config.gamma <= 0:
        print("⚠️  exploratory: stability open on W(R) for gamma<0")
    grid = config.grid()
    reference = reference_profile(p, grid, config.solver())
    report = stability_experiment(
        p, spec, config.integrator(), grid, reference=reference, progress=sys.stderr.isatty()
    )
    write_json(out / "report.json", report.to_json(), config)
    rows = ({"t": t, "theta": theta, "distance": d} for t, theta, d in report.distance_trace)
    write_csv(out / "distance.csv", ("t", "theta", "distance"), rows, config)

    print(f"   noise floor:  {report.noise_floor:.3e}")
    print(f"   sup distance: {report.sup_distance:.3e} (ratio {report.ratio:.3g})")
    _status(report.conservation_ok, f"conservation: charge {report.charge_drift:.3e}, energy {report.energy_drift:.3e}")
    failures = []
    if not report.conservation_ok:
        failures.append(_failure("conservation during experiment", report.energy_drift, 1e-4))
    if not report.exploratory:
        _status(report.ratio <= 10.0, f"sup distance / epsilon = {report.ratio:.3g}")
        if report.ratio > 10.0:
            failures.append(_failure("sup distance <= 10 epsilon", report.ratio, 10.0))
    return failures


def cmd_sweep(config: ExperimentConfig, out: Path) -> List[Failure]:
    """Continuation sweep of d over the omega and gamma lists."""
    print(f"\n⚙️  Continuation sweep over omega={list(config.omegas)} gamma={list(config.gammas)}")
    rows = continuation_sweep(config.omegas, config.gammas, config.grid(), config.solver(), progress=sys.stderr.isatty())
    write_csv(
        out / "sweep.csv",
        SWEEP_COLUMNS,
        ({c: getattr(r, c) for c in SWEEP_COLUMNS} for r in rows),
        config,
    )
    failures = []
    for r in rows:
        ok = r.converged and r.within_bounds
        _status(ok, f"omega={r.omega:g} gamma={r.gamma:g}: d={r.d_estimate:.10g} (closed form {r.d_closed_form:.10g})")
        if not ok:
            failures.append(_failure(f"sweep cell omega={r.omega:g} gamma={r.gamma:g}", r.d_estimate, r.d_closed_form))
    return failures


COMMANDS: Dict[str, Callable[[ExperimentConfig, Path], List[Failure]]] = {
    "verify": cmd_verify,
    "groundstate": cmd_groundstate,
    "spectrum": cmd_spectrum,
    "evolve": cmd_evolve,
    "stability": cmd_stability,
    "sweep": cmd_sweep,
}


# ============================================================================
# ARGUMENT PARSING
# ============================================================================


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key=value configuration file")
    common.add_argument("--gamma", type=float)
    common.add_argument("--omega", type=float)
    common.add_argument("--L", type=float)
    common.add_argument("--n", type=int)
    common.add_argument("--dt", type=float)
    common.add_argument("--T", type=float)
    common.add_argument("--m-reg", dest="m_reg", type=float)
    common.add_argument("--tol", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--epsilon", type=float)
    common.add_argument("--perturbation", choices=PERTURBATIONS)
    common.add_argument("--output-dir", dest="output_dir")
    common.add_argument("--record-every", dest="record_every", type=int)
    common.add_argument("--max-iter", dest="max_iter", type=int)
    common.add_argument("--omegas", help="comma-separated omega list for sweep")
    common.add_argument("--gammas", help="comma-separated gamma list for sweep")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(prog="gausson_lab", description="Log-NLS delta-potential lab")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=(func.__doc__ or name).strip())
    return parser


OVERRIDE_KEYS = (
    "gamma", "omega", "L", "n", "dt", "T", "m_reg", "tol", "seed", "epsilon",
    "perturbation", "output_dir", "record_every", "max_iter", "omegas", "gammas",
)


def run(command: str, config: ExperimentConfig) -> int:
    """Run one subcommand; 0 iff every check in scope passed."""
    out = prepare_output_dir(config)
    try:
        failures = COMMANDS[command](config, out)
    except GaussonLabError as e:
        print(f"❌ {command} aborted: {e}")
        write_failures(out, [{"check": command, "error": str(e)}], config)
        return 2
    if failures:
        write_failures(out, failures, config)
        print(f"\n❌ {len(failures)} check(s) failed, see {out / 'failures.json'}")
        return 1
    print(f"\n✅ {command} passed")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        config = load_config(args.config, {k: getattr(args, k) for k in OVERRIDE_KEYS})
    except (GaussonLabError, OSError) as e:
        print(f"❌ configuration error: {e}")
        return 2
    return run(args.command, config)
