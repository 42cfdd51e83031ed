"""Command-line interface.

Exit codes: 0 success, 1 validation/usage error, 2 refused because a size
cap would be exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .bench import FitError, Suite, emit_report, parse_report, run_scaling, standard_fits
from .errors import CapExceededError, ValidationError
from .ising_core import DEFAULT_CAP, SpinConfiguration, brute_force_ground, load_instance
from .quantum_op import ground_eigen, quantize_ising
from .sat_reduction import load_dimacs, reduce_3sat
from .verifier import SpatialHamiltonian, uniform_samples, verify_spin_solution, verify_wavefunction
from .wavefunction import parse_expr

EXIT_OK, EXIT_INVALID, EXIT_CAP = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def _dump(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def cmd_reduce(args) -> int:
    formula = load_dimacs(args.cnf)
    for w in formula.warnings:
        print(f"warning: {w}", file=sys.stderr)
    instance, cert = reduce_3sat(formula)
    if args.output:
        Path(args.output).write_text(instance.to_json())
    else:
        sys.stdout.write(instance.to_json())
    if args.certificate:
        Path(args.certificate).write_text(cert.to_json())
    k = len(cert.ancilla_spins)
    print(f"{formula.num_vars} variables, {len(formula.clauses)} clauses -> {instance.n} spins "
          f"({k} {'ancilla' if k == 1 else 'ancillas'}), offset {instance.offset}", file=sys.stderr)
    return EXIT_OK


def cmd_solve(args) -> int:
    instance = load_instance(args.instance)
    if args.quantum:
        spectrum = ground_eigen(quantize_ising(instance))
        ground = spectrum.ground_energy
        _dump({"method": spectrum.method, "energy": ground,
               "degeneracy": spectrum.multiplicity(ground), "zero_ground": abs(ground) <= args.tol})
        return EXIT_OK
    result = brute_force_ground(instance, cap=args.cap, workers=args.workers)
    _dump({
        "energy": result.energy,
        "degeneracy": result.degeneracy,
        "config": list(result.config.spins),
        "config_string": result.config.to_string(),
        "offset": instance.offset,
        "zero_ground": abs(result.energy) <= args.tol,
    })
    return EXIT_OK


def cmd_verify_spin(args) -> int:
    instance = load_instance(args.instance)
    config = SpinConfiguration.parse(args.config)
    report = verify_spin_solution(instance, config, tol=args.tol, target=args.target)
    sys.stdout.write(report.to_json())
    return EXIT_OK


def cmd_verify_wave(args) -> int:
    """Input JSON keys: {"n", "d", "psi", "potential", "energy", "prefactor", "box", "samples", "seed", "tol"}."""
    try:
        spec = json.loads(Path(args.spec).read_text())
        n, d = int(spec.get("n", 1)), int(spec.get("d", 1))
        psi = parse_expr(spec["psi"], n, d)
        potential = parse_expr(spec.get("potential", "0"), n, d)
        h = SpatialHamiltonian(potential=potential, prefactor=float(spec.get("prefactor", -0.5)))
        samples = uniform_samples(n, d, int(spec.get("samples", 50)), tuple(spec.get("box", (-3.0, 3.0))),
                                  int(spec.get("seed", 0)))
        energy_value = float(spec.get("energy", 0.0))
        tol = float(spec.get("tol", 1e-8))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"bad wavefunction file: {exc}") from exc
    sys.stdout.write(verify_wavefunction(h, psi, energy_value, samples, tol).to_json())
    return EXIT_OK


def cmd_quantize(args) -> int:
    spec = quantize_ising(load_instance(args.instance))
    if args.output:
        Path(args.output).write_text(spec.to_json())
    else:
        sys.stdout.write(spec.to_json())
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.n_min > args.n_max:
        raise ValidationError(f"--n-min {args.n_min} exceeds --n-max {args.n_max}")
    suite = Suite(args.family, tuple(range(args.n_min, args.n_max + 1)), args.repetitions, args.seed,
                  workers=args.workers if args.parallel else 1)
    records = run_scaling(suite)
    fits = standard_fits(records) if len(records) >= 4 else {}
    side = emit_report(records, fits, args.output)
    print(f"wrote {args.output} and {side}", file=sys.stderr)
    return EXIT_OK


def cmd_fit(args) -> int:
    records = parse_report(args.report)
    fits = standard_fits(records)
    out = {name: fit.to_dict() for name, fit in sorted(fits.items())}
    c = fits["solve_exponential"].base
    out["solve_exponential"]["growth"] = "exponential" if c > 1 else "none"
    _dump(out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spinverify", description="Brute-force Ising solvers and polynomial-time verifiers.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--version", action="version", version=f"spinverify {__version__}")
        p.set_defaults(func=func)
        return p

    p = add("reduce", cmd_reduce, "Reduce a DIMACS 3-CNF file to an Ising instance.")
    p.add_argument("cnf")
    p.add_argument("-o", "--output", help="instance JSON (default: stdout)")
    p.add_argument("-c", "--certificate", help="certificate JSON")

    p = add("solve", cmd_solve, "Exhaustive ground state of an Ising instance.")
    p.add_argument("instance")
    p.add_argument("--quantum", action="store_true", help="diagonalize the Pauli-Z Hamiltonian instead")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--tol", type=float, default=1e-9)

    p = add("verify-spin", cmd_verify_spin, "Check a spin configuration by evaluating its energy.")
    p.add_argument("instance")
    p.add_argument("config", help='"++-" or "1,1,-1"')
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--target", type=float, default=0.0, help="claimed energy (default 0)")

    p = add("verify-wave", cmd_verify_wave, "Back-substitute a wavefunction into its Schroedinger equation.")
    p.add_argument("spec")

    p = add("quantize", cmd_quantize, "Write the Pauli-Z Hamiltonian of an Ising instance.")
    p.add_argument("instance")
    p.add_argument("-o", "--output")

    p = add("bench", cmd_bench, "Measure solve and verify time against n.")
    p.add_argument("--family", required=True, choices=["random-ising", "sat-reduced", "diagonal-quantized"])
    p.add_argument("--n-min", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--repetitions", type=int, default=3)
    p.add_argument("--parallel", action="store_true")
    p.add_argument("--workers", type=int, default=4)
    p.add_argument("-o", "--output", required=True)

    p = add("fit", cmd_fit, "Fit exponential and polynomial models to a bench report.")
    p.add_argument("report")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INVALID
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except CapExceededError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValidationError, FitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
