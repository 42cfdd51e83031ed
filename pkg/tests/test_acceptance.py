"""End-to-end acceptance checks, one test per numbered criterion.

A PASS/FAIL line for each criterion is printed in the terminal summary
(see conftest.py).
"""

import math
import subprocess
import sys
from functools import lru_cache

import numpy as np
import pytest

from spinverify.bench import (
    FAMILIES,
    Suite,
    fit_exponential,
    fit_polynomial,
    records_to_csv,
    run_scaling,
    sidecar,
    standard_fits,
)
from spinverify.ising_core import IsingInstance, SpinConfiguration, brute_force_ground, energy, has_zero_ground
from spinverify.quantum_op import build_matrix, ground_eigen, quantize_ising
from spinverify.sat_reduction import CnfFormula, decode, reduce_3sat
from spinverify.verifier import (
    hyperradius_family,
    laplacian_family,
    oscillator_ground_state,
    poly_scaling_audit,
    uniform_samples,
    verify_spin_solution,
    verify_wavefunction,
)
from spinverify.wavefunction import differentiate, evaluate, laplacian

from oracles import central_difference, ising_spectrum_oracle, sat_oracle
from test_verifier import perturbations
from test_wavefunction import PRODUCTIONS

MAX_SPINS = 20


def random_formula(rng: np.random.Generator) -> CnfFormula:
    """Mixed-width CNF with <= 12 variables, <= 20 clauses, and a reduction of <= 20 spins."""
    while True:
        num_vars = int(rng.integers(3, 13))
        widths = rng.choice([1, 2, 3], size=int(rng.integers(1, 21)), p=[0.1, 0.4, 0.5])
        if num_vars + int(np.sum(widths == 3)) <= MAX_SPINS:
            break
    clauses = []
    for w in widths:
        vs = rng.choice(num_vars, size=int(w), replace=False) + 1
        signs = rng.choice([-1, 1], size=int(w))
        clauses.append(tuple(int(v * s) for v, s in zip(vs, signs)))
    return CnfFormula(num_vars, tuple(clauses))


@lru_cache(maxsize=None)
def reduction_corpus(seed: int = 2024, count: int = 200):
    """(formula, instance, certificate, ground, satisfiable) for the shared formula set."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        f = random_formula(rng)
        inst, cert = reduce_3sat(f)
        out.append((f, inst, cert, brute_force_ground(inst), sat_oracle(f.num_vars, f.clauses)))
    return tuple(out)


@pytest.mark.acceptance(1, "3-SAT reduction agrees with exhaustive SAT on 200 formulas")
def test_criterion_1_reduction_correctness():
    corpus = reduction_corpus()
    assert len(corpus) == 200
    mismatches = [f for f, inst, _, _, sat in corpus if has_zero_ground(inst, tol=1e-9) != sat]
    assert not mismatches
    sat_count = sum(1 for *_, sat in corpus if sat)
    assert 0 < sat_count < 200, "corpus must contain satisfiable and unsatisfiable formulas"
    assert max(inst.n for _, inst, *_ in corpus) <= MAX_SPINS
    assert max(f.num_vars for f, *_ in corpus) <= 12 and max(len(f.clauses) for f, *_ in corpus) <= 20


def random_instance(rng: np.random.Generator, integer: bool) -> IsingInstance:
    n = int(rng.integers(1, 11))
    pairs = [(j, k) for j in range(n) for k in range(j + 1, n) if rng.random() < 0.4]
    draw = (lambda: float(rng.integers(-3, 4))) if integer else (lambda: float(rng.normal(scale=2)))
    couplings = tuple((j, k, draw()) for j, k in pairs)
    fields = tuple((j, draw()) for j in range(n) if rng.random() < 0.6)
    mu = 1.0 if integer else float(rng.uniform(0.5, 2))
    return IsingInstance(n, couplings, fields, mu, draw())


@pytest.mark.acceptance(2, "quantized spectrum equals the classical energy multiset (100 instances)")
def test_criterion_2_diagonal_correspondence():
    rng = np.random.default_rng(99)
    for i in range(100):
        integer = i % 2 == 0
        inst = random_instance(rng, integer)
        classical = np.sort([e for _, e in ising_spectrum_oracle(inst.n, inst.couplings, inst.fields, inst.mu, inst.offset)])
        spec = quantize_ising(inst)
        spectrum = ground_eigen(spec).eigenvalues
        if integer:
            assert np.array_equal(spectrum, classical)
        else:
            assert np.max(np.abs(spectrum - classical)) <= 1e-12
        if inst.n <= 8:
            m = build_matrix(spec)
            assert np.count_nonzero(m - np.diag(np.diag(m))) == 0
            dense = np.sort(np.diag(m).real)
            assert np.max(np.abs(dense - classical)) <= (0 if integer else 1e-12)


@pytest.mark.acceptance(3, "verification op counts: hyperradius degree 1, Laplacian degree <= 2.3")
def test_criterion_3_verification_polynomiality():
    ns = [2, 4, 8, 16, 32]
    radius = poly_scaling_audit(hyperradius_family(), ns)
    assert radius.counts == tuple(n + 1 for n in ns)
    assert round(radius.degree) == 1
    tail = math.log(radius.counts[-1] / radius.counts[-2]) / math.log(2)
    assert abs(tail - 1) <= 0.1
    lap = poly_scaling_audit(laplacian_family(), ns, bound=2.3)
    assert lap.within_bound, lap.degree


@pytest.mark.acceptance(4, "shifted oscillator accepted, perturbed candidates rejected")
def test_criterion_4_back_substitution():
    h, psi = oscillator_ground_state(center=0.7)
    samples = uniform_samples(1, 1, 50, box=(-3.0, 3.0), seed=0)
    report = verify_wavefunction(h, psi, 0.0, samples, tol=1e-8)
    assert report.accepted and report.sample_count == 50
    assert report.max_residual <= 1e-10
    cases = list(perturbations(psi, eps=1e-2))
    assert cases
    for path, bad in cases:
        assert not verify_wavefunction(h, bad, 0.0, samples, tol=1e-8).accepted, path


@pytest.mark.acceptance(5, "solve time base c in [1.8, 2.2], verify counted-op degree <= 1.2 (n 14..24)")
def test_criterion_5_solve_verify_asymmetry():
    records = run_scaling(Suite("random-ising", tuple(range(14, 25)), repetitions=3, seed=42, workers=1))
    solve = fit_exponential(records, "solve_ns")
    verify = fit_polynomial(records, "counted_ops")
    print(f"\nsolve base c = {solve.base:.4f} (r^2 {solve.r_squared:.4f}); "
          f"verify degree k = {verify.params[1]:.4f}")
    assert 1.8 <= solve.base <= 2.2
    assert verify.params[1] <= 1.2


@pytest.mark.acceptance(6, "spin verifier accepts decoded ground states, rejects 100 excited configs each")
def test_criterion_6_spin_verification_soundness():
    rng = np.random.default_rng(6)
    checked = 0
    for f, inst, cert, ground, sat in reduction_corpus():
        if not sat:
            continue
        checked += 1
        assert verify_spin_solution(inst, ground.config, tol=1e-8).accepted
        assert f.is_satisfied_by(decode(cert, ground.config))
        rejected = 0
        while rejected < 100:
            config = SpinConfiguration(tuple(int(s) for s in rng.choice([1, -1], size=inst.n)))
            if energy(inst, config) <= 1e-8:
                continue
            assert not verify_spin_solution(inst, config, tol=1e-8).accepted
            rejected += 1
    assert checked > 0


@pytest.mark.acceptance(7, "every grammar production passes finite-difference checks")
def test_criterion_7_derivative_engine():
    for label, e, (lo, hi) in PRODUCTIONS:
        xs = np.random.default_rng(len(label) * 7919).uniform(lo, hi, size=100)
        pts = xs[:, None, None]
        exact = evaluate(differentiate(e, 0), pts)
        approx = central_difference(lambda v: evaluate(e, v[:, None, None]), xs)
        assert np.all(np.abs(approx - exact) <= 1e-6 * np.maximum(np.abs(exact), 1.0)), label
        d1 = differentiate(e, 0)
        second = central_difference(lambda v: evaluate(d1, v[:, None, None]), xs)
        lap = evaluate(laplacian(e, 0), pts)
        assert np.all(np.abs(second - lap) <= 1e-6 * np.maximum(np.abs(lap), 1.0)), label


def _untimed_outputs(seed: int) -> bytes:
    parts = []
    for family in FAMILIES:
        records = run_scaling(Suite(family, tuple(range(6, 13)), seed=seed))
        parts.append(records_to_csv(records, timing=False))
        parts.append(sidecar(records, standard_fits(records), timing=False))
    for f, inst, cert, ground, _ in reduction_corpus()[:25]:
        parts.extend([inst.to_json(), cert.to_json(), verify_spin_solution(inst, ground.config).to_json()])
    h, psi = oscillator_ground_state(0.7)
    parts.append(verify_wavefunction(h, psi, 0.0, uniform_samples(1, 1, 50, seed=seed)).to_json())
    return "".join(parts).encode()


def _cli_untimed(tmp_path, tag: str) -> bytes:
    out = tmp_path / f"{tag}.csv"
    subprocess.run([sys.executable, "-m", "spinverify", "bench", "--family", "sat-reduced", "--n-min", "6",
                    "--n-max", "12", "--seed", "7", "-o", str(out)], check=True, capture_output=True)
    rows = [line.split(",") for line in out.read_text().splitlines()]
    keep = [i for i, name in enumerate(rows[0]) if not name.endswith("_ns")]
    return "\n".join(",".join(r[i] for i in keep) for r in rows).encode()


@pytest.mark.acceptance(8, "identical seeds give byte-identical untimed CSV/JSON outputs")
def test_criterion_8_determinism(tmp_path):
    first = _untimed_outputs(seed=42)
    reduction_corpus.cache_clear()
    second = _untimed_outputs(seed=42)
    assert first == second
    assert _cli_untimed(tmp_path, "a") == _cli_untimed(tmp_path, "b")
