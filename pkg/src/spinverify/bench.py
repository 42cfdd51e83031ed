"""Solve-versus-verify scaling measurements and model fits.

Each record pairs the wall-clock time of an exact brute-force solve with
the time and operation count of verifying the solution it found.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import CapExceededError, ValidationError
from .ising_core import DEFAULT_CAP, IsingInstance, brute_force_ground
from .quantum_op import DIAGONAL_CAP, ground_eigen, quantize_ising
from .sat_reduction import CnfFormula, reduce_3sat
from .verifier import verify_spin_solution
from .wavefunction import OperationCount

log = logging.getLogger(__name__)

FAMILIES = ("random-ising", "sat-reduced", "diagonal-quantized")
CSV_HEADER = ["n", "solve_ns", "verify_ns", "counted_ops", "instance_id"]
# calls shorter than this are timed in batches
_MIN_TIMED_NS = 20_000


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class BenchRecord:
    n: int
    solve_ns: int
    verify_ns: int
    counted_ops: OperationCount
    repetitions: int
    instance_id: str


@dataclass(frozen=True)
class Suite:
    family: str
    n_values: tuple[int, ...]
    repetitions: int = 3
    seed: int = 42
    workers: int = 1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        object.__setattr__(self, "n_values", tuple(sorted(int(n) for n in self.n_values)))
        if not self.n_values:
            raise ValidationError("n_values is empty")
        if self.n_values[0] <= 0:
            raise ValidationError("n values must be positive")
        if self.repetitions < 3:
            raise ValidationError("need at least 3 repetitions for a median")


@dataclass(frozen=True)
class FitResult:
    model: str
    params: tuple[float, float]
    r_squared: float
    key: str = field(default="solve_ns", compare=False)

    @property
    def base(self) -> float:
        return self.params[1]

    def to_dict(self) -> dict:
        names = ("a", "c") if self.model == "exponential" else ("a", "k")
        return {"model": self.model, names[0]: self.params[0], names[1]: self.params[1], "r_squared": self.r_squared}


# Instance families ---------------------------------------------------------

def _rng(seed: int, n: int) -> np.random.Generator:
    return np.random.default_rng([seed, n])


def random_ising(n: int, seed: int) -> IsingInstance:
    """Sparse +-J spin glass: a ring plus ``n // 2`` random chords, integer fields.

    The coupling count grows linearly in ``n``, so verification cost does too.
    """
    rng = _rng(seed, n)
    edges = {tuple(sorted((j, (j + 1) % n))) for j in range(n)} if n > 1 else set()
    while n > 3 and len(edges) < n + n // 2:
        a, b = sorted(int(v) for v in rng.choice(n, size=2, replace=False))
        edges.add((a, b))
    edges = sorted(e for e in edges if e[0] != e[1])
    weights = rng.choice([-2, -1, 1, 2], size=len(edges))
    fields = rng.integers(-1, 2, size=n)
    return IsingInstance(
        n=n,
        couplings=tuple((a, b, float(w)) for (a, b), w in zip(edges, weights)),
        fields=tuple((j, float(h)) for j, h in enumerate(fields) if h != 0),
    )


def random_3cnf(num_vars: int, num_clauses: int, rng: np.random.Generator) -> CnfFormula:
    clauses = []
    for _ in range(num_clauses):
        vs = rng.choice(num_vars, size=min(3, num_vars), replace=False) + 1
        signs = rng.choice([-1, 1], size=vs.size)
        clauses.append(tuple(int(v * s) for v, s in zip(vs, signs)))
    return CnfFormula(num_vars, tuple(clauses))


def sat_reduced(n: int, seed: int) -> tuple[IsingInstance, CnfFormula]:
    """Random 3-CNF whose reduction has exactly ``n`` spins (vars + one ancilla per clause)."""
    rng = _rng(seed, n)
    num_clauses = n // 3
    num_vars = n - num_clauses
    if num_vars < 3:
        num_clauses, num_vars = 0, n
    formula = random_3cnf(num_vars, num_clauses, rng)
    instance, _ = reduce_3sat(formula)
    return instance, formula


def make_instance(family: str, n: int, seed: int) -> IsingInstance:
    if family in ("random-ising", "diagonal-quantized"):
        return random_ising(n, seed)
    if family == "sat-reduced":
        return sat_reduced(n, seed)[0]
    raise ValidationError(f"unknown family {family!r}")


def instance_id(family: str, n: int, seed: int, instance: IsingInstance) -> str:
    digest = hashlib.sha256(instance.to_json().encode()).hexdigest()[:12]
    return f"{family}-n{n}-s{seed}-{digest}"


# Timing --------------------------------------------------------------------

def _median_ns(fn: Callable[[], object], repetitions: int) -> int:
    t0 = time.perf_counter_ns()
    fn()  # warm-up, excluded; also sizes the batch
    single = time.perf_counter_ns() - t0
    batch = 1
    if single < _MIN_TIMED_NS:
        batch = max(1, math.ceil(_MIN_TIMED_NS / max(single, 1)))
    samples = []
    for _ in range(repetitions):
        t0 = time.perf_counter_ns()
        for _ in range(batch):
            fn()
        samples.append((time.perf_counter_ns() - t0) / batch)
    return int(round(float(np.median(samples))))


def run_scaling(suite: Suite) -> list[BenchRecord]:
    cap = DIAGONAL_CAP if suite.family == "diagonal-quantized" else DEFAULT_CAP
    if suite.n_values[-1] > cap:
        raise CapExceededError(f"bench {suite.family}", suite.n_values[-1], cap)
    records = []
    for n in suite.n_values:
        instance = make_instance(suite.family, n, suite.seed)
        if suite.family == "diagonal-quantized":
            spec = quantize_ising(instance)
            solve = lambda: ground_eigen(spec)
        else:
            solve = lambda: brute_force_ground(instance, cap=cap, workers=suite.workers)
        ground = brute_force_ground(instance, cap=cap, workers=suite.workers)
        verify = lambda: verify_spin_solution(instance, ground.config, target=ground.energy)
        report = verify()
        solve_ns = _median_ns(solve, suite.repetitions)
        verify_ns = _median_ns(verify, suite.repetitions)
        log.info("n=%d solve=%.3fms verify=%.1fus", n, solve_ns / 1e6, verify_ns / 1e3)
        records.append(BenchRecord(n, solve_ns, verify_ns, report.counted_ops, suite.repetitions,
                                   instance_id(suite.family, n, suite.seed, instance)))
    return records


# Fits ----------------------------------------------------------------------

def _values(records: Sequence[BenchRecord], key: str) -> tuple[np.ndarray, np.ndarray]:
    if len(records) < 4:
        raise FitError(f"need at least 4 records, got {len(records)}")
    ns = np.array([r.n for r in records], dtype=float)
    if len(set(ns)) != len(ns):
        raise FitError("records must have distinct n")
    if key == "counted_ops":
        ys = np.array([r.counted_ops.counted for r in records], dtype=float)
    else:
        ys = np.array([getattr(r, key) for r in records], dtype=float)
    if np.any(ys <= 0):
        raise FitError(f"{key} must be positive for a log-space fit")
    return ns, ys


def _linear_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Ordinary least squares ``y = slope * x + intercept`` with r^2."""
    xm, ym = x.mean(), y.mean()
    sxx = float(np.sum((x - xm) ** 2))
    if sxx == 0.0:
        raise FitError("degenerate regression: all n equal")
    slope = float(np.sum((x - xm) * (y - ym)) / sxx)
    intercept = float(ym - slope * xm)
    ss_res = float(np.sum((y - (slope * x + intercept)) ** 2))
    ss_tot = float(np.sum((y - ym) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return slope, intercept, r2


def fit_exponential(records: Sequence[BenchRecord], key: str = "solve_ns") -> FitResult:
    """``time ~ a * c^N`` by least squares on ``(N, log time)``."""
    ns, ys = _values(records, key)
    slope, intercept, r2 = _linear_fit(ns, np.log(ys))
    return FitResult("exponential", (math.exp(intercept), math.exp(slope)), r2, key)


def fit_polynomial(records: Sequence[BenchRecord], key: str = "solve_ns") -> FitResult:
    """``time ~ a * N^k`` by least squares on ``(log N, log time)``."""
    ns, ys = _values(records, key)
    slope, intercept, r2 = _linear_fit(np.log(ns), np.log(ys))
    return FitResult("polynomial", (math.exp(intercept), slope), r2, key)


def standard_fits(records: Sequence[BenchRecord]) -> dict[str, FitResult]:
    return {
        "solve_exponential": fit_exponential(records, "solve_ns"),
        "solve_polynomial": fit_polynomial(records, "solve_ns"),
        "verify_polynomial": fit_polynomial(records, "verify_ns"),
        "counted_polynomial": fit_polynomial(records, "counted_ops"),
    }


# Reports -------------------------------------------------------------------

TIMING_FITS = ("solve_exponential", "solve_polynomial", "verify_polynomial")


def records_to_csv(records: Sequence[BenchRecord], timing: bool = True) -> str:
    header = CSV_HEADER if timing else [h for h in CSV_HEADER if not h.endswith("_ns")]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for r in records:
        row = {"n": r.n, "solve_ns": r.solve_ns, "verify_ns": r.verify_ns,
               "counted_ops": r.counted_ops.counted, "instance_id": r.instance_id}
        writer.writerow([row[h] for h in header])
    return buf.getvalue()


def sidecar_path(path: str | Path) -> Path:
    return Path(path).with_suffix(".json")


def sidecar(records: Sequence[BenchRecord], fits: dict[str, FitResult], timing: bool = True) -> str:
    doc = {
        "fits": {name: fit.to_dict() for name, fit in sorted(fits.items()) if timing or name not in TIMING_FITS},
        "records": [{"instance_id": r.instance_id, "free_ops": r.counted_ops.free, "repetitions": r.repetitions}
                    for r in records],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def emit_report(records: Sequence[BenchRecord], fits: dict[str, FitResult], path: str | Path) -> Path:
    """Write ``path`` (CSV) and a JSON sidecar next to it; returns the sidecar path."""
    path = Path(path)
    path.write_text(records_to_csv(records))
    side = sidecar_path(path)
    side.write_text(sidecar(records, fits))
    return side


def parse_report(path: str | Path) -> list[BenchRecord]:
    """Read a CSV written by :func:`emit_report`, merging the sidecar if present."""
    path = Path(path)
    rows = list(csv.DictReader(io.StringIO(path.read_text())))
    extra = {}
    side = sidecar_path(path)
    if side.exists():
        extra = {r["instance_id"]: r for r in json.loads(side.read_text()).get("records", [])}
    out = []
    for row in rows:
        try:
            meta = extra.get(row["instance_id"], {})
            out.append(BenchRecord(
                n=int(row["n"]),
                solve_ns=int(row["solve_ns"]),
                verify_ns=int(row["verify_ns"]),
                counted_ops=OperationCount(int(row["counted_ops"]), int(meta.get("free_ops", 0))),
                repetitions=int(meta.get("repetitions", 3)),
                instance_id=row["instance_id"],
            ))
        except (KeyError, ValueError) as exc:
            raise ValidationError(f"malformed report row {row}: {exc}") from exc
    return out
