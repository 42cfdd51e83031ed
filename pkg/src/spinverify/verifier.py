"""Back-substitution verifiers for candidate exact solutions.

A spatial candidate is checked by evaluating ``prefactor * sum_j lap_j Psi +
(V - E) Psi`` at sample points; a spin candidate by evaluating the Ising
energy of one configuration. Both report the number of counted operations
actually spent, which is what the scaling audit fits.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionError, ValidationError
from .ising_core import IsingInstance, SpinConfiguration, energy
from .wavefunction import (
    Const,
    Expr,
    OperationCount,
    SeparableWavefunction,
    SystemGeometry,
    count_ops,
    evaluate,
    hyperradius_count,
    laplacian,
    parse_expr,
)
from .wavefunction.calculus import add
from .wavefunction.expr import check_bounds

DEFAULT_TOL = 1e-8
MIN_EVALUABLE_FRACTION = 0.8


@dataclass(frozen=True)
class VerificationReport:
    accepted: bool
    max_residual: float
    sample_count: int
    counted_ops: OperationCount
    tolerance: float
    skipped: int = 0
    failed_sectors: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "max_residual": self.max_residual,
            "samples": self.sample_count,
            "counted": self.counted_ops.counted,
            "free": self.counted_ops.free,
            "tolerance": self.tolerance,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


@dataclass(frozen=True)
class SpatialHamiltonian:
    """``prefactor * sum_j laplacian_j + V`` (``prefactor = -1/2`` in units hbar = m = 1)."""

    potential: Expr = Const(0.0)
    prefactor: float = -0.5

    def __post_init__(self):
        if self.prefactor == 0:
            raise ValidationError("kinetic prefactor must be non-zero")


@dataclass(frozen=True)
class CoupledCandidate:
    """Candidate ``Psi(rho, Omega, m_c)`` for ``H_c = H + H_int``.

    ``energy_claim`` is the total eigenvalue; ``spin_energy`` is the share
    claimed by the spin sector. The decision form has both equal to 0.
    """

    spatial: SeparableWavefunction | Expr
    spin: SpinConfiguration
    energy_claim: float = 0.0
    spin_energy: float = 0.0


def _stack(samples: Sequence[SystemGeometry]) -> np.ndarray:
    if not samples:
        raise ValidationError("need at least one sample geometry")
    shapes = {g.positions.shape for g in samples}
    if len(shapes) != 1:
        raise DimensionError(f"sample geometries disagree in shape: {sorted(shapes)}")
    return np.stack([g.positions for g in samples])


def residual_terms(h: SpatialHamiltonian, psi: Expr, n: int, d: int) -> tuple[Expr, OperationCount]:
    """Laplacian sum of ``psi`` and the per-point cost of one residual evaluation."""
    lap: Expr = Const(0.0)
    for j in range(n):
        lap = add(lap, laplacian(psi, j, d))
    # one counted product (V - E) * Psi; prefactor scaling and the sum are free
    per_point = count_ops(lap) + count_ops(psi) + count_ops(h.potential) + OperationCount(counted=1, free=3)
    return lap, per_point


def verify_wavefunction(h: SpatialHamiltonian, psi: Expr, energy_value: float, samples: Sequence[SystemGeometry],
                        tol: float = DEFAULT_TOL) -> VerificationReport:
    """Accept ``psi`` iff the normalized residual is within ``tol`` at every evaluable sample.

    The residual at ``x`` is ``|c * sum_j lap_j psi + (V - E) psi|`` divided
    by ``max(1, |psi| (1 + |V - E|))``. Samples where anything is non-finite
    are skipped; at least 80% must survive.
    """
    x = _stack(samples)
    n, d = x.shape[1], x.shape[2]
    check_bounds(psi, n, d)
    check_bounds(h.potential, n, d)
    lap, per_point = residual_terms(h, psi, n, d)
    psi_v = evaluate(psi, x)
    lap_v = evaluate(lap, x)
    shift = evaluate(h.potential, x) - energy_value
    with np.errstate(all="ignore"):
        raw = np.abs(h.prefactor * lap_v + shift * psi_v)
        scale = np.maximum(1.0, np.abs(psi_v) * (1.0 + np.abs(shift)))
        normalized = raw / scale
    ok = np.isfinite(normalized) & np.isfinite(psi_v) & np.isfinite(lap_v) & np.isfinite(shift)
    evaluated = int(ok.sum())
    if evaluated == 0:
        raise ValidationError("every sample point is singular for this Hamiltonian / wavefunction")
    max_res = float(normalized[ok].max())
    enough = evaluated >= MIN_EVALUABLE_FRACTION * len(samples)
    return VerificationReport(
        accepted=bool(enough and max_res <= tol),
        max_residual=max_res,
        sample_count=evaluated,
        counted_ops=per_point.scaled(evaluated),
        tolerance=tol,
        skipped=len(samples) - evaluated,
        failed_sectors=() if enough and max_res <= tol else ("spatial",),
    )


def energy_cost(instance: IsingInstance) -> OperationCount:
    """Cost of one Ising energy evaluation.

    Each coupling needs one spin-spin product (counted) and a scalar
    rescaling by ``J`` (free); each field is a scalar rescaling; every term is
    accumulated with a free addition, plus one for the offset.
    """
    m, f = len(instance.couplings), len(instance.fields)
    return OperationCount(counted=m, free=2 * m + 2 * f + 1)


def verify_spin_solution(instance: IsingInstance, m_c: SpinConfiguration, tol: float = DEFAULT_TOL,
                         target: float = 0.0) -> VerificationReport:
    """Accept ``m_c`` iff its energy (offset included) is within ``tol`` of ``target``."""
    if len(m_c) != instance.n:
        raise DimensionError(f"configuration has {len(m_c)} spins, instance has {instance.n}")
    residual = abs(energy(instance, m_c) - target)
    accepted = residual <= tol
    return VerificationReport(
        accepted=accepted,
        max_residual=residual,
        sample_count=1,
        counted_ops=energy_cost(instance),
        tolerance=tol,
        failed_sectors=() if accepted else ("spin",),
    )


def verify_coupled(h: SpatialHamiltonian, h_spin: IsingInstance, cand: CoupledCandidate,
                   samples: Sequence[SystemGeometry], tol: float = DEFAULT_TOL) -> VerificationReport:
    """Check both sectors with ``E_spatial + E_spin = energy_claim``."""
    x = _stack(samples)
    n, d = x.shape[1], x.shape[2]
    psi = cand.spatial.to_cartesian(n, d) if isinstance(cand.spatial, SeparableWavefunction) else cand.spatial
    spin = verify_spin_solution(h_spin, cand.spin, tol, target=cand.spin_energy)
    spatial = verify_wavefunction(h, psi, cand.energy_claim - cand.spin_energy, samples, tol)
    return VerificationReport(
        accepted=spatial.accepted and spin.accepted,
        max_residual=max(spatial.max_residual, spin.max_residual),
        sample_count=spatial.sample_count,
        counted_ops=spatial.counted_ops + spin.counted_ops,
        tolerance=tol,
        skipped=spatial.skipped,
        failed_sectors=spatial.failed_sectors + spin.failed_sectors,
    )


def uniform_samples(n: int, d: int, count: int = 50, box: tuple[float, float] = (-3.0, 3.0),
                    seed: int = 0) -> list[SystemGeometry]:
    rng = np.random.default_rng(seed)
    lo, hi = box
    return [SystemGeometry(p) for p in rng.uniform(lo, hi, size=(count, n, d))]


def grid_samples(count: int = 50, box: tuple[float, float] = (-3.0, 3.0)) -> list[SystemGeometry]:
    """Evenly spaced one-particle, one-dimensional samples."""
    return [SystemGeometry([[v]]) for v in np.linspace(box[0], box[1], count)]


# Built-in exact candidates -------------------------------------------------

def oscillator_ground_state(center: float = 0.0) -> tuple[SpatialHamiltonian, Expr]:
    """``H = -1/2 d^2/dx^2 + (x - a)^2 / 2 - 1/2`` and its zero-energy ground state."""
    c = repr(float(center))
    psi = parse_expr(f"exp(-((x_0_0 - ({c}))^2)/2)")
    v = parse_expr(f"(x_0_0 - ({c}))^2/2 - 0.5")
    return SpatialHamiltonian(potential=v), psi


def gaussian_system(n: int) -> tuple[SpatialHamiltonian, Expr]:
    """``n`` particles in 1D, harmonic confinement, ground state ``exp(-rho^2/2)``.

    The energy is shifted by ``-n/2`` so the ground state sits at zero.
    """
    terms = " + ".join(f"x_{j}_0^2" for j in range(n))
    psi = parse_expr(f"exp(-({terms})/2)", n, 1)
    v = parse_expr(f"({terms})/2 - {n / 2!r}", n, 1)
    return SpatialHamiltonian(potential=v), psi


# Scaling audits ------------------------------------------------------------

@dataclass(frozen=True)
class AuditReport:
    n_values: tuple[int, ...]
    counts: tuple[int, ...]
    degree: float
    intercept: float
    residual: float
    bound: float | None = None

    @property
    def within_bound(self) -> bool:
        return self.bound is None or self.degree <= self.bound


def poly_scaling_audit(family: Callable[[int], OperationCount | int], n_values: Sequence[int],
                       bound: float | None = None) -> AuditReport:
    """Fit ``log(counted) = degree * log(N) + b`` over ``n_values``.

    ``residual`` is the RMS misfit in log space.
    """
    ns = tuple(int(n) for n in n_values)
    if len(set(ns)) < 4:
        raise ValidationError(f"need at least 4 distinct N values, got {sorted(set(ns))}")
    counts = []
    for n in ns:
        c = family(n)
        counts.append(c.counted if isinstance(c, OperationCount) else int(c))
    if min(counts) <= 0:
        raise ValidationError("counted operations must be positive to fit in log space")
    lx = np.log(np.array(ns, dtype=float))
    ly = np.log(np.array(counts, dtype=float))
    degree, intercept = np.polyfit(lx, ly, 1)
    resid = float(np.sqrt(np.mean((ly - (degree * lx + intercept)) ** 2)))
    return AuditReport(ns, tuple(counts), float(degree), float(intercept), resid, bound)


def hyperradius_family(d: int = 1) -> Callable[[int], OperationCount]:
    return lambda n: hyperradius_count(n * d)


def laplacian_family() -> Callable[[int], OperationCount]:
    """Counted ops of all ``N`` Laplacians of the separable Gaussian ``exp(-rho^2/2)``."""
    def family(n: int) -> OperationCount:
        wf = SeparableWavefunction(parse_expr("exp(-(rho^2)/2)", aliases={"rho": (0, 0)}),
                                   (Const(1.0),) * (n - 1))
        psi = wf.to_cartesian(n, 1)
        total = OperationCount()
        for j in range(n):
            total = total + count_ops(laplacian(psi, j, 1))
        return total
    return family


def residual_family() -> Callable[[int], OperationCount]:
    """Per-point cost of the full residual for the ``n``-particle Gaussian system."""
    def family(n: int) -> OperationCount:
        h, psi = gaussian_system(n)
        return residual_terms(h, psi, n, 1)[1]
    return family


def constant_family(value: int = 2) -> Callable[[int], OperationCount]:
    return lambda n: OperationCount(counted=value)


def spin_family(make_instance: Callable[[int], IsingInstance]) -> Callable[[int], OperationCount]:
    return lambda n: energy_cost(make_instance(n))
