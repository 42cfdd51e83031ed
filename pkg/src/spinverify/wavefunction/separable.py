"""Separable wavefunctions ``Psi = phi(rho) * prod_k upsilon_k(Omega_k)``.

``phi`` and every ``upsilon_k`` are one-variable expressions written in
``x_0_0`` (parse them with ``aliases={"rho": (0, 0)}`` or similar).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..errors import DimensionError, ValidationError
from .calculus import substitute
from .coords import SystemGeometry, hyperangle_expr, hyperangles, hyperradius, hyperradius_expr
from .counting import OperationCount, count_ops
from .expr import Expr, Mul, evaluate_scalar, variables


@dataclass(frozen=True)
class SeparableCost:
    """Cost breakdown of one evaluation of a separable wavefunction."""

    phi: OperationCount
    upsilons: OperationCount
    products: OperationCount
    coordinates: OperationCount

    @property
    def functions(self) -> OperationCount:
        """``cost(phi) + cost(Upsilon) + 1``, the angular product folded into ``cost(Upsilon)``."""
        return self.phi + self.upsilons + self.products

    @property
    def total(self) -> OperationCount:
        return self.functions + self.coordinates

    def decomposition(self) -> dict:
        n_products = self.products.counted
        return {
            "phi": self.phi.counted,
            "upsilon": self.upsilons.counted + max(n_products - 1, 0),
            "join": 1 if n_products else 0,
        }


def _check_univariate(e: Expr, label: str) -> None:
    extra = variables(e) - {(0, 0)}
    if extra:
        raise ValidationError(f"{label} must depend only on x_0_0, found {sorted(extra)}")


@dataclass(frozen=True)
class SeparableWavefunction:
    phi: Expr
    upsilons: tuple[Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, "upsilons", tuple(self.upsilons))
        _check_univariate(self.phi, "phi")
        for k, u in enumerate(self.upsilons):
            _check_univariate(u, f"upsilon[{k}]")

    def check_arity(self, n: int, d: int) -> None:
        if len(self.upsilons) != n * d - 1:
            raise DimensionError(f"{n} particles in {d}D need {n * d - 1} angular factors, got {len(self.upsilons)}")

    def to_cartesian(self, n: int, d: int = 1) -> Expr:
        """Substitute the coordinate expressions to get ``Psi`` over ``x_j_d``.

        The final angle is substituted on the principal ``arccos`` branch, so
        factors sensitive to ``Omega`` versus ``2 pi - Omega`` (sines of the
        last angle) are only faithful where the last component is non-negative.
        """
        self.check_arity(n, d)
        psi = substitute(self.phi, {(0, 0): hyperradius_expr(n, d)})
        for k, u in enumerate(self.upsilons):
            psi = Mul(psi, substitute(u, {(0, 0): hyperangle_expr(n, d, k)}))
        return psi


def eval_separable(phi: Expr, upsilons: Sequence[Expr], g: SystemGeometry, cached: bool = False) -> tuple[float, SeparableCost]:
    """Evaluate ``phi(rho) * prod upsilon_k(Omega_k)`` at ``g``.

    Coordinates are charged at the uncached (recompute each tail norm) rate
    unless ``cached`` is set.
    """
    wf = SeparableWavefunction(phi, tuple(upsilons))
    wf.check_arity(g.n, g.d)
    rho, rho_count = hyperradius(g)
    angles = hyperangles(g)
    value = evaluate_scalar(phi, rho)
    for u, omega in zip(wf.upsilons, angles.values):
        value *= evaluate_scalar(u, float(omega))
    phi_cost = count_ops(phi)
    ups_cost = OperationCount()
    for u in wf.upsilons:
        ups_cost = ups_cost + count_ops(u)
    cost = SeparableCost(
        phi=phi_cost,
        upsilons=ups_cost,
        products=OperationCount(counted=len(wf.upsilons)),
        coordinates=rho_count + (angles.cached_count if cached else angles.count),
    )
    return value, cost
