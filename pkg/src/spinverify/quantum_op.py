"""Pauli-string Hamiltonians, Ising quantization and exact eigensolvers.

Basis convention: basis index ``b`` has bit ``j`` equal to 0 when site ``j``
is spin up (``Z|0> = +|0>``), and site 0 is the least significant bit. A
factor string such as ``"ZIX"`` lists site 0 first, so its matrix is
``kron(X, I, Z)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import reduce
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import CapExceededError, DimensionError, ValidationError
from .ising_core import IsingInstance

DENSE_CAP = 10
DIAGONAL_CAP = 30

PAULI = {
    "I": np.array([[1, 0], [0, 1]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class PauliString:
    factors: str

    def __post_init__(self):
        factors = self.factors.upper()
        bad = set(factors) - set("IXYZ")
        if bad:
            raise ValidationError(f"unknown Pauli factor(s) {sorted(bad)} in {self.factors!r}")
        object.__setattr__(self, "factors", factors)

    @property
    def n(self) -> int:
        return len(self.factors)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls("I" * n)

    @classmethod
    def single(cls, n: int, sites: dict) -> "PauliString":
        """``PauliString.single(3, {0: "Z", 2: "Z"})`` -> ``"ZIZ"``."""
        chars = ["I"] * n
        for site, p in sites.items():
            chars[site] = p
        return cls("".join(chars))

    @property
    def is_diagonal(self) -> bool:
        return set(self.factors) <= {"I", "Z"}

    def z_mask(self) -> int:
        return sum(1 << j for j, p in enumerate(self.factors) if p == "Z")

    def matrix(self) -> np.ndarray:
        if self.n == 0:
            return np.ones((1, 1), dtype=complex)
        return reduce(np.kron, [PAULI[p] for p in reversed(self.factors)])


@dataclass(frozen=True)
class HamiltonianSpec:
    """``H = sum_j a_j X_j`` with real coefficients and Pauli-string operators."""

    n: int
    terms: tuple[tuple[float, PauliString], ...] = ()

    def __post_init__(self):
        terms = []
        for coeff, op in self.terms:
            if not isinstance(op, PauliString):
                op = PauliString(op)
            if op.n != self.n:
                raise DimensionError(f"term {op.factors!r} acts on {op.n} sites, Hamiltonian has {self.n}")
            c = float(coeff)
            if not np.isfinite(c):
                raise ValidationError(f"non-finite coefficient on {op.factors!r}")
            terms.append((c, op))
        object.__setattr__(self, "terms", tuple(terms))

    @property
    def num_terms(self) -> int:
        return len(self.terms)

    @property
    def is_diagonal(self) -> bool:
        return all(op.is_diagonal for _, op in self.terms)

    @classmethod
    def from_parameters(cls, n: int, terms: Iterable[tuple[Callable, str]], theta: Sequence[float]) -> "HamiltonianSpec":
        """Evaluate each coefficient function at ``theta``: ``H(theta) = sum a_j(theta) X_j``."""
        return cls(n, tuple((float(fn(theta)), PauliString(p)) for fn, p in terms))

    def to_dict(self) -> dict:
        return {"n": self.n, "terms": [[c, op.factors] for c, op in self.terms]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "HamiltonianSpec":
        try:
            return cls(int(data["n"]), tuple((float(c), PauliString(s)) for c, s in data["terms"]))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"malformed Hamiltonian: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "HamiltonianSpec":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray
    method: str
    ground_vector: np.ndarray | None = None

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])

    def multiplicity(self, value: float, tol: float = 0.0) -> int:
        return int(np.count_nonzero(np.abs(self.eigenvalues - value) <= tol))


def quantize_ising(instance: IsingInstance) -> HamiltonianSpec:
    """Replace every classical spin by a Pauli-Z on the same site.

    Term order is couplings, fields, offset, matching the accumulation order
    of :func:`spinverify.ising_core.energy`.
    """
    n = instance.n
    terms = []
    for j, k, J in instance.couplings:
        if J != 0.0:
            terms.append((-J, PauliString.single(n, {j: "Z", k: "Z"})))
    for j, h in instance.fields:
        a = -(instance.mu * h)
        if a != 0.0:
            terms.append((a, PauliString.single(n, {j: "Z"})))
    if instance.offset != 0.0:
        terms.append((instance.offset, PauliString.identity(n)))
    return HamiltonianSpec(n, tuple(terms))


def build_matrix(spec: HamiltonianSpec, cap: int = DENSE_CAP) -> np.ndarray:
    if spec.n > cap:
        raise CapExceededError("build_matrix (dense cap)", spec.n, cap)
    dim = 1 << spec.n
    out = np.zeros((dim, dim), dtype=complex)
    for coeff, op in spec.terms:
        out += coeff * op.matrix()
    return out


def compose(h: HamiltonianSpec, h_int: HamiltonianSpec) -> HamiltonianSpec:
    """``H + H_int`` with repeated Pauli strings merged and zero terms dropped."""
    if h.n != h_int.n:
        raise DimensionError(f"cannot add Hamiltonians on {h.n} and {h_int.n} sites")
    merged: dict[str, float] = {}
    for coeff, op in h.terms + h_int.terms:
        merged[op.factors] = merged.get(op.factors, 0.0) + coeff
    return HamiltonianSpec(h.n, tuple((c, PauliString(s)) for s, c in merged.items() if c != 0.0))


def _parity(x: np.ndarray) -> np.ndarray:
    x = x.copy()
    shift = 32
    while shift:
        x ^= x >> shift
        shift >>= 1
    return x & 1


def diagonal(spec: HamiltonianSpec, cap: int = DIAGONAL_CAP) -> np.ndarray:
    """Diagonal of an I/Z-only Hamiltonian without building the matrix."""
    if not spec.is_diagonal:
        raise ValidationError("Hamiltonian has X or Y factors; it is not diagonal")
    if spec.n > cap:
        raise CapExceededError("ground_eigen (diagonal-scan cap)", spec.n, cap)
    b = np.arange(1 << spec.n, dtype=np.uint64)
    d = np.zeros(1 << spec.n)
    for coeff, op in spec.terms:
        mask = op.z_mask()
        if mask:
            sign = 1.0 - 2.0 * _parity(b & np.uint64(mask)).astype(np.float64)
            d = d + coeff * sign
        else:
            d = d + coeff
    return d


def ground_eigen(spec: HamiltonianSpec, dense_cap: int = DENSE_CAP, diagonal_cap: int = DIAGONAL_CAP) -> SpectrumResult:
    """Full spectrum by brute force.

    I/Z-only Hamiltonians are scanned along the diagonal (``O(2^n)``).
    Anything else is diagonalized densely; the ground vector's global phase
    is fixed so its largest-magnitude entry is real and positive.
    """
    if spec.is_diagonal:
        return SpectrumResult(np.sort(diagonal(spec, cap=diagonal_cap)), "diagonal_scan")
    if spec.n > dense_cap:
        raise CapExceededError("ground_eigen (dense cap)", spec.n, dense_cap)
    values, vectors = np.linalg.eigh(build_matrix(spec, cap=dense_cap))
    v = vectors[:, 0]
    pivot = v[np.argmax(np.abs(v))]
    v = v * (abs(pivot) / pivot)
    return SpectrumResult(values, "dense", v / np.linalg.norm(v))


def load_hamiltonian(path: str | Path) -> HamiltonianSpec:
    return HamiltonianSpec.from_json(Path(path).read_text())
