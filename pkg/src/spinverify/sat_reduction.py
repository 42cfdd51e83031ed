"""3-SAT to Ising reduction.

Each clause contributes the Boolean penalty ``prod(1 - value(lit))``, which
is 1 exactly when the clause is violated. Width-3 clauses produce a cubic
monomial that is quadratized with one ancilla per clause (Rosenberg
substitution, weight ``M``). The Boolean quadratic is then rewritten in
spins via ``x = (1 + s) / 2``. The minimum of ``energy + offset`` equals
the fewest clauses any assignment can leave violated.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from pathlib import Path
from typing import Mapping

from .errors import DimensionError, ValidationError
from .ising_core import IsingInstance, SpinConfiguration

PENALTY_WEIGHT = 4


class DimacsParseError(ValidationError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class UnsupportedWidthError(ValidationError):
    pass


@dataclass(frozen=True)
class CnfFormula:
    """CNF over variables ``1..num_vars``.

    Literals repeated inside a clause are collapsed (first occurrence kept).
    Tautological clauses are rejected here; :func:`parse_dimacs` drops them
    before construction and records how many in ``dropped_tautologies``.
    """

    num_vars: int
    clauses: tuple[tuple[int, ...], ...]
    dropped_tautologies: int = 0
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.num_vars < 0:
            raise ValidationError("num_vars must be non-negative")
        clauses = []
        for idx, clause in enumerate(self.clauses):
            lits = tuple(dict.fromkeys(int(l) for l in clause))
            if not lits:
                raise ValidationError(f"clause {idx} is empty")
            for lit in lits:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValidationError(f"clause {idx}: literal {lit} outside 1..{self.num_vars}")
                if -lit in lits:
                    raise ValidationError(f"clause {idx} is a tautology")
            clauses.append(lits)
        object.__setattr__(self, "clauses", tuple(clauses))

    def is_satisfied_by(self, assignment: Mapping[int, bool]) -> bool:
        return all(any(assignment[abs(l)] == (l > 0) for l in c) for c in self.clauses)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.num_vars} {len(self.clauses)}"]
        lines += [" ".join(map(str, c)) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> CnfFormula:
    """Parse DIMACS CNF text. Clauses may span lines; each ends with 0."""
    header = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    current_start = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            if header is not None:
                raise DimacsParseError("duplicate problem line", lineno)
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsParseError(f"malformed header {line!r}", lineno)
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise DimacsParseError(f"malformed header {line!r}", lineno) from None
            if header[0] < 0 or header[1] < 0:
                raise DimacsParseError("negative counts in header", lineno)
            continue
        if header is None:
            raise DimacsParseError("clause before 'p cnf' header", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsParseError(f"bad literal {tok!r}", lineno) from None
            if lit == 0:
                if not current:
                    raise DimacsParseError("empty clause", lineno)
                clauses.append(tuple(current))
                current, current_start = [], None
                continue
            if abs(lit) > header[0]:
                raise DimacsParseError(f"literal {lit} exceeds declared {header[0]} variables", lineno)
            if current_start is None:
                current_start = lineno
            current.append(lit)
    if header is None:
        raise DimacsParseError("missing 'p cnf' header")
    if current:
        raise DimacsParseError("clause is missing its terminating 0", current_start)

    warnings = []
    if len(clauses) != header[1]:
        warnings.append(f"header declares {header[1]} clauses, found {len(clauses)}")
    kept = []
    dropped = 0
    for clause in clauses:
        lits = set(clause)
        if any(-l in lits for l in lits):
            dropped += 1
        else:
            kept.append(clause)
    if dropped:
        warnings.append(f"dropped {dropped} tautological clause(s)")
    return CnfFormula(header[0], tuple(kept), dropped_tautologies=dropped, warnings=tuple(warnings))


def load_dimacs(path: str | Path) -> CnfFormula:
    return parse_dimacs(Path(path).read_text())


@dataclass(frozen=True)
class ReductionCertificate:
    var_to_spin: dict
    ancilla_spins: tuple[int, ...]
    offset: float
    penalty_weight: float

    @property
    def n_spins(self) -> int:
        return len(self.var_to_spin) + len(self.ancilla_spins)

    def to_dict(self) -> dict:
        return {
            "var_to_spin": {str(v): s for v, s in sorted(self.var_to_spin.items())},
            "ancilla_spins": list(self.ancilla_spins),
            "offset": self.offset,
            "penalty_weight": self.penalty_weight,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "ReductionCertificate":
        return cls(
            var_to_spin={int(v): int(s) for v, s in data["var_to_spin"].items()},
            ancilla_spins=tuple(int(s) for s in data["ancilla_spins"]),
            offset=float(data["offset"]),
            penalty_weight=float(data["penalty_weight"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "ReductionCertificate":
        return cls.from_dict(json.loads(text))


# Boolean polynomials: {sorted tuple of spin indices: Fraction}; () is the constant.
Poly = dict


def _add(poly: Poly, mono: tuple[int, ...], coeff) -> None:
    key = tuple(sorted(set(mono)))
    poly[key] = poly.get(key, Fraction(0)) + coeff


def _literal_factor(lit: int, var_to_spin: Mapping[int, int]) -> Poly:
    """Polynomial of ``1 - value(lit)``: ``1 - x`` for ``v`` and ``x`` for ``-v``."""
    s = var_to_spin[abs(lit)]
    if lit > 0:
        return {(): Fraction(1), (s,): Fraction(-1)}
    return {(s,): Fraction(1)}


def _multiply(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            _add(out, ma + mb, ca * cb)
    return out


def clause_penalty(clause: tuple[int, ...], var_to_spin: Mapping[int, int], ancilla: int | None = None,
                   weight: int = PENALTY_WEIGHT) -> Poly:
    """Boolean penalty of one clause, quadratized if it has three literals.

    For a width-3 clause the cubic monomial ``x_a x_b x_c`` (``a < b`` the two
    smallest spin indices) becomes ``w x_c`` and the term
    ``M (x_a x_b - 2 x_a w - 2 x_b w + 3 w)`` forces ``w = x_a x_b`` at the minimum.
    """
    poly: Poly = {(): Fraction(1)}
    for lit in clause:
        poly = _multiply(poly, _literal_factor(lit, var_to_spin))
    poly = {m: c for m, c in poly.items() if c != 0}
    if len(clause) == 3:
        if ancilla is None:
            raise ValueError("width-3 clause needs an ancilla spin")
        cubic = [m for m in poly if len(m) == 3]
        for mono in cubic:
            a, b, c = mono
            coeff = poly.pop(mono)
            _add(poly, (ancilla, c), coeff)
        a, b = sorted(var_to_spin[abs(l)] for l in clause)[:2]
        _add(poly, (a, b), Fraction(weight))
        _add(poly, (a, ancilla), Fraction(-2 * weight))
        _add(poly, (b, ancilla), Fraction(-2 * weight))
        _add(poly, (ancilla,), Fraction(3 * weight))
    return poly


def boolean_to_ising(poly: Poly, n: int) -> IsingInstance:
    """Rewrite a Boolean quadratic in spins with ``x = (1 + s) / 2`` and ``mu = 1``."""
    const = Fraction(0)
    linear = [Fraction(0)] * n
    quad: dict[tuple[int, int], Fraction] = {}
    for mono, c in poly.items():
        if len(mono) == 0:
            const += c
        elif len(mono) == 1:
            (i,) = mono
            const += c / 2
            linear[i] += c / 2
        elif len(mono) == 2:
            i, j = mono
            const += c / 4
            linear[i] += c / 4
            linear[j] += c / 4
            quad[(i, j)] = quad.get((i, j), Fraction(0)) + c / 4
        else:
            raise ValueError(f"monomial {mono} is not quadratic")
    couplings = tuple((i, j, float(-c)) for (i, j), c in sorted(quad.items()) if c != 0)
    fields = tuple((i, float(-c)) for i, c in enumerate(linear) if c != 0)
    return IsingInstance(n=n, couplings=couplings, fields=fields, mu=1.0, offset=float(const))


def reduce_3sat(formula: CnfFormula) -> tuple[IsingInstance, ReductionCertificate]:
    var_to_spin = {v: v - 1 for v in range(1, formula.num_vars + 1)}
    ancillas = []
    n = formula.num_vars
    for idx, clause in enumerate(formula.clauses):
        if len(clause) > 3:
            raise UnsupportedWidthError(f"clause {idx} has {len(clause)} literals; only widths 1-3 are supported")
        if len(clause) == 3:
            ancillas.append(n)
            n += 1

    total: Poly = {}
    anc = iter(ancillas)
    for clause in formula.clauses:
        penalty = clause_penalty(clause, var_to_spin, next(anc) if len(clause) == 3 else None)
        for mono, c in penalty.items():
            _add(total, mono, c)
    instance = boolean_to_ising({m: c for m, c in total.items() if c != 0}, n)
    cert = ReductionCertificate(
        var_to_spin=var_to_spin,
        ancilla_spins=tuple(ancillas),
        offset=instance.offset,
        penalty_weight=float(PENALTY_WEIGHT),
    )
    return instance, cert


def decode(certificate: ReductionCertificate, config: SpinConfiguration) -> dict[int, bool]:
    if len(config) != certificate.n_spins:
        raise DimensionError(f"configuration has {len(config)} spins, certificate describes {certificate.n_spins}")
    return {v: config[s] == 1 for v, s in sorted(certificate.var_to_spin.items())}


def spin_count_bound(formula: CnfFormula) -> tuple[int, bool]:
    """Spins the reduction will use, and whether that is within num_vars + num_clauses."""
    spins = formula.num_vars + sum(1 for c in formula.clauses if len(c) == 3)
    return spins, spins <= formula.num_vars + len(formula.clauses)


def exhaustive_sat(formula: CnfFormula) -> dict[int, bool] | None:
    """First satisfying assignment in enumeration order, or None."""
    variables = range(1, formula.num_vars + 1)
    for bits in product((False, True), repeat=formula.num_vars):
        assignment = dict(zip(variables, bits))
        if formula.is_satisfied_by(assignment):
            return assignment
    return None
