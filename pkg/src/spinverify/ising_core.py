"""Classical Ising spin glass: instances, energies and exhaustive ground states.

The energy of a configuration ``s`` of ``n`` spins (each +1 or -1) is::

    E(s) = - sum_{j<k} J_jk s_j s_k - mu * sum_j h_j s_j + offset

``offset`` is a constant that lets Boolean penalty reductions express
"zero ground energy" exactly.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceededError, DimensionError, ValidationError

DEFAULT_CAP = 30
DEFAULT_TOL = 1e-9
# 2^16 configurations per block keeps a block's working set inside L2.
_BLOCK_BITS = 16


@dataclass(frozen=True)
class IsingInstance:
    n: int
    couplings: tuple[tuple[int, int, float], ...] = ()
    fields: tuple[tuple[int, float], ...] = ()
    mu: float = 1.0
    offset: float = 0.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise ValidationError(f"spin count must be a non-negative integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        couplings = tuple((int(j), int(k), float(J)) for j, k, J in self.couplings)
        fields = tuple((int(j), float(h)) for j, h in self.fields)
        seen = set()
        for j, k, J in couplings:
            if not (0 <= j < k < self.n):
                raise ValidationError(f"coupling ({j}, {k}) needs 0 <= j < k < {self.n}")
            if (j, k) in seen:
                raise ValidationError(f"duplicate coupling ({j}, {k})")
            if not math.isfinite(J):
                raise ValidationError(f"coupling ({j}, {k}) is not finite: {J}")
            seen.add((j, k))
        seen_fields = set()
        for j, h in fields:
            if not (0 <= j < self.n):
                raise ValidationError(f"field index {j} out of range [0, {self.n})")
            if j in seen_fields:
                raise ValidationError(f"duplicate field on spin {j}")
            if not math.isfinite(h):
                raise ValidationError(f"field on spin {j} is not finite: {h}")
            seen_fields.add(j)
        if not (math.isfinite(self.mu) and math.isfinite(self.offset)):
            raise ValidationError("mu and offset must be finite")
        object.__setattr__(self, "couplings", couplings)
        object.__setattr__(self, "fields", fields)
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def zero(cls, n: int) -> "IsingInstance":
        return cls(n)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "mu": self.mu,
            "couplings": [[j, k, J] for j, k, J in self.couplings],
            "fields": [[j, h] for j, h in self.fields],
            "offset": self.offset,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "IsingInstance":
        try:
            return cls(
                n=data["n"],
                couplings=tuple(tuple(c) for c in data.get("couplings", [])),
                fields=tuple(tuple(f) for f in data.get("fields", [])),
                mu=data.get("mu", 1.0),
                offset=data.get("offset", 0.0),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"malformed Ising instance: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "IsingInstance":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)


def load_instance(path: str | Path) -> IsingInstance:
    return IsingInstance.from_json(Path(path).read_text())


def save_instance(instance: IsingInstance, path: str | Path) -> None:
    Path(path).write_text(instance.to_json())


@dataclass(frozen=True)
class SpinConfiguration:
    """A vector of +1/-1 spins.

    Basis index convention, shared with the quantum layer: bit ``j`` of the
    index is 0 when spin ``j`` is +1, and spin 0 is the least significant bit.
    """

    spins: tuple[int, ...]

    def __post_init__(self):
        spins = tuple(int(s) for s in self.spins)
        for s in spins:
            if s not in (1, -1):
                raise ValidationError(f"spins must be +1 or -1, got {s}")
        object.__setattr__(self, "spins", spins)

    def __len__(self):
        return len(self.spins)

    def __iter__(self):
        return iter(self.spins)

    def __getitem__(self, item):
        return self.spins[item]

    @classmethod
    def from_index(cls, index: int, n: int) -> "SpinConfiguration":
        return cls(tuple(-1 if (index >> j) & 1 else 1 for j in range(n)))

    def to_index(self) -> int:
        return sum(1 << j for j, s in enumerate(self.spins) if s == -1)

    def flipped(self) -> "SpinConfiguration":
        return SpinConfiguration(tuple(-s for s in self.spins))

    def to_string(self) -> str:
        return "".join("+" if s == 1 else "-" for s in self.spins)

    @classmethod
    def parse(cls, text: str) -> "SpinConfiguration":
        """Accept ``"++-"``, ``"uud"`` or a comma/space separated list such as ``"1,1,-1"``."""
        text = text.strip()
        if text and set(text) <= {"+", "-", "u", "d"}:
            return cls(tuple(1 if c in "+u" else -1 for c in text))
        parts = [p for p in text.replace(",", " ").split() if p]
        try:
            return cls(tuple(int(p) for p in parts))
        except ValueError as exc:
            raise ValidationError(f"cannot parse spin configuration {text!r}") from exc


@dataclass(frozen=True)
class GroundStateResult:
    config: SpinConfiguration
    energy: float
    degeneracy: int


def energy(instance: IsingInstance, config: SpinConfiguration | Sequence[int]) -> float:
    """Evaluate the Ising energy of one configuration.

    Costs one pass over the couplings and one over the fields. Terms are
    accumulated in storage order (couplings, fields, offset) so the block
    enumerator in :func:`brute_force_ground` reproduces this value bit for bit.
    """
    spins = config.spins if isinstance(config, SpinConfiguration) else tuple(config)
    if len(spins) != instance.n:
        raise DimensionError(f"configuration has {len(spins)} spins, instance has {instance.n}")
    e = 0.0
    for j, k, J in instance.couplings:
        e = e - J * float(spins[j] * spins[k])
    mu = instance.mu
    for j, h in instance.fields:
        e = e - (mu * h) * float(spins[j])
    return e + instance.offset


def _check_cap(n: int, cap: int, what: str = "brute_force_ground") -> None:
    if n > cap:
        raise CapExceededError(what, n, cap)


def _lex_order_spins(n: int, lo_bits: int, block: int) -> list:
    """Spin of each site for every enumeration index in ``block``.

    Enumeration index ``i`` maps site ``j`` to bit ``n-1-j`` of ``i`` (site 0
    is the most significant bit), so scanning ``i`` upward visits
    configurations in lexicographic order with +1 before -1.  Sites whose bit
    lies in the low ``lo_bits`` get a shared array; the rest are scalars.
    """
    lo = np.arange(1 << lo_bits, dtype=np.int64)
    cols = []
    for j in range(n):
        bit = n - 1 - j
        if bit < lo_bits:
            cols.append(1.0 - 2.0 * ((lo >> bit) & 1).astype(np.float64))
        else:
            cols.append(-1.0 if (block >> (bit - lo_bits)) & 1 else 1.0)
    return cols


def _block_minimum(instance: IsingInstance, lo_bits: int, block: int):
    n = instance.n
    cols = _lex_order_spins(n, lo_bits, block)
    e = np.zeros(1 << lo_bits)
    for j, k, J in instance.couplings:
        e = e - J * (cols[j] * cols[k])
    mu = instance.mu
    for j, h in instance.fields:
        e = e - (mu * h) * cols[j]
    e = e + instance.offset
    pos = int(np.argmin(e))
    best = float(e[pos])
    count = int(np.count_nonzero(e == best))
    return best, (block << lo_bits) | pos, count


def _merge(a, b):
    """Combine two partial minima (energy, index, count); associative and commutative."""
    ea, ia, ca = a
    eb, ib, cb = b
    if ea < eb:
        return a
    if eb < ea:
        return b
    return ea, min(ia, ib), ca + cb


def _index_to_config(i: int, n: int) -> SpinConfiguration:
    return SpinConfiguration(tuple(-1 if (i >> (n - 1 - j)) & 1 else 1 for j in range(n)))


def brute_force_ground(instance: IsingInstance, cap: int = DEFAULT_CAP, workers: int = 1) -> GroundStateResult:
    """Exhaustive minimum over all 2^n configurations.

    Ties are broken towards the lexicographically smallest configuration
    (+1 before -1, site 0 compared first). ``workers > 1`` splits the blocks
    across threads; the merge is order independent, so the result is
    identical to the serial run.
    """
    n = instance.n
    _check_cap(n, cap)
    lo_bits = min(n, _BLOCK_BITS)
    blocks = range(1 << (n - lo_bits))
    if workers <= 1 or len(blocks) == 1:
        partials = (_block_minimum(instance, lo_bits, b) for b in blocks)
        acc = next(partials)
        for p in partials:
            acc = _merge(acc, p)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _block_minimum(instance, lo_bits, b), blocks))
        acc = parts[0]
        for p in parts[1:]:
            acc = _merge(acc, p)
    best, index, count = acc
    return GroundStateResult(config=_index_to_config(index, n), energy=best, degeneracy=count)


def has_zero_ground(instance: IsingInstance, tol: float = DEFAULT_TOL, cap: int = DEFAULT_CAP) -> bool:
    """Decide whether the ground energy (offset included) is zero within ``tol``."""
    if tol < 0:
        raise ValidationError(f"tol must be non-negative, got {tol}")
    return abs(brute_force_ground(instance, cap=cap).energy) <= tol


def all_configurations(n: int) -> Iterable[SpinConfiguration]:
    """Every configuration in basis-index order."""
    for b in range(1 << n):
        yield SpinConfiguration.from_index(b, n)
