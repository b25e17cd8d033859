from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from ..errors import AlgebraError, SignatureMismatch


@dataclass(frozen=True)
class Signature:
    """Ordered list of ``(name, arity)`` pairs."""

    symbols: tuple[tuple[str, int], ...]

    def __init__(self, symbols: Iterable):
        syms = []
        for s in symbols:
            if isinstance(s, Mapping):
                name, arity = s["op"], s["arity"]
            else:
                name, arity = s
            if not isinstance(name, str) or not name:
                raise AlgebraError(f"bad operation name {name!r}")
            if not isinstance(arity, int) or arity < 0:
                raise AlgebraError(f"bad arity {arity!r} for {name}")
            syms.append((name, int(arity)))
        names = [n for n, _ in syms]
        if len(set(names)) != len(names):
            raise AlgebraError(f"duplicate operation names in {names}")
        object.__setattr__(self, "symbols", tuple(syms))

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self):
        return len(self.symbols)

    def __contains__(self, name):
        return any(n == name for n, _ in self.symbols)

    def arity(self, name: str) -> int:
        for n, a in self.symbols:
            if n == name:
                return a
        raise KeyError(name)

    @property
    def names(self) -> list[str]:
        return [n for n, _ in self.symbols]

    @property
    def constants(self) -> list[str]:
        return [n for n, a in self.symbols if a == 0]

    def to_json(self) -> list[dict]:
        return [{"op": n, "arity": a} for n, a in self.symbols]


def _dtype(n: int):
    return np.int16 if n <= np.iinfo(np.int16).max else np.int32


class FiniteAlgebra:
    """A finite algebra on the universe ``{0, ..., size-1}``.

    Operation tables are numpy arrays indexed by argument tuples; an arity-0
    table is a 0-d array holding the constant. Instances are treated as
    immutable: tables are marked read-only on construction.
    """

    def __init__(self, signature, size: int, tables: Mapping, name: str | None = None,
                 validate: bool = True):
        if not isinstance(signature, Signature):
            signature = Signature(signature)
        if not isinstance(size, (int, np.integer)) or size < 1:
            raise AlgebraError(f"size must be a positive integer, got {size!r}")
        size = int(size)
        self.signature = signature
        self.size = size
        self.name = name
        dt = _dtype(size)
        tabs = {}
        for op, arity in signature:
            if op not in tables:
                raise AlgebraError(f"missing table for {op}")
            t = np.asarray(tables[op])
            if t.shape != (size,) * arity:
                raise AlgebraError(
                    f"table for {op} has shape {t.shape}, expected {(size,) * arity}")
            if validate and t.size and (t.min() < 0 or t.max() >= size):
                raise AlgebraError(f"table for {op} has entries out of range")
            t = np.array(t, dtype=dt)
            t.setflags(write=False)
            tabs[op] = t
        extra = set(tables) - set(signature.names)
        if extra:
            raise AlgebraError(f"tables for unknown operations {sorted(extra)}")
        self.tables = tabs
        self._key = None

    # -- basic access -------------------------------------------------------

    def op(self, name: str) -> np.ndarray:
        return self.tables[name]

    def apply(self, name: str, *args) -> int:
        return int(self.tables[name][tuple(args)])

    def const(self, name: str) -> int:
        return int(self.tables[name])

    @property
    def elements(self) -> range:
        return range(self.size)

    @property
    def is_trivial(self) -> bool:
        return self.size == 1

    def key(self) -> bytes:
        """Digest of signature and tables; equal keys mean identical algebras."""
        if self._key is None:
            h = hashlib.sha256()
            h.update(repr(self.signature.symbols).encode())
            h.update(str(self.size).encode())
            for op, _ in self.signature:
                h.update(self.tables[op].astype(np.int32).tobytes())
            self._key = h.digest()
        return self._key

    def table_bytes(self) -> bytes:
        return b"".join(self.tables[op].astype(np.int32).tobytes() for op in self.signature.names)

    def sort_key(self):
        return (self.size, self.table_bytes())

    def __eq__(self, other):
        return isinstance(other, FiniteAlgebra) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<FiniteAlgebra{label} size={self.size} ops={self.signature.names}>"

    def renamed(self, name: str) -> "FiniteAlgebra":
        return FiniteAlgebra(self.signature, self.size, self.tables, name=name, validate=False)

    def check_same_signature(self, other: "FiniteAlgebra"):
        if self.signature != other.signature:
            raise SignatureMismatch(
                f"signatures differ: {self.signature.names} vs {other.signature.names}")

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "name": self.name or "",
            "size": self.size,
            "signature": self.signature.to_json(),
            "tables": {op: self.tables[op].tolist() for op in self.signature.names},
        }

    @classmethod
    def from_json(cls, data) -> "FiniteAlgebra":
        try:
            sig = Signature(data["signature"])
            size = data["size"]
            tables = {}
            for op, arity in sig:
                raw = data["tables"][op]
                tables[op] = np.array(raw, dtype=np.int64)
            return cls(sig, size, tables, name=data.get("name") or None)
        except AlgebraError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise AlgebraError(f"malformed algebra data: {exc}") from exc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def load_algebra(path) -> FiniteAlgebra:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise AlgebraError(f"{path}: not valid JSON ({exc})") from exc
    return FiniteAlgebra.from_json(data)


def save_algebra(A: FiniteAlgebra, path, extra: dict | None = None):
    data = A.to_json()
    if extra:
        data.update(extra)
    with open(path, "w") as fh:
        json.dump(data, fh, sort_keys=True)
        fh.write("\n")


def trivial_algebra(signature, name: str | None = "trivial") -> FiniteAlgebra:
    if not isinstance(signature, Signature):
        signature = Signature(signature)
    tables = {op: np.zeros((1,) * a, dtype=np.int16) for op, a in signature}
    return FiniteAlgebra(signature, 1, tables, name=name)


@dataclass(frozen=True, eq=False)
class Homomorphism:
    """A map between finite algebras; ``map[i]`` is the image of element ``i``."""

    source: FiniteAlgebra
    target: FiniteAlgebra
    map: tuple[int, ...]

    def __post_init__(self):
        if len(self.map) != self.source.size:
            raise AlgebraError("homomorphism map has wrong length")

    def __call__(self, x: int) -> int:
        return self.map[x]

    @property
    def is_injective(self) -> bool:
        return len(set(self.map)) == len(self.map)

    @property
    def is_surjective(self) -> bool:
        return len(set(self.map)) == self.target.size

    def kernel_labels(self) -> np.ndarray:
        _, labels = np.unique(np.asarray(self.map), return_inverse=True)
        return labels

    def verify(self) -> bool:
        return is_homomorphism(self.source, self.target, self.map)

    def compose(self, other: "Homomorphism") -> "Homomorphism":
        """``other`` after ``self``."""
        return Homomorphism(self.source, other.target, tuple(other.map[x] for x in self.map))

    def to_json(self) -> list[int]:
        return list(self.map)


def is_homomorphism(A: FiniteAlgebra, B: FiniteAlgebra, h) -> bool:
    """Check every table entry: ``h(f_A(args)) == f_B(h(args))``."""
    if A.signature != B.signature:
        return False
    h = np.asarray(h, dtype=np.int64)
    if h.shape != (A.size,) or h.min(initial=0) < 0 or h.max(initial=0) >= B.size:
        return False
    for op, arity in A.signature:
        ta, tb = A.tables[op], B.tables[op]
        if arity == 0:
            if h[int(ta)] != int(tb):
                return False
            continue
        lhs = h[ta]
        idx = np.ix_(*([h] * arity))
        if not np.array_equal(lhs, tb[idx]):
            return False
    return True
