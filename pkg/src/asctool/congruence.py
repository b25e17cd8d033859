"""Congruences, congruence lattices, subdirect irreducibility and relative
congruences with respect to a finite class of finite algebras."""
from __future__ import annotations

import time
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import CapExceeded, NotACongruence, PreconditionError
from .finalg.algebra import FiniteAlgebra
from .finalg.constructions import _representatives, canonical_labels, is_compatible
from .finalg.search import iter_homs

CONGRUENCE_CAP = 4096


class Congruence:
    """A congruence of ``algebra`` given by canonical block labels.

    Blocks are numbered by order of their least element, so two congruences of
    the same algebra are equal exactly when their label arrays are.
    """

    __slots__ = ("algebra", "labels", "_rep")

    def __init__(self, algebra: FiniteAlgebra, labels, check: bool = False):
        labels = canonical_labels(labels)
        if labels.shape != (algebra.size,):
            raise NotACongruence("label array has the wrong length")
        if check:
            ok, w = is_compatible(algebra, labels)
            if not ok:
                raise NotACongruence(f"not compatible with {w[0]}")
        labels.setflags(write=False)
        self.algebra = algebra
        self.labels = labels
        self._rep = None

    @classmethod
    def identity(cls, A: FiniteAlgebra) -> "Congruence":
        return cls(A, np.arange(A.size))

    @classmethod
    def total(cls, A: FiniteAlgebra) -> "Congruence":
        return cls(A, np.zeros(A.size, dtype=np.int64))

    @property
    def rep(self) -> np.ndarray:
        if self._rep is None:
            self._rep = _representatives(self.labels)
        return self._rep

    @property
    def num_blocks(self) -> int:
        return int(self.labels.max()) + 1

    @property
    def is_identity(self) -> bool:
        return self.num_blocks == self.algebra.size

    @property
    def is_total(self) -> bool:
        return self.num_blocks == 1

    def blocks(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.num_blocks)]
        for x, b in enumerate(self.labels):
            out[b].append(x)
        return out

    def related(self, a: int, b: int) -> bool:
        return self.labels[a] == self.labels[b]

    def leq(self, other: "Congruence") -> bool:
        """Refinement order: every block of ``self`` lies inside a block of ``other``."""
        return bool(np.array_equal(other.labels, other.labels[self.rep]))

    def meet(self, other: "Congruence") -> "Congruence":
        return Congruence(self.algebra, self.labels * (other.num_blocks) + other.labels)

    def join(self, other: "Congruence") -> "Congruence":
        n = self.algebra.size
        src = np.concatenate([np.arange(n), np.arange(n)])
        dst = np.concatenate([self.rep, other.rep])
        return Congruence(self.algebra, _components(n, src, dst))

    def __eq__(self, other):
        return (isinstance(other, Congruence)
                and (other.algebra is self.algebra or other.algebra == self.algebra)
                and np.array_equal(self.labels, other.labels))

    def __hash__(self):
        return hash(self.labels.tobytes())

    def __repr__(self):
        return f"Congruence({self.blocks()})"

    def key(self) -> bytes:
        return self.labels.tobytes()

    def to_json(self) -> list[int]:
        return [int(x) for x in self.labels]


def _components(n: int, src, dst) -> np.ndarray:
    g = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n))
    _, labels = connected_components(g, directed=False)
    return labels


def congruence_generated(A: FiniteAlgebra, pairs: Iterable[tuple[int, int]],
                         start: Congruence | None = None) -> Congruence:
    """Least congruence containing ``pairs`` (and ``start``, if given).

    Alternates between merging related pairs into blocks and one propagation
    round: for each operation and argument position, substituting an element by
    the least element of its block must not change the block of the result.
    """
    n = A.size
    pairs = [(int(a), int(b)) for a, b in pairs]
    for a, b in pairs:
        if not (0 <= a < n and 0 <= b < n):
            raise PreconditionError(f"pair {(a, b)} out of range")
    src = [a for a, _ in pairs]
    dst = [b for _, b in pairs]
    if start is not None:
        src += list(range(n))
        dst += list(start.rep)
    labels = _components(n, np.asarray(src + list(range(n)), dtype=np.int64),
                         np.asarray(dst + list(range(n)), dtype=np.int64))
    ops = [(A.tables[op], a) for op, a in A.signature if a > 0]
    while True:
        rep = _representatives(labels)
        new_src, new_dst = [], []
        for T, arity in ops:
            LT = labels[T]
            for pos in range(arity):
                other = np.take(T, rep, axis=pos)
                bad = LT != labels[other]
                if bad.any():
                    new_src.append(T[bad].ravel())
                    new_dst.append(other[bad].ravel())
        if not new_src:
            return Congruence(A, labels)
        s = np.concatenate(new_src + [np.arange(n)])
        d = np.concatenate(new_dst + [rep])
        labels = _components(n, s, d)


def principal_congruence(A: FiniteAlgebra, a: int, b: int) -> Congruence:
    return congruence_generated(A, [(a, b)])


def principal_congruences(A: FiniteAlgebra) -> dict:
    """All distinct principal congruences ``θ(a, b)``, ``a < b``, keyed by label bytes."""
    out = {}
    for a in range(A.size):
        for b in range(a + 1, A.size):
            th = principal_congruence(A, a, b)
            out.setdefault(th.key(), th)
    return out


class CongruenceLattice:
    """All congruences of an algebra, sorted from the identity relation upwards."""

    def __init__(self, algebra: FiniteAlgebra, congruences: Sequence[Congruence]):
        self.algebra = algebra
        cons = sorted(congruences, key=lambda c: (-c.num_blocks, tuple(c.labels)))
        self.congruences = cons
        self.index = {c.key(): i for i, c in enumerate(cons)}
        m = len(cons)
        self.order = np.array([[cons[i].leq(cons[j]) for j in range(m)] for i in range(m)],
                              dtype=bool)
        self.meet_table = np.array([[self.index[cons[i].meet(cons[j]).key()] for j in range(m)]
                                    for i in range(m)], dtype=np.int64)
        self.join_table = np.array([[self.index[cons[i].join(cons[j]).key()] for j in range(m)]
                                    for i in range(m)], dtype=np.int64)

    def __len__(self):
        return len(self.congruences)

    def __iter__(self):
        return iter(self.congruences)

    def __getitem__(self, i):
        return self.congruences[i]

    @property
    def bottom(self) -> Congruence:
        return self.congruences[0]

    @property
    def top(self) -> Congruence:
        return self.congruences[-1]

    def covers(self) -> list[list[int]]:
        """``covers()[i]`` lists the congruences covering congruence ``i``."""
        m = len(self)
        strict = self.order & ~np.eye(m, dtype=bool)
        out = []
        for i in range(m):
            ups = np.flatnonzero(strict[i])
            out.append([int(j) for j in ups if not (strict[i] & strict[:, j]).any()])
        return out

    def as_algebra(self) -> FiniteAlgebra:
        """The lattice as a bounded-lattice algebra (element ``i`` is congruence ``i``)."""
        from .catalog import LATTICE
        m = len(self)
        return FiniteAlgebra(LATTICE, m, {"zero": np.array(0), "one": np.array(m - 1),
                                          "join": self.join_table, "meet": self.meet_table},
                             name="Con")

    def to_json(self) -> dict:
        return {"congruences": [c.to_json() for c in self.congruences],
                "covers": self.covers()}


def all_congruences(A: FiniteAlgebra, cap: int = CONGRUENCE_CAP,
                    deadline: float | None = None) -> CongruenceLattice:
    """Join closure of the principal congruences."""
    if A.size > cap:
        raise CapExceeded(f"algebra has {A.size} elements, above the congruence cap {cap}",
                          size=A.size, cap=cap)
    principals = list(principal_congruences(A).values())
    found = {c.key(): c for c in principals}
    ident = Congruence.identity(A)
    found.setdefault(ident.key(), ident)
    work = list(principals)
    while work:
        if deadline is not None and time.monotonic() > deadline:
            raise CapExceeded("time budget exhausted in congruence enumeration",
                              found=len(found))
        th = work.pop()
        for p in principals:
            j = th.join(p)
            if j.key() not in found:
                found[j.key()] = j
                work.append(j)
    return CongruenceLattice(A, list(found.values()))


def _require_nontrivial(A):
    if A.size < 2:
        raise PreconditionError("the trivial algebra is excluded here")


def subdirect_irreducibility(A: FiniteAlgebra):
    """``(monolith, None)`` when SI, else ``(None, (θ1, θ2))`` with non-identity
    congruences whose meet is the identity."""
    _require_nontrivial(A)
    meet = None
    for a in range(A.size):
        for b in range(a + 1, A.size):
            p = principal_congruence(A, a, b)
            if meet is None:
                meet = p
                continue
            m = meet.meet(p)
            if m.is_identity:
                return None, (meet, p)
            meet = m
    return meet, None


def is_subdirectly_irreducible(A: FiniteAlgebra) -> Congruence | None:
    """The monolith if ``A`` is subdirectly irreducible, otherwise None."""
    return subdirect_irreducibility(A)[0]


def is_simple(A: FiniteAlgebra) -> bool:
    _require_nontrivial(A)
    for a in range(A.size):
        for b in range(a + 1, A.size):
            if not principal_congruence(A, a, b).is_total:
                return False
    return True


# -- relative congruences ------------------------------------------------------

def hom_kernels(A: FiniteAlgebra, K: Sequence[FiniteAlgebra], deadline=None) -> list[Congruence]:
    """Distinct kernels of homomorphisms from ``A`` into members of ``K``."""
    seen = {}
    for B in K:
        for h in iter_homs(A, B, "all", deadline=deadline):
            c = Congruence(A, h.map)
            seen.setdefault(c.key(), c)
    return sorted(seen.values(), key=lambda c: (-c.num_blocks, tuple(c.labels)))


def _members(K):
    return list(getattr(K, "generators", K))


def relative_principal(A: FiniteAlgebra, K, pairs: Iterable[tuple[int, int]] = (),
                       deadline=None) -> Congruence:
    """Intersection of the kernels of all homs ``A -> B`` (``B`` in ``K``) that
    identify every pair in ``pairs``; the total relation if there are none."""
    pairs = list(pairs)
    out = Congruence.total(A)
    for c in hom_kernels(A, _members(K), deadline=deadline):
        if all(c.related(a, b) for a, b in pairs):
            out = out.meet(c)
    return out


def relative_congruences(A: FiniteAlgebra, K, deadline=None) -> list[Congruence]:
    """All relative congruences: intersections of hom kernels, plus the total relation."""
    kernels = hom_kernels(A, _members(K), deadline=deadline)
    found = {Congruence.total(A).key(): Congruence.total(A)}
    for c in kernels:
        for existing in list(found.values()):
            m = existing.meet(c)
            found.setdefault(m.key(), m)
    return sorted(found.values(), key=lambda c: (-c.num_blocks, tuple(c.labels)))


def is_relative_si(A: FiniteAlgebra, K, deadline=None):
    """``(True, monolith)`` or ``(False, None)`` for relative subdirect irreducibility.

    Every relative congruence is an intersection of hom kernels, so the least
    non-identity relative congruence exists iff the meet of the non-identity
    kernels (and the total relation) is not the identity.
    """
    _require_nontrivial(A)
    kernels = hom_kernels(A, _members(K), deadline=deadline)
    sep = Congruence.total(A)
    for c in kernels:
        sep = sep.meet(c)
    if not sep.is_identity:
        raise PreconditionError("algebra is not in the quasivariety generated by K")
    mono = Congruence.total(A)
    for c in kernels:
        if not c.is_identity:
            mono = mono.meet(c)
    if mono.is_identity:
        return False, None
    return True, mono
