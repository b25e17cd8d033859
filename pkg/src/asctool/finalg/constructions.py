"""Products, generated subalgebras and quotients."""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from ..errors import AlgebraError, NotACongruence, SignatureMismatch
from .algebra import FiniteAlgebra, Homomorphism, Signature, trivial_algebra


class ProductAlgebra(FiniteAlgebra):
    """Direct product; element ``i`` is the tuple ``coords[i]`` (first factor most significant)."""

    def __init__(self, factors: Sequence[FiniteAlgebra], signature: Signature | None = None,
                 name: str | None = None):
        factors = list(factors)
        if not factors:
            if signature is None:
                raise AlgebraError("empty product needs an explicit signature")
            triv = trivial_algebra(signature)
            super().__init__(signature, 1, triv.tables, name=name or "trivial", validate=False)
            self.factors = []
            self.coords = np.zeros((1, 0), dtype=np.int64)
            self.shape = ()
            return
        sig = factors[0].signature
        for B in factors[1:]:
            if B.signature != sig:
                raise SignatureMismatch("product factors have different signatures")
        shape = tuple(B.size for B in factors)
        size = int(np.prod(shape, dtype=np.int64))
        coords = np.stack(np.unravel_index(np.arange(size), shape), axis=1) if size else None
        tables = {}
        for op, arity in sig:
            if arity == 0:
                tables[op] = np.array(np.ravel_multi_index(
                    tuple(int(B.tables[op]) for B in factors), shape))
                continue
            # coordinate j of the value depends only on coordinate j of the arguments
            out = np.zeros((size,) * arity, dtype=np.int64)
            for j, B in enumerate(factors):
                cj = coords[:, j]
                out = out * shape[j] + B.tables[op][np.ix_(*([cj] * arity))]
            tables[op] = out
        if name is None:
            labels = [B.name or "?" for B in factors]
            name = "x".join(labels)
        super().__init__(sig, size, tables, name=name, validate=False)
        self.factors = factors
        self.coords = coords
        self.shape = shape

    def index(self, tup) -> int:
        return int(np.ravel_multi_index(tuple(tup), self.shape))

    def projection(self, j: int) -> Homomorphism:
        return Homomorphism(self, self.factors[j], tuple(int(c) for c in self.coords[:, j]))


def product(algebras: Sequence[FiniteAlgebra], signature: Signature | None = None,
            name: str | None = None) -> ProductAlgebra:
    return ProductAlgebra(algebras, signature=signature, name=name)


def power(A: FiniteAlgebra, k: int) -> ProductAlgebra:
    return ProductAlgebra([A] * k, signature=A.signature)


def subuniverse(A: FiniteAlgebra, gens: Iterable[int]) -> np.ndarray:
    """Sorted array of the subuniverse generated by ``gens`` and the constants."""
    gens = [int(g) for g in gens]
    for g in gens:
        if not 0 <= g < A.size:
            raise AlgebraError(f"generator {g} out of range")
    inside = np.zeros(A.size, dtype=bool)
    inside[gens] = True
    for op in A.signature.constants:
        inside[int(A.tables[op])] = True
    if not inside.any():
        raise AlgebraError("empty generated subuniverse (no generators and no constants)")
    ops = [(op, a) for op, a in A.signature if a > 0]
    while True:
        cur = np.flatnonzero(inside)
        before = cur.size
        for op, arity in ops:
            vals = A.tables[op][np.ix_(*([cur] * arity))]
            inside[vals.ravel()] = True
        if np.count_nonzero(inside) == before:
            return cur


class Subalgebra(FiniteAlgebra):
    """Subalgebra on ``universe`` (sorted); element ``i`` here is ``universe[i]`` in the parent."""

    def __init__(self, parent: FiniteAlgebra, universe: np.ndarray, name: str | None = None):
        universe = np.asarray(universe, dtype=np.int64)
        lookup = np.full(parent.size, -1, dtype=np.int64)
        lookup[universe] = np.arange(universe.size)
        tables = {}
        for op, arity in parent.signature:
            if arity == 0:
                tables[op] = np.array(lookup[int(parent.tables[op])])
            else:
                vals = parent.tables[op][np.ix_(*([universe] * arity))]
                tables[op] = lookup[vals]
        if any(np.any(t < 0) for t in tables.values()):
            raise AlgebraError("subset is not closed under the operations")
        super().__init__(parent.signature, int(universe.size), tables, name=name, validate=False)
        self.parent = parent
        self.universe = universe
        self.inclusion = Homomorphism(self, parent, tuple(int(u) for u in universe))


def subalgebra_generated(A: FiniteAlgebra, gens: Iterable[int], name: str | None = None) -> Subalgebra:
    return Subalgebra(A, subuniverse(A, gens), name=name)


def image_subalgebra(h: Homomorphism) -> Subalgebra:
    return Subalgebra(h.target, np.unique(np.asarray(h.map)))


def _labels_of(theta) -> np.ndarray:
    labels = getattr(theta, "labels", theta)
    return np.asarray(labels, dtype=np.int64)


def canonical_labels(labels) -> np.ndarray:
    """Relabel blocks by order of first occurrence."""
    labels = np.asarray(labels, dtype=np.int64)
    _, first, inv = np.unique(labels, return_index=True, return_inverse=True)
    order = np.argsort(first)
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    return rank[inv.reshape(-1)]


def is_compatible(A: FiniteAlgebra, labels) -> tuple[bool, tuple | None]:
    """Check that the partition given by ``labels`` is a congruence.

    Returns ``(True, None)`` or ``(False, (op, position, a, b))`` where ``a``
    and ``b`` are related but substituting them at ``position`` separates the
    results.
    """
    labels = _labels_of(labels)
    rep = _representatives(labels)
    for op, arity in A.signature:
        if arity == 0:
            continue
        T = labels[A.tables[op]]
        for pos in range(arity):
            other = np.take(T, rep, axis=pos)
            diff = np.argwhere(other != T)
            if diff.size:
                idx = tuple(int(i) for i in diff[0])
                a = idx[pos]
                return False, (op, pos, a, int(rep[a]))
    return True, None


def _representatives(labels: np.ndarray) -> np.ndarray:
    """For each element, the least element of its block."""
    n = labels.size
    first = np.full(labels.max() + 1 if n else 0, n, dtype=np.int64)
    np.minimum.at(first, labels, np.arange(n))
    return first[labels]


def quotient(A: FiniteAlgebra, theta, name: str | None = None):
    """Quotient algebra and the natural map; blocks numbered by least element."""
    labels = canonical_labels(_labels_of(theta))
    if labels.shape != (A.size,):
        raise AlgebraError("partition has the wrong length")
    ok, witness = is_compatible(A, labels)
    if not ok:
        raise NotACongruence(f"partition not compatible with {witness[0]} at argument {witness[1]}")
    m = int(labels.max()) + 1
    rep = np.unique(labels, return_index=True)[1]
    tables = {}
    for op, arity in A.signature:
        if arity == 0:
            tables[op] = np.array(labels[int(A.tables[op])])
        else:
            tables[op] = labels[A.tables[op][np.ix_(*([rep] * arity))]]
    Q = FiniteAlgebra(A.signature, m, tables, name=name, validate=False)
    return Q, Homomorphism(A, Q, tuple(int(x) for x in labels))
