"""Direct decomposition into directly indecomposable factors."""
from __future__ import annotations

import numpy as np

from .algebra import FiniteAlgebra, Homomorphism
from .constructions import ProductAlgebra, quotient

_CLOSURE_OPS = {"zero", "one", "neg", "join", "meet", "dia"}


def _is_closure_like(A: FiniteAlgebra) -> bool:
    if set(A.signature.names) != _CLOSURE_OPS:
        return False
    from ..catalog import classify
    return classify(A).flags.get("is_closure", False)


def clopen_elements(A: FiniteAlgebra) -> np.ndarray:
    neg, dia = A.tables["neg"], A.tables["dia"]
    box = neg[dia[neg]]
    x = np.arange(A.size)
    return np.flatnonzero((dia == x) & (box == x))


def _clopen_atoms(A: FiniteAlgebra) -> list[int]:
    meet = A.tables["meet"]
    zero = A.const("zero")
    cl = [int(c) for c in clopen_elements(A) if c != zero]
    atoms = []
    for c in cl:
        # c is an atom of the clopen Boolean algebra if no smaller nonzero clopen lies below it
        if not any(d != c and meet[d, c] == d for d in cl):
            atoms.append(c)
    return atoms


def _closure_route(A: FiniteAlgebra):
    meet = A.tables["meet"]
    atoms = _clopen_atoms(A)
    factors, maps = [], []
    for e in atoms:
        Q, nat = quotient(A, meet[:, e])
        factors.append(Q)
        maps.append(nat.map)
    return factors, maps


def _factor_pair(A: FiniteAlgebra):
    """A pair of complementary permuting factor congruences, or None."""
    from ..congruence import all_congruences
    L = all_congruences(A)
    n = A.size
    cons = list(L)
    for i, th in enumerate(cons):
        if th.is_identity or th.is_total:
            continue
        for ph in cons[i + 1:]:
            if ph.is_identity or ph.is_total:
                continue
            if th.num_blocks * ph.num_blocks == n and th.meet(ph).is_identity:
                return th, ph
    return None


def _generic_route(A: FiniteAlgebra):
    pair = _factor_pair(A)
    if pair is None:
        return [A], [tuple(range(A.size))]
    factors, maps = [], []
    for th in pair:
        Q, nat = quotient(A, th)
        sub_f, sub_m = _generic_route(Q)
        for F, m in zip(sub_f, sub_m):
            factors.append(F)
            maps.append(tuple(m[nat.map[x]] for x in range(A.size)))
    return factors, maps


def direct_decomposition(A: FiniteAlgebra):
    """Directly indecomposable factors of ``A`` and an isomorphism ``A -> product``.

    Closure algebras are split along the atoms of their clopen elements; other
    algebras along complementary factor congruences. The trivial algebra
    decomposes into the empty product.
    """
    if A.size == 1:
        P = ProductAlgebra([], signature=A.signature)
        return [], Homomorphism(A, P, (0,))
    if _is_closure_like(A):
        factors, maps = _closure_route(A)
    else:
        factors, maps = _generic_route(A)
    P = ProductAlgebra(factors)
    coords = np.stack([np.asarray(m, dtype=np.int64) for m in maps], axis=1)
    iso = tuple(int(v) for v in np.ravel_multi_index(tuple(coords.T), P.shape))
    return factors, Homomorphism(A, P, iso)
