"""Homomorphism, embedding and isomorphism search.

The source algebra is generated from a small generating set ``g_0 .. g_{m-1}``.
Stage ``i`` consists of the elements derivable from the constants and
``g_0 .. g_i``; every such element gets one derivation ``(op, args)`` from
earlier elements. Choosing an image for ``g_i`` therefore determines the
images of the whole stage, and the stage is a subuniverse, so the choice can
be checked against every table entry inside it.

The images of ``g_i`` are tried for all target elements at once: derivations
and checks run as numpy operations over a column per candidate. Only the
surviving candidates are branched on, in ascending order, so the first
homomorphism reported is the one whose generator images are lexicographically
least.
"""
from __future__ import annotations

import itertools
import time
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from ..errors import CapExceeded
from .algebra import FiniteAlgebra, Homomorphism, is_homomorphism
from .constructions import subuniverse

MODES = ("any", "all", "injective", "surjective", "bijective")
_CELL_BUDGET = 1 << 22


def generating_set(A: FiniteAlgebra) -> list[int]:
    """A small generating set, built greedily.

    Repeatedly adds the element whose addition enlarges the generated
    subuniverse the most (smallest element on ties). Large algebras fall back
    to adding the least element not yet generated.
    """
    gens: list[int] = []
    inside = np.zeros(A.size, dtype=bool)
    if A.signature.constants:
        inside[subuniverse(A, [])] = True
    greedy = A.size <= 64
    while not inside.all():
        outside = np.flatnonzero(~inside)
        if greedy:
            best, best_size = None, -1
            for x in outside:
                sz = subuniverse(A, gens + [int(x)]).size
                if sz > best_size:
                    best, best_size = int(x), sz
        else:
            best = int(outside[0])
        gens.append(best)
        inside[subuniverse(A, gens)] = True
    return gens


@dataclass
class _Stage:
    gen: int                      # the generator introduced at this stage
    new: list                     # [(element, op, args)] derived after gen, in order
    elements: np.ndarray          # all elements of the stage (sorted)
    fresh: np.ndarray             # elements first appearing in this stage


@dataclass
class Plan:
    gens: list
    base: list                    # [(element, op, args)] derived from constants alone
    base_elements: np.ndarray
    stages: list


def _derive(A: FiniteAlgebra, known: np.ndarray) -> list:
    """Close ``known`` (bool mask) under the operations, recording derivations."""
    out = []
    ops = [(op, a) for op, a in A.signature if a > 0]
    while True:
        cur = np.flatnonzero(known)
        added = False
        for op, arity in ops:
            T = A.tables[op]
            vals = T[np.ix_(*([cur] * arity))]
            flat = vals.ravel()
            new_mask = ~known[flat]
            if not new_mask.any():
                continue
            vals_new, first = np.unique(flat[new_mask], return_index=True)
            where = np.flatnonzero(new_mask)[first]
            for e, p in sorted(zip(vals_new.tolist(), where.tolist()), key=lambda t: t[1]):
                idx = np.unravel_index(p, vals.shape)
                args = tuple(int(cur[i]) for i in idx)
                known[e] = True
                out.append((e, op, args))
                added = True
        if not added:
            return out


def make_plan(A: FiniteAlgebra, gens: Sequence[int] | None = None) -> Plan:
    if gens is None:
        gens = generating_set(A)
    gens = [int(g) for g in gens]
    known = np.zeros(A.size, dtype=bool)
    base = []
    for op in A.signature.constants:
        e = int(A.tables[op])
        if not known[e]:
            known[e] = True
            base.append((e, op, ()))
    base += _derive(A, known)
    base_elements = np.flatnonzero(known)
    stages = []
    prev = base_elements
    for g in gens:
        if known[g]:
            new = []
        else:
            known[g] = True
            new = _derive(A, known)
        elements = np.flatnonzero(known)
        fresh = np.setdiff1d(elements, prev)
        stages.append(_Stage(g, new, elements, fresh))
        prev = elements
    if not known.all():
        raise ValueError("given elements do not generate the algebra")
    return Plan(gens, base, base_elements, stages)


def _local_invariants(A: FiniteAlgebra) -> np.ndarray:
    """Per-element flags preserved and reflected by embeddings."""
    cols = []
    for op, arity in A.signature:
        T = A.tables[op]
        if arity == 1:
            cols.append(T == np.arange(A.size))
        elif arity >= 2:
            diag = T[(np.arange(A.size),) * arity]
            cols.append(diag == np.arange(A.size))
    if not cols:
        return np.zeros((A.size, 0), dtype=np.int64)
    return np.stack(cols, axis=1).astype(np.int64)


def _global_invariants(A: FiniteAlgebra) -> np.ndarray:
    """Per-element data preserved by isomorphisms."""
    cols = [_local_invariants(A)]
    for op, arity in A.signature:
        if arity > 0:
            cols.append(np.bincount(A.tables[op].ravel(), minlength=A.size)[:, None])
    return np.concatenate(cols, axis=1)


def _inv_codes(IA: np.ndarray, IB: np.ndarray):
    """Map invariant rows of both algebras to shared integer codes."""
    both = np.concatenate([IA, IB], axis=0)
    if both.shape[1] == 0:
        return np.zeros(len(IA), np.int64), np.zeros(len(IB), np.int64)
    _, codes = np.unique(both, axis=0, return_inverse=True)
    codes = codes.reshape(-1)
    return codes[:len(IA)], codes[len(IA):]


class _Searcher:
    def __init__(self, A, B, mode, plan, deadline, fixed):
        self.A, self.B, self.mode = A, B, mode
        self.plan = plan
        self.deadline = deadline
        self.fixed = fixed or {}
        self.injective = mode in ("injective", "bijective")
        self.codeA = self.codeB = None
        if self.injective:
            IA = _global_invariants(A) if mode == "bijective" else _local_invariants(A)
            IB = _global_invariants(B) if mode == "bijective" else _local_invariants(B)
            self.codeA, self.codeB = _inv_codes(IA, IB)
        self.ops = [(op, a, A.tables[op].astype(np.int64), B.tables[op].astype(np.int64))
                    for op, a in A.signature if a > 0]
        self.nodes = 0

    def _check_time(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise CapExceeded("time budget exhausted during homomorphism search",
                              nodes=self.nodes)

    def _derive_cols(self, img, derivs):
        for e, op, args in derivs:
            T = self.B.tables[op]
            if args:
                img[e] = T[tuple(img[a] for a in args)]
            else:
                img[e] = int(T)

    def _consistent(self, img, elements, fresh) -> np.ndarray:
        """Boolean per column: the map is a homomorphism on ``elements``."""
        m = img.shape[1]
        ok = np.ones(m, dtype=bool)
        if self.injective:
            rows = img[elements]
            if self.codeA is not None:
                ok &= (self.codeB[rows] == self.codeA[elements][:, None]).all(axis=0)
            if len(elements) > 1:
                srt = np.sort(rows, axis=0)
                ok &= ~(srt[1:] == srt[:-1]).any(axis=0)
        for op, arity, TA, TB in self.ops:
            if not ok.any():
                break
            # only tuples touching a fresh element are new
            E = len(elements)
            block = max(1, _CELL_BUDGET // max(1, E ** (arity - 1) * m))
            for pos in range(arity):
                for s in range(0, len(fresh), block):
                    axes = [elements] * arity
                    axes[pos] = fresh[s:s + block]
                    res = TA[np.ix_(*axes)]
                    lhs = img[res]
                    args = []
                    for d, ax in enumerate(axes):
                        shape = [1] * arity + [m]
                        shape[d] = len(ax)
                        args.append(img[ax].reshape(shape))
                    rhs = TB[tuple(args)]
                    ok &= (lhs == rhs).reshape(-1, m).all(axis=0)
                    if not ok.any():
                        return ok
        return ok

    def run(self) -> Iterator[np.ndarray]:
        A, B, plan = self.A, self.B, self.plan
        img0 = np.zeros((A.size, 1), dtype=np.int64)
        self._derive_cols(img0, plan.base)
        for c in A.signature.constants:
            if img0[int(A.tables[c]), 0] != int(B.tables[c]):
                return
        ok = self._consistent(img0, plan.base_elements, plan.base_elements)
        if not ok[0]:
            return
        yield from self._dfs(0, img0[:, 0])

    def _dfs(self, i, img_vec) -> Iterator[np.ndarray]:
        plan = self.plan
        if i == len(plan.stages):
            if self.mode in ("surjective", "bijective"):
                if np.unique(img_vec).size != self.B.size:
                    return
            yield img_vec.copy()
            return
        self.nodes += 1
        if self.nodes % 64 == 1:
            self._check_time()
        st = plan.stages[i]
        if st.fresh.size == 0:
            if i in self.fixed and img_vec[st.gen] != self.fixed[i]:
                return
            yield from self._dfs(i + 1, img_vec)
            return
        if i in self.fixed:
            cands = np.array([self.fixed[i]], dtype=np.int64)
        else:
            cands = np.arange(self.B.size, dtype=np.int64)
        step = max(1, _CELL_BUDGET // max(1, self.A.size))
        for s in range(0, cands.size, step):
            chunk = cands[s:s + step]
            img = np.repeat(img_vec[:, None], chunk.size, axis=1)
            img[st.gen] = chunk
            self._derive_cols(img, st.new)
            ok = self._consistent(img, st.elements, st.fresh)
            for j in np.flatnonzero(ok):
                yield from self._dfs(i + 1, img[:, j])


def iter_homs(A: FiniteAlgebra, B: FiniteAlgebra, mode: str = "all", gens=None,
              images=None, deadline: float | None = None) -> Iterator[Homomorphism]:
    """Yield homomorphisms ``A -> B`` in lexicographic order of generator images.

    ``images`` optionally fixes the images of ``gens`` (same order).
    """
    A.check_same_signature(B)
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "bijective" and A.size != B.size:
        return
    if mode == "injective" and A.size > B.size:
        return
    if mode == "surjective" and A.size < B.size:
        return
    plan = make_plan(A, gens)
    fixed = None
    if images is not None:
        fixed = {i: int(v) for i, v in enumerate(images)}
    for col in _Searcher(A, B, mode, plan, deadline, fixed).run():
        yield Homomorphism(A, B, tuple(int(x) for x in col))


def homs(A: FiniteAlgebra, B: FiniteAlgebra, mode: str = "any", deadline=None):
    """``mode='all'`` returns a list; other modes return the first hom or None."""
    search_mode = {"any": "all", "all": "all"}.get(mode, mode)
    it = iter_homs(A, B, search_mode, deadline=deadline)
    if mode == "all":
        return list(it)
    return next(it, None)


def find_embedding(A, B, deadline=None):
    return homs(A, B, "injective", deadline=deadline)


def extend_map(A: FiniteAlgebra, B: FiniteAlgebra, gens, images) -> Homomorphism | None:
    """The homomorphism sending ``gens[i]`` to ``images[i]``, if one exists."""
    if A.signature != B.signature:
        return None
    it = iter_homs(A, B, "all", gens=list(gens), images=list(images))
    return next(it, None)


# -- isomorphism -------------------------------------------------------------

def fingerprint(A: FiniteAlgebra) -> tuple:
    """Isomorphism invariant: size, fixed-point counts, constant pattern, in-degrees."""
    parts: list = [A.size]
    consts = [int(A.tables[c]) for c in A.signature.constants]
    parts.append(tuple(consts.index(c) for c in consts))
    for op, arity in A.signature:
        T = A.tables[op]
        if arity == 1:
            parts.append(int(np.count_nonzero(T == np.arange(A.size))))
        if arity >= 1:
            parts.append(tuple(sorted(np.bincount(T.ravel(), minlength=A.size).tolist())))
    rows = _global_invariants(A)
    parts.append(tuple(sorted(Counter(map(tuple, rows.tolist())).items())))
    return tuple(parts)


def is_isomorphic(A: FiniteAlgebra, B: FiniteAlgebra, deadline=None) -> Homomorphism | None:
    if A.signature != B.signature or A.size != B.size:
        return None
    if fingerprint(A) != fingerprint(B):
        return None
    return homs(A, B, "bijective", deadline=deadline)


def brute_force_homs(A: FiniteAlgebra, B: FiniteAlgebra, limit: int = 2_000_000):
    """All homomorphisms by trying every map; only for tiny algebras."""
    if B.size ** A.size > limit:
        raise CapExceeded("too many maps for exhaustive enumeration",
                          maps=B.size ** A.size)
    out = []
    for m in itertools.product(range(B.size), repeat=A.size):
        if is_homomorphism(A, B, m):
            out.append(Homomorphism(A, B, tuple(m)))
    return out
