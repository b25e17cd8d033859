"""Finitely generated (quasi)varieties: free algebras, membership, SI members,
finitely presented algebras, unifiability and membership in Q(F)."""
from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .congruence import (Congruence, all_congruences, congruence_generated,
                         is_relative_si, is_subdirectly_irreducible)
from .errors import AlgebraError, CapExceeded, PreconditionError, SignatureMismatch
from .finalg.algebra import FiniteAlgebra, Homomorphism, load_algebra
from .finalg.constructions import Subalgebra, quotient, subuniverse
from .finalg.search import extend_map, generating_set, homs, is_isomorphic, iter_homs
from .finalg.terms import QuasiIdentity, eval_term, expand

YES, NO, INCONCLUSIVE = "YES", "NO", "INCONCLUSIVE"


@dataclass(frozen=True)
class Caps:
    rank_max: int = 2
    size_max: int = 4096
    time_budget: float | None = None

    def __post_init__(self):
        if self.rank_max < 0 or self.size_max < 1:
            raise PreconditionError("caps must be positive")
        if self.time_budget is not None and self.time_budget <= 0:
            raise PreconditionError("time budget must be positive")

    @classmethod
    def from_env(cls, **overrides) -> "Caps":
        vals = {}
        env = os.environ
        if "ASCTOOL_RANK_MAX" in env:
            vals["rank_max"] = int(env["ASCTOOL_RANK_MAX"])
        if "ASCTOOL_SIZE_MAX" in env:
            vals["size_max"] = int(env["ASCTOOL_SIZE_MAX"])
        if "ASCTOOL_TIME_BUDGET" in env:
            vals["time_budget"] = float(env["ASCTOOL_TIME_BUDGET"])
        vals.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**vals)

    def deadline(self) -> float | None:
        if self.time_budget is None:
            return None
        return time.monotonic() + self.time_budget

    def to_json(self) -> dict:
        return {"rank_max": self.rank_max, "size_max": self.size_max,
                "time_budget": self.time_budget}


def _is_lattice_based(A: FiniteAlgebra) -> bool:
    if not all(op in A.signature for op in ("join", "meet")):
        return False
    from .catalog import LATTICE_LAWS
    from .finalg.terms import check_identity
    laws = {k: v for k, v in LATTICE_LAWS.items() if k not in ("bottom", "top")}
    return all(check_identity(A, law)[0] for law in laws.values())


@dataclass
class VarietySpec:
    """A finite set ``K`` of finite algebras with a mode and resource caps."""

    generators: list
    mode: str = "variety"
    caps: Caps = field(default_factory=Caps)
    congruence_distributive: bool | None = None
    name: str | None = None

    def __post_init__(self):
        if not self.generators:
            raise PreconditionError("a variety spec needs at least one generator")
        sig = self.generators[0].signature
        for B in self.generators[1:]:
            if B.signature != sig:
                raise SignatureMismatch("generators have different signatures")
        if self.mode not in ("variety", "quasivariety"):
            raise PreconditionError(f"unknown mode {self.mode!r}")
        if self.congruence_distributive is None:
            # lattice reducts give congruence distributivity
            self.congruence_distributive = all(_is_lattice_based(B) for B in self.generators)

    @property
    def signature(self):
        return self.generators[0].signature

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        return "{" + ",".join(B.name or "?" for B in self.generators) + "}"

    def with_mode(self, mode: str) -> "VarietySpec":
        return replace(self, mode=mode)

    def key(self) -> tuple:
        return tuple(B.key() for B in self.generators)


def resolve_algebra_ref(ref: str, base: Path | None = None) -> FiniteAlgebra:
    """Load an algebra from a path, a ``catalog:NAME`` reference or a bare catalog name."""
    from . import catalog
    if ref.startswith("catalog:"):
        return catalog.get(ref.split(":", 1)[1])
    p = Path(ref)
    if not p.is_absolute() and base is not None:
        p = base / p
    if p.exists():
        return load_algebra(p)
    stem = Path(ref).stem
    if stem in catalog.BUILDERS:
        return catalog.get(stem)
    raise AlgebraError(f"cannot find algebra {ref!r}")


def load_spec(path, caps: Caps | None = None) -> VarietySpec:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise AlgebraError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict) or "generators" not in data:
        raise AlgebraError(f"{path}: missing 'generators'")
    gens = [resolve_algebra_ref(r, path.parent) for r in data["generators"]]
    file_caps = data.get("caps") or {}
    if caps is None:
        caps = Caps.from_env(**{k: file_caps.get(k) for k in ("rank_max", "size_max", "time_budget")})
    return VarietySpec(gens, mode=data.get("mode", "variety"), caps=caps,
                       congruence_distributive=data.get("congruence_distributive"),
                       name=data.get("name"))


# -- free algebras -----------------------------------------------------------

class FreeAlgebra(FiniteAlgebra):
    """Free algebra of rank ``k`` for the class generated by ``spec.generators``.

    Element ``i`` is the term function whose values are ``provenance[i]``: one
    column per coordinate ``(j, c)``, meaning "generator algebra ``j`` at the
    assignment ``c``", listed by ``j`` and then ``c`` lexicographically.
    Elements are numbered by their provenance rows in lexicographic order.
    """

    def __init__(self, base: FiniteAlgebra, rank: int, generators, provenance, coordinates,
                 members, stats):
        super().__init__(base.signature, base.size, base.tables, name=base.name, validate=False)
        self.rank = rank
        self.generators = tuple(int(g) for g in generators)
        self.provenance = provenance
        self.coordinates = coordinates
        self.members = members
        self.stats = stats

    def evaluation(self, j: int, assignment) -> Homomorphism:
        """The hom onto generator algebra ``j`` sending ``g_i`` to ``assignment[i]``."""
        col = self.coordinates.index((j, tuple(int(a) for a in assignment)))
        return Homomorphism(self, self.members[j], tuple(int(v) for v in self.provenance[:, col]))

    def element_of(self, t) -> int:
        """Value of term ``t`` at the free generators."""
        return eval_term(self, t, self.generators)

    def to_json(self) -> dict:
        data = super().to_json()
        data["generators"] = list(self.generators)
        return data


_FREE_CACHE: dict = {}


def _row_dtype(members):
    return np.uint8 if max(B.size for B in members) <= 256 else np.dtype(">u2")


def _keys(rows: np.ndarray) -> np.ndarray:
    rows = np.ascontiguousarray(rows)
    return rows.view(np.dtype((np.void, rows.dtype.itemsize * rows.shape[1]))).ravel()


def _prune_coordinates(members, k, deadline):
    """Coordinates whose values are not determined by an earlier kept coordinate.

    Coordinate ``(j, c)`` is determined by ``(j', c')`` when sending ``c'`` to
    ``c`` extends to a hom from the subalgebra generated by ``c'``. Coordinates
    are visited by decreasing size of the generated subalgebra.
    """
    coords = []
    for j, B in enumerate(members):
        for c in np.ndindex(*([B.size] * k)):
            coords.append((j, tuple(int(x) for x in c)))
    info = []
    for j, c in coords:
        B = members[j]
        if k == 0 and not B.signature.constants:
            raise PreconditionError("rank 0 free algebra needs constants in the signature")
        sub = Subalgebra(B, subuniverse(B, c))
        local = np.searchsorted(sub.universe, np.asarray(c, dtype=np.int64))
        info.append((j, c, sub, [int(x) for x in local]))
    order = sorted(range(len(coords)), key=lambda i: (-info[i][2].size, i))
    kept = []
    derived = {}          # coordinate -> (kept coordinate, hom from its subalgebra)
    for i in order:
        j, c, sub, local = info[i]
        hit = None
        for kk in kept:
            if deadline is not None and time.monotonic() > deadline:
                raise CapExceeded("time budget exhausted while building a free algebra")
            jj, cc, ssub, llocal = info[kk]
            if ssub.size < sub.size:
                continue
            h = extend_map(ssub, members[j], llocal, c) if ssub.signature == members[j].signature else None
            if h is not None:
                hit = (kk, h)
                break
        if hit is None:
            kept.append(i)
        else:
            derived[i] = hit
    kept.sort()
    return coords, info, kept, derived


def _close(members, kept_info, k, caps, deadline, dtype):
    """Generate the subalgebra of the product of the kept coordinates."""
    sig = members[0].signature
    cols = [members[j] for j, _, _, _ in kept_info]
    d = len(cols)
    start_rows = []
    for i in range(k):
        start_rows.append([c[i] for _, c, _, _ in kept_info])
    for op in sig.constants:
        start_rows.append([int(B.tables[op]) for B in cols])
    rows = np.array(start_rows, dtype=np.int64).reshape(-1, d)
    rows = np.unique(rows.astype(dtype), axis=0).astype(np.int64) if len(rows) else rows
    if len(rows) == 0:
        raise PreconditionError("empty free algebra: rank 0 without constants")
    all_rows = rows
    frontier = rows
    ops = [(op, a) for op, a in sig if a > 0]
    tabs = {op: [B.tables[op] for B in cols] for op, _ in ops}

    def apply(op, arity, args):
        out = np.empty((len(args[0]), d), dtype=np.int64)
        for col, T in enumerate(tabs[op]):
            out[:, col] = T[tuple(a[:, col] for a in args)]
        return out

    have = np.sort(_keys(all_rows.astype(dtype)))
    while len(frontier):
        old_n = len(all_rows) - len(frontier)
        round_rows = []
        round_keys = np.empty(0, dtype=have.dtype)
        count = len(all_rows)

        def absorb(out):
            nonlocal round_keys, count
            out = out.astype(dtype)
            keys = _keys(out)
            uniq, first = np.unique(keys, return_index=True)
            fresh = ~np.isin(uniq, have) & ~np.isin(uniq, round_keys)
            if fresh.any():
                round_rows.append(out[first[fresh]].astype(np.int64))
                round_keys = np.concatenate([round_keys, uniq[fresh]])
                count += int(fresh.sum())
                if count > caps.size_max:
                    raise CapExceeded(f"free algebra exceeds size cap {caps.size_max}",
                                      size_reached=count, size_max=caps.size_max)

        for op, arity in ops:
            if arity == 1:
                absorb(apply(op, 1, [frontier]))
                continue
            # tuples with a frontier element at position p, older elements before it
            for p in range(arity):
                lens = [old_n] * p + [len(frontier)] + [len(all_rows)] * (arity - p - 1)
                total = int(np.prod(lens))
                if total == 0:
                    continue
                chunk = max(1, (1 << 20) // max(1, d))
                for s in range(0, total, chunk):
                    if deadline is not None and time.monotonic() > deadline:
                        raise CapExceeded("time budget exhausted while building a free algebra",
                                          size_reached=count)
                    idx = np.unravel_index(np.arange(s, min(total, s + chunk)), lens)
                    args = [frontier[idx[q]] if q == p else all_rows[idx[q]]
                            for q in range(arity)]
                    absorb(apply(op, arity, args))
        if not round_rows:
            break
        frontier = np.concatenate(round_rows)
        all_rows = np.concatenate([all_rows, frontier])
        have = np.sort(np.concatenate([have, round_keys]))
    return all_rows


def free_algebra(K: VarietySpec, k: int, caps: Caps | None = None) -> FreeAlgebra:
    """Free algebra of rank ``k``: the subalgebra of the product of all
    generator algebras over all assignments of ``k`` variables, generated by the
    projection tuples."""
    caps = caps or K.caps
    if k < 0:
        raise PreconditionError("rank must be nonnegative")
    if k > caps.rank_max:
        raise CapExceeded(f"rank {k} above rank_max {caps.rank_max}", rank=k,
                          rank_max=caps.rank_max)
    key = (K.key(), k)
    hit = _FREE_CACHE.get(key)
    if hit is not None:
        if hit.size > caps.size_max:
            raise CapExceeded(f"free algebra exceeds size cap {caps.size_max}",
                              size_reached=hit.size, size_max=caps.size_max)
        return hit
    members = list(K.generators)
    if k == 0 and not K.signature.constants:
        raise PreconditionError("rank 0 free algebra needs constants in the signature")
    deadline = caps.deadline()
    t0 = time.monotonic()
    dtype = _row_dtype(members)
    coords, info, kept, derived = _prune_coordinates(members, k, deadline)
    kept_info = [info[i] for i in kept]
    rows = _close(members, kept_info, k, caps, deadline, dtype)
    n = len(rows)

    # full provenance, reconstructing pruned coordinates through their homs
    prov = np.empty((n, len(coords)), dtype=np.int64)
    kept_pos = {i: p for p, i in enumerate(kept)}
    for p, i in enumerate(kept):
        prov[:, i] = rows[:, p]
    for i, (kk, h) in derived.items():
        src_sub = info[kk][2]
        local = np.searchsorted(src_sub.universe, rows[:, kept_pos[kk]])
        prov[:, i] = np.asarray(h.map, dtype=np.int64)[local]
    order = np.argsort(_keys(prov.astype(dtype)), kind="stable")
    prov = prov[order]
    rows = rows[order]

    # a separating subset of kept coordinates, for lookups by code
    sep = _separating_columns(rows, [members[info[i][0]].size for i in kept])
    radix = [members[info[kept[c]][0]].size for c in sep]
    codes = _codes(rows[:, sep], radix)
    sorter = np.argsort(codes)
    sorted_codes = codes[sorter]

    def lookup(result_rows):
        c = _codes(result_rows[:, sep], radix)
        pos = np.searchsorted(sorted_codes, c)
        return sorter[pos]

    sig = K.signature
    tables = {}
    for op, arity in sig:
        cols = [members[info[i][0]].tables[op] for i in kept]
        if arity == 0:
            row = np.array([[int(T) for T in cols]])
            tables[op] = np.array(int(lookup(row)[0]))
            continue
        total = n ** arity
        flat = np.empty(total, dtype=np.int64)
        chunk = max(1, (1 << 21) // max(1, len(sep)))
        for s in range(0, total, chunk):
            idx = np.unravel_index(np.arange(s, min(total, s + chunk)), (n,) * arity)
            res = np.empty((len(idx[0]), len(sep)), dtype=np.int64)
            for ci, c in enumerate(sep):
                T = cols[c]
                res[:, ci] = T[tuple(rows[a, c] for a in idx)]
            flat[s:s + len(idx[0])] = lookup_codes(res, radix, sorted_codes, sorter)
        tables[op] = flat.reshape((n,) * arity)

    gen_rows = np.array([[info[i][1][g] for i in kept] for g in range(k)],
                        dtype=np.int64).reshape(k, len(kept))
    gens = [int(lookup(gen_rows[g:g + 1])[0]) for g in range(k)]
    label = f"F{K.label}({k})"
    base = FiniteAlgebra(sig, n, tables, name=label, validate=False)
    stats = {"size": n, "coordinates": len(coords), "kept_coordinates": len(kept),
             "seconds": round(time.monotonic() - t0, 3)}
    F = FreeAlgebra(base, k, gens, prov, coords, members, stats)
    _FREE_CACHE[key] = F
    return F


def lookup_codes(res, radix, sorted_codes, sorter):
    c = _codes(res, radix)
    return sorter[np.searchsorted(sorted_codes, c)]


def _codes(rows: np.ndarray, radix) -> np.ndarray:
    out = np.zeros(len(rows), dtype=np.int64)
    for c, r in enumerate(radix):
        out = out * r + rows[:, c]
    return out


def _separating_columns(rows: np.ndarray, sizes) -> list[int]:
    """Greedy set of columns on which all rows differ, with codes fitting in int64."""
    n = len(rows)
    chosen: list[int] = []
    budget = 62.0
    labels = np.zeros(n, dtype=np.int64)
    while len(np.unique(labels)) < n:
        best, best_cnt = None, -1
        for c in range(rows.shape[1]):
            if c in chosen:
                continue
            cnt = len(np.unique(labels * sizes[c] + rows[:, c]))
            if cnt > best_cnt:
                best, best_cnt = c, cnt
        chosen.append(best)
        budget -= np.log2(max(2, sizes[best]))
        if budget < 0:
            raise CapExceeded("free algebra too large to index")
        _, labels = np.unique(labels * sizes[best] + rows[:, best], return_inverse=True)
        labels = labels.reshape(-1)
    return chosen or [0]


def clear_free_cache():
    _FREE_CACHE.clear()


# -- membership --------------------------------------------------------------

@dataclass
class Result:
    """Three-valued answer with a witness and resource statistics."""

    status: str
    witness: dict = field(default_factory=dict)
    explored: dict = field(default_factory=dict)

    def __bool__(self):
        return self.status == YES

    def to_json(self) -> dict:
        return {"status": self.status, "witness": self.witness, "explored": self.explored}


def separating_family(A: FiniteAlgebra, targets: Sequence[FiniteAlgebra], deadline=None,
                      try_embedding: bool = True):
    """Homs from ``A`` into ``targets`` separating all pairs, or the first pair left unseparated.

    Returns ``(family, None)`` or ``(family_so_far, (a, b))``.
    """
    n = A.size
    unsep = np.triu(np.ones((n, n), dtype=bool), 1)
    family: list[Homomorphism] = []
    if try_embedding:
        for B in targets:
            e = homs(A, B, "injective", deadline=deadline)
            if e is not None:
                return [e], None
    for B in targets:
        if not unsep.any():
            break
        for h in iter_homs(A, B, "all", deadline=deadline):
            m = np.asarray(h.map)
            sep = m[:, None] != m[None, :]
            if (sep & unsep).any():
                family.append(h)
                unsep &= ~sep
                if not unsep.any():
                    break
    if unsep.any():
        a, b = (int(v) for v in np.argwhere(unsep)[0])
        return family, (a, b)
    return family, None


def in_quasivariety(A: FiniteAlgebra, K: VarietySpec | Sequence[FiniteAlgebra], deadline=None) -> Result:
    members = list(getattr(K, "generators", K))
    if A.size == 1:
        return Result(YES, {"reason": "trivial algebra"})
    fam, bad = separating_family(A, members, deadline=deadline)
    if bad is None:
        return Result(YES, {"family": [_hom_json(h) for h in fam]})
    return Result(NO, {"unseparated_pair": list(bad)})


def _hom_json(h: Homomorphism) -> dict:
    return {"target": h.target.name, "map": list(h.map)}


def in_variety(A: FiniteAlgebra, K: VarietySpec, caps: Caps | None = None) -> Result:
    """``A`` is a homomorphic image of the free algebra on ``m`` generators, where
    ``m`` is the size of a generating set of ``A``."""
    caps = caps or K.caps
    if A.size == 1:
        return Result(YES, {"reason": "trivial algebra"})
    if A.signature != K.signature:
        raise SignatureMismatch("algebra and variety have different signatures")
    gens = generating_set(A)
    m = len(gens)
    try:
        F = free_algebra(K, m, caps)
    except CapExceeded as exc:
        return Result(INCONCLUSIVE, {"reason": str(exc)}, {"rank": m, **exc.stats})
    h = extend_map(F, A, F.generators, gens)
    explored = {"rank": m, "free_sizes": [F.size]}
    if h is None:
        return Result(NO, {"generators": gens, "reason": "free generators cannot map onto them"},
                      explored)
    return Result(YES, {"generators": gens, "surjection": list(h.map)}, explored)


# -- SI members --------------------------------------------------------------

def subuniverses(B: FiniteAlgebra) -> list[np.ndarray]:
    """All nonempty subuniverses of ``B``."""
    seen = {}
    start = []
    if B.signature.constants:
        start.append(subuniverse(B, []))
    else:
        start = [subuniverse(B, [x]) for x in range(B.size)]
    work = list(start)
    for s in start:
        seen[s.tobytes()] = s
    while work:
        s = work.pop()
        inside = set(s.tolist())
        for x in range(B.size):
            if x in inside:
                continue
            t = subuniverse(B, list(s) + [x])
            if t.tobytes() not in seen:
                seen[t.tobytes()] = t
                work.append(t)
    return sorted(seen.values(), key=lambda s: (len(s), s.tolist()))


def _dedupe(algebras):
    algebras = sorted(algebras, key=lambda A: A.sort_key())
    out = []
    for A in algebras:
        if not any(is_isomorphic(A, B) is not None for B in out):
            out.append(A)
    return out


def si_members(K: VarietySpec, size_cap: int | None = None) -> list[FiniteAlgebra]:
    """SI algebras of the (quasi)variety up to isomorphism, sorted by (size, tables).

    Variety mode lists the SI members of HS(K), which under congruence
    distributivity are all SI members of V(K). Quasivariety mode lists the
    relatively SI members of S(K).
    """
    cap = size_cap or max(B.size for B in K.generators)
    found = []
    if K.mode == "variety":
        if not K.congruence_distributive:
            raise PreconditionError(
                "SI enumeration in variety mode needs congruence distributivity")
        for B in K.generators:
            for su in subuniverses(B):
                S = Subalgebra(B, su)
                for th in all_congruences(S):
                    if th.num_blocks < 2 or th.num_blocks > cap:
                        continue
                    Q, _ = quotient(S, th)
                    if is_subdirectly_irreducible(Q) is not None:
                        found.append(Q)
    else:
        for B in K.generators:
            for su in subuniverses(B):
                if len(su) < 2 or len(su) > cap:
                    continue
                S = Subalgebra(B, su)
                ok, _ = is_relative_si(S, K.generators)
                if ok:
                    found.append(S)
    out = _dedupe(found)
    return [_name_si(S, K) for S in out]


def _name_si(S: FiniteAlgebra, K: VarietySpec) -> FiniteAlgebra:
    from . import catalog
    for B in K.generators:
        if B.size == S.size and is_isomorphic(S, B) is not None:
            return S.renamed(B.name or "?")
    for name in catalog.BUILDERS:
        C = catalog.get(name)
        if C.signature == S.signature and C.size == S.size and is_isomorphic(S, C) is not None:
            return S.renamed(name)
    return S.renamed(f"SI{S.size}")


# -- presentations -----------------------------------------------------------

@dataclass(frozen=True)
class FinitePresentation:
    k: int
    relations: tuple

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple(tuple(r) for r in self.relations))
        from .finalg.terms import variables
        for s, t in self.relations:
            for i in variables(s) | variables(t):
                if i >= self.k:
                    raise PreconditionError(f"variable v{i} out of range for rank {self.k}")

    @classmethod
    def from_premise(cls, q: QuasiIdentity) -> "FinitePresentation":
        return cls(q.nvars, q.premise)


@dataclass
class Presented:
    algebra: FiniteAlgebra
    generators: tuple
    free: FreeAlgebra
    theta: Congruence
    natural: Homomorphism


def relation_pairs(F: FreeAlgebra, relations):
    return [(F.element_of(expand(s, F.signature)), F.element_of(expand(t, F.signature)))
            for s, t in relations]


def free_kernels(F: FreeAlgebra) -> list[Congruence]:
    """Kernels of all homs from ``F`` into generator algebras (the provenance columns)."""
    seen = {}
    for col in range(F.provenance.shape[1]):
        c = Congruence(F, F.provenance[:, col])
        seen.setdefault(c.key(), c)
    return list(seen.values())


def finitely_presented(K: VarietySpec, pres: FinitePresentation, caps: Caps | None = None) -> Presented:
    """``F(k)`` modulo the (relative) congruence generated by the relations."""
    caps = caps or K.caps
    F = free_algebra(K, pres.k, caps)
    pairs = relation_pairs(F, pres.relations)
    if K.mode == "variety":
        theta = congruence_generated(F, pairs)
    else:
        theta = Congruence.total(F)
        for c in free_kernels(F):
            if all(c.related(a, b) for a, b in pairs):
                theta = theta.meet(c)
    P, nat = quotient(F, theta, name=f"P{pres.k}")
    gens = tuple(int(nat.map[g]) for g in F.generators)
    return Presented(P, gens, F, theta, nat)


def unifiable(P: FiniteAlgebra, K: VarietySpec, caps: Caps | None = None) -> Result:
    """Is there a hom from ``P`` into a free algebra of ``K``?

    With constants, ``F(0)`` is a retract of every ``F(k)``, so it suffices to
    search ``P -> F(0)``; otherwise ranks ``1 .. rank_max`` are tried.
    """
    caps = caps or K.caps
    deadline = caps.deadline()
    if K.signature.constants:
        F0 = free_algebra(K, 0, caps)
        h = homs(P, F0, "any", deadline=deadline)
        explored = {"rank": 0, "free_sizes": [F0.size]}
        if h is None:
            return Result(NO, {"reason": "no homomorphism into F(0), a retract of every F(k)",
                               "F0_size": F0.size}, explored)
        return Result(YES, {"rank": 0, "unifier": list(h.map)}, explored)
    sizes = []
    for k in range(1, caps.rank_max + 1):
        try:
            F = free_algebra(K, k, caps)
        except CapExceeded as exc:
            return Result(INCONCLUSIVE, {"reason": str(exc)}, {"rank": k - 1, "free_sizes": sizes})
        sizes.append(F.size)
        h = homs(P, F, "any", deadline=deadline)
        if h is not None:
            return Result(YES, {"rank": k, "unifier": list(h.map)}, {"rank": k, "free_sizes": sizes})
    return Result(INCONCLUSIVE, {"reason": f"no unifier up to rank {caps.rank_max}"},
                  {"rank": caps.rank_max, "free_sizes": sizes})


def in_QF(A: FiniteAlgebra, K: VarietySpec, rank_cap: int | None = None,
          caps: Caps | None = None) -> Result:
    """Is ``A`` in the quasivariety generated by the free algebras of ``K``?

    YES when homs into ``F(k)``, ``k <= rank_cap``, separate all pairs; NO when
    ``A`` has no hom into ``F(0)``, which is a retract of every ``F(k)``.
    """
    caps = caps or K.caps
    rank_cap = caps.rank_max if rank_cap is None else rank_cap
    deadline = caps.deadline()
    if A.size == 1:
        return Result(YES, {"reason": "trivial algebra"})
    sizes = []
    if K.signature.constants:
        F0 = free_algebra(K, 0, caps)
        if homs(A, F0, "any", deadline=deadline) is None:
            return Result(NO, {"certificate": "no-hom-to-F0",
                               "reason": "no homomorphism into F(0), a retract of every F(k)",
                               "F0_size": F0.size}, {"rank": 0, "free_sizes": [F0.size]})
    n = A.size
    unsep = np.triu(np.ones((n, n), dtype=bool), 1)
    family = []
    reason = None
    explored_rank = -1
    for k in range(0, rank_cap + 1):
        try:
            F = free_algebra(K, k, caps)
        except (CapExceeded, PreconditionError) as exc:
            if isinstance(exc, PreconditionError):
                continue
            reason = str(exc)
            break
        sizes.append(F.size)
        explored_rank = k
        try:
            e = homs(A, F, "injective", deadline=deadline)
            if e is not None:
                return Result(YES, {"embedding": {"rank": k, "map": list(e.map)}},
                              {"rank": k, "free_sizes": sizes})
            for h in iter_homs(A, F, "all", deadline=deadline):
                m = np.asarray(h.map)
                sep = m[:, None] != m[None, :]
                if (sep & unsep).any():
                    family.append({"rank": k, "map": list(h.map)})
                    unsep &= ~sep
                    if not unsep.any():
                        return Result(YES, {"family": family}, {"rank": k, "free_sizes": sizes})
        except CapExceeded as exc:
            reason = str(exc)
            break
    a, b = (int(v) for v in np.argwhere(unsep)[0])
    return Result(INCONCLUSIVE, {"reason": reason or f"pair {(a, b)} unseparated up to rank {explored_rank}",
                                 "unseparated_pair": [a, b]},
                  {"rank": explored_rank, "free_sizes": sizes})
