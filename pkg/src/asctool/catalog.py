"""Concrete algebras, finite posets, and the up-set / complex-algebra / open-element
correspondences between Heyting and closure algebras.

Boolean carriers are powersets encoded as bitmasks (element ``i`` is the set of
atoms whose bits are set), numbered ascending.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np

from .errors import AlgebraError, PreconditionError, SignatureMismatch
from .finalg.algebra import FiniteAlgebra, Signature
from .finalg.constructions import product
from .finalg.search import find_embedding
from .finalg.terms import app, check_identity, identity, mckinsey, var

CLOSURE = Signature([("zero", 0), ("one", 0), ("neg", 1), ("join", 2), ("meet", 2), ("dia", 1)])
LATTICE = Signature([("zero", 0), ("one", 0), ("join", 2), ("meet", 2)])
HEYTING = Signature([("zero", 0), ("one", 0), ("join", 2), ("meet", 2), ("imp", 2)])


# -- builders ----------------------------------------------------------------

def boolean_closure(natoms: int, dia, name=None) -> FiniteAlgebra:
    """Closure-signature algebra on the powerset of ``natoms`` atoms with the given ◇ table."""
    n = 1 << natoms
    full = n - 1
    x = np.arange(n)
    tables = {
        "zero": np.array(0), "one": np.array(full),
        "neg": full ^ x,
        "join": x[:, None] | x[None, :],
        "meet": x[:, None] & x[None, :],
        "dia": np.asarray(dia),
    }
    return FiniteAlgebra(CLOSURE, n, tables, name=name)


def lattice_from_order(leq: np.ndarray, signature=LATTICE, name=None, extra=None) -> FiniteAlgebra:
    """Bounded lattice (optionally with extra tables) from a reflexive order matrix."""
    leq = np.asarray(leq, dtype=bool)
    n = leq.shape[0]
    join = np.zeros((n, n), dtype=np.int64)
    meet = np.zeros((n, n), dtype=np.int64)
    below_count = leq.sum(axis=0)  # number of elements below each element
    for a in range(n):
        for b in range(n):
            ub = np.flatnonzero(leq[a] & leq[b])
            lb = np.flatnonzero(leq[:, a] & leq[:, b])
            j = [u for u in ub if leq[u, ub].all()]
            m = [l for l in lb if leq[lb, l].all()]
            if len(j) != 1 or len(m) != 1:
                raise AlgebraError("order is not a lattice")
            join[a, b], meet[a, b] = j[0], m[0]
    bottom = int(np.argmin(below_count))
    top = int(np.argmax(below_count))
    tables = {"zero": np.array(bottom), "one": np.array(top), "join": join, "meet": meet}
    if extra:
        tables.update(extra)
    return FiniteAlgebra(signature, n, tables, name=name)


def two(kind: str = "closure") -> FiniteAlgebra:
    """The two-element algebra as a closure algebra (◇ identity), bounded lattice or Heyting algebra."""
    if kind == "closure":
        return boolean_closure(1, [0, 1], name="2")
    if kind == "lattice":
        return lattice_from_order(np.array([[1, 1], [0, 1]]), name="2")
    if kind == "heyting":
        return upset_heyting(chain_poset(1)).renamed("2")
    raise ValueError(f"unknown kind {kind!r}")


def s_l(l: int) -> FiniteAlgebra:
    """Boolean algebra with ``l`` atoms whose only closed elements are 0 and 1."""
    if not isinstance(l, int) or l < 1:
        raise PreconditionError("s_l needs l >= 1")
    n = 1 << l
    dia = np.full(n, n - 1)
    dia[0] = 0
    return boolean_closure(l, dia, name=f"S{l}")


def four() -> FiniteAlgebra:
    """The 4-element closure algebra: 0, a (open, ◇a = 1), ¬a (closed), 1."""
    return boolean_closure(2, [0, 3, 2, 3], name="4")


def m3b() -> FiniteAlgebra:
    """M3 as a bounded lattice: bottom 0, three incomparable middles 1-3, top 4."""
    leq = np.eye(5, dtype=bool)
    leq[0, :] = True
    leq[:, 4] = True
    return lattice_from_order(leq, name="M3b")


def n5b() -> FiniteAlgebra:
    """N5 as a bounded lattice: 0 < 1 < 2 < 4 and 0 < 3 < 4, with 3 incomparable to 1, 2."""
    leq = np.eye(5, dtype=bool)
    for a, b in [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 4), (2, 4), (3, 4)]:
        leq[a, b] = True
    return lattice_from_order(leq, name="N5b")


def m_eight() -> FiniteAlgebra:
    """Eight-element closure algebra: atoms A, B, C with closed elements 0, A∨B, 1.

    ◇x = 0 for x = 0, A∨B for 0 < x ≤ A∨B, and 1 otherwise.
    """
    dia = [0 if x == 0 else (3 if x & 4 == 0 else 7) for x in range(8)]
    return boolean_closure(3, dia, name="M")


# -- posets ------------------------------------------------------------------

@dataclass(frozen=True)
class Poset:
    size: int
    lt: tuple = field(repr=False)

    def __init__(self, size: int, lt):
        lt = np.asarray(lt, dtype=bool)
        if lt.shape != (size, size):
            raise AlgebraError("poset relation has the wrong shape")
        if lt.diagonal().any():
            raise AlgebraError("strict order must be irreflexive")
        if (((lt.astype(int) @ lt.astype(int)) > 0) & ~lt).any():
            raise AlgebraError("strict order must be transitive")
        object.__setattr__(self, "size", int(size))
        object.__setattr__(self, "lt", tuple(tuple(bool(v) for v in row) for row in lt))

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.lt, dtype=bool).reshape(self.size, self.size)

    @property
    def leq(self) -> np.ndarray:
        return self.matrix | np.eye(self.size, dtype=bool)

    def to_json(self) -> dict:
        return {"size": self.size, "lt": [list(r) for r in self.lt]}

    @classmethod
    def from_json(cls, data) -> "Poset":
        try:
            return cls(int(data["size"]), data["lt"])
        except (KeyError, TypeError, ValueError) as exc:
            raise AlgebraError(f"malformed poset data: {exc}") from exc


def load_poset(path) -> Poset:
    with open(path) as fh:
        try:
            return Poset.from_json(json.load(fh))
        except json.JSONDecodeError as exc:
            raise AlgebraError(f"{path}: not valid JSON ({exc})") from exc


def lev_poset(n: int) -> Poset:
    """``2^n`` with the top removed; points are bitmasks ``0 .. 2^n - 2`` ordered by inclusion."""
    if not isinstance(n, int) or n < 1:
        raise PreconditionError("lev_poset needs n >= 1")
    pts = np.arange((1 << n) - 1)
    sub = (pts[:, None] & pts[None, :]) == pts[:, None]
    return Poset(len(pts), sub & (pts[:, None] != pts[None, :]))


def chain_poset(n: int) -> Poset:
    i = np.arange(n)
    return Poset(n, i[:, None] < i[None, :])


def antichain_poset(n: int) -> Poset:
    return Poset(n, np.zeros((n, n), dtype=bool))


def _masks(P: Poset):
    leq = P.leq
    up = [sum(1 << q for q in range(P.size) if leq[p, q]) for p in range(P.size)]
    down = [sum(1 << q for q in range(P.size) if leq[q, p]) for p in range(P.size)]
    return up, down


def upset_heyting(P: Poset, name=None) -> FiniteAlgebra:
    """Heyting algebra of up-sets, numbered by ascending bitmask."""
    up, _ = _masks(P)
    full = (1 << P.size) - 1
    ups = [s for s in range(1 << P.size)
           if all(up[p] & ~s == 0 for p in range(P.size) if s >> p & 1)]
    index = {s: i for i, s in enumerate(ups)}
    n = len(ups)
    join = np.zeros((n, n), dtype=np.int64)
    meet = np.zeros((n, n), dtype=np.int64)
    imp = np.zeros((n, n), dtype=np.int64)
    for i, a in enumerate(ups):
        for j, b in enumerate(ups):
            join[i, j] = index[a | b]
            meet[i, j] = index[a & b]
            # p is in a => b iff every q >= p in a lies in b
            c = sum(1 << p for p in range(P.size) if up[p] & a & ~b == 0)
            imp[i, j] = index[c]
    tables = {"zero": np.array(index[0]), "one": np.array(index[full]),
              "join": join, "meet": meet, "imp": imp}
    return FiniteAlgebra(HEYTING, n, tables, name=name)


def complex_closure(P: Poset, name=None) -> FiniteAlgebra:
    """Closure algebra of all subsets of ``P``; ◇X is the down-closure of X."""
    _, down = _masks(P)
    n = 1 << P.size
    dia = np.zeros(n, dtype=np.int64)
    for s in range(n):
        d = 0
        for p in range(P.size):
            if s >> p & 1:
                d |= down[p]
        dia[s] = d
    A = boolean_closure(P.size, dia, name=name)
    rep = classify(A)
    if not rep.flags["is_closure"]:
        raise AlgebraError("complex algebra failed the closure-algebra check")
    return A


def box_table(A: FiniteAlgebra) -> np.ndarray:
    neg, dia = A.tables["neg"], A.tables["dia"]
    return neg[dia[neg]]


def open_elements(A: FiniteAlgebra) -> np.ndarray:
    return np.flatnonzero(box_table(A) == np.arange(A.size))


def open_heyting(M: FiniteAlgebra, name=None) -> FiniteAlgebra:
    """Heyting algebra of open elements, with a ⇒ b = □(¬a ∨ b)."""
    rep = classify(M)
    if not rep.flags["is_closure"]:
        raise PreconditionError("open_heyting needs a closure algebra")
    box = box_table(M)
    opens = open_elements(M)
    index = {int(e): i for i, e in enumerate(opens)}
    sub = np.ix_(opens, opens)
    look = np.vectorize(lambda e: index[int(e)])
    neg, join = M.tables["neg"], M.tables["join"]
    imp = box[join[np.ix_(neg[opens], opens)]]
    tables = {"zero": np.array(index[M.const("zero")]), "one": np.array(index[M.const("one")]),
              "join": look(M.tables["join"][sub]), "meet": look(M.tables["meet"][sub]),
              "imp": look(imp)}
    return FiniteAlgebra(HEYTING, len(opens), tables, name=name)


# -- classification ----------------------------------------------------------

X, Y, Z = var(0), var(1), var(2)


def _leq(a, b):
    return identity(app("meet", a, b), a, 3)


LATTICE_LAWS = {
    "join-assoc": identity(app("join", X, app("join", Y, Z)), app("join", app("join", X, Y), Z), 3),
    "meet-assoc": identity(app("meet", X, app("meet", Y, Z)), app("meet", app("meet", X, Y), Z), 3),
    "join-comm": identity(app("join", X, Y), app("join", Y, X), 2),
    "meet-comm": identity(app("meet", X, Y), app("meet", Y, X), 2),
    "absorb-1": identity(app("join", X, app("meet", X, Y)), X, 2),
    "absorb-2": identity(app("meet", X, app("join", X, Y)), X, 2),
    "bottom": identity(app("meet", X, app("zero")), app("zero"), 1),
    "top": identity(app("join", X, app("one")), app("one"), 1),
}
DISTRIBUTIVE = identity(app("meet", X, app("join", Y, Z)),
                        app("join", app("meet", X, Y), app("meet", X, Z)), 3)
BOOLEAN_LAWS = {
    "complement-join": identity(app("join", X, app("neg", X)), app("one"), 1),
    "complement-meet": identity(app("meet", X, app("neg", X)), app("zero"), 1),
}
MODAL_LAWS = {
    "dia-zero": identity(app("dia", app("zero")), app("zero"), 0),
    "dia-join": identity(app("dia", app("join", X, Y)), app("join", app("dia", X), app("dia", Y)), 2),
}
CLOSURE_LAWS = {
    "extensive": identity(app("join", X, app("dia", X)), app("dia", X), 1),
    "idempotent": identity(app("dia", app("dia", X)), app("dia", X), 1),
}
MONADIC_LAW = identity(app("dia", app("box", X)), app("box", X), 1)


def _first_failure(A, laws):
    for name, law in laws.items():
        ok, w = check_identity(A, law)
        if not ok:
            return {"law": name, "assignment": list(w)}
    return None


def _heyting_failure(A):
    meet, imp = A.tables["meet"], A.tables["imp"]
    n = A.size
    le = meet == np.arange(n)[:, None]  # le[x, y] iff x ∧ y = x
    # a ∧ c ≤ b  <=>  c ≤ a ⇒ b
    lhs = le[meet[:, None, :], np.arange(n)[None, :, None]]      # [a, b, c]
    rhs = le[np.arange(n)[None, None, :], imp[:, :, None]]
    bad = np.argwhere(lhs != rhs)
    if bad.size:
        a, b, c = (int(v) for v in bad[0])
        return {"law": "residuation", "assignment": [a, b, c]}
    return None


@dataclass
class AlgebraKindReport:
    flags: dict
    witnesses: dict

    def to_json(self) -> dict:
        return {"flags": dict(sorted(self.flags.items())),
                "witnesses": dict(sorted(self.witnesses.items()))}


def _has(A, names):
    return all(n in A.signature for n in names)


def contains_four_scan(A: FiniteAlgebra):
    """An open element d with d < ◇d = 1, or None; such d generates a copy of 4."""
    box, dia = box_table(A), A.tables["dia"]
    one = A.const("one")
    for d in range(A.size):
        if box[d] == d and d != one and dia[d] == one:
            return d
    return None


def classify(A: FiniteAlgebra) -> AlgebraKindReport:
    flags, wit = {}, {}
    if not _has(A, ["zero", "one", "join", "meet"]):
        raise SignatureMismatch("classify needs at least zero, one, join, meet")

    def record(flag, failure, prereq=True):
        if not prereq:
            flags[flag] = False
            wit[flag] = {"reason": "prerequisite failed"}
            return False
        flags[flag] = failure is None
        if failure is not None:
            wit[flag] = failure
        return failure is None

    lat = record("is_bounded_lattice", _first_failure(A, LATTICE_LAWS))
    dist = record("is_distributive", _first_failure(A, {"distributive": DISTRIBUTIVE}), lat)
    if "imp" in A.signature:
        record("is_heyting", _heyting_failure(A), lat)
    else:
        flags["is_heyting"] = False
        wit["is_heyting"] = {"reason": "no imp operation"}
    if "neg" in A.signature and "dia" in A.signature:
        boo = record("is_boolean", _first_failure(A, BOOLEAN_LAWS), dist)
        modal = record("is_modal", _first_failure(A, MODAL_LAWS), boo)
        clo = record("is_closure", _first_failure(A, CLOSURE_LAWS), modal)
        record("is_monadic", _first_failure(A, {"monadic": MONADIC_LAW}), clo)
        record("is_mckinsey", _first_failure(A, {"mckinsey": mckinsey()}), clo)
        if clo:
            d = contains_four_scan(A)
            flags["contains_four"] = d is not None
            if d is not None:
                wit["contains_four"] = {"d": d}
            e = find_embedding(s_l(2), A)
            flags["contains_s2"] = e is not None
            if e is not None:
                wit["contains_s2"] = {"embedding": list(e.map)}
    else:
        for f in ("is_boolean", "is_modal", "is_closure", "is_monadic", "is_mckinsey"):
            flags[f] = False
            wit[f] = {"reason": "no neg/dia operations"}
    return AlgebraKindReport(flags, wit)


# -- named catalog -----------------------------------------------------------

def two_sq_closure():
    return product([two(), two()], name="2^2")


def two_sq_heyting():
    return upset_heyting(antichain_poset(2), name="2^2")


def four_sq():
    return product([four(), four()], name="4^2")


def lev_heyting(n: int = 2):
    return upset_heyting(lev_poset(n), name=f"Lev{n}+")


def b_lev(n: int = 2):
    return complex_closure(lev_poset(n), name=f"B(Lev{n}+)")


BUILDERS = {
    "two": two,
    "two-lattice": lambda: two("lattice"),
    "two-heyting": lambda: two("heyting"),
    "s1": lambda: s_l(1),
    "s2": lambda: s_l(2),
    "s3": lambda: s_l(3),
    "four": four,
    "m3b": m3b,
    "n5b": n5b,
    "m8": m_eight,
    "two-sq": two_sq_closure,
    "two-sq-heyting": two_sq_heyting,
    "four-sq": four_sq,
    "lev2-heyting": lambda: lev_heyting(2),
    "b-lev2": lambda: b_lev(2),
}


@lru_cache(maxsize=None)
def _build(name: str) -> FiniteAlgebra:
    A = BUILDERS[name]()
    return A.renamed(name)


def get(name: str) -> FiniteAlgebra:
    """Catalog algebra by name (see ``BUILDERS``)."""
    if name not in BUILDERS:
        raise KeyError(f"unknown catalog algebra {name!r}; known: {sorted(BUILDERS)}")
    return _build(name)


def corpus_path(name: str):
    return resources.files("asctool") / "corpus" / f"{name}.json"


SPECS = {
    "monadic-s2": ["s2"],
    "closure-two": ["two"],
    "closure-four": ["four"],
    "closure-m8": ["m8"],
    "closure-blev2": ["b-lev2"],
    "closure-blev2-s2": ["b-lev2", "s2"],
    "lattice-two": ["two-lattice"],
    "lattice-m3b": ["m3b"],
    "lattice-n5b": ["n5b"],
    "heyting-lev2": ["lev2-heyting"],
}


def corpus_files() -> dict[str, str]:
    """File name -> text for the bundled corpus: algebras, variety specs, posets."""
    out = {}
    for name in sorted(BUILDERS):
        out[f"{name}.json"] = get(name).dumps() + "\n"
    for name, gens in sorted(SPECS.items()):
        data = {"generators": [f"{g}.json" for g in gens], "mode": "variety", "name": name}
        out[f"{name}.json"] = json.dumps(data, sort_keys=True) + "\n"
    for n in (1, 2, 3):
        out[f"lev{n}-poset.json"] = json.dumps(lev_poset(n).to_json(), sort_keys=True) + "\n"
    return out


def write_corpus(directory):
    from pathlib import Path
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    for fname, text in corpus_files().items():
        (d / fname).write_text(text)
