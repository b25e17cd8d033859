"""Decision procedures with machine-checkable certificates: (almost) structural
completeness, quasi-identity classification, ASC-core membership, the
McKinsey/S_2 splitting, free-algebra decomposition and non-embedding evidence."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import catalog
from .congruence import is_simple, is_subdirectly_irreducible
from .errors import CapExceeded, PreconditionError
from .finalg.algebra import FiniteAlgebra, is_homomorphism
from .finalg.constructions import ProductAlgebra, product
from .finalg.decompose import direct_decomposition
from .finalg.search import (brute_force_homs, extend_map, find_embedding, homs,
                            is_isomorphic)
from .finalg.terms import QuasiIdentity, check_quasi_identity, mckinsey
from .variety import (NO, YES, Caps, FinitePresentation, VarietySpec, finitely_presented,
                      free_algebra, in_QF, in_quasivariety, si_members)

HOLDS, FAILS, INCONCLUSIVE = "HOLDS", "FAILS", "INCONCLUSIVE"
EXIT_CODES = {HOLDS: 0, FAILS: 1, INCONCLUSIVE: 2}

CITATIONS = {
    "asc": "ASC criterion: with FMP and EDPRC and a finite simple C <= F, Q is ASC iff every "
           "finite relatively SI S satisfies S <= F or S x C <= F",
    "sfmp": "FMP and EDPRC yield the strong finite model property (soundness basis)",
    "sc": "SC criterion under EDPRC: Q is SC iff every finite relatively SI algebra is a "
          "subalgebra of F",
    "retract": "F(0) is a retract of every F(k): no hom A -> F(0) means no hom A -> F",
    "jit": "the top element is join-irreducible in free bounded lattices and in their "
           "ultrapowers",
    "lattices": "bounded lattices: V is SC iff V is ASC iff V satisfies distributivity",
    "passive": "q is passive iff q* = (forall x)(not phi(x)) holds in F iff P_phi admits no "
               "hom into F",
    "admissible": "q is admissible iff q holds in F",
    "ascc": "ASC core: ASCC(Q) = {A in Q | A x C in Q(F)}",
    "mckinsey": "closure algebras: S_2 not in U iff U satisfies mu(x) = (box dia x => dia box x) = 1",
    "sc-mckinsey": "for ASC varieties of closure algebras: SC iff S_2 not in U",
    "freedec": "F_V(k) = F_U(k) x G_W(k) for V = U v W, U McKinsey, W monadic, G_W(k) the "
               "product of the non-2 factors of F_W(k)",
    "heyting-2sq": "2^2 does not embed into the free algebra of V(2^2 + 1)",
    "closure-4sq": "4^2 does not embed into the free algebra of V(B(2^2 + 1), S_2)",
}


@dataclass
class Verdict:
    status: str
    certificates: list = field(default_factory=list)
    explored: dict = field(default_factory=lambda: {"rank": -1, "free_sizes": []})
    citations: list = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def find(self, kind: str) -> list[dict]:
        return [c for c in self.certificates if c.get("kind") == kind]

    def to_json(self) -> dict:
        return {"status": self.status, "certificates": self.certificates,
                "explored": self.explored, "citations": [CITATIONS[c] for c in self.citations]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)


class _Explored:
    def __init__(self):
        self.rank = -1
        self.sizes = {}

    def note(self, F):
        self.rank = max(self.rank, F.rank)
        self.sizes[F.rank] = F.size

    def to_json(self):
        return {"rank": self.rank, "free_sizes": [self.sizes[k] for k in sorted(self.sizes)]}


def _alg(A: FiniteAlgebra) -> dict:
    return A.to_json()


def _free(K, k, caps, ex: _Explored):
    F = free_algebra(K, k, caps)
    ex.note(F)
    return F


def constant_subalgebra(K: VarietySpec, caps: Caps, ex: _Explored):
    """C = F(0), required nonempty and simple."""
    if not K.signature.constants:
        raise PreconditionError("no constants: F(0) is empty, so C cannot be selected")
    C = _free(K, 0, caps, ex)
    if C.size < 2 or not is_simple(C):
        raise PreconditionError("F(0) is not a simple algebra; the criterion does not apply")
    return C


# -- refutation certificates ----------------------------------------------------

def _has_lattice_reduct(A):
    return all(op in A.signature for op in ("zero", "one", "join", "meet"))


def top_join_witness(A: FiniteAlgebra):
    """``(a, b)`` with ``a, b < 1`` and ``a ∨ b = 1``, or None."""
    one = A.const("one")
    J = A.tables["join"]
    for a in range(A.size):
        if a == one:
            continue
        for b in range(a, A.size):
            if b != one and J[a, b] == one:
                return (a, b)
    return None


def join_irreducible_top_certificate(S: FiniteAlgebra, K: VarietySpec, caps: Caps, ex: _Explored,
                                     with_c: FiniteAlgebra | None = None):
    """Certificate that neither ``S`` nor ``S x C`` embeds into any ultrapower of F.

    Needs bounded-lattice generators and is checked on F(k), k <= min(2, rank_max):
    their tops must be join-irreducible while those of ``S`` (and ``S x C``) are not.
    """
    if not _has_lattice_reduct(S):
        return None
    if not all(catalog.classify(B).flags.get("is_bounded_lattice") for B in K.generators):
        return None
    w = top_join_witness(S)
    if w is None:
        return None
    checks = []
    for k in range(0, min(2, caps.rank_max) + 1):
        try:
            F = _free(K, k, caps, ex)
        except CapExceeded:
            break
        fw = top_join_witness(F)
        if fw is not None:
            return None
        checks.append({"rank": k, "size": F.size, "top_join_irreducible": True})
    if not checks:
        return None
    cert = {"kind": "join-irreducible-top", "algebra": _alg(S), "witness": list(w),
            "free_checks": checks}
    if with_c is not None:
        P = product([S, with_c])
        cert["product_witness"] = list(top_join_witness(P))
    return cert


def no_hom_to_f0_certificate(S: FiniteAlgebra, K: VarietySpec, caps: Caps, ex: _Explored):
    if not K.signature.constants:
        return None
    F0 = _free(K, 0, caps, ex)
    if homs(S, F0, "any", deadline=caps.deadline()) is not None:
        return None
    return {"kind": "no-hom-to-F0", "algebra": _alg(S), "F0": _alg(F0)}


# -- ASC / SC -----------------------------------------------------------------

def _search_embedding(S, K, caps, ex, ranks):
    """First rank with ``S`` embedding into ``F(k)``; ``(cert, cap_note)``."""
    deadline = caps.deadline()
    for k in ranks:
        try:
            F = _free(K, k, caps, ex)
            e = find_embedding(S, F, deadline=deadline)
        except CapExceeded as exc:
            return None, f"rank {k}: {exc}"
        if e is not None:
            return {"rank": k, "map": list(e.map)}, None
    return None, None


def _ranks(caps):
    return range(1, caps.rank_max + 1) if caps.rank_max >= 1 else range(0, 1)


def _assumption_cert():
    return {"kind": "assumptions", "asserted": ["EDPRC", "FMP"],
            "note": "hypotheses of the finite criterion are taken as given; only local "
                    "finiteness of the explored ranks is checked"}


def asc_check(K: VarietySpec, caps: Caps | None = None) -> Verdict:
    caps = caps or K.caps
    ex = _Explored()
    C = constant_subalgebra(K, caps, ex)
    certs = [_assumption_cert()]
    status = HOLDS
    cites = ["asc", "sfmp"]
    for S in si_members(K):
        SC = product([S, C], name=f"{S.name}x{C.size}")
        found = None
        note = None
        deadline = caps.deadline()
        for k in _ranks(caps):
            try:
                F = _free(K, k, caps, ex)
                e = find_embedding(S, F, deadline=deadline)
                if e is not None:
                    found = {"kind": "embedding", "source": _alg(S), "rank": k, "map": list(e.map)}
                    break
                e = find_embedding(SC, F, deadline=deadline)
                if e is not None:
                    found = {"kind": "product-embedding", "source": _alg(SC), "factor": S.name,
                             "rank": k, "map": list(e.map)}
                    break
            except CapExceeded as exc:
                note = f"rank {k}: {exc}"
                break
        if found is not None:
            certs.append(found)
            continue
        ref = join_irreducible_top_certificate(S, K, caps, ex, with_c=C)
        if ref is not None:
            certs.append(ref)
            cites += ["jit", "lattices"]
            status = FAILS
            continue
        certs.append({"kind": "unresolved", "algebra": _alg(S),
                      "reason": note or f"no embedding of S or S x C up to rank {caps.rank_max}"})
        if status == HOLDS:
            status = INCONCLUSIVE
    return Verdict(status, certs, ex.to_json(), _dedupe_cites(cites))


def sc_check(K: VarietySpec, caps: Caps | None = None) -> Verdict:
    caps = caps or K.caps
    ex = _Explored()
    constant_subalgebra(K, caps, ex)
    certs = [_assumption_cert()]
    status = HOLDS
    cites = ["sc"]
    for S in si_members(K):
        found, note = _search_embedding(S, K, caps, ex, _ranks(caps))
        if found is not None:
            certs.append({"kind": "embedding", "source": _alg(S), **found})
            continue
        ref = no_hom_to_f0_certificate(S, K, caps, ex)
        if ref is not None:
            cites.append("retract")
        else:
            ref = join_irreducible_top_certificate(S, K, caps, ex)
            if ref is not None:
                cites += ["jit", "lattices"]
        if ref is not None:
            certs.append(ref)
            status = FAILS
            continue
        certs.append({"kind": "unresolved", "algebra": _alg(S),
                      "reason": note or f"no embedding up to rank {caps.rank_max}"})
        if status == HOLDS:
            status = INCONCLUSIVE
    return Verdict(status, certs, ex.to_json(), _dedupe_cites(cites))


def _dedupe_cites(cites):
    out = []
    for c in cites:
        if c not in out:
            out.append(c)
    return out


def ascc_membership(A: FiniteAlgebra, K: VarietySpec, caps: Caps | None = None) -> Verdict:
    """Is ``A x C`` in Q(F)?"""
    caps = caps or K.caps
    ex = _Explored()
    if in_quasivariety(A, K).status != YES:
        raise PreconditionError("the algebra is not in the quasivariety generated by K")
    C = constant_subalgebra(K, caps, ex)
    AC = product([A, C])
    res = in_QF(AC, K, caps.rank_max, caps)
    ex.rank = max(ex.rank, res.explored.get("rank", -1))
    for k, s in enumerate(res.explored.get("free_sizes", [])):
        ex.sizes.setdefault(k, s)
    cites = ["ascc"]
    if res.status == YES:
        cert = {"kind": "separating-family", "source": _alg(AC), **res.witness}
        return Verdict(HOLDS, [cert], ex.to_json(), cites)
    if res.status == NO:
        cert = {"kind": "no-hom-to-F0", "algebra": _alg(AC), "F0": _alg(C)}
        return Verdict(FAILS, [cert], ex.to_json(), cites + ["retract"])
    if K.congruence_distributive and A.size > 1 and is_subdirectly_irreducible(A) is not None:
        ref = join_irreducible_top_certificate(A, K, caps, ex, with_c=C)
        if ref is not None:
            ref["note"] = ("A is SI and C simple, so with congruence distributivity a separating "
                           "family for A x C would embed A or A x C into an ultrapower of F")
            return Verdict(FAILS, [ref], ex.to_json(), cites + ["jit"])
    cert = {"kind": "unresolved", "algebra": _alg(AC), **res.witness}
    return Verdict(INCONCLUSIVE, [cert], ex.to_json(), cites)


# -- quasi-identities -----------------------------------------------------------

@dataclass
class QiClassification:
    kind: str                       # VALID | ACTIVE | PASSIVE | NOT_ADMISSIBLE
    certificates: list
    explored: dict
    bounded: bool = False           # ACTIVE verdicts hold only up to the explored rank

    def to_json(self) -> dict:
        return {"classification": self.kind, "bounded": self.bounded,
                "certificates": self.certificates, "explored": self.explored}

    @property
    def status(self) -> str:
        if self.kind == "NOT_ADMISSIBLE":
            return FAILS
        if self.kind == "ACTIVE" and self.bounded:
            return INCONCLUSIVE
        return HOLDS


def classify_qi(q: QuasiIdentity, K: VarietySpec, caps: Caps | None = None) -> QiClassification:
    caps = caps or K.caps
    ex = _Explored()
    fails = []
    for B in K.generators:
        ok, w = check_quasi_identity(B, q)
        if not ok:
            fails.append({"generator": B.name, "assignment": list(w)})
    if not fails:
        return QiClassification("VALID", [{"kind": "valid-in-generators",
                                           "generators": [B.name for B in K.generators]}],
                                ex.to_json())
    certs = [{"kind": "fails-in-generator", **fails[0]}]
    # F(n), n = nvars(q), is always examined, even above rank_max; the size cap still applies
    caps = Caps(max(caps.rank_max, q.nvars), caps.size_max, caps.time_budget)
    unifier = None
    unifiable_known = False
    if K.signature.constants:
        F0 = _free(K, 0, caps, ex)
        try:
            pres = finitely_presented(K, FinitePresentation.from_premise(q), caps)
        except CapExceeded as exc:
            pres = None
            certs.append({"kind": "note", "reason": f"premise algebra not built: {exc}"})
        if pres is not None:
            P = pres.algebra
            h = homs(P, F0, "any", deadline=caps.deadline())
            unifiable_known = True
            if h is None:
                certs.append({"kind": "non-unifiable", "premise_algebra": _alg(P),
                              "F0": _alg(F0)})
                return QiClassification("PASSIVE", certs, ex.to_json())
            unifier = {"kind": "unifier", "premise_algebra": _alg(P), "rank": 0,
                       "map": list(h.map)}
    # q holds in F iff it holds in every F(k); look for the least failing rank
    ranks = list(range(0, caps.rank_max + 1))
    bounded = not unifiable_known
    for k in ranks:
        try:
            F = _free(K, k, caps, ex)
        except PreconditionError:
            continue
        except CapExceeded as exc:
            bounded = True
            certs.append({"kind": "cap", "rank": k, "reason": str(exc)})
            break
        ok, w = check_quasi_identity(F, q)
        if not ok:
            certs.append({"kind": "counterexample", "rank": k, "assignment": list(w)})
            return QiClassification("NOT_ADMISSIBLE", certs, ex.to_json())
    if unifier is not None:
        certs.append(unifier)
    certs.append({"kind": "holds-in-free", "up_to_rank": ex.rank})
    return QiClassification("ACTIVE", certs, ex.to_json(), bounded=bounded)


# -- McKinsey / S_2 splitting ------------------------------------------------------

def mckinsey_splitting(K: VarietySpec, check_asc: bool = False, caps: Caps | None = None) -> Verdict:
    """McKinsey identity on the generators versus S_2 in the variety."""
    caps = caps or K.caps
    for B in K.generators:
        if not catalog.classify(B).flags.get("is_closure"):
            raise PreconditionError(f"{B.name} is not a closure algebra")
    mu_fail = None
    for B in K.generators:
        ok, w = check_quasi_identity(B, mckinsey())
        if not ok:
            mu_fail = {"generator": B.name, "assignment": list(w)}
            break
    S2 = catalog.s_l(2)
    s2_hit = None
    for S in si_members(K.with_mode("variety")):
        iso = is_isomorphic(S2, S)
        if iso is not None:
            s2_hit = {"si_member": _alg(S), "iso": list(iso.map)}
            break
    report = {"kind": "mckinsey-splitting", "mckinsey_holds": mu_fail is None,
              "s2_present": s2_hit is not None,
              "biconditional": (mu_fail is None) == (s2_hit is None)}
    if mu_fail:
        report["mckinsey_counterexample"] = mu_fail
    if s2_hit:
        report["s2_witness"] = s2_hit
    certs = [report]
    cites = ["mckinsey"]
    if check_asc:
        a = asc_check(K, caps)
        s = sc_check(K, caps)
        certs.append({"kind": "sc-mckinsey", "asc": a.status, "sc": s.status,
                      "agrees": a.status != HOLDS or s.status == INCONCLUSIVE
                      or (s.status == HOLDS) == (mu_fail is None)})
        cites.append("sc-mckinsey")
    status = HOLDS if report["biconditional"] else FAILS
    return Verdict(status, certs, {"rank": -1, "free_sizes": []}, cites)


# -- free decomposition ---------------------------------------------------------

def decomposition_target(K_U: VarietySpec, K_W: VarietySpec, k: int, caps: Caps):
    """``F_V(k)`` for ``V = V(K_U ∪ K_W)`` and the product ``F_U(k) x G_W(k)``.

    ``G_W(k)`` keeps the directly indecomposable factors of ``F_W(k)`` that are
    not the two-element algebra. The product carries the images of the free
    generators (``g -> (g_U, g_G)``). Returns ``(F_V, T, images, (F_U, G, F_W, factors))``.
    """
    KV = VarietySpec(list(K_U.generators) + list(K_W.generators), caps=caps)
    FV = free_algebra(KV, k, caps)
    FU = free_algebra(K_U, k, caps)
    FW = free_algebra(K_W, k, caps)
    factors, dec = direct_decomposition(FW)
    two = catalog.two()
    keep = [i for i, Fa in enumerate(factors) if is_isomorphic(Fa, two) is None]
    G = ProductAlgebra([factors[i] for i in keep], signature=FW.signature, name="G_W")
    T = product([FU, G], name="F_U x G_W")
    coords = dec.target.coords
    gens_g = [G.index(coords[dec.map[g]][keep]) if keep else 0 for g in FW.generators]
    images = [T.index((gu, gg)) for gu, gg in zip(FU.generators, gens_g)]
    return FV, T, images, (FU, G, FW, factors)


def free_decomposition_check(K_U: VarietySpec, K_W: VarietySpec, k: int,
                             caps: Caps | None = None) -> Verdict:
    caps = caps or K_U.caps
    for B in K_U.generators:
        ok, w = check_quasi_identity(B, mckinsey())
        if not ok:
            raise PreconditionError(f"{B.name} fails the McKinsey identity")
    for B in K_W.generators:
        if not catalog.classify(B).flags.get("is_monadic"):
            raise PreconditionError(f"{B.name} is not monadic")
    if k > caps.rank_max:
        raise PreconditionError(f"rank {k} above rank_max {caps.rank_max}")
    ex = _Explored()
    try:
        FV, T, images, (FU, G, FW, factors) = decomposition_target(K_U, K_W, k, caps)
    except CapExceeded as exc:
        return Verdict(INCONCLUSIVE, [{"kind": "cap", "reason": str(exc), **exc.stats}],
                       ex.to_json(), ["freedec"])
    ex.note(FV)
    h = extend_map(FV, T, FV.generators, images)
    iso = h if h is not None and h.is_injective and h.is_surjective else is_isomorphic(FV, T)
    info = {"F_V": FV.size, "F_U": FU.size, "F_W": FW.size,
            "F_W_factors": [Fa.size for Fa in factors], "G_W": G.size}
    if iso is not None:
        cert = {"kind": "isomorphism", "rank": k, "sizes": info, "map": list(iso.map),
                "generator_images": images if iso is h else None}
        return Verdict(HOLDS, [cert], ex.to_json(), ["freedec"])
    return Verdict(FAILS, [{"kind": "not-isomorphic", "rank": k, "sizes": info}],
                   ex.to_json(), ["freedec"])


# -- non-embedding evidence ---------------------------------------------------------

SUITES = {
    "heyting-2sq": ("two-sq-heyting", ["lev2-heyting"]),
    "closure-4sq": ("four-sq", ["b-lev2", "s2"]),
}


def non_embedding(S: FiniteAlgebra, K: VarietySpec, k_max: int, caps: Caps | None = None,
                  cite: str | None = None) -> Verdict:
    """Search embeddings of ``S`` into ``F(k)``, ``k <= k_max``.

    HOLDS means none exists up to ``k_max`` (bounded evidence); FAILS reports
    an embedding; INCONCLUSIVE when a cap stopped the search.
    """
    caps = caps or K.caps
    caps = Caps(max(caps.rank_max, k_max), caps.size_max, caps.time_budget)
    ex = _Explored()
    cites = [cite] if cite else []
    deadline = caps.deadline()
    for k in range(1, k_max + 1):
        try:
            F = _free(K, k, caps, ex)
            e = find_embedding(S, F, deadline=deadline)
        except CapExceeded as exc:
            explored = ex.to_json()
            reached = exc.stats.get("size_reached")
            if reached:
                explored["free_sizes"] = explored["free_sizes"] + [reached]
            return Verdict(INCONCLUSIVE, [{"kind": "cap", "rank": k, "reason": str(exc)}],
                           explored, cites)
        if e is not None:
            return Verdict(FAILS, [{"kind": "embedding", "source": _alg(S), "rank": k,
                                    "map": list(e.map)}], ex.to_json(), cites)
    return Verdict(HOLDS, [{"kind": "no-embedding", "source": _alg(S), "up_to_rank": k_max,
                            "note": "bounded evidence: only ranks up to the stated one were searched"}],
                   ex.to_json(), cites)


def non_embedding_suite(name: str, caps: Caps | None = None, k: int | None = None) -> Verdict:
    if name not in SUITES:
        raise PreconditionError(f"unknown suite {name!r}; known: {sorted(SUITES)}")
    src, gens = SUITES[name]
    caps = caps or Caps.from_env()
    K = VarietySpec([catalog.get(g) for g in gens], caps=caps)
    return non_embedding(catalog.get(src), K, caps.rank_max if k is None else k, caps, cite=name)


# -- certificate re-verification -----------------------------------------------------

def verify_certificates(data: dict, K=None, caps: Caps | None = None) -> list[tuple[str, bool, str]]:
    """Re-check the certificates of a saved verdict without repeating searches
    for positive witnesses. ``K`` is the spec, or the pair ``(K_U, K_W)`` for a
    free-decomposition verdict. Returns ``(kind, ok, message)`` per certificate."""
    if caps is None:
        first = K[0] if isinstance(K, tuple) else K
        caps = first.caps if first is not None else Caps.from_env()
    out = []
    for cert in data.get("certificates", []):
        kind = cert.get("kind")
        try:
            ok, msg = _verify_one(cert, K, caps)
        except (PreconditionError, CapExceeded, KeyError, ValueError) as exc:
            ok, msg = False, f"could not verify: {exc}"
        out.append((kind, ok, msg))
    return out


def _need_spec(K):
    if K is None:
        raise PreconditionError("this certificate needs the variety spec (--spec)")
    return K


def _verify_one(cert, K, caps):
    kind = cert.get("kind")
    if kind in ("embedding", "product-embedding"):
        K = _need_spec(K)
        S = FiniteAlgebra.from_json(cert["source"])
        F = free_algebra(K, cert["rank"], Caps(max(caps.rank_max, cert["rank"]),
                                               caps.size_max, caps.time_budget))
        m = cert["map"]
        ok = is_homomorphism(S, F, m) and len(set(m)) == len(m)
        return ok, f"injective hom into F({cert['rank']})" if ok else "map is not an embedding"
    if kind == "no-hom-to-F0":
        S = FiniteAlgebra.from_json(cert["algebra"])
        F0 = FiniteAlgebra.from_json(cert["F0"])
        if K is not None:
            real = free_algebra(K, 0, caps)
            if real != F0:
                return False, "F(0) in certificate differs from the spec's F(0)"
        ok = _no_hom(S, F0)
        return ok, "no hom into F(0)" if ok else "a hom into F(0) exists"
    if kind == "non-unifiable":
        P = FiniteAlgebra.from_json(cert["premise_algebra"])
        F0 = FiniteAlgebra.from_json(cert["F0"])
        ok = _no_hom(P, F0)
        return ok, "premise algebra has no hom into F(0)" if ok else "a unifier exists"
    if kind == "unifier":
        P = FiniteAlgebra.from_json(cert["premise_algebra"])
        K = _need_spec(K)
        F0 = free_algebra(K, 0, caps)
        ok = is_homomorphism(P, F0, cert["map"])
        return ok, "unifier is a hom into F(0)" if ok else "unifier is not a hom"
    if kind == "join-irreducible-top":
        S = FiniteAlgebra.from_json(cert["algebra"])
        a, b = cert["witness"]
        one = S.const("one")
        ok = a != one and b != one and S.apply("join", a, b) == one
        if K is not None:
            for chk in cert["free_checks"]:
                F = free_algebra(K, chk["rank"], caps)
                ok = ok and top_join_witness(F) is None
        return ok, "top of S join-reducible, tops of F(k) join-irreducible" if ok else "witness invalid"
    if kind == "separating-family":
        K = _need_spec(K)
        A = FiniteAlgebra.from_json(cert["source"])
        maps = []
        if "embedding" in cert:
            maps.append(cert["embedding"])
        maps += cert.get("family", [])
        n = A.size
        unsep = np.triu(np.ones((n, n), dtype=bool), 1)
        for h in maps:
            F = free_algebra(K, h["rank"], caps)
            if not is_homomorphism(A, F, h["map"]):
                return False, "a map in the family is not a hom"
            m = np.asarray(h["map"])
            unsep &= ~(m[:, None] != m[None, :])
        ok = not unsep.any()
        return ok, "family separates all pairs" if ok else "family leaves pairs unseparated"
    if kind == "isomorphism":
        if not isinstance(K, tuple):
            raise PreconditionError("isomorphism certificates need both specs (--spec-u, --spec-w)")
        FV, T, _, _ = decomposition_target(*K, cert["rank"], caps)
        m = cert["map"]
        ok = is_homomorphism(FV, T, m) and len(set(m)) == T.size == FV.size
        return ok, "bijective hom F_V -> F_U x G_W" if ok else "map is not an isomorphism"
    return True, "informational"


def _no_hom(S, F0):
    if F0.size ** S.size <= 200_000:
        return not brute_force_homs(S, F0)
    return homs(S, F0, "any") is None
