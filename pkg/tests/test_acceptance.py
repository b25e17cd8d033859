"""One test per acceptance criterion; each prints a single PASS/FAIL line with its timing."""
import time

import numpy as np
import pytest

import suite
from conftest import spec
from asctool import catalog
from asctool.congruence import all_congruences
from asctool.decision import (FAILS, HOLDS, INCONCLUSIVE, asc_check, classify_qi,
                              free_decomposition_check, mckinsey_splitting,
                              non_embedding_suite, sc_check)
from asctool.finalg import is_isomorphic, parse_qi, product
from asctool.finalg.terms import parse_equation
from asctool.variety import FinitePresentation, clear_free_cache, finitely_presented

pytestmark = pytest.mark.acceptance


@pytest.fixture(autouse=True)
def cold_cache():
    # every criterion is timed from a cold free-algebra cache
    clear_free_cache()


def check(capsys, tag, label, limit, fn):
    t0 = time.perf_counter()
    ok, detail = False, ""
    try:
        ok, detail = fn()
    finally:
        dt = time.perf_counter() - t0
        ok_time = dt < limit
        status = "PASS" if ok and ok_time else "FAIL"
        with capsys.disabled():
            print(f"\n{status} {tag} {label}: {detail} ({dt:.2f}s, limit {limit}s)")
    assert ok, detail
    assert ok_time, f"{dt:.2f}s over the {limit}s limit"


def test_ac01_congruence_grid(capsys):
    def run():
        L = all_congruences(catalog.get("four-sq"))
        three = catalog.lattice_from_order(np.triu(np.ones((3, 3), dtype=bool)))
        grid = is_isomorphic(L.as_algebra(), product([three, three])) is not None
        return len(L) == 9 and grid, f"{len(L)} congruences, 3x3 grid={grid}"
    check(capsys, "ac01", "Con(4^2)", 1, run)


FOUR_RELS = ["(= (box (dia (box x))) (dia (box x)))",
             "(= (meet (dia (box x)) x) (box x))",
             "(= (join (dia (box x)) x) (dia x))"]


def test_ac02_four_sq_presentation(capsys):
    def run():
        P = finitely_presented(spec("four"), FinitePresentation(1, [parse_equation(r) for r in FOUR_RELS]))
        iso = is_isomorphic(P.algebra, catalog.get("four-sq")) is not None
        return iso, f"|P| = {P.algebra.size}, isomorphic to 4^2: {iso}"
    check(capsys, "ac02", "presentation of 4^2 over V(4)", 30, run)


def test_ac03_two_sq_presentation(capsys):
    # the relation is excluded middle x v -x = 1 (see the decisions ledger)
    def run():
        K = spec("lev2-heyting")
        P = finitely_presented(K, FinitePresentation(1, [parse_equation("(= (join x (neg x)) one)")]))
        iso = is_isomorphic(P.algebra, catalog.get("two-sq-heyting")) is not None
        return iso, f"|P| = {P.algebra.size}, isomorphic to 2^2: {iso}"
    check(capsys, "ac03", "presentation of 2^2 over V(Lev2+)", 30, run)


def test_ac04_asc_s2(capsys):
    def run():
        v = asc_check(spec("s2"))
        e = v.find("embedding")
        p = v.find("product-embedding")
        ok = (v.status == HOLDS and any(c["source"]["size"] == 2 and c["rank"] == 1 for c in e)
              and any(c["factor"] == "s2" and c["rank"] <= 2 for c in p))
        return ok, f"{v.status}; 2 -> F({e[0]['rank']}), S2x2 -> F({p[0]['rank']})"
    check(capsys, "ac04", "ASC for V(S2)", 120, run)


def test_ac05_sc_s2(capsys):
    def run():
        v = sc_check(spec("s2"))
        certs = v.find("no-hom-to-F0")
        ok = v.status == FAILS and certs and certs[0]["F0"]["size"] == 2
        return bool(ok), f"{v.status} with {len(certs)} no-hom-to-2 certificate(s)"
    check(capsys, "ac05", "SC for V(S2)", 60, run)


def test_ac06_bounded_lattices(capsys):
    def run():
        m3 = asc_check(spec("m3b"))
        ok = m3.status == FAILS and bool(m3.find("join-irreducible-top"))
        ok &= sc_check(spec("two-lattice")).status == HOLDS
        rows = []
        for name in ("two-lattice", "m3b", "n5b"):
            K = spec(name)
            a, s = asc_check(K).status, sc_check(K).status
            d = catalog.classify(catalog.get(name)).flags["is_distributive"]
            ok &= (a == HOLDS) == (s == HOLDS) == d
            rows.append(f"{name}: asc={a} sc={s} distributive={d}")
        return ok, "; ".join(rows)
    check(capsys, "ac06", "SC iff ASC iff distributive on bounded lattices", 120, run)


def test_ac07_passive_rule(capsys):
    def run():
        q = parse_qi("(qi (vars 1) (prem (= (meet (dia x) (dia (neg x))) one)) (concl (= zero one)))")
        r = classify_qi(q, spec("s2"))
        ok = r.kind == "PASSIVE" and any(c["kind"] == "non-unifiable" for c in r.certificates)
        return ok, r.kind
    check(capsys, "ac07", "passive rule over V(S2)", 30, run)


def test_ac08_duality(capsys):
    def run():
        parts = []
        ok = True
        for n in (1, 2, 3):
            P = catalog.lev_poset(n)
            iso = is_isomorphic(catalog.open_heyting(catalog.complex_closure(P)),
                                catalog.upset_heyting(P)) is not None
            ok &= iso
            parts.append(f"n={n}: {iso}")
        M = catalog.complex_closure(catalog.lev_poset(2))
        nopen = len(catalog.open_elements(M))
        ok &= M.size == 8 and nopen == 5
        return ok, ", ".join(parts) + f"; B(Lev2+) has {M.size} elements, {nopen} open"
    check(capsys, "ac08", "open elements of complex algebras", 10, run)


def test_ac09_splitting(capsys):
    def run():
        out, ok = [], True
        for gens, mu, s2 in ((("s2",), False, True), (("four",), True, False),
                             (("b-lev2",), True, False)):
            rep = mckinsey_splitting(spec(*gens)).find("mckinsey-splitting")[0]
            ok &= rep["mckinsey_holds"] == mu and rep["s2_present"] == s2
            out.append(f"{gens[0]}: mu={rep['mckinsey_holds']} S2={rep['s2_present']}")
        return ok, "; ".join(out)
    check(capsys, "ac09", "McKinsey vs S2", 60, run)


def test_ac10_free_decomposition(capsys):
    def run():
        v = free_decomposition_check(spec("four"), spec("s2"), 1)
        return v.status == HOLDS, f"{v.status} {v.certificates[0].get('sizes')}"
    check(capsys, "ac10", "F_V(1) = F_U(1) x G_W(1)", 300, run)


def test_ac11_non_embedding(capsys):
    def run():
        h = non_embedding_suite("heyting-2sq", k=1)
        c = non_embedding_suite("closure-4sq", k=1)
        c_ok = c.status == HOLDS or (c.status == INCONCLUSIVE
                                     and max(c.explored["free_sizes"] or [0]) >= 10 ** 4)
        ok = h.status == HOLDS and c_ok
        return ok, (f"heyting-2sq {h.status} sizes {h.explored['free_sizes']}; "
                    f"closure-4sq {c.status} sizes {c.explored['free_sizes']}")
    check(capsys, "ac11", "non-embedding evidence at rank 1", 120, run)


def test_ac12_property_suites(capsys):
    def run():
        n1 = suite.stored_witness_checks()
        n2 = suite.ump_checks()
        n3 = suite.birkhoff_checks(n_terms=200, seed=0)
        n4 = suite.oracle_equivalence_checks()
        return True, f"{n1} certificates, {n2} UMP maps, {n3} term pairs, {n4} oracle pairs"
    check(capsys, "ac12", "property suites", 600, run)
