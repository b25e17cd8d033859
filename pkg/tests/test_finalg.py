import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from conftest import algebras, terms
from asctool import catalog
from asctool.errors import AlgebraError, SignatureMismatch, TermError
from asctool.finalg import (FiniteAlgebra, Signature, brute_force_homs,
                            check_quasi_identity, direct_decomposition, eval_term,
                            extend_map, find_embedding, generating_set, homs, identity,
                            is_isomorphic, iter_homs, load_algebra,
                            parse_qi, parse_term, product, quotient,
                            save_algebra, subalgebra_generated, subuniverse, var)
from asctool.finalg.terms import expand, find_counterexample, parse_equation


# -- representation ---------------------------------------------------------------

def test_json_round_trip(tmp_path):
    A = catalog.get("four")
    p = tmp_path / "a.json"
    save_algebra(A, p)
    B = load_algebra(p)
    assert B == A and B.name == "four"
    assert json.loads(p.read_text())["signature"][0] == {"op": "zero", "arity": 0}


def test_constants_are_scalars():
    A = catalog.get("s2")
    assert A.const("zero") == 0 and A.const("one") == 3
    assert A.tables["one"].shape == ()


@pytest.mark.parametrize("bad", [
    {"size": 2, "signature": [{"op": "f", "arity": 1}], "tables": {"f": [0, 2]}},
    {"size": 2, "signature": [{"op": "f", "arity": 1}], "tables": {"f": [0]}},
    {"size": 2, "signature": [{"op": "f", "arity": 1}], "tables": {}},
    {"size": 0, "signature": [], "tables": {}},
    {"signature": [], "tables": {}},
])
def test_malformed_algebras_rejected(bad):
    with pytest.raises(AlgebraError):
        FiniteAlgebra.from_json(bad)


def test_tables_read_only():
    A = catalog.get("two")
    with pytest.raises(ValueError):
        A.tables["join"][0, 0] = 1


def test_signature_duplicates_rejected():
    with pytest.raises(AlgebraError):
        Signature([("f", 1), ("f", 2)])


# -- terms ------------------------------------------------------------------------------

def test_parse_aliases_and_macros():
    t = parse_term("(box x)")
    A = catalog.get("s2")
    assert [eval_term(A, t, [a]) for a in range(4)] == [0, 0, 0, 3]
    q = parse_qi("(qi (vars 1) (prem (= (dia x) one)) (concl (= x one)))")
    assert q.nvars == 1 and len(q.premise) == 1
    assert parse_equation("(= x y)")[1] == var(1)


@pytest.mark.parametrize("text", ["(", "(= x)", "(qi (vars 1) (prem))", "()", "(qi (foo))"])
def test_parse_errors(text):
    with pytest.raises(TermError):
        parse_qi(text)


def test_unknown_symbol():
    with pytest.raises(TermError):
        expand(parse_term("(frob x)"), catalog.get("two").signature)


def test_heyting_negation_macro():
    H = catalog.get("two-sq-heyting")
    t = parse_term("(neg x)")
    # pseudo-complement in 2^2: 0 <-> 3 and the atoms swap
    assert [eval_term(H, t, [a]) for a in range(4)] == [3, 2, 1, 0]


@given(algebras(max_size=3), terms())
def test_vectorized_eval_matches_recursive_oracle(A, t):
    for a in range(A.size):
        for b in range(A.size):
            assert eval_term(A, t, [a, b]) == oracles.eval_term(A, t, [a, b])


@given(algebras(max_size=3), terms(), terms())
def test_counterexample_is_least_and_genuine(A, s, t):
    q = identity(s, t, 2)
    w = find_counterexample(A, q)
    fails = [(a, b) for a in range(A.size) for b in range(A.size)
             if oracles.eval_term(A, s, [a, b]) != oracles.eval_term(A, t, [a, b])]
    assert (w is None) == (not fails)
    if fails:
        assert tuple(w) == min(fails)


def test_quasi_identity_check():
    q = parse_qi("(qi (vars 1) (prem (= (dia x) one)) (concl (= x one)))")
    ok, w = check_quasi_identity(catalog.get("s2"), q)
    assert not ok and catalog.get("s2").apply("dia", w[0]) == 3
    assert check_quasi_identity(catalog.get("two"), q)[0]


# -- constructions -----------------------------------------------------------------------

def test_product_projections_are_homs():
    P = product([catalog.get("four"), catalog.get("two")])
    assert P.size == 8
    for j in range(2):
        assert P.projection(j).verify()


def test_empty_product_needs_signature():
    with pytest.raises(AlgebraError):
        product([])
    P = product([], signature=catalog.get("two").signature)
    assert P.size == 1


def test_product_signature_mismatch():
    with pytest.raises(SignatureMismatch):
        product([catalog.get("two"), catalog.get("two-lattice")])


def test_subuniverse_and_subalgebra():
    A = catalog.get("s2")
    assert list(subuniverse(A, [])) == [0, 3]
    S = subalgebra_generated(A, [1])
    assert S.size == 4
    assert S.inclusion.verify()


@given(algebras(max_size=4), st.lists(st.integers(0, 3), max_size=2))
def test_subuniverse_closed(A, gens):
    gens = [g % A.size for g in gens]
    U = set(int(x) for x in subuniverse(A, gens))
    for op, ar in A.signature:
        for args in np.ndindex(*(A.size,) * ar):
            if all(a in U for a in args):
                assert int(A.tables[op][args]) in U


def test_quotient_by_kernel():
    A = catalog.get("four")
    h = homs(A, catalog.get("two"))
    Q, nat = quotient(A, h.map)
    assert Q.size == 2 and nat.verify()
    assert is_isomorphic(Q, catalog.get("two")) is not None


def test_quotient_rejects_non_congruence():
    from asctool.errors import NotACongruence
    with pytest.raises(NotACongruence):
        quotient(catalog.get("s2"), [0, 0, 1, 1])


# -- search ------------------------------------------------------------------------------

SMALL = ["two", "s1", "s2", "four", "two-sq", "two-lattice", "two-heyting", "two-sq-heyting"]


@pytest.mark.parametrize("a", SMALL)
@pytest.mark.parametrize("b", SMALL)
def test_homs_match_bruteforce(a, b):
    A, B = catalog.get(a), catalog.get(b)
    if A.signature != B.signature:
        return
    got = sorted(h.map for h in homs(A, B, "all"))
    assert got == sorted(oracles.all_homs(A, B))


@given(algebras(max_size=3), algebras(max_size=3))
def test_random_homs_match_bruteforce(A, B):
    got = sorted(h.map for h in homs(A, B, "all"))
    assert got == sorted(oracles.all_homs(A, B))
    inj = homs(A, B, "injective")
    expected = [m for m in sorted(got) if len(set(m)) == A.size]
    assert (inj is None) == (not expected)


def test_first_hom_is_lexicographically_least_on_generators():
    A, B = catalog.get("four"), catalog.get("two")
    h = homs(A, B)
    assert h.map == (0, 1, 0, 1)


def test_known_hom_facts():
    assert homs(catalog.get("s2"), catalog.get("two")) is None
    F = catalog.get("four-sq")
    assert len(homs(F, catalog.get("four"), "all")) == 4
    assert generating_set(F) == [6]


def test_extend_map():
    A = catalog.get("s2")
    h = extend_map(A, A, [1], [2])
    assert h is not None and h.map == (0, 2, 1, 3)
    assert extend_map(A, catalog.get("two"), [1], [0]) is None


def test_isomorphism_and_embedding():
    assert is_isomorphic(catalog.get("two-sq"), catalog.get("s2")) is None
    e = find_embedding(catalog.get("two"), catalog.get("four-sq"))
    assert e is not None and e.is_injective and e.verify()


def test_iter_homs_with_deadline_raises():
    from asctool.errors import CapExceeded
    with pytest.raises(CapExceeded):
        list(iter_homs(catalog.get("four-sq"), catalog.get("four-sq"), "all", deadline=0.0))


def test_brute_force_guard():
    from asctool.errors import CapExceeded
    with pytest.raises(CapExceeded):
        brute_force_homs(catalog.get("four-sq"), catalog.get("four-sq"), limit=10)


# -- decomposition -------------------------------------------------------------------------

@pytest.mark.parametrize("name,sizes", [("two", [2]), ("s2", [4]), ("two-sq", [2, 2]),
                                        ("four-sq", [4, 4]), ("two-sq-heyting", [2, 2]),
                                        ("m3b", [5])])
def test_direct_decomposition(name, sizes):
    A = catalog.get(name)
    factors, iso = direct_decomposition(A)
    assert sorted(F.size for F in factors) == sorted(sizes)
    assert iso.verify() and iso.is_injective and iso.is_surjective
