import numpy as np
import pytest
from hypothesis import given, strategies as st

import suite
from conftest import algebras, spec, terms
from asctool.congruence import Congruence, all_congruences
from asctool.finalg import (FiniteAlgebra, check_quasi_identity, extend_map, homs,
                            identity, is_isomorphic, product, quotient)
from asctool.variety import free_algebra


def permuted(A, perm):
    """Copy of ``A`` with element ``x`` renamed ``perm[x]``."""
    perm = np.asarray(perm)
    inv = np.argsort(perm)
    tabs = {}
    for op, ar in A.signature:
        T = A.tables[op]
        if ar == 0:
            tabs[op] = np.array(perm[int(T)])
        else:
            tabs[op] = perm[T[np.ix_(*[inv] * ar)]]
    return FiniteAlgebra(A.signature, A.size, tabs)


@given(algebras(max_size=4), st.data())
def test_isomorphism_invariant_under_relabeling(A, data):
    perm = data.draw(st.permutations(range(A.size)))
    B = permuted(A, perm)
    iso = is_isomorphic(A, B)
    assert iso is not None and iso.is_injective and iso.verify()


@given(algebras(max_size=3), algebras(max_size=3), algebras(max_size=3))
def test_hom_composition(A, B, C):
    f, g = homs(A, B), homs(B, C)
    if f is not None and g is not None:
        assert f.compose(g).verify()


@given(algebras(max_size=3), algebras(max_size=3))
def test_kernels_are_congruences_and_quotients_embed(A, B):
    for h in homs(A, B, "all")[:3]:
        theta = Congruence(A, h.map, check=True)
        Q, nat = quotient(A, theta)
        assert nat.verify()
        # the induced map Q -> B is injective
        induced = [h.map[int(r)] for r in theta.rep[np.unique(theta.labels, return_index=True)[1]]]
        assert len(set(induced)) == Q.size


@given(algebras(max_size=3), algebras(max_size=3))
def test_product_projections(A, B):
    P = product([A, B])
    for j in range(2):
        assert P.projection(j).verify()


@given(algebras(max_size=4))
def test_congruence_order_is_lattice_order(A):
    L = all_congruences(A)
    for i in range(len(L)):
        for j in range(len(L)):
            m = int(L.meet_table[i, j])
            assert L.order[m, i] and L.order[m, j]
            assert L.order[i, int(L.join_table[i, j])]


@given(algebras(max_size=3), terms(), terms())
def test_identities_preserved_by_products(A, s, t):
    q = identity(s, t, 2)
    ok, _ = check_quasi_identity(A, q)
    if ok:
        assert check_quasi_identity(product([A, A]), q)[0]


@pytest.mark.parametrize("name,k", [("two", 0), ("s2", 0), ("four", 0), ("m3b", 0),
                                    ("lev2-heyting", 0), ("two", 1), ("two-lattice", 1),
                                    ("m3b", 1)])
def test_free_rank_inclusion(name, k):
    K = spec(name)
    F, G = free_algebra(K, k), free_algebra(K, k + 1)
    if k == 0:
        h = homs(F, G)
    else:
        h = extend_map(F, G, F.generators, list(G.generators[:k]))
    assert h is not None and h.is_injective


def test_stored_witnesses_reverify():
    assert suite.stored_witness_checks() > 0


def test_universal_mapping_property_on_corpus():
    assert suite.ump_checks() > 0


def test_birkhoff_agreement_on_corpus():
    assert suite.birkhoff_checks(n_terms=50, seed=1) > 0


def test_oracle_equivalence_on_corpus():
    assert suite.oracle_equivalence_checks() > 0
