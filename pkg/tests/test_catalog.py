import numpy as np
import pytest
from hypothesis import given, strategies as st

from asctool import catalog
from asctool.errors import AlgebraError, PreconditionError
from asctool.finalg import check_identity, is_isomorphic


def test_every_builder_classifies():
    for name in catalog.BUILDERS:
        rep = catalog.classify(catalog.get(name))
        assert rep.flags["is_bounded_lattice"], name


@pytest.mark.parametrize("name,flags", [
    ("two", {"is_closure": True, "is_monadic": True, "is_mckinsey": True, "contains_s2": False}),
    ("s2", {"is_closure": True, "is_monadic": True, "is_mckinsey": False, "contains_s2": True,
            "contains_four": False}),
    ("four", {"is_closure": True, "is_monadic": False, "is_mckinsey": True, "contains_four": True}),
    ("m8", {"is_closure": True, "is_mckinsey": True, "contains_four": True}),
    ("b-lev2", {"is_closure": True, "is_mckinsey": True, "contains_s2": False}),
    ("m3b", {"is_distributive": False, "is_heyting": False}),
    ("n5b", {"is_distributive": False}),
    ("lev2-heyting", {"is_heyting": True, "is_distributive": True}),
    ("two-sq-heyting", {"is_heyting": True}),
])
def test_classify_flags(name, flags):
    rep = catalog.classify(catalog.get(name))
    for k, v in flags.items():
        assert rep.flags[k] == v, (name, k)


def test_failures_come_with_witnesses():
    rep = catalog.classify(catalog.get("m3b"))
    assert "assignment" in rep.witnesses["is_distributive"]


def test_s_l_sizes_and_simplicity():
    from asctool.congruence import is_simple
    for l in (1, 2, 3):
        S = catalog.s_l(l)
        assert S.size == 2 ** l and is_simple(S)


def test_four_open_element_scan():
    # d = 1 is open, not the top, and its closure is the top
    assert catalog.contains_four_scan(catalog.get("four")) == 1
    # an atom of S2 has closure 1 but is not open
    assert catalog.contains_four_scan(catalog.get("s2")) is None


@pytest.mark.parametrize("n", [1, 2, 3])
def test_open_of_complex_is_upsets(n):
    P = catalog.lev_poset(n)
    H = catalog.open_heyting(catalog.complex_closure(P))
    assert is_isomorphic(H, catalog.upset_heyting(P)) is not None


def test_lev2_complex_sizes():
    M = catalog.complex_closure(catalog.lev_poset(2))
    assert M.size == 8
    assert len(catalog.open_elements(M)) == 5


def test_dia_is_down_closure():
    M = catalog.complex_closure(catalog.chain_poset(2))
    # points 0 < 1; the down-closure of {1} is {0, 1}
    assert M.apply("dia", 0b10) == 0b11
    assert M.apply("dia", 0b01) == 0b01


@st.composite
def posets(draw):
    n = draw(st.integers(1, 4))
    perm = draw(st.permutations(range(n)))
    rel = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(i + 1, n):
            rel[perm[i], perm[j]] = draw(st.booleans())
    # transitive closure
    for k in range(n):
        rel |= rel[:, [k]] & rel[[k], :]
    return catalog.Poset(n, rel)


@given(posets())
def test_duality_on_random_posets(P):
    M = catalog.complex_closure(P)
    H = catalog.upset_heyting(P)
    assert catalog.classify(M).flags["is_closure"]
    assert catalog.classify(H).flags["is_heyting"]
    assert is_isomorphic(catalog.open_heyting(M), H) is not None


def test_poset_validation():
    with pytest.raises(AlgebraError):
        catalog.Poset(2, [[True, False], [False, False]])
    with pytest.raises(AlgebraError):
        catalog.Poset(3, [[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    with pytest.raises(PreconditionError):
        catalog.lev_poset(0)


def test_open_heyting_rejects_non_closure():
    bad = catalog.boolean_closure(1, [1, 1])
    with pytest.raises(PreconditionError):
        catalog.open_heyting(bad)


def test_mckinsey_law_on_generators():
    assert check_identity(catalog.get("s2"), catalog.MONADIC_LAW)[0]
    from asctool.finalg import mckinsey
    assert check_identity(catalog.get("four"), mckinsey())[0]
    assert not check_identity(catalog.get("s2"), mckinsey())[0]


def test_bundled_corpus_in_sync(corpus_dir):
    files = catalog.corpus_files()
    for fname, text in files.items():
        assert (corpus_dir / fname).read_text() == text, fname


def test_unknown_name():
    with pytest.raises(KeyError):
        catalog.get("nope")


def test_n5b_shape():
    N = catalog.get("n5b")
    assert N.size == 5
    assert N.apply("join", 1, 3) == 4 and N.apply("meet", 2, 3) == 0
