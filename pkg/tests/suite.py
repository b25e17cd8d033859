"""Property checks shared by the hypothesis tests and the acceptance run."""
import itertools
import json
import random

import oracles
from asctool import catalog, decision
from asctool.errors import CapExceeded
from asctool.finalg import app, extend_map, homs, is_homomorphism, var
from asctool.congruence import all_congruences
from asctool.variety import free_algebra, load_spec


def corpus_specs():
    from importlib import resources
    root = resources.files("asctool") / "corpus"
    return {name: load_spec(root / f"{name}.json") for name in sorted(catalog.SPECS)}


def random_term(rng, sig, nvars, depth):
    ops = [(o, a) for o, a in sig if a > 0]
    if depth == 0 or rng.random() < 0.25:
        if sig.constants and rng.random() < 0.2:
            return app(rng.choice(sig.constants))
        return var(rng.randrange(nvars))
    op, ar = rng.choice(ops)
    return app(op, *[random_term(rng, sig, nvars, depth - 1) for _ in range(ar)])


def stored_witness_checks():
    """Every hom or embedding stored in a verdict re-verifies."""
    n = 0
    for name, K in corpus_specs().items():
        verdicts = []
        if K.congruence_distributive and all(B.size <= 8 for B in K.generators):
            verdicts += [decision.asc_check(K), decision.sc_check(K)]
        for v in verdicts:
            data = json.loads(v.dumps())
            for kind, ok, msg in decision.verify_certificates(data, K):
                assert ok, (name, kind, msg)
                n += 1
            for cert in data["certificates"]:
                if cert["kind"] in ("embedding", "product-embedding"):
                    F = free_algebra(K, cert["rank"])
                    assert len(set(cert["map"])) == len(cert["map"])
                    if F.size <= 16:
                        from asctool.finalg import FiniteAlgebra
                        S = FiniteAlgebra.from_json(cert["source"])
                        assert oracles.is_hom(S, F, cert["map"])
    return n


def ump_checks(max_gen_size=8, max_rank=2):
    """Evaluation maps of F(k) are the unique homs extending generator assignments."""
    n = 0
    for name, K in corpus_specs().items():
        if any(B.size > max_gen_size for B in K.generators):
            continue
        for k in range(0, max_rank + 1):
            if k == 0 and not K.signature.constants:
                continue
            try:
                F = free_algebra(K, k)
            except CapExceeded:
                break
            for j, B in enumerate(K.generators):
                for asg in itertools.product(range(B.size), repeat=k):
                    h = F.evaluation(j, asg)
                    assert is_homomorphism(F, B, h.map), (name, k, asg)
                    if k:
                        g = extend_map(F, B, F.generators, list(asg))
                        assert g is not None and g.map == h.map
                    n += 1
    return n


def birkhoff_checks(n_terms=200, seed=0):
    """s = t holds in every generator iff s and t are the same element of F(k)."""
    rng = random.Random(seed)
    n = 0
    for name, K in corpus_specs().items():
        F = None
        for k in (2, 1):
            try:
                F = free_algebra(K, k)
                break
            except CapExceeded:
                continue
        sig = K.signature
        for _ in range(n_terms):
            s = random_term(rng, sig, F.rank, 3)
            t = random_term(rng, sig, F.rank, 3)
            in_free = F.element_of(s) == F.element_of(t)
            holds = all(oracles.eval_term(B, s, a) == oracles.eval_term(B, t, a)
                        for B in K.generators
                        for a in itertools.product(range(B.size), repeat=F.rank))
            assert in_free == holds, (name, str(s), str(t))
            n += 1
    return n


def oracle_equivalence_checks(max_size=4):
    """Homs and congruences agree with brute force on small corpus algebras."""
    small = [catalog.get(nm) for nm in sorted(catalog.BUILDERS) if catalog.get(nm).size <= max_size]
    n = 0
    for A in small:
        got = sorted(tuple(int(x) for x in c.labels) for c in all_congruences(A))
        assert got == sorted(oracles.all_congruences(A)), A.name
        for B in small:
            if A.signature != B.signature:
                continue
            assert sorted(h.map for h in homs(A, B, "all")) == sorted(oracles.all_homs(A, B)), (A.name, B.name)
            n += 1
    return n
