"""Finite algebras: representation, terms, constructions and search kernels."""
from .algebra import (FiniteAlgebra, Homomorphism, Signature, is_homomorphism,
                      load_algebra, save_algebra, trivial_algebra)
from .constructions import (ProductAlgebra, Subalgebra, canonical_labels, image_subalgebra,
                            is_compatible, power, product, quotient, subalgebra_generated,
                            subuniverse)
from .search import (brute_force_homs, extend_map, find_embedding, fingerprint,
                     generating_set, homs, is_isomorphic, iter_homs)
from .terms import (App, QuasiIdentity, Var, app, check_identity, check_quasi_identity,
                    distributivity, eval_term, identity, mckinsey, parse_qi, parse_term,
                    term_operation, var)

__all__ = [
    "FiniteAlgebra", "Homomorphism", "Signature", "is_homomorphism", "load_algebra",
    "save_algebra", "trivial_algebra", "ProductAlgebra", "Subalgebra", "canonical_labels",
    "image_subalgebra", "is_compatible", "power", "product", "quotient",
    "subalgebra_generated", "subuniverse", "brute_force_homs", "extend_map",
    "find_embedding", "fingerprint", "generating_set", "homs", "is_isomorphic", "iter_homs",
    "App", "QuasiIdentity", "Var", "app", "check_identity", "check_quasi_identity",
    "distributivity", "eval_term", "identity", "mckinsey", "parse_qi", "parse_term",
    "term_operation", "var", "direct_decomposition",
]


def direct_decomposition(A, **kw):
    from .decompose import direct_decomposition as _dd
    return _dd(A, **kw)
