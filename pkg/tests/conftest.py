import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from asctool import catalog  # noqa: E402
from asctool.finalg import FiniteAlgebra, Signature, app, var  # noqa: E402
from asctool.variety import VarietySpec  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# a small generic signature for random algebras
GEN_SIG = Signature([("c", 0), ("f", 1), ("m", 2)])


@st.composite
def algebras(draw, min_size=1, max_size=4, sig=GEN_SIG):
    n = draw(st.integers(min_size, max_size))
    tabs = {}
    for op, ar in sig:
        flat = draw(st.lists(st.integers(0, n - 1), min_size=n ** ar, max_size=n ** ar))
        tabs[op] = np.array(flat, dtype=np.int64).reshape((n,) * ar)
    return FiniteAlgebra(sig, n, tabs, name=f"rand{n}")


@st.composite
def terms(draw, sig=GEN_SIG, nvars=2, max_depth=3):
    def build(d):
        if d == 0 or draw(st.integers(0, 3)) == 0:
            if draw(st.booleans()) or not sig.constants:
                return var(draw(st.integers(0, nvars - 1)))
            return app(draw(st.sampled_from(sorted(sig.constants))))
        ops = [(o, a) for o, a in sig if a > 0]
        op, ar = draw(st.sampled_from(ops))
        return app(op, *[build(d - 1) for _ in range(ar)])
    return build(max_depth)


def spec(*names, **kw):
    return VarietySpec([catalog.get(n) for n in names], **kw)


@pytest.fixture
def corpus_dir():
    from importlib import resources
    return resources.files("asctool") / "corpus"
