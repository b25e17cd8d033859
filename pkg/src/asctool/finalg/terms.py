"""Terms, equations and quasi-identities, with vectorized evaluation.

Concrete syntax is a small s-expression language::

    (qi (vars 2) (prem (= (dia v0) one)) (concl (= v0 one)))
    (= (join x (neg x)) 1)

Variables are ``v0, v1, ...``; ``x y z w u`` are accepted as aliases for
``v0 .. v4``. ``0``/``1`` alias the constants ``zero``/``one``. A few derived
operations are expanded against the algebra's signature when they are not
basic symbols there:

* ``box a``   -> ``neg (dia (neg a))``
* ``imp a b`` -> ``join (neg a) b``      (Boolean reducts)
* ``neg a``   -> ``imp a zero``          (Heyting reducts)
* ``iff a b`` -> ``meet (imp a b) (imp b a)``
* ``mu a``    -> ``imp (box (dia a)) (dia (box a))``
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import TermError
from .algebra import FiniteAlgebra, Signature

_ALIASES = {"x": 0, "y": 1, "z": 2, "w": 3, "u": 4}
_CONST_ALIASES = {"0": "zero", "1": "one", "bot": "zero", "top": "one"}
MACROS = {"box": 1, "imp": 2, "neg": 1, "iff": 2, "mu": 1}


@dataclass(frozen=True)
class Var:
    index: int

    def __str__(self):
        return f"v{self.index}"


@dataclass(frozen=True)
class App:
    op: str
    args: tuple = ()

    def __str__(self):
        if not self.args:
            return self.op
        return "(" + " ".join([self.op] + [str(a) for a in self.args]) + ")"


Term = "Var | App"


def var(i: int) -> Var:
    return Var(i)


def app(op: str, *args) -> App:
    return App(op, tuple(args))


def variables(t) -> set[int]:
    if isinstance(t, Var):
        return {t.index}
    out = set()
    for a in t.args:
        out |= variables(a)
    return out


def depth(t) -> int:
    if isinstance(t, Var) or not t.args:
        return 0
    return 1 + max(depth(a) for a in t.args)


def to_sexpr(t) -> str:
    return str(t)


def rename(t, mapping: dict[int, int]):
    if isinstance(t, Var):
        return Var(mapping[t.index])
    return App(t.op, tuple(rename(a, mapping) for a in t.args))


@dataclass(frozen=True)
class QuasiIdentity:
    """``premise_1 & ... & premise_m -> conclusion`` over ``nvars`` variables."""

    nvars: int
    premise: tuple = ()
    conclusion: tuple = None

    def __post_init__(self):
        if self.conclusion is None or len(self.conclusion) != 2:
            raise TermError("quasi-identity needs a conclusion equation")
        object.__setattr__(self, "premise", tuple(tuple(e) for e in self.premise))
        for s, t in self.premise + (self.conclusion,):
            for i in variables(s) | variables(t):
                if i >= self.nvars:
                    raise TermError(f"variable v{i} out of range for {self.nvars} variables")

    @property
    def is_identity(self) -> bool:
        return not self.premise

    def to_sexpr(self) -> str:
        prem = " ".join(f"(= {s} {t})" for s, t in self.premise)
        s, t = self.conclusion
        return f"(qi (vars {self.nvars}) (prem {prem}) (concl (= {s} {t})))".replace("(prem )", "(prem)")

    def __str__(self):
        return self.to_sexpr()


def identity(s, t, nvars: int | None = None) -> QuasiIdentity:
    if nvars is None:
        vs = variables(s) | variables(t)
        nvars = max(vs) + 1 if vs else 0
    return QuasiIdentity(nvars, (), (s, t))


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def _tokenize(text: str):
    return _TOKEN.findall(text)


def _read(tokens, pos):
    if pos >= len(tokens):
        raise TermError("unexpected end of input")
    tok = tokens[pos]
    if tok == "(":
        items = []
        pos += 1
        while True:
            if pos >= len(tokens):
                raise TermError("unbalanced parentheses")
            if tokens[pos] == ")":
                return items, pos + 1
            item, pos = _read(tokens, pos)
            items.append(item)
    if tok == ")":
        raise TermError("unexpected ')'")
    return tok, pos + 1


def read_sexpr(text: str):
    tokens = _tokenize(text)
    if not tokens:
        raise TermError("empty expression")
    value, pos = _read(tokens, 0)
    if pos != len(tokens):
        raise TermError("trailing input after expression")
    return value


def _to_term(x):
    if isinstance(x, str):
        m = re.fullmatch(r"v(\d+)", x)
        if m:
            return Var(int(m.group(1)))
        if x in _ALIASES:
            return Var(_ALIASES[x])
        return App(_CONST_ALIASES.get(x, x), ())
    if not x:
        raise TermError("empty application")
    head = x[0]
    if not isinstance(head, str):
        raise TermError("operator position must be a symbol")
    return App(head, tuple(_to_term(a) for a in x[1:]))


def parse_term(text: str):
    return _to_term(read_sexpr(text))


def _equation(x):
    if not (isinstance(x, list) and len(x) == 3 and x[0] == "="):
        raise TermError(f"expected (= s t), got {x!r}")
    return (_to_term(x[1]), _to_term(x[2]))


def parse_equation(text: str):
    """Parse ``(= s t)`` into a pair of terms."""
    return _equation(read_sexpr(text))


def parse_qi(text: str) -> QuasiIdentity:
    """Parse ``(qi (vars n) (prem eq*) (concl eq))`` or a bare ``(= s t)``."""
    x = read_sexpr(text)
    if isinstance(x, list) and x and x[0] == "=":
        s, t = _equation(x)
        return identity(s, t)
    if not (isinstance(x, list) and x and x[0] == "qi"):
        raise TermError("expected (qi ...) or (= s t)")
    nvars, premise, concl = None, [], None
    for part in x[1:]:
        if not isinstance(part, list) or not part:
            raise TermError(f"bad qi component {part!r}")
        tag = part[0]
        if tag == "vars":
            try:
                nvars = int(part[1])
            except (IndexError, ValueError) as exc:
                raise TermError("bad (vars n)") from exc
        elif tag == "prem":
            premise = [_equation(e) for e in part[1:]]
        elif tag == "concl":
            if len(part) != 2:
                raise TermError("concl takes exactly one equation")
            concl = _equation(part[1])
        else:
            raise TermError(f"unknown qi component {tag!r}")
    if concl is None:
        raise TermError("missing (concl ...)")
    if nvars is None:
        vs = set()
        for s, t in premise + [concl]:
            vs |= variables(s) | variables(t)
        nvars = max(vs) + 1 if vs else 0
    return QuasiIdentity(nvars, tuple(premise), concl)


# -- macro expansion ---------------------------------------------------------

def expand(t, signature: Signature):
    """Rewrite derived operations into basic symbols of ``signature``."""
    if isinstance(t, Var):
        return t
    args = tuple(expand(a, signature) for a in t.args)
    op = t.op
    if op in signature:
        if signature.arity(op) != len(args):
            raise TermError(f"{op} expects {signature.arity(op)} arguments, got {len(args)}")
        return App(op, args)
    if op not in MACROS:
        raise TermError(f"unknown symbol {op!r}")
    if MACROS[op] != len(args):
        raise TermError(f"{op} expects {MACROS[op]} arguments, got {len(args)}")
    if op == "box":
        return expand(App("neg", (App("dia", (App("neg", args),)),)), signature)
    if op == "imp":
        return expand(App("join", (App("neg", (args[0],)), args[1])), signature)
    if op == "neg":
        if "imp" not in signature:
            raise TermError("neg is not definable in this signature")
        return expand(App("imp", (args[0], App("zero", ()))), signature)
    if op == "iff":
        a, b = args
        return expand(App("meet", (App("imp", (a, b)), App("imp", (b, a)))), signature)
    a = args[0]
    return expand(App("imp", (App("box", (App("dia", (a,)),)), App("dia", (App("box", (a,)),)))),
                  signature)


def expand_qi(q: QuasiIdentity, signature: Signature) -> QuasiIdentity:
    prem = tuple((expand(s, signature), expand(t, signature)) for s, t in q.premise)
    s, t = q.conclusion
    return QuasiIdentity(q.nvars, prem, (expand(s, signature), expand(t, signature)))


# -- evaluation --------------------------------------------------------------

def _eval_vec(A: FiniteAlgebra, t, cols: Sequence[np.ndarray], memo: dict):
    if isinstance(t, Var):
        if t.index >= len(cols):
            raise TermError(f"no value for variable v{t.index}")
        return cols[t.index]
    hit = memo.get(t)
    if hit is not None:
        return hit
    table = A.tables[t.op]
    if not t.args:
        out = np.full(len(cols[0]) if cols else 1, int(table), dtype=np.int64)
    else:
        args = tuple(_eval_vec(A, a, cols, memo) for a in t.args)
        out = table[args].astype(np.int64)
    memo[t] = out
    return out


def eval_vectorized(A: FiniteAlgebra, t, cols: Sequence[np.ndarray]) -> np.ndarray:
    """Evaluate ``t`` on many assignments at once; ``cols[i]`` holds values of ``v_i``."""
    t = expand(t, A.signature)
    cols = [np.asarray(c, dtype=np.int64) for c in cols]
    for c in cols:
        if c.size and (c.min() < 0 or c.max() >= A.size):
            raise TermError("element out of range")
    if not cols:
        cols_n = 1
    else:
        cols_n = len(cols[0])
    res = _eval_vec(A, t, cols, {})
    if res.shape != (cols_n,):
        res = np.broadcast_to(res, (cols_n,)).copy()
    return res


def eval_term(A: FiniteAlgebra, t, asg) -> int:
    """Value of the term operation of ``t`` at the assignment ``asg``."""
    asg = tuple(asg)
    need = variables(t)
    if need and max(need) >= len(asg):
        raise TermError(f"assignment of length {len(asg)} does not cover v{max(need)}")
    cols = [np.array([a]) for a in asg]
    return int(eval_vectorized(A, t, cols)[0])


def term_operation(A: FiniteAlgebra, t, nvars: int) -> np.ndarray:
    """The full table of the ``nvars``-ary term operation, shape ``(n,)*nvars``."""
    cols = _all_assignments(A.size, nvars, 0, A.size ** nvars)
    res = eval_vectorized(A, t, cols)
    return res.reshape((A.size,) * nvars)


def _all_assignments(n: int, k: int, start: int, stop: int) -> list[np.ndarray]:
    if k == 0:
        return []
    idx = np.arange(start, stop, dtype=np.int64)
    return [(idx // n ** (k - 1 - i)) % n for i in range(k)]


_CHUNK = 1 << 20


def find_counterexample(A: FiniteAlgebra, q: QuasiIdentity):
    """First assignment (lexicographic, v0 most significant) refuting ``q``, or None."""
    q = expand_qi(q, A.signature)
    k = q.nvars
    total = A.size ** k
    for start in range(0, total, _CHUNK):
        stop = min(total, start + _CHUNK)
        cols = _all_assignments(A.size, k, start, stop)
        m = stop - start
        memo: dict = {}

        def ev(term):
            r = _eval_vec(A, term, cols, memo)
            return np.broadcast_to(r, (m,))

        ok = np.ones(m, dtype=bool)
        for s, t in q.premise:
            ok &= ev(s) == ev(t)
        s, t = q.conclusion
        bad = ok & (ev(s) != ev(t))
        hits = np.flatnonzero(bad)
        if hits.size:
            row = start + int(hits[0])
            return tuple(int((row // A.size ** (k - 1 - i)) % A.size) for i in range(k))
    return None


def check_quasi_identity(A: FiniteAlgebra, q: QuasiIdentity):
    """``(True, None)`` if ``A`` satisfies ``q``, else ``(False, assignment)``."""
    w = find_counterexample(A, q)
    return (w is None, w)


def check_identity(A: FiniteAlgebra, q: QuasiIdentity):
    if q.premise:
        raise TermError("check_identity expects an identity (empty premise)")
    return check_quasi_identity(A, q)


def all_assignments(n: int, k: int):
    return itertools.product(range(n), repeat=k)


# frequently used laws
def distributivity() -> QuasiIdentity:
    x, y, z = Var(0), Var(1), Var(2)
    return identity(app("meet", x, app("join", y, z)),
                    app("join", app("meet", x, y), app("meet", x, z)), 3)


def mckinsey() -> QuasiIdentity:
    return identity(app("mu", Var(0)), app("one"), 1)
