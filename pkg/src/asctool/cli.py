"""Command-line interface: ``asctool GROUP COMMAND ...``.

Exit status: 0 HOLDS / found, 1 FAILS / none found, 2 INCONCLUSIVE or cap hit,
64 usage error, 65 malformed input.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import catalog, decision
from .congruence import (Congruence, all_congruences, congruence_generated,
                         is_simple, subdirect_irreducibility)
from .errors import AlgebraError, CapExceeded, PreconditionError
from .finalg.algebra import load_algebra
from .finalg.constructions import product, quotient
from .finalg.search import find_embedding, homs, is_isomorphic
from .finalg.terms import check_quasi_identity, parse_equation, parse_qi
from .variety import (YES, NO, Caps, FinitePresentation, finitely_presented, free_algebra,
                      in_QF, in_quasivariety, in_variety, load_spec, resolve_algebra_ref,
                      si_members, unifiable)

EXIT_USAGE, EXIT_DATA = 64, 65
RESULT_EXIT = {"HOLDS": 0, "FAILS": 1, "INCONCLUSIVE": 2, YES: 0, NO: 1}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


# -- helpers --------------------------------------------------------------------

def _caps(args) -> Caps:
    return Caps.from_env(rank_max=args.rank_max, size_max=args.size_max,
                         time_budget=args.time_budget)


def _spec(args, path=None):
    K = load_spec(path or args.spec)
    over = {k: getattr(args, k) for k in ("rank_max", "size_max", "time_budget")
            if getattr(args, k) is not None}
    if over:
        K = dataclasses.replace(K, caps=dataclasses.replace(K.caps, **over))
    return K


def _alg(ref):
    return resolve_algebra_ref(ref)


def _qi_text(text):
    p = Path(text)
    if p.suffix in (".qi", ".txt") and p.exists():
        text = p.read_text()
    return parse_qi(text)


def _write_algebra(A, args, extra=None):
    data = A.to_json()
    if extra:
        data.update(extra)
    text = json.dumps(data, sort_keys=True)
    if getattr(args, "output", None):
        Path(args.output).write_text(text + "\n")
        return {"status": "HOLDS", "written": args.output, "size": A.size}
    return {"status": "HOLDS", "algebra": data}


def _emit(report: dict, args, procedure: str):
    if getattr(args, "output", None) and "written" not in report:
        # reports that are not algebras go to the file as JSON, ready for --verify
        Path(args.output).write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
    if args.json:
        print(json.dumps(report, sort_keys=True, indent=2))
    else:
        if "algebra" in report and len(report) == 2:
            print(json.dumps(report["algebra"], sort_keys=True))
            return
        print(f"{procedure}: {report.get('status')}")
        for k in sorted(report):
            if k in ("status", "citations"):
                continue
            v = report[k]
            if k == "certificates":
                for c in v:
                    print("  certificate " + _summ(c))
            else:
                print(f"  {k}: {_short(v)}")
    if args.cite and report.get("citations"):
        for c in report["citations"]:
            print(f"  cite: {c}", file=sys.stdout if not args.json else sys.stderr)


def _short(v, limit=200):
    s = json.dumps(v, sort_keys=True) if not isinstance(v, str) else v
    return s if len(s) <= limit else s[:limit] + " ..."


def _summ(c: dict) -> str:
    parts = [c.get("kind", "?")]
    for key in ("factor", "rank", "up_to_rank", "witness", "assignment", "generator",
                "mckinsey_holds", "s2_present", "biconditional", "sizes", "reason"):
        if key in c and c[key] is not None:
            parts.append(f"{key}={_short(c[key], 80)}")
    for key in ("source", "algebra", "premise_algebra"):
        if key in c:
            parts.append(f"{key}={c[key].get('name') or '?'}({c[key]['size']})")
    return " ".join(parts)


def _hom_report(h, found_msg="found"):
    if h is None:
        return {"status": "FAILS", "result": "none found"}
    return {"status": "HOLDS", "result": found_msg, "map": list(h.map)}


# -- alg ------------------------------------------------------------------------

def cmd_alg(args):
    c = args.cmd
    if c == "validate":
        A = load_algebra(args.file)
        rep = {"status": "HOLDS", "name": A.name, "size": A.size,
               "signature": A.signature.to_json()}
        try:
            rep["kind"] = catalog.classify(A).to_json()["flags"]
        except AlgebraError:
            pass
        return rep
    if c in ("check-id", "check-qi"):
        A = _alg(args.file)
        q = _qi_text(args.formula)
        if c == "check-id" and q.premise:
            raise UsageError("check-id expects an identity; use check-qi")
        ok, w = check_quasi_identity(A, q)
        rep = {"status": "HOLDS" if ok else "FAILS"}
        if not ok:
            rep["assignment"] = list(w)
        return rep
    if c in ("hom", "embed", "iso"):
        A, B = _alg(args.source), _alg(args.target)
        if c == "hom":
            if args.mode == "all":
                hs = homs(A, B, "all")
                return {"status": "HOLDS" if hs else "FAILS", "count": len(hs),
                        "maps": [list(h.map) for h in hs]}
            return _hom_report(homs(A, B, args.mode))
        if c == "embed":
            return _hom_report(find_embedding(A, B), "embedding")
        return _hom_report(is_isomorphic(A, B), "isomorphism")
    if c == "product":
        return _write_algebra(product([_alg(f) for f in args.files]), args)
    if c == "quotient":
        A = _alg(args.file)
        if args.labels:
            theta = Congruence(A, json.loads(args.labels), check=True)
        else:
            pairs = [tuple(int(x) for x in p.split(",")) for p in args.pair]
            theta = congruence_generated(A, pairs)
        Q, nat = quotient(A, theta)
        return _write_algebra(Q, args, {"natural_map": list(nat.map)})
    raise UsageError(f"unknown alg command {c}")


# -- cong -----------------------------------------------------------------------

def cmd_cong(args):
    A = _alg(args.file)
    caps = _caps(args)
    if args.cmd == "list":
        L = all_congruences(A, deadline=caps.deadline())
        return {"status": "HOLDS", "count": len(L), **L.to_json()}
    if args.cmd == "si":
        mono, pair = subdirect_irreducibility(A)
        if mono is not None:
            return {"status": "HOLDS", "monolith": mono.to_json()}
        return {"status": "FAILS", "separating_pair": [pair[0].to_json(), pair[1].to_json()]}
    if args.cmd == "simple":
        return {"status": "HOLDS" if is_simple(A) else "FAILS"}
    raise UsageError(f"unknown cong command {args.cmd}")


# -- var ------------------------------------------------------------------------

def _result(res):
    return {"status": {YES: "HOLDS", NO: "FAILS"}.get(res.status, "INCONCLUSIVE"),
            "answer": res.status, "witness": res.witness, "explored": res.explored}


def cmd_var(args):
    K = _spec(args)
    c = args.cmd
    if c == "free":
        F = free_algebra(K, args.rank)
        return _write_algebra(F, args, {"generators": list(F.generators)})
    if c == "member":
        A = _alg(args.file)
        if K.mode == "quasivariety":
            return _result(in_quasivariety(A, K))
        return _result(in_variety(A, K))
    if c == "si-list":
        ms = si_members(K)
        return {"status": "HOLDS", "members": [{"name": S.name, "size": S.size} for S in ms]}
    if c == "present":
        rels = [parse_equation(r) for r in args.rel]
        pres = finitely_presented(K, FinitePresentation(args.rank, rels))
        return _write_algebra(pres.algebra, args, {"generators": list(pres.generators)})
    if c == "unify":
        return _result(unifiable(_alg(args.file), K))
    if c == "in-qf":
        return _result(in_QF(_alg(args.file), K))
    raise UsageError(f"unknown var command {c}")


# -- catalog --------------------------------------------------------------------

def cmd_catalog(args):
    what, rest = args.what, args.arg
    if what == "list":
        return {"status": "HOLDS", "names": sorted(catalog.BUILDERS)}
    if what == "poset-lev":
        P = catalog.lev_poset(int(_one(rest)))
        return {"status": "HOLDS", "algebra": P.to_json()}
    if what == "upset":
        return _write_algebra(catalog.upset_heyting(catalog.load_poset(_one(rest))), args)
    if what == "complex":
        return _write_algebra(catalog.complex_closure(catalog.load_poset(_one(rest))), args)
    if what == "open":
        return _write_algebra(catalog.open_heyting(load_algebra(_one(rest))), args)
    if what == "classify":
        return {"status": "HOLDS", **catalog.classify(_alg(_one(rest))).to_json()}
    if what not in catalog.BUILDERS:
        raise UsageError(f"unknown catalog entry {what!r}; try 'catalog list'")
    return _write_algebra(catalog.get(what), args)


def _one(rest):
    if len(rest) != 1:
        raise UsageError("expected exactly one argument")
    return rest[0]


# -- asc ------------------------------------------------------------------------

def cmd_asc(args):
    c = args.cmd
    if args.verify:
        if c == "free-decomp":
            K = (_spec(args, args.spec_u), _spec(args, args.spec_w))
        else:
            K = _spec(args) if getattr(args, "spec", None) else None
        data = json.loads(Path(args.verify).read_text())
        if "status" not in data:
            raise AlgebraError("not a saved verdict")
        checks = decision.verify_certificates(data, K)
        ok = all(v for _, v, _ in checks)
        return {"status": "HOLDS" if ok else "FAILS",
                "verification": "all certificates valid" if ok else "some certificate rejected",
                "verified_status": data["status"],
                "checks": [{"kind": k, "ok": v, "message": m} for k, v, m in checks]}
    if c == "non-embed":
        v = decision.non_embedding_suite(args.suite, _caps(args), k=args.rank)
        return v.to_json()
    if c == "free-decomp":
        KU, KW = _spec(args, args.spec_u), _spec(args, args.spec_w)
        rank = args.rank if args.rank is not None else 1
        return decision.free_decomposition_check(KU, KW, rank, KU.caps).to_json()
    K = _spec(args)
    if c == "check":
        return decision.asc_check(K).to_json()
    if c == "sc-check":
        return decision.sc_check(K).to_json()
    if c == "ascc":
        return decision.ascc_membership(_alg(args.file), K).to_json()
    if c == "splitting":
        return decision.mckinsey_splitting(K, check_asc=args.with_asc).to_json()
    if c == "classify":
        r = decision.classify_qi(_qi_text(args.formula), K)
        rep = r.to_json()
        rep["status"] = r.status
        if r.kind == "PASSIVE":
            rep["citations"] = [decision.CITATIONS["passive"]]
        else:
            rep["citations"] = [decision.CITATIONS["admissible"]]
        return rep
    raise UsageError(f"unknown asc command {c}")


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit the JSON report")
    common.add_argument("--cite", action="store_true", help="print the results a verdict rests on")
    common.add_argument("--rank-max", type=int, dest="rank_max")
    common.add_argument("--size-max", type=int, dest="size_max")
    common.add_argument("--time-budget", type=float, dest="time_budget", help="seconds")
    common.add_argument("-o", "--output", help="write the algebra, or the JSON report, to this file")

    p = _Parser(prog="asctool", description="finite algebra toolkit for structural completeness")
    groups = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    g = groups.add_parser("alg", help="finite algebras").add_subparsers(dest="cmd", required=True)
    s = g.add_parser("validate", parents=[common]); s.add_argument("file")
    for name in ("check-id", "check-qi"):
        s = g.add_parser(name, parents=[common])
        s.add_argument("file"); s.add_argument("formula", help="s-expression or .qi file")
    s = g.add_parser("hom", parents=[common])
    s.add_argument("source"); s.add_argument("target")
    s.add_argument("--mode", default="any",
                   choices=["any", "injective", "surjective", "bijective", "all"])
    for name in ("embed", "iso"):
        s = g.add_parser(name, parents=[common]); s.add_argument("source"); s.add_argument("target")
    s = g.add_parser("product", parents=[common]); s.add_argument("files", nargs="+")
    s = g.add_parser("quotient", parents=[common]); s.add_argument("file")
    s.add_argument("--labels", help="JSON block array")
    s.add_argument("--pair", action="append", default=[], help="a,b pair to identify")

    g = groups.add_parser("cong", help="congruences").add_subparsers(dest="cmd", required=True)
    for name in ("list", "si", "simple"):
        s = g.add_parser(name, parents=[common]); s.add_argument("file")

    g = groups.add_parser("var", help="varieties and free algebras").add_subparsers(
        dest="cmd", required=True)
    for name in ("free", "member", "si-list", "present", "unify", "in-qf"):
        s = g.add_parser(name, parents=[common])
        s.add_argument("--spec", required=True)
        if name in ("free", "present"):
            s.add_argument("--rank", type=int, required=True)
        if name in ("member", "unify", "in-qf"):
            s.add_argument("file")
        if name == "present":
            s.add_argument("--rel", action="append", default=[], help="(= s t)")

    s = groups.add_parser("catalog", parents=[common], help="named algebras and posets")
    s.add_argument("what", help="algebra name, list, poset-lev, upset, complex, open, classify")
    s.add_argument("arg", nargs="*")

    g = groups.add_parser("asc", help="decision procedures").add_subparsers(dest="cmd", required=True)
    for name in ("check", "sc-check", "classify", "ascc", "splitting", "free-decomp", "non-embed"):
        s = g.add_parser(name, parents=[common])
        s.add_argument("--verify", metavar="VERDICT", help="re-check a saved JSON verdict")
        if name == "free-decomp":
            s.add_argument("--spec-u", required=True)
            s.add_argument("--spec-w", required=True)
            s.add_argument("--rank", type=int)
        elif name == "non-embed":
            s.add_argument("suite", choices=sorted(decision.SUITES))
            s.add_argument("--rank", type=int)
        else:
            s.add_argument("--spec", required=True)
        if name == "classify":
            s.add_argument("formula")
        if name == "ascc":
            s.add_argument("file")
        if name == "splitting":
            s.add_argument("--with-asc", action="store_true")
    return p


HANDLERS = {"alg": cmd_alg, "cong": cmd_cong, "var": cmd_var, "catalog": cmd_catalog,
            "asc": cmd_asc}


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    procedure = " ".join(x for x in (args.group, getattr(args, "cmd", None) or getattr(args, "what", None)) if x)
    if getattr(args, "verify", None):
        procedure += " --verify"
    try:
        report = HANDLERS[args.group](args)
    except UsageError as exc:
        print(f"asctool: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceeded as exc:
        report = {"status": "INCONCLUSIVE", "reason": str(exc),
                  "explored": {k: v for k, v in exc.stats.items()}}
    except (AlgebraError, PreconditionError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"asctool: {exc}", file=sys.stderr)
        return EXIT_DATA
    _emit(report, args, procedure)
    return RESULT_EXIT.get(report.get("status"), 0)


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
