"""Regenerate the bundled JSON libraries under src/proofminer/data/.

    python tools/make_fixtures.py
"""
from pathlib import Path

from proofminer.terms import (App, Arrow, Branch, Fix, Forall, Fun, Let, Library, LibraryObject, Match,
                              Name, Sort, TacticArg, TacticScript, TacticStep, Var, flatten,
                              serialize_library)

OUT = Path(__file__).resolve().parent.parent / "src" / "proofminer" / "data"

SET, PROP, TYPE = Sort(1), Sort(2), Sort(3)
N, V = Name, Var


def ap(head, *args):
    return App(N(head) if isinstance(head, str) else head, tuple(args))


def arr(*ts):
    out = ts[-1]
    for t in reversed(ts[:-1]):
        out = Arrow(t, out)
    return out


def binders(bs):
    return tuple((V(x), ty) for x, ty in bs)


def forall(bs, body):
    return Forall(binders(bs), body)


def fun(bs, body):
    return Fun(binders(bs), body)


def fix(name, bs, body, ret=None):
    return Fix(V(name), binders(bs), body, ret)


def match(scrutinees, *arms):
    return Match(tuple(scrutinees), tuple(Branch(tuple(p), rhs) for p, rhs in arms))


def obj(name, kind, statement, body=None, script=None):
    return LibraryObject(name, kind, flatten(statement), flatten(body) if body is not None else None,
                         script)


def script(*steps):
    return TacticScript(tuple(TacticStep(t, tuple(TacticArg(k, v) for k, v in args)) for t, args in steps))


def running_example():
    nat = N("nat")
    return Library((
        obj("nat", "definition", SET),
        obj("+", "definition", arr(nat, nat, nat)),
        obj("even", "definition", arr(nat, PROP)),
        obj("odd", "definition", arr(nat, PROP)),
        obj("even_odd", "lemma",
            forall([("n", nat), ("H", ap("even", V("n")))], ap("odd", ap("+", V("n"), N("1"))))),
    ))


def assoc():
    """nat/list prelude, the two associativity theorems and ten unrelated objects."""
    nat, A = N("nat"), N("A")
    lst = ap("list", A)
    p = lambda a, b: ap("+", a, b)
    c = lambda a, b: ap("++", a, b)
    l, m, n = V("l"), V("m"), V("n")
    f, g, x = V("f"), V("g"), V("x")
    return Library((
        obj("nat", "definition", SET),
        obj("A", "definition", TYPE),
        obj("list", "definition", arr(TYPE, TYPE)),
        obj("eq", "definition", forall([("T", TYPE)], arr(V("T"), V("T"), PROP))),
        obj("+", "definition", arr(nat, nat, nat)),
        obj("nat_refl", "lemma", forall([("n", nat)], ap("eq", n, n))),
        obj("double", "definition", arr(nat, nat), fun([("n", nat)], p(n, n))),
        obj("twice", "definition", arr(arr(nat, nat), nat, nat),
            fun([("f", arr(nat, nat)), ("n", nat)], App(f, (App(f, (n,)),)))),
        obj("plus_assoc", "theorem",
            forall([("l", nat), ("m", nat), ("n", nat)], ap("eq", p(l, p(m, n)), p(p(l, m), n)))),
        obj("++", "definition", arr(lst, lst, lst)),
        obj("plus_O_n", "lemma", forall([("n", nat)], ap("eq", p(N("0"), n), n))),
        obj("quadruple", "definition", arr(nat, nat),
            fun([("n", nat)], Let(V("m", nat), p(n, n), p(V("m"), V("m"))))),
        obj("compose", "definition", arr(arr(nat, nat), arr(nat, nat), nat, nat),
            fun([("f", arr(nat, nat)), ("g", arr(nat, nat)), ("x", nat)], App(f, (App(g, (x,)),)))),
        obj("app_refl", "lemma", forall([("l", lst)], ap("eq", l, l))),
        obj("apply_list", "definition", arr(arr(lst, lst), lst, lst),
            fun([("f", arr(lst, lst)), ("l", lst)], App(f, (l,)))),
        obj("id_nat", "definition", arr(nat, nat), fun([("n", nat)], n)),
        obj("flip", "definition", arr(arr(nat, nat, nat), nat, nat, nat),
            fun([("f", arr(nat, nat, nat)), ("n", nat), ("m", nat)], App(f, (m, n)))),
        obj("app_assoc", "theorem",
            forall([("l", lst), ("m", lst), ("n", lst)], ap("eq", c(l, c(m, n)), c(c(l, m), n)))),
    ))


def clusters():
    """Analogues of the equality, take/drop and foldr clusters, with two foldr anti-examples."""
    nat, seq, boolT = N("nat"), N("seq"), N("bool")
    O, S, nil, cons = N("O"), (lambda t: ap("S", t)), N("nil"), (lambda a, b: ap("cons", a, b))
    m, n, m1, n1 = V("m"), V("n"), V("m'"), V("n'")
    s, s1, s2, s1p, s2p, sp = V("s"), V("s1"), V("s2"), V("s1'"), V("s2'"), V("s'")
    x, x1, x2, w = V("x"), V("x1"), V("x2"), V("_")
    A, R = V("A"), V("R")
    foldr_ty = forall([("A", SET), ("R", SET)], arr(arr(A, R, R), R, seq, R))
    return Library((
        obj("nat", "definition", SET),
        obj("O", "definition", nat),
        obj("S", "definition", arr(nat, nat)),
        obj("bool", "definition", SET),
        obj("true", "definition", boolT),
        obj("false", "definition", boolT),
        obj("seq", "definition", SET),
        obj("nil", "definition", seq),
        obj("cons", "definition", arr(nat, seq, seq)),
        obj("addn", "fixpoint", arr(nat, nat, nat),
            fix("addn", [("m", nat), ("n", nat)],
                match([m], ([O], n), ([S(m1)], S(ap("addn", m1, n)))))),
        obj("cat", "fixpoint", arr(seq, seq, seq),
            fix("cat", [("s1", seq), ("s2", seq)],
                match([s1], ([nil], s2), ([cons(x, s1p)], cons(x, ap("cat", s1p, s2)))))),
        obj("eqn", "fixpoint", arr(nat, nat, boolT),
            fix("eqn", [("m", nat), ("n", nat)],
                match([m, n], ([O, O], N("true")), ([S(m1), S(n1)], ap("eqn", m1, n1)),
                      ([w, w], N("false"))))),
        obj("drop", "fixpoint", arr(nat, seq, seq),
            fix("drop", [("n", nat), ("s", seq)],
                match([s, n], ([cons(w, sp), S(n1)], ap("drop", n1, sp)), ([w, w], s)))),
        obj("foldr", "fixpoint", foldr_ty,
            fun([("A", SET), ("R", SET)],
                fix("foldr", [("f", arr(A, R, R)), ("z", R), ("s", seq)],
                    match([s], ([nil], V("z")),
                          ([cons(x, sp)], App(V("f"), (x, ap("foldr", V("f"), V("z"), sp)))))))),
        obj("eqseq", "fixpoint", arr(seq, seq, boolT),
            fix("eqseq", [("s1", seq), ("s2", seq)],
                match([s1, s2], ([nil, nil], N("true")), ([cons(x1, s1p), cons(x2, s2p)], ap("eqseq", s1p, s2p)),
                      ([w, w], N("false"))))),
        obj("take", "fixpoint", arr(nat, seq, seq),
            fix("take", [("n", nat), ("s", seq)],
                match([s, n], ([cons(x, sp), S(n1)], cons(x, ap("take", n1, sp))), ([w, w], nil)))),
        obj("flatten", "definition", arr(seq, seq), ap("foldr", N("cat"), nil)),
        obj("allpairs", "definition", arr(seq, seq, seq),
            fun([("s", seq), ("t", seq)],
                ap("foldr", fun([("x", nat), ("r", seq)], ap("cat", V("t"), V("r"))), nil, s))),
        obj("sumn", "definition", arr(seq, nat), ap("foldr", N("addn"), O)),
        obj("divisors", "definition", arr(seq, seq),
            fun([("s", seq)], ap("foldr", N("cons"), cons(S(O), nil), s))),
    ))


def interchange():
    """Interchange lemmas for four operations and their auxiliary lemmas."""
    nat = N("nat")
    m, n, p, q = V("m"), V("n"), V("p"), V("q")
    objs = [
        obj("nat", "definition", SET),
        obj("bool", "definition", SET),
        obj("O", "definition", nat),
        obj("true", "definition", N("bool")),
        obj("false", "definition", N("bool")),
        obj("eq", "definition", arr(nat, nat, PROP)),
        obj("leq", "definition", arr(nat, nat, N("bool"))),
    ]
    ops = ["addn", "muln", "minn", "maxn"]
    for op in ["addn", "subn", "muln", "divn", "minn", "maxn"]:
        objs.append(obj(op, "definition", arr(nat, nat, nat)))
    names = {
        "addn": ("addnA", "addnCA", "addnACA"),
        "muln": ("mulnA", "mulnAC", "mulnACA"),
        "minn": ("minnA", "minnAC", "minnACA"),
        "maxn": ("maxnA", "maxnAC", "maxnACA"),
    }
    three = [("m", nat), ("n", nat), ("p", nat)]
    for op in ops:
        f = lambda a, b, op=op: ap(op, a, b)
        assoc_name, ca_name, _ = names[op]
        objs.append(obj(assoc_name, "lemma", forall(three, ap("eq", f(m, f(n, p)), f(f(m, n), p)))))
        objs.append(obj(ca_name, "lemma", forall(three, ap("eq", f(m, f(n, p)), f(n, f(m, p))))))
    for op in ["addn", "minn", "muln", "maxn"]:
        f = lambda a, b, op=op: ap(op, a, b)
        assoc_name, ca_name, aca_name = names[op]
        stmt = forall([("m", nat), ("n", nat), ("p", nat), ("q", nat)],
                      ap("eq", f(f(m, n), f(p, q)), f(f(m, p), f(n, q))))
        proof = None
        if op != "maxn":
            proof = script(("move=>", [("literal", "m"), ("literal", "n"), ("literal", "p"), ("literal", "q")]),
                           ("rewrite", [("lemma", assoc_name), ("lemma", ca_name), ("hypothesis", "n")]))
        objs.append(obj(aca_name, "lemma", stmt, script=proof))
    return Library(tuple(objs))


FIXTURES = {
    "running_example": running_example,
    "assoc": assoc,
    "clusters": clusters,
    "interchange": interchange,
}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, build in FIXTURES.items():
        lib = build()
        (OUT / f"{name}.json").write_text(serialize_library(lib, indent=1) + "\n")
        print(f"{name}: {len(lib)} objects")


if __name__ == "__main__":
    main()
