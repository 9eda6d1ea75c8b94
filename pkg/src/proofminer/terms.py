"""Term language, library container, JSON reader/writer and type resolution.

Terms follow the usual pCIC grammar (sorts, global names, variables,
``forall``/``fun`` binders, arrows, applications, ``let``) extended with
``fix`` and ``match``.  n-ary binders and applications are always stored
flattened: ``forall (x1:T1) (x2:T2), U`` is one :class:`Forall` node and
``((f a) b)`` is ``App(f, (a, b))``.

After :func:`resolve_types` every :class:`Name` and :class:`Var` leaf carries
its type in ``.type`` (itself a resolved term) and a ``recursive`` flag set on
self references.  Parsed, unresolved terms simply leave those fields empty.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import (
    ArityError,
    DuplicateName,
    ForwardReference,
    ParseError,
    TypeResolutionError,
    UnboundVariable,
    UnknownName,
)

# Sort ordinals: Set = 1, Prop = 2, Type(i) = i + 3.
SET, PROP, TYPE0 = 1, 2, 3

OBJECT_KINDS = ("definition", "fixpoint", "lemma", "theorem")
ARG_KINDS = ("lemma", "hypothesis", "literal")


@dataclass(frozen=True)
class Sort:
    index: int

    @property
    def label(self):
        if self.index == SET:
            return "Set"
        if self.index == PROP:
            return "Prop"
        return f"Type({self.index - TYPE0})"

    def sort_type(self):
        """Set:Type(0), Prop:Type(0), Type(i):Type(i+1)."""
        if self.index in (SET, PROP):
            return Sort(TYPE0)
        return Sort(self.index + 1)


@dataclass(frozen=True)
class Name:
    ident: str
    type: Optional["Term"] = None
    recursive: bool = False


@dataclass(frozen=True)
class Var:
    ident: str
    type: Optional["Term"] = None
    recursive: bool = False


@dataclass(frozen=True)
class Forall:
    binders: tuple  # ((Var, Term), ...)
    body: "Term"


@dataclass(frozen=True)
class Fun:
    binders: tuple
    body: "Term"


@dataclass(frozen=True)
class Arrow:
    src: "Term"
    dst: "Term"


@dataclass(frozen=True)
class App:
    head: "Term"
    args: tuple


@dataclass(frozen=True)
class Let:
    var: Var  # var.type is the optional annotation of the bound value
    value: "Term"
    body: "Term"


@dataclass(frozen=True)
class Fix:
    name: Var
    binders: tuple
    body: "Term"
    return_type: Optional["Term"] = None


@dataclass(frozen=True)
class Branch:
    patterns: tuple  # one pattern per scrutinee
    rhs: "Term"


@dataclass(frozen=True)
class Match:
    scrutinees: tuple
    branches: tuple


Term = Union[Sort, Name, Var, Forall, Fun, Arrow, App, Let, Fix, Match]
ATOMS = (Sort, Name, Var)


def is_literal(ident):
    return ident.isdigit()


def sort_from_label(label):
    if label == "Set":
        return Sort(SET)
    if label == "Prop":
        return Sort(PROP)
    if label == "Type":
        return Sort(TYPE0)
    m = re.fullmatch(r"Type\((\d+)\)", label)
    if m:
        return Sort(TYPE0 + int(m.group(1)))
    raise ParseError(f"unknown sort {label!r}")


# ---------------------------------------------------------------------------
# flattening


def flatten(t):
    """Merge nested binders of the same kind and nested applications."""
    if isinstance(t, (Forall, Fun)):
        binders = tuple((v, flatten(ty)) for v, ty in t.binders)
        body = flatten(t.body)
        if type(body) is type(t):
            return type(t)(binders + body.binders, body.body)
        return type(t)(binders, body)
    if isinstance(t, App):
        head = flatten(t.head)
        args = tuple(flatten(a) for a in t.args)
        if isinstance(head, App):
            return App(head.head, head.args + args)
        return App(head, args)
    if isinstance(t, Arrow):
        return Arrow(flatten(t.src), flatten(t.dst))
    if isinstance(t, Let):
        return Let(t.var, flatten(t.value), flatten(t.body))
    if isinstance(t, Fix):
        rt = flatten(t.return_type) if t.return_type is not None else None
        return Fix(t.name, tuple((v, flatten(ty)) for v, ty in t.binders), flatten(t.body), rt)
    if isinstance(t, Match):
        return Match(
            tuple(flatten(s) for s in t.scrutinees),
            tuple(Branch(tuple(flatten(p) for p in b.patterns), flatten(b.rhs)) for b in t.branches),
        )
    return t


# ---------------------------------------------------------------------------
# rendering

def _wrap(t):
    s = render(t)
    return s if isinstance(t, ATOMS) else f"({s})"


def render(t):
    if isinstance(t, Sort):
        return t.label
    if isinstance(t, (Name, Var)):
        return t.ident
    if isinstance(t, Forall):
        bs = " ".join(f"({v.ident} : {render(ty)})" for v, ty in t.binders)
        return f"forall {bs}, {render(t.body)}"
    if isinstance(t, Fun):
        bs = " ".join(f"({v.ident} : {render(ty)})" for v, ty in t.binders)
        return f"fun {bs} => {render(t.body)}"
    if isinstance(t, Arrow):
        src = render(t.src) if isinstance(t.src, (Sort, Name, Var, App)) else f"({render(t.src)})"
        return f"{src} -> {render(t.dst)}"
    if isinstance(t, App):
        return " ".join([_wrap(t.head)] + [_wrap(a) for a in t.args])
    if isinstance(t, Let):
        return f"let {t.var.ident} := {render(t.value)} in {render(t.body)}"
    if isinstance(t, Fix):
        bs = " ".join(f"({v.ident} : {render(ty)})" for v, ty in t.binders)
        return f"fix {t.name.ident} {bs} := {render(t.body)}"
    if isinstance(t, Match):
        scr = ", ".join(render(s) for s in t.scrutinees)
        arms = " ".join(
            f"| {', '.join(render(p) for p in b.patterns)} => {render(b.rhs)}" for b in t.branches
        )
        return f"match {scr} with {arms} end"
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# library


@dataclass(frozen=True)
class TacticArg:
    kind: str
    value: str


@dataclass(frozen=True)
class TacticStep:
    tactic: str
    args: tuple = ()

    def render(self):
        return " ".join([self.tactic] + [a.value for a in self.args])


@dataclass(frozen=True)
class TacticScript:
    steps: tuple

    def render(self):
        return "; ".join(s.render() for s in self.steps)

    def to_json(self):
        return [
            {"tactic": s.tactic, "args": [{"kind": a.kind, "value": a.value} for a in s.args]}
            for s in self.steps
        ]

    @classmethod
    def from_json(cls, steps):
        return cls(
            tuple(
                TacticStep(s["tactic"], tuple(TacticArg(a["kind"], a["value"]) for a in s.get("args", [])))
                for s in steps
            )
        )


@dataclass(frozen=True)
class LibraryObject:
    name: str
    kind: str
    statement: Term
    body: Optional[Term] = None
    proof_script: Optional[TacticScript] = None

    @property
    def term(self):
        """The term that gets mined: the body when there is one, else the statement."""
        return self.body if self.body is not None else self.statement


@dataclass(frozen=True)
class Library:
    objects: tuple = ()

    def __len__(self):
        return len(self.objects)

    def __iter__(self):
        return iter(self.objects)

    @property
    def names(self):
        return [o.name for o in self.objects]

    def index_of(self, name):
        for i, o in enumerate(self.objects):
            if o.name == name:
                return i
        raise KeyError(name)

    def get(self, name):
        return self.objects[self.index_of(name)]


def top_binders(statement):
    """Names bound by the leading forall(s) of a statement."""
    names = []
    t = statement
    while isinstance(t, Forall):
        names.extend(v.ident for v, _ in t.binders)
        t = t.body
    return names


# ---------------------------------------------------------------------------
# JSON term format


def _need(node, key, path):
    if key not in node:
        raise ParseError(f"missing field {key!r}", path=path)
    return node[key]


def _binders(node, path):
    raw = _need(node, "binders", path)
    if not isinstance(raw, list):
        raise ParseError("binders must be a list", path=path)
    if not raw:
        raise ArityError("empty binder list", path=path)
    out = []
    for i, b in enumerate(raw):
        p = f"{path}.binders[{i}]"
        out.append((Var(_need(b, "var", p)), _parse(_need(b, "type", p), p + ".type")))
    return tuple(out)


def _parse(node, path):
    if not isinstance(node, dict):
        raise ParseError("term node must be an object", path=path)
    tag = node.get("tag")
    if tag == "sort":
        try:
            return sort_from_label(_need(node, "value", path))
        except ParseError as e:
            raise ParseError(str(e), path=path) from None
    if tag == "name":
        return Name(_need(node, "id", path))
    if tag == "var":
        ty = node.get("type")
        return Var(_need(node, "id", path), _parse(ty, path + ".type") if ty is not None else None)
    if tag == "forall":
        return Forall(_binders(node, path), _parse(_need(node, "body", path), path + ".body"))
    if tag == "fun":
        return Fun(_binders(node, path), _parse(_need(node, "body", path), path + ".body"))
    if tag == "arrow":
        return Arrow(_parse(_need(node, "from", path), path + ".from"),
                     _parse(_need(node, "to", path), path + ".to"))
    if tag == "app":
        args = _need(node, "args", path)
        if not isinstance(args, list):
            raise ParseError("args must be a list", path=path)
        if not args:
            raise ArityError("application without arguments", path=path)
        return App(_parse(_need(node, "head", path), path + ".head"),
                   tuple(_parse(a, f"{path}.args[{i}]") for i, a in enumerate(args)))
    if tag == "let":
        ty = node.get("type")
        var = Var(_need(node, "var", path), _parse(ty, path + ".type") if ty is not None else None)
        return Let(var, _parse(_need(node, "value", path), path + ".value"),
                   _parse(_need(node, "body", path), path + ".body"))
    if tag == "fix":
        rt = node.get("return_type")
        return Fix(Var(_need(node, "name", path)), _binders(node, path),
                   _parse(_need(node, "body", path), path + ".body"),
                   _parse(rt, path + ".return_type") if rt is not None else None)
    if tag == "match":
        scr = _need(node, "scrutinees", path)
        if not scr:
            raise ArityError("match without scrutinees", path=path)
        scrutinees = tuple(_parse(s, f"{path}.scrutinees[{i}]") for i, s in enumerate(scr))
        branches = []
        for i, b in enumerate(_need(node, "branches", path)):
            p = f"{path}.branches[{i}]"
            pats = _need(b, "patterns", p)
            if len(pats) != len(scrutinees):
                raise ArityError("pattern count differs from scrutinee count", path=p)
            branches.append(Branch(tuple(_parse(x, f"{p}.patterns[{j}]") for j, x in enumerate(pats)),
                                   _parse(_need(b, "rhs", p), p + ".rhs")))
        if not branches:
            raise ArityError("match without branches", path=path)
        return Match(scrutinees, tuple(branches))
    raise ParseError(f"unknown term tag {tag!r}", path=path)


def parse_term(node, path="term"):
    """Build a flattened :data:`Term` from a JSON term node (already decoded)."""
    return flatten(_parse(node, path))


def _binders_json(binders):
    return [{"var": v.ident, "type": term_to_json(ty)} for v, ty in binders]


def term_to_json(t):
    if isinstance(t, Sort):
        return {"tag": "sort", "value": t.label}
    if isinstance(t, Name):
        return {"tag": "name", "id": t.ident}
    if isinstance(t, Var):
        node = {"tag": "var", "id": t.ident}
        if t.type is not None:
            node["type"] = term_to_json(t.type)
        return node
    if isinstance(t, Forall):
        return {"tag": "forall", "binders": _binders_json(t.binders), "body": term_to_json(t.body)}
    if isinstance(t, Fun):
        return {"tag": "fun", "binders": _binders_json(t.binders), "body": term_to_json(t.body)}
    if isinstance(t, Arrow):
        return {"tag": "arrow", "from": term_to_json(t.src), "to": term_to_json(t.dst)}
    if isinstance(t, App):
        return {"tag": "app", "head": term_to_json(t.head), "args": [term_to_json(a) for a in t.args]}
    if isinstance(t, Let):
        node = {"tag": "let", "var": t.var.ident, "value": term_to_json(t.value), "body": term_to_json(t.body)}
        if t.var.type is not None:
            node["type"] = term_to_json(t.var.type)
        return node
    if isinstance(t, Fix):
        node = {"tag": "fix", "name": t.name.ident, "binders": _binders_json(t.binders),
                "body": term_to_json(t.body)}
        if t.return_type is not None:
            node["return_type"] = term_to_json(t.return_type)
        return node
    if isinstance(t, Match):
        return {
            "tag": "match",
            "scrutinees": [term_to_json(s) for s in t.scrutinees],
            "branches": [{"patterns": [term_to_json(p) for p in b.patterns], "rhs": term_to_json(b.rhs)}
                         for b in t.branches],
        }
    raise TypeError(f"not a term: {t!r}")


def global_names(t):
    """Identifiers of all Name leaves in t, in preorder."""
    out = []

    def walk(u):
        if isinstance(u, Name):
            out.append(u.ident)
        elif isinstance(u, (Forall, Fun)):
            for _, ty in u.binders:
                walk(ty)
            walk(u.body)
        elif isinstance(u, Arrow):
            walk(u.src)
            walk(u.dst)
        elif isinstance(u, App):
            walk(u.head)
            for a in u.args:
                walk(a)
        elif isinstance(u, Let):
            if u.var.type is not None:
                walk(u.var.type)
            walk(u.value)
            walk(u.body)
        elif isinstance(u, Fix):
            for _, ty in u.binders:
                walk(ty)
            if u.return_type is not None:
                walk(u.return_type)
            walk(u.body)
        elif isinstance(u, Match):
            for s in u.scrutinees:
                walk(s)
            for b in u.branches:
                for p in b.patterns:
                    walk(p)
                walk(b.rhs)
        elif isinstance(u, Var) and u.type is not None:
            walk(u.type)

    walk(t)
    return out


def library_from_dict(data):
    if not isinstance(data, dict) or not isinstance(data.get("objects"), list):
        raise ParseError('library must be an object with an "objects" list')
    raw = data["objects"]
    position = {}
    for i, o in enumerate(raw):
        name = o.get("name") if isinstance(o, dict) else None
        if not isinstance(name, str) or not name:
            raise ParseError("object without a name", path=f"objects[{i}]")
        if name in position:
            raise DuplicateName(f"duplicate object name {name!r}", path=f"objects[{i}]")
        position[name] = i

    objects = []
    for i, o in enumerate(raw):
        path = f"objects[{i}]"
        kind = o.get("kind")
        if kind not in OBJECT_KINDS:
            raise ParseError(f"unknown object kind {kind!r}", path=path)
        statement = parse_term(_need(o, "statement", path), path + ".statement")
        body = o.get("body")
        body = parse_term(body, path + ".body") if body is not None else None
        for part in (statement, body):
            if part is None:
                continue
            for ident in global_names(part):
                j = position.get(ident)
                if j is not None and j > i:
                    raise ForwardReference(
                        f"{o['name']!r} refers to {ident!r}, which is defined later", path=path)
        script = o.get("proof_script")
        if script is not None:
            script = TacticScript.from_json(script)
            hyps = set(top_binders(statement))
            for step in script.steps:
                for arg in step.args:
                    if arg.kind not in ARG_KINDS:
                        raise ParseError(f"unknown tactic argument kind {arg.kind!r}", path=path)
                    if arg.kind == "lemma" and arg.value not in position:
                        raise ParseError(f"tactic argument names unknown lemma {arg.value!r}", path=path)
                    if arg.kind == "hypothesis" and arg.value not in hyps:
                        raise ParseError(f"{arg.value!r} is not a binder of {o['name']!r}", path=path)
        objects.append(LibraryObject(o["name"], kind, statement, body, script))
    return Library(tuple(objects))


def parse_library(text):
    """Parse the JSON library format into a :class:`Library`."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, line=e.lineno, column=e.colno) from None
    return library_from_dict(data)


def library_to_dict(lib):
    return {
        "objects": [
            {
                "name": o.name,
                "kind": o.kind,
                "statement": term_to_json(o.statement),
                "body": term_to_json(o.body) if o.body is not None else None,
                "proof_script": o.proof_script.to_json() if o.proof_script is not None else None,
            }
            for o in lib.objects
        ]
    }


def serialize_library(lib, indent=None):
    return json.dumps(library_to_dict(lib), indent=indent)


def load_library(path):
    with open(path, encoding="utf-8") as fh:
        return parse_library(fh.read())


# ---------------------------------------------------------------------------
# type resolution


def domains(ty):
    """Argument types of a (possibly dependent) function type, outermost first."""
    out = []
    while True:
        if isinstance(ty, Forall):
            out.extend(t for _, t in ty.binders)
            ty = ty.body
        elif isinstance(ty, Arrow):
            out.append(ty.src)
            ty = ty.dst
        else:
            return out, ty


def apply_type(ty, nargs):
    """Result type of applying something of type ``ty`` to ``nargs`` arguments (no substitution)."""
    doms, _ = domains(ty)
    if nargs > len(doms):
        return None
    t = ty
    for _ in range(nargs):
        if isinstance(t, Forall):
            rest = t.binders[1:]
            t = Forall(rest, t.body) if rest else t.body
        else:
            t = t.dst
    return t


def type_of(t):
    """Cheap type synthesis for resolved terms; None when it would need real inference."""
    if isinstance(t, Sort):
        return t.sort_type()
    if isinstance(t, (Name, Var)):
        return t.type
    if isinstance(t, App):
        ht = type_of(t.head)
        return apply_type(ht, len(t.args)) if ht is not None else None
    if isinstance(t, (Forall, Arrow)):
        return Sort(PROP)
    return None


@dataclass(frozen=True)
class TypedObject:
    index: int
    name: str
    kind: str
    statement: Term
    body: Optional[Term]
    proof_script: Optional[TacticScript]

    @property
    def term(self):
        return self.body if self.body is not None else self.statement


@dataclass(frozen=True)
class TypedLibrary:
    library: Library
    objects: tuple = field(default=())

    def __len__(self):
        return len(self.objects)

    @property
    def names(self):
        return [o.name for o in self.objects]


class _Resolver:
    def __init__(self):
        self.statements = {}
        self.current = None
        self.self_type = None

    def name(self, n):
        if n.ident == self.current:
            ty = self.self_type if self.self_type is not None else Name(n.ident, recursive=True)
            return Name(n.ident, ty, True)
        if n.ident in self.statements:
            return Name(n.ident, self.statements[n.ident])
        if is_literal(n.ident):
            if "nat" not in self.statements:
                raise UnknownName(f"numeral {n.ident} used but no 'nat' object precedes it")
            return Name(n.ident, Name("nat", self.statements["nat"]))
        raise UnknownName(f"unknown name {n.ident!r} in {self.current!r}")

    def binders(self, binders, scope):
        out = []
        scope = dict(scope)
        for v, ty in binders:
            rty = self.term(ty, scope)
            rv = Var(v.ident, rty)
            out.append((rv, rty))
            scope[v.ident] = rv
        return tuple(out), scope

    def term(self, t, scope):
        if isinstance(t, Sort):
            return t
        if isinstance(t, Name):
            return self.name(t)
        if isinstance(t, Var):
            if t.ident in scope:
                return scope[t.ident]
            raise UnboundVariable(f"unbound variable {t.ident!r} in {self.current!r}")
        if isinstance(t, (Forall, Fun)):
            bs, inner = self.binders(t.binders, scope)
            return type(t)(bs, self.term(t.body, inner))
        if isinstance(t, Arrow):
            return Arrow(self.term(t.src, scope), self.term(t.dst, scope))
        if isinstance(t, App):
            return App(self.term(t.head, scope), tuple(self.term(a, scope) for a in t.args))
        if isinstance(t, Let):
            value = self.term(t.value, scope)
            if t.var.type is not None:
                ty = self.term(t.var.type, scope)
            else:
                ty = type_of(value)
                if ty is None:
                    raise TypeResolutionError(
                        f"cannot infer the type of let-bound {t.var.ident!r}; add a type annotation")
            v = Var(t.var.ident, ty)
            return Let(v, value, self.term(t.body, {**scope, v.ident: v}))
        if isinstance(t, Fix):
            bs, inner = self.binders(t.binders, scope)
            rt = self.term(t.return_type, inner) if t.return_type is not None else None
            if t.name.ident == self.current:
                ty = self.self_type if self.self_type is not None else Name(self.current, recursive=True)
                fv = Var(t.name.ident, ty, True)
            elif rt is not None:
                fv = Var(t.name.ident, Forall(bs, rt))
            else:
                raise TypeResolutionError(f"local fix {t.name.ident!r} needs a return_type")
            body = self.term(t.body, {**inner, fv.ident: fv})
            return Fix(fv, bs, body, rt)
        if isinstance(t, Match):
            scr = tuple(self.term(s, scope) for s in t.scrutinees)
            branches = []
            for b in t.branches:
                inner = dict(scope)
                pats = tuple(self.pattern(p, type_of(s), inner) for p, s in zip(b.patterns, scr))
                branches.append(Branch(pats, self.term(b.rhs, inner)))
            return Match(scr, tuple(branches))
        raise TypeError(f"not a term: {t!r}")

    def pattern(self, p, expected, scope):
        # scope is extended in place with the pattern variables
        if isinstance(p, Var):
            if p.type is not None:
                ty = self.term(p.type, scope)
            elif expected is not None:
                ty = expected
            else:
                raise TypeResolutionError(f"cannot type pattern variable {p.ident!r}; annotate it")
            v = Var(p.ident, ty)
            scope[p.ident] = v
            return v
        if isinstance(p, App) and isinstance(p.head, Name):
            head = self.name(p.head)
            doms, _ = domains(head.type) if head.type is not None else ([], None)
            doms = doms[len(doms) - len(p.args):] if len(doms) >= len(p.args) else [None] * len(p.args)
            return App(head, tuple(self.pattern(a, d, scope) for a, d in zip(p.args, doms)))
        return self.term(p, scope)


def resolve_types(lib):
    """Annotate every name/variable occurrence with its type.

    Names get the (resolved) statement of the object they refer to, variables
    the type of their binder.  Occurrences of the object's own name are
    flagged ``recursive``.
    """
    r = _Resolver()
    out = []
    for i, obj in enumerate(lib.objects):
        r.current = obj.name
        r.self_type = None
        stmt = r.term(obj.statement, {})
        r.self_type = stmt
        body = r.term(obj.body, {}) if obj.body is not None else None
        r.statements[obj.name] = stmt
        out.append(TypedObject(i, obj.name, obj.kind, stmt, body, obj.proof_script))
    r.current = None
    return TypedLibrary(lib, tuple(out))


def strip_types(t):
    """Drop resolution annotations, giving back a parse-level term."""
    if isinstance(t, Name):
        return Name(t.ident)
    if isinstance(t, Var):
        return Var(t.ident)
    if isinstance(t, (Forall, Fun)):
        return type(t)(tuple((Var(v.ident), strip_types(ty)) for v, ty in t.binders), strip_types(t.body))
    if isinstance(t, Arrow):
        return Arrow(strip_types(t.src), strip_types(t.dst))
    if isinstance(t, App):
        return App(strip_types(t.head), tuple(strip_types(a) for a in t.args))
    if isinstance(t, Let):
        return Let(Var(t.var.ident), strip_types(t.value), strip_types(t.body))
    if isinstance(t, Fix):
        return Fix(Var(t.name.ident), tuple((Var(v.ident), strip_types(ty)) for v, ty in t.binders),
                   strip_types(t.body), strip_types(t.return_type) if t.return_type is not None else None)
    if isinstance(t, Match):
        return Match(tuple(strip_types(s) for s in t.scrutinees),
                     tuple(Branch(tuple(strip_types(p) for p in b.patterns), strip_types(b.rhs))
                           for b in t.branches))
    return t


__all__ = [
    "Sort", "Name", "Var", "Forall", "Fun", "Arrow", "App", "Let", "Fix", "Match", "Branch",
    "TacticArg", "TacticStep", "TacticScript", "LibraryObject", "Library", "TypedObject",
    "TypedLibrary", "parse_term", "parse_library", "load_library", "library_from_dict",
    "library_to_dict", "serialize_library", "term_to_json", "resolve_types", "render", "flatten",
    "strip_types", "type_of", "top_binders",
]
