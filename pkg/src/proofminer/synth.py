"""Seeded random libraries for scale runs and property tests.

The generated objects are well-scoped and resolvable: a small nat/bool
prelude, a few binary operations, then lemmas of the form
``forall (x1 .. xk : nat), R lhs rhs`` with random operator trees.
"""
import numpy as np

from .terms import App, Arrow, Forall, Library, LibraryObject, Name, Sort, Var, flatten

PRELUDE_OPS = 6


def _tree(rng, ops, vars_, depth):
    if depth == 0 or rng.random() < 0.3:
        return Var(vars_[int(rng.integers(len(vars_)))])
    op = ops[int(rng.integers(len(ops)))]
    return App(Name(op), (_tree(rng, ops, vars_, depth - 1), _tree(rng, ops, vars_, depth - 1)))


def random_library(n_objects, seed=0, max_depth=3):
    """A library of exactly ``n_objects`` objects (at least 4)."""
    if n_objects < 4:
        raise ValueError("need room for the prelude")
    rng = np.random.default_rng(seed)
    nat, boolT = Name("nat"), Name("bool")
    objs = [
        LibraryObject("nat", "definition", Sort(1)),
        LibraryObject("bool", "definition", Sort(1)),
        LibraryObject("eq", "definition", Arrow(nat, Arrow(nat, Sort(2)))),
        LibraryObject("leq", "definition", Arrow(nat, Arrow(nat, boolT))),
    ]
    ops = []
    for i in range(min(PRELUDE_OPS, n_objects - len(objs))):
        ops.append(f"op{i}")
        objs.append(LibraryObject(f"op{i}", "definition", Arrow(nat, Arrow(nat, nat))))
    i = 0
    while len(objs) < n_objects:
        k = int(rng.integers(1, 5))
        vars_ = [f"x{j}" for j in range(k)]
        rel = "eq" if rng.random() < 0.7 else "leq"
        body = App(Name(rel), (_tree(rng, ops, vars_, max_depth), _tree(rng, ops, vars_, max_depth)))
        stmt = Forall(tuple((Var(v), nat) for v in vars_), body)
        objs.append(LibraryObject(f"lem{i}", "lemma", flatten(stmt)))
        i += 1
    return Library(tuple(objs))
