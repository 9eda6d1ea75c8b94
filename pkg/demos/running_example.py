"""Walk the small running example: term tree, feature matrix and cluster values.

    python demos/running_example.py
"""
import numpy as np

from proofminer.fixtures import load_fixture
from proofminer.recurrent import recurrent_cluster
from proofminer.terms import render, resolve_types
from proofminer.tree import build_term_tree

lib = resolve_types(load_fixture("running_example"))
lemma = lib.objects[-1]
print(f"{lemma.name} : {render(lemma.statement)}\n")

tree = build_term_tree(lemma.term)
print("term tree (breadth first):")
print(tree.dump(), "\n")

result = recurrent_cluster(lib, g=3, seed=0)
m = result.matrix_of(lemma.name)
np.set_printoptions(precision=3, suppress=True, linewidth=120)
print(f"feature matrix {m.dims[0]}x{m.dims[1]}, one (term, type, parent) triple per cell:")
for i, row in enumerate(m.values):
    print(f"  depth {i}:", "  ".join(f"({t:g}, {ty:g}, {p:g})" for t, ty, p in row))

print("\nflattened vector:", result.vectors[result.names.index(lemma.name)])
