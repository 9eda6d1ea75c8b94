"""Cluster the interchange library and let premiss selection prove maxnACA.

The checker is the bundled stub, told to accept exactly one script.

    python demos/interchange_walkthrough.py
"""
import json
import sys
import tempfile

from proofminer.fixtures import fixture_path, load_fixture
from proofminer.premiss import CheckerConfig, substitution_pairs, suggest
from proofminer.recurrent import recurrent_cluster
from proofminer.terms import resolve_types

lib = load_fixture("interchange")
result = recurrent_cluster(resolve_types(lib), g=5, seed=0)
print(f"{len(lib)} objects, k={result.model.k}")
for j, members in enumerate(result.model.clusters()):
    print(f"  cluster {j}: {', '.join(result.names[i] for i in members)}")

with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
    json.dump({"maxnACA": ["move=> m n p q; rewrite maxnA maxnAC n"]}, fh)
checker = CheckerConfig([sys.executable, "-m", "proofminer.checker", fh.name])
report = suggest("maxnACA", lib, result.model, checker, fixture_path("interchange"))

print(f"\nmaxnACA: {report.tried} checker call(s)")
for rank, outcome in report.attempts:
    print(f"  #{rank:<3} {outcome:9} {report.candidates_ranked[rank].script.render()}")
if report.accepted is not None:
    print("substitutions:", substitution_pairs(report.accepted))
