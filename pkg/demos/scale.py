"""Time recurrent clustering on synthetic libraries of growing size.

    python demos/scale.py [max_objects]
"""
import sys
import time

from proofminer.recurrent import recurrent_cluster
from proofminer.synth import random_library

top = int(sys.argv[1]) if len(sys.argv) > 1 else 200
for n in [50, 100, 200, 457]:
    if n > top:
        break
    lib = random_library(n, seed=0)
    t0 = time.perf_counter()
    result = recurrent_cluster(lib, g=5, seed=0)
    print(f"{n:4d} objects  k={result.model.k:3d}  dims={result.dims}  {time.perf_counter() - t0:7.2f} s")
