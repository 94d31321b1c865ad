"""Search homogeneous tetrahedra for one that rolls over two edges in a row before settling."""
import numpy as np

from monotet.geometry import FACES
from monotet.tipping import heppes_search, tumble_sequence

hit = heppes_search(np.random.default_rng(2), max_samples=10**6)
t, start, used = hit
print(f"found after {used} random tetrahedra")
for f in FACES:
    trace = tumble_sequence(t, t.centroid, f)
    steps = " -> ".join(f"{face} ({h:.2f} mm)" for face, h in trace.steps)
    print(f"  start {f}: {steps}")
