"""Mean height of a uniform random recursive tree on 10^4 vertices.

Vertex v (0-based, v >= 1) attaches to a uniform earlier vertex. Prints the
mean height and its standard error over 2000 replicas.
"""
import numpy as np

rng = np.random.default_rng(20240601)
n, reps = 10_000, 2000
heights = np.empty(reps)
for r in range(reps):
    parent = (rng.random(n - 1) * np.arange(1, n)).astype(np.int64)
    depth = np.zeros(n, dtype=np.int64)
    for v in range(1, n):
        depth[v] = depth[parent[v - 1]] + 1
    heights[r] = depth.max()
print(heights.mean(), heights.std(ddof=1) / np.sqrt(reps), heights.std(ddof=1))
