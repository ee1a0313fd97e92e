# %% [markdown]
# Graph convolution without weights: features are summed over neighbours,
# first on a 4-node star, then on the 32x32 pixel grid.

# %%
import numpy as np

from qgcnn.data import draw_particle, pad_to
from qgcnn.graphconv import (Graph, adjacency_from_graph, add_self_loops, aggregate,
                             gaussian_pixel_adjacency)

# %%
star = adjacency_from_graph(Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)]))
f = np.array([1.0, 10.0, 100.0, 1000.0])
print("A f     =", aggregate(star, f, 1))                  # hub sums its leaves
print("(A+I) f =", aggregate(add_self_loops(star), f, 1))  # everyone keeps itself too

# %%
# pixel adjacency: Gaussian of distance in unit-square coordinates
a = gaussian_pixel_adjacency(32, 32)
print("neighbour weight", a[0, 1], " diagonal neighbour", a[0, 33], " far corner", a[0, -1])
print("nonzero above 1e-6:", int((a > 1e-6).sum()), "of", a.size)

# %%
# two hops spread a thin track into a band a few pixels wide
rng = np.random.default_rng(1)
img = pad_to(draw_particle("track", rng))
smooth = aggregate(a, img.reshape(-1), 2).reshape(32, 32)
print("pixels lit before/after:", int((img > 0).sum()), int((smooth > 1e-3 * smooth.max()).sum()))
