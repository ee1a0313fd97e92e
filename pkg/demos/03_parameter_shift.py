# %% [markdown]
# Parameter-shift gradients against central finite differences, first for
# one angle and then for all 202 parameters of the model.

# %%
import numpy as np

from qgcnn.autodiff import finite_diff, finite_diff_grad, param_shift
from qgcnn.data import draw_particle, pad_to
from qgcnn.graphconv import cached_pixel_adjacency
from qgcnn.model import ModelParams, encode_images, per_sample_grads, qgcnn_loss
from qgcnn.statevector import apply_ry, expect_z, init_zero

# %%
f = lambda th: expect_z(apply_ry(init_zero(1), 0, th[0]), 0)
theta = np.array([0.3])
print("shift", param_shift(f, theta), " fd", finite_diff(f, theta), " exact", -np.sin(0.3))

# %%
rng = np.random.default_rng(7)
p = ModelParams.init(rng)
amp = encode_images(pad_to(draw_particle("shower", rng, noise_level=0.05)),
                    cached_pixel_adjacency(32, 32))
label = np.array([1])
loss, grad = per_sample_grads(p, amp, label)

loss_of = lambda v: qgcnn_loss(ModelParams.from_vector(v), amp, label)
fd = finite_diff_grad(loss_of, p.to_vector())
err = np.abs(grad[0] - fd)
print(f"loss {loss[0]:.6f}; max |shift - fd| = {err.max():.2e}")
for name, sl in (("block 1", slice(0, 90)), ("block 2", slice(90, 180)), ("readout", slice(180, 202))):
    print(f"  {name:8s} max err {err[sl].max():.2e}")
