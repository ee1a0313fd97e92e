# %% [markdown]
# End to end: generate track/shower images, train the 202-parameter QGCNN
# and the MLP baseline, and compare. The QGCNN run takes about two minutes.

# %%
import importlib

import numpy as np

from qgcnn import data

train_mod = importlib.import_module("qgcnn.train")

# %%
tr, te = data.generate(data.GeneratorConfig("track", "shower", noise_level=0.05, seed=0))
print(data.summary(tr))

# %%
def show(img):
    ramp = " .:-=+*#%@"
    img = img / img.max()
    for row in img[::2, ::1]:
        print("".join(ramp[min(int(v * 9.99), 9)] for v in row))

for lab in (0, 1):
    print(tr.class_names[lab])
    show(tr.images[np.flatnonzero(tr.labels == lab)[0]])

# %%
results = {}
for name in ("mlp", "qgcnn"):
    cfg = train_mod.TrainConfig(model=name, epochs=30)
    _, history = train_mod.train(cfg, tr, te, on_epoch=lambda m: print(
        f"{name} epoch {m.epoch:2d} train loss {m.train_loss:.4f} test acc {m.test_acc:.3f}")
        if m.epoch % 5 == 0 else None)
    results[name] = history[-1].test_acc

# %%
print({k: round(v, 3) for k, v in results.items()})
