# %% [markdown]
# State-vector basics: single-qubit rotations, the CNOT ring, and Z readout.

# %%
import numpy as np

from qgcnn.circuits import entangling_layer, run_block
from qgcnn.statevector import RotationTriple, apply_cnot, apply_rot, apply_ry, expect_z, init_zero

# %%
# Ry(theta)|0> has <Z> = cos(theta)
for theta in (0.0, 0.7, np.pi / 2, np.pi):
    s = apply_ry(init_zero(1), 0, theta)
    print(f"theta={theta:.3f}  <Z>={expect_z(s, 0):+.6f}  cos={np.cos(theta):+.6f}")

# %%
# Rot(a, b, g) = Rz(g) Ry(b) Rz(a); only b changes populations
s = apply_rot(init_zero(1), 0, RotationTriple(0.4, 1.1, -2.0))
print("Rot <Z>", expect_z(s, 0), "vs cos(1.1)", np.cos(1.1))

# %%
# CNOT with qubit 0 as control; qubit 0 is the most significant bit
for bits in range(4):
    s = init_zero(2)
    s.amplitudes[:] = 0
    s.amplitudes[bits] = 1
    out = int(np.flatnonzero(apply_cnot(s, 0, 1).amplitudes)[0])
    print(f"|{bits:02b}> -> |{out:02b}>")

# %%
# the ring maps |100> through CNOT(0,1), CNOT(1,2), CNOT(2,0)
s = init_zero(3)
s.amplitudes[:] = 0
s.amplitudes[0b100] = 1
print("ring |100> ->", f"|{int(np.flatnonzero(entangling_layer(s).amplitudes)[0]):03b}>")

# %%
# a full variational block on 10 qubits, three repeats of (ring, Rot on every qubit)
rng = np.random.default_rng(0)
angles = rng.uniform(-np.pi, np.pi, (3, 10, 3))
print("block <Z_k>:", np.round(run_block(init_zero(10), angles), 4))
