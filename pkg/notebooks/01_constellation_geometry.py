"""
RAPSK geometry and PAPR
=======================

Build a few constellations, check the power normalisation and see how the
peak-to-average power ratio moves with the inner radius.
"""

# %%
import numpy as np

from rapsk import RapskParams, build_qam, build_rapsk, int_to_bits, label_to_point, papr, papr_limit

# %% [markdown]
# Eight rings of 32 points with inner radius 0.6. The ring spacing is solved
# so that the mean energy is exactly one.

# %%
c = build_rapsk(RapskParams(8, 32, 0.6))
print("D =", c.d)
print("radii =", np.round(c.radii, 4))
print("mean power =", np.mean(np.abs(c.points) ** 2))
print("PAPR = %.4f (%.2f dB)" % (papr(c), 10 * np.log10(papr(c))))

# %%
qam = build_qam(256)
print("256-QAM PAPR = %.4f, ratio = %.3f" % (qam.papr, papr(c) / qam.papr))

# %% [markdown]
# PAPR against the inner radius. Small r0 spreads the rings and pushes the
# ratio toward its ceiling 6(N-1)/(2N-1).

# %%
for r0 in (0.1, 0.3, 0.5, 0.6, 0.7, 0.9):
    row = [papr(build_rapsk(RapskParams(n, 32, r0))) for n in (2, 4, 8, 16)]
    print(f"r0={r0:.1f}  " + "  ".join(f"{v:.3f}" for v in row))
print("limits     " + "  ".join(f"{papr_limit(n):.3f}" for n in (2, 4, 8, 16)))

# %% [markdown]
# Labels: ring bits first, then angle bits, both plain binary.

# %%
small = build_rapsk(RapskParams(2, 8, 0.5))
for label in (0, 0b1010, 0b1111):
    bits = int_to_bits(label, small.m)
    x = label_to_point(small, bits)
    print("".join(map(str, bits)), "->", f"|x|={abs(x):.4f} arg={np.angle(x) * 8 / (2 * np.pi):+.1f} * 2pi/8")
