"""
Size-independent soft demapping
===============================

At every multistage level the candidates sit on the even and odd integers of
a normalised axis, so one cosine gives the LLR whatever the constellation
size. Here it is set against the exact sum over surviving candidates.
"""

# %%
import numpy as np
from scipy.stats import spearmanr

from rapsk.mlcodec import llr_exact, llr_fast, normalize_level

# %%
q, sigma = 3, 0.3
y = np.linspace(-1, 8, 10)
for i in range(1, q + 1):
    prefix = 0
    fast = llr_fast(normalize_level(y, prefix, i, sigma, upper=2 ** (q - i + 1) - 1))
    exact = llr_exact(y, prefix, i, q, sigma)
    print(f"level {i}")
    for a, f, e in zip(y, fast, exact):
        print(f"  y={a:5.2f}  fast={f:+8.3f}  exact={e:+8.3f}")

# %% [markdown]
# Rank agreement over a dense grid, for every level and prefix.

# %%
for q in (1, 2, 3):
    for sigma in (0.05, 0.1, 0.2, 0.4):
        y = np.linspace(-3 * sigma, 2 ** q - 1 + 3 * sigma, 1000)
        pairs = [(llr_fast(normalize_level(y, p, i, sigma, upper=2 ** (q - i + 1) - 1)), llr_exact(y, p, i, q, sigma))
                 for i in range(1, q + 1) for p in range(2 ** (i - 1))]
        rho = spearmanr(np.concatenate([a for a, _ in pairs]), np.concatenate([b for _, b in pairs])).statistic
        print(f"Q={q} sigma={sigma:.2f}  Spearman {rho:.5f}")
