"""
Rate design and genie-aided level errors
========================================

Per-level crossover probabilities from the Von Mises model, the resulting
code rates, and a Monte Carlo check with the true prefixes supplied.
"""

# %%
import numpy as np

from rapsk import ChannelParams, RapskParams, build_rapsk, design_rates, genie_level_errors, quantize_rates
from rapsk.numerics import wrapped_normal_pdf

c = build_rapsk(RapskParams(8, 32, 0.6))

# %%
for snr in (26.0, 28.0, 30.0):
    p = ChannelParams.from_snr_db(snr, 1600.0)
    d = quantize_rates(design_rates(c, p))
    g = genie_level_errors(c, p, 200_000, np.random.default_rng(int(snr)))
    print(f"SNR {snr} dB, overall rate {d.overall_rate:.3f}")
    for step, (pa, pg, r) in enumerate(zip(d.p_mean, g.levels, d.quantized)):
        print(f"  step {step + 1}: p analytic {pa:.4f}  genie {pg:.4f}  rate {r}")

# %% [markdown]
# The model replaces a wrapped Gaussian by a Von Mises law with the same first
# circular moment. Their tails differ, which is visible in the crossover
# probability itself.

# %%
from scipy import integrate

from rapsk.ratedesign import level_error_prob

for s in (0.15, 0.2, 0.3, 0.45):
    # period 2 mapped to the circle: sigma_circle = pi * s
    wn = 2 * integrate.quad(wrapped_normal_pdf, np.pi / 2, np.pi, args=(0.0, np.pi * s))[0]
    print(f"sigma_i={s:.2f}  von Mises {level_error_prob(s):.4f}  wrapped normal {wn:.4f}")
