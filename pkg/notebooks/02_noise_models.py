"""
Radial and angular noise surrogates
===================================

Compare the Gaussian surrogates used by the demapper with Monte Carlo
statistics of the white-plus-phase-noise channel.
"""

# %%
import numpy as np

from rapsk import ChannelParams, transmit
from rapsk.channel import angular_sigma_p2, angular_sigma_w2

rng = np.random.default_rng(0)
n = 200_000

# %% [markdown]
# Radial deviation at rho_x / sigma_z = 20: the variance matches sigma_z^2,
# the mean carries the small Rician offset sigma_z^2 / (2 rho_x).

# %%
sigma = 0.05
rho_t = np.abs(transmit(np.ones(n, dtype=complex), ChannelParams(sigma ** 2), rng)) - 1
print("mean %.2e (offset model %.2e), var/sigma^2 %.4f" % (rho_t.mean(), sigma ** 2 / 2, rho_t.var() / sigma ** 2))

# %% [markdown]
# Angular variance from white noise only, against the three surrogate forms.

# %%
print("kappa_rho   empirical   paper     smooth    highsnr")
for kappa in (10.0, 30.0, 100.0, 1000.0):
    p = ChannelParams(1 / kappa)
    emp = np.var(np.angle(transmit(np.ones(n, dtype=complex), p, rng)))
    models = [angular_sigma_w2(1.0, 1.0, ChannelParams(p.sigma_z2, angular_model=m))
              for m in ("paper", "smooth", "highsnr")]
    print(f"{kappa:9.0f}   {emp:.3e}   " + "  ".join(f"{v:.3e}" for v in models))

# %% [markdown]
# Phase-noise term against the variance of the sampled phase.

# %%
for kappa_phi in (400.0, 1600.0, 10_000.0):
    phi = np.angle(transmit(np.ones(n, dtype=complex), ChannelParams(0.0, kappa_phi), rng))
    print(f"kappa_phi={kappa_phi:7.0f}  model {angular_sigma_p2(ChannelParams(0.0, kappa_phi)):.3e}  "
          f"empirical {phi.var():.3e}")
