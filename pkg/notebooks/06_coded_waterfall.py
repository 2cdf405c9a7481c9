"""
Coded multilevel waterfall
==========================

Rates designed at 27 dB with kappa_phi = 1600, IRA-LDPC component codes of
4096 bits, multistage decoding over the sweep.
"""

# %%
from rapsk import SimConfig, run
from rapsk.simulation import build_scheme

cfg = SimConfig(mode="coded", n=8, k=32, r0=0.6, snr_start=27.0, snr_stop=29.5, snr_step=0.5,
                kappa_phi=1600.0, trials=40, target_errors=300, t=4096, design_snr_db=27.0, seed=3)
scheme, design = build_scheme(cfg)
print("rates per step:", [str(r) for r in design.quantized], "overall %.3f" % design.overall_rate)

# %%
for row in run(cfg):
    print(f"{row.snr_db:5.2f} dB  BER {row.ber:.2e}  ({row.bit_errors} errors in {row.trials // cfg.t} blocks)"
          f"  per level {row.per_level_errors}")
