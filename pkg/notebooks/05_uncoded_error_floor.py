"""
Uncoded SER under phase noise
=============================

Square QAM loses its outer corners to phase noise and floors; RAPSK keeps
all points of a ring on one circle and keeps improving with SNR.
"""

# %%
from rapsk import SimConfig, run

common = dict(snr_start=25.75, snr_stop=43.75, snr_step=3.0, kappa_phi=2500.0, seed=1)
qam = run(SimConfig(family="qam", qam_size=256, trials=5_000_000, target_errors=2000, **common))
ring = run(SimConfig(family="rapsk", n=8, k=32, r0=0.6, trials=200_000_000, target_errors=200, **common))

# %%
print("SNR dB    QAM SER     RAPSK SER   (RAPSK errors)")
for a, b in zip(qam, ring):
    print(f"{a.snr_db:6.2f}   {a.ser:.3e}   {b.ser:.3e}   ({b.symbol_errors})")
