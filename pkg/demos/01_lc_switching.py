"""Liquid-crystal phase transitions: plain drive vs over/undershoot.

Rising transitions relax with a fast time constant (5 ms) and falling ones
with a slow constant (24 ms).  Driving the cell past the target and releasing
at the right moment shortens both.  This script plots one rising and one
falling switch under each strategy and prints the release times.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from lcris.config import ScenarioConfig
from lcris.lc_dynamics import plan_switch, switched_phase_at, transition_phase

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

lc = ScenarioConfig().lc
t = np.linspace(0.0, 0.08, 2001)

cases = [
    ("rising", 0.2 * lc.omega_max, 0.8 * lc.omega_max),
    ("falling", 0.8 * lc.omega_max, 0.2 * lc.omega_max),
]

fig, axes = plt.subplots(1, 2, figsize=(9, 3.2), sharey=True)
for ax, (label, w0, wd) in zip(axes, cases):
    plain = transition_phase(lc, t, w0, wd)
    sched = plan_switch(lc, w0, wd)
    driven = switched_phase_at(sched, lc, t)
    print(f"{label}: {w0:.3f} -> {wd:.3f} rad, "
          f"release after {sched.release_time.item() * 1e3:.2f} ms "
          f"(forcing target {sched.forcing_target.item():.3f} rad)")

    ax.plot(t * 1e3, plain, label="drive at target voltage")
    ax.plot(t * 1e3, driven, label="overshoot then hold")
    ax.axhline(wd, color="k", lw=0.5, ls=":")
    ax.axvline(sched.release_time.item() * 1e3, color="k", lw=0.5, ls="--")
    ax.set_title(label)
    ax.set_xlabel("time (ms)")
axes[0].set_ylabel("phase (rad)")
axes[0].legend(fontsize=8)
fig.tight_layout()
fig.savefig(OUT / "01_lc_switching.png", dpi=150)
print("wrote", OUT / "01_lc_switching.png")
