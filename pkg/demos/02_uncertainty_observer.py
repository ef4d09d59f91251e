"""Estimating a lumped model uncertainty from the accurate rate channel.

The plant axis obeys  dv/dt = h(t) + sigma(t)  with a commanded input h and
an unknown sigma combining drag and a slowly wandering disturbance.  The
observer sees only the noisy velocity and the commanded h, and reconstructs
sigma.

Run:  python demos/02_uncertainty_observer.py
"""

import math

import numpy as np

from corrobs import ObserverParams, ObserverState, step_observer

PARAMS = ObserverParams(k3=20.0, k4=4.0, alpha_o=0.6, eps_o=1 / 1.1)
DT = 1e-3
DURATION = 60.0
VEL_NOISE = 0.001

rng = np.random.default_rng(11)


def sigma_true(t: float) -> float:
    return 0.15 * math.sin(t) + 0.1 * math.cos(0.5 * t)


def h_input(t: float) -> float:
    return 0.5 * math.sin(0.3 * t)


# integrate the true velocity alongside the observer
v = 0.0
state = ObserverState(0.0, 0.0)
held_y2 = 0.0

times, sig_hat, sig_ref = [], [], []
for i in range(int(DURATION / DT) + 1):
    t = i * DT
    if i % 10 == 0:
        held_y2 = v + VEL_NOISE * rng.standard_normal()
    if i % 100 == 0:
        times.append(t)
        sig_hat.append(state.xhat4)
        sig_ref.append(sigma_true(t))
    state = step_observer(state, held_y2, h_input(t), PARAMS, DT)
    # truth advances with a small integration step of its own
    v += DT * (h_input(t) + sigma_true(t))

times = np.array(times)
err = np.array(sig_hat) - np.array(sig_ref)
tail = times >= 10.0
peak = np.max(np.abs(sig_ref))
print(f"uncertainty peak magnitude:        {peak:.3f}")
print(f"estimate RMS error after settle:   {np.sqrt(np.mean(err[tail]**2)):.4f} "
      f"({100 * np.sqrt(np.mean(err[tail]**2)) / peak:.1f}% of peak)")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(8, 4))
    ax.plot(times, sig_ref, label="true uncertainty")
    ax.plot(times, sig_hat, "--", label="observer estimate")
    ax.set_xlabel("time [s]")
    ax.set_ylabel("acceleration [m/s$^2$]")
    ax.legend()
    fig.tight_layout()
    fig.savefig("demo02_uncertainty_observer.png", dpi=130)
    print("plot saved to demo02_uncertainty_observer.png")
except ImportError:
    print("(matplotlib not installed; skipping plot)")
