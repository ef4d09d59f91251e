"""Why the Kalman baseline loses under biased, heavy-tailed sensing.

Two runs of the same machinery:

  1. unbiased small Gaussian noise: the Kalman filter's assumptions hold and
     the two estimators land in the same error class (the baseline is tuned
     on exactly this scenario, so the comparison is fair);
  2. the flight scenario with a ~20 m bias: the filter has no mechanism
     against a non-zero-mean measurement error and slowly adopts the bias,
     while the corrector keeps millimetres.

Run:  python demos/05_ekf_comparison.py        (about 30 s)
"""

import numpy as np

from corrobs import bundled_config_path, load_scenario, metrics, run_scenario


def report(name: str) -> None:
    cfg = load_scenario(bundled_config_path(name))
    trace = run_scenario(cfg)
    m = metrics(trace, settle=20.0, scenario=cfg)
    corr = [m["corrector"][a]["rms"] for a in ("x", "y", "z")]
    ekf = [m["ekf"][a]["rms"] for a in ("x", "y", "z")]
    print(f"\nscenario {name}:")
    for i, axis in enumerate(("x", "y", "z")):
        print(f"  {axis}: corrector rms {corr[i] * 1e3:8.2f} mm    "
              f"EKF rms {ekf[i] * 1e3:10.2f} mm    ratio {ekf[i] / corr[i]:8.2f}")
    print(f"  aggregate EKF/corrector ratio: {np.mean(ekf) / np.mean(corr):.2f}")


report("noise_only")
report("paper_sec6")
print("\nunbiased noise: comparable accuracy (fair tuning).")
print("large-error sensing: the corrector rejects the bias outright; the")
print("filter converges to it.")
