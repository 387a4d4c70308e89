#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Times the three hot functions (Hamiltonian value, flow RHS, flow+frame
RHS) on both backends, then one full production task (orbit solve plus
quarter-period frame) per backend.  Run from the repository root:

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from broucke import _kernels_py
from broucke.dynamics import MassParams

try:
    from broucke import _kernels_cy
except ImportError:
    _kernels_cy = None

P = MassParams(m1=1.0)
ARGS = (P.m1, P.m2, P.mu, P.E)
Z = np.array([0.3, 0.1, -0.2, 0.9, 0.4, 0.05, -0.1, -0.2])
Y9 = np.concatenate([Z, [0.0]])
Y73 = np.concatenate([Y9, np.eye(8).ravel()])


def time_call(fn, arg, n):
    t0 = time.perf_counter()
    for _ in range(n):
        fn(arg, *ARGS)
    return (time.perf_counter() - t0) / n * 1e6


def time_pipeline(backend_name):
    """Orbit solve + frame at m1 = 0.8 under a forced backend."""
    import os
    import subprocess
    import sys
    code = (
        "import time\n"
        "from broucke.dynamics import MassParams\n"
        "from broucke.orbit import find_orbit\n"
        "from broucke.stability import monodromy_data\n"
        "from broucke import BACKEND\n"
        "t0 = time.perf_counter()\n"
        "orb = find_orbit(MassParams(m1=0.8))\n"
        "md = monodromy_data(orb)\n"
        "print(f'{BACKEND} {time.perf_counter() - t0:.3f}')\n"
    )
    env = dict(os.environ)
    if backend_name == "python":
        env["BROUCKE_PURE_PYTHON"] = "1"
    else:
        env.pop("BROUCKE_PURE_PYTHON", None)
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    name, seconds = out.stdout.split()
    assert name == backend_name, f"expected {backend_name}, got {name}"
    return float(seconds)


def main():
    backends = [("python", _kernels_py)]
    if _kernels_cy is not None:
        backends.insert(0, ("cython", _kernels_cy))
    else:
        print("compiled kernels not built; timing the fallback only\n")

    rows = []
    for name, mod in backends:
        n = 20000 if name == "cython" else 2000
        rows.append((name,
                     time_call(mod.gamma, Z, n),
                     time_call(mod.rhs_flow, Y9, n),
                     time_call(mod.rhs_frame, Y73, n)))

    print(f"{'backend':<8} {'gamma':>10} {'rhs_flow':>10} {'rhs_frame':>10}"
          f"   (us/call)")
    for name, g, f, fr in rows:
        print(f"{name:<8} {g:10.2f} {f:10.2f} {fr:10.2f}")
    if len(rows) == 2:
        print(f"{'speedup':<8} {rows[1][1] / rows[0][1]:9.1f}x "
              f"{rows[1][2] / rows[0][2]:9.1f}x "
              f"{rows[1][3] / rows[0][3]:9.1f}x")

    print("\nend-to-end orbit solve + quarter-period frame (m1 = 0.8):")
    for name, _ in backends:
        seconds = time_pipeline(name)
        print(f"{name:<8} {seconds:8.3f} s")


if __name__ == "__main__":
    main()
