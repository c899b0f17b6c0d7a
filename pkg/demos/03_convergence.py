"""Measured convergence orders for the three time integrators.

Errors are taken at t=1 against the exact solution of the spatially
discretized system, so each integrator shows its own order: 4 for the
classic Runge-Kutta, 2 for midpoint and for iterative Crank-Nicholson.
At these resolutions the midpoint rule's weak imaginary-axis instability
(|R(i theta)|^2 = 1 + theta^4/4) is visible at n=200: roundoff in the top
grid modes grows ~1.118^400, swamping the smooth error.
"""

import math

import numpy as np

from thornsim import activate, build_schedule, gather, main_loop, parse_run_config
from thornsim.cli import discover_manifests

manifests = discover_manifests([])


def l2_error(method: str, n: int) -> float:
    config = parse_run_config(
        'ActiveThorns = "driver mol wavetoy"\n'
        f"driver::global_n = {n}\ndriver::t_final = 1.0\n"
        f"mol::method = {method}\nmol::dt = {1.0 / (2 * n)}\n"
    )
    state = activate([manifests[t] for t in config.active_thorns], config)
    build_schedule(state)
    main_loop(state)
    x = np.arange(n) / n
    omega = 2 * math.sin(math.pi / n) * n
    phi_e = np.cos(omega * state.time) * np.sin(2 * np.pi * x)
    pi_e = -omega * np.sin(omega * state.time) * np.sin(2 * np.pi * x)
    phi = gather(state.partitions, "wavetoy::phi")
    pi = gather(state.partitions, "wavetoy::pi")
    return float(np.sqrt(np.mean((phi - phi_e) ** 2) + np.mean((pi - pi_e) ** 2)))


for method in ("rk4", "icn", "rk2"):
    errors = [l2_error(method, n) for n in (50, 100, 200)]
    orders = [math.log2(errors[i] / errors[i + 1]) for i in range(2)]
    print(f"{method:>4}: " + "  ".join(f"e({n})={e:.3e}" for n, e in zip((50, 100, 200), errors)))
    print(f"      observed orders: {orders[0]:+.2f}, {orders[1]:+.2f}")
