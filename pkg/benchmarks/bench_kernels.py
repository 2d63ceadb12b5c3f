"""Compare the compiled statevector kernel against the numpy fallback.

Both kernels implement the same ``apply_ops`` tape contract; this script runs
identical tapes through each and reports per-circuit timings. Usage:

    python3 benchmarks/bench_kernels.py [--qubits 4 8 12] [--depth 40]
                                        [--repeats 20] [--seed 42]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from rivetlite import circuit as circ
from rivetlite import sim
from rivetlite import _kernels_py

try:
    from rivetlite import _kernels_cy
except ImportError:
    _kernels_cy = None


def _time_kernel(kernels, cc, repeats: int) -> float:
    size = 1 << cc.num_qubits
    best = float("inf")
    for _ in range(repeats):
        state = np.zeros(size, dtype=complex)
        state[0] = 1.0
        t0 = time.perf_counter()
        kernels.apply_ops(state, cc._kinds, cc._q0, cc._q1, cc._midx, cc._mats)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qubits", type=int, nargs="+", default=[4, 8, 12])
    ap.add_argument("--depth", type=int, default=40)
    ap.add_argument("--repeats", type=int, default=20)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    print(f"active kernel at import: {sim.KERNEL_BACKEND}")
    if _kernels_cy is None:
        print("compiled kernel unavailable; timing the fallback only")
    header = f"{'qubits':>6} {'gates':>6} {'python':>12}"
    if _kernels_cy is not None:
        header += f" {'compiled':>12} {'speedup':>8}"
    print(header)
    for n in args.qubits:
        if n > sim.MAX_SIM_QUBITS:
            print(f"{n:>6}  skipped (dense guard is {sim.MAX_SIM_QUBITS})")
            continue
        c = circ.random_circuit(n, args.depth, args.seed + n)
        cc = sim.CompiledCircuit(c)
        t_py = _time_kernel(_kernels_py, cc, args.repeats)
        line = f"{n:>6} {len(c.gates):>6} {t_py * 1e3:>10.3f}ms"
        if _kernels_cy is not None:
            t_cy = _time_kernel(_kernels_cy, cc, args.repeats)
            line += f" {t_cy * 1e3:>10.3f}ms {t_py / t_cy:>7.1f}x"
            s_py = np.zeros(1 << n, dtype=complex)
            s_py[0] = 1.0
            _kernels_py.apply_ops(s_py, cc._kinds, cc._q0, cc._q1,
                                  cc._midx, cc._mats)
            s_cy = np.zeros(1 << n, dtype=complex)
            s_cy[0] = 1.0
            _kernels_cy.apply_ops(s_cy, cc._kinds, cc._q0, cc._q1,
                                  cc._midx, cc._mats)
            if np.max(np.abs(s_py - s_cy)) > 1e-12:
                print(line)
                print(f"kernel outputs disagree at {n} qubits")
                return 1
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
