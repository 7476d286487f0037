"""Time the numba and numpy paths of the hot kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]

The first numba call (JIT compile) is excluded from the timings.
"""
import argparse
import timeit

import numpy as np

from gravab import _kernels


def shell_case(n_rho, n_phi, n_z):
    rx, rw = np.polynomial.legendre.leggauss(n_rho)
    zx, zw = np.polynomial.legendre.leggauss(n_z)
    return (np.array([0.5, 0.1, 0.05]), np.array([0.3, 1.0, 0.0]), 0.1, 0.02, 0.4, rx, rw, zx, zw, n_phi)


def best(fn, repeat):
    number = max(1, int(0.2 / max(timeit.timeit(fn, number=1), 1e-7)))
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed")

    cases = []
    for levels in (64, 512):
        cases.append((f"coherent_projection n={levels}", _kernels.coherent_projection_numba,
                      _kernels.coherent_projection_numpy, (0.8 - 0.3j, levels)))
    for dims in ((8, 64, 32), (32, 256, 128)):
        cases.append((f"shell_sum {dims[0]}x{dims[1]}x{dims[2]}", _kernels.shell_sum_numba,
                      _kernels.shell_sum_numpy, shell_case(*dims)))

    print(f"{'kernel':34s} {'numba [s]':>12s} {'numpy [s]':>12s} {'speed-up':>9s} {'max diff':>9s}")
    for name, fast, slow, case in cases:
        a, b = fast(*case), slow(*case)  # warm-up and agreement check
        diff = float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
        t_fast = best(lambda: fast(*case), args.repeat)
        t_slow = best(lambda: slow(*case), args.repeat)
        print(f"{name:34s} {t_fast:12.3e} {t_slow:12.3e} {t_slow / t_fast:9.2f} {diff:9.1e}")


if __name__ == "__main__":
    main()
