"""Compare the compiled and numpy backends of the Monte Carlo kernel.

    python3 benchmarks/bench_kernels.py [--samples 10000] [--repeat 3]

For each workload the script times both backends on identical inputs,
reports the speedup and the largest absolute disagreement, and then
times a full sum-rate estimate end to end.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from ccc_rates import kernels
from ccc_rates.channel import MCConfig, params_from_snr
from ccc_rates.constellation import gen_hex_qam, gen_square_qam, normalize
from ccc_rates.mi import sum_rate

WORKLOADS = {
    # name: (rows, centers, sigma_sq)
    "16 x 16 centers, 0 dB": (16, 16, 1.0),
    "256 x 256 centers, 10 dB": (256, 256, 0.1),
    "256 x 256 centers, 30 dB": (256, 256, 1e-3),
}


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_kernel(samples: int, repeat: int, threads: int | None) -> None:
    rng = np.random.default_rng(1)
    print(f"{'workload':28s} {'python s':>9s} {'cython s':>9s} {'speedup':>8s} {'max |diff|':>11s}")
    for name, (n_rows, n_centers, s2) in WORKLOADS.items():
        centers = rng.standard_normal(n_centers) + 1j * rng.standard_normal(n_centers)
        rows = centers[:n_rows]
        noise = np.sqrt(s2 / 2) * (rng.standard_normal((n_rows, samples)) + 1j * rng.standard_normal((n_rows, samples)))
        t_py = best_of(lambda: kernels.log_mixture_excess(rows, centers, noise, s2, backend="python"), repeat)
        ref = kernels.log_mixture_excess(rows, centers, noise, s2, backend="python")
        if "cython" not in kernels.available_backends():
            print(f"{name:28s} {t_py:9.3f} {'n/a':>9s}")
            continue
        t_cy = best_of(
            lambda: kernels.log_mixture_excess(rows, centers, noise, s2, backend="cython", threads=threads), repeat
        )
        out = kernels.log_mixture_excess(rows, centers, noise, s2, backend="cython", threads=threads)
        diff = float(np.max(np.abs(out - ref)))
        print(f"{name:28s} {t_py:9.3f} {t_cy:9.3f} {t_py / t_cy:7.1f}x {diff:11.2e}")


def bench_end_to_end(samples: int) -> None:
    pairs = {
        "QPSK x QPSK": (gen_square_qam(4), gen_square_qam(4)),
        "16-HQAM x 16-HQAM": (gen_hex_qam(16), gen_hex_qam(16)),
    }
    mc = MCConfig(samples, seed=0)
    p = params_from_snr(12.0)
    print(f"\nsum_rate at 12 dB, {samples} draws per outer pair")
    for name, (a, b) in pairs.items():
        a, b = normalize(a), normalize(b)
        for backend in kernels.available_backends():
            t0 = time.perf_counter()
            est = sum_rate(a, b, p, mc, backend=backend)
            dt = time.perf_counter() - t0
            print(f"  {name:20s} {backend:7s} {dt:7.3f} s  {est.bits:.6f} +/- {est.std_error:.2e}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--samples", type=int, default=10_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--threads", type=int, default=None)
    args = ap.parse_args()
    print(f"default backend: {kernels.BACKEND}; threads: {args.threads or kernels.default_threads()}")
    bench_kernel(args.samples, args.repeat, args.threads)
    bench_end_to_end(args.samples)


if __name__ == "__main__":
    main()
