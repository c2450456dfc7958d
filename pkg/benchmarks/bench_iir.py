"""Time the compiled and pure-Python IIR kernels on a six-minute, 256 Hz recording.

    python3 benchmarks/bench_iir.py [--seconds 360] [--fs 256] [--repeat 3]
"""

import argparse
import time

import numpy as np

from physioreport.signal_core import CANONICAL_BANDS, design_bandpass, kernels


def run(backend, sections, x):
    for sos in sections:
        y = x
        for row in sos:
            y = kernels.lfilter_forward(row[:3], row[3:], y, backend=backend)
    return y


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seconds", type=float, default=360.0)
    ap.add_argument("--fs", type=float, default=256.0)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    n = int(args.seconds * args.fs)
    x = np.random.default_rng(0).normal(size=n)
    sections = [design_bandpass(b, args.fs).sections for b in CANONICAL_BANDS]
    print(f"{n} samples x {len(sections)} bands x {len(sections[0])} biquads")

    timings = {}
    for backend in kernels.available_backends():
        best = min(
            _timed(run, backend, sections, x) for _ in range(max(1, args.repeat))
        )
        timings[backend] = best
        print(f"{backend:>7}: {best * 1e3:9.2f} ms")
    if len(timings) == 2:
        print(f"speedup: {timings['python'] / timings['cython']:.1f}x")


def _timed(fn, *args):
    t0 = time.perf_counter()
    fn(*args)
    return time.perf_counter() - t0


if __name__ == "__main__":
    main()
