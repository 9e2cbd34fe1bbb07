"""Time the retarded-kernel sums on each available backend.

    python3 benchmarks/bench_kernel.py [--events 200] [--repeat 3] [--threads 1] [--json out.json]

Both backends evaluate the same events for the oscillating monopole and the
Hertzian dipole at the default volume rule; the largest relative difference
between them is reported next to the timings.
"""
import argparse
import json
import math
import time

import numpy as np

from fieldcheck import kernels
from fieldcheck import sources as S
from fieldcheck.minkowski import Event, Orientation
from fieldcheck.quadrature import VolumeRule
from fieldcheck.solver import _discretize, _kernel_sums


def _events(n, seed=0):
    rng = np.random.default_rng(seed)
    dirs = rng.normal(size=(n, 3))
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    radii = 20.0 * 32.0 ** rng.uniform(size=n)
    return np.array([Event.at(r + 1.0, r * d).coords for r, d in zip(radii, dirs)])


def _time(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - start)
    return best, out


def run(n_events=200, repeat=3, threads=1, rule=VolumeRule()):
    events = _events(n_events)
    cases = {
        "oscillating_monopole": S.oscillating_monopole(1.0, 0.3, 0.1),
        "hertzian_dipole": S.hertzian_dipole(1.0, 0.3, 0.1),
    }
    kernels.set_threads(threads)
    results = []
    previous = kernels.backend_name()
    try:
        for label, src in cases.items():
            blocks, omegas = _discretize(src, rule)
            outputs = {}
            for name in kernels.available_backends():
                kernels.use_backend(name)
                seconds, outputs[name] = _time(lambda: _kernel_sums(src, events, Orientation.RETARDED, blocks, omegas), repeat)
                results.append({
                    "source": label,
                    "backend": name,
                    "events": n_events,
                    "nodes": rule.size,
                    "seconds": seconds,
                    "us_per_event": 1e6 * seconds / n_events,
                })
            if len(outputs) > 1:
                a, b = outputs["compiled"], outputs["python"]
                scale = np.max(np.abs(b))
                results.append({"source": label, "max_rel_difference": float(np.max(np.abs(a - b)) / scale)})
    finally:
        kernels.use_backend(previous)
    return results


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--events", type=int, default=200)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--json", help="also write results to this file")
    args = parser.parse_args(argv)
    results = run(args.events, args.repeat, args.threads)
    for row in results:
        if "backend" in row:
            print(f"{row['source']:<22} {row['backend']:<9} {row['seconds']:8.3f} s  {row['us_per_event']:9.1f} us/event  ({row['nodes']} nodes)")
        else:
            print(f"{row['source']:<22} compiled vs python: max relative difference {row['max_rel_difference']:.2e}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(results, fh, indent=2)


if __name__ == "__main__":
    main()
