"""Time the hot kernels under every available backend.

    python benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Each case is run once per backend on identical inputs; results are checked
to agree before timings are reported.
"""

import argparse
import json
import time

import numpy as np

from gowerslab import kernels
from gowerslab.primes import build_sieve


def _cases(rng):
    n = 257
    f = rng.normal(size=n) + 1j * rng.normal(size=n)
    F4 = rng.normal(size=(4, 509)) + 1j * rng.normal(size=(4, 509))
    sup = np.flatnonzero(rng.random(509) < 0.1)
    N = 20000
    tab = build_sieve(3 * N + 1).mangoldt
    psup = np.flatnonzero(tab[: N + 1])
    g = rng.normal(size=61) + 1j * rng.normal(size=61)
    return {
        "autocorr_energy N=257": lambda impl: kernels.autocorr_energy(f, impl),
        "lambda_dense k=4 N=509": lambda impl: kernels.lambda_dense(F4, impl),
        "lambda_sparse k=4 N=509 (10%)": lambda impl: kernels.lambda_sparse(F4, sup, impl),
        "progression_sum k=3 N=2e4": lambda impl: kernels.progression_sum(tab, psup, N, 3, impl),
        "dual_function N=61": lambda impl: kernels.dual_function(g, impl),
    }


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", help="write timings to this file")
    args = ap.parse_args(argv)

    backends = kernels.backends()
    rows = []
    for name, case in _cases(np.random.default_rng(0)).items():
        results = {b: _time(lambda c=case, i=impl: c(i), args.repeat) for b, impl in backends.items()}
        ref = results["python"][1]
        for b, (_, out) in results.items():
            if not np.allclose(out, ref, rtol=1e-9, atol=1e-12):
                raise SystemExit(f"{name}: backend {b} disagrees with python")
        row = {"case": name, **{b: t for b, (t, _) in results.items()}}
        if "cython" in row:
            row["speedup"] = row["python"] / row["cython"]
        rows.append(row)

    names = list(backends)
    print(f"{'case':34s}" + "".join(f"{b:>12s}" for b in names) + ("     speedup" if "cython" in names else ""))
    for r in rows:
        line = f"{r['case']:34s}" + "".join(f"{r[b] * 1e3:10.2f}ms" for b in names)
        if "speedup" in r:
            line += f"{r['speedup']:11.1f}x"
        print(line)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
