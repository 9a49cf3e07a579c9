"""Compare the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_backends.py [--repeat 5]

Times the per-step kernels on 4x4 inputs and a full Case (i) run under each
available backend, and reports the speedup.
"""

import argparse
import timeit

import numpy as np

from tlfrls import _backend
from tlfrls.experiments import run_case1


def _inputs():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((4, 4))
    omega = a @ a.T / 10.0
    phi = rng.standard_normal(4)
    p = np.eye(4) * 1000.0
    return {
        "omega": omega,
        "m": omega @ rng.standard_normal(4),
        "phi": phi,
        "p": p,
        "s": np.linalg.cholesky(p),
        "r": np.eye(4) / 1000.0,
        "theta": np.zeros(4),
    }


def _cases(k, x):
    return {
        "eigvalsh 4x4": lambda: k.eigvalsh(x["omega"]),
        "df_update": lambda: k.df_update(x["omega"], x["m"], x["phi"], 0.3, 0.99, 1e-9, 1e-12),
        "tlf_sqrt_step": lambda: k.tlf_sqrt_step(x["theta"], x["s"], x["r"], x["omega"], x["m"], 0.99, 1e-12),
        "ef_rls_step": lambda: k.ef_rls_step(x["theta"], x["p"], x["r"], x["phi"], 0.3, 0.99),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--number", type=int, default=20000)
    args = ap.parse_args()
    x = _inputs()
    backends = _backend.available()
    results = {}
    for name in backends:
        k = _backend.use(name)
        for label, fn in _cases(k, x).items():
            best = min(timeit.repeat(fn, number=args.number, repeat=args.repeat)) / args.number
            results[(label, name)] = best
        best = min(timeit.repeat(run_case1, number=1, repeat=max(1, args.repeat // 2)))
        results[("case1 run (2000 steps)", name)] = best
    _backend.use(backends[0])

    labels = list(dict.fromkeys(label for label, _ in results))
    print(f"{'kernel':<24}" + "".join(f"{n:>14}" for n in backends) + ("     speedup" if len(backends) > 1 else ""))
    for label in labels:
        times = [results[(label, n)] for n in backends]
        row = f"{label:<24}" + "".join(f"{_fmt(t):>14}" for t in times)
        if len(backends) > 1:
            row += f"{times[1] / times[0]:>11.1f}x"
        print(row)


def _fmt(seconds):
    if seconds < 1e-3:
        return f"{seconds * 1e6:.2f} us"
    if seconds < 1:
        return f"{seconds * 1e3:.1f} ms"
    return f"{seconds:.2f} s"


if __name__ == "__main__":
    main()
