"""Compare the compiled core with the numpy fallback.

    python benchmarks/bench_core.py [--repeat 5] [--json results.json]

Each row times one kernel on both backends (best of ``--repeat``) and checks
that the two agree (relative to the output scale; eigenvalues come back sorted).
"""

import argparse
import json
import sys
import timeit

import numpy as np

from akx import _fallback

try:
    from akx import _ext
except ImportError:
    _ext = None


def cases(rng):
    for M in (50, 200, 400):
        c = rng.standard_normal(M) + 1j * rng.standard_normal(M)
        z = 0.3 - 0.4j
        yield f"taylor_shift M={M}", "taylor_shift", (c, z)
    for N in (6, 9, 12):
        d = 2 ** N
        x = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        y = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        yield f"grassmann_mul N={N}", "grassmann_mul", (x, y, N)
    for n in (16, 64, 128, 256):
        X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        yield f"hermitian_eigvalsh n={n}", "hermitian_eigvalsh", ((X + X.conj().T) / 2,)


def rel_diff(a, b):
    """Largest entrywise difference relative to the larger output's max modulus."""
    a, b = np.asarray(a), np.asarray(b)
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)), 1e-300)
    return float(np.max(np.abs(a - b)) / scale)


def best(fn, args, repeat):
    t = timeit.Timer(lambda: fn(*args))
    number, _ = t.autorange()
    return min(t.repeat(repeat, number)) / number


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="write results here")
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    rows = []
    print(f"{'case':<28}{'python (ms)':>14}{'cython (ms)':>14}{'speedup':>10}{'rel diff':>12}")
    for label, name, a in cases(rng):
        t_py = best(getattr(_fallback, name), a, args.repeat)
        row = {"case": label, "python_s": t_py}
        if _ext is not None:
            t_cy = best(getattr(_ext, name), a, args.repeat)
            diff = rel_diff(getattr(_fallback, name)(*a), getattr(_ext, name)(*a))
            row.update(cython_s=t_cy, speedup=t_py / t_cy, max_diff=diff)
            print(f"{label:<28}{t_py * 1e3:>14.3f}{t_cy * 1e3:>14.3f}{t_py / t_cy:>10.1f}{diff:>12.2e}")
        else:
            print(f"{label:<28}{t_py * 1e3:>14.3f}{'n/a':>14}")
        rows.append(row)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2, sort_keys=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
