"""Compare the numba and pure-numpy kernel paths.

Times every derivative kernel on shared residual vectors, then a full GMQ
fit, once per backend, and prints one CSV row per measurement with the
numpy/numba speed ratio. Both paths are checked to agree before timing.

    python benchmarks/bench_backends.py --sizes 100000,1000000 --reps 7
"""
import argparse
import sys

import numpy as np

from gmqr import LossSpec, SimSpec, fit, generate, kernels
from gmqr.bench import median_time
from gmqr.io import write_csv


def kernel_rows(sizes, reps, seed):
    rows = []
    for size in sizes:
        u = np.random.Generator(np.random.Philox(seed)).standard_normal(size)
        for family in kernels.FAMILIES:
            ref = kernels.get_kernel(family, "numpy")(u, 0.7, 0.1, 1.5)
            np.testing.assert_allclose(kernels.get_kernel(family, "numba")(u, 0.7, 0.1, 1.5), ref,
                                       rtol=1e-12, atol=1e-15)
            t = {b: median_time(lambda k=kernels.get_kernel(family, b): k(u, 0.7, 0.1, 1.5), reps)
                 for b in ("numba", "numpy")}
            rows.append(("kernel", family, size, t["numba"], t["numpy"], t["numpy"] / t["numba"]))
    return rows


def fit_rows(n_list, p, reps, seed):
    rows = []
    for n in n_list:
        data, _ = generate(SimSpec(n=n, p=p, tau=0.7, seed=seed))
        spec = LossSpec("gmq", 0.7, 0.1)
        a = fit(data, spec, backend="numba").beta_hat
        b = fit(data, spec, backend="numpy").beta_hat
        np.testing.assert_allclose(a, b, rtol=1e-8, atol=1e-10)
        t = {be: median_time(lambda be=be: fit(data, spec, backend=be), reps) for be in ("numba", "numpy")}
        rows.append(("fit", "gmq", n, t["numba"], t["numpy"], t["numpy"] / t["numba"]))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="100000,1000000,10000000")
    ap.add_argument("--fit-n", default="10000,100000")
    ap.add_argument("--fit-p", type=int, default=10)
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if not kernels.HAVE_NUMBA:
        print("numba is not installed; only the numpy path exists", file=sys.stderr)
        return 1
    kernels.warmup()
    sizes = [int(float(s)) for s in args.sizes.split(",")]
    fit_n = [int(float(s)) for s in args.fit_n.split(",")]
    rows = kernel_rows(sizes, args.reps, args.seed) + fit_rows(fit_n, args.fit_p, args.reps, args.seed)
    write_csv(sys.stdout, ["what", "family", "size", "numba_seconds", "numpy_seconds", "speedup"], rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
