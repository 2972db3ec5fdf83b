"""Time the compiled shooting kernel against the NumPy fallback.

    python benchmarks/bench_shoot.py [--repeat N]
"""
import argparse
import timeit

from gcrit import oracle
from gcrit._shoot_py import shoot_kernel as numpy_kernel
from gcrit.potential import make_exponential, make_square_well

try:
    from gcrit._shoot import shoot_kernel as cython_kernel
except ImportError:
    cython_kernel = None

CASES = [("square well, l=0", make_square_well(), 0, 2.4),
         ("square well, l=5", make_square_well(), 5, 66.0),
         ("exponential, l=0", make_exponential(), 0, 1.4)]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()
    kernels = [("numpy", numpy_kernel)]
    if cython_kernel is not None:
        kernels.append(("cython", cython_kernel))
    else:
        print("compiled kernel not built; run `python setup.py build_ext --inplace`")
    print(f"{'case':<20}{'steps':>7}" + "".join(f"{name + ' [ms]':>14}" for name, _ in kernels)
          + f"{'speedup':>10}")
    for label, shape, ell, g in CASES:
        mesh = oracle._Mesh(shape, ell, g, oracle.DEFAULT_CONFIG)
        times = []
        results = []
        for _, kernel in kernels:
            def run():
                return kernel(mesh.h, mesh.Q, g, float(mesh.c), oracle.RK_A, oracle.RK_B)
            results.append(run())
            times.append(min(timeit.repeat(run, number=1, repeat=args.repeat)) * 1e3)
        if len(results) == 2:
            assert abs(results[0][0] - results[1][0]) <= 1e-9 * abs(results[0][0]) + 1e-300
        speedup = f"{times[0] / times[-1]:>10.1f}" if len(times) == 2 else ""
        print(f"{label:<20}{len(mesh.h):>7}" + "".join(f"{t:>14.3f}" for t in times) + speedup)


if __name__ == "__main__":
    main()
