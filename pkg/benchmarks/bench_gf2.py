"""Compare the compiled and pure-Python row reduction kernels.

    python3 benchmarks/bench_gf2.py [--sizes 64,128,256,512] [--repeat 3]

Also times one end-to-end quotient (Lev on F(1)) under each backend, using a
subprocess so the backend switch happens at import.
"""

import argparse
import os
import random
import subprocess
import sys
import time

from starunstable import _gf2_py
from starunstable.gf2core import BACKEND

try:
    from starunstable import _gf2kernel
except ImportError:
    _gf2kernel = None

END_TO_END = (
    "import time; from starunstable.freealg import FreeAlgebra; from starunstable.kfunctor import build_quotient;"
    "from starunstable.operads import lev_operad; from starunstable.unstable import free_module;"
    "from starunstable.gf2core import BACKEND;"
    "t=time.perf_counter(); build_quotient(FreeAlgebra(lev_operad(32), free_module(1, {cap}), {cap}), 'unst');"
    "print(BACKEND, time.perf_counter()-t)"
)


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="64,128,256,512")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--cap", type=int, default=12)
    args = ap.parse_args()
    if _gf2kernel is None:
        print(f"compiled kernel unavailable (backend {BACKEND}); only the Python kernel can be timed")
    rng = random.Random(0)
    print(f"{'n':>6} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for n in (int(s) for s in args.sizes.split(",")):
        rows = [rng.getrandbits(n) for _ in range(n)]
        tp = best_of(lambda: _gf2_py.rref(list(rows), n), args.repeat)
        if _gf2kernel is None:
            print(f"{n:>6} {tp:>10.4f} {'-':>10} {'-':>8}")
            continue
        assert _gf2kernel.rref(list(rows), n) == _gf2_py.rref(list(rows), n)
        tc = best_of(lambda: _gf2kernel.rref(list(rows), n), args.repeat)
        print(f"{n:>6} {tp:>10.4f} {tc:>10.4f} {tp / tc:>7.1f}x")
    print(f"\nend to end: K_Lev(F(1)) up to degree {args.cap}")
    for pure in (False, True):
        env = dict(os.environ)
        if pure:
            env["STARUNSTABLE_PURE_PYTHON"] = "1"
        out = subprocess.run([sys.executable, "-c", END_TO_END.format(cap=args.cap)], env=env,
                             capture_output=True, text=True, check=True)
        backend, secs = out.stdout.split()
        print(f"  {backend:>7}: {float(secs):.3f}s")


if __name__ == "__main__":
    main()
