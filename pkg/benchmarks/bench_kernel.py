"""Compare the compiled and pure-Python clip kernels.

Each run clips a box by random tangent halfspaces of the unit sphere and
times the whole incremental intersection.

    python3 benchmarks/bench_kernel.py [--n 3] [--planes 200] [--repeat 5]
"""
import argparse
import itertools
import time

import numpy as np

from coconvex import _kernel


def box(n, r=2.0):
    V = np.array(list(itertools.product([-r, r], repeat=n)), dtype=float)
    I = np.zeros((len(V), 1), dtype=np.uint64)
    for k in range(n):
        # column 2k is x_k <= r, column 2k+1 is -x_k <= r
        I[V[:, k] > 0, 0] |= np.uint64(1) << np.uint64(2 * k)
        I[V[:, k] < 0, 0] |= np.uint64(1) << np.uint64(2 * k + 1)
    return V, I


def run(clip, n, normals):
    V, I = box(n)
    col = 2 * n
    for a in normals:
        need = col // 64 + 1
        if I.shape[1] < need:
            I = np.ascontiguousarray(np.hstack([I, np.zeros((len(I), need - I.shape[1]), dtype=np.uint64)]))
        V, I, status = clip(V, I, a, 1.0, col, n, 1e-11 * 2.0)
        col += 1
    return V


def bench(clip, n, normals, repeat):
    best = np.inf
    for _ in range(repeat):
        t = time.perf_counter()
        V = run(clip, n, normals)
        best = min(best, time.perf_counter() - t)
    return best, V


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--planes", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    normals = rng.normal(size=(args.planes, args.n))
    normals /= np.linalg.norm(normals, axis=1)[:, None]
    normals = np.ascontiguousarray(normals)

    tp, Vp = bench(_kernel.clip_python, args.n, normals, args.repeat)
    print(f"python   n={args.n} planes={args.planes}: {tp * 1e3:9.2f} ms  ({len(Vp)} vertices)")
    if _kernel.clip_compiled is None:
        print("compiled extension not built; skipping")
        return
    tc, Vc = bench(_kernel.clip_compiled, args.n, normals, args.repeat)
    print(f"compiled n={args.n} planes={args.planes}: {tc * 1e3:9.2f} ms  ({len(Vc)} vertices)")
    same = len(Vp) == len(Vc) and np.allclose(np.sort(Vp, axis=0), np.sort(Vc, axis=0))
    print(f"speedup {tp / tc:.1f}x, outputs agree: {same}")


if __name__ == "__main__":
    main()
