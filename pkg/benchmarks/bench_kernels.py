"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from ovprobe import _kernels_py

try:
    from ovprobe import _kernels as compiled
except ImportError:
    compiled = None


def boxes(rng, n):
    xy = rng.uniform(0, 600, (n, 2))
    return np.ascontiguousarray(np.hstack([xy, xy + rng.uniform(10, 120, (n, 2))]))


def cases(rng):
    a, b = boxes(rng, 600), boxes(rng, 600)
    dense = boxes(rng, 2000)
    dense[:, 2:] = dense[:, :2] + 400  # heavy overlap, long suppression chains
    order = np.argsort(-rng.random(2000), kind="stable").astype(np.int64)
    dets, gts = boxes(rng, 3000), boxes(rng, 300)
    img_d = np.sort(rng.integers(0, 30, 3000))
    img_g = np.repeat(np.arange(30), 10)
    lo = np.searchsorted(img_g, img_d, "left").astype(np.int64)
    hi = np.searchsorted(img_g, img_d, "right").astype(np.int64)
    return {
        "iou_matrix 600x600": lambda k: k.iou_matrix(a, b),
        "nms_sorted 2000": lambda k: k.nms_sorted(dense, order, 0.5),
        "greedy_match 3000x300": lambda k: k.greedy_match(dets, gts, lo, hi, 0.5),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = {"numpy": _kernels_py}
    if compiled is not None:
        backends["cython"] = compiled
    else:
        print("compiled kernels not built; timing the fallback only")
    print(f"{'kernel':<24}" + "".join(f"{name:>12}" for name in backends) + f"{'speedup':>10}")
    for label, fn in cases(np.random.default_rng(0)).items():
        times = {name: min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat))
                 for name, k in backends.items()}
        row = f"{label:<24}" + "".join(f"{1e3 * t:10.2f}ms" for t in times.values())
        if "cython" in times:
            row += f"{times['numpy'] / times['cython']:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
