"""Pure-numpy fallback for the compiled box kernels.

Every function here has the same signature and, for finite inputs, the same
bitwise output as its counterpart in ``_kernels.pyx``.
"""

import numpy as np


def iou_matrix(a, b):
    lt = np.maximum(a[:, None, :2], b[None, :, :2])
    rb = np.minimum(a[:, None, 2:], b[None, :, 2:])
    wh = rb - lt
    wh[wh < 0.0] = 0.0
    inter = wh[..., 0] * wh[..., 1]
    area_a = (a[:, 2] - a[:, 0]) * (a[:, 3] - a[:, 1])
    area_b = (b[:, 2] - b[:, 0]) * (b[:, 3] - b[:, 1])
    union = (area_a[:, None] + area_b[None, :]) - inter
    out = np.zeros_like(inter)
    np.divide(inter, union, out=out, where=union > 0.0)
    return out


def nms_sorted(boxes, order, thr):
    dead = np.zeros(len(boxes), dtype=bool)
    keep = []
    for p, i in enumerate(order):
        if dead[i]:
            continue
        keep.append(i)
        rest = order[p + 1:]
        if len(rest):
            ious = iou_matrix(boxes[i:i + 1], boxes[rest])[0]
            dead[rest[ious > thr]] = True
    return np.asarray(keep, dtype=np.int64)


def greedy_match(dets, gts, lo, hi, thr):
    used = np.zeros(len(gts), dtype=bool)
    flags = np.zeros(len(dets), dtype=bool)
    for d in range(len(dets)):
        if hi[d] <= lo[d]:
            continue
        ious = iou_matrix(dets[d:d + 1], gts[lo[d]:hi[d]])[0]
        ious[used[lo[d]:hi[d]]] = -1.0
        best = int(np.argmax(ious))  # first maximum: lower GT index wins ties
        if ious[best] >= thr:
            used[lo[d] + best] = True
            flags[d] = True
    return flags
