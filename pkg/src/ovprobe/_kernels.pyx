# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled box kernels. Mirrors ``_kernels_py`` exactly, including float op order."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline double _iou(const double[:, ::1] a, Py_ssize_t i,
                        const double[:, ::1] b, Py_ssize_t j) noexcept nogil:
    cdef double w = min(a[i, 2], b[j, 2]) - max(a[i, 0], b[j, 0])
    cdef double h = min(a[i, 3], b[j, 3]) - max(a[i, 1], b[j, 1])
    cdef double inter, union
    if w < 0.0:
        w = 0.0
    if h < 0.0:
        h = 0.0
    inter = w * h
    union = ((a[i, 2] - a[i, 0]) * (a[i, 3] - a[i, 1])
             + (b[j, 2] - b[j, 0]) * (b[j, 3] - b[j, 1])) - inter
    if union > 0.0:
        return inter / union
    return 0.0


def iou_matrix(const double[:, ::1] a, const double[:, ::1] b):
    cdef Py_ssize_t n = a.shape[0], m = b.shape[0], i, j
    out = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] o = out
    with nogil:
        for i in range(n):
            for j in range(m):
                o[i, j] = _iou(a, i, b, j)
    return out


def nms_sorted(const double[:, ::1] boxes, const cnp.int64_t[::1] order, double thr):
    cdef Py_ssize_t n = order.shape[0], p, q, i
    cdef cnp.uint8_t[::1] dead = np.zeros(boxes.shape[0], dtype=np.uint8)
    keep = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] k = keep
    cdef Py_ssize_t nk = 0
    with nogil:
        for p in range(n):
            i = order[p]
            if dead[i]:
                continue
            k[nk] = i
            nk += 1
            for q in range(p + 1, n):
                if not dead[order[q]] and _iou(boxes, i, boxes, order[q]) > thr:
                    dead[order[q]] = 1
    return keep[:nk]


def greedy_match(const double[:, ::1] dets, const double[:, ::1] gts,
                 const cnp.int64_t[::1] lo, const cnp.int64_t[::1] hi, double thr):
    cdef Py_ssize_t n = dets.shape[0], d, g, best
    cdef double v, best_v
    cdef cnp.uint8_t[::1] used = np.zeros(gts.shape[0], dtype=np.uint8)
    flags = np.zeros(n, dtype=np.uint8)
    cdef cnp.uint8_t[::1] f = flags
    with nogil:
        for d in range(n):
            best = -1
            best_v = -1.0
            for g in range(lo[d], hi[d]):
                if used[g]:
                    continue
                v = _iou(dets, d, gts, g)
                if v >= thr and v > best_v:
                    best_v = v
                    best = g
            if best >= 0:
                used[best] = 1
                f[d] = 1
    return flags.astype(bool)
