# cython: boundscheck=False, wraparound=False, cdivision=True
"""Packed uint64 Gaussian elimination over F_2."""

from libc.stdint cimport uint64_t
from libc.stdlib cimport calloc, free


cdef inline int top_bit(uint64_t *row, int nw) nogil:
    cdef int w
    cdef uint64_t x
    cdef int b
    for w in range(nw - 1, -1, -1):
        x = row[w]
        if x:
            b = 63
            while not (x >> b) & 1:
                b -= 1
            return w * 64 + b
    return -1


def rref(rows, int ncols):
    """Reduced row echelon form of int-packed rows, leading bit as pivot.

    Same contract as the pure-Python kernel: nonzero reduced rows, ordered
    by decreasing pivot.
    """
    cdef int n = len(rows)
    cdef int nw = (ncols + 63) // 64
    if n == 0 or nw == 0:
        return []
    cdef uint64_t *mat = <uint64_t *> calloc(<size_t> n * nw, sizeof(uint64_t))
    cdef int *pivot_row = <int *> calloc(ncols, sizeof(int))
    if mat == NULL or pivot_row == NULL:
        free(mat)
        free(pivot_row)
        raise MemoryError()
    cdef int i, j, w, b, p
    cdef uint64_t *ri
    cdef uint64_t *rp
    try:
        for i in range(n):
            x = rows[i]
            if x < 0 or (x >> ncols):
                raise ValueError("row has bits outside the column range")
            w = 0
            while x:
                mat[i * nw + w] = <uint64_t> (x & 0xFFFFFFFFFFFFFFFF)
                x >>= 64
                w += 1
        for b in range(ncols):
            pivot_row[b] = -1
        for i in range(n):
            ri = mat + i * nw
            while True:
                b = top_bit(ri, nw)
                if b < 0:
                    break
                p = pivot_row[b]
                if p < 0:
                    pivot_row[b] = i
                    break
                rp = mat + p * nw
                for w in range(nw):
                    ri[w] ^= rp[w]
        # back substitution
        for b in range(ncols):
            p = pivot_row[b]
            if p < 0:
                continue
            rp = mat + p * nw
            for j in range(b + 1, ncols):
                i = pivot_row[j]
                if i < 0:
                    continue
                ri = mat + i * nw
                if (ri[b >> 6] >> (b & 63)) & 1:
                    for w in range(nw):
                        ri[w] ^= rp[w]
        out = []
        for b in range(ncols - 1, -1, -1):
            p = pivot_row[b]
            if p < 0:
                continue
            x = 0
            for w in range(nw - 1, -1, -1):
                x = (x << 64) | mat[p * nw + w]
            out.append(x)
        return out
    finally:
        free(mat)
        free(pivot_row)
