# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops.  Must stay bit-compatible with ``_kernels_py``."""

import numpy as np

from libc.math cimport log, exp, log1p, INFINITY
from libc.stdint cimport uint64_t, int64_t

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL


cdef inline double _logaddexp(double a, double b) nogil:
    cdef double hi, lo
    if a == -INFINITY:
        return b
    if b == -INFINITY:
        return a
    if a > b:
        hi = a
        lo = b
    else:
        hi = b
        lo = a
    return hi + log1p(exp(lo - hi))


def stirling_log_table(double alpha, double gamma, Py_ssize_t max_n):
    table = np.full((max_n + 1, max_n + 1), -np.inf)
    cdef double[:, ::1] t = table
    cdef Py_ssize_t n, xi
    cdef double coef, carry
    with nogil:
        t[0, 0] = 0.0
        for n in range(max_n):
            for xi in range(n + 2):
                carry = -INFINITY
                if xi >= 1:
                    carry = t[n, xi - 1]
                if xi <= n:
                    coef = gamma + n - xi * alpha
                    if coef > 0.0 and t[n, xi] != -INFINITY:
                        carry = _logaddexp(carry, log(coef) + t[n, xi])
                t[n + 1, xi] = carry
    return table


cdef inline uint64_t _mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double _uniform(uint64_t key, uint64_t counter) nogil:
    return (_mix64(key + (counter + 1) * GOLDEN) >> 11) * (1.0 / 9007199254740992.0)


def stream_key(uint64_t seed, uint64_t replicate):
    return _mix64(seed + replicate * GOLDEN)


def uniform(uint64_t key, uint64_t counter):
    return _uniform(key, counter)


def urn_accumulate(int64_t[::1] initial_sizes, Py_ssize_t m, double alpha,
                   double[:, ::1] ratio_old, double[:, ::1] ratio_new,
                   uint64_t seed, Py_ssize_t rep_start, Py_ssize_t rep_stop,
                   bint rao_blackwell):
    """Sum per-k hit probabilities over replicates ``rep_start..rep_stop-1``.

    Returns ``(old, new, p_new)`` where ``old[k]``/``new[k]`` are summed over
    replicates and ``p_new`` is the summed probability of a fresh species.
    """
    cdef Py_ssize_t j0 = initial_sizes.shape[0]
    cdef int64_t n0 = 0
    cdef Py_ssize_t i
    for i in range(j0):
        n0 += initial_sizes[i]
    cdef Py_ssize_t kmax = n0 + m
    old_arr = np.zeros(kmax + 2)
    new_arr = np.zeros(kmax + 2)
    sizes_arr = np.zeros(j0 + m + 1, dtype=np.int64)
    cdef double[::1] old = old_arr
    cdef double[::1] new = new_arr
    cdef int64_t[::1] sizes = sizes_arr
    cdef double p_new = 0.0
    cdef Py_ssize_t rep, t, nsp, born, chosen
    cdef uint64_t key
    cdef double ro, rn, total, target, acc, w, u
    with nogil:
        for rep in range(rep_start, rep_stop):
            key = _mix64(seed + <uint64_t>rep * GOLDEN)
            for i in range(j0):
                sizes[i] = initial_sizes[i]
            nsp = j0
            for t in range(m + (0 if rao_blackwell else 1)):
                born = nsp - j0
                ro = ratio_old[t, born]
                rn = ratio_new[t, born]
                total = 0.0
                for i in range(nsp):
                    total = total + (sizes[i] - alpha) * ro
                total = total + rn
                u = _uniform(key, t)
                target = u * total
                acc = 0.0
                chosen = nsp
                for i in range(nsp):
                    w = (sizes[i] - alpha) * ro
                    acc = acc + w
                    if target < acc:
                        chosen = i
                        break
                if t == m:
                    # classification draw (no Rao-Blackwellisation)
                    if chosen == nsp:
                        p_new = p_new + 1.0
                    elif chosen < j0:
                        old[sizes[chosen]] += 1.0
                    else:
                        new[sizes[chosen]] += 1.0
                elif chosen == nsp:
                    sizes[nsp] = 1
                    nsp = nsp + 1
                else:
                    sizes[chosen] += 1
            if rao_blackwell:
                born = nsp - j0
                ro = ratio_old[m, born]
                rn = ratio_new[m, born]
                for i in range(nsp):
                    w = (sizes[i] - alpha) * ro
                    if i < j0:
                        old[sizes[i]] += w
                    else:
                        new[sizes[i]] += w
                p_new = p_new + rn
    return old_arr, new_arr, p_new
