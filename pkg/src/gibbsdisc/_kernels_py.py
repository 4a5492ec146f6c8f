"""Pure-Python twins of the compiled kernels in ``_kernels.pyx``.

Every function performs the same floating-point operations in the same
order as its compiled counterpart, so both backends agree bit for bit.
"""

import math

import numpy as np

_MASK = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15
_INV53 = 1.0 / 9007199254740992.0


def _logaddexp(a, b):
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    hi, lo = (a, b) if a > b else (b, a)
    return hi + math.log1p(math.exp(lo - hi))


def stirling_log_table(alpha, gamma, max_n):
    t = [[-math.inf] * (max_n + 1) for _ in range(max_n + 1)]
    t[0][0] = 0.0
    for n in range(max_n):
        prev, row = t[n], t[n + 1]
        for xi in range(n + 2):
            carry = prev[xi - 1] if xi >= 1 else -math.inf
            if xi <= n:
                coef = gamma + n - xi * alpha
                if coef > 0.0 and prev[xi] != -math.inf:
                    carry = _logaddexp(carry, math.log(coef) + prev[xi])
            row[xi] = carry
    return np.array(t, dtype=float)


def _mix64(z):
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def stream_key(seed, replicate):
    return _mix64(seed + replicate * GOLDEN)


def uniform(key, counter):
    return (_mix64(key + (counter + 1) * GOLDEN) >> 11) * _INV53


def urn_accumulate(initial_sizes, m, alpha, ratio_old, ratio_new,
                   seed, rep_start, rep_stop, rao_blackwell):
    initial = [int(s) for s in initial_sizes]
    j0 = len(initial)
    kmax = sum(initial) + m
    old = [0.0] * (kmax + 2)
    new = [0.0] * (kmax + 2)
    p_new = 0.0
    ratio_old = np.asarray(ratio_old).tolist()
    ratio_new = np.asarray(ratio_new).tolist()
    steps = m if rao_blackwell else m + 1
    for rep in range(rep_start, rep_stop):
        key = _mix64(seed + rep * GOLDEN)
        sizes = list(initial)
        for t in range(steps):
            born = len(sizes) - j0
            ro = ratio_old[t][born]
            rn = ratio_new[t][born]
            total = 0.0
            for s in sizes:
                total = total + (s - alpha) * ro
            total = total + rn
            target = uniform(key, t) * total
            acc = 0.0
            chosen = len(sizes)
            for i, s in enumerate(sizes):
                acc = acc + (s - alpha) * ro
                if target < acc:
                    chosen = i
                    break
            if t == m:
                if chosen == len(sizes):
                    p_new = p_new + 1.0
                elif chosen < j0:
                    old[sizes[chosen]] += 1.0
                else:
                    new[sizes[chosen]] += 1.0
            elif chosen == len(sizes):
                sizes.append(1)
            else:
                sizes[chosen] += 1
        if rao_blackwell:
            born = len(sizes) - j0
            ro = ratio_old[m][born]
            rn = ratio_new[m][born]
            for i, s in enumerate(sizes):
                w = (s - alpha) * ro
                if i < j0:
                    old[s] += w
                else:
                    new[s] += w
            p_new = p_new + rn
    return np.array(old), np.array(new), p_new
