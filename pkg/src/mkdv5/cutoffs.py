"""Sharp 0/1 lattice cutoffs used by the multiplier tables.

Every cutoff is an exact indicator on integer tuples.  Functions are
polymorphic over Python ints (exact backend) and numpy arrays (vector
backend); fractional-power thresholds are compared by raising both sides to
the fifth power, so no floating point enters the scalar path.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from ._num import is_array, nmax, nmin, second_largest_abs


def _big(x):
    # powers of these quantities can overflow int64 in vector mode; promote
    if isinstance(x, np.ndarray):
        return x.astype(np.float64)
    return x


def _ind(cond):
    if isinstance(cond, np.ndarray):
        return cond.astype(np.float64)
    return 1 if cond else 0


def chi_le(ks, L):
    return _ind(nmax(*[abs(k) for k in ks]) <= L)


def chi_gt(ks, L):
    return _ind(nmax(*[abs(k) for k in ks]) > L)


_H1_COEFF = {3: 8, 5: 8 ** 3, 7: 8 ** 5}


def chi_h1(ks):
    """High-frequency dominance of the last slot: 8^{2N-1} max|k_{<last}| < |k_last|."""
    c = _H1_COEFF[len(ks)]
    m = nmax(*[abs(k) for k in ks[:-1]])
    return _ind(c * m < abs(ks[-1]))


def chi_h21(ks):
    k1, k2, k3 = ks
    band = (abs(k2) <= 8 * abs(k3)) & (abs(k3) <= 8 * abs(k2)) \
        if is_array(*ks) else (abs(k2) <= 8 * abs(k3) and abs(k3) <= 8 * abs(k2))
    lo = nmin(abs(k2 + k3), abs(k2), abs(k3))
    if is_array(*ks):
        return _ind((16 * abs(k1) < lo) & band)
    return _ind(16 * abs(k1) < lo and band)


def chi_h22(ks):
    k1, k2, k3 = ks
    if is_array(*ks):
        band = (abs(k2) <= 8 * abs(k3)) & (abs(k3) <= 8 * abs(k2))
        return _ind((abs(k2 + k3) <= 16 * abs(k1))
                    & (16 * abs(k1) < nmin(abs(k2), abs(k3))) & band)
    band = abs(k2) <= 8 * abs(k3) and abs(k3) <= 8 * abs(k2)
    return _ind(abs(k2 + k3) <= 16 * abs(k1)
                and 16 * abs(k1) < min(abs(k2), abs(k3)) and band)


def sym3_triple(f, ks):
    """[3 m]_sym for a 3-multiplier: (1/2) * sum over the 6 permutations."""
    k1, k2, k3 = ks
    s = (f((k1, k2, k3)) + f((k1, k3, k2)) + f((k2, k1, k3))
         + f((k2, k3, k1)) + f((k3, k1, k2)) + f((k3, k2, k1)))
    if is_array(*ks):
        return s / 2.0
    return Fraction(s, 2) if isinstance(s, int) else s / 2


def chi_h3(ks):
    """Complement of the three symmetrized high-low regimes (partition of 1)."""
    return 1 - sym3_triple(chi_h1, ks) - sym3_triple(chi_h21, ks) \
        - sym3_triple(chi_h22, ks)


def chi_nr1_3(ks):
    k1, k2, k3 = ks
    p = (k1 + k2) * (k2 + k3) * (k1 + k3)
    return _ind(p != 0)


def chi_nr1_5(ks):
    k1, k2, k3, k4, k5 = ks
    return chi_nr1_3((k1, k2, k3 + k4 + k5)) * chi_nr1_3((k3, k4, k5))


def chi_nr2(ks):
    k1, k2, k3, k4, _ = ks
    p = (k1 + k2) * (k3 + k4) * (k1 + k2 + k3 + k4)
    return _ind(p != 0)


def chi_r1(ks):
    return _ind(sum(ks[:-1]) == 0)


def chi_r2(ks):
    k1, k2, k3, k4, _ = ks
    return _ind((k1 + k2) * (k3 + k4) == 0)


def chi_r3(ks):
    k1, k2, k3 = ks
    if is_array(*ks):
        return _ind((k1 == -k2) & (k1 == k3))
    return _ind(k1 == -k2 and k1 == k3)


def chi_r4(ks):
    k1, k2, k3, k4, k5 = ks
    m = nmax(abs(k1), abs(k2), abs(k3), abs(k4))
    sec = second_largest_abs(ks[:4])
    a, b = abs(k1 + k2), abs(k3 + k4)
    c1 = _big(abs(k5)) ** 4 <= (_big(8 ** 3 * m)) ** 5
    c2 = m <= 16 * sec
    c3 = (a <= 16 * b) & (b <= 16 * a) if is_array(*ks) \
        else (a <= 16 * b and b <= 16 * a)
    if is_array(*ks):
        return _ind(c1 & c2 & c3)
    return _ind(c1 and c2 and c3)


def chi_r5(ks):
    c = _H1_COEFF[len(ks)]
    m = nmax(*[abs(k) for k in ks[:-1]])
    sec = second_largest_abs(ks[:-1])
    c1 = _big(abs(ks[-1])) ** 4 <= (_big(c * m)) ** 5
    c2 = m <= 16 * sec
    if is_array(*ks):
        return _ind(c1 & c2)
    return _ind(c1 and c2)


def chi_r6(ks):
    k1, k2, k3 = ks
    if is_array(*ks):
        return _ind((k1 == 0) & (k2 == 0) & (k3 == 0))
    return _ind(k1 == 0 and k2 == 0 and k3 == 0)


def chi_r7(ks):
    k1, k2, k3, k4, k5, k6, k7 = ks
    s6 = k1 + k2 + k3 + k4 + k5 + k6
    p = (k1 + k2 + k3 + k4) * (k3 + k4 + k5 + k6) * (k1 + k2 + k5 + k6)
    m = nmax(abs(k1), abs(k2), abs(k3), abs(k4), abs(k5), abs(k6))
    c3 = _big(abs(k7)) ** 3 > (_big(8 ** 5 * m)) ** 5
    if is_array(*ks):
        return _ind((s6 == 0) & (p != 0) & c3)
    return _ind(s6 == 0 and p != 0 and c3)


def chi_a1(ks):
    m = nmax(*[abs(k) for k in ks[:-1]])
    sec = second_largest_abs(ks[:-1])
    return _ind(16 * sec < m)


def chi_a2(ks):
    k1, k2, k3, k4, _ = ks
    return _ind(16 * abs(k1 + k2) < abs(k3 + k4))


def chi_a3(ks):
    k1, k2, k3, k4, k5 = ks
    return _ind(8 ** 3 * nmax(abs(k1), abs(k2)) < abs(k3 + k4 + k5))


def chi_a4(ks):
    m = nmax(*[abs(k) for k in ks[:-1]])
    c = _big(abs(ks[-1])) ** 3 > (_big(8 ** 5 * m)) ** 5
    return _ind(c) if is_array(*ks) else _ind(bool(c))


def chi_nr11(ks):
    if len(ks) == 5:
        k1, k2, k3, k4, k5 = ks
        return chi_h1((k1, k2, k3 + k4 + k5)) * chi_h1((k3, k4, k5))
    k1, k2, k3, k4, k5, k6, k7 = ks
    return chi_h1((k1, k2, k3, k4, k5 + k6 + k7)) * chi_h1((k5, k6, k7))


def chi_nr12(ks):
    if len(ks) == 5:
        k1, k2, k3, k4, k5 = ks
        return chi_h1((k3 + k4 + k5, k2, k1)) * chi_h1((k3, k4, k5))
    k1, k2, k3, k4, k5, k6, k7 = ks
    return chi_h1((k5 + k6 + k7, k2, k3, k4, k1)) * chi_h1((k5, k6, k7))


def chi_nr21(ks):
    if len(ks) == 5:
        k1, k2, k3, k4, k5 = ks
        return chi_h1((k1, k2, k3 + k4 + k5)) * chi_h21((k3, k4, k5))
    k1, k2, k3, k4, k5, k6, k7 = ks
    return chi_h1((k1, k2, k3, k4, k5 + k6 + k7)) * chi_h21((k5, k6, k7))


def chi_nr22(ks):
    if len(ks) == 5:
        k1, k2, k3, k4, k5 = ks
        return chi_h1((k3 + k4 + k5, k2, k1)) * chi_h21((k3, k4, k5))
    k1, k2, k3, k4, k5, k6, k7 = ks
    return chi_h1((k5 + k6 + k7, k2, k3, k4, k1)) * chi_h21((k5, k6, k7))


_BY_KIND = {
    "H1": chi_h1, "H2_1": chi_h21, "H2_2": chi_h22, "H3": chi_h3,
    "NR1": lambda ks: chi_nr1_3(ks) if len(ks) == 3 else chi_nr1_5(ks),
    "NR2": chi_nr2, "R1": chi_r1, "R2": chi_r2, "R3": chi_r3, "R4": chi_r4,
    "R5": chi_r5, "R6": chi_r6, "R7": chi_r7, "A1": chi_a1, "A2": chi_a2,
    "A3": chi_a3, "A4": chi_a4, "NR11": chi_nr11, "NR12": chi_nr12,
    "NR21": chi_nr21, "NR22": chi_nr22,
}

_ARITY = {
    "H1": {3, 5, 7}, "H2_1": {3}, "H2_2": {3}, "H3": {3}, "NR1": {3, 5},
    "NR2": {5}, "R1": {3, 5, 7}, "R2": {5}, "R3": {3}, "R4": {5},
    "R5": {5, 7}, "R6": {3}, "R7": {7}, "A1": {5, 7}, "A2": {5}, "A3": {5},
    "A4": {7}, "NR11": {5, 7}, "NR12": {5, 7}, "NR21": {5, 7},
    "NR22": {5, 7},
}


def cutoff(kind: str, ks, L=None):
    """Evaluate the named cutoff at an integer tuple. kind in {LE, GT, ...}."""
    if kind == "LE":
        if L is None:
            raise ValueError("LE requires a threshold L")
        return chi_le(ks, L)
    if kind == "GT":
        if L is None:
            raise ValueError("GT requires a threshold L")
        return chi_gt(ks, L)
    try:
        fn = _BY_KIND[kind]
    except KeyError:
        raise ValueError(f"unknown cutoff kind {kind!r}") from None
    if len(ks) not in _ARITY[kind]:
        raise ValueError(f"cutoff {kind} not defined for arity {len(ks)}")
    return fn(tuple(ks))
