"""Phase functions for the fifth-order dispersion relation on the torus.

All "rates" here are real numbers Xi with the convention that the actual
(purely imaginary) phase value is i*Xi.  Formulas are polymorphic: they accept
Python ints/Fractions (exact backend) or numpy arrays (vectorized backend).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._num import RC, I_EXACT, is_array


@dataclass(frozen=True)
class PhaseParams:
    """gamma and e1 = (squared L^2 mass of the reference profile)."""

    gamma: object = 0.0
    e1: object = 0.0

    @property
    def exact(self) -> bool:
        return isinstance(self.gamma, (int, Fraction)) and isinstance(
            self.e1, (int, Fraction)
        )

    @property
    def ge1(self):
        if self.exact:
            return Fraction(self.gamma) * Fraction(self.e1)
        return self.gamma * self.e1


def phase_coeff(k, params: PhaseParams):
    """P(k) = -k^5 + 2*gamma*e1*k^3; the symbol of the linear flow is i*P(k)."""
    return -(k ** 5) + 2 * params.ge1 * k ** 3


def phase_rate0(ks: Sequence):
    """Xi for gamma*e1 = 0: -(sum)^5 + sum of k^5.  Integer-exact on ints."""
    s = sum(ks)
    return -(s ** 5) + sum(k ** 5 for k in ks)


def _cubic_defect(ks: Sequence):
    s = sum(ks)
    return s ** 3 - sum(k ** 3 for k in ks)


def phase_mismatch(ks: Sequence, params: PhaseParams):
    """Xi^{(N)} = P(k_1+...+k_N) - sum_j P(k_j)."""
    return phase_rate0(ks) + 2 * params.ge1 * _cubic_defect(ks)


def phase_mismatch_factored(ks: Sequence, params: PhaseParams):
    """Factored evaluation of Xi^{(N)} for N in {2,3}; equals phase_mismatch."""
    ge = params.ge1
    half = Fraction(1, 2) if params.exact and not is_array(*ks) else 0.5
    if len(ks) == 2:
        k1, k2 = ks
        s = k1 + k2
        core = 5 * (k1 ** 2 + k2 ** 2 + s ** 2) - 12 * ge
        return -half * k1 * k2 * s * core
    if len(ks) == 3:
        k1, k2, k3 = ks
        a, b, c = k1 + k2, k2 + k3, k1 + k3
        core = 5 * (a ** 2 + b ** 2 + c ** 2) - 12 * ge
        return -half * a * b * c * core
    raise ValueError("factored form exists only for 2 or 3 arguments")


def phase_remainder(kind: str, ks: Sequence, params: PhaseParams | None = None):
    """Exact polynomial remainders of the phase decompositions.

    R5: i * 6*(k_{1234} k_{1235} k_{45} + k_{12} k_{23} k_{13})        (5 args)
    R7: i * 6*(k_{123456} k_{123457} k_{67} + k_{1234} k_{1235} k_{45}
               + k_{12} k_{23} k_{13})                                 (7 args)
    R0: Phi0^(5) + 5i k_{1234} k5^4, a degree-5 polynomial             (5 args)
    """
    unit = 1j if is_array(*ks) else I_EXACT
    if kind == "R5":
        if len(ks) != 5:
            raise ValueError("R5 takes 5 arguments")
        k1, k2, k3, k4, k5 = ks
        rate = 6 * ((k1 + k2 + k3 + k4) * (k1 + k2 + k3 + k5) * (k4 + k5)
                    + (k1 + k2) * (k2 + k3) * (k1 + k3))
        return unit * rate
    if kind == "R7":
        if len(ks) != 7:
            raise ValueError("R7 takes 7 arguments")
        k1, k2, k3, k4, k5, k6, k7 = ks
        s6 = k1 + k2 + k3 + k4 + k5 + k6
        s5 = k1 + k2 + k3 + k4 + k5
        rate = 6 * (s6 * (s5 + k7) * (k6 + k7)
                    + (k1 + k2 + k3 + k4) * (k1 + k2 + k3 + k5) * (k4 + k5)
                    + (k1 + k2) * (k2 + k3) * (k1 + k3))
        return unit * rate
    if kind == "R0":
        if len(ks) != 5:
            raise ValueError("R0 takes 5 arguments")
        k5 = ks[4]
        s4 = ks[0] + ks[1] + ks[2] + ks[3]
        rate = phase_rate0(ks) + 5 * s4 * k5 ** 4
        return unit * rate
    raise ValueError(f"unknown remainder kind {kind!r}")


def difference_identity_rate(ks: Sequence, params_f: PhaseParams,
                             params_g: PhaseParams):
    """Xi_f - Xi_g = gamma*(e1_f - e1_g) * rate(R^{(N)}) for N in {5, 7}."""
    n = len(ks)
    kind = {5: "R5", 7: "R7"}[n]
    r = phase_remainder(kind, ks)
    rate = r.im if isinstance(r, RC) else (r / 1j).real
    return (params_f.ge1 - params_g.ge1) * rate
