"""Fields, transforms, norms, energies, and the linear propagator.

Conventions: fields are 2*pi-periodic; the mean-value measure is used
throughout, i.e. integral(f) := (1/2pi) * int_0^{2pi} f dx, so that
coefficient k of f equals the normalized integral of e^{-ikx} f(x).
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional

import numpy as np

from .phase import PhaseParams, phase_coeff

_HERMITIAN_TOL = 1e-10


@dataclass(frozen=True)
class EquationCoefficients:
    alpha: float
    beta: float
    gamma: float
    delta: float


@dataclass(frozen=True)
class AssumptionFlags:
    a0: bool
    a1: bool
    a2: bool


def check_assumptions(coeffs: EquationCoefficients,
                      tol: Optional[float] = None) -> AssumptionFlags:
    """a0: alpha=0; a1: alpha=beta; a2: the quartic-coefficient constraint."""
    a, b, g, d = coeffs.alpha, coeffs.beta, coeffs.gamma, coeffs.delta
    if tol is None:
        tol = 1e-12 * max(1.0, abs(450.0 * d))
    if tol <= 0:
        raise ValueError("tol must be positive")
    return AssumptionFlags(
        a0=(a == 0),
        a1=(a == b),
        a2=(abs((a - 3 * b + 6 * g) * (b + 3 * g) - 450 * d) <= tol),
    )


class SpectralField:
    """Truncated Fourier coefficients c(k), |k| <= K, stored as a dense
    complex array with c(k) at index k+K."""

    __slots__ = ("K", "coeffs")

    def __init__(self, K: int, coeffs=None):
        if K < 0:
            raise ValueError("truncation radius must be nonnegative")
        self.K = int(K)
        if coeffs is None:
            self.coeffs = np.zeros(2 * self.K + 1, dtype=np.complex128)
        else:
            coeffs = np.asarray(coeffs, dtype=np.complex128)
            if coeffs.shape != (2 * self.K + 1,):
                raise ValueError("coefficient array has wrong length")
            if not np.all(np.isfinite(coeffs)):
                raise ValueError("coefficients must be finite")
            self.coeffs = coeffs.copy()

    @classmethod
    def from_modes(cls, K: int, modes: Dict[int, complex]) -> "SpectralField":
        f = cls(K)
        for k, c in modes.items():
            if abs(k) > K:
                raise ValueError(f"mode {k} outside radius {K}")
            f.coeffs[k + K] = c
        return f

    @property
    def wavenumbers(self) -> np.ndarray:
        return np.arange(-self.K, self.K + 1)

    def coeff(self, k: int) -> complex:
        if abs(k) > self.K:
            return 0j
        return complex(self.coeffs[k + self.K])

    def copy(self) -> "SpectralField":
        return SpectralField(self.K, self.coeffs)

    @property
    def is_real_valued(self) -> bool:
        return bool(
            np.allclose(self.coeffs, np.conj(self.coeffs[::-1]),
                        rtol=0.0, atol=_HERMITIAN_TOL * max(1.0, float(np.max(np.abs(self.coeffs)) if self.coeffs.size else 0.0)))
        )

    def resized(self, K: int) -> "SpectralField":
        """Same field viewed at a different truncation radius (clamping)."""
        out = SpectralField(K)
        lo = max(-self.K, -K)
        hi = min(self.K, K)
        out.coeffs[lo + K:hi + K + 1] = self.coeffs[lo + self.K:hi + self.K + 1]
        return out

    def __add__(self, other: "SpectralField") -> "SpectralField":
        K = max(self.K, other.K)
        out = self.resized(K)
        out.coeffs += other.resized(K).coeffs
        return out

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        K = max(self.K, other.K)
        out = self.resized(K)
        out.coeffs -= other.resized(K).coeffs
        return out

    def __mul__(self, scalar) -> "SpectralField":
        out = self.copy()
        out.coeffs *= scalar
        return out

    __rmul__ = __mul__

    def __repr__(self):
        nz = int(np.count_nonzero(self.coeffs))
        return f"SpectralField(K={self.K}, nonzero={nz})"


def transform_forward(samples, K: Optional[int] = None) -> SpectralField:
    """Forward transform of M uniform samples on [0, 2pi);
    c(k) = (1/M) sum_j e^{-ik x_j} f(x_j)."""
    samples = np.asarray(samples, dtype=np.complex128)
    M = samples.size
    if K is None:
        K = (M - 1) // 2
    if M < 2 * K + 1:
        raise ValueError(f"need at least {2 * K + 1} samples for radius {K}")
    spec = np.fft.fft(samples) / M
    out = SpectralField(K)
    ks = np.arange(-K, K + 1)
    out.coeffs = spec[np.mod(ks, M)].astype(np.complex128)
    return out


def inverse_transform(fld: SpectralField, M: int) -> np.ndarray:
    """Values f(x_j) = sum_k c(k) e^{ik x_j} on the M-point uniform grid."""
    if M < 2 * fld.K + 1:
        raise ValueError("grid too small for the field's radius")
    spec = np.zeros(M, dtype=np.complex128)
    ks = np.arange(-fld.K, fld.K + 1)
    spec[np.mod(ks, M)] = fld.coeffs
    return np.fft.ifft(spec) * M


def grid_points(M: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(M) / M


def sobolev_norm(fld: SpectralField, s: float) -> float:
    """(sum_k <k>^{2s} |c(k)|^2)^{1/2} with <k> = (1+k^2)^{1/2}."""
    ks = fld.wavenumbers
    w = (1.0 + ks.astype(np.float64) ** 2) ** s
    return float(np.sqrt(np.sum(w * np.abs(fld.coeffs) ** 2)))


def _pad_grid_size(K: int, factor: int = 8) -> int:
    M = 1
    target = max(factor * max(K, 1), 2 * K + 2)
    while M < target:
        M *= 2
    return M


def energy(j: int, fld: SpectralField, coeffs: EquationCoefficients) -> float:
    """Conserved functionals of order 0..3 (mean measure).

    E0 = int f                    E1 = int f^2
    E2 = int (1/2) f_x^2 - ((beta+3gamma)/30) f^4
    E3 = int (1/2) f_xx^2 - gamma f^2 f_x^2 + delta f^6
    """
    if j not in (0, 1, 2, 3):
        raise ValueError("energy index must be 0..3")
    if not fld.is_real_valued:
        raise ValueError("energy requires a real-valued field")
    c = fld.coeffs
    ks = fld.wavenumbers.astype(np.float64)
    if j == 0:
        return float(fld.coeff(0).real)
    if j == 1:
        return float(np.sum(np.abs(c) ** 2))
    # quadrature grid fine enough to integrate degree-6 products exactly
    M = _pad_grid_size(fld.K, 8)
    u = inverse_transform(fld, M).real
    dfld = SpectralField(fld.K, c * (1j * ks))
    ux = inverse_transform(dfld, M).real
    if j == 2:
        grad = 0.5 * float(np.sum(ks ** 2 * np.abs(c) ** 2))
        quart = float(np.mean(u ** 4))
        return grad - (coeffs.beta + 3 * coeffs.gamma) / 30.0 * quart
    grad2 = 0.5 * float(np.sum(ks ** 4 * np.abs(c) ** 2))
    mixed = float(np.mean(u ** 2 * ux ** 2))
    sext = float(np.mean(u ** 6))
    return grad2 - coeffs.gamma * mixed + coeffs.delta * sext


def propagate_linear(fld: SpectralField, t: float,
                     params: PhaseParams) -> SpectralField:
    """Diagonal linear flow: c(k) -> e^{i t P(k)} c(k)."""
    ks = fld.wavenumbers
    p = np.array([phase_coeff(int(k), params) for k in ks], dtype=np.float64)
    out = fld.copy()
    out.coeffs = out.coeffs * np.exp(1j * t * p)
    return out


@dataclass(frozen=True)
class SolverConfig:
    K: int = 16
    dt: float = 1e-4
    t_final: float = 0.01
    scheme: str = "IFRK4"
    nf_threshold: int = 16          # frequency threshold L of the normal form
    quintic_radius: int = 16        # per-order lattice radius for 5-linear sums
    septic_radius: int = 8          # per-order lattice radius for 7-linear sums
    picard_tol: float = 1e-12
    picard_max_iters: int = 50
    pad_factor: int = 8
    sobolev_s: float = 2.0
    max_tuples: float = 5e8
    deterministic: bool = True
    sample_stride: int = 1          # record every n-th step

    def __post_init__(self):
        if self.pad_factor < 6:
            raise ValueError("pad_factor must be >= 6 (quintic dealiasing)")
        if self.sobolev_s < 1.5:
            raise ValueError("sobolev_s must be >= 3/2")
        if not (self.septic_radius <= self.quintic_radius):
            raise ValueError("septic radius must not exceed quintic radius")

    @property
    def k5(self) -> int:
        return min(self.K, self.quintic_radius)

    @property
    def k7(self) -> int:
        return min(self.K, self.septic_radius)


@dataclass
class TrajectoryRecord:
    times: List[float] = dc_field(default_factory=list)
    fields: List[SpectralField] = dc_field(default_factory=list)
    diagnostics: Dict[str, List[float]] = dc_field(default_factory=dict)

    def append(self, t: float, fld: SpectralField, diag: Dict[str, float]):
        if self.times and t <= self.times[-1]:
            raise ValueError("sample times must be strictly increasing")
        self.times.append(t)
        self.fields.append(fld)
        for key, val in diag.items():
            self.diagnostics.setdefault(key, []).append(val)
