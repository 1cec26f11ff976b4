"""Norms, perturbation energies, decay-rate fits and heat-smoothing checks.

Grid norms follow the quadrature of the box: L^p norms sum |f|^p h^3 over
nodes, and Fourier-side norms are normalized so that the k = 0 Sobolev norm
coincides with the grid L^2 norm (Parseval: h^3 sum |f|^2 = sum |fhat|^2 / L^3).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .fields import ScalarField, VectorField
from .grid import Grid
from .operators import _low_pass_multiplier, heat_evolve

__all__ = [
    "lp_norm",
    "hk_norm",
    "hk_dot_norm",
    "wk_inf_norm",
    "besov_neg1_inf_norm",
    "BesovEstimate",
    "PerturbationDiagnostics",
    "perturbation_diagnostics",
    "decay_rate_fit",
    "heat_smoothing_check",
    "NormEntry",
    "NormReport",
    "norm_report",
]


def _pointwise_sq(field) -> np.ndarray:
    phys = field.to_physical()
    if isinstance(field, VectorField):
        return np.sum(phys.data**2, axis=0)
    return phys.data**2


def lp_norm(field, p) -> float:
    """Grid L^p norm; vector fields use the pointwise Euclidean magnitude."""
    sq = _pointwise_sq(field)
    if p == np.inf or p == "inf":
        return float(np.sqrt(np.max(sq)))
    p = float(p)
    if p <= 0:
        raise ValueError("p must be positive or inf")
    h3 = field.grid.h**3
    return float((np.sum(sq ** (p / 2.0)) * h3) ** (1.0 / p))


def _spectral_weighted_sq(field, weight: np.ndarray) -> float:
    f = field.to_spectral()
    mag2 = np.abs(f.data) ** 2
    if isinstance(field, VectorField):
        mag2 = np.sum(mag2, axis=0)
    return float(np.sum(weight * mag2) / field.grid.L**3)


def hk_norm(field, k: int) -> float:
    """Sobolev H^k norm via the Fourier weight (1 + |k|^2)^k."""
    if k < 0:
        raise ValueError("Sobolev index must be >= 0")
    return np.sqrt(_spectral_weighted_sq(field, (1.0 + field.grid.k2) ** k))


def hk_dot_norm(field, k: int) -> float:
    """Homogeneous Sobolev seminorm via the weight |k|^(2k)."""
    if k < 0:
        raise ValueError("Sobolev index must be >= 0")
    return np.sqrt(_spectral_weighted_sq(field, field.grid.k2**k))


def _derivative_multi_indices(k: int):
    out = []
    for total in range(k + 1):
        for a1 in range(total + 1):
            for a2 in range(total - a1 + 1):
                out.append((a1, a2, total - a1 - a2))
    return out


def _derivative_weight(grid: Grid, k: int) -> np.ndarray:
    """sum over |alpha| <= k of (k1^a1 k2^a2 k3^a3)^2, broadcast to (n,n,n)."""
    kx, ky, kz = grid.k_views()
    weight = np.zeros((grid.n,) * 3)
    for a1, a2, a3 in _derivative_multi_indices(k):
        weight += (kx ** (2 * a1)) * (ky ** (2 * a2)) * (kz ** (2 * a3))
    return weight


def wk_inf_norm(field, k: int) -> float:
    """max over nodes of the root-sum-square of all derivatives up to order k."""
    if k < 0:
        raise ValueError("Sobolev index must be >= 0")
    f = field.to_spectral()
    grid = f.grid
    kx, ky, kz = grid.k_deriv_views()
    comps = f.data if isinstance(field, VectorField) else f.data[None]
    total = np.zeros((grid.n,) * 3)
    for a1, a2, a3 in _derivative_multi_indices(k):
        symbol = ((1j * kx) ** a1) * ((1j * ky) ** a2) * ((1j * kz) ** a3)
        for comp in comps:
            deriv = ScalarField(grid, symbol * comp, spectral=True).to_physical()
            total += deriv.data**2
    return float(np.sqrt(np.max(total)))


class BesovEstimate(NamedTuple):
    value: float
    t_star: float


def besov_neg1_inf_norm(field, eta_probe: float = 1.0, points: int = 200) -> BesovEstimate:
    """Caloric estimate of the regularity -1 Besov norm.

    Maximizes sqrt(t) * ||exp(eta_probe * t * Laplacian) f||_Linf over a
    logarithmic t-grid spanning [1e-6 (L/n)^2, 10 L^2].  Returns the maximum
    together with its maximizer so undersampling is detectable (an argmax on
    the grid boundary means the sweep should be widened).
    """
    grid = field.grid
    f = field.to_spectral()
    ts = np.geomspace(1e-6 * grid.h**2, 10.0 * grid.L**2, points)
    best, best_t = 0.0, ts[0]
    for t in ts:
        v = np.sqrt(t) * lp_norm(heat_evolve(f, t, eta_probe), np.inf)
        if v > best:
            best, best_t = v, t
    return BesovEstimate(float(best), float(best_t))


@dataclass
class PerturbationDiagnostics:
    """Energies of the deviation from the linear heat evolution.

    energies[k] integrates all derivatives up to order k of both deviation
    fields; low/high splits apply the smooth frequency cutoff at radius 1.
    Because the cutoff is smooth the split is not additive; ``cross`` holds
    the overlap term so that energies = low + high + cross exactly.
    """

    t: float
    velocity_deviation: VectorField
    magnetic_deviation: VectorField
    energies: list[float] = field(default_factory=list)
    energies_low: list[float] = field(default_factory=list)
    energies_high: list[float] = field(default_factory=list)
    cross: list[float] = field(default_factory=list)


def perturbation_diagnostics(state, u0: VectorField, b0: VectorField, r: int = 3):
    """Deviation fields and their level-k energies for k = 0..r."""
    if r > 4:
        warnings.warn(
            f"energy level r={r} > 4: spectral derivatives amplify noise near "
            "the Nyquist scale",
            stacklevel=2,
        )
    grid = state.u.grid
    uh = state.u.to_spectral()
    bh = state.b.to_spectral()
    u0h = heat_evolve(u0.to_spectral(), state.t, state.params.eta)
    b0h = heat_evolve(b0.to_spectral(), state.t, state.params.eta)
    v = VectorField(grid, uh.data - u0h.data, spectral=True)
    h = VectorField(grid, bh.data - b0h.data, spectral=True)

    mag2 = np.sum(np.abs(v.data) ** 2 + np.abs(h.data) ** 2, axis=0)
    low_mult = _low_pass_multiplier(grid, 1.0)
    hi_mult = 1.0 - low_mult
    cross_mult = 2.0 * low_mult * hi_mult

    diag = PerturbationDiagnostics(t=state.t, velocity_deviation=v, magnetic_deviation=h)
    vol = grid.L**3
    for k in range(r + 1):
        w = _derivative_weight(grid, k)
        diag.energies.append(float(np.sum(w * mag2) / vol))
        diag.energies_low.append(float(np.sum(w * low_mult**2 * mag2) / vol))
        diag.energies_high.append(float(np.sum(w * hi_mult**2 * mag2) / vol))
        diag.cross.append(float(np.sum(w * cross_mult * mag2) / vol))
    return diag


def decay_rate_fit(series, window) -> float:
    """Least-squares slope of log(value) against log(t) inside the window."""
    pts = [(t, v) for t, v in series if window[0] <= t <= window[1]]
    if len(pts) < 5:
        raise ValueError(f"need at least 5 points in window, got {len(pts)}")
    ts = np.array([p[0] for p in pts])
    vs = np.array([p[1] for p in pts])
    if np.any(vs <= 0) or np.any(ts <= 0):
        raise ValueError("decay fit requires positive times and values")
    slope = np.polyfit(np.log(ts), np.log(vs), 1)[0]
    return float(slope)


def heat_smoothing_check(field, t: float, eta: float, r: int) -> float:
    """Ratio of ||heat(f)||_{H^r} to the smoothing bound (1+(eta t)^-r)^(1/2) ||f||_{L^2}."""
    l2 = hk_norm(field, 0)
    if l2 == 0.0:
        return 0.0
    smoothed = heat_evolve(field.to_spectral(), t, eta)
    bound = np.sqrt(1.0 + (eta * t) ** (-r)) * l2
    return hk_norm(smoothed, r) / bound


@dataclass
class NormEntry:
    kind: str
    index: str
    value: float


@dataclass
class NormReport:
    field_id: str
    entries: list[NormEntry]

    def lines(self):
        return [f"{e.kind}{('[' + e.index + ']') if e.index else '':10s} = {e.value:.12e}"
                for e in self.entries]


def norm_report(field, field_id: str, r: int = 3) -> NormReport:
    """Standard battery of norms for one field."""
    entries = [
        NormEntry("L", "2", lp_norm(field, 2)),
        NormEntry("L", "inf", lp_norm(field, np.inf)),
    ]
    for k in range(1, r + 1):
        entries.append(NormEntry("H", str(k), hk_norm(field, k)))
    entries.append(NormEntry("Winf", "1", wk_inf_norm(field, 1)))
    besov = besov_neg1_inf_norm(field)
    entries.append(NormEntry("Besov", "-1,inf,inf", besov.value))
    return NormReport(field_id, entries)
