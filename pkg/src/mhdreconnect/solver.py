"""Time integration of incompressible MHD with equal viscosity and resistivity.

The diffusion term is diagonal in Fourier space and is integrated exactly by
an exponential two-stage Runge-Kutta scheme (second order in dt for the
nonlinear part, no splitting error for the stiff part).  Nonlinear terms are
evaluated pseudo-spectrally: derivatives in spectral space, products on the
grid, products dealiased by the 2/3 rule and Leray-projected.  Both equations
are projected even though only the momentum equation carries a pressure;
projecting the induction equation too removes floating-point drift off the
divergence-free manifold at no asymptotic cost.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .fields import VectorField
from .grid import Grid, fft_workers
from .operators import leray_project

import scipy.fft

__all__ = [
    "MhdParams",
    "SolverState",
    "BlowUpError",
    "nonlinear_rhs",
    "step",
    "simulate",
    "recover_pressure",
]

#: One-step relative energy growth beyond which the run is aborted.
ENERGY_GROWTH_TOL = 1e-6


class BlowUpError(RuntimeError):
    """Raised when the integration produces NaN/Inf or gains energy."""


@dataclass
class MhdParams:
    """eta is both the viscosity and the resistivity (the model assumes they
    are equal).  dt = None selects the adaptive advective CFL policy with the
    given safety factor; a positive dt fixes the step."""

    eta: float = 1.0
    dt: float | None = None
    cfl_safety: float = 0.5
    dealias: bool = True

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if not (0.0 < self.cfl_safety <= 1.0):
            raise ValueError("CFL safety factor must lie in (0, 1]")
        if self.dt is not None and not self.dt > 0:
            raise ValueError("fixed dt must be positive")


@dataclass
class SolverState:
    """Velocity and magnetic fields (kept spectral) at time t."""

    u: VectorField
    b: VectorField
    t: float
    params: MhdParams
    step_count: int = 0

    def __post_init__(self):
        if not self.u.grid == self.b.grid:
            raise ValueError("velocity and magnetic field must share one grid")
        self.u = self.u.to_spectral()
        self.b = self.b.to_spectral()

    @property
    def grid(self) -> Grid:
        return self.u.grid

    def energy(self) -> float:
        """Total energy, integral of |u|^2 + |b|^2 (spectral Parseval sum)."""
        vol = self.grid.L**3
        return float(
            (np.sum(np.abs(self.u.data) ** 2) + np.sum(np.abs(self.b.data) ** 2)) / vol
        )

    def max_speed(self) -> float:
        """max over nodes of |u| + |b| (advective CFL scale)."""
        return float(np.max(self.u.magnitude() + self.b.magnitude()))

    def divergence_max(self) -> float:
        """max over nodes of max(|div u|, |div b|)."""
        from .operators import divergence

        du = divergence(self.u).to_physical().data
        db = divergence(self.b).to_physical().data
        return float(max(np.max(np.abs(du)), np.max(np.abs(db))))

    def field_scale(self) -> float:
        return float(max(np.max(self.u.magnitude()), np.max(self.b.magnitude()), 1e-300))


def _ifft_real(grid: Grid, coeffs: np.ndarray) -> np.ndarray:
    scaled = coeffs * (grid.parity / grid.h**3)
    return scipy.fft.ifftn(scaled, axes=(-3, -2, -1), workers=fft_workers()).real


def _fft(grid: Grid, values: np.ndarray) -> np.ndarray:
    out = scipy.fft.fftn(values, axes=(-3, -2, -1), workers=fft_workers())
    out *= grid.h**3
    out *= grid.parity
    return out


def _advect(vel_phys: np.ndarray, grad_phys: np.ndarray) -> np.ndarray:
    """(vel . grad) applied to the field whose gradients are supplied.

    grad_phys[i, j] holds d(field_i)/d(x_j) on the grid.
    """
    return np.einsum("jxyz,ijxyz->ixyz", vel_phys, grad_phys)


def _nonlinear_terms(grid: Grid, uh: np.ndarray, bh: np.ndarray, dealias_products: bool):
    """Projected nonlinear right sides for both equations, spectral.

    Returns (rhs_u, rhs_b) = (P[(b.grad)b - (u.grad)u], P[(b.grad)u - (u.grad)b]).
    When u and b hold identical values the advection arrays are computed by
    the same floating-point operations, so both outputs cancel exactly.
    """
    kdx, kdy, kdz = grid.k_deriv_views()
    up = _ifft_real(grid, uh)
    bp = _ifft_real(grid, bh)

    def gradients(fh):
        out = np.empty((3, 3) + fh.shape[1:])
        for i in range(3):
            out[i, 0] = _ifft_real(grid, 1j * kdx * fh[i])
            out[i, 1] = _ifft_real(grid, 1j * kdy * fh[i])
            out[i, 2] = _ifft_real(grid, 1j * kdz * fh[i])
        return out

    gu = gradients(uh)
    gb = gradients(bh)
    adv_uu = _advect(up, gu)
    adv_bb = _advect(bp, gb)
    adv_ub = _advect(up, gb)  # (u.grad) b
    adv_bu = _advect(bp, gu)  # (b.grad) u
    del gu, gb

    rhs_u = _fft(grid, adv_bb - adv_uu)
    rhs_b = _fft(grid, adv_bu - adv_ub)
    if dealias_products:
        rhs_u *= grid.dealias_mask
        rhs_b *= grid.dealias_mask
    for rhs in (rhs_u, rhs_b):
        kdotf = kdx * rhs[0] + kdy * rhs[1] + kdz * rhs[2]
        kdotf *= grid.inv_k2_deriv
        rhs[0] -= kdx * kdotf
        rhs[1] -= kdy * kdotf
        rhs[2] -= kdz * kdotf
    return rhs_u, rhs_b


def nonlinear_rhs(state: SolverState):
    """Dealiased, Leray-projected nonlinear terms as vector fields."""
    rhs_u, rhs_b = _nonlinear_terms(
        state.grid, state.u.data, state.b.data, state.params.dealias
    )
    return (
        VectorField(state.grid, rhs_u, spectral=True),
        VectorField(state.grid, rhs_b, spectral=True),
    )


def _phi1(z: np.ndarray) -> np.ndarray:
    out = np.ones_like(z)
    nz = z != 0
    out[nz] = np.expm1(z[nz]) / z[nz]
    return out


def _phi2(z: np.ndarray) -> np.ndarray:
    # (e^z - 1 - z)/z^2 with a series fallback where cancellation would bite.
    out = np.full_like(z, 0.5)
    big = np.abs(z) > 1e-5
    out[big] = (np.expm1(z[big]) - z[big]) / z[big] ** 2
    small = ~big
    out[small] = 0.5 + z[small] / 6.0 + z[small] ** 2 / 24.0
    return out


def step(state: SolverState, dt: float) -> SolverState:
    """One exponential RK2 step of size dt.

    Diffusion is advanced by the exact multiplier; the nonlinear terms enter
    through the first two phi-functions, giving second-order accuracy.
    Aborts with BlowUpError on NaN/Inf or on relative energy growth beyond
    the blow-up tolerance (the admissible regime is strictly dissipative, so
    energy growth signals misconfiguration rather than physics).
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    grid = state.grid
    eta = state.params.eta
    z = -eta * dt * grid.k2
    E = np.exp(z)
    f1 = dt * _phi1(z)
    f2 = dt * _phi2(z)

    n_u, n_b = _nonlinear_terms(grid, state.u.data, state.b.data, state.params.dealias)
    mid_u = E * state.u.data + f1 * n_u
    mid_b = E * state.b.data + f1 * n_b
    n_u2, n_b2 = _nonlinear_terms(grid, mid_u, mid_b, state.params.dealias)
    new_u = mid_u + f2 * (n_u2 - n_u)
    new_b = mid_b + f2 * (n_b2 - n_b)

    new_state = SolverState(
        u=VectorField(grid, new_u, spectral=True),
        b=VectorField(grid, new_b, spectral=True),
        t=state.t + dt,
        params=state.params,
        step_count=state.step_count + 1,
    )
    if not (np.all(np.isfinite(new_u)) and np.all(np.isfinite(new_b))):
        raise BlowUpError(
            f"non-finite field values after step {new_state.step_count} "
            f"(t = {new_state.t:.6g}, dt = {dt:.3g}); blow-up or CFL violation"
        )
    e0, e1 = state.energy(), new_state.energy()
    if e1 > e0 * (1.0 + ENERGY_GROWTH_TOL):
        raise BlowUpError(
            f"energy grew by {(e1 - e0) / max(e0, 1e-300):.3e} in one step at "
            f"t = {new_state.t:.6g} (dt = {dt:.3g}); aborting"
        )
    return new_state


def _cfl_dt(state: SolverState) -> float:
    speed = state.max_speed()
    if speed <= 0.0:
        return np.inf
    return state.params.cfl_safety * state.grid.h / speed


def simulate(
    u0: VectorField,
    b0: VectorField,
    params: MhdParams,
    t_end: float,
    observer=None,
    cadence: float | None = None,
) -> SolverState:
    """Integrate from (u0, b0) to t_end, stopping exactly on observer ticks.

    The observer (if any) receives the read-only state at t = 0, at every
    multiple of ``cadence`` and at t_end.  Steps are shortened to land on
    ticks and on t_end exactly, so a run restarted from a tick snapshot
    reproduces the unbroken trajectory.
    """
    state = SolverState(u=u0, b=b0, t=0.0, params=params)
    if t_end < 0:
        raise ValueError("t_end must be >= 0")
    if observer is not None:
        observer(state)
    if t_end == 0:
        return state

    tick_index = 1
    t0 = state.t

    def next_stop():
        if cadence is None or observer is None:
            return t_end
        return min(t_end, t0 + tick_index * cadence)

    while state.t < t_end - 1e-12 * max(t_end, 1.0):
        stop = next_stop()
        base_dt = params.dt if params.dt is not None else _cfl_dt(state)
        dt = min(base_dt, stop - state.t)
        if not np.isfinite(dt) or dt <= 0:
            dt = stop - state.t
        state = step(state, dt)
        if state.t >= stop - 1e-12 * max(stop, 1.0):
            state.t = stop  # clamp accumulated round-off
            if observer is not None:
                observer(state)
            if cadence is not None:
                while t0 + tick_index * cadence <= stop + 1e-12:
                    tick_index += 1
    return state


def recover_pressure(state: SolverState):
    """Pressure field consistent with the projected momentum equation.

    Solves -Laplace p = div((u.grad)u - (b.grad)b) spectrally with the
    zero-mean convention, using the same dealiased products as the time
    stepper so that grad p equals the projection complement exactly.
    """
    from .fields import ScalarField

    grid = state.grid
    kdx, kdy, kdz = grid.k_deriv_views()
    up = _ifft_real(grid, state.u.data)
    bp = _ifft_real(grid, state.b.data)

    def gradients(fh):
        out = np.empty((3, 3) + fh.shape[1:])
        for i in range(3):
            out[i, 0] = _ifft_real(grid, 1j * kdx * fh[i])
            out[i, 1] = _ifft_real(grid, 1j * kdy * fh[i])
            out[i, 2] = _ifft_real(grid, 1j * kdz * fh[i])
        return out

    nl = _advect(up, gradients(state.u.data)) - _advect(bp, gradients(state.b.data))
    nl_hat = _fft(grid, nl)
    if state.params.dealias:
        nl_hat *= grid.dealias_mask
    div_nl = 1j * (kdx * nl_hat[0] + kdy * nl_hat[1] + kdz * nl_hat[2])
    p_hat = div_nl * grid.inv_k2_deriv
    return ScalarField(grid, p_hat, spectral=True)
