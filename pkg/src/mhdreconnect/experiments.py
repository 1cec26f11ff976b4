"""Experiment pipelines: reconnection detection, deviation scaling, lemma checks.

Each pipeline consumes an ExperimentConfig and produces a report object with
a human-readable rendering and a machine-readable key=value ledger.  The
lemma checks pin their own desk-scale grids (resolution requirements differ
per check); the config supplies the physical parameters.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field as dataclass_field, replace

import numpy as np

from .diagnostics import (
    besov_neg1_inf_norm,
    decay_rate_fit,
    heat_smoothing_check,
    hk_norm,
    lp_norm,
    perturbation_diagnostics,
)
from .fields import ScalarField, VectorField
from .grid import Grid
from .initial_data import (
    InitialDataParams,
    build_initial_magnetic,
    build_initial_velocity,
    gauss_window_transform,
    make_gauss_window,
    perturbation_threshold,
    spectral_curl_gauss_abc,
)
from .operators import heat_evolve
from .solver import MhdParams, SolverState, simulate
from .topology import (
    FieldInterpolator,
    NullSearch,
    analytic_origin_jacobian,
    c1_distance,
    find_nulls_detailed,
)

logger = logging.getLogger(__name__)

#: Divergence ceiling relative to the field scale, enforced at observer ticks.
DIV_TOL = 1e-10
#: Relative slack allowed on the energy monotonicity check.
ENERGY_SLACK = 1e-12

TIMESERIES_COLUMNS = (
    "t", "e0", "e1", "e2", "e3", "e0_low", "e0_high",
    "energy_total", "Linf_u", "Linf_b", "div_max",
)


@dataclass
class GridConfig:
    L: float = 8.0 * np.pi
    n: int = 128

    def build(self) -> Grid:
        return Grid(self.L, self.n)


@dataclass
class SolverConfig:
    dt: float | None = None  # None selects the CFL-adaptive policy
    cfl_safety: float = 0.5
    cadence: float | None = None  # None: one tenth of the target time
    dealias: bool = True


@dataclass
class CensusConfig:
    radius: float | None = None  # None: L/8
    newton_tol: float = 1e-9
    hyper_tol: float = 1e-4
    comparison_radius: float = 2.0


@dataclass
class ExperimentConfig:
    grid: GridConfig = dataclass_field(default_factory=GridConfig)
    data: InitialDataParams = dataclass_field(default_factory=InitialDataParams)
    solver: SolverConfig = dataclass_field(default_factory=SolverConfig)
    census: CensusConfig = dataclass_field(default_factory=CensusConfig)
    mode: str = "reconnection"
    out_dir: str = "out"
    r: int = 3  # Sobolev level used by the deviation energies and reports

    def mhd_params(self) -> MhdParams:
        return MhdParams(
            eta=self.data.eta,
            dt=self.solver.dt,
            cfl_safety=self.solver.cfl_safety,
            dealias=self.solver.dealias,
        )

    def cadence(self) -> float:
        return self.solver.cadence if self.solver.cadence is not None else self.data.T / 10.0

    def census_radius(self) -> float:
        return self.census.radius if self.census.radius is not None else self.grid.L / 8.0


class TraceObserver:
    """Collects the standard time-series row at every tick and enforces the
    structural invariants (divergence ceiling, energy monotonicity)."""

    def __init__(self, u0: VectorField, b0: VectorField, r: int = 3):
        self.u0 = u0
        self.b0 = b0
        self.r = min(r, 3)
        self.rows: list[dict] = []
        self.violations: list[str] = []
        self._last_energy: float | None = None

    def __call__(self, state: SolverState) -> None:
        diag = perturbation_diagnostics(state, self.u0, self.b0, r=self.r)
        energy = state.energy()
        div_max = state.divergence_max()
        scale = state.field_scale()
        row = {c: 0.0 for c in TIMESERIES_COLUMNS}
        row["t"] = state.t
        for k in range(self.r + 1):
            row[f"e{k}"] = diag.energies[k]
        row["e0_low"] = diag.energies_low[0]
        row["e0_high"] = diag.energies_high[0]
        row["energy_total"] = energy
        row["Linf_u"] = lp_norm(state.u, np.inf)
        row["Linf_b"] = lp_norm(state.b, np.inf)
        row["div_max"] = div_max
        self.rows.append(row)
        if div_max > DIV_TOL * scale:
            self.violations.append(
                f"divergence {div_max:.3e} exceeds {DIV_TOL:.0e} * scale {scale:.3e} at t={state.t:.6g}"
            )
        if self._last_energy is not None and energy > self._last_energy * (1.0 + ENERGY_SLACK):
            self.violations.append(
                f"energy grew from {self._last_energy:.15e} to {energy:.15e} at t={state.t:.6g}"
            )
        self._last_energy = energy


def _census_summary(search: NullSearch, label: str) -> list[str]:
    lines = [
        f"{label}: {len(search.points)} null(s), "
        f"{len(search.hyperbolic)} hyperbolic, {len(search.unresolved)} unresolved "
        f"({search.seeds_total} seeds, {search.seeds_dropped} dropped)"
    ]
    for p in search.points:
        lines.append(
            f"  x = ({p.x[0]:+.6f}, {p.x[1]:+.6f}, {p.x[2]:+.6f})  |F| = {p.residual:.2e}  "
            f"{p.classification}  min|Re eig| = {p.min_abs_real:.4f}"
        )
    return lines


@dataclass
class ReconnectionReport:
    config: ExperimentConfig
    census_start: NullSearch
    census_end: NullSearch
    c1_dist: float
    background_hr_over_rho: float  # H^r of the heat-evolved velocity field / rho
    residual_hr_over_rho: float  # H^r of (b(T) - heat(b0, T)) / rho
    rho_star: float
    min_b0: float
    b0_scale: float
    detected: bool
    nearest_null_distance: float | None
    runtime_seconds: float
    trace_rows: list[dict]
    invariant_violations: list[str]

    @property
    def precondition_certified(self) -> bool:
        return self.config.data.rho < self.rho_star

    def asymptotic_rho(self) -> float:
        # The asymptotic amplitude schedule rho = N^-(2(r+2)+1); at desk scale
        # it is far below what the arithmetic of the runs can resolve, so the
        # configured rho is an engineering choice and both are reported.
        beta = 2 * (self.config.r + 2) + 1
        return float(self.config.data.N) ** (-beta)

    def ledger_lines(self) -> list[str]:
        d = self.config.data
        out = [
            f"mode = reconnection",
            f"grid.L = {self.config.grid.L!r}",
            f"grid.n = {self.config.grid.n}",
            f"data.M = {d.M!r}",
            f"data.rho = {d.rho!r}",
            f"data.N = {d.N!r}",
            f"data.alpha = {d.alpha!r}",
            f"data.T = {d.T!r}",
            f"data.eta = {d.eta!r}",
            f"census.radius = {self.config.census_radius()!r}",
            f"census_start.nulls = {len(self.census_start.points)}",
            f"census_start.hyperbolic = {len(self.census_start.hyperbolic)}",
            f"census_start.unresolved = {len(self.census_start.unresolved)}",
            f"census_end.nulls = {len(self.census_end.points)}",
            f"census_end.hyperbolic = {len(self.census_end.hyperbolic)}",
            f"census_end.unresolved = {len(self.census_end.unresolved)}",
            f"c1_distance = {self.c1_dist!r}",
            f"background_hr_over_rho = {self.background_hr_over_rho!r}",
            f"residual_hr_over_rho = {self.residual_hr_over_rho!r}",
            f"rho_star = {self.rho_star!r}",
            f"rho_below_rho_star = {self.precondition_certified}",
            f"min_abs_b0 = {self.min_b0!r}",
            f"min_abs_b0_over_scale = {self.min_b0 / self.b0_scale!r}",
            f"rho_asymptotic_schedule = {self.asymptotic_rho()!r}",
            f"nearest_null_distance = {self.nearest_null_distance!r}",
            f"reconnection_detected = {self.detected}",
            f"invariant_violations = {len(self.invariant_violations)}",
            f"runtime_seconds = {self.runtime_seconds!r}",
        ]
        return out

    def to_text(self) -> str:
        lines = ["magnetic reconnection pipeline", "=" * 34, ""]
        lines += _census_summary(self.census_start, "census of b at t = 0")
        lines += _census_summary(self.census_end, f"census of b at t = {self.config.data.T!r}")
        lines += [
            "",
            f"C1 distance of b(T)/rho to the target perturbation field "
            f"(ball radius {self.config.census.comparison_radius}): {self.c1_dist:.6f}",
            f"H^{self.config.r} of heat-evolved velocity background / rho: "
            f"{self.background_hr_over_rho:.6e}",
            f"H^{self.config.r} of nonlinear residual / rho: {self.residual_hr_over_rho:.6e}",
            "",
            f"no-zero amplitude threshold rho* = {self.rho_star:.6e} "
            f"(configured rho = {self.config.data.rho:.6e}; certified: {self.precondition_certified})",
            f"min |b0| on grid = {self.min_b0:.6e} ({self.min_b0 / self.b0_scale:.3e} of scale)",
            f"asymptotic amplitude schedule would give rho = {self.asymptotic_rho():.3e}; "
            f"the configured value is an engineering choice (both recorded)",
            "",
            f"verdict: reconnection {'DETECTED' if self.detected else 'NOT DETECTED'} "
            "(zero hyperbolic nulls initially and at least one at the target time)",
            f"runtime: {self.runtime_seconds:.1f} s",
        ]
        if self.invariant_violations:
            lines.append("")
            lines.append("INVARIANT VIOLATIONS:")
            lines += [f"  {v}" for v in self.invariant_violations]
        return "\n".join(lines) + "\n"


def run_reconnection(config: ExperimentConfig) -> ReconnectionReport:
    """Build the data, census nulls at both endpoint times, and compare the
    rescaled magnetic field against the target perturbation field."""
    started = time.time()
    grid = config.grid.build()
    d = config.data
    d.validate_grid(grid)
    u0 = build_initial_velocity(d, grid)
    b0 = build_initial_magnetic(d, grid)

    rho_star = perturbation_threshold(d, grid)
    b0_mag = b0.magnitude()
    min_b0 = float(np.min(b0_mag))
    b0_scale = float(np.max(b0_mag))
    if not d.rho < rho_star:
        logger.warning(
            "rho=%.3e is not below the conservative no-zero threshold rho*=%.3e; "
            "the start census decides whether b0 is actually null-free",
            d.rho, rho_star,
        )

    radius = config.census_radius()
    census0 = find_nulls_detailed(
        b0, center=(0.0, 0.0, 0.0), radius=radius,
        newton_tol=config.census.newton_tol, hyper_tol=config.census.hyper_tol,
    )

    trace = TraceObserver(u0, b0, r=config.r)
    state = simulate(
        u0, b0, config.mhd_params(), d.T, observer=trace, cadence=config.cadence()
    )

    bT = state.b.to_physical()
    censusT = find_nulls_detailed(
        bT, center=(0.0, 0.0, 0.0), radius=radius,
        newton_tol=config.census.newton_tol, hyper_tol=config.census.hyper_tol,
    )

    rho = d.rho if d.rho > 0 else 1.0
    target = spectral_curl_gauss_abc(d.eta, d.T, grid, backward=False).to_physical()
    scaled_bT = VectorField(grid, bT.data / rho, spectral=False)
    c1 = c1_distance(scaled_bT, target, radius=config.census.comparison_radius)

    background = heat_evolve(u0.to_spectral(), d.T, d.eta)
    background_hr = hk_norm(background, config.r) / rho
    heated_b0 = heat_evolve(b0.to_spectral(), d.T, d.eta)
    residual = VectorField(grid, (state.b.data - heated_b0.data) / rho, spectral=True)
    residual_hr = hk_norm(residual, config.r)

    hyp_end = censusT.hyperbolic
    nearest = None
    if hyp_end:
        nearest = min(float(np.linalg.norm(grid.min_image(p.x))) for p in hyp_end)
    detected = len(census0.hyperbolic) == 0 and len(hyp_end) >= 1

    return ReconnectionReport(
        config=config,
        census_start=census0,
        census_end=censusT,
        c1_dist=c1,
        background_hr_over_rho=background_hr,
        residual_hr_over_rho=residual_hr,
        rho_star=rho_star,
        min_b0=min_b0,
        b0_scale=b0_scale,
        detected=detected,
        nearest_null_distance=nearest,
        runtime_seconds=time.time() - started,
        trace_rows=trace.rows,
        invariant_violations=trace.violations,
    )


@dataclass
class ScalingRow:
    rho: float
    N: float
    sup_sqrt_e: list[float]  # sup over ticks of e_k^(1/2), k = 0..r
    constants: list[float]  # sup_t e_k^(1/2) / (rho N^k)


@dataclass
class ScalingTable:
    rows: list[ScalingRow]
    rho_slopes: dict[float, float]  # N -> log-log slope of sup e_0^(1/2) vs rho
    r: int
    invariant_violations: list[str]

    def ledger_lines(self) -> list[str]:
        out = [f"mode = global-bounds", f"r = {self.r}"]
        for row in self.rows:
            sup = ",".join(f"{v:.6e}" for v in row.sup_sqrt_e)
            cc = ",".join(f"{v:.6e}" for v in row.constants)
            out.append(f"row rho={row.rho!r} N={row.N!r} sup_sqrt_e = {sup}")
            out.append(f"row rho={row.rho!r} N={row.N!r} constants = {cc}")
        for N, s in self.rho_slopes.items():
            out.append(f"rho_slope[N={N!r}] = {s!r}")
        out.append(f"invariant_violations = {len(self.invariant_violations)}")
        return out

    def to_text(self) -> str:
        lines = ["deviation-from-heat-flow scaling sweep", "=" * 38, ""]
        header = "rho        N     " + "  ".join(f"sup e{k}^1/2" for k in range(self.r + 1))
        lines.append(header)
        for row in self.rows:
            vals = "  ".join(f"{v:10.4e}" for v in row.sup_sqrt_e)
            lines.append(f"{row.rho:<9.1e}  {row.N:<4g}  {vals}")
        lines.append("")
        lines.append("empirical constants sup_t e_k^(1/2) / (rho N^k):")
        for row in self.rows:
            vals = "  ".join(f"{v:10.4e}" for v in row.constants)
            lines.append(f"{row.rho:<9.1e}  {row.N:<4g}  {vals}")
        lines.append("")
        for N, s in self.rho_slopes.items():
            lines.append(f"log-log slope of sup e_0^(1/2) vs rho at N={N:g}: {s:.4f} (linear law: 1)")
        if self.invariant_violations:
            lines.append("INVARIANT VIOLATIONS:")
            lines += [f"  {v}" for v in self.invariant_violations]
        return "\n".join(lines) + "\n"


def run_global_bounds(config: ExperimentConfig, rho_list, N_list) -> ScalingTable:
    """Sweep perturbation amplitudes and Beltrami frequencies, recording the
    peak deviation energies over the run and their scaling constants."""
    if not rho_list or not N_list:
        raise ValueError("rho_list and N_list must be nonempty")
    grid = config.grid.build()
    rows: list[ScalingRow] = []
    violations: list[str] = []
    for N in N_list:
        for rho in rho_list:
            d = replace(config.data, N=float(N), rho=float(rho))
            d.validate_grid(grid)
            u0 = build_initial_velocity(d, grid)
            b0 = build_initial_magnetic(d, grid)
            trace = TraceObserver(u0, b0, r=config.r)
            params = MhdParams(
                eta=d.eta, dt=config.solver.dt,
                cfl_safety=config.solver.cfl_safety, dealias=config.solver.dealias,
            )
            simulate(u0, b0, params, d.T, observer=trace, cadence=config.cadence())
            violations += trace.violations
            sup_e = [
                max(np.sqrt(row[f"e{k}"]) for row in trace.rows)
                for k in range(config.r + 1)
            ]
            consts = [
                sup_e[k] / (rho * float(N) ** k) if rho > 0 else np.nan
                for k in range(config.r + 1)
            ]
            rows.append(ScalingRow(rho=float(rho), N=float(N), sup_sqrt_e=sup_e, constants=consts))

    slopes: dict[float, float] = {}
    for N in N_list:
        pts = [(r.rho, r.sup_sqrt_e[0]) for r in rows if r.N == float(N) and r.rho > 0]
        if len(pts) >= 2:
            xs = np.log([p[0] for p in pts])
            ys = np.log([max(p[1], 1e-300) for p in pts])
            slopes[float(N)] = float(np.polyfit(xs, ys, 1)[0])
    return ScalingTable(rows=rows, rho_slopes=slopes, r=config.r, invariant_violations=violations)


# ---------------------------------------------------------------------------
#Lemma-style verification checks.  Each check pins its own desk-scale grid;
# the "smoke" profile shrinks them for fast plumbing tests.


@dataclass
class LemmaCheck:
    name: str
    passed: bool
    measured: str
    requirement: str
    note: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  [{self.note}]" if self.note else ""
        return f"[{status}] {self.name}: {self.measured} (require {self.requirement}){extra}"

    def ledger_line(self) -> str:
        return f"{self.name}.pass = {self.passed}"


def check_gauss_transform_oracle(
    eta: float = 1.0, T: float = 0.25, profile: str = "full",
    exponent_coefficient: float = 2.0,
) -> LemmaCheck:
    """DFT of the sampled Gaussian window against the closed form.

    The closed form (8 pi eta T)^(3/2) exp(-c eta T |k|^2) with c = 2 is the
    validated resolution of two conflicting printed variants (a constant
    missing its pi^(3/2) and an exponent with c = 4); injecting c = 4 here
    makes the check fail, which is the sensitivity control.
    """
    n = 128 if profile == "full" else 64
    grid = Grid(16.0 * np.pi, n)
    psi = make_gauss_window(eta, T, grid)
    coeffs = psi.to_spectral()
    kx, ky, kz = grid.k_views()
    k2 = grid.k2
    mask = k2 <= 16.0 + 1e-12  # |k| <= 4
    predicted = (8.0 * np.pi * eta * T) ** 1.5 * np.exp(-exponent_coefficient * eta * T * k2)
    rel = np.abs(coeffs.data[mask] - predicted[mask]) / np.abs(predicted[mask])
    worst = float(np.max(rel))
    return LemmaCheck(
        name="gauss_window_transform",
        passed=worst <= 1e-6,
        measured=f"max rel err {worst:.3e} on modes |k| <= 4",
        requirement="<= 1e-6",
        note="closed form: (8*pi*eta*T)^(3/2) * exp(-2*eta*T*|k|^2)",
    )


def check_origin_jacobian(eta: float = 1.0, T: float = 0.25, profile: str = "full") -> LemmaCheck:
    """Closed-form origin Jacobian against a dense eigensolver and against
    the interpolated Jacobian of the grid-built field."""
    J, det, lam = analytic_origin_jacobian(eta, T)
    solver_lam = np.linalg.eigvals(J)
    lam_sorted = np.sort_complex(lam)
    solver_sorted = np.sort_complex(solver_lam)
    eig_err = float(np.max(np.abs(lam_sorted - solver_sorted)))
    det_err = abs(np.linalg.det(J) - det)

    n = 128 if profile == "full" else 64
    grid = Grid(8.0 * np.pi, n)
    target = spectral_curl_gauss_abc(eta, T, grid, backward=False).to_physical()
    _, jac0 = FieldInterpolator(target)(np.zeros(3))
    grid_err = float(np.max(np.abs(jac0 - J)))

    passed = eig_err <= 1e-12 and det_err <= 1e-12 and grid_err <= 1e-4
    return LemmaCheck(
        name="origin_jacobian",
        passed=passed,
        measured=(
            f"eig err {eig_err:.2e}, det err {det_err:.2e}, grid Jacobian err {grid_err:.2e}"
        ),
        requirement="eig/det <= 1e-12, grid <= 1e-4",
    )


def check_no_critical_points(profile: str = "full") -> LemmaCheck:
    """The windowed Beltrami curl has no nulls and obeys the pointwise bound."""
    if profile == "full":
        grid = Grid(4.0 * np.pi, 96)
    else:
        grid = Grid(4.0 * np.pi, 48)
    N = 16.0
    d = InitialDataParams(M=1.0, rho=0.0, N=N, alpha=2.0, T=0.1, eta=1.0)
    u0 = build_initial_velocity(d, grid)
    search = find_nulls_detailed(u0, center=(0.0, 0.0, 0.0), radius=grid.L / 4.0)
    ratio = u0.magnitude() * (1.0 + grid.radius2()) ** d.alpha / (d.M * N)
    min_ratio = float(np.min(ratio))
    margin = min_ratio / 0.5
    passed = len(search.points) == 0 and min_ratio >= 0.5
    note = "" if margin >= 2.0 else f"margin {margin:.2f}x over the bound is thin"
    return LemmaCheck(
        name="no_critical_points",
        passed=passed,
        measured=(
            f"{len(search.points)} null(s) in ball radius L/4 "
            f"({search.seeds_total} seeds), min weighted ratio {min_ratio:.4f}"
        ),
        requirement="0 nulls and ratio >= 0.5",
        note=note,
    )


def check_decay_exponents(eta: float = 1.0, T: float = 0.25, profile: str = "full") -> LemmaCheck:
    """Late-time heat decay rates of the target perturbation field."""
    n = 96 if profile == "full" else 64
    grid = Grid(64.0 * np.pi, n)
    f = spectral_curl_gauss_abc(eta, T, grid, backward=False)
    ts = np.geomspace(5.0, 50.0, 20)
    series_inf, series_2 = [], []
    for t in ts:
        hf = heat_evolve(f, t, 1.0)
        series_inf.append((t, lp_norm(hf, np.inf)))
        series_2.append((t, hk_norm(hf, 0)))
    s_inf = decay_rate_fit(series_inf, (5.0, 50.0))
    s_2 = decay_rate_fit(series_2, (5.0, 50.0))
    ok_inf = abs(s_inf - (-2.0)) <= 0.2
    ok_2 = abs(s_2 - (-1.25)) <= 0.125
    return LemmaCheck(
        name="heat_decay_exponents",
        passed=ok_inf and ok_2,
        measured=f"Linf slope {s_inf:.4f}, L2 slope {s_2:.4f}",
        requirement="-2.0 +- 10% and -1.25 +- 10%",
    )


def check_heat_smoothing(profile: str = "full", seed: int = 7) -> LemmaCheck:
    """Smoothing-bound ratio stays below 2 on random band-limited fields."""
    n = 48 if profile == "full" else 32
    count = 20 if profile == "full" else 5
    grid = Grid(2.0 * np.pi, n)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        raw = rng.standard_normal((n, n, n))
        f = ScalarField(grid, raw).to_spectral()
        f = ScalarField(grid, f.data * grid.dealias_mask, spectral=True)
        for r in (1, 2, 3):
            for eta_t in (1e-2, 1e-1, 1.0):
                worst = max(worst, heat_smoothing_check(f, eta_t, 1.0, r))
    return LemmaCheck(
        name="heat_smoothing_bound",
        passed=worst <= 2.0,
        measured=f"worst ratio {worst:.4f} over {count} fields, r in {{1,2,3}}, eta*t in {{.01,.1,1}}",
        requirement="<= 2",
    )


def check_besov_sizes(profile: str = "full") -> LemmaCheck:
    """Critical-norm size of the data tracks the amplitude parameter."""
    combos = [(1.0, 8.0, 64), (10.0, 8.0, 64), (1.0, 16.0, 96), (10.0, 16.0, 96)]
    if profile != "full":
        combos = [(1.0, 8.0, 32), (10.0, 8.0, 32)]
    ratios = []
    for M, N, n in combos:
        grid = Grid(4.0 * np.pi, n)
        d = InitialDataParams(M=M, rho=1e-3, N=N, alpha=2.0, T=0.1, eta=1.0)
        u0 = build_initial_velocity(d, grid)
        ratios.append((M, N, besov_neg1_inf_norm(u0).value / M))
    in_range = all(0.1 <= r <= 10.0 for _, _, r in ratios)

    grid = Grid(4.0 * np.pi, 64 if profile == "full" else 32)
    d = InitialDataParams(M=1.0, rho=1e-3, N=8.0, alpha=2.0, T=0.1, eta=1.0)
    bu = besov_neg1_inf_norm(build_initial_magnetic(d, grid)).value
    uu = besov_neg1_inf_norm(build_initial_velocity(d, grid)).value
    pair_ratio = bu / uu
    pair_ok = 0.9 <= pair_ratio <= 1.1
    txt = ", ".join(f"(M={M:g},N={N:g}): {r:.3f}" for M, N, r in ratios)
    return LemmaCheck(
        name="besov_size",
        passed=in_range and pair_ok,
        measured=f"value/M: {txt}; magnetic/velocity ratio {pair_ratio:.4f}",
        requirement="value/M in [0.1, 10], ratio in [0.9, 1.1]",
    )


def check_perturbation_norm_stability(profile: str = "full") -> LemmaCheck:
    """H^r size of (b0 - u0)/rho is controlled by a constant independent of
    the Beltrami frequency."""
    rho = 1e-3
    combos = [(4.0, 64), (8.0, 64), (16.0, 96)]
    if profile != "full":
        combos = [(8.0, 32), (16.0, 48)]
    values = []
    for N, n in combos:
        grid = Grid(4.0 * np.pi, n)
        d = InitialDataParams(M=1.0, rho=rho, N=N, alpha=2.0, T=0.1, eta=1.0)
        u0 = build_initial_velocity(d, grid)
        b0 = build_initial_magnetic(d, grid)
        diff = VectorField(grid, (b0.data - u0.data) / rho, spectral=False)
        values.append((N, hk_norm(diff, 3)))
    vals = [v for _, v in values]
    spread = max(vals) / min(vals)
    txt = ", ".join(f"N={N:g}: {v:.4f}" for N, v in values)
    return LemmaCheck(
        name="perturbation_norm_stability",
        passed=spread <= 1.1,
        measured=f"H^3 of (b0-u0)/rho: {txt} (spread {spread:.4f})",
        requirement="constant across N within 10%",
    )


@dataclass
class LemmaLedger:
    checks: list[LemmaCheck]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list[str]:
        return [c.line() for c in self.checks]

    def ledger_lines(self) -> list[str]:
        out = ["mode = lemma-checks"]
        for c in self.checks:
            out.append(c.ledger_line())
            out.append(f"{c.name}.measured = {c.measured}")
        out.append(f"all_passed = {self.all_passed}")
        return out


def run_lemma_checks(config: ExperimentConfig, profile: str = "full") -> LemmaLedger:
    """Run the whole battery of closed-form and estimate checks."""
    d = config.data
    checks = [
        check_gauss_transform_oracle(profile=profile),
        check_origin_jacobian(profile=profile),
        check_no_critical_points(profile=profile),
        check_decay_exponents(eta=d.eta, T=0.25, profile=profile),
        check_heat_smoothing(profile=profile),
        check_besov_sizes(profile=profile),
        check_perturbation_norm_stability(profile=profile),
    ]
    return LemmaLedger(checks)
