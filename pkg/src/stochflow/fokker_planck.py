"""Density transport: forward/backward Fokker-Planck and complex variants.

The forward equation ``rho_t + (a rho)_x = (b^2/2) rho_xx`` is integrated
with a conservative finite-volume step (upwind advective flux, central
diffusive flux) on the periodic grid, so mass is conserved to round-off.

The time-reversed density equation uses the backward drift ``a_b`` and an
antidiffusion term; integrated from the final time toward 0 it is again a
well-posed forward diffusion in the reflected time variable with advection
``-a_b``, which is how ``solve_backward`` treats it.

``discrete_stationary_density`` builds the *exact* stationary point of the
discrete update by zeroing every interface flux of the same scheme; this
is the right object to test fixed-point claims against, since the analytic
stationary density is only an O(dx) stationary point of an upwind scheme.

The complex-velocity density equations

    ``rho_t + (V rho)_x + (i/2) (b^2 rho)_xx = 0``        (forward)
    ``rho_t + (V* rho)_x - (i/2) (b^2 rho)_xx = 0``       (conjugate)

hold for ``rho = F F*`` with ``V = -i b^2 F_x / F``; their half-sum is the
ordinary continuity equation in the current velocity ``v = Re V`` and
their half-difference is the osmotic constraint
``(u rho)_x = (b^2/2) rho_xx`` with ``u = -Im V``.  These are implemented
as residual evaluators over density/velocity snapshots.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import GridSpec, Norms, ScalarField, derivative, integrate, norms
from .sde import DiffusionModel

__all__ = [
    "DensityState",
    "cfl_timestep",
    "step_density",
    "solve_forward",
    "solve_backward",
    "discrete_stationary_density",
    "complex_fp_residual",
    "continuity_residual",
    "osmotic_constraint_residual",
]


@dataclass(frozen=True)
class DensityState:
    """A probability density on a grid at one instant."""

    field: ScalarField
    t: float

    def __post_init__(self):
        if self.field.grid.dim != 1:
            raise ValueError("density solvers are one-dimensional")
        if not self.field.is_real():
            raise ValueError("densities are real-valued")

    @property
    def mass(self) -> float:
        return float(np.real(integrate(self.field)))

    def values(self) -> np.ndarray:
        return np.real(self.field.values)


def cfl_timestep(model: DiffusionModel, grid: GridSpec, t: float = 0.0, safety: float = 0.4) -> float:
    """Stable explicit step: ``safety * min(dx / max|a|, dx^2 / b^2)``."""
    a = np.abs(np.asarray(model.drift(grid.axis, t), dtype=float))
    a_max = float(a.max()) if a.size else 0.0
    dx = grid.dx
    limits = [dx**2 / model.b**2]
    if a_max > 0:
        limits.append(dx / a_max)
    return safety * min(limits)


def step_density(rho: np.ndarray, a: np.ndarray, b: float, dt: float, dx: float) -> np.ndarray:
    """One conservative finite-volume update on periodic cells.

    Face ``i`` sits between cells ``i`` and ``i+1``; advection is upwinded
    on the face-averaged drift, diffusion is a central difference.
    """
    rho_right = np.roll(rho, -1)
    a_face = 0.5 * (a + np.roll(a, -1))
    upwind = np.where(a_face >= 0, rho, rho_right)
    flux = a_face * upwind - (b**2 / 2) * (rho_right - rho) / dx
    return rho - (dt / dx) * (flux - np.roll(flux, 1))


def _run(model: DiffusionModel, rho0: ScalarField, t_final: float, dt: float | None,
         drift_sign: float, time_of_step) -> ScalarField:
    grid = rho0.grid
    if dt is None:
        dt = cfl_timestep(model, grid)
    n_steps = max(1, int(np.ceil(t_final / dt)))
    dt = t_final / n_steps
    x = grid.axis
    rho = np.real(rho0.values).copy()
    for k in range(n_steps):
        a = drift_sign * np.asarray(model.drift(x, time_of_step(k * dt, dt, t_final)), dtype=float)
        rho = step_density(rho, a, model.b, dt, grid.dx)
    return ScalarField(grid, rho)


def solve_forward(
    model: DiffusionModel, rho0: DensityState, t_final: float, dt: float | None = None
) -> DensityState:
    """Integrate the forward equation from ``rho0.t`` for ``t_final`` time units."""
    out = _run(model, rho0.field, t_final, dt, +1.0, lambda s, dt_, T: rho0.t + s)
    return DensityState(field=out, t=rho0.t + t_final)


def solve_backward(
    backward_model: DiffusionModel, rho_final: DensityState, t_final: float, dt: float | None = None
) -> DensityState:
    """Integrate the time-reversed density equation from ``t = rho_final.t`` down by ``t_final``.

    ``backward_model.drift`` is the backward drift; in the reflected time
    variable the equation is a forward diffusion with advection by its
    negative, which is what gets stepped.
    """
    t_end = rho_final.t
    out = _run(
        backward_model, rho_final.field, t_final, dt, -1.0,
        lambda s, dt_, T: t_end - s,
    )
    return DensityState(field=out, t=t_end - t_final)


def discrete_stationary_density(model: DiffusionModel, grid: GridSpec, t: float = 0.0) -> ScalarField:
    """Exact zero-flux fixed point of :func:`step_density` for a steady drift.

    Zeroing the upwind/central interface flux gives the two-term recurrence

        ``rho[i+1] = rho[i] * (1 + a_f dx / D)``            if ``a_f >= 0``
        ``rho[i+1] = rho[i] / (1 - a_f dx / D)``            otherwise

    with ``D = b^2/2`` and ``a_f`` the face drift.  The recurrence is
    accumulated in log space and the result normalized to unit mass.  For a
    drift whose periodic closure is inconsistent (nonzero loop circulation)
    the seam face keeps a residual flux; the defect is proportional to
    ``exp(circulation) - 1`` and lands at the density minimum.
    """
    if grid.dim != 1:
        raise ValueError("stationary construction is one-dimensional")
    x = grid.axis
    a = np.real(np.asarray(model.drift(x, t), dtype=np.complex128))
    a_face = 0.5 * (a + np.roll(a, -1))
    d_over_dx = (model.b**2 / 2) / grid.dx
    ratio = a_face / d_over_dx
    log_factor = np.where(ratio >= 0, np.log1p(ratio), -np.log1p(-ratio))
    log_rho = np.concatenate([[0.0], np.cumsum(log_factor[:-1])])
    log_rho -= log_rho.max()
    rho = np.exp(log_rho)
    field = ScalarField(grid, rho)
    mass = float(np.real(integrate(field)))
    return ScalarField(grid, rho / mass)


def complex_fp_residual(
    rho_minus: ScalarField,
    rho_center: ScalarField,
    rho_plus: ScalarField,
    velocity: ScalarField,
    b: float,
    dt: float,
    variant: str = "forward",
    scheme: str = "spectral",
) -> Norms:
    """Residual of the complex density equation on three consecutive snapshots.

    ``rho_minus/center/plus`` are densities at ``t - dt, t, t + dt``;
    ``velocity`` is the complex velocity at ``t`` (conjugated internally
    for the conjugate variant).  The time derivative is the centred
    difference, so the residual carries an O(dt^2) floor.
    """
    if variant not in ("forward", "conjugate"):
        raise ValueError("variant must be 'forward' or 'conjugate'")
    grid = rho_center.grid
    d_rho_dt = (rho_plus.values - rho_minus.values) / (2 * dt)
    vel = velocity.values if variant == "forward" else np.conj(velocity.values)
    transport = derivative(ScalarField(grid, vel * rho_center.values), 0, scheme).values
    diff = derivative(ScalarField(grid, b**2 * rho_center.values), 0, scheme, order=2).values
    sign = 1j / 2 if variant == "forward" else -1j / 2
    return norms(ScalarField(grid, d_rho_dt + transport + sign * diff))


def continuity_residual(
    rho_minus: ScalarField,
    rho_center: ScalarField,
    rho_plus: ScalarField,
    current_velocity: ScalarField,
    dt: float,
    scheme: str = "spectral",
) -> Norms:
    """Residual of ``rho_t + (v rho)_x = 0`` with a centred time difference."""
    grid = rho_center.grid
    d_rho_dt = (rho_plus.values - rho_minus.values) / (2 * dt)
    transport = derivative(
        ScalarField(grid, current_velocity.values * rho_center.values), 0, scheme
    ).values
    return norms(ScalarField(grid, d_rho_dt + transport))


def osmotic_constraint_residual(
    rho: ScalarField, osmotic_velocity: ScalarField, b: float, scheme: str = "spectral"
) -> Norms:
    """Residual of the instantaneous constraint ``(u rho)_x = (b^2/2) rho_xx``."""
    grid = rho.grid
    lhs = derivative(ScalarField(grid, osmotic_velocity.values * rho.values), 0, scheme).values
    rhs = 0.5 * derivative(ScalarField(grid, b**2 * rho.values), 0, scheme, order=2).values
    return norms(ScalarField(grid, lhs - rhs))
