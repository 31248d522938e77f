"""Dynamic-model contract, benchmark systems, and a fixed-step RK4 integrator.

Models are explicit ODE systems x' = rhs(x, u, t) with an algebraic output
map y = output_map(x, u).  The integrator uses the classic 4th-order
Runge-Kutta scheme on a fixed grid, holds the control per FAPRBS plateau,
and treats divergence (non-finite state or runaway norm) as a recoverable
status rather than an error.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError
from .signal import ControlBounds, ControlSignal, sample_at

DIVERGENCE_LIMIT = 1e8

STATUS_COMPLETED = "completed"
STATUS_DIVERGED = "diverged"


@dataclass(frozen=True)
class Model:
    """A simulatable dynamic system.

    rhs(x, u, t) returns the state derivative; output_map(x, u) the output
    vector.  Both must be finite on the advertised operating region.
    """

    name: str
    n_states: int
    n_controls: int
    n_outputs: int
    default_x0: np.ndarray
    control_bounds: ControlBounds
    rhs: Callable[[np.ndarray, np.ndarray, float], np.ndarray]
    output_map: Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass
class Trajectory:
    """Fixed-timestep record of one simulation run."""

    run_id: int
    times: np.ndarray
    states: np.ndarray  # (n_times, n_states)
    outputs: np.ndarray  # (n_times, n_outputs)
    controls: np.ndarray  # (n_times, n_controls)
    status: str
    diverged_at: float | None = None

    @property
    def n_samples(self) -> int:
        return self.times.size


def _is_bad(x: np.ndarray, limit: float) -> bool:
    return not np.all(np.isfinite(x)) or float(np.max(np.abs(x))) > limit


def simulate(
    model: Model,
    x0: np.ndarray,
    signal: ControlSignal,
    dt: float,
    horizon: float,
    run_id: int = 0,
    divergence_limit: float = DIVERGENCE_LIMIT,
) -> Trajectory:
    """Integrate the model with RK4 on a fixed grid under the given signal.

    Records state, output, and control at every grid time including t=0.
    The control is evaluated through sample_at at every RK4 substep time.
    On a non-finite value or an inf-norm above divergence_limit the
    trajectory is truncated and marked diverged.
    """
    if dt <= 0:
        raise ConfigError(f"dt must be > 0, got {dt}")
    n_steps = round(horizon / dt)
    if n_steps < 1 or abs(n_steps * dt - horizon) > 1e-9 * max(1.0, horizon):
        raise ConfigError(f"dt={dt} does not divide horizon={horizon}")
    if horizon > signal.total_duration * (1 + 1e-12):
        raise ConfigError(
            f"horizon {horizon} exceeds signal duration {signal.total_duration}"
        )
    for b in signal.breakpoints:
        k = round(float(b) / dt)
        if abs(k * dt - float(b)) > 1e-9 * max(1.0, horizon):
            raise ConfigError("dt does not divide the signal's hold durations")

    x = np.asarray(x0, dtype=float).copy()
    rhs, out = model.rhs, model.output_map

    times = [0.0]
    u0 = sample_at(signal, 0.0)
    states = [x.copy()]
    outputs = [np.asarray(out(x, u0), dtype=float)]
    controls = [np.asarray(u0, dtype=float)]
    status = STATUS_COMPLETED
    diverged_at = None

    for k in range(n_steps):
        t = k * dt
        u_a = sample_at(signal, t)
        u_m = sample_at(signal, t + dt / 2)
        u_b = sample_at(signal, min(t + dt, signal.total_duration))
        k1 = np.asarray(rhs(x, u_a, t), dtype=float)
        k2 = np.asarray(rhs(x + dt / 2 * k1, u_m, t + dt / 2), dtype=float)
        k3 = np.asarray(rhs(x + dt / 2 * k2, u_m, t + dt / 2), dtype=float)
        k4 = np.asarray(rhs(x + dt * k3, u_b, t + dt), dtype=float)
        x_new = x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)

        t_new = (k + 1) * dt
        if _is_bad(x_new, divergence_limit):
            status = STATUS_DIVERGED
            diverged_at = t_new
            break
        u_new = sample_at(signal, min(t_new, signal.total_duration))
        y_new = np.asarray(out(x_new, u_new), dtype=float)
        if _is_bad(y_new, divergence_limit):
            status = STATUS_DIVERGED
            diverged_at = t_new
            break
        x = x_new
        times.append(t_new)
        states.append(x.copy())
        outputs.append(y_new)
        controls.append(np.asarray(u_new, dtype=float))

    return Trajectory(
        run_id=run_id,
        times=np.array(times),
        states=np.array(states),
        outputs=np.array(outputs),
        controls=np.array(controls),
        status=status,
        diverged_at=diverged_at,
    )


# ---------------------------------------------------------------------------
# benchmark systems


def _cstr3x2() -> Model:
    # Nonisothermal CSTR with an exothermic first-order reaction A -> B
    # (Seborg-style parameterization, time in minutes).
    vol = 100.0  # L
    c_af = 1.0  # mol/L
    k0 = 7.2e10  # 1/min
    e_over_r = 8750.0  # K
    dh = -5.0e4  # J/mol
    rho_cp = 1000.0 * 0.239  # J/(L K)
    ua = 5.0e4  # J/(min K)

    def rhs(x, u, t):
        c_a, temp = x
        q, t_f, t_c = u
        c_a = max(c_a, 0.0)
        k = k0 * np.exp(-e_over_r / max(temp, 1.0))
        rate = k * c_a
        dca = q / vol * (c_af - c_a) - rate
        dtemp = (
            q / vol * (t_f - temp)
            + (-dh) / rho_cp * rate
            + ua / (vol * rho_cp) * (t_c - temp)
        )
        return np.array([dca, dtemp])

    def output_map(x, u):
        c_a, temp = x
        return np.array([temp, 1.0 - c_a / c_af])

    bounds = ControlBounds(
        lower=np.array([90.0, 340.0, 285.0]),
        upper=np.array([110.0, 360.0, 300.0]),
        faprbs_amplitude=np.array([3.0, 2.0, 1.5]),
    )
    return Model(
        name="cstr3x2",
        n_states=2,
        n_controls=3,
        n_outputs=2,
        default_x0=np.array([0.5, 350.0]),
        control_bounds=bounds,
        rhs=rhs,
        output_map=output_map,
    )


def _vanderpol() -> Model:
    # Forced Van der Pol oscillator, mu = 1; single forcing channel.
    mu = 1.0

    def rhs(x, u, t):
        x1, x2 = x
        return np.array([x2, mu * (1.0 - x1**2) * x2 - x1 + u[0]])

    def output_map(x, u):
        return x.copy()

    bounds = ControlBounds(
        lower=np.array([-1.0]),
        upper=np.array([1.0]),
        faprbs_amplitude=np.array([0.3]),
    )
    return Model(
        name="vanderpol",
        n_states=2,
        n_controls=1,
        n_outputs=2,
        default_x0=np.array([2.0, 0.0]),
        control_bounds=bounds,
        rhs=rhs,
        output_map=output_map,
    )


def _lotka() -> Model:
    # Lotka-Volterra predator-prey with per-species harvesting controls.
    alpha, beta, delta, gamma = 1.0, 1.0, 1.0, 1.0

    def rhs(x, u, t):
        prey, pred = x
        return np.array(
            [
                prey * (alpha - beta * pred) - u[0] * prey,
                pred * (delta * prey - gamma) - u[1] * pred,
            ]
        )

    def output_map(x, u):
        return x.copy()

    bounds = ControlBounds(
        lower=np.array([0.0, 0.0]),
        upper=np.array([0.5, 0.5]),
        faprbs_amplitude=np.array([0.1, 0.1]),
    )
    # equilibrium for the nominal controls (0.25, 0.25)
    x_eq = np.array([(gamma + 0.25) / delta, (alpha - 0.25) / beta])
    return Model(
        name="lotka",
        n_states=2,
        n_controls=2,
        n_outputs=2,
        default_x0=x_eq,
        control_bounds=bounds,
        rhs=rhs,
        output_map=output_map,
    )


_BUILTINS: dict[str, Callable[[], Model]] = {
    "cstr3x2": _cstr3x2,
    "vanderpol": _vanderpol,
    "lotka": _lotka,
}


def builtin_model(name: str) -> Model:
    """Return a fully parameterized benchmark model by name."""
    try:
        factory = _BUILTINS[name]
    except KeyError:
        raise ConfigError(
            f"unknown model {name!r}; available: {sorted(_BUILTINS)}"
        ) from None
    return factory()
