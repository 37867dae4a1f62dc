"""Hamiltonian flows and invariant-drift monitoring.

Canonical systems move by ``x' = dH/dp, p' = -dH/dx``; group systems by
``x_mu' = sum_nu P^{mu nu} dH/dx_nu``.  Integration uses fixed steps of
classical RK4 or the implicit midpoint rule.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .catalog import GroupSystem, RealizationSystem
from .expr import (DomainError, Expression, ExprError, add, compile_expressions, differentiate,
                   mul, neg)

__all__ = ["Trajectory", "IntegrationError", "METHODS", "velocity_expressions", "vector_field",
           "integrate", "drift_report", "trajectory_csv"]

METHODS = ("rk4", "implicit_midpoint")
MIDPOINT_TOL = 1e-12
MIDPOINT_MAX_ITER = 50

System = RealizationSystem | GroupSystem


class IntegrationError(RuntimeError):
    pass


@dataclass
class Trajectory:
    system: str
    dt: float
    times: list[float]
    states: list[tuple[float, ...]]
    method: str
    coordinates: tuple[str, ...] = ()
    error: str = ""
    exit_time: float | None = None

    @property
    def completed(self) -> bool:
        return not self.error

    @property
    def final(self) -> tuple[float, ...]:
        return self.states[-1]


def velocity_expressions(sys: System, H: Expression | None = None) -> list[Expression]:
    H = sys.H if H is None else H
    if isinstance(sys, GroupSystem):
        coords = sys.coordinates
        grad = [differentiate(H, c) for c in coords]
        P = sys.bivector
        return [add(*(mul(P[mu, nu], grad[nu]) for nu in range(len(coords)) if mu != nu))
                for mu in range(len(coords))]
    s = sys.structure
    return ([differentiate(H, p) for p in s.momenta]
            + [neg(differentiate(H, x)) for x in s.positions])


def _field(sys: System, H: Expression | None) -> Callable[[Sequence[float]], tuple[float, ...]]:
    fn = compile_expressions(velocity_expressions(sys, H), sys.coordinates)

    def f(z):
        v = fn(*z)
        if not all(math.isfinite(c) for c in v):
            raise DomainError("velocity is not finite")
        return v

    return f


def vector_field(sys: System, z: Sequence[float], H: Expression | None = None) -> tuple[float, ...]:
    """Phase velocity at ``z`` (ordered as ``sys.coordinates``)."""
    if len(z) != sys.dimension:
        raise ValueError(f"{sys.id}: expected {sys.dimension} coordinates, got {len(z)}")
    return _field(sys, H)(tuple(float(c) for c in z))


def _rk4(f, z, dt):
    k1 = f(z)
    k2 = f([a + 0.5 * dt * b for a, b in zip(z, k1)])
    k3 = f([a + 0.5 * dt * b for a, b in zip(z, k2)])
    k4 = f([a + dt * b for a, b in zip(z, k3)])
    return tuple(a + dt / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
                 for a, b1, b2, b3, b4 in zip(z, k1, k2, k3, k4))


def _midpoint(f, z, dt):
    z1 = tuple(a + dt * b for a, b in zip(z, f(z)))
    for _ in range(MIDPOINT_MAX_ITER):
        v = f([0.5 * (a + b) for a, b in zip(z, z1)])
        nxt = tuple(a + dt * b for a, b in zip(z, v))
        delta = max(abs(a - b) for a, b in zip(nxt, z1))
        z1 = nxt
        if delta <= MIDPOINT_TOL * (1.0 + max(abs(c) for c in z1)):
            return z1
    raise IntegrationError(f"implicit midpoint stage did not converge in "
                           f"{MIDPOINT_MAX_ITER} iterations")


_STEPPERS = {"rk4": _rk4, "implicit_midpoint": _midpoint}


def integrate(sys: System, z0: Sequence[float] | None = None, dt: float = 1e-3, T: float = 10.0,
              method: str = "rk4", H: Expression | None = None) -> Trajectory:
    """Integrate from ``z0`` over ``[0, floor(T/dt)*dt]``.

    On a domain exit or a failed implicit stage the trajectory stops early
    and carries the error message and the time of the last good state.
    """
    if method not in _STEPPERS:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    if not dt > 0:
        raise ValueError("dt must be positive")
    if T < dt:
        raise ValueError("T must be at least dt")
    z = tuple(float(c) for c in (sys.start_point() if z0 is None else z0))
    if len(z) != sys.dimension:
        raise ValueError(f"{sys.id}: expected {sys.dimension} coordinates, got {len(z)}")
    f = _field(sys, H)
    step = _STEPPERS[method]
    n = int(math.floor(T / dt + 1e-9))
    traj = Trajectory(sys.id, dt, [0.0], [z], method, tuple(sys.coordinates))
    try:
        f(z)
    except ExprError as err:
        traj.error, traj.exit_time = f"initial point outside domain: {err}", 0.0
        return traj
    for i in range(1, n + 1):
        try:
            z = step(f, z, dt)
            if not all(math.isfinite(c) for c in z):
                raise DomainError("state is not finite")
        except (ExprError, IntegrationError) as err:
            traj.error = f"{err} (after t={traj.times[-1]:g})"
            traj.exit_time = traj.times[-1]
            break
        traj.times.append(i * dt)
        traj.states.append(z)
    return traj


def drift_report(traj: Trajectory, invariants: Mapping[str, Expression]) -> dict[str, float]:
    """Max over the trajectory of ``|I(z(t)) - I(z(0))| / (1 + |I(z(0))|)``."""
    labels = list(invariants)
    if not labels:
        return {}
    fn = compile_expressions([invariants[k] for k in labels], traj.coordinates)
    start = fn(*traj.states[0])
    worst = [0.0] * len(labels)
    for z in traj.states[1:]:
        vals = fn(*z)
        for i, (v, v0) in enumerate(zip(vals, start)):
            d = abs(v - v0) / (1.0 + abs(v0))
            if d > worst[i]:
                worst[i] = d
    return dict(zip(labels, worst))


def trajectory_csv(traj: Trajectory) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", *traj.coordinates])
    for t, z in zip(traj.times, traj.states):
        w.writerow([f"{t:.17g}", *(f"{c:.17g}" for c in z)])
    return buf.getvalue()
