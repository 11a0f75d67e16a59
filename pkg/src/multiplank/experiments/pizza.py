"""Cutting the unit disk by fans, and the multi-plank neighbourhoods of fans."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .. import kernels
from ..geom import Fan, GeometryError, as_points, fan_rays
from ..multiplank import MultiPlank

INITIAL_GRID = 32
_SQRT2 = math.sqrt(2.0)


def pizza_bound(m: int, N: int) -> float:
    """sin(pi/m) / (N + sin(pi/m))."""
    if m < 2:
        raise GeometryError("m must be at least 2")
    if N < 1:
        raise GeometryError("N must be at least 1")
    s = math.sin(math.pi / m)
    return s / (N + s)


@dataclass(frozen=True)
class PizzaResult:
    radius: float
    center: np.ndarray
    gap: float          # certified: the true maximum is at most radius + gap
    evaluations: int
    budget: int


def pizza_best_piece(fans: Sequence[Fan], budget: int = 100_000, tol: float = 1e-4) -> PizzaResult:
    """Largest disk inside the unit disk that misses every fan.

    Maximises f(x) = min(1 - |x|, distance to the rays), which is 1-Lipschitz,
    so a square cell with center c and half-diagonal h satisfies f <= f(c) + h.
    Cells whose bound cannot beat the incumbent by more than ``tol`` are
    dropped; the rest are split in four until none remain or the evaluation
    budget runs out. The reported gap bounds the distance to the true maximum.
    """
    apex, dirs = fan_rays(fans)

    def f(X):
        return kernels.fan_clearance(X, apex, dirs)

    g = INITIAL_GRID
    h = 2.0 / g
    ticks = -1 + h * (np.arange(g) + 0.5)
    C = np.stack(np.meshgrid(ticks, ticks, indexing="ij"), axis=-1).reshape(-1, 2)
    C = C[np.linalg.norm(C, axis=1) - h / _SQRT2 <= 1.0]
    extra = np.vstack([np.zeros((1, 2)), apex]) if len(apex) else np.zeros((1, 2))
    ev = f(extra)
    best_i = int(np.argmax(ev))
    best, best_x = float(ev[best_i]), extra[best_i].copy()
    evals = len(extra)
    vals = f(C)
    evals += len(C)
    dropped_ub = -math.inf
    while True:
        i = int(np.argmax(vals))
        if vals[i] > best:
            best, best_x = float(vals[i]), C[i].copy()
        ub = vals + h / _SQRT2
        live = ub > best + tol
        if (~live).any():
            dropped_ub = max(dropped_ub, float(ub[~live].max()))
        C, vals = C[live], vals[live]
        if len(C) == 0 or evals + 4 * len(C) > budget:
            break
        q = h / 4
        offs = np.array([[-q, -q], [-q, q], [q, -q], [q, q]])
        C = (C[:, None, :] + offs[None]).reshape(-1, 2)
        h /= 2
        vals = f(C)
        evals += len(C)
    open_ub = float((vals + h / _SQRT2).max()) if len(C) else -math.inf

    # polish the incumbent; f is nonsmooth so a simplex method is used
    def neg(x):
        return -float(f(x[None])[0])

    res = minimize(neg, best_x, method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 400})
    evals += int(res.nfev)
    if -res.fun > best:
        best, best_x = float(-res.fun), np.asarray(res.x)
    gap = max(0.0, max(dropped_ub, open_ub) - best)
    return PizzaResult(best, best_x, gap, evals, budget)


def random_fans(m: int, N: int, rng: np.random.Generator) -> list[Fan]:
    """N m-fans with apexes uniform in the unit disk and uniform rotations."""
    r = np.sqrt(rng.random(N))
    t = 2 * np.pi * rng.random(N)
    rot = 2 * np.pi * rng.random(N)
    return [Fan((r[i] * math.cos(t[i]), r[i] * math.sin(t[i])), m, float(rot[i])) for i in range(N)]


def fan_neighborhood_multiplank(fan: Fan, rbar: float) -> MultiPlank:
    """Multi-plank equal to the open rbar-neighbourhood of a fan at the origin.

    Generators have length rbar / sin(pi/m) and bisect the sectors.
    """
    if np.any(np.asarray(fan.apex) != 0):
        raise GeometryError("fan must have its apex at the origin")
    if rbar <= 0:
        raise GeometryError("rbar must be positive")
    a = fan.rotation + math.pi / fan.m + 2 * np.pi * np.arange(fan.m) / fan.m
    L = rbar / math.sin(math.pi / fan.m)
    return MultiPlank.from_points(L * np.column_stack([np.cos(a), np.sin(a)]))


FAMILIES = ("m_fan", "regular_simplex", "coxeter_A", "orbit")


def orbit_half_angle(points) -> float:
    """Half the smallest pairwise geodesic distance of points on the unit sphere."""
    P = as_points(points, min_count=2)
    P = P / np.linalg.norm(P, axis=1, keepdims=True)
    G = np.clip(P @ P.T, -1.0, 1.0)
    iu = np.triu_indices(len(P), 1)
    return float(np.arccos(G[iu]).min()) / 2


def fan_half_angle(family: str, n: int | None = None, points=None) -> float:
    """Sector half-angle for the named fan families, or for an explicit orbit."""
    if family == "orbit":
        if points is None:
            raise GeometryError("orbit family needs points")
        return orbit_half_angle(points)
    if n is None or int(n) != n:
        raise GeometryError(f"{family} needs an integer parameter")
    n = int(n)
    if family == "m_fan":
        if n < 2:
            raise GeometryError("m_fan needs m >= 2")
        return math.pi / n
    if n < 2:
        raise GeometryError(f"{family} needs n >= 2")
    if family == "regular_simplex":
        return math.acos(1.0 / n)
    if family == "coxeter_A":
        return math.acos(math.sqrt(3.0 / (2 * (n - 1) * n * (n + 1))))
    raise GeometryError(f"unknown family {family!r}; expected one of {FAMILIES}")
