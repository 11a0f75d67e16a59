"""Bang sets and the farthest-point escape check."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..geom import GeometryError, as_points
from ..multiplank import GeneratingSet, MultiPlank
from ..tolerance import DEFAULT_TOL, Tolerance

BANG_CAP = 10**6


@dataclass(frozen=True)
class BangSet:
    """Minkowski sum of finite point sets, fully materialised.

    Row order is that of ``itertools.product`` over the summands (last index fastest).
    """

    summands: tuple
    points: np.ndarray

    @property
    def size(self) -> int:
        return len(self.points)


def _as_set(V) -> np.ndarray:
    if isinstance(V, GeneratingSet):
        return V.points
    if isinstance(V, MultiPlank):
        return V.V
    return as_points(V)


def bang_set(V_list: Sequence, cap: int = BANG_CAP) -> BangSet:
    sets = [_as_set(V) for V in V_list]
    if not sets:
        raise GeometryError("empty family")
    dims = {S.shape[1] for S in sets}
    if len(dims) != 1:
        raise GeometryError("summands differ in dimension")
    size = 1
    for S in sets:
        size *= len(S)
        if size > cap:
            raise GeometryError(f"Bang set would have more than {cap} points")
    X = sets[0]
    for S in sets[1:]:
        X = (X[:, None, :] + S[None, :, :]).reshape(-1, X.shape[1])
    X = np.ascontiguousarray(X)
    X.setflags(write=False)
    return BangSet(tuple(sets), X)


@dataclass(frozen=True)
class EscapeReport:
    shift: np.ndarray
    witness: np.ndarray          # first maximiser of the norm over X - s
    maximizers: np.ndarray       # all maximisers within the tie band
    margins: np.ndarray          # (maximisers, planks); positive means strictly inside
    bang_size: int
    ok: bool

    @property
    def worst_margin(self) -> float:
        return float(self.margins.max())


def _escape(sets, s, norm: Callable, margin_fns: Sequence[Callable], eps: float) -> EscapeReport:
    X = bang_set(sets).points
    s = np.asarray(s, dtype=np.float64)
    if s.shape != (X.shape[1],):
        raise GeometryError("shift dimension mismatch")
    Y = X - s
    d = norm(Y)
    top = float(d.max())
    idx = np.flatnonzero(d >= top - eps * max(1.0, top))
    M = Y[idx]
    margins = np.column_stack([fn(M) for fn in margin_fns])
    return EscapeReport(s, M[0], M, margins, len(X), bool(np.all(margins <= eps)))


def farthest_escape_check(planks: Sequence[MultiPlank], s, tol: Tolerance = DEFAULT_TOL) -> EscapeReport:
    """Take the norm maximisers of the shifted Bang set and test them against every plank.

    All multi-planks must be centered and untranslated. ``ok`` is False when
    some maximiser is strictly inside some open multi-plank.
    """
    if not planks:
        raise GeometryError("no multi-planks")
    for P in planks:
        if np.any(P.translation != 0):
            raise GeometryError("escape check needs untranslated centered multi-planks")
    return _escape([P.V for P in planks], s,
                   lambda Y: np.linalg.norm(Y, axis=1),
                   [P.margin for P in planks], tol.eps_geom)
