"""Numerical tolerances and the three-valued membership type."""
from __future__ import annotations

import enum
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerance:
    """Slack used by geometric predicates and optimizers.

    ``eps_geom`` is the width of the boundary band for predicates,
    ``eps_opt`` the convergence target of numerical searches.
    """

    eps_geom: float = 1e-9
    eps_opt: float = 1e-6

    def __post_init__(self):
        if not (0.0 < self.eps_geom < self.eps_opt < 1.0):
            raise ValueError(
                f"need 0 < eps_geom < eps_opt < 1, got {self.eps_geom}, {self.eps_opt}"
            )


DEFAULT_TOL = Tolerance()


class Membership(enum.IntEnum):
    OUTSIDE = -1
    BOUNDARY = 0
    INSIDE = 1

    @classmethod
    def from_margin(cls, margin: float, eps: float) -> "Membership":
        if margin > eps:
            return cls.INSIDE
        if margin < -eps:
            return cls.OUTSIDE
        return cls.BOUNDARY

    def contained(self, closed: bool = False) -> bool:
        if self is Membership.INSIDE:
            return True
        return closed and self is Membership.BOUNDARY
