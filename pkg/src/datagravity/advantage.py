"""
Energy advantage of co-locating computation with its operands.

With separation ratio ``r = d_min / d`` the ratio of separated to co-located
total energy is::

    gamma = (1 + G_d) / (1 + G_d * r**beta)

and whenever ``G_d * r < 1`` it is bounded below by ``G_d ** ((beta - 1) / 2)``.
The bound is checked numerically here; :func:`verify_proposition` evaluates
it over parameter grids and returns every point, violations included.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .energy import check_beta
from .errors import DomainError

REL_SLACK = 1e-12


def _check_gd(g_d):
    g_d = float(g_d)
    if not (g_d >= 1 and math.isfinite(g_d)):
        raise DomainError(f"g_d must be finite and >= 1, got {g_d!r}")
    return g_d


@dataclass(frozen=True)
class AdvantageInputs:
    g_d: float
    d: float
    d_min: float
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "g_d", _check_gd(self.g_d))
        object.__setattr__(self, "beta", check_beta(self.beta))
        for name in ("d", "d_min"):
            v = float(getattr(self, name))
            if not (v > 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be finite and > 0, got {v!r}")
            object.__setattr__(self, name, v)
        if self.d_min > self.d:
            raise DomainError(f"d_min={self.d_min!r} exceeds d={self.d!r}")

    @classmethod
    def from_ratio(cls, g_d, r, beta):
        """Inputs with ``d = 1`` and ``d_min = r``."""
        return cls(g_d, 1.0, r, beta)

    @property
    def r(self):
        return self.d_min / self.d


@dataclass(frozen=True)
class AdvantageReport:
    g_d: float
    beta: float
    r: float
    gamma: float
    lower_bound: float
    condition_holds: bool
    bound_satisfied: bool

    @property
    def violation(self):
        """True only when the condition holds and the bound fails."""
        return self.condition_holds and not self.bound_satisfied


def colocation_condition(inputs: AdvantageInputs) -> bool:
    """``G_d * d_min / d < 1`` (strict)."""
    return inputs.g_d * inputs.r < 1.0


def gamma(g_d, r, beta):
    """Advantage factor for raw (possibly array) arguments, no validation."""
    return (1.0 + g_d) / (1.0 + g_d * r ** beta)


def bound(g_d, beta):
    """``g_d ** ((beta - 1) / 2)`` for raw (possibly array) arguments."""
    return g_d ** ((beta - 1.0) / 2.0)


def advantage_factor(inputs: AdvantageInputs) -> float:
    """Separated-to-co-located energy ratio.

    >>> advantage_factor(AdvantageInputs(1000, 1e-2, 1e-6, 2))  # doctest: +ELLIPSIS
    1000.98999...
    """
    return gamma(inputs.g_d, inputs.r, inputs.beta)


def advantage_lower_bound(g_d: float, beta: float) -> float:
    """Guaranteed savings ``g_d ** ((beta - 1) / 2)``; ``sqrt(g_d)`` at beta=2."""
    return bound(_check_gd(g_d), check_beta(beta))


def _satisfied(gam, low, rel_slack):
    return gam >= low * (1.0 - rel_slack)


def evaluate(inputs: AdvantageInputs, rel_slack: float = REL_SLACK) -> AdvantageReport:
    """Full report for one parameter point."""
    gam = advantage_factor(inputs)
    low = advantage_lower_bound(inputs.g_d, inputs.beta)
    return AdvantageReport(inputs.g_d, inputs.beta, inputs.r, gam, low,
                           colocation_condition(inputs), bool(_satisfied(gam, low, rel_slack)))


def verify_proposition(g_d_values, beta_values, r_values, *, r_relative=False,
                       rel_slack=REL_SLACK) -> list[AdvantageReport]:
    """Evaluate gamma against the bound over a Cartesian grid.

    Points are ordered with ``g_d`` outermost and ``r`` innermost.  With
    ``r_relative=True`` each entry of ``r_values`` is a fraction of
    ``1 / g_d``, which keeps every point of a log grid inside the region
    where the bound is claimed.  Every point is returned; only those with
    ``condition_holds`` are meant to be asserted, see :func:`violations`.
    """
    g = np.asarray([_check_gd(v) for v in g_d_values], dtype=float)
    b = np.asarray([check_beta(v) for v in beta_values], dtype=float)
    rv = np.asarray(r_values, dtype=float)
    if rv.ndim != 1 or rv.size == 0 or np.any(~(rv > 0)):
        raise DomainError("r_values must be a non-empty sequence of positive numbers")
    G, B, R = np.meshgrid(g, b, rv, indexing="ij")
    if r_relative:
        R = R / G
    if np.any(R > 1.0):
        raise DomainError("grid contains r > 1 (d_min larger than d)")
    gam = gamma(G, R, B)
    low = bound(G, B)
    cond = G * R < 1.0
    ok = _satisfied(gam, low, rel_slack)
    return [AdvantageReport(*row) for row in zip(
        G.ravel().tolist(), B.ravel().tolist(), R.ravel().tolist(),
        gam.ravel().tolist(), low.ravel().tolist(),
        cond.ravel().tolist(), ok.ravel().tolist())]


def violations(reports):
    """Reports where the colocation condition holds but gamma falls below the bound."""
    return [rep for rep in reports if rep.violation]


@dataclass(frozen=True)
class SweepRange:
    """``n`` points from ``lo`` to ``hi`` inclusive, linear or logarithmic."""

    lo: float
    hi: float
    n: int = 1
    log: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise DomainError(f"range bounds must be finite: {self}")
        if self.lo > self.hi:
            raise DomainError(f"range minimum exceeds maximum: {self}")
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise DomainError(f"range needs a positive point count: {self}")
        if self.n == 1 and self.lo != self.hi:
            raise DomainError(f"a one-point range needs lo == hi: {self}")
        if self.log and self.lo <= 0:
            raise DomainError(f"logarithmic range needs lo > 0: {self}")

    @classmethod
    def parse(cls, text):
        """Parse ``lo:hi:n`` or ``lo:hi:n:log``; a bare number is a single point."""
        parts = text.split(":")
        try:
            if len(parts) == 1:
                v = float(parts[0])
                return cls(v, v, 1)
            if len(parts) in (3, 4):
                log = len(parts) == 4
                if log and parts[3] not in ("log", "lin"):
                    raise ValueError(parts[3])
                return cls(float(parts[0]), float(parts[1]), int(parts[2]),
                           log and parts[3] == "log")
        except ValueError as exc:
            raise DomainError(f"malformed range {text!r}: {exc}") from None
        raise DomainError(f"malformed range {text!r}: expected lo:hi:n[:log]")

    def values(self):
        if self.n == 1:
            return [float(self.lo)]
        if self.log:
            vals = np.logspace(math.log10(self.lo), math.log10(self.hi), self.n)
        else:
            vals = np.linspace(self.lo, self.hi, self.n)
        vals[0], vals[-1] = self.lo, self.hi
        return [float(v) for v in vals]


class SweepRow(NamedTuple):
    g_d: float
    beta: float
    r: float
    gamma: float
    bound: float
    condition: bool


SWEEP_COLUMNS = SweepRow._fields


def sweep(g_d_range: SweepRange, beta_range: SweepRange, r_range: SweepRange) -> list[SweepRow]:
    """Tabulate gamma and the bound; rows ordered g_d, then beta, then r."""
    rows = []
    for g, b, r in itertools.product(g_d_range.values(), beta_range.values(), r_range.values()):
        inputs = AdvantageInputs.from_ratio(g, r, b)
        rows.append(SweepRow(g, inputs.beta, inputs.r, advantage_factor(inputs),
                             advantage_lower_bound(g, b), colocation_condition(inputs)))
    return rows


def sweep_to_csv(rows, fh=None):
    """CSV with header ``g_d,beta,r,gamma,bound,condition``; returns text if ``fh`` is None."""
    buf = io.StringIO() if fh is None else fh
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow([repr(row.g_d), repr(row.beta), repr(row.r), repr(row.gamma),
                         repr(row.bound), "true" if row.condition else "false"])
    if fh is None:
        return buf.getvalue()
