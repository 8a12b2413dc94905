"""
Information mass and the data-gravity field.

A data object with entropy ``S`` bits per access, read at ``f`` Hz, carries
information mass ``M = S * f`` (bits/s).  Placed at ``r0`` it induces, at a
point ``r``, the vector field::

    G(r) = G_d * M * (r0 - r) / |r0 - r|**(beta + 1)

whose magnitude is ``G_d * M / |r - r0|**beta``.  The vector points *toward*
the data object: computation is pulled toward heavy data.  Written with
``(r - r0)`` in the numerator the same expression would point away from
the data; this module uses the attractive sign throughout.

Field values have no physical unit of their own.  Treat them as a relative
placement-preference strength (bits/s per m**beta, scaled by G_d).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .energy import check_beta
from .errors import DomainError, SingularityError

EPSILON_D = 1e-9
"""Default minimum meaningful separation in meters."""


def _vec3(name, value):
    arr = np.asarray(value, dtype=float)
    if arr.shape != (3,):
        raise DomainError(f"{name} must be a 3-vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite, got {arr.tolist()}")
    return arr


@dataclass(frozen=True)
class DataObject:
    """A positioned datum.  ``position`` is stored as a tuple of three floats."""

    id: str
    position: tuple
    entropy_per_access: float
    access_frequency: float

    def __post_init__(self):
        object.__setattr__(self, "position", tuple(_vec3("position", self.position).tolist()))
        for name in ("entropy_per_access", "access_frequency"):
            v = float(getattr(self, name))
            if not (v >= 0 and math.isfinite(v)):
                raise DomainError(f"{name} of {self.id!r} must be finite and >= 0, got {v!r}")
            object.__setattr__(self, name, v)
        if not math.isfinite(self.entropy_per_access * self.access_frequency):
            raise DomainError(f"information mass of {self.id!r} overflows")

    @property
    def mass(self):
        return information_mass(self)


@dataclass(frozen=True)
class FieldSample:
    """Field value at one point.  ``field`` and ``magnitude`` are None when singular."""

    point: tuple
    field: tuple | None
    magnitude: float | None
    singular: bool = False
    nearest_id: str | None = None


def information_mass(obj: DataObject) -> float:
    """``S * f`` in bits per second."""
    return obj.entropy_per_access * obj.access_frequency


def _field_arrays(points, positions, masses, g_d, beta, epsilon_d):
    """Field at each of ``points`` (P, 3) from objects at ``positions`` (O, 3).

    Returns the (P, 3) field and the index of the first object closer than
    ``epsilon_d`` to each point (-1 where none is).  Objects are accumulated
    one at a time in list order so that a single point and a grid of points
    produce bit-identical sums.
    """
    field = np.zeros_like(points)
    singular = np.full(points.shape[0], -1, dtype=np.intp)
    for i in range(positions.shape[0]):
        delta = positions[i] - points
        dist = np.sqrt(np.einsum("ij,ij->i", delta, delta))
        close = dist < epsilon_d
        singular[close & (singular < 0)] = i
        safe = np.where(close, 1.0, dist)
        scale = g_d * masses[i] / safe ** (beta + 1.0)
        field += np.where(close[:, None], 0.0, scale[:, None] * delta)
    return field, singular


def _unpack(objects):
    positions = np.array([o.position for o in objects], dtype=float).reshape(-1, 3)
    masses = np.array([o.mass for o in objects], dtype=float)
    return positions, masses


def _check_gd(g_d):
    g_d = float(g_d)
    if not (g_d > 0 and math.isfinite(g_d)):
        raise DomainError(f"g_d must be finite and > 0, got {g_d!r}")
    return g_d


def field_at(objects: Sequence[DataObject], point, g_d: float, beta: float,
             epsilon_d: float = EPSILON_D) -> FieldSample:
    """Superposed gravity field of ``objects`` at ``point``.

    Raises :class:`SingularityError` naming the first object that lies
    within ``epsilon_d`` of ``point``.
    """
    p = _vec3("point", point)
    beta = check_beta(beta)
    g_d = _check_gd(g_d)
    positions, masses = _unpack(objects)
    field, singular = _field_arrays(p[None, :], positions, masses, g_d, beta, epsilon_d)
    if singular[0] >= 0:
        obj = objects[singular[0]]
        raise SingularityError(obj.id, float(np.linalg.norm(positions[singular[0]] - p)), epsilon_d)
    vec = field[0]
    return FieldSample(tuple(p.tolist()), tuple(vec.tolist()), float(np.linalg.norm(vec)))


def grid_points(region, resolution):
    """Row-major grid over an axis-aligned box (x slowest, z fastest).

    ``region`` is ``(lo, hi)`` with two 3-vectors.  An axis with resolution 1
    is sampled once at its midpoint and may have zero extent; axes with more
    samples need ``hi > lo``.
    """
    lo = _vec3("region lower corner", region[0])
    hi = _vec3("region upper corner", region[1])
    res = [int(n) for n in resolution]
    if len(res) != 3 or any(n < 1 for n in res):
        raise DomainError(f"resolution must be three positive integers, got {resolution!r}")
    if np.any(hi < lo):
        raise DomainError("region upper corner lies below the lower corner")
    if all(n == 1 for n in res) or np.all(hi == lo):
        raise DomainError("region is degenerate: need at least one axis with extent and >= 2 samples")
    axes = []
    for k in range(3):
        if res[k] == 1:
            axes.append(np.array([0.5 * (lo[k] + hi[k])]))
        elif hi[k] == lo[k]:
            raise DomainError(f"axis {'xyz'[k]} has zero extent but {res[k]} samples")
        else:
            axes.append(np.linspace(lo[k], hi[k], res[k]))
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def sample_grid(objects: Sequence[DataObject], region, resolution, g_d: float,
                beta: float, epsilon_d: float = EPSILON_D) -> list[FieldSample]:
    """Evaluate the field on a regular grid.

    Points within ``epsilon_d`` of an object are returned with
    ``singular=True`` and no field value rather than raising.
    """
    beta = check_beta(beta)
    g_d = _check_gd(g_d)
    pts = grid_points(region, resolution)
    positions, masses = _unpack(objects)
    field, singular = _field_arrays(pts, positions, masses, g_d, beta, epsilon_d)
    mags = np.linalg.norm(field, axis=1)
    out = []
    for p, vec, mag, s in zip(pts, field, mags, singular):
        if s >= 0:
            out.append(FieldSample(tuple(p.tolist()), None, None, True, objects[s].id))
        else:
            out.append(FieldSample(tuple(p.tolist()), tuple(vec.tolist()), float(mag)))
    return out


CSV_COLUMNS = ("x", "y", "z", "gx", "gy", "gz", "magnitude", "singular")


def samples_to_csv(samples, fh=None):
    """Write samples as CSV (LF line endings, ``repr`` floats, ``nan`` when singular).

    Returns the text when ``fh`` is None.
    """
    buf = io.StringIO() if fh is None else fh
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    nan = (math.nan,) * 4
    for s in samples:
        vals = nan if s.singular else (*s.field, s.magnitude)
        writer.writerow([repr(float(v)) for v in (*s.point, *vals)] + [int(s.singular)])
    if fh is None:
        return buf.getvalue()
