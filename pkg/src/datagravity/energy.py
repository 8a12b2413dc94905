"""
Power-law data-movement energy and the operation-operand disjunction constant.

Moving ``N`` bits over an interconnect of length ``d`` costs::

    E_move = alpha * N * d**beta

where ``alpha`` bundles the technology constants and ``beta`` (1 < beta <= 3)
is the empirical distance exponent.  The disjunction constant ``G_d`` is the
ratio of movement energy to compute energy; a value of 1 means fetching an
operand costs as much as operating on it.

All energies are joules and all distances are meters.  ``alpha`` carries
units of J / (bit * m**beta), so it only makes sense together with the
``beta`` it was fitted with; :class:`TechProfile` keeps the two together.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

PJ = 1e-12
"""One picojoule in joules."""

BETA_MIN = 1.0
BETA_MAX = 3.0


def check_beta(beta: float) -> float:
    """Validate a distance exponent against the half-open range (1, 3]."""
    beta = float(beta)
    if not (BETA_MIN < beta <= BETA_MAX):
        raise DomainError(f"beta must lie in (1, 3], got {beta!r}")
    return beta


def _check_nonneg(name, value):
    value = float(value)
    if not value >= 0 or math.isinf(value):
        raise DomainError(f"{name} must be finite and >= 0, got {value!r}")
    return value


def _check_pos(name, value):
    value = float(value)
    if not value > 0 or math.isinf(value):
        raise DomainError(f"{name} must be finite and > 0, got {value!r}")
    return value


@dataclass(frozen=True)
class TechProfile:
    """A technology point: compute cost per operation plus the movement law.

    Parameters
    ----------
    label : str
        Free-form name, e.g. ``"7nm FP32 + DDR5"``.
    e_compute : float
        Energy of one operation, joules.
    alpha : float
        Movement coefficient, J / (bit * m**beta).
    beta : float
        Distance exponent in (1, 3].
    d_ref : float
        Reference distance (meters) at which :meth:`disjunction_constant`
        is evaluated by default.
    bits_per_access : int
        Width of one operand access in bits.
    """

    label: str
    e_compute: float
    alpha: float
    beta: float
    d_ref: float = 1.0
    bits_per_access: int = 64

    def __post_init__(self):
        object.__setattr__(self, "e_compute", _check_pos("e_compute", self.e_compute))
        object.__setattr__(self, "alpha", _check_pos("alpha", self.alpha))
        object.__setattr__(self, "beta", check_beta(self.beta))
        object.__setattr__(self, "d_ref", _check_pos("d_ref", self.d_ref))
        bits = self.bits_per_access
        if isinstance(bits, bool) or int(bits) != bits or bits <= 0:
            raise DomainError(f"bits_per_access must be a positive integer, got {bits!r}")
        object.__setattr__(self, "bits_per_access", int(bits))

    @classmethod
    def calibrated(cls, label, e_compute, e_access, d_access, beta,
                   bits_per_access=64, d_ref=None):
        """Build a profile whose ``alpha`` reproduces a known access cost.

        ``e_access`` is the energy of one ``bits_per_access``-wide access over
        ``d_access`` meters.  ``d_ref`` defaults to ``d_access`` so that
        :meth:`disjunction_constant` returns ``e_access / e_compute``.
        """
        e_access = _check_pos("e_access", e_access)
        d_access = _check_pos("d_access", d_access)
        beta = check_beta(beta)
        alpha = e_access / (bits_per_access * d_access ** beta)
        return cls(label, e_compute, alpha, beta,
                   d_ref=d_access if d_ref is None else d_ref,
                   bits_per_access=bits_per_access)

    def access_energy(self, d=None):
        """Energy of one ``bits_per_access``-wide access over ``d`` (default ``d_ref``)."""
        return movement_energy(self, self.bits_per_access, self.d_ref if d is None else d)

    def disjunction_constant(self, d=None, per_bit=False):
        """G_d for this profile.

        By default one full access over ``d_ref`` is compared with one
        operation.  ``per_bit=True`` moves a single bit instead, which with
        ``d_ref=1`` gives the literal "1 bit over 1 meter" normalization.
        """
        d = self.d_ref if d is None else d
        n_bits = 1 if per_bit else self.bits_per_access
        return disjunction_constant(movement_energy(self, n_bits, d), self.e_compute)


@dataclass(frozen=True)
class WorkloadSpec:
    """Entropy per operation (bits), operation rate (1/s) and duration (s)."""

    entropy_per_op: float
    op_rate: float
    duration: float

    def __post_init__(self):
        for name in ("entropy_per_op", "op_rate", "duration"):
            object.__setattr__(self, name, _check_nonneg(name, getattr(self, name)))
        if math.isinf(self.entropy_per_op * self.op_rate * self.duration):
            raise DomainError("total bits S*f*T overflows")

    @property
    def n_bits(self):
        return workload_bits(self)

    @property
    def n_ops(self):
        return self.op_rate * self.duration


@dataclass(frozen=True)
class EnergyBreakdown:
    e_compute_total: float
    e_move_total: float
    e_total: float

    @classmethod
    def from_parts(cls, e_compute_total, e_move_total):
        return cls(e_compute_total, e_move_total, e_compute_total + e_move_total)


def movement_energy(profile: TechProfile, n_bits: float, d: float) -> float:
    """Energy in joules to move ``n_bits`` over ``d`` meters."""
    n_bits = _check_nonneg("n_bits", n_bits)
    d = _check_nonneg("d", d)
    return profile.alpha * n_bits * d ** profile.beta


def workload_bits(w: WorkloadSpec) -> float:
    """Total bits touched by a workload, ``S * f * T``."""
    return w.entropy_per_op * w.op_rate * w.duration


def disjunction_constant(e_move_per_access: float, e_compute_per_op: float) -> float:
    """Ratio of movement energy per access to compute energy per operation.

    >>> round(disjunction_constant(1300e-12, 1.31e-12), 2)
    992.37
    >>> disjunction_constant(150e-12, 20e-12)
    7.5
    """
    e_move = _check_pos("e_move_per_access", e_move_per_access)
    e_comp = _check_pos("e_compute_per_op", e_compute_per_op)
    return e_move / e_comp


def total_energy(profile: TechProfile, w: WorkloadSpec, d: float) -> EnergyBreakdown:
    """Compute plus movement energy of a workload whose operands sit ``d`` away.

    One operation is charged per access event, so compute energy is
    ``e_compute * f * T`` while movement uses the full ``S * f * T`` bits.
    """
    d = _check_nonneg("d", d)
    e_comp = profile.e_compute * w.op_rate * w.duration
    e_move = movement_energy(profile, workload_bits(w), d)
    return EnergyBreakdown.from_parts(e_comp, e_move)


def balanced_separation(profile: TechProfile) -> float:
    """Distance at which one access costs exactly one operation's energy.

    Solves ``alpha * bits_per_access * d**beta == e_compute`` for ``d``.
    Operands placed closer than this cost less to fetch than to use.
    """
    return (profile.e_compute / (profile.alpha * profile.bits_per_access)) ** (1.0 / profile.beta)
