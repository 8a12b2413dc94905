import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from datagravity.energy import (
    EnergyBreakdown, TechProfile, WorkloadSpec, balanced_separation, disjunction_constant,
    movement_energy, total_energy, workload_bits,
)
from datagravity.errors import DomainError

from oracles import bisect

PJ = 1e-12


def profile(alpha=1e-12, beta=2.0, e_compute=1e-12, **kw):
    return TechProfile("test", e_compute, alpha, beta, **kw)


@pytest.mark.parametrize("beta", [1.0, 0.5, 3.0001, math.nan])
def test_profile_rejects_beta_outside_range(beta):
    with pytest.raises(DomainError):
        profile(beta=beta)


@pytest.mark.parametrize("field", ["e_compute", "alpha", "d_ref"])
def test_profile_rejects_nonpositive(field):
    with pytest.raises(DomainError):
        profile(**{field: 0.0})


def test_profile_rejects_fractional_bits():
    with pytest.raises(DomainError):
        profile(bits_per_access=6.5)


def test_movement_energy_zero_bits():
    assert movement_energy(profile(), 0, 1.0) == 0.0


def test_movement_energy_identity():
    assert movement_energy(profile(alpha=1.0), 1, 1.0) == 1.0


def test_movement_energy_example():
    exact = Fraction(1, 10**12) * 64 * Fraction(1, 100) ** 2
    assert exact == Fraction(1, 156250000000000)
    assert movement_energy(profile(), 64, 0.01) == pytest.approx(6.4e-15, rel=1e-15)


@pytest.mark.parametrize("n, d", [(-1, 1.0), (1, -0.1), (math.nan, 1.0)])
def test_movement_energy_domain(n, d):
    with pytest.raises(DomainError):
        movement_energy(profile(), n, d)


@given(st.floats(0, 1e12), st.floats(0, 100), st.just(0.0) | st.floats(1e-6, 1e6))
def test_movement_energy_linear_in_bits(n, d, k):
    p = profile(beta=2.5)
    assert movement_energy(p, k * n, d) == pytest.approx(k * movement_energy(p, n, d), rel=1e-12, abs=0)


@given(st.floats(1e-6, 1e3), st.sampled_from([1.1, 1.5, 2.0, 2.5, 3.0]))
def test_movement_energy_doubling_distance(d, beta):
    p = profile(beta=beta)
    ratio = movement_energy(p, 64, 2 * d) / movement_energy(p, 64, d)
    assert ratio == pytest.approx(2 ** beta, rel=1e-12)


@given(st.floats(0, 100), st.floats(0, 100), st.sampled_from([1.2, 2.0, 3.0]))
def test_movement_energy_monotone_in_distance(d1, d2, beta):
    p = profile(beta=beta)
    lo, hi = sorted((d1, d2))
    assert movement_energy(p, 8, lo) <= movement_energy(p, 8, hi)


def test_workload_bits_examples():
    assert workload_bits(WorkloadSpec(64, 1e6, 1)) == 6.4e7
    assert workload_bits(WorkloadSpec(64, 1e6, 0)) == 0
    assert workload_bits(WorkloadSpec(0, 123.0, 9.0)) == 0


def test_workload_rejects_negative():
    with pytest.raises(DomainError):
        WorkloadSpec(-1, 1, 1)


def test_disjunction_constant_examples():
    assert disjunction_constant(1300 * PJ, 1.31 * PJ) == pytest.approx(992.3664122137405, rel=1e-12)
    assert disjunction_constant(150 * PJ, 20 * PJ) == pytest.approx(7.5, rel=1e-15)
    assert disjunction_constant(3.3e-9, 3.3e-9) == 1.0


@pytest.mark.parametrize("a, b", [(0, 1), (1, 0), (-1, 1)])
def test_disjunction_constant_domain(a, b):
    with pytest.raises(DomainError):
        disjunction_constant(a, b)


@given(st.floats(1e-20, 1e-6), st.floats(1e-20, 1e-6), st.floats(1e-6, 1e6))
def test_disjunction_constant_scale_invariant(a, b, k):
    assert disjunction_constant(k * a, k * b) == pytest.approx(disjunction_constant(a, b), rel=1e-12)


def test_total_energy_colocated():
    br = total_energy(profile(), WorkloadSpec(64, 1e6, 1), 0.0)
    assert br.e_move_total == 0.0
    assert br.e_total == br.e_compute_total


def test_total_energy_example():
    br = total_energy(profile(), WorkloadSpec(64, 1, 1), 0.01)
    assert br.e_move_total == pytest.approx(6.4e-15, rel=1e-15)
    assert br.e_compute_total == 1e-12
    assert br.e_total == br.e_compute_total + br.e_move_total


def test_traditional_vs_gravitational_ratio():
    p, w = profile(), WorkloadSpec(64, 1e6, 1)
    ratio = total_energy(p, w, 1e-2).e_move_total / total_energy(p, w, 1e-6).e_move_total
    # (1e-2 / 1e-6) ** 2
    assert ratio == pytest.approx(1e8, rel=1e-12)


def test_total_energy_negative_distance():
    with pytest.raises(DomainError):
        total_energy(profile(), WorkloadSpec(1, 1, 1), -1.0)


@given(st.floats(0, 1e9), st.floats(0, 1e9))
def test_breakdown_additive(a, b):
    br = EnergyBreakdown.from_parts(a, b)
    assert br.e_total == a + b


def test_balanced_separation_unit():
    p = TechProfile("unit", 64e-12, 1e-12, 2.0)
    assert balanced_separation(p) == 1.0


def test_balanced_separation_calibrated_example():
    p = TechProfile.calibrated("ddr5", 1.31 * PJ, 1300 * PJ, 0.01, 2.0)
    oracle = bisect(lambda d: p.alpha * 64 * d * d - 1.31 * PJ, 0.0, 1.0)
    assert oracle == pytest.approx(3.174416966455900e-4, rel=1e-12)
    assert balanced_separation(p) == pytest.approx(oracle, rel=1e-12)


@pytest.mark.parametrize("beta", [1.1, 1.5, 2.0, 3.0])
def test_balanced_separation_scaling(beta):
    a = TechProfile("a", 1e-12, 3e-12, beta)
    b = TechProfile("b", 2e-12, 3e-12, beta)
    assert balanced_separation(b) / balanced_separation(a) == pytest.approx(2 ** (1 / beta), rel=1e-12)


@given(st.floats(1e-15, 1e-9), st.floats(1e-15, 1e-3), st.floats(1.01, 3.0),
       st.sampled_from([1, 8, 64, 512]))
def test_balanced_separation_defining_equation(e_comp, alpha, beta, bits):
    p = TechProfile("h", e_comp, alpha, beta, bits_per_access=bits)
    d = balanced_separation(p)
    assert movement_energy(p, bits, d) / e_comp == pytest.approx(1.0, rel=1e-9)


def test_calibrated_profile_reproduces_access_energy():
    p = TechProfile.calibrated("ddr5", 1.31 * PJ, 1300 * PJ, 0.01, 2.0)
    assert p.access_energy() == pytest.approx(1300 * PJ, rel=1e-12)
    assert p.disjunction_constant() == pytest.approx(992.3664122137405, rel=1e-12)


def test_per_bit_per_meter_normalization():
    p = TechProfile("lit", 1e-12, 5e-12, 2.0)
    assert p.disjunction_constant(per_bit=True) == pytest.approx(5.0, rel=1e-15)
    assert p.disjunction_constant() == pytest.approx(320.0, rel=1e-15)
