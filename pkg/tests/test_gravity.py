import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from datagravity.errors import DomainError, SingularityError
from datagravity.gravity import (
    DataObject, field_at, grid_points, information_mass, sample_grid, samples_to_csv,
)


def obj(id, pos, s=1.0, f=1.0):
    return DataObject(id, pos, s, f)


def reference_field(objects, point, g_d, beta):
    """Pure-Python attractive field: sum of G_d*M*(r0 - r)/|r0 - r|**(beta+1)."""
    out = [0.0, 0.0, 0.0]
    for o in objects:
        delta = [a - b for a, b in zip(o.position, point)]
        d = math.sqrt(sum(c * c for c in delta))
        for i in range(3):
            out[i] += g_d * o.entropy_per_access * o.access_frequency * delta[i] / d ** (beta + 1)
    return out


def random_objects(rng, n):
    return [obj(f"o{i}", rng.uniform(-1, 1, 3), rng.uniform(1, 64), rng.uniform(1, 1e3))
            for i in range(n)]


def test_information_mass_examples():
    assert information_mass(obj("a", (0, 0, 0), 0.0, 1e9)) == 0.0
    assert information_mass(obj("a", (0, 0, 0), 64, 1e6)) == 6.4e7
    assert information_mass(obj("a", (0, 0, 0), 1, 1)) == 1.0


@pytest.mark.parametrize("s, f", [(-1, 1), (1, -1), (math.inf, 1)])
def test_data_object_rejects_bad_mass(s, f):
    with pytest.raises(DomainError):
        obj("a", (0, 0, 0), s, f)


def test_data_object_rejects_nonfinite_position():
    with pytest.raises(DomainError):
        obj("a", (0, math.nan, 0))


def test_unit_field_points_toward_object():
    s = field_at([obj("a", (1, 0, 0))], (0, 0, 0), 1.0, 2.0)
    assert s.magnitude == 1.0
    assert s.field == (1.0, 0.0, 0.0)


def test_field_at_distance_two():
    s = field_at([obj("a", (2, 0, 0))], (0, 0, 0), 1.0, 2.0)
    assert s.magnitude == pytest.approx(2.0 ** -2, rel=1e-15)


def test_symmetric_pair_cancels():
    objs = [obj("a", (1, 0, 0)), obj("b", (-1, 0, 0))]
    s = field_at(objs, (0, 0, 0), 1.0, 2.0)
    assert s.magnitude < 1e-12


def test_matches_reference_field():
    rng = np.random.default_rng(7)
    objs = random_objects(rng, 5)
    for _ in range(20):
        p = rng.uniform(-2, 2, 3)
        s = field_at(objs, p, 37.0, 2.3)
        ref = reference_field(objs, p, 37.0, 2.3)
        np.testing.assert_allclose(s.field, ref, rtol=1e-12, atol=1e-12 * np.linalg.norm(ref))


def test_singularity_names_object():
    with pytest.raises(SingularityError) as exc:
        field_at([obj("far", (5, 0, 0)), obj("hot", (0, 0, 0))], (0, 0, 1e-12), 1.0, 2.0)
    assert exc.value.object_id == "hot"
    assert "hot" in str(exc.value)


@pytest.mark.parametrize("beta", [1.0, 3.5])
def test_field_rejects_beta(beta):
    with pytest.raises(DomainError):
        field_at([obj("a", (1, 0, 0))], (0, 0, 0), 1.0, beta)


@pytest.mark.parametrize("beta", [1.5, 2.0, 3.0])
@given(d=st.floats(1e-3, 1e3))
def test_power_law_decay(beta, d):
    o = [obj("a", (0.0, 0.0, 0.0), 3.0, 5.0)]
    m1 = field_at(o, (d, 0.0, 0.0), 2.0, beta).magnitude
    m2 = field_at(o, (2 * d, 0.0, 0.0), 2.0, beta).magnitude
    assert m2 / m1 == pytest.approx(2.0 ** -beta, rel=1e-9)


def test_linearity_in_mass():
    p = (0.3, -0.2, 0.7)
    one = field_at([obj("a", (1, 2, 3), 5.0, 7.0)], p, 3.0, 2.5)
    two_s = field_at([obj("a", (1, 2, 3), 10.0, 7.0)], p, 3.0, 2.5)
    two_f = field_at([obj("a", (1, 2, 3), 5.0, 14.0)], p, 3.0, 2.5)
    assert two_s.magnitude == 2 * one.magnitude
    assert two_f.magnitude == 2 * one.magnitude


def test_superposition_seeded():
    rng = np.random.default_rng(11)
    for _ in range(100):
        objs = random_objects(rng, int(rng.integers(2, 7)))
        cut = int(rng.integers(1, len(objs)))
        p = rng.uniform(-2, 2, 3)
        whole = np.array(field_at(objs, p, 100.0, 2.0).field)
        parts = np.array(field_at(objs[:cut], p, 100.0, 2.0).field) + \
            np.array(field_at(objs[cut:], p, 100.0, 2.0).field)
        scale = np.max(np.abs(parts))
        assert np.max(np.abs(whole - parts)) <= 1e-12 * scale


ROTATIONS = [
    np.array([[0, -1, 0], [1, 0, 0], [0, 0, 1]]),
    np.array([[1, 0, 0], [0, 0, -1], [0, 1, 0]]),
    np.array([[0, 0, 1], [0, 1, 0], [-1, 0, 0]]),
]


@pytest.mark.parametrize("rot", ROTATIONS)
def test_rotational_equivariance(rot):
    rng = np.random.default_rng(3)
    objs = random_objects(rng, 4)
    p = rng.uniform(-1, 1, 3)
    rotated = [obj(o.id, rot @ np.array(o.position), o.entropy_per_access, o.access_frequency)
               for o in objs]
    f = np.array(field_at(objs, p, 5.0, 1.7).field)
    fr = np.array(field_at(rotated, rot @ p, 5.0, 1.7).field)
    np.testing.assert_allclose(fr, rot @ f, rtol=0, atol=1e-12 * np.linalg.norm(f))


def test_grid_row_major_order():
    pts = grid_points(((0, 0, 0), (1, 1, 1)), (2, 2, 2))
    assert pts.tolist()[:3] == [[0, 0, 0], [0, 0, 1], [0, 1, 0]]
    assert pts.tolist()[-1] == [1, 1, 1]


def test_grid_empty_objects_zero_field():
    samples = sample_grid([], ((0, 0, 0), (1, 1, 1)), (3, 3, 3), 1.0, 2.0)
    assert len(samples) == 27
    assert all(s.magnitude == 0.0 and not s.singular for s in samples)


def test_grid_center_object_singular_and_symmetric():
    samples = sample_grid([obj("c", (0, 0, 0))], ((-1, -1, 0), (1, 1, 0)), (3, 3, 1), 1.0, 2.0)
    assert len(samples) == 9
    assert samples[4].singular and samples[4].field is None and samples[4].nearest_id == "c"
    corners = [samples[i].magnitude for i in (0, 2, 6, 8)]
    assert corners == [corners[0]] * 4
    assert sum(s.singular for s in samples) == 1


def test_grid_equals_sum_of_single_object_calls():
    a, b = obj("a", (0.1, 0.2, 0.3), 2, 3), obj("b", (-0.4, 0.5, -0.6), 7, 1)
    region = ((-1, -1, -1), (1, 1, 1))
    grid = sample_grid([a, b], region, (4, 3, 5), 9.0, 2.2)
    for s in grid:
        fa = np.array(field_at([a], s.point, 9.0, 2.2).field)
        fb = np.array(field_at([b], s.point, 9.0, 2.2).field)
        np.testing.assert_allclose(s.field, fa + fb, rtol=1e-12, atol=1e-12 * np.linalg.norm(fa + fb))


def test_grid_matches_field_at_bitwise():
    objs = random_objects(np.random.default_rng(5), 3)
    for s in sample_grid(objs, ((-1, -1, -1), (1, 1, 1)), (3, 4, 2), 2.0, 2.5):
        assert s.field == field_at(objs, s.point, 2.0, 2.5).field


@pytest.mark.parametrize("region, res", [
    (((0, 0, 0), (0, 0, 0)), (2, 2, 2)),
    (((1, 0, 0), (0, 1, 1)), (2, 2, 2)),
    (((0, 0, 0), (1, 1, 0)), (2, 2, 2)),
    (((0, 0, 0), (1, 1, 1)), (1, 1, 1)),
    (((0, 0, 0), (1, 1, 1)), (0, 2, 2)),
])
def test_grid_rejects_degenerate(region, res):
    with pytest.raises(DomainError):
        sample_grid([], region, res, 1.0, 2.0)


def test_csv_export():
    samples = sample_grid([obj("c", (0, 0, 0))], ((-1, 0, 0), (1, 0, 0)), (3, 1, 1), 1.0, 2.0)
    text = samples_to_csv(samples)
    lines = text.split("\n")
    assert lines[0] == "x,y,z,gx,gy,gz,magnitude,singular"
    assert lines[1] == "-1.0,0.0,0.0,1.0,0.0,0.0,1.0,0"
    assert lines[2] == "0.0,0.0,0.0,nan,nan,nan,nan,1"
    assert lines[3] == "1.0,0.0,0.0,-1.0,0.0,0.0,1.0,0"
    assert text.endswith("\n") and "\r" not in text
