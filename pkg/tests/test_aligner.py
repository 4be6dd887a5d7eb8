"""Geometric hashing: per-basis frames, thresholds and candidate collection."""

import math
import random

import numpy as np
import pytest

from fuzzyvault.aligner import (
    GeometricTable,
    MatchParams,
    build_geometric_table,
    circular_diff,
    collect_candidates,
    match_margins,
    match_margins_many,
    rigid_transform,
)
from fuzzyvault.minutiae import Minutia
from fuzzyvault.vault import VaultPoint


def rotate_about(m, cx, cy, deg, dx=0.0, dy=0.0):
    """Independent rigid-motion oracle using a plain rotation matrix."""
    r = math.radians(deg)
    x = cx + (m.x - cx) * math.cos(r) - (m.y - cy) * math.sin(r) + dx
    y = cy + (m.x - cx) * math.sin(r) + (m.y - cy) * math.cos(r) + dy
    return Minutia(x, y, (m.theta + deg) % 360.0, m.quality)


def test_basis_maps_to_origin():
    b = Minutia(123, 45, 77.0)
    t = rigid_transform(b, b)
    assert (t.x, t.y, t.theta) == (0.0, 0.0, 0.0)


def test_pure_translation():
    t = rigid_transform(Minutia(10, 10, 0.0), Minutia(20, 15, 45.0))
    assert (t.x, t.y, t.theta) == (10.0, 5.0, 45.0)


def test_rotated_basis_pinned_example():
    t = rigid_transform(Minutia(10, 10, 90.0), Minutia(10, 20, 90.0))
    assert abs(t.x - 10.0) < 1e-9
    assert abs(t.y - 0.0) < 1e-9
    assert t.theta == 0.0


def test_rigid_transform_matches_rotation_matrix_oracle():
    rng = random.Random(21)
    for _ in range(200):
        b = Minutia(rng.randrange(400), rng.randrange(560), rng.uniform(0, 360))
        m = Minutia(rng.randrange(400), rng.randrange(560), rng.uniform(0, 360))
        t = rigid_transform(b, m)
        # the frame rotates by -theta_b: verify by rotating the frame back
        r = math.radians(b.theta)
        x_back = t.x * math.cos(r) - t.y * math.sin(r) + b.x
        y_back = t.x * math.sin(r) + t.y * math.cos(r) + b.y
        assert abs(x_back - m.x) < 1e-8
        assert abs(y_back - m.y) < 1e-8
        assert circular_diff(t.theta, (m.theta - b.theta) % 360.0) < 1e-9


def test_table_shapes():
    one = build_geometric_table([Minutia(5, 5, 10.0)])
    assert len(one) == 1
    assert one.coords.shape == (1, 1, 3)
    assert tuple(one.coords[0, 0]) == (0.0, 0.0, 0.0)

    ms = [Minutia(i * 20, i * 10, (i * 30) % 360.0) for i in range(7)]
    table = build_geometric_table(ms)
    assert table.coords.shape == (7, 7, 3)
    for i in range(7):
        assert tuple(table.coords[i, i]) == (0.0, 0.0, 0.0)  # exact zero diagonal


def test_table_rows_agree_with_rigid_transform():
    rng = random.Random(22)
    ms = [Minutia(rng.randrange(400), rng.randrange(560), rng.uniform(0, 360)) for _ in range(9)]
    table = build_geometric_table(ms)
    for i in range(9):
        for j, entry in enumerate(table.row(i)):
            ref = rigid_transform(ms[i], ms[j], origin_index=i)
            assert abs(entry.x - ref.x) < 1e-9
            assert abs(entry.y - ref.y) < 1e-9
            assert circular_diff(entry.theta, ref.theta) < 1e-9


def test_table_invariant_under_global_rigid_motion():
    rng = random.Random(23)
    ms = [Minutia(rng.uniform(50, 350), rng.uniform(50, 500), rng.uniform(0, 360))
          for _ in range(12)]
    moved = [rotate_about(m, 200.0, 280.0, 37.5, dx=14.2, dy=-9.1) for m in ms]
    a = build_geometric_table(ms).coords
    b = build_geometric_table(moved).coords
    assert np.max(np.abs(a[..., 0] - b[..., 0])) < 1e-6
    assert np.max(np.abs(a[..., 1] - b[..., 1])) < 1e-6
    dt = np.abs(a[..., 2] - b[..., 2]) % 360.0
    assert np.max(np.minimum(dt, 360.0 - dt)) < 1e-6


@pytest.mark.parametrize("a,b,expect", [(10, 350, 20), (77, 77, 0), (0, 180, 180)])
def test_circular_diff(a, b, expect):
    assert circular_diff(a, b) == expect


def test_match_params_validation():
    with pytest.raises(ValueError):
        MatchParams(-1, 12, 12, 15)
    with pytest.raises(ValueError):
        MatchParams(12, 12, 180, 15)  # theta threshold must stay under 180
    MatchParams(12, 12, 12, 360)  # basis gate may be disabled entirely


def test_collect_candidates_self_match_is_complete():
    rng = random.Random(24)
    ms = [Minutia(rng.randrange(400), rng.randrange(560), rng.uniform(0, 360))
          for _ in range(15)]
    table = build_geometric_table(ms)
    points = [VaultPoint(i, 0) for i in range(15)]
    params = MatchParams(12, 12, 12, 15)
    got = collect_candidates(table, points, table, 0, 0, params)
    assert got == set(points)


def test_collect_candidates_only_trivial_for_incompatible_geometry():
    # the basis pair always matches itself at zero offset, so the floor
    # for any candidate set is the basis point; nothing else may appear
    # when the two constellations share no displacement structure
    vault_ms = [Minutia(100, 100, 0.0), Minutia(160, 130, 90.0),
                Minutia(220, 90, 180.0), Minutia(280, 160, 270.0),
                Minutia(340, 110, 45.0)]
    probe_ms = [Minutia(100, 100, 0.0), Minutia(107, 101, 10.0),
                Minutia(113, 99, 20.0), Minutia(119, 102, 30.0),
                Minutia(126, 98, 40.0)]
    vt = build_geometric_table(vault_ms)
    pt = build_geometric_table(probe_ms)
    points = [VaultPoint(i, 0) for i in range(len(vault_ms))]
    got = collect_candidates(vt, points, pt, 0, 0, MatchParams(5, 5, 5, 360))
    assert got == {points[0]}


def brute_force_candidates(vault_ms, probe_ms, vb, pb, params):
    out = set()
    for j, vm in enumerate(vault_ms):
        v = rigid_transform(vault_ms[vb], vm)
        for pm in probe_ms:
            p = rigid_transform(probe_ms[pb], pm)
            if (abs(v.x - p.x) <= params.x_thres
                    and abs(v.y - p.y) <= params.y_thres
                    and circular_diff(v.theta, p.theta) <= params.theta_thres):
                out.add(j)
                break
    return out


def test_candidates_match_brute_force_after_rigid_motion():
    rng = random.Random(25)
    vault_ms = [Minutia(rng.uniform(60, 340), rng.uniform(60, 500), rng.uniform(0, 360))
                for _ in range(20)]
    probe_ms = [rotate_about(m, 200.0, 280.0, 10.0, dx=5.0, dy=3.0) for m in vault_ms]
    vt = build_geometric_table(vault_ms)
    ptab = build_geometric_table(probe_ms)
    points = [VaultPoint(i, 0) for i in range(20)]
    params = MatchParams(12, 12, 12, 15)
    for basis in range(5):
        got = collect_candidates(vt, points, ptab, basis, basis, params)
        expect = brute_force_candidates(vault_ms, probe_ms, basis, basis, params)
        assert {points[j] for j in expect} == got
        # aligned copies of the same set must keep at least n+1 candidates
        assert len(got) == 20


def test_match_margins_many_agrees_with_single():
    rng = random.Random(26)
    vault_ms = [Minutia(rng.randrange(400), rng.randrange(560), rng.uniform(0, 360))
                for _ in range(10)]
    probe_ms = [Minutia(rng.randrange(400), rng.randrange(560), rng.uniform(0, 360))
                for _ in range(8)]
    vt = build_geometric_table(vault_ms)
    ptab = build_geometric_table(probe_ms)
    params = MatchParams(12, 12, 12, 360)
    many = match_margins_many(vt, ptab, 2, [0, 3, 7], params)
    for row, vb in enumerate([0, 3, 7]):
        single = match_margins(vt, ptab, 2, vb, params)
        assert np.array_equal(many[row], single)
