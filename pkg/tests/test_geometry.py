import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from sheetdiagram.drawingml import XfrmSpec
from sheetdiagram.geometry import (
    BBox,
    CardinalDirection,
    DegenerateGroupError,
    PtPoint,
    connector_path,
    endpoint_direction,
    flatten_group,
    local_connector_points,
    polyline_distance,
    quantize_direction,
    ray_hit_distance,
    render_local,
    rendered_bbox,
)
from sheetdiagram.metrics import FrameEmu

TOL_EMU = 1e-6 * 12700  # 1e-6 pt
PRESETS = ["straightConnector1", "bentConnector2", "bentConnector3", "bentConnector4", "bentConnector5"]


def close(a, b, tol=TOL_EMU):
    return len(a) == len(b) and all(abs(p[0] - q[0]) <= tol and abs(p[1] - q[1]) <= tol for p, q in zip(a, b))


# --- direction snapping ---------------------------------------------------


def direction_vectors(n=360):
    for deg in range(n):
        t = math.radians(deg)
        yield deg, int(round(math.cos(t) * 1e6)), int(round(math.sin(t) * 1e6))


def test_direction_matches_brute_force_at_every_degree():
    for deg, dx, dy in direction_vectors():
        assert quantize_direction(dx, dy).value == oracles.nearest_cardinal(dx, dy), deg


def test_endpoint_direction_points_outward():
    # travel east: the start faces west (back toward its shape), the end faces east
    pts = [(0, 0), (10, 0)]
    assert endpoint_direction(pts, "start") is CardinalDirection.W
    assert endpoint_direction(pts, "end") is CardinalDirection.E
    bent = [(0, 0), (0, 50), (80, 50)]
    assert endpoint_direction(bent, "start") is CardinalDirection.N
    assert endpoint_direction(bent, "end") is CardinalDirection.E


def test_exact_diagonals_resolve_horizontally():
    assert quantize_direction(1, 1) is CardinalDirection.E
    assert quantize_direction(-1, -1) is CardinalDirection.W
    assert quantize_direction(0, 0) is CardinalDirection.E


def test_zero_length_segments_are_skipped_and_degenerate_paths_reported():
    assert endpoint_direction([(0, 0), (0, 10), (0, 10)], "end") is CardinalDirection.S
    diags = []
    assert endpoint_direction([(5, 5), (5, 5)], "start", diags) is CardinalDirection.E
    assert [d.code for d in diags] == ["DegeneratePath"]
    with pytest.raises(ValueError):
        endpoint_direction([(0, 0), (1, 1)], "middle")


# --- transforms of connector paths ----------------------------------------


def random_connector(rng: random.Random):
    frame = FrameEmu(rng.uniform(0, 1e7), rng.uniform(0, 1e7), rng.uniform(0, 3e6), rng.uniform(0, 3e6))
    preset = rng.choice(PRESETS)
    adj = tuple((f"adj{i}", rng.randint(-50000, 150000)) for i in (1, 2, 3))
    rot = rng.choice([0, 5400000, 10800000, 16200000, rng.randrange(21600000)])
    return frame, preset, adj, rot, rng.random() < 0.5, rng.random() < 0.5


def local_points(frame, preset, adj):
    return local_connector_points(preset, frame.cx, frame.cy, adj)


def test_flip_involution_and_rotation_inverse():
    rng = random.Random(4)
    for _ in range(500):
        frame, preset, adj, rot, fh, fv = random_connector(rng)
        local = local_points(frame, preset, adj)
        deg = rot / 60000
        base = render_local(local, frame, rot, False, False)
        flipped = render_local(local, frame, rot, fh, fv)
        # the oracle mirrors rendered points about the rotated frame axes
        mirror = oracles.shape_matrix(frame.x, frame.y, frame.cx, frame.cy, deg, fh, fv)
        unrot = oracles.shape_matrix(frame.x, frame.y, frame.cx, frame.cy, deg, False, False)
        inverse_unrot = _invert(unrot)
        mirror_rendered = oracles.mat_mul(mirror, inverse_unrot)
        assert close(oracles.apply(mirror_rendered, base), flipped)
        assert close(oracles.apply(mirror_rendered, flipped), base)
        # rotate back by -rot about the frame center
        cx, cy = frame.x + frame.cx / 2, frame.y + frame.cy / 2
        back = oracles.mat_mul(oracles.translate(cx, cy), oracles.mat_mul(oracles.rotate_cw(-deg), oracles.translate(-cx, -cy)))
        assert close(oracles.apply(back, base), render_local(local, frame, 0))


@given(st.integers(0, 21599999), st.integers(0, 21599999))
def test_rotations_compose(a, b):
    frame = FrameEmu(1000, 2000, 300000, 120000)
    local = local_connector_points("bentConnector3", frame.cx, frame.cy)
    once = render_local(local, frame, (a + b) % 21600000)
    cx, cy = frame.center
    twice = [(x + frame.x, y + frame.y) for x, y in render_local(
        [(p.x - frame.x, p.y - frame.y) for p in render_local(local, frame, a)], FrameEmu(0, 0, frame.cx, frame.cy), b)]
    assert close(once, twice, 1e-3)


def _invert(m):
    (a, b, tx), (c, d, ty), _ = m
    det = a * d - b * c
    ia, ib, ic, id_ = d / det, -b / det, -c / det, a / det
    return [[ia, ib, -(ia * tx + ib * ty)], [ic, id_, -(ic * tx + id_ * ty)], [0, 0, 1]]


# --- group flattening -----------------------------------------------------


def random_nested_case(rng: random.Random):
    quarter_regime = rng.random() < 0.5
    child_rot = rng.randrange(4) * 5400000 if quarter_regime else rng.randrange(21600000)
    child = (FrameEmu(rng.uniform(-5e5, 5e5), rng.uniform(-5e5, 5e5), rng.uniform(1, 4e5), rng.uniform(1, 4e5)),
             child_rot, rng.random() < 0.5, rng.random() < 0.5)
    groups = []
    for _ in range(rng.randint(1, 3)):
        ch_ext = (rng.uniform(1e4, 2e6), rng.uniform(1e4, 2e6))
        if quarter_regime:
            ext = (rng.uniform(1e4, 2e6), rng.uniform(1e4, 2e6))
            rot = rng.randrange(4) * 5400000
        else:
            s = rng.uniform(0.1, 4)
            ext = (ch_ext[0] * s, ch_ext[1] * s)
            rot = rng.randrange(21600000)
        groups.append(XfrmSpec(
            off=(rng.uniform(0, 5e6), rng.uniform(0, 5e6)), ext=ext, rot=rot,
            flip_h=rng.random() < 0.5, flip_v=rng.random() < 0.5,
            ch_off=(rng.uniform(-5e5, 5e5), rng.uniform(-5e5, 5e5)), ch_ext=ch_ext,
        ))
    return child, groups  # groups listed innermost first


def corners(frame: FrameEmu):
    return [(0, 0), (frame.cx, 0), (frame.cx, frame.cy), (0, frame.cy)]


def test_group_flattening_matches_corner_affine_oracle():
    rng = random.Random(11)
    for _ in range(200):
        (frame, rot, fh, fv), groups = random_nested_case(rng)
        m = oracles.shape_matrix(frame.x, frame.y, frame.cx, frame.cy, rot / 60000, fh, fv)
        for g in groups:
            m = oracles.mat_mul(oracles.group_matrix(g.off, g.ext, g.ch_off, g.ch_ext, g.rot / 60000, g.flip_h, g.flip_v), m)
        expected = oracles.apply(m, corners(frame))

        f, r, h, v = frame, rot, fh, fv
        for g in groups:
            f, r, h, v = flatten_group(g, f, r, h, v)
        got = render_local(corners(f), f, r, h, v)
        assert close(got, expected), (frame, rot, fh, fv, groups)


def test_identity_group_is_a_no_op():
    g = XfrmSpec(off=(100, 200), ext=(50, 60), ch_off=(100, 200), ch_ext=(50, 60))
    child = FrameEmu(110, 210, 10, 20)
    assert flatten_group(g, child, 0, False, False) == (child, 0, False, False)


def test_zero_child_extent():
    with pytest.raises(DegenerateGroupError):
        flatten_group(XfrmSpec(off=(0, 0), ext=(10, 10), ch_off=(0, 0), ch_ext=(0, 10)), FrameEmu(0, 0, 1, 1))
    frame, *_ = flatten_group(XfrmSpec(off=(0, 0), ext=(0, 10), ch_off=(0, 0), ch_ext=(0, 10)), FrameEmu(0, 0, 0, 5))
    assert frame.cx == 0


# --- connector polylines --------------------------------------------------


def test_bent_presets_and_adjustments():
    assert local_connector_points("bentConnector2", 10, 20) == [(0, 0), (10, 0), (10, 20)]
    assert local_connector_points("bentConnector3", 100, 20, [("adj1", 25000)]) == [(0, 0), (25, 0), (25, 20), (100, 20)]
    assert local_connector_points("bentConnector3", 100, 20, [("adj1", 150000)])[1] == (150, 0)
    assert local_connector_points("bentConnector4", 100, 40) == [(0, 0), (50, 0), (50, 20), (100, 20), (100, 40)]
    assert len(local_connector_points("bentConnector5", 100, 40)) == 6
    assert local_connector_points("curvedConnector3", 1, 1) is None


def test_connector_path_in_points():
    frame = FrameEmu(0, 0, 100 * 12700, 50 * 12700)
    path = connector_path(frame, "bentConnector3", flip_v=True)
    assert path.points == ((0, 50), (50, 50), (50, 0), (100, 0))
    assert (path.start_dir, path.end_dir) == (CardinalDirection.W, CardinalDirection.E)
    turned = connector_path(frame, "straightConnector1", rot=5400000)
    assert turned.start == pytest.approx((75, -25)) and turned.end == pytest.approx((25, 75))


def test_unsupported_preset_falls_back_to_straight():
    diags = []
    path = connector_path(FrameEmu(0, 0, 12700, 12700), "curvedConnector3", diagnostics=diags)
    assert path.points == ((0, 0), (1, 1))
    assert [d.code for d in diags] == ["UnsupportedPreset"]


def test_rendered_bbox():
    frame = FrameEmu(0, 0, 100 * 12700, 100 * 12700)
    assert rendered_bbox(frame) == BBox(0, 100, 0, 100)
    b = rendered_bbox(frame, 2700000)
    assert b.width == pytest.approx(100 * math.sqrt(2))
    assert b.center == pytest.approx((50, 50))
    assert rendered_bbox(frame, 0, True, True) == rendered_bbox(frame)
    tall = rendered_bbox(FrameEmu(0, 0, 40 * 12700, 20 * 12700), 5400000)
    assert (tall.width, tall.height) == (20, 40)


def test_distances():
    box = BBox(0, 10, 0, 10)
    assert box.distance_to(PtPoint(13, 14)) == 5
    assert ray_hit_distance(PtPoint(-3, 5), CardinalDirection.E, box) == 3
    assert ray_hit_distance(PtPoint(-3, 5), CardinalDirection.W, box) is None
    assert ray_hit_distance(PtPoint(5, 20), CardinalDirection.N, box) == 10
    assert ray_hit_distance(PtPoint(50, 20), CardinalDirection.N, box) is None
    assert polyline_distance((5, 5), [(0, 0), (10, 0), (10, 10)]) == 5
    assert polyline_distance((3, 4), [(0, 0)]) == 5
