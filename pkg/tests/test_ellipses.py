import math

import pytest
from hypothesis import given, strategies as st

from ledsort import (
    ChromaticityXY,
    MacAdamEllipse,
    in_ellipse,
    macadam_1942_ellipses,
    macadam_steps,
    nearest_ellipse,
)
from ledsort.ellipses import load_ellipses


@pytest.fixture
def tilted() -> MacAdamEllipse:
    return MacAdamEllipse(ChromaticityXY(0.30, 0.30), 0.004, 0.0015, math.radians(65.0))


def test_center_is_inside_for_any_k(tilted):
    for k in (1e-6, 0.5, 1.0, 10.0):
        assert in_ellipse(tilted.center, tilted, k)


def test_semi_major_endpoint_sits_on_the_boundary(tilted):
    x, y = tilted.boundary_point(0.0)  # one semi-major step from the centre
    p = ChromaticityXY(x, y)
    assert in_ellipse(p, tilted, 1.0)
    assert macadam_steps(tilted.center, p, [tilted]) == pytest.approx(1.0, abs=1e-12)


def test_double_distance_needs_double_k(tilted):
    c = tilted.center
    dx = 2 * tilted.semi_major * math.cos(tilted.theta)
    dy = 2 * tilted.semi_major * math.sin(tilted.theta)
    p = ChromaticityXY(c.x + dx, c.y + dy)
    assert not in_ellipse(p, tilted, 1.0)
    assert in_ellipse(p, tilted, 2.0)


def test_invalid_parameters_rejected():
    with pytest.raises(ValueError):
        MacAdamEllipse(ChromaticityXY(0.3, 0.3), 0.001, 0.002, 0.0)  # a < b
    with pytest.raises(ValueError):
        MacAdamEllipse(ChromaticityXY(0.3, 0.3), 0.002, 0.001, math.pi)  # theta out of range
    with pytest.raises(ValueError):
        in_ellipse(ChromaticityXY(0.3, 0.3), MacAdamEllipse(ChromaticityXY(0.3, 0.3), 1e-3, 1e-3, 0.0), 0.0)


@given(
    st.floats(min_value=0.01, max_value=2.0),
    st.floats(min_value=1.0, max_value=4.0),
    st.floats(min_value=-0.02, max_value=0.02),
    st.floats(min_value=-0.02, max_value=0.02),
)
def test_membership_is_monotone_in_k(k1, factor, dx, dy, ):
    e = MacAdamEllipse(ChromaticityXY(0.3, 0.3), 0.005, 0.002, math.radians(30.0))
    p = ChromaticityXY(0.3 + dx, 0.3 + dy)
    k2 = k1 * factor
    if in_ellipse(p, e, k1):
        assert in_ellipse(p, e, k2)


def test_steps_of_identical_points_is_zero():
    ellipses = macadam_1942_ellipses()
    p = ChromaticityXY(0.31, 0.32)
    assert macadam_steps(p, p, ellipses) == 0.0


def test_steps_to_translated_semi_minor_endpoint_is_one():
    ellipses = macadam_1942_ellipses()
    p = ChromaticityXY(0.31, 0.32)
    e = nearest_ellipse(p, ellipses).translated(p)
    x, y = e.boundary_point(math.pi / 2.0)  # semi-minor endpoint
    assert macadam_steps(p, ChromaticityXY(x, y), ellipses) == pytest.approx(1.0, abs=1e-12)


def test_steps_symmetry_follows_nearest_ellipse_choice():
    # Symmetric whenever both endpoints pick the same ellipse; the exceptions
    # must coincide with a nearest-ellipse change.
    ellipses = macadam_1942_ellipses()
    probes = [
        (ChromaticityXY(0.30, 0.30), ChromaticityXY(0.301, 0.302)),
        (ChromaticityXY(0.16, 0.20), ChromaticityXY(0.162, 0.199)),
        (ChromaticityXY(0.20, 0.40), ChromaticityXY(0.40, 0.45)),
        (ChromaticityXY(0.50, 0.30), ChromaticityXY(0.15, 0.10)),
        (ChromaticityXY(0.31, 0.33), ChromaticityXY(0.33, 0.31)),
    ]
    for p, q in probes:
        forward = macadam_steps(p, q, ellipses)
        backward = macadam_steps(q, p, ellipses)
        same_ellipse = nearest_ellipse(p, ellipses) == nearest_ellipse(q, ellipses)
        if same_ellipse:
            assert forward == pytest.approx(backward, rel=1e-12)
        if forward != pytest.approx(backward, rel=1e-12):
            assert not same_ellipse


def test_embedded_dataset_shape_and_ordering():
    ellipses = macadam_1942_ellipses()
    assert len(ellipses) == 25
    for e in ellipses:
        assert e.semi_major >= e.semi_minor > 0
        assert 0 <= e.theta < math.pi
    green = [e.area for e in ellipses if e.center.y > 0.5]
    blue = [e.area for e in ellipses if e.center.x < 0.2 and e.center.y < 0.2]
    assert green and blue
    ratio = (sum(green) / len(green)) / (sum(blue) / len(blue))
    assert ratio >= 3.0


def test_ellipses_loadable_from_path(tmp_path):
    path = tmp_path / "one.txt"
    path.write_text("# cx cy a b theta_deg\n0.3 0.3 0.004 0.002 45.0\n")
    (e,) = load_ellipses(path)
    assert e.center == ChromaticityXY(0.3, 0.3)
    assert e.theta == pytest.approx(math.radians(45.0))
