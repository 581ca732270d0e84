import math

import pytest
from hypothesis import given, strategies as st

from casimir.errors import InputError
from casimir.roughness import MODEL_LABEL, RoughnessProfile, averaged_force


def quartic(a):
    return a**-4


def test_flat_is_exact():
    assert averaged_force(quartic, RoughnessProfile.flat(), 3e-7) == quartic(3e-7)


@given(st.floats(1e-8, 1e-5), st.floats(0.01, 0.9))
def test_jensen(a, frac):
    d = frac * a
    prof = RoughnessProfile(((d, 0.5), (-d, 0.5)))
    assert averaged_force(quartic, prof, a) >= quartic(a)


def test_three_point_hand_sum():
    a = 200e-9
    d = 0.1 * a
    prof = RoughnessProfile(((-d, 0.25), (0.0, 0.5), (d, 0.25)))
    expected = 0.25 * (0.9 * a) ** -4 + 0.5 * a**-4 + 0.25 * (1.1 * a) ** -4
    assert averaged_force(quartic, prof, a) == pytest.approx(expected, rel=1e-12)


def test_linear_in_force():
    prof = RoughnessProfile(((-5e-9, 0.3), (2e-9, 0.7)))
    a = 1e-7
    f, g = quartic, (lambda x: x**-3)
    combo = averaged_force(lambda x: 2 * f(x) + g(x), prof, a)
    assert combo == pytest.approx(2 * averaged_force(f, prof, a) + averaged_force(g, prof, a), rel=1e-14)


def test_small_amplitude_limit():
    a = 1e-7
    errs = []
    for d in (1e-9, 1e-10):
        prof = RoughnessProfile(((d, 0.5), (-d, 0.5)))
        errs.append(averaged_force(quartic, prof, a) - quartic(a))
    # second order: ten times smaller amplitude, hundred times smaller error
    assert errs[1] / errs[0] == pytest.approx(0.01, rel=1e-3)


@pytest.mark.parametrize("entries", [(), ((0.0, 0.5),), ((0.0, 1.2), (1e-9, -0.2)), ((0.0, 0.0), (1e-9, 1.0))])
def test_invalid_profiles(entries):
    with pytest.raises(InputError):
        RoughnessProfile(entries)


def test_depth_exceeds_separation():
    prof = RoughnessProfile(((-20e-9, 0.5), (20e-9, 0.5)))
    with pytest.raises(InputError):
        averaged_force(quartic, prof, 15e-9)


def test_csv(tmp_path):
    p = tmp_path / "rough.csv"
    p.write_text("height_m,weight\n# comment\n-1e-9,0.25\n0,0.5\n1e-9,0.25\n")
    prof = RoughnessProfile.from_csv(p)
    assert prof.entries == ((-1e-9, 0.25), (0.0, 0.5), (1e-9, 0.25))
    assert prof.max_depth == 1e-9
    p.write_text("0,0.5\noops,0.5\n")
    with pytest.raises(InputError):
        RoughnessProfile.from_csv(p)


def test_label_marks_stand_in():
    assert "stand-in" in MODEL_LABEL
