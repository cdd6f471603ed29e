import numpy as np
import pytest

from solitonlab import (
    IntegratorConfig,
    SolutionClassTag,
    boost,
    classify,
    compute_bowl,
    compute_separatrix,
    critical_concavity,
    integrate_bidirectional,
    limits_report,
    rotational,
)

ROT3 = rotational(3)

# frozen reference values for n = 3 at default tolerances
BOWL_W_AT_1 = 0.32593194192409025
ABOVE_CRIT_S = 1.697482764071333      # critical point of the (1, 0.9) orbit
GP_CROSSING_S = 2.4391949731195406    # line crossing of the (2, 1.2) orbit
GP_BLOWUP_S = 2.8708136089142045      # pole of the (2, 1.5) orbit
GM_BLOWUP_S = 1.0632503268240918      # pole of the (1, -2) orbit
SEP_VALUE = 1.390627106179388         # threshold slope at anchor s = 2
SEP_DEFECT_50 = 0.03992811602366686


@pytest.fixture(scope="module")
def bowl():
    return compute_bowl(ROT3)


@pytest.fixture(scope="module")
def separatrix():
    return compute_separatrix(ROT3)


def test_bowl_trajectory(bowl):
    assert bowl.w_at(1.0) == pytest.approx(BOWL_W_AT_1, rel=1e-10)
    assert bowl.s[0] <= 1e-9
    assert bowl.s[-1] == pytest.approx(100.0)
    assert abs(bowl.w_at(50.0) - 1.0) < 1e-6


def test_compute_bowl_cached():
    assert compute_bowl(ROT3) is compute_bowl(ROT3)


@pytest.mark.parametrize("s0, w0, tag", [
    (2.0, 1.0, SolutionClassTag.CONSTANT_PLUS),
    (2.0, -1.0, SolutionClassTag.CONSTANT_MINUS),
    (1.0, BOWL_W_AT_1, SolutionClassTag.BOWL),
    (1.0, -0.5, SolutionClassTag.BELOW_BOWL),
    (1.0, 0.9, SolutionClassTag.ABOVE_BOWL),
    (1.0, -2.0, SolutionClassTag.GAMMA_MINUS_BLOWUP),
    (2.0, SEP_VALUE, SolutionClassTag.SEPARATRIX),
    (2.0, 1.2, SolutionClassTag.GAMMA_PLUS_GLOBAL),
    (2.0, 1.5, SolutionClassTag.GAMMA_PLUS_BLOWUP),
])
def test_all_nine_classes(s0, w0, tag):
    assert classify(ROT3, s0, w0).tag is tag


def test_above_bowl_evidence():
    sc = classify(ROT3, 1.0, 0.9)
    assert len(sc.critical_points) == 1
    assert sc.critical_points[0] == pytest.approx(ABOVE_CRIT_S, abs=1e-8)
    assert critical_concavity(ROT3, sc.critical_points[0]) > 0.0
    assert sc.limit_at_zero == pytest.approx(1.0, abs=1e-9)
    assert sc.limit_at_infinity == pytest.approx(1.0, abs=1e-9)
    assert sc.causal == -1


def test_below_bowl_evidence():
    sc = classify(ROT3, 1.0, -0.5)
    assert sc.critical_points == ()
    assert sc.limit_at_zero == pytest.approx(-1.0, abs=1e-9)
    assert sc.limit_at_infinity == pytest.approx(1.0, abs=1e-9)
    assert sc.causal == -1
    assert sc.blowup is None


def test_gamma_minus_evidence():
    sc = classify(ROT3, 1.0, -2.0)
    assert sc.blowup is not None
    s_star, sign = sc.blowup
    assert sign == -1
    assert s_star == pytest.approx(GM_BLOWUP_S, abs=1e-9)
    assert sc.limit_at_infinity == -np.inf
    assert sc.causal == +1


def test_gamma_plus_global_evidence():
    sc = classify(ROT3, 2.0, 1.2)
    assert sc.blowup is None
    assert len(sc.critical_points) == 1
    assert sc.critical_points[0] == pytest.approx(GP_CROSSING_S, abs=1e-8)
    assert sc.causal == +1


def test_gamma_plus_blowup_evidence():
    sc = classify(ROT3, 2.0, 1.5)
    assert sc.blowup is not None
    assert sc.blowup[1] == +1
    assert sc.blowup[0] == pytest.approx(GP_BLOWUP_S, abs=1e-6)
    assert sc.limit_at_infinity == np.inf


def test_constant_classes_are_lightlike():
    assert classify(ROT3, 2.0, 1.0).causal == 0
    assert classify(ROT3, 2.0, -1.0).causal == 0


def test_strip_trichotomy_near_bowl(bowl):
    wb = bowl.w_at(1.0)
    assert classify(ROT3, 1.0, wb - 1e-6).tag is SolutionClassTag.BELOW_BOWL
    assert classify(ROT3, 1.0, wb + 1e-6).tag is SolutionClassTag.ABOVE_BOWL
    assert classify(ROT3, 1.0, wb).tag is SolutionClassTag.BOWL


def test_separatrix_bracket(separatrix):
    lo, hi = separatrix.bracket
    assert hi - lo <= 1e-10
    assert lo <= separatrix.value <= hi
    assert separatrix.anchor == 2.0
    assert separatrix.value == pytest.approx(SEP_VALUE, rel=1e-9)


def test_separatrix_cached():
    assert compute_separatrix(ROT3) is compute_separatrix(ROT3)


def test_separatrix_asymptote_defect(separatrix):
    d50 = separatrix.asymptote_defect(50.0)
    assert d50 == pytest.approx(SEP_DEFECT_50, rel=1e-6)
    assert d50 < 0.05
    # the defect |c*w(s) - s| shrinks toward the critical line
    assert separatrix.asymptote_defect(20.0) > d50


def test_gamma_plus_dichotomy_monotone(separatrix):
    """Classification across the threshold is monotone in w0: global below,
    blow-up above, with no interleaving."""
    a = separatrix.value
    offsets = np.array([-1e-2, -1e-4, -1e-6, 1e-6, 1e-4, 1e-2])
    tags = [classify(ROT3, 2.0, float(a + d)).tag for d in offsets]
    for d, tag in zip(offsets, tags):
        want = (SolutionClassTag.GAMMA_PLUS_GLOBAL if d < 0
                else SolutionClassTag.GAMMA_PLUS_BLOWUP)
        assert tag is want, (d, tag)


def test_limits_report_fields():
    traj = integrate_bidirectional(ROT3, 1.0, -0.5)
    rep = limits_report(traj)
    assert rep.s_left == pytest.approx(1e-10, rel=1e-6)
    assert rep.s_right == pytest.approx(100.0)
    assert rep.at_zero == pytest.approx(-1.0, abs=1e-9)
    assert rep.at_infinity == pytest.approx(1.0, abs=1e-9)
    assert rep.blowup is None


def test_classify_requires_canonical_strip():
    tl = boost(2, region="timelike")
    with pytest.raises(ValueError, match="canonical_strip"):
        classify(tl, 1.0, 0.5)
    canon, flip = tl.canonical_strip()
    sc = classify(canon, 1.0, flip * 0.5)
    assert sc.tag in (SolutionClassTag.BELOW_BOWL, SolutionClassTag.ABOVE_BOWL)


def test_classify_rejects_nonpositive_s0():
    with pytest.raises(ValueError):
        classify(ROT3, 0.0, 0.5)
    with pytest.raises(ValueError):
        classify(ROT3, -1.0, 0.5)


def test_classification_flag_independence():
    # classify must not mutate shared caches in a way that changes results
    first = classify(ROT3, 1.3, 0.4).tag
    for _ in range(3):
        assert classify(ROT3, 1.3, 0.4).tag is first
