import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from optbell.encoding import Scene, SceneGeometry, encode_two_qubit
from optbell.measurement import (
    DegenerateIntensityError,
    JointProbabilities,
    expectation_zz,
    joint_probabilities,
    marginals_and_conditionals,
    measure_zz,
    region_intensities,
)
from optbell.quantum import BELL_STATE, basis_state

GEO = SceneGeometry.with_resolution(256)
nonneg = st.floats(0.0, 10.0, allow_nan=False)


class TestRegionIntensities:
    def test_bell(self):
        i = region_intensities(encode_two_qubit(BELL_STATE, GEO))
        np.testing.assert_allclose(i / i.sum(), [0.5, 0, 0, 0.5], atol=1e-15)

    def test_basis_01(self):
        i = region_intensities(encode_two_qubit(basis_state("01"), GEO))
        assert i[1] > 0 and np.all(i[[0, 2, 3]] == 0)

    def test_outside_light_ignored(self):
        f = encode_two_qubit(basis_state("11"), GEO).field.copy()
        f[0, 0] = 100.0
        i = region_intensities(Scene(f, GEO))
        assert i[:3].sum() == 0

    def test_dark_scene_raises(self):
        with pytest.raises(DegenerateIntensityError):
            region_intensities(Scene(np.zeros((256, 256)), GEO))

    @given(st.floats(0.01, 100.0))
    def test_scale_invariance(self, k):
        psi = np.array([0.3, 0.1j, -0.5, 0.2])
        a = joint_probabilities(region_intensities(encode_two_qubit(psi, GEO))).flat()
        b = joint_probabilities(region_intensities(encode_two_qubit(k * psi, GEO))).flat()
        np.testing.assert_allclose(a, b, atol=1e-14)


class TestJointProbabilities:
    @pytest.mark.parametrize("i, p", [((1, 1, 1, 1), [0.25] * 4), ((0.5, 0, 0, 0.5), [0.5, 0, 0, 0.5]),
                                      ((3, 1, 0, 0), [0.75, 0.25, 0, 0])])
    def test_normalization(self, i, p):
        np.testing.assert_allclose(joint_probabilities(i).flat(), p)

    def test_signed_indexing(self):
        jp = joint_probabilities([1, 2, 3, 4])
        assert jp[+1, +1] == pytest.approx(0.1) and jp[+1, -1] == pytest.approx(0.2)
        assert jp[-1, +1] == pytest.approx(0.3) and jp[-1, -1] == pytest.approx(0.4)
        with pytest.raises(KeyError):
            jp[0, 1]

    def test_rejects(self):
        with pytest.raises(ValueError):
            joint_probabilities([1, -1, 0, 0])
        with pytest.raises(DegenerateIntensityError):
            joint_probabilities([0, 0, 0, 0])
        with pytest.raises(ValueError):
            JointProbabilities([[0.5, 0.5], [0.5, 0.5]])

    def test_table_read_only(self):
        jp = joint_probabilities([1, 1, 1, 1])
        with pytest.raises(ValueError):
            jp.p[0, 0] = 1


class TestMarginals:
    def test_bell(self):
        m = marginals_and_conditionals(joint_probabilities([0.5, 0, 0, 0.5]))
        assert m.p_a[+1] == pytest.approx(0.5)
        assert m.b_given_a(+1, +1) == pytest.approx(1.0)

    def test_uniform(self):
        m = marginals_and_conditionals(joint_probabilities([1, 1, 1, 1]))
        assert all(v == pytest.approx(0.5) for v in (*m.p_a.values(), *m.p_b.values()))
        assert all(v == pytest.approx(0.5) for v in m.conditional.values())

    def test_undefined_branch(self):
        m = marginals_and_conditionals(joint_probabilities([1, 0, 0, 0]))
        assert m.b_given_a(+1, -1) is None and m.b_given_a(-1, -1) is None

    @settings(max_examples=80)
    @given(st.lists(nonneg, min_size=4, max_size=4).filter(lambda v: sum(v) > 1e-6))
    def test_factorization(self, i):
        jp = joint_probabilities(i)
        m = marginals_and_conditionals(jp)
        assert jp.flat().sum() == pytest.approx(1.0, abs=1e-12)
        for a in (1, -1):
            for b in (1, -1):
                c = m.b_given_a(b, a)
                if c is not None:
                    assert c * m.p_a[a] == pytest.approx(jp[a, b], abs=1e-12)


class TestExpectation:
    @pytest.mark.parametrize("p, e", [([0.5, 0, 0, 0.5], 1.0), ([0.25] * 4, 0.0), ([0, 0.5, 0.5, 0], -1.0)])
    def test_examples(self, p, e):
        assert expectation_zz(JointProbabilities(p)) == pytest.approx(e)

    @pytest.mark.parametrize("label, sign", [("00", 1), ("01", -1), ("10", -1), ("11", 1)])
    def test_sign_convention(self, label, sign):
        assert measure_zz(encode_two_qubit(basis_state(label), GEO)) == sign

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
                    min_size=4, max_size=4).filter(lambda v: sum(abs(c) ** 2 for c in v) > 1e-4))
    def test_matches_direct(self, psi):
        w = np.abs(np.array(psi)) ** 2
        expected = (w[0] - w[1] - w[2] + w[3]) / w.sum()
        assert measure_zz(encode_two_qubit(psi, GEO)) == pytest.approx(expected, abs=1e-12)
