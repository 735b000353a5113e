from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from amalgam.core_model import (
    CurveSpec,
    EulerVector,
    SpecError,
    SurfaceAmalgamSpec,
    ThetaGraphSpec,
    load_spec,
    quarter_numerator,
    spec_from_json,
    validate_spec,
)

NS = CurveSpec.nonseparating()


def test_normalization_swaps_sides():
    spec = validate_spec(SurfaceAmalgamSpec(2, 3, 3, 2, NS, CurveSpec.separating(1, 2)))
    assert (spec.g, spec.h, spec.m, spec.n) == (3, 2, 2, 3)
    assert spec.curve_a == CurveSpec.separating(1, 2)
    assert spec.curve_b == NS


def test_separating_split_checks():
    assert validate_spec(SurfaceAmalgamSpec(2, 2, 1, 1, CurveSpec.separating(1, 1), NS))
    with pytest.raises(SpecError) as exc:
        validate_spec(SurfaceAmalgamSpec(2, 2, 1, 1, CurveSpec.separating(0, 2), NS))
    assert exc.value.codes == ["BadSplit"]


def test_all_violations_collected():
    with pytest.raises(SpecError) as exc:
        validate_spec(SurfaceAmalgamSpec(1, 1, 0, 1, CurveSpec.separating(1, 1), NS))
    assert sorted(exc.value.codes) == ["BadSplit", "GenusTooSmall", "GenusTooSmall", "MalformedSpec"]


def test_theta_validation():
    assert validate_spec(ThetaGraphSpec((3, 1, 2))).arms == (1, 2, 3)
    with pytest.raises(SpecError) as exc:
        validate_spec(ThetaGraphSpec((1, 0)))
    assert sorted(exc.value.codes) == ["ArmCount", "NonPositiveArm"]


def test_theta_degrees():
    t = ThetaGraphSpec((1, 1, 2, 2, 2, 3))
    assert (t.k, t.linear_degree, t.hyperbolic_degree) == (6, 2, 4)
    assert not t.is_hyperbolic
    assert ThetaGraphSpec((1, 2, 2)).is_hyperbolic


def test_json_round_trip():
    obj = {"family": "C", "g": 2, "h": 3, "m": 2, "n": 3, "curve_a": {"kind": "nonseparating"},
           "curve_b": {"kind": "separating", "split": [1, 2]}}
    spec = load_spec(obj)
    assert load_spec(spec.to_json()) == spec
    theta = load_spec('{"family": "W", "arms": [2, 1, 1]}')
    assert theta == ThetaGraphSpec((1, 1, 2))


@pytest.mark.parametrize("bad", ["{", "[]", '{"family": "X"}', '{"family": "C", "g": 2}',
                                 '{"family": "W", "arms": [1, "a", 2]}', '{"family": "C", "g": 2.5, "h": 2, "m": 1, "n": 1}'])
def test_malformed(bad):
    with pytest.raises(SpecError) as exc:
        spec_from_json(bad)
    assert exc.value.codes == ["MalformedSpec"]


def test_coprime_and_N():
    spec = SurfaceAmalgamSpec(2, 2, 2, 3, NS, NS)
    assert spec.coprime and spec.N == 2
    assert not SurfaceAmalgamSpec(2, 2, 2, 4, NS, NS).coprime


def test_euler_vector_basics():
    v = EulerVector.from_fractions(["-1/2", 0, Fraction(-1, 4)])
    assert v.quarters == (0, -1, -2)
    assert v.entries == (0, Fraction(-1, 4), Fraction(-1, 2))
    assert v.zero_count == 1
    assert v.to_json() == ["0/4", "-1/4", "-2/4"]
    assert EulerVector.from_json(v.to_json()) == v
    with pytest.raises(ValueError):
        EulerVector((1,))
    with pytest.raises(ValueError):
        quarter_numerator("1/3")


@settings(max_examples=100, derandomize=True)
@given(st.lists(st.integers(-40, 0), min_size=1, max_size=8), st.integers(1, 6))
def test_scaling_is_entrywise(qs, K):
    v = EulerVector(tuple(qs))
    assert v.scaled(K).entries == tuple(K * e for e in v.entries)
    assert v.scaled(K).total() == K * v.total()


@settings(max_examples=100, derandomize=True)
@given(st.integers(2, 6), st.integers(2, 6), st.integers(1, 8), st.integers(1, 8))
def test_validate_is_idempotent(g, h, m, n):
    spec = validate_spec(SurfaceAmalgamSpec(g, h, m, n, NS, NS))
    assert validate_spec(spec) == spec
    assert spec.m <= spec.n
