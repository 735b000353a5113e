import pytest
from hypothesis import given, settings, strategies as st

from amalgam.commensurability import (
    LinearDegreeTooSmall,
    associated_racg_vector,
    commensurable_CW,
    euler_vector,
    expansion_pattern,
    hyperbolic_degree_expand,
    realize_vector_as_theta,
    scale_class,
    vectors_commensurable,
)
from amalgam.core_model import CurveSpec, EulerVector, SpecError, SurfaceAmalgamSpec, ThetaGraphSpec

NS = CurveSpec.nonseparating()


def ev(*xs):
    return EulerVector.from_fractions(xs)


def test_euler_vector_examples():
    assert euler_vector(ThetaGraphSpec((1, 1, 2, 2, 2, 3))) == ev(0, 0, "-1/4", "-1/4", "-1/4", "-1/2")
    assert euler_vector(ThetaGraphSpec((1, 1, 1))) == ev(0, 0, 0)
    assert euler_vector(ThetaGraphSpec((1, 1, 5))).entries[-1] == -1


def test_vectors_commensurable_examples():
    assert vectors_commensurable(ev(0, 0, -2, -4), ev(0, 0, -3, -6)) == (3, 2)
    v = ev(0, "-1/4", "-3/4")
    assert vectors_commensurable(v, v) == (1, 1)
    assert vectors_commensurable(ev(0, -1), ev(0, 0)) is None
    assert vectors_commensurable(ev(0, -1), ev(-1)) is None


def test_associated_vector_examples():
    d = associated_racg_vector(SurfaceAmalgamSpec(2, 2, 2, 3, NS, NS))
    assert (d.N, d.v1, d.v2, d.v3, d.v4) == (2, -2, -2, -2, -2)
    assert d.w == ev(*([0] * 4 + [-4] * 6 + [-6] * 4))
    assert len(d.w) == 14
    d11 = associated_racg_vector(SurfaceAmalgamSpec(2, 2, 1, 1, NS, NS))
    assert d11.N == 0 and d11.w == ev(-2, -2, -2, -2)
    dsep = associated_racg_vector(SurfaceAmalgamSpec(2, 3, 1, 2, CurveSpec.separating(1, 1), CurveSpec.separating(1, 2)))
    assert (dsep.v1, dsep.v2, dsep.v3, dsep.v4) == (-2, -2, -6, -2)


def test_realize_vector():
    assert realize_vector_as_theta(ev(0, 0, "-1/2")) == ThetaGraphSpec((1, 1, 3))
    assert realize_vector_as_theta(ev("-1/4", "-1/4", "-1/4")) == ThetaGraphSpec((2, 2, 2))
    with pytest.raises(SpecError) as exc:
        realize_vector_as_theta(ev(0))
    assert exc.value.codes == ["ArmCount"]


def test_scale_and_expand_examples():
    assert scale_class(ThetaGraphSpec((1, 1, 2)), 3) == ThetaGraphSpec((1, 1, 4))
    assert scale_class(ThetaGraphSpec((2, 2, 3)), 2) == ThetaGraphSpec((3, 3, 5))
    assert hyperbolic_degree_expand(ThetaGraphSpec((1, 1, 2)), 2) == ThetaGraphSpec((1, 1, 2, 2))
    assert hyperbolic_degree_expand(ThetaGraphSpec((1, 1, 1, 3)), 3) == ThetaGraphSpec((1, 1, 1, 1, 1, 3, 3, 3))
    t = ThetaGraphSpec((1, 1, 2, 5))
    assert hyperbolic_degree_expand(t, 1) == t
    with pytest.raises(LinearDegreeTooSmall):
        hyperbolic_degree_expand(ThetaGraphSpec((1, 2, 2)), 2)


def test_commensurable_examples():
    spec = SurfaceAmalgamSpec(2, 2, 1, 1, NS, NS)
    scaled = scale_class(realize_vector_as_theta(associated_racg_vector(spec).w), 2)
    assert commensurable_CW(spec, scaled).commensurable
    spec23 = SurfaceAmalgamSpec(2, 2, 2, 3, NS, NS)
    own = realize_vector_as_theta(associated_racg_vector(spec23).w)
    verdict = commensurable_CW(spec23, own)
    assert verdict.commensurable
    assert (verdict.witness["K"], verdict.witness["L"]) == (1, 1)
    assert commensurable_CW(spec23, ThetaGraphSpec((1, 2, 2))).status == "Unknown"


def test_commensurable_via_expansion():
    spec = SurfaceAmalgamSpec(2, 2, 2, 3, NS, NS)
    own = realize_vector_as_theta(associated_racg_vector(spec).w)
    other = hyperbolic_degree_expand(scale_class(own, 3), 2)
    verdict = commensurable_CW(spec, other)
    assert verdict.commensurable, verdict.reason


thetas = st.lists(st.integers(1, 6), min_size=3, max_size=7).map(lambda a: ThetaGraphSpec(tuple(sorted(a))))


@settings(max_examples=100, derandomize=True)
@given(thetas, st.integers(1, 5))
def test_scaling_multiplies_vector(t, K):
    assert euler_vector(scale_class(t, K)) == euler_vector(t).scaled(K)
    assert vectors_commensurable(euler_vector(scale_class(t, K)), euler_vector(t)) is not None


@settings(max_examples=100, derandomize=True)
@given(thetas.filter(lambda t: t.linear_degree >= 2), st.integers(1, 4))
def test_expansion_matches_pattern(t, m):
    assert euler_vector(hyperbolic_degree_expand(t, m)) == expansion_pattern(t, m)


@settings(max_examples=100, derandomize=True)
@given(thetas)
def test_realize_inverts_euler_vector(t):
    assert realize_vector_as_theta(euler_vector(t)) == t
