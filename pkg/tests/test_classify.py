import pytest
from hypothesis import given, settings, strategies as st

from amalgam.classify import (
    BadCycleType,
    commutator_subgroup,
    cone_planar_nerve,
    dihedral_group,
    dihedral_realizable,
    half_plane_config,
    is_3manifold_group,
    is_hyperbolic_C,
    obstruction_oracle,
    qi_class_W,
    qi_cross,
    qi_equivalent_C,
    qi_equivalent_W,
)
from amalgam.core_model import CurveSpec, SurfaceAmalgamSpec, ThetaGraphSpec

NS = CurveSpec.nonseparating()
SEP = CurveSpec.separating(1, 1)


def C(m, n, a=NS, b=NS, g=2, h=2):
    return SurfaceAmalgamSpec(g, h, m, n, a, b)


def test_hyperbolicity():
    assert is_hyperbolic_C(C(1, 5))
    assert is_hyperbolic_C(C(1, 1))
    assert not is_hyperbolic_C(C(2, 2))


@pytest.mark.parametrize(
    "spec, ok, label",
    [
        (C(1, 1), True, "TrivialIBundles"),
        (C(2, 3), False, "DihedralCase1"),
        (C(2, 2, NS, SEP), False, "CommutatorCase3"),
        (C(1, 2, NS, SEP), False, "CommutatorCase4"),
        (C(1, 4), False, "DihedralCase2"),
    ],
)
def test_three_manifold_table(spec, ok, label):
    v = is_3manifold_group(spec)
    assert (v.is_3manifold, v.label) == (ok, label)
    o = obstruction_oracle(spec)
    assert (o.is_3manifold, o.label) == (ok, label)


def test_dihedral_group_orders():
    for k in range(3, 9):
        G = dihedral_group(k)
        assert len(G) == 2 * k
        # the commutator subgroup of D_k is the rotations by even steps
        assert len(commutator_subgroup(G)) == (k if k % 2 else k // 2)


def test_dihedral_realizable_examples():
    assert dihedral_realizable([2, 1, 1], 4)
    assert not dihedral_realizable([3, 1, 1], 5)
    assert dihedral_realizable([1] * 7, 7)
    with pytest.raises(BadCycleType):
        dihedral_realizable([2, 2], 5)


def test_half_plane_configs():
    assert half_plane_config(3, 2).k == 5
    assert half_plane_config(3, 2).cycle_type == (3, 1, 1)
    cfg = half_plane_config(4, 1)
    assert cfg.k == 10 and cfg.cycle_type == (4, 4, 1, 1)
    assert not dihedral_realizable(cfg.cycle_type, cfg.k)


def test_qi_examples():
    assert qi_equivalent_C(C(1, 3), C(1, 3))
    assert not qi_equivalent_C(C(2, 2), C(2, 3))
    assert qi_equivalent_C(C(2, 3), C(5, 7))
    assert qi_equivalent_W(ThetaGraphSpec((1, 1, 2)), ThetaGraphSpec((1, 1, 3, 5)))
    assert not qi_equivalent_W(ThetaGraphSpec((1, 1, 2)), ThetaGraphSpec((1, 1, 1, 2)))
    assert qi_equivalent_W(ThetaGraphSpec((1, 2, 2)), ThetaGraphSpec((2, 2, 2, 2)))
    assert qi_cross(C(2, 2), ThetaGraphSpec((1, 1, 3)))
    assert qi_cross(C(2, 5), ThetaGraphSpec((1, 1, 1, 2)))
    assert not qi_cross(C(2, 2), ThetaGraphSpec((1, 1, 1)))
    assert qi_class_W(ThetaGraphSpec((1, 1, 1))).tag == "Flat"


def test_coned_nerve_counts():
    cert = cone_planar_nerve(ThetaGraphSpec((1, 1, 1)))
    assert (len(cert.vertices), len(cert.edges), len(cert.triangles)) == (8, 18, 12)
    assert cert.euler_characteristic == 2
    assert cert.ok


@settings(max_examples=60, derandomize=True)
@given(st.lists(st.integers(1, 5), min_size=3, max_size=7))
def test_coned_nerve_always_flag_sphere(arms):
    cert = cone_planar_nerve(ThetaGraphSpec(tuple(sorted(arms))))
    assert cert.ok and cert.flag and cert.euler_characteristic == 2


@settings(max_examples=80, derandomize=True)
@given(st.integers(1, 6), st.integers(1, 6), st.sampled_from([NS, SEP]), st.sampled_from([NS, SEP]))
def test_oracle_agrees_with_table(m, n, a, b):
    spec = C(min(m, n), max(m, n), a, b)
    v, o = is_3manifold_group(spec), obstruction_oracle(spec)
    assert (v.is_3manifold, v.label) == (o.is_3manifold, o.label)
