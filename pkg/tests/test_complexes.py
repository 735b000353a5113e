import random
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from amalgam.complexes import (
    Complex2,
    ComplexError,
    NotAProductFragment,
    Surface,
    Tube,
    build_amalgam_complex,
    collapse_products,
    disjoint_union,
    euler_char,
    is_connected,
    iso_check,
    rename_piece,
)
from amalgam.core_model import CurveSpec, SurfaceAmalgamSpec
from amalgam.covers import build_tower_X, kmn_cover_fragment

NS = CurveSpec.nonseparating()


def relabel(c: Complex2, rng: random.Random) -> Complex2:
    """Rename circles and shuffle pieces: an isomorphic copy."""
    names = {x: f"r{i}" for i, x in enumerate(rng.sample(list(c.circles), len(c.circles)))}
    pieces = [rename_piece(p, names) for p in c.pieces]
    rng.shuffle(pieces)
    return Complex2(tuple(names[x] for x in c.circles), tuple(pieces))


def test_euler_examples():
    assert euler_char(build_amalgam_complex(SurfaceAmalgamSpec(2, 2, 2, 3, NS, NS))) == -4
    assert euler_char(kmn_cover_fragment(2, 3)[0]) == 0
    assert euler_char(Complex2((), ())) == 0


def test_amalgam_pieces():
    c = build_amalgam_complex(SurfaceAmalgamSpec(2, 2, 2, 3, NS, CurveSpec.separating(1, 1)))
    (_, sa), (_, sb1), (_, sb2) = c.surfaces()
    assert sa == Surface(-2, (("A", 1), ("A", 1))) and sa.genus == 1
    assert sb1.euler == sb2.euler == -1 and len(sb1.att) == 1
    assert c.tubes()[0][1] == Tube((("A", 2), ("B", 3)))
    assert is_connected(c)


def test_complex_validation():
    with pytest.raises(ComplexError, match="free circles"):
        Complex2(("A", "B"), (Tube((("A", 1), ("A", 1))),))
    with pytest.raises(ComplexError, match="no genus"):
        Complex2(("A",), (Surface(-1, (("A", 1), ("A", 1))),))
    with pytest.raises(ComplexError, match="unknown circle"):
        Complex2(("A",), (Tube((("A", 1), ("Z", 1))),))


def test_json_round_trip():
    c = build_tower_X(SurfaceAmalgamSpec(2, 3, 2, 3, NS, CurveSpec.separating(1, 2))).stages[4]
    assert Complex2.from_json(c.to_json()) == c


def test_iso_basics():
    c = build_amalgam_complex(SurfaceAmalgamSpec(2, 2, 2, 3, NS, NS))
    iso = iso_check(c, c)
    assert iso is not None and iso.circle_map == {"A": "A", "B": "B"}
    d = build_amalgam_complex(SurfaceAmalgamSpec(2, 2, 2, 3, CurveSpec.separating(1, 1), NS))
    assert euler_char(c) == euler_char(d)
    assert iso_check(c, d) is None
    assert not is_connected(disjoint_union(c, c))


def test_collapse_examples():
    k23, _ = kmn_cover_fragment(2, 3)
    out, rec = collapse_products(k23, [list(range(6))])
    assert out.circles == ("C0",) and len(out.tubes()) == 2
    assert len(rec.tree_tubes) == 4 and euler_char(out) == 0
    # K_{1,1} inside a complex: the tube goes, its two circles merge, no tori
    k11 = Complex2(("P", "Q"), (Tube((("P", 1), ("Q", 1))), Surface(-1, (("P", 1),)), Surface(-1, (("Q", 1),))))
    out, rec = collapse_products(k11, [[0]])
    assert out.circles == ("C0",) and not out.tubes() and rec.tori == ()
    assert len(out.surfaces()) == 2
    with pytest.raises(NotAProductFragment):
        collapse_products(k23, [[0, 1, 3]])


@pytest.mark.parametrize("m, n", [(2, 3), (3, 3), (2, 4)])
def test_collapse_iso_invariant_across_seeds(m, n):
    k, _ = kmn_cover_fragment(m, n)
    base, _ = collapse_products(k, [list(range(m * n))])
    for seed in range(5):
        out, _ = collapse_products(k, [list(range(m * n))], seed=seed)
        assert iso_check(base, out) is not None


def _corpus(count: int = 50) -> list[Complex2]:
    rng = random.Random(0)
    seeds = [
        build_tower_X(SurfaceAmalgamSpec(2, 2, m, n, a, b)).stages[i]
        for m, n in ((1, 2), (2, 3))
        for a in (NS, CurveSpec.separating(1, 1))
        for b in (NS,)
        for i in (1, 3)
    ]
    return [relabel(rng.choice(seeds), rng) for _ in range(count)]


def test_iso_is_an_equivalence_on_corpus():
    corpus = _corpus()
    rel = {(i, j): iso_check(a, b) is not None for (i, a), (j, b) in combinations(enumerate(corpus), 2)}
    assert all(iso_check(c, c) is not None for c in corpus)
    for i, j, k in combinations(range(len(corpus)), 3):
        if rel[i, j] and rel[j, k]:
            assert rel[i, k]
    # relabelled copies are found, so more than one class but far fewer than 50
    classes = {min(j for j in range(len(corpus)) if j == i or rel[min(i, j), max(i, j)]) for i in range(len(corpus))}
    assert 1 < len(classes) <= 8


@settings(max_examples=30, derandomize=True, deadline=None)
@given(st.integers(1, 3), st.integers(1, 4), st.integers(0, 10**6))
def test_iso_finds_relabelled_copy(m, n, seed):
    c = build_tower_X(SurfaceAmalgamSpec(2, 2, m, n, NS, NS)).stages[2]
    assert iso_check(c, relabel(c, random.Random(seed))) is not None
