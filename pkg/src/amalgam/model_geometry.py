"""Finite balls in biregular trees, model-space types, and the collapse maps
T_{2,2} -> T_{2,2} and T_{3,3} -> T_{s+2,s+2} (times a line) with measured
quasi-isometry constants."""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .classify import qi_class_C, qi_class_W
from .core_model import SurfaceAmalgamSpec, ThetaGraphSpec

DEFAULT_MAX_VERTICES = 1 << 16
GRID = 12  # L is searched on the grid j / GRID


class SizeLimit(RuntimeError):
    pass


class RadiusTooSmall(ValueError):
    pass


class EmptySample(ValueError):
    pass


def max_vertices() -> int:
    raw = os.environ.get("AMALGAM_MAX_VERTICES")
    return int(raw) if raw else DEFAULT_MAX_VERTICES


# -- biregular trees --------------------------------------------------------------------


def level_sizes(m: int, n: int, R: int) -> list[int]:
    sizes = [1]
    for i in range(R):
        if i == 0:
            sizes.append(m)
        else:
            valence = n if i % 2 == 1 else m
            sizes.append(sizes[-1] * (valence - 1))
    return sizes


@dataclass
class TreeBall:
    """Rooted ball in T_{m,n}; vertices are numbered in BFS order."""

    m: int
    n: int
    R: int
    parent: np.ndarray
    depth: np.ndarray
    child_rank: np.ndarray  # position of a vertex among its siblings

    @property
    def size(self) -> int:
        return len(self.parent)

    def valence(self, v: int) -> int:
        return self.m if self.depth[v] % 2 == 0 else self.n

    def level_sizes(self) -> list[int]:
        return np.bincount(self.depth, minlength=self.R + 1).tolist()

    def degree_counts(self) -> np.ndarray:
        deg = np.bincount(self.parent[1:], minlength=self.size)
        deg[1:] += 1
        return deg

    def ancestors(self) -> np.ndarray:
        """anc[v, j] = ancestor of v at depth j, or -1 below v."""
        anc = np.full((self.size, self.R + 1), -1, dtype=np.int64)
        anc[0, 0] = 0
        # levels are contiguous in BFS order, so fill level by level
        start = 1
        for d in range(1, self.R + 1):
            cnt = int((self.depth == d).sum())
            idx = np.arange(start, start + cnt)
            anc[idx, :d] = anc[self.parent[idx], :d]
            anc[idx, d] = idx
            start += cnt
        return anc


def biregular_ball(m: int, n: int, R: int, cap: Optional[int] = None) -> TreeBall:
    if m < 1 or n < 1 or R < 0:
        raise ValueError("need m, n >= 1 and R >= 0")
    cap = max_vertices() if cap is None else cap
    sizes = level_sizes(m, n, R)
    if sum(sizes) > cap:
        raise SizeLimit(f"T_{{{m},{n}}} ball of radius {R} has {sum(sizes)} vertices (cap {cap})")
    parent = [np.array([-1], dtype=np.int64)]
    rank = [np.array([0], dtype=np.int64)]
    depth = [np.zeros(1, dtype=np.int64)]
    start, prev = 1, np.array([0], dtype=np.int64)
    for d in range(1, R + 1):
        kids = m if d == 1 else (n if d % 2 == 0 else m) - 1
        if kids <= 0 or len(prev) == 0:
            break
        parent.append(np.repeat(prev, kids))
        rank.append(np.tile(np.arange(kids, dtype=np.int64), len(prev)))
        depth.append(np.full(len(prev) * kids, d, dtype=np.int64))
        prev = np.arange(start, start + len(prev) * kids, dtype=np.int64)
        start += len(prev)
    return TreeBall(m, n, R, np.concatenate(parent), np.concatenate(depth), np.concatenate(rank))


def largest_radius(m: int, n: int, R: int, cap: Optional[int] = None) -> int:
    cap = max_vertices() if cap is None else cap
    while R > 0 and sum(level_sizes(m, n, R)) > cap:
        R -= 1
    return R


# -- model space types -----------------------------------------------------------------


@dataclass(frozen=True)
class ModelSpaceType:
    m: int
    n: int
    s: int
    tree_set_size: Optional[int] = None
    hyperbolic: bool = False

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.m, self.n, self.s)

    def to_json(self) -> dict:
        out = {"m": self.m, "n": self.n, "s": self.s}
        if self.hyperbolic:
            out["hyperbolic"] = True
        return out

    def __str__(self) -> str:
        return f"({self.m},{self.n},{self.s})" + (" hyperbolic" if self.hyperbolic else "")


def model_space_type_of(spec: Union[SurfaceAmalgamSpec, ThetaGraphSpec]) -> ModelSpaceType:
    if isinstance(spec, SurfaceAmalgamSpec):
        return ModelSpaceType(spec.m, spec.n, 2, hyperbolic=spec.m == 1)
    ell = spec.linear_degree
    return ModelSpaceType(ell, ell, spec.k - ell, hyperbolic=ell <= 1)


def standard_representative(t: ModelSpaceType) -> ModelSpaceType:
    m, n = sorted((t.m, t.n))
    if m <= 1:
        return ModelSpaceType(t.m, t.n, t.s, t.tree_set_size, hyperbolic=True)
    if (m, n) == (2, 2) and t.s >= 1:
        return ModelSpaceType(2, 2, 1)
    if n >= 3 and t.s >= 1:
        return ModelSpaceType(3, 3, 1)
    if n >= 3 and t.s == 0:
        return ModelSpaceType(2, 3, 0)
    raise ValueError(f"type {t} lies in none of the standard families")


def standard_class(spec: Union[SurfaceAmalgamSpec, ThetaGraphSpec]) -> str:
    """Class name implied by the standard representative, for cross-checks."""
    if isinstance(spec, SurfaceAmalgamSpec):
        return str(qi_class_C(spec))
    return str(qi_class_W(spec))


# -- collapse maps -----------------------------------------------------------------------


@dataclass
class VertexMap:
    """Map on (tree ball) x [-R, R], identity on the second coordinate.

    Source tree distances come from ``src_anc`` (ancestor table) and target
    distances from ``tgt_anc`` applied to ``image`` (one target vertex per
    source vertex).  ``interior`` lists source tree vertices at distance at
    least s from the ball boundary.
    """

    kind: str
    s: int
    R: int
    src_anc: np.ndarray
    src_depth: np.ndarray
    image: np.ndarray
    tgt_anc: np.ndarray
    tgt_depth: np.ndarray
    interior: np.ndarray
    info: dict = field(default_factory=dict)

    def __call__(self, vertex: tuple[int, int]) -> tuple[int, int]:
        v, t = vertex
        return int(self.image[v]), t

    def src_dist(self, a: tuple[int, int], b: tuple[int, int]) -> int:
        return int(_tree_dist(self.src_anc, self.src_depth, np.array([a[0]]), np.array([b[0]]))[0, 0]) + abs(a[1] - b[1])

    def tgt_dist(self, a: tuple[int, int], b: tuple[int, int]) -> int:
        ia, ib = self.image[[a[0]]], self.image[[b[0]]]
        return int(_tree_dist(self.tgt_anc, self.tgt_depth, ia, ib)[0, 0]) + abs(a[1] - b[1])

    @property
    def slab_interior(self) -> int:
        return self.R - self.s


def _tree_dist(anc: np.ndarray, depth: np.ndarray, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
    a, b = anc[us][:, None, :], anc[vs][None, :, :]
    common = ((a == b) & (a >= 0)).sum(axis=2)
    return depth[us][:, None] + depth[vs][None, :] - 2 * (common - 1)


def collapse_map_line(s: int, R: int) -> VertexMap:
    """x -> floor(x / s) on the line T_{2,2}, coordinates -R..R."""
    if s < 1:
        raise ValueError("s must be positive")
    if R < s:
        raise RadiusTooSmall(f"R = {R} < s = {s}")
    xs = np.arange(-R, R + 1)
    # a line is a tree rooted at 0; encode it by signed ancestor chains
    src_anc, src_depth = _line_tables(xs, R)
    img = np.floor_divide(xs, s)
    ys = np.arange(img.min(), img.max() + 1)
    tgt_anc, tgt_depth = _line_tables(ys, int(max(-ys.min(), ys.max())))
    image = img - ys.min()
    interior = np.nonzero(np.abs(xs) <= R - s)[0]
    return VertexMap("line", s, R, src_anc, src_depth, image, tgt_anc, tgt_depth, interior, {"coords": xs})


def _line_tables(xs: np.ndarray, R: int) -> tuple[np.ndarray, np.ndarray]:
    # ancestor of x at depth j is sign(x) * j, encoded as an index shifted by R
    n = len(xs)
    anc = np.full((n, R + 1), -1, dtype=np.int64)
    for j in range(R + 1):
        mask = np.abs(xs) >= j
        anc[mask, j] = np.sign(xs[mask]) * j + R
    return anc, np.abs(xs)


def collapse_map_tree(s: int, R: int, ordering: str = "first", cap: Optional[int] = None) -> VertexMap:
    """Collapse disjoint descending paths of s vertices in T_{3,3} to points.

    A vertex continues its parent's path when it is the parent's designated
    child (first or last, per ``ordering``) and that path is still shorter than
    s; otherwise it starts a new path.
    """
    if s < 1:
        raise ValueError("s must be positive")
    if R < s:
        raise RadiusTooSmall(f"R = {R} < s = {s}")
    if ordering not in ("first", "last"):
        raise ValueError("ordering is 'first' or 'last'")
    ball = biregular_ball(3, 3, R, cap)
    size = ball.size
    pid = np.zeros(size, dtype=np.int64)
    plen = [1]
    top = [0]
    for d in range(1, R + 1):
        idx = np.nonzero(ball.depth == d)[0]
        par = ball.parent[idx]
        kids = 3 if d == 1 else 2
        designated = ball.child_rank[idx] == (0 if ordering == "first" else kids - 1)
        lens = np.array(plen, dtype=np.int64)
        cont = designated & (lens[pid[par]] < s)
        pid[idx[cont]] = pid[par[cont]]
        for p in pid[idx[cont]]:
            plen[p] += 1
        new = idx[~cont]
        pid[new] = np.arange(len(plen), len(plen) + len(new))
        plen.extend([1] * len(new))
        top.extend(new.tolist())
    top_arr = np.array(top, dtype=np.int64)
    qparent = np.where(top_arr == 0, -1, pid[np.maximum(ball.parent[top_arr], 0)])
    qparent[0] = -1
    qdepth = np.zeros(len(top), dtype=np.int64)
    for q in range(1, len(top)):  # paths are created in BFS order, parents first
        qdepth[q] = qdepth[qparent[q]] + 1
    qR = int(qdepth.max())
    qanc = np.full((len(top), qR + 1), -1, dtype=np.int64)
    qanc[0, 0] = 0
    for q in range(1, len(top)):
        qanc[q, : qdepth[q]] = qanc[qparent[q], : qdepth[q]]
        qanc[q, qdepth[q]] = q
    interior = np.nonzero(ball.depth <= R - s)[0]
    map_ = VertexMap("tree", s, R, ball.ancestors(), ball.depth, pid, qanc, qdepth, interior)
    map_.info = {
        "paths": len(top),
        "path_lengths": np.array(plen),
        "path_top_depth": ball.depth[top_arr],
        "quotient_parent": qparent,
        "ordering": ordering,
    }
    return map_


@dataclass(frozen=True)
class QuotientCertificate:
    interior_paths: int
    valences: tuple[int, ...]
    fiber_sizes: tuple[int, ...]
    expected_valence: int

    @property
    def ok(self) -> bool:
        return (
            self.interior_paths > 0
            and all(v == self.expected_valence for v in self.valences)
            and all(f == self.expected_valence - 2 for f in self.fiber_sizes)
        )


def certify_quotient(f: VertexMap) -> QuotientCertificate:
    """Interior quotient vertices (complete paths away from the boundary) must have valence s + 2."""
    s, R = f.s, f.R
    qparent = f.info["quotient_parent"]
    nq = f.info["paths"]
    deg = np.bincount(qparent[qparent >= 0], minlength=nq)
    deg[qparent >= 0] += 1
    interior = np.nonzero(f.info["path_top_depth"] <= R - s)[0]
    return QuotientCertificate(
        len(interior),
        tuple(sorted(set(deg[interior].tolist()))),
        tuple(sorted(set(f.info["path_lengths"][interior].tolist()))),
        s + 2,
    )


# -- distortion --------------------------------------------------------------------------


def interior_tree_pairs(f: VertexMap, chunk: int = 512) -> np.ndarray:
    """Distinct (source distance, target distance) over all pairs of interior tree vertices."""
    pts = f.interior
    # only ancestor columns up to the deepest interior vertex (or its image) matter
    src_anc = f.src_anc[:, : int(f.src_depth[pts].max()) + 1].astype(np.int32)
    img = f.image[pts]
    tgt_anc = f.tgt_anc[:, : int(f.tgt_depth[img].max()) + 1].astype(np.int32)
    found = set()
    for i in range(0, len(pts), chunk):
        us, vs = pts[i : i + chunk], pts[i:]
        dsrc = _tree_dist(src_anc, f.src_depth, us, vs)
        dtgt = _tree_dist(tgt_anc, f.tgt_depth, f.image[us], f.image[vs])
        code = dsrc.astype(np.int64) * 4096 + dtgt
        found.update(np.unique(code).tolist())
    return np.array(sorted(divmod(c, 4096) for c in found), dtype=np.int64).reshape(-1, 2)


def interior_distance_pairs(f: VertexMap) -> np.ndarray:
    """Distinct (d, d') over all pairs of distinct interior slab vertices."""
    tree = interior_tree_pairs(f)
    span = 2 * f.slab_interior
    dts = np.arange(span + 1)
    d = (tree[:, 0][:, None] + dts[None, :]).ravel()
    dp = (tree[:, 1][:, None] + dts[None, :]).ravel()
    pairs = np.unique(np.stack([d, dp], axis=1), axis=0)
    return pairs[pairs[:, 0] > 0]


def _holds(pairs: np.ndarray, j: int) -> bool:
    d, dp = pairs[:, 0], pairs[:, 1]
    # K = j / GRID:  d <= K (d' + K)  and  d' <= K (d + 1)
    return bool(np.all(GRID * GRID * d <= GRID * j * dp + j * j) and np.all(GRID * dp <= j * (d + 1)))


def distortion_from_pairs(pairs: np.ndarray) -> tuple[Fraction, Fraction]:
    """Least L on the 1/GRID grid (L >= 1) with an (L, L) quasi-isometry, then least C for that L."""
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if len(pairs) == 0:
        raise EmptySample("no pairs to measure")
    lo, hi = GRID, GRID * (int(pairs.max()) + 1)
    while not _holds(pairs, hi):
        hi *= 2
    if _holds(pairs, lo):
        hi = lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _holds(pairs, mid):
            hi = mid
        else:
            lo = mid
    j = hi
    L = Fraction(j, GRID)
    d, dp = pairs[:, 0], pairs[:, 1]
    lower = Fraction(int((GRID * d - j * dp).max()), j)  # d / L - d'
    upper = Fraction(int((GRID * dp - j * d).max()), GRID)  # d' - L d
    return L, max(lower, upper, Fraction(0))


def measure_distortion(f: VertexMap, sample: Sequence[tuple[tuple[int, int], tuple[int, int]]]) -> tuple[Fraction, Fraction]:
    pairs = [(f.src_dist(a, b), f.tgt_dist(a, b)) for a, b in sample if a != b]
    if not pairs:
        raise EmptySample("no pairs of distinct vertices in the sample")
    return distortion_from_pairs(np.array(pairs))


def sample_interior_pairs(f: VertexMap, size: int, seed: int = 0) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    rng = np.random.default_rng(seed)
    lim = f.slab_interior
    us = rng.choice(f.interior, size=size)
    vs = rng.choice(f.interior, size=size)
    ts = rng.integers(-lim, lim + 1, size=size)
    tt = rng.integers(-lim, lim + 1, size=size)
    return [((int(a), int(b)), (int(c), int(e))) for a, c, b, e in zip(us, vs, ts, tt)]


@dataclass
class DistortionReport:
    kind: str
    s: int
    R: int
    requested_R: int
    pairs: int
    L: Fraction
    C: Fraction
    quotient_ok: Optional[bool] = None

    @property
    def passed(self) -> bool:
        return self.L <= self.s and self.C <= self.s and self.quotient_ok is not False

    def to_json(self) -> dict:
        out = {
            "map": self.kind,
            "s": self.s,
            "radius": self.R,
            "requested_radius": self.requested_R,
            "distinct_pairs": self.pairs,
            "measured_L": str(self.L),
            "measured_C": str(self.C),
            "bound_L": self.s,
            "bound_C": self.s,
            "pass": self.passed,
        }
        if self.quotient_ok is not None:
            out["quotient_valence_ok"] = self.quotient_ok
        return out


def run_distortion(
    kind: str,
    s: int,
    R: int,
    sample_size: Optional[int] = None,
    ordering: str = "first",
    cap: Optional[int] = None,
    seed: int = 0,
) -> DistortionReport:
    """Measure a collapse map on interior pairs, shrinking R to fit the vertex cap if needed."""
    if kind == "line":
        R_eff = R
        f = collapse_map_line(s, R)
        qok = None
    elif kind == "tree":
        R_eff = largest_radius(3, 3, R, cap)
        if R_eff < s:
            raise SizeLimit(f"vertex cap leaves radius {R_eff} < s = {s}")
        f = collapse_map_tree(s, R_eff, ordering, cap)
        qok = certify_quotient(f).ok
    else:
        raise ValueError(f"unknown map {kind!r}")
    if sample_size:
        sample = sample_interior_pairs(f, sample_size, seed)
        pairs = np.array([(f.src_dist(a, b), f.tgt_dist(a, b)) for a, b in sample if a != b]).reshape(-1, 2)
    else:
        pairs = interior_distance_pairs(f)
    L, C = distortion_from_pairs(pairs)
    return DistortionReport(kind, s, R_eff, R, len(pairs), L, C, qok)
