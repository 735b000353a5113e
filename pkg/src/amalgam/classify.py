"""Decision procedures for hyperbolicity, 3-manifold realizability and QI type.

``is_3manifold_group`` applies the closed-form criterion.  ``obstruction_oracle``
re-derives the same verdict from half-plane configurations and brute-force
enumeration of dihedral groups, without looking at the criterion.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional

from .core_model import SurfaceAmalgamSpec, ThetaGraphSpec

Perm = tuple[int, ...]


class BadCycleType(ValueError):
    pass


# -- verdict types ----------------------------------------------------------------

WITNESSES = ("TrivialIBundles", "TwistedOneSide", "TwistedBothSides")
OBSTRUCTIONS = ("DihedralCase1", "DihedralCase2", "CommutatorCase3", "CommutatorCase4")


@dataclass(frozen=True)
class HalfPlaneConfig:
    """Half-planes indexed 0..k-1 and the permutation a group element induces on them."""

    k: int
    action: Perm

    def __post_init__(self):
        if self.k < 1 or sorted(self.action) != list(range(self.k)):
            raise ValueError(f"action {self.action} is not a permutation of range({self.k})")

    @property
    def cycle_type(self) -> tuple[int, ...]:
        return cycle_type(self.action)

    def to_json(self) -> dict:
        return {"k": self.k, "action": list(self.action), "cycle_type": list(self.cycle_type)}


@dataclass(frozen=True)
class ThreeManifoldVerdict:
    is_3manifold: bool
    witness: Optional[str] = None
    obstruction: Optional[str] = None
    config: Optional[HalfPlaneConfig] = None

    def __post_init__(self):
        if self.is_3manifold:
            assert self.witness in WITNESSES and self.obstruction is None
        else:
            assert self.obstruction in OBSTRUCTIONS and self.witness is None

    @property
    def label(self) -> str:
        return self.witness if self.is_3manifold else self.obstruction  # type: ignore[return-value]

    def to_json(self) -> dict:
        out = {"is_3manifold": self.is_3manifold, "case": self.label}
        if self.config is not None:
            out["half_planes"] = self.config.to_json()
        return out


# -- hyperbolicity and the 3-manifold criterion ------------------------------------


def is_hyperbolic_C(spec: SurfaceAmalgamSpec) -> bool:
    return spec.m == 1


def _witness(m: int, n: int) -> str:
    return {(1, 1): "TrivialIBundles", (1, 2): "TwistedOneSide", (2, 2): "TwistedBothSides"}[(m, n)]


def is_3manifold_group(spec: SurfaceAmalgamSpec) -> ThreeManifoldVerdict:
    m, n = spec.m, spec.n
    a_sep, b_sep = spec.curve_a.is_separating, spec.curve_b.is_separating
    if (m, n) == (1, 1) or ((m, n) == (1, 2) and not b_sep) or ((m, n) == (2, 2) and not (a_sep or b_sep)):
        return ThreeManifoldVerdict(True, witness=_witness(m, n))
    if m >= 2 and n >= 3:
        obs = "DihedralCase1"
    elif m == 1 and n >= 3:
        obs = "DihedralCase2"
    elif m == 2:
        obs = "CommutatorCase3"
    else:
        obs = "CommutatorCase4"
    return ThreeManifoldVerdict(False, obstruction=obs)


# -- permutations and dihedral groups -------------------------------------------------


def cycle_type(p: Perm) -> tuple[int, ...]:
    seen = [False] * len(p)
    out = []
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        out.append(length)
    return tuple(sorted(out, reverse=True))


def compose(p: Perm, q: Perm) -> Perm:
    """p after q."""
    return tuple(p[q[i]] for i in range(len(q)))


def inverse(p: Perm) -> Perm:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def dihedral_group(k: int) -> list[Perm]:
    """All 2k symmetries of k cyclically ordered points (rotations then reflections).

    For k <= 2 some of these coincide; duplicates are removed.
    """
    elems: list[Perm] = []
    for r in range(k):
        elems.append(tuple((i + r) % k for i in range(k)))
    for r in range(k):
        elems.append(tuple((r - i) % k for i in range(k)))
    return list(dict.fromkeys(elems))


def commutator_subgroup(group: list[Perm]) -> set[Perm]:
    """Subgroup generated by all commutators, by closure."""
    ident = tuple(range(len(group[0])))
    gens = {compose(compose(inverse(x), inverse(y)), compose(x, y)) for x in group for y in group}
    sub = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = compose(g, x)
                if y not in sub:
                    sub.add(y)
                    nxt.append(y)
        frontier = nxt
    return sub


def dihedral_elements_of_type(cycles: Iterable[int], k: int) -> list[Perm]:
    target = tuple(sorted(cycles, reverse=True))
    if sum(target) != k or any(c < 1 for c in target):
        raise BadCycleType(f"cycle lengths {list(target)} do not partition {k}")
    return [p for p in dihedral_group(k) if cycle_type(p) == target]


def dihedral_realizable(cycles: Iterable[int], k: int) -> bool:
    return bool(dihedral_elements_of_type(cycles, k))


# -- the independent oracle -------------------------------------------------------------


def half_plane_config(winding: int, other_winding: int) -> HalfPlaneConfig:
    """Configuration around a line stabilized by a curve of the given winding.

    If the other side also winds (other_winding >= 2) the line meets ``winding``
    half-planes from the tube side permuted cyclically, plus the two surface
    half-planes which are fixed: k = winding + 2.  If the other side has winding
    one, each tube half-plane is doubled (two families), giving k = 2*winding + 2
    with two winding-cycles.
    """
    w = winding
    if other_winding >= 2:
        k = w + 2
        action = [(i + 1) % w for i in range(w)] + [w, w + 1]
    else:
        k = 2 * w + 2
        action = [(i + 1) % w for i in range(w)]
        action += [w + (i + 1) % w for i in range(w)]
        action += [2 * w, 2 * w + 1]
    return HalfPlaneConfig(k, tuple(action))


def obstruction_oracle(spec: SurfaceAmalgamSpec) -> ThreeManifoldVerdict:
    m, n = spec.m, spec.n
    # lines stabilized by a power of b (and of a, when it also winds)
    sides = [(n, m, spec.curve_b)]
    if m >= 2:
        sides.append((m, n, spec.curve_a))
    last_config = None
    for winding, other, curve in sides:
        if winding < 2:
            continue
        cfg = half_plane_config(winding, other)
        last_config = cfg
        realizers = dihedral_elements_of_type(cfg.cycle_type, cfg.k)
        if not realizers:
            return ThreeManifoldVerdict(False, obstruction="DihedralCase1" if other >= 2 else "DihedralCase2", config=cfg)
        if curve.homologically_trivial:
            # a null-homologous curve must act through the commutator subgroup
            comm = commutator_subgroup(dihedral_group(cfg.k))
            if not any(p in comm for p in realizers):
                return ThreeManifoldVerdict(
                    False, obstruction="CommutatorCase3" if other >= 2 else "CommutatorCase4", config=cfg
                )
    twisted = sum(1 for w in (m, n) if w == 2)
    witness = WITNESSES[twisted]
    return ThreeManifoldVerdict(True, witness=witness, config=last_config)


# -- quasi-isometry classes -----------------------------------------------------------


@dataclass(frozen=True)
class QiClassC:
    tag: str  # Hyperbolic | Mixed22 | Generic
    n: Optional[int] = None

    def key(self) -> tuple:
        if self.tag == "Hyperbolic":
            # same class as the zero-linear-degree theta group with 2n+2 arms
            return ("hyp", 2 * self.n + 2)  # type: ignore[operator]
        return {"Mixed22": ("mixed2",), "Generic": ("mixed3",)}[self.tag]

    def __str__(self) -> str:
        return f"Hyperbolic({self.n})" if self.tag == "Hyperbolic" else self.tag


@dataclass(frozen=True)
class QiClassW:
    tag: str  # HypZeroLinear | HypOneLinear | Mixed2 | Mixed3 | Flat
    k: Optional[int] = None

    def key(self) -> tuple:
        if self.tag == "HypZeroLinear":
            return ("hyp", self.k)
        if self.tag == "HypOneLinear":
            return ("hyp", 2 * (self.k - 1))  # type: ignore[operator]
        return {"Mixed2": ("mixed2",), "Mixed3": ("mixed3",), "Flat": ("flat",)}[self.tag]

    @property
    def is_hyperbolic(self) -> bool:
        return self.tag.startswith("Hyp")

    def __str__(self) -> str:
        return f"{self.tag}({self.k})" if self.k is not None else self.tag


def qi_class_C(spec: SurfaceAmalgamSpec) -> QiClassC:
    if spec.m == 1:
        return QiClassC("Hyperbolic", spec.n)
    if spec.n == 2:
        return QiClassC("Mixed22")
    return QiClassC("Generic")


def qi_class_W(theta: ThetaGraphSpec) -> QiClassW:
    ell, h = theta.linear_degree, theta.hyperbolic_degree
    if ell == 0:
        return QiClassW("HypZeroLinear", theta.k)
    if ell == 1:
        return QiClassW("HypOneLinear", theta.k)
    if ell == 2:
        return QiClassW("Mixed2")
    return QiClassW("Mixed3") if h >= 1 else QiClassW("Flat")


def qi_equivalent_C(s1: SurfaceAmalgamSpec, s2: SurfaceAmalgamSpec) -> bool:
    return qi_class_C(s1) == qi_class_C(s2)


def qi_equivalent_W(t1: ThetaGraphSpec, t2: ThetaGraphSpec) -> bool:
    return qi_class_W(t1).key() == qi_class_W(t2).key()


def qi_cross(spec: SurfaceAmalgamSpec, theta: ThetaGraphSpec) -> bool:
    return qi_class_C(spec).key() == qi_class_W(theta).key()


# -- coning the planar nerve ----------------------------------------------------------


@dataclass
class SphereCertificate:
    vertices: list[str]
    edges: list[tuple[str, str]]
    triangles: list[tuple[str, str, str]]
    euler_characteristic: int
    edges_in_two_triangles: bool
    links_are_cycles: bool
    flag: bool
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.euler_characteristic == 2 and self.edges_in_two_triangles and self.links_are_cycles and self.flag

    def to_json(self) -> dict:
        return {
            "V": len(self.vertices),
            "E": len(self.edges),
            "F": len(self.triangles),
            "euler_characteristic": self.euler_characteristic,
            "edges_in_two_triangles": self.edges_in_two_triangles,
            "links_are_cycles": self.links_are_cycles,
            "flag": self.flag,
            "ok": self.ok,
        }


def _edge(u: str, v: str) -> tuple[str, str]:
    return (u, v) if u < v else (v, u)


def _is_single_cycle(edges: list[tuple[str, str]]) -> bool:
    if len(edges) < 3:
        return False
    adj: dict[str, list[str]] = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    if any(len(nb) != 2 for nb in adj.values()):
        return False
    start = next(iter(adj))
    seen = {start}
    stack = [start]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(adj)


def cone_planar_nerve(theta: ThetaGraphSpec) -> SphereCertificate:
    """Cone off the complementary regions of the nested planar embedding of Theta."""
    arms = theta.arms
    k = len(arms)
    paths = []  # each arm as a vertex path from x to y
    for i, ni in enumerate(arms):
        paths.append(["x"] + [f"a{i}.{j}" for j in range(ni)] + ["y"])
    graph_edges = {_edge(p[j], p[j + 1]) for p in paths for j in range(len(p) - 1)}
    faces = [(i, i + 1) for i in range(k - 1)] + [(k - 1, 0)]
    triangles = set()
    spokes = set()
    cone_vertices = []
    for f, (i, j) in enumerate(faces):
        cycle = paths[i] + paths[j][-2:0:-1]
        c = f"c{f}"
        cone_vertices.append(c)
        for a in range(len(cycle)):
            u, v = cycle[a], cycle[(a + 1) % len(cycle)]
            triangles.add(tuple(sorted((c, u, v))))
            spokes.add(_edge(c, u))
    vertices = sorted({v for p in paths for v in p} | set(cone_vertices))
    edges = sorted(graph_edges | spokes)
    tris = sorted(triangles)

    edge_count: Counter = Counter()
    for t in tris:
        for u, v in combinations(t, 2):
            edge_count[_edge(u, v)] += 1
    in_two = set(edge_count) == set(edges) and all(edge_count[e] == 2 for e in edges)

    links: dict[str, list[tuple[str, str]]] = {v: [] for v in vertices}
    for t in tris:
        for v in t:
            u, w = [x for x in t if x != v]
            links[v].append(_edge(u, w))
    links_ok = all(_is_single_cycle(links[v]) for v in vertices)

    adj = {v: set() for v in vertices}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    flag = True
    for u in vertices:
        for v, w in combinations(sorted(adj[u]), 2):
            if u < v and w in adj[v] and tuple(sorted((u, v, w))) not in triangles:
                flag = False
    chi = len(vertices) - len(edges) + len(tris)
    return SphereCertificate(vertices, edges, tris, chi, in_two, links_ok, flag)
