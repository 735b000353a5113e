"""Graph-of-spaces 2-complexes: surfaces (cut along their gluing curves) and
tubes glued to branch circles."""
from __future__ import annotations

import json
import random
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .core_model import SurfaceAmalgamSpec

Att = tuple[str, int]  # (circle id, degree)


class ComplexError(ValueError):
    pass


class NotAProductFragment(ValueError):
    pass


@dataclass(frozen=True)
class Surface:
    euler: int
    att: tuple[Att, ...]
    kind = "surface"

    def __post_init__(self):
        object.__setattr__(self, "att", tuple((str(c), int(d)) for c, d in self.att))

    @property
    def genus(self) -> int:
        return (2 - self.euler - len(self.att)) // 2

    def circles(self) -> list[str]:
        return [c for c, _ in self.att]

    def signature(self, cmap: dict[str, str]) -> tuple:
        return ("S", self.euler, tuple(sorted((cmap[c], d) for c, d in self.att)))

    def to_json(self) -> dict:
        return {"kind": "surface", "euler": self.euler, "att": [[c, d] for c, d in self.att]}


@dataclass(frozen=True)
class Tube:
    ends: tuple[Att, Att]
    kind = "tube"

    def __post_init__(self):
        e = tuple((str(c), int(d)) for c, d in self.ends)
        if len(e) != 2:
            raise ComplexError("a tube has exactly two ends")
        object.__setattr__(self, "ends", e)

    @property
    def att(self) -> tuple[Att, ...]:
        return self.ends

    @property
    def euler(self) -> int:
        return 0

    def circles(self) -> list[str]:
        return [c for c, _ in self.ends]

    def signature(self, cmap: dict[str, str]) -> tuple:
        return ("T", 0, tuple(sorted((cmap[c], d) for c, d in self.ends)))

    def to_json(self) -> dict:
        return {"kind": "tube", "ends": [[c, d] for c, d in self.ends]}


Piece = Union[Surface, Tube]


@dataclass(frozen=True)
class Complex2:
    circles: tuple[str, ...]
    pieces: tuple[Piece, ...]
    labels: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "circles", tuple(self.circles))
        object.__setattr__(self, "pieces", tuple(self.pieces))
        object.__setattr__(self, "labels", tuple(sorted(dict(self.labels).items())))
        problems = self.problems()
        if problems:
            raise ComplexError("; ".join(problems))

    def problems(self) -> list[str]:
        out = []
        known = set(self.circles)
        if len(known) != len(self.circles):
            out.append("duplicate circle ids")
        used = set()
        for i, p in enumerate(self.pieces):
            for c, d in p.att:
                if c not in known:
                    out.append(f"piece {i} attaches to unknown circle {c!r}")
                if d < 1:
                    out.append(f"piece {i} has attachment degree {d} < 1")
                used.add(c)
            if isinstance(p, Surface):
                twice_genus = 2 - p.euler - len(p.att)
                if twice_genus < 0 or twice_genus % 2:
                    out.append(f"piece {i}: euler {p.euler} with {len(p.att)} boundaries has no genus")
        free = known - used
        if free:
            out.append(f"free circles {sorted(free)}")
        return out

    @property
    def label_map(self) -> dict[str, str]:
        return dict(self.labels)

    def surfaces(self) -> list[tuple[int, Surface]]:
        return [(i, p) for i, p in enumerate(self.pieces) if isinstance(p, Surface)]

    def tubes(self) -> list[tuple[int, Tube]]:
        return [(i, p) for i, p in enumerate(self.pieces) if isinstance(p, Tube)]

    def to_json(self) -> dict:
        out: dict = {"circles": list(self.circles), "pieces": [p.to_json() for p in self.pieces]}
        if self.labels:
            out["labels"] = dict(self.labels)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Complex2":
        pieces: list[Piece] = []
        for p in obj["pieces"]:
            if p["kind"] == "surface":
                pieces.append(Surface(int(p["euler"]), tuple(tuple(a) for a in p["att"])))
            elif p["kind"] == "tube":
                pieces.append(Tube(tuple(tuple(a) for a in p["ends"])))
            else:
                raise ComplexError(f"unknown piece kind {p['kind']!r}")
        return cls(tuple(obj["circles"]), tuple(pieces), tuple(obj.get("labels", {}).items()))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def euler_char(c: Complex2) -> int:
    # circles and tubes contribute zero
    return sum(p.euler for p in c.pieces if isinstance(p, Surface))


def build_amalgam_complex(spec: SurfaceAmalgamSpec) -> Complex2:
    pieces: list[Piece] = []
    for genus, curve, circ in ((spec.g, spec.curve_a, "A"), (spec.h, spec.curve_b, "B")):
        if curve.is_separating:
            for gi in curve.split:
                pieces.append(Surface(1 - 2 * gi, ((circ, 1),)))
        else:
            pieces.append(Surface(2 - 2 * genus, ((circ, 1), (circ, 1))))
    pieces.append(Tube((("A", spec.m), ("B", spec.n))))
    return Complex2(("A", "B"), tuple(pieces))


def disjoint_union(c1: Complex2, c2: Complex2, prefix1: str = "0.", prefix2: str = "1.") -> Complex2:
    def ren(c: Complex2, pre: str) -> tuple[list[str], list[Piece], list[tuple[str, str]]]:
        return (
            [pre + x for x in c.circles],
            [rename_piece(p, {x: pre + x for x in c.circles}) for p in c.pieces],
            [(pre + k, v) for k, v in c.labels],
        )

    a, b = ren(c1, prefix1), ren(c2, prefix2)
    return Complex2(tuple(a[0] + b[0]), tuple(a[1] + b[1]), tuple(a[2] + b[2]))


def rename_piece(p: Piece, names: dict[str, str]) -> Piece:
    if isinstance(p, Surface):
        return Surface(p.euler, tuple((names.get(c, c), d) for c, d in p.att))
    return Tube(tuple((names.get(c, c), d) for c, d in p.ends))  # type: ignore[arg-type]


class _UnionFind:
    def __init__(self, items: Iterable[str]):
        self.parent = {x: x for x in items}

    def find(self, x: str) -> str:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: str, b: str) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


def is_connected(c: Complex2) -> bool:
    if not c.circles:
        return len(c.pieces) <= 1
    uf = _UnionFind(c.circles)
    for p in c.pieces:
        cs = p.circles()
        for x in cs[1:]:
            uf.union(cs[0], x)
    # a piece with no attachments would be its own component
    if any(not p.att for p in c.pieces):
        return False
    return len({uf.find(x) for x in c.circles}) == 1


# -- isomorphism --------------------------------------------------------------------


@dataclass(frozen=True)
class Isomorphism:
    circle_map: dict
    piece_map: tuple[int, ...]

    def to_json(self) -> dict:
        return {"circle_map": dict(sorted(self.circle_map.items())), "piece_map": list(self.piece_map)}


def _circle_profile(c: Complex2) -> dict[str, tuple]:
    prof: dict[str, list] = defaultdict(list)
    for p in c.pieces:
        for x, d in p.att:
            prof[x].append((p.kind, p.euler, d, len(p.att)))
    return {x: tuple(sorted(prof[x])) for x in c.circles}


def iso_check(c1: Complex2, c2: Complex2) -> Optional[Isomorphism]:
    """Find a bijection of circles and pieces preserving kind, euler and attachment degrees.

    Backtracks over circle bijections, matching circles by their incidence
    profile and pruning on pieces whose circles are all mapped.  Labels are ignored.
    """
    if len(c1.circles) != len(c2.circles) or len(c1.pieces) != len(c2.pieces):
        return None
    ident2 = {x: x for x in c2.circles}
    if Counter(p.kind for p in c1.pieces) != Counter(p.kind for p in c2.pieces):
        return None
    prof1, prof2 = _circle_profile(c1), _circle_profile(c2)
    if Counter(prof1.values()) != Counter(prof2.values()):
        return None

    # order circles of c1 so each one shares pieces with earlier ones where possible
    order: list[str] = []
    neighbours: dict[str, set[str]] = defaultdict(set)
    for p in c1.pieces:
        for x in p.circles():
            neighbours[x].update(p.circles())
    remaining = sorted(c1.circles, key=lambda x: (-len(prof1[x]), x))
    while remaining:
        placed = set(order)
        pick = next((x for x in remaining if neighbours[x] & placed), remaining[0])
        order.append(pick)
        remaining.remove(pick)

    pieces_of1: dict[str, list[int]] = defaultdict(list)
    for i, p in enumerate(c1.pieces):
        for x in set(p.circles()):
            pieces_of1[x].append(i)
    by_profile2: dict[tuple, list[str]] = defaultdict(list)
    for x in c2.circles:
        by_profile2[prof2[x]].append(x)
    sig2_all = [p.signature(ident2) for p in c2.pieces]

    cmap: dict[str, str] = {}
    used: set[str] = set()

    def consistent(x: str) -> bool:
        # every c1 piece touching x whose circles are all mapped must have a partner
        local1 = Counter()
        for i in pieces_of1[x]:
            p = c1.pieces[i]
            if all(y in cmap for y in p.circles()):
                local1[p.signature(cmap)] += 1
        img = set(cmap.values())
        local2 = Counter()
        for sig in sig2_all:
            circles = [y for y, _ in sig[2]]
            if cmap[x] in circles and all(y in img for y in circles):
                local2[sig] += 1
        return local1 == local2

    def search(idx: int) -> bool:
        if idx == len(order):
            return True
        x = order[idx]
        for y in by_profile2[prof1[x]]:
            if y in used:
                continue
            cmap[x] = y
            used.add(y)
            if consistent(x) and search(idx + 1):
                return True
            del cmap[x]
            used.discard(y)
        return False

    if not search(0):
        return None
    pool: dict[tuple, list[int]] = defaultdict(list)
    for j, sig in enumerate(sig2_all):
        pool[sig].append(j)
    pmap = []
    for p in c1.pieces:
        bucket = pool[p.signature(cmap)]
        if not bucket:
            return None
        pmap.append(bucket.pop(0))
    return Isomorphism(dict(cmap), tuple(pmap))


# -- collapsing product fragments -----------------------------------------------------


@dataclass(frozen=True)
class CollapseRecord:
    merged: tuple[tuple[str, tuple[str, ...]], ...]  # new circle -> merged circles
    tree_tubes: tuple[int, ...]  # indices (in the input) of deleted spanning-tree tubes
    tori: tuple[int, ...]  # indices (in the input) of tubes turned into tori

    def to_json(self) -> dict:
        return {
            "merged": {k: list(v) for k, v in self.merged},
            "tree_tubes": list(self.tree_tubes),
            "tori": list(self.tori),
        }


def _check_fragment(c: Complex2, fragment: Sequence[int]) -> tuple[list[str], list[str]]:
    tubes = []
    for i in fragment:
        p = c.pieces[i]
        if not isinstance(p, Tube):
            raise NotAProductFragment(f"piece {i} is not a tube")
        if any(d != 1 for _, d in p.ends):
            raise NotAProductFragment(f"tube {i} has non-unit degrees")
        tubes.append(p)
    lefts = sorted({t.ends[0][0] for t in tubes})
    rights = sorted({t.ends[1][0] for t in tubes})
    if set(lefts) & set(rights):
        raise NotAProductFragment("fragment tube graph is not bipartite")
    pairs = Counter((t.ends[0][0], t.ends[1][0]) for t in tubes)
    if len(tubes) != len(lefts) * len(rights) or any(v != 1 for v in pairs.values()):
        raise NotAProductFragment("fragment tube graph is not complete bipartite")
    return lefts, rights


def collapse_products(
    c: Complex2,
    fragments: Sequence[Sequence[int]],
    names: Optional[Sequence[str]] = None,
    seed: Optional[int] = None,
) -> tuple[Complex2, CollapseRecord]:
    """Collapse each K_{m,n} x S^1 fragment (given by its tube indices) to one circle with N tori.

    The spanning tree is taken in lowest-index order; a seed shuffles the tube
    order instead, to exercise other tree choices.
    """
    names = list(names) if names is not None else [f"C{i}" for i in range(len(fragments))]
    rng = random.Random(seed) if seed is not None else None
    rename: dict[str, str] = {}
    drop: set[int] = set()
    tori: list[int] = []
    merged = []
    for frag, name in zip(fragments, names):
        lefts, rights = _check_fragment(c, frag)
        circles = lefts + rights
        order = sorted(frag)
        if rng is not None:
            rng.shuffle(order)
        uf = _UnionFind(circles)
        for i in order:
            t = c.pieces[i]
            if uf.union(t.ends[0][0], t.ends[1][0]):  # type: ignore[union-attr]
                drop.add(i)
            else:
                tori.append(i)
        for x in circles:
            rename[x] = name
        merged.append((name, tuple(circles)))
    new_pieces: list[Piece] = []
    for i, p in enumerate(c.pieces):
        if i in drop:
            continue
        if i in tori:
            new_pieces.append(Tube(((rename[p.ends[0][0]], 1), (rename[p.ends[1][0]], 1))))  # type: ignore[union-attr]
        else:
            new_pieces.append(rename_piece(p, rename))
    circles = []
    for x in c.circles:
        y = rename.get(x, x)
        if y not in circles:
            circles.append(y)
    labels = {}
    old = c.label_map
    for name, members in merged:
        tags = sorted({old[x] for x in members if x in old})
        if tags:
            labels[name] = "/".join(tags)
    for x, tag in old.items():
        if x not in rename:
            labels[x] = tag
    record = CollapseRecord(tuple(merged), tuple(sorted(drop)), tuple(sorted(tori)))
    return Complex2(tuple(circles), tuple(new_pieces), tuple(labels.items())), record
