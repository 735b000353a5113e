"""Covering maps between 2-complexes, their verification, and the two towers
relating a surface amalgam to its associated right-angled Coxeter group."""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field, replace
from itertools import permutations, product
from typing import Optional, Sequence

from .commensurability import associated_racg_vector
from .complexes import (
    CollapseRecord,
    Complex2,
    Isomorphism,
    Piece,
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
from .core_model import CurveSpec, SurfaceAmalgamSpec


class GenusZero(ValueError):
    pass


# -- cover maps ---------------------------------------------------------------------


@dataclass(frozen=True)
class PieceLift:
    """How one total piece sits over the base.

    ``lifts[k] = (j, delta)``: total attachment k covers base attachment j of
    the base piece, and the boundary circle maps with degree delta.
    """

    base: int
    degree: int
    lifts: tuple[tuple[int, int], ...]

    def to_json(self) -> dict:
        return {"base": self.base, "degree": self.degree, "lifts": [list(x) for x in self.lifts]}


@dataclass(frozen=True)
class CoverMap:
    total: Complex2
    base: Complex2
    degree: int
    circle_map: tuple[tuple[str, str, int], ...]  # (total circle, base circle, e)
    piece_map: tuple[PieceLift, ...]
    connected: bool = True

    @property
    def circle_dict(self) -> dict[str, tuple[str, int]]:
        return {c: (b, e) for c, b, e in self.circle_map}

    def to_json(self) -> dict:
        return {
            "total": self.total.to_json(),
            "base": self.base.to_json(),
            "degree": self.degree,
            "circle_map": {c: [b, e] for c, b, e in self.circle_map},
            "piece_map": [p.to_json() for p in self.piece_map],
            "connected": self.connected,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CoverMap":
        return cls(
            Complex2.from_json(obj["total"]),
            Complex2.from_json(obj["base"]),
            int(obj["degree"]),
            tuple((c, str(be[0]), int(be[1])) for c, be in obj["circle_map"].items()),
            tuple(
                PieceLift(int(p["base"]), int(p["degree"]), tuple((int(j), int(dl)) for j, dl in p["lifts"]))
                for p in obj["piece_map"]
            ),
            bool(obj.get("connected", True)),
        )


@dataclass(frozen=True)
class Violation:
    condition: str  # "i" .. "vi"
    location: str
    message: str

    def to_json(self) -> dict:
        return {"condition": self.condition, "location": self.location, "message": self.message}


@dataclass
class CoverReport:
    degree: int
    violations: list[Violation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def first(self) -> Optional[Violation]:
        return self.violations[0] if self.violations else None

    def to_json(self) -> dict:
        out: dict = {"result": "PASS" if self.passed else "FAIL", "degree": self.degree}
        if self.violations:
            out["first_violation"] = self.violations[0].to_json()
            out["violations"] = [v.to_json() for v in self.violations]
        return out


def neumann_cover_exists(euler_S: int, base_boundary_count: int, d: int, partitions: Sequence[Sequence[int]]) -> bool:
    """Parity criterion for a connected degree-d cover with prescribed boundary degrees."""
    genus2 = 2 - euler_S - base_boundary_count
    if genus2 < 2 or genus2 % 2:
        raise GenusZero(f"euler {euler_S} with {base_boundary_count} boundaries does not have positive genus")
    if len(partitions) != base_boundary_count:
        raise ValueError("one partition per base boundary circle is required")
    if d < 1 or any(sum(p) != d or any(x < 1 for x in p) for p in partitions):
        raise ValueError(f"partitions {partitions} do not all partition {d}")
    count = sum(len(p) for p in partitions)
    return (count - d * euler_S) % 2 == 0


def verify_cover(cm: CoverMap) -> CoverReport:
    """Check every covering condition; violations are listed local checks first.

    Order: (ii) piece sheets, (iii) circle sheets, (v) surface data,
    (iv) attachment compatibility, (i) Euler characteristic, (vi) connectivity.
    """
    rep = CoverReport(cm.degree)

    def add(cond: str, loc: str, msg: str) -> None:
        rep.violations.append(Violation(cond, loc, msg))

    total, base, D = cm.total, cm.base, cm.degree
    cmap = cm.circle_dict

    # (ii)
    if len(cm.piece_map) != len(total.pieces):
        add("ii", "piece_map", f"{len(cm.piece_map)} entries for {len(total.pieces)} pieces")
    sheets = defaultdict(int)
    for k, pl in enumerate(cm.piece_map[: len(total.pieces)]):
        if not 0 <= pl.base < len(base.pieces):
            add("ii", f"piece {k}", f"base piece {pl.base} does not exist")
            continue
        if total.pieces[k].kind != base.pieces[pl.base].kind:
            add("ii", f"piece {k}", f"{total.pieces[k].kind} over a {base.pieces[pl.base].kind}")
        if pl.degree < 1:
            add("ii", f"piece {k}", f"degree {pl.degree} < 1")
        sheets[pl.base] += pl.degree
    for q in range(len(base.pieces)):
        if sheets[q] != D:
            add("ii", f"base piece {q}", f"piece degrees sum to {sheets[q]}, expected {D}")

    # (iii)
    csheets = defaultdict(int)
    for c in total.circles:
        if c not in cmap:
            add("iii", f"circle {c}", "not mapped")
            continue
        b, e = cmap[c]
        if b not in base.circles or e < 1:
            add("iii", f"circle {c}", f"bad image ({b}, {e})")
            continue
        csheets[b] += e
    for b in base.circles:
        if csheets[b] != D:
            add("iii", f"base circle {b}", f"circle degrees sum to {csheets[b]}, expected {D}")

    valid = [
        (k, pl)
        for k, pl in enumerate(cm.piece_map[: len(total.pieces)])
        if 0 <= pl.base < len(base.pieces) and total.pieces[k].kind == base.pieces[pl.base].kind
    ]

    # (v)
    for k, pl in valid:
        p, q = total.pieces[k], base.pieces[pl.base]
        d = pl.degree
        if len(pl.lifts) != len(p.att) or any(not 0 <= j < len(q.att) for j, _ in pl.lifts):
            add("v", f"piece {k}", "attachment lifts do not match the attachments")
            continue
        over = defaultdict(list)
        for j, delta in pl.lifts:
            over[j].append(delta)
        if isinstance(q, Surface):
            if p.euler != d * q.euler:
                add("v", f"piece {k}", f"euler {p.euler} != {d} * {q.euler}")
            parts = [over.get(j, []) for j in range(len(q.att))]
            if any(sum(pt) != d or any(x < 1 for x in pt) for pt in parts):
                add("v", f"piece {k}", f"boundary degrees {parts} do not partition {d}")
            elif q.genus >= 1 and not neumann_cover_exists(q.euler, len(q.att), d, parts):
                add("v", f"piece {k}", f"boundary count {sum(map(len, parts))} has the wrong parity")
        else:
            if sorted(over) != [0, 1] or any(v != [d] for v in over.values()):
                add("v", f"piece {k}", f"tube ends {dict(over)} must each cover with degree {d}")

    # (iv)
    for k, pl in valid:
        p, q = total.pieces[k], base.pieces[pl.base]
        if len(pl.lifts) != len(p.att):
            continue
        for (c1, a1), (j, delta) in zip(p.att, pl.lifts):
            if not 0 <= j < len(q.att) or c1 not in cmap:
                continue
            c0, a0 = q.att[j]
            b, e = cmap[c1]
            if b != c0:
                add("iv", f"piece {k} attachment {c1}", f"circle lies over {b}, attachment lies over {c0}")
            elif a1 * e != a0 * delta:
                add("iv", f"piece {k} attachment {c1}", f"{a1}*{e} != {a0}*{delta}")

    # (i)
    if euler_char(total) != D * euler_char(base):
        add("i", "complex", f"chi(total) = {euler_char(total)} != {D} * {euler_char(base)}")

    # (vi)
    if cm.connected and not is_connected(total):
        add("vi", "complex", "total space is claimed connected but is not")
    return rep


# -- building covers ------------------------------------------------------------------


class _Builder:
    def __init__(self, base: Complex2):
        self.base = base
        self.circles: list[str] = []
        self.cmap: list[tuple[str, str, int]] = []
        self.labels: dict[str, str] = {}
        self.pieces: list[Piece] = []
        self.lifts: list[PieceLift] = []

    def circle(self, name: str, over: str, e: int, label: Optional[str] = None) -> str:
        self.circles.append(name)
        self.cmap.append((name, over, e))
        if label:
            self.labels[name] = label
        return name

    def piece(self, piece: Piece, base: int, d: int, lifts: Sequence[tuple[int, int]]) -> None:
        self.pieces.append(piece)
        self.lifts.append(PieceLift(base, d, tuple(lifts)))

    def lift_surface(self, base_idx: int, d: int, choose: dict[str, str], euler: Optional[int] = None) -> None:
        """Lift a base surface with one boundary over each base boundary, each of degree d."""
        q = self.base.pieces[base_idx]
        att = tuple((choose[c], 1) for c, _ in q.att)
        self.piece(Surface(d * q.euler if euler is None else euler, att), base_idx, d, [(j, d) for j in range(len(q.att))])

    def lift_tube(self, base_idx: int, d: int, c0: str, c1: str) -> None:
        q = self.base.pieces[base_idx]
        (_, a0), (_, a1) = q.ends  # type: ignore[union-attr]
        e0 = dict((c, e) for c, _, e in self.cmap)[c0]
        e1 = dict((c, e) for c, _, e in self.cmap)[c1]
        # a' e = a d on each end
        self.piece(Tube(((c0, a0 * d // e0), (c1, a1 * d // e1))), base_idx, d, [(0, d), (1, d)])

    def cover(self, D: int, connected: bool = True) -> CoverMap:
        total = Complex2(tuple(self.circles), tuple(self.pieces), tuple(self.labels.items()))
        return CoverMap(total, self.base, D, tuple(self.cmap), tuple(self.lifts), connected)


def bounding_pair_double_cover(g: int, curve: CurveSpec, circle: str = "A") -> tuple[list[Surface], CoverMap]:
    """Double cover of S_g (cut along the curve) in which the curve lifts to a bounding pair."""
    base_pieces: list[Piece]
    if curve.is_separating:
        base_pieces = [Surface(1 - 2 * gi, ((circle, 1),)) for gi in curve.split]
    else:
        base_pieces = [Surface(2 - 2 * g, ((circle, 1), (circle, 1)))]
    base = Complex2((circle,), tuple(base_pieces))
    b = _Builder(base)
    c1, c2 = b.circle(circle + "1", circle, 1), b.circle(circle + "2", circle, 1)
    if curve.is_separating:
        order = sorted(range(len(base_pieces)), key=lambda i: (base_pieces[i].euler, i))
        for i in order:
            b.piece(Surface(2 * base_pieces[i].euler, ((c1, 1), (c2, 1))), i, 2, [(0, 1), (0, 1)])
    else:
        v = base_pieces[0].euler
        b.piece(Surface(v, ((c1, 1), (c2, 1))), 0, 1, [(0, 1), (1, 1)])
        b.piece(Surface(v, ((c2, 1), (c1, 1))), 0, 1, [(0, 1), (1, 1)])
    cm = b.cover(2)
    return [p for p in cm.total.pieces if isinstance(p, Surface)], cm


def kmn_cover_fragment(m: int, n: int, prefix: str = "") -> tuple[Complex2, CoverMap]:
    """K_{m,n} x S^1 over the (m, n) tube: n circles of degree m over A, m of degree n over B."""
    base = Complex2(("A", "B"), (Tube((("A", m), ("B", n))),))
    b = _Builder(base)
    P = [b.circle(f"{prefix}P{j}", "A", m) for j in range(1, n + 1)]
    Q = [b.circle(f"{prefix}Q{i}", "B", n) for i in range(1, m + 1)]
    for q in Q:
        for p in P:
            b.lift_tube(0, 1, p, q)
    cm = b.cover(m * n)
    return cm.total, cm


# -- towers ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Link:
    kind: str  # cover | homotopy
    degree: int
    cover: Optional[CoverMap] = None
    record: Optional[CollapseRecord] = None


@dataclass
class Tower:
    names: list[str]
    stages: list[Complex2]
    links: list[Link]  # links[i] joins stages[i] (below) and stages[i+1] (above)
    meta: dict = field(default_factory=dict)

    def euler_chain(self) -> list[int]:
        return [euler_char(s) for s in self.stages]

    def to_json(self) -> dict:
        return {
            "stages": [{"name": n, "complex": s.to_json(), "euler": euler_char(s)} for n, s in zip(self.names, self.stages)],
            "links": [
                {
                    "from": self.names[i + 1],
                    "to": self.names[i],
                    "kind": ln.kind,
                    "degree": ln.degree,
                    **({"collapse": ln.record.to_json()} if ln.record else {}),
                }
                for i, ln in enumerate(self.links)
            ],
            "meta": self.meta,
        }


def _side_indices(c: Complex2, circle: str) -> list[int]:
    return [i for i, p in c.surfaces() if p.att[0][0] == circle]


def _x1(X: Complex2, spec: SurfaceAmalgamSpec) -> CoverMap:
    b = _Builder(X)
    names = {"A": ("A1", "A2", "red", "blue"), "B": ("B1", "B2", "green", "black")}
    for circ in ("A", "B"):
        n1, n2, l1, l2 = names[circ]
        b.circle(n1, circ, 1, l1)
        b.circle(n2, circ, 1, l2)
    for circ, genus, curve in (("A", spec.g, spec.curve_a), ("B", spec.h, spec.curve_b)):
        n1, n2 = names[circ][:2]
        local = _side_indices(X, circ)
        _, frag = bounding_pair_double_cover(genus, curve, circ)
        ren = {circ + "1": n1, circ + "2": n2}
        for p, pl in zip(frag.total.pieces, frag.piece_map):
            b.piece(rename_piece(p, ren), local[pl.base], pl.degree, pl.lifts)
    t = len(X.pieces) - 1
    b.lift_tube(t, 1, "A1", "B1")
    b.lift_tube(t, 1, "A2", "B2")
    return b.cover(2)


def _x2(X1: Complex2, m: int, n: int) -> tuple[CoverMap, list[list[int]]]:
    b = _Builder(X1)
    lab = X1.label_map
    up: dict[str, list[str]] = {}
    for frag, a, bb in (("K1", "A1", "B1"), ("K2", "A2", "B2")):
        up[a] = [b.circle(f"{frag}.P{j}", a, m, lab[a]) for j in range(1, n + 1)]
        up[bb] = [b.circle(f"{frag}.Q{i}", bb, n, lab[bb]) for i in range(1, m + 1)]
    for i, s in X1.surfaces():
        side = s.att[0][0][0]  # A or B
        copies, d = (n, m) if side == "A" else (m, n)
        for j in range(copies):
            b.lift_surface(i, d, {c: up[c][j] for c, _ in s.att})
    fragments = []
    for ti, t in X1.tubes():
        a, bb = t.ends[0][0], t.ends[1][0]
        start = len(b.pieces)
        for q in up[bb]:
            for p in up[a]:
                b.lift_tube(ti, 1, p, q)
        fragments.append(list(range(start, len(b.pieces))))
    return b.cover(m * n), fragments


def _max_euler_index(c: Complex2) -> int:
    surfs = c.surfaces()
    best = max(p.euler for _, p in surfs)
    return next(i for i, p in surfs if p.euler == best)


def _x4(X3: Complex2, N: int) -> CoverMap:
    b = _Builder(X3)
    b.circle("E1", "C", 1)
    b.circle("E2", "C", 1)
    b.circle("E3", "C'", 1)
    b.circle("E4", "C'", 1)
    cross = _max_euler_index(X3) if N == 0 else None
    for i, _ in X3.surfaces():  # T
        b.lift_surface(i, 1, {"C": "E1", "C'": "E3" if i == cross else "E4"})
    for i, _ in X3.surfaces():  # T'
        b.lift_surface(i, 1, {"C": "E2", "C'": "E4" if i == cross else "E3"})
    for circ, (e, f) in (("C", ("E1", "E2")), ("C'", ("E3", "E4"))):
        for i, t in X3.tubes():
            if t.ends[0][0] == circ:
                b.lift_tube(i, 1, e, f)
                b.lift_tube(i, 1, f, e)
    return b.cover(2)


def _x5(X4: Complex2) -> CoverMap:
    b = _Builder(X4)
    for c in X4.circles:
        b.circle(c + "'", c, 16)
    for i, p in enumerate(X4.pieces):
        if isinstance(p, Surface):
            b.lift_surface(i, 16, {c: c + "'" for c, _ in p.att})
        else:
            b.lift_tube(i, 16, p.ends[0][0] + "'", p.ends[1][0] + "'")
    return b.cover(16)


def build_tower_X(spec: SurfaceAmalgamSpec) -> Tower:
    m, n = spec.m, spec.n
    N = m * n - m - n + 1
    X = build_amalgam_complex(spec)
    l1 = _x1(X, spec)
    X1 = l1.total
    l2, fragments = _x2(X1, m, n)
    X2 = l2.total
    X3, record = collapse_products(X2, fragments, ["C", "C'"])
    l4 = _x4(X3, N)
    X4 = l4.total
    l5 = _x5(X4)
    X5 = l5.total
    return Tower(
        ["X", "X1", "X2", "X3", "X4", "X5"],
        [X, X1, X2, X3, X4, X5],
        [
            Link("cover", 2, l1),
            Link("cover", m * n, l2),
            Link("homotopy", 1, record=record),
            Link("cover", 2, l4),
            Link("cover", 16, l5),
        ],
        {"N": N},
    )


def build_tower_Z(spec: SurfaceAmalgamSpec) -> Tower:
    data = associated_racg_vector(spec)
    pieces: list[Piece] = []
    for q in data.w.quarters:
        if q == 0:
            pieces.append(Tube((("C1", 1), ("C2", 1))))
        else:
            pieces.append(Surface(16 * q // 4, (("C1", 1), ("C2", 1))))
    Z1 = Complex2(("C1", "C2"), tuple(pieces))
    b = _Builder(Z1)
    b.circle("D1", "C1", 1)
    b.circle("D2", "C2", 1)
    b.circle("D3", "C1", 1)
    b.circle("D4", "C2", 1)
    cross = _max_euler_index(Z1) if data.N == 0 else None
    for i, _ in Z1.tubes():  # A then A'
        b.lift_tube(i, 1, "D1", "D2")
    for i, _ in Z1.tubes():
        b.lift_tube(i, 1, "D3", "D4")
    for i, _ in Z1.surfaces():  # B
        b.lift_surface(i, 1, {"C1": "D1", "C2": "D2" if i == cross else "D4"})
    for i, _ in Z1.surfaces():  # B'
        b.lift_surface(i, 1, {"C1": "D3", "C2": "D4" if i == cross else "D2"})
    l = b.cover(2)
    return Tower(
        ["Z1", "Z2"],
        [Z1, l.total],
        [Link("cover", 2, l)],
        {"orbicomplex_degree": 16, "w": data.w.to_json(), "N": data.N},
    )


@dataclass
class TowerCheck:
    link_reports: list[tuple[str, CoverReport]]

    @property
    def passed(self) -> bool:
        return all(r.passed for _, r in self.link_reports)


def verify_tower(tower: Tower) -> TowerCheck:
    out = []
    for i, ln in enumerate(tower.links):
        name = f"{tower.names[i + 1]}->{tower.names[i]}"
        if ln.kind == "cover":
            out.append((name, verify_cover(ln.cover)))  # type: ignore[arg-type]
        else:
            rep = CoverReport(1)
            lo, hi = tower.stages[i], tower.stages[i + 1]
            if euler_char(lo) != euler_char(hi):
                rep.violations.append(Violation("i", "homotopy", "collapse changed the Euler characteristic"))
            if is_connected(lo) != is_connected(hi):
                rep.violations.append(Violation("vi", "homotopy", "collapse changed connectivity"))
            out.append((name, rep))
    return TowerCheck(out)


def check_X5_iso_Z2(spec: SurfaceAmalgamSpec) -> Optional[Isomorphism]:
    return iso_check(build_tower_X(spec).stages[-1], build_tower_Z(spec).stages[-1])


# -- fault injection ------------------------------------------------------------------

FAULTS = {
    "wrong_euler": "v",
    "wrong_degree": "iii",
    "dropped_tube": "ii",
    "retargeted_attachment": "iv",
    "broken_partition": "v",
    "disconnection": "vi",
}


def inject_fault(cm: CoverMap, kind: str) -> CoverMap:
    total = cm.total
    pieces = list(total.pieces)
    lifts = list(cm.piece_map)
    si, s = total.surfaces()[0]
    if kind == "wrong_euler":
        pieces[si] = Surface(s.euler - 2, s.att)
    elif kind == "wrong_degree":
        c, b, e = cm.circle_map[0]
        return replace(cm, circle_map=((c, b, e + 1),) + cm.circle_map[1:])
    elif kind == "dropped_tube":
        ti = total.tubes()[0][0]
        del pieces[ti]
        del lifts[ti]
    elif kind == "retargeted_attachment":
        cmap = cm.circle_dict
        c0 = s.att[0][0]
        other = next(c for c in total.circles if cmap[c][0] != cmap[c0][0])
        pieces[si] = Surface(s.euler, ((other, s.att[0][1]),) + s.att[1:])
    elif kind == "broken_partition":
        pl = lifts[si]
        j, delta = pl.lifts[0]
        lifts[si] = PieceLift(pl.base, pl.degree, ((j, delta + 1),) + pl.lifts[1:])
    elif kind == "disconnection":
        doubled = disjoint_union(total, total)
        cmap2 = tuple((p + c, b, e) for p in ("0.", "1.") for c, b, e in cm.circle_map)
        return CoverMap(doubled, cm.base, 2 * cm.degree, cmap2, cm.piece_map + cm.piece_map, True)
    else:
        raise ValueError(f"unknown fault {kind!r}")
    new_total = Complex2(total.circles, tuple(pieces), total.labels)
    return replace(cm, total=new_total, piece_map=tuple(lifts))


# -- brute-force oracle for the parity criterion --------------------------------------


def _compose(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(p[q[i]] for i in range(len(q)))


def _inv(p: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def _cycle_type(p: tuple[int, ...]) -> tuple[int, ...]:
    seen, out = set(), []
    for i in range(len(p)):
        if i in seen:
            continue
        j, n = i, 0
        while j not in seen:
            seen.add(j)
            j = p[j]
            n += 1
        out.append(n)
    return tuple(sorted(out, reverse=True))


def _transitive(gens: Sequence[tuple[int, ...]], d: int) -> bool:
    seen, stack = {0}, [0]
    while stack:
        x = stack.pop()
        for g in gens:
            if g[x] not in seen:
                seen.add(g[x])
                stack.append(g[x])
    return len(seen) == d


def realizable_boundary_types(genus: int, boundaries: int, d: int) -> set[tuple[tuple[int, ...], ...]]:
    """Boundary cycle types over all transitive actions of the surface group on d points.

    The group is free on a_i, b_i (i <= genus) and c_1..c_{b-1}; the last
    boundary word is c_b = (prod [a_i, b_i] * c_1 ... c_{b-1})^{-1}.
    """
    sym = list(permutations(range(d)))
    ident = tuple(range(d))
    rank = 2 * genus + boundaries - 1
    found = set()
    for gens in product(sym, repeat=rank):
        if not _transitive(gens, d):
            continue
        word = ident
        for i in range(genus):
            a, b = gens[2 * i], gens[2 * i + 1]
            word = _compose(word, _compose(_compose(a, b), _compose(_inv(a), _inv(b))))
        cs = list(gens[2 * genus:])
        for c in cs:
            word = _compose(word, c)
        cs.append(_inv(word))
        found.add(tuple(_cycle_type(c) for c in cs))
    return found


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True)
