"""Input specifications for surface amalgams and generalized theta-graphs.

Two families are modelled:

* ``SurfaceAmalgamSpec`` -- pi1(S_g) *_{a^m = b^n} pi1(S_h), with the chosen
  curves recorded only by their topological type.
* ``ThetaGraphSpec`` -- the right-angled Coxeter group whose nerve is the
  generalized theta-graph Theta(n_1, ..., n_k).

Everything here is an immutable value.  ``validate_spec`` normalizes and
certifies a spec, or raises ``SpecError`` carrying every violation found.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Any, Iterable, Sequence, Union


class SpecError(ValueError):
    """Raised when a spec violates one or more invariants.

    ``violations`` is a list of ``(code, message)`` pairs; codes are
    ``GenusTooSmall``, ``BadSplit``, ``ArmCount``, ``NonPositiveArm`` and
    ``MalformedSpec``.
    """

    def __init__(self, violations: Sequence[tuple[str, str]]):
        self.violations = list(violations)
        super().__init__("; ".join(f"{code}: {msg}" for code, msg in self.violations))

    @property
    def codes(self) -> list[str]:
        return [code for code, _ in self.violations]


NONSEPARATING = "nonseparating"
SEPARATING = "separating"


@dataclass(frozen=True)
class CurveSpec:
    """Topological type of an essential simple closed curve.

    ``split`` is ``(g1, g2)`` for a separating curve and ``None`` otherwise.
    """

    kind: str = NONSEPARATING
    split: tuple[int, int] | None = None

    @classmethod
    def nonseparating(cls) -> "CurveSpec":
        return cls(NONSEPARATING, None)

    @classmethod
    def separating(cls, g1: int, g2: int) -> "CurveSpec":
        return cls(SEPARATING, (int(g1), int(g2)))

    @property
    def is_separating(self) -> bool:
        return self.kind == SEPARATING

    @property
    def homologically_trivial(self) -> bool:
        # a separating curve bounds a subsurface, so it lies in the commutator subgroup
        return self.is_separating

    def violations(self, genus: int, side: str) -> list[tuple[str, str]]:
        if self.kind == NONSEPARATING:
            if self.split is not None:
                return [("MalformedSpec", f"{side}: nonseparating curve carries a split")]
            return []
        if self.kind != SEPARATING:
            return [("MalformedSpec", f"{side}: unknown curve kind {self.kind!r}")]
        if self.split is None or len(self.split) != 2:
            return [("MalformedSpec", f"{side}: separating curve needs a split (g1, g2)")]
        g1, g2 = self.split
        out = []
        if g1 < 1 or g2 < 1:
            out.append(("BadSplit", f"{side}: split {self.split} has a side of genus < 1"))
        if g1 + g2 != genus:
            out.append(("BadSplit", f"{side}: split {self.split} does not sum to genus {genus}"))
        return out

    def to_json(self) -> dict[str, Any]:
        if self.kind == SEPARATING:
            return {"kind": SEPARATING, "split": list(self.split or ())}
        return {"kind": self.kind}

    @classmethod
    def from_json(cls, obj: Any) -> "CurveSpec":
        if not isinstance(obj, dict) or "kind" not in obj:
            raise SpecError([("MalformedSpec", f"curve must be an object with 'kind': {obj!r}")])
        kind = str(obj["kind"]).lower()
        if kind == SEPARATING:
            split = obj.get("split")
            if not isinstance(split, (list, tuple)) or len(split) != 2:
                raise SpecError([("MalformedSpec", f"separating curve needs 'split': [g1, g2], got {split!r}")])
            return cls.separating(*_ints(split))
        if kind == NONSEPARATING:
            return cls.nonseparating()
        raise SpecError([("MalformedSpec", f"unknown curve kind {obj['kind']!r}")])


def _ints(values: Iterable[Any]) -> list[int]:
    out = []
    for v in values:
        if isinstance(v, bool) or not isinstance(v, int):
            raise SpecError([("MalformedSpec", f"expected an integer, got {v!r}")])
        out.append(v)
    return out


@dataclass(frozen=True)
class SurfaceAmalgamSpec:
    g: int
    h: int
    m: int
    n: int
    curve_a: CurveSpec = field(default_factory=CurveSpec.nonseparating)
    curve_b: CurveSpec = field(default_factory=CurveSpec.nonseparating)

    family = "C"

    @property
    def coprime(self) -> bool:
        # recorded only; no downstream semantics
        return gcd(self.m, self.n) == 1

    @property
    def N(self) -> int:
        """Number of petals of K_{m,n} / (maximal tree): mn - m - n + 1."""
        return (self.m - 1) * (self.n - 1)

    def euler_g(self) -> int:
        return 2 - 2 * self.g

    def euler_h(self) -> int:
        return 2 - 2 * self.h

    def swapped(self) -> "SurfaceAmalgamSpec":
        return SurfaceAmalgamSpec(self.h, self.g, self.n, self.m, self.curve_b, self.curve_a)

    def to_json(self) -> dict[str, Any]:
        return {
            "family": "C",
            "g": self.g,
            "h": self.h,
            "m": self.m,
            "n": self.n,
            "curve_a": self.curve_a.to_json(),
            "curve_b": self.curve_b.to_json(),
        }


@dataclass(frozen=True)
class ThetaGraphSpec:
    arms: tuple[int, ...]

    family = "W"

    def __post_init__(self):
        object.__setattr__(self, "arms", tuple(self.arms))

    @property
    def k(self) -> int:
        return len(self.arms)

    @property
    def linear_degree(self) -> int:
        return sum(1 for a in self.arms if a == 1)

    @property
    def hyperbolic_degree(self) -> int:
        return self.k - self.linear_degree

    @property
    def is_hyperbolic(self) -> bool:
        return self.linear_degree <= 1

    @property
    def hyperbolic_arms(self) -> tuple[int, ...]:
        return tuple(a for a in self.arms if a != 1)

    def to_json(self) -> dict[str, Any]:
        return {"family": "W", "arms": list(self.arms)}

    def __str__(self) -> str:
        return "Theta(" + ",".join(map(str, self.arms)) + ")"


Spec = Union[SurfaceAmalgamSpec, ThetaGraphSpec]


def validate_spec(spec: Spec) -> Spec:
    """Return ``spec`` normalized (m <= n, arms sorted) or raise ``SpecError``.

    All violations are collected before raising.  Idempotent.
    """
    if isinstance(spec, SurfaceAmalgamSpec):
        errs: list[tuple[str, str]] = []
        for name in ("g", "h", "m", "n"):
            v = getattr(spec, name)
            if isinstance(v, bool) or not isinstance(v, int):
                errs.append(("MalformedSpec", f"{name} must be an integer, got {v!r}"))
        if errs:
            raise SpecError(errs)
        if spec.g < 2:
            errs.append(("GenusTooSmall", f"g = {spec.g} < 2"))
        if spec.h < 2:
            errs.append(("GenusTooSmall", f"h = {spec.h} < 2"))
        if spec.m < 1:
            errs.append(("MalformedSpec", f"m = {spec.m} < 1"))
        if spec.n < 1:
            errs.append(("MalformedSpec", f"n = {spec.n} < 1"))
        errs += spec.curve_a.violations(spec.g, "curve_a")
        errs += spec.curve_b.violations(spec.h, "curve_b")
        if errs:
            raise SpecError(errs)
        return spec.swapped() if spec.m > spec.n else spec
    if isinstance(spec, ThetaGraphSpec):
        errs = []
        if len(spec.arms) < 3:
            errs.append(("ArmCount", f"k = {len(spec.arms)} < 3"))
        for a in spec.arms:
            if isinstance(a, bool) or not isinstance(a, int):
                errs.append(("MalformedSpec", f"arm {a!r} is not an integer"))
            elif a < 1:
                errs.append(("NonPositiveArm", f"arm {a} < 1"))
        if errs:
            raise SpecError(errs)
        arms = tuple(sorted(spec.arms))
        return spec if arms == spec.arms else ThetaGraphSpec(arms)
    raise SpecError([("MalformedSpec", f"not a spec: {spec!r}")])


def spec_from_json(obj: Any) -> Spec:
    """Parse (but do not validate) a spec from its JSON object form."""
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise SpecError([("MalformedSpec", f"invalid JSON: {exc}")]) from None
    if not isinstance(obj, dict):
        raise SpecError([("MalformedSpec", "spec must be a JSON object")])
    family = obj.get("family")
    if family == "C":
        missing = [k for k in ("g", "h", "m", "n") if k not in obj]
        if missing:
            raise SpecError([("MalformedSpec", f"missing field(s) {missing}")])
        g, h, m, n = _ints(obj[k] for k in ("g", "h", "m", "n"))
        ca = CurveSpec.from_json(obj.get("curve_a", {"kind": NONSEPARATING}))
        cb = CurveSpec.from_json(obj.get("curve_b", {"kind": NONSEPARATING}))
        return SurfaceAmalgamSpec(g, h, m, n, ca, cb)
    if family == "W":
        arms = obj.get("arms")
        if not isinstance(arms, list):
            raise SpecError([("MalformedSpec", "family W needs 'arms': [n_1, ..., n_k]")])
        return ThetaGraphSpec(tuple(_ints(arms)))
    raise SpecError([("MalformedSpec", f"unknown family {family!r} (expected 'C' or 'W')")])


def load_spec(obj: Any) -> Spec:
    return validate_spec(spec_from_json(obj))


# -- Euler characteristic vectors -------------------------------------------------


@dataclass(frozen=True)
class EulerVector:
    """Non-positive rationals stored as numerators over 4, sorted non-increasing."""

    quarters: tuple[int, ...]

    def __post_init__(self):
        q = tuple(int(x) for x in self.quarters)
        if any(x > 0 for x in q):
            raise ValueError(f"Euler vector entries must be <= 0: {q}")
        object.__setattr__(self, "quarters", tuple(sorted(q, reverse=True)))

    @classmethod
    def from_fractions(cls, values: Iterable[Fraction | int | str]) -> "EulerVector":
        return cls(tuple(quarter_numerator(v) for v in values))

    @property
    def entries(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(q, 4) for q in self.quarters)

    @property
    def zero_count(self) -> int:
        return sum(1 for q in self.quarters if q == 0)

    def scaled(self, K: int) -> "EulerVector":
        return EulerVector(tuple(K * q for q in self.quarters))

    def total(self) -> Fraction:
        return Fraction(sum(self.quarters), 4)

    def __len__(self) -> int:
        return len(self.quarters)

    def to_json(self) -> list[str]:
        return [f"{q}/4" for q in self.quarters]

    @classmethod
    def from_json(cls, items: Iterable[str]) -> "EulerVector":
        return cls.from_fractions(items)

    def __str__(self) -> str:
        return "(" + ", ".join(str(e) for e in self.entries) + ")"


def quarter_numerator(value: Fraction | int | str) -> int:
    """Numerator of ``value`` over 4; raises ValueError if not a quarter-integer."""
    fr = Fraction(value)
    q = fr * 4
    if q.denominator != 1:
        raise ValueError(f"{value} is not a quarter-integer")
    return int(q)
