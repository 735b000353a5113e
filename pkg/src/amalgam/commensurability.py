"""Euler characteristic vectors and the commensurability maps between C and W."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional

from .core_model import EulerVector, SpecError, SurfaceAmalgamSpec, ThetaGraphSpec, validate_spec


class NotRealizable(ValueError):
    pass


class LinearDegreeTooSmall(ValueError):
    pass


def euler_vector(theta: ThetaGraphSpec) -> EulerVector:
    return EulerVector(tuple(1 - n for n in theta.arms))


def vectors_commensurable(v: EulerVector, w: EulerVector) -> Optional[tuple[int, int]]:
    """Least positive (K, L) with K*v == L*w entrywise, or None."""
    if len(v) != len(w):
        return None
    K = L = None
    for a, b in zip(v.quarters, w.quarters):
        if (a == 0) != (b == 0):
            return None
        if a != 0 and K is None:
            g = gcd(a, b)
            K, L = abs(b // g), abs(a // g)
    if K is None:
        return (1, 1)
    if all(K * a == L * b for a, b in zip(v.quarters, w.quarters)):
        return (K, L)
    return None


@dataclass(frozen=True)
class AssociatedVectorData:
    N: int
    v1: int
    v2: int
    v3: int
    v4: int
    w: EulerVector

    def to_json(self) -> dict:
        return {"N": self.N, "v": [self.v1, self.v2, self.v3, self.v4], "w": self.w.to_json()}


def curve_side_eulers(genus: int, curve) -> tuple[int, int]:
    """Eulers of the two subsurfaces in the double cover where the curve lifts to a bounding pair."""
    if curve.is_separating:
        g1, g2 = curve.split
        v = sorted((2 * (1 - 2 * g1), 2 * (1 - 2 * g2)))
        return v[0], v[1]
    return 2 - 2 * genus, 2 - 2 * genus


def associated_racg_vector(spec: SurfaceAmalgamSpec) -> AssociatedVectorData:
    m, n = spec.m, spec.n
    N = m * n - m - n + 1
    v1, v2 = curve_side_eulers(spec.g, spec.curve_a)
    v3, v4 = curve_side_eulers(spec.h, spec.curve_b)
    entries = [0] * (2 * N) + [m * v1] * n + [m * v2] * n + [n * v3] * m + [n * v4] * m
    w = EulerVector(tuple(4 * x for x in entries))
    return AssociatedVectorData(N, v1, v2, v3, v4, w)


def realize_vector_as_theta(w: EulerVector) -> ThetaGraphSpec:
    """Theta graph whose Euler vector is w (entries p/4 give arms 1 - p)."""
    arms = tuple(1 - q for q in w.quarters)
    if any(a < 1 for a in arms):
        raise NotRealizable(f"vector {w} has a positive entry")
    return validate_spec(ThetaGraphSpec(arms))  # type: ignore[return-value]


def scale_class(theta: ThetaGraphSpec, K: int) -> ThetaGraphSpec:
    if K < 1:
        raise ValueError("K must be positive")
    return ThetaGraphSpec(tuple(sorted(1 + K * (a - 1) for a in theta.arms)))


def hyperbolic_degree_expand(theta: ThetaGraphSpec, m: int) -> ThetaGraphSpec:
    ell = theta.linear_degree
    if ell < 2:
        raise LinearDegreeTooSmall(f"linear degree {ell} < 2")
    if m < 1:
        raise ValueError("m must be positive")
    arms = [1] * (m * (ell - 2) + 2) + [a for a in theta.hyperbolic_arms for _ in range(m)]
    return ThetaGraphSpec(tuple(sorted(arms)))


def expansion_pattern(theta: ThetaGraphSpec, m: int) -> EulerVector:
    """The vector that hyperbolic-degree expansion by m should produce, built from the Euler vector alone."""
    v = euler_vector(theta)
    ell = v.zero_count
    return EulerVector((0,) * (m * (ell - 2) + 2) + tuple(q for q in v.quarters if q != 0) * m)


@dataclass(frozen=True)
class CommensurabilityVerdict:
    status: str  # Commensurable | Unknown
    witness: Optional[dict] = None
    reason: str = ""

    @property
    def commensurable(self) -> bool:
        return self.status == "Commensurable"

    def to_json(self) -> dict:
        out: dict = {"status": self.status}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.reason:
            out["reason"] = self.reason
        return out


def _expansion_factors(t1: ThetaGraphSpec, t2: ThetaGraphSpec) -> Optional[tuple[int, int]]:
    """Expansion factors (m1, m2) that make the two vectors commensurable, if any exist."""
    l1, l2 = t1.linear_degree, t2.linear_degree
    c1, c2 = Counter(t1.hyperbolic_arms), Counter(t2.hyperbolic_arms)
    if not c1 or not c2:
        if c1 or c2:
            return None
        if (l1 == 2) != (l2 == 2):
            return None
        if l1 == 2:
            return (1, 1)
        g = gcd(l1 - 2, l2 - 2)
        return ((l2 - 2) // g, (l1 - 2) // g)
    vals1, vals2 = sorted(c1), sorted(c2)
    if len(vals1) != len(vals2):
        return None
    rho = Fraction(c2[vals2[0]], c1[vals1[0]])
    if any(Fraction(c2[b], c1[a]) != rho for a, b in zip(vals1, vals2)):
        return None
    # arm n corresponds to euler 1 - n; the value sets must be proportional
    if vectors_commensurable(
        EulerVector(tuple(1 - a for a in vals1)), EulerVector(tuple(1 - b for b in vals2))
    ) is None:
        return None
    m1, m2 = rho.numerator, rho.denominator
    if m1 * (l1 - 2) != m2 * (l2 - 2):
        return None
    return (m1, m2)


def commensurable_CW(spec: SurfaceAmalgamSpec, theta: ThetaGraphSpec) -> CommensurabilityVerdict:
    """Sufficient criterion only: never answers No."""
    data = associated_racg_vector(spec)
    try:
        assoc = realize_vector_as_theta(data.w)
    except SpecError:
        return CommensurabilityVerdict("Unknown", reason="associated vector has fewer than three entries")
    tv = euler_vector(theta)
    l1, l2 = assoc.linear_degree, theta.linear_degree
    if l1 <= 1 or l2 <= 1:
        if l1 != l2:
            return CommensurabilityVerdict("Unknown", reason=f"linear degrees {l1} and {l2} differ")
        kl = vectors_commensurable(data.w, tv)
        if kl is None:
            return CommensurabilityVerdict("Unknown", reason="Euler vectors are not commensurable")
        return CommensurabilityVerdict(
            "Commensurable", {"K": kl[0], "L": kl[1], "expand_C": 1, "expand_W": 1, "w": data.w.to_json()}
        )
    factors = _expansion_factors(assoc, theta)
    if factors is None:
        return CommensurabilityVerdict("Unknown", reason="no hyperbolic-degree expansion aligns the vectors")
    m1, m2 = factors
    e1 = euler_vector(hyperbolic_degree_expand(assoc, m1))
    e2 = euler_vector(hyperbolic_degree_expand(theta, m2))
    kl = vectors_commensurable(e1, e2)
    if kl is None:  # pragma: no cover - the solver only returns certified factors
        return CommensurabilityVerdict("Unknown", reason="expansion did not certify")
    return CommensurabilityVerdict(
        "Commensurable",
        {"K": kl[0], "L": kl[1], "expand_C": m1, "expand_W": m2, "w": data.w.to_json()},
    )
