"""Gluing-region schedule and the exact power-law torsion exponent calculus.

Everything in this module is exact: exponents are rationals, or affine
expressions c0 + c1*gamma in the small positive decay offset gamma.  The
only floating arithmetic is in the optional quadrature cross-check, which
is an independent oracle, never the primary computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate


class LogarithmicThresholdError(ArithmeticError):
    """The integral sits at the logarithmic exponent and has no power law."""


@dataclass(frozen=True, order=False)
class GammaExpr:
    """An exact expression c0 + c1 * gamma with gamma > 0 infinitesimally small.

    Ordering is lexicographic in (c0, c1), which is the correct order for
    every sufficiently small positive gamma.
    """

    c0: Fraction
    c1: Fraction = Fraction(0)

    @classmethod
    def of(cls, c0, c1=0) -> "GammaExpr":
        return cls(Fraction(c0), Fraction(c1))

    def __add__(self, other):
        other = _as_gamma(other)
        return GammaExpr(self.c0 + other.c0, self.c1 + other.c1)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_gamma(other)
        return GammaExpr(self.c0 - other.c0, self.c1 - other.c1)

    def __rsub__(self, other):
        return _as_gamma(other) - self

    def __mul__(self, scalar):
        scalar = Fraction(scalar)
        return GammaExpr(self.c0 * scalar, self.c1 * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return GammaExpr(-self.c0, -self.c1)

    def key(self):
        return (self.c0, self.c1)

    def __lt__(self, other):
        return self.key() < _as_gamma(other).key()

    def __le__(self, other):
        return self.key() <= _as_gamma(other).key()

    def is_zero(self) -> bool:
        return self.c0 == 0 and self.c1 == 0

    def at(self, gamma: Fraction) -> Fraction:
        return self.c0 + self.c1 * Fraction(gamma)

    def __str__(self):
        if self.c1 == 0:
            return str(self.c0)
        gpart = "g" if abs(self.c1) == 1 else f"{abs(self.c1)}*g"
        sign = "+" if self.c1 > 0 else "-"
        if self.c0 == 0:
            return f"{'' if self.c1 > 0 else '-'}{gpart}"
        return f"{self.c0}{sign}{gpart}"


def _as_gamma(x) -> GammaExpr:
    if isinstance(x, GammaExpr):
        return x
    return GammaExpr(Fraction(x))


GAMMA = GammaExpr(Fraction(0), Fraction(1))


# ---------------------------------------------------------------------------
# Cutoff function and the radial region schedule
# ---------------------------------------------------------------------------


class CutoffFn:
    """Quintic smoothstep ramp: 0 on [0,1], 1 on [2,oo), C^2 at the joins."""

    def __call__(self, x: float) -> float:
        if x <= 1.0:
            return 0.0
        if x >= 2.0:
            return 1.0
        u = x - 1.0
        return u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)

    def derivative(self, x: float, order: int = 1) -> float:
        if x <= 1.0 or x >= 2.0:
            return 0.0
        u = x - 1.0
        if order == 1:
            return 30.0 * u * u * (1.0 - u) ** 2
        if order == 2:
            return 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u)
        raise ValueError("derivatives implemented up to order 2")


@dataclass(frozen=True)
class RegionSchedule:
    """Radial regions of the interpolation, in the rescaled radius rcheck.

    Boundaries are 1, t^{-1/9}, 2 t^{-1/9}, t^{-4/5}, 2 t^{-4/5}, t^{-1} R;
    the scale t must be small enough that they increase strictly.
    """

    t: float
    R: float = 1.0

    def boundaries(self) -> tuple:
        t, R = self.t, self.R
        return (1.0, t ** (-1.0 / 9.0), 2.0 * t ** (-1.0 / 9.0), t ** (-0.8), 2.0 * t ** (-0.8), R / t)

    def is_valid(self) -> bool:
        b = self.boundaries()
        return all(b[i] < b[i + 1] for i in range(len(b) - 1))

    def region_of(self, rcheck: float, outer: bool = False) -> int:
        """The 1-based region index containing rcheck (boundaries go to the
        lower-indexed region); region 7 is the untouched outer manifold."""
        if outer:
            return 7
        if not self.is_valid():
            raise ValueError("schedule invalid: regions are not nested (t too large)")
        if rcheck < 0:
            raise ValueError("rcheck must be nonnegative")
        for label, bound in enumerate(self.boundaries(), start=1):
            if rcheck <= bound:
                return label
        raise ValueError("rcheck beyond the tube radius; pass outer=True for manifold points")


def region_of(t: float, R: float, rcheck: float, outer: bool = False) -> int:
    return RegionSchedule(t, R).region_of(rcheck, outer=outer)


# ---------------------------------------------------------------------------
# Pointwise power-law bound records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerLawBound:
    """A record O(t^a rcheck^b) for a named quantity on a radial region."""

    name: str
    a_exp: GammaExpr
    b_exp: GammaExpr
    region: str
    k: int = 0

    def __str__(self):
        return f"{self.name}: O(t^({self.a_exp}) rc^({self.b_exp})) on {self.region} (k={self.k})"


REGION_LABELS = (
    "rc <= 1",
    "1 <= rc <= t^-1/9",
    "t^-1/9 <= rc <= 2t^-1/9",
    "2t^-1/9 <= rc <= t^-4/5",
    "t^-4/5 <= rc <= 2t^-4/5",
    "rc >= 2t^-4/5",
)

# t-exponents of the region boundaries (constants do not matter for orders)
REGION_ENDPOINTS = {
    1: (None, Fraction(0)),
    2: (Fraction(0), Fraction(-1, 9)),
    3: (Fraction(-1, 9), Fraction(-1, 9)),
    4: (Fraction(-1, 9), Fraction(-4, 5)),
    5: (Fraction(-4, 5), Fraction(-4, 5)),
}


def pointwise_bound(gamma_symbolic: bool = True) -> dict:
    """Pointwise bounds of the dual-form defect and of its derivative.

    Keys "defect" and "derivative"; each maps region label 1..7 to a
    PowerLawBound with exact exponents (zero bounds are None).
    """
    g = GAMMA
    z = GammaExpr.of(0)
    defect = {
        1: PowerLawBound("defect", GammaExpr.of(2), z, REGION_LABELS[0]),
        2: PowerLawBound("defect", GammaExpr.of(2), GammaExpr.of(2), REGION_LABELS[1]),
        3: PowerLawBound("defect", GammaExpr.of(Fraction(16, 9)), z, REGION_LABELS[2]),
        4: PowerLawBound("defect", GammaExpr.of(2), GammaExpr.of(-2) + g, REGION_LABELS[3]),
        5: PowerLawBound("defect", GammaExpr.of(Fraction(16, 5)), z, REGION_LABELS[4]),
        6: None,
        7: None,
    }
    derivative = {
        1: PowerLawBound("d(defect)", GammaExpr.of(1), z, REGION_LABELS[0], k=1),
        2: PowerLawBound("d(defect)", GammaExpr.of(1), GammaExpr.of(1), REGION_LABELS[1], k=1),
        3: PowerLawBound("d(defect)", GammaExpr.of(Fraction(8, 9)), z, REGION_LABELS[2], k=1),
        4: PowerLawBound("d(defect)", GammaExpr.of(1), GammaExpr.of(-3) + g, REGION_LABELS[3], k=1),
        5: PowerLawBound("d(defect)", GammaExpr.of(3), z, REGION_LABELS[4], k=1),
        6: None,
        7: None,
    }
    return {"defect": defect, "derivative": derivative}


# Named correction-form bound records: (inner a-exp at rc <= 1,
# outer (a-exp, b-exp) at rc >= 1); derivatives subtract k from the t-exp
# and (outer only) from the rc-exp.
FORM_BOUNDS = {
    "t2_xi_12": (GammaExpr.of(1), (GammaExpr.of(1), GammaExpr.of(-3))),
    "t2_xi_03": (GammaExpr.of(2), (GammaExpr.of(2), GammaExpr.of(2))),
    "t2_chi_13": (GammaExpr.of(1), (GammaExpr.of(1), GammaExpr.of(-3))),
    "t4_theta_31": (GammaExpr.of(1), None),
    "t4_theta_22": (GammaExpr.of(2), (GammaExpr.of(2), GammaExpr.of(2))),
    "t2_tau_11": (None, (GammaExpr.of(1), GammaExpr.of(-3))),
    "t2_upsilon_12": (None, (GammaExpr.of(1), GammaExpr.of(-3))),
    "t2_alpha_02": (GammaExpr.of(2), (GammaExpr.of(2), GammaExpr.of(-2) + GAMMA)),
    "t4_alpha_20": (GammaExpr.of(2), (GammaExpr.of(2), GammaExpr.of(-2) + GAMMA)),
    "t2_beta_03": (GammaExpr.of(2), (GammaExpr.of(2), GammaExpr.of(-2) + GAMMA)),
    "t4_beta_21": (GammaExpr.of(2), (GammaExpr.of(2), GammaExpr.of(-2) + GAMMA)),
}


def form_bound(name: str, region: str, k: int = 0) -> PowerLawBound:
    """Bound record for a named correction form, with k derivatives applied."""
    inner, outer = FORM_BOUNDS[name]
    if region == "inner":
        if inner is None:
            raise KeyError(f"{name} carries no inner-region record")
        return PowerLawBound(name, inner - k, GammaExpr.of(0), "rc <= 1", k=k)
    if region == "outer":
        if outer is None:
            return PowerLawBound(name, GammaExpr.of(0), GammaExpr.of(0), "rc >= 1 (vanishes)", k=k)
        a, b = outer
        return PowerLawBound(name, a - k, b - k, "rc >= 1", k=k)
    raise KeyError("region must be 'inner' or 'outer'")


# ---------------------------------------------------------------------------
# L^p exponent calculus
# ---------------------------------------------------------------------------


def lp_exponent(bound: PowerLawBound, p, a_bound: Fraction | None, b_bound: Fraction) -> GammaExpr:
    """t-exponent of the L^p norm of O(t^a rc^b) over a region [A, B].

    A and B enter as t-exponents of the boundary radii (None for the inner
    region rc <= 1 where only the t^4 volume matters); p may be a number or
    None for the sup norm.  The tube volume element is t^4 rc^3 d rc, so
    ||O(t^a rc^b)||_p = O(t^{a + 4/p} (A^{b + 4/p} + B^{b + 4/p})) away from
    the logarithmic threshold b = -4/p, which is rejected explicitly.
    """
    a, b = bound.a_exp, bound.b_exp
    if p is None:
        vol = Fraction(0)
    else:
        vol = Fraction(4, int(p)) if not isinstance(p, Fraction) else 4 / p
    shifted = b + vol
    if p is not None and shifted.is_zero():
        raise LogarithmicThresholdError("b = -4/p: logarithmic integral, no clean power")
    exp0 = a + vol
    candidates = []
    for endpoint in (a_bound, b_bound):
        if endpoint is None:
            continue
        candidates.append(exp0 + shifted * endpoint)
    if not candidates:
        candidates = [exp0]
    return min(candidates)


def c0_exponent(bound: PowerLawBound, a_bound, b_bound) -> GammaExpr:
    """Sup-norm exponent on the region (no volume factor)."""
    return lp_exponent(bound, None, a_bound, b_bound)


@dataclass(frozen=True)
class TorsionTable:
    """All per-region norm contributions plus the aggregated exponents."""

    rows: tuple  # (region label, c0, l2, l14) with GammaExpr entries or None
    aggregate: tuple  # (c0, l2, l14)

    def cells(self):
        out = []
        for label, c0, l2, l14 in self.rows:
            for col, val in (("C0", c0), ("L2", l2), ("L14", l14)):
                out.append((label, col, val))
        return out


def torsion_table() -> TorsionTable:
    """The per-region contributions of the defect norms, exact in gamma.

    The C0 and L2 columns integrate the pointwise defect bound; the L14
    column integrates the bound on its derivative.
    """
    bounds = pointwise_bound()
    rows = []
    for region in range(1, 6):
        pb = bounds["defect"][region]
        db = bounds["derivative"][region]
        a_b, b_b = REGION_ENDPOINTS[region]
        c0 = c0_exponent(pb, a_b, b_b)
        l2 = lp_exponent(pb, 2, a_b, b_b)
        l14 = lp_exponent(db, 14, a_b, b_b)
        rows.append((REGION_LABELS[region - 1], c0, l2, l14))
    rows.append((REGION_LABELS[5], None, None, None))
    agg = tuple(min(row[i] for row in rows[:5]) for i in (1, 2, 3))
    return TorsionTable(tuple(rows), agg)


def alpha_window(c0=None, l2=None, l14=None) -> Fraction:
    """Largest admissible exponent for the existence hypotheses.

    The three constraints are alpha < c0, 7/2 + alpha < l2, and
    -1/2 + alpha < l14; with the aggregated torsion exponents the window is
    (0, 1/18).  Returns 0 when the window is empty.
    """
    if c0 is None or l2 is None or l14 is None:
        agg = torsion_table().aggregate
        c0 = agg[0] if c0 is None else _as_gamma(c0)
        l2 = agg[1] if l2 is None else _as_gamma(l2)
        l14 = agg[2] if l14 is None else _as_gamma(l14)
    else:
        c0, l2, l14 = _as_gamma(c0), _as_gamma(l2), _as_gamma(l14)
    limits = (c0, l2 - Fraction(7, 2), l14 + Fraction(1, 2))
    window = min(limits)
    # the sup over admissible alpha, in the small-gamma limit
    value = window.c0
    if value <= 0:
        return Fraction(0)
    return value


def boundary_consistency() -> dict:
    """Shared-boundary orders of adjacent pointwise bounds.

    At rc = t^{-1/9} the inner power-law bound t^2 rc^2 equals t^{16/9},
    the flat bound of the next region, for both the defect and its
    derivative; the other boundaries are reported for inspection.
    """
    bounds = pointwise_bound()
    report = {}
    for key in ("defect", "derivative"):
        per = bounds[key]
        evals = {}
        for region in range(1, 6):
            pb = per[region]
            a_b, b_b = REGION_ENDPOINTS[region]
            lo = None if a_b is None else pb.a_exp + pb.b_exp * a_b
            hi = pb.a_exp + pb.b_exp * b_b
            evals[region] = (lo, hi)
        report[key] = {
            "values": evals,
            "matched_2_3": evals[2][1] == evals[3][0] and evals[3][0] == evals[3][1],
        }
    return report


def lp_norm_quadrature(a_exp: float, b_exp: float, p: float, a_bnd: float, b_bnd: float, t: float) -> float:
    """Numerical L^p norm of t^a rc^b over [t^A, t^B]: the independent oracle
    for the symbolic exponent calculus.

    Integrated in log-radius with the large constant prefactor split off, so
    the huge dynamic range of the integrand does not drown the quadrature.
    """
    lo, hi = t**a_bnd, t**b_bnd
    if lo > hi:
        lo, hi = hi, lo
    tau0, tau1 = math.log(lo), math.log(hi)
    # (t^a s^b)^p t^4 s^3 ds = t^{ap+4} exp((bp+4) tau) dtau; keep the
    # t-prefactor in log space and only quadrature the tau-profile
    log_pref = (a_exp * p + 4.0) * math.log(t)
    val, _ = integrate.quad(lambda tau: math.exp((b_exp * p + 4.0) * tau), tau0, tau1, limit=400, epsabs=0.0, epsrel=1e-12)
    return math.exp((log_pref + math.log(val)) / p)


GOLDEN_TABLE = {
    ("rc <= 1", "C0"): "2",
    ("rc <= 1", "L2"): "4",
    ("rc <= 1", "L14"): "9/7",
    ("1 <= rc <= t^-1/9", "C0"): "16/9",
    ("1 <= rc <= t^-1/9", "L2"): "32/9",
    ("1 <= rc <= t^-1/9", "L14"): "8/7",
    ("t^-1/9 <= rc <= 2t^-1/9", "C0"): "16/9",
    ("t^-1/9 <= rc <= 2t^-1/9", "L2"): "32/9",
    ("t^-1/9 <= rc <= 2t^-1/9", "L14"): "8/7",
    ("2t^-1/9 <= rc <= t^-4/5", "C0"): "20/9-1/9*g",
    ("2t^-1/9 <= rc <= t^-4/5", "L2"): "4-4/5*g",
    ("2t^-1/9 <= rc <= t^-4/5", "L14"): "100/63-1/9*g",
    ("t^-4/5 <= rc <= 2t^-4/5", "C0"): "16/5",
    ("t^-4/5 <= rc <= 2t^-4/5", "L2"): "18/5",
    ("t^-4/5 <= rc <= 2t^-4/5", "L14"): "107/35",
    ("aggregate", "C0"): "16/9",
    ("aggregate", "L2"): "32/9",
    ("aggregate", "L14"): "8/7",
}


def golden_verdict() -> dict:
    """Compare the computed table against the embedded golden exponents."""
    table = torsion_table()
    failures = []
    for label, col, val in table.cells():
        if val is None:
            continue
        expected = GOLDEN_TABLE[(label, col)]
        if str(val) != expected:
            failures.append((label, col, str(val), expected))
    for col, val in zip(("C0", "L2", "L14"), table.aggregate):
        expected = GOLDEN_TABLE[("aggregate", col)]
        if str(val) != expected:
            failures.append(("aggregate", col, str(val), expected))
    window = alpha_window()
    if window != Fraction(1, 18):
        failures.append(("alpha window", "-", str(window), "1/18"))
    return {"passed": not failures, "failures": failures, "alpha_window": str(window)}
