"""The Eguchi-Hanson family: radial potentials, Kahler forms, metric,
bolt area, and the scaled product structures on R^3 x X.

All evaluation is on the double cover C^2 \\ {0} with real coordinates
(y1, y2, y3, y4), z1 = y1 + i y2, z2 = y3 + i y4.  Every published tensor
is invariant under y -> -y, so values descend to the quotient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .forms import KForm, euclidean_space, hodge, wedge
from .hk import QuaternionicFrame, embed_vertical, product_space

FLOAT = "float"


@dataclass(frozen=True)
class EHParams:
    """Bolt-scale parameter a (units of length^2) and global scale t."""

    a: float
    t: float = 1.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("a must be positive")
        if not self.t > 0:
            raise ValueError("t must be positive")


def radius(y) -> float:
    y = np.asarray(y, dtype=float)
    return float(math.sqrt(np.dot(y, y)))


def potential(a: float, r: float):
    """Value and first two derivatives of the radial Kahler potential.

    Both algebraic forms of the potential agree; the second (log-regrouped)
    form is used since it stays stable for small r.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    s = math.sqrt(r**4 + a * a)
    f = s + 2 * a * math.log(r) - a * math.log(s + a)
    fp = 2 * s / r
    fpp = 4 * r * r / s - 2 * s / (r * r)
    return f, fp, fpp


def potential_forms(a: float, r: float):
    """Both closed forms of the potential, for the agreement check."""
    if r <= 0:
        raise ValueError("r must be positive")
    s = math.sqrt(r**4 + a * a)
    first = s - a * math.log((s + a) / (r * r))
    second = s + 2 * a * math.log(r) - a * math.log(s + a)
    return first, second


class RadialProfile:
    """Closed-form evaluators for f_a, G_a = f_a - r^2 and H_a, with
    derivatives up to order 4.

    f_a(r) = a f_1(r / sqrt(a)); H_a is smooth on (-a^2, oo) and
    f_a(r) = 2a log r + H_a(r^4), so H_a carries the smooth extension of
    the potential over the bolt.
    """

    def __init__(self, a: float):
        if not a > 0:
            raise ValueError("a must be positive")
        self.a = float(a)

    def f(self, r: float, order: int = 0) -> float:
        a = self.a
        if r <= 0:
            raise ValueError("r must be positive")
        s = math.sqrt(r**4 + a * a)
        if order == 0:
            return s + 2 * a * math.log(r) - a * math.log(s + a)
        if order == 1:
            return 2 * s / r
        if order == 2:
            return 4 * r * r / s - 2 * s / r**2
        if order == 3:
            return 4 * r / s - 8 * r**5 / s**3 + 4 * s / r**3
        if order == 4:
            return 12 / s - 48 * r**4 / s**3 + 48 * r**8 / s**5 - 12 * s / r**4
        raise ValueError("derivatives available up to order 4")

    def G(self, r: float, order: int = 0) -> float:
        if order == 0:
            return self.f(r) - r * r
        if order == 1:
            return self.f(r, 1) - 2 * r
        if order == 2:
            return self.f(r, 2) - 2
        return self.f(r, order)

    def H(self, u: float, order: int = 0) -> float:
        a = self.a
        if u <= -a * a:
            raise ValueError("H is defined on (-a^2, oo)")
        w = math.sqrt(u + a * a)
        if order == 0:
            return w - a * math.log(w + a)
        wa = w + a
        if order == 1:
            return 1.0 / (2 * wa)
        if order == 2:
            return -1.0 / (4 * w * wa**2)
        if order == 3:
            return 1.0 / (8 * w**3 * wa**2) + 1.0 / (4 * w**2 * wa**3)
        if order == 4:
            return -3.0 / (16 * w**5 * wa**2) - 3.0 / (8 * w**4 * wa**3) - 3.0 / (8 * w**3 * wa**4)
        raise ValueError("derivatives available up to order 4")


_SPACE4 = euclidean_space(4, FLOAT)
_FRAME4 = QuaternionicFrame.standard(FLOAT)

# Flat pullback 2-forms: these do not depend on the bolt parameter.
omega_J_flat = _FRAME4.omegas[1]
omega_K_flat = _FRAME4.omegas[2]


def _radial_coeffs(a: float, r: float):
    """g(r) = f'(r)/r and its derivative, entering the closed-form omega."""
    s = math.sqrt(r**4 + a * a)
    g = 2 * s / (r * r)
    gp = -4 * a * a / (s * r**3)
    return g, gp


def omega_I(a: float, y) -> KForm:
    """The Kahler form of the bolt-resolved metric, evaluated analytically.

    Self-dual, closed (it is d of a potential), invariant under y -> -y,
    and converging to the flat Kahler form as a -> 0.
    """
    y = np.asarray(y, dtype=float)
    r = radius(y)
    if r <= 0:
        raise ValueError("chart point must have r > 0")
    if a == 0:
        return _FRAME4.omegas[0]
    g, gp = _radial_coeffs(a, r)
    euler = KForm(_SPACE4, 1, {(i,): y[i] for i in range(4)})
    sigma = KForm(_SPACE4, 1, {(0,): y[1], (1,): -y[0], (2,): y[3], (3,): -y[2]})
    return _FRAME4.omegas[0].scale(0.5 * g) + wedge(euler, sigma).scale(-0.25 * gp / r)


def metric_h(a: float, y) -> np.ndarray:
    """Metric matrix h(u, v) = omega(u, I v); positive definite off the bolt."""
    w = omega_I(a, y)
    omega_mat = np.array([[float(w.get((i, j))) for j in range(4)] for i in range(4)])
    i_vec = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], dtype=float)
    return omega_mat @ i_vec


def metric_space(a: float, y) -> "object":
    """ModelSpace carrying the resolved metric at y (for its Hodge star)."""
    from .forms import ModelSpace

    h = metric_h(a, y)
    return ModelSpace(4, tuple(tuple(float(x) for x in row) for row in h), orientation=1, mode=FLOAT)


def bolt_area(params: EHParams) -> float:
    """Area of the exceptional sphere by quadrature of the induced area form.

    On the zero section the Kahler form restricts to a times the standard
    sphere form of total area pi (round radius 1/2), so the result is
    pi a t^2 for the rescaled family.
    """
    integrand = lambda rho: 2 * math.pi * rho / (1 + rho * rho) ** 2
    area_cp1, err = integrate.quad(integrand, 0, np.inf, limit=200)
    if err > 1e-6:
        raise ArithmeticError("quadrature failed to converge")
    return params.a * params.t**2 * area_cp1


def product_structure(params: EHParams, point7):
    """The 3-form, 4-form and metric of the scaled product structure at a
    7-point (x1, x2, x3, y1..y4); requires r(y) > 0.

    phi = e123 - t^2 (e1 ^ w_I + e2 ^ w_J + e3 ^ w_K) with the fibre volume
    (1/2) w_I ^ w_I, matching the torsion-free product family.
    """
    p = np.asarray(point7, dtype=float)
    y = p[3:]
    a, t = params.a, params.t
    space7 = euclidean_space(7, FLOAT)
    wI = embed_vertical(space7, omega_I(a, y))
    wJ = embed_vertical(space7, omega_J_flat)
    wK = embed_vertical(space7, omega_K_flat)
    e = [KForm.basis(space7, (m,)) for m in range(3)]
    t2 = t * t
    phi = wedge(wedge(e[0], e[1]), e[2])
    phi = phi - wedge(e[0], wI).scale(t2) - wedge(e[1], wJ).scale(t2) - wedge(e[2], wK).scale(t2)
    vol_x = wedge(wI, wI).scale(0.5)
    psi = vol_x.scale(t2 * t2)
    psi = psi - wedge(wedge(e[1], e[2]), wI).scale(t2)
    psi = psi - wedge(wedge(e[2], e[0]), wJ).scale(t2)
    psi = psi - wedge(wedge(e[0], e[1]), wK).scale(t2)
    g = np.zeros((7, 7))
    g[:3, :3] = np.eye(3)
    g[3:, 3:] = t2 * metric_h(a, y)
    return phi, psi, g


def phi_field(params: EHParams):
    """Point -> positive 3-form field of the product family (for stencils)."""

    def field(p):
        return product_structure(params, p)[0]

    return field


# ---------------------------------------------------------------------------
# Finite-difference curvature (4th order stencils)
# ---------------------------------------------------------------------------

_D1_W = (1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0)
_D1_O = (-2, -1, 1, 2)
_D2_W = (-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0)
_D2_O = (-2, -1, 0, 1, 2)


def _d1(fn, y, i, h):
    acc = None
    for w, o in zip(_D1_W, _D1_O):
        q = y.copy()
        q[i] += o * h
        val = w * fn(q)
        acc = val if acc is None else acc + val
    return acc / h


def _d2(fn, y, i, j, h):
    if i == j:
        acc = None
        for w, o in zip(_D2_W, _D2_O):
            q = y.copy()
            q[i] += o * h
            val = w * fn(q)
            acc = val if acc is None else acc + val
        return acc / (h * h)
    return _d1(lambda q: _d1(fn, q, j, h), y, i, h)


def ricci_fd(metric_fn, y, h: float) -> np.ndarray:
    """Ricci tensor of a metric field on R^n by 4th-order finite differences."""
    y = np.asarray(y, dtype=float)
    n = len(y)
    g = np.asarray(metric_fn(y), dtype=float)
    ginv = np.linalg.inv(g)
    dg = np.array([_d1(metric_fn, y, m, h) for m in range(n)])  # dg[m, i, j]
    d2g = np.zeros((n, n, n, n))
    for m in range(n):
        for p in range(m, n):
            block = _d2(metric_fn, y, m, p, h)
            d2g[m, p] = block
            d2g[p, m] = block
    gamma = np.zeros((n, n, n))  # gamma[k, i, j] = Gamma^k_{ij}
    for k in range(n):
        for i in range(n):
            for j in range(n):
                gamma[k, i, j] = 0.5 * sum(
                    ginv[k, l] * (dg[i][j, l] + dg[j][i, l] - dg[l][i, j]) for l in range(n)
                )
    dginv = np.array([-ginv @ dg[m] @ ginv for m in range(n)])
    dgamma = np.zeros((n, n, n, n))  # dgamma[m, k, i, j]
    for m in range(n):
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    dgamma[m, k, i, j] = 0.5 * sum(
                        dginv[m][k, l] * (dg[i][j, l] + dg[j][i, l] - dg[l][i, j])
                        + ginv[k, l] * (d2g[m, i][j, l] + d2g[m, j][i, l] - d2g[m, l][i, j])
                        for l in range(n)
                    )
    ric = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            ric[i, j] = sum(dgamma[k, k, i, j] - dgamma[i, k, k, j] for k in range(n))
            ric[i, j] += sum(
                gamma[k, k, l] * gamma[l, i, j] - gamma[k, i, l] * gamma[l, k, j]
                for k in range(n)
                for l in range(n)
            )
    return ric


def ricci_conformal_flat(f, grad_f, hess_f, y) -> np.ndarray:
    """Analytic Ricci of e^{2f} delta on R^4: the oracle for :func:`ricci_fd`.

    Ric = -2 (Hess f - df (x) df) - (Lap f + 2 |grad f|^2) delta.
    """
    y = np.asarray(y, dtype=float)
    gf = np.asarray(grad_f(y), dtype=float)
    hf = np.asarray(hess_f(y), dtype=float)
    lap = np.trace(hf)
    return -2.0 * (hf - np.outer(gf, gf)) - (lap + 2.0 * float(gf @ gf)) * np.eye(4)


def ale_decay_samples(a: float, radii, direction=None):
    """|h_a - h_0| (Frobenius) sampled along a ray, for decay-slope fits."""
    if direction is None:
        direction = np.array([0.35, -0.6, 0.55, 0.45])
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    rows = []
    for r in radii:
        y = r * direction
        diff = metric_h(a, y) - np.eye(4)
        rows.append((float(r), float(np.linalg.norm(diff))))
    return rows


def fit_loglog_slope(pairs) -> float:
    xs = np.log([p[0] for p in pairs])
    ys = np.log([p[1] for p in pairs])
    return float(np.polyfit(xs, ys, 1)[0])
