"""Conformal surface charts ``g0 = e^{2u}(dx^2 + dy^2)``.

Carries the Gauss curvature, the orthonormal-frame Levi-Civita coefficients
of the conformal metric, the quadratic second-order operator on functions
built from the frame and its 90-degree rotation, and the symmetrized
derivative that detects whether the rotated gradient is a Killing field.

Frame conventions: e1 = e^{-u} d_x, e2 = e^{-u} d_y, J e1 = e2, J e2 = -e1
(J rotates by +90 degrees in the oriented frame).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import jets
from .errors import DomainError
from .fields import CallableField, combine, parse_field


@dataclass
class RectDomain:
    x0: float
    x1: float
    y0: float
    y1: float

    def contains(self, p):
        return self.x0 <= p[0] <= self.x1 and self.y0 <= p[1] <= self.y1

    def sample(self, rng):
        return (rng.uniform(self.x0, self.x1), rng.uniform(self.y0, self.y1))

    def grid(self, n):
        xs = self.x0 + (self.x1 - self.x0) * (np.arange(n) + 0.5) / n
        ys = self.y0 + (self.y1 - self.y0) * (np.arange(n) + 0.5) / n
        return [(float(x), float(y)) for x in xs for y in ys]


@dataclass
class DiskDomain:
    radius: float
    sample_radius: float

    def contains(self, p):
        return math.hypot(p[0], p[1]) < self.radius

    def sample(self, rng):
        r = self.sample_radius * math.sqrt(rng.uniform(0.0, 1.0))
        phi = rng.uniform(0.0, 2.0 * math.pi)
        return (r * math.cos(phi), r * math.sin(phi))

    def grid(self, n):
        s = self.sample_radius
        xs = -s + 2.0 * s * (np.arange(n) + 0.5) / n
        pts = [(float(x), float(y)) for x in xs for y in xs
               if math.hypot(x, y) <= s]
        return pts


@dataclass
class SurfaceChart:
    u: object                      # conformal factor field, basic
    domain: object
    cell: RectDomain | None = None  # compact integration cell, if any
    name: str = "custom"

    def __post_init__(self):
        if not self.u.basic:
            raise ValueError("conformal factor must not depend on t")

    def u_jet(self, p, order=jets.MAX_ORDER):
        if len(p) == 2:
            p = (p[0], p[1], 0.0)
        return self.u.jet_at(p, order)

    def require_inside(self, p):
        if not self.domain.contains(p):
            raise DomainError(f"point {tuple(p)} outside chart '{self.name}'",
                              value=tuple(p))


_CATALOG_U = {
    "flat": "0",
    "round": "log(2/(1+x^2+y^2))",
    "hyperbolic": "log(2/(1-x^2-y^2))",
}


def catalog_surface(name, u_expr=None):
    if name == "flat":
        cell = RectDomain(0.0, 1.0, 0.0, 1.0)
        return SurfaceChart(parse_field(_CATALOG_U[name]), cell, cell, "flat")
    if name == "round":
        return SurfaceChart(parse_field(_CATALOG_U[name]),
                            DiskDomain(math.inf, 0.8), None, "round")
    if name == "hyperbolic":
        return SurfaceChart(parse_field(_CATALOG_U[name]),
                            DiskDomain(0.9, 0.8), None, "hyperbolic")
    if name == "custom":
        if u_expr is None:
            raise ValueError("custom surface needs a conformal factor expression")
        u = u_expr if not isinstance(u_expr, str) else parse_field(u_expr)
        cell = RectDomain(0.0, 1.0, 0.0, 1.0)
        return SurfaceChart(u, cell, cell, "custom")
    raise ValueError(f"unknown surface model '{name}'")


def gauss_curvature(chart, p):
    """K = -e^{-2u} (u_xx + u_yy), from the jet of u."""
    chart.require_inside(p)
    uj = chart.u_jet(p, min(2, chart.u.max_order))
    lap = uj.partial(2, 0, 0) + uj.partial(0, 2, 0)
    return -math.exp(-2.0 * float(uj.value())) * float(lap)


def curvature_field(chart):
    """Gauss curvature as a derived field (loses two jet orders to u)."""

    def fn(point, order):
        uj = chart.u_jet(point, order + 2)
        lap = uj.deriv(0).deriv(0) + uj.deriv(1).deriv(1)
        return -jets.exp(uj.truncate(order) * (-2.0)) * lap

    return CallableField(fn, basic=True, max_order=chart.u.max_order - 2,
                         label=f"K[{chart.name}]")


def surf_grad_sharp(chart, f, p):
    """Metric gradient (df)#, in chart components: e^{-2u}(f_x, f_y)."""
    if not f.basic:
        raise ValueError("surface operations need fields constant on fibers")
    uj = chart.u_jet(p, 0)
    fj = f.jet_at((p[0], p[1], 0.0), 1)
    w = math.exp(-2.0 * float(uj.value()))
    return np.array([w * float(fj.partial(1, 0, 0)), w * float(fj.partial(0, 1, 0))])


def rot90(v):
    """J in chart components: a d_x + b d_y -> -b d_x + a d_y."""
    return np.array([-v[1], v[0]])


def _frame_data(chart, p, order):
    """Jets of e^{-u} and of the frame connection combinations b1, b2."""
    uj = chart.u_jet(p, order)
    emu = jets.exp(-uj)
    b1 = emu * uj.deriv(1)      # gamma^1_{12}
    b2 = -(emu * uj.deriv(0))   # gamma^2_{12}
    return uj, emu, b1, b2


def _gamma_table(b1v, b2v):
    # gamma[i][j][k] = coefficient of e_k in nabla_{e_i} e_j (1-based -> 0-based)
    g = np.zeros((2, 2, 2))
    g[0][1][0] = b1v   # nabla_{e1} e2 = b1 e1
    g[0][0][1] = -b1v  # nabla_{e1} e1 = -b1 e2
    g[1][0][1] = -b2v  # nabla_{e2} e1 = -b2 e2
    g[1][1][0] = b2v   # nabla_{e2} e2 = b2 e1
    return g


def _frame_components(chart, X, p):
    uj = chart.u_jet(p, 0)
    s = math.exp(float(uj.value()))
    return np.array([s * X[0], s * X[1]])


def box_sigma(chart, f, X, p):
    """Second-order operator of the frame pair (X, JX) on a basic field f.

    X.JX.f + JX.X.f - (nabla_X JX).f - (nabla_JX X).f, with the surface
    Levi-Civita connection; tensorial (quadratic) in X.
    """
    if not f.basic:
        raise ValueError("f must be constant on fibers")
    xi = _frame_components(chart, X, p)
    return _box_frame(chart, f, xi, p)


def _box_frame(chart, f, xi, p):
    uj, emu, b1, b2 = _frame_data(chart, p, 2)
    fj = f.jet_at((p[0], p[1], 0.0), min(4, f.max_order))
    e_f = [emu * fj.deriv(0), emu * fj.deriv(1)]            # e_i(f) jets
    jxi = np.array([-xi[1], xi[0]])

    def dir_jet(v, g):
        return g.deriv(0) * (emu * v[0]) + g.deriv(1) * (emu * v[1])

    x_jx_f = float(dir_jet(xi, dir_jet(jxi, fj)).value())
    jx_x_f = float(dir_jet(jxi, dir_jet(xi, fj)).value())
    gam = _gamma_table(float(b1.value()), float(b2.value()))
    e_f_val = np.array([float(g.value()) for g in e_f])
    nab_x_jx = np.einsum("i,j,ijk->k", xi, jxi, gam)
    nab_jx_x = np.einsum("i,j,ijk->k", jxi, xi, gam)
    return x_jx_f + jx_x_f - float(nab_x_jx @ e_f_val) - float(nab_jx_x @ e_f_val)


def killing_symmetrization(chart, f, X, p):
    """s(X) = g(nabla_X J(df)#, X) for a unit frame direction X = (xi1, xi2)."""
    uj, emu, b1, b2 = _frame_data(chart, p, 2)
    fj = f.jet_at((p[0], p[1], 0.0), min(4, f.max_order))
    w = [emu * fj.deriv(0), emu * fj.deriv(1)]     # frame comps of (df)#
    jw = [-w[1], w[0]]                              # frame comps of J(df)#
    xi = np.asarray(X, dtype=float)
    gam = _gamma_table(float(b1.value()), float(b2.value()))
    jw_val = np.array([float(g.value()) for g in jw])
    s = 0.0
    for m in range(2):
        d_jw_m = (jw[m].deriv(0) * (emu * xi[0]) + jw[m].deriv(1) * (emu * xi[1]))
        s += xi[m] * (float(d_jw_m.value())
                      + float(np.einsum("i,k,ik->", xi, jw_val, gam[:, :, m])))
    return s


_SWEEP_16 = [(math.cos(k * math.pi / 8.0), math.sin(k * math.pi / 8.0))
             for k in range(16)]


def killing_defect(chart, f, p):
    """max |s(X)| over a 16-direction sweep of unit frame vectors."""
    if not f.basic:
        raise ValueError("f must be constant on fibers")
    return max(abs(killing_symmetrization(chart, f, xi, p)) for xi in _SWEEP_16)


def killing_box_residual(chart, f, p):
    """max over the sweep of | |s(X)| - 0.5*|box_X f| | (calibration check)."""
    worst = 0.0
    for xi in _SWEEP_16:
        s = killing_symmetrization(chart, f, xi, p)
        b = _box_frame(chart, f, np.asarray(xi), p)
        worst = max(worst, abs(abs(s) - 0.5 * abs(b)))
    return worst


def conformal_rescale(chart, sigma):
    """New chart with conformal factor u + sigma."""
    if not sigma.basic:
        raise ValueError("conformal rescale field must not depend on t")
    u_new = combine("+", chart.u, sigma)
    return SurfaceChart(u_new, chart.domain, chart.cell,
                        name=f"{chart.name}+rescale")


def sample_surface_points(chart, n, rng):
    return [chart.domain.sample(rng) for _ in range(n)]
