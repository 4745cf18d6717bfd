"""Circle-bundle charts over a conformal surface: contact form, adapted frame.

A chart is the data (u, A, fiber_len) on coordinates (x, y, t): base factor
e^{2u}, connection 1-form A = Ax dx + Ay dy, contact form eta = dt + A, and
the adapted orthonormal frame

    T = d_t,   E1 = e^{-u}(d_x - Ax d_t),   E2 = e^{-u}(d_y - Ay d_t),

with J E1 = E2, J E2 = -E1.  The compatibility F := dx Ay - dy Ax = 2 e^{2u}
makes eta a contact form whose Reeb field is T and whose induced metric

    g = eta^2 + e^{2u}(dx^2 + dy^2)

has T as a unit Killing field.  Exterior-derivative convention throughout:
d a(V, W) = V.a(W) - W.a(V) - a([V, W])  (no 1/2 factor), under which
d eta(E1, E2) = 2 on a compatible chart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import jets
from .errors import NotIntegrated
from .fields import CallableField, ScalarField, const_field, parse_field, parse_one_form
from .surface import SurfaceChart, catalog_surface


@dataclass
class ConnectionForm:
    ax: object
    ay: object

    def __post_init__(self):
        if not (self.ax.basic and self.ay.basic):
            raise ValueError("connection components must not depend on t")


@dataclass
class SasakiChart:
    base: SurfaceChart
    conn: ConnectionForm
    fiber_len: float = 1.0
    name: str = "custom"

    # -- jets of the defining fields -----------------------------------------

    def u_jet(self, p, order=jets.MAX_ORDER):
        return self.base.u.jet_at(p, order)

    def a_jets(self, p, order=jets.MAX_ORDER):
        return (self.conn.ax.jet_at(p, order), self.conn.ay.jet_at(p, order))

    def f_curv_jet(self, p, order):
        """Jet of F = dx Ay - dy Ax (needs connection jets one order higher)."""
        axj, ayj = self.a_jets(p, order + 1)
        return ayj.deriv(0) - axj.deriv(1)

    def max_order(self):
        return min(self.base.u.max_order, self.conn.ax.max_order,
                   self.conn.ay.max_order)

    # -- pointwise data --------------------------------------------------------

    def eta(self, V, p):
        axv, ayv = (float(j.value()) for j in self.a_jets(p, 0))
        return axv * V[0] + ayv * V[1] + V[2]

    def frame_at(self, p):
        """Coordinate components of (T, E1, E2) at p."""
        emu = math.exp(-float(self.u_jet(p, 0).value()))
        axv, ayv = (float(j.value()) for j in self.a_jets(p, 0))
        T = np.array([0.0, 0.0, 1.0])
        E1 = np.array([emu, 0.0, -emu * axv])
        E2 = np.array([0.0, emu, -emu * ayv])
        return T, E1, E2

    def frame_components(self, V, p):
        """Expand a coordinate vector in the adapted frame: (T, E1, E2) comps."""
        epu = math.exp(float(self.u_jet(p, 0).value()))
        return np.array([self.eta(V, p), epu * V[0], epu * V[1]])

    def from_frame(self, comps, p):
        T, E1, E2 = self.frame_at(p)
        return comps[0] * T + comps[1] * E1 + comps[2] * E2

    def require_inside(self, p):
        self.base.require_inside(p)

    # -- vector fields ---------------------------------------------------------

    def frame_fields(self):
        def mk(which):
            def fn(point, order):
                uj = self.u_jet(point, order)
                emu = jets.exp(-uj)
                if which == "e1x" or which == "e2y":
                    return emu
                axj, ayj = self.a_jets(point, order)
                if which == "e1t":
                    return -(emu * axj)
                return -(emu * ayj)
            return CallableField(fn, basic=True, label=which)

        zero = const_field(0.0)
        one = const_field(1.0)
        T = VecField(self, (zero, zero, one))
        E1 = VecField(self, (mk("e1x"), zero, mk("e1t")))
        E2 = VecField(self, (zero, mk("e2y"), mk("e2t")))
        return T, E1, E2


class VecField:
    """Vector field on a chart, given by three coordinate-component fields."""

    def __init__(self, chart, components):
        comps = []
        for c in components:
            if isinstance(c, str):
                c = parse_field(c)
            elif isinstance(c, (int, float)):
                c = const_field(c)
            comps.append(c)
        self.chart = chart
        self.comps = tuple(comps)

    def comp_jets(self, p, order):
        return tuple(c.jet_at(p, order) for c in self.comps)

    def at(self, p):
        return np.array([float(c.jet_at(p, 0).value()) for c in self.comps])

    def bracket(self, other, p, order=1):
        """Coordinate components of [self, other] at p."""
        vj = self.comp_jets(p, order + 1)
        wj = other.comp_jets(p, order + 1)
        out = []
        for c in range(3):
            acc = None
            for d in range(3):
                term = vj[d] * wj[c].deriv(d) - wj[d] * vj[c].deriv(d)
                acc = term if acc is None else acc + term
            out.append(acc)
        if order == 0:
            return np.array([float(j.value()) for j in out])
        return out


def q_project(chart, V, p):
    """Pointwise projection of a coordinate vector onto Q along T."""
    e = chart.eta(V, p)
    return np.array([V[0], V[1], V[2] - e])


def j_apply(chart, V, p):
    """Pointwise J on a Q-vector in coordinates (result again in Q)."""
    axv, ayv = (float(j.value()) for j in chart.a_jets(p, 0))
    return np.array([-V[1], V[0], axv * V[1] - ayv * V[0]])


def j_field(chart, V):
    """J applied to a Q-valued vector field, as a field."""
    vx, vy, _ = V.comps

    def tcomp(point, order):
        axj, ayj = chart.a_jets(point, order)
        return axj * vy.jet_at(point, order) - ayj * vx.jet_at(point, order)

    neg_vy = CallableField(lambda p, n: -vy.jet_at(p, n), basic=vy.basic,
                           max_order=vy.max_order, label="-Vy")
    tf = CallableField(tcomp, basic=vx.basic and vy.basic,
                       max_order=min(vx.max_order, vy.max_order), label="J.t")
    return VecField(chart, (neg_vy, vx, tf))


# -- model catalog -------------------------------------------------------------

_CATALOG_A = {
    "flat": ("-y", "x"),
    "round": ("-4*y/(1+x^2+y^2)", "4*x/(1+x^2+y^2)"),
    "hyperbolic": ("-4*y/(1-x^2-y^2)", "4*x/(1-x^2-y^2)"),
}


class QuadraturePotential:
    """Connection component Ay(x, y) = int_0^x 2 e^{2u(s, y)} ds, jet-exact.

    The x-derivative coefficients come straight from the jet of 2 e^{2u};
    the x-independent coefficients are Gauss-Legendre integrals of its
    y-derivatives along the segment.  The chart built from (0, Ay) satisfies
    the curvature compatibility F = 2 e^{2u} to quadrature accuracy.
    """

    def __init__(self, u_field, nodes=48):
        self.u = u_field
        self.basic = True
        self.max_order = min(jets.MAX_ORDER, u_field.max_order)
        self.nodes, self.weights = np.polynomial.legendre.leggauss(nodes)
        self.label = "quadrature-potential"

    def _g_jet(self, point, order):
        return jets.exp(self.u.jet_at(point, order) * 2.0) * 2.0

    def jet_at(self, point, order=jets.MAX_ORDER):
        if order > self.max_order:
            raise ValueError("quadrature potential cannot deliver this jet order")
        x0, y0 = float(point[0]), float(point[1])
        base = (x0, y0, float(point[2]) if len(point) > 2 else 0.0)
        c = np.zeros(jets.SIZE[order])
        if order >= 1:
            gj = self._g_jet(base, order - 1)
            for pos, (i, j, k) in enumerate(jets.MULTI_INDICES[:jets.SIZE[order]]):
                if k == 0 and i >= 1:
                    c[pos] = gj.c[jets.INDEX_OF[(i - 1, j, 0)]] / i
        # pure-y coefficients: integrate d_y^j G over [0, x0]
        half = 0.5 * x0
        ydervs = np.zeros(order + 1)
        for s, w in zip(half * (self.nodes + 1.0), self.weights):
            gj = self._g_jet((s, y0, 0.0), order)
            for j in range(order + 1):
                ydervs[j] += w * float(gj.c[jets.INDEX_OF[(0, j, 0)]])
        for j in range(order + 1):
            c[jets.INDEX_OF[(0, j, 0)]] = half * ydervs[j]
        return jets.Jet(c, order, base)

    def __call__(self, x, y, t=0.0):
        return float(self.jet_at((x, y, t), 0).value())


def build_model(name, u=None, A=None, fiber_len=1.0):
    """Construct a catalog or custom chart.

    `A` for custom charts: a pair of component expressions/fields, a 1-form
    string like "x*dy - y*dx", or "auto-x" for the quadrature potential gauge
    (0, int 2e^{2u} dx).  Catalog connections can be overridden the same way.
    """
    if name in _CATALOG_A:
        base = catalog_surface(name)
        if A is None:
            ax, ay = (parse_field(s) for s in _CATALOG_A[name])
        else:
            ax, ay = _coerce_connection(A, base)
        return SasakiChart(base, ConnectionForm(ax, ay), fiber_len, name)
    if name == "custom":
        if u is None:
            raise ValueError("custom model needs a conformal factor")
        base = catalog_surface("custom", u)
        if A is None:
            raise NotIntegrated(
                "custom chart needs an explicit connection: pass component "
                "expressions, a 1-form, or 'auto-x' for the quadrature gauge")
        ax, ay = _coerce_connection(A, base)
        return SasakiChart(base, ConnectionForm(ax, ay), fiber_len, "custom")
    raise ValueError(f"unknown model '{name}'")


def _coerce_connection(A, base):
    if isinstance(A, str):
        if A == "auto-x":
            return const_field(0.0), QuadraturePotential(base.u)
        return parse_one_form(A)
    ax, ay = A
    if isinstance(ax, str):
        ax = parse_field(ax)
    if isinstance(ay, str):
        ay = parse_field(ay)
    return ax, ay


def build_from_config(cfg):
    cfg = dict(cfg)
    name = cfg.pop("model", "custom")
    u = cfg.pop("u", None)
    A = cfg.pop("A", None)
    fiber_len = float(cfg.pop("fiber_len", 1.0))
    if cfg:
        raise ValueError(f"unknown config keys: {sorted(cfg)}")
    if A is not None and isinstance(A, (list, tuple)):
        A = tuple(A)
    return build_model(name, u=u, A=A, fiber_len=fiber_len)


# -- chart diagnostics ---------------------------------------------------------


def kk_consistency(chart, p):
    """|F - 2 e^{2u}| at p; the chart is compatible only where this vanishes."""
    chart.require_inside(p)
    f = float(chart.f_curv_jet(p, 0).value())
    e2u = math.exp(2.0 * float(chart.u_jet(p, 0).value()))
    return abs(f - 2.0 * e2u)


def metric_eval(chart, V, W, p):
    """g(V, W) = eta(V) eta(W) + e^{2u}(Vx Wx + Vy Wy)."""
    e2u = math.exp(2.0 * float(chart.u_jet(p, 0).value()))
    return chart.eta(V, p) * chart.eta(W, p) + e2u * (V[0] * W[0] + V[1] * W[1])


def metric_eval_direct(chart, V, W, p):
    """Same metric assembled from the defining 1-form data:
    eta(V) eta(W) - 1/2 d eta(J0 V, W), with F computed from jets."""
    f = float(chart.f_curv_jet(p, 0).value())
    jv = j_apply(chart, q_project(chart, V, p), p)
    deta = f * (jv[0] * W[1] - jv[1] * W[0])
    return chart.eta(V, p) * chart.eta(W, p) - 0.5 * deta


def deta_eval(chart, V, W, p):
    """d eta(V, W) = F (Vx Wy - Vy Wx)."""
    f = float(chart.f_curv_jet(p, 0).value())
    return f * (V[0] * W[1] - V[1] * W[0])


def levi_form(chart, X, Y, p):
    """(L, h) with L(X, Y) = eta([X, Y]) and h(X, Y) = -1/2 d eta(JX, Y).

    X, Y are Q-valued vector fields (VecField); L needs first derivatives of
    their components and is computed from jets.
    """
    br = X.bracket(Y, p, order=0)
    L = chart.eta(br, p)
    jx = j_apply(chart, X.at(p), p)
    h = -0.5 * deta_eval(chart, jx, Y.at(p), p)
    return L, h


def nijenhuis(chart, X, Y, p):
    """Frame components (E1, E2, T) of 4N(X, Y) for Q-valued fields X, Y."""
    JX = j_field(chart, X)
    JY = j_field(chart, Y)
    b_jxjy = JX.bracket(JY, p, order=0)
    b_jxy = JX.bracket(Y, p, order=0)
    b_xjy = X.bracket(JY, p, order=0)
    b_xy = X.bracket(Y, p, order=0)
    val = (b_jxjy
           - j_apply(chart, q_project(chart, b_jxy, p), p)
           - j_apply(chart, q_project(chart, b_xjy, p), p)
           - b_xy)
    comps = chart.frame_components(val, p)
    return np.array([comps[1], comps[2], comps[0]])


def q_vec_field(chart, a, b):
    """Q-valued field a*E1 + b*E2 from two scalar component fields."""
    if isinstance(a, str):
        a = parse_field(a)
    if isinstance(b, str):
        b = parse_field(b)

    def comp(which):
        def fn(point, order):
            uj = chart.u_jet(point, order)
            emu = jets.exp(-uj)
            aj = a.jet_at(point, order)
            bj = b.jet_at(point, order)
            if which == "x":
                return emu * aj
            if which == "y":
                return emu * bj
            axj, ayj = chart.a_jets(point, order)
            return -(emu * (axj * aj + ayj * bj))
        return CallableField(fn, basic=a.basic and b.basic,
                             max_order=min(a.max_order, b.max_order),
                             label=f"q[{which}]")

    return VecField(chart, (comp("x"), comp("y"), comp("t")))


def reeb_check(chart, V, p):
    """(|eta(V) - 1|, max_W |d eta(V, W)|) over the frame directions W."""
    v = V.at(p) if isinstance(V, VecField) else np.asarray(V, dtype=float)
    defect_eta = abs(chart.eta(v, p) - 1.0)
    worst = 0.0
    for W in chart.frame_at(p):
        worst = max(worst, abs(deta_eval(chart, v, W, p)))
    return defect_eta, worst


def sample_chart_points(chart, n, rng):
    """Seeded in-domain points (x, y, t), t uniform over one fiber length."""
    pts = []
    for _ in range(n):
        x, y = chart.base.domain.sample(rng)
        pts.append((x, y, rng.uniform(0.0, chart.fiber_len)))
    return pts


def grid_points(chart, n, t=0.0):
    return [(x, y, t) for (x, y) in chart.base.domain.grid(n)]
