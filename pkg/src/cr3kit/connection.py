"""Connections in the adapted frame.

The Levi-Civita coefficients come from the Koszul formula, which in an
orthonormal frame is algebraic in the structure functions

    2 Gamma^k_ij = c^k_ij - c^i_jk + c^j_ki,      c^k_ij := g([E_i, E_j], E_k),

with the structure functions computed by jet-differentiating the frame
coefficient fields.  The second connection is Levi-Civita plus a constant
frame correction:

    D_T T = 0,   D_X T = -JX,   D_T X = -JX,   D_X Y = g(JX, Y) T   (X, Y in Q),

which on a compatible chart parallelizes T, Q and J and has torsion
dη(X, Y) T on Q with vanishing mixed torsion (T is then a symmetry of the
whole structure).  Frame indices: 0 = T, 1 = E1, 2 = E2, and
gamma(i, j, k) is the E_k-coefficient of the derivative of E_j along E_i.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import jets

# constant frame correction added to Levi-Civita to get the second connection
TW_CORRECTION = np.zeros((3, 3, 3))
TW_CORRECTION[1][0][2] = -1.0
TW_CORRECTION[2][0][1] = 1.0
TW_CORRECTION[0][1][2] = -1.0
TW_CORRECTION[0][2][1] = 1.0
TW_CORRECTION[1][2][0] = 1.0
TW_CORRECTION[2][1][0] = -1.0


class FrameJets:
    """All frame-level jets at one point of a chart.

    Orders decrease along the derivative chain: with input order n the frame
    coefficients are order n, structure functions and connection coefficients
    order n-1, curvature order n-2.
    """

    def __init__(self, chart, p, order=jets.MAX_ORDER):
        if len(p) == 2:
            p = (p[0], p[1], 0.0)
        chart.require_inside(p)
        avail = chart.max_order()
        if order > avail:
            raise ValueError(
                f"chart '{chart.name}' provides jets up to order {avail}, "
                f"requested {order}")
        self.chart = chart
        self.p = tuple(float(v) for v in p)
        self.order = order
        self.u = chart.u_jet(self.p, order)
        self.ax, self.ay = chart.a_jets(self.p, order)
        self.emu = jets.exp(-self.u)
        self.epu = jets.exp(self.u)
        zero = self.u.new_const(0.0)
        one = self.u.new_const(1.0)
        # frame coefficient jets, rows (T, E1, E2), columns (x, y, t)
        self.e = [
            [zero, zero, one],
            [self.emu, zero, -(self.emu * self.ax)],
            [zero, self.emu, -(self.emu * self.ay)],
        ]

    def dframe(self, i, phi):
        """Directional derivative of a jet along frame vector E_i."""
        acc = None
        for c in range(3):
            term = self.e[i][c] * phi.deriv(c)
            acc = term if acc is None else acc + term
        return acc

    def frame_comps(self, vx, vy, vt):
        """Frame components (T, E1, E2) of coordinate-component jets."""
        return [vt + self.ax * vx + self.ay * vy, self.epu * vx, self.epu * vy]

    @cached_property
    def cbrack(self):
        """cbrack[i][j][k]: E_k-component jets of [E_i, E_j] (order - 1)."""
        cb = [[None] * 3 for _ in range(3)]
        for i, j in ((0, 1), (0, 2), (1, 2)):
            coord = []
            for c in range(3):
                acc = None
                for d in range(3):
                    term = (self.e[i][d] * self.e[j][c].deriv(d)
                            - self.e[j][d] * self.e[i][c].deriv(d))
                    acc = term if acc is None else acc + term
                coord.append(acc)
            cb[i][j] = self.frame_comps(*coord)
            cb[j][i] = [-v for v in cb[i][j]]
        cb[0][0] = cb[1][1] = cb[2][2] = [self.u.new_const(0.0).truncate(
            self.order - 1)] * 3
        return cb

    @cached_property
    def gamma_lc(self):
        """Levi-Civita coefficients as jets (order - 1), gamma[i][j][k]."""
        cb = self.cbrack
        g = [[[None] * 3 for _ in range(3)] for _ in range(3)]
        for i in range(3):
            for j in range(3):
                for k in range(3):
                    g[i][j][k] = (cb[i][j][k] - cb[j][k][i] + cb[k][i][j]) * 0.5
        return g

    @cached_property
    def gamma_tw(self):
        g = [[[None] * 3 for _ in range(3)] for _ in range(3)]
        for i in range(3):
            for j in range(3):
                for k in range(3):
                    g[i][j][k] = self.gamma_lc[i][j][k] + TW_CORRECTION[i][j][k]
        return g

    def gamma(self, kind):
        return self.gamma_tw if kind == "tw" else self.gamma_lc

    def gamma_values(self, kind):
        g = self.gamma(kind)
        out = np.zeros((3, 3, 3))
        for i in range(3):
            for j in range(3):
                for k in range(3):
                    out[i, j, k] = float(g[i][j][k].value())
        return out

    def tau_tilde_values(self):
        """Components of the mixed torsion tau(T, E_i) of the second connection."""
        g = self.gamma_tw
        cb = self.cbrack
        out = np.zeros((2, 3))
        for idx, i in enumerate((1, 2)):
            for k in range(3):
                out[idx, k] = float((g[0][i][k] - g[i][0][k] - cb[0][i][k]).value())
        return out

    def deta_frame(self):
        """d eta(E1, E2) = F e^{-2u} as a jet (order - 1)."""
        f = self.ay.deriv(0) - self.ax.deriv(1)
        return f * (self.emu * self.emu)


@dataclass
class FrameConnection:
    """Connection coefficients Gamma^k_ij = g(nabla_{E_i} E_j, E_k) on demand."""

    chart: object
    kind: str  # "levi_civita" | "tanaka_webster"

    def _key(self):
        return "tw" if self.kind == "tanaka_webster" else "lc"

    def gamma(self, i, j, k, p):
        fj = FrameJets(self.chart, p, order=1)
        return float(fj.gamma(self._key())[i][j][k].value())

    def gamma_table(self, p, order=1):
        fj = FrameJets(self.chart, p, order=order)
        return fj.gamma_values(self._key())


def levi_civita(chart):
    return FrameConnection(chart, "levi_civita")


def tanaka_webster(chart):
    return FrameConnection(chart, "tanaka_webster")


def structure_functions(chart, i, j, p):
    """Frame components (T, E1, E2) of [E_i, E_j] at p."""
    fj = FrameJets(chart, p, order=1)
    return np.array([float(v.value()) for v in fj.cbrack[i][j]])


def _j_comps(v):
    """J on frame components (T, E1, E2): kills T, rotates (E1, E2)."""
    return np.array([0.0, -v[2], v[1]])


def tw_axiom_suite(chart, p):
    """Defect report for the axioms of the second connection at p.

    Keys: parallel_T, parallel_Q, parallel_J, torsion_q, tau_tilde,
    tau_j_anti.  All vanish on a compatible chart.
    """
    fj = FrameJets(chart, p, order=1)
    g = fj.gamma_values("tw")
    cb = np.zeros((3, 3, 3))
    for i in range(3):
        for j in range(3):
            for k in range(3):
                cb[i, j, k] = float(fj.cbrack[i][j][k].value())

    parallel_T = float(np.abs(g[:, 0, :]).max())
    parallel_Q = float(np.abs(g[:, 1:, 0]).max())

    # (nabla J)(E_i)(E_j) = nabla_{E_i}(J E_j) - J (nabla_{E_i} E_j)^Q
    parallel_J = 0.0
    jmap = {1: (2, 1.0), 2: (1, -1.0)}  # J E1 = E2, J E2 = -E1
    for i in range(3):
        for j in (1, 2):
            jj, sgn = jmap[j]
            lhs = sgn * g[i, jj, :]
            rhs = _j_comps(g[i, j, :])
            parallel_J = max(parallel_J, float(np.abs(lhs - rhs).max()))

    deta12 = float(fj.deta_frame().value())
    tors = g[1, 2, :] - g[2, 1, :] - cb[1, 2, :] - deta12 * np.array([1.0, 0, 0])
    torsion_q = float(np.abs(tors).max())

    tt = fj.tau_tilde_values()
    tau_tilde = float(np.abs(tt).max())
    # tau~(J E1) + J tau~(E1) and tau~(J E2) + J tau~(E2)
    anti1 = tt[1] + _j_comps(tt[0])
    anti2 = -tt[0] + _j_comps(tt[1])
    tau_j_anti = float(max(np.abs(anti1).max(), np.abs(anti2).max()))

    return {
        "parallel_T": parallel_T,
        "parallel_Q": parallel_Q,
        "parallel_J": parallel_J,
        "torsion_q": torsion_q,
        "tau_tilde": tau_tilde,
        "tau_j_anti": tau_j_anti,
    }
