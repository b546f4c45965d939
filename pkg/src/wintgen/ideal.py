"""Adapted frames and scalar invariants of ideal points.

At an ideal point the trace-free conformal shape operators share a kernel
line and act on the orthogonal plane D as a fixed two-matrix pattern after a
rotation.  This module builds that adapted frame twice: once as plain linear
algebra at the base point, then again as jet fields extending it, so that
covariant derivatives of the adapted components (the scalars U, V, L, G,
lambda, Fhat, Ghat and the 1-form omega) are honest derivatives of smooth
fields and the classification verdicts can be evaluated per sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import jetalg, jets
from .classical import ddvv_from_forms
from .errors import IntegrableDistribution, NotIdealPoint
from .immersion import ImmersionSpec
from .moebius import (MoebiusData, frame_scalar_d, frame_vector_d, ldot,
                      moebius_data)

SQRT6 = math.sqrt(6.0)


def _halfangle(c2_p, s2_p, c2, s2):
    """cos t and sin t given cos 2t, sin 2t; the branch is picked from the
    base-point values (floats) so the square root stays off zero.  Works for
    floats and jets alike."""
    if c2_p >= 0.0:
        ct = jets.sqrt((1.0 + c2) * 0.5)
        st = s2 / (2.0 * ct)
    else:
        sgn = 1.0 if s2_p >= 0.0 else -1.0
        st = sgn * jets.sqrt((1.0 - c2) * 0.5)
        ct = s2 / (2.0 * st)
    return ct, st


def _quadform(u, M, v):
    acc = None
    for i in range(3):
        for j in range(3):
            t = u[i] * M[i][j] * v[j]
            acc = t if acc is None else acc + t
    return acc


def _covb_values(ctx):
    cached = getattr(ctx, "_covb_vals", None)
    if cached is None:
        cached = np.array(jetalg.values(ctx.covB))
        ctx._covb_vals = cached
    return cached


def _oriented_torsion(ctx, Bv, E1, E2, E3):
    """The kernel-direction torsion scalar, computed gauge-independently:
    (3/2) sum_r tr((nabla_{E3} B^r)^T J B^r) with J the rotation by +pi/2
    of the plane oriented by (E1, E2).  Odd in E3, even under the residual
    frame freedom, so it fixes the E3 sign."""
    covB = _covb_values(ctx)
    J = np.outer(E2, E1) - np.outer(E1, E2)
    total = 0.0
    for r in range(2):
        d3B = covB[r] @ E3
        total += float(np.sum(d3B * (J @ Bv[r])))
    return 1.5 * total


class CanonicalFields:
    """The adapted frame at one ideal point, as jet fields.

    Rf rows are the adapted tangent frame in components of the raw
    (Gram-Schmidt) frame; Qf columns express the adapted normal sphere pair
    through the raw one.  All component fields (b, c, connection and their
    covariant derivatives) refer to this frame.
    """

    def __init__(self, data: MoebiusData, gauge: str = "raw", e3_hint=None,
                 pregauge=None, ltol: float = 1e-6, strict: bool = True):
        if gauge not in ("raw", "V0"):
            raise ValueError(f"unknown gauge {gauge!r}")
        ctx = data.ctx
        self.ctx = ctx
        self.data = data
        self.gauge = gauge
        self.ltol = float(ltol)

        cl = ctx.classical
        hv = np.array(jetalg.values(cl.h))
        Hv = np.array(jetalg.values(cl.H))
        report = ddvv_from_forms(hv, Hv, cl.spec.ambient.c)
        if not report.ideal:
            raise NotIdealPoint(
                f"equality gap {report.slack:.3e} at {ctx.p}: not an ideal point")

        if pregauge is None:
            M0 = np.eye(3)
            Q0 = np.eye(2)
        else:
            t = float(pregauge)
            M0 = np.array([[math.cos(t), -math.sin(t), 0.0],
                           [math.sin(t), math.cos(t), 0.0],
                           [0.0, 0.0, 1.0]])
            Q0 = np.array([[math.cos(2 * t), -math.sin(2 * t)],
                           [math.sin(2 * t), math.cos(2 * t)]])

        # working-gauge shape fields: normal mix by Q0, components in the
        # rotated tangent frame
        Bmix = [[[None] * 3 for _ in range(3)] for _ in range(2)]
        for r in range(2):
            for i in range(3):
                for j in range(3):
                    Bmix[r][i][j] = Q0[0][r] * ctx.B[0][i][j] \
                        + Q0[1][r] * ctx.B[1][i][j]
        Bw = [[[None] * 3 for _ in range(3)] for _ in range(2)]
        for r in range(2):
            for i in range(3):
                for j in range(3):
                    acc = None
                    for a in range(3):
                        for b in range(3):
                            if M0[i][a] == 0.0 or M0[j][b] == 0.0:
                                continue
                            t_ = (M0[i][a] * M0[j][b]) * Bmix[r][a][b]
                            acc = t_ if acc is None else acc + t_
                    Bw[r][i][j] = acc

        # ---- pointwise stage -------------------------------------------------
        Bv = np.array(jetalg.values(Bw))
        stacked = np.vstack([Bv[0], Bv[1]])
        _, sing, vt = np.linalg.svd(stacked)
        if sing[2] > 1e-6 * sing[0]:
            raise NotIdealPoint(
                f"trace-free forms have no common kernel at {ctx.p} "
                f"(singular values {sing[2]:.3e} vs {sing[0]:.3e})")
        q = vt[2]

        k0 = int(np.argmin(np.abs(q)))
        F1p = -q[k0] * q
        F1p[k0] += 1.0
        F1p /= np.linalg.norm(F1p)
        F2p = np.cross(q, F1p)

        z = [complex(F1p @ Bv[r] @ F1p, F1p @ Bv[r] @ F2p) for r in range(2)]
        s2flip = 1.0 if (z[0] * z[1].conjugate()).imag >= 0.0 else -1.0
        az = abs(z[0])
        if az < 1e-12:
            raise NotIdealPoint(f"degenerate shape pattern at {ctx.p}")
        c2p = z[0].imag / az
        s2p = z[0].real / az
        ctp, stp = _halfangle(c2p, s2p, c2p, s2p)
        E1p = ctp * F1p - stp * F2p
        E2p = stp * F1p + ctp * F2p

        # E3 sign: torsion positive at a fresh basepoint, continuity otherwise
        ECv = np.array(jetalg.values(ctx.EC))
        Lq = _oriented_torsion(ctx, data.B, E1p @ M0, E2p @ M0, q @ M0)
        if e3_hint is not None:
            q_chart = (q @ M0) @ ECv
            sign = 1.0 if float(q_chart @ np.asarray(e3_hint, dtype=float)) >= 0 \
                else -1.0
        elif abs(Lq) <= ltol:
            if strict:
                raise IntegrableDistribution(
                    f"torsion {Lq:.3e} below {ltol:g} at {ctx.p}: the kernel "
                    "distribution is integrable and the E3 sign is undefined")
            sign = 1.0
        else:
            sign = 1.0 if Lq > 0 else -1.0
        q = sign * q

        # ---- field stage -----------------------------------------------------
        adj = [jetalg.adjugate3(Bw[r]) for r in range(2)]
        P = [[-(adj[0][i][j] + adj[1][i][j]) for j in range(3)] for i in range(3)]
        e3f = jetalg.normalize(jetalg.matvec(P, [float(v) for v in q]))

        proj = jetalg.dot(list(F1p), e3f)
        F1f = jetalg.normalize([F1p[j] - proj * e3f[j] for j in range(3)])
        crossf = jetalg.cross3(e3f, F1f)
        sig = 1.0 if float(np.dot(F2p, np.array(jetalg.values(crossf)))) >= 0 \
            else -1.0
        F2f = [sig * c for c in crossf]

        p1f = _quadform(F1f, Bw[0], F1f)
        q1f = _quadform(F1f, Bw[0], F2f)
        azf = jets.sqrt(p1f * p1f + q1f * q1f)
        ctf, stf = _halfangle(c2p, s2p, q1f / azf, p1f / azf)
        E1f = [ctf * F1f[j] - stf * F2f[j] for j in range(3)]
        E2f = [stf * F1f[j] + ctf * F2f[j] for j in range(3)]

        Rw = [E1f, E2f, e3f]
        Rf = [[None] * 3 for _ in range(3)]
        for i in range(3):
            for j in range(3):
                acc = None
                for k in range(3):
                    if M0[k][j] == 0.0:
                        continue
                    t_ = Rw[i][k] * M0[k][j]
                    acc = t_ if acc is None else acc + t_
                Rf[i][j] = acc
        Qf = [[Q0[0][0], s2flip * Q0[0][1]],
              [Q0[1][0], s2flip * Q0[1][1]]]

        self.Rf = Rf
        self.Qf = Qf
        self.mu_field0 = azf  # |z1| in the working frame, a scalar invariant

        if gauge == "V0":
            self._apply_v0()

    # -- gauge refinement -----------------------------------------------------

    def _apply_v0(self):
        """Residual paired rotation making the second component of the
        adapted 1-form vanish, with the first one nonnegative."""
        cU = self._contract_c(0, 0)
        cV = self._contract_c(0, 1)
        Uf = -(cU / self.mu_field0)
        Vf = cV / self.mu_field0
        h = math.hypot(jets.value_of(Uf), jets.value_of(Vf))
        if h <= 1e-8:
            return  # already in the reduced form
        hf = jets.sqrt(Uf * Uf + Vf * Vf)
        cst = Uf / hf
        sst = -(Vf / hf)
        Rf = self.Rf
        newE1 = [cst * Rf[0][j] - sst * Rf[1][j] for j in range(3)]
        newE2 = [sst * Rf[0][j] + cst * Rf[1][j] for j in range(3)]
        self.Rf = [newE1, newE2, Rf[2]]
        c2 = cst * cst - sst * sst
        s2 = 2.0 * cst * sst
        K = [[c2, -(s2)], [s2, c2]]
        Qf = self.Qf
        self.Qf = [[Qf[s][0] * K[0][r] + Qf[s][1] * K[1][r] for r in range(2)]
                   for s in range(2)]

    def _contract_c(self, r, i):
        """C paired with the adapted normal r and tangent i (jet)."""
        acc = None
        for s in range(2):
            inner = None
            for j in range(3):
                t = self.Rf[i][j] * self.ctx.C[s][j]
                inner = t if inner is None else inner + t
            t = self.Qf[s][r] * inner
            acc = t if acc is None else acc + t
        return acc

    # -- frame derivative helpers ----------------------------------------------

    def d(self, f, k):
        """Derivative of a scalar jet field along adapted frame vector k."""
        acc = None
        for j in range(3):
            t = self.Rf[k][j] * frame_scalar_d(self.ctx.EC, f, j)
            acc = t if acc is None else acc + t
        return acc

    def dvec(self, vec, k):
        return [self.d(c, k) for c in vec]

    # -- component fields --------------------------------------------------------

    @cached_property
    def Rfv(self):
        return np.array(jetalg.values(self.Rf))

    @cached_property
    def E_chart(self):
        return self.Rfv @ np.array(jetalg.values(self.ctx.EC))

    @cached_property
    def xi(self):
        out = []
        for r in range(2):
            vec = []
            for m in range(7):
                acc = None
                for s in range(2):
                    t = self.Qf[s][r] * self.ctx.xi[s][m]
                    acc = t if acc is None else acc + t
                vec.append(acc)
            out.append(vec)
        return out

    @cached_property
    def b(self):
        Bmix = []
        for r in range(2):
            m = [[None] * 3 for _ in range(3)]
            for i in range(3):
                for j in range(3):
                    m[i][j] = self.Qf[0][r] * self.ctx.B[0][i][j] \
                        + self.Qf[1][r] * self.ctx.B[1][i][j]
            Bmix.append(m)
        return [[[_quadform(self.Rf[i], Bmix[r], self.Rf[j])
                  for j in range(3)] for i in range(3)] for r in range(2)]

    @cached_property
    def cfield(self):
        return [[self._contract_c(r, i) for i in range(3)] for r in range(2)]

    @cached_property
    def theta(self):
        return [ldot(self.dvec(self.xi[0], k), self.xi[1]) for k in range(3)]

    @cached_property
    def theta_chart(self):
        """Normal connection of the adapted sphere pair in chart components."""
        out = []
        for a in range(3):
            d1 = [jets.derivative(c, a + 1) for c in self.xi[0]]
            out.append(ldot(d1, self.xi[1]))
        return out

    def d_form_on(self, chart_form, i, j):
        """Exterior derivative of a chart 1-form (jets), evaluated on adapted
        frame vectors i, j (a value)."""
        E = self.E_chart
        total = 0.0
        for a in range(3):
            for b in range(3):
                if a == b:
                    continue
                dab = jets.value_of(jets.derivative(chart_form[b], a + 1)
                                    - jets.derivative(chart_form[a], b + 1))
                total += E[i][a] * E[j][b] * dab
        return total

    @cached_property
    def omega_can(self):
        """omega[i][j][k]: connection form of the adapted frame on its own
        vectors, from the raw connection plus the rotation's derivative."""
        ctx = self.ctx
        Rf = self.Rf
        out = [[[None] * 3 for _ in range(3)] for _ in range(3)]
        for i in range(3):
            for j in range(i):
                for k in range(3):
                    acc = None
                    for a in range(3):
                        t = self.d(Rf[i][a], k) * Rf[j][a]
                        acc = t if acc is None else acc + t
                    for a in range(3):
                        for bb in range(3):
                            if a == bb:
                                continue
                            raw = None
                            for c in range(3):
                                t = Rf[k][c] * ctx.omega[a][bb][c]
                                raw = t if raw is None else raw + t
                            acc = acc + Rf[i][a] * Rf[j][bb] * raw
                    out[i][j][k] = acc
                    out[j][i][k] = -acc
        zero = 0.0 * out[1][0][0]
        for i in range(3):
            out[i][i] = [zero] * 3
        return out

    @cached_property
    def covb(self):
        out = []
        for r in range(2):
            s = 1 - r
            sgn = 1.0 if s == 0 else -1.0  # theta_sr relative to theta_12
            mat = [[[None] * 3 for _ in range(3)] for _ in range(3)]
            for i in range(3):
                for j in range(3):
                    for k in range(3):
                        acc = self.d(self.b[r][i][j], k)
                        for l in range(3):
                            acc = acc + self.b[r][i][l] * self.omega_can[l][j][k]
                            acc = acc + self.b[r][l][j] * self.omega_can[l][i][k]
                        acc = acc + self.b[s][i][j] * (sgn * self.theta[k])
                        mat[i][j][k] = acc
            out.append(mat)
        return out

    @cached_property
    def covc(self):
        out = []
        for r in range(2):
            s = 1 - r
            sgn = 1.0 if s == 0 else -1.0
            mat = [[None] * 3 for _ in range(3)]
            for i in range(3):
                for j in range(3):
                    acc = self.d(self.cfield[r][i], j)
                    for k in range(3):
                        acc = acc + self.cfield[r][k] * self.omega_can[k][i][j]
                    acc = acc + self.cfield[s][i] * (sgn * self.theta[j])
                    mat[i][j] = acc
            out.append(mat)
        return out

    @cached_property
    def Yi_can(self):
        out = []
        for i in range(3):
            vec = []
            for m in range(7):
                acc = None
                for j in range(3):
                    t = self.Rf[i][j] * self.ctx.Yi[j][m]
                    acc = t if acc is None else acc + t
                vec.append(acc)
            out.append(vec)
        return out

    @cached_property
    def coframe_can(self):
        """Rows: the adapted coframe in chart components (jets)."""
        return [[sum_jets([self.Rf[i][j] * self.ctx.coframe[j][a]
                           for j in range(3)]) for a in range(3)]
                for i in range(3)]

    @cached_property
    def A_can(self):
        return self.Rfv @ self.data.A @ self.Rfv.T

    @cached_property
    def A_can_field(self):
        A = self.ctx.A_gauss
        out = [[None] * 3 for _ in range(3)]
        for i in range(3):
            for j in range(3):
                acc = None
                for a in range(3):
                    for bb in range(3):
                        t = self.Rf[i][a] * A[a][bb] * self.Rf[j][bb]
                        acc = t if acc is None else acc + t
                out[i][j] = acc
        return out

    # -- named scalars -------------------------------------------------------------

    @cached_property
    def mu_field(self):
        return self.b[0][0][1]

    @cached_property
    def mu(self):
        return jets.value_of(self.mu_field)

    @cached_property
    def Uf(self):
        return -(self.cfield[0][0] / self.mu_field)

    @cached_property
    def Vf(self):
        return self.cfield[0][1] / self.mu_field

    @cached_property
    def Lf(self):
        return -(self.covb[0][0][0][2] / self.mu_field)

    @cached_property
    def Gf(self):
        return (self.covc[0][0][0] - self.covc[0][1][1]) / (2.0 * self.mu_field)

    @cached_property
    def L(self):
        return jets.value_of(self.Lf)

    @cached_property
    def G(self):
        return jets.value_of(self.Gf)

    @cached_property
    def integrable(self):
        return abs(self.L) <= self.ltol

    def require_torsion(self):
        if self.integrable:
            raise IntegrableDistribution(
                f"|L| = {abs(self.L):.3e} <= {self.ltol:g} at {self.ctx.p}: "
                "lambda = G/L is undefined (integrable kernel distribution)")

    @cached_property
    def lamf(self):
        self.require_torsion()
        return self.Gf / self.Lf

    @cached_property
    def w_fields(self):
        return [-(self.Vf), self.Uf, self.lamf]

    @cached_property
    def omega_chart(self):
        """The distinguished 1-form in chart components (jets)."""
        w = self.w_fields
        co = self.coframe_can
        return [sum_jets([w[i] * co[i][a] for i in range(3)]) for a in range(3)]

    @cached_property
    def domega_values(self):
        """(domega(E1,E2), domega(E1,E3), domega(E2,E3))."""
        om = self.omega_chart
        dom = np.zeros((3, 3))
        for a in range(3):
            for bb in range(3):
                if a < bb:
                    dom[a, bb] = jets.value_of(jets.derivative(om[bb], a + 1)
                                               - jets.derivative(om[a], bb + 1))
                    dom[bb, a] = -dom[a, bb]
        E = self.E_chart
        pairs = [(0, 1), (0, 2), (1, 2)]
        return tuple(float(E[i] @ dom @ E[j]) for i, j in pairs)

    @cached_property
    def Fhat_field(self):
        lam2 = self.lamf * self.lamf
        return self.A_can_field[0][0] \
            + 0.5 * (self.Uf * self.Uf + self.Vf * self.Vf - lam2) \
            - self.covc[0][1][0] / self.mu_field

    @cached_property
    def pattern_residual(self):
        bv = np.array(jetalg.values(self.b))
        mu = (bv[0, 0, 1] + bv[0, 1, 0] + bv[1, 0, 0] - bv[1, 1, 1]) / 4.0
        target = np.zeros((2, 3, 3))
        target[0, 0, 1] = target[0, 1, 0] = mu
        target[1, 0, 0] = mu
        target[1, 1, 1] = -mu
        return float(np.max(np.abs(bv - target)))


def sum_jets(terms):
    acc = None
    for t in terms:
        acc = t if acc is None else acc + t
    return acc


# ---------------------------------------------------------------------------
# public types


@dataclass(frozen=True)
class CanonicalFrame3:
    E: np.ndarray             # rows E1,E2,E3 in chart components
    xi: np.ndarray            # (2,7) adapted normal sphere pair
    mu: float
    gauge: str
    pattern_residual: float
    fields: CanonicalFields

    @property
    def E3_chart(self):
        return self.E[2]


def canonical_frame3(data: MoebiusData, gauge: str = "raw", e3_hint=None,
                     pregauge=None, ltol: float = 1e-6,
                     strict: bool = True) -> CanonicalFrame3:
    cf = CanonicalFields(data, gauge=gauge, e3_hint=e3_hint,
                         pregauge=pregauge, ltol=ltol, strict=strict)
    return CanonicalFrame3(
        E=cf.E_chart, xi=np.array(jetalg.values(cf.xi)), mu=cf.mu,
        gauge=cf.gauge, pattern_residual=cf.pattern_residual, fields=cf)


@dataclass(frozen=True)
class WintgenInvariants:
    U: float
    V: float
    L: float
    G: float
    lam: float
    Fhat: float
    Ghat: float
    omega_coeffs: tuple
    domega: tuple
    theta12_coeffs: tuple
    Omega12_coeffs: tuple
    mu: float
    gauge: str
    omega_chart: tuple


def _analyze(spec: ImmersionSpec, p, gauge="raw", order=5, ltol=1e-6,
             e3_hint=None, pregauge=None, strict=True,
             data: MoebiusData | None = None):
    if data is None:
        data = moebius_data(spec, p, order=order)
    return CanonicalFields(data, gauge=gauge, e3_hint=e3_hint,
                           pregauge=pregauge, ltol=ltol, strict=strict)


def _package_invariants(cf: CanonicalFields, partial: bool) -> WintgenInvariants:
    U = jets.value_of(cf.Uf)
    V = jets.value_of(cf.Vf)
    mu = cf.mu
    om12 = tuple(jets.value_of(cf.omega_can[0][1][k]) for k in range(3))
    Omega12 = (om12[0] + U, om12[1] + V, om12[2])
    # normal connection in the residual-rotation normal form: the raw
    # coefficients depend on how the frame field twists, but theta + 2 Omega12
    # does not, and it is the triple the constant-coefficient examples quote
    theta_c = tuple(jets.value_of(cf.theta[k]) + 2.0 * Omega12[k]
                    for k in range(3))
    if cf.integrable and partial:
        nan = float("nan")
        return WintgenInvariants(
            U=U, V=V, L=cf.L, G=cf.G, lam=nan, Fhat=nan, Ghat=nan,
            omega_coeffs=(-V, U, nan), domega=(nan, nan, nan),
            theta12_coeffs=theta_c, Omega12_coeffs=Omega12, mu=mu,
            gauge=cf.gauge, omega_chart=(nan, nan, nan))
    cf.require_torsion()
    lam = jets.value_of(cf.lamf)
    Fhat = jets.value_of(cf.Fhat_field)
    Ghat = cf.A_can[0, 1] - jets.value_of(cf.covc[0][1][1]) / mu - lam * cf.L
    return WintgenInvariants(
        U=U, V=V, L=cf.L, G=cf.G, lam=lam, Fhat=Fhat, Ghat=Ghat,
        omega_coeffs=(-V, U, lam), domega=cf.domega_values,
        theta12_coeffs=theta_c, Omega12_coeffs=Omega12, mu=mu, gauge=cf.gauge,
        omega_chart=tuple(jets.value_of(c) for c in cf.omega_chart))


def invariants_uvlg(spec: ImmersionSpec, p, gauge: str = "raw", order: int = 5,
                    ltol: float = 1e-6, e3_hint=None, pregauge=None,
                    partial: bool = False,
                    data: MoebiusData | None = None) -> WintgenInvariants:
    cf = _analyze(spec, p, gauge=gauge, order=order, ltol=ltol,
                  e3_hint=e3_hint, pregauge=pregauge, strict=not partial,
                  data=data)
    return _package_invariants(cf, partial)


# ---------------------------------------------------------------------------
# hat frame


@dataclass(frozen=True)
class HatFrameData:
    eta: np.ndarray          # (3,7)
    Yhat: np.ndarray         # (7,)
    hat_coframe: np.ndarray  # [i][j] = hat-omega_i(E_j)
    Omega13: tuple
    Omega23: tuple
    lam: float


def hat_frame(spec: ImmersionSpec, p, lam: float | None = None,
              gauge: str = "raw", order: int = 5, e3_hint=None,
              data: MoebiusData | None = None,
              fields: CanonicalFields | None = None) -> HatFrameData:
    cf = fields if fields is not None else _analyze(
        spec, p, gauge=gauge, order=order, e3_hint=e3_hint, data=data)
    if lam is None:
        lamf = cf.lamf
        lam_val = jets.value_of(lamf)
    else:
        lamf = float(lam)
        lam_val = float(lam)
    w = [-(cf.Vf), cf.Uf, lamf]
    Y = cf.ctx.Y
    eta_f = [[cf.Yi_can[i][m] - w[i] * Y[m] for m in range(7)] for i in range(3)]
    w2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2]
    Yhat_f = [cf.ctx.N[m] - 0.5 * w2 * Y[m]
              + w[0] * cf.Yi_can[0][m] + w[1] * cf.Yi_can[1][m]
              + w[2] * cf.Yi_can[2][m] for m in range(7)]
    eta_v = np.array(jetalg.values(eta_f))
    hat_co = np.zeros((3, 3))
    for j in range(3):
        dY = np.array(jetalg.values(cf.dvec(Yhat_f, j)))
        for i in range(3):
            hat_co[i, j] = -dY[0] * eta_v[i][0] + float(np.dot(dY[1:], eta_v[i][1:]))
    return HatFrameData(
        eta=eta_v, Yhat=np.array(jetalg.values(Yhat_f)), hat_coframe=hat_co,
        Omega13=(lam_val, cf.L, 0.0), Omega23=(-cf.L, lam_val, 0.0),
        lam=lam_val)


# ---------------------------------------------------------------------------
# theorem-level verdicts


@dataclass(frozen=True)
class TheoremBVerdict:
    max_domega: float
    closed: bool
    Fhat_sign: str
    classification: str
    fhat_min: float
    fhat_max: float
    n_points: int


def verdict_from_scalars(fhats, max_domega: float,
                         tol: float = 1e-6) -> TheoremBVerdict:
    """Fold per-point Fhat values and the worst d(omega) component into the
    space-form verdict."""
    closed = max_domega < tol
    arr = np.array(fhats, dtype=float)
    if np.all(arr > tol):
        sign = "positive"
    elif np.all(arr < -tol):
        sign = "negative"
    elif np.all(np.abs(arr) <= tol):
        sign = "zero"
    else:
        sign = "mixed"
    if not closed:
        cls = "not_moebius_minimal"
    elif sign == "mixed":
        cls = "inconclusive"
    else:
        cls = {"positive": "sphere_minimal", "zero": "euclidean_minimal",
               "negative": "hyperbolic_minimal"}[sign]
    return TheoremBVerdict(
        max_domega=max_domega, closed=closed, Fhat_sign=sign,
        classification=cls, fhat_min=float(arr.min()),
        fhat_max=float(arr.max()), n_points=len(fhats))


def classify_theorem_b(spec: ImmersionSpec, sample, tol: float = 1e-6,
                       gauge: str = "raw", order: int = 5,
                       ltol: float = 1e-6) -> TheoremBVerdict:
    """Closedness of the distinguished 1-form plus the sign of Fhat over an
    ordered sample, combined into the space-form verdict."""
    hint = None
    fhats = []
    max_dw = 0.0
    for p in sample:
        cf = _analyze(spec, p, gauge=gauge, order=order, ltol=ltol,
                      e3_hint=hint)
        inv = _package_invariants(cf, partial=False)
        hint = cf.E_chart[2]
        fhats.append(inv.Fhat)
        max_dw = max(max_dw, max(abs(d) for d in inv.domega))
    return verdict_from_scalars(fhats, max_dw, tol)


@dataclass(frozen=True)
class HopfReport:
    satisfied: bool
    max_G: float
    max_domega: float


def hopf_criterion(spec: ImmersionSpec, sample, tol: float = 1e-6,
                   gauge: str = "raw", order: int = 5,
                   ltol: float = 1e-6) -> HopfReport:
    """Lift test: the squared-torus fibration recognizer max(|G|, |domega|)."""
    hint = None
    max_g = 0.0
    max_dw = 0.0
    for p in sample:
        cf = _analyze(spec, p, gauge=gauge, order=order, ltol=ltol,
                      e3_hint=hint)
        inv = _package_invariants(cf, partial=False)
        hint = cf.E_chart[2]
        max_g = max(max_g, abs(inv.G))
        max_dw = max(max_dw, max(abs(d) for d in inv.domega))
    return HopfReport(satisfied=(max_g < tol and max_dw < tol),
                      max_G=max_g, max_domega=max_dw)


# ---------------------------------------------------------------------------
# holomorphicity of the normal pair


def holomorphic_residual(spec: ImmersionSpec, p, order: int = 5,
                         gauge: str = "raw", e3_hint=None,
                         data: MoebiusData | None = None) -> float:
    """Residual of d(xi1 - i xi2) = i mu (omega1 + i omega2)(eta1 + i eta2)
    + i theta12 (xi1 - i xi2), maximized over frame directions."""
    cf = _analyze(spec, p, gauge=gauge, order=order, e3_hint=e3_hint, data=data)
    U = jets.value_of(cf.Uf)
    V = jets.value_of(cf.Vf)
    Yv = np.array(jetalg.values(cf.ctx.Y))
    Yi_v = np.array(jetalg.values(cf.Yi_can))
    eta_c = (Yi_v[0] + V * Yv) + 1j * (Yi_v[1] - U * Yv)
    xi1 = np.array(jetalg.values(cf.xi[0]))
    xi2 = np.array(jetalg.values(cf.xi[1]))
    xi_c = xi1 - 1j * xi2
    theta = [jets.value_of(t) for t in cf.theta]
    worst = 0.0
    for k in range(3):
        d1 = np.array(jetalg.values(cf.dvec(cf.xi[0], k)))
        d2 = np.array(jetalg.values(cf.dvec(cf.xi[1], k)))
        lhs = d1 - 1j * d2
        form = (1.0 if k == 0 else 0.0) + 1j * (1.0 if k == 1 else 0.0)
        rhs = 1j * cf.mu * form * eta_c + 1j * theta[k] * xi_c
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


# ---------------------------------------------------------------------------
# full structure matrix


STRUCTURE_LABELS = ("Y", "Yhat", "eta1", "eta2", "eta3", "xi1", "xi2")


def structure_matrix(spec: ImmersionSpec, p, gauge: str = "raw",
                     order: int = 5, e3_hint=None,
                     data: MoebiusData | None = None):
    """Connection coefficients of the full adapted light-cone frame: entry
    [row][col] holds the three coframe coefficients of the col-component of
    d(row).  The normal pair is re-gauged so the (eta1, eta2) slot vanishes,
    which is the normal form the flat examples are quoted in."""
    cf = _analyze(spec, p, gauge=gauge, order=order, e3_hint=e3_hint, data=data)
    cf.require_torsion()
    w = cf.w_fields
    Y = cf.ctx.Y
    eta_f = [[cf.Yi_can[i][m] - w[i] * Y[m] for m in range(7)] for i in range(3)]
    w2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2]
    Yhat_f = [cf.ctx.N[m] - 0.5 * w2 * Y[m]
              + sum_jets([w[i] * cf.Yi_can[i][m] for i in range(3)])
              for m in range(7)]
    rows = [Y, Yhat_f, eta_f[0], eta_f[1], eta_f[2], cf.xi[0], cf.xi[1]]
    Yv = np.array(jetalg.values(Y))
    Yhat_v = np.array(jetalg.values(Yhat_f))
    eta_v = [np.array(jetalg.values(e)) for e in eta_f]
    xi_v = [np.array(jetalg.values(x)) for x in cf.xi]

    def lz(u, v):
        return -u[0] * v[0] + float(np.dot(u[1:], v[1:]))

    duals = [Yhat_v, Yv] + eta_v + xi_v  # pairing partner per column
    out = np.zeros((7, 7, 3))
    for ri, row in enumerate(rows):
        for k in range(3):
            dv = np.array(jetalg.values(cf.dvec(row, k)))
            for ci in range(7):
                out[ri, ci, k] = lz(dv, duals[ci])
    # residual normal rotation: absorb the (eta1, eta2) slot into the
    # normal-pair connection
    c = out[2, 3].copy()
    out[2, 3] = 0.0
    out[3, 2] = 0.0
    out[5, 6] += 2.0 * c
    out[6, 5] -= 2.0 * c
    return STRUCTURE_LABELS, out
