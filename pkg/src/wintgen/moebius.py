"""The light-cone apparatus: canonical lift, conformal metric, frames in
Lorentz R^7_1, the tensors A, B, C, connection forms, covariant derivatives,
and the integrability residuals.

Everything lives at one chart point as jets; the reporting type MoebiusData
snapshots constant terms.  Index conventions follow classical.py, plus
capital E_i for the frame orthonormal in the conformal metric g = rho^2 dx.dx.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import jetalg, jets
from .classical import ClassicalContext
from .errors import ChartBlowUp, InsufficientOrder, NotLorentz
from .gallery import check_lorentz
from .immersion import SPHERE, ImmersionSpec

ldot = jetalg.lorentz_dot  # 7-component (-,+,...,+) inner product


def unit_lift(ambient, x):
    """Light-cone representative of an ambient point with conformal factor 1.
    Generic over scalar type; the constant slots come back as plain numbers."""
    if ambient.kind == "sphere":
        return [1.0] + list(x)
    if ambient.kind == "hyperbolic":
        return list(x) + [1.0]
    # euclidean
    n2 = x[0] * x[0]
    for v in x[1:]:
        n2 = n2 + v * v
    return [(1.0 + n2) * 0.5, (1.0 - n2) * 0.5] + list(x)


def frame_scalar_d(EC, f, k):
    """E_k(f) for a scalar jet f, frame rows EC in chart components."""
    acc = EC[k][0] * jets.derivative(f, 1)
    acc = acc + EC[k][1] * jets.derivative(f, 2)
    return acc + EC[k][2] * jets.derivative(f, 3)


def frame_vector_d(EC, vec, k):
    return [frame_scalar_d(EC, comp, k) for comp in vec]


def form_d_eval(chart_form, EC, i, j):
    """(d phi)(E_i, E_j) for a 1-form given by chart components (3 jets)."""
    acc = None
    for a in range(3):
        for b in range(3):
            t = EC[i][a] * EC[j][b] * (jets.derivative(chart_form[b], a + 1)
                                       - jets.derivative(chart_form[a], b + 1))
            acc = t if acc is None else acc + t
    return acc


class MoebiusContext:
    """Lazy conformal-invariant jets at one chart point."""

    def __init__(self, spec: ImmersionSpec, p, order: int = 5):
        if order < 4:
            raise InsufficientOrder(
                f"conformal frame data needs jet order >= 4, got {order}")
        self.classical = ClassicalContext(spec, p, order=order)
        self.spec = spec
        self.p = self.classical.p
        self.order = order

    # -- lift and metric ------------------------------------------------------

    @cached_property
    def rho(self):
        return self.classical.rho  # raises UmbilicPoint when undefined

    @cached_property
    def Y(self):
        lift = unit_lift(self.spec.ambient, self.classical.x)
        return [self.rho * v for v in lift]

    @cached_property
    def Ya(self):
        return [[jets.derivative(c, a + 1) for c in self.Y] for a in range(3)]

    @cached_property
    def g(self):
        rho2 = self.rho * self.rho
        return [[rho2 * v for v in row] for row in self.classical.induced_metric]

    @cached_property
    def ginv(self):
        return jetalg.inv3(self.g)

    @cached_property
    def Gamma(self):
        """Christoffel symbols of g in chart coordinates, Gamma[c][a][b]."""
        dg = [[[jets.derivative(self.g[a][b], d + 1) for b in range(3)]
               for a in range(3)] for d in range(3)]
        out = [[[None] * 3 for _ in range(3)] for _ in range(3)]
        for c in range(3):
            for a in range(3):
                for b in range(a + 1):
                    acc = None
                    for d in range(3):
                        t = self.ginv[c][d] * (dg[a][b][d] + dg[b][a][d] - dg[d][a][b])
                        acc = t if acc is None else acc + t
                    out[c][a][b] = out[c][b][a] = 0.5 * acc
        return out

    @cached_property
    def EC(self):
        """Frame rows for g: E_i = sum_a EC[i][a] d/du_a (lower triangular)."""
        inv_rho = 1.0 / self.rho
        return [[v * inv_rho for v in row] for row in self.classical.frame_chart]

    @cached_property
    def coframe(self):
        """Rows W[i]: omega_i = sum_a W[i][a] du^a, the dual basis of EC."""
        lower = jetalg.inv_lower3(self.EC)
        return jetalg.transpose(lower)

    @cached_property
    def Yi(self):
        return [frame_vector_d(self.EC, self.Y, i) for i in range(3)]

    # -- mean curvature sphere and dual point ---------------------------------

    @cached_property
    def laplace_Y(self):
        out = []
        for comp in self.Y:
            dc = [jets.derivative(comp, a + 1) for a in range(3)]
            ddc = [[jets.derivative(dc[a], b + 1) for b in range(3)] for a in range(3)]
            acc = None
            for a in range(3):
                for b in range(3):
                    corr = None
                    for c in range(3):
                        t = self.Gamma[c][a][b] * dc[c]
                        corr = t if corr is None else corr + t
                    t = self.ginv[a][b] * (ddc[a][b] - corr)
                    acc = t if acc is None else acc + t
            out.append(acc)
        return out

    @cached_property
    def N(self):
        lap = self.laplace_Y
        lap2 = ldot(lap, lap)
        return [(-1.0 / 3.0) * lap[k] - (1.0 / 18.0) * lap2 * self.Y[k]
                for k in range(7)]

    @cached_property
    def xi(self):
        """Mean curvature spheres, one per unit normal."""
        amb = self.spec.ambient
        x = self.classical.x
        out = []
        for r in range(2):
            n = self.classical.normal_frame[r]
            Hr = self.classical.H[r]
            if amb.kind == "sphere":
                vec = [Hr] + [n[k] + Hr * x[k] for k in range(6)]
            elif amb.kind == "hyperbolic":
                vec = [n[k] + Hr * x[k] for k in range(6)] + [Hr]
            else:
                lift = unit_lift(amb, x)
                xn = jetalg.dot(x, n)
                vec = [Hr * lift[0] + xn, Hr * lift[1] - xn]
                vec += [Hr * lift[2 + k] + n[k] for k in range(5)]
            out.append(vec)
        return out

    # -- conformal tensors -----------------------------------------------------

    @cached_property
    def B(self):
        """B[r][i][j] = rho^{-1} (h^r_ij - H^r delta_ij)."""
        inv_rho = 1.0 / self.rho
        out = []
        for r in range(2):
            h = self.classical.h[r]
            Hr = self.classical.H[r]
            out.append([[inv_rho * (h[i][j] - (Hr if i == j else 0.0))
                         for j in range(3)] for i in range(3)])
        return out

    @cached_property
    def C(self):
        """C[r][i] = -rho^{-2} [ H^r_{,i} + sum_j (h^r_ij - H^r d_ij) e_j(log rho) ],
        with H^r_{,i} the normal-connection derivative of the mean curvature
        and e_i the frame orthonormal for dx.dx."""
        eC = self.classical.frame_chart
        inner = self.classical.inner
        nf = self.classical.normal_frame
        dlog = [frame_scalar_d(eC, self.rho, i) / self.rho for i in range(3)]
        inv_rho2 = 1.0 / (self.rho * self.rho)
        out = []
        for r in range(2):
            row = []
            for i in range(3):
                Hcov = frame_scalar_d(eC, self.classical.H[r], i)
                s = 1 - r
                dn_s = frame_vector_d(eC, nf[s], i)
                Hcov = Hcov + self.classical.H[s] * inner(dn_s, nf[r])
                acc = Hcov
                h = self.classical.h[r]
                Hr = self.classical.H[r]
                for j in range(3):
                    acc = acc + (h[i][j] - (Hr if i == j else 0.0)) * dlog[j]
                row.append(-inv_rho2 * acc)
            out.append(row)
        return out

    # -- connection ------------------------------------------------------------

    @cached_property
    def omega(self):
        """omega[i][j][k] = omega_ij(E_k) = g(nabla_{E_k} E_i, E_j), as jets."""
        EC = self.EC
        dEC = [[[jets.derivative(EC[i][a], b + 1) for b in range(3)]
                for a in range(3)] for i in range(3)]
        out = [[[None] * 3 for _ in range(3)] for _ in range(3)]
        for i in range(3):
            for j in range(i):
                for k in range(3):
                    # nabla_{E_k} E_i in chart components
                    acc = None
                    for a in range(3):
                        comp = None
                        for b in range(3):
                            t = EC[k][b] * dEC[i][a][b]
                            comp = t if comp is None else comp + t
                            for c in range(3):
                                comp = comp + EC[k][b] * EC[i][c] * self.Gamma[a][b][c]
                        # pair with E_j via g
                        for bb in range(3):
                            t = comp * self.g[a][bb] * EC[j][bb]
                            acc = t if acc is None else acc + t
                    out[i][j][k] = acc
                    out[j][i][k] = -acc
        zero = 0.0 * out[1][0][0]
        for i in range(3):
            out[i][i] = [zero] * 3
        return out

    @cached_property
    def theta12(self):
        """theta_12(E_k) = <E_k(xi_1), xi_2>."""
        return [ldot(frame_vector_d(self.EC, self.xi[0], k), self.xi[1])
                for k in range(3)]

    @cached_property
    def theta12_chart(self):
        """Chart components: theta_12 = sum_a t_a du^a."""
        return [ldot([jets.derivative(c, a + 1) for c in self.xi[0]], self.xi[1])
                for a in range(3)]

    # -- Blaschke tensor --------------------------------------------------------

    @cached_property
    def A_dn(self):
        """A_ij = <E_i(N), Y_j> from the derivative of the dual point (values)."""
        if self.order < 5:
            raise InsufficientOrder(
                "the Blaschke tensor via dN needs jet order 5")
        rows = []
        for i in range(3):
            dN = frame_vector_d(self.EC, self.N, i)
            rows.append([jets.value_of(ldot(dN, self.Yi[j])) for j in range(3)])
        return np.array(rows)

    @cached_property
    def C_dn(self):
        """Cross-route C^r_i = <E_i(N), xi_r> (values)."""
        if self.order < 5:
            raise InsufficientOrder("the dN route needs jet order 5")
        out = np.zeros((2, 3))
        for i in range(3):
            dN = frame_vector_d(self.EC, self.N, i)
            for r in range(2):
                out[r, i] = jets.value_of(ldot(dN, self.xi[r]))
        return out

    # -- curvature of g ----------------------------------------------------------

    @cached_property
    def riemann_frame(self):
        """R[i][j][k][l] = <R(E_i,E_j) E_l, E_k>_g as jets."""
        G = self.Gamma
        dG = [[[[jets.derivative(G[d][b][c], a + 1) for c in range(3)]
                for b in range(3)] for d in range(3)] for a in range(3)]
        # R^d_{c a b}: curvature operator R(d_a, d_b) d_c = R^d_cab d_d
        Rop = [[[[None] * 3 for _ in range(3)] for _ in range(3)] for _ in range(3)]
        for d in range(3):
            for c in range(3):
                for a in range(3):
                    for b in range(3):
                        acc = dG[a][d][b][c] - dG[b][d][a][c]
                        for e in range(3):
                            acc = acc + G[d][a][e] * G[e][b][c] \
                                      - G[d][b][e] * G[e][a][c]
                        Rop[d][c][a][b] = acc
        # frame components <R(E_i,E_j)E_l, E_k>, contracting one index at a time
        EC = self.EC

        def contract(tensor, frame_rows, axis):
            shape = [3, 3, 3, 3]
            out = np.empty(shape, dtype=object)
            for idx in np.ndindex(*shape):
                acc = None
                for m in range(3):
                    src = list(idx)
                    src[axis] = m
                    t = frame_rows[idx[axis]][m] * tensor[tuple(src)]
                    acc = t if acc is None else acc + t
                out[idx] = acc
            return out

        # pairing rows: (g . EC^t)[k] gives <., E_k> applied to the upper index
        glowER = [[None] * 3 for _ in range(3)]
        for k in range(3):
            for d in range(3):
                acc = None
                for e in range(3):
                    t = self.g[d][e] * EC[k][e]
                    acc = t if acc is None else acc + t
                glowER[k][d] = acc

        t = np.empty((3, 3, 3, 3), dtype=object)
        for idx in np.ndindex(3, 3, 3, 3):
            t[idx] = Rop[idx[0]][idx[1]][idx[2]][idx[3]]
        t = contract(t, glowER, 0)   # d -> k
        t = contract(t, EC, 1)       # c -> l
        t = contract(t, EC, 2)       # a -> i
        t = contract(t, EC, 3)       # b -> j
        return [[[[t[k, l, i, j] for l in range(3)] for k in range(3)]
                 for j in range(3)] for i in range(3)]

    @cached_property
    def ricci_frame(self):
        R = self.riemann_frame
        out = [[None] * 3 for _ in range(3)]
        for j in range(3):
            for l in range(3):
                acc = None
                for i in range(3):
                    t = R[i][j][i][l]
                    acc = t if acc is None else acc + t
                out[j][l] = acc
        return out

    @cached_property
    def A_gauss(self):
        """The Blaschke tensor as a jet field, from the trace of the conformal
        Gauss equation: A = Ric + sum_r (B^r)^2 - tr(A) delta with
        4 tr(A) = Scal + 2/3.  Used where derivatives of A are needed."""
        Ric = self.ricci_frame
        scal = Ric[0][0] + Ric[1][1] + Ric[2][2]
        trA = 0.25 * (scal + 2.0 / 3.0)
        out = [[None] * 3 for _ in range(3)]
        for j in range(3):
            for l in range(3):
                acc = Ric[j][l]
                for r in range(2):
                    for m in range(3):
                        acc = acc + self.B[r][j][m] * self.B[r][m][l]
                if j == l:
                    acc = acc - trA
                out[j][l] = acc
        return out

    # -- covariant derivatives ---------------------------------------------------

    @cached_property
    def covB(self):
        """covB[r][i][j][k] = B^r_{ij,k} (jets, raw gauge)."""
        out = []
        for r in range(2):
            mat = [[[None] * 3 for _ in range(3)] for _ in range(3)]
            for i in range(3):
                for j in range(3):
                    for k in range(3):
                        acc = frame_scalar_d(self.EC, self.B[r][i][j], k)
                        for l in range(3):
                            acc = acc + self.B[r][i][l] * self.omega[l][j][k]
                            acc = acc + self.B[r][l][j] * self.omega[l][i][k]
                        s = 1 - r
                        sgn = 1.0 if s == 0 else -1.0  # theta_sr = sgn * theta_12
                        acc = acc + self.B[s][i][j] * (sgn * self.theta12[k])
                        mat[i][j][k] = acc
            out.append(mat)
        return out

    @cached_property
    def covC(self):
        """covC[r][i][j] = C^r_{i,j} (jets, raw gauge)."""
        out = []
        for r in range(2):
            mat = [[None] * 3 for _ in range(3)]
            for i in range(3):
                for j in range(3):
                    acc = frame_scalar_d(self.EC, self.C[r][i], j)
                    for k in range(3):
                        acc = acc + self.C[r][k] * self.omega[k][i][j]
                    s = 1 - r
                    sgn = 1.0 if s == 0 else -1.0
                    acc = acc + self.C[s][i] * (sgn * self.theta12[j])
                    mat[i][j] = acc
            out.append(mat)
        return out

    @cached_property
    def covA(self):
        """covA[i][j][k] = A_{ij,k} from the Gauss-trace field (jets)."""
        A = self.A_gauss
        out = [[[None] * 3 for _ in range(3)] for _ in range(3)]
        for i in range(3):
            for j in range(3):
                for k in range(3):
                    acc = frame_scalar_d(self.EC, A[i][j], k)
                    for l in range(3):
                        acc = acc + A[i][l] * self.omega[l][j][k]
                        acc = acc + A[l][j] * self.omega[l][i][k]
                    out[i][j][k] = acc
        return out


# ---------------------------------------------------------------------------
# reporting types


@dataclass(frozen=True)
class MoebiusData:
    rho: float
    Y: np.ndarray          # 7
    Yi: np.ndarray         # 3x7
    N: np.ndarray          # 7
    xi: np.ndarray         # 2x7
    g: np.ndarray          # 3x3 chart components
    E: np.ndarray          # 3x3 frame rows in chart components
    coframe: np.ndarray    # 3x3 rows: omega_i in du^a
    omega_ij: np.ndarray   # 3x3x3, [i][j][k] = omega_ij(E_k)
    theta12: np.ndarray    # 3, theta_12(E_k)
    A: np.ndarray          # 3x3 Blaschke tensor (dN route)
    B: np.ndarray          # 2x3x3
    C: np.ndarray          # 2x3
    ctx: MoebiusContext

    def frame_invariants(self) -> dict:
        return {"rho": self.rho, "B_sq": float(np.sum(self.B ** 2)),
                "B_trace": float(max(abs(np.trace(self.B[r])) for r in range(2)))}


def moebius_data(spec: ImmersionSpec, p, order: int = 5,
                 with_A: bool = True) -> MoebiusData:
    ctx = MoebiusContext(spec, p, order=order)
    if with_A and order < 5:
        raise InsufficientOrder("the Blaschke tensor needs jet order 5")
    A = ctx.A_dn if with_A else np.full((3, 3), np.nan)
    val = jetalg.values
    return MoebiusData(
        rho=jets.value_of(ctx.rho),
        Y=np.array(val(ctx.Y)), Yi=np.array(val(ctx.Yi)),
        N=np.array(val(ctx.N)), xi=np.array(val(ctx.xi)),
        g=np.array(val(ctx.g)), E=np.array(val(ctx.EC)),
        coframe=np.array(val(ctx.coframe)),
        omega_ij=np.array(val(ctx.omega)), theta12=np.array(val(ctx.theta12)),
        A=A, B=np.array(val(ctx.B)), C=np.array(val(ctx.C)), ctx=ctx)


def canonical_lift(spec: ImmersionSpec, p, order: int = 5):
    """(rho, Y) as jets; rho > 0 away from umbilic points."""
    ctx = MoebiusContext(spec, p, order=max(order, 4))
    return ctx.rho, ctx.Y


# ---------------------------------------------------------------------------
# covariant derivatives and integrability residuals


@dataclass(frozen=True)
class CovariantDerivs:
    B_cov: np.ndarray  # (2,3,3,3)
    C_cov: np.ndarray  # (2,3,3)
    A_cov: np.ndarray  # (3,3,3)


def covariant_derivatives(data: MoebiusData) -> CovariantDerivs:
    ctx = data.ctx
    if ctx.order < 5:
        raise InsufficientOrder("covariant derivatives need jet order 5")
    return CovariantDerivs(
        B_cov=np.array(jetalg.values(ctx.covB)),
        C_cov=np.array(jetalg.values(ctx.covC)),
        A_cov=np.array(jetalg.values(ctx.covA)))


@dataclass(frozen=True)
class IntegrabilityResiduals:
    codazzi_A: float
    ricci_C: float
    codazzi_B: float
    gauss: float
    ricci_normal: float
    trace: float

    def max_residual(self) -> float:
        return max(self.codazzi_A, self.ricci_C, self.codazzi_B,
                   self.gauss, self.ricci_normal, self.trace)


def integrability_residuals(spec: ImmersionSpec, p, order: int = 5,
                            data: MoebiusData | None = None) -> IntegrabilityResiduals:
    """Max absolute residuals of the structure-equation identities relating
    A, B, C, the curvature of g, and the normal curvature."""
    if data is None:
        data = moebius_data(spec, p, order=order)
    ctx = data.ctx
    if ctx.order < 5:
        raise InsufficientOrder("integrability residuals need jet order 5")
    cov = covariant_derivatives(data)
    A = data.A
    B = data.B
    C = data.C

    codazzi_A = 0.0
    for i in range(3):
        for j in range(3):
            for k in range(3):
                lhs = cov.A_cov[i, j, k] - cov.A_cov[i, k, j]
                rhs = sum(B[r, i, k] * C[r, j] - B[r, i, j] * C[r, k]
                          for r in range(2))
                codazzi_A = max(codazzi_A, abs(lhs - rhs))

    ricci_C = 0.0
    for r in range(2):
        for i in range(3):
            for j in range(3):
                lhs = cov.C_cov[r, i, j] - cov.C_cov[r, j, i]
                rhs = sum(B[r, i, k] * A[k, j] - B[r, j, k] * A[k, i]
                          for k in range(3))
                ricci_C = max(ricci_C, abs(lhs - rhs))

    codazzi_B = 0.0
    for r in range(2):
        for i in range(3):
            for j in range(3):
                for k in range(3):
                    lhs = cov.B_cov[r, i, j, k] - cov.B_cov[r, i, k, j]
                    rhs = (C[r, k] if i == j else 0.0) - (C[r, j] if i == k else 0.0)
                    codazzi_B = max(codazzi_B, abs(lhs - rhs))

    Rf = np.array(jetalg.values(ctx.riemann_frame))
    gauss = 0.0
    d = np.eye(3)
    for i in range(3):
        for j in range(3):
            for k in range(3):
                for l in range(3):
                    rhs = sum(B[r, i, k] * B[r, j, l] - B[r, i, l] * B[r, j, k]
                              for r in range(2))
                    rhs += (d[i, k] * A[j, l] + d[j, l] * A[i, k]
                            - d[i, l] * A[j, k] - d[j, k] * A[i, l])
                    gauss = max(gauss, abs(Rf[i, j, k, l] - rhs))

    # normal curvature: d theta_12 (E_i, E_j) + [B^1, B^2]_ij = 0
    comm = B[0] @ B[1] - B[1] @ B[0]
    ricci_normal = 0.0
    for i in range(3):
        for j in range(3):
            dth = jets.value_of(form_d_eval(ctx.theta12_chart, ctx.EC, i, j))
            ricci_normal = max(ricci_normal, abs(dth + comm[i, j]))

    trace = max(abs(float(np.trace(B[r]))) for r in range(2))
    trace = max(trace, abs(float(np.sum(B ** 2)) - 2.0 / 3.0))

    return IntegrabilityResiduals(codazzi_A=codazzi_A, ricci_C=ricci_C,
                                  codazzi_B=codazzi_B, gauss=gauss,
                                  ricci_normal=ricci_normal, trace=trace)


# ---------------------------------------------------------------------------
# Moebius transformations


def readback_sphere(Z):
    """Round point for a future-pointing null vector: Z_{1..6} / Z_0."""
    z0 = jets.value_of(Z[0])
    if abs(z0) <= 1e-10:
        raise ChartBlowUp(
            f"transformed point leaves the chart (lift 0-component {z0:.2e})")
    return [Z[k] / Z[0] for k in range(1, 7)]


def conformal_transform(spec: ImmersionSpec, T) -> ImmersionSpec:
    """The immersion whose light-cone lift is T applied to the lift of x,
    read back in the round model: x~ = spatial(Z)/Z_0 with Z = T L(x)."""
    T = np.asarray(T, dtype=float)
    if T.shape != (7, 7):
        raise NotLorentz(f"need a 7x7 matrix, got {T.shape}")
    check_lorentz(T)
    base = spec.evaluator
    ambient = spec.ambient
    rows = [list(map(float, row)) for row in T]

    def evaluate(u):
        x = base(u)
        lift = unit_lift(ambient, x)
        Z = []
        for row in rows:
            acc = row[0] * lift[0]
            for c, v in zip(row[1:], lift[1:]):
                acc = acc + c * v
            Z.append(acc)
        return readback_sphere(Z)

    return ImmersionSpec(ambient=SPHERE, name=f"{spec.name}~moebius",
                         domain=spec.domain, evaluator=evaluate)
