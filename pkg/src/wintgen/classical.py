"""Classical submanifold invariants at a chart point.

ClassicalContext carries everything as jets so later modules can
differentiate; the reporting types (ClassicalData, DDVVReport, AdaptedFrame)
hold plain floats.

Index conventions: a, b, c label chart coordinates; i, j, k label the
orthonormal tangent frame; r, s label the orthonormal normal frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import jetalg, jets
from .errors import (DomainError, InsufficientOrder, NotIdealPoint,
                     NotImmersed, ShapeError, UmbilicPoint)
from .immersion import ImmersionSpec, eval_immersion_jet


def _inner_for(ambient):
    # tangent/normal geometry of the hyperboloid model lives in Lorentz R^6_1
    return jetalg.lorentz_dot if ambient.kind == "hyperbolic" else jetalg.dot


def _lincomb(coeffs, vectors):
    ncomp = len(vectors[0])
    out = []
    for k in range(ncomp):
        acc = coeffs[0] * vectors[0][k]
        for c, v in zip(coeffs[1:], vectors[1:]):
            acc = acc + c * v[k]
        out.append(acc)
    return out


class ClassicalContext:
    """Lazy jet computations for one immersion at one chart point."""

    def __init__(self, spec: ImmersionSpec, p, order: int = 5):
        if order < 2:
            raise InsufficientOrder(
                f"second fundamental form needs jet order >= 2, got {order}")
        self.spec = spec
        self.p = tuple(float(v) for v in p)
        self.order = order
        self.inner = _inner_for(spec.ambient)

    @cached_property
    def x(self):
        return eval_immersion_jet(self.spec, self.p, self.order)

    @cached_property
    def xa(self):
        return [[jets.derivative(c, a + 1) for c in self.x] for a in range(3)]

    @cached_property
    def xab(self):
        return [[[jets.derivative(c, b + 1) for c in self.xa[a]]
                 for b in range(3)] for a in range(3)]

    @cached_property
    def induced_metric(self):
        I = [[None] * 3 for _ in range(3)]
        for a in range(3):
            for b in range(a + 1):
                I[a][b] = I[b][a] = self.inner(self.xa[a], self.xa[b])
        return I

    @cached_property
    def frame_chart(self):
        """Rows eC[i]: orthonormal tangent frame e_i = sum_a eC[i][a] d/du_a,
        lower-triangular (Gram-Schmidt in chart order)."""
        I = self.induced_metric
        Ival = [[jets.value_of(v) for v in row] for row in I]
        det = (Ival[0][0] * (Ival[1][1] * Ival[2][2] - Ival[1][2] ** 2)
               - Ival[0][1] * (Ival[0][1] * Ival[2][2] - Ival[1][2] * Ival[0][2])
               + Ival[0][2] * (Ival[0][1] * Ival[1][2] - Ival[1][1] * Ival[0][2]))
        scale = (max(Ival[0][0] + Ival[1][1] + Ival[2][2], 0.0) / 3.0) ** 3
        if det <= 1e-12 * max(scale, 1e-300):
            raise NotImmersed(
                f"induced metric degenerate at {self.p} (det {det:.3e})")
        try:
            return jetalg.inv_lower3(jetalg.cholesky3(I))
        except DomainError:
            raise NotImmersed(f"induced metric not positive definite at {self.p}")

    @cached_property
    def tangent_amb(self):
        return [_lincomb(self.frame_chart[i], self.xa) for i in range(3)]

    @cached_property
    def normal_frame(self):
        """Two unit normals by greedy Gram-Schmidt over the standard basis,
        pivoting on the largest residual at the point.  For sphere and
        hyperbolic ambients the position vector is part of the space to
        project away (with sign -1 for the timelike hyperbolic position)."""
        ncomp = self.spec.ambient.ncomp
        units = []
        if self.spec.ambient.kind == "sphere":
            units.append((self.x, 1.0))
        elif self.spec.ambient.kind == "hyperbolic":
            units.append((self.x, -1.0))
        units.extend((t, 1.0) for t in self.tangent_amb)

        vals = [[jets.value_of(c) for c in u] for u, _ in units]
        signs = [s for _, s in units]

        def val_inner(u, v):
            if self.spec.ambient.kind == "hyperbolic":
                return -u[0] * v[0] + sum(a * b for a, b in zip(u[1:], v[1:]))
            return sum(a * b for a, b in zip(u, v))

        normals = []
        used = set()
        for _ in range(2):
            # pivot selection on plain floats
            best_k, best_res = -1, -1.0
            for k in range(ncomp):
                if k in used:
                    continue
                v = [0.0] * ncomp
                v[k] = 1.0
                for uval, s in zip(vals, signs):
                    coef = s * val_inner(v, uval)
                    v = [a - coef * b for a, b in zip(v, uval)]
                res = val_inner(v, v)
                if res > best_res + 1e-15:
                    best_k, best_res = k, res
            if best_res <= 1e-12:
                raise NotImmersed(f"cannot complete normal frame at {self.p}")
            used.add(best_k)
            # the same elimination once more, in jets
            v = [jets.MultiJet.constant(1.0 if k == best_k else 0.0, self.x[0].order)
                 for k in range(ncomp)]
            for u, s in units:
                coef = self.inner(v, u) * s
                v = [a - coef * b for a, b in zip(v, u)]
            n = jetalg.normalize(v, inner=self.inner)
            units.append((n, 1.0))
            vals.append([jets.value_of(c) for c in n])
            signs.append(1.0)
            normals.append(n)
        return normals

    @cached_property
    def h(self):
        """Second fundamental form h^r_ij in the orthonormal frames (jets)."""
        eC = self.frame_chart
        hchart = [[[self.inner(self.xab[a][b], n) for b in range(3)]
                   for a in range(3)] for n in self.normal_frame]
        out = []
        for r in range(2):
            mat = [[None] * 3 for _ in range(3)]
            for i in range(3):
                for j in range(i + 1):
                    acc = None
                    for a in range(3):
                        for b in range(3):
                            term = eC[i][a] * eC[j][b] * hchart[r][a][b]
                            acc = term if acc is None else acc + term
                    mat[i][j] = mat[j][i] = acc
            out.append(mat)
        return out

    @cached_property
    def H(self):
        return [(m[0][0] + m[1][1] + m[2][2]) * (1.0 / 3.0) for m in self.h]

    @cached_property
    def trace_free_sq(self):
        """|II - (1/3) tr(II) I|^2 as a jet."""
        acc = None
        for r in range(2):
            for i in range(3):
                for j in range(3):
                    t = self.h[r][i][j] - (self.H[r] if i == j else 0.0)
                    t = t * t
                    acc = t if acc is None else acc + t
        return acc

    @cached_property
    def second_form_sq(self):
        acc = None
        for r in range(2):
            for i in range(3):
                for j in range(3):
                    t = self.h[r][i][j] * self.h[r][i][j]
                    acc = t if acc is None else acc + t
        return acc

    def is_umbilic(self) -> bool:
        umb2 = jets.value_of(self.trace_free_sq)
        scale = max(jets.value_of(self.second_form_sq), 1e-8)
        return umb2 <= 1e-10 * scale

    @cached_property
    def rho(self):
        """Conformal factor: rho^2 = (3/2)|II - (1/3)tr(II) I|^2."""
        if self.is_umbilic():
            raise UmbilicPoint(
                f"{self.spec.name} is totally umbilic at {self.p}; "
                "conformal invariants are undefined there")
        return jets.sqrt(1.5 * self.trace_free_sq)


# ---------------------------------------------------------------------------
# reporting types


@dataclass(frozen=True)
class ClassicalData:
    induced_metric: np.ndarray   # 3x3
    tangent_frame: np.ndarray    # rows e_i in chart components
    normal_frame: np.ndarray     # rows n_r in ambient components
    h: np.ndarray                # (2,3,3) orthonormal-frame components
    H: np.ndarray                # (2,)
    c: float


def fundamental_forms(spec: ImmersionSpec, p, order: int = 2) -> ClassicalData:
    ctx = ClassicalContext(spec, p, order=order)
    return classical_data(ctx)


def classical_data(ctx: ClassicalContext) -> ClassicalData:
    return ClassicalData(
        induced_metric=np.array(jetalg.values(ctx.induced_metric)),
        tangent_frame=np.array(jetalg.values(ctx.frame_chart)),
        normal_frame=np.array(jetalg.values(ctx.normal_frame)),
        h=np.array(jetalg.values(ctx.h)),
        H=np.array(jetalg.values(ctx.H)),
        c=ctx.spec.ambient.c)


@dataclass(frozen=True)
class DDVVReport:
    s: float
    H_norm2: float
    s_N: float
    slack: float
    ideal: bool
    umbilic_measure: float


def ddvv_from_forms(h, H, c: float, tol: float = 1e-7) -> DDVVReport:
    """The normalized-curvature inequality report from frame components.

    s from the Gauss equation, s_N = (1/3)||R^perp|| with the Frobenius norm
    over independent index pairs (i<j, r<s)."""
    h = np.asarray(h, dtype=float)
    H = np.asarray(H, dtype=float)
    p = h.shape[0]
    s = 0.0
    for i in range(3):
        for j in range(i + 1, 3):
            s += c + sum(h[r, i, i] * h[r, j, j] - h[r, i, j] ** 2 for r in range(p))
    s /= 3.0
    norm_rperp_sq = 0.0
    for r in range(p):
        for q in range(r + 1, p):
            comm = h[r] @ h[q] - h[q] @ h[r]
            for i in range(3):
                for j in range(i + 1, 3):
                    norm_rperp_sq += comm[i, j] ** 2
    s_N = math.sqrt(norm_rperp_sq) / 3.0
    H2 = float(np.dot(H, H))
    slack = c + H2 - s_N - s
    tracefree = h - H[:, None, None] * np.eye(3)[None, :, :]
    umb = float(np.sqrt(np.sum(tracefree ** 2)))
    scale = max(1.0, float(np.sum(h ** 2)))
    return DDVVReport(s=s, H_norm2=H2, s_N=s_N, slack=slack,
                      ideal=bool(abs(slack) <= tol * scale), umbilic_measure=umb)


def ddvv_report(spec: ImmersionSpec, p, tol: float = 1e-7) -> DDVVReport:
    data = fundamental_forms(spec, p)
    return ddvv_from_forms(data.h, data.H, data.c, tol=tol)


def ddvv_matrix_gap(B) -> float:
    """(sum_r |B_r|^2)^2 - 2 sum_{r<s} |[B_r, B_s]|^2 for trace-free
    symmetric matrices; non-negative, zero exactly at ideal configurations."""
    mats = [np.asarray(b, dtype=float) for b in B]
    if not mats:
        raise ShapeError("need at least one matrix")
    m = mats[0].shape[0]
    for b in mats:
        if b.shape != (m, m):
            raise ShapeError(f"matrix shapes disagree: {b.shape} vs ({m}, {m})")
        scale = max(1.0, float(np.max(np.abs(b))))
        if np.max(np.abs(b - b.T)) > 1e-10 * scale:
            raise ShapeError("matrices must be symmetric")
        if abs(np.trace(b)) > 1e-12 * max(1.0, float(np.sum(np.abs(np.diag(b))))):
            raise ShapeError("matrices must be trace-free")
    total = sum(float(np.sum(b * b)) for b in mats)
    comm = 0.0
    for r in range(len(mats)):
        for s in range(r + 1, len(mats)):
            cmat = mats[r] @ mats[s] - mats[s] @ mats[r]
            comm += float(np.sum(cmat * cmat))
    return total ** 2 - 2.0 * comm


# ---------------------------------------------------------------------------
# adapted frame (pointwise normal form)


@dataclass(frozen=True)
class AdaptedFrame:
    tangent_rotation: np.ndarray  # rows: adapted frame in the input frame basis
    normal_rotation: np.ndarray   # 2x2
    lambda1: float
    lambda2: float
    mu0: float
    pattern_residual: float


def _pattern_matrices(lam1, lam2, mu0):
    P1 = lam1 * np.eye(3)
    P1[0, 1] = P1[1, 0] = mu0
    P2 = lam2 * np.eye(3)
    P2[0, 0] += mu0
    P2[1, 1] -= mu0
    return P1, P2


def split_angle(z1: complex):
    """Tangent angle t with e^{2it} z1 = i|z1|: cos2t = Im z1/|z1|,
    sin2t = Re z1/|z1|."""
    return 0.5 * math.atan2(z1.real, z1.imag)


def adapted_frame(data: ClassicalData, tol: float = 1e-7) -> AdaptedFrame:
    h = np.asarray(data.h, dtype=float)
    H = np.asarray(data.H, dtype=float)
    T = h - H[:, None, None] * np.eye(3)[None, :, :]
    ii2 = float(np.sum(h ** 2))
    umb = float(np.sqrt(np.sum(T ** 2)))
    if umb <= tol * max(1.0, math.sqrt(ii2)):
        raise UmbilicPoint("second fundamental form is umbilic; no adapted frame")

    report = ddvv_from_forms(h, H, data.c, tol=tol)
    if not report.ideal:
        raise NotIdealPoint(
            f"inequality slack {report.slack:.3e} exceeds tolerance; no common kernel")

    stacked = np.vstack([T[0], T[1]])
    _, sing, vt = np.linalg.svd(stacked)
    if sing[2] > 1e-6 * sing[0]:
        raise NotIdealPoint(
            f"trace-free operators share no kernel direction "
            f"(singular values {sing[2]:.2e} vs {sing[0]:.2e})")
    e3 = vt[2]

    k = int(np.argmin(np.abs(e3)))
    f1 = np.zeros(3)
    f1[k] = 1.0
    f1 -= np.dot(f1, e3) * e3
    f1 /= np.linalg.norm(f1)
    f2 = np.cross(e3, f1)

    def zcomp(t):
        return complex(f1 @ t @ f1, f1 @ t @ f2)

    z1, z2 = zcomp(T[0]), zcomp(T[1])
    K = np.eye(2)
    if (z1 * z2.conjugate()).imag < 0.0:
        K = np.diag([1.0, -1.0])
        z2 = -z2
    if abs(z1) <= 1e-12 * max(1.0, math.sqrt(ii2)):
        raise NotIdealPoint("first trace-free operator vanishes on the 2-plane")

    t = split_angle(z1)
    ct, st = math.cos(t), math.sin(t)
    e1 = ct * f1 - st * f2
    e2 = st * f1 + ct * f2
    R = np.vstack([e1, e2, e3])

    mu0 = abs(z1)
    lam1 = float(H[0] * K[0, 0])
    lam2 = float(H[1] * K[1, 1])
    rotated = [R @ (K[0, r] * h[0] + K[1, r] * h[1]) @ R.T for r in range(2)]
    P1, P2 = _pattern_matrices(lam1, lam2, mu0)
    residual = max(float(np.max(np.abs(rotated[0] - P1))),
                   float(np.max(np.abs(rotated[1] - P2))))
    return AdaptedFrame(tangent_rotation=R, normal_rotation=K,
                        lambda1=lam1, lambda2=lam2, mu0=mu0,
                        pattern_residual=residual)
