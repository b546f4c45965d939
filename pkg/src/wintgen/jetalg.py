"""Small dense linear algebra over jet scalars.

Vectors and matrices are plain Python lists (of lists); entries are MultiJet
or float.  Everything here is generic over the scalar type because the
geometric pipeline runs the same formulas on jets (for derivatives) and on
floats (for spot values).
"""

from __future__ import annotations

from . import jets


def dot(u, v):
    """Euclidean inner product of equal-length vectors."""
    acc = u[0] * v[0]
    for a, b in zip(u[1:], v[1:]):
        acc = acc + a * b
    return acc


def lorentz_dot(u, v):
    """Inner product with signature (-,+,...,+): first slot timelike."""
    acc = -(u[0] * v[0])
    for a, b in zip(u[1:], v[1:]):
        acc = acc + a * b
    return acc


def cross3(u, v):
    return [u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0]]


def scale(s, u):
    return [s * a for a in u]


def add(u, v):
    return [a + b for a, b in zip(u, v)]


def sub(u, v):
    return [a - b for a, b in zip(u, v)]


def matvec(M, v):
    return [dot(row, v) for row in M]


def transpose(M):
    return [list(col) for col in zip(*M)]


def matmul(A, B):
    Bt = transpose(B)
    return [[dot(row, col) for col in Bt] for row in A]


def det3(M):
    return (M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
            - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
            + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]))


def adjugate3(M):
    return [
        [M[1][1] * M[2][2] - M[1][2] * M[2][1],
         M[0][2] * M[2][1] - M[0][1] * M[2][2],
         M[0][1] * M[1][2] - M[0][2] * M[1][1]],
        [M[1][2] * M[2][0] - M[1][0] * M[2][2],
         M[0][0] * M[2][2] - M[0][2] * M[2][0],
         M[0][2] * M[1][0] - M[0][0] * M[1][2]],
        [M[1][0] * M[2][1] - M[1][1] * M[2][0],
         M[0][1] * M[2][0] - M[0][0] * M[2][1],
         M[0][0] * M[1][1] - M[0][1] * M[1][0]],
    ]


def inv3(M):
    d = det3(M)
    adj = adjugate3(M)
    return [[adj[i][j] / d for j in range(3)] for i in range(3)]


def cholesky3(G):
    """Lower-triangular L with L L^T = G for symmetric positive-definite G.
    Raises DomainError (via jet sqrt) when a pivot is non-positive."""
    L00 = jets.sqrt(G[0][0])
    L10 = G[1][0] / L00
    L20 = G[2][0] / L00
    L11 = jets.sqrt(G[1][1] - L10 * L10)
    L21 = (G[2][1] - L20 * L10) / L11
    L22 = jets.sqrt(G[2][2] - L20 * L20 - L21 * L21)
    zero = 0.0
    return [[L00, zero, zero], [L10, L11, zero], [L20, L21, L22]]


def inv_lower3(L):
    """Inverse of a lower-triangular 3x3 matrix (forward substitution)."""
    i00 = 1.0 / L[0][0]
    i11 = 1.0 / L[1][1]
    i22 = 1.0 / L[2][2]
    i10 = -(L[1][0] * i00) * i11
    i20 = -(L[2][0] * i00 + L[2][1] * i10) * i22
    i21 = -(L[2][1] * i11) * i22
    zero = 0.0
    return [[i00, zero, zero], [i10, i11, zero], [i20, i21, i22]]


def normalize(u, inner=dot):
    n = jets.sqrt(inner(u, u))
    return [a / n for a in u]


def values(obj):
    """Recursively replace jets by their constant terms (for reporting)."""
    if isinstance(obj, list):
        return [values(x) for x in obj]
    return jets.value_of(obj)
