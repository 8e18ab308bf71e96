"""Ellipsoids {x : (x-c)^T R (x-c) <= 1}: membership, containment, projection.

The shape matrix R may be rank deficient (unbounded directions are allowed);
positive definiteness is only required where an operation needs it.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

# Solver outputs sit on the PSD boundary; accept slightly negative eigenvalues.
PSD_TOL = 1e-9
SYM_TOL = 1e-12
MEMBERSHIP_TOL = 1e-9


def symmetrize(A: np.ndarray, tol: float = SYM_TOL) -> np.ndarray:
    """Return (A + A^T)/2, rejecting matrices with asymmetry above ``tol``."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    asym = np.max(np.abs(A - A.T)) if A.size else 0.0
    if asym > tol:
        raise ValueError(f"matrix is not symmetric (max asymmetry {asym:.3e} > {tol:.0e})")
    return 0.5 * (A + A.T)


def _min_eig(A: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(A)[0]) if A.size else 0.0


def is_psd(A: np.ndarray, tol: float = PSD_TOL) -> bool:
    return _min_eig(symmetrize(A)) >= -tol


def is_pd(A: np.ndarray, tol: float = PSD_TOL) -> bool:
    return _min_eig(symmetrize(A)) > tol


@dataclass(frozen=True)
class Ellipsoid:
    """The set {x : (x - center)^T shape (x - center) <= 1}."""

    shape: np.ndarray
    center: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        shape = symmetrize(self.shape)
        if _min_eig(shape) < -PSD_TOL:
            raise ValueError("shape matrix must be positive semidefinite")
        center = self.center
        if center is None:
            center = np.zeros(shape.shape[0])
        center = np.asarray(center, dtype=float).reshape(-1)
        if center.shape[0] != shape.shape[0]:
            raise ValueError(
                f"center dimension {center.shape[0]} does not match shape dimension {shape.shape[0]}"
            )
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "center", center)

    @property
    def dim(self) -> int:
        return self.shape.shape[0]

    @classmethod
    def ball(cls, radius: float, dim: int, center=None) -> "Ellipsoid":
        return cls(np.eye(dim) / radius**2, center)

    def quadratic_form(self, x) -> float:
        d = np.asarray(x, dtype=float).reshape(-1) - self.center
        return float(d @ self.shape @ d)


def membership(x, e: Ellipsoid) -> bool:
    """Point-in-ellipsoid test with a small tolerance on the boundary."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != e.dim:
        raise ValueError(f"point dimension {x.shape[0]} does not match ellipsoid dimension {e.dim}")
    return e.quadratic_form(x) <= 1.0 + MEMBERSHIP_TOL


def _containment_pencil(inner: Ellipsoid, outer: Ellipsoid):
    """Return (M_in, M_out) with containment <=> exists tau >= 0: tau*M_in - M_out >= 0.

    M_in  = [[Q, 0], [0, -1]]                            (inner, centered)
    M_out = [[R, -R c], [-c^T R, c^T R c - 1]]           (outer, general)
    """
    Q, R, c = inner.shape, outer.shape, outer.center
    n = inner.dim
    M_in = np.zeros((n + 1, n + 1))
    M_in[:n, :n] = Q
    M_in[n, n] = -1.0
    Rc = R @ c
    M_out = np.zeros((n + 1, n + 1))
    M_out[:n, :n] = R
    M_out[:n, n] = -Rc
    M_out[n, :n] = -Rc
    M_out[n, n] = float(c @ Rc) - 1.0
    return M_in, M_out


def contains(inner: Ellipsoid, outer: Ellipsoid, method: str = "search"):
    """Exact test whether ``inner`` (centered, positive definite) lies in ``outer``.

    Lossless S-procedure with a single multiplier: containment holds iff there
    is tau >= 0 making tau*M_in - M_out PSD.  Since lambda_min of that pencil
    is concave in tau and feasible tau lies in [0, 1], a bounded scalar search
    is exact; ``method="sdp"`` solves the same one-variable feasibility problem
    through the SDP backend instead.

    Returns (contained, tau); tau is None when not contained.
    """
    if inner.dim != outer.dim:
        raise ValueError(f"dimension mismatch: inner is {inner.dim}-d, outer is {outer.dim}-d")
    if not is_pd(inner.shape):
        raise ValueError("inner ellipsoid shape must be positive definite")
    if np.any(inner.center != 0.0):
        raise ValueError("inner ellipsoid must be centered at the origin")

    if method == "sdp":
        from . import lmi

        prob = lmi.SdpProblem()
        tau = prob.scalar_variable("tau", nonneg=True)
        prob.require_psd(lmi.build_containment(inner.shape, outer, tau), "containment")
        sol = lmi.sdp_solve(prob)
        if sol.status == "feasible":
            return True, float(sol.assignment["tau"])
        return False, None
    if method != "search":
        raise ValueError(f"unknown method {method!r}")

    M_in, M_out = _containment_pencil(inner, outer)

    def neg_min_eig(tau: float) -> float:
        return -_min_eig(tau * M_in - M_out)

    # The (n+1, n+1) entry forces tau <= 1 - c^T R c <= 1 at feasibility.
    res = minimize_scalar(neg_min_eig, bounds=(0.0, 1.0), method="bounded",
                          options={"xatol": 1e-12})
    best_tau = float(res.x)
    for tau in (best_tau, 0.0, 1.0):
        if _min_eig(tau * M_in - M_out) >= -PSD_TOL:
            return True, tau
    return False, None


def project(P: np.ndarray, k: int) -> np.ndarray:
    """Schur complement P11 - P12 P22^{-1} P21: shape of the shadow of
    {x : x^T P x <= 1} on the leading k coordinates.

    A singular trailing block falls back to the pseudo-inverse; the result is
    then only a lower bound on the true projection shape and a warning is
    emitted.
    """
    P = symmetrize(P)
    n = P.shape[0]
    if not (0 < k < n):
        raise ValueError(f"leading block size k={k} must satisfy 0 < k < n={n}")
    if _min_eig(P) < -PSD_TOL:
        raise ValueError("P must be positive semidefinite")
    P11, P12, P22 = P[:k, :k], P[:k, k:], P[k:, k:]
    if np.linalg.matrix_rank(P22, tol=1e-12 * max(1.0, np.linalg.norm(P22))) < n - k:
        warnings.warn("trailing block is singular; projected shape is a lower bound",
                      RuntimeWarning, stacklevel=2)
        P22_inv = np.linalg.pinv(P22)
    else:
        P22_inv = np.linalg.inv(P22)
    return symmetrize(P11 - P12 @ P22_inv @ P12.T, tol=np.inf)


def trace_volume_bound(R: np.ndarray) -> float:
    """Tr[R]^(n/2) / n^(n/2), a convex upper bound on det[R]^(1/2)."""
    R = symmetrize(R)
    if not is_pd(R):
        raise ValueError("R must be positive definite")
    n = R.shape[0]
    return float(np.trace(R)) ** (n / 2.0) / n ** (n / 2.0)


def boundary_points(e: Ellipsoid, count: int) -> np.ndarray:
    """``count`` points on the boundary of a 2-D positive-definite ellipsoid,
    at uniformly spaced angles through the Cholesky factor of shape^{-1}."""
    if e.dim != 2:
        raise ValueError(f"boundary_points requires a 2-D ellipsoid, got {e.dim}-d")
    if not is_pd(e.shape):
        raise ValueError("boundary_points requires a positive-definite shape")
    if count < 1:
        raise ValueError("count must be positive")
    L = np.linalg.cholesky(e.shape)
    theta = 2.0 * np.pi * np.arange(count) / count
    u = np.stack([np.cos(theta), np.sin(theta)])  # unit circle, one column per angle
    return (e.center[:, None] + np.linalg.solve(L.T, u)).T
