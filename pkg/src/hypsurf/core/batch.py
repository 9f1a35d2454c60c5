"""Vectorised counterparts of ``hyp`` for stacks of matrices.

A stack is a float array of shape (..., 4) holding rows (a, b, c, d).
Broadcasting follows numpy rules, so a single (4,) matrix combines with an
(N, 4) stack.
"""

from __future__ import annotations

import numpy as np

from hypsurf.core.hyp import Mat2


def as_stack(mats) -> np.ndarray:
    if isinstance(mats, Mat2):
        return mats.as_array()
    if isinstance(mats, (list, tuple)) and mats and isinstance(mats[0], Mat2):
        return np.array([m.as_array() for m in mats], dtype=float)
    return np.asarray(mats, dtype=float)


def mul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    A, B = np.asarray(A, dtype=float), np.asarray(B, dtype=float)
    a = A[..., 0] * B[..., 0] + A[..., 1] * B[..., 2]
    b = A[..., 0] * B[..., 1] + A[..., 1] * B[..., 3]
    c = A[..., 2] * B[..., 0] + A[..., 3] * B[..., 2]
    d = A[..., 2] * B[..., 1] + A[..., 3] * B[..., 3]
    return np.stack([a, b, c, d], axis=-1)


def inv(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    return np.stack([A[..., 3], -A[..., 1], -A[..., 2], A[..., 0]], axis=-1)


def canonical(A: np.ndarray) -> np.ndarray:
    """Flip each row so its first nonzero entry is positive."""
    A = np.asarray(A, dtype=float)
    nz = A != 0.0
    first = np.argmax(nz, axis=-1)
    lead = np.take_along_axis(A, first[..., None], axis=-1)[..., 0]
    sign = np.where(lead < 0.0, -1.0, 1.0)
    return A * sign[..., None] + 0.0


def trace(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    return A[..., 0] + A[..., 3]


def cosh_displacement(A: np.ndarray) -> np.ndarray:
    """cosh d(i, A i) for each row."""
    A = np.asarray(A, dtype=float)
    return 0.5 * np.sum(A * A, axis=-1)


def act(A: np.ndarray, z) -> np.ndarray:
    """Mobius action of each row on points of H (complex)."""
    A = np.asarray(A, dtype=float)
    z = np.asarray(z, dtype=complex)
    return (A[..., 0] * z + A[..., 1]) / (A[..., 2] * z + A[..., 3])


def base_points(A: np.ndarray) -> np.ndarray:
    return act(A, 1j)


def lengths(A: np.ndarray) -> np.ndarray:
    """Translation lengths; NaN where |trace| <= 2."""
    half = np.abs(trace(A)) / 2.0
    with np.errstate(invalid="ignore"):
        return np.where(half > 1.0, 2.0 * np.arccosh(np.maximum(half, 1.0)), np.nan)


def axes(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(repelling, attracting) endpoints of hyperbolic rows; inf for the point at infinity.

    Rows that are not hyperbolic give NaN.
    """
    A = np.asarray(A, dtype=float)
    a, b, c, d = A[..., 0], A[..., 1], A[..., 2], A[..., 3]
    tr = a + d
    with np.errstate(invalid="ignore", divide="ignore"):
        root = np.sqrt(tr * tr - 4.0)
        amd = a - d
        big = np.where(amd != 0.0, amd + np.copysign(root, amd), root)
        x_far = np.where(c != 0.0, big / (2.0 * c), np.inf)
        x_near = -2.0 * b / big + 0.0
        near_attracts = np.abs(c * x_near + d) > 1.0
    repel = np.where(near_attracts, x_far, x_near)
    attract = np.where(near_attracts, x_near, x_far)
    bad = ~(np.abs(tr) > 2.0)
    return np.where(bad, np.nan, repel), np.where(bad, np.nan, attract)


def flow(A: np.ndarray, t) -> np.ndarray:
    """Right multiplication by g_t (t broadcasts over rows)."""
    A = np.asarray(A, dtype=float)
    t = np.asarray(t, dtype=float)
    up, down = np.exp(t / 2.0), np.exp(-t / 2.0)
    return np.stack([A[..., 0] * up, A[..., 1] * down, A[..., 2] * up, A[..., 3] * down], axis=-1)


def factor_many(A: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Flow-box coordinates (r1, t, r2) of each row plus a mask of factorable rows."""
    A = np.asarray(A, dtype=float)
    a = A[..., 0]
    ok = a != 0.0
    safe = np.where(ok, a, 1.0)
    r1 = np.where(ok, A[..., 2] / safe, np.nan)
    r2 = np.where(ok, A[..., 1] / safe, np.nan)
    t = np.where(ok, 2.0 * np.log(np.abs(safe)), np.nan)
    return r1, t, r2, ok


def compose_many(r1, t, r2) -> np.ndarray:
    """h^u_{r1} g_t h^s_{r2} for arrays of coordinates."""
    r1, t, r2 = (np.asarray(x, dtype=float) for x in (r1, t, r2))
    e = np.exp(t / 2.0)
    return np.stack([e, e * r2, r1 * e, r1 * r2 * e + 1.0 / e], axis=-1)


def frames_at(z, theta) -> np.ndarray:
    """Frames of the vectors based at ``z`` (complex) with direction ``theta``."""
    z = np.asarray(z, dtype=complex)
    theta = np.asarray(theta, dtype=float)
    sy = np.sqrt(z.imag)
    phi = (theta - np.pi / 2.0) / 2.0
    cos, sin = np.cos(phi), np.sin(phi)
    x = z.real
    # [[sy, x/sy], [0, 1/sy]] @ [[cos, sin], [-sin, cos]]
    return np.stack(
        [sy * cos - x / sy * sin, sy * sin + x / sy * cos, -sin / sy, cos / sy], axis=-1
    )


def directions(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    return np.mod(np.pi / 2.0 - 2.0 * np.arctan2(A[..., 2], A[..., 3]), 2.0 * np.pi)


def act_boundary(A: np.ndarray, x) -> np.ndarray:
    """Mobius action on boundary points (floats, ``inf`` allowed)."""
    A = np.asarray(A, dtype=float)
    x = np.asarray(x, dtype=float)
    a, b, c, d = A[..., 0], A[..., 1], A[..., 2], A[..., 3]
    finite = np.isfinite(x)
    xs = np.where(finite, x, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        num = np.where(finite, a * xs + b, a)
        den = np.where(finite, c * xs + d, c)
        out = num / den
    return np.where(den == 0.0, np.inf, out)


def boundary_angles(x) -> np.ndarray:
    """2*atan(x) with the point at infinity at pi."""
    x = np.asarray(x, dtype=float)
    return np.where(np.isfinite(x), 2.0 * np.arctan(np.where(np.isfinite(x), x, 0.0)), np.pi)


def axis_distance(z, p, q) -> np.ndarray:
    """Distance from points of H to the geodesics with endpoints (p, q)."""
    z = np.asarray(z, dtype=complex)
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    vertical = ~np.isfinite(p) | ~np.isfinite(q)
    x0 = np.where(np.isfinite(p), p, q)
    pf, qf = np.where(vertical, 0.0, p), np.where(vertical, 1.0, q)
    m, r = (pf + qf) / 2.0, np.abs(qf - pf) / 2.0
    sinh_circle = np.abs(np.abs(z - m) ** 2 - r * r) / (2.0 * r * z.imag)
    sinh_line = np.abs(z.real - np.where(vertical, x0, 0.0)) / z.imag
    return np.arcsinh(np.where(vertical, sinh_line, sinh_circle))
