"""Riemannian metrics in a single chart, geodesics and normal neighborhoods.

A :class:`MetricField` is a vectorized function ``x -> g(x)`` where ``x`` has
shape ``(..., n)`` and the result ``(..., n, n)``. Geodesics are integrated
with an embedded Runge-Kutta 4(5) pair together with their Jacobi fields, so
the differential of the exponential map is available wherever a geodesic is.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from . import expr
from .errors import (
    ConfigError,
    DegenerateTangent,
    NonPositiveDefinite,
    OutsideNormalRange,
    RadiusTooLarge,
    StepFailure,
    TrajectoryLeftChart,
)

RTOL = 1e-9
ATOL = 1e-12
FD_STEP = 1e-5
RAY_CHUNK = 64
FOCUSING_THRESHOLD = 0.1

_THREADS = 1


def set_threads(count: int) -> None:
    """Worker threads for ray integration; chunking is fixed, so results do not change."""
    global _THREADS
    _THREADS = max(1, int(count))

KINDS = ("euclidean", "round-sphere", "poincare-ball", "conformal-flat", "custom")


@dataclass(frozen=True)
class MetricField:
    """Metric tensor ``g_ij(x)`` on an axis-aligned chart box."""

    dim: int
    eval: Callable[[np.ndarray], np.ndarray]
    kind: str
    lower: np.ndarray
    upper: np.ndarray
    params: dict = field(default_factory=dict)
    # analytic d_k g_ij with shape (..., k, i, j); None means central differences
    derivative: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ConfigError(f"only n = 2 and n = 3 are supported, got {self.dim}")
        if self.kind not in KINDS:
            raise ConfigError(f"unknown metric kind {self.kind!r}")

    def __call__(self, x) -> np.ndarray:
        return self.eval(np.asarray(x, dtype=float))

    @property
    def analytic(self) -> bool:
        return self.derivative is not None

    def dg(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.derivative is not None:
            return self.derivative(x)
        out = np.empty(x.shape[:-1] + (self.dim, self.dim, self.dim))
        for k in range(self.dim):
            step = np.zeros(self.dim)
            step[k] = FD_STEP
            out[..., k, :, :] = (self.eval(x + step) - self.eval(x - step)) / (2 * FD_STEP)
        return out

    def christoffel(self, x) -> np.ndarray:
        """Second-kind symbols ``Gamma[..., k, i, j]``."""
        x = np.asarray(x, dtype=float)
        ginv = np.linalg.inv(self.eval(x))
        d = self.dg(x)  # d[..., l, i, j] = d_l g_ij
        # first kind: G_lij = (d_i g_lj + d_j g_li - d_l g_ij) / 2
        first = 0.5 * (
            np.einsum("...ilj->...lij", d) + np.einsum("...jli->...lij", d) - d
        )
        return np.einsum("...kl,...lij->...kij", ginv, first)

    def inside(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        ok = np.all((x > self.lower) & (x < self.upper), axis=-1)
        if self.kind == "poincare-ball":
            ok &= np.sum(x * x, axis=-1) < 1.0
        return ok

    def norm(self, x, v) -> np.ndarray:
        return np.sqrt(np.einsum("...i,...ij,...j->...", v, self(x), v))


# --- catalog ---------------------------------------------------------------


def _box(n, lo, hi):
    return np.full(n, float(lo)), np.full(n, float(hi))


def euclidean(n: int = 2, half_width: float = 10.0) -> MetricField:
    def g(x):
        return np.broadcast_to(np.eye(n), x.shape[:-1] + (n, n)).copy()

    def dg(x):
        return np.zeros(x.shape[:-1] + (n, n, n))

    lo, hi = _box(n, -half_width, half_width)
    return MetricField(n, g, "euclidean", lo, hi, {"half_width": half_width}, dg)


def round_sphere(n: int = 2) -> MetricField:
    """Unit sphere in polar coordinates.

    n = 2: (colatitude, longitude), ds^2 = dx1^2 + sin^2 x1 dx2^2.
    n = 3: hyperspherical (x1, x2, x3) with
    ds^2 = dx1^2 + sin^2 x1 (dx2^2 + sin^2 x2 dx3^2).
    """

    def g(x):
        out = np.zeros(x.shape[:-1] + (n, n))
        s1 = np.sin(x[..., 0]) ** 2
        out[..., 0, 0] = 1.0
        out[..., 1, 1] = s1
        if n == 3:
            out[..., 2, 2] = s1 * np.sin(x[..., 1]) ** 2
        return out

    def dg(x):
        out = np.zeros(x.shape[:-1] + (n, n, n))
        out[..., 0, 1, 1] = np.sin(2 * x[..., 0])
        if n == 3:
            s2 = np.sin(x[..., 1]) ** 2
            out[..., 0, 2, 2] = np.sin(2 * x[..., 0]) * s2
            out[..., 1, 2, 2] = np.sin(x[..., 0]) ** 2 * np.sin(2 * x[..., 1])
        return out

    margin = 0.02
    lo = np.array([margin] * (n - 1) + [-np.pi])
    hi = np.array([np.pi - margin] * (n - 1) + [np.pi])
    return MetricField(n, g, "round-sphere", lo, hi, {}, dg)


def poincare_ball(n: int = 2) -> MetricField:
    """Hyperbolic metric ``(2 / (1 - |x|^2))^2 dx^2`` on the unit ball."""

    def g(x):
        lam = 4.0 / (1.0 - np.sum(x * x, axis=-1)) ** 2
        return lam[..., None, None] * np.eye(n)

    def dg(x):
        grad = 16.0 * x / ((1.0 - np.sum(x * x, axis=-1)) ** 3)[..., None]
        return grad[..., :, None, None] * np.eye(n)

    lo, hi = _box(n, -1.0, 1.0)
    return MetricField(n, g, "poincare-ball", lo, hi, {}, dg)


def conformal_flat(n: int, factor, half_width: float = 10.0) -> MetricField:
    """``g = factor(x) * identity``; ``factor`` is a number or an expression in x1..xn."""
    lo, hi = _box(n, -half_width, half_width)
    if isinstance(factor, (int, float)):
        lam0 = float(factor)

        def g(x):
            return np.broadcast_to(lam0 * np.eye(n), x.shape[:-1] + (n, n)).copy()

        def dg(x):
            return np.zeros(x.shape[:-1] + (n, n, n))

        return MetricField(n, g, "conformal-flat", lo, hi, {"factor": lam0}, dg)

    lam = expr.point_function(str(factor), n)

    def g(x):
        return lam(x)[..., None, None] * np.eye(n)

    return MetricField(n, g, "conformal-flat", lo, hi, {"factor": str(factor)})


def custom(entries, half_width: float = 10.0) -> MetricField:
    """Metric from expression strings ``entries[i][j]`` in x1..xn."""
    n = len(entries)
    if any(len(row) != n for row in entries):
        raise ConfigError("metric entries must form a square matrix")
    funcs = {}
    for i in range(n):
        for j in range(i, n):
            if "".join(str(entries[i][j]).split()) != "".join(str(entries[j][i]).split()):
                raise ConfigError(f"metric entries ({i},{j}) and ({j},{i}) differ")
            funcs[i, j] = expr.point_function(str(entries[i][j]), n)

    def g(x):
        out = np.empty(x.shape[:-1] + (n, n))
        for (i, j), f in funcs.items():
            out[..., i, j] = out[..., j, i] = f(x)
        return out

    lo, hi = _box(n, -half_width, half_width)
    return MetricField(n, g, "custom", lo, hi, {"entries": [list(map(str, r)) for r in entries]})


def from_spec(spec: dict) -> MetricField:
    """Build a metric from a config mapping ``{"name": ..., "n": ..., ...}``."""
    spec = dict(spec)
    name = spec.pop("name", None)
    n = int(spec.pop("n", 2))
    try:
        if name == "euclidean":
            return euclidean(n, **spec)
        if name == "round-sphere":
            return round_sphere(n)
        if name == "poincare-ball":
            return poincare_ball(n)
        if name == "conformal-flat":
            return conformal_flat(n, spec.pop("factor"), **spec)
        if name == "custom":
            return custom(spec.pop("entries"), **spec)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad parameters for metric {name!r}: {exc}") from None
    raise ConfigError(f"unknown metric {name!r}")


# --- pointwise quantities ----------------------------------------------------


def check_positive_definite(metric: MetricField, x) -> None:
    g = metric(x)
    if not np.all(np.isfinite(g)) or np.any(np.linalg.eigvalsh(g)[..., 0] <= 0):
        raise NonPositiveDefinite(f"{metric.kind} metric is not positive definite")


def volume_element(metric: MetricField, x) -> np.ndarray | float:
    """``sqrt(det g(x))``."""
    det = np.linalg.det(metric(x))
    if not np.all(np.isfinite(det)) or np.any(det <= 0):
        raise NonPositiveDefinite(f"det g <= 0 for {metric.kind} metric")
    out = np.sqrt(det)
    return float(out) if np.ndim(out) == 0 else out


def inverse_sqrt(a: np.ndarray) -> np.ndarray:
    w, u = np.linalg.eigh(a)
    return (u / np.sqrt(w)[..., None, :]) @ np.swapaxes(u, -1, -2)


def matrix_sqrt(a: np.ndarray) -> np.ndarray:
    w, u = np.linalg.eigh(a)
    return (u * np.sqrt(w)[..., None, :]) @ np.swapaxes(u, -1, -2)


def tangent_frame(theta: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the complement of unit vectors ``theta``.

    Returns shape (..., n - 1, n). For n = 3 the frame is the polar/azimuthal
    pair, with a fixed fallback near the poles.
    """
    theta = np.asarray(theta, dtype=float)
    n = theta.shape[-1]
    if n == 2:
        return np.stack([-theta[..., 1], theta[..., 0]], axis=-1)[..., None, :]
    helper = np.zeros_like(theta)
    helper[..., 2] = 1.0
    polar = np.abs(theta[..., 2]) > 0.9
    helper[polar] = [1.0, 0.0, 0.0]
    e2 = np.cross(helper, theta)
    e2 /= np.linalg.norm(e2, axis=-1, keepdims=True)
    e1 = np.cross(e2, theta)
    return np.stack([e1, e2], axis=-2)


# --- geodesic flow -----------------------------------------------------------


def _acceleration(metric: MetricField, x, v):
    gamma = metric.christoffel(x)
    return -np.einsum("...kij,...i,...j->...k", gamma, v, v)


def _flow_chunk(metric, x0, v0, w0, t_eval, rtol, atol):
    m, n = x0.shape
    k = w0.shape[1]
    h = 1e-6 if metric.analytic else 1e-4

    def unpack(y):
        y = y.reshape(m, 2 + 2 * k, n)
        return y[:, 0], y[:, 1], y[:, 2 : 2 + k], y[:, 2 + k :]

    def rhs(t, y):
        x, v, jac, jdot = unpack(y)
        out = np.empty((m, 2 + 2 * k, n))
        out[:, 0] = v
        out[:, 1] = _acceleration(metric, x, v)
        if k:
            xs = np.concatenate([x[:, None] + h * jac, x[:, None] - h * jac], axis=1)
            vs = np.concatenate([v[:, None] + h * jdot, v[:, None] - h * jdot], axis=1)
            acc = _acceleration(metric, xs, vs)
            out[:, 2 : 2 + k] = jdot
            out[:, 2 + k :] = (acc[:, :k] - acc[:, k:]) / (2 * h)
        return out.ravel()

    def leave(t, y):
        x = y.reshape(m, 2 + 2 * k, n)[:, 0]
        gap = np.minimum(x - metric.lower, metric.upper - x)
        value = float(np.min(gap))
        if metric.kind == "poincare-ball":
            value = min(value, 1.0 - float(np.max(np.sum(x * x, axis=-1))))
        return value

    leave.terminal = True
    leave.direction = -1

    y0 = np.zeros((m, 2 + 2 * k, n))
    y0[:, 0] = x0
    y0[:, 1] = v0
    y0[:, 2 + k :] = w0
    t_end = float(t_eval[-1])
    if t_end == 0.0:
        out = np.repeat(y0[None], len(t_eval), axis=0)
    else:
        sol = solve_ivp(rhs, (0.0, t_end), y0.ravel(), method="RK45", t_eval=t_eval,
                        rtol=rtol, atol=atol, events=leave)
        if sol.status == 1:
            raise TrajectoryLeftChart(
                f"geodesic left the {metric.kind} chart box before t = {t_end:.6g}")
        if sol.status != 0:
            raise StepFailure(sol.message)
        out = sol.y.T.reshape(len(t_eval), m, 2 + 2 * k, n)
    return out[:, :, 0], out[:, :, 1], out[:, :, 2 : 2 + k]


def geodesic_flow(metric: MetricField, x0, v0, t_eval, jacobi=None, rtol=RTOL, atol=ATOL):
    """Integrate geodesics with their Jacobi fields.

    Parameters
    ----------
    x0 : (n,) or (m, n) start points
    v0 : (m, n) initial chart velocities
    t_eval : increasing times in [0, T]
    jacobi : (m, k, n) initial derivatives ``J'(0)`` of Jacobi fields with
        ``J(0) = 0``; omit for none

    Returns positions ``(len(t), m, n)``, velocities of the same shape and
    Jacobi fields ``(len(t), m, k, n)``. Rays are integrated in fixed-size
    chunks so results do not depend on the caller's batching.
    """
    v0 = np.atleast_2d(np.asarray(v0, dtype=float))
    m, n = v0.shape
    x0 = np.broadcast_to(np.asarray(x0, dtype=float), (m, n))
    t_eval = np.asarray(t_eval, dtype=float)
    if np.any(np.diff(t_eval) < 0) or t_eval[0] < 0:
        raise ValueError("t_eval must be nondecreasing and nonnegative")
    w0 = np.zeros((m, 0, n)) if jacobi is None else np.asarray(jacobi, dtype=float)
    if not np.all(metric.inside(x0)):
        raise TrajectoryLeftChart("start point outside the chart box")
    def run(i):
        return _flow_chunk(metric, x0[i : i + RAY_CHUNK], v0[i : i + RAY_CHUNK],
                           w0[i : i + RAY_CHUNK], t_eval, rtol, atol)

    starts = range(0, m, RAY_CHUNK)
    if _THREADS > 1 and m > RAY_CHUNK:
        with ThreadPoolExecutor(_THREADS) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(i) for i in starts]
    return tuple(np.concatenate(p, axis=1) for p in zip(*parts))


def geodesic_shoot(metric: MetricField, start, velocity, length: float) -> np.ndarray:
    """Endpoint of the unit-speed geodesic from ``start`` after arclength ``length``."""
    start = np.asarray(start, dtype=float)
    velocity = np.asarray(velocity, dtype=float)
    if length < 0:
        raise ValueError("length must be nonnegative")
    speed = float(metric.norm(start, velocity))
    if abs(speed - 1.0) > 1e-6:
        raise ValueError(f"velocity must have unit g-norm, got {speed:.9g}")
    if metric.kind == "euclidean":
        end = start + length * velocity
        if not metric.inside(end):
            raise TrajectoryLeftChart("geodesic left the chart box")
        return end
    x, _, _ = geodesic_flow(metric, start, velocity[None], [0.0, float(length)])
    return x[-1, 0]


def _exp_with_differential(metric, a, v):
    n = metric.dim
    x, _, jac = geodesic_flow(metric, a, v[None], [0.0, 1.0], jacobi=np.eye(n)[None])
    return x[-1, 0], jac[-1, 0].T


def log_map(metric: MetricField, a, b, tol: float = 1e-12, max_iter: int = 40) -> np.ndarray:
    """Initial velocity ``v`` with ``exp_a(v) = b`` by Newton shooting."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    v = b - a
    scale = max(1.0, float(np.linalg.norm(v)))
    for _ in range(max_iter):
        try:
            end, dexp = _exp_with_differential(metric, a, v)
        except (TrajectoryLeftChart, StepFailure) as exc:
            raise OutsideNormalRange(f"shooting failed: {exc}") from None
        resid = end - b
        if np.linalg.norm(resid) <= tol * scale:
            return v
        try:
            step = np.linalg.solve(dexp, resid)
        except np.linalg.LinAlgError:
            raise OutsideNormalRange("exponential map is singular along the shot") from None
        v = v - step
    raise OutsideNormalRange(f"shooting did not converge after {max_iter} iterations")


def geodesic_distance(metric: MetricField, a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if metric.kind == "euclidean":
        return float(np.linalg.norm(b - a))
    if np.array_equal(a, b):
        return 0.0
    v = log_map(metric, a, b)
    return float(metric.norm(a, v))


# --- normal neighborhoods ----------------------------------------------------


def _deviation_directions(n: int) -> np.ndarray:
    if n == 2:
        phi = 2 * np.pi * (np.arange(32) + 0.5) / 32
        return np.stack([np.cos(phi), np.sin(phi)], axis=-1)
    ct = np.linspace(-1, 1, 9)[1:-1]
    phi = 2 * np.pi * (np.arange(12) + 0.5) / 12
    c, p = np.meshgrid(ct, phi, indexing="ij")
    st = np.sqrt(1 - c**2)
    dirs = np.stack([st * np.cos(p), st * np.sin(p), c], axis=-1).reshape(-1, 3)
    return np.concatenate([dirs, [[0, 0, 1.0], [0, 0, -1.0]]])


@dataclass(frozen=True, eq=False)
class NormalNeighborhood:
    """Exponential-map chart at ``center``.

    Directions ``theta`` are Euclidean unit vectors in normal coordinates;
    the chart velocity of the ray is ``frame @ theta`` where
    ``frame = g(center)^(-1/2)``.
    """

    metric: MetricField
    center: np.ndarray
    radius_max: float
    frame: np.ndarray
    _dev_radii: np.ndarray
    _dev_values: np.ndarray

    @property
    def dim(self) -> int:
        return self.metric.dim

    def rays(self, radii, directions):
        """Positions ``(m_r, m_theta, n)`` and tangent vectors ``(m_r, m_theta, n-1, n)``.

        Tangent ``alpha`` is ``d x / d u_alpha`` for the orthonormal angular
        frame at ``theta``, i.e. a Jacobi field with unit initial derivative.
        """
        radii = np.asarray(radii, dtype=float)
        directions = np.atleast_2d(np.asarray(directions, dtype=float))
        if np.any(radii < 0) or np.any(radii > self.radius_max * (1 + 1e-12)):
            raise RadiusTooLarge(f"radius outside [0, {self.radius_max}] of the normal chart")
        frame_t = tangent_frame(directions)
        vel = directions @ self.frame.T
        w0 = frame_t @ self.frame.T
        if self.metric.kind == "euclidean":
            x = self.center + radii[:, None, None] * vel[None]
            jac = radii[:, None, None, None] * w0[None]
            if not np.all(self.metric.inside(x)):
                raise TrajectoryLeftChart("ray left the chart box")
            return x, jac
        order = np.argsort(radii, kind="stable")
        t = radii[order]
        x, _, jac = geodesic_flow(self.metric, self.center, vel, np.concatenate([[0.0], t]), w0)
        inv = np.empty_like(order)
        inv[order] = np.arange(len(order))
        return x[1:][inv], jac[1:][inv]

    def exp_map(self, r, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if np.ndim(theta) == 1:
            return self.rays([float(r)], theta[None])[0][0, 0]
        return self.rays([float(r)], theta)[0][0]

    def metric_deviation(self, r) -> np.ndarray | float:
        """Upper envelope of the spectral distance of the pulled-back metric to the identity."""
        out = np.interp(r, self._dev_radii, self._dev_values)
        return float(out) if np.ndim(out) == 0 else out


def area_factor(metric: MetricField, x, tangents) -> np.ndarray:
    """``sqrt(det g*)`` for tangent vectors ``(..., n-1, n)`` at points ``x``."""
    g = metric(x)
    gstar = np.einsum("...ai,...ij,...bj->...ab", tangents, g, tangents)
    det = np.linalg.det(gstar)
    if np.any(~np.isfinite(det)) or np.any(det <= 0):
        raise DegenerateTangent("induced metric on the geodesic sphere is degenerate")
    return np.sqrt(det)


def sphere_area_element(metric: MetricField, nbhd: NormalNeighborhood, r: float, theta):
    """Induced area density of ``S(P0, r)`` per unit of round-sphere measure at ``theta``."""
    if not 0 < r <= nbhd.radius_max:
        raise RadiusTooLarge(f"r = {r} outside (0, {nbhd.radius_max}]")
    theta = np.atleast_2d(np.asarray(theta, dtype=float))
    theta = theta / np.linalg.norm(theta, axis=-1, keepdims=True)
    x, jac = nbhd.rays([float(r)], theta)
    out = area_factor(metric, x[0], jac[0])
    return float(out[0]) if out.shape == (1,) else out


def _pullback_deviation(metric, center, frame, radii, directions):
    """Spectral deviation and volume-distortion ratio at each (radius, direction)."""
    vel = directions @ frame.T
    w0 = tangent_frame(directions) @ frame.T
    x, v, jac = geodesic_flow(metric, center, vel, np.concatenate([[0.0], radii]), w0)
    x, v, jac = x[1:], v[1:], jac[1:]
    basis = np.concatenate([v[:, :, None, :], jac / radii[:, None, None, None]], axis=2)
    gpull = np.einsum("...ai,...ij,...bj->...ab", basis, metric(x), basis)
    eig = np.linalg.eigvalsh(gpull)
    dev = np.max(np.abs(eig - 1.0), axis=-1)
    ratio = np.sqrt(np.clip(np.linalg.det(gpull), 0, None))
    return dev, ratio


def build_normal_neighborhood(metric: MetricField, center, radius: float,
                              samples: int = 48) -> NormalNeighborhood:
    """Validate a normal chart of the given radius at ``center``.

    Radial geodesics are marched outward on a fixed set of directions; the
    neighborhood is rejected once the normalized Jacobian determinant of the
    exponential map drops below ``FOCUSING_THRESHOLD``.
    """
    center = np.asarray(center, dtype=float)
    if center.shape != (metric.dim,):
        raise ConfigError(f"center must have {metric.dim} coordinates")
    if radius <= 0:
        raise ValueError("radius must be positive")
    if not metric.inside(center):
        raise TrajectoryLeftChart("center outside the chart box")
    check_positive_definite(metric, center)
    frame = inverse_sqrt(metric(center))
    radii = radius * np.arange(1, samples + 1) / samples
    if metric.kind == "euclidean":
        dirs = _deviation_directions(metric.dim)
        ends = center + radius * dirs
        if not np.all(metric.inside(ends)):
            raise TrajectoryLeftChart("normal ball leaves the chart box")
        dev = np.zeros_like(radii)
    else:
        dev_all, ratio = _pullback_deviation(metric, center, frame, radii,
                                             _deviation_directions(metric.dim))
        low = np.min(ratio, axis=1)
        if np.any(low < FOCUSING_THRESHOLD):
            first = radii[np.argmax(low < FOCUSING_THRESHOLD)]
            raise RadiusTooLarge(f"radial geodesics focus near r = {first:.6g} < {radius}")
        dev = np.maximum.accumulate(np.max(dev_all, axis=1))
    return NormalNeighborhood(metric, center, float(radius), frame,
                              np.concatenate([[0.0], radii]), np.concatenate([[0.0], dev]))


def _full(x):
    return np.ones(np.shape(x)[:-1], dtype=bool)


@dataclass(frozen=True, eq=False)
class GeodesicRing:
    """Ring ``eps < d(P, P0) < eps0`` intersected with a domain ``D``."""

    neighborhood: NormalNeighborhood
    eps: float
    eps0: float
    domain: Callable[[np.ndarray], np.ndarray] = _full

    def __post_init__(self):
        if not 0 < self.eps < self.eps0 <= self.neighborhood.radius_max * (1 + 1e-12):
            raise ConfigError(
                f"need 0 < eps < eps0 <= {self.neighborhood.radius_max}, "
                f"got eps={self.eps}, eps0={self.eps0}")
        if self.eps < 1e-3 * self.eps0:
            raise ConfigError("eps must be at least 1e-3 * eps0")

    @property
    def center(self) -> np.ndarray:
        return self.neighborhood.center

    @property
    def metric(self) -> MetricField:
        return self.neighborhood.metric


def ring(metric: MetricField, center, eps: float, eps0: float, domain=None) -> GeodesicRing:
    nbhd = build_normal_neighborhood(metric, center, eps0)
    return GeodesicRing(nbhd, eps, eps0, domain or _full)


def half_space(axis: int, offset: float = 0.0, sign: float = 1.0):
    """Domain indicator ``sign * (x[axis] - offset) > 0``."""

    def indicator(x):
        return sign * (np.asarray(x)[..., axis] - offset) > 0

    indicator.description = f"half-space x{axis + 1} {'>' if sign > 0 else '<'} {offset}"
    return indicator
