"""Brute-force convex oracles.

``weighted_power_program`` solves, row by row,

    minimize    sum_j c_j x_j^q
    subject to  sum_j a_j x_j = 1,  x >= 0

by projected gradient descent in the ``a``-weighted inner product, where the
feasible set is a scaled simplex. It knows nothing about the Lagrange
solution, so agreement with the closed forms is an independent check.

``discrete_curve_modulus`` minimizes ``sum rho^alpha dV`` over cellwise
constant densities on a flat annulus subject to unit length along a family
of polygonal curves joining the two boundary spheres.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolverNotConverged, UnsupportedExponent

MAX_ITER = 10_000
REL_TOL = 1e-10


def project_scaled_simplex(y: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Row-wise projection onto ``{x >= 0, sum a x = 1}`` in the norm ``sum a (.)^2``.

    Entries with ``a == 0`` are fixed to zero.
    """
    y = np.atleast_2d(np.asarray(y, dtype=float))
    a = np.broadcast_to(np.asarray(a, dtype=float), y.shape)
    active = a > 0
    ys = np.where(active, y, -np.inf)
    order = np.argsort(-ys, axis=1, kind="stable")
    y_sorted = np.take_along_axis(ys, order, axis=1)
    a_sorted = np.take_along_axis(a, order, axis=1)
    cum_a = np.cumsum(a_sorted, axis=1)
    cum_ay = np.cumsum(np.where(a_sorted > 0, a_sorted * y_sorted, 0.0), axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        tau = (cum_ay - 1.0) / cum_a
    valid = (y_sorted > tau) & (a_sorted > 0)
    last = y.shape[1] - 1 - np.argmax(valid[:, ::-1], axis=1)
    t = tau[np.arange(len(y)), last][:, None]
    return np.where(active, np.maximum(y - t, 0.0), 0.0)


@dataclass
class ProgramResult:
    x: np.ndarray
    values: np.ndarray
    iterations: int


def weighted_power_program(c, a, q: float, start=None, seed: int = 0,
                           max_iter: int = MAX_ITER, rel_tol: float = REL_TOL) -> ProgramResult:
    """Solve the rows of the power program above.

    ``c`` and ``a`` have shape (m, N); entries with ``a == 0`` are excluded.
    The start point is a seeded random perturbation of the uniform feasible
    point unless ``start`` is given.
    """
    c = np.atleast_2d(np.asarray(c, dtype=float))
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if q <= 1:
        raise ValueError("q must exceed 1")
    active = a > 0
    safe_a = np.where(active, a, 1.0)

    def objective(x):
        return np.sum(np.where(active, c * x**q, 0.0), axis=1)

    if start is None:
        rng = np.random.default_rng(seed)
        x = np.where(active, 1.0 + 0.5 * rng.uniform(-1.0, 1.0, size=a.shape), 0.0)
        x = x / np.sum(a * x, axis=1, keepdims=True)
    else:
        x = project_scaled_simplex(start, a)

    f = objective(x)
    step = np.full(len(x), 1.0)
    # initial step from the metric Hessian at the start point
    hess = np.where(active, q * (q - 1) * c * np.maximum(x, 1e-300) ** (q - 2) / safe_a, 0.0)
    step = 1.0 / np.maximum(np.max(hess, axis=1), 1e-300)
    done = np.zeros(len(x), dtype=bool)
    for it in range(1, max_iter + 1):
        rows = ~done
        xr, fr, ar, cr, sr = x[rows], f[rows], a[rows], c[rows], step[rows]
        act = active[rows]
        grad = np.where(act, q * cr * xr ** (q - 1) / np.where(act, ar, 1.0), 0.0)
        pending = np.ones(len(xr), dtype=bool)
        new_x = xr.copy()
        new_f = fr.copy()
        for _ in range(60):
            idx = np.flatnonzero(pending)
            if len(idx) == 0:
                break
            cand = project_scaled_simplex(xr[idx] - sr[idx, None] * grad[idx], ar[idx])
            d = cand - xr[idx]
            fc = np.sum(np.where(act[idx], cr[idx] * cand**q, 0.0), axis=1)
            bound = (fr[idx] + np.sum(ar[idx] * grad[idx] * d, axis=1)
                     + np.sum(ar[idx] * d * d, axis=1) / (2 * sr[idx]))
            ok = fc <= bound + 1e-15 * np.abs(fr[idx])
            new_x[idx[ok]] = cand[ok]
            new_f[idx[ok]] = fc[ok]
            pending[idx[ok]] = False
            sr[idx[~ok]] *= 0.5
        change = np.abs(fr - new_f) / np.maximum(np.abs(fr), 1e-300)
        x[rows] = new_x
        f[rows] = new_f
        step[rows] = np.where(pending, sr, sr * 1.5)
        finished = np.flatnonzero(rows)[(change < rel_tol) & ~pending]
        done[finished] = True
        if done.all():
            return ProgramResult(x, f, it)
    raise SolverNotConverged(
        f"projected gradient did not converge in {max_iter} iterations "
        f"({int((~done).sum())} rows left)")


def power_program_closed_form(c, a, q: float) -> np.ndarray:
    """Lagrange value ``(sum a^(q/(q-1)) c^(-1/(q-1)))^(1-q)`` per row."""
    c = np.atleast_2d(np.asarray(c, dtype=float))
    a = np.atleast_2d(np.asarray(a, dtype=float))
    e = 1.0 / (q - 1.0)
    with np.errstate(divide="ignore"):
        terms = np.where(a > 0, a ** (q * e) * np.where(a > 0, c, 1.0) ** (-e), 0.0)
    return np.sum(terms, axis=1) ** (1.0 - q)


# --- discrete curve modulus on a flat annulus --------------------------------


def _unit_sphere_area(n: int) -> float:
    return 2 * np.pi if n == 2 else 4 * np.pi


def annulus_curve_modulus(n: int, alpha: float, eps: float, eps0: float) -> float:
    """Classical alpha-modulus of curves joining the boundary spheres of a flat annulus."""
    if alpha <= 1:
        raise UnsupportedExponent(f"alpha = {alpha} <= 1 has no finite annulus modulus")
    omega = _unit_sphere_area(n)
    if np.isclose(alpha, n, rtol=0, atol=1e-14):
        return omega * np.log(eps0 / eps) ** (1 - n)
    gamma = (alpha - n) / (alpha - 1)
    return omega * abs(gamma) ** (alpha - 1) * abs(eps0**gamma - eps**gamma) ** (1 - alpha)


def _cell_lengths(n, r_edges, pol_edges, n_az, curve_dirs, samples):
    """Arclength of each sampled curve inside each (radial, angular) cell.

    ``curve_dirs(t)`` gives, for parameters ``t`` in [0, 1] mapped to radii,
    the unit direction of every curve at that radius.
    """
    r = np.geomspace(r_edges[0], r_edges[-1], samples + 1)
    dirs = curve_dirs(r)  # (samples + 1, curves, n)
    pts = r[:, None, None] * dirs
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=-1)  # (samples, curves)
    mid = 0.5 * (pts[1:] + pts[:-1])
    rm = np.linalg.norm(mid, axis=-1)
    ri = np.clip(np.searchsorted(r_edges, rm) - 1, 0, len(r_edges) - 2)
    phi = np.mod(np.arctan2(mid[..., 1], mid[..., 0]), 2 * np.pi)
    ai = np.minimum((phi / (2 * np.pi) * n_az).astype(int), n_az - 1)
    if n == 2:
        cell = ri * n_az + ai
        n_cells = (len(r_edges) - 1) * n_az
    else:
        cz = mid[..., 2] / rm
        pi = np.clip(np.searchsorted(pol_edges, cz) - 1, 0, len(pol_edges) - 2)
        n_pol = len(pol_edges) - 1
        cell = (ri * n_pol + pi) * n_az + ai
        n_cells = (len(r_edges) - 1) * n_pol * n_az
    n_curves = seg.shape[1]
    lengths = np.zeros((n_curves, n_cells))
    np.add.at(lengths, (np.broadcast_to(np.arange(n_curves), seg.shape), cell), seg)
    return lengths


def discrete_curve_modulus(n: int, alpha: float, eps: float, eps0: float,
                           radial_cells: int = 48, angular_cells: int = 24,
                           twists=(0.0, 0.5, -0.5, 1.0, -1.0), samples: int = 3000) -> float:
    """Brute-force alpha-modulus on cellwise constant densities.

    Curves are radial rays and logarithmic spirals ``phi = phi_j + k log(r/eps)``
    through the center of every azimuthal cell (and every polar band for
    n = 3). The convex program is solved with cvxpy.
    """
    import cvxpy as cp

    if alpha <= 1:
        raise UnsupportedExponent(f"alpha = {alpha} <= 1")
    if n not in (2, 3):
        raise UnsupportedExponent(f"no discrete curve oracle for n = {n}")
    r_edges = np.geomspace(eps, eps0, radial_cells + 1)
    n_az = angular_cells
    phi0 = 2 * np.pi * (np.arange(n_az) + 0.5) / n_az
    shell = np.diff(r_edges**n) / n
    if n == 2:
        pol_edges = None
        starts = phi0
        volumes = np.repeat(shell, n_az) * (2 * np.pi / n_az)
    else:
        n_pol = max(angular_cells // 2, 2)
        pol_edges = np.linspace(-1.0, 1.0, n_pol + 1)
        cz_mid = 0.5 * (pol_edges[1:] + pol_edges[:-1])
        cz0, starts = (m.ravel() for m in np.meshgrid(cz_mid, phi0, indexing="ij"))
        band = np.diff(pol_edges) * (2 * np.pi / n_az)
        volumes = (shell[:, None, None] * band[None, :, None]
                   * np.ones(n_az)[None, None, :]).ravel()
    twist = np.repeat(np.asarray(twists, dtype=float), len(starts))
    start = np.tile(starts, len(twists))
    if n == 3:
        cz = np.tile(cz0, len(twists))

    def curve_dirs(r):
        phi = start[None] + twist[None] * np.log(r[:, None] / eps)
        if n == 2:
            return np.stack([np.cos(phi), np.sin(phi)], axis=-1)
        st = np.sqrt(1 - cz**2)[None]
        return np.stack([st * np.cos(phi), st * np.sin(phi),
                         np.broadcast_to(cz[None], phi.shape)], axis=-1)

    lengths = _cell_lengths(n, r_edges, pol_edges, n_az, curve_dirs, samples)
    rho = cp.Variable(lengths.shape[1], nonneg=True)
    problem = cp.Problem(cp.Minimize(volumes @ cp.power(rho, alpha)), [lengths @ rho >= 1])
    problem.solve(solver=cp.CLARABEL)
    if problem.status not in ("optimal", "optimal_inaccurate") or problem.value is None:
        raise SolverNotConverged(f"curve-modulus program ended with status {problem.status}")
    return float(problem.value)
