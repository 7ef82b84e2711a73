"""p-moduli of geodesic-sphere families and the lower bound machinery.

The central quantity is

    I(P0, eps, eps0) = int_eps^eps0 dr / ||Q||_s(P0, r),
    ||Q||_s(P0, r) = (int_{D(P0, r)} Q^s dA)^(1/s),   s = (n-1)/(p-n+1),

computed on a :class:`~lowerq.quadrature.ShellGrid`. Every closed form here
has a brute-force counterpart in :mod:`lowerq.oracle`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import expr, oracle
from .errors import ConfigError, EmptyShell, NotNormalized, UnsupportedExponent
from .quadrature import ShellGrid

JENSEN_RTOL = 1e-9


@dataclass(frozen=True)
class ExponentSet:
    """Exponents tied to a modulus exponent ``p > n - 1``."""

    n: int
    p: float

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError("dimension must be at least 2")
        if not self.p > self.n - 1:
            raise ConfigError(f"p must exceed n - 1 = {self.n - 1}, got {self.p}")

    @property
    def q(self) -> float:
        return self.p / (self.n - 1)

    @property
    def s(self) -> float:
        return (self.n - 1) / (self.p - self.n + 1)

    @property
    def alpha(self) -> float:
        return self.p / (self.p - self.n + 1)

    @property
    def density_exponent(self) -> float:
        """``1 / (p - n + 1)``, the power in the extremal density."""
        return 1.0 / (self.p - self.n + 1)


@dataclass(frozen=True)
class WeightField:
    """Positive weight ``Q(x, r)``; ``r`` is the geodesic distance to the center."""

    eval: Callable
    description: str = "custom"

    def __call__(self, x, r):
        return self.eval(x, r)

    def scaled(self, factor: float) -> "WeightField":
        f = self.eval
        return WeightField(lambda x, r: factor * np.asarray(f(x, r)),
                           f"{factor:g} * ({self.description})")


def constant_weight(value: float) -> WeightField:
    value = float(value)
    if not value > 0:
        raise ConfigError("weights must be positive")
    return WeightField(lambda x, r: np.full(np.shape(r), value), f"constant {value:g}")


def radial_weight(profile: Callable[[np.ndarray], np.ndarray], description: str = "radial"):
    return WeightField(lambda x, r: profile(np.asarray(r, dtype=float)), description)


def expression_weight(source: str, n: int) -> WeightField:
    """Weight from an expression in ``x1..xn`` and ``r``."""
    f = expr.point_function(source, n, with_radius=True)
    return WeightField(lambda x, r: f(x, r), source)


def weight_from_spec(spec, n: int) -> WeightField:
    if isinstance(spec, (int, float)):
        return constant_weight(spec)
    if isinstance(spec, str):
        return expression_weight(spec, n)
    kind = spec.get("kind", "constant")
    if kind == "constant":
        return constant_weight(spec.get("value", 1.0))
    if kind in ("radial", "expression"):
        return expression_weight(spec["expr"], n)
    raise ConfigError(f"unknown weight kind {kind!r}")


@dataclass(frozen=True)
class Density:
    values: np.ndarray  # (m, N), nonnegative

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError("densities must be finite and nonnegative")


@dataclass(frozen=True)
class RadialProfile:
    """``eta(r) >= 0`` on ``(eps, eps0)``."""

    eval: Callable[[np.ndarray], np.ndarray]
    normalized: bool = True

    def __call__(self, r):
        return self.eval(np.asarray(r, dtype=float))

    @classmethod
    def from_values(cls, radii, values, normalized: bool = True) -> "RadialProfile":
        radii = np.asarray(radii, dtype=float)
        values = np.asarray(values, dtype=float)
        return cls(lambda r: np.interp(r, radii, values), normalized)


@dataclass
class ModulusEstimate:
    value: float
    kind: str  # closed_form | convex_oracle
    resolution: dict
    gap: float | None = None
    density: Density | None = field(default=None, repr=False)


# --- sphere norms and the lower-bound integral ------------------------------


def _weight_values(grid: ShellGrid, Q: WeightField) -> np.ndarray:
    values = grid.evaluate(Q)
    if np.any(values[grid.mask] <= 0):
        raise ConfigError("weight Q must be positive on the ring")
    return np.where(grid.mask, values, 1.0)


def _qnorms(grid: ShellGrid, qv: np.ndarray, exps: ExponentSet) -> np.ndarray:
    areas = grid.shell_areas()
    empty = np.flatnonzero(areas <= 0)
    if len(empty):
        raise EmptyShell(f"D(P0, r) has zero discrete area at r = {grid.radii[empty[0]]:.6g}")
    integral = np.sum(qv**exps.s * grid.cell_areas, axis=1)
    return integral ** (1.0 / exps.s)


def qnorms(grid: ShellGrid, Q: WeightField, exps: ExponentSet) -> np.ndarray:
    """``||Q||_s(P0, r_k)`` for every shell."""
    return _qnorms(grid, _weight_values(grid, Q), exps)


def qnorm_on_sphere(grid: ShellGrid, Q: WeightField, exps: ExponentSet, shell_index: int) -> float:
    return float(qnorms(grid, Q, exps)[int(shell_index)])


def lower_bound_integral(grid: ShellGrid, Q: WeightField, exps: ExponentSet) -> float:
    """``I = int dr / ||Q||_s(P0, r)`` by the grid's radial rule."""
    return float(np.dot(grid.radial_weights, 1.0 / qnorms(grid, Q, exps)))


def extremal_density(grid: ShellGrid, Q: WeightField, exps: ExponentSet) -> Density:
    """``rho0 = (Q / ||Q||_s(P0, d(P, P0)))^(1/(p-n+1))`` on the grid (zero outside D)."""
    qv = _weight_values(grid, Q)
    norms = _qnorms(grid, qv, exps)
    rho = (qv / norms[:, None]) ** exps.density_exponent
    return Density(np.where(grid.mask, rho, 0.0))


def objective_value(grid: ShellGrid, Q: WeightField, exps: ExponentSet, rho: Density) -> float:
    """``int rho^p / Q dV`` over the ring intersected with D."""
    qv = _weight_values(grid, Q)
    values = np.asarray(rho.values if isinstance(rho, Density) else rho, dtype=float)
    return float(np.sum(values**exps.p / qv * grid.cell_volumes))


def shell_energy(grid: ShellGrid, exps: ExponentSet, rho: Density) -> np.ndarray:
    """``int_{D(P0, r_k)} rho^(n-1) dA`` per shell (admissibility check)."""
    return np.sum(np.asarray(rho.values) ** (exps.n - 1) * grid.cell_areas, axis=1)


# --- per-shell infima and the family modulus ---------------------------------


def _shell_program(grid: ShellGrid, qv: np.ndarray):
    a = grid.cell_areas
    return a / qv, a


def per_shell_infima(grid: ShellGrid, Q: WeightField, exps: ExponentSet,
                     mode: str = "closed_form", seed: int = 0):
    """Infimum of ``int alpha^q / Q dA`` over ``alpha >= 0`` with ``int alpha dA = 1``.

    Returns ``(values, alpha)`` with ``alpha`` of shape (m, N).
    """
    qv = _weight_values(grid, Q)
    if mode == "closed_form":
        norms = _qnorms(grid, qv, exps)
        alpha = qv**exps.s * grid.mask / norms[:, None] ** exps.s
        return 1.0 / norms, alpha
    if mode == "convex_oracle":
        _qnorms(grid, qv, exps)
        c, a = _shell_program(grid, qv)
        result = oracle.weighted_power_program(c, a, exps.q, seed=seed)
        return result.values, result.x
    raise ValueError(f"unknown mode {mode!r}")


def per_shell_infimum(grid: ShellGrid, Q: WeightField, exps: ExponentSet, shell_index: int,
                      mode: str = "closed_form", seed: int = 0) -> float:
    k = int(shell_index)
    qv = _weight_values(grid, Q)
    if mode == "closed_form":
        return float(1.0 / _qnorms(grid, qv, exps)[k])
    if mode == "convex_oracle":
        _qnorms(grid, qv, exps)
        c, a = _shell_program(grid, qv)
        return float(oracle.weighted_power_program(c[k], a[k], exps.q, seed=seed).values[0])
    raise ValueError(f"unknown mode {mode!r}")


def surface_family_modulus(grid: ShellGrid, Q: WeightField, exps: ExponentSet,
                           kind: str = "closed_form", seed: int = 0) -> ModulusEstimate:
    """Discrete infimum of ``int rho^p / Q dV`` over densities with unit shell energy.

    ``closed_form`` integrates the per-shell Lagrange values (this is ``I``);
    ``convex_oracle`` solves every shell by projected gradient. The ``gap``
    of an oracle estimate is its relative distance to the closed form.
    """
    closed_values, closed_alpha = per_shell_infima(grid, Q, exps, "closed_form")
    closed = float(np.dot(grid.radial_weights, closed_values))
    if kind == "closed_form":
        rho = Density(closed_alpha ** (1.0 / (exps.n - 1)))
        return ModulusEstimate(closed, kind, grid.resolution(), 0.0, rho)
    if kind == "convex_oracle":
        values, alpha = per_shell_infima(grid, Q, exps, "convex_oracle", seed=seed)
        value = float(np.dot(grid.radial_weights, values))
        rho = Density(np.maximum(alpha, 0.0) ** (1.0 / (exps.n - 1)))
        return ModulusEstimate(value, kind, grid.resolution(), abs(value - closed) / closed, rho)
    raise ValueError(f"unknown kind {kind!r}")


# --- weighted Jensen ---------------------------------------------------------


def canonical_profile(grid: ShellGrid, Q: WeightField, exps: ExponentSet) -> RadialProfile:
    """``eta0(t) = 1 / (I ||Q||_s(P0, t))`` sampled at the shell radii."""
    norms = qnorms(grid, Q, exps)
    total = float(np.dot(grid.radial_weights, 1.0 / norms))
    return RadialProfile.from_values(grid.radii, 1.0 / (total * norms))


def normalize_profile(grid: ShellGrid, eta: Callable) -> RadialProfile:
    mass = float(np.dot(grid.radial_weights, eta(grid.radii)))
    if not mass > 0:
        raise NotNormalized("profile has no mass on the ring")
    return RadialProfile(lambda r: np.asarray(eta(r)) / mass, True)


def random_profiles(grid: ShellGrid, count: int, seed: int, knots: int = 8):
    """Random nonnegative piecewise-linear profiles normalized on the grid."""
    rng = np.random.default_rng(seed)
    xs = np.linspace(grid.ring.eps, grid.ring.eps0, knots)
    out = []
    for _ in range(count):
        ys = rng.uniform(0.0, 1.0, knots) ** 2
        ys[rng.integers(knots)] += 0.1  # keep mass positive
        out.append(normalize_profile(grid, lambda r, ys=ys: np.interp(r, xs, ys)))
    return out


@dataclass
class JensenReport:
    lhs: float
    rhs: float
    holds: bool


def jensen_verify(grid: ShellGrid, Q: WeightField, exps: ExponentSet,
                  eta: RadialProfile) -> JensenReport:
    """Compare ``1/I^s`` with ``int Q^s eta^alpha(d(P, P0)) dV``."""
    eta_r = np.asarray(eta(grid.radii), dtype=float)
    if np.any(eta_r < 0):
        raise NotNormalized("profile must be nonnegative")
    mass = float(np.dot(grid.radial_weights, eta_r))
    if abs(mass - 1.0) > 1e-6:
        raise NotNormalized(f"int eta dr = {mass:.9g}, expected 1")
    qv = _weight_values(grid, Q)
    total = lower_bound_integral(grid, Q, exps)
    lhs = total ** (-exps.s)
    rhs = float(np.sum(qv**exps.s * eta_r[:, None] ** exps.alpha * grid.cell_volumes))
    return JensenReport(lhs, rhs, rhs >= lhs * (1 - JENSEN_RTOL))


# --- ring upper bound and the flat curve modulus -----------------------------


@dataclass
class RingBound:
    bound: float
    c_estimate: float


def c_estimate(grid: ShellGrid, exps: ExponentSet) -> float:
    """``(1 + delta_g(eps0))^(p s)``: a monotone surrogate for the near-identity constant."""
    deviation = grid.ring.neighborhood.metric_deviation(grid.ring.eps0)
    return float((1.0 + deviation) ** (exps.p * exps.s))


def ring_upper_bound(grid: ShellGrid, Q: WeightField, exps: ExponentSet) -> RingBound:
    c = c_estimate(grid, exps)
    return RingBound(c / lower_bound_integral(grid, Q, exps) ** exps.s, c)


def curve_modulus_flat_annulus(exps: ExponentSet, eps: float, eps0: float,
                               mode: str = "closed_form", **oracle_options) -> float:
    """``alpha``-modulus of curves joining ``|x| = eps`` and ``|x| = eps0`` in flat space."""
    if not 0 < eps < eps0:
        raise ConfigError("need 0 < eps < eps0")
    if mode == "closed_form":
        return oracle.annulus_curve_modulus(exps.n, exps.alpha, eps, eps0)
    if mode == "oracle":
        return oracle.discrete_curve_modulus(exps.n, exps.alpha, eps, eps0, **oracle_options)
    raise UnsupportedExponent(f"unknown curve-modulus mode {mode!r}")
