"""Command-line front end.

    lowerq --config run.json --out results/ [--threads k] [--seed s]
    lowerq --check --out acceptance/

Every run writes ``summary.csv`` (name,value rows ending with the resolved
config), ``shells.csv`` and ``profile.dat``. Errors are reported on stderr
as ``error: CODE: message`` with a per-code exit status.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import acceptance, boundary, config, manifold, mappings, modulus
from .errors import ModulusError
from .quadrature import shell_grid

SHELL_COLUMNS = ["r", "area", "qnorm", "per_shell_infimum_closed", "per_shell_infimum_oracle"]


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_table(path: Path, header, rows) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def write_profile(path: Path, xs, ys) -> None:
    with path.open("w", newline="") as fh:
        for x, y in zip(xs, ys):
            fh.write(f"{fmt(x)} {fmt(y)}\n")


def write_summary(path: Path, items, resolved: dict | None) -> None:
    rows = list(items)
    if resolved is not None:
        rows.append(("config", json.dumps(resolved, sort_keys=True, separators=(",", ":"))))
    write_table(path, ["name", "value"], rows)


# --- commands ----------------------------------------------------------------


def _grid(cfg: config.RunConfig):
    metric = cfg.build_metric()
    ring = manifold.ring(metric, cfg.center_point(), cfg.eps, cfg.eps0, cfg.build_domain())
    return shell_grid(ring, cfg.radial_panels, cfg.angular_nodes)


def _shell_rows(grid, Q, exps, seed):
    norms = modulus.qnorms(grid, Q, exps)
    closed, _ = modulus.per_shell_infima(grid, Q, exps, "closed_form")
    oracle_vals, _ = modulus.per_shell_infima(grid, Q, exps, "convex_oracle", seed=seed)
    areas = grid.shell_areas()
    return norms, [list(row) for row in zip(grid.radii, areas, norms, closed, oracle_vals)]


def _exponent_items(exps):
    return [("n", exps.n), ("p", exps.p), ("q", exps.q), ("s", exps.s), ("alpha", exps.alpha)]


def run_modulus(cfg, out: Path):
    grid = _grid(cfg)
    exps = modulus.ExponentSet(cfg.n, cfg.exponent())
    Q = modulus.weight_from_spec(cfg.weight, cfg.n)
    closed = modulus.surface_family_modulus(grid, Q, exps, "closed_form")
    est = modulus.surface_family_modulus(grid, Q, exps, "convex_oracle", seed=cfg.seed)
    rho0 = modulus.extremal_density(grid, Q, exps)
    objective = modulus.objective_value(grid, Q, exps, rho0)
    bound = modulus.ring_upper_bound(grid, Q, exps)
    items = _exponent_items(exps) + [
        ("I", closed.value), ("oracle_modulus", est.value), ("gap", est.gap),
        ("extremal_objective", objective),
        ("extremal_gap", abs(objective - closed.value) / closed.value),
        ("c_estimate", bound.c_estimate), ("ring_upper_bound", bound.bound),
    ]
    if cfg.metric.get("name") == "euclidean" and cfg.domain is None and cfg.weight in (1, 1.0):
        curve = modulus.curve_modulus_flat_annulus(exps, cfg.eps, cfg.eps0)
        items += [("curve_modulus", curve), ("duality_product", curve * closed.value**exps.s)]
    norms, rows = _shell_rows(grid, Q, exps, cfg.seed)
    return items, SHELL_COLUMNS, rows, (grid.radii, norms)


def run_jensen(cfg, out: Path):
    grid = _grid(cfg)
    exps = modulus.ExponentSet(cfg.n, cfg.exponent())
    Q = modulus.weight_from_spec(cfg.weight, cfg.n)
    eta0 = modulus.canonical_profile(grid, Q, exps)
    eq = modulus.jensen_verify(grid, Q, exps, eta0)
    violations, margin = 0, np.inf
    for eta in modulus.random_profiles(grid, cfg.profiles, cfg.seed):
        rep = modulus.jensen_verify(grid, Q, exps, eta)
        violations += not rep.holds
        margin = min(margin, (rep.rhs - rep.lhs) / rep.lhs)
    items = _exponent_items(exps) + [
        ("I", modulus.lower_bound_integral(grid, Q, exps)),
        ("lhs", eq.lhs), ("rhs_eta0", eq.rhs),
        ("equality_gap", abs(eq.rhs - eq.lhs) / eq.lhs),
        ("profiles", cfg.profiles), ("violations", violations),
        ("min_margin", margin if cfg.profiles else float("nan")),
    ]
    _, rows = _shell_rows(grid, Q, exps, cfg.seed)
    return items, SHELL_COLUMNS, rows, (grid.radii, eta0(grid.radii))


def _map(cfg):
    return mappings.map_from_spec(cfg.map, cfg.build_metric(), cfg.build_target())


def _kp_rows(grid, fmap, exps, seed):
    L, l, J, kp = mappings.dilatation_fields(fmap, grid.points, exps)
    Q = modulus.WeightField(lambda x, r: kp, "K_p")
    norms, rows = _shell_rows(grid, Q, exps, seed)
    masked = np.where(grid.mask, kp, np.nan)
    for row, lo, hi in zip(rows, np.nanmin(masked, axis=1), np.nanmax(masked, axis=1)):
        row += [lo, hi]
    return (L, l, J, kp), norms, rows


def run_dilatation(cfg, out: Path):
    grid = _grid(cfg)
    exps = modulus.ExponentSet(cfg.n, cfg.exponent())
    fmap = _map(cfg)
    (L, l, J, kp), _, rows = _kp_rows(grid, fmap, exps, cfg.seed)
    sel = grid.mask
    report = mappings.classify_map(fmap, grid, exps, seed=cfg.seed)
    items = _exponent_items(exps) + [
        ("map", fmap.tag),
        ("kp_min", kp[sel].min()), ("kp_max", kp[sel].max()), ("kp_mean", kp[sel].mean()),
        ("L_max", L[sel].max()), ("l_min", l[sel].min()),
        ("J_min", J[sel].min()), ("J_max", J[sel].max()),
        ("lipschitz", report.lipschitz), ("lip_estimate", report.lip_estimate),
        ("bilipschitz", report.bilipschitz), ("lower_estimate", report.lower_estimate),
        ("finitely_bilipschitz", report.finitely_bilipschitz),
        ("failures", len(report.failures)),
    ]
    mean_kp = np.nanmean(np.where(sel, kp, np.nan), axis=1)
    return items, SHELL_COLUMNS + ["kp_min", "kp_max"], rows, (grid.radii, mean_kp)


def run_image_bound(cfg, out: Path):
    grid = _grid(cfg)
    exps = modulus.ExponentSet(cfg.n, cfg.exponent())
    fmap = _map(cfg)
    rep = mappings.verify_image_bound(fmap, grid, exps, seed=cfg.seed)
    _, norms, rows = _kp_rows(grid, fmap, exps, cfg.seed)
    items = _exponent_items(exps) + [
        ("map", fmap.tag), ("lhs", rep.lhs), ("rhs", rep.rhs), ("holds", rep.holds),
        ("gap", rep.gap), ("infinite_dilatation", rep.infinite_dilatation),
        ("kp_min", rep.kp_min), ("kp_max", rep.kp_max),
    ]
    return items, SHELL_COLUMNS + ["kp_min", "kp_max"], rows, (grid.radii, norms)


def run_boundary(cfg, out: Path):
    metric = cfg.build_metric()
    nbhd = manifold.build_normal_neighborhood(metric, cfg.center_point(), cfg.delta)
    K = modulus.weight_from_spec(cfg.weight, cfg.n)
    domain = cfg.build_domain()
    cutoffs = cfg.delta * 2.0 ** -np.arange(1, cfg.levels + 1)
    rep = boundary.divergence_check(K, nbhd, cfg.delta, domain, cutoffs,
                                    angular_nodes=cfg.angular_nodes)
    items = [("n", cfg.n), ("delta", cfg.delta), ("verdict", rep.verdict),
             ("growth_fit", rep.growth_fit), ("increment_exponent", rep.increment_exponent),
             ("tail_estimate", rep.tail_estimate), ("I_last", rep.partial_integrals[-1])]
    if cfg.delta < 1:
        fit = boundary.log_growth_fit(K, nbhd, cfg.delta, domain, cfg.levels, cfg.angular_nodes)
        items += [("is_O_log", fit.is_O_log), ("log_constant", fit.constant),
                  ("consistent", (not fit.is_O_log) or rep.verdict == "diverges")]
    return (items, ["t", "norm_k", "partial_integral"], rep.rows,
            (rep.cutoffs, rep.partial_integrals))


COMMANDS = {"modulus": run_modulus, "jensen": run_jensen, "dilatation": run_dilatation,
            "theorem2": run_image_bound, "boundary": run_boundary}


def run(cfg: config.RunConfig, out: Path) -> int:
    manifold.set_threads(cfg.threads)
    out.mkdir(parents=True, exist_ok=True)
    items, columns, rows, profile = COMMANDS[cfg.command](cfg, out)
    items = [("command", cfg.command), ("threads", cfg.threads), ("seed", cfg.seed)] + items
    write_summary(out / f"{cfg.prefix}summary.csv", items, cfg.resolved())
    write_table(out / f"{cfg.prefix}shells.csv", columns, rows)
    write_profile(out / f"{cfg.prefix}profile.dat", *profile)
    return 0


def run_check(out: Path, seed: int, threads: int) -> int:
    """Run the acceptance suite; files hold results only, timings go to stdout."""
    manifold.set_threads(threads)
    out.mkdir(parents=True, exist_ok=True)

    def report(res):
        timing = "" if res.limit is None else f" (limit {res.limit:g} s)"
        status = "PASS" if res.ok else "FAIL"
        print(f"[{status}] criterion {res.number}: {res.title}: "
              f"{res.runtime:.1f} s{timing}", flush=True)

    results = acceptance.run_suite(seed, report)
    rows = []
    for res in results:
        rows.append((res.number, "passed", res.passed))
        rows.extend((res.number, k, v) for k, v in res.metrics.items())
    write_table(out / "acceptance.csv", ["criterion", "name", "value"], rows)
    write_summary(out / "summary.csv",
                  [("seed", seed), ("threads", threads)]
                  + [(f"criterion_{r.number}", r.passed) for r in results], None)
    return 0 if all(r.ok for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lowerq", description="Lower moduli bounds on Riemannian rings.")
    parser.add_argument("--config", type=Path, help="JSON run configuration")
    parser.add_argument("--out", type=Path, help="output directory")
    parser.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized parts")
    parser.add_argument("--check", action="store_true", help="run the acceptance suite")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1 or args.seed < 0 or args.seed >= 2**64:
        print("error: E_CONFIG: --threads must be >= 1 and --seed in [0, 2^64)", file=sys.stderr)
        return 2
    try:
        if args.check:
            return run_check(args.out or Path("acceptance-output"), args.seed, args.threads)
        if args.config is None:
            print("error: E_CONFIG: --config is required unless --check is given",
                  file=sys.stderr)
            return 2
        cfg = config.load(args.config, args.seed, args.threads)
        return run(cfg, args.out or Path("."))
    except ModulusError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return exc.exit_status


if __name__ == "__main__":
    sys.exit(main())
