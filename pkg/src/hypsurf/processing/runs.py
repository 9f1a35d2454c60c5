"""
Experiment runners behind the CLI commands.

Each runner takes a resolved RunConfig, does the work through the library
operations and returns a ReportBundle; a violated invariant is recorded on
the bundle, never raised.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pandas as pd

from hypsurf.census.geodesics import count_in_band, enumerate_closed_geodesics, pgt_ratio_curve, systole
from hypsurf.config.logging_config import configure_logging
from hypsurf.config.run_config import RunConfig
from hypsurf.core.hyp import Mat2, UnitTangent, frame_at
from hypsurf.dynamics.avoidance import avoidance_curve, net_filter
from hypsurf.dynamics.closing import (
    closing_box_check,
    closing_census_union,
    length_multiset_diff,
    orbit_box_cover,
)
from hypsurf.dynamics.discs import embedded_disc_center
from hypsurf.dynamics.flowbox import FlowBox, mu_hat, transverse_box
from hypsurf.dynamics.liouville import (
    MixingEstimate,
    box_fraction,
    liouville_samples,
    mixing_curve,
    multiple_mixing,
)
from hypsurf.dynamics.net import build_delaunay_net
from hypsurf.errors import ConfigError, NoGeodesicInRange
from hypsurf.processing.reports import (
    ReportBundle,
    census_frame,
    pgt_frame,
    records_frame,
    topology_bins_frame,
    topology_frame,
)
from hypsurf.random_models.bm import BMGeodesic, bm_geodesics
from hypsurf.random_models.probability import (
    BirthdayConfig,
    BirthdayRow,
    CouponRow,
    birthday_mc,
    birthday_sweep,
    coupon_sweep,
    cover_time_variance,
)
from hypsurf.random_models.ribbon import (
    RibbonSample,
    exhaustive_genus_distribution,
    random_ribbon_graph,
    ribbon_samples,
)
from hypsurf.surfaces.covers import build_cover, random_cover
from hypsurf.surfaces.regular import SurfaceGroup, build_regular_surface
from hypsurf.surfaces.serialize import load_surface, save_surface
from hypsurf.topology.classify import classify_census, topology_bins
from hypsurf.utils.parallel import substream

logger = configure_logging(__name__)

STAT_SIGMAS = 3.0
MIXED_T = 12.0
COUPON_REL_TOL = 0.03
_DIFF_EDGE_TOL = 1e-6
MC_KINDS = ("birthday", "coupon", "both")


def derived_seed(config: RunConfig, k: int) -> int:
    """Seed for the k-th independent stream of a run."""
    return int(substream(config.seed, k).integers(2**63))


def surface_from_config(config: RunConfig) -> SurfaceGroup:
    """``[surface] file`` if set, else the regular surface of ``genus``, optionally under a random cover."""
    path = config.get("surface", "file")
    if path:
        return load_surface(path)
    surface = build_regular_surface(int(config.get("surface", "genus")))
    degree = int(config.get("surface", "cover_degree"))
    if degree > 1:
        surface = build_cover(random_cover(surface, degree, derived_seed(config, 0)))
    return surface


def _base_systole(surface: SurfaceGroup) -> float:
    bound = 2.0 * math.acosh(1.0 + surface.area / (2.0 * math.pi)) + 0.01
    return systole(surface, bound)


# ── gen-surface ─────────────────────────────────────────────────


def run_gen_surface(config: RunConfig) -> ReportBundle:
    bundle = ReportBundle("gen-surface", config)
    surface = surface_from_config(config)
    surface.check_relators()
    expected = (4 * surface.genus - 4) * math.pi
    area_error = abs(surface.area - expected)
    if area_error > 1e-6:
        bundle.violation(f"area {surface.area} differs from (4g-4)pi = {expected} by {area_error:.3e}")
    path = save_surface(surface, Path(config.out) / "gen-surface" / f"{surface.surface_id}.json")
    bundle.add_table(
        "surface",
        pd.DataFrame(
            [
                {
                    "surface_id": surface.surface_id,
                    "genus": surface.genus,
                    "degree": surface.degree,
                    "generators": len(surface.generators),
                    "area": surface.area,
                    "area_error": area_error,
                    "domain_radius": surface.domain_radius,
                }
            ]
        ),
    )
    bundle.note(f"{surface.surface_id}: genus {surface.genus}, area {surface.area:.9f}, saved to {path}")
    return bundle


# ── census ──────────────────────────────────────────────────────


def run_census(config: RunConfig) -> ReportBundle:
    bundle = ReportBundle("census", config)
    surface = surface_from_config(config)
    L = float(config.get("census", "L"))
    census = enumerate_closed_geodesics(surface, L)
    bundle.add_table("classes", census_frame(census))
    grid = [x for x in config.get("census", "pgt_grid") if x <= L]
    if grid:
        curve = pgt_ratio_curve(census, grid)
        bundle.add_table("pgt", pgt_frame(curve))
        bundle.note("N(X,L) L / e^L: " + ", ".join(f"L={x:g}: {r:.4f}" for x, r in curve))

    if config.get("census", "classify") and not surface.is_cover:
        records = classify_census(surface, census, threads=config.threads)
        bins = topology_bins(census, records)
        bundle.add_table("topology", topology_frame(records))
        df = topology_bins_frame(bins)
        bundle.add_table("bins", df)
        chi = 2 - 2 * surface.genus
        for r in records:
            if r.simple and r.filling:
                bundle.violation(f"class {r.class_id} is both simple and filling")
            if r.euler < chi or (r.euler == chi) != r.filling:
                bundle.violation(f"class {r.class_id}: V-E+F = {r.euler} against 2-2g = {chi}, filling={r.filling}")
        if int(df["n"].sum()) != len(census):
            bundle.violation(f"bins hold {int(df['n'].sum())} classes, census has {len(census)}")
        bundle.note(
            f"{len(census)} classes up to L={L}: {int(df['n_simple'].sum())} simple, "
            f"{int(df['n_filling'].sum())} filling"
        )
    else:
        bundle.note(f"{len(census)} classes up to L={L}")
    return bundle


# ── closing-check ───────────────────────────────────────────────


def _off_band_edge(length: float, L: float, eta: float) -> bool:
    return min(abs(length - (L - eta)), abs(length - (L + eta))) > _DIFF_EDGE_TOL


def run_closing_check(config: RunConfig) -> ReportBundle:
    """
    Two comparisons per L. ``diff``: closing over a cover of boxes placed on
    the census orbits against the census length multiset. ``boxes``: closing
    in Liouville-sampled boxes, placed without the census, against the census
    classes whose orbits pass through each box.
    """
    bundle = ReportBundle("closing-check", config)
    surface = surface_from_config(config)
    eta = float(config.get("closing", "eta"))
    grid = [float(x) for x in config.get("closing", "L")]
    census = enumerate_closed_geodesics(surface, max(grid) + eta)
    rows = []
    for L in grid:
        expected = sorted(c.length for c in census.classes if abs(c.length - L) <= eta)
        boxes = orbit_box_cover(surface, census, L, eta)
        found = sorted(h.length for h in closing_census_union(surface, boxes, L, eta=eta))
        missing, extra = length_multiset_diff(expected, found)
        missing = [x for x in missing if _off_band_edge(x, L, eta)]
        extra = [x for x in extra if _off_band_edge(x, L, eta)]
        if missing or extra:
            bundle.violation(f"L={L}: {len(missing)} census classes missing, {len(extra)} extra from closing")
        rows.append(
            {
                "L": L,
                "eta": eta,
                "boxes": len(boxes),
                "expected": count_in_band(census, L, eta),
                "found": len(found),
                "missing": len(missing),
                "extra": len(extra),
            }
        )
        bundle.note(f"L={L:g} eta={eta:g}: {len(expected)} expected, {len(found)} from closing")
    bundle.add_table("diff", pd.DataFrame(rows))

    n_boxes = int(config.get("closing", "boxes"))
    if n_boxes > 0:
        box_rows = []
        rng = substream(config.seed, 1)
        box_eta = float(config.get("closing", "box_eta"))
        sampled = [
            FlowBox.cube(surface, UnitTangent(Mat2.from_array(f)), box_eta)
            for f in liouville_samples(surface, n_boxes, rng)
        ]
        for L in grid:
            for k, box in enumerate(sampled):
                check = closing_box_check(surface, census, box, L, eta)
                if not check.ok:
                    bundle.violation(
                        f"L={L} box {k}: classes {list(check.missing)} missing, {list(check.extra)} extra, "
                        f"{len(check.unmatched)} hits outside the census"
                    )
                z = box.center_point
                box_rows.append(
                    {
                        "L": L,
                        "box": k,
                        "x": z.real,
                        "y": z.imag,
                        "found": len(check.found),
                        "required": len(check.required),
                        "allowed": len(check.allowed),
                        "missing": len(check.missing),
                        "extra": len(check.extra),
                        "unmatched": len(check.unmatched),
                    }
                )
        bundle.add_table("boxes", pd.DataFrame(box_rows))
    return bundle


# ── mixing ──────────────────────────────────────────────────────


def _off_null(estimate: float, target: float, trials: int) -> bool:
    """Fraction ``estimate`` of ``trials`` further than STAT_SIGMAS binomial sigmas plus one count from ``target``."""
    sigma = math.sqrt(max(target * (1.0 - target), 0.0) / trials)
    return abs(estimate - target) > STAT_SIGMAS * sigma + 1.0 / trials


def _mixing_boxes(surface: SurfaceGroup, eta: float) -> tuple[FlowBox, FlowBox]:
    z0, _ = embedded_disc_center(surface)
    b1 = FlowBox.cube(surface, frame_at(z0, 0.0), eta)
    return b1, transverse_box(b1)


def run_mixing(config: RunConfig) -> ReportBundle:
    bundle = ReportBundle("mixing", config)
    surface = surface_from_config(config)
    eta = float(config.get("mixing", "eta"))
    trials = int(config.get("mixing", "trials"))
    t_grid = [float(t) for t in config.get("mixing", "t_grid")]
    b1, b2 = _mixing_boxes(surface, eta)

    curve = mixing_curve(surface, b1, b2, t_grid, trials, derived_seed(config, 1), threads=config.threads)
    bundle.add_table("curve", records_frame(curve, MixingEstimate))
    for point in curve:
        if point.t >= MIXED_T and _off_null(point.estimate, point.target, point.trials):
            bundle.violation(
                f"t={point.t:g}: estimate {point.estimate:.4e} +- {point.stderr:.1e} "
                f"is off mu_hat^2 = {point.target:.4e}"
            )

    p, se = box_fraction(surface, b1, trials, derived_seed(config, 2))
    bundle.add_table("box", pd.DataFrame([{"eta": eta, "mu_hat": mu_hat(b1), "estimate": p, "stderr": se}]))
    if _off_null(p, mu_hat(b1), trials):
        bundle.violation(f"box measure {p:.6g} +- {se:.2g} is off the chart volume {mu_hat(b1):.6g}")

    points = int(config.get("mixing", "points"))
    if points >= 2:
        boxes = [b1 if k % 2 == 0 else b2 for k in range(points)]
        est = multiple_mixing(
            surface, boxes, t_grid[-1], trials, derived_seed(config, 3), threads=config.threads
        )
        bundle.add_table("multiple", records_frame([est], MixingEstimate))

    last = curve[-1]
    bundle.note(
        f"mu_hat(B) = {mu_hat(b1):.4e}; at t={last.t:g}: {last.estimate:.4e} +- {last.stderr:.1e} "
        f"(target {last.target:.4e}), kappa_fit={last.kappa_fit}"
    )
    return bundle


# ── net ─────────────────────────────────────────────────────────


def run_net(config: RunConfig) -> ReportBundle:
    bundle = ReportBundle("net", config)
    surface = surface_from_config(config)
    r = float(config.get("net", "r"))
    net = build_delaunay_net(surface, r, systole_value=_base_systole(surface))

    lengths = net.edge_lengths
    bundle.add_table(
        "edges",
        pd.DataFrame(
            {
                "i": [e[0] for e in net.edges],
                "j": [e[1] for e in net.edges],
                "length": lengths,
            }
        ),
    )
    bundle.add_table(
        "summary",
        pd.DataFrame(
            [
                {
                    "r": r,
                    "V": len(net.centers),
                    "E": len(net.edges),
                    "T": len(net.triangles),
                    "max_degree": net.max_degree,
                    "edge_constant": net.edge_constant,
                    "min_edge": float(lengths.min()),
                    "max_edge": float(lengths.max()),
                    "max_angle_deg": float(np.degrees(net.angles.max())),
                    "min_separation": net.min_separation,
                    "coverage_radius": net.coverage_radius,
                    "eta": net.eta,
                }
            ]
        ),
    )
    if lengths.min() < 2 * r - 1e-9 or lengths.max() > 6 * r + 1e-9:
        bundle.violation(f"edge lengths [{lengths.min():.4f}, {lengths.max():.4f}] leave [2r, 6r]")
    if np.degrees(net.angles.max()) > 150.0 + 1e-9:
        bundle.violation(f"triangle angle {np.degrees(net.angles.max()):.3f} deg exceeds 150")
    if net.min_separation < 2 * r - 1e-9:
        bundle.violation(f"centres {net.min_separation:.4f} apart; r-discs overlap")
    if net.coverage_radius > 3 * r + 1e-9:
        bundle.violation(f"coverage radius {net.coverage_radius:.4f} > 3r")

    census_L = float(config.get("net", "census_L"))
    if not surface.is_cover and census_L > 0:
        census = enumerate_closed_geodesics(surface, census_L)
        records = {rec.class_id: rec for rec in classify_census(surface, census, threads=config.threads)}
        rows = []
        for geo in census.primitive_classes():
            meets = net_filter(surface, geo, net.edge_boxes)
            filling = records[geo.class_id].filling
            if meets and not filling:
                bundle.violation(f"class {geo.class_id} meets every edge box but does not fill")
            rows.append({"class_id": geo.class_id, "length": geo.length, "meets_all": meets, "filling": filling})
        df = pd.DataFrame(rows, columns=["class_id", "length", "meets_all", "filling"])
        bundle.add_table("soundness", df)
        grid = [census_L / 2, 3 * census_L / 4, census_L]
        curve = avoidance_curve(surface, list(net.edge_boxes), census, grid)
        bundle.add_table("avoidance", pd.DataFrame(curve, columns=["L", "fraction"]))
        bundle.note(f"{int(df['meets_all'].sum())} of {len(df)} primitive classes meet every edge box")
    bundle.note(
        f"net r={r}: V={len(net.centers)} E={len(net.edges)} T={len(net.triangles)}, "
        f"edges in [{lengths.min():.4f}, {lengths.max():.4f}], max degree {net.max_degree}"
    )
    return bundle


# ── cover ───────────────────────────────────────────────────────


def run_cover(config: RunConfig) -> ReportBundle:
    bundle = ReportBundle("cover", config)
    base = build_regular_surface(int(config.get("surface", "genus")))
    degrees = [int(n) for n in config.get("cover", "degrees")]
    count = int(config.get("cover", "count"))
    search_len = float(config.get("cover", "search_len"))
    base_sys = _base_systole(base)
    rows = []
    for k in range(count):
        n = degrees[k % len(degrees)]
        cover = build_cover(random_cover(base, n, derived_seed(config, 100 + k)))
        expected_genus = n * (base.genus - 1) + 1
        if cover.genus != expected_genus:
            bundle.violation(f"cover {k}: genus {cover.genus} != n(g-1)+1 = {expected_genus}")
        try:
            sys_k = systole(cover, search_len)
        except NoGeodesicInRange:
            sys_k = math.inf
        if sys_k < base_sys - 1e-6:
            bundle.violation(f"cover {k}: systole {sys_k:.9f} below the base systole {base_sys:.9f}")
        rows.append({"index": k, "degree": n, "genus": cover.genus, "systole": sys_k, "surface_id": cover.surface_id})
    bundle.add_table("covers", pd.DataFrame(rows, columns=["index", "degree", "genus", "systole", "surface_id"]))
    bundle.note(f"{count} covers of genus {base.genus}, base systole {base_sys:.6f}")
    return bundle


# ── bm ──────────────────────────────────────────────────────────


def run_bm(config: RunConfig) -> ReportBundle:
    bundle = ReportBundle("bm", config)
    n_values = [int(n) for n in config.get("bm", "n_values")]
    samples = int(config.get("bm", "samples"))
    seed = derived_seed(config, 4)
    records = ribbon_samples(n_values, samples, seed)
    df = records_frame(records, RibbonSample)
    bundle.add_table("ribbon", df)
    hist = df.groupby(["n", "genus"]).size().reset_index(name="count")
    bundle.add_table("genus_histogram", hist)

    exact, _ = exhaustive_genus_distribution(1)
    total = sum(exact.values())
    bundle.add_table(
        "genus_exact_n1",
        pd.DataFrame(
            [{"genus": g, "count": c, "fraction": c / total} for g, c in sorted(exact.items())]
        ),
    )
    if 1 in n_values:
        seen = set(df.loc[df["n"] == 1, "genus"])
        if not seen <= set(exact):
            bundle.violation(f"n=1 samples reach genera {sorted(seen)} outside {sorted(exact)}")

    graph = random_ribbon_graph(int(config.get("bm", "census_n")), derived_seed(config, 5))
    geodesics = bm_geodesics(graph, float(config.get("bm", "L")))
    bundle.add_table("geodesics", records_frame(geodesics, BMGeodesic))
    bundle.note(
        f"{len(records)} ribbon graphs; {len(geodesics)} L/R geodesics on one graph with {graph.n_vertices} vertices"
    )
    return bundle


# ── mc ──────────────────────────────────────────────────────────


def _non_decreasing_steps(rows: list[BirthdayRow]) -> list[tuple[float, float]]:
    """Adjacent (c, c') in increasing ell where p_hat fails to drop; a run of zeros is exempt."""
    ordered = sorted(rows, key=lambda r: r.ell)
    return [
        (a.c, b.c)
        for a, b in zip(ordered, ordered[1:])
        if b.ell > a.ell and a.p_hat > 0.0 and b.p_hat >= a.p_hat
    ]


def _coupon_off(row: CouponRow, trials: int) -> bool:
    """Mean more than COUPON_REL_TOL off n H_n and beyond STAT_SIGMAS exact standard errors."""
    sigma = math.sqrt(cover_time_variance(row.n) / trials)
    gap = abs(row.mean - row.expected)
    return gap > COUPON_REL_TOL * row.expected and gap > STAT_SIGMAS * sigma


def run_mc(config: RunConfig) -> ReportBundle:
    bundle = ReportBundle("mc", config)
    kind = config.get("mc", "kind")
    if kind not in MC_KINDS:
        raise ConfigError(f"[mc] kind must be one of {MC_KINDS}, got {kind!r}")
    trials = int(config.get("mc", "trials"))
    if kind in ("birthday", "both"):
        n = int(config.get("mc", "n"))
        cfg = BirthdayConfig(
            n=n,
            ell=int(config.get("mc", "ell")),
            alpha=float(config.get("mc", "alpha")),
            transverse=config.get("mc", "transverse"),
            trials=trials,
            seed=derived_seed(config, 6),
        )
        p, se = birthday_mc(cfg, threads=config.threads)
        bundle.add_table(
            "birthday",
            pd.DataFrame([{"n": n, "ell": cfg.ell, "p_hat": p, "stderr": se, "poisson": cfg.poisson_estimate()}]),
        )
        sweep = birthday_sweep(
            n,
            [float(c) for c in config.get("mc", "c_values")],
            trials,
            derived_seed(config, 7),
            alpha=cfg.alpha,
            transverse=cfg.transverse,
            threads=config.threads,
        )
        bundle.add_table("birthday_sweep", records_frame(sweep, BirthdayRow))
        for c0, c1 in _non_decreasing_steps(sweep):
            bundle.violation(f"birthday p_hat does not drop from c={c0:g} to c={c1:g}")
        bundle.note(f"birthday n={n} ell={cfg.ell}: p_hat={p:.4f} +- {se:.1e} (Poisson {cfg.poisson_estimate():.4f})")
    if kind in ("coupon", "both"):
        coupon_n = [int(n) for n in config.get("mc", "coupon_n")]
        rows = coupon_sweep(coupon_n, trials, derived_seed(config, 8), threads=config.threads)
        bundle.add_table("coupon", records_frame(rows, CouponRow))
        for row in rows:
            if _coupon_off(row, trials):
                bundle.violation(f"coupon n={row.n}: mean {row.mean:.3f} is off n H_n = {row.expected:.3f}")
            bundle.note(f"coupon n={row.n}: mean {row.mean:.3f} +- {row.stderr:.3f}, n H_n = {row.expected:.3f}")
    return bundle
