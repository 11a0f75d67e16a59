"""Command-line front end.

Every subcommand reads a scene JSON, prints a JSON report on stdout and exits
with 0 (all checked properties hold), 1 (a violation was found; the report
carries a witness) or 2 (bad input; message on stderr, nothing on stdout).
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time

import numpy as np
from scipy.stats import qmc

from . import kernels
from .geom import GeometryError, min_enclosing_ball
from .multiplank import MultiPlank, plank_union_multiplank
from .scene import Scene, SceneError

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2
ESCAPE_SHIFTS = 10


class InputError(Exception):
    pass


def _clean(obj):
    """JSON-safe copy with plain floats; non-finite values become strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialise {type(obj).__name__}")


class Context:
    def __init__(self, args, scene: Scene):
        self.args = args
        self.scene = scene
        self.seed = args.seed if args.seed is not None else scene.seed
        self.budget = args.budget
        self.tol = scene.tol(args.eps_geom, args.eps_opt)
        self.rng = np.random.default_rng(self.seed)

    def flags(self) -> dict:
        a = self.args
        return {"budget": a.budget, "seed": self.seed, "k": a.k, "closed": a.closed,
                "eps_geom": self.tol.eps_geom, "eps_opt": self.tol.eps_opt,
                "resolution": a.resolution}

    def report(self, metrics=None, verdicts=None, witnesses=None, info=None) -> dict:
        return {
            "command": self.args.command,
            "inputs_digest": self.scene.digest(self.flags()),
            "seed": self.seed,
            "budget": self.budget,
            "metrics": metrics or {},
            "verdicts": verdicts or {},
            "witnesses": witnesses or {},
            "info": info or {},
        }

    def planks(self, centered_only: bool = False) -> list[MultiPlank]:
        s = self.scene
        out = []
        for i, V in enumerate(s.generating_sets):
            t = None if centered_only else s.translation(i)
            out.append(MultiPlank.from_points(V, t, self.args.closed, self.tol))
        return out

    def halton(self, lo, hi, count: int) -> np.ndarray:
        U = qmc.Halton(d=len(lo), scramble=True, seed=self.seed).random(count)
        return qmc.scale(U, lo, hi)


def _need(cond, msg):
    if not cond:
        raise InputError(msg)


# ---------------------------------------------------------------------------
# subcommands


def cmd_meb(ctx: Context) -> dict:
    s = ctx.scene
    _need(s.generating_sets, "scene has no generating_sets")
    metrics, verdicts, wit = {}, {}, {}
    for i, V in enumerate(s.generating_sets):
        P = np.asarray(V)
        ball = min_enclosing_ball(P, ctx.tol)
        gap = float((np.linalg.norm(P - ball.center, axis=1) - ball.radius).max())
        metrics[f"radius_{i}"] = ball.radius
        wit[f"center_{i}"] = ball.center
        verdicts[f"encloses_{i}"] = gap <= ctx.tol.eps_geom * max(1.0, ball.radius)
    return ctx.report(metrics, verdicts, wit)


def _body_K(ctx: Context):
    s = ctx.scene
    _need(s.bodies, "scene has no bodies")
    name = "K" if "K" in s.bodies else sorted(s.bodies)[0]
    return name, s.body(name)


def cmd_inradii(ctx: Context) -> dict:
    from .inradii import intrinsic_radii

    _, K = _body_K(ctx)
    ks = [ctx.args.k] if ctx.args.k else list(range(1, K.dim + 1))
    metrics, verdicts, wit = {}, {}, {}
    for k in ks:
        _need(1 <= k <= K.dim, f"k must lie in 1..{K.dim}")
        R = intrinsic_radii(K, k, ctx.tol)
        metrics[f"upper_k{k}"] = R.upper
        metrics[f"lower_k{k}"] = R.lower
        wit[f"upper_basis_k{k}"] = R.upper_basis
        wit[f"lower_basis_k{k}"] = R.lower_basis
        verdicts[f"upper_ge_lower_k{k}"] = R.upper >= R.lower - ctx.tol.eps_opt
    return ctx.report(metrics, verdicts, wit)


def cmd_plank_check(ctx: Context) -> dict:
    from .stratify import classify_via_strata

    s = ctx.scene
    _need(s.generating_sets or s.planks, "scene has no generating_sets or planks")
    metrics, verdicts, wit = {}, {}, {}
    for i, P in enumerate(ctx.planks()):
        r = P.inradius
        lo = P.translation - 3 * r - 1
        hi = P.translation + 3 * r + 1
        X = ctx.halton(lo, hi, ctx.budget)
        a, b = P.classify(X), P.classify(X, via="cells")
        bad = np.flatnonzero(a * b < 0)
        metrics[f"inradius_{i}"] = r
        metrics[f"def_disagreements_{i}"] = len(bad)
        verdicts[f"def_equivalence_{i}"] = len(bad) == 0
        if len(bad):
            wit[f"def_disagreement_{i}"] = X[bad[0]]
        # the open ball of radius r about the translation lies inside
        t = 2 * np.pi * (np.arange(ctx.budget) + 0.5) / ctx.budget
        if P.dim == 2:
            S = np.column_stack([np.cos(t), np.sin(t)])
        else:
            S = np.random.default_rng(ctx.seed).normal(size=(ctx.budget, P.dim))
            S /= np.linalg.norm(S, axis=1, keepdims=True)
        ring = P.translation + (r - 1e-6) * S
        verdicts[f"inner_ball_{i}"] = bool(np.all(P.margin(ring) > 0))
        if P.dim == 2:
            c = classify_via_strata(None, P, X)
            badc = np.flatnonzero(a * c < 0)
            metrics[f"strata_disagreements_{i}"] = len(badc)
            verdicts[f"strata_equivalence_{i}"] = len(badc) == 0
            if len(badc):
                wit[f"strata_disagreement_{i}"] = X[badc[0]]
    if s.planks:
        U = np.asarray(s.planks)
        P = plank_union_multiplank(U, ctx.tol)
        L = 3 * float(np.linalg.norm(U, axis=1).max()) + 1
        X = ctx.halton(-L * np.ones(s.dim), L * np.ones(s.dim), ctx.budget)
        half = np.einsum("ij,ij->i", U, U)
        in_union = (np.abs(X @ U.T) < half).any(axis=1)
        miss = np.flatnonzero(in_union & (P.classify(X) <= 0))
        metrics["union_inradius"] = P.inradius
        metrics["union_samples"] = int(in_union.sum())
        metrics["half_width_sum"] = float(np.linalg.norm(U, axis=1).sum())
        verdicts["union_covered"] = len(miss) == 0
        if len(miss):
            wit["union_uncovered"] = X[miss[0]]
    return ctx.report(metrics, verdicts, wit)


def cmd_stratify(ctx: Context) -> dict:
    from .stratify import classify_via_strata, full_sphere_violation, stratify, stratum_margins

    s = ctx.scene
    _need(s.dim == 2, "stratification needs a 2D scene")
    _need(s.generating_sets, "scene has no generating_sets")
    metrics, verdicts, wit, info = {}, {}, {}, {}
    eps = ctx.tol.eps_geom
    for i, P in enumerate(ctx.planks(centered_only=True)):
        if P.rank < 2:
            info[f"skipped_{i}"] = "rank below 2"
            continue
        st = stratify(P.gen, ctx.tol)
        viol = full_sphere_violation(st.fd)
        r = P.inradius
        X = ctx.halton(-(3 * r + 1) * np.ones(2), (3 * r + 1) * np.ones(2), ctx.budget)
        M = np.vstack(list(stratum_margins(st, X).values()))
        overlap = np.flatnonzero((M > eps).sum(axis=0) > 1)
        uncovered = np.flatnonzero(M.max(axis=0) < -eps)
        a, c = P.classify(X), classify_via_strata(st, P, X)
        bad = np.flatnonzero(a * c < 0)
        metrics[f"cells_{i}"] = len(st.cells)
        metrics[f"strata_{i}"] = len(st.strata())
        metrics[f"full_sphere_violation_{i}"] = viol
        info[f"cells_{i}"] = [list(c_) for c_ in st.cells]
        verdicts[f"full_sphere_{i}"] = viol <= eps * max(1.0, r)
        verdicts[f"strata_partition_{i}"] = len(overlap) == 0 and len(uncovered) == 0
        verdicts[f"strata_equivalence_{i}"] = len(bad) == 0
        for key, idx in (("overlap", overlap), ("uncovered", uncovered), ("disagreement", bad)):
            if len(idx):
                wit[f"{key}_{i}"] = X[idx[0]]
    return ctx.report(metrics, verdicts, wit, info)


def _escape_shifts(ctx: Context, dim: int, scale: float) -> np.ndarray:
    return np.random.default_rng(ctx.seed).normal(scale=scale, size=(ESCAPE_SHIFTS, dim))


def cmd_verify(ctx: Context) -> dict:
    from .experiments import CoveringInstance, farthest_escape_check, verify_covering, verify_pants_inequality

    s = ctx.scene
    _need("K" in s.bodies, "verify needs a body named K")
    K = s.body("K")
    k = ctx.args.k or int(s.options.get("k", 1))
    covers = ctx.planks() + [s.body(n) for n in sorted(s.bodies) if n != "K"]
    _need(covers, "verify needs covers: generating_sets or further bodies")
    metrics, verdicts, wit, info = {}, {}, {}, {}
    inst = CoveringInstance(K, covers, k, ctx.budget, ctx.seed, ctx.tol)
    cov = verify_covering(inst)
    metrics["coverage_fraction"] = cov.coverage_fraction
    info["covering_certified"] = cov.coverage_fraction == 1.0
    if cov.uncovered_witness is not None:
        wit["uncovered"] = cov.uncovered_witness
    else:
        pants = verify_pants_inequality(inst, cov)
        metrics["lhs"], metrics["rhs"] = pants.lhs, pants.rhs
        metrics["terms"] = pants.terms
        verdicts["pants_inequality"] = pants.holds
    planks = ctx.planks(centered_only=True)
    if planks:
        scale = sum(P.inradius for P in planks)
        worst = -math.inf
        ok = True
        for sh in _escape_shifts(ctx, s.dim, scale):
            rep = farthest_escape_check(planks, sh, ctx.tol)
            worst = max(worst, rep.worst_margin)
            if not rep.ok and ok:
                wit["escape_violation"] = rep.witness
                ok = False
        metrics["escape_worst_margin"] = worst
        verdicts["farthest_escape"] = ok
    return ctx.report(metrics, verdicts, wit, info)


def cmd_pizza(ctx: Context) -> dict:
    from .experiments import pizza_best_piece, pizza_bound

    s = ctx.scene
    fans = s.fan_objects()
    metrics, verdicts, wit = {}, {}, {}
    res = pizza_best_piece(fans, max(ctx.budget, 10**5))
    metrics["best_piece"] = res.radius
    metrics["gap"] = res.gap
    metrics["evaluations"] = res.evaluations
    wit["center"] = res.center
    if fans:
        ms = {f.m for f in fans}
        _need(len(ms) == 1, "all fans must have the same number of rays")
        bound = pizza_bound(ms.pop(), len(fans))
        metrics["bound"] = bound
        verdicts["bound_holds"] = res.radius + res.gap >= bound - ctx.tol.eps_opt
    return ctx.report(metrics, verdicts, wit)


def cmd_sharpness(ctx: Context) -> dict:
    from .experiments import covers_unit_disk, min_covering_radius

    opts = ctx.scene.options.get("sharpness", {})
    _need(isinstance(opts, dict), "options.sharpness must be an object")
    Ns = opts.get("N", [10, 20, 40])
    _need(isinstance(Ns, list) and all(isinstance(n, int) and n >= 3 for n in Ns), "N must be integers >= 3")
    metrics, verdicts, wit = {}, {}, {}
    rows = []
    for N in Ns:
        rmin = min_covering_radius(N, ctx.budget, ctx.seed, tol=ctx.tol)
        metrics[f"min_covering_r_N{N}"] = rmin
        metrics[f"limit_gap_N{N}"] = None if rmin is None else rmin - 0.5
        rows.append((N, rmin))
        if "r" in opts:
            ok, w = covers_unit_disk(N, float(opts["r"]), ctx.budget, ctx.seed, ctx.tol)
            metrics[f"covers_at_r_N{N}"] = ok
            if w is not None:
                wit[f"uncovered_at_r_N{N}"] = w
    vals = [r for _, r in sorted(rows)]
    verdicts["above_half"] = all(r is not None and r >= 0.5 for r in vals)
    verdicts["decreasing"] = all(a is not None and b is not None and a > b for a, b in zip(vals, vals[1:]))
    if ctx.args.csv:
        with open(ctx.args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["N", "min_covering_r"])
            for N, r in rows:
                w.writerow([N, "" if r is None else repr(r)])
    return ctx.report(metrics, verdicts, wit)


def cmd_normed(ctx: Context) -> dict:
    from .experiments import CoveringInstance, verify_covering
    from .geom import affine_rank
    from .normed import (
        Gauge,
        NormedMultiPlank,
        normed_farthest_escape_check,
        normed_lower_intrinsic,
        normed_upper_intrinsic,
    )

    s = ctx.scene
    _need(s.gauge is not None, "normed needs a gauge")
    B = Gauge(s.gauge["polygon"], ctx.tol)
    metrics, verdicts, wit = {}, {}, {}
    planks = []
    for i, V in enumerate(s.generating_sets):
        try:
            planks.append(NormedMultiPlank(V, B, ctx.tol))
        except GeometryError as exc:
            raise InputError(f"generating_sets[{i}]: {exc}") from exc
        metrics[f"r_B_{i}"] = planks[-1].r
    X = ctx.rng.normal(size=(ctx.budget, 2))
    Y = ctx.rng.normal(size=(ctx.budget, 2))
    tri = B.norms(X + Y) - B.norms(X) - B.norms(Y)
    verdicts["triangle_inequality"] = bool(np.all(tri <= ctx.tol.eps_geom * (1 + B.norms(X) + B.norms(Y))))
    if planks:
        scale = sum(P.r for P in planks)
        ok, worst = True, -math.inf
        for sh in _escape_shifts(ctx, 2, scale):
            rep = normed_farthest_escape_check(planks, sh, ctx.tol)
            worst = max(worst, rep.worst_margin)
            if not rep.ok and ok:
                ok = False
                wit["escape_violation"] = rep.witness
        metrics["escape_worst_margin"] = worst
        verdicts["farthest_escape"] = ok
    if "K" in s.bodies:
        K = s.body("K")
        for k in (1, 2):
            metrics[f"lower_k{k}"] = normed_lower_intrinsic(K, k, B)
            metrics[f"upper_k{k}"] = normed_upper_intrinsic(K, k, B)
        if planks:
            covers = [_NormedCover(P, s.translation(i)) for i, P in enumerate(planks)]
            inst = CoveringInstance(K, covers, 2, ctx.budget, ctx.seed, ctx.tol)
            cov = verify_covering(inst)
            metrics["coverage_fraction"] = cov.coverage_fraction
            if cov.uncovered_witness is None:
                k = max(affine_rank(P.V, ctx.tol) for P in planks)
                lhs = sum(P.r for P in planks)
                rhs = normed_lower_intrinsic(K, max(k, 1), B)
                metrics["lhs"], metrics["rhs"] = lhs, rhs
                verdicts["normed_inequality"] = lhs >= rhs - ctx.tol.eps_opt
    return ctx.report(metrics, verdicts, wit)


class _NormedCover:
    """Adapter so a translated normed multi-plank can be sampled like a convex cover."""

    def __init__(self, P, t):
        self.P, self.t, self.dim = P, np.asarray(t, dtype=np.float64), 2

    def contains(self, X, eps):
        return self.P.margin(X - self.t) >= -eps


def cmd_render(ctx: Context) -> dict:
    from .render import render_svg

    _need(ctx.args.out, "render needs --out")
    _need(ctx.scene.dim == 2, "render needs a 2D scene")
    svg = render_svg(ctx.scene, ctx.args.resolution, ctx.args.closed)
    try:
        with open(ctx.args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(svg)
    except OSError as exc:
        raise InputError(f"cannot write {ctx.args.out}: {exc}") from exc
    return ctx.report({"bytes": len(svg.encode())}, {}, {}, {"out": ctx.args.out})


COMMANDS = {
    "meb": cmd_meb,
    "inradii": cmd_inradii,
    "plank-check": cmd_plank_check,
    "stratify": cmd_stratify,
    "verify": cmd_verify,
    "pizza": cmd_pizza,
    "sharpness": cmd_sharpness,
    "normed": cmd_normed,
    "render": cmd_render,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scene", help="scene JSON file (default: empty scene)")
    common.add_argument("--out", help="output file (render)")
    common.add_argument("--budget", type=int, default=10**4, help="sample budget")
    common.add_argument("--seed", type=int, default=None, help="overrides the scene seed")
    common.add_argument("--resolution", type=int, default=512, help="render grid size")
    common.add_argument("--k", type=int, default=None, help="subspace dimension")
    common.add_argument("--eps-geom", type=float, default=None)
    common.add_argument("--eps-opt", type=float, default=None)
    common.add_argument("--closed", action="store_true", help="closed multi-planks")
    common.add_argument("--csv", help="also write sweep rows as CSV")
    common.add_argument("--timing", action="store_true", help="print wall time on stderr")
    p = argparse.ArgumentParser(prog="multiplank", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_INPUT
    t0 = time.perf_counter()
    try:
        if args.budget < 1000:
            raise InputError("--budget must be at least 1000")
        if args.resolution < 8:
            raise InputError("--resolution must be at least 8")
        scene = Scene.load(args.scene) if args.scene else Scene()
        ctx = Context(args, scene)
        report = COMMANDS[args.command](ctx)
    except (InputError, SceneError, GeometryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = json.dumps(_clean(report), sort_keys=True, indent=2)
    print(text)
    if args.timing:
        print(f"wall time {time.perf_counter() - t0:.3f} s ({kernels.BACKEND} kernels)", file=sys.stderr)
    return EXIT_OK if all(report["verdicts"].values()) else EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
