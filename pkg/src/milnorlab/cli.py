"""Command-line front end: ``milnorlab <command> GERM [options]``.

Exit codes: 2 for unreadable germs or bad arguments, 1 when an analyzer
could not produce what was asked (no fibre points found), 0 otherwise.
Verdicts such as NotTame are data and never change the exit code.
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .analyzers import (
    AnalysisConfig,
    NoSolutionsFound,
    composition_analysis,
    fiber_report,
    image_germ_stability,
    image_membership,
    isolated_singular_value_check,
    milnor_zero_fiber_check,
    product_structure_check,
    tameness_scan,
)
from .determinantal import milnor_ideal, singular_ideal, zero_fiber_ideal
from .numerics import Annulus, RngSpec, SolveConfig
from .parse import ParseError, format_germ, load_germ
from .poly import DimensionMismatch
from .report import build_report, dumps, emit_svg, loads, point_cloud

log = logging.getLogger("milnorlab")

CORPUS = ("sabbah", "xy", "act", "square", "composed")


class UsageError(ValueError):
    pass


def corpus_path(name: str) -> Path:
    return Path(str(resources.files("milnorlab") / "corpus" / f"{name}.germ"))


def resolve_germ(name: str):
    """A file path, or the bare name of a shipped corpus germ."""
    path = Path(name)
    if not path.exists() and name in CORPUS:
        path = corpus_path(name)
    if not path.exists():
        raise UsageError(f"no germ file {name!r} (corpus names: {', '.join(CORPUS)})")
    try:
        return load_germ(path)
    except ParseError as err:
        raise ParseError(f"{path}: {err.message}", err.pos, err.line) from None


def floats(text: str, what: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"{what}: expected comma-separated numbers, got {text!r}") from None


def make_config(args) -> AnalysisConfig:
    solve = SolveConfig() if args.tol is None else SolveConfig(tol_residual=args.tol)
    return AnalysisConfig(solve=solve, workers=args.workers)


def config_echo(cfg: AnalysisConfig, args, **extra) -> dict:
    """Everything needed to rerun; the worker count is left out because it
    does not change results."""
    d = cfg.to_dict()
    d.pop("workers")
    d["master_seed"] = args.seed
    d.update(extra)
    return d


def target_vector(args, p: int) -> np.ndarray:
    if args.target is None:
        v = np.zeros(p)
        v[0] = 1e-4
        return v
    v = np.asarray(floats(args.target, "--target"))
    if len(v) == 1 and p > 1:
        v = np.concatenate([v, np.zeros(p - 1)])
    if len(v) != p:
        raise UsageError(f"--target needs {p} coordinates, got {len(v)}")
    if not np.linalg.norm(v) > 0:
        raise UsageError("--target must be nonzero")
    return v


# ------------------------------------------------------------ commands


def run_ideal(G, args, cfg):
    kinds = ["singular", "milnor", "zero_fiber"] if args.which in (None, "all") else [args.which]
    builders = {"singular": singular_ideal, "milnor": milnor_ideal, "zero_fiber": zero_fiber_ideal}
    text = "".join(builders[k](G).to_text(G.names) for k in kinds)
    return None, text


def _isv(G, args, cfg, rng):
    r0 = getattr(args, "r0", None) or cfg.sample_radii[1]
    res = isolated_singular_value_check(G, Annulus(r0 / 2, r0, G.source_dim), cfg, rng)
    return res, {"region": [r0 / 2, r0]}


def run_isv(G, args, cfg):
    res, extra = _isv(G, args, cfg, RngSpec(args.seed))
    clouds = {"singular_samples": point_cloud(res.points.reshape(-1, G.source_dim))}
    return build_report(G, "isv", config_echo(cfg, args, **extra), {"isv": res.to_dict()}, clouds), None


def _witness_cloud(G, verdict):
    pts = [w.point for s in verdict.stages for w in s.witnesses]
    labels = [k for k, s in enumerate(verdict.stages) for _ in s.witnesses]
    return point_cloud(np.array(pts).reshape(-1, G.source_dim), labels)


def run_tame(G, args, cfg):
    r0 = args.r0 if args.r0 is not None else 0.1
    stages = args.stages if args.stages is not None else 7
    v = tameness_scan(G, r0, stages, cfg, RngSpec(args.seed))
    echo = config_echo(cfg, args, r0=r0, stages=stages)
    return build_report(G, "tame", echo, {"tameness": v.to_dict()}, {"witnesses": _witness_cloud(G, v)}), None


def _fiber(G, args, cfg, rng):
    v = target_vector(args, G.target_dim)
    eps = floats(args.eps, "--eps")[0] if args.eps else 0.5
    n = args.seeds if args.seeds is not None else cfg.fiber_seeds
    return fiber_report(G, v, eps, n, cfg, rng), {"target": v, "eps": eps, "n_seeds": n}


def run_fiber(G, args, cfg):
    rep, extra = _fiber(G, args, cfg, RngSpec(args.seed))
    clouds = {"fiber": point_cloud(rep.points, rep.labels)}
    return build_report(G, "fiber", config_echo(cfg, args, **extra), {"fiber": rep.to_dict()}, clouds), None


def _image(G, args, cfg, rng):
    radii = floats(args.eps, "--eps") if args.eps else [0.1, 0.05]
    n = args.seeds if args.seeds is not None else cfg.image_seeds
    extra = {"radii": radii, "n_seeds": n}
    if args.target is not None:
        v = target_vector(args, G.target_dim)
        member = {str(e): image_membership(G, v, e, n, cfg, rng.stream(i)) for i, e in enumerate(radii)}
        return {"target": v, "member": member}, dict(extra, target=v)
    if len(radii) < 2:
        raise UsageError("--eps needs two radii for the stability grid")
    return image_germ_stability(G, radii=radii, n_seeds=n, cfg=cfg, rng=rng).to_dict(), extra


def run_image(G, args, cfg):
    payload, extra = _image(G, args, cfg, RngSpec(args.seed))
    return build_report(G, "image", config_echo(cfg, args, **extra), {"image": payload}), None


def run_compose(G, args, cfg):
    F = resolve_germ(args.inner)
    r0 = args.r0 if args.r0 is not None else 0.1
    stages = args.stages if args.stages is not None else 7
    rep = composition_analysis(G, F, cfg, RngSpec(args.seed), r0=r0, stages=stages)
    H = rep.composed
    if args.germ_out:
        out = Path(args.germ_out)
        named = replace(H, name=out.stem)
        out.write_text(format_germ(named, [f"generated by: milnorlab compose {args.germ} {args.inner}", f"H = {H.name or 'G o F'}"]))
    echo = config_echo(cfg, args, r0=r0, stages=stages, inner_germ=format_germ(F))
    return build_report(G, "compose", echo, {"composition": rep.to_dict()}), None


def _product(G, args, cfg, rng):
    if G.target_dim < 2:
        raise UsageError("product needs a germ with at least two components")
    delta = floats(args.target, "--target")[0] if args.target else 1e-4
    eps = floats(args.eps, "--eps")[0] if args.eps else 0.5
    n = args.seeds if args.seeds is not None else cfg.fiber_seeds
    rep = product_structure_check(G, delta, eps, n, cfg=cfg, rng=rng)
    return rep, {"delta": delta, "eps": eps, "n_seeds": n}


def run_product(G, args, cfg):
    rep, extra = _product(G, args, cfg, RngSpec(args.seed))
    clouds = {
        "fiber": point_cloud(rep.full.points, rep.full.labels),
        "truncated_fiber": point_cloud(rep.truncated.points, rep.truncated.labels),
    }
    return build_report(G, "product", config_echo(cfg, args, **extra), {"product": rep.to_dict()}, clouds), None


def run_analyze(G, args, cfg):
    """Every single-germ analysis with default parameters."""
    rng = RngSpec(args.seed)
    verdicts, clouds, failures = {}, {}, []
    verdicts["ideals"] = {
        k: [g.to_str(G.names) for g in I.generators] + (["<whole space>"] if I.whole_space else [])
        for k, I in (("singular", singular_ideal(G)), ("milnor", milnor_ideal(G)), ("zero_fiber", zero_fiber_ideal(G)))
    }
    isv, _ = _isv(G, args, cfg, rng.stream(0))
    verdicts["isv"] = isv.to_dict()
    clouds["singular_samples"] = point_cloud(isv.points.reshape(-1, G.source_dim))
    verdicts["milnor_zero_fiber"] = milnor_zero_fiber_check(G, cfg=cfg, rng=rng.stream(1)).to_dict()
    tame = tameness_scan(G, 0.1, 7, cfg, rng.stream(2))
    verdicts["tameness"] = tame.to_dict()
    clouds["witnesses"] = _witness_cloud(G, tame)
    try:
        fib, extra = _fiber(G, args, cfg, rng.stream(3))
        verdicts["fiber"] = fib.to_dict()
        clouds["fiber"] = point_cloud(fib.points, fib.labels)
    except NoSolutionsFound as err:
        verdicts["fiber"] = {"error": str(err)}
        failures.append(str(err))
    # --seeds sizes the fibre runs here; the image grid keeps its own default
    image_args = argparse.Namespace(**{**vars(args), "target": None, "eps": None, "seeds": None})
    verdicts["image"], _ = _image(G, image_args, cfg, rng.stream(4))
    if G.target_dim >= 2:
        try:
            prod, _ = _product(G, argparse.Namespace(**{**vars(args), "target": None}), cfg, rng.stream(5))
            verdicts["product"] = prod.to_dict()
            clouds["truncated_fiber"] = point_cloud(prod.truncated.points, prod.truncated.labels)
        except NoSolutionsFound as err:
            verdicts["product"] = {"error": str(err)}
            failures.append(str(err))
    echo = config_echo(cfg, args, r0=0.1, stages=7)
    report = build_report(G, "analyze", echo, verdicts, clouds)
    return report, None, failures


def run_plot(args):
    report = loads(Path(args.report).read_text())
    proj = tuple(int(i) for i in floats(args.projection, "--projection")) if args.projection else None
    if proj is None:
        dim = next((c["shape"][1] for c in report["point_clouds"].values()), 2)
        proj = (0, 1, 2) if dim >= 3 else (0, 1)
    return emit_svg(report, proj, args.which)


# ------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="milnorlab", description="Experiments with real polynomial map germs.")
    parser.add_argument("--version", action="version", version=f"milnorlab {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42, help="master seed (default 42)")
    common.add_argument("--workers", type=int, default=1, help="threads for sampling; results do not depend on it")
    common.add_argument("--tol", type=float, default=None, help="solver tolerance on squared residuals (default 1e-12)")
    common.add_argument("--seeds", type=int, default=None, help="number of solver seeds")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--projection", default=None, help="coordinate indices for SVG output, e.g. 0,1 or 0,1,2")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, **kw):
        p = sub.add_parser(name, parents=[common], help=help_text, **kw)
        p.add_argument("germ", help="germ file or corpus name")
        return p

    p = add("ideal", "print singular, Milnor and zero-fibre ideals")
    p.add_argument("--which", choices=["singular", "milnor", "zero_fiber", "all"], default="all")
    p = add("isv", "isolated singular value check")
    p.add_argument("--r0", type=float, default=None, help="outer radius of the sampled annulus [r0/2, r0]")
    p = add("tame", "tameness witness scan")
    p.add_argument("--r0", type=float, default=None)
    p.add_argument("--stages", type=int, default=None)
    p = add("fiber", "sample and cluster a fibre")
    p.add_argument("--target", default=None, help="target value, e.g. 1e-4,0")
    p.add_argument("--eps", default=None, help="ball radius (default 0.5)")
    p = add("image", "image membership grid and stability")
    p.add_argument("--target", default=None, help="test a single value instead of the grid")
    p.add_argument("--eps", default=None, help="radii, largest first (default 0.1,0.05)")
    p = add("compose", "composition analysis of GERM o INNER")
    p.add_argument("inner", help="inner germ F (applied first)")
    p.add_argument("--r0", type=float, default=None)
    p.add_argument("--stages", type=int, default=None)
    p.add_argument("--germ-out", default=None, help="write the composed germ file here")
    p = add("product", "compare the fibre with that of the germ minus its last component")
    p.add_argument("--target", default=None, help="delta on the first axis (default 1e-4)")
    p.add_argument("--eps", default=None)
    p = add("analyze", "run every single-germ analysis with defaults")
    p.add_argument("--target", default=None, help="fibre target")
    p.add_argument("--eps", default=None, help="fibre ball radius")
    p = sub.add_parser("plot", help="SVG scatter from a saved report")
    p.add_argument("report")
    p.add_argument("--which", default=None, help="point cloud name (default: first)")
    p.add_argument("--projection", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("-v", "--verbose", action="store_true")
    return parser


RUNNERS = {
    "ideal": run_ideal,
    "isv": run_isv,
    "tame": run_tame,
    "fiber": run_fiber,
    "image": run_image,
    "compose": run_compose,
    "product": run_product,
}


def _write(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    start = time.perf_counter()
    try:
        if args.command == "plot":
            _write(run_plot(args), args.out)
            return 0
        G = resolve_germ(args.germ)
        if args.workers < 1:
            raise UsageError("--workers must be at least 1")
        cfg = make_config(args)
        failures = []
        if args.command == "analyze":
            report, text, failures = run_analyze(G, args, cfg)
        else:
            report, text = RUNNERS[args.command](G, args, cfg)
    except (ParseError, UsageError, DimensionMismatch, IndexError, KeyError, FileNotFoundError) as err:
        print(f"milnorlab: error: {err}", file=sys.stderr)
        return 2
    except NoSolutionsFound as err:
        print(f"milnorlab: {err}", file=sys.stderr)
        return 1
    if report is not None:
        text = dumps(report)
    _write(text, args.out)
    if report is not None and args.out and (report["point_clouds"] or args.command == "analyze"):
        dim = G.source_dim
        proj = floats(args.projection, "--projection") if args.projection else ((0, 1, 2) if dim >= 3 else (0, 1))
        which = "fiber" if "fiber" in report["point_clouds"] else None
        Path(args.out).with_suffix(".svg").write_text(emit_svg(report, proj, which))
    # wall-clock time is reported here, not in the report, so reports stay byte-identical
    print(f"milnorlab {args.command}: done in {time.perf_counter() - start:.2f} s", file=sys.stderr)
    if failures:
        for f in failures:
            print(f"milnorlab: {f}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
