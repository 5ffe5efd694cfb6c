"""Command-line front end: derivation pipeline, queries, sweeps, scenarios.

Every command reads a flat ``key = value`` config, writes deterministic
text artifacts (comma-separated tables or flat model files) with a
provenance header, and exits 0 on success or nonzero with a one-line
diagnostic.  Re-running a command with the same config and seed
reproduces its output byte for byte.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .allocate import (
    EfopaModel,
    MuMode,
    build_efopa_dataset,
    efopa_allocate,
    grpa_allocate,
    ngdpa_allocate,
    oma_allocate,
)
from .channel import enumerate_channels
from .config import ConfigError, RunConfig, load_config
from .expfit import fit_two_term_exp
from .modelio import (
    atomic_write_text,
    format_float,
    load_model,
    provenance_lines,
    save_model,
)
from .optimize import AbcConfig
from .rates import (
    NoiseModel,
    RateModel,
    UserLink,
    evaluate,
    paper_repro_models,
    rate_oma,
)
from .reference import reference_model
from .stats import METHODS, RATE_MODELS, SweepSpec, pair_statistics, sweep_rows, walk_rows


def _resolve_h1(spec: str, h0: float) -> float:
    """Accept an absolute gain or a multiple of the mean gain like '2h0'."""
    text = spec.strip().lower().replace(" ", "")
    if text.endswith("h0"):
        prefix = text[:-2].rstrip("*x")
        factor = float(prefix) if prefix else 1.0
        return factor * h0
    return float(text)


def _grid_description(cfg: RunConfig) -> str:
    d = cfg.distances
    a = cfg.angles_deg
    return (
        f"d[{format_float(d[0])}..{format_float(d[-1])};n={len(d)}]"
        f";angles_deg[{a[0]:g}..{a[-1]:g};n={len(a)}]"
        f";dedup={format_float(cfg.dedup_resolution)}"
    )


def _abc_config(cfg: RunConfig, seed: int) -> AbcConfig:
    return AbcConfig(
        food_count=cfg.abc_food_count,
        max_evaluations=cfg.abc_max_evaluations,
        limit=cfg.abc_limit,
        seed=seed,
    )


def _load_channels_file(path) -> list:
    gains = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        s = line.strip()
        if not s or s.startswith("#") or s == "gain":
            continue
        gains.append(float(s))
    if not gains:
        raise ValueError(f"{path}: no gains found")
    return gains


def _rate_models_for(name: str, user_count: int = 2):
    if name == "paper-repro":
        return paper_repro_models(user_count)
    if name == "shannon":
        return (RateModel.SHANNON,) * user_count
    if name == "lower-bound":
        return (RateModel.LOWER_BOUND,) * user_count
    raise ValueError(f"unknown rate model {name!r}")


def cmd_channels(args) -> int:
    cfg = load_config(args.config)
    channels = enumerate_channels(cfg.channel_grid(), cfg.params)
    lines = provenance_lines(
        __version__,
        cfg.digest,
        cfg.seed,
        extra={
            "combo_count": channels.combo_count,
            "unique_count": len(channels),
            "mean_gain": format_float(channels.mean_gain),
            "dedup_resolution": format_float(channels.dedup_resolution),
            "grid": _grid_description(cfg),
        },
    )
    lines.append("gain")
    lines.extend(format_float(g) for g in channels.gains)
    atomic_write_text(args.out, "\n".join(lines) + "\n")
    print(
        f"channels: {channels.combo_count} combos -> {len(channels)} unique, "
        f"mean {format_float(channels.mean_gain)} -> {args.out}"
    )
    return 0


def cmd_derive(args) -> int:
    cfg = load_config(args.config)
    seed = cfg.seed if args.seed is None else args.seed
    channels = enumerate_channels(cfg.channel_grid(), cfg.params)
    h1 = _resolve_h1(args.h1, channels.mean_gain)
    above_ref = args.above_ref or cfg.derive_above_ref
    dataset = build_efopa_dataset(
        h1=h1,
        channels=channels,
        p_max=cfg.p_max,
        abc=_abc_config(cfg, seed),
        noise_variance=cfg.derive_noise_variance,
        bandwidth=cfg.bandwidth,
        above_ref=above_ref,
        subsample=args.subsample,
    )
    coeffs, report = fit_two_term_exp(dataset)
    model = EfopaModel(
        coefficients=coeffs,
        h_ref=h1,
        p_ref=cfg.p_max,
        h0=channels.mean_gain,
        mu_mode=MuMode(args.mu_mode),
        clamp_floor=args.clamp_floor,
    )
    provenance = {
        "tool_version": __version__,
        "config_digest": cfg.digest,
        "seed": seed,
        "grid": _grid_description(cfg),
        "combo_count": channels.combo_count,
        "unique_count": len(channels),
        "h1_spec": args.h1,
        "above_ref": above_ref,
        "subsample": args.subsample,
        "derive_noise_variance_w": format_float(cfg.derive_noise_variance),
        "bandwidth_hz": format_float(cfg.bandwidth),
        "dataset_points": len(dataset),
        "fit_rmse_w": format_float(report.rmse),
        "fit_iterations": report.iterations,
        "fit_converged": str(report.converged).lower(),
    }
    save_model(args.out_model, model, provenance)
    lines = provenance_lines(
        __version__,
        cfg.digest,
        seed,
        extra={
            "h1": format_float(h1),
            "p_max_w": format_float(cfg.p_max),
            "above_ref": above_ref,
            "subsample": args.subsample,
        },
    )
    lines.append("r,p1_w")
    lines.extend(f"{format_float(r)},{format_float(p1)}" for r, p1 in dataset)
    atomic_write_text(args.out_dataset, "\n".join(lines) + "\n")
    print(
        f"derive: {len(dataset)} points, fit rmse {format_float(report.rmse)} W, "
        f"converged={report.converged} -> {args.out_model}"
    )
    return 0


def cmd_allocate(args) -> int:
    cfg = load_config(args.config)
    h1, h2 = args.h1, args.h2
    p_max = cfg.p_max if args.p_max is None else args.p_max
    method = args.method
    if method == "efopa":
        if not args.model:
            raise ValueError("--model is required for method=efopa")
        model = load_model(args.model)
        if args.mu_mode:
            model = EfopaModel(
                coefficients=model.coefficients,
                h_ref=model.h_ref,
                p_ref=model.p_ref,
                h0=model.h0,
                mu_mode=MuMode(args.mu_mode),
                clamp_floor=model.clamp_floor,
            )
        alloc = efopa_allocate(model, h1, h2, p_max)
    elif method == "grpa":
        alloc = grpa_allocate(h1, h2, p_max)
    elif method == "ngdpa":
        alloc = ngdpa_allocate(h1, h2, p_max)
    elif method == "oma":
        alloc = None
    else:
        raise ValueError(f"unknown method {method!r}(choose from {METHODS})")

    noise = NoiseModel(cfg.noise_variance)
    links = (
        UserLink(gain=h1, bandwidth=cfg.bandwidth),
        UserLink(gain=h2, bandwidth=cfg.bandwidth),
    )
    rate_model = args.rate_model or cfg.rate_model
    if method == "oma":
        powers = oma_allocate(p_max, 2)
        rates = tuple(
            rate_oma(link, p, 2, noise) for link, p in zip(links, powers)
        )
        from .rates import jain_index

        fairness = jain_index(rates)
        p1, p2 = powers
        total = sum(rates)
    else:
        report = evaluate(links, alloc, noise, _rate_models_for(rate_model))
        rates = report.per_user_rates
        fairness = report.fairness
        p1, p2 = alloc.powers
        total = report.sum_rate
    print("method,h1,h2,p_max_w,p1_w,p2_w,rate1_bps,rate2_bps,sum_rate_bps,fairness")
    print(
        ",".join(
            [method]
            + [
                format_float(v)
                for v in (h1, h2, p_max, p1, p2, rates[0], rates[1], total, fairness)
            ]
        )
    )
    return 0


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    model = load_model(args.model)
    h1 = _resolve_h1(args.h1, model.h0)
    spec = SweepSpec(
        r_min=args.r_min,
        r_max=args.r_max,
        r_step=args.r_step,
        h1=h1,
        methods=tuple(sorted(set(args.methods.split(",")))),
    )
    rate_model = args.rate_model or "shannon"
    rows = sweep_rows(spec, model, cfg.p_max, cfg.bandwidth, cfg.noise_variance, rate_model)
    lines = provenance_lines(
        __version__,
        cfg.digest,
        cfg.seed,
        extra={
            "h1": format_float(h1),
            "rate_model": rate_model,
            "r_axis": f"{args.r_min:g}..{args.r_max:g}:{args.r_step:g}",
        },
    )
    lines.append("r,method,p1_w,p2_w,rate1_bps,rate2_bps,sum_rate_bps,fairness")
    for r, method, p1, p2, r1, r2, s, f in rows:
        lines.append(
            ",".join(
                [format_float(r), method]
                + [format_float(v) for v in (p1, p2, r1, r2, s, f)]
            )
        )
    atomic_write_text(args.out, "\n".join(lines) + "\n")
    print(f"sweep: {len(rows)} rows -> {args.out}")
    return 0


def cmd_pairs_stats(args) -> int:
    cfg = load_config(args.config)
    model = load_model(args.model)
    gains = _load_channels_file(args.channels)
    seed = cfg.seed if args.seed is None else args.seed
    rate_model = args.rate_model or "paper-repro"
    report = pair_statistics(
        gains,
        model,
        cfg.p_max,
        cfg.bandwidth,
        cfg.noise_variance,
        rate_model=rate_model,
        subsample=args.subsample,
        seed=seed,
    )
    lines = provenance_lines(__version__, cfg.digest, seed)
    for key, value in report.items():
        if isinstance(value, float):
            lines.append(f"{key} = {format_float(value)}")
        else:
            lines.append(f"{key} = {value}")
    text = "\n".join(lines) + "\n"
    if args.out:
        atomic_write_text(args.out, text)
        print(f"pairs-stats: {report['pairs_total']} pairs -> {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_walk(args) -> int:
    cfg = load_config(args.config)
    model = load_model(args.model)
    if args.mu_mode:
        model = EfopaModel(
            coefficients=model.coefficients,
            h_ref=model.h_ref,
            p_ref=model.p_ref,
            h0=model.h0,
            mu_mode=MuMode(args.mu_mode),
            clamp_floor=model.clamp_floor,
        )
    if not cfg.walk_h1:
        raise ConfigError(f"{args.config}: walk.h1 is required for the walk command")
    if not cfg.walk_points:
        raise ConfigError(f"{args.config}: no walk.point.<label> entries found")
    rate_model = args.rate_model or cfg.rate_model
    rows = walk_rows(
        model,
        cfg.walk_h1,
        cfg.tx,
        cfg.walk_points,
        cfg.params,
        cfg.p_max,
        cfg.bandwidth,
        cfg.noise_variance,
        rate_model,
    )
    lines = provenance_lines(
        __version__,
        cfg.digest,
        cfg.seed,
        extra={"h1": format_float(cfg.walk_h1), "rate_model": rate_model},
    )
    lines.append("point,x_m,y_m,z_m,gain,in_fov,r,mu,p1_w,p2_w,rate1_bps,rate2_bps,fairness")
    for label, pos, h2, in_fov, r, mu, p1, p2, r1, r2, fair in rows:
        lines.append(
            ",".join(
                [label]
                + [format_float(v) for v in (pos.x, pos.y, pos.z, h2)]
                + ["1" if in_fov else "0"]
                + [format_float(v) for v in (r, mu, p1, p2, r1, r2, fair)]
            )
        )
    atomic_write_text(args.out, "\n".join(lines) + "\n")
    print(f"walk: {len(rows)} waypoints -> {args.out}")
    return 0


def cmd_reference_model(args) -> int:
    model = reference_model(
        mu_mode=MuMode(args.mu_mode or "eq22"), clamp_floor=args.clamp_floor
    )
    save_model(
        args.out,
        model,
        provenance={"tool_version": __version__, "source": "reference-constants"},
    )
    print(f"reference-model -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vlcfair",
        description="Fair power allocation toolkit for two-user optical NOMA links",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("channels", help="enumerate the unique channel set")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_channels)

    p = sub.add_parser("derive", help="offline pipeline: enumerate, optimize, fit")
    p.add_argument("--config", required=True)
    p.add_argument("--h1", default="2h0", help="reference gain: absolute or e.g. '2h0'")
    p.add_argument("--out-model", required=True)
    p.add_argument("--out-dataset", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--subsample", type=int, default=1, help="keep every n-th channel")
    p.add_argument("--above-ref", choices=("skip", "swap"), default=None)
    p.add_argument("--mu-mode", choices=[m.value for m in MuMode], default="eq22")
    p.add_argument("--clamp-floor", type=float, default=0.0)
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("allocate", help="one allocation plus rates on stdout")
    p.add_argument("--config", required=True)
    p.add_argument("--model", help="model file (required for method=efopa)")
    p.add_argument("--method", required=True, choices=METHODS)
    p.add_argument("--h1", type=float, required=True)
    p.add_argument("--h2", type=float, required=True)
    p.add_argument("--p-max", type=float, default=None)
    p.add_argument("--mu-mode", choices=[m.value for m in MuMode], default=None)
    p.add_argument("--rate-model", choices=RATE_MODELS, default=None)
    p.set_defaults(func=cmd_allocate)

    p = sub.add_parser("sweep", help="rate/fairness table over the gain ratio axis")
    p.add_argument("--config", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--h1", default="2h0")
    p.add_argument("--r-min", type=float, default=0.01)
    p.add_argument("--r-max", type=float, default=1.0)
    p.add_argument("--r-step", type=float, default=0.01)
    p.add_argument("--methods", default=",".join(METHODS))
    p.add_argument("--rate-model", choices=RATE_MODELS, default="shannon")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("pairs-stats", help="win percentages over all gain pairs")
    p.add_argument("--config", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--channels", required=True, help="channels file from 'channels'")
    p.add_argument("--rate-model", choices=RATE_MODELS, default="paper-repro")
    p.add_argument("--subsample", type=int, default=None, help="random gain subset size")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_pairs_stats)

    p = sub.add_parser("walk", help="fixed strong user, one row per waypoint")
    p.add_argument("--config", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--mu-mode", choices=[m.value for m in MuMode], default=None)
    p.add_argument("--rate-model", choices=RATE_MODELS, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("reference-model", help="write the published-constants model")
    p.add_argument("--out", required=True)
    p.add_argument("--mu-mode", choices=[m.value for m in MuMode], default=None)
    p.add_argument("--clamp-floor", type=float, default=0.0)
    p.set_defaults(func=cmd_reference_model)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
