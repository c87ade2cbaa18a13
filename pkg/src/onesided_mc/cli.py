"""Command-line entry point: generate, estimate, tune, sweep, distances.

The CLI is a thin shell over the library; every behavior here is reachable
through library calls with identical results. Exit codes: 0 success,
2 configuration error, 1 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .data import ConfigError, DataIOError, SeedSpec
from .dataio import (
    header_seed,
    read_dataset,
    write_dataset,
    write_distances,
    write_estimate,
)
from .distance import estimate_distances
from .harness import METHODS, GridSpec, fit_predict, mse, sweep_n, sweep_p, tune
from .kernel import fit_rows
from .neighbors import theory_params
from .synth import LATENT_FUNCTION_IDS, SynthConfig, generate

SYNTH_KEYS = ("n", "m", "d1", "d2", "p", "sigma", "function_id", "seed")
GRID_KEYS = ("h_grid", "eta2_grid", "k_grid", "tune_objective", "val_fraction")
SWEEP_KEYS = SYNTH_KEYS + GRID_KEYS + ("n_list", "p_list", "trials", "methods")
ESTIMATE_KEYS = ("h", "eta2", "eta1", "k", "rank", "lambda", "split")

DESK_N_LIST = (25, 50, 100, 150, 200)
DESK_P_LIST = (0.02, 0.03, 0.05, 0.08, 0.12)
FULL_SCALE_N_LIST = (25, 50, 100, 150, 200, 300, 400)
FULL_SCALE_P_LIST = (0.02, 0.03, 0.05, 0.08, 0.12, 0.16, 0.2)


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _collect_options(args, allowed, label):
    """Merge config-file values and --set overrides, rejecting unknown keys."""
    merged = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                merged.update(json.load(fh))
        except OSError as exc:
            raise DataIOError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise DataIOError(f"malformed config {args.config}: {exc}") from exc
    for item in getattr(args, "set", None) or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        merged[key.strip()] = _parse_value(value.strip())
    for key in merged:
        if key not in allowed:
            raise ConfigError(f"unknown {label} key {key!r}")
    return merged


def _synth_config(opts, seed_flag):
    fields = {k: opts[k] for k in SYNTH_KEYS if k in opts}
    if "function_id" in fields:
        fid = str(fields["function_id"]).lower()
        if fid not in LATENT_FUNCTION_IDS:
            raise ConfigError(f"CLI supports function ids {LATENT_FUNCTION_IDS}, got {fid!r}")
        fields["function_id"] = fid
    master = fields.pop("seed", 0)
    if seed_flag is not None:
        master = seed_flag
    defaults = {"n": 150, "m": 300, "p": 0.05, "sigma": 0.2, "function_id": "f3"}
    defaults.update(fields)
    return SynthConfig(seed=SeedSpec(int(master)), **defaults)


def _grid_spec(opts, objective_flag):
    fields = {k: opts[k] for k in GRID_KEYS if k in opts}
    for key in ("h_grid", "eta2_grid", "k_grid"):
        if key in fields:
            fields[key] = tuple(fields[key])
    if objective_flag:
        fields["tune_objective"] = objective_flag
    return GridSpec(**fields)


def _default_params(method, header, truth):
    lam, big_l = truth.smoothness if truth is not None else (1.0, 1.0)
    tp = theory_params(
        n=int(header["n"]), m=int(header["m"]), p=float(header.get("p", 1.0)),
        lam=lam, L=big_l, d1=int(header["d1"]), d2=int(header["d2"]),
        sigma=float(header["sigma"]),
    )
    if method == "ours":
        return {"h": tp.h, "eta2": tp.eta2, "eta1": tp.eta1}
    if method == "rowreg":
        return {"h": tp.h}
    if method == "oracle":
        return {"h": tp.h, "eta2": tp.h}
    if method == "als":
        return {"rank": 2}
    return {}


def cmd_generate(args):
    opts = _collect_options(args, SYNTH_KEYS, "generate")
    cfg = _synth_config(opts, args.seed)
    truth, ds = generate(cfg)
    write_dataset(args.out, cfg, ds, truth)
    print(f"wrote dataset ({ds.mask.count} observed of {ds.n}x{ds.m}) to {args.out}")
    return 0


def cmd_estimate(args):
    if args.method not in METHODS:
        raise ConfigError(f"unknown method {args.method!r}")
    ds, truth, header = read_dataset(args.data)
    opts = _collect_options(args, ESTIMATE_KEYS, "estimate")
    params = _default_params(args.method, header, truth)
    params.update(opts)
    if args.method == "ours" and "k" in params:
        params.pop("eta1", None)  # the k rule replaces the radius rule
    seed = header_seed(header)
    est = fit_predict(ds, truth, args.method, params, seed)
    os.makedirs(args.out, exist_ok=True)
    write_estimate(os.path.join(args.out, "estimate.csv"), est.values)
    if args.dump_distances and args.method == "ours":
        dists = estimate_distances(fit_rows(ds, float(params["h"])), ds.sigma)
        write_distances(args.dump_distances, dists)
    if truth is not None:
        print(f"mse={mse(est, truth):.6g}")
    else:
        print("estimate written (no ground truth present)")
    return 0


def cmd_tune(args):
    if args.method not in METHODS:
        raise ConfigError(f"unknown method {args.method!r}")
    ds, truth, header = read_dataset(args.data)
    opts = _collect_options(args, GRID_KEYS, "tune")
    grid = _grid_spec(opts, args.objective)
    seed = args.seed if args.seed is not None else header_seed(header).master
    params = tune(ds, truth, args.method, grid, SeedSpec(int(seed)))
    payload = {"method": args.method, "objective": grid.tune_objective, "params": params}
    out = args.out
    if os.path.isdir(out) or out.endswith(os.sep):
        os.makedirs(out, exist_ok=True)
        out = os.path.join(out, "params.json")
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"chosen {args.method} params: {json.dumps(params, sort_keys=True)}")
    return 0


def cmd_sweep(args):
    opts = _collect_options(args, SWEEP_KEYS, "sweep")
    methods = tuple(opts.pop("methods", METHODS))
    trials = int(opts.pop("trials", 10 if args.paper_scale else 5))
    n_list = opts.pop("n_list", None)
    p_list = opts.pop("p_list", None)
    grid = _grid_spec({k: v for k, v in opts.items() if k in GRID_KEYS}, args.objective)
    synth_opts = {k: v for k, v in opts.items() if k in SYNTH_KEYS}
    if args.paper_scale:
        synth_opts.setdefault("m", 500)
    cfg = _synth_config(synth_opts, args.seed)
    if args.axis == "n":
        values = n_list or (FULL_SCALE_N_LIST if args.paper_scale else DESK_N_LIST)
        result = sweep_n(cfg, values, methods, grid, trials, jobs=args.jobs)
    else:
        if "n" not in synth_opts:
            cfg = _synth_config({**synth_opts, "n": 200 if args.paper_scale else 150},
                                args.seed)
        values = p_list or (FULL_SCALE_P_LIST if args.paper_scale else DESK_P_LIST)
        result = sweep_p(cfg, values, methods, grid, trials, jobs=args.jobs)
    os.makedirs(args.out, exist_ok=True)
    result.to_csv(os.path.join(args.out, "results.csv"))
    result.summary_to_csv(os.path.join(args.out, "summary.csv"))
    with open(os.path.join(args.out, "run_meta.json"), "w", encoding="utf-8") as fh:
        json.dump(result.meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {len(result.records)} records to {args.out}")
    return 0


def cmd_distances(args):
    ds, truth, header = read_dataset(args.data)
    opts = _collect_options(args, ("h",), "distances")
    if "h" in opts:
        h = float(opts["h"])
    else:
        lam, big_l = truth.smoothness if truth is not None else (1.0, 1.0)
        h = theory_params(
            n=ds.n, m=ds.m, p=float(header.get("p", 1.0)), lam=lam, L=big_l,
            d1=int(header["d1"]), d2=int(header["d2"]), sigma=ds.sigma,
        ).h
    dists = estimate_distances(fit_rows(ds, h), ds.sigma)
    out = args.dump_distances or os.path.join(args.out or ".", "distances.csv")
    write_distances(out, dists)
    print(f"wrote pairwise distances (h={h:.6g}) to {out}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="onesided-mc",
        description="Matrix completion with column-side covariates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, data=False, out_required=True):
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--seed", type=int, help="master seed override")
        sp.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a config value (repeatable)")
        if data:
            sp.add_argument("--data", required=True, help="dataset directory")
        sp.add_argument("--out", required=out_required, help="output path")

    sp = sub.add_parser("generate", help="write a synthetic dataset directory")
    common(sp)
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("estimate", help="estimate the full matrix from a dataset")
    common(sp, data=True)
    sp.add_argument("--method", required=True, choices=list(METHODS))
    sp.add_argument("--dump-distances", metavar="CSV",
                    help="also dump pairwise row distances (method ours)")
    sp.set_defaults(func=cmd_estimate)

    sp = sub.add_parser("tune", help="grid-search tuning parameters")
    common(sp, data=True)
    sp.add_argument("--method", required=True, choices=list(METHODS))
    sp.add_argument("--objective", choices=["oracle", "validation"])
    sp.set_defaults(func=cmd_tune)

    sp = sub.add_parser("sweep", help="replicated MSE sweep over n or p")
    common(sp)
    sp.add_argument("--axis", required=True, choices=["n", "p"])
    sp.add_argument("--objective", choices=["oracle", "validation"])
    sp.add_argument("--paper-scale", action="store_true",
                    help="m=500, 10 trials, wider axis ranges")
    sp.add_argument("--jobs", type=int,
                    default=int(os.environ.get("ONESIDED_MC_JOBS", "1")),
                    help="worker processes (env ONESIDED_MC_JOBS)")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("distances", help="dump debiased pairwise row distances")
    common(sp, data=True, out_required=False)
    sp.add_argument("--dump-distances", metavar="CSV", help="output CSV path")
    sp.set_defaults(func=cmd_distances)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DataIOError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
