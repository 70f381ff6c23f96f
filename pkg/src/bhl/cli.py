"""Command line interface.

Subcommands map onto the library surface: `classify`, `kernel`, `schatten`,
`mo` work on a single weight; `equivalence` and `lemmas` drive the experiment
runner from a JSON config plus flag overrides; `lattice` builds and validates
point families.  Results print as JSON on stdout; report paths additionally
write CSV/JSON files and, unless disabled, matplotlib figures next to them.

Exit codes: 0 success, 2 usage or config error, 3 numerical failure (a JSON
error record is printed) or a partial equivalence run.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from .errors import BHLError, ConfigError, DomainError
from .geometry import generate_lattice, validate_lattice
from .harness import ExperimentConfig, run_equivalence, run_lemma_suite
from .kernels import kernel_norm_bracket, kernel_norm_sq, kernel_value
from .operators import hankel_gram, schatten_norm
from .oscillation import MOVariant, berezin, lattice_norm_from_values, \
    mo_global, mo_local, oscillation_profile, MOProfile
from .quadrature import DiscRule, invariant_nodes
from .symbols import parse_symbol
from .weights import RadialWeight, classify, load_moment_cache, \
    save_moment_cache


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _parse_point(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise ConfigError(f"point {text!r} must be RE or RE,IM")


def _floats(text: str, name: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"{name} must be a comma list of numbers") from exc


def _ensure_dir(path: str | None) -> str | None:
    if path:
        os.makedirs(path, exist_ok=True)
    return path


class _Caches:
    """Load moment caches for the given weights and save them on the way out
    when BHL_CACHE_DIR (or an explicit directory) is set."""

    def __init__(self, weights):
        self.weights = list(weights)

    def __enter__(self):
        for w in self.weights:
            load_moment_cache(w)
        return self

    def __exit__(self, *exc):
        for w in self.weights:
            save_moment_cache(w)
        return False


# ---- single-weight subcommands -------------------------------------------


def cmd_classify(args) -> int:
    weight = RadialWeight.parse(args.weight)
    with _Caches([weight]):
        report = classify(weight)
        out = {"weight": weight.label(), **report.to_dict()}
        outdir = _ensure_dir(args.output_dir)
        if outdir:
            with open(os.path.join(outdir, "classify.json"), "w",
                      encoding="utf-8") as fh:
                json.dump(out, fh, indent=2, sort_keys=True)
                fh.write("\n")
            if args.figures:
                from .plots import save_classify_figure
                out["figure"] = save_classify_figure(
                    weight, report, os.path.join(outdir, "classify.png"))
    _emit(out)
    return 0


def cmd_kernel(args) -> int:
    weight = RadialWeight.parse(args.weight)
    z = _parse_point(args.z)
    with _Caches([weight]):
        out = {"weight": weight.label(), "z": [z.real, z.imag],
               "norm_sq": kernel_norm_sq(weight, z)}
        if args.zeta is not None:
            zeta = _parse_point(args.zeta)
            val = kernel_value(weight, z, zeta)
            out["zeta"] = [zeta.real, zeta.imag]
            out["value"] = [val.real, val.imag]
        if args.bracket_r is not None:
            out["norm_bracket"] = kernel_norm_bracket(
                weight, args.bracket_r).to_dict()
    _emit(out)
    return 0


def cmd_schatten(args) -> int:
    weight = RadialWeight.parse(args.weight)
    symbol = parse_symbol(args.symbol)
    with _Caches([weight]):
        gram = hankel_gram(symbol, weight, args.N)
        report = schatten_norm(gram, args.p)
        out = {"weight": weight.label(), "symbol": args.symbol,
               **report.to_dict()}
        outdir = _ensure_dir(args.output_dir)
        if outdir:
            with open(os.path.join(outdir, "schatten.json"), "w",
                      encoding="utf-8") as fh:
                json.dump(out, fh, indent=2, sort_keys=True)
                fh.write("\n")
            if args.figures:
                from .plots import save_schatten_figure
                out["figure"] = save_schatten_figure(
                    report, os.path.join(outdir, "schatten.png"))
    _emit(out)
    return 0


def cmd_mo(args) -> int:
    weight = RadialWeight.parse(args.weight)
    symbol = parse_symbol(args.symbol)
    if args.variant == "global":
        variant = MOVariant.global_(args.eta)
    else:
        variant = MOVariant.local(args.r)
    with _Caches([weight]):
        if args.z is not None:
            z = _parse_point(args.z)
            out = {"weight": weight.label(), "symbol": args.symbol,
                   "variant": variant.label(), "z": [z.real, z.imag]}
            if args.variant == "global":
                out["mo"] = mo_global(symbol, weight, args.eta, z)
                b = berezin(symbol, weight, args.eta, z)
                out["berezin"] = [b.real, b.imag]
            else:
                out["mo"] = mo_local(symbol, weight, args.r, z)
            _emit(out)
            return 0
        nodes, _, _ = invariant_nodes(
            args.r_max, DiscRule(args.profile_radial, args.profile_angular))
        values = oscillation_profile(
            symbol, weight, variant, nodes,
            DiscRule(args.inner_radial, args.inner_angular))
        p_norms = {}
        for p in _floats(args.p, "--p"):
            ln = lattice_norm_from_values(values, p)
            p_norms[p] = {"power_sum": ln.power_sum, "norm": ln.norm}
        profile = MOProfile(weight.label(), args.symbol, variant.label(),
                            nodes, values, p_norms)
        out = {"weight": weight.label(), "symbol": args.symbol,
               "variant": variant.label(), "count": len(nodes),
               "r_max": args.r_max,
               "p_norms": {str(k): v for k, v in sorted(p_norms.items())}}
        outdir = _ensure_dir(args.output_dir)
        if outdir:
            profile.to_csv(os.path.join(outdir, "profile.csv"))
            profile.to_json(os.path.join(outdir, "profile.json"))
            if args.figures:
                from .plots import save_profile_figure
                out["figure"] = save_profile_figure(
                    profile, os.path.join(outdir, "profile.png"))
    _emit(out)
    return 0


def cmd_lattice(args) -> int:
    lattice = generate_lattice(args.r, args.r_max)
    validation = validate_lattice(lattice.points, args.r, args.r_max,
                                  probe_count=args.probes, seed=args.seed)
    out = {"r": args.r, "r_max": args.r_max, "count": len(lattice),
           "validation": validation.to_dict()}
    outdir = _ensure_dir(args.output_dir)
    if outdir:
        lattice.to_csv(os.path.join(outdir, "lattice.csv"))
        if args.figures:
            from .plots import save_lattice_figure
            out["figure"] = save_lattice_figure(
                lattice, os.path.join(outdir, "lattice.png"))
    _emit(out)
    return 0


# ---- experiment subcommands ------------------------------------------------


def _load_config(args) -> ExperimentConfig:
    if args.config:
        cfg = ExperimentConfig.from_json(args.config)
    else:
        cfg = ExperimentConfig()
    if args.weights is not None:
        cfg.weights = [w.strip() for w in args.weights.split(",") if w.strip()]
    if args.symbols is not None:
        cfg.symbols = [s.strip() for s in args.symbols.split(",") if s.strip()]
    if args.p is not None:
        cfg.p_values = _floats(args.p, "--p")
    if args.N is not None:
        cfg.gram_size = args.N
    if args.eta is not None:
        cfg.etas = [args.eta]
    if args.local_r is not None:
        cfg.local_radii = [args.local_r]
    if args.lattice_r is not None:
        cfg.lattice_r = args.lattice_r
    if args.lattice_r_max is not None:
        cfg.lattice_r_max = args.lattice_r_max
    if args.workers is not None:
        cfg.workers = args.workers
    if args.seed is not None:
        cfg.seed = args.seed
    if args.output_dir is not None:
        cfg.output_dir = args.output_dir
    if args.figures is not None:
        cfg.figures = args.figures
    cfg.validate()
    return cfg


def cmd_equivalence(args) -> int:
    cfg = _load_config(args)
    with _Caches(cfg.weight_objects()):
        report = run_equivalence(cfg)
    outdir = _ensure_dir(cfg.output_dir)
    bracket = report.ratio_bracket()
    out = {"rows": len(report.rows), "partial": report.partial,
           "verdicts_agree": report.verdicts_agree,
           "ratio_bracket": list(bracket) if bracket else None,
           "errors": report.errors,
           "runtime_seconds": report.runtime}
    if outdir:
        report.to_csv(os.path.join(outdir, "report.csv"))
        report.to_json(os.path.join(outdir, "report.json"))
        out["report_csv"] = os.path.join(outdir, "report.csv")
        if cfg.figures:
            from .plots import save_equivalence_figure
            out["figure"] = save_equivalence_figure(
                report, os.path.join(outdir, "equivalence.png"))
    else:
        sys.stdout.write(report.to_csv())
    _emit(out)
    return 3 if report.partial else 0


def cmd_lemmas(args) -> int:
    cfg = _load_config(args)
    with _Caches(cfg.weight_objects()):
        report = run_lemma_suite(cfg)
    outdir = _ensure_dir(cfg.output_dir)
    out = {"max_ratios": report.max_ratios(),
           "tightness_ratio": report.tightness["ratio"],
           "runtime_seconds": report.runtime}
    if outdir:
        report.to_csv(os.path.join(outdir, "lemmas.csv"))
        report.to_json(os.path.join(outdir, "lemmas.json"))
        out["report_csv"] = os.path.join(outdir, "lemmas.csv")
        if cfg.figures:
            from .plots import save_lemma_figure
            out["figure"] = save_lemma_figure(
                report, os.path.join(outdir, "lemmas.png"))
    else:
        sys.stdout.write(report.to_csv())
    _emit(out)
    return 0


# ---- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bhl",
        description="Bergman-space Hankel operators over radial weights: "
                    "weight classes, kernels, Schatten norms, mean "
                    "oscillation, and comparability experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--output-dir", default=None,
                       help="directory for CSV/JSON artifacts and figures")
        p.add_argument("--figures", default=True,
                       action=argparse.BooleanOptionalAction,
                       help="render figures when an output dir is given")

    p = sub.add_parser("classify", help="weight class membership with witnesses")
    p.add_argument("--weight", required=True)
    add_common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("kernel", help="reproducing kernel values and norms")
    p.add_argument("--weight", required=True)
    p.add_argument("--z", required=True, help="evaluation point RE or RE,IM")
    p.add_argument("--zeta", default=None, help="second point RE or RE,IM")
    p.add_argument("--bracket-r", type=float, default=None,
                   help="also report the norm growth bracket up to this radius")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("schatten", help="truncated Schatten norm of a Hankel operator")
    p.add_argument("--weight", required=True)
    p.add_argument("--symbol", required=True)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--N", type=int, default=128, help="basis truncation size")
    add_common(p)
    p.set_defaults(func=cmd_schatten)

    p = sub.add_parser("mo", help="mean oscillation at a point or over a profile")
    p.add_argument("--weight", required=True)
    p.add_argument("--symbol", required=True)
    p.add_argument("--variant", choices=("global", "local"), default="global")
    p.add_argument("--eta", type=float, default=4.0,
                   help="kernel power for the global variant")
    p.add_argument("--r", type=float, default=math.atanh(0.5),
                   help="hyperbolic radius for the local variant")
    p.add_argument("--z", default=None,
                   help="single point RE or RE,IM; omit for a disc profile")
    p.add_argument("--r-max", type=float, default=0.98,
                   help="profile truncation radius")
    p.add_argument("--p", default="2",
                   help="comma list of exponents for profile norms")
    p.add_argument("--profile-radial", type=int, default=48,
                   help="radial node count for the profile sample grid")
    p.add_argument("--profile-angular", type=int, default=64,
                   help="angular node count for the profile sample grid")
    p.add_argument("--inner-radial", type=int, default=48,
                   help="radial node count for each oscillation quadrature")
    p.add_argument("--inner-angular", type=int, default=96,
                   help="angular node count for each oscillation quadrature")
    add_common(p)
    p.set_defaults(func=cmd_mo)

    p = sub.add_parser("lattice", help="generate and validate a point lattice")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--r-max", type=float, required=True)
    p.add_argument("--probes", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    add_common(p)
    p.set_defaults(func=cmd_lattice)

    for name, help_text, fn in (
            ("equivalence", "three-way comparability sweep", cmd_equivalence),
            ("lemmas", "supporting inequality suites", cmd_lemmas)):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default=None, help="JSON config path")
        p.add_argument("--weights", default=None, help="comma list of weight specs")
        p.add_argument("--symbols", default=None, help="comma list of symbol specs")
        p.add_argument("--p", default=None, help="comma list of exponents")
        p.add_argument("--N", type=int, default=None, help="gram truncation size")
        p.add_argument("--eta", type=float, default=None)
        p.add_argument("--local-r", type=float, default=None)
        p.add_argument("--lattice-r", type=float, default=None)
        p.add_argument("--lattice-r-max", type=float, default=None)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--output-dir", default=None)
        p.add_argument("--figures", default=None,
                       action=argparse.BooleanOptionalAction)
        p.set_defaults(func=fn)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BHLError as exc:
        _emit({"error": type(exc).__name__, "message": str(exc)})
        return 3


if __name__ == "__main__":
    sys.exit(main())
