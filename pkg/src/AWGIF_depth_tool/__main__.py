import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from .config_loader import ConfigError, load_config, prepare_command_settings
from .detail_enhancement import EnhancementParams, case_preset, decompose, enhance
from .display import generate_comparison_table, generate_sweep_table
from .experiments import (
    DEFAULT_BETAS,
    run_beta_sweep,
    run_filter_comparison,
    to_metrics_row,
)
from .guided_filters import DEFAULT_EPSILON, DEFAULT_ETA, FilterParams
from .image_io import (
    ImageIOError,
    encoding_for_path,
    load_stack,
    read_image,
    save_grid,
    write_manifest,
)
from .metrics import MetricError, corr, rmsd, rmse
from .plotter import plot_beta_sweep, plot_filter_comparison
from .plugin_loader import FILTER_REGISTRY
from .recorder import MetricsRow, MetricsWriteError, record_metrics
from .sff_pipeline import SffParams, enhance_depth
from .synth_bench import SceneSpec, generate_scene

logger = logging.getLogger("AWGIF_depth_tool")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

# Lowest-precedence values; config files and flags override them.
BUILTIN_DEFAULTS: Dict[str, Any] = {
    "shape": "cone",
    "size": "64x64",
    "frames": 32,
    "seed": 0,
    "blur_gain": 0.5,
    "noise_var": 0.0,
    "workers": 1,
    "zeta": 2,
    "lambda0": 100.0,
    "epsilon": DEFAULT_EPSILON,
    "eta": DEFAULT_ETA,
    "beta": 1.0,
    "alpha": 0.0,
    "filter": "awgif",
    "fm_radius": 2,
    "agg_radius": 2,
    "csv": "metrics.csv",
    "selective_beta": 1.0,
    "hybrid_beta": 1.0,
}

COMMAND_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "filter": {"zeta": 15, "lambda0": 1000.0},
}


class UsageError(Exception):
    """Invalid flags or settings; reported with exit status 2."""
    pass


# --- Settings ---

def resolve_settings(args: argparse.Namespace, command: str) -> Dict[str, Any]:
    """Merge built-in defaults, the config file and explicit flags (flags win)."""
    settings = {**BUILTIN_DEFAULTS, **COMMAND_DEFAULTS.get(command, {})}
    if getattr(args, "config", None):
        settings.update(prepare_command_settings(load_config(args.config), command))
    for key, value in vars(args).items():
        if value is not None:
            settings[key] = value
    return settings


def parse_size(text: str) -> Tuple[int, int]:
    """Parse ``UxV`` into (width, height)."""
    try:
        width, height = (int(part) for part in str(text).lower().split("x"))
    except ValueError as e:
        raise UsageError(f"Invalid size '{text}': expected WIDTHxHEIGHT, e.g. 64x64.") from e
    return width, height


def parse_float_list(text) -> List[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    try:
        return [float(part) for part in str(text).split(",") if part.strip()]
    except ValueError as e:
        raise UsageError(f"Invalid number list '{text}'.") from e


def build_scene_spec(settings: Dict[str, Any]) -> SceneSpec:
    width, height = parse_size(settings["size"])
    try:
        return SceneSpec(
            shape=str(settings["shape"]),
            width=width,
            height=height,
            frames=int(settings["frames"]),
            texture_seed=int(settings["seed"]),
            blur_gain=float(settings["blur_gain"]),
            noise_variance=float(settings["noise_var"]),
        )
    except ValueError as e:
        raise UsageError(str(e)) from e


def build_filter_params(settings: Dict[str, Any]) -> FilterParams:
    try:
        return FilterParams(
            zeta=int(settings["zeta"]),
            lambda0=float(settings["lambda0"]),
            epsilon=float(settings["epsilon"]),
            eta=float(settings["eta"]),
        )
    except ValueError as e:
        raise UsageError(str(e)) from e


def build_sff_params(settings: Dict[str, Any]) -> SffParams:
    filter_params = build_filter_params(settings)
    try:
        return SffParams(
            fm_radius=int(settings["fm_radius"]),
            agg_radius=int(settings["agg_radius"]),
            filter=filter_params,
            beta=float(settings["beta"]),
            alpha=float(settings["alpha"]),
            filter_name=str(settings["filter"]),
        )
    except ValueError as e:
        raise UsageError(str(e)) from e


def _require(settings: Dict[str, Any], key: str, flag: str) -> Any:
    value = settings.get(key)
    if value in (None, ""):
        raise UsageError(f"{flag} is required.")
    return value


def _load_depth(path: str, num_frames: int):
    """Read a 16-bit depth map and restore frame-index units."""
    return read_image(path) * (num_frames - 1)


# --- Commands ---

def handle_synth_command(args: argparse.Namespace) -> int:
    settings = resolve_settings(args, "synth")
    spec = build_scene_spec(settings)
    out_dir = Path(_require(settings, "out", "--out"))
    workers = int(settings["workers"])

    truth, stack = generate_scene(spec, workers=workers)

    frame_paths = []
    for k, frame in enumerate(stack):
        frame_path = out_dir / f"frame_{k:03d}.pgm"
        save_grid(frame, frame_path, encoding="pgm8", value_range=(0.0, 1.0))
        frame_paths.append(frame_path)
    save_grid(truth.depth, out_dir / "truth.pgm", encoding="pgm16",
              value_range=(0.0, float(spec.frames - 1)))
    write_manifest(frame_paths, out_dir / "manifest.txt")
    try:
        (out_dir / "scene.cfg").write_text(spec.to_config_text(), encoding="utf-8")
    except OSError as e:
        raise ImageIOError(f"Failed to write scene config to {out_dir}: {e}") from e

    print(f"synth: {spec.frames} frames of {spec.width}x{spec.height} "
          f"({spec.label}, seed {spec.texture_seed}) -> {out_dir}")
    return EXIT_OK


def handle_sff_command(args: argparse.Namespace) -> int:
    settings = resolve_settings(args, "sff")
    params = build_sff_params(settings)
    stack_path = _require(settings, "stack", "--stack")
    out_dir = Path(_require(settings, "out", "--out"))

    stack = load_stack(stack_path)
    top = float(stack.num_frames - 1)
    result = enhance_depth(stack, params)

    save_grid(result.initial, out_dir / "initial.pgm", encoding="pgm16", value_range=(0.0, top))
    save_grid(result.final, out_dir / "final.pgm", encoding="pgm16", value_range=(0.0, top))
    save_grid(result.guidance, out_dir / "guidance.pgm", encoding="pgm8", value_range=(0.0, 1.0))

    summary = (f"sff: {stack.num_frames} frames {stack.shape[1]}x{stack.shape[0]}, "
               f"filter={params.filter_name} zeta={params.filter.zeta} "
               f"lambda0={params.filter.lambda0:g} beta={params.beta:g}, "
               f"rmsd={rmsd(result.final, result.initial):.4f}")
    if settings.get("truth"):
        truth = _load_depth(settings["truth"], stack.num_frames)
        summary += (f", rmse initial={rmse(result.initial, truth):.4f} "
                    f"final={rmse(result.final, truth):.4f}")
    print(f"{summary} -> {out_dir}")
    return EXIT_OK


def handle_eval_command(args: argparse.Namespace) -> int:
    if not args.truth and not args.initial:
        raise UsageError("eval needs --truth, --initial, or both.")
    scale = args.scale if args.scale is not None else 1.0
    pred = read_image(args.pred) * scale

    row = MetricsRow(
        scene=args.scene or Path(args.pred).stem,
        filter=args.filter or "",
        zeta=args.zeta,
        lambda0=args.lambda0,
        beta=args.beta,
    )
    if args.truth:
        truth = read_image(args.truth) * scale
        row["rmse"] = rmse(pred, truth)
        print(f"rmse={row['rmse']:.6f}")
        try:
            row["corr"] = corr(pred, truth)
            print(f"corr={row['corr']:.6f}")
        except MetricError as e:
            logger.warning("CORR left empty: %s", e)
    if args.initial:
        initial = read_image(args.initial) * scale
        row["rmsd"] = rmsd(pred, initial)
        print(f"rmsd={row['rmsd']:.6f}")

    record_metrics(row, args.csv)
    return EXIT_OK


def handle_filter_command(args: argparse.Namespace) -> int:
    settings = resolve_settings(args, "filter")
    params = build_filter_params(settings)
    name = str(settings["filter"])
    guided_filter = FILTER_REGISTRY.get_filter(name)
    if guided_filter is None:
        raise UsageError(f"unsupported filter '{name}'. "
                         f"Choose from {', '.join(FILTER_REGISTRY.list_filters())}.")

    case = settings.get("case") or "smooth"
    try:
        enhancement = case_preset(case, float(settings["selective_beta"]),
                                  float(settings["hybrid_beta"]))
        # explicit flags refine the case
        if args.alpha is not None or args.beta is not None:
            enhancement = EnhancementParams(
                alpha=enhancement.alpha if args.alpha is None else args.alpha,
                beta=enhancement.beta if args.beta is None else args.beta,
            )
        encoding = encoding_for_path(_require(settings, "out", "--out"), bits=int(settings.get("bits", 8)))
    except ValueError as e:
        raise UsageError(str(e)) from e

    image = read_image(_require(settings, "input", "--input"))
    guide = read_image(settings["guide"]) if settings.get("guide") else image
    decomposition = decompose(image, guide, params, guided_filter)
    output = enhance(decomposition, enhancement)
    save_grid(output, settings["out"], encoding=encoding, value_range=(0.0, 1.0))

    print(f"filter: {name} zeta={params.zeta} lambda0={params.lambda0:g} "
          f"alpha={enhancement.alpha:g} beta={enhancement.beta:g} -> {settings['out']}")
    return EXIT_OK


def handle_sweep_command(args: argparse.Namespace) -> int:
    settings = resolve_settings(args, "sweep")
    params = build_sff_params(settings)
    betas = parse_float_list(settings.get("betas", DEFAULT_BETAS))
    if not betas:
        raise UsageError("--betas needs at least one value.")
    if any(b < 0 for b in betas):
        raise UsageError("beta values must be >= 0.")
    stack_path = _require(settings, "stack", "--stack")
    truth_path = _require(settings, "truth", "--truth")

    stack = load_stack(stack_path)
    truth = _load_depth(truth_path, stack.num_frames)
    sweep = run_beta_sweep(stack, params, betas, truth)

    scene = settings.get("scene") or Path(stack_path).stem
    for point in sweep.points:
        record_metrics(to_metrics_row(scene, params, point.scores, beta=point.beta),
                       settings["csv"])
    print(generate_sweep_table(sweep))

    if settings.get("plot"):
        chart_path = plot_beta_sweep(sweep, settings["plot"], title=f"Depth error versus beta ({scene})")
        print(f"\nChart saved to: {os.path.abspath(chart_path)}")
    return EXIT_OK


def handle_compare_command(args: argparse.Namespace) -> int:
    settings = resolve_settings(args, "compare")
    params = build_sff_params(settings)
    filter_names: Optional[List[str]] = None
    if settings.get("filters"):
        filter_names = [name.strip() for name in str(settings["filters"]).split(",") if name.strip()]
        unknown = [name for name in filter_names if name not in FILTER_REGISTRY]
        if unknown:
            raise UsageError(f"unsupported filter '{unknown[0]}'. "
                             f"Choose from {', '.join(FILTER_REGISTRY.list_filters())}.")
    stack_path = _require(settings, "stack", "--stack")

    stack = load_stack(stack_path)
    truth = _load_depth(settings["truth"], stack.num_frames) if settings.get("truth") else None
    comparison = run_filter_comparison(stack, params, truth, filter_names)

    print(generate_comparison_table(comparison))
    scene = settings.get("scene") or Path(stack_path).stem
    if args.csv:
        for result in comparison.results.values():
            record_metrics(to_metrics_row(scene, result.params, result.scores), args.csv)
    if settings.get("plot"):
        chart_path = plot_filter_comparison(comparison, settings["plot"], title=f"Filter comparison ({scene})")
        print(f"\nChart saved to: {os.path.abspath(chart_path)}")
    return EXIT_OK


# --- Parser ---

def _filter_listing() -> str:
    entries = []
    for name in FILTER_REGISTRY.list_filters():
        metadata = FILTER_REGISTRY.get_metadata(name)
        entries.append(f"{name} ({metadata.description})")
    return "; ".join(entries)


def _add_filter_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--filter", type=str,
                        help="Guided filter: " + _filter_listing() + " (default: awgif).")
    parser.add_argument("--zeta", type=int, help="Filter window radius.")
    parser.add_argument("--lambda0", type=float, help="Regularization base.")
    parser.add_argument("--epsilon", type=float, help="Edge-aware constant (default: 1/255^2).")
    parser.add_argument("--eta", type=float, help="Aggregation constant (default: 1/200^2).")


def _add_sff_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--stack", type=str, help="Manifest file or directory of frames.")
    parser.add_argument("--fm-radius", type=int, help="GLV focus window radius (default: 2).")
    parser.add_argument("--agg-radius", type=int, help="Focus aggregation radius, 0 disables (default: 2).")
    parser.add_argument("--alpha", type=float, help="Constant detail gain (default: 0).")
    _add_filter_arguments(parser)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", "-c", type=str,
                        help="YAML or key=value settings file; flags take precedence.")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", "-v", action="store_true", help="Log debug output.")
    verbosity.add_argument("--quiet", "-q", action="store_true", help="Only log warnings and errors.")

    parser = argparse.ArgumentParser(
        prog="AWGIF_depth_tool",
        description="AWGIF depth tool: shape-from-focus depth maps refined by adaptive weighted guided filtering."
    )
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    # --- 'synth' subcommand ---
    synth_parser = subparsers.add_parser(
        "synth", parents=[common], help="Render a synthetic multi-focus stack with ground truth.")
    synth_parser.add_argument("--shape", type=str, help="cone, coswave, sinewave, flat or step.")
    synth_parser.add_argument("--size", type=str, help="Frame size as WIDTHxHEIGHT (default: 64x64).")
    synth_parser.add_argument("--frames", type=int, help="Number of frames K (default: 32).")
    synth_parser.add_argument("--seed", type=int, help="Texture / noise seed (default: 0).")
    synth_parser.add_argument("--blur-gain", type=float, help="Blur sigma per frame of defocus (default: 0.5).")
    synth_parser.add_argument("--noise-var", type=float, help="Gaussian noise variance (default: 0).")
    synth_parser.add_argument("--workers", type=int, help="Frames rendered in parallel (default: 1).")
    synth_parser.add_argument("--out", type=str, help="Output directory.")

    # --- 'sff' subcommand ---
    sff_parser = subparsers.add_parser(
        "sff", parents=[common], help="Estimate and enhance a depth map from a focus stack.")
    _add_sff_arguments(sff_parser)
    sff_parser.add_argument("--beta", type=float, help="Adaptive detail gain (default: 1.0).")
    sff_parser.add_argument("--truth", type=str, help="Optional ground-truth depth (16-bit PGM) for a quick RMSE.")
    sff_parser.add_argument("--out", type=str, help="Output directory.")

    # --- 'eval' subcommand ---
    eval_parser = subparsers.add_parser(
        "eval", parents=[common], help="Compute RMSE/CORR/RMSD and append a CSV row.")
    eval_parser.add_argument("--pred", type=str, required=True, help="Depth map to evaluate.")
    eval_parser.add_argument("--truth", type=str, help="Ground-truth depth map.")
    eval_parser.add_argument("--initial", type=str, help="Initial depth map (for RMSD).")
    eval_parser.add_argument("--csv", type=str, default="metrics.csv",
                             help="Metrics CSV to append to (default: metrics.csv).")
    eval_parser.add_argument("--scale", type=float,
                             help="Multiply loaded maps by this factor, e.g. K-1 for frame units.")
    eval_parser.add_argument("--scene", type=str, help="Scene label for the CSV row.")
    eval_parser.add_argument("--filter", type=str, help="Filter label for the CSV row.")
    eval_parser.add_argument("--zeta", type=int, help="zeta label for the CSV row.")
    eval_parser.add_argument("--lambda0", type=float, help="lambda0 label for the CSV row.")
    eval_parser.add_argument("--beta", type=float, help="beta label for the CSV row.")

    # --- 'filter' subcommand ---
    filter_parser = subparsers.add_parser(
        "filter", parents=[common], help="Smooth or enhance a single image.")
    filter_parser.add_argument("--input", type=str, help="Image to filter.")
    filter_parser.add_argument("--guide", type=str, help="Guidance image (default: the input).")
    filter_parser.add_argument("--case", type=str, help="smooth, enhance, selective or hybrid (default: smooth).")
    filter_parser.add_argument("--alpha", type=float, help="Constant detail gain (overrides the case).")
    filter_parser.add_argument("--beta", type=float, help="Adaptive detail gain (overrides the case).")
    filter_parser.add_argument("--selective-beta", type=float, help="beta of the selective case (default: 1.0).")
    filter_parser.add_argument("--hybrid-beta", type=float, help="beta of the hybrid case (default: 1.0).")
    filter_parser.add_argument("--bits", type=int, choices=[8, 16], help="PGM output depth (default: 8).")
    filter_parser.add_argument("--out", type=str, help="Output image (.pgm or .png).")
    _add_filter_arguments(filter_parser)

    # --- 'sweep' subcommand ---
    sweep_parser = subparsers.add_parser(
        "sweep", parents=[common], help="Evaluate several beta values on one stack.")
    _add_sff_arguments(sweep_parser)
    sweep_parser.add_argument("--betas", type=str,
                              help="Comma-separated beta values (default: 0.25,0.5,0.75,1.0,1.25,1.5).")
    sweep_parser.add_argument("--truth", type=str, help="Ground-truth depth (16-bit PGM).")
    sweep_parser.add_argument("--csv", type=str, help="Metrics CSV to append to (default: metrics.csv).")
    sweep_parser.add_argument("--scene", type=str, help="Scene label for the CSV rows.")
    sweep_parser.add_argument("--plot", type=str, help="Save an error-versus-beta chart to this path.")

    # --- 'compare' subcommand ---
    compare_parser = subparsers.add_parser(
        "compare", parents=[common], help="Run every registered filter on one stack.")
    _add_sff_arguments(compare_parser)
    compare_parser.add_argument("--beta", type=float, help="Adaptive detail gain (default: 1.0).")
    compare_parser.add_argument("--filters", type=str, help="Comma-separated filters (default: all).")
    compare_parser.add_argument("--truth", type=str, help="Ground-truth depth (16-bit PGM).")
    compare_parser.add_argument("--csv", type=str, help="Append one metrics row per filter to this CSV.")
    compare_parser.add_argument("--scene", type=str, help="Scene label for the CSV rows.")
    compare_parser.add_argument("--plot", type=str, help="Save a bar chart to this path.")

    return parser


HANDLERS = {
    "synth": handle_synth_command,
    "sff": handle_sff_command,
    "eval": handle_eval_command,
    "filter": handle_filter_command,
    "sweep": handle_sweep_command,
    "compare": handle_compare_command,
}


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr, force=True)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE

    configure_logging(args.verbose, args.quiet)
    try:
        return HANDLERS[args.command](args)
    except UsageError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ImageIOError, MetricsWriteError, ConfigError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except Exception as e:
        logger.debug("Unhandled error", exc_info=True)
        print(f"An unexpected error occurred: {e}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
