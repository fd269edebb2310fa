"""Command-line front end.

One subcommand per workflow: curve extraction, feature readout, parameter
and gate-bias sweeps, inverse design, image enhancement, metrics, synthetic
image generation, frame simulation, the plain 3-T baseline, and Monte-Carlo
batches.  All emitted files are byte-deterministic for identical inputs; the
optional ``--fig`` flags additionally render a matplotlib figure next to the
data.  Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import pathlib
import sys

from .circuit import frame_trace_csv, simulate_3t_frame, simulate_frame
from .config import RunConfig, dump_config, parse_config
from .curve import (
    curve_csv,
    curve_features,
    design_threshold,
    extract_curve,
    sweep_parameter,
    vgt_family,
)
from .errors import PtmpixError
from .image import (
    apply_lut,
    enhancement_report,
    histogram,
    histogram_json,
    michelson_cr,
    read_pgm,
    report_json,
    synth_low_contrast,
    write_pgm,
)
from .montecarlo import mc_csv, mc_summary, run_monte_carlo, summary_json


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage problems; this tool reserves 2 for
    # runtime errors, so remap usage errors to exit status 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(1)


def _write_text(path: str, text: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _load_config(path: str) -> RunConfig:
    return parse_config(pathlib.Path(path).read_bytes())


def _float_list(raw: str) -> list[float]:
    try:
        return [float(tok) for tok in raw.split(",") if tok != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {raw!r}")


def _cmd_extract_curve(args) -> int:
    rc = _load_config(args.config)
    n = args.points if args.points is not None else rc.curve_points
    curve = extract_curve(rc.pixel, n, rc.normalization)
    _write_text(args.out, curve_csv(curve))
    if args.fig:
        from . import plots

        plots.save_curve_figure([curve], [None], args.fig)
    return 0


def _cmd_features(args) -> int:
    rc = _load_config(args.config)
    feats = curve_features(extract_curve(rc.pixel, rc.curve_points, rc.normalization))
    _write_text(
        args.out,
        f'{{"threshold_code":{feats.threshold_code},"ax":{feats.ax},"ay":{feats.ay},'
        f'"bx":{feats.bx},"by":{feats.by},"stage1_max":{feats.stage1_max},'
        f'"stage2_min":{feats.stage2_span[0]},"stage2_max":{feats.stage2_span[1]}}}\n',
    )
    return 0


def _cmd_sweep(args) -> int:
    rc = _load_config(args.config)
    curves = sweep_parameter(rc.pixel, args.param, args.values,
                             rc.curve_points, rc.normalization)
    out_dir = pathlib.Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for i, (value, curve) in enumerate(zip(args.values, curves)):
        _write_text(str(out_dir / f"{args.param}_{i:02d}_{value:.9g}.csv"),
                    curve_csv(curve))
    if args.fig:
        from . import plots

        plots.save_curve_figure(
            curves, [f"{args.param}={v:.9g}" for v in args.values], args.fig,
            title=f"Transfer curves vs {args.param}",
        )
    return 0


def _cmd_vgt_sweep(args) -> int:
    rc = _load_config(args.config)
    if rc.pixel.tc is None:
        raise PtmpixError("config has no tuning stage (tc is null)")
    curves = vgt_family(rc.pixel, args.values, rc.curve_points, rc.normalization)
    out_dir = pathlib.Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for i, (value, curve) in enumerate(zip(args.values, curves)):
        _write_text(str(out_dir / f"vgt_{i:02d}_{value:.9g}.csv"), curve_csv(curve))
    if args.fig:
        from . import plots

        plots.save_curve_figure(
            curves, [f"v_gt={v:.9g} V" for v in args.values], args.fig,
            title="Transfer curves vs tuning-gate bias",
        )
    return 0


def _cmd_design(args) -> int:
    rc = _load_config(args.config)
    value = design_threshold(rc.pixel, args.target_code, args.free,
                             rc.curve_points, rc.normalization)
    check = curve_features(
        sweep_parameter(rc.pixel, args.free, [value],
                        rc.curve_points, rc.normalization)[0]
    ).threshold_code
    text = (
        f'{{"free":"{args.free}","target_code":{args.target_code},'
        f'"value":{value!r},"threshold_code":{check}}}\n'
    )
    _write_text(args.out, text)
    sys.stdout.write(text)
    return 0


def _cmd_enhance(args) -> int:
    rc = _load_config(args.config)
    before = read_pgm(pathlib.Path(args.infile).read_bytes())
    curve = extract_curve(rc.pixel, 256, rc.normalization)
    after = apply_lut(before, curve.lut)
    with open(args.out_image, "wb") as fh:
        fh.write(write_pgm(after, args.format.upper()))
    _write_text(args.report, report_json(enhancement_report(before, after)))
    if args.fig:
        from . import plots

        plots.save_enhancement_figure(before, after, args.fig)
    return 0


def _cmd_metrics(args) -> int:
    image = read_pgm(pathlib.Path(args.infile).read_bytes())
    _write_text(args.out, histogram_json(histogram(image), michelson_cr(image)))
    if args.fig:
        from . import plots

        plots.save_histogram_figure(image, args.fig)
    return 0


def _cmd_synth(args) -> int:
    image = synth_low_contrast(args.width, args.height, args.l_min, args.l_max,
                               args.seed)
    with open(args.out, "wb") as fh:
        fh.write(write_pgm(image, args.format.upper()))
    return 0


def _cmd_simulate(args) -> int:
    rc = _load_config(args.config)
    trace = simulate_frame(rc.pixel, args.illum, args.n_steps)
    _write_text(args.trace, frame_trace_csv(trace))
    sys.stdout.write(f"readout_v_out: {trace.readout_v_out:.9g} V "
                     f"(final state {trace.final_state.value})\n")
    if args.fig:
        from . import plots

        plots.save_trace_figure(trace, args.fig)
    return 0


def _cmd_baseline_3t(args) -> int:
    rc = _load_config(args.config)
    readout = simulate_3t_frame(rc.three_t, args.illum)
    text = f'{{"illum":{args.illum:.6f},"readout_v":{readout!r}}}\n'
    _write_text(args.out, text)
    sys.stdout.write(text)
    return 0


def _cmd_mc(args) -> int:
    rc = _load_config(args.config)
    image = read_pgm(pathlib.Path(args.image).read_bytes())
    rows = run_monte_carlo(rc.pixel, rc.mc, args.samples, args.seed, image,
                           rc.curve_points, rc.normalization, args.workers)
    _write_text(args.out, mc_csv(rows))
    _write_text(args.summary, summary_json(mc_summary(rows)))
    if args.fig:
        from . import plots

        plots.save_mc_figure(rows, args.fig)
    return 0


def _cmd_normalize_config(args) -> int:
    _write_text(args.out, dump_config(_load_config(args.config)))
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="ptmpix", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("extract-curve", _cmd_extract_curve,
            "extract the transfer curve to CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--points", type=int, default=None,
                   help="override the config's curve_points")
    p.add_argument("--fig", default=None, help="also render a PNG figure")

    p = add("features", _cmd_features, "threshold/step features as JSON")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)

    p = add("sweep", _cmd_sweep, "re-extract the curve for each switch-parameter value")
    p.add_argument("--config", required=True)
    p.add_argument("--param", required=True, choices=("r_lrs", "r_hrs", "ic_hlt"))
    p.add_argument("--values", required=True, type=_float_list,
                   help="comma-separated values")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--fig", default=None)

    p = add("vgt-sweep", _cmd_vgt_sweep, "re-extract the curve per tuning-gate bias")
    p.add_argument("--config", required=True)
    p.add_argument("--values", required=True, type=_float_list)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--fig", default=None)

    p = add("design", _cmd_design, "find the parameter value hitting a threshold code")
    p.add_argument("--config", required=True)
    p.add_argument("--target-code", required=True, type=int)
    p.add_argument("--free", required=True, choices=("ic_hlt", "r_hrs"))
    p.add_argument("--out", required=True)

    p = add("enhance", _cmd_enhance, "apply the pixel model to a PGM image")
    p.add_argument("--config", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out-image", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--format", default="p5", choices=("p2", "p5"))
    p.add_argument("--fig", default=None)

    p = add("metrics", _cmd_metrics, "histogram + contrast ratio of a PGM image")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--fig", default=None)

    p = add("synth", _cmd_synth, "generate a seeded low-contrast PGM")
    p.add_argument("--width", required=True, type=int)
    p.add_argument("--height", required=True, type=int)
    p.add_argument("--l-min", required=True, type=int)
    p.add_argument("--l-max", required=True, type=int)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--format", default="p5", choices=("p2", "p5"))

    p = add("simulate", _cmd_simulate, "reset/integrate/readout frame transient")
    p.add_argument("--config", required=True)
    p.add_argument("--illum", required=True, type=float)
    p.add_argument("--n-steps", type=int, default=256)
    p.add_argument("--trace", required=True)
    p.add_argument("--fig", default=None)

    p = add("baseline-3t", _cmd_baseline_3t, "readout of the plain 3-T pixel")
    p.add_argument("--config", required=True)
    p.add_argument("--illum", required=True, type=float)
    p.add_argument("--out", required=True)

    p = add("mc", _cmd_mc, "seeded Monte-Carlo variation batch")
    p.add_argument("--config", required=True)
    p.add_argument("--samples", required=True, type=int)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--image", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--summary", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--fig", default=None)

    p = add("normalize-config", _cmd_normalize_config,
            "parse a config, fill defaults, emit the canonical form")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)

    return parser


def dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "func", None) is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        return args.func(args)
    except (PtmpixError, OSError, ValueError) as exc:
        sys.stderr.write(f"ptmpix: error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))
