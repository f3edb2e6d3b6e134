"""Command line front end: ``statedge {detect,evaluate,compare,noise,stat,otsu,synth}``."""

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import io, pipeline, synthetic
from .attention import AttentionConfig
from .metrics import f_measure
from .pipeline import PipelineConfig
from .stats import ContingencyTable, independence_test
from .threshold import dual_thresholds, histogram256

CSV_HEADER = ["path", "mse_raw", "mse_scaled", "psnr", "precision", "recall", "f", "runtime_ms"]

# config-file / flag name -> (PipelineConfig field, parser)
PIPELINE_KEYS = {
    "k": ("k", int),
    "alpha": ("alpha", float),
    "wmin": ("wmin", int),
    "wmax": ("wmax", int),
    "overlap": ("overlap", float),
    "window-decay": ("window_decay", float),
    "window-mode": ("window_mode", str),
    "gradient-threshold": ("gradient_threshold", float),
    "dual-ratio": ("dual_ratio", float),
    "median-size": ("filter_size", int),
    "nmin": ("n_min", int),
    "k-sigmoid": ("k_sigmoid", float),
    "merge-rule": ("merge_rule", str),
    "fisher-mode": ("fisher_mode", str),
    "max-points": ("max_points", int),
    "seed": ("seed", int),
    "threads": ("threads", int),
}
BOOL_KEYS = {"no-attention", "yates"}
EXTRA_KEYS = {"match-tol", "attention-kernel", "attention-pool"}


def _parse_bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def read_config_file(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment. Keys are flag names."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lstrip("-").replace("_", "-")
        if key not in PIPELINE_KEYS and key not in BOOL_KEYS and key not in EXTRA_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def _flag_dest(key):
    return key.replace("-", "_")


def build_config(args) -> tuple:
    """Merge defaults, the optional config file, and explicit flags.

    Returns ``(PipelineConfig, match_tol)``.
    """
    file_values = read_config_file(args.config) if getattr(args, "config", None) else {}
    merged = {}
    for key, value in file_values.items():
        merged[key] = value
    for key in list(PIPELINE_KEYS) + list(BOOL_KEYS) + list(EXTRA_KEYS):
        value = getattr(args, _flag_dest(key), None)
        if value is not None and value is not False:
            merged[key] = value

    kwargs = {}
    for key, (name, conv) in PIPELINE_KEYS.items():
        if key in merged:
            kwargs[name] = conv(merged[key])
    if "no-attention" in merged:
        kwargs["attention_enabled"] = not _parse_bool(merged["no-attention"])
    if "yates" in merged:
        kwargs["yates"] = _parse_bool(merged["yates"])
    if "threads" not in kwargs:
        kwargs["threads"] = pipeline.resolve_threads()
    att = {}
    if "attention-kernel" in merged:
        coeffs = [float(v) for v in str(merged["attention-kernel"]).split(",")]
        side = int(round(math.sqrt(len(coeffs))))
        if side * side != len(coeffs):
            raise ValueError("attention-kernel needs a square number of coefficients")
        att["depthwise_kernel"] = np.array(coeffs).reshape(side, side)
    if "attention-pool" in merged:
        att["pool_size"] = int(merged["attention-pool"])
    if att:
        kwargs["attention_cfg"] = AttentionConfig(**att)
    tol = int(merged.get("match-tol", 2))
    return PipelineConfig(**kwargs), tol


def _add_pipeline_flags(p):
    g = p.add_argument_group("pipeline")
    g.add_argument("--k", type=int, help="displacement threshold (default 3)")
    g.add_argument("--alpha", type=float, help="significance level (default 0.05)")
    g.add_argument("--wmin", type=int, help="smallest window side (default 8)")
    g.add_argument("--wmax", type=int, help="largest window side (default 64)")
    g.add_argument("--overlap", type=float, help="window overlap fraction (default 0.2)")
    g.add_argument("--window-decay", type=float, help="window decay rate (default 4.0)")
    g.add_argument("--window-mode", choices=["intent", "literal"])
    g.add_argument("--gradient-threshold", type=float, help="high-complexity cut (default 0.7)")
    g.add_argument("--dual-ratio", type=float, help="low/high threshold ratio (default 0.5)")
    g.add_argument("--median-size", type=int, help="median filter side (default 5)")
    g.add_argument("--nmin", type=int, help="minimum points per test (default 5)")
    g.add_argument("--k-sigmoid", type=float, help="membership steepness (default 5)")
    g.add_argument("--merge-rule", choices=["any_retain", "majority"])
    g.add_argument("--fisher-mode", choices=["point", "one_tail", "two_tail"])
    g.add_argument("--yates", action="store_true", default=None, help="continuity-correct chi-square")
    g.add_argument("--max-points", type=int, help="subsample cap per test (default 2000)")
    g.add_argument("--seed", type=int, help="seed for subsampling and noise")
    g.add_argument("--threads", type=int, help="worker threads (env STATEDGE_THREADS)")
    g.add_argument("--no-attention", action="store_true", default=None,
                   help="fuse RGB by plain channel mean")
    g.add_argument("--attention-kernel", help="comma-separated depthwise kernel coefficients")
    g.add_argument("--attention-pool", type=int, help="attention max-pool block size")
    g.add_argument("--match-tol", type=int, help="matching tolerance in pixels (default 2)")
    g.add_argument("--config", help="key = value file; flags win over it")


def _stem(path: Path) -> str:
    name = path.name
    for suffix in (".edges.png",):
        if name.endswith(suffix):
            return name[: -len(suffix)]
    return path.stem


def _inputs(path) -> list:
    p = Path(path)
    if p.is_dir():
        return io.list_images(p)
    if p.exists():
        return [p]
    raise FileNotFoundError(path)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.6g}"


def _detect_one(path, cfg, fixed_size=None):
    image = io.read_image(path)
    t0 = time.perf_counter()
    det = pipeline.run(image, cfg, fixed_size=fixed_size)
    elapsed = (time.perf_counter() - t0) * 1000.0
    return image, det, elapsed


def _safe(func):
    def wrapped(item):
        try:
            return func(item), None
        except Exception as exc:  # reported per file, others continue
            return None, exc
    return wrapped


def cmd_detect(args) -> int:
    cfg, _ = build_config(args)
    try:
        paths = _inputs(args.input)
    except FileNotFoundError:
        print(f"error: no such input: {args.input}", file=sys.stderr)
        return 1
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    # worker threads go to the regions inside run(); images are processed in order
    detect_safe = _safe(lambda p: _detect_one(p, cfg))
    results = [detect_safe(p) for p in paths]
    status = 0
    for path, (res, err) in zip(paths, results):
        if err is not None:
            print(f"{path}: error: {err}", file=sys.stderr)
            status = 1
            continue
        _, det, elapsed = res
        stem = _stem(path)
        io.write_edge_map(out / f"{stem}.edges.png", det.edges)
        if args.dump_gradient:
            io.write_image(out / f"{stem}.gradient.png", det.field.normalized * 255.0)
            io.write_image(out / f"{stem}.membership.png", det.membership * 255.0)
            np.save(out / f"{stem}.gradient.npy", det.field.magnitude)
            np.save(out / f"{stem}.membership.npy", det.membership)
        print(f"{path}: {int(det.edges.sum())} edge pixels, {elapsed:.1f} ms")
    if not paths:
        print("error: no images found", file=sys.stderr)
        status = 1
    return status


def load_ground_truth(gt_dir) -> dict:
    """Map stem -> boolean map. Sub-directories hold several annotations,
    reduced by pixel-wise majority vote."""
    gt = {}
    root = Path(gt_dir)
    if not root.is_dir():
        return gt
    for entry in sorted(root.iterdir()):
        if entry.is_dir():
            maps = [io.read_edge_map(p) for p in io.list_images(entry)]
            if maps:
                stack = np.stack(maps)
                gt[entry.name] = 2 * stack.sum(axis=0) > len(maps)
        elif entry.suffix.lower() in io.IMAGE_SUFFIXES:
            gt[_stem(entry)] = io.read_edge_map(entry)
    return gt


def _metric_row(path, report, runtime_ms, timing=True):
    return [str(path), _fmt(report.mse), _fmt(report.mse_scaled), _fmt(report.psnr),
            _fmt(report.precision), _fmt(report.recall), _fmt(report.f_measure),
            _fmt(runtime_ms) if timing else ""]


def _summary(reports, runtimes):
    mean_f = float(np.mean([r.f_measure for r in reports]))
    mean_mse = float(np.mean([r.mse for r in reports]))
    mean_scaled = float(np.mean([r.mse_scaled for r in reports]))
    psnrs = [r.psnr for r in reports]
    mean_psnr = math.inf if any(math.isinf(p) for p in psnrs) else float(np.mean(psnrs))
    mean_p = float(np.mean([r.precision for r in reports]))
    mean_r = float(np.mean([r.recall for r in reports]))
    total = float(sum(t for t in runtimes if t is not None))
    return mean_f, mean_mse, mean_scaled, mean_psnr, mean_p, mean_r, total


def _write_section(lines, rows, reports, runtimes, timing):
    lines.append(",".join(CSV_HEADER))
    lines.extend(",".join(r) for r in rows)
    mean_f, mean_mse, mean_scaled, mean_psnr, mean_p, mean_r, total = _summary(reports, runtimes)
    has_runtime = any(t is not None for t in runtimes)
    lines.append(",".join(["MEAN", _fmt(mean_mse), _fmt(mean_scaled), _fmt(mean_psnr), _fmt(mean_p),
                           _fmt(mean_r), _fmt(mean_f), _fmt(total) if timing and has_runtime else ""]))
    return mean_f, mean_mse, mean_psnr, total


def _evaluate_method(paths, gt, predict, tol):
    """Run ``predict(path) -> (edge_map, runtime_ms)`` and score against gt."""
    paired = [p for p in paths if _stem(p) in gt]
    for p in paths:
        if _stem(p) not in gt:
            print(f"{p}: no ground truth, skipped", file=sys.stderr)
    predict_safe = _safe(predict)
    results = [predict_safe(p) for p in paired]
    rows, reports, runtimes = [], [], []
    for path, (res, err) in zip(paired, results):
        if err is not None:
            print(f"{path}: error: {err}", file=sys.stderr)
            continue
        edges, runtime = res
        ref = gt[_stem(path)]
        if edges.shape != ref.shape:
            print(f"{path}: ground truth size mismatch, skipped", file=sys.stderr)
            continue
        report = f_measure(edges, ref, tol)
        rows.append((path, report, runtime))
        reports.append(report)
        runtimes.append(runtime)
    return rows, reports, runtimes


def cmd_evaluate(args) -> int:
    cfg, tol = build_config(args)
    gt = load_ground_truth(args.gt)
    if not gt:
        print(f"error: no ground truth found in {args.gt}", file=sys.stderr)
        return 1
    if args.pred:
        paths = io.list_images(args.pred)

        def predict(path):
            return io.read_edge_map(path), None
    else:
        paths = _inputs(args.input)

        def predict(path):
            _, det, elapsed = _detect_one(path, cfg)
            return det.edges, elapsed

    rows, reports, runtimes = _evaluate_method(paths, gt, predict, tol)
    if not reports:
        print("error: no paired images", file=sys.stderr)
        return 1
    lines = []
    csv_rows = [_metric_row(p.name, r, t, not args.no_timing) for p, r, t in rows]
    mean_f, mean_mse, mean_psnr, total = _write_section(lines, csv_rows, reports, runtimes,
                                                        not args.no_timing)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    (out / "metrics.csv").write_text("\n".join(lines) + "\n")
    print(f"images={len(reports)} mean_f={_fmt(mean_f)} mean_mse={_fmt(mean_mse)} "
          f"mean_psnr={_fmt(mean_psnr)} total_runtime_ms={_fmt(total)}")
    return 0


def compare_methods(cfg):
    """Method name -> ``predict(path) -> (edges, runtime_ms)``."""

    def timed(fn):
        def predict(path):
            image = io.read_image(path)
            t0 = time.perf_counter()
            edges = fn(image)
            return edges, (time.perf_counter() - t0) * 1000.0
        return predict

    return {
        "edd-mait": timed(lambda im: pipeline.detect(im, cfg)),
        "edd-mait-fixed": timed(lambda im: pipeline.detect_fixed_window(im, cfg, cfg.wmin)),
        "sobel-otsu": timed(lambda im: pipeline.sobel_otsu(im, cfg)),
        "otsu-binarize": timed(lambda im: pipeline.otsu_binarize(im, cfg)),
    }


def cmd_compare(args) -> int:
    cfg, tol = build_config(args)
    gt = load_ground_truth(args.gt)
    if not gt:
        print(f"error: no ground truth found in {args.gt}", file=sys.stderr)
        return 1
    paths = _inputs(args.input)
    lines, ranking = [], []
    for name, predict in compare_methods(cfg).items():
        rows, reports, runtimes = _evaluate_method(paths, gt, predict, tol)
        if not reports:
            print("error: no paired images", file=sys.stderr)
            return 1
        lines.append(f"# method: {name}")
        csv_rows = [_metric_row(p.name, r, t, not args.no_timing) for p, r, t in rows]
        mean_f, _, _, total = _write_section(lines, csv_rows, reports, runtimes, not args.no_timing)
        ranking.append((name, mean_f, total))
        lines.append("")
    ranking.sort(key=lambda item: -item[1])
    lines.append("# ranking")
    lines.append("rank,method,mean_f,total_runtime_ms")
    for i, (name, mean_f, total) in enumerate(ranking, 1):
        lines.append(f"{i},{name},{_fmt(mean_f)},{_fmt(total) if not args.no_timing else ''}")
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    (out / "compare.csv").write_text("\n".join(lines) + "\n")
    for i, (name, mean_f, total) in enumerate(ranking, 1):
        print(f"{i}. {name:15s} mean_f={_fmt(mean_f)} runtime_ms={_fmt(total)}")
    return 0


def cmd_noise(args) -> int:
    image = io.read_image(args.input)
    noisy = pipeline.add_gaussian_noise(image, args.sigma, args.seed)
    io.write_image(args.output, noisy)
    print(f"wrote {args.output} (sigma={args.sigma}, seed={args.seed})")
    return 0


def cmd_stat(args) -> int:
    table = ContingencyTable.parse(args.table)
    res = independence_test(table, args.alpha, args.fisher_mode, args.yates)
    stat = "-" if res.statistic is None else f"{res.statistic:.6g}"
    decision = "reject H0 (edge)" if res.reject_h0 else "accept H0 (noise)"
    print(f"table     a={table.a} b={table.b} c={table.c} d={table.d} n={table.n}")
    print(f"method    {res.method}")
    print(f"statistic {stat}")
    print(f"p_value   {res.p_value:.6g}")
    print(f"decision  {decision}")
    if res.degenerate:
        print("note      degenerate table (a zero margin)")
    return 0


def cmd_otsu(args) -> int:
    cfg, _ = build_config(args)
    image = io.read_image(args.image)
    gray = pipeline.to_gray(image, cfg)
    dt = dual_thresholds(histogram256(gray), cfg.dual_ratio)
    print(f"T*={dt.t_star} T_L={dt.t_low} T_H={dt.t_high}")
    return 0


def cmd_synth(args) -> int:
    out = Path(args.output)
    (out / "images").mkdir(parents=True, exist_ok=True)
    (out / "gt").mkdir(parents=True, exist_ok=True)
    for name, image, gt in synthetic.shapes_corpus(args.n, args.size, args.seed):
        io.write_image(out / "images" / f"{name}.png", image)
        io.write_edge_map(out / "gt" / f"{name}.png", gt)
    fx = synthetic.line_speckle(seed=args.seed)
    io.write_image(out / "line_speckle.png", fx.image)
    print(f"wrote {args.n} images and ground truth to {out}")
    return 0


def _nonneg_float(text):
    value = float(text)
    if not value >= 0 or not math.isfinite(value):
        raise argparse.ArgumentTypeError("must be a finite number >= 0")
    return value


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="statedge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="write <stem>.edges.png for each input image")
    p.add_argument("input", help="image file or directory")
    p.add_argument("-o", "--output", default=".", help="output directory")
    p.add_argument("--dump-gradient", action="store_true",
                   help="also write gradient / membership maps as PNG and .npy")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("evaluate", help="score edge maps against ground truth")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--pred", help="directory of predicted edge maps")
    src.add_argument("--input", help="directory of images to detect on the fly")
    p.add_argument("--gt", required=True, help="ground-truth directory")
    p.add_argument("-o", "--output", default=".", help="directory for metrics.csv")
    p.add_argument("--no-timing", action="store_true", help="leave runtime_ms blank")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="rank this method against the built-in baselines")
    p.add_argument("input", help="image directory")
    p.add_argument("gt", help="ground-truth directory")
    p.add_argument("-o", "--output", default=".", help="directory for compare.csv")
    p.add_argument("--no-timing", action="store_true", help="leave runtime columns blank")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("noise", help="add seeded Gaussian noise to an image")
    p.add_argument("input")
    p.add_argument("--sigma", type=_nonneg_float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("stat", help="run the independence test on a 2x2 table")
    p.add_argument("--table", required=True, help="a,b,c,d")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--fisher-mode", choices=["point", "one_tail", "two_tail"], default="one_tail")
    p.add_argument("--yates", action="store_true")
    p.set_defaults(func=cmd_stat)

    p = sub.add_parser("otsu", help="print Otsu and dual thresholds of an image")
    p.add_argument("image")
    p.add_argument("--dual-ratio", type=float)
    p.add_argument("--no-attention", action="store_true", default=None)
    p.add_argument("--config")
    p.set_defaults(func=cmd_otsu)

    p = sub.add_parser("synth", help="write the synthetic corpus used by the tests")
    p.add_argument("output")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--size", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
