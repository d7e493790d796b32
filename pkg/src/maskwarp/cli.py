"""Batch command-line interface.

Subcommands: warp, smoothmask, apply-field, eval {miou,ssim,ir}. Options
can come from a flat JSON config (--config); explicit flags win. Exit
codes: 0 ok, 1 usage error, 2 I/O error, 3 numerical failure.
"""

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .interest import IRParams, ir_loss, read_sphd
from .losses import write_trace_csv
from .masks import binarize, smoothness_mask, soften
from .metrics import SsimParams, iou, ssim
from .optim import NumericalError, WarpSchedule, optimize
from .pngio import load_image, load_label_mask, load_mask, save_image, save_mask
from .warp import read_wfld, warp_apply, write_wfld

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_NUMERIC = 3

_CONFIG_KEYS = {
    "src_image", "src_mask", "tgt_mask", "src_labels", "tgt_labels",
    "label_colors", "out_dir", "rounds", "alpha", "beta", "gamma",
    "pyramid_levels", "iters_per_level", "step_size", "soften_sigma",
    "init", "kernel", "save_field", "save_intermediates", "jobs",
}


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; the contract reserves 2 for I/O
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _float_list(text):
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"expected comma-separated floats, got {text!r}") from exc


def _load_config(path):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise FileNotFoundError(f"config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
    unknown = set(cfg) - _CONFIG_KEYS
    if unknown:
        raise UsageError(f"config {path}: unknown keys {sorted(unknown)}")
    return cfg


def _setting(args, cfg, flag, key, default=None):
    value = getattr(args, flag)
    if value is not None:
        return value
    return cfg.get(key, default)


def _schedule_from(args, cfg):
    alpha = _setting(args, cfg, "alpha", "alpha", (0.1, 0.2, 1.0))
    beta = _setting(args, cfg, "beta", "beta", (0.1, 0.05, 0.01))
    rounds = _setting(args, cfg, "rounds", "rounds", len(alpha))
    try:
        return WarpSchedule(
            rounds=int(rounds),
            alpha=tuple(alpha),
            beta=tuple(beta),
            gamma=float(_setting(args, cfg, "gamma", "gamma", 1.0)),
            pyramid_levels=int(
                _setting(args, cfg, "levels", "pyramid_levels", 3)
            ),
            iters_per_level=int(_setting(args, cfg, "iters", "iters_per_level", 300)),
            step_size=float(_setting(args, cfg, "step_size", "step_size", 1.0)),
            soften_sigma=float(_setting(args, cfg, "sigma", "soften_sigma", 2.0)),
            init=_setting(args, cfg, "init", "init", "centroid"),
            kernel_size=int(_setting(args, cfg, "kernel", "kernel", 9)),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _require_file(path, what):
    if path is None:
        raise UsageError(f"missing required input: {what}")
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"{what} not found: {p}")
    return p


def _cmd_warp(args):
    cfg = _load_config(args.config) if args.config else {}
    schedule = _schedule_from(args, cfg)
    src_image = _require_file(_setting(args, cfg, "src_image", "src_image"), "source image")
    src_mask = _require_file(_setting(args, cfg, "src_mask", "src_mask"), "source mask")
    tgt_mask = _require_file(_setting(args, cfg, "tgt_mask", "tgt_mask"), "target mask")
    out_dir = Path(_setting(args, cfg, "out", "out_dir", "."))

    src_labels = tgt_labels = None
    src_labels_path = _setting(args, cfg, "src_labels", "src_labels")
    tgt_labels_path = _setting(args, cfg, "tgt_labels", "tgt_labels")
    if (src_labels_path is None) != (tgt_labels_path is None):
        raise UsageError("label masks must be given for both source and target")
    if src_labels_path is not None:
        color_table = cfg.get("label_colors")
        if not color_table:
            raise UsageError("label masks need a label_colors table in the config")
        slp = _require_file(src_labels_path, "source label mask")
        tlp = _require_file(tgt_labels_path, "target label mask")
        src_labels = load_label_mask(slp, color_table)
        tgt_labels = load_label_mask(tlp, color_table)

    # parse every input up front so nothing is written on bad inputs
    img = load_image(src_image)
    m_s = load_mask(src_mask)
    m_t = load_mask(tgt_mask)

    result = optimize(
        img, m_s, m_t, schedule, src_labels=src_labels, tgt_labels=tgt_labels
    )

    out_dir.mkdir(parents=True, exist_ok=True)
    save_image(result.final_warped_image, out_dir / "N.png")
    save_mask(result.final_warped_mask, out_dir / "N_mask.png")
    write_trace_csv(result.traces, out_dir / "trace.csv")
    soft_src = soften(m_s, schedule.soften_sigma)
    for r, fld in enumerate(result.fields, start=1):
        if args.save_field or cfg.get("save_field"):
            write_wfld(fld, out_dir / f"field_{r}.wfld")
        if args.save_intermediates or cfg.get("save_intermediates"):
            save_image(warp_apply(fld, img), out_dir / f"N_{r}.png")
            save_mask(binarize(warp_apply(fld, soft_src), 0.5), out_dir / f"N_{r}_mask.png")
    print(f"IoU: {iou(result.final_warped_mask, m_t):.6f}")
    return EXIT_OK


def _cmd_smoothmask(args):
    src = _require_file(args.src_mask, "source mask")
    tgt = _require_file(args.tgt_mask, "target mask")
    m_s = load_mask(src)
    m_t = load_mask(tgt)
    out = smoothness_mask(m_s, m_t, args.kernel)
    save_mask(out, args.out)
    return EXIT_OK


def _cmd_apply_field(args):
    fieldp = _require_file(args.field, "warp field")
    imgp = _require_file(args.image, "input image")
    fld = read_wfld(fieldp)
    img = load_image(imgp)
    save_image(warp_apply(fld, img), args.out)
    return EXIT_OK


def _read_manifest(path):
    """Manifest rows are pred_path,gt_path; paths resolve against the
    manifest's directory."""
    mpath = _require_file(path, "manifest")
    base = mpath.parent
    entries = []
    with open(mpath, newline="") as fh:
        for row in csv.reader(fh):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise UsageError(f"manifest {path}: expected 2 columns, got {row}")
            pred, gt = row[0].strip(), row[1].strip()
            entries.append((base / pred, base / gt, pred, gt))
    if not entries:
        raise UsageError(f"manifest {path} is empty")
    for pred, gt, _, _ in entries:
        _require_file(pred, "manifest entry")
        _require_file(gt, "manifest entry")
    return entries


def _run_pairs(entries, fn, jobs):
    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, entries))
    return [fn(e) for e in entries]


def _emit_csv(header, rows, out_path):
    lines = [",".join(header)]
    lines += [",".join(str(c) for c in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_eval(args):
    entries = _read_manifest(args.manifest)
    if args.kind == "miou":
        scores = _run_pairs(
            entries, lambda e: iou(load_mask(e[0]), load_mask(e[1])), args.jobs
        )
        rows = [(e[2], e[3], f"{s:.9f}") for e, s in zip(entries, scores)]
        rows.append(("mean", "", f"{np.mean(scores):.9f}"))
        _emit_csv(("pred", "gt", "iou"), rows, args.out)
    elif args.kind == "ssim":
        params = SsimParams(window=args.window, sigma=args.ssim_sigma)
        scores = _run_pairs(
            entries,
            lambda e: ssim(load_image(e[0]), load_image(e[1]), params),
            args.jobs,
        )
        rows = [(e[2], e[3], f"{s:.9f}") for e, s in zip(entries, scores)]
        rows.append(("mean", "", f"{np.mean(scores):.9f}"))
        _emit_csv(("pred", "gt", "ssim"), rows, args.out)
    else:
        try:
            params = IRParams(
                lam=args.lam, beta_d=args.beta_d, m_p=args.m_p, m_n=args.m_n,
                tau=args.tau,
            )
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        results = _run_pairs(
            entries,
            lambda e: ir_loss(read_sphd(e[0]), read_sphd(e[1]), params),
            args.jobs,
        )
        rows = [
            (e[2], e[3], f"{t:.9g}", f"{pp:.9g}", f"{dd:.9g}")
            for e, (t, pp, dd) in zip(entries, results)
        ]
        means = np.mean(np.array(results, dtype=float), axis=0)
        rows.append(("mean", "", f"{means[0]:.9g}", f"{means[1]:.9g}", f"{means[2]:.9g}"))
        _emit_csv(("pred", "gt", "total", "point", "desc"), rows, args.out)
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="maskwarp", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    w = sub.add_parser("warp", help="warp a source object onto a target silhouette")
    w.add_argument("--config", help="JSON config with flat keys; flags override")
    w.add_argument("--src-image", dest="src_image")
    w.add_argument("--src-mask", dest="src_mask")
    w.add_argument("--tgt-mask", dest="tgt_mask")
    w.add_argument("--src-labels", dest="src_labels")
    w.add_argument("--tgt-labels", dest="tgt_labels")
    w.add_argument("--out", help="output directory")
    w.add_argument("--rounds", type=int)
    w.add_argument("--alpha", type=_float_list, help="comma-separated round weights")
    w.add_argument("--beta", type=_float_list, help="comma-separated round weights")
    w.add_argument("--gamma", type=float)
    w.add_argument("--levels", type=int, help="pyramid levels")
    w.add_argument("--iters", type=int, help="iterations per pyramid level")
    w.add_argument("--step-size", dest="step_size", type=float)
    w.add_argument("--sigma", type=float, help="mask softening sigma")
    w.add_argument("--init", choices=("zero", "centroid", "correlation"))
    w.add_argument("--kernel", type=int, help="edge-band kernel size")
    w.add_argument("--save-field", action="store_true")
    w.add_argument("--save-intermediates", action="store_true")
    w.set_defaults(fn=_cmd_warp)

    s = sub.add_parser("smoothmask", help="write the smoothness mask of a mask pair")
    s.add_argument("src_mask")
    s.add_argument("tgt_mask")
    s.add_argument("--kernel", type=int, default=9)
    s.add_argument("--out", required=True, help="output PNG path")
    s.set_defaults(fn=_cmd_smoothmask)

    a = sub.add_parser("apply-field", help="warp an image by a stored WFLD field")
    a.add_argument("field")
    a.add_argument("image")
    a.add_argument("--out", required=True, help="output PNG path")
    a.set_defaults(fn=_cmd_apply_field)

    e = sub.add_parser("eval", help="batch scoring from a pred,gt manifest CSV")
    e.add_argument("kind", choices=("miou", "ssim", "ir"))
    e.add_argument("manifest")
    e.add_argument("--out", help="output CSV path (default: stdout)")
    e.add_argument("--jobs", type=int, default=1)
    e.add_argument("--window", type=int, default=11, help="SSIM window")
    e.add_argument("--ssim-sigma", dest="ssim_sigma", type=float, default=1.5)
    e.add_argument("--lambda", dest="lam", type=float, default=0.00005)
    e.add_argument("--beta-d", dest="beta_d", type=float, default=250.0)
    e.add_argument("--m-p", dest="m_p", type=float, default=1.0)
    e.add_argument("--m-n", dest="m_n", type=float, default=0.2)
    e.add_argument("--tau", type=float, default=8.0)
    e.set_defaults(fn=_cmd_eval)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NumericalError as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
