"""expsamp command line.

  expsamp table  --preset table1
  expsamp figure --preset figure2 --out fig2.csv
  expsamp check  --kernel bspline:2
  expsamp rate   --kernel bspline:2 --signal log --w 5,10,20,40,80
  expsamp apply  --kernel fejer:pi:0 --signal f2 --w 10 --x 1.4,2.3
  expsamp moments --kernel bspline:3 --nu 2
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .repro import COMMANDS, PRESETS, execute, resolve_config


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="expsamp", description="Exponential sampling operators.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--kernel", help="bspline:<n> or fejer:<alpha>:<c>")
    p.add_argument("--signal", help="f1, f2, f1z, f2z, log, cos, const:<v>, JSON or @file.json")
    p.add_argument("--w", dest="w_list", type=_float_list, help="comma-separated bandwidths")
    p.add_argument("--x", dest="x_list", type=_float_list, help="comma-separated points")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--out", dest="out_path", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--truncation", help="exact, terms:K or tol:T")
    p.add_argument("--quad", dest="quadrature_order", type=int, help="Gauss-Legendre nodes per cell")
    p.add_argument("--nu", type=int, help="moment order (moments command)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    opts = vars(args)
    command = opts.pop("command")
    preset = opts.pop("preset")
    try:
        cfg = resolve_config(command, preset, **opts)
        if cfg.command in ("table", "figure", "apply", "rate") and not cfg.w_list:
            raise ValueError(f"{cfg.command} needs --w (or a --preset)")
        text, code = execute(cfg)
    except ValueError as exc:
        print(f"expsamp: error: {exc}", file=sys.stderr)
        return 2
    if cfg.out_path:
        Path(cfg.out_path).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
