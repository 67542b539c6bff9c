"""Command-line entry points.

  canclust analyze --benign <dir|glob> --attack <kind>=<dir|glob> ... --out <dir>
  canclust synth --spec <json> --out <dir>
  canclust simtest --a <capture.csv> --b <capture.csv>

Exit codes: 0 = ran, 2 = configuration error, 3 = data error.
"""

import argparse
import glob
import json
import sys
from pathlib import Path

from .clusim import HierarchyParams, similarity
from .correlation import dump_matrix_csv, pearson_matrix, to_dissimilarity
from .errors import ConfigError, DataError
from .hierarchy import LINKAGES, agglomerate
from .ingest import parse_capture, resample
from .pipeline import RunConfig, run, verdict
from .synth import AttackSpec, SynthSpec, generate, inject, write_wide_csv

DISSIMILARITY_ALIASES = {
    "abs": "one_minus_abs_rho",
    "one_minus_abs_rho": "one_minus_abs_rho",
    "signed": "half_one_minus_rho",
    "half_one_minus_rho": "half_one_minus_rho",
}


def _expand(pattern):
    p = Path(pattern)
    if p.is_dir():
        files = sorted(str(f) for f in p.glob("*.csv"))
    else:
        files = sorted(glob.glob(pattern))
    if not files:
        raise ConfigError(f"no capture files match {pattern!r}")
    return files


def _add_shared(parser):
    parser.add_argument("--freq", type=float, default=10.0, help="resampling frequency in Hz")
    parser.add_argument("--r", type=float, default=-5.0, help="hierarchy scaling parameter")
    parser.add_argument("--alpha", type=float, default=0.9, help="diffusion continuation probability")
    parser.add_argument("--format", choices=["wide_csv", "long_csv"], default="wide_csv")
    parser.add_argument("--allow-intersection", action="store_true",
                        help="compare captures on their common signals when pruning differs")


def _cmd_analyze(args):
    attack_groups = {}
    for spec in args.attack:
        if "=" not in spec:
            raise ConfigError(f"--attack expects <kind>=<dir|glob>, got {spec!r}")
        kind, pattern = spec.split("=", 1)
        attack_groups.setdefault(kind, []).extend(_expand(pattern))
    linkages = tuple(l.strip() for l in args.linkage.split(",") if l.strip())
    config = RunConfig(
        benign_paths=tuple(_expand(args.benign)),
        attack_path_groups={k: tuple(v) for k, v in attack_groups.items()},
        format=args.format,
        frequency_hz=args.freq,
        linkages=linkages,
        r=args.r,
        alpha=args.alpha,
        significance=args.significance,
        dissimilarity=DISSIMILARITY_ALIASES.get(args.dissimilarity, args.dissimilarity),
        allow_intersection=args.allow_intersection,
        output_dir=args.out,
    )
    report = run(config)
    if args.dump_matrices:
        out = Path(args.out)
        for path in config.benign_paths:
            cap = parse_capture(path, format=config.format)
            m = resample(cap, config.frequency_hz)
            c = pearson_matrix(m)
            d = to_dissimilarity(c, mode=config.dissimilarity)
            dump_matrix_csv(c.signal_ids, c.rho, out / f"rho_{cap.capture_id}.csv")
            dump_matrix_csv(d.signal_ids, d.d, out / f"dissim_{cap.capture_id}.csv")
    summary, _tally = verdict(report)
    print(summary)
    return 0


def _cmd_synth(args):
    with open(args.spec, encoding="utf-8") as fh:
        doc = json.load(fh)
    defaults = doc.get("defaults", {})
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = []
    for entry in doc["captures"]:
        fields = {**defaults, **{k: v for k, v in entry.items() if k not in ("id", "attack")}}
        spec = SynthSpec(**fields)
        cap = generate(spec, capture_id=entry.get("id"))
        attack = entry.get("attack")
        if attack:
            aspec = AttackSpec(kind=attack["kind"], target_signals=attack["targets"],
                               start_s=attack["start_s"], end_s=attack["end_s"])
            cap = inject(cap, aspec, seed=attack.get("seed", 0))
        filename = f"{cap.capture_id}.csv"
        write_wide_csv(cap, out / filename)
        manifest.append({"path": filename, "capture_id": cap.capture_id,
                         "label": cap.label, "attack_kind": cap.attack_kind})
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump({"files": manifest}, fh, indent=2)
        fh.write("\n")
    print(f"wrote {len(manifest)} captures to {out}")
    return 0


def _cmd_simtest(args):
    params = HierarchyParams(r=args.r, alpha=args.alpha)
    dends = []
    for path in (args.a, args.b):
        cap = parse_capture(path, format=args.format)
        m = resample(cap, args.freq)
        d = to_dissimilarity(pearson_matrix(m), mode=DISSIMILARITY_ALIASES.get(args.dissimilarity, args.dissimilarity))
        dends.append(agglomerate(d, args.linkage_single))
    score = similarity(dends[0], dends[1], params, allow_intersection=args.allow_intersection)
    print(json.dumps({"capture_a": Path(args.a).stem, "capture_b": Path(args.b).stem,
                      "linkage": args.linkage_single, "r": params.r, "alpha": params.alpha,
                      "similarity": score.value}))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="canclust",
                                     description="CAN masquerade-attack forensics via signal clustering similarity")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="run the full forensic pipeline")
    p.add_argument("--benign", required=True, help="directory or glob of benign capture files")
    p.add_argument("--attack", action="append", default=[], metavar="KIND=PATTERN",
                   help="attack captures, e.g. correlated=attacks/corr_*.csv (repeatable)")
    p.add_argument("--linkage", default="single,complete,average,ward",
                   help=f"comma-separated subset of {','.join(LINKAGES)}")
    p.add_argument("--significance", type=float, default=0.05)
    p.add_argument("--dissimilarity", default="abs", choices=sorted(DISSIMILARITY_ALIASES),
                   help="correlation-to-distance transform")
    p.add_argument("--dump-matrices", action="store_true",
                   help="also write rho/dissimilarity CSVs for benign captures")
    p.add_argument("--out", required=True, help="output directory for report and curves")
    _add_shared(p)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("synth", help="generate synthetic captures from a JSON spec")
    p.add_argument("--spec", required=True, help="JSON spec with defaults and a captures list")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("simtest", help="similarity of a single capture pair (debug)")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--linkage", dest="linkage_single", default="ward", choices=LINKAGES)
    p.add_argument("--dissimilarity", default="abs", choices=sorted(DISSIMILARITY_ALIASES))
    _add_shared(p)
    p.set_defaults(func=_cmd_simtest)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DataError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
