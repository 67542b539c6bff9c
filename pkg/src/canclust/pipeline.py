"""End-to-end orchestration: captures in, verdict report out.

run() ingests (or accepts in-memory) captures, resamples them once, clusters
each capture once per requested linkage, builds the benign-benign and
attack-vs-benign similarity distributions, runs the Mann-Whitney test per
(attack kind, linkage) cell, and emits a self-contained report. verdict()
condenses a report into the human-readable detection tally.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

from .clusim import HierarchyParams
from .correlation import pearson_matrix, to_dissimilarity
from .errors import ConfigError, DataError
from .hierarchy import LINKAGES, agglomerate
from .ingest import parse_capture, resample
from .stats import attack_vs_benign, benign_pairs, density_export, mann_whitney

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RunConfig:
    # file inputs (parsed with `format`) ...
    benign_paths: tuple = ()
    attack_path_groups: dict = field(default_factory=dict)  # kind -> tuple of paths
    format: str = "wide_csv"
    # ... or pre-built captures (synthetic runs, tests)
    benign_captures: tuple = ()
    attack_capture_groups: dict = field(default_factory=dict)  # kind -> tuple of captures

    frequency_hz: float = 10.0
    linkages: tuple = ("single", "complete", "average", "ward")
    r: float = -5.0
    alpha: float = 0.9
    significance: float = 0.05
    dissimilarity: str = "one_minus_abs_rho"
    sided: str = "two_sided"
    allow_intersection: bool = False
    output_dir: str = ""

    def validate(self):
        if len(self.benign_paths) + len(self.benign_captures) < 2:
            raise ConfigError("need at least 2 benign captures")
        if not self.linkages:
            raise ConfigError("need at least one linkage")
        bad = [l for l in self.linkages if l not in LINKAGES]
        if bad:
            raise ConfigError(f"unknown linkages {bad}; choose from {LINKAGES}")
        if not (0.0 < self.significance < 1.0):
            raise ConfigError("significance must be in (0, 1)")
        if not (0.0 < self.alpha < 1.0):
            raise ConfigError("alpha must be in (0, 1)")
        if self.frequency_hz <= 0:
            raise ConfigError("frequency_hz must be positive")

    def echo(self):
        return {
            "benign_paths": [str(p) for p in self.benign_paths],
            "attack_path_groups": {k: [str(p) for p in v] for k, v in self.attack_path_groups.items()},
            "format": self.format,
            "n_benign_captures_inline": len(self.benign_captures),
            "attack_capture_groups_inline": {k: len(v) for k, v in self.attack_capture_groups.items()},
            "frequency_hz": self.frequency_hz,
            "linkages": list(self.linkages),
            "r": self.r,
            "alpha": self.alpha,
            "significance": self.significance,
            "dissimilarity": self.dissimilarity,
            "sided": self.sided,
            "allow_intersection": self.allow_intersection,
        }


@dataclass(frozen=True)
class VerdictReport:
    schema: int
    config: dict
    diagnostics: tuple  # per-capture dicts: capture_id, label, kind, n_signals, t, dropped
    benign_samples: dict  # linkage -> SimilaritySample
    entries: dict  # (attack_kind, linkage) -> entry dict

    def to_dict(self):
        return {
            "schema": self.schema,
            "config": self.config,
            "diagnostics": list(self.diagnostics),
            "benign_samples": {
                linkage: {"values": list(s.values), "pair_ids": [list(p) for p in s.pair_ids]}
                for linkage, s in self.benign_samples.items()
            },
            "results": [
                {"attack_kind": kind, "linkage": linkage, **entry}
                for (kind, linkage), entry in sorted(self.entries.items())
            ],
        }


def _load_captures(config):
    benign = list(config.benign_captures)
    for p in config.benign_paths:
        benign.append(parse_capture(p, format=config.format))
    seen = set()
    attack_groups = {}
    for kind, caps in config.attack_capture_groups.items():
        attack_groups.setdefault(kind, []).extend(caps)
    for kind, paths in config.attack_path_groups.items():
        group = attack_groups.setdefault(kind, [])
        for p in paths:
            group.append(parse_capture(p, format=config.format, label="attack", attack_kind=kind))
    for cap in benign + [c for g in attack_groups.values() for c in g]:
        if cap.capture_id in seen:
            raise DataError(f"duplicate capture_id {cap.capture_id!r}")
        seen.add(cap.capture_id)
    return benign, attack_groups


def run(config):
    """Execute the full forensic pipeline and return a VerdictReport.

    When config.output_dir is set, report.json, similarities.jsonl and
    per-sample density CSVs are written there, only after every computation
    has succeeded.
    """
    config.validate()
    benign_caps, attack_groups = _load_captures(config)
    params = HierarchyParams(r=config.r, alpha=config.alpha)

    diagnostics = []
    matrices = {}
    dissims = {}
    for cap in benign_caps + [c for g in attack_groups.values() for c in g]:
        try:
            m = resample(cap, config.frequency_hz)
            dissims[cap.capture_id] = to_dissimilarity(pearson_matrix(m), mode=config.dissimilarity)
        except DataError as exc:
            raise DataError(f"capture {cap.capture_id!r} ({cap.source_path or 'inline'}): {exc}") from exc
        matrices[cap.capture_id] = m
        diagnostics.append({
            "capture_id": cap.capture_id,
            "label": cap.label,
            "attack_kind": cap.attack_kind,
            "n_signals": len(m.signal_ids),
            "t": int(m.grid.size),
            "dropped_constant": list(m.dropped_constant),
        })

    # each capture is clustered exactly once per linkage
    dendrograms = {}  # (capture_id, linkage) -> Dendrogram
    for linkage in config.linkages:
        for cap_id, dm in dissims.items():
            dendrograms[(cap_id, linkage)] = agglomerate(dm, linkage)

    benign_ids = [c.capture_id for c in benign_caps]
    benign_samples = {}
    entries = {}
    for linkage in config.linkages:
        bdends = [dendrograms[(cid, linkage)] for cid in benign_ids]
        bsample = benign_pairs(bdends, params, capture_ids=benign_ids,
                               allow_intersection=config.allow_intersection)
        benign_samples[linkage] = bsample
        for kind, caps in attack_groups.items():
            if not caps:
                continue
            aids = [c.capture_id for c in caps]
            adends = [dendrograms[(cid, linkage)] for cid in aids]
            asample = attack_vs_benign(adends, bdends, params, kind=kind,
                                       attack_ids=aids, benign_ids=benign_ids,
                                       allow_intersection=config.allow_intersection)
            t = mann_whitney(bsample, asample, sided=config.sided,
                             significance=config.significance)
            entries[(kind, linkage)] = {
                "u": t.u_statistic,
                "p_value": t.p_value,
                "method": t.method,
                "significant": t.significant,
                "n_benign_pairs": t.n1,
                "n_attack_pairs": t.n2,
                "attack_values": list(asample.values),
                "attack_pair_ids": [list(p) for p in asample.pair_ids],
            }

    report = VerdictReport(schema=SCHEMA_VERSION, config=config.echo(),
                           diagnostics=tuple(diagnostics),
                           benign_samples=benign_samples, entries=entries)
    if config.output_dir:
        _write_outputs(report, config, params)
    return report


def _write_outputs(report, config, params):
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "report.json", "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")

    with open(out / "similarities.jsonl", "w", encoding="utf-8") as fh:
        for linkage, sample in report.benign_samples.items():
            for (a, b), v in zip(sample.pair_ids, sample.values):
                fh.write(json.dumps({"capture_a": a, "capture_b": b, "linkage": linkage,
                                     "r": params.r, "alpha": params.alpha, "similarity": v}) + "\n")
        for (kind, linkage), entry in sorted(report.entries.items()):
            for (a, b), v in zip(entry["attack_pair_ids"], entry["attack_values"]):
                fh.write(json.dumps({"capture_a": a, "capture_b": b, "linkage": linkage,
                                     "r": params.r, "alpha": params.alpha, "similarity": v,
                                     "attack_kind": kind}) + "\n")

    for linkage, sample in report.benign_samples.items():
        _write_density(out / f"density_benign_{linkage}.csv", sample.values)
    for (kind, linkage), entry in report.entries.items():
        _write_density(out / f"density_{kind}_{linkage}.csv", entry["attack_values"])


def _write_density(path, values):
    if len(values) < 2 or len(set(values)) < 2:
        return  # degenerate sample: no curve to export
    curve = density_export(values)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("x,density\n")
        for x, dens in curve:
            fh.write(f"{x!r},{dens!r}\n")


def verdict(report):
    """Condense a report into the per-attack detection tally.

    Returns (summary_text, tally) where tally maps each linkage to
    (detected, total attack kinds).
    """
    kinds = sorted({kind for kind, _ in report.entries})
    linkages = report.config["linkages"]
    lines = []
    tally = {linkage: 0 for linkage in linkages}
    for kind in kinds:
        detected_by = [l for l in linkages
                       if report.entries.get((kind, l), {}).get("significant")]
        for l in detected_by:
            tally[l] += 1
        ps = ", ".join(f"{l}={report.entries[(kind, l)]['p_value']:.3f}"
                       for l in linkages if (kind, l) in report.entries)
        lines.append(f"{kind}: detected by {{{', '.join(detected_by) or 'none'}}} ({ps})")
    if kinds:
        for l in linkages:
            lines.append(f"{l.capitalize()} detected {tally[l]} of {len(kinds)}")
    else:
        lines.append("no attack groups supplied; benign diagnostics only")
        for diag in report.diagnostics:
            lines.append(f"  {diag['capture_id']}: {diag['n_signals']} signals, "
                         f"T={diag['t']}, dropped={len(diag['dropped_constant'])}")
    return "\n".join(lines), {l: (tally[l], len(kinds)) for l in linkages}
