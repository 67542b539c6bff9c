"""Synthetic multi-signal captures with controllable correlation structure.

generate() builds groups of correlated signals. Each group follows one
smooth latent drift (a stationary AR(1) process), and members are affine
copies plus Gaussian noise scaled so the intra-group sample correlation
lands near the requested level. A vehicle's cluster structure is a stable
physical property from drive to drive, so the generator makes the benign
dendrogram topology deterministic: consecutive groups share a pair-level
drift with per-pair coupling strengths, all groups share a weak common
drift, and members carry distinct noise levels. The resulting correlation
gaps are far larger than sampling noise, so every benign capture clusters
the same way while attacks visibly rewire the tree. inject() applies
masquerade-style attacks that alter values inside a time window but never
touch timestamps.

Randomness comes from a self-contained xoshiro256** generator seeded through
splitmix64 (see docs/prng.md), so fixtures are reproducible bit-for-bit
across platforms and reimplementable in other languages.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .ingest import RawSignal, SignalCapture

_MASK = (1 << 64) - 1


def _splitmix64(seed):
    """Expand a 64-bit seed into a stream of 64-bit words."""
    state = seed & _MASK
    while True:
        state = (state + 0x9E3779B97F4A7C15) & _MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        yield z ^ (z >> 31)


class Xoshiro256StarStar:
    """Portable xoshiro256** PRNG; state seeded via splitmix64."""

    def __init__(self, seed):
        sm = _splitmix64(int(seed))
        self._s = [next(sm) for _ in range(4)]

    def next_u64(self):
        s0, s1, s2, s3 = self._s
        x = (s1 * 5) & _MASK
        result = ((((x << 7) | (x >> 57)) & _MASK) * 9) & _MASK
        t = (s1 << 17) & _MASK
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & _MASK
        self._s = [s0, s1, s2, s3]
        return result

    def uniforms(self, n):
        """n doubles in the open interval (0, 1)."""
        nxt = self.next_u64
        return np.array([((nxt() >> 11) + 0.5) * (2.0 ** -53) for _ in range(n)])

    def normals(self, n, sigma=1.0):
        """n standard-normal draws (Box-Muller), scaled by sigma."""
        m = (n + 1) // 2
        u1 = self.uniforms(m)
        u2 = self.uniforms(m)
        radius = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * math.pi * u2
        out = np.concatenate([radius * np.cos(theta), radius * np.sin(theta)])[:n]
        return sigma * out


@dataclass(frozen=True)
class SynthSpec:
    n_groups: int
    signals_per_group: int
    duration_s: float
    rate_hz: float
    intra_group_rho: float = 0.95
    noise_sigma: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n_groups < 1 or self.signals_per_group < 1:
            raise ValueError("need at least one group and one signal per group")
        if self.duration_s * self.rate_hz < 2:
            raise ValueError("capture must span at least 2 samples")
        if not (0.0 < self.intra_group_rho <= 1.0):
            raise ValueError("intra_group_rho must be in (0, 1]")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")


@dataclass(frozen=True)
class AttackSpec:
    kind: str  # correlated_break | max_value | binary_flip
    target_signals: tuple
    start_s: float
    end_s: float

    def __post_init__(self):
        if self.kind not in ("correlated_break", "max_value", "binary_flip"):
            raise ValueError(f"unknown attack kind {self.kind!r}")
        if not (0.0 <= self.start_s < self.end_s):
            raise ValueError("attack window must satisfy 0 <= start < end")
        object.__setattr__(self, "target_signals", tuple(self.target_signals))


def signal_id(group, member):
    """ROAD-style signal name for group g, member j."""
    return f"ID_{0x100 + group:03X}_sig_{member}"


AR_PHI = 0.5  # latent smoothness; short correlation length keeps sample rho tight
COMMON_WEIGHT = 0.05  # variance share of the capture-wide drift in every latent
MEMBER_NOISE_STEP = 0.4  # member j's noise scale is 1 + step * j


def _ar1(steps, phi=AR_PHI):
    out = np.empty(len(steps))
    acc = 0.0
    for t, s in enumerate(steps):
        acc = phi * acc + s
        out[t] = acc
    return out


def _standardize(x):
    return (x - x.mean()) / max(float(x.std()), 1e-30)


def pair_coupling(group, n_groups):
    """Variance share of the pair-level drift for group g.

    Groups (0,1), (2,3), ... form pairs with strengths 0.5, 0.3, 0.1, ...;
    an unpaired trailing group gets 0. Distinct strengths keep the
    between-group merge order deterministic.
    """
    pair = group // 2
    if 2 * pair + 1 >= n_groups:
        return 0.0
    return max(0.0, 0.5 - 0.2 * pair)


def generate(spec, capture_id=None):
    """Generate one benign capture from a SynthSpec, reproducible from seed.

    Group g's latent drift mixes the capture-wide drift, its pair's drift
    and its own AR(1) path; member j is latent * gain + offset +
    N(0, (noise_sigma * (1 + 0.4 j))^2) with the gain chosen so member 0's
    intra-group correlation hits intra_group_rho. Graded member noise makes
    within-group merge order deterministic too.
    """
    rng = Xoshiro256StarStar(spec.seed)
    t_count = int(round(spec.duration_s * spec.rate_hz))
    ts = np.arange(t_count) / spec.rate_hz

    if spec.noise_sigma == 0 or spec.intra_group_rho == 1.0:
        gain = 1.0
        noise_sigma = 0.0
    else:
        # corr = gain^2 / (gain^2 + sigma^2)  =>  gain = sigma * sqrt(rho / (1 - rho))
        rho = spec.intra_group_rho
        gain = spec.noise_sigma * math.sqrt(rho / (1.0 - rho))
        noise_sigma = spec.noise_sigma

    common = _standardize(_ar1(rng.normals(t_count)))
    pair_drifts = {}
    signals = []
    for g in range(spec.n_groups):
        pair = g // 2
        if pair not in pair_drifts:
            pair_drifts[pair] = _standardize(_ar1(rng.normals(t_count)))
        w_pair = pair_coupling(g, spec.n_groups)
        w_own = max(0.0, 1.0 - COMMON_WEIGHT - w_pair)
        own = _standardize(_ar1(rng.normals(t_count)))
        latent = _standardize(math.sqrt(COMMON_WEIGHT) * common
                              + math.sqrt(w_pair) * pair_drifts[pair]
                              + math.sqrt(w_own) * own)
        for j in range(spec.signals_per_group):
            offset = 20.0 * (rng.uniforms(1)[0] - 0.5)
            scale = noise_sigma * (1.0 + MEMBER_NOISE_STEP * j)
            noise = rng.normals(t_count, sigma=scale) if scale > 0 else 0.0
            values = gain * latent + offset + noise
            signals.append(RawSignal(signal_id(g, j), ts, values))

    if capture_id is None:
        capture_id = f"synth_{spec.seed:016x}"
    return SignalCapture(capture_id=capture_id, signals=tuple(signals),
                         source_path="", label="benign")


def inject(capture, attack, seed=0):
    """Apply a masquerade attack to a capture's target signals in-window.

    correlated_break replaces the window with independent noise matching each
    target's marginal mean/std; max_value pins the window to the signal's
    capture-wide maximum; binary_flip inverts a two-valued signal. Timestamps
    and non-target signals are untouched.
    """
    if not attack.target_signals:
        return capture
    present = {s.signal_id for s in capture.signals}
    missing = [t for t in attack.target_signals if t not in present]
    if missing:
        raise DataError(f"attack targets not in capture: {missing}")
    span_end = max(float(s.timestamps[-1]) for s in capture.signals)
    if attack.start_s > span_end:
        raise DataError(f"attack window starts after capture ends ({attack.start_s} > {span_end})")

    rng = Xoshiro256StarStar(seed)
    targets = set(attack.target_signals)
    new_signals = []
    for sig in capture.signals:
        if sig.signal_id not in targets:
            new_signals.append(sig)
            continue
        mask = (sig.timestamps >= attack.start_s) & (sig.timestamps <= attack.end_s)
        values = sig.values.copy()
        if attack.kind == "correlated_break":
            mean, std = float(sig.values.mean()), float(sig.values.std())
            values[mask] = mean + rng.normals(int(mask.sum()), sigma=std)
        elif attack.kind == "max_value":
            values[mask] = float(sig.values.max())
        else:  # binary_flip
            levels = np.unique(sig.values)
            if len(levels) > 2:
                raise DataError(f"binary_flip target {sig.signal_id!r} has {len(levels)} distinct values")
            if len(levels) == 2:
                lo, hi = levels
                flipped = np.where(values == lo, hi, lo)
                values[mask] = flipped[mask]
            # a one-valued signal flips to itself; leave unchanged
        new_signals.append(RawSignal(sig.signal_id, sig.timestamps, values))

    return SignalCapture(capture_id=capture.capture_id, signals=tuple(new_signals),
                         source_path=capture.source_path, label="attack",
                         attack_kind=attack.kind)


def write_wide_csv(capture, path):
    """Write a capture in the ingest module's wide_csv schema.

    Assumes all signals share one timestamp grid (true for generated
    captures); signals on differing grids need the long format.
    """
    grids = {tuple(s.timestamps) for s in capture.signals}
    if len(grids) != 1:
        raise DataError("write_wide_csv requires a shared timestamp grid")
    ts = capture.signals[0].timestamps
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("time," + ",".join(s.signal_id for s in capture.signals) + "\n")
        for k, t in enumerate(ts):
            fh.write(repr(float(t)) + "," +
                     ",".join(repr(float(s.values[k])) for s in capture.signals) + "\n")
