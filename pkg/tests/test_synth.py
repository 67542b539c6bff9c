import numpy as np
import pytest

from canclust.errors import DataError
from canclust.ingest import parse_capture
from canclust.synth import (AttackSpec, SynthSpec, Xoshiro256StarStar, generate, inject,
                            pair_coupling, signal_id, write_wide_csv)


def small_spec(**overrides):
    kw = dict(n_groups=2, signals_per_group=3, duration_s=30.0, rate_hz=10.0,
              intra_group_rho=0.95, noise_sigma=1.0, seed=7)
    kw.update(overrides)
    return SynthSpec(**kw)


class TestPrng:
    def test_deterministic(self):
        a = Xoshiro256StarStar(123)
        b = Xoshiro256StarStar(123)
        assert [a.next_u64() for _ in range(50)] == [b.next_u64() for _ in range(50)]

    def test_seed_sensitivity(self):
        assert Xoshiro256StarStar(1).next_u64() != Xoshiro256StarStar(2).next_u64()

    def test_uniforms_open_interval(self):
        u = Xoshiro256StarStar(9).uniforms(5000)
        assert np.all(u > 0.0) and np.all(u < 1.0)
        assert abs(u.mean() - 0.5) < 0.02

    def test_normals_moments(self):
        z = Xoshiro256StarStar(11).normals(20000, sigma=2.0)
        assert abs(z.mean()) < 0.05
        assert abs(z.std() - 2.0) < 0.05

    def test_outputs_fit_64_bits(self):
        g = Xoshiro256StarStar(42)
        assert all(0 <= g.next_u64() < 2 ** 64 for _ in range(100))


class TestGenerate:
    def test_deterministic(self):
        c1 = generate(small_spec())
        c2 = generate(small_spec())
        assert c1.capture_id == c2.capture_id
        for s1, s2 in zip(c1.signals, c2.signals):
            assert s1.signal_id == s2.signal_id
            assert np.array_equal(s1.values, s2.values)
            assert np.array_equal(s1.timestamps, s2.timestamps)

    def test_seed_changes_values(self):
        c1 = generate(small_spec(seed=1))
        c2 = generate(small_spec(seed=2))
        assert not np.array_equal(c1.signals[0].values, c2.signals[0].values)

    def test_naming_and_counts(self):
        cap = generate(small_spec(n_groups=3, signals_per_group=2))
        assert len(cap.signals) == 6
        assert cap.signals[0].signal_id == "ID_100_sig_0"
        assert cap.signals[-1].signal_id == "ID_102_sig_1"
        assert signal_id(2, 1) == "ID_102_sig_1"

    def test_grid(self):
        cap = generate(small_spec(duration_s=5.0, rate_hz=20.0))
        ts = cap.signals[0].timestamps
        assert len(ts) == 100
        assert abs(ts[1] - ts[0] - 0.05) < 1e-12

    def test_zero_noise_perfect_intra_group_correlation(self):
        cap = generate(small_spec(noise_sigma=0.0))
        a, b = cap.signals[0].values, cap.signals[1].values
        rho = np.corrcoef(a, b)[0, 1]
        assert abs(rho - 1.0) < 1e-12

    def test_intra_group_rho_near_target(self):
        cap = generate(small_spec(duration_s=600.0, intra_group_rho=0.9, seed=3))
        a, b = cap.signals[0].values, cap.signals[1].values
        assert abs(np.corrcoef(a, b)[0, 1] - 0.9) < 0.06

    def test_independent_captures_weakly_correlated(self):
        # two single-group captures from independent seeds share no structure
        spec = dict(n_groups=1, signals_per_group=1, duration_s=500.0, rate_hz=10.0)
        a = generate(SynthSpec(seed=101, **spec)).signals[0].values
        b = generate(SynthSpec(seed=202, **spec)).signals[0].values
        assert abs(np.corrcoef(a, b)[0, 1]) < 0.3

    def test_pair_coupling_schedule(self):
        assert pair_coupling(0, 4) == pair_coupling(1, 4) == 0.5
        assert abs(pair_coupling(2, 4) - 0.3) < 1e-12
        assert pair_coupling(4, 5) == 0.0  # unpaired trailing group

    def test_invalid_specs(self):
        with pytest.raises(ValueError):
            small_spec(n_groups=0)
        with pytest.raises(ValueError):
            small_spec(intra_group_rho=0.0)
        with pytest.raises(ValueError):
            small_spec(duration_s=0.05)
        with pytest.raises(ValueError):
            small_spec(noise_sigma=-1.0)

    def test_capture_id_override(self):
        assert generate(small_spec(), capture_id="run_7").capture_id == "run_7"


class TestInject:
    def make(self):
        return generate(small_spec(seed=5))

    def test_empty_targets_is_noop(self):
        cap = self.make()
        atk = AttackSpec("max_value", (), 0.0, 10.0)
        assert inject(cap, atk) is cap

    def test_timestamps_and_nontargets_untouched(self):
        cap = self.make()
        atk = AttackSpec("correlated_break", ("ID_100_sig_0",), 5.0, 20.0)
        out = inject(cap, atk, seed=3)
        for orig, new in zip(cap.signals, out.signals):
            assert np.array_equal(orig.timestamps, new.timestamps)
            if orig.signal_id != "ID_100_sig_0":
                assert np.array_equal(orig.values, new.values)
        assert out.label == "attack" and out.attack_kind == "correlated_break"

    def test_locality(self):
        cap = self.make()
        atk = AttackSpec("correlated_break", ("ID_100_sig_0",), 5.0, 20.0)
        out = inject(cap, atk, seed=3)
        orig = cap.signals[0]
        new = out.signals[0]
        outside = (orig.timestamps < 5.0) | (orig.timestamps > 20.0)
        assert np.array_equal(orig.values[outside], new.values[outside])
        assert not np.array_equal(orig.values[~outside], new.values[~outside])

    def test_inject_deterministic(self):
        cap = self.make()
        atk = AttackSpec("correlated_break", ("ID_100_sig_0",), 0.0, 30.0)
        v1 = inject(cap, atk, seed=9).signals[0].values
        v2 = inject(cap, atk, seed=9).signals[0].values
        assert np.array_equal(v1, v2)
        v3 = inject(cap, atk, seed=10).signals[0].values
        assert not np.array_equal(v1, v3)

    def test_correlated_break_matches_marginal(self):
        cap = generate(small_spec(duration_s=400.0, seed=8))
        atk = AttackSpec("correlated_break", ("ID_100_sig_0",), 0.0, 400.0)
        out = inject(cap, atk, seed=2)
        orig, new = cap.signals[0].values, out.signals[0].values
        assert abs(new.mean() - orig.mean()) < 0.15 * max(1.0, abs(orig.mean()))
        assert abs(new.std() - orig.std()) < 0.1 * orig.std()
        # replacement noise is uncorrelated with the rest of the group
        assert abs(np.corrcoef(new, cap.signals[1].values)[0, 1]) < 0.2

    def test_max_value_pins_window(self):
        cap = self.make()
        atk = AttackSpec("max_value", ("ID_101_sig_1",), 10.0, 20.0)
        out = inject(cap, atk)
        sig = next(s for s in out.signals if s.signal_id == "ID_101_sig_1")
        orig = next(s for s in cap.signals if s.signal_id == "ID_101_sig_1")
        mask = (sig.timestamps >= 10.0) & (sig.timestamps <= 20.0)
        assert np.all(sig.values[mask] == orig.values.max())
        assert np.array_equal(sig.values[~mask], orig.values[~mask])

    def test_binary_flip(self):
        from canclust.ingest import RawSignal, SignalCapture
        ts = np.arange(20) / 10.0
        vals = np.array([0.0, 3.0] * 10)
        cap = SignalCapture("c", (RawSignal("bit", ts, vals),))
        out = inject(cap, AttackSpec("binary_flip", ("bit",), 0.5, 1.0))
        new = out.signals[0].values
        mask = (ts >= 0.5) & (ts <= 1.0)
        assert np.all(new[mask] == 3.0 - vals[mask])
        assert np.array_equal(new[~mask], vals[~mask])

    def test_binary_flip_rejects_many_levels(self):
        cap = self.make()
        atk = AttackSpec("binary_flip", ("ID_100_sig_0",), 0.0, 30.0)
        with pytest.raises(DataError, match="distinct values"):
            inject(cap, atk)

    def test_missing_target(self):
        with pytest.raises(DataError, match="not in capture"):
            inject(self.make(), AttackSpec("max_value", ("nope",), 0.0, 1.0))

    def test_window_after_capture(self):
        with pytest.raises(DataError, match="after capture ends"):
            inject(self.make(), AttackSpec("max_value", ("ID_100_sig_0",), 100.0, 200.0))

    def test_bad_attack_spec(self):
        with pytest.raises(ValueError):
            AttackSpec("teleport", ("x",), 0.0, 1.0)
        with pytest.raises(ValueError):
            AttackSpec("max_value", ("x",), 5.0, 5.0)


def test_write_wide_csv_round_trip(tmp_path):
    cap = generate(small_spec(duration_s=3.0))
    path = tmp_path / "cap.csv"
    write_wide_csv(cap, path)
    back = parse_capture(path, capture_id=cap.capture_id)
    assert back.signal_ids() == cap.signal_ids()
    for orig, new in zip(cap.signals, back.signals):
        assert np.array_equal(orig.timestamps, new.timestamps)
        assert np.array_equal(orig.values, new.values)
