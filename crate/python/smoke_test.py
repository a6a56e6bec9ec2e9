#!/usr/bin/env python3
"""Smoke test for the fogsense Python extension.

Builds are produced by `cargo build -p fogsense-py [--release]`, which leaves
`libfogsense.so` under `target/{debug,release}/`. This script copies the
newest build into a temp directory under the importable name `fogsense.so`,
imports it, and exercises the main types and operations.

Run from the repository root:

    cargo build -p fogsense-py --release
    python3 python/smoke_test.py
"""

import math
import pathlib
import shutil
import sys
import tempfile

REPO_ROOT = pathlib.Path(__file__).resolve().parent.parent


def load_module():
    candidates = [
        REPO_ROOT / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libfogsense.so", "fogsense.so", "libfogsense.dylib")
    ]
    built = [p for p in candidates if p.exists()]
    if not built:
        sys.exit("no built extension found; run: cargo build -p fogsense-py")
    newest = max(built, key=lambda p: p.stat().st_mtime)
    tmp = tempfile.mkdtemp(prefix="fogsense_py_")
    shutil.copy2(newest, pathlib.Path(tmp) / "fogsense.so")
    sys.path.insert(0, tmp)
    import fogsense

    print(f"loaded {newest}")
    return fogsense


def approx(a, b, tol=1e-9):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    fs = load_module()

    # Signal generation and the channel model.
    noise = fs.gen_noise(4096, 2.0, seed=7)
    mean_power = noise.energy() / len(noise)
    assert 1.8 < mean_power < 2.2, mean_power
    assert fs.gen_noise(64, 1.0, seed=3).samples() == fs.gen_noise(64, 1.0, seed=3).samples()

    pu = fs.gen_pu_signal("bpsk", 0.125, 8, 1.0, 256, seed=5)
    approx(pu.energy() / len(pu), 1.0, 1e-12)  # constant-modulus constellation

    ident = fs.apply_channel(pu, 1.0, 0.0, 0.0, seed=9)
    assert ident.samples() == pu.samples()

    # Frame files round-trip bit for bit.
    frame2 = fs.Frame.from_bytes(pu.to_bytes())
    assert frame2.samples() == pu.samples()

    # Energy detection with a calibrated threshold.
    rho = fs.calibrate_energy_threshold(0.1, 1.0, 64, 5000, seed=11)
    fa = sum(
        fs.decide(fs.energy_metric(fs.gen_noise(64, 1.0, seed=1000 + i)), rho) == "H1"
        for i in range(2000)
    )
    assert 100 < fa < 300, fa  # ≈ 10% false alarms

    # Matched filter on the known pattern.
    y = fs.apply_channel(pu, 1.0, 0.0, 1.0, seed=21)
    assert fs.waveform_metric(y, pu) > fs.waveform_metric(fs.gen_noise(256, 1.0, 3), pu)

    # Cyclostationary detection at +10 dB picks a symbol-rate multiple.
    strong = fs.apply_channel(fs.gen_pu_signal("bpsk", 0.2, 8, 1.0, 10000, 6), 1.0, 0.0, 0.1, 60)
    decision, peak_alpha, peak = fs.detect_cyclostationary(strong, [0.125, 0.25, 0.05], [0, 1, 2, 3], 0.02)
    assert decision == "H1" and peak > 0.02
    assert min(abs(peak_alpha - a) for a in (0.125, 0.25)) < 1e-12

    # Features: all-zero frame conventions.
    zeros = fs.Frame([(0.0, 0.0)] * 64)
    assert fs.extract_features(zeros) == [0.0, 0.0, 0.0, 0.0, 1.0, 0.0]

    # OLS exact recovery and the LASSO shrink-to-zero regime.
    w = fs.ols_fit([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]], [1.0, 2.0, 3.0])
    approx(w[0], 1.0, 1e-9)
    approx(w[1], 2.0, 1e-9)
    w0 = fs.lasso_fit([[1.0, 0.0], [0.0, 1.0]], [0.1, -0.1], 10.0)
    assert w0 == [0.0, 0.0]

    # SVM on the canonical two-point problem.
    model = fs.SvmModel.train([[1.0, 0.0], [-1.0, 0.0]], [1.0, -1.0], c=10.0, kernel="linear")
    label, margin = model.predict([5.0, 0.0])
    assert label == 1.0 and margin > 0
    label0, margin0 = model.predict([0.0, 0.0])
    assert label0 == 1.0 and abs(margin0) < 1e-9  # tie goes to +1

    # LLE flattens the swiss roll into a trustworthy 2-D chart.
    ambient, intrinsic = fs.gen_manifold("swiss_roll", 400, seed=4)
    embedded = fs.lle_embed(ambient, 10, 2, 1e-4)
    t = fs.trustworthiness(intrinsic, embedded, 10)
    assert t > 0.85, t

    # Whole-scenario runs are deterministic given the seed.
    cfg = "duration_ticks = 40\nn_channels = 2\nframe_len = 32\ncalibration_trials = 2000\n"
    csv_a = fs.run_scenario(cfg, seed=42)
    csv_b = fs.run_scenario(cfg, seed=42)
    assert csv_a == csv_b
    assert csv_a.splitlines()[0].startswith("scope,node_id,tier")
    assert not math.isnan(float(csv_a.splitlines()[-1].split(",")[4]))

    print("smoke test passed")


if __name__ == "__main__":
    main()
