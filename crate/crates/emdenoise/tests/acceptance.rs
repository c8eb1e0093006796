//! Acceptance checks. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero when any fails.
//!
//! `EMDENOISE_ACCEPT_QUICK=1` shrinks the end-to-end benchmark to a smoke
//! run whose directional checks are reported but not meaningful.

use std::fmt::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::Instant;

use emdenoise::bench::{run_bench, BenchConfig, Experiment};
use emdenoise::config::RunConfig;
use emdenoise::model_io::{load_model, save_model};
use emdenoise::report::{EvalReport, EvalRow};
use emdenoise_core::dataset::make_dataset;
use emdenoise_core::emd::{decompose, SiftConfig, CHANNELS};
use emdenoise_core::metrics::{fit_pct, snr_db};
use emdenoise_core::mlp::{build_mlp, MlpModel, Structure};
use emdenoise_core::noise::{gen_pink, gen_white, mix_at_snr, NoiseKind};
use emdenoise_core::rng::SeededRng;
use emdenoise_core::synth::{synth_breath_cycle, BreathSpec};
use emdenoise_core::threshold::{
    estimate_e1, model_energies, threshold_custom, threshold_hard, threshold_soft, universal_thresholds_real,
    CustomParams,
};
use emdenoise_core::train::{train_rows, TrainSpec};
use emdenoise_core::Signal;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Outcome of one criterion: a verdict and a one-line summary.
struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

// ---------------------------------------------------------------- oracles

fn count_extrema(x: &[f64]) -> usize {
    let slopes: Vec<bool> = x.windows(2).filter(|w| w[1] != w[0]).map(|w| w[1] > w[0]).collect();
    slopes.windows(2).filter(|w| w[0] != w[1]).count()
}

fn count_crossings(x: &[f64]) -> usize {
    let signs: Vec<bool> = x.iter().filter(|v| **v != 0.0).map(|v| *v > 0.0).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

fn corr(a: &[f64], b: &[f64]) -> f64 {
    let ma = a.iter().sum::<f64>() / a.len() as f64;
    let mb = b.iter().sum::<f64>() / b.len() as f64;
    let (mut ab, mut aa, mut bb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        ab += (x - ma) * (y - mb);
        aa += (x - ma).powi(2);
        bb += (y - mb).powi(2);
    }
    ab / (aa * bb).sqrt()
}

/// Random test signal of kind `i % 4`: tones, chirp, filtered noise, breath.
fn test_signal(i: usize, rng: &mut SeededRng) -> Vec<f64> {
    let len = 1000 + rng.below(15_001);
    let tau = 2.0 * std::f64::consts::PI;
    match i % 4 {
        0 => {
            let (f1, f2) = (rng.uniform_range(5.0, 900.0), rng.uniform_range(5.0, 900.0));
            let a = rng.uniform_range(0.1, 1.0);
            (0..len).map(|t| (tau * f1 * t as f64 / 4000.0).sin() + a * (tau * f2 * t as f64 / 4000.0).cos()).collect()
        }
        1 => {
            let (f0, f1) = (rng.uniform_range(5.0, 200.0), rng.uniform_range(200.0, 1500.0));
            let dur = len as f64 / 4000.0;
            (0..len)
                .map(|t| {
                    let s = t as f64 / 4000.0;
                    (tau * (f0 * s + (f1 - f0) * s * s / (2.0 * dur))).sin()
                })
                .collect()
        }
        2 => {
            let k = rng.uniform_range(0.05, 0.95);
            let mut y = 0.0;
            (0..len)
                .map(|_| {
                    y = k * y + (1.0 - k) * rng.gaussian();
                    y
                })
                .collect()
        }
        _ => {
            let spec = BreathSpec { cycle_seconds: len as f64 / 4000.0, seed: rng.next_u64(), ..BreathSpec::default() };
            synth_breath_cycle(&spec, 4000).unwrap().into_samples()
        }
    }
}

fn hard_oracle(c: f64, tau: f64) -> f64 {
    if c > tau || c < -tau {
        c
    } else {
        0.0
    }
}

fn soft_oracle(c: f64, tau: f64) -> f64 {
    if c >= tau {
        c - tau
    } else if c <= -tau {
        c + tau
    } else {
        0.0
    }
}

fn custom_oracle(c: f64, tau: f64, alpha: f64, gamma: f64) -> f64 {
    if c >= tau {
        c - (1.0 - alpha) * tau
    } else if c <= -tau {
        c + (1.0 - alpha) * tau
    } else if c > gamma {
        alpha * tau * (c - gamma) / (tau - gamma)
    } else if c < -gamma {
        -(alpha * tau * (-c - gamma) / (tau - gamma))
    } else {
        0.0
    }
}

fn pink_slope(alpha: f64, len: usize, seeds: u64) -> f64 {
    let fft = FftPlanner::new().plan_fft_forward(len);
    let mut psd = vec![0.0; len / 2];
    for seed in 0..seeds {
        let mut buf: Vec<Complex<f64>> = gen_pink(len, alpha, seed).unwrap().into_iter().map(|v| Complex::new(v, 0.0)).collect();
        fft.process(&mut buf);
        for (p, c) in psd.iter_mut().zip(&buf).skip(1) {
            *p += c.norm_sqr();
        }
    }
    let pts: Vec<(f64, f64)> = (1..len / 2).map(|k| ((k as f64).log10(), psd[k].log10())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn fd_error(model: &MlpModel, rows: &[[f64; CHANNELS]], targets: &[f64]) -> f64 {
    let (_, grad) = model.mse_gradient(rows, targets).unwrap();
    let theta = model.params();
    let h = 1e-6;
    let mut probe = model.clone();
    let mut worst = 0.0f64;
    for i in 0..theta.len() {
        let mut p = theta.clone();
        p[i] = theta[i] + h;
        probe.set_params(&p).unwrap();
        let up = probe.mse(rows, targets).unwrap();
        p[i] = theta[i] - h;
        probe.set_params(&p).unwrap();
        let down = probe.mse(rows, targets).unwrap();
        let fd = (up - down) / (2.0 * h);
        worst = worst.max((grad[i] - fd).abs() / grad[i].abs().max(fd.abs()).max(1e-6));
    }
    worst
}

// ---------------------------------------------------------------- criteria

fn c1_conservation() -> Verdict {
    let start = Instant::now();
    let mut rng = SeededRng::new(101);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let x = test_signal(i, &mut rng);
        let stack = decompose(&Signal::new(x.clone(), 4000).unwrap(), &SiftConfig::default()).unwrap();
        let mut sum = stack.residue.clone();
        for imf in &stack.imfs {
            sum.iter_mut().zip(imf).for_each(|(s, v)| *s += v);
        }
        let num: f64 = sum.iter().zip(&x).map(|(a, b)| (a - b).powi(2)).sum();
        let den: f64 = x.iter().map(|v| v * v).sum();
        worst = worst.max((num / den).sqrt());
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(worst < 1e-8 && secs < 60.0, format!("worst relative L2 error {worst:.2e} over 100 signals in {secs:.1} s"))
}

fn c2_imf_validity() -> Verdict {
    let mut rng = SeededRng::new(202);
    let (mut imfs, mut bad) = (0, 0);
    for i in 0..100 {
        let x = test_signal(i, &mut rng);
        let stack = decompose(&Signal::new(x, 4000).unwrap(), &SiftConfig::default()).unwrap();
        for imf in &stack.imfs {
            imfs += 1;
            if count_extrema(imf).abs_diff(count_crossings(imf)) > 1 {
                bad += 1;
            }
        }
    }
    let tau = 2.0 * std::f64::consts::PI;
    let hi: Vec<f64> = (0..4000).map(|t| (tau * 400.0 * t as f64 / 4000.0).sin()).collect();
    let lo: Vec<f64> = (0..4000).map(|t| (tau * 40.0 * t as f64 / 4000.0).sin()).collect();
    let x: Vec<f64> = hi.iter().zip(&lo).map(|(a, b)| a + b).collect();
    let stack = decompose(&Signal::new(x, 4000).unwrap(), &SiftConfig::default()).unwrap();
    let (r1, r2) = (corr(&stack.imfs[0], &hi), corr(&stack.imfs[1], &lo));
    verdict(
        bad == 0 && r1 > 0.95 && r2 > 0.95,
        format!("{bad}/{imfs} IMFs violate the extrema/crossing rule; two-tone correlations {r1:.4} (400 Hz), {r2:.4} (40 Hz)"),
    )
}

fn c3_threshold_closed_forms() -> Verdict {
    let mut rng = SeededRng::new(303);
    let (mut hard_bad, mut soft_err, mut custom_err) = (0usize, 0.0f64, 0.0f64);
    let mut limits_ok = true;
    for _ in 0..100_000 {
        let c = rng.uniform_range(-4.0, 4.0);
        let tau = rng.uniform_range(0.0, 3.0);
        let alpha = rng.uniform();
        let ratio = rng.uniform_range(1e-6, 1.0 - 1e-6);
        let p = CustomParams::new(alpha, ratio).unwrap();
        if threshold_hard(&[c], tau)[0].to_bits() != hard_oracle(c, tau).to_bits() {
            hard_bad += 1;
        }
        soft_err = soft_err.max((threshold_soft(&[c], tau)[0] - soft_oracle(c, tau)).abs());
        custom_err = custom_err.max((threshold_custom(&[c], tau, &p)[0] - custom_oracle(c, tau, alpha, ratio * tau)).abs());
        if c.abs() >= tau {
            let a0 = threshold_custom(&[c], tau, &CustomParams::new(0.0, ratio).unwrap())[0];
            let a1 = threshold_custom(&[c], tau, &CustomParams::new(1.0, ratio).unwrap())[0];
            limits_ok &= a0 == threshold_soft(&[c], tau)[0] && a1 == c;
        }
    }
    verdict(
        hard_bad == 0 && soft_err < 1e-15 && custom_err < 1e-15 && limits_ok,
        format!(
            "1e5 tuples: hard mismatches {hard_bad}, soft max err {soft_err:.1e}, custom max err {custom_err:.1e}, alpha limits {}",
            if limits_ok { "hold" } else { "broken" }
        ),
    )
}

fn c4_universal_threshold() -> Verdict {
    let mut rng = SeededRng::new(404);
    let g: Vec<f64> = (0..100_000).map(|_| rng.gaussian()).collect();
    let e1 = estimate_e1(&g).unwrap();
    let e = model_energies(1.0, 12).unwrap();
    let ratio_err = (1..11).map(|i| (e[i + 1] / e[i] - 1.0 / 2.01).abs()).fold(0.0, f64::max);
    let tau = universal_thresholds_real(&[1.0], std::f64::consts::E, 0.7).unwrap()[0];
    let tau_err = (tau - 0.7 * 2f64.sqrt()).abs();
    verdict(
        (0.95..=1.05).contains(&e1) && ratio_err <= f64::EPSILON && tau_err < 1e-12,
        format!("E1 estimate {e1:.4}; energy ratio deviation from 1/2.01 {ratio_err:.1e}; tau error {tau_err:.1e}"),
    )
}

fn c5_noise_calibration() -> Verdict {
    let mut rng = SeededRng::new(505);
    let clean = Signal::new((0..8000).map(|_| 0.3 * rng.gaussian()).collect(), 4000).unwrap();
    let mut snr_err = 0.0f64;
    for target in -2..=20 {
        for noise in [gen_white(8000, target as u64).unwrap(), gen_pink(8000, 1.0, target as u64).unwrap()] {
            let (noisy, _) = mix_at_snr(&clean, &noise, target as f64).unwrap();
            snr_err = snr_err.max((snr_db(clean.samples(), noisy.samples()).unwrap() - target as f64).abs());
        }
    }
    let mut slopes = String::new();
    let mut slope_ok = true;
    for alpha in [0.5, 1.0, 1.5] {
        let s = pink_slope(alpha, 1 << 14, 100);
        slope_ok &= (s + alpha).abs() <= 0.15;
        write!(slopes, " a={alpha}:{s:.3}").unwrap();
    }
    verdict(snr_err < 1e-6 && slope_ok, format!("max SNR error {snr_err:.1e} dB over -2..20; PSD slopes{slopes}"))
}

fn c6_gradients() -> Verdict {
    let mut rng = SeededRng::new(606);
    let rows: Vec<[f64; CHANNELS]> = (0..20).map(|_| std::array::from_fn(|_| rng.uniform_range(-1.0, 1.0))).collect();
    let targets: Vec<f64> = (0..20).map(|_| rng.uniform_range(-1.0, 1.0)).collect();
    let mut worst = Vec::new();
    for sizes in [vec![13, 5, 1], vec![13, 25, 20, 1]] {
        let model = build_mlp(&Structure::Sizes(sizes), 7).unwrap();
        worst.push(fd_error(&model, &rows, &targets));
    }
    verdict(
        worst.iter().all(|w| *w < 1e-4),
        format!("max relative error 13-5-1 {:.1e}, 13-25-20-1 {:.1e}", worst[0], worst[1]),
    )
}

fn c7_lm_sanity() -> Verdict {
    let cycles: Vec<Signal> = (0..2)
        .map(|s| synth_breath_cycle(&BreathSpec { cycle_seconds: 1.0, seed: s, ..BreathSpec::default() }, 4000).unwrap())
        .collect();
    let spec = TrainSpec { snr_set: vec![0.0, 10.0], seed: 1, ..TrainSpec::default() };
    let data = make_dataset(&cycles, &spec, &SiftConfig::default()).unwrap();
    let targets: Vec<f64> = data.inputs.iter().map(|r| r.iter().sum()).collect();
    let model = build_mlp(&spec.structure, spec.init_seed()).unwrap();
    let (model, history) = train_rows(model, &data.inputs, &targets, &spec).unwrap();
    let mse = model.mse(&data.inputs, &targets).unwrap();
    let accepted: Vec<_> = history.iter().filter(|h| h.accepted).collect();
    let monotone = accepted.iter().all(|h| h.loss_after <= h.loss_before);
    verdict(
        mse < 1e-6 && history.len() <= 200 && monotone,
        format!(
            "ANN5 on {} rows: MSE {mse:.2e} after {} epochs, {} accepted steps, loss non-increasing {monotone}",
            data.len(),
            history.len(),
            accepted.len()
        ),
    )
}

fn c8_metrics() -> Verdict {
    let x = [0.3, -1.2, 2.5, 0.7, -0.4];
    let e = [1.0, -0.5, 0.25, 2.0, -1.5];
    let ex: f64 = x.iter().map(|v| v * v).sum();
    let ee: f64 = e.iter().map(|v| v * v).sum();
    let at = |ratio: f64| -> f64 {
        let k = (ex / ee / ratio).sqrt();
        let y: Vec<f64> = x.iter().zip(&e).map(|(a, b)| a + k * b).collect();
        snr_db(&x, &y).unwrap()
    };
    let (s0, s20) = (at(1.0), at(100.0));
    let f_id = fit_pct(&x, &x).unwrap();
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let f_mean = fit_pct(&x, &[mean; 5]).unwrap();
    verdict(
        s0.abs() < 1e-12 && (s20 - 20.0).abs() < 1e-12 && f_id == 100.0 && f_mean.abs() < 1e-12,
        format!("SNR {s0:.2e} dB and {s20:.12} dB; Fit {f_id} at identity, {f_mean:.1e} at mean"),
    )
}

fn rows<'a>(r: &'a EvalReport, method: &str, kind: NoiseKind) -> Vec<&'a EvalRow> {
    r.filter(|x| x.method == method && x.test_noise == kind.as_str())
}

fn fmt_ref(v: Option<f64>) -> String {
    v.map_or("-".into(), |v| format!("{v:.2}"))
}

fn c9_end_to_end() -> Verdict {
    let mut cfg = BenchConfig::default();
    let quick = std::env::var_os("EMDENOISE_ACCEPT_QUICK").is_some();
    if quick {
        cfg.corpus.cycles = 4;
        cfg.corpus.train_cycles = 3;
        cfg.corpus.breath.cycle_seconds = 1.0;
        cfg.train.epochs = 20;
        cfg.trials = 1;
        cfg.sweep.trials = 1;
    }
    let start = Instant::now();
    let reports = run_bench(cfg.clone(), &[Experiment::Table4, Experiment::Sweep]).unwrap();
    let minutes = start.elapsed().as_secs_f64() / 60.0;
    let (table4, sweep) = (&reports[0].1, &reports[1].1);

    let mut log = String::new();
    writeln!(log, "    table4 (normalized domain, {} test cycles x {} trials, seed {})", cfg.corpus.cycles - cfg.corpus.train_cycles, cfg.trials, cfg.seed).unwrap();
    writeln!(log, "    noise  snr   in     ANN out (ref)    Custom out (ref)  ANN fit  Custom fit").unwrap();
    let (mut a_ok, mut b_ok, mut c_ok) = (true, true, true);
    let mut a_fail = Vec::new();
    let mut c_fail = Vec::new();
    for kind in NoiseKind::ALL {
        let ann = rows(table4, "EMD-ANN", kind);
        let custom = rows(table4, "EMD-Custom", kind);
        for (a, c) in ann.iter().zip(&custom) {
            writeln!(
                log,
                "    {:<5} {:>4} {:>6.2} {:>7.2} ({:>5}) {:>8.2} ({:>5}) {:>8.2} {:>8.2}",
                kind.as_str(),
                a.test_snr,
                a.in_snr,
                a.out_snr,
                fmt_ref(a.reference_out_snr),
                c.out_snr,
                fmt_ref(c.reference_out_snr),
                a.fit_pct,
                c.fit_pct
            )
            .unwrap();
            if !(a.out_snr > a.in_snr) {
                a_ok = false;
                a_fail.push(format!("{} {} dB gain {:+.2}", kind.as_str(), a.test_snr, a.gain));
            }
            if a.test_snr == 0.0 && !(a.gain >= 3.0) {
                b_ok = false;
            }
            if !(a.out_snr >= c.out_snr) {
                c_ok = false;
                c_fail.push(format!("{} {} dB ({:.2} < {:.2})", kind.as_str(), a.test_snr, a.out_snr, c.out_snr));
            }
        }
    }
    let gain0: Vec<String> = NoiseKind::ALL
        .iter()
        .filter_map(|k| rows(table4, "EMD-ANN", *k).into_iter().find(|r| r.test_snr == 0.0).map(|r| format!("{} {:+.2}", k.as_str(), r.gain)))
        .collect();

    writeln!(log, "    sweep output SNR per model (train->test), -2..20 dB").unwrap();
    let mut d_ok = true;
    let mut d_fail = Vec::new();
    let mut models: Vec<(String, String)> = sweep.rows.iter().map(|r| (r.train_noise.clone(), r.test_noise.clone())).collect();
    models.sort();
    models.dedup();
    for (train, test) in &models {
        let mut series: Vec<&EvalRow> = sweep.filter(|r| &r.train_noise == train && &r.test_noise == test);
        series.sort_by(|a, b| a.test_snr.total_cmp(&b.test_snr));
        let outs: Vec<String> = series.iter().map(|r| format!("{:.1}", r.out_snr)).collect();
        writeln!(log, "    {train}->{test}: {}", outs.join(" ")).unwrap();
        for w in series.windows(2) {
            if w[1].out_snr < w[0].out_snr - 1.0 {
                d_ok = false;
                d_fail.push(format!("{train}->{test} drops {:.2} dB at {} dB", w[0].out_snr - w[1].out_snr, w[1].test_snr));
            }
        }
        let (first, last) = (series.first().unwrap(), series.last().unwrap());
        if !(first.gain > last.gain) {
            d_ok = false;
            d_fail.push(format!("{train}->{test} gain {:+.2} at {} dB vs {:+.2} at {} dB", first.gain, first.test_snr, last.gain, last.test_snr));
        }
    }
    writeln!(
        log,
        "    (a) gain > 0 everywhere: {}{}",
        if a_ok { "PASS" } else { "FAIL" },
        if a_fail.is_empty() { String::new() } else { format!(" [{}]", a_fail.join("; ")) }
    )
    .unwrap();
    writeln!(log, "    (b) gain at 0 dB >= 3 dB: {} [{}]", if b_ok { "PASS" } else { "FAIL" }, gain0.join("; ")).unwrap();
    writeln!(
        log,
        "    (c) EMD-ANN >= EMD-Custom: {}{}",
        if c_ok { "PASS" } else { "FAIL" },
        if c_fail.is_empty() { String::new() } else { format!(" [{}]", c_fail.join("; ")) }
    )
    .unwrap();
    writeln!(
        log,
        "    (d) sweep trend: {}{}",
        if d_ok { "PASS" } else { "FAIL" },
        if d_fail.is_empty() { String::new() } else { format!(" [{}]", d_fail.join("; ")) }
    )
    .unwrap();
    print!("{log}");
    let pass = a_ok && b_ok && c_ok && d_ok && minutes < 30.0 && !quick;
    verdict(
        pass,
        format!(
            "{}table4 + sweep in {minutes:.1} min; (a) {} (b) {} (c) {} (d) {}",
            if quick { "QUICK MODE, not a real check; " } else { "" },
            a_ok,
            b_ok,
            c_ok,
            d_ok
        ),
    )
}

fn c10_determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("tiny.toml");
    std::fs::write(&cfg_path, include_str!("common_tiny.toml").replace("experiments = [\"table4\", \"sweep\"]", "experiments = [\"table3\", \"table4\", \"sweep\"]")).unwrap();
    let run = |out: &str| {
        let status = Command::new(env!("CARGO_BIN_EXE_emdenoise"))
            .args(["bench", "--config", cfg_path.to_str().unwrap(), "--output", dir.path().join(out).to_str().unwrap()])
            .status()
            .unwrap();
        assert!(status.success());
    };
    run("a");
    run("b");
    let mut identical = true;
    for name in ["table3.csv", "table4.csv", "sweep.csv"] {
        identical &= std::fs::read(dir.path().join("a").join(name)).unwrap() == std::fs::read(dir.path().join("b").join(name)).unwrap();
    }

    let cfg = RunConfig::from_toml(include_str!("common_tiny.toml")).unwrap();
    let spec = cfg.train_spec().unwrap();
    let cycles: Vec<Signal> = (0..2)
        .map(|s| synth_breath_cycle(&BreathSpec { cycle_seconds: 0.5, seed: s, ..BreathSpec::default() }, 4000).unwrap())
        .collect();
    let data = make_dataset(&cycles, &spec, &cfg.sift().unwrap()).unwrap();
    let (model, _) = emdenoise_core::train::fit(&data, &spec).unwrap();
    let path = dir.path().join("m.json");
    save_model(&model, None, &path).unwrap();
    let back = load_model(&path).unwrap();
    let same_outputs = data.inputs.iter().all(|r| model.forward(r).unwrap().to_bits() == back.forward(r).unwrap().to_bits());
    verdict(
        identical && same_outputs,
        format!(
            "bench rerun CSVs byte-identical {identical}; reloaded model forward outputs bit-identical on {} rows {same_outputs}",
            data.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("1  EMD conservation", c1_conservation),
        ("2  IMF validity", c2_imf_validity),
        ("3  threshold closed forms", c3_threshold_closed_forms),
        ("4  universal threshold", c4_universal_threshold),
        ("5  noise calibration", c5_noise_calibration),
        ("6  gradient correctness", c6_gradients),
        ("7  LM sanity", c7_lm_sanity),
        ("8  metrics", c8_metrics),
        ("9  end-to-end direction", c9_end_to_end),
        ("10 determinism and persistence", c10_determinism),
    ];
    let only = std::env::args().nth(1).filter(|a| !a.starts_with('-'));
    let mut failed = 0;
    for (name, f) in criteria {
        if only.as_deref().is_some_and(|o| !name.contains(o)) {
            continue;
        }
        let start = Instant::now();
        let v = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            verdict(false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        println!(
            "criterion {name}: {} ({:.1} s) {}",
            if v.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            v.detail
        );
        failed += usize::from(!v.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion/criteria failed");
        ExitCode::FAILURE
    }
}
