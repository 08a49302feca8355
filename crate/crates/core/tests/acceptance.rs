//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::{FRAC_PI_4, TAU};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use teleport_core::channels::{
    audit_channel, cube_grid, entry_verdict, oracle_density, write_audit_csv, ChannelKind,
    ChannelRealization, DensityForm, AMBIGUOUS_ENTRIES, KNOWN_TABLE_DISCREPANCIES,
};
use teleport_core::experiments::{
    audit_formulas, compare_channels, figure_config, figure_panels, summarize, sweep, AuditConfig,
    R0Choice, RGrid, SweepConfig,
};
use teleport_core::protocol::{
    enumerate_branches, run_branch, BellOutcome, CharlieOutcome, InfoKind, InfoQubit,
    PrintedFormula,
};
use teleport_core::qmath::Complex64;
use teleport_core::rindler::{AccelerationParam, RegisterAcceleration};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

type Check = fn() -> Outcome;

fn grid9() -> Vec<f64> {
    RGrid::new(0.0, FRAC_PI_4, 0.1).unwrap().points()
}

fn random_complex_info(rng: &mut ChaCha8Rng, r0: Option<AccelerationParam>) -> InfoQubit {
    let theta: f64 = rng.random_range(0.0..std::f64::consts::PI);
    let (pa, pb): (f64, f64) = (rng.random_range(0.0..TAU), rng.random_range(0.0..TAU));
    let alpha = Complex64::from_polar((theta / 2.0).cos(), pa);
    let beta = Complex64::from_polar((theta / 2.0).sin(), pb);
    let n = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
    InfoQubit::new(alpha / n, beta / n, r0).unwrap()
}

fn random_real_amplitudes(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let theta: f64 = rng.random_range(0.0..TAU);
    (theta.cos(), theta.sin())
}

fn at_rest(kind: ChannelKind) -> ChannelRealization {
    ChannelRealization::new(kind, RegisterAcceleration::at_rest(3)).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let cube = cube_grid(&grid9());
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    let mut bad = 0;
    for kind in ChannelKind::ALL {
        for point in &cube {
            let acc = RegisterAcceleration::from_values(point).unwrap();
            let v = oracle_density(kind, &acc).unwrap().validity();
            worst.0 = worst.0.max(v.hermitian_deviation);
            worst.1 = worst.1.min(v.min_eigenvalue);
            worst.2 = worst.2.max((v.trace - Complex64::new(1.0, 0.0)).norm());
            if !v.is_state(1e-10) {
                bad += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        bad == 0 && elapsed < Duration::from_secs(10),
        format!(
            "{} densities, {bad} invalid; max hermitian dev {:.1e}, min eigenvalue {:.1e}, max trace err {:.1e}; {:.2?}",
            3 * cube.len(),
            worst.0,
            worst.1,
            worst.2,
            elapsed
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut checked = 0;
    for _ in 0..20 {
        let info = random_complex_info(&mut rng, None);
        for kind in ChannelKind::ALL {
            for eval in enumerate_branches(&at_rest(kind), &info, DensityForm::Oracle).unwrap() {
                if let Some(res) = eval.result().filter(|r| r.valid) {
                    worst = worst.max((res.fidelity_oracle - 1.0).abs());
                    checked += 1;
                }
            }
        }
    }
    Outcome::new(
        worst <= 1e-12,
        format!("{checked} valid branches, max |F - 1| = {worst:.1e}"),
    )
}

fn criterion_3() -> Outcome {
    let found = audit_channel(ChannelKind::Ghz, &cube_grid(&grid9()), 1e-10).unwrap();
    let uncatalogued = found
        .iter()
        .filter(|d| !KNOWN_TABLE_DISCREPANCIES.contains(&(d.kind, d.row, d.col)))
        .count();
    let max = found.iter().map(|d| d.abs_diff).fold(0.0, f64::max);
    Outcome::new(
        uncatalogued == 0,
        format!(
            "{} GHZ entries off by > 1e-10 ({uncatalogued} uncatalogued), max diff {max:.1e}",
            found.len()
        ),
    )
}

fn channel_audit_bytes(cube: &[[f64; 3]]) -> Vec<u8> {
    let mut rows = audit_channel(ChannelKind::W, cube, 1e-10).unwrap();
    rows.extend(audit_channel(ChannelKind::GhzLike, cube, 1e-10).unwrap());
    let mut buf = Vec::new();
    write_audit_csv(&mut buf, &rows).unwrap();
    buf
}

fn criterion_4() -> Outcome {
    let cube = cube_grid(&grid9());
    let first = channel_audit_bytes(&cube);
    let second = channel_audit_bytes(&cube);
    let text = String::from_utf8(first.clone()).unwrap();
    let w77 = text.lines().filter(|l| l.starts_with("w,7,7,")).count();
    let mut verdicts = Vec::new();
    for &(kind, row, col) in AMBIGUOUS_ENTRIES
        .iter()
        .filter(|e| e.0 == ChannelKind::GhzLike)
    {
        let v = entry_verdict(kind, row, col, &cube, 1e-10).unwrap();
        verdicts.push(format!(
            "({row},{col}) {}",
            if v.confirmed { "confirmed" } else { "mismatch" }
        ));
    }
    let out = target_dir().join("channel_audit.csv");
    fs::write(&out, &first).unwrap();
    Outcome::new(
        w77 > 0 && first == second && verdicts.len() == 4,
        format!(
            "{} discrepancy rows, {w77} at W (7,7), byte-stable {}, GHZ-like {}",
            text.lines().count() - 1,
            first == second,
            verdicts.join(", ")
        ),
    )
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let cfg = figure_config(RGrid::default(), 0.5, &[0.1, 0.4, 0.7]).unwrap();
    let records = sweep(&cfg).unwrap();
    let panels = figure_panels(&records);
    let n = RGrid::default().points().len();

    let shapes_ok = panels.len() == 6
        && panels
            .iter()
            .all(|p| p.rows.len() == if p.name.ends_with('a') { 2 * n } else { 3 * n });

    let mut start_ok = true;
    let mut r0_order_ok = true;
    for p in &panels {
        let at_zero: Vec<f64> = p
            .rows
            .iter()
            .filter(|r| r.r == 0.0)
            .map(|r| r.fidelity.unwrap_or(f64::NAN))
            .collect();
        if p.name.ends_with('a') {
            start_ok &= at_zero.len() == 2 && at_zero.iter().all(|f| (f - 1.0).abs() <= 1e-12);
        } else {
            r0_order_ok &= at_zero.len() == 3 && at_zero.windows(2).all(|w| w[1] < w[0]);
        }
    }

    let summary = summarize(&records).unwrap();
    let elapsed = start.elapsed();
    let pass = shapes_ok
        && start_ok
        && summary.monotonicity_violations.is_empty()
        && summary.ordering_violations.is_empty()
        && r0_order_ok
        && elapsed < Duration::from_secs(30);
    Outcome::new(
        pass,
        format!(
            "shapes {shapes_ok}, (a) start at 1 {start_ok}, (b) {} rises, (c) {} na<ac points, (d) r0 ordering {r0_order_ok}; {:.2?}",
            summary.monotonicity_violations.len(),
            summary.ordering_violations.len(),
            elapsed
        ),
    )
}

fn criterion_6() -> Outcome {
    let base = SweepConfig {
        alpha_sq: 0.5,
        ..SweepConfig::default()
    };
    let na = compare_channels(&SweepConfig {
        info_kinds: vec![InfoKind::NonAccelerated],
        ..base.clone()
    })
    .unwrap();
    let ac = compare_channels(&SweepConfig {
        info_kinds: vec![InfoKind::Accelerated],
        r0_values: vec![R0Choice::Fixed(AccelerationParam::new(0.4).unwrap())],
        ..base
    })
    .unwrap();
    let report = format!("{}\n{}", na.report_string(), ac.report_string());
    fs::write(target_dir().join("comparison.txt"), &report).unwrap();

    let mut parts = Vec::new();
    let mut pass = true;
    for (label, summary) in [("na", &na), ("ac r0=0.4", &ac)] {
        let g = &summary.groups[0];
        let mins: Vec<String> = g
            .stats
            .iter()
            .map(|s| format!("{}={:.5}", s.channel.tag(), s.min))
            .collect();
        let listed = g
            .ghz_exceptions
            .iter()
            .all(|e| report.contains(&teleport_core::report::format_f64(e.ghz)));
        pass &= g.ghz_minimum_exceeds && listed;
        parts.push(format!(
            "{label}: minima {}, {} pointwise exceptions",
            mins.join(" "),
            g.ghz_exceptions.len()
        ));
    }
    Outcome::new(pass, parts.join("; "))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let (a, b) = random_real_amplitudes(&mut rng);
        for f in PrintedFormula::ALL {
            worst = worst.max((f.evaluate([0.0; 4], a, b) - 1.0).abs());
        }
    }
    let config = AuditConfig::default();
    let first = audit_formulas(&config).unwrap();
    let bytes = first.report_bytes();
    let again = audit_formulas(&config).unwrap().report_bytes();
    let path = target_dir().join("formula_audit.csv");
    fs::write(&path, &bytes).unwrap();
    let confirmed: Vec<&str> = first
        .formulas
        .iter()
        .filter(|v| v.confirmed)
        .map(|v| v.formula.tag())
        .collect();
    let complete = first.formulas.len() == PrintedFormula::ALL.len()
        && first
            .formulas
            .iter()
            .all(|v| v.worst.r.iter().all(|r| r.is_finite()) && v.max_abs_diff.is_finite());
    Outcome::new(
        worst <= 1e-12 && bytes == again && complete,
        format!(
            "max |F(0) - 1| = {worst:.1e}, report byte-stable {}, confirmed [{}] of 8, written to {}",
            bytes == again,
            confirmed.join(" "),
            path.display()
        ),
    )
}

fn criterion_8() -> Outcome {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let direct = PrintedFormula::WNonAccelerated.evaluate([0.0, 0.5, 0.5, 0.5], h, h);
    let (c, s) = (0.5f64.cos(), 0.5f64.sin());
    let by_hand = 0.25 * c.powi(4) + 0.5 * c * c * s * s + 0.5 * c.powi(4) + 0.25 * c.powi(4);
    let channel = ChannelRealization::new(
        ChannelKind::W,
        RegisterAcceleration::uniform(3, AccelerationParam::new(0.5).unwrap()),
    )
    .unwrap();
    let info = InfoQubit::from_alpha_sq(0.5, None).unwrap();
    let res = run_branch(
        &channel,
        &info,
        BellOutcome::PsiPlus,
        CharlieOutcome::Z0,
        DensityForm::Oracle,
    )
    .unwrap();
    let closed = res.fidelity_closed.unwrap();
    let pass =
        (closed - 0.6816).abs() <= 5e-4 && (direct - by_hand).abs() <= 1e-14 && closed == direct;
    Outcome::new(
        pass,
        format!(
            "closed form {closed:.6} (hand expansion {by_hand:.6}), 16-dim oracle {:.6}",
            res.fidelity_oracle
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let r: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..=FRAC_PI_4)).collect();
        let acc = RegisterAcceleration::from_values(&r).unwrap();
        let r0 = rng
            .random_bool(0.5)
            .then(|| AccelerationParam::new(rng.random_range(0.0..=FRAC_PI_4)).unwrap());
        let info = random_complex_info(&mut rng, r0);
        for kind in ChannelKind::ALL {
            let channel = ChannelRealization::new(kind, acc.clone()).unwrap();
            let total: f64 = enumerate_branches(&channel, &info, DensityForm::Oracle)
                .unwrap()
                .iter()
                .map(|b| b.probability())
                .sum();
            worst = worst.max((total - 1.0).abs());
        }
    }
    Outcome::new(
        worst <= 1e-10,
        format!("300 enumerations, max |sum p - 1| = {worst:.1e}"),
    )
}

fn target_dir() -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn main() -> ExitCode {
    let checks: [(&str, Check); 9] = [
        ("validity suite", criterion_1),
        ("zero-acceleration exactness", criterion_2),
        ("GHZ table confirmation", criterion_3),
        ("W/GHZ-like table audit", criterion_4),
        ("figure shapes", criterion_5),
        ("GHZ optimality", criterion_6),
        ("closed-form fidelity audit", criterion_7),
        ("W spot value", criterion_8),
        ("probability completeness", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let outcome = check();
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {}: {tag} {name}: {}", i + 1, outcome.detail);
        failed += usize::from(!outcome.pass);
    }
    println!(
        "{} of {} criteria passed",
        checks.len() - failed,
        checks.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
