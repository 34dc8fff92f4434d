//! Acceptance suite: one `[PASS]`/`[FAIL]`/`[SKIP]` line per criterion.
//!
//! Runs under `cargo test` (release-level optimisation is set for the test
//! profile). `HYPERSR_EXTENDED=1` enables the long gMR case 2/3 recoveries.
//! `HYPERSR_STRICT=1` makes any failure a nonzero exit.

mod common;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use hypersr::cli::{self, FitReport};
use hypersr::data::{self, GmrParameters, ThermalGmr, TEST_TEMPERATURES, TRAIN_TEMPERATURES};
use hypersr::expr::Node;
use hypersr::gp::{self, GpConfig, Preset};
use hypersr::mechanics::{self, InvariantPoint, LoadingMode, DEFAULT_FD_STEP};
use hypersr::{fitness, Dataset, ExpressionTree};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// MAE [MPa] of the published Treloar energy on `data/treloar.csv`, frozen
/// as the regression baseline for criterion 5.
const TRELOAR_M0: f64 = 0.09213854375357447;
const TRELOAR_EXPRESSION: &str = "sqrt(0.93296 * exp(0.080316 * I1bar) + sqrt(I1bar - 0.080316) \
                                  + (0.0232113 * I1bar + 0.021633) * I1bar)";

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn manifest_path(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn case_preset(case: u8) -> Preset {
    match case {
        1 => Preset::GmrCase1,
        2 => Preset::GmrCase2,
        _ => Preset::GmrCase3,
    }
}

fn env_flag(name: &str) -> bool {
    std::env::var(name).is_ok_and(|v| !v.is_empty() && v != "0")
}

fn fit_seeds(ds: &Dataset, cfg: &GpConfig, seeds: usize) -> Vec<FitReport> {
    let dir = tempfile::tempdir().expect("tempdir");
    let (reports, _) = cli::fit_dataset(ds, cfg, dir.path(), seeds, Some(0)).expect("fit runs");
    reports
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(", ")
}

fn derivative_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for case in 1..=3 {
        let p = GmrParameters::case(case).unwrap();
        let tree = ExpressionTree::parse(&p.to_expression(), &["I1bar".into(), "I2bar".into(), "J".into()])
            .unwrap();
        for _ in 0..100 {
            let ip = InvariantPoint::new(rng.random_range(3.0..12.0), rng.random_range(3.0..12.0), 1.0);
            let (a1, a2) = data::gmr_derivatives(&p, &ip);
            let direct = mechanics::energy_derivatives(
                |q, _| data::gmr_energy(&p, q),
                ip,
                &[],
                DEFAULT_FD_STEP,
            );
            let via_tree = fitness::energy_derivatives_of(&tree, ip, &[], DEFAULT_FD_STEP);
            for ed in [direct, via_tree] {
                worst = worst
                    .max((ed.d_i1 - a1).abs() / a1.abs())
                    .max((ed.d_i2 - a2).abs() / a2.abs());
            }
        }
    }
    check(worst <= 1e-6, format!("max relative error {worst:.2e} over 3 cases x 100 points"))
}

fn stress_oracle() -> Outcome {
    let p = GmrParameters::case(1).unwrap();
    let expected = [(LoadingMode::UT, 1.89), (LoadingMode::PS, 2.25), (LoadingMode::EBT, 3.78)];
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for (mode, want) in expected {
        let ip = mechanics::mode_invariants(mode, 2.0).unwrap();
        let (d1, d2) = data::gmr_derivatives(&p, &ip);
        let ed = mechanics::EnergyDerivatives {
            psi: data::gmr_energy(&p, &ip),
            d_i1: d1,
            d_i2: d2,
            d_j: 0.0,
        };
        let got = mechanics::nominal_stress(&ed, mode, 2.0).unwrap();
        worst = worst.max((got - want).abs());
        parts.push(format!("{mode}={got:.12}"));
    }
    check(worst <= 1e-9, format!("{} (max deviation {worst:.1e})", parts.join(" ")))
}

/// True when the expression, with constants folded and rounded to two
/// decimals, differs from the case-1 energy only by an additive constant.
fn rounds_to_case1(expression: &str) -> bool {
    let vars: Vec<String> = ["I1bar", "I2bar", "J"].map(String::from).to_vec();
    let Ok(tree) = ExpressionTree::parse(expression, &vars) else {
        return false;
    };
    let rounded = common::fold_and_round(&tree, 2);
    let p = GmrParameters::case(1).unwrap();
    let offset = rounded.evaluate(&[3.0, 3.0, 1.0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    (0..200).all(|_| {
        let (i1, i2) = (rng.random_range(3.0..10.0), rng.random_range(3.0..10.0));
        let got = rounded.evaluate(&[i1, i2, 1.0]).unwrap() - offset;
        let want = data::gmr_energy(&p, &InvariantPoint::new(i1, i2, 1.0));
        (got - want).abs() <= 1e-9 * want.abs().max(1.0)
    })
}

fn case1_recovery() -> Outcome {
    let ds = data::default_benchmark(&GmrParameters::case(1).unwrap()).unwrap();
    let reports = fit_seeds(&ds, &GpConfig::preset(Preset::GmrCase1), 5);
    let maes: Vec<f64> = reports.iter().map(|r| r.lowest_raw_fitness).collect();
    let hits = maes.iter().filter(|&&m| m <= 1e-3).count();
    let best = reports
        .iter()
        .min_by(|a, b| a.lowest_raw_fitness.total_cmp(&b.lowest_raw_fitness))
        .unwrap();
    let identity = rounds_to_case1(&best.lowest_raw_expression);
    check(
        hits >= 3 && identity,
        format!(
            "{hits}/5 seeds with MAE <= 0.001 (need 3), lowest MAE per seed [{}], best run rounds to case-1 energy: {identity}",
            fmt_list(&maes)
        ),
    )
}

fn cases_2_3_recovery() -> Outcome {
    if !env_flag("HYPERSR_EXTENDED") {
        return Outcome::Skip("extended suite; set HYPERSR_EXTENDED=1 to run".into());
    }
    let mut ok = true;
    let mut parts = Vec::new();
    for case in [2u8, 3] {
        let ds = data::default_benchmark(&GmrParameters::case(case).unwrap()).unwrap();
        let reports = fit_seeds(&ds, &GpConfig::preset(case_preset(case)), 5);
        let maes: Vec<f64> = reports.iter().map(|r| r.lowest_raw_fitness).collect();
        let best = maes.iter().copied().fold(f64::INFINITY, f64::min);
        ok &= best <= 0.01;
        parts.push(format!("case {case}: best-of-5 MAE {best:.2e} [{}]", fmt_list(&maes)));
    }
    check(ok, format!("{} (limit 1.0e-2)", parts.join("; ")))
}

fn treloar() -> Outcome {
    let ds = data::load_csv(manifest_path("data/treloar.csv")).unwrap();
    let m0 = cli::evaluate_expression(TRELOAR_EXPRESSION, &ds, DEFAULT_FD_STEP).unwrap().mae;
    if !m0.is_finite() || (m0 - TRELOAR_M0).abs() > 1e-12 {
        return Outcome::Fail(format!("published energy MAE {m0} drifted from frozen {TRELOAR_M0}"));
    }
    let reports = fit_seeds(&ds, &GpConfig::preset(Preset::Treloar), 5);
    let maes: Vec<f64> = reports.iter().map(|r| r.raw_fitness).collect();
    let best = reports
        .iter()
        .min_by(|a, b| a.raw_fitness.total_cmp(&b.raw_fitness))
        .unwrap();
    let ebt = ds.filter(|p| p.mode == LoadingMode::EBT).unwrap();
    let ebt_mae = cli::evaluate_expression(&best.best_expression, &ebt, DEFAULT_FD_STEP)
        .unwrap()
        .mae;
    let limit = 1.1 * TRELOAR_M0;
    check(
        best.raw_fitness <= limit,
        format!(
            "M0 {m0:.5}, best-of-5 MAE {:.5} (limit {limit:.5}) [{}]; best model EBT-only MAE {ebt_mae:.4} (unconstrained)",
            best.raw_fitness,
            fmt_list(&maes)
        ),
    )
}

fn temperature_interpolation() -> Outcome {
    let material = ThermalGmr::default();
    let stretches = data::linspace(1.0, 3.0, 20);
    let train = material.dataset(&TRAIN_TEMPERATURES, &stretches).unwrap();
    let test = material.dataset(&TEST_TEMPERATURES, &stretches).unwrap();
    let cfg = GpConfig::preset(Preset::Hytrel);
    let result = gp::run(&cfg, &train).unwrap();
    let text = result.best_ever.tree.to_infix(&result.variables);
    let train_mae = cli::evaluate_expression(&text, &train, cfg.fd_step).unwrap().mae;
    let test_mae = cli::evaluate_expression(&text, &test, cfg.fd_step).unwrap().mae;
    check(
        test_mae.is_finite() && test_mae <= 2.0 * train_mae,
        format!("train MAE {train_mae:.5}, held-out MAE {test_mae:.5} (limit 2x train), model {text}"),
    )
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_hypersr");
    let dir = tempfile::tempdir().unwrap();
    let data_path = dir.path().join("case1.csv");
    let status = Command::new(bin)
        .args(["generate", "--case", "1", "--out"])
        .arg(&data_path)
        .output()
        .unwrap()
        .status;
    if !status.success() {
        return Outcome::Fail("generate failed".into());
    }
    let config = manifest_path("data/configs/quick.json");
    let mut traces = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("threads{threads}"));
        let output = Command::new(bin)
            .env(cli::THREADS_ENV, threads)
            .args(["fit", "--seed", "7", "--data"])
            .arg(&data_path)
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap();
        if !output.status.success() {
            return Outcome::Fail(format!("fit failed: {}", String::from_utf8_lossy(&output.stderr)));
        }
        let text = std::fs::read_to_string(out.join("report_seed7.json")).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        traces.push(serde_json::to_string(&value["fitness_trace"]).unwrap());
    }
    check(
        traces[0] == traces[1] && traces[0].len() > 2,
        format!(
            "HYPERSR_THREADS=1 vs 4: traces {} ({} bytes)",
            if traces[0] == traces[1] { "byte-identical" } else { "differ" },
            traces[0].len()
        ),
    )
}

fn operator_fuzz() -> Outcome {
    const ITERS: usize = 100_000;
    let fs = common::full_function_set(1);
    let n_vars = fs.variables().len();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut violations: Vec<String> = Vec::new();
    let mut note = |name: &str, msg: String| {
        if violations.len() < 5 {
            violations.push(format!("{name}: {msg}"));
        }
    };
    let mut tally = [0usize; 4];

    for _ in 0..ITERS {
        let parent = common::random_parent(&fs, &mut rng);
        let donor = common::random_parent(&fs, &mut rng);

        let child = gp::crossover(&parent, &donor, &mut rng);
        let ok = child.validate(n_vars).is_ok()
            && common::splice_decompositions(&parent, &child).iter().any(|(s, e, ins)| {
                common::subtrees(&donor).any(|d| d == *ins)
                    && child.size() == parent.size() - (e - s) + ins.len()
            });
        if !ok {
            note("crossover", child.to_infix(fs.variables()));
        }
        tally[0] += ok as usize;

        let child = gp::subtree_mutation(&parent, &fs, (2, 6), &mut rng);
        let ok = child.validate(n_vars).is_ok()
            && common::splice_decompositions(&parent, &child).iter().any(|(_, _, ins)| {
                ExpressionTree::from_nodes(ins.to_vec())
                    .is_ok_and(|t| matches!(t.nodes()[0], Node::Op(_)) && t.depth() <= 6)
            });
        if !ok {
            note("subtree", child.to_infix(fs.variables()));
        }
        tally[1] += ok as usize;

        let child = gp::hoist_mutation(&parent, &mut rng);
        let ok = child.validate(n_vars).is_ok()
            && child.size() <= parent.size()
            && common::splice_decompositions(&parent, &child).iter().any(|(s, e, ins)| {
                (*s..*e).any(|i| parent.nodes()[i..parent.subtree_end(i)] == **ins)
            });
        if !ok {
            note("hoist", child.to_infix(fs.variables()));
        }
        tally[2] += ok as usize;

        let child = gp::point_mutation(&parent, &fs, &mut rng);
        let ok = child.validate(n_vars).is_ok()
            && child.size() == parent.size()
            && parent.nodes().iter().zip(child.nodes()).all(|(a, b)| {
                a.arity() == b.arity() && std::mem::discriminant(a) == std::mem::discriminant(b)
            });
        if !ok {
            note("point", child.to_infix(fs.variables()));
        }
        tally[3] += ok as usize;
    }
    let clean = tally.iter().all(|&t| t == ITERS);
    let mut detail = format!(
        "{ITERS} iterations each; well-formed/structural passes crossover {} subtree {} hoist {} point {}",
        tally[0], tally[1], tally[2], tally[3]
    );
    if !violations.is_empty() {
        detail.push_str(&format!("; first violations: {}", violations.join(" | ")));
    }
    check(clean, detail)
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("derivative oracle", derivative_oracle),
        ("stress oracle", stress_oracle),
        ("model recovery, gMR case 1", case1_recovery),
        ("model recovery, gMR cases 2 and 3", cases_2_3_recovery),
        ("Treloar fit vs published energy", treloar),
        ("temperature interpolation", temperature_interpolation),
        ("determinism across thread counts", determinism),
        ("variation operator fuzz", operator_fuzz),
    ];
    let mut failed = Vec::new();
    let mut passed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Outcome::Pass(d) => {
                passed += 1;
                ("PASS", d)
            }
            Outcome::Fail(d) => {
                failed.push(i + 1);
                ("FAIL", d)
            }
            Outcome::Skip(d) => ("SKIP", d),
        };
        println!("[{tag}] {}. {name}: {detail} ({secs:.1}s)", i + 1);
    }
    println!(
        "acceptance: {passed} passed, {} failed{}",
        failed.len(),
        if failed.is_empty() {
            String::new()
        } else {
            format!(" (criteria {failed:?})")
        }
    );
    if !failed.is_empty() && env_flag("HYPERSR_STRICT") {
        std::process::exit(1);
    }
}
