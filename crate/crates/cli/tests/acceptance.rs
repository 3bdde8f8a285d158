//! Acceptance suite: nine criteria run in order, one PASS/FAIL line each,
//! with the wall-clock limit checked per criterion. Exits nonzero if any
//! criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, ExitCode, Output};
use std::time::{Duration, Instant};

use eoa_core::bounds::*;
use eoa_core::ensembles::*;
use eoa_core::magic::*;
use eoa_core::matcore::{herm_eigenvalues, random_unitary, ComplexMatrix};
use eoa_core::quantum::*;
use serde_json::Value;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn h2(x: f64) -> f64 {
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    term(x) + term(1.0 - x)
}

/// Probability vector of length `n` with `rank` nonzero entries, from the
/// squared moduli of a seeded unitary column.
fn spectrum(n: usize, rank: usize, seed: u64) -> Vec<f64> {
    let col = random_unitary(rank, seed).unwrap().column(0);
    let mut w: Vec<f64> = col.iter().map(|z| z.norm_sqr() + 1e-3).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w.resize(n, 0.0);
    w
}

fn random_state(dims: BipartiteDims, rank: usize, seed: u64) -> DensityMatrix {
    let n = dims.total();
    let u = random_unitary(n, seed.wrapping_mul(31).wrapping_add(7)).unwrap();
    let d = ComplexMatrix::from_real_diag(&spectrum(n, rank, seed));
    DensityMatrix::new(dims, &(&u * &d) * &u.adjoint()).unwrap()
}

fn random_pure(dims: BipartiteDims, seed: u64) -> PureState {
    PureState::normalized(dims, random_unitary(dims.total(), seed).unwrap().column(0)).unwrap()
}

fn criterion_1() -> Check {
    let (target, e, _) = appendix_ensemble().map_err(|e| e.to_string())?;
    let q = BipartiteDims::qubits();
    let rho = diag_third();
    let expected = regroup(&rho.matrix().kron(rho.matrix()), q, q).unwrap();
    ensure(target.matrix().max_abs_diff(expected.matrix()) == 0.0, || "target differs from regroup(ρ⊗ρ)".into())?;
    let residual = ensemble_density(&e).matrix().max_abs_diff(expected.matrix());
    ensure(residual < 1e-10, || format!("residual {residual:e}"))?;
    let worst_norm = e
        .members()
        .iter()
        .map(|m| (m.state.amplitudes().iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    ensure(worst_norm <= 1e-12, || format!("member norm off by {worst_norm:e}"))?;
    let psum: f64 = e.members().iter().map(|m| m.p).sum();
    ensure((psum - 1.0).abs() <= 1e-12, || format!("Σp = {psum}"))?;
    Ok(format!("residual {residual:.1e}, norm defect {worst_norm:.1e}, |Σp−1| {:.1e}", (psum - 1.0).abs()))
}

fn criterion_2() -> Check {
    let (_, e, spec) = appendix_ensemble().map_err(|e| e.to_string())?;
    let (ea, eb, eg) = spec.member_entanglements().map_err(|e| e.to_string())?;
    let avg = spec.average_entanglement().map_err(|e| e.to_string())?;
    // The same values measured on the constructed states.
    let measured: Vec<f64> = e.members().iter().map(|m| pure_entanglement(&m.state)).collect();
    let groups = [(0..4, ea), (4..6, eb), (6..12, eg)];
    for (range, closed) in groups {
        for k in range {
            ensure((measured[k] - closed).abs() < 1e-10, || format!("member {k}: {} vs {closed}", measured[k]))?;
        }
    }
    ensure((average_entanglement(&e) - avg).abs() < 1e-12, || "ensemble average disagrees".into())?;
    for (name, got, printed) in [("E_α", ea, 1.8824), ("E_β", eb, 1.1834), ("E_γ", eg, 1.4605), ("E(ℰ)", avg, 1.5506)] {
        ensure((got - printed).abs() <= 5e-4, || format!("{name} = {got}, expected {printed}"))?;
    }
    Ok(format!("E_α {ea:.6}, E_β {eb:.6}, E_γ {eg:.6}, E {avg:.6}"))
}

fn criterion_3() -> Check {
    let r = verify_superadditivity().map_err(|e| e.to_string())?;
    let excess = r.ensemble_value - 4.0 / 3.0;
    ensure(excess >= 0.21, || format!("ensemble_value − 4/3 = {excess}"))?;
    ensure(r.superadditive, || "superadditive = false".into())?;
    ensure((r.additive_value - 4.0 / 3.0).abs() < 1e-9, || format!("additive_value {}", r.additive_value))?;
    Ok(format!("ensemble {:.6} − 4/3 = {excess:.6}, superadditive", r.ensemble_value))
}

fn criterion_4() -> Check {
    let rho = diag_third();
    let d = diagonal_lower_bound(&rho).map_err(|e| e.to_string())?;
    let f = fidelity_bound(&rho).map_err(|e| e.to_string())?;
    let report = bounds_report(&rho).map_err(|e| e.to_string())?;
    let s = entropic_bound(&rho).map_err(|e| e.to_string())?;
    let third = 2.0 / 3.0;
    ensure((d - third).abs() <= 1e-9, || format!("diagonal_lower {d}"))?;
    ensure((f - third).abs() <= 1e-9, || format!("fidelity_upper {f}"))?;
    let exact = report.exact_value.ok_or("exact_value missing")?;
    ensure((exact - third).abs() <= 1e-9, || format!("exact_value {exact}"))?;
    ensure((s - h2(1.0 / 3.0)).abs() <= 1e-6, || format!("entropic {s}"))?;
    ensure((s - 0.9183).abs() <= 1e-4, || format!("entropic {s} vs 0.9183"))?;
    Ok(format!("lower {d:.12}, fidelity {f:.12}, exact {exact:.12}, entropic {s:.6}"))
}

fn criterion_5() -> Check {
    let mut worst: f64 = 0.0;
    for k in 1..=19 {
        let alpha = 0.05 * k as f64;
        let rho = DensityMatrix::diagonal(BipartiteDims::qubits(), &[alpha, 0.0, 0.0, 1.0 - alpha]).unwrap();
        let r = bounds_report(&rho).map_err(|e| e.to_string())?;
        let exact = r.exact_value.ok_or_else(|| format!("α = {alpha}: bounds do not meet"))?;
        let err = (exact - h2(alpha)).abs();
        ensure(err <= 1e-9, || format!("α = {alpha}: {exact} vs {}", h2(alpha)))?;
        worst = worst.max(err);
    }
    Ok(format!("19 values, worst error {worst:.1e}"))
}

fn criterion_6() -> Check {
    let cfg = OptimizerConfig::default();
    let q = BipartiteDims::qubits();
    let third = optimize(&diag_third(), &cfg).map_err(|e| e.to_string())?.best_value;
    ensure((2.0 / 3.0 - 1e-3..=2.0 / 3.0 + 1e-6).contains(&third), || format!("Diagonal[⅓,⅓,⅓,0]: {third}"))?;
    let bell_mix = DensityMatrix::diagonal(q, &[0.5, 0.0, 0.0, 0.5]).unwrap();
    let bell = optimize(&bell_mix, &cfg).map_err(|e| e.to_string())?.best_value;
    ensure(bell >= 1.0 - 1e-3, || format!("Bell mixture: {bell}"))?;
    let mut worst = f64::INFINITY;
    for seed in 0..10 {
        let w = spectrum(4, 4, 1000 + seed);
        let rho = DensityMatrix::new(q, magic_mixture([w[0], w[1], w[2], w[3]])).unwrap();
        let v = optimize(&rho, &cfg).map_err(|e| e.to_string())?.best_value;
        ensure(v >= 1.0 - 1e-3, || format!("magic mixture {w:?}: {v}"))?;
        worst = worst.min(v);
    }
    Ok(format!("⅓-diagonal {third:.9}, Bell mixture {bell:.9}, magic mixtures ≥ {worst:.9}"))
}

fn criterion_7() -> Check {
    let (target, _, _) = appendix_ensemble().map_err(|e| e.to_string())?;
    ensure(target.rank().unwrap() == 9, || "two-copy state should have rank 9".into())?;
    let cfg = OptimizerConfig {
        seed: 1,
        restarts: 8,
        ..Default::default()
    };
    let r = optimize(&target, &cfg).map_err(|e| e.to_string())?;
    ensure(r.best_value >= 1.45, || format!("best {}", r.best_value))?;
    ensure(r.best_value > 4.0 / 3.0 + 0.11, || format!("best {}", r.best_value))?;
    let residual = ensemble_density(&r.best_ensemble).matrix().max_abs_diff(target.matrix());
    ensure(residual < 1e-8, || format!("ensemble residual {residual:e}"))?;
    Ok(format!(
        "best {:.6} (restart {}, m = {}, {} members), residual {residual:.1e}",
        r.best_value,
        r.best_restart,
        r.ensemble_size,
        r.best_ensemble.len()
    ))
}

fn criterion_8() -> Check {
    let q = BipartiteDims::qubits();
    let shapes = [(2, 2), (2, 3), (3, 2), (3, 3)];

    // HJW closure.
    let mut worst_hjw: f64 = 0.0;
    for seed in 0..100u64 {
        let (a, b) = shapes[seed as usize % 4];
        let dims = BipartiteDims::new(a, b).unwrap();
        let rank = 1 + (seed as usize / 4) % dims.total();
        let rho = random_state(dims, rank, seed);
        let m = rank + seed as usize % 4;
        let w = Isometry::from_unitary(&random_unitary(m, seed + 500).unwrap(), rank).unwrap();
        let e = ensemble_from_isometry(&rho, &w).map_err(|e| e.to_string())?;
        worst_hjw = worst_hjw.max(ensemble_density(&e).matrix().max_abs_diff(rho.matrix()));
    }
    ensure(worst_hjw < 1e-10, || format!("HJW residual {worst_hjw:e}"))?;

    // Tilde involution, λ₁ and pure-state fidelity.
    let (mut inv, mut lam, mut fid): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for seed in 0..100u64 {
        let rho = random_state(q, 1 + seed as usize % 4, seed);
        inv = inv.max(tilde(&tilde(rho.matrix()).unwrap()).unwrap().max_abs_diff(rho.matrix()));
        let pi = random_pure(q, seed + 10_000).projector();
        let reduced = partial_trace_matrix(&pi, q, TraceOut::B);
        let top = *herm_eigenvalues(&reduced).unwrap().last().unwrap();
        lam = lam.max((lambda1_via_tilde(&pi).unwrap() - top).abs());
        let general = fidelity_matrices(&pi, &tilde(&pi).unwrap()).unwrap();
        fid = fid.max((pure_tilde_fidelity(&pi).unwrap() - general).abs());
    }
    ensure(inv < 1e-12, || format!("tilde involution {inv:e}"))?;
    ensure(lam < 1e-9, || format!("λ₁ mismatch {lam:e}"))?;
    ensure(fid < 1e-8, || format!("pure fidelity mismatch {fid:e}"))?;

    // H₂(x) ≤ 2√(x(1−x)), equal only at 0, ½, 1.
    for k in 0..=200 {
        let x = k as f64 / 200.0;
        let (h, g) = (binary_entropy(x).unwrap(), 2.0 * (x * (1.0 - x)).sqrt());
        ensure(h <= g + 1e-12, || format!("H₂({x}) = {h} > {g}"))?;
        let equal = (g - h).abs() < 1e-12;
        ensure(equal == matches!(k, 0 | 100 | 200), || format!("equality set wrong at x = {x}"))?;
    }

    // Bound ordering.
    for seed in 0..500u64 {
        let r = bounds_report(&random_state(q, 1 + seed as usize % 4, seed + 20_000)).unwrap();
        ensure(r.eigen_lower <= r.entropic_upper + 1e-9, || format!("seed {seed}: eigen > entropic"))?;
        ensure(r.eigen_lower <= r.fidelity_upper.unwrap() + 1e-9, || format!("seed {seed}: eigen > fidelity"))?;
    }
    for seed in 0..100u64 {
        let w = spectrum(4, 1 + seed as usize % 4, seed + 30_000);
        let r = bounds_report(&DensityMatrix::diagonal(q, &w).unwrap()).unwrap();
        let d = r.diagonal_lower.unwrap();
        ensure(d <= r.entropic_upper + 1e-9 && d <= r.fidelity_upper.unwrap() + 1e-9, || format!("diagonal {w:?}"))?;
    }

    // Entropic-bound additivity (identical copies) and concavity.
    for seed in 0..100u64 {
        let rho = random_state(q, 1 + seed as usize % 4, seed + 40_000);
        let sigma = random_state(q, 4, seed + 50_000);
        let er = entropic_bound(&rho).unwrap();
        let copies = entropic_bound(&rho.tensor(&rho).unwrap()).unwrap();
        ensure((copies - 2.0 * er).abs() < 1e-9, || format!("additivity, seed {seed}"))?;
        let lambda = (seed as f64 + 0.5) / 100.0;
        let mixed = entropic_bound(&rho.mix(&sigma, lambda).unwrap()).unwrap();
        let chord = lambda * er + (1.0 - lambda) * entropic_bound(&sigma).unwrap();
        ensure(mixed >= chord - 1e-9, || format!("concavity, seed {seed}"))?;
    }

    // zero_assistance ⇔ entropic bound 0.
    let mut zeros = 0;
    for seed in 0..100u64 {
        let rho = if seed % 2 == 0 {
            let a = random_pure(BipartiteDims::new(1, 2).unwrap(), seed).projector();
            let b = random_state(BipartiteDims::new(1, 3).unwrap(), 1 + seed as usize % 3, seed).into_matrix();
            if seed % 4 == 0 {
                DensityMatrix::product(&a, &b).unwrap()
            } else {
                DensityMatrix::product(&b, &a).unwrap()
            }
        } else {
            random_state(BipartiteDims::new(2, 3).unwrap(), 1 + seed as usize % 6, seed)
        };
        let z = is_zero_assistance(&rho);
        let e = entropic_bound(&rho).unwrap();
        ensure(z == (e <= 1e-9), || format!("seed {seed}: zero_assistance {z}, entropic {e:e}"))?;
        zeros += z as usize;
    }
    ensure(zeros == 50, || format!("{zeros} of 50 product fixtures classified"))?;

    Ok(format!("HJW {worst_hjw:.1e}, involution {inv:.1e}, λ₁ {lam:.1e}, fidelity {fid:.1e}; ordering, additivity, concavity, classifier ok"))
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn eoa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eoa")).args(args).output().expect("binary runs")
}

fn eoa_json(args: &[&str]) -> Result<(Value, i32), String> {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = eoa(&all);
    let code = out.status.code().unwrap_or(-1);
    let v = serde_json::from_slice(&out.stdout).map_err(|e| format!("{args:?}: bad JSON ({e})"))?;
    Ok((v, code))
}

fn num(v: &Value, key: &str) -> Result<f64, String> {
    v["results"][key].as_f64().ok_or_else(|| format!("missing results.{key}"))
}

fn criterion_9() -> Check {
    let (v, code) = eoa_json(&["bounds", "--in", &fixture("diag_third.qdm")])?;
    ensure(code == 0, || format!("bounds exit {code}"))?;
    for (key, want, tol) in [
        ("entropic_upper", h2(1.0 / 3.0), 1e-6),
        ("fidelity_upper", 2.0 / 3.0, 1e-9),
        ("diagonal_lower", 2.0 / 3.0, 1e-9),
        ("exact_value", 2.0 / 3.0, 1e-9),
    ] {
        let got = num(&v, key)?;
        ensure((got - want).abs() <= tol, || format!("bounds {key} = {got}"))?;
    }
    let (v, code) = eoa_json(&["bounds", "--in", &fixture("diag_alpha_0.3.qdm")])?;
    ensure(code == 0 && (num(&v, "exact_value")? - h2(0.3)).abs() <= 1e-9, || "diagonal family".into())?;

    let (v, code) = eoa_json(&["tilde", "--in", &fixture("diag_third.qdm")])?;
    ensure(code == 0, || format!("tilde exit {code}"))?;
    let entries = v["results"]["entries"].as_array().ok_or("tilde entries")?;
    let third = 1.0 / 3.0;
    for (k, e) in entries.iter().enumerate() {
        let want = if k % 5 == 0 && k > 0 { third } else { 0.0 };
        let (re, im) = (e[0].as_f64().unwrap(), e[1].as_f64().unwrap());
        ensure((re - want).abs() <= 1e-10 && im.abs() <= 1e-10, || format!("tilde entry {k}: {re} {im}"))?;
    }

    let (v, code) = eoa_json(&["verify-appendix"])?;
    ensure(code == 0, || format!("verify-appendix exit {code}"))?;
    ensure((num(&v, "ensemble_value")? - 1.5506).abs() <= 5e-4, || "ensemble_value".into())?;
    ensure((num(&v, "additive_value")? - 4.0 / 3.0).abs() <= 1e-9, || "additive_value".into())?;
    ensure(v["results"]["superadditive"] == Value::Bool(true), || "superadditive".into())?;

    let (v, code) = eoa_json(&["casebook"])?;
    ensure(code == 0, || format!("casebook exit {code}: {}", v["results"]["failed"]))?;

    for (name, want) in [("bad_trace.qdm", 1), ("bad_dims.qdm", 1), ("bad_syntax.qdm", 2), ("absent.qdm", 2)] {
        let code = eoa(&["bounds", "--in", &fixture(name)]).status.code();
        ensure(code == Some(want), || format!("{name}: exit {code:?}, expected {want}"))?;
    }

    let args = ["optimize", "--in", &fixture("diag_third.qdm"), "--direction", "max", "--seed", "42"];
    let (first, second) = (eoa(&args), eoa(&args));
    ensure(first.status.code() == Some(0), || "optimize failed".into())?;
    ensure(first.stdout == second.stdout, || "optimize reports differ between runs".into())?;
    Ok("bounds, tilde, verify-appendix, casebook, exit codes and determinism ok".into())
}

struct Criterion {
    id: u8,
    name: &'static str,
    limit: Duration,
    run: fn() -> Check,
}

const CRITERIA: [Criterion; 9] = [
    Criterion { id: 1, name: "two-copy ensemble reconstruction", limit: Duration::from_secs(1), run: criterion_1 },
    Criterion { id: 2, name: "two-copy ensemble values", limit: Duration::from_secs(1), run: criterion_2 },
    Criterion { id: 3, name: "superadditivity verdict", limit: Duration::from_secs(1), run: criterion_3 },
    Criterion { id: 4, name: "exact value 2/3", limit: Duration::from_secs(1), run: criterion_4 },
    Criterion { id: 5, name: "exact family H2(alpha)", limit: Duration::from_secs(1), run: criterion_5 },
    Criterion { id: 6, name: "optimizer recovers known optima", limit: Duration::from_secs(60), run: criterion_6 },
    Criterion { id: 7, name: "optimizer finds superadditivity", limit: Duration::from_secs(300), run: criterion_7 },
    Criterion { id: 8, name: "property suites", limit: Duration::from_secs(120), run: criterion_8 },
    Criterion { id: 9, name: "CLI end to end", limit: Duration::from_secs(60), run: criterion_9 },
];

fn main() -> ExitCode {
    let only: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failures = 0;
    for c in CRITERIA.iter().filter(|c| only.is_empty() || only.contains(&c.id)) {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let elapsed = start.elapsed();
        let result = result.and_then(|detail| {
            if elapsed <= c.limit {
                Ok(detail)
            } else {
                Err(format!("{detail}; took {elapsed:.2?}, limit {:?}", c.limit))
            }
        });
        match result {
            Ok(detail) => println!("criterion {} ({}): PASS [{elapsed:.2?}] {detail}", c.id, c.name),
            Err(why) => {
                failures += 1;
                println!("criterion {} ({}): FAIL [{elapsed:.2?}] {why}", c.id, c.name);
            }
        }
    }
    if failures == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} criteria failed");
        ExitCode::FAILURE
    }
}
