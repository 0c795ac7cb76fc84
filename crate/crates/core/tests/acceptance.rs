//! Acceptance checks, one line per criterion. Exits non-zero if any fails.

use std::path::Path;
use std::process::Command;

use num_complex::Complex64;
use qscramble::linalg::{eig_hermitian, partial_transpose, realign, CMat, Subsystem};
use qscramble::measures::{self, Classification, WITNESS_TOL};
use qscramble::scrambler::{Placement, ScrambleConfig, Scrambler, UpdateMode};
use qscramble::states::{horodecki_state2, jurkowski_state, BipartiteState, Family, StateSpec};
use qscramble::sweep::{first_local_max, run_time_sweep, Execution, SweepRecord, TimeGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn calibrated(d: f64) -> ScrambleConfig {
    ScrambleConfig {
        d,
        placement: Placement::OnBoth,
        update_mode: UpdateMode::Conjugation,
        hermitize_raw: true,
    }
}

fn default_states() -> Vec<BipartiteState> {
    Family::ALL.iter().map(|f| f.default_spec().build().unwrap()).collect()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// Oracle pieces written out independently of the library.

fn oracle_hamiltonian(d: f64) -> CMat {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    let sx = CMat::from_vec(3, 3, vec![z, c(r, 0.), z, c(r, 0.), z, c(r, 0.), z, c(r, 0.), z]).unwrap();
    let sy = CMat::from_vec(3, 3, vec![z, c(0., -r), z, c(0., r), z, c(0., -r), z, c(0., r), z]).unwrap();
    let kr = |a: &CMat, b: &CMat| CMat::from_fn(9, 9, |i, j| a[(i / 3, j / 3)] * b[(i % 3, j % 3)]);
    (&kr(&sx, &sy) - &kr(&sy, &sx)).scale_real(d)
}

/// `exp(a)` by 20-term Taylor series with scaling and squaring.
fn taylor_expm(a: &CMat) -> CMat {
    let squarings = 10;
    let scaled = a.scale_real(1.0 / f64::from(1u32 << squarings));
    let n = a.rows();
    let mut sum = CMat::identity(n);
    let mut term = CMat::identity(n);
    for k in 1..=20 {
        term = term.matmul(&scaled).scale_real(1.0 / k as f64);
        sum = &sum + &term;
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum);
    }
    sum
}

fn eigen_sum_negativity(rho: &CMat) -> f64 {
    let pt = partial_transpose(rho, qscramble::BipartiteDims::QUTRITS, Subsystem::B).unwrap();
    eig_hermitian(&pt).unwrap().values.iter().map(|l| (-l).max(0.0)).sum()
}

fn sweep(spec: &StateSpec, cfg: &ScrambleConfig, samples: usize) -> Vec<SweepRecord> {
    run_time_sweep(spec, cfg, &TimeGrid::new(10.0, samples).unwrap(), Execution::Parallel).unwrap()
}

fn criterion_1() -> Check {
    let mut worst_s: f64 = 0.0;
    let mut worst_n: f64 = 0.0;
    for placement in [Placement::OnA, Placement::OnB, Placement::OnBoth] {
        let cfg = ScrambleConfig { d: 0.0, placement, ..calibrated(0.0) };
        for state in default_states() {
            let n0 = measures::negativity(&state).unwrap();
            for r in sweep(state.spec(), &cfg, 64) {
                worst_s = worst_s.max(r.s.abs());
                worst_n = worst_n.max((r.negativity - n0).abs());
            }
        }
    }
    let detail = format!("max |S| = {worst_s:.2e}, max |dN| = {worst_n:.2e}");
    if worst_s <= 1e-10 && worst_n <= 1e-10 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_2() -> Check {
    let mut lines = Vec::new();
    let mut ok = true;
    for state in default_states() {
        let m = measures::measure(&state).unwrap();
        ok &= m.negativity < 1e-9 && m.ccnr > 1e-9;
        lines.push(format!("{}: N = {:.1e}, CCNR = {:.4}", state.spec(), m.negativity, m.ccnr));
    }
    let detail = lines.join("; ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn expected_h2(alpha: f64) -> Classification {
    if alpha <= 3.0 {
        Classification::Undetected
    } else if alpha <= 4.0 {
        Classification::Bound
    } else {
        Classification::Free
    }
}

fn criterion_3() -> Check {
    let mut alphas: Vec<f64> = (0..=30).map(|k| 2.0 + 0.1 * k as f64).collect();
    alphas.extend([3.0, 3.05, 4.0, 4.05]);
    let mut wrong = Vec::new();
    for &alpha in &alphas {
        // snap 2.0 + 0.1 k onto the nearest tenth
        let alpha = (alpha * 100.0).round() / 100.0;
        let m = measures::measure(&horodecki_state2(alpha).unwrap()).unwrap();
        if m.classification != expected_h2(alpha) {
            wrong.push(format!("alpha = {alpha}: {} (N = {:.2e}, CCNR = {:.2e})", m.classification, m.negativity, m.ccnr));
        }
    }
    if wrong.is_empty() {
        Ok(format!("{} values of alpha classified as expected", alphas.len()))
    } else {
        Err(wrong.join("; "))
    }
}

fn criterion_4() -> Check {
    let m = measures::measure(&jurkowski_state(1.0, 1.0, 1.0).unwrap()).unwrap();
    let detail = format!("N = {:.2e}, CCNR = {:.2e}", m.negativity, m.ccnr);
    if m.negativity < 1e-9 && m.ccnr <= 1e-9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_5() -> Check {
    let recs = sweep(&StateSpec::Bennett, &calibrated(0.6), 512);
    let max_n = recs.iter().map(|r| r.negativity).fold(0.0, f64::max);
    let n0 = recs[0].negativity;
    let detail = format!("max N = {max_n:.4}, N(0) = {n0:.1e}");
    if (0.05..=0.15).contains(&max_n) && n0.abs() < WITNESS_TOL {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_6() -> Check {
    let spec = StateSpec::Jurkowski { eps1: 1.0, eps2: 1.0, eps3: 1.0 };
    let recs = sweep(&spec, &calibrated(0.6), 512);
    let max_n = recs.iter().map(|r| r.negativity).fold(f64::NEG_INFINITY, f64::max);
    let max_c = recs.iter().map(|r| r.ccnr).fold(f64::NEG_INFINITY, f64::max);
    let detail = format!("max N = {max_n:.4}, max CCNR = {max_c:.4}");
    if max_n > 1e-3 && max_c > 1e-3 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_7() -> Check {
    let mut peaks = Vec::new();
    for d in [0.2, 0.4, 0.6, 0.8, 1.0] {
        let grid = TimeGrid::new(10.0, 512).unwrap();
        let recs = run_time_sweep(&StateSpec::Bennett, &calibrated(d), &grid, Execution::Parallel).unwrap();
        let ts = grid.times();
        let ns: Vec<f64> = recs.iter().map(|r| r.negativity).collect();
        match first_local_max(&ts, &ns, 1e-6) {
            Some(t) => peaks.push((d, t)),
            None => return Err(format!("no negativity peak for D = {d}")),
        }
    }
    let detail = peaks.iter().map(|(d, t)| format!("D = {d}: t = {t:.3}")).collect::<Vec<_>>().join(", ");
    if peaks.windows(2).all(|w| w[1].1 < w[0].1) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_u: f64 = 0.0;
    let mut worst_s: f64 = 0.0;
    let bennett = StateSpec::Bennett.build().unwrap();
    for _ in 0..20 {
        let d: f64 = rng.gen_range(0.0..=1.0);
        let t: f64 = rng.gen_range(0.0..10.0);
        let scr = Scrambler::new(calibrated(d)).unwrap();
        let oracle_u = taylor_expm(&oracle_hamiltonian(d).scale(c(0.0, -t)));
        worst_u = worst_u.max((&scr.propagator(t) - &oracle_u).frobenius_norm());

        let o1 = scr.o1();
        let o2 = scr.evolved_operator(t);
        let k = o2.commutator(o1);
        let oracle_s = k.adjoint().matmul(&k).matmul(bennett.rho()).trace().re;
        worst_s = worst_s.max((scr.otoc(&bennett, t).s - oracle_s).abs());
    }

    let mut fixtures: Vec<BipartiteState> = default_states();
    fixtures.push(jurkowski_state(1.0, 1.0, 1.0).unwrap());
    fixtures.push(horodecki_state2(4.5).unwrap());
    let scr = Scrambler::new(calibrated(0.6)).unwrap();
    for t in [0.7, 2.3, 5.1] {
        fixtures.push(scr.scrambled_state(&default_states()[0], t).unwrap());
    }
    let worst_n = fixtures
        .iter()
        .map(|s| (measures::negativity(s).unwrap() - eigen_sum_negativity(s.rho())).abs())
        .fold(0.0, f64::max);

    let detail = format!("propagator {worst_u:.1e}, negativity {worst_n:.1e}, OTOC {worst_s:.1e}");
    if worst_u < 1e-9 && worst_n < 1e-9 && worst_s < 1e-9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_9() -> Check {
    let dims = qscramble::BipartiteDims::QUTRITS;
    let mut failures = Vec::new();
    let mut states = default_states();
    states.push(jurkowski_state(1.0, 1.0, 1.0).unwrap());
    for s in &states {
        let rho = s.rho();
        let min_eig = eig_hermitian(rho).unwrap().values[0];
        if rho.hermitian_deviation() > 1e-10 || (rho.trace().re - 1.0).abs() > 1e-10 || min_eig < -1e-10 {
            failures.push(format!("{} not a density matrix", s.spec()));
        }
        for sub in [Subsystem::A, Subsystem::B] {
            let back = partial_transpose(&partial_transpose(rho, dims, sub).unwrap(), dims, sub).unwrap();
            if back.max_abs_diff(rho) > 1e-14 {
                failures.push(format!("{} partial transpose not an involution", s.spec()));
            }
        }
        if realign(&realign(rho, dims).unwrap(), dims).unwrap().max_abs_diff(rho) > 1e-14 {
            failures.push(format!("{} realignment not an involution", s.spec()));
        }
    }
    let mut worst_unitary: f64 = 0.0;
    let mut worst_spectrum: f64 = 0.0;
    for placement in [Placement::OnA, Placement::OnB, Placement::OnBoth] {
        let scr = Scrambler::new(ScrambleConfig { placement, ..calibrated(0.6) }).unwrap();
        for t in [0.0, 0.3, 1.7, 4.2, 9.9] {
            worst_unitary = worst_unitary
                .max(scr.propagator(t).unitarity_deviation())
                .max(scr.butterfly(t).unitarity_deviation());
            for s in &states {
                let before = eig_hermitian(s.rho()).unwrap().values;
                let after = eig_hermitian(scr.scrambled_state(s, t).unwrap().rho()).unwrap().values;
                let diff = before.iter().zip(&after).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                worst_spectrum = worst_spectrum.max(diff);
            }
        }
    }
    if worst_unitary > 1e-9 {
        failures.push(format!("unitarity deviation {worst_unitary:.1e}"));
    }
    if worst_spectrum > 1e-9 {
        failures.push(format!("spectrum moved by {worst_spectrum:.1e}"));
    }
    if failures.is_empty() {
        Ok(format!("unitarity {worst_unitary:.1e}, spectrum {worst_spectrum:.1e}"))
    } else {
        Err(failures.join("; "))
    }
}

fn run_cli(args: &[&str], dir: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_qscramble"))
        .args(args)
        .current_dir(dir)
        .status()
        .map_err(|e| e.to_string())?;
    if status.success() {
        Ok(())
    } else {
        Err(format!("qscramble {} exited with {status}", args.join(" ")))
    }
}

fn criterion_10() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/time_bennett.toml");
    let base = ["sweep-time", "--config", config];
    let with = |out: &str, extra: &[&'static str]| -> Vec<String> {
        base.iter()
            .map(|s| s.to_string())
            .chain(["--out".to_string(), out.to_string(), "--svg".to_string(), format!("{out}.svg")])
            .chain(extra.iter().map(|s| s.to_string()))
            .collect()
    };
    for (out, extra) in [("a.csv", &[][..]), ("b.csv", &[][..]), ("serial.csv", &["--threads", "1"][..])] {
        let args = with(out, extra);
        run_cli(&args.iter().map(String::as_str).collect::<Vec<_>>(), dir.path())?;
    }
    let read = |name: &str| std::fs::read(dir.path().join(name)).unwrap();
    let (a, b, serial) = (read("a.csv"), read("b.csv"), read("serial.csv"));
    let detail = format!("{} bytes per CSV", a.len());
    if a == b && a == serial && read("a.csv.svg") == read("serial.csv.svg") {
        Ok(detail)
    } else {
        Err(format!("outputs differ ({detail})"))
    }
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("zero coupling leaves S and negativity unchanged", criterion_1),
        ("default states are PPT and CCNR-detected at t = 0", criterion_2),
        ("Horodecki-2 classification across alpha", criterion_3),
        ("Jurkowski (1,1,1) is undetected", criterion_4),
        ("Bennett peak negativity under scrambling", criterion_5),
        ("Jurkowski (1,1,1) becomes detectable under scrambling", criterion_6),
        ("first negativity peak moves earlier with D", criterion_7),
        ("kernels agree with independent oracles", criterion_8),
        ("physicality and structural invariants", criterion_9),
        ("CLI output is deterministic across runs and thread counts", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("[PASS] criterion {}: {name} ({detail})", k + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] criterion {}: {name} ({detail})", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
