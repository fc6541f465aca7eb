//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Every reference value is computed here from dense
//! matrices, finite differences or direct sampling, not from library
//! shortcuts.

use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use grid_fisher::fisher;
use grid_fisher::mcsim::{self, NoiseModel, SimConfig, SimMode};
use grid_fisher::spectral::{self, CorrelationKernel, ModeCoefficients, SpectralDecomposition, TorusCorrelation};
use grid_fisher::tuning::{self, AllocationEntry, PowerAllocation, TuningPopulation1D, TuningPopulation2D};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn dense_kernel(kernel: &CorrelationKernel) -> DMatrix<f64> {
    let n = kernel.n();
    DMatrix::from_fn(n, n, |i, j| kernel.entry(i, j))
}

fn solve(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    m.clone()
        .lu()
        .solve(&DVector::from_column_slice(v))
        .expect("nonsingular")
        .iter()
        .copied()
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cos_vector(n: usize, k: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (2.0 / n as f64).sqrt() * (TAU * (k * i) as f64 / n as f64).cos())
        .collect()
}

/// `wᵀCw` for the unit cosine vector of frequency `k`.
fn rayleigh(c: &DMatrix<f64>, k: usize) -> f64 {
    let w = cos_vector(c.nrows(), k);
    let cw = c * DVector::from_column_slice(&w);
    dot(&w, cw.as_slice())
}

fn paired(n: usize) -> std::ops::RangeInclusive<usize> {
    1..=n.div_ceil(2) - 1
}

fn random_kernel(rng: &mut ChaCha8Rng, n: usize) -> CorrelationKernel {
    let spectrum: Vec<f64> = (0..=n / 2).map(|_| 0.05 + 2.0 * rng.random::<f64>()).collect();
    CorrelationKernel::from_spectrum(n, &spectrum).expect("positive spectrum")
}

fn dirichlet(rng: &mut ChaCha8Rng, dim: usize, total: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..dim).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|x| total * x / s).collect()
}

fn random_allocation(rng: &mut ChaCha8Rng, n: usize, power: f64) -> PowerAllocation {
    let ks: Vec<usize> = paired(n).collect();
    let weights = dirichlet(rng, ks.len(), power);
    let entries = ks
        .iter()
        .zip(weights)
        .map(|(&k, w)| AllocationEntry {
            k,
            amplitude: w.sqrt(),
            phase: TAU * rng.random::<f64>(),
        })
        .collect();
    PowerAllocation::new(n, entries).expect("valid allocation")
}

fn one_d_optimum() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst_fi_error: f64 = 0.0;
    let mut worst_margin = f64::NEG_INFINITY;
    for _ in 0..100 {
        let n = rng.random_range(4..=64usize);
        let power = 0.5 + 1.5 * rng.random::<f64>();
        let kernel = random_kernel(&mut rng, n);
        let decomp = SpectralDecomposition::decompose(&kernel);
        let dense = dense_kernel(&kernel);
        let lambdas: Vec<f64> = paired(n).map(|k| rayleigh(&dense, k)).collect();
        let lambda_min = lambdas.iter().copied().fold(f64::INFINITY, f64::min);
        let closed = power / lambda_min;

        let pop = tuning::optimal_tuning_1d(&decomp, power).map_err(|e| e.to_string())?;
        let theta = TAU * rng.random::<f64>();
        let fdot = pop.mean_derivative(theta);
        let fi_dense = dot(&fdot, &solve(&dense, &fdot));
        let fi_lib = fisher::fisher_1d(&pop, &decomp, theta).map_err(|e| e.to_string())?;
        worst_fi_error = worst_fi_error
            .max((fi_dense - closed).abs() / closed)
            .max((fi_lib - closed).abs() / closed);

        for _ in 0..10_000 {
            let a = dirichlet(&mut rng, lambdas.len(), power);
            let fi: f64 = a.iter().zip(&lambdas).map(|(a, l)| a / l).sum();
            worst_margin = worst_margin.max(fi - closed);
        }
    }
    ensure(worst_fi_error < 1e-9, || format!("closed form off by {worst_fi_error:.2e} relative"))?;
    ensure(worst_margin <= 1e-9, || format!("audit exceeded closed form by {worst_margin:.2e}"))?;
    Ok(format!(
        "100 kernels, 1e4 audit points each; max rel FI error {worst_fi_error:.1e}, best audit margin {worst_margin:.3e}"
    ))
}

fn fi_constancy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst_variation: f64 = 0.0;
    let mut worst_derivative: f64 = 0.0;
    let mut cases = 0;
    for _ in 0..10 {
        let n = rng.random_range(4..=32usize);
        let kernel = random_kernel(&mut rng, n);
        let decomp = SpectralDecomposition::decompose(&kernel);
        let inverse = dense_kernel(&kernel).try_inverse().ok_or("singular kernel")?;
        for k in paired(n) {
            let entry = AllocationEntry {
                k,
                amplitude: 1.0,
                phase: TAU * rng.random::<f64>(),
            };
            let pop = TuningPopulation1D::new(n, PowerAllocation::new(n, vec![entry]).unwrap()).unwrap();
            let fis: Vec<f64> = (0..256)
                .map(|t| fisher::fisher_1d(&pop, &decomp, TAU * t as f64 / 256.0).unwrap())
                .collect();
            let hi = fis.iter().copied().fold(f64::MIN, f64::max);
            let lo = fis.iter().copied().fold(f64::MAX, f64::min);
            worst_variation = worst_variation.max((hi - lo) / lo);
            for _ in 0..32 {
                let theta = TAU * rng.random::<f64>();
                let fdot = pop.mean_derivative(theta);
                let fddot = pop.second_derivative(theta);
                let oracle = 2.0 * dot(&fddot, (&inverse * DVector::from_column_slice(&fdot)).as_slice());
                let lib = fisher::fisher_derivative(&pop, &decomp, theta).unwrap();
                worst_derivative = worst_derivative.max(oracle.abs()).max(lib.abs());
            }
            cases += 1;
        }
    }
    ensure(worst_variation < 1e-9, || format!("FI varies by {worst_variation:.2e}"))?;
    ensure(worst_derivative < 1e-10, || format!("|dI/dθ| reached {worst_derivative:.2e}"))?;
    Ok(format!(
        "{cases} single-mode populations; max rel variation {worst_variation:.1e}, max |dI/dθ| {worst_derivative:.1e}"
    ))
}

fn dense_torus(kernel: &CorrelationKernel) -> DMatrix<f64> {
    let n = kernel.n();
    DMatrix::from_fn(n * n, n * n, |p, q| kernel.entry(p / n, q / n) * kernel.entry(p % n, q % n))
}

/// Central differences of the torus mean response.
fn torus_gradient(pop: &TuningPopulation2D, tx: f64, ty: f64) -> (Vec<f64>, Vec<f64>) {
    let h = 1e-5;
    let diff = |a: Vec<f64>, b: Vec<f64>| a.iter().zip(&b).map(|(x, y)| (x - y) / (2.0 * h)).collect::<Vec<f64>>();
    (
        diff(pop.mean_response(tx + h, ty), pop.mean_response(tx - h, ty)),
        diff(pop.mean_response(tx, ty + h), pop.mean_response(tx, ty - h)),
    )
}

fn product_form(x: &PowerAllocation, y: &PowerAllocation, decomp: &SpectralDecomposition) -> f64 {
    let lam = |k: usize| decomp.eigenvalue(k).unwrap();
    let gx: f64 = x.weights().iter().map(|&(k, w)| w / lam(k)).sum();
    let fy: f64 = y.weights().iter().map(|&(k, w)| w / ((k * k) as f64 * lam(k))).sum();
    gx * fy
}

fn product_form_2d() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst_rel: f64 = 0.0;
    let mut worst_cross: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.random_range(4..=8usize);
        let kernel = random_kernel(&mut rng, n);
        let decomp = SpectralDecomposition::decompose(&kernel);
        let power = 0.5 + rng.random::<f64>();
        let x = TuningPopulation1D::new(n, random_allocation(&mut rng, n, power)).unwrap();
        // Separable populations share one amplitude spectrum; phases differ.
        let y_entries = x
            .allocation()
            .entries()
            .iter()
            .map(|e| AllocationEntry {
                phase: TAU * rng.random::<f64>(),
                ..*e
            })
            .collect();
        let y = TuningPopulation1D::new(n, PowerAllocation::new(n, y_entries).unwrap()).unwrap();
        let pop = TuningPopulation2D::from_axes(x, y).map_err(|e| e.to_string())?;
        let (tx, ty) = (TAU * rng.random::<f64>(), TAU * rng.random::<f64>());
        let dense = dense_torus(&kernel);
        let (dx, dy) = torus_gradient(&pop, tx, ty);
        let cinv_dx = solve(&dense, &dx);
        let i_x_dense = dot(&dx, &cinv_dx);
        let i_y_dense = dot(&dy, &solve(&dense, &dy));
        let i_xy_dense = dot(&dy, &cinv_dx);
        let formula_x = product_form(pop.x().allocation(), pop.y().allocation(), &decomp);
        let formula_y = product_form(pop.y().allocation(), pop.x().allocation(), &decomp);
        let lib = fisher::fisher_2d_at(&pop, &decomp, tx, ty).map_err(|e| e.to_string())?;
        for (a, b) in [(formula_x, i_x_dense), (formula_y, i_y_dense), (lib.i_x, i_x_dense), (lib.i_y, i_y_dense)] {
            worst_rel = worst_rel.max((a - b).abs() / b);
        }
        let scale = (i_x_dense * i_y_dense).sqrt();
        worst_cross = worst_cross
            .max((lib.i_xy - i_xy_dense).abs() / scale)
            .max(i_xy_dense.abs() / scale);
    }
    ensure(worst_rel < 1e-8, || format!("product form off by {worst_rel:.2e} relative"))?;
    ensure(worst_cross < 1e-8, || format!("cross term mismatch {worst_cross:.2e}"))?;

    let mut worst_opt: f64 = 0.0;
    let mut worst_opt_dense: f64 = 0.0;
    for n in 4..=8usize {
        for target in paired(n) {
            // One small eigenvalue keeps argmin λ and argmin k²λ together.
            let spectrum: Vec<f64> = (0..=n / 2).map(|k| if k == target { 0.01 } else { 1.0 }).collect();
            let kernel = CorrelationKernel::from_spectrum(n, &spectrum).unwrap();
            let decomp = SpectralDecomposition::decompose(&kernel);
            let power = 1.7;
            let pop = tuning::optimal_tuning_2d(&decomp, power).map_err(|e| e.to_string())?;
            let k = pop.x().allocation().entries()[0].k;
            ensure(k == target, || format!("n={n}: optimum at k={k}, expected {target}"))?;
            let expected = (power / (k as f64 * spectrum[k])).powi(2);
            let dense = dense_torus(&kernel);
            let (tx, ty) = (0.4, 2.1);
            let (dx, dy) = torus_gradient(&pop, tx, ty);
            let cinv_dx = solve(&dense, &dx);
            let lib = fisher::fisher_2d_at(&pop, &decomp, tx, ty).unwrap();
            worst_opt = worst_opt
                .max((lib.i_x - expected).abs() / expected)
                .max((lib.i_y - expected).abs() / expected)
                .max(lib.i_xy.abs() / expected);
            worst_opt_dense = worst_opt_dense
                .max((dot(&dx, &cinv_dx) - expected).abs() / expected)
                .max(dot(&dy, &cinv_dx).abs() / expected);
        }
    }
    ensure(worst_opt < 1e-9, || format!("optimal single-mode values off by {worst_opt:.2e}"))?;
    ensure(worst_opt_dense < 1e-8, || format!("dense single-mode check off by {worst_opt_dense:.2e}"))?;
    Ok(format!(
        "20 random separable populations, max rel error {worst_rel:.1e}, cross term {worst_cross:.1e}; \
         optimal single mode error {worst_opt:.1e} (dense {worst_opt_dense:.1e})"
    ))
}

fn kernel4() -> SpectralDecomposition {
    SpectralDecomposition::decompose(&CorrelationKernel::new(4, vec![1.0, 0.5, 0.25]).unwrap())
}

fn sim(mode: SimMode, seed: u64) -> SimConfig {
    SimConfig {
        trials: 100_000,
        seed,
        mode,
        ..SimConfig::default()
    }
}

fn cramer_rao() -> Outcome {
    let decomp = kernel4();
    let pop = tuning::optimal_tuning_1d(&decomp, 1.0).unwrap();
    let noise = NoiseModel::new(decomp).unwrap();
    let known = mcsim::run_displacement_trials(&pop, &noise, &sim(SimMode::KnownReference, 4))
        .map_err(|e| e.to_string())?
        .result;
    let two = mcsim::run_displacement_trials(&pop, &noise, &sim(SimMode::TwoSnapshot, 4))
        .map_err(|e| e.to_string())?
        .result;
    let (rk, rt) = (known.empirical_variance / 0.75 - 1.0, two.empirical_variance / 1.5 - 1.0);
    ensure(rk.abs() < 0.05, || format!("known_reference variance {} vs 0.75", known.empirical_variance))?;
    ensure(rt.abs() < 0.05, || format!("two_snapshot variance {} vs 1.5", two.empirical_variance))?;
    Ok(format!(
        "known_reference {:.4} (target 0.75), two_snapshot {:.4} (target 1.5)",
        known.empirical_variance, two.empirical_variance
    ))
}

fn suboptimal_separation() -> Outcome {
    let kernel = CorrelationKernel::exponential(8, 1.0, 0.5).unwrap();
    let decomp = SpectralDecomposition::decompose(&kernel);
    let dense = dense_kernel(&kernel);
    let lambdas: Vec<(usize, f64)> = paired(8).map(|k| (k, rayleigh(&dense, k))).collect();
    let (kmax, lmax) = lambdas.iter().copied().fold((0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
    let (kmin, lmin) = lambdas.iter().copied().fold((0, f64::MAX), |a, b| if b.1 < a.1 { b } else { a });
    let noise = NoiseModel::new(decomp.clone()).unwrap();
    let run = |k: usize| {
        let pop = TuningPopulation1D::new(8, PowerAllocation::single(8, k, 1.0).unwrap()).unwrap();
        mcsim::run_displacement_trials(&pop, &noise, &sim(SimMode::KnownReference, 5))
            .map(|r| r.result.empirical_variance)
            .map_err(|e| e.to_string())
    };
    let optimal_k = tuning::optimal_tuning_1d(&decomp, 1.0).unwrap().allocation().entries()[0].k;
    ensure(optimal_k == kmin, || format!("optimal frequency {optimal_k}, dense argmin {kmin}"))?;
    let (worst, best) = (run(kmax)?, run(kmin)?);
    let ratio = worst / best;
    let target = lmax / lmin;
    ensure(worst > best, || format!("suboptimal variance {worst} not above optimal {best}"))?;
    ensure((ratio / target - 1.0).abs() < 0.1, || format!("variance ratio {ratio:.4} vs {target:.4}"))?;
    Ok(format!("k={kmax} vs k={kmin}: variance ratio {ratio:.4}, eigenvalue ratio {target:.4}"))
}

fn shift_theorem() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut worst: f64 = 0.0;
    for n in 4..=33usize {
        let decomp = SpectralDecomposition::decompose(&CorrelationKernel::white(n, 1.0).unwrap());
        for _ in 0..5 {
            let v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let coeffs = spectral::project(&v);
            let paired_only: Vec<ModeCoefficients> = coeffs.iter().copied().filter(|c| paired(n).contains(&c.k)).collect();
            let u = spectral::synthesize(n, &paired_only);
            for m in 0..n {
                let literal: Vec<f64> = (0..n).map(|i| v[(i + n - m) % n]).collect();
                let shifted = spectral::synthesize(n, &spectral::shift_by_steps(n, &coeffs, m as i64));
                let literal_u: Vec<f64> = (0..n).map(|i| u[(i + n - m) % n]).collect();
                let rotated = spectral::rotate_pattern(&decomp, &paired_only, TAU * m as f64 / n as f64).unwrap();
                let rotated = spectral::synthesize(n, &rotated);
                for i in 0..n {
                    worst = worst
                        .max((literal[i] - shifted[i]).abs())
                        .max((literal_u[i] - rotated[i]).abs());
                }
            }
        }
    }
    ensure(worst < 1e-12, || format!("rotation mismatch {worst:.2e}"))?;
    let decomp = SpectralDecomposition::decompose(&CorrelationKernel::white(12, 1.0).unwrap());
    let r = spectral::rotate_pattern(&decomp, &[ModeCoefficients::new(1, 1.0, 0.0)], PI / 6.0).unwrap()[0];
    ensure(
        (r.cos - 0.866).abs() < 5e-4 && (r.sin - 0.5).abs() < 5e-4,
        || format!("30 degree weights ({:.4}, {:.4})", r.cos, r.sin),
    )?;
    Ok(format!(
        "n=4..33, all integer shifts, max error {worst:.1e}; 30 degrees gives ({:.3}, {:.3})",
        r.cos, r.sin
    ))
}

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_grid-fisher")
}

/// Strict maxima over the 8 wrapped neighbours.
fn count_toroidal_maxima(rows: &[Vec<f64>]) -> usize {
    let r = rows.len();
    let mut count = 0;
    for a in 0..r {
        for b in 0..r {
            let v = rows[a][b];
            let mut is_max = true;
            for da in [r - 1, 0, 1] {
                for db in [r - 1, 0, 1] {
                    if (da, db) != (0, 0) && rows[(a + da) % r][(b + db) % r] >= v {
                        is_max = false;
                    }
                }
            }
            count += is_max as usize;
        }
    }
    count
}

fn kernel_file(dir: &Path, name: &str, kernel: &CorrelationKernel) -> std::path::PathBuf {
    let values: Vec<String> = kernel.values().iter().map(|v| format!("{v:?}")).collect();
    let path = dir.join(name);
    std::fs::write(
        &path,
        format!("n = {}\nfamily = \"explicit\"\n\n[params]\nvalues = [{}]\n", kernel.n(), values.join(", ")),
    )
    .unwrap();
    path
}

fn grid_geometry() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let n = 16;
    let mut counts = Vec::new();
    for k in 1..=4usize {
        let spectrum: Vec<f64> = (0..=n / 2).map(|j| if j == k { 0.01 } else { 1.0 }).collect();
        let kernel = CorrelationKernel::from_spectrum(n, &spectrum).unwrap();
        let path = kernel_file(dir.path(), &format!("k{k}.toml"), &kernel);
        let out = dir.path().join(format!("out{k}"));
        let status = Command::new(binary())
            .args(["field2d", "--optimal", "--res", "128", "--out-dir"])
            .arg(&out)
            .arg(&path)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(status.status.success(), || String::from_utf8_lossy(&status.stderr).into_owned())?;
        let pgm = std::fs::read(out.join("field.pgm")).unwrap();
        ensure(pgm.starts_with(b"P5 128 128 255\n"), || "bad PGM header".into())?;
        let rows: Vec<Vec<f64>> = std::fs::read_to_string(out.join("field.csv"))
            .unwrap()
            .lines()
            .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
            .collect();
        ensure(rows.len() == 128 && rows.iter().all(|r| r.len() == 128), || "bad CSV shape".into())?;
        let maxima = count_toroidal_maxima(&rows);
        ensure(maxima == k * k, || format!("k={k}: {maxima} maxima, expected {}", k * k))?;
        counts.push(maxima);
    }
    Ok(format!("maxima for k=1..4 at resolution 128: {counts:?}"))
}

fn kronecker_inverse() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut worst: f64 = 0.0;
    for n in [4usize, 6, 8] {
        for kernel in [CorrelationKernel::exponential(n, 1.0, 0.5).unwrap(), random_kernel(&mut rng, n)] {
            let axis_inv = dense_kernel(&kernel).try_inverse().ok_or("singular axis")?;
            let torus_inv = dense_torus(&kernel).try_inverse().ok_or("singular torus")?;
            let product = axis_inv.kronecker(&axis_inv);
            worst = worst.max((torus_inv - product).abs().max());
            let decomp = SpectralDecomposition::decompose(&kernel);
            let report = spectral::torus_inverse_check(&decomp).map_err(|e| e.to_string())?;
            ensure(report.holds, || format!("library check failed at n={n}: {:.2e}", report.max_abs_error))?;
            let torus = TorusCorrelation::new(decomp);
            let v: Vec<f64> = (0..n * n).map(|_| rng.random::<f64>()).collect();
            let lib = torus.apply_inverse(&v).map_err(|e| e.to_string())?;
            let oracle = solve(&dense_torus(&kernel), &v);
            worst = worst.max(lib.iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        }
    }
    ensure(worst < 1e-8, || format!("max entry error {worst:.2e}"))?;
    Ok(format!("n in {{4, 6, 8}}, max entry error {worst:.1e}"))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/demo_simulate.toml");
    let mut outputs = Vec::new();
    for threads in ["1", "8"] {
        let out = dir.path().join(format!("t{threads}"));
        let status = Command::new(binary())
            .args(["simulate", "--seed", "99", "--threads", threads, "--out-dir"])
            .arg(&out)
            .arg(&config)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(status.status.success(), || String::from_utf8_lossy(&status.stderr).into_owned())?;
        outputs.push(std::fs::read(out.join("simulation.json")).unwrap());
    }
    ensure(outputs[0] == outputs[1], || "JSON differs between 1 and 8 threads".into())?;
    Ok(format!("{} identical bytes from 1 and 8 threads", outputs[0].len()))
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("1D optimum reproduction", Duration::from_secs(30), one_d_optimum),
        ("FI theta-constancy and zero derivative", Duration::from_secs(1), fi_constancy),
        ("2D product-form equivalence", Duration::from_secs(10), product_form_2d),
        ("Cramer-Rao attainment", Duration::from_secs(20), cramer_rao),
        ("Suboptimality separation", Duration::from_secs(20), suboptimal_separation),
        ("Shift-theorem exactness", Duration::from_secs(60), shift_theorem),
        ("Grid-field geometry", Duration::from_secs(60), grid_geometry),
        ("Kronecker-inverse identity", Duration::from_secs(60), kronecker_inverse),
        ("Determinism across thread counts", Duration::from_secs(60), determinism),
    ];
    let mut failures = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > *limit => Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {}. {name} ({elapsed:.2?}): {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {}. {name} ({elapsed:.2?}): {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
