//! The figure-data commands. Each builds its tables in memory; [`run`]
//! writes them and the manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use catlab_core::cat_qubit::{analytic_qfi, analytic_rq, eta_critical, lg_violation, reduced_extdiff, CatQubitModel};
use catlab_core::classical::{phase_portrait, MeanFieldParams, PhasePoint, Stability};
use catlab_core::dynamics::{
    beta_from_inverse, prepare_and_evolve_with, t_pi, InitialState, Propagator, TwistTurnParams,
    PURE_STATE_BETA,
};
use catlab_core::metrology::{
    self, jz_distribution, metrology_report_with, phi_grid, qfi_axis_map, theta_grid,
    MetrologyReport, QfiKernel, ReadoutSpec,
};
use catlab_core::spin::{cartesian_ops, HermitianOp};
use catlab_core::wigner::{ridge_spread, wigner};
use catlab_core::{CatError, DensityMatrix};
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{ConfigError, RunConfig, StateLabel};
use crate::manifest::{sha256_hex, Conventions, Derived, RunManifest, Tolerances};
use crate::table::{Cell, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(#[from] CatError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("worker pool: {0}")]
    Pool(String),
}

impl CliError {
    /// 2 for bad input, 3 for a broken numerical invariant, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(e) => match e {
                CatError::InvariantViolation(_)
                | CatError::NotHermitian { .. }
                | CatError::InvalidDensity(_)
                | CatError::IntegrationFailed { .. } => 3,
                _ => 2,
            },
            CliError::Io { .. } | CliError::Pool(_) => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Command {
    Distribution,
    TimeSweep,
    TempSweep,
    QfiMap,
    Wigner,
    Classical,
    CatQubit,
    AllFigures,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Distribution => "distribution",
            Command::TimeSweep => "time-sweep",
            Command::TempSweep => "temp-sweep",
            Command::QfiMap => "qfi-map",
            Command::Wigner => "wigner",
            Command::Classical => "classical",
            Command::CatQubit => "catqubit",
            Command::AllFigures => "all-figures",
        }
    }

    const SINGLE: [Command; 7] = [
        Command::Distribution,
        Command::TimeSweep,
        Command::TempSweep,
        Command::QfiMap,
        Command::Wigner,
        Command::Classical,
        Command::CatQubit,
    ];
}

/// Tables plus anything worth recording in the manifest.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub extra: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl Outcome {
    fn merge(&mut self, prefix: &str, other: Outcome) {
        self.tables.extend(other.tables);
        for (k, v) in other.extra {
            self.extra.insert(format!("{prefix}.{k}"), v);
        }
        for n in other.notes {
            if !self.notes.contains(&n) {
                self.notes.push(n);
            }
        }
    }
}

struct Setup {
    params: TwistTurnParams<f64>,
    prop: Propagator<f64>,
    jz: HermitianOp<f64>,
    readout: ReadoutSpec<f64>,
}

impl Setup {
    fn new(cfg: &RunConfig) -> Result<Self, CliError> {
        let params = cfg.params()?;
        Ok(Self {
            prop: Propagator::new(&params.hamiltonian()),
            jz: cartesian_ops::<f64>(params.space).jz,
            readout: cfg.readout_spec(),
            params,
        })
    }

    fn evolve(&self, label: StateLabel, beta_inv: f64, factor: f64) -> Result<DensityMatrix<f64>, CliError> {
        let beta = beta_from_inverse(beta_inv)?;
        Ok(prepare_and_evolve_with(&self.prop, label.into(), beta, factor, &self.params)?.rho)
    }

    fn report(&self, rho: &DensityMatrix<f64>) -> Result<MetrologyReport<f64>, CliError> {
        Ok(metrology_report_with(&QfiKernel::new(rho), rho, &self.jz, &self.readout)?)
    }
}

pub fn distribution(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let setup = Setup::new(cfg)?;
    let rho = setup.evolve(cfg.state, cfg.beta_inv, cfg.time_factor)?;
    let dist = jz_distribution(&rho);
    let split = metrology::cat_split(&dist);
    let mut t = Table::new("jz_distribution.csv", &["m", "p"]);
    for (k, &p) in dist.probs().iter().enumerate() {
        t.push(vec![Cell::Int(setup.params.space.m_int(k)), p.into()]);
    }
    let mut out = Outcome::default();
    out.extra.insert("lambda".into(), split.extensive_difference);
    out.extra.insert("peak_width_left".into(), split.peak_width_left);
    out.extra.insert("peak_width_right".into(), split.peak_width_right);
    out.tables.push(t);
    Ok(out)
}

fn report_cells(r: &MetrologyReport<f64>) -> [Cell; 4] {
    [
        r.r_c.into(),
        r.r_q.into(),
        r.reduced_lambda_c.into(),
        r.reduced_lambda_q.into(),
    ]
}

pub fn time_sweep(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let setup = Setup::new(cfg)?;
    let rows = cfg
        .time_factors
        .par_iter()
        .map(|&f| {
            let rho = setup.evolve(cfg.state, cfg.beta_inv, f)?;
            let r = setup.report(&rho)?;
            let [rc, rq, lrc, lrq] = report_cells(&r);
            Ok(vec![f.into(), r.lambda.into(), r.delta_s.into(), rc, rq, lrc, lrq])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut t = Table::new(
        "lambda_r_vs_time.csv",
        &["time_factor", "lambda", "delta_s", "r_c", "r_q", "lambda_r_c", "lambda_r_q"],
    );
    rows.into_iter().for_each(|r| t.push(r));
    t.sort_by_key(1);
    let mut out = Outcome::default();
    if let Some((f, l)) = t
        .rows
        .iter()
        .filter_map(|r| Some((r[0].as_f64()?, r[1].as_f64()?)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
    {
        out.extra.insert("peak_time_factor".into(), f);
        out.extra.insert("peak_lambda".into(), l);
    }
    out.tables.push(t);
    Ok(out)
}

fn crossover_note(n: usize) -> String {
    format!(
        "crossover sweep runs at N = {n}; rerun with --n 100 for the smaller-system crossover"
    )
}

pub fn temp_sweep(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let setup = Setup::new(cfg)?;
    let ts = &cfg.temp_sweep;
    let mut points = Vec::new();
    for state in [StateLabel::Pi, StateLabel::Zero] {
        for &b in &ts.grid() {
            points.push((state, b));
        }
    }
    let rows = points
        .par_iter()
        .map(|&(state, beta_inv)| {
            let factor = if ts.search {
                let mut best = (f64::NEG_INFINITY, ts.search_factors[0]);
                for &f in &ts.search_factors {
                    let rho = setup.evolve(state, beta_inv, f)?;
                    let l = metrology::cat_split(&jz_distribution(&rho)).extensive_difference;
                    if l > best.0 {
                        best = (l, f);
                    }
                }
                best.1
            } else {
                match state {
                    StateLabel::Pi => ts.pi_time_factor,
                    StateLabel::Zero => ts.zero_time_factor,
                }
            };
            let rho = setup.evolve(state, beta_inv, factor)?;
            let r = setup.report(&rho)?;
            Ok(vec![
                Cell::Text(InitialState::from(state).label().to_string()),
                beta_inv.into(),
                factor.into(),
                r.lambda.into(),
                r.r_q.into(),
                r.r_c.into(),
                r.reduced_lambda_q.into(),
                r.reduced_lambda_c.into(),
                r.f_q.into(),
                r.f_c.into(),
                r.n_eff_bound.into(),
            ])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut t = Table::new(
        "crossover.csv",
        &[
            "state", "beta_inv", "time_factor", "lambda", "r_q", "r_c", "lambda_r_q", "lambda_r_c",
            "f_q", "f_c", "n_eff_bound",
        ],
    );
    rows.into_iter().for_each(|r| t.push(r));
    t.sort_by_key(2);
    let mut out = Outcome::default();
    out.notes.push(crossover_note(cfg.n_particles));
    out.notes.push(if ts.search {
        "temperature sweep: evolution time chosen per temperature to maximise lambda".to_string()
    } else {
        format!(
            "temperature sweep: fixed evolution times, {} T_pi (pi state) and {} T_pi (zero state)",
            ts.pi_time_factor, ts.zero_time_factor
        )
    });
    out.tables.push(t);
    Ok(out)
}

pub fn qfi_map(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let setup = Setup::new(cfg)?;
    let rho = setup.evolve(cfg.state, cfg.beta_inv, cfg.time_factor)?;
    let thetas = theta_grid::<f64>(cfg.grid_theta);
    let phis = phi_grid::<f64>(cfg.grid_phi);
    let map = qfi_axis_map(&rho, &thetas, &phis)?;
    let mut t = Table::new("neff_map.csv", &["theta", "phi", "value"]);
    for (i, &th) in thetas.iter().enumerate() {
        for (k, &ph) in phis.iter().enumerate() {
            t.push(vec![th.into(), ph.into(), map.values[i][k].into()]);
        }
    }
    let mut out = Outcome::default();
    out.extra.insert("n_eff".into(), map.max);
    out.extra.insert("argmax_theta".into(), thetas[map.argmax.0]);
    out.extra.insert("argmax_phi".into(), phis[map.argmax.1]);
    let fq_jz = QfiKernel::new(&rho).qfi(&setup.jz)?;
    out.extra
        .insert("n_eff_jz".into(), fq_jz / (4.0 * cfg.n_particles as f64));
    out.tables.push(t);
    Ok(out)
}

pub fn wigner_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let setup = Setup::new(cfg)?;
    let rho = setup.evolve(cfg.state, cfg.beta_inv, cfg.time_factor)?;
    let g = wigner(&rho, cfg.wigner_phi_points())?;
    let mut t = Table::new("wigner.csv", &["z", "phi", "w"]);
    for (row, &z) in g.values.iter().zip(&g.z_values) {
        for (&w, &phi) in row.iter().zip(&g.phi_values) {
            t.push(vec![z.into(), phi.into(), w.into()]);
        }
    }
    let (lo, hi) = ridge_spread(&g);
    let mut out = Outcome::default();
    out.extra.insert("ridge_spread_lower".into(), lo);
    out.extra.insert("ridge_spread_upper".into(), hi);
    out.extra.insert("imaginary_residue".into(), g.imaginary_residue);
    out.tables.push(t);
    Ok(out)
}

pub fn classical(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let c = &cfg.classical;
    let coupling = match c.coupling {
        Some(l) => l,
        None => cfg.params()?.coupling(),
    };
    let mf = MeanFieldParams::new(coupling)?;
    let starts: Vec<PhasePoint<f64>> = c.starts.iter().map(|s| PhasePoint::new(s[0], s[1])).collect();
    let portraits = starts
        .par_iter()
        .map(|p| phase_portrait(&mf, std::slice::from_ref(p), c.t_final, c.dt, 0))
        .collect::<Result<Vec<_>, CatError>>()?;
    let curve = phase_portrait(&mf, &[], c.t_final, c.dt, c.separatrix_samples)?;

    let mut t = Table::new("portrait.csv", &["trajectory_id", "step", "z", "phi", "class"]);
    for (id, portrait) in portraits.iter().enumerate() {
        let traj = &portrait.trajectories[0];
        for (step, (_, p)) in traj.samples.iter().enumerate() {
            if step % c.sample_every == 0 {
                t.push(vec![id.into(), step.into(), p.z.into(), p.phi.into(), traj.motion.label().into()]);
            }
        }
    }
    let mut sep = Table::new("separatrix.csv", &["phi", "z_c"]);
    for &(phi, z) in &curve.separatrix {
        sep.push(vec![phi.into(), z.into()]);
    }
    let mut fps = Table::new("fixed_points.csv", &["z", "phi", "stability", "eig_re", "eig_im"]);
    for fp in &curve.fixed_points {
        let e = fp.jacobian_eigenvalues[1];
        let label = match fp.stability {
            Stability::Center => "center",
            Stability::Saddle => "saddle",
        };
        fps.push(vec![fp.point.z.into(), fp.point.phi.into(), label.into(), e.re.into(), e.im.into()]);
    }
    let mut out = Outcome::default();
    out.extra.insert("coupling".into(), coupling);
    if let Ok(z) = catlab_core::classical::separatrix(0.0, &mf) {
        out.extra.insert("z_c0".into(), z);
    }
    out.tables.extend([t, sep, fps]);
    Ok(out)
}

pub fn catqubit(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let q = &cfg.catqubit;
    let lambda = q.alpha * q.peak_width;
    let n = q.eta_points;
    let mut t = Table::new("catqubit.csv", &["eta", "f_q", "r_q", "lambda_rq", "lg_violation"]);
    for k in 0..n {
        let eta = std::f64::consts::FRAC_PI_2 * k as f64 / (n - 1) as f64;
        let m = CatQubitModel::new(lambda, q.peak_width, eta)?;
        t.push(vec![
            eta.into(),
            analytic_qfi(&m).into(),
            analytic_rq(&m).into(),
            reduced_extdiff(&m).into(),
            lg_violation(eta).into(),
        ]);
    }
    let mut out = Outcome::default();
    out.extra.insert("alpha".into(), q.alpha);
    out.extra.insert("lambda".into(), lambda);
    if let Ok(ec) = eta_critical(q.alpha) {
        out.extra.insert("eta_critical".into(), ec);
        out.extra.insert("cos_eta_critical".into(), ec.cos());
    }
    out.extra.insert("lg_zero_cos_eta".into(), 2.0 / 3.0);
    out.notes.push(
        "Leggett-Garg column is the closed-form value 1 - 1.5 cos(eta); no measurement protocol is simulated"
            .to_string(),
    );
    out.tables.push(t);
    Ok(out)
}

pub fn compute(command: Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match command {
        Command::Distribution => distribution(cfg),
        Command::TimeSweep => time_sweep(cfg),
        Command::TempSweep => temp_sweep(cfg),
        Command::QfiMap => qfi_map(cfg),
        Command::Wigner => wigner_cmd(cfg),
        Command::Classical => classical(cfg),
        Command::CatQubit => catqubit(cfg),
        Command::AllFigures => {
            let mut out = Outcome::default();
            for c in Command::SINGLE {
                out.merge(c.name(), compute(c, cfg)?);
            }
            Ok(out)
        }
    }
}

fn conventions(cfg: &RunConfig) -> Result<Conventions, CliError> {
    let p = cfg.params()?;
    let hamiltonian = match p.scale {
        catlab_core::dynamics::GeneratorScale::Pauli => "H = sigma * 2 t J_x + 2 U J_z^2",
        catlab_core::dynamics::GeneratorScale::Spin => "H = sigma * t J_x + (U/2) J_z^2",
    };
    Ok(Conventions {
        hopping_sign: p.sign.label().to_string(),
        generator_scale: p.scale.label().to_string(),
        hamiltonian: format!("{hamiltonian}, sigma = {}", p.sign.sigma::<f64>()),
        thermal_exponent: "rho = exp(+beta J(acos z, phi)) / Tr".to_string(),
        pure_state_beta: PURE_STATE_BETA,
        readout: format!(
            "rotation by {} about (theta {}, phi {}) before counting J_z",
            cfg.readout.angle, cfg.readout.theta, cfg.readout.phi
        ),
        wigner_kernel: "W(z_m, phi) = sum_n exp(2 i n phi) <m+n|rho|m-n>".to_string(),
    })
}

fn tolerances() -> Tolerances {
    Tolerances {
        qfi_pair_cutoff: metrology::QFI_PAIR_CUTOFF,
        cfi_bin_cutoff: metrology::CFI_BIN_CUTOFF,
        fisher_chain_relative: metrology::CHAIN_SLACK,
        ratio_slack: metrology::RATIO_SLACK,
        finite_difference_delta: metrology::DEFAULT_FD_DELTA,
        classical_energy_drift: 1e-6,
    }
}

fn derived(cfg: &RunConfig, extra: BTreeMap<String, f64>) -> Result<Derived, CliError> {
    let p = cfg.params()?;
    Ok(Derived {
        t_pi: t_pi(p.space, p.u_int)?,
        coupling: p.coupling(),
        z_c0: p.critical_imbalance().ok(),
        extra,
    })
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Validates, computes on a pool of `workers` threads, writes every table
/// and `manifest.json` into `cfg.out`.
pub fn run(command: Command, cfg: &RunConfig) -> Result<RunManifest, CliError> {
    cfg.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cfg.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| CliError::Pool(e.to_string()))?;
    let outcome = pool.install(|| compute(command, cfg))?;

    std::fs::create_dir_all(&cfg.out).map_err(|source| CliError::Io {
        path: cfg.out.clone(),
        source,
    })?;
    let mut outputs = BTreeMap::new();
    for table in &outcome.tables {
        let bytes = table.to_csv();
        write(&cfg.out.join(&table.name), &bytes)?;
        outputs.insert(table.name.clone(), sha256_hex(&bytes));
    }
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.name().to_string(),
        config: cfg.clone(),
        conventions: conventions(cfg)?,
        tolerances: tolerances(),
        derived: derived(cfg, outcome.extra)?,
        notes: outcome.notes,
        outputs,
    };
    write(&cfg.out.join("manifest.json"), manifest.to_json().as_bytes())?;
    Ok(manifest)
}
