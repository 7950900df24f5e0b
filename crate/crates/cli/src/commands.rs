use rayon::prelude::*;
use serde::Serialize;

use quasilattice::dynamics::{fit_decay, golden_rule_rate, integrate_amplitudes_strided, BathSpec, FitWindow, Transition};
use quasilattice::polariton::{default_u_max, ground_sector};
use quasilattice::radiation::{decay_rate_for_branch, l_values};
use quasilattice::{chi, decay_rate, deformation_factor, diagonalize_sector, ground_transition_element, transition_matrices, PrefactorInputs};

use crate::config::{Command, LSum, SweepAxis, SweepConfig};
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Emitter};
use crate::validate::run_checks;

pub const CHI_HEADER: [&str; 7] = ["l_index", "l_value", "omega_k_ghz", "re_chi", "im_chi", "abs_chi", "arg_chi_rad"];
pub const DECAY_HEADER: [&str; 5] = ["ell", "omega_q_ghz", "s_kq_abs", "s_zero_abs", "gamma_normalized"];
pub const DYNAMICS_HEADER: [&str; 6] = ["t_ns", "re_alpha", "im_alpha", "alpha_sq", "beta_total_sq", "norm_residual"];

/// Runs the configured command; returns the process exit status.
pub fn run(config: &SweepConfig) -> CliResult<i32> {
    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(config.threads.unwrap_or(0)).build().map_err(|e| CliError::Args(format!("thread pool: {e}")))?;
    pool.install(|| match config.command {
        Command::Spectrum => run_spectrum(config).map(|_| 0),
        Command::ChiSweep => run_chi_sweep(config).map(|_| 0),
        Command::DecaySweep => run_decay_sweep(config).map(|_| 0),
        Command::Dynamics => run_dynamics(config).map(|_| 0),
        Command::Validate => run_validate(config),
    })
}

#[derive(Debug, Serialize)]
struct BranchDoc {
    branch: usize,
    omega_ghz: f64,
    epsilon_ghz: f64,
    coefficients: Vec<f64>,
    /// [S+] from each branch of sector u - 1.
    raise_from_lower: Vec<f64>,
    /// [S-] from each branch of sector u + 1.
    lower_from_upper: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct SectorDoc {
    u: String,
    u_value: f64,
    photon_numbers: Vec<usize>,
    branches: Vec<BranchDoc>,
}

#[derive(Debug, Serialize)]
struct SpectrumDoc {
    n_qubits: usize,
    relative_spacing: f64,
    omega_q_ghz: f64,
    omega_c_ghz: f64,
    eta_ghz: f64,
    deformation_factor: f64,
    sectors: Vec<SectorDoc>,
}

pub fn run_spectrum(config: &SweepConfig) -> CliResult<()> {
    let out = Emitter::create(&config.out)?;
    let lattice = config.model.lattice()?;
    let cavity = config.model.cavity()?;
    let u_min = ground_sector(&lattice);
    let u_max = config.u_max.unwrap_or_else(|| default_u_max(&lattice));
    if u_max < u_min {
        return Err(CliError::Args(format!("--u-max {u_max} is below the ground sector {u_min}")));
    }
    if (u_max.twice() - u_min.twice()) % 2 != 0 {
        return Err(CliError::Args(format!("--u-max {u_max} does not match the parity of r = {}", lattice.spin())));
    }
    let count = ((u_max.twice() - u_min.twice()) / 2) as i64 + 1;
    let sectors = (0..count).into_par_iter().map(|k| diagonalize_sector(&lattice, &cavity, u_min.offset(k))).collect::<Result<Vec<_>, _>>()?;
    let ladder = transition_matrices(&lattice, &cavity, u_max)?;

    let docs = sectors
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let u = s.u();
            let below = i.checked_sub(1).map_or(0, |j| sectors[j].branches());
            let above = sectors.get(i + 1).map_or(0, |t| t.branches());
            SectorDoc {
                u: u.to_string(),
                u_value: u.value(),
                photon_numbers: s.basis.photons().to_vec(),
                branches: (0..s.branches())
                    .map(|b| BranchDoc {
                        branch: b,
                        omega_ghz: s.eigenvalues[b],
                        epsilon_ghz: s.stark_splittings[b],
                        coefficients: s.column(b).iter().copied().collect(),
                        raise_from_lower: (0..below).map(|bl| ladder.raise(u, b, bl).unwrap_or(0.0)).collect(),
                        lower_from_upper: (0..above).map(|bu| ladder.lower(u, b, bu).unwrap_or(0.0)).collect(),
                    })
                    .collect(),
            }
        })
        .collect();

    out.json(&SpectrumDoc {
        n_qubits: lattice.n_qubits(),
        relative_spacing: lattice.relative_spacing(),
        omega_q_ghz: lattice.omega_q(),
        omega_c_ghz: cavity.omega_c(),
        eta_ghz: cavity.eta(),
        deformation_factor: deformation_factor(&lattice),
        sectors: docs,
    })
}

pub fn run_chi_sweep(config: &SweepConfig) -> CliResult<()> {
    let out = Emitter::create(&config.out)?;
    let lattice = config.model.lattice()?;
    let cavity = config.model.cavity()?;
    let ls = l_values(lattice.n_qubits());
    let points = config.k_points;
    let rows: Vec<Vec<Cell>> = (0..ls.len() * points)
        .into_par_iter()
        .map(|idx| {
            let (li, ki) = (idx / points, idx % points);
            let l = ls[li];
            let k = config.k_max * (ki + 1) as f64 / points as f64;
            let z = chi(&lattice, &cavity, l, k);
            vec![
                Cell::Int(li as i64),
                Cell::Float(l),
                Cell::Float(k),
                Cell::Float(z.re),
                Cell::Float(z.im),
                Cell::Float(z.norm()),
                Cell::Float(z.arg()),
            ]
        })
        .collect();
    out.table(config.format, &CHI_HEADER, &rows)
}

pub fn run_decay_sweep(config: &SweepConfig) -> CliResult<()> {
    let out = Emitter::create(&config.out)?;
    let base = config.model.lattice()?;
    let cavity = config.model.cavity()?;
    let prefactor = config.prefactor.as_ref().map(|p| PrefactorInputs::new(p.mu, p.epsilon_d, p.area)).transpose()?;
    let branches: Vec<usize> = if config.both_branches { vec![0, 1] } else { vec![config.branch] };
    let grid = config.grid.values();
    let jobs: Vec<(f64, usize)> = grid.iter().flat_map(|&x| branches.iter().map(move |&b| (x, b))).collect();

    let rows = jobs
        .par_iter()
        .map(|&(x, b)| {
            let lattice = match config.axis {
                SweepAxis::Ell => base.with_relative_spacing(x)?,
                SweepAxis::OmegaQ => base.with_omega_q(x)?,
            };
            let d = decay_rate_for_branch(&lattice, &cavity, b, prefactor)?;
            let mut row = vec![
                Cell::Float(lattice.relative_spacing()),
                Cell::Float(lattice.omega_q()),
                Cell::Float(d.s_at_kq),
                Cell::Float(d.s_at_zero),
                Cell::Float(d.gamma_normalized),
            ];
            if let Some(g) = d.gamma_physical {
                row.push(Cell::Float(g));
            }
            if config.both_branches {
                row.push(Cell::Int(b as i64));
            }
            Ok(row)
        })
        .collect::<CliResult<Vec<_>>>()?;

    let mut header = DECAY_HEADER.to_vec();
    if prefactor.is_some() {
        header.push("gamma_physical_ghz");
    }
    if config.both_branches {
        header.push("branch");
    }
    out.table(config.format, &header, &rows)
}

#[derive(Debug, Serialize)]
pub struct DynamicsSummary {
    pub gamma_fit: Option<f64>,
    /// gamma_fit divided by the bath's golden-rule rate per unit |s|^2.
    pub gamma_fit_normalized: Option<f64>,
    /// 2 |s(k_q)|^2 - |s(0)|^2.
    pub gamma_analytic: f64,
    /// |s(k_q)|^2.
    pub gamma_golden_rule_normalized: f64,
    pub rate_scale: f64,
    pub fit_error: Option<String>,
    pub fit_start_ns: f64,
    pub fit_end_ns: f64,
    pub max_norm_residual: f64,
    pub modes: usize,
    pub bandwidth_ghz: f64,
    pub dt_ns: f64,
    pub t_final_ns: f64,
    pub branch: usize,
}

pub fn summary_path(out: &std::path::Path) -> std::path::PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".summary.json");
    s.into()
}

pub fn run_dynamics(config: &SweepConfig) -> CliResult<()> {
    let out = Emitter::create(&config.out)?;
    let summary_out = Emitter::create(&summary_path(&config.out))?;
    let lattice = config.model.lattice()?;
    let cavity = config.model.cavity()?;
    let p = &config.dynamics;

    let bath = match p.physical {
        Some((mu, eps, volume)) => BathSpec::physical(&lattice, &cavity, p.bandwidth, p.modes, mu, eps, volume)?,
        None => {
            let g = (p.kappa / cavity.wavelength()).sqrt();
            BathSpec::normalized_flat(&cavity, lattice.omega_q(), p.bandwidth, p.modes, g)?
        }
    };
    let s_plus = ground_transition_element(&lattice, &cavity, config.branch)?;
    let transition = match p.l_sum {
        LSum::Collapsed => Transition::Collapsed(s_plus),
        LSum::PerL => Transition::PerL(vec![s_plus; lattice.n_qubits()]),
    };
    let traj = integrate_amplitudes_strided(&lattice, &cavity, &bath, &transition, p.t_final, p.dt, p.stride)?;

    let rows: Vec<Vec<Cell>> = (0..traj.len())
        .map(|i| {
            vec![
                Cell::Float(traj.times[i]),
                Cell::Float(traj.alpha[i].re),
                Cell::Float(traj.alpha[i].im),
                Cell::Float(traj.alpha_sq(i)),
                Cell::Float(traj.beta_total_sq(i)),
                Cell::Float(traj.norm_residual(i)),
            ]
        })
        .collect();
    out.table(config.format, &DYNAMICS_HEADER, &rows)?;

    let analytic = decay_rate(&lattice, &cavity, None)?;
    let rate_scale = bath.rate_scale(lattice.omega_q()).unwrap_or(0.0);
    let s_sq = golden_rule_rate(&lattice, &cavity, &bath, &transition).map_or(0.0, |g| if rate_scale > 0.0 { g / rate_scale } else { 0.0 });
    let window = FitWindow { start: p.fit_start, end: p.fit_end };
    let (gamma_fit, fit_error) = match fit_decay(&traj, window) {
        Ok(g) => (Some(g), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let summary = DynamicsSummary {
        gamma_fit,
        gamma_fit_normalized: gamma_fit.filter(|_| rate_scale > 0.0).map(|g| g / rate_scale),
        gamma_analytic: analytic.gamma_normalized,
        gamma_golden_rule_normalized: s_sq,
        rate_scale,
        fit_error,
        fit_start_ns: window.start,
        fit_end_ns: window.end,
        max_norm_residual: (0..traj.len()).map(|i| traj.norm_residual(i).abs()).fold(0.0, f64::max),
        modes: bath.len(),
        bandwidth_ghz: bath.bandwidth(),
        dt_ns: p.dt,
        t_final_ns: p.t_final,
        branch: config.branch,
    };
    summary_out.json_line(&summary)
}

pub fn run_validate(config: &SweepConfig) -> CliResult<i32> {
    let out = Emitter::create(&config.out)?;
    let report = run_checks(config)?;
    let code = if report.passed { 0 } else { 1 };
    out.json(&report)?;
    Ok(code)
}
