use std::path::{Path, PathBuf};

use hystwave_core::analysis::{
    energy_inequality, l1_parts, mass, record_rh_defect, records_entropy_aggregate, total_variation_u,
    total_variation_z, EntropyProbe,
};
use hystwave_core::oracle::{bank_init, bank_psi, bank_w};
use hystwave_core::preisach::{apply_signal, dyadic_step, output_w, psi_integral, rms_to_lipschitz, saturated};
use hystwave_core::riemann::{solve_riemann, RiemannData};
use hystwave_core::wavefront::{discretize_initial, evolve_with_cap, FrontRecord};
use hystwave_core::{Cell, FrontKind, GridParams, Interpolation, MemoryCurve, PiecewiseMonotoneSignal, RelaySign, Trajectory};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::ScenarioConfig;
use crate::output::{self, num};
use crate::{CliError, Common};

const DEFAULT_SAMPLES: usize = 201;
const DEFAULT_ORACLE_SIZES: [usize; 4] = [250, 500, 1000, 2000];
const DEFAULT_ORACLE_SIGNALS: usize = 20;
const RANDOM_PROBES: usize = 4;

struct Run {
    cfg: ScenarioConfig,
    out: PathBuf,
}

fn prepare(common: &Common) -> Result<Run, CliError> {
    let cfg = ScenarioConfig::load(&common.config)?;
    let out = common.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&out).map_err(|e| CliError::Io(format!("cannot create {}: {e}", out.display())))?;
    Ok(Run { cfg, out })
}

pub fn riemann(common: &Common) -> Result<(), CliError> {
    let Run { cfg, out } = prepare(common)?;
    let cells = cfg.cells()?;
    let [l, r] = cells.as_slice() else {
        return Err(CliError::Input(format!("riemann needs exactly 2 pieces, got {}", cells.len())));
    };
    let data = RiemannData::new(l.u, l.curve.clone(), r.u, r.curve.clone())?;
    let fan = solve_riemann(&data)?;
    output::write_fan(&out.join("fan.csv"), &fan)?;
    let m = cfg.samples.unwrap_or(DEFAULT_SAMPLES).max(2);
    let rows = (0..m)
        .map(|i| {
            let xi = -0.25 + 1.5 * i as f64 / (m - 1) as f64;
            let (u, c) = fan.evaluate(xi)?;
            Ok((xi, Cell::new(u, c)?))
        })
        .collect::<Result<Vec<_>, hystwave_core::Error>>()?;
    output::write_profile(&out.join("profile.csv"), &rows)?;
    println!("riemann: {} fan pieces, stationary jump: {}", fan.pieces.len(), fan.stationary.is_some());
    Ok(())
}

fn grid_run(cfg: &ScenarioConfig, common: &Common, default_times: bool) -> Result<Trajectory, CliError> {
    let n = common.n.map_or_else(|| cfg.n(), Ok)?;
    let t_end = cfg.t_end()?;
    let mut times = cfg.checkpoint_times(common.checkpoints.as_deref(), t_end)?;
    if times.is_empty() && default_times {
        times = (1..=4).map(|i| t_end * i as f64 / 4.0).collect();
    }
    let s0 = discretize_initial(&cfg.initial_data()?, n)?;
    Ok(evolve_with_cap(&s0, GridParams::new(n, cfg.a, t_end)?, &times, common.event_cap)?)
}

pub fn cauchy(common: &Common) -> Result<(), CliError> {
    let Run { cfg, out } = prepare(common)?;
    let traj = grid_run(&cfg, common, false)?;
    write_trajectory(&out, &traj)?;
    println!(
        "cauchy: {} events, {} fronts, {} checkpoints",
        traj.events.len(),
        traj.fronts.len(),
        traj.checkpoints.len()
    );
    Ok(())
}

fn write_trajectory(out: &Path, traj: &Trajectory) -> Result<(), CliError> {
    output::write_events(&out.join("events.csv"), &traj.events)?;
    output::write_fronts(&out.join("fronts.csv"), &traj.fronts)?;
    for (i, (_, s)) in traj.checkpoints.iter().enumerate() {
        output::write_snapshot(&out.join(output::snapshot_name(i)), s)?;
    }
    output::write_checkpoints(&out.join("checkpoints.csv"), &traj.checkpoints)
}

/// One row of the verification report.
struct Check {
    name: &'static str,
    value: f64,
    bound: f64,
    /// `true` for `value <= bound`, `false` for `value >= bound`.
    upper: bool,
    skipped: bool,
}

impl Check {
    fn at_most(name: &'static str, value: f64, bound: f64) -> Self {
        Self { name, value, bound, upper: true, skipped: false }
    }

    fn at_least(name: &'static str, value: f64, bound: f64) -> Self {
        Self { name, value, bound, upper: false, skipped: false }
    }

    fn passes(&self) -> bool {
        self.skipped || if self.upper { self.value <= self.bound } else { self.value >= self.bound }
    }
}

fn probes(cfg: &ScenarioConfig, seed: u64) -> Result<Vec<EntropyProbe>, CliError> {
    let tri = cfg.triangle();
    let mut out = cfg.probes()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bases = [saturated(tri, RelaySign::Up), saturated(tri, RelaySign::Down), MemoryCurve::virgin(tri)];
    for _ in 0..RANDOM_PROBES {
        let k = rng.gen_range(-cfg.a..cfg.a);
        for b in &bases {
            out.push(EntropyProbe::from_history(b, k)?);
        }
    }
    Ok(out)
}

/// Entropy floor for grid solutions: -K n 2^-n with K = Var(u0^(n)) * t_end; only the
/// one shock per rarefaction that crosses k can carry a negative residual.
fn entropy_floor(records: &[FrontRecord], n: u32, t_end: f64) -> f64 {
    let t0 = records.iter().map(|r| r.birth_time).fold(f64::INFINITY, f64::min);
    let var: f64 = records
        .iter()
        .filter(|r| r.birth_time == t0 && r.kind == FrontKind::UShock)
        .map(|r| (r.left.u - r.right.u).abs())
        .sum();
    -var * t_end * f64::from(n) * dyadic_step(n)
}

fn front_checks(records: &[FrontRecord], probes: &[EntropyProbe], n: u32, t_end: f64) -> Result<Vec<Check>, CliError> {
    let rh = records.iter().map(record_rh_defect).fold(0.0, f64::max);
    let mut entropy = f64::INFINITY;
    for p in probes {
        entropy = entropy.min(records_entropy_aggregate(records, p, (0.0, t_end))?);
    }
    Ok(vec![Check::at_most("rh_defect", rh, 1e-12), Check::at_least("entropy_aggregate_min", entropy, entropy_floor(records, n, t_end) - 1e-12)])
}

fn trajectory_checks(traj: &Trajectory) -> Result<Vec<Check>, CliError> {
    let s0 = &traj.initial;
    let count = traj
        .events
        .iter()
        .map(|e| e.u_fronts_after as f64 - e.u_fronts_before as f64)
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    let (vu, vz) = (total_variation_u(s0), total_variation_z(s0)?);
    let mut times: Vec<usize> = (0..traj.checkpoints.len()).collect();
    times.sort_by(|&i, &j| traj.checkpoints[i].0.total_cmp(&traj.checkpoints[j].0));
    let (mut tv_u, mut tv_z, mut lip, mut energy) = (0.0f64, 0.0f64, f64::INFINITY, f64::NEG_INFINITY);
    let (mut pu, mut pz, mut prev) = (vu, vz, (0.0, s0));
    let mass0 = mass(s0).ok();
    let mut drift = 0.0f64;
    let h = dyadic_step(traj.params.n);
    for &i in &times {
        let (t, s) = (&traj.checkpoints[i].0, &traj.checkpoints[i].1);
        let (tu, tz) = (total_variation_u(s), total_variation_z(s)?);
        tv_u = tv_u.max(tu - pu);
        tv_z = tv_z.max(tz - pz);
        (pu, pz) = (tu, tz);
        let (du, dz) = l1_parts(prev.1, s)?;
        let dt = t - prev.0;
        lip = lip.min((vu * dt - du).min(vz * dt - dz));
        prev = (*t, s);
        if let Some(m0) = mass0 {
            drift = drift.max((mass(s)? - m0).abs());
        }
        let e = energy_inequality(traj, *t)?;
        energy = energy.max(e.balance() - 0.5 * h * vu * t);
    }
    let mut checks = vec![
        Check::at_most("u_front_count_increase", count, 0.0),
        Check::at_most("tv_u_increase", tv_u, 1e-12),
        Check::at_most("tv_z_increase", tv_z, 1e-10),
        Check::at_least("l1_lipschitz_slack", lip, -1e-12),
        Check::at_most("energy_excess_over_grid_bound", energy, 1e-10),
    ];
    let mut m = Check::at_most("mass_drift", drift, 1e-10);
    m.skipped = mass0.is_none();
    checks.push(m);
    Ok(checks)
}

pub fn verify(common: &Common, fronts: Option<&Path>) -> Result<(), CliError> {
    let Run { cfg, out } = prepare(common)?;
    let probes = probes(&cfg, common.seed)?;
    let checks = match fronts {
        Some(path) => {
            let records = output::read_fronts(path)?;
            let n = common.n.map_or_else(|| cfg.n(), Ok)?;
            front_checks(&records, &probes, n, cfg.t_end()?)?
        }
        None => {
            let traj = grid_run(&cfg, common, true)?;
            let mut checks = trajectory_checks(&traj)?;
            checks.extend(front_checks(&traj.fronts, &probes, traj.params.n, traj.params.t_end)?);
            checks
        }
    };
    let mut w = output::create(&out.join("report.csv"), &output::REPORT_HEADER)?;
    for c in &checks {
        let pass = if c.skipped { "n/a" } else if c.passes() { "true" } else { "false" };
        let rel = if c.upper { "<=" } else { ">=" };
        w.write_record([c.name.to_string(), num(c.value), num(c.bound), rel.into(), pass.into()])?;
        println!("{:<32} {:>24} {rel} {:<24} {pass}", c.name, num(c.value), num(c.bound));
    }
    output::finish(w)?;
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passes()).map(|c| c.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verify(failed.join(", ")))
    }
}

fn random_signal(rng: &mut ChaCha8Rng, a: f64, max_runs: usize) -> Result<PiecewiseMonotoneSignal, CliError> {
    let runs = rng.gen_range(1..=max_runs);
    let mut v = vec![0.0];
    let mut up = rng.gen_bool(0.5);
    for _ in 0..runs {
        let last: f64 = *v.last().expect("nonempty");
        v.push(if up { rng.gen_range(last..=a) } else { rng.gen_range(-a..=last) });
        up = !up;
    }
    Ok(PiecewiseMonotoneSignal::from_values(&v, Interpolation::Linear)?)
}

pub fn oracle(common: &Common) -> Result<(), CliError> {
    let Run { cfg, out } = prepare(common)?;
    let tri = cfg.triangle();
    let oc = &cfg.oracle;
    let sizes = oc.sizes.clone().unwrap_or_else(|| DEFAULT_ORACLE_SIZES.to_vec());
    if let Some(n) = sizes.iter().find(|&&n| n < 2) {
        return Err(CliError::Input(format!("relay bank needs at least 2 cells per side, got {n}")));
    }
    let signals = match (&oc.signal, &oc.rms) {
        (Some(values), _) => vec![PiecewiseMonotoneSignal::from_values(values, Interpolation::Linear)?],
        (None, Some(seq)) => vec![rms_to_lipschitz(seq, 1.0, 0.0)?],
        (None, None) => {
            let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
            (0..oc.signals.unwrap_or(DEFAULT_ORACLE_SIGNALS))
                .map(|_| random_signal(&mut rng, cfg.a, 12))
                .collect::<Result<_, _>>()?
        }
    };
    let exact = signals
        .iter()
        .map(|s| {
            let (c, log) = apply_signal(&MemoryCurve::virgin(tri), s)?;
            Ok((output_w(&c), psi_integral(&log, (0.0, s.end_time() + 1.0))))
        })
        .collect::<Result<Vec<_>, hystwave_core::Error>>()?;
    let mut w = output::create(&out.join("oracle.csv"), &output::ORACLE_HEADER)?;
    let mut over = Vec::new();
    for &n in &sizes {
        let (mut dw, mut dpsi, mut mean) = (0.0f64, 0.0f64, 0.0);
        for (s, &(w_exact, psi_exact)) in signals.iter().zip(&exact) {
            let (bank, log) = hystwave_core::oracle::bank_evolve(&bank_init(tri, n, None)?, s)?;
            let e = (bank_w(&bank) - w_exact).abs();
            dw = dw.max(e);
            mean += e / signals.len() as f64;
            dpsi = dpsi.max((bank_psi(&log, (0.0, s.end_time() + 1.0)) - psi_exact).abs());
        }
        let bound = 8.0 * cfg.a * cfg.a / n as f64;
        if dw > bound {
            over.push(n);
        }
        w.write_record([n.to_string(), num(dw), num(bound), num(dpsi), num(mean)])?;
        println!("oracle: N = {n:>5}  max|dw| = {}  bound {}  max|dpsi| = {}", num(dw), num(bound), num(dpsi));
    }
    output::finish(w)?;
    if over.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verify(format!("|output_w - bank_w| above 8a^2/N for N in {over:?}")))
    }
}
