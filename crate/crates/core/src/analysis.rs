//! Verification functionals: variation, mass, energy, entropy and L¹ distance.

use crate::error::{Error, Result};
use crate::preisach::{apply_monotone, distance, saturated, transition_psi, MemoryCurve, Triangle};
use crate::relay::RelaySign;
use crate::riemann::{rh_speed, FanState, RiemannFan};
use crate::wavefront::{Cell, FrontKind, FrontRecord, PiecewiseState, Trajectory};

pub fn total_variation_u(state: &PiecewiseState) -> f64 {
    state.cells.windows(2).map(|w| (w[1].u - w[0].u).abs()).sum()
}

/// Sum of curve distances over adjacent cells.
pub fn total_variation_z(state: &PiecewiseState) -> Result<f64> {
    state.cells.windows(2).map(|w| distance(&w[0].curve, &w[1].curve)).sum()
}

/// `∫ (u + w - d∞) dx` with `d∞` the common tail density.
pub fn mass(state: &PiecewiseState) -> Result<f64> {
    let (l, r) = (state.cells.first().expect("nonempty"), state.cells.last().expect("nonempty"));
    if l.u != r.u || l.w != r.w {
        return Err(Error::UnboundedSupport { left: l.density(), right: r.density() });
    }
    let bg = l.density();
    Ok(state
        .intervals()
        .iter()
        .filter(|(lo, hi, _)| lo.is_finite() && hi.is_finite())
        .map(|(lo, hi, c)| (hi - lo) * (c.density() - bg))
        .sum())
}

/// Walks two states over the common refinement of their cells, yielding `(width, c1, c2)`
/// for the bounded pieces.
fn refine<'a>(s1: &'a PiecewiseState, s2: &'a PiecewiseState) -> Vec<(f64, &'a Cell, &'a Cell)> {
    let (a, b) = (s1.intervals(), s2.intervals());
    let mut xs: Vec<f64> = a.iter().chain(&b).flat_map(|&(lo, hi, _)| [lo, hi]).filter(|x| x.is_finite()).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(xs.len());
    for w in xs.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        while a[i].1 <= mid {
            i += 1;
        }
        while b[j].1 <= mid {
            j += 1;
        }
        out.push((w[1] - w[0], a[i].2, b[j].2));
    }
    out
}

/// `½ ∫ (u₁² - u₀²) dx`; the states must share their tail values.
pub fn kinetic_delta(s0: &PiecewiseState, s1: &PiecewiseState) -> Result<f64> {
    for (c0, c1) in [(&s0.cells[0], &s1.cells[0]), (s0.cells.last().unwrap(), s1.cells.last().unwrap())] {
        if c0.u != c1.u {
            return Err(Error::UnboundedSupport { left: c0.u, right: c1.u });
        }
    }
    Ok(refine(s0, s1).iter().map(|(dx, c0, c1)| 0.5 * dx * (c1.u * c1.u - c0.u * c0.u)).sum())
}

/// `(∫|u₁ - u₂| dx, ∫ d(z₁, z₂) dx)`; infinite when the tails differ.
pub fn l1_parts(s1: &PiecewiseState, s2: &PiecewiseState) -> Result<(f64, f64)> {
    let tails = [(&s1.cells[0], &s2.cells[0]), (s1.cells.last().unwrap(), s2.cells.last().unwrap())];
    let mut inf = (0.0, 0.0);
    for (c1, c2) in tails {
        if c1.u != c2.u {
            inf.0 = f64::INFINITY;
        }
        if distance(&c1.curve, &c2.curve)? != 0.0 {
            inf.1 = f64::INFINITY;
        }
    }
    let mut acc = inf;
    for (dx, c1, c2) in refine(s1, s2) {
        acc.0 += dx * (c1.u - c2.u).abs();
        acc.1 += dx * distance(&c1.curve, &c2.curve)?;
    }
    Ok(acc)
}

/// `∫ (|u₁ - u₂| + ∫_T |z₁ - z₂| dρ) dx`.
pub fn l1_distance(s1: &PiecewiseState, s2: &PiecewiseState) -> Result<f64> {
    let (u, z) = l1_parts(s1, s2)?;
    Ok(u + z)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    /// `½ ∫ (u² - u₀²) dx`.
    pub kinetic_delta: f64,
    /// `∫∫ Ψ_ρ dρ dx` over `(0, t)`.
    pub psi_total: f64,
    pub lhs: f64,
    /// `t (u_r² - u_l²) / 2`, the kinetic energy carried out through the tails; zero when
    /// they agree.
    pub boundary_flux: f64,
}

impl EnergyReport {
    /// `lhs` with the tail flux added back.
    pub fn balance(&self) -> f64 {
        self.lhs + self.boundary_flux
    }
}

/// Ψ spent at a point swept by the front: the curve jumps from the state ahead of it to the
/// state behind it.
fn front_psi(left: &Cell, right: &Cell, speed: f64) -> Result<f64> {
    if speed > 0.0 {
        transition_psi(&right.curve, &left.curve)
    } else if speed < 0.0 {
        transition_psi(&left.curve, &right.curve)
    } else {
        Ok(0.0)
    }
}

pub fn energy_inequality(traj: &Trajectory, t: f64) -> Result<EnergyReport> {
    let snap = traj.snapshot(t)?;
    let kinetic_delta = kinetic_delta(&traj.initial, &snap)?;
    let mut psi_total = 0.0;
    for r in &traj.fronts {
        let dt = r.overlap(0.0, t);
        if dt > 0.0 && r.speed != 0.0 {
            psi_total += r.speed.abs() * dt * front_psi(&r.left, &r.right, r.speed)?;
        }
    }
    let (ul, ur) = (snap.cells[0].u, snap.cells.last().unwrap().u);
    Ok(EnergyReport {
        kinetic_delta,
        psi_total,
        lhs: kinetic_delta + psi_total,
        boundary_flux: 0.5 * t * (ur * ur - ul * ul),
    })
}

/// Constant `k` with a compatible reference configuration `ẑ`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyProbe {
    pub k: f64,
    pub k_hat: MemoryCurve,
}

impl EntropyProbe {
    pub fn new(k: f64, k_hat: MemoryCurve) -> Result<Self> {
        if k_hat.anchor() != k {
            return Err(Error::IncompatibleData(format!(
                "probe constant {k} differs from its configuration anchor {}",
                k_hat.anchor()
            )));
        }
        Ok(Self { k, k_hat })
    }

    /// `ẑ` reached from `base` by moving the input to `k`.
    pub fn from_history(base: &MemoryCurve, k: f64) -> Result<Self> {
        Self::new(k, apply_monotone(base, k)?.0)
    }
}

/// Probes at every `k`: saturated up, saturated down and virgin histories.
pub fn probe_family(triangle: Triangle, ks: &[f64]) -> Result<Vec<EntropyProbe>> {
    let bases = [saturated(triangle, RelaySign::Up), saturated(triangle, RelaySign::Down), MemoryCurve::virgin(triangle)];
    let mut out = Vec::with_capacity(3 * ks.len());
    for &k in ks {
        for b in &bases {
            out.push(EntropyProbe::from_history(b, k)?);
        }
    }
    Ok(out)
}

/// `(Δ|u - k| + Δd(z, ẑ)) s - Δ|u - k|` with `Δ = right - left`; nonnegative for admissible
/// fronts.
pub fn front_entropy_residual(left: &Cell, right: &Cell, speed: f64, probe: &EntropyProbe) -> Result<f64> {
    let q = |c: &Cell| (c.u - probe.k).abs();
    let dq = q(right) - q(left);
    let dd = distance(&right.curve, &probe.k_hat)? - distance(&left.curve, &probe.k_hat)?;
    Ok((dq + dd) * speed - dq)
}

/// Smallest front residual over fronts alive somewhere in `(t0, t1)`; `+∞` without fronts.
pub fn entropy_residual(traj: &Trajectory, probe: &EntropyProbe, (t0, t1): (f64, f64)) -> Result<f64> {
    let mut min = f64::INFINITY;
    for r in traj.fronts.iter().filter(|r| r.overlap(t0, t1) > 0.0) {
        min = min.min(front_entropy_residual(&r.left, &r.right, r.speed, probe)?);
    }
    Ok(min)
}

/// `Σ_fronts r · (time alive in (t0, t1))`, the integrated entropy production.
pub fn entropy_aggregate(traj: &Trajectory, probe: &EntropyProbe, range: (f64, f64)) -> Result<f64> {
    records_entropy_aggregate(&traj.fronts, probe, range)
}

/// [`entropy_aggregate`] over a bare front history.
pub fn records_entropy_aggregate(records: &[FrontRecord], probe: &EntropyProbe, (t0, t1): (f64, f64)) -> Result<f64> {
    let mut sum = 0.0;
    for r in records {
        let dt = r.overlap(t0, t1);
        if dt > 0.0 {
            sum += dt * front_entropy_residual(&r.left, &r.right, r.speed, probe)?;
        }
    }
    Ok(sum)
}

/// Smallest residual over the fan sampled at `samples` values per rarefaction, with `k`
/// added as a sample so no chord straddles it. Chords carry their Rankine–Hugoniot speed;
/// genuine jumps between pieces are kept whole.
pub fn fan_entropy_residual(fan: &RiemannFan, probe: &EntropyProbe, samples: usize) -> Result<f64> {
    let data = fan.data();
    let mut us = vec![data.u_left];
    for p in &fan.pieces {
        match p.state {
            FanState::Constant(v) => us.push(v),
            FanState::Rarefaction { u_lo_xi, u_hi_xi, .. } => {
                let m = samples.max(1);
                let mut vals: Vec<f64> =
                    (0..=m).map(|i| u_lo_xi + (u_hi_xi - u_lo_xi) * i as f64 / m as f64).collect();
                if (probe.k - u_lo_xi) * (probe.k - u_hi_xi) < 0.0 {
                    vals.push(probe.k);
                    vals.sort_by(|x, y| if u_hi_xi > u_lo_xi { x.total_cmp(y) } else { y.total_cmp(x) });
                }
                us.extend(vals);
            }
        }
    }
    us.push(data.u_right);
    us.dedup();
    let mut cells = vec![Cell::new(data.u_left, data.curve_left.clone())?];
    for &u in &us {
        cells.push(Cell::new(u, apply_monotone(&data.curve_right, u)?.0)?);
    }
    let mut min = f64::INFINITY;
    for w in cells.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let speed = if w[0].u == w[1].u { 0.0 } else { rh_speed(w[0].u, w[0].w, w[1].u, w[1].w)? };
        min = min.min(front_entropy_residual(&w[0], &w[1], speed, probe)?);
    }
    Ok(min)
}

/// `|s (Δu + Δw) - Δu|` for a `u` shock, `|s| + |Δu|` for a stationary front.
pub fn record_rh_defect(r: &FrontRecord) -> f64 {
    let (l, rr) = (&r.left, &r.right);
    match r.kind {
        FrontKind::UShock => (r.speed * (l.density() - rr.density()) - (l.u - rr.u)).abs(),
        FrontKind::ZStationary => r.speed.abs() + (l.u - rr.u).abs(),
    }
}

/// Largest `|s (Δu + Δw) - Δu|` over the `u` shocks of a state.
pub fn rh_defect(state: &PiecewiseState) -> f64 {
    state
        .fronts
        .iter()
        .enumerate()
        .filter(|(_, f)| f.kind == FrontKind::UShock)
        .map(|(i, f)| {
            let (l, r) = (&state.cells[i], &state.cells[i + 1]);
            (f.speed * (l.density() - r.density()) - (l.u - r.u)).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::Rng;

    use super::*;
    use crate::preisach::dyadic_step;
    use crate::riemann::{solve_riemann, RiemannData};
    use crate::test_support::{random_curve, random_lattice_curve, rng, unit};
    use crate::wavefront::{discretize_initial, evolve, Front, GridParams, InitialData};

    fn vc(u: f64) -> Cell {
        Cell::from_curve(apply_monotone(&MemoryCurve::virgin(unit()), u).unwrap().0)
    }

    fn still(x: f64, kind: FrontKind) -> Front {
        Front { id: 0, origin_x: x, origin_t: 0.0, speed: 0.0, kind }
    }

    fn state(cells: Vec<Cell>, xs: &[f64]) -> PiecewiseState {
        let fronts = xs
            .iter()
            .zip(cells.windows(2))
            .map(|(&x, w)| still(x, if w[0].u == w[1].u { FrontKind::ZStationary } else { FrontKind::UShock }))
            .collect();
        PiecewiseState::new(0.0, cells, fronts).unwrap()
    }

    fn random_data(seed: u64, n: u32, cells: usize) -> InitialData {
        let mut r = rng(seed);
        let mut cs = vec![vc(0.0)];
        for _ in 0..cells.saturating_sub(2) {
            let u = r.gen_range(-1.0..=1.0);
            cs.push(Cell::from_curve(random_lattice_curve(&mut r, unit(), n, 4, Some(u))));
        }
        cs.push(vc(0.0));
        let breaks = (0..cs.len() - 1).map(|i| i as f64 * 0.6 - 1.0).collect();
        InitialData::new(breaks, cs).unwrap()
    }

    #[test]
    fn variation_examples() {
        assert_eq!(total_variation_u(&PiecewiseState::constant(0.0, vc(0.3))), 0.0);
        let s = state(vec![vc(0.0), vc(1.0), vc(0.0)], &[0.0, 1.0]);
        assert_eq!(total_variation_u(&s), 2.0);
        let z = state(vec![vc(0.0), vc(0.5)], &[0.0]);
        assert_eq!(total_variation_z(&z).unwrap(), 0.5);
    }

    #[test]
    fn fan_snapshot_variation() {
        let mut r = rng(11);
        for _ in 0..20 {
            let (ul, ur) = (r.gen_range(-1.0..=1.0), r.gen_range(-1.0..=1.0));
            let (cl, cr) = (random_curve(&mut r, unit(), 5, Some(ul)), random_curve(&mut r, unit(), 5, Some(ur)));
            let fan = solve_riemann(&RiemannData::new(ul, cl.clone(), ur, cr.clone()).unwrap()).unwrap();
            // dense sampling of the fan at t = 1
            let xs: Vec<f64> = (0..4001).map(|i| -0.5 + 2.0 * i as f64 / 4000.0).collect();
            let mut cells = vec![Cell::from_curve(cl.clone())];
            let mut breaks = Vec::new();
            for w in xs.windows(2) {
                let (u, c) = fan.evaluate(w[1]).unwrap();
                let cell = Cell::new(u, c).unwrap();
                if cell != *cells.last().unwrap() {
                    breaks.push(w[0]);
                    cells.push(cell);
                }
            }
            let s = state(cells, &breaks);
            assert!((total_variation_u(&s) - (ul - ur).abs()).abs() <= 1e-12);
            assert!((total_variation_z(&s).unwrap() - distance(&cl, &cr).unwrap()).abs() <= 1e-10);
        }
    }

    #[test]
    fn mass_examples() {
        assert_eq!(mass(&PiecewiseState::constant(0.0, vc(0.0))).unwrap(), 0.0);
        let bump = state(vec![vc(0.0), vc(0.5), vc(0.0)], &[0.0, 2.0]);
        let c = vc(0.5);
        assert_eq!(mass(&bump).unwrap(), 2.0 * (0.5 + c.w));
        let ramp = state(vec![vc(0.0), vc(0.5)], &[0.0]);
        assert!(matches!(mass(&ramp), Err(Error::UnboundedSupport { .. })));
    }

    #[test]
    fn l1_examples() {
        let h = 0.125;
        let s1 = state(vec![vc(0.0), vc(0.25), vc(0.0)], &[0.0, h]);
        assert_eq!(l1_distance(&s1, &s1).unwrap(), 0.0);
        let s2 = state(vec![vc(0.0), Cell::from_curve(apply_monotone(&vc(0.25).curve, 0.5).unwrap().0), vc(0.0)], &[0.0, h]);
        let (du, _) = l1_parts(&s1, &s2).unwrap();
        assert_eq!(du, h * 0.25);
        let s3 = state(vec![vc(0.0), vc(0.25)], &[0.0]);
        assert_eq!(l1_parts(&s1, &s3).unwrap().0, f64::INFINITY);
    }

    #[test]
    fn energy_of_constant_data_vanishes() {
        let s = PiecewiseState::constant(0.0, vc(0.25));
        let traj = evolve(&s, GridParams::new(3, 1.0, 1.0).unwrap(), &[]).unwrap();
        let e = energy_inequality(&traj, 1.0).unwrap();
        assert_eq!((e.kinetic_delta, e.psi_total, e.lhs), (0.0, 0.0, 0.0));
    }

    #[test]
    fn reversed_trajectory_violates_energy() {
        let data = random_data(5, 4, 6);
        let n = 4;
        let s0 = discretize_initial(&data, n).unwrap();
        let traj = evolve(&s0, GridParams::new(n, 1.0, 4.0).unwrap(), &[]).unwrap();
        let rev = traj.time_reversed().unwrap();
        assert!(energy_inequality(&rev, 4.0).unwrap().lhs > 0.0);
    }

    #[test]
    fn fan_entropy_examples() {
        let tri = unit();
        let data = RiemannData::new(0.5, vc(0.5).curve, -0.25, vc(-0.25).curve).unwrap();
        let fan = solve_riemann(&data).unwrap();
        for p in probe_family(tri, &[-0.6, -0.1, 0.0, 0.3, 0.77]).unwrap() {
            assert!(fan_entropy_residual(&fan, &p, 64).unwrap() >= -1e-12);
        }
        // k at the top with every relay up: each front residual vanishes by Rankine–Hugoniot
        let top = EntropyProbe::new(1.0, saturated(tri, RelaySign::Up)).unwrap();
        let (l, r) = (vc(0.5), vc(0.25));
        let s = rh_speed(l.u, l.w, r.u, r.w).unwrap();
        assert!(front_entropy_residual(&l, &r, s, &top).unwrap().abs() <= 1e-15);
        assert!(EntropyProbe::new(0.5, MemoryCurve::virgin(tri)).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn exact_fans_are_entropic(seed in any::<u64>(), k in -1.0f64..=1.0) {
            let mut r = rng(seed);
            let (ul, ur) = (r.gen_range(-1.0..=1.0), r.gen_range(-1.0..=1.0));
            let cl = random_curve(&mut r, unit(), 6, Some(ul));
            let cr = random_curve(&mut r, unit(), 6, Some(ur));
            let fan = solve_riemann(&RiemannData::new(ul, cl, ur, cr.clone()).unwrap()).unwrap();
            let mut probes = probe_family(unit(), &[k]).unwrap();
            probes.push(EntropyProbe::from_history(&cr, k).unwrap());
            for p in probes {
                prop_assert!(fan_entropy_residual(&fan, &p, 32).unwrap() >= -1e-12);
            }
        }

        #[test]
        fn grid_conservation_and_energy(seed in any::<u64>(), n in 2u32..6, cells in 3usize..8) {
            let data = random_data(seed, n, cells);
            let s0 = discretize_initial(&data, n).unwrap();
            let t_end = 3.0;
            let traj = evolve(&s0, GridParams::new(n, 1.0, t_end).unwrap(), &[1.0, 2.0, 3.0]).unwrap();
            let m0 = mass(&s0).unwrap();
            let var = total_variation_u(&s0);
            for (t, s) in &traj.checkpoints {
                prop_assert!((mass(s).unwrap() - m0).abs() <= 1e-10);
                prop_assert!(rh_defect(s) <= 1e-12);
                prop_assert!(l1_parts(&s0, s).unwrap().0 <= var * t + 1e-10);
                let e = energy_inequality(&traj, *t).unwrap();
                // split rarefactions dissipate less than Ψ by at most h/2 per unit variation
                prop_assert!(e.lhs <= 0.5 * dyadic_step(n) * var * t + 1e-10);
            }
        }

        #[test]
        fn l1_is_a_pseudometric(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
            let st = |s| discretize_initial(&random_data(s, 3, 5), 3).unwrap();
            let (a, b, c) = (st(s1), st(s2), st(s3));
            let ab = l1_distance(&a, &b).unwrap();
            prop_assert!((ab - l1_distance(&b, &a).unwrap()).abs() <= 1e-12);
            prop_assert!(ab <= l1_distance(&a, &c).unwrap() + l1_distance(&c, &b).unwrap() + 1e-12);
        }
    }
}
