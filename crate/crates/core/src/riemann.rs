//! Exact self-similar solution of the Riemann problem.

use crate::error::{Error, Result};
use crate::preisach::{apply_monotone, output_w, MemoryCurve};

/// Riemann data `(u_l, z_l)` for `x < 0` and `(u_r, z_r)` for `x > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannData {
    pub u_left: f64,
    pub u_right: f64,
    pub curve_left: MemoryCurve,
    pub curve_right: MemoryCurve,
}

impl RiemannData {
    pub fn new(u_left: f64, curve_left: MemoryCurve, u_right: f64, curve_right: MemoryCurve) -> Result<Self> {
        let data = Self { u_left, u_right, curve_left, curve_right };
        data.check()?;
        Ok(data)
    }

    fn check(&self) -> Result<()> {
        if self.curve_left.a() != self.curve_right.a() {
            return Err(Error::TriangleMismatch(self.curve_left.a(), self.curve_right.a()));
        }
        for (side, u, c) in [("left", self.u_left, &self.curve_left), ("right", self.u_right, &self.curve_right)] {
            if u != c.anchor() {
                return Err(Error::IncompatibleData(format!(
                    "{side} state u = {u} but its curve meets the diagonal at {}; relays with \
                     thresholds between the two violate (z-1)(u-rho2) >= 0 or (z+1)(u-rho1) >= 0",
                    c.anchor()
                )));
            }
        }
        Ok(())
    }
}

/// Direction of the input seen by points to the right of the jump.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `u_l > u_r`: inputs increase, the staircase rises through horizontal levels.
    Increasing,
    /// `u_l < u_r`: inputs decrease, the staircase recedes through vertical levels.
    Decreasing,
}

/// Edge of the right staircase that a monotone move sweeps along.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Branch {
    /// Vertical edge at abscissa `m` (increasing) or horizontal edge at height `M`
    /// (decreasing); the swept strip has length `|u - pivot|`.
    Staircase(f64),
    /// The anti-diagonal tail; the swept strip has length `2|u|`.
    AntiDiagonal,
}

impl Branch {
    /// Slowness `g(u) = 1 + dw/du`.
    pub fn slowness(self, direction: Direction, u: f64) -> f64 {
        match (direction, self) {
            (Direction::Increasing, Branch::Staircase(m)) => 1.0 + 2.0 * (u - m),
            (Direction::Increasing, Branch::AntiDiagonal) => 1.0 + 4.0 * u,
            (Direction::Decreasing, Branch::Staircase(m)) => 1.0 + 2.0 * (m - u),
            (Direction::Decreasing, Branch::AntiDiagonal) => 1.0 - 4.0 * u,
        }
    }

    /// Inverse of [`Branch::slowness`] at `g = t/x`.
    pub fn state_at(self, direction: Direction, xi: f64) -> f64 {
        let excess = 1.0 / xi - 1.0;
        match (direction, self) {
            (Direction::Increasing, Branch::Staircase(m)) => m + 0.5 * excess,
            (Direction::Increasing, Branch::AntiDiagonal) => 0.25 * excess,
            (Direction::Decreasing, Branch::Staircase(m)) => m - 0.5 * excess,
            (Direction::Decreasing, Branch::AntiDiagonal) => -0.25 * excess,
        }
    }
}

/// Segment of the fan range, listed from `u_r` outwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    /// Level where the slowness jumps; the fan holds this constant state.
    Plateau(f64),
    /// Inputs between `near` (the `u_r` side) and `far` follow one branch.
    Branch { near: f64, far: f64, branch: Branch },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Breakpoints {
    pub direction: Option<Direction>,
    pub u_right: f64,
    pub u_left: f64,
    pub segments: Vec<Segment>,
}

impl Breakpoints {
    /// Levels `M_i` (increasing) or `m_j` (decreasing) strictly inside the fan range.
    pub fn plateaus(&self) -> Vec<f64> {
        self.segments
            .iter()
            .filter_map(|s| match s {
                Segment::Plateau(v) => Some(*v),
                _ => None,
            })
            .collect()
    }

    /// Pivots of the staircase branches, from `u_r` outwards.
    pub fn pivots(&self) -> Vec<f64> {
        self.segments
            .iter()
            .filter_map(|s| match s {
                Segment::Branch { branch: Branch::Staircase(p), .. } => Some(*p),
                _ => None,
            })
            .collect()
    }

    pub fn uses_anti_diagonal(&self) -> bool {
        self.segments
            .iter()
            .any(|s| matches!(s, Segment::Branch { branch: Branch::AntiDiagonal, .. }))
    }
}

/// Walks the right staircase from `(u_r, u_r)` back towards `(-a, a)` until level `u_l`.
pub fn breakpoints(u_r: f64, curve_right: &MemoryCurve, u_l: f64) -> Result<Breakpoints> {
    if u_r != curve_right.anchor() {
        return Err(Error::IncompatibleData(format!(
            "u_r = {u_r} differs from the curve anchor {}",
            curve_right.anchor()
        )));
    }
    curve_right.triangle().check_value(u_l)?;
    let mut segments = Vec::new();
    let direction = if u_l > u_r {
        Some(Direction::Increasing)
    } else if u_l < u_r {
        Some(Direction::Decreasing)
    } else {
        None
    };
    let pts = curve_right.polyline();
    if let Some(dir) = direction {
        let (lo_end, hi_end) = if u_l > u_r { (u_r, u_l) } else { (u_l, u_r) };
        for j in (1..pts.len()).rev() {
            let ((xa, ya), (xb, yb)) = (pts[j - 1], pts[j]);
            let horizontal = ya == yb;
            let vertical = xa == xb;
            let (level_lo, level_hi, crosses_level) = match dir {
                // heights covered by the edge
                Direction::Increasing => (yb, ya, vertical || !horizontal),
                // abscissas covered by the edge
                Direction::Decreasing => (xa, xb, horizontal || !vertical),
            };
            if crosses_level {
                let lo = level_lo.max(lo_end);
                let hi = level_hi.min(hi_end);
                if hi > lo {
                    let branch = if horizontal || vertical {
                        Branch::Staircase(if vertical { xa } else { ya })
                    } else {
                        Branch::AntiDiagonal
                    };
                    let (near, far) = match dir {
                        Direction::Increasing => (lo, hi),
                        Direction::Decreasing => (hi, lo),
                    };
                    segments.push(Segment::Branch { near, far, branch });
                }
                let done = match dir {
                    Direction::Increasing => ya >= u_l,
                    Direction::Decreasing => xa <= u_l,
                };
                if done {
                    break;
                }
            } else {
                let level = if horizontal { ya } else { xa };
                if level > lo_end && level < hi_end {
                    segments.push(Segment::Plateau(level));
                } else if (dir == Direction::Increasing && level >= u_l)
                    || (dir == Direction::Decreasing && level <= u_l)
                {
                    break;
                }
            }
        }
    }
    Ok(Breakpoints { direction, u_right: u_r, u_left: u_l, segments })
}

/// Slowness `g(u)` on the branch covering `u`; values on a plateau use the branch on the
/// `u_r` side.
pub fn flux_slowness(u: f64, bp: &Breakpoints) -> Result<f64> {
    let (lo, hi) = (bp.u_right.min(bp.u_left), bp.u_right.max(bp.u_left));
    let out_of_range = Error::OutOfRange { value: u, lo, hi };
    let Some(dir) = bp.direction else {
        return Err(out_of_range);
    };
    for s in &bp.segments {
        if let Segment::Branch { near, far, branch } = *s {
            if u >= near.min(far) && u <= near.max(far) {
                return Ok(branch.slowness(dir, u));
            }
        }
    }
    Err(out_of_range)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FanState {
    Constant(f64),
    /// `u` runs from `u_lo_xi` (at the left end of the piece) to `u_hi_xi`.
    Rarefaction { branch: Branch, direction: Direction, u_lo_xi: f64, u_hi_xi: f64 },
}

/// Piece of the fan on `lo < x/t < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FanPiece {
    pub lo: f64,
    pub hi: f64,
    pub state: FanState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiemannFan {
    data: RiemannData,
    breakpoints: Breakpoints,
    /// Pieces covering `0 < x/t < ∞` in increasing order.
    pub pieces: Vec<FanPiece>,
    /// Curve to the right of `x = 0`, reached from `z_r` by the monotone move to `u_l`.
    pub post_curve: MemoryCurve,
    /// `(z_l, z*)` when the curves differ across `x = 0`.
    pub stationary: Option<(MemoryCurve, MemoryCurve)>,
}

impl RiemannFan {
    pub fn data(&self) -> &RiemannData {
        &self.data
    }

    pub fn breakpoints(&self) -> &Breakpoints {
        &self.breakpoints
    }

    /// No moving waves and no stationary jump.
    pub fn is_trivial(&self) -> bool {
        self.pieces.len() == 1 && self.stationary.is_none()
    }

    pub fn u_at(&self, xi: f64) -> f64 {
        if xi <= 0.0 {
            return self.data.u_left;
        }
        let k = self.pieces.partition_point(|p| p.hi < xi).min(self.pieces.len() - 1);
        match self.pieces[k].state {
            FanState::Constant(u) => u,
            FanState::Rarefaction { branch, direction, u_lo_xi, u_hi_xi } => {
                let u = branch.state_at(direction, xi);
                u.clamp(u_lo_xi.min(u_hi_xi), u_lo_xi.max(u_hi_xi))
            }
        }
    }

    /// State at `x/t = xi`; `xi <= 0` gives the left state.
    pub fn evaluate(&self, xi: f64) -> Result<(f64, MemoryCurve)> {
        if xi <= 0.0 {
            return Ok((self.data.u_left, self.data.curve_left.clone()));
        }
        let u = self.u_at(xi);
        Ok((u, apply_monotone(&self.data.curve_right, u)?.0))
    }
}

pub fn solve_riemann(data: &RiemannData) -> Result<RiemannFan> {
    data.check()?;
    let (u_l, u_r) = (data.u_left, data.u_right);
    let bp = breakpoints(u_r, &data.curve_right, u_l)?;
    let post_curve = apply_monotone(&data.curve_right, u_l)?.0;
    let stationary = (post_curve != data.curve_left).then(|| (data.curve_left.clone(), post_curve.clone()));
    let mut pieces = Vec::new();
    if let Some(dir) = bp.direction {
        // (segment, xi at far end, xi at near end), from u_r outwards
        let n = bp.segments.len();
        let mut spans = vec![(0.0, 0.0); n];
        for (k, s) in bp.segments.iter().enumerate() {
            if let Segment::Branch { near, far, branch } = *s {
                let (g_far, g_near) = (branch.slowness(dir, far), branch.slowness(dir, near));
                if g_near < 1.0 || g_far < g_near {
                    return Err(Error::InternalInvariantViolation(format!(
                        "slowness below one or decreasing outwards on {s:?}"
                    )));
                }
                spans[k] = (1.0 / g_far, 1.0 / g_near);
            }
        }
        for k in 0..n {
            if let Segment::Plateau(_) = bp.segments[k] {
                let inner = spans.get(k.wrapping_sub(1)).map(|s| s.0);
                let outer = spans.get(k + 1).map(|s| s.1);
                match (inner, outer) {
                    (Some(i), Some(o)) if o <= i => spans[k] = (o, i),
                    _ => {
                        return Err(Error::InternalInvariantViolation(format!(
                            "plateau {k} is not enclosed by branches"
                        )))
                    }
                }
            }
        }
        let first = spans[n - 1].0;
        pieces.push(FanPiece { lo: 0.0, hi: first, state: FanState::Constant(u_l) });
        for k in (0..n).rev() {
            let (lo, hi) = spans[k];
            let state = match bp.segments[k] {
                Segment::Plateau(v) => FanState::Constant(v),
                Segment::Branch { near, far, branch } => {
                    FanState::Rarefaction { branch, direction: dir, u_lo_xi: far, u_hi_xi: near }
                }
            };
            if hi > lo {
                pieces.push(FanPiece { lo, hi, state });
            }
        }
        let last = spans[0].1;
        pieces.push(FanPiece { lo: last, hi: f64::INFINITY, state: FanState::Constant(u_r) });
    } else {
        pieces.push(FanPiece { lo: 0.0, hi: f64::INFINITY, state: FanState::Constant(u_r) });
    }
    Ok(RiemannFan { data: data.clone(), breakpoints: bp, pieces, post_curve, stationary })
}

/// Extended Rankine–Hugoniot speed `Δu / (Δu + Δw)`.
pub fn rh_speed(u_minus: f64, w_minus: f64, u_plus: f64, w_plus: f64) -> Result<f64> {
    let du = u_minus - u_plus;
    let dw = w_minus - w_plus;
    if du == 0.0 && dw == 0.0 {
        return Err(Error::NoJump);
    }
    if du + dw == 0.0 {
        return Err(Error::DegenerateFront { du });
    }
    Ok(du / (du + dw))
}

/// Speed of the front between two `(u, curve)` states.
pub fn front_speed(left: (f64, &MemoryCurve), right: (f64, &MemoryCurve)) -> Result<f64> {
    rh_speed(left.0, output_w(left.1), right.0, output_w(right.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preisach::{distance, virgin, MemoryCurve};
    use crate::test_support::{random_curve, rng, unit};
    use proptest::prelude::*;
    use rand::Rng;

    fn virgin_data(u_l: f64) -> RiemannData {
        let v = virgin(unit());
        let left = apply_monotone(&v, u_l).unwrap().0;
        RiemannData::new(u_l, left, 0.0, v).unwrap()
    }

    #[test]
    fn virgin_fan_matches_closed_form() {
        let fan = solve_riemann(&virgin_data(0.5)).unwrap();
        assert!(fan.stationary.is_none());
        assert_eq!(fan.pieces.len(), 3);
        assert_eq!(fan.pieces[0].state, FanState::Constant(0.5));
        assert!((fan.pieces[0].hi - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(fan.pieces[1].hi, 1.0);
        assert_eq!(fan.pieces[2].state, FanState::Constant(0.0));
        let (u, c) = fan.evaluate(0.5).unwrap();
        assert_eq!(u, 0.25);
        assert!((output_w(&c) - 0.125).abs() < 1e-15);
        for k in 1..40 {
            let xi = k as f64 / 30.0;
            let (u, c) = fan.evaluate(xi).unwrap();
            let expect = if xi < 1.0 / 3.0 { 0.5 } else if xi < 1.0 { 0.25 * (1.0 / xi - 1.0) } else { 0.0 };
            assert!((u - expect).abs() < 1e-14, "xi {xi}");
            assert!((output_w(&c) - 2.0 * u * u).abs() < 1e-14);
        }
        let (u, c) = fan.evaluate(1e9).unwrap();
        assert_eq!(u, 0.0);
        assert!(c.is_virgin());
    }

    // Upwind finite volumes for q_t + u(q)_x = 0 with q = u + 2u², valid while every
    // point sees a monotone increase from the virgin state.
    #[test]
    fn virgin_fan_matches_finite_volume_oracle() {
        let (nx, x0, x1, t_end) = (4000usize, -0.5, 1.5, 1.0);
        let dx = (x1 - x0) / nx as f64;
        let dt = 0.5 * dx;
        let q_of = |u: f64| u + 2.0 * u * u;
        let u_of = |q: f64| (-1.0 + (1.0 + 8.0 * q).sqrt()) / 4.0;
        let xc = |i: usize| x0 + (i as f64 + 0.5) * dx;
        let mut q: Vec<f64> = (0..nx).map(|i| if xc(i) < 0.0 { q_of(0.5) } else { 0.0 }).collect();
        let steps = (t_end / dt).round() as usize;
        for _ in 0..steps {
            let flux: Vec<f64> = q.iter().map(|&v| u_of(v)).collect();
            for i in (1..nx).rev() {
                q[i] -= dt / dx * (flux[i] - flux[i - 1]);
            }
        }
        let fan = solve_riemann(&virgin_data(0.5)).unwrap();
        let err: f64 = (0..nx).map(|i| (u_of(q[i]) - fan.u_at(xc(i) / t_end)).abs() * dx).sum();
        assert!(err < 5e-3, "L1 error {err}");
    }

    #[test]
    fn trivial_and_stationary_fans() {
        let c = MemoryCurve::new(unit(), vec![0.5], 0.25).unwrap();
        let fan = solve_riemann(&RiemannData::new(0.25, c.clone(), 0.25, c.clone()).unwrap()).unwrap();
        assert!(fan.is_trivial());
        let other = MemoryCurve::new(unit(), vec![-0.5], 0.25).unwrap();
        let fan = solve_riemann(&RiemannData::new(0.25, other.clone(), 0.25, c.clone()).unwrap()).unwrap();
        assert_eq!(fan.pieces.len(), 1);
        assert_eq!(fan.stationary, Some((other.clone(), c.clone())));
        let (wl, wr) = (output_w(&other), output_w(&c));
        assert_eq!(rh_speed(0.25, wl, 0.25, wr).unwrap(), 0.0);
        assert!(matches!(RiemannData::new(0.3, c.clone(), 0.25, c), Err(Error::IncompatibleData(_))));
    }

    #[test]
    fn staircase_breakpoints() {
        let c = MemoryCurve::new(unit(), vec![0.9, -0.6, 0.6, -0.2, 0.3], 0.1).unwrap();
        let bp = breakpoints(0.1, &c, 0.7).unwrap();
        assert_eq!(bp.plateaus(), vec![0.3, 0.6]);
        assert_eq!(bp.pivots(), vec![0.1, -0.2, -0.6]);
        assert!(!bp.uses_anti_diagonal());
        let bp = breakpoints(0.1, &c, 0.95).unwrap();
        assert_eq!(bp.plateaus(), vec![0.3, 0.6, 0.9]);
        assert!(bp.uses_anti_diagonal());
        let bp = breakpoints(0.0, &virgin(unit()), 0.5).unwrap();
        assert!(bp.plateaus().is_empty());
        assert_eq!(bp.segments, vec![Segment::Branch { near: 0.0, far: 0.5, branch: Branch::AntiDiagonal }]);
        assert!((flux_slowness(0.25, &bp).unwrap() - 2.0).abs() < 1e-15);
        assert!(flux_slowness(0.75, &bp).is_err());
        let bp = breakpoints(0.0, &virgin(unit()), 0.0).unwrap();
        assert!(bp.segments.is_empty());
        assert!(breakpoints(0.2, &virgin(unit()), 0.5).is_err());
    }

    #[test]
    fn slowness_formulas() {
        assert_eq!(Branch::Staircase(0.0).slowness(Direction::Increasing, 0.5), 2.0);
        assert_eq!(Branch::Staircase(0.3).slowness(Direction::Increasing, 0.3), 1.0);
        assert_eq!(Branch::Staircase(0.3).slowness(Direction::Decreasing, 0.3), 1.0);
        assert_eq!(Branch::AntiDiagonal.slowness(Direction::Decreasing, -0.25), 2.0);
    }

    #[test]
    fn rh_examples() {
        assert!((rh_speed(1.0, 2.0, 0.0, 0.0).unwrap() - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(rh_speed(0.0, 1.0, 0.0, -1.0).unwrap(), 0.0);
        assert_eq!(rh_speed(0.5, 0.1, 0.5, 0.1), Err(Error::NoJump));
        assert!(matches!(rh_speed(1.0, 0.0, 0.0, 1.0), Err(Error::DegenerateFront { .. })));
    }

    proptest! {
        #[test]
        fn grid_shock_speed_matches_slowness(m in -1.0f64..0.0, j in 0i32..16, n in 2u32..8) {
            let h = (-(n as f64)).exp2();
            let u = m.max(-0.5) + (j as f64) * h;
            let dw = 2.0 * (u - m) * h + h * h;
            // chord slowness equals the branch slowness at the midpoint
            let s = rh_speed(u + h, dw, u, 0.0).unwrap();
            let g = Branch::Staircase(m).slowness(Direction::Increasing, u + 0.5 * h);
            prop_assert!((s - 1.0 / g).abs() < 1e-12);
        }

        #[test]
        fn fan_properties(seed in any::<u64>()) {
            let mut r = rng(seed);
            let u_l: f64 = r.gen_range(-1.0..=1.0);
            let u_r: f64 = r.gen_range(-1.0..=1.0);
            let cl = random_curve(&mut r, unit(), 6, Some(u_l));
            let cr = random_curve(&mut r, unit(), 6, Some(u_r));
            let data = RiemannData::new(u_l, cl.clone(), u_r, cr.clone()).unwrap();
            let fan = solve_riemann(&data).unwrap();
            // contiguous pieces, increasing in x/t
            for w in fan.pieces.windows(2) {
                prop_assert!(w[0].lo < w[0].hi);
                prop_assert_eq!(w[0].hi, w[1].lo);
            }
            prop_assert!(fan.pieces.iter().all(|p| p.lo >= 0.0 && p.hi <= f64::INFINITY && (p.hi.is_infinite() || p.hi <= 1.0)));
            let xs: Vec<f64> = (0..400).map(|k| -0.01 + 1.2 * k as f64 / 399.0).collect();
            let states: Vec<_> = xs.iter().map(|&x| fan.evaluate(x).unwrap()).collect();
            let mut tv_u = 0.0;
            let mut tv_z = 0.0;
            for w in states.windows(2) {
                tv_u += (w[1].0 - w[0].0).abs();
                tv_z += distance(&w[0].1, &w[1].1).unwrap();
                if u_l > u_r {
                    prop_assert!(w[1].0 <= w[0].0);
                } else {
                    prop_assert!(w[1].0 >= w[0].0);
                }
            }
            prop_assert!((tv_u - (u_l - u_r).abs()).abs() < 1e-12);
            prop_assert!((tv_z - distance(&cl, &cr).unwrap()).abs() < 1e-10);
            // self-similarity
            prop_assert_eq!(fan.u_at(0.37), fan.u_at(3.7 / 10.0));
            // chords inside one piece move at a speed inside the piece
            for p in &fan.pieces {
                if let FanState::Rarefaction { .. } = p.state {
                    let (a, b) = (p.lo + 0.25 * (p.hi - p.lo), p.lo + 0.75 * (p.hi - p.lo));
                    let (ua, ca) = fan.evaluate(a).unwrap();
                    let (ub, cb) = fan.evaluate(b).unwrap();
                    let s = rh_speed(ua, output_w(&ca), ub, output_w(&cb)).unwrap();
                    prop_assert!(s >= a - 1e-12 && s <= b + 1e-12);
                }
            }
        }
    }
}
