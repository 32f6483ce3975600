//! Preisach operator with Lebesgue measure on the triangle, represented by staircase curves.

mod curve;
mod geometry;
mod rms;

pub use curve::{MemoryCurve, Triangle};
pub use geometry::{polygon_moments, FlipRegion};
pub use rms::{rms, rms_to_lipschitz};

use crate::error::{Error, Result};
use crate::relay::{Interpolation, PiecewiseMonotoneSignal, RelaySign, Threshold};

/// Time-stamped flip regions produced by [`apply_signal`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigEventLog {
    pub moves: Vec<(f64, FlipRegion)>,
}

pub fn virgin(triangle: Triangle) -> MemoryCurve {
    MemoryCurve::virgin(triangle)
}

/// Curve with every relay at `sign`.
pub fn saturated(triangle: Triangle, sign: RelaySign) -> MemoryCurve {
    let a = triangle.a();
    MemoryCurve::from_parts_unchecked(triangle, Vec::new(), sign.as_f64() * a)
}

/// Moves the input monotonically from the anchor to `v`.
pub fn apply_monotone(curve: &MemoryCurve, v: f64) -> Result<(MemoryCurve, FlipRegion)> {
    curve.triangle().check_value(v)?;
    let u = curve.anchor();
    if v == u {
        return Ok((curve.clone(), FlipRegion::empty(RelaySign::Up)));
    }
    let up = v > u;
    let mut stack = curve.corners().to_vec();
    if curve.anchor_is_max() != Some(up) {
        stack.push(u);
    }
    // The stack now ends with an element of the kind opposite to the move.
    let beats = |x: f64, bound: f64| if up { x >= bound } else { x <= bound };
    loop {
        match stack.len() {
            0 => break,
            1 => {
                if beats(v, -stack[0]) {
                    stack.pop();
                }
                break;
            }
            n => {
                if beats(v, stack[n - 2]) {
                    stack.truncate(n - 2);
                } else {
                    break;
                }
            }
        }
    }
    let region = if up { raise_region(curve, v) } else { lower_region(curve, v) };
    Ok((MemoryCurve::from_parts_unchecked(curve.triangle(), stack, v), region))
}

// Relays with H_old(ρ₁) <= ρ₂ < v switch up.
fn raise_region(curve: &MemoryCurve, v: f64) -> FlipRegion {
    let pts = curve.polyline();
    let u = curve.anchor();
    let mut poly = vec![(v, v), (u, u)];
    let mut j = pts.len() - 1;
    while j > 0 {
        let (xj, _) = pts[j];
        let (xp, yp) = pts[j - 1];
        if yp >= v {
            poly.push(if xp == xj { (xj, v) } else { (-v, v) });
            break;
        }
        poly.push(pts[j - 1]);
        j -= 1;
    }
    FlipRegion { polygon: poly, direction: RelaySign::Up }
}

// Relays with v < ρ₁ and ρ₂ < H_old(ρ₁) switch down.
fn lower_region(curve: &MemoryCurve, v: f64) -> FlipRegion {
    let pts = curve.polyline();
    let mut chain = vec![pts[pts.len() - 1]];
    let mut j = pts.len() - 1;
    while j > 0 {
        let (_, yj) = pts[j];
        let (xp, yp) = pts[j - 1];
        if xp <= v {
            chain.push(if yp == yj { (v, yp) } else { (v, -v) });
            break;
        }
        chain.push(pts[j - 1]);
        j -= 1;
    }
    let mut poly = vec![(v, v)];
    poly.extend(chain.into_iter().rev());
    FlipRegion { polygon: poly, direction: RelaySign::Down }
}

/// Folds [`apply_monotone`] over the samples of `sig`.
///
/// A first sample away from the anchor is applied as a jump at `t = 0`. Linear moves
/// are logged at the start of their run, step moves at the jump time.
pub fn apply_signal(
    curve: &MemoryCurve,
    sig: &PiecewiseMonotoneSignal,
) -> Result<(MemoryCurve, ConfigEventLog)> {
    let mut current = curve.clone();
    let mut log = ConfigEventLog::default();
    let (times, values) = (sig.times(), sig.values());
    for i in 0..values.len() {
        let v = values[i];
        if v == current.anchor() {
            continue;
        }
        let time = match (i, sig.mode()) {
            (0, _) => 0.0,
            (_, Interpolation::Linear) => times[i - 1],
            (_, Interpolation::Step) => times[i],
        };
        let (next, region) = apply_monotone(&current, v)?;
        if !region.is_empty() {
            log.moves.push((time, region));
        }
        current = next;
    }
    Ok((current, log))
}

/// `∫_T z dρ = area(+1) - area(-1)`.
pub fn output_w(curve: &MemoryCurve) -> f64 {
    2.0 * geometry::area_plus(curve) - curve.triangle().area()
}

/// Sign of the relay with thresholds `rho`; points on the staircase count as `+1`.
pub fn relay_state_at(curve: &MemoryCurve, rho: Threshold) -> Result<RelaySign> {
    let a = curve.a();
    let (r1, r2) = (rho.rho1(), rho.rho2());
    if r1 < -a {
        return Err(Error::OutOfTriangle { value: r1, a });
    }
    if r2 > a {
        return Err(Error::OutOfTriangle { value: r2, a });
    }
    let pts = curve.polyline();
    let mut ceiling = f64::NEG_INFINITY;
    for (k, w) in pts.windows(2).enumerate() {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if r1 < x0 || r1 > x1 {
            continue;
        }
        let y = if x0 == x1 {
            y0.max(y1)
        } else if k == 0 && y0 != y1 {
            -r1
        } else {
            y0
        };
        ceiling = ceiling.max(y);
    }
    Ok(if r2 <= ceiling { RelaySign::Up } else { RelaySign::Down })
}

/// `∫_T |z₁ - z₂| dρ`.
pub fn distance(c1: &MemoryCurve, c2: &MemoryCurve) -> Result<f64> {
    if c1.a() != c2.a() {
        return Err(Error::TriangleMismatch(c1.a(), c2.a()));
    }
    Ok(2.0 * geometry::symmetric_difference_area(c1, c2))
}

/// Ψ integrated over the triangle for the moves logged in `[t0, t1)`.
pub fn psi_integral(log: &ConfigEventLog, interval: (f64, f64)) -> f64 {
    log.moves
        .iter()
        .filter(|(t, _)| *t >= interval.0 && *t < interval.1)
        .map(|(_, r)| r.psi())
        .sum()
}

/// Ψ of the move from the anchor of `from` to `v`, from ceiling integrals rather than
/// polygon moments.
pub fn move_psi(from: &MemoryCurve, v: f64) -> Result<f64> {
    let (to, _) = apply_monotone(from, v)?;
    Ok(if v >= from.anchor() {
        geometry::integrate_pair(&to, from, |hn, ho, _| hn * hn - ho * ho)
    } else {
        geometry::integrate_pair(&to, from, |hn, ho, x| -2.0 * x * (ho - hn))
    })
}

/// Ψ of the jump from `from` to `to`: `∫ 2ρ₂` over relays switched up plus `∫ -2ρ₁` over
/// relays switched down. Equals [`FlipRegion::psi`] when `to` follows from a monotone move.
pub fn transition_psi(from: &MemoryCurve, to: &MemoryCurve) -> Result<f64> {
    if from.a() != to.a() {
        return Err(Error::TriangleMismatch(from.a(), to.a()));
    }
    Ok(geometry::jump_psi(from, to))
}

fn grid_floor(x: f64, h: f64) -> f64 {
    (x / h).floor() * h
}

fn grid_ceil(x: f64, h: f64) -> f64 {
    (x / h).ceil() * h
}

/// Lattice sequence: maxima floored, minima ceiled, truncated where alternation breaks.
fn quantized_sequence(seq: &[f64], n: u32) -> Vec<f64> {
    let h = dyadic_step(n);
    let mut out: Vec<f64> = Vec::with_capacity(seq.len());
    let mut prev = -seq[0];
    for &s in seq {
        let is_max = s > prev;
        let q = if is_max { grid_floor(s, h) } else { grid_ceil(s, h) };
        if let Some(&last) = out.last() {
            if (is_max && q <= last) || (!is_max && q >= last) {
                break;
            }
        }
        out.push(q);
        prev = s;
    }
    out
}

fn replay(triangle: Triangle, seq: &[f64]) -> MemoryCurve {
    seq.iter().fold(MemoryCurve::virgin(triangle), |c, &v| {
        apply_monotone(&c, v).expect("lattice values lie in the triangle").0
    })
}

pub fn dyadic_step(n: u32) -> f64 {
    (-(n as f64)).exp2()
}

/// Nearest lattice curve with corners and anchor in `2^-n ℤ`.
pub fn quantize(curve: &MemoryCurve, n: u32) -> MemoryCurve {
    replay(curve.triangle(), &quantized_sequence(&curve.sequence(), n))
}

/// Quantizes the corners, then moves the input to the lattice value `u`.
pub fn quantize_anchored(curve: &MemoryCurve, n: u32, u: f64) -> Result<MemoryCurve> {
    let mut seq = curve.sequence();
    seq.pop();
    let base = if seq.is_empty() {
        MemoryCurve::virgin(curve.triangle())
    } else {
        replay(curve.triangle(), &quantized_sequence(&seq, n))
    };
    Ok(apply_monotone(&base, u)?.0)
}

/// `true` if every corner and the anchor lie on `2^-n ℤ`.
pub fn on_lattice(curve: &MemoryCurve, n: u32) -> bool {
    let h = dyadic_step(n);
    curve.sequence().iter().all(|&v| (v / h).fract() == 0.0)
}
