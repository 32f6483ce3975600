use crate::error::Result;
use crate::relay::{Interpolation, PiecewiseMonotoneSignal};

fn last_extreme(values: &[f64], from: usize, want_max: bool) -> usize {
    let mut best = from;
    for i in from..values.len() {
        let better = if want_max { values[i] >= values[best] } else { values[i] <= values[best] };
        if better {
            best = i;
        }
    }
    best
}

/// Reduced memory sequence: alternating dominant extrema, ending with the final value.
///
/// The initial value is not part of the sequence unless the signal is constant.
pub fn rms(sig: &PiecewiseMonotoneSignal) -> Vec<f64> {
    let v = sig.values();
    let last = v.len() - 1;
    let i_max = last_extreme(v, 0, true);
    let i_min = last_extreme(v, 0, false);
    if v[i_max] == v[i_min] {
        return vec![v[0]];
    }
    let (mut idx, mut want_max) = if i_max < i_min { (i_max, true) } else { (i_min, false) };
    let mut out = Vec::new();
    if idx != 0 {
        out.push(v[idx]);
    }
    while idx < last {
        want_max = !want_max;
        idx = last_extreme(v, idx, want_max);
        out.push(v[idx]);
    }
    out
}

/// Piecewise-linear signal on `[0, t_end]` through `u_start` and the sequence, with
/// constant speed `C / t_end` where `C` is the total variation.
pub fn rms_to_lipschitz(rms: &[f64], t_end: f64, u_start: f64) -> Result<PiecewiseMonotoneSignal> {
    let mut prev = u_start;
    let total: f64 = rms
        .iter()
        .map(|&v| {
            let d = (v - prev).abs();
            prev = v;
            d
        })
        .sum();
    if total == 0.0 {
        return PiecewiseMonotoneSignal::constant(u_start, t_end);
    }
    let last_move = rms
        .iter()
        .enumerate()
        .scan(u_start, |p, (i, &v)| {
            let moved = v != *p;
            *p = v;
            Some((i, moved))
        })
        .filter(|&(_, moved)| moved)
        .map(|(i, _)| i)
        .last()
        .expect("total > 0");
    let mut samples = vec![(0.0, u_start)];
    let mut acc = 0.0;
    let mut prev = u_start;
    for (i, &v) in rms.iter().enumerate() {
        if v == prev {
            continue;
        }
        acc += (v - prev).abs();
        let x = if i == last_move { t_end } else { t_end * acc / total };
        samples.push((x, v));
        prev = v;
    }
    PiecewiseMonotoneSignal::new(samples, Interpolation::Linear)
}
