//! Two-threshold delayed relay on piecewise-monotone and piecewise-constant inputs.

use crate::error::{Error, Result};

/// Switching thresholds `rho1 < rho2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    rho1: f64,
    rho2: f64,
}

impl Threshold {
    pub fn new(rho1: f64, rho2: f64) -> Result<Self> {
        if !(rho1.is_finite() && rho2.is_finite() && rho1 < rho2) {
            return Err(Error::InvalidThreshold { rho1, rho2 });
        }
        Ok(Self { rho1, rho2 })
    }

    pub fn rho1(&self) -> f64 {
        self.rho1
    }

    pub fn rho2(&self) -> f64 {
        self.rho2
    }
}

/// Relay output, `-1` or `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelaySign {
    Down,
    Up,
}

impl RelaySign {
    pub fn value(self) -> i8 {
        match self {
            RelaySign::Down => -1,
            RelaySign::Up => 1,
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.value())
    }

    pub fn from_value(v: i8) -> Option<Self> {
        match v {
            -1 => Some(RelaySign::Down),
            1 => Some(RelaySign::Up),
            _ => None,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            RelaySign::Down => RelaySign::Up,
            RelaySign::Up => RelaySign::Down,
        }
    }
}

/// How a signal is read between its samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    /// Continuous, linear between samples.
    Linear,
    /// Right-continuous, constant on `[t_i, t_{i+1})`; jumps happen at sample times.
    Step,
}

/// Finitely many samples `(t_i, v_i)` with `t_0 = 0`, read linearly or as a step function.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseMonotoneSignal {
    times: Vec<f64>,
    values: Vec<f64>,
    mode: Interpolation,
}

impl PiecewiseMonotoneSignal {
    pub fn new(samples: Vec<(f64, f64)>, mode: Interpolation) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidSignal("no samples".into()));
        }
        if samples[0].0 != 0.0 {
            return Err(Error::InvalidSignal(format!(
                "first sample time is {}, expected 0",
                samples[0].0
            )));
        }
        for (i, &(t, v)) in samples.iter().enumerate() {
            if !t.is_finite() || !v.is_finite() {
                return Err(Error::InvalidSignal(format!("non-finite sample {i}")));
            }
            if i > 0 && t <= samples[i - 1].0 {
                return Err(Error::InvalidSignal(format!(
                    "sample times not strictly increasing at index {i}"
                )));
            }
        }
        let (times, values) = samples.into_iter().unzip();
        Ok(Self { times, values, mode })
    }

    /// Samples at times `0, 1, 2, ...`.
    pub fn from_values(values: &[f64], mode: Interpolation) -> Result<Self> {
        Self::new(
            values.iter().enumerate().map(|(i, &v)| (i as f64, v)).collect(),
            mode,
        )
    }

    pub fn constant(value: f64, end_time: f64) -> Result<Self> {
        Self::new(vec![(0.0, value), (end_time, value)], Interpolation::Linear)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mode(&self) -> Interpolation {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().expect("nonempty")
    }

    pub fn initial_value(&self) -> f64 {
        self.values[0]
    }

    pub fn final_value(&self) -> f64 {
        *self.values.last().expect("nonempty")
    }

    pub fn value(&self, t: f64) -> f64 {
        let k = self.times.partition_point(|&s| s <= t);
        if k == 0 {
            return self.values[0];
        }
        if k == self.times.len() {
            return self.final_value();
        }
        match self.mode {
            Interpolation::Step => self.values[k - 1],
            Interpolation::Linear => {
                let (t0, t1) = (self.times[k - 1], self.times[k]);
                let (v0, v1) = (self.values[k - 1], self.values[k]);
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }

    /// Total variation of the sample path.
    pub fn total_variation(&self) -> f64 {
        self.values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
    }

    /// Applies a strictly increasing time map; the result is re-anchored at `t = 0`.
    pub fn reparameterize(&self, map: impl Fn(f64) -> f64) -> Result<Self> {
        let t0 = map(self.times[0]);
        let samples = self
            .times
            .iter()
            .zip(&self.values)
            .map(|(&t, &v)| (map(t) - t0, v))
            .collect();
        Self::new(samples, self.mode)
    }

    /// Splits at sample `k`; the second part is shifted to start at `t = 0`.
    pub fn split_at(&self, k: usize) -> Result<(Self, Self)> {
        if k >= self.len() {
            return Err(Error::InvalidSignal(format!("split index {k} out of range")));
        }
        let head = self.times[..=k]
            .iter()
            .zip(&self.values[..=k])
            .map(|(&t, &v)| (t, v))
            .collect();
        let tk = self.times[k];
        let tail = self.times[k..]
            .iter()
            .zip(&self.values[k..])
            .map(|(&t, &v)| (t - tk, v))
            .collect();
        Ok((Self::new(head, self.mode)?, Self::new(tail, self.mode)?))
    }
}

/// A relay switch. `direction` is the post-switch sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayEvent {
    pub time: f64,
    pub direction: RelaySign,
}

/// Behaviour of the closed relay when the input touches a threshold without crossing it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SwitchPolicy {
    #[default]
    NeverAtTouch,
    AlwaysAtTouch,
}

/// `true` iff `(z - 1)(u - rho2) >= 0` and `(z + 1)(u - rho1) >= 0`.
pub fn check_confinement(u: f64, z: RelaySign, rho: Threshold) -> bool {
    let z = z.as_f64();
    (z - 1.0) * (u - rho.rho2) >= 0.0 && (z + 1.0) * (u - rho.rho1) >= 0.0
}

pub fn relay_evolve(
    sig: &PiecewiseMonotoneSignal,
    rho: Threshold,
    z0: RelaySign,
) -> Result<(RelaySign, Vec<RelayEvent>)> {
    relay_evolve_with(sig, rho, z0, SwitchPolicy::NeverAtTouch)
}

pub fn relay_evolve_with(
    sig: &PiecewiseMonotoneSignal,
    rho: Threshold,
    z0: RelaySign,
    policy: SwitchPolicy,
) -> Result<(RelaySign, Vec<RelayEvent>)> {
    let u0 = sig.initial_value();
    if !check_confinement(u0, z0, rho) {
        let violated = match z0 {
            RelaySign::Down => "u <= rho2",
            RelaySign::Up => "u >= rho1",
        };
        return Err(Error::IncompatibleInitialState {
            u: u0,
            z: z0.value(),
            rho1: rho.rho1,
            rho2: rho.rho2,
            violated,
        });
    }
    let fires_up = |v: f64| match policy {
        SwitchPolicy::NeverAtTouch => v > rho.rho2,
        SwitchPolicy::AlwaysAtTouch => v >= rho.rho2,
    };
    let fires_down = |v: f64| match policy {
        SwitchPolicy::NeverAtTouch => v < rho.rho1,
        SwitchPolicy::AlwaysAtTouch => v <= rho.rho1,
    };
    let fires = |z: RelaySign, v: f64| match z {
        RelaySign::Down => fires_up(v),
        RelaySign::Up => fires_down(v),
    };

    let mut z = z0;
    let mut events = Vec::new();
    if fires(z, u0) {
        z = z.flipped();
        events.push(RelayEvent { time: 0.0, direction: z });
    }
    let (times, values) = (sig.times(), sig.values());
    for i in 1..times.len() {
        let v = values[i];
        if !fires(z, v) {
            continue;
        }
        let time = match sig.mode() {
            Interpolation::Step => times[i],
            Interpolation::Linear => {
                let level = match z {
                    RelaySign::Down => rho.rho2,
                    RelaySign::Up => rho.rho1,
                };
                let (ta, tb, va) = (times[i - 1], times[i], values[i - 1]);
                let frac = ((level - va) / (v - va)).clamp(0.0, 1.0);
                (ta + frac * (tb - ta)).min(tb)
            }
        };
        z = z.flipped();
        events.push(RelayEvent { time, direction: z });
    }
    Ok((z, events))
}

/// Sum of `2 rho2` over up-switches minus `2 rho1` over down-switches with time in `[t0, t1)`.
pub fn psi_rho(events: &[RelayEvent], rho: Threshold, interval: (f64, f64)) -> f64 {
    events
        .iter()
        .filter(|e| e.time >= interval.0 && e.time < interval.1)
        .map(|e| match e.direction {
            RelaySign::Up => 2.0 * rho.rho2,
            RelaySign::Down => -2.0 * rho.rho1,
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn th(a: f64, b: f64) -> Threshold {
        Threshold::new(a, b).unwrap()
    }

    // Brute-force relay on a dense time grid; returns approximate switch times.
    fn dense_oracle(sig: &PiecewiseMonotoneSignal, rho: Threshold, z0: RelaySign) -> Vec<f64> {
        let steps = 200_000;
        let dt = sig.end_time() / steps as f64;
        let mut z = z0;
        let mut out = Vec::new();
        for k in 0..=steps {
            let t = k as f64 * dt;
            let u = sig.value(t);
            let next = match z {
                RelaySign::Down if u > rho.rho2() => RelaySign::Up,
                RelaySign::Up if u < rho.rho1() => RelaySign::Down,
                s => s,
            };
            if next != z {
                out.push(t);
                z = next;
            }
        }
        out
    }

    #[test]
    fn constant_input_never_switches() {
        let sig = PiecewiseMonotoneSignal::constant(0.0, 1.0).unwrap();
        let (z, ev) = relay_evolve(&sig, th(-1.0, 1.0), RelaySign::Down).unwrap();
        assert_eq!(z, RelaySign::Down);
        assert!(ev.is_empty());
    }

    #[test]
    fn jump_over_upper_threshold_switches_at_jump_time() {
        let sig =
            PiecewiseMonotoneSignal::new(vec![(0.0, 0.0), (0.5, 2.0), (1.0, 2.0)], Interpolation::Step)
                .unwrap();
        let (z, ev) = relay_evolve(&sig, th(-1.0, 1.0), RelaySign::Down).unwrap();
        assert_eq!(z, RelaySign::Up);
        assert_eq!(ev, vec![RelayEvent { time: 0.5, direction: RelaySign::Up }]);
    }

    #[test]
    fn linear_crossings_match_dense_oracle() {
        let sig = PiecewiseMonotoneSignal::new(
            vec![(0.0, 0.0), (1.0, 2.0), (2.0, -2.0)],
            Interpolation::Linear,
        )
        .unwrap();
        let rho = th(-1.0, 1.0);
        let (z, ev) = relay_evolve(&sig, rho, RelaySign::Down).unwrap();
        let oracle = dense_oracle(&sig, rho, RelaySign::Down);
        assert_eq!(z, RelaySign::Down);
        assert_eq!(ev.len(), 2);
        assert_eq!(oracle.len(), 2);
        assert_eq!(ev[0].time, 0.5);
        assert_eq!(ev[1].time, 1.75);
        for (e, o) in ev.iter().zip(&oracle) {
            assert!((e.time - o).abs() < 1e-4);
        }
    }

    #[test]
    fn confinement_cases() {
        let rho = th(-1.0, 1.0);
        assert!(check_confinement(0.0, RelaySign::Down, rho));
        assert!(!check_confinement(2.0, RelaySign::Down, rho));
        assert!(check_confinement(1.0, RelaySign::Up, rho));
        assert!(!check_confinement(-1.5, RelaySign::Up, rho));
    }

    #[test]
    fn incompatible_start_is_rejected() {
        let sig = PiecewiseMonotoneSignal::constant(2.0, 1.0).unwrap();
        let err = relay_evolve(&sig, th(-1.0, 1.0), RelaySign::Down).unwrap_err();
        assert!(matches!(err, Error::IncompatibleInitialState { .. }));
    }

    #[test]
    fn touching_threshold_depends_on_policy() {
        let sig = PiecewiseMonotoneSignal::from_values(&[0.0, 1.0, 0.0], Interpolation::Linear)
            .unwrap();
        let rho = th(-1.0, 1.0);
        let (z, _) = relay_evolve(&sig, rho, RelaySign::Down).unwrap();
        assert_eq!(z, RelaySign::Down);
        let (z, ev) =
            relay_evolve_with(&sig, rho, RelaySign::Down, SwitchPolicy::AlwaysAtTouch).unwrap();
        assert_eq!(z, RelaySign::Up);
        assert_eq!(ev[0].time, 1.0);
    }

    #[test]
    fn psi_values() {
        let rho = th(-0.2, 0.3);
        let up = RelayEvent { time: 0.2, direction: RelaySign::Up };
        let down = RelayEvent { time: 0.4, direction: RelaySign::Down };
        assert!((psi_rho(&[up], rho, (0.0, 1.0)) - 0.6).abs() < 1e-15);
        assert_eq!(psi_rho(&[], rho, (0.0, 1.0)), 0.0);
        assert!((psi_rho(&[up, down], rho, (0.0, 1.0)) - 1.0).abs() < 1e-15);
        // right-open interval
        assert_eq!(psi_rho(&[up], rho, (0.0, 0.2)), 0.0);
        assert!((psi_rho(&[up], rho, (0.2, 0.3)) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn split_and_reparameterize_keep_shape() {
        let sig = PiecewiseMonotoneSignal::from_values(&[0.0, 1.0, -1.0, 0.5], Interpolation::Linear)
            .unwrap();
        let (a, b) = sig.split_at(2).unwrap();
        assert_eq!(a.values(), &[0.0, 1.0, -1.0]);
        assert_eq!(b.values(), &[-1.0, 0.5]);
        assert_eq!(b.times(), &[0.0, 1.0]);
        let r = sig.reparameterize(|t| t * t + t).unwrap();
        assert_eq!(r.times(), &[0.0, 2.0, 6.0, 12.0]);
        assert!(sig.reparameterize(|t| -t).is_err());
    }

    fn signal_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, bool)> {
        (2usize..12).prop_flat_map(|n| {
            (
                prop::collection::vec(-2.0f64..2.0, n),
                prop::collection::vec(0.01f64..3.0, n),
                any::<bool>(),
            )
        })
    }

    fn build(values: &[f64], gaps: &[f64], step: bool) -> PiecewiseMonotoneSignal {
        let mut t = 0.0;
        let samples = values
            .iter()
            .zip(gaps)
            .enumerate()
            .map(|(i, (&v, &g))| {
                if i > 0 {
                    t += g;
                }
                (t, v)
            })
            .collect();
        let mode = if step { Interpolation::Step } else { Interpolation::Linear };
        PiecewiseMonotoneSignal::new(samples, mode).unwrap()
    }

    fn compatible_start(u0: f64, rho: Threshold) -> RelaySign {
        if u0 > rho.rho2() {
            RelaySign::Up
        } else {
            RelaySign::Down
        }
    }

    proptest! {
        #[test]
        fn rate_independence((values, gaps, step) in signal_strategy(), r1 in -2.0f64..2.0, w in 0.01f64..2.0, p in 0.3f64..3.0) {
            let rho = th(r1, r1 + w);
            let sig = build(&values, &gaps, step);
            let z0 = compatible_start(values[0], rho);
            let (z, ev) = relay_evolve(&sig, rho, z0).unwrap();
            let end = sig.end_time();
            let warped = sig.reparameterize(|t| end * (t / end).powf(p) + t).unwrap();
            let (z2, ev2) = relay_evolve(&warped, rho, z0).unwrap();
            prop_assert_eq!(z, z2);
            prop_assert_eq!(ev.len(), ev2.len());
            for (a, b) in ev.iter().zip(&ev2) {
                prop_assert_eq!(a.direction, b.direction);
            }
        }

        #[test]
        fn semigroup((values, gaps, step) in signal_strategy(), r1 in -2.0f64..2.0, w in 0.01f64..2.0, k in 0usize..12) {
            let rho = th(r1, r1 + w);
            let sig = build(&values, &gaps, step);
            let k = k % sig.len();
            let z0 = compatible_start(values[0], rho);
            let (z, ev) = relay_evolve(&sig, rho, z0).unwrap();
            let (head, tail) = sig.split_at(k).unwrap();
            let (zm, ev1) = relay_evolve(&head, rho, z0).unwrap();
            let (z2, ev2) = relay_evolve(&tail, rho, zm).unwrap();
            prop_assert_eq!(z, z2);
            prop_assert_eq!(ev.len(), ev1.len() + ev2.len());
        }

        #[test]
        fn confinement_and_psi_inequality((values, gaps, step) in signal_strategy(), r1 in -2.0f64..2.0, w in 0.01f64..2.0) {
            let rho = th(r1, r1 + w);
            let sig = build(&values, &gaps, step);
            let z0 = compatible_start(values[0], rho);
            let (_, ev) = relay_evolve(&sig, rho, z0).unwrap();
            let mut work = 0.0;
            for e in &ev {
                let u = sig.value(e.time);
                prop_assert!(check_confinement(u, e.direction, rho) || (u - rho.rho2()).abs() < 1e-12 || (u - rho.rho1()).abs() < 1e-12);
                work += 2.0 * u * e.direction.as_f64();
            }
            let psi = psi_rho(&ev, rho, (0.0, f64::INFINITY));
            prop_assert!(work >= psi - 1e-12);
            if !step {
                prop_assert!((work - psi).abs() < 1e-9);
            }
        }
    }
}
