//! Brute-force Preisach backend: a grid of independently switched relays.

use crate::error::{Error, Result};
use crate::preisach::Triangle;
use crate::relay::{Interpolation, PiecewiseMonotoneSignal, RelaySign};

/// Relays at the centres of an `N x N` grid over `[-a, a]²`, restricted to centres with
/// `ρ₁ < ρ₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelayBank {
    triangle: Triangle,
    n: usize,
    centers: Vec<(f64, f64)>,
    signs: Vec<RelaySign>,
    input: f64,
}

/// Ψ contributions per input move, keyed like [`crate::preisach::ConfigEventLog`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BankLog {
    pub entries: Vec<(f64, f64)>,
}

impl RelayBank {
    pub fn triangle(&self) -> Triangle {
        self.triangle
    }

    pub fn cells_per_side(&self) -> usize {
        self.n
    }

    pub fn cell_area(&self) -> f64 {
        let d = 2.0 * self.triangle.a() / self.n as f64;
        d * d
    }

    pub fn active_cells(&self) -> usize {
        self.centers.len()
    }

    pub fn centers(&self) -> &[(f64, f64)] {
        &self.centers
    }

    pub fn signs(&self) -> &[RelaySign] {
        &self.signs
    }

    pub fn input(&self) -> f64 {
        self.input
    }
}

pub fn bank_init(
    triangle: Triangle,
    n: usize,
    generating: Option<&PiecewiseMonotoneSignal>,
) -> Result<RelayBank> {
    if n < 2 {
        return Err(Error::OutOfRange { value: n as f64, lo: 2.0, hi: f64::INFINITY });
    }
    let a = triangle.a();
    let d = 2.0 * a / n as f64;
    let mut centers = Vec::with_capacity(n * n / 2);
    let mut signs = Vec::with_capacity(n * n / 2);
    for i in 0..n {
        let r1 = -a + (i as f64 + 0.5) * d;
        for j in (i + 1)..n {
            let r2 = -a + (j as f64 + 0.5) * d;
            centers.push((r1, r2));
            signs.push(if r2 > -r1 { RelaySign::Down } else { RelaySign::Up });
        }
    }
    let bank = RelayBank { triangle, n, centers, signs, input: 0.0 };
    match generating {
        Some(sig) => Ok(bank_evolve(&bank, sig)?.0),
        None => Ok(bank),
    }
}

/// Evolves every relay along `sig` with the never-at-touch rule. A first sample away from
/// the current input is a jump at `t = 0`.
pub fn bank_evolve(bank: &RelayBank, sig: &PiecewiseMonotoneSignal) -> Result<(RelayBank, BankLog)> {
    for &v in sig.values() {
        bank.triangle.check_value(v)?;
    }
    let (times, values) = (sig.times(), sig.values());
    let mut moves: Vec<(f64, f64)> = Vec::with_capacity(values.len());
    let mut prev = bank.input;
    for (i, &v) in values.iter().enumerate() {
        if v == prev {
            continue;
        }
        let time = match (i, sig.mode()) {
            (0, _) => 0.0,
            (_, Interpolation::Linear) => times[i - 1],
            (_, Interpolation::Step) => times[i],
        };
        moves.push((time, v));
        prev = v;
    }
    let mut psi = vec![0.0; moves.len()];
    let mut signs = bank.signs.clone();
    for (z, &(r1, r2)) in signs.iter_mut().zip(&bank.centers) {
        for (k, &(_, v)) in moves.iter().enumerate() {
            match *z {
                RelaySign::Down if v > r2 => {
                    *z = RelaySign::Up;
                    psi[k] += 2.0 * r2;
                }
                RelaySign::Up if v < r1 => {
                    *z = RelaySign::Down;
                    psi[k] -= 2.0 * r1;
                }
                _ => {}
            }
        }
    }
    let area = bank.cell_area();
    let log = BankLog {
        entries: moves.iter().zip(&psi).map(|(&(t, _), &p)| (t, p * area)).collect(),
    };
    let next = RelayBank { signs, input: prev, ..bank.clone() };
    Ok((next, log))
}

/// Riemann sum of the signs over the active cells.
pub fn bank_w(bank: &RelayBank) -> f64 {
    let s: i64 = bank.signs.iter().map(|z| i64::from(z.value())).sum();
    s as f64 * bank.cell_area()
}

pub fn bank_psi(log: &BankLog, interval: (f64, f64)) -> f64 {
    log.entries
        .iter()
        .filter(|(t, _)| *t >= interval.0 && *t < interval.1)
        .map(|(_, p)| p)
        .sum()
}
