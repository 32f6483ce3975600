use super::evolve::wave_pattern;
use super::{Cell, Front, FrontKind, PiecewiseState};
use crate::error::{Error, Result};
use crate::preisach::{dyadic_step, quantize_anchored, MemoryCurve};

/// Piecewise constant initial data; `cells[0]` extends to `-∞` and the last cell to `+∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub breakpoints: Vec<f64>,
    pub cells: Vec<Cell>,
}

impl InitialData {
    pub fn new(breakpoints: Vec<f64>, cells: Vec<Cell>) -> Result<Self> {
        if cells.len() != breakpoints.len() + 1 {
            return Err(Error::IncompatibleData(format!(
                "{} breakpoints need {} cells, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                cells.len()
            )));
        }
        if breakpoints.iter().any(|x| !x.is_finite()) || breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::IncompatibleData("breakpoints must be finite and strictly increasing".into()));
        }
        let a = cells[0].curve.a();
        if cells.iter().any(|c| c.curve.a() != a) {
            return Err(Error::IncompatibleData("cells use different triangles".into()));
        }
        Ok(Self { breakpoints, cells })
    }

    /// Contiguous pieces `(x_left, x_right, u, curve)`; the outermost pieces are extended to
    /// infinity.
    pub fn from_pieces(pieces: Vec<(f64, f64, f64, MemoryCurve)>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::IncompatibleData("no pieces".into()));
        }
        let mut breakpoints = Vec::with_capacity(pieces.len() - 1);
        for w in pieces.windows(2) {
            if w[0].1 != w[1].0 {
                return Err(Error::IncompatibleData(format!(
                    "pieces do not partition an interval: {} != {}",
                    w[0].1, w[1].0
                )));
            }
            breakpoints.push(w[0].1);
        }
        if pieces.iter().any(|p| p.0.partial_cmp(&p.1) != Some(std::cmp::Ordering::Less)) {
            return Err(Error::IncompatibleData("empty piece".into()));
        }
        let cells = pieces.into_iter().map(|(_, _, u, c)| Cell::new(u, c)).collect::<Result<Vec<_>>>()?;
        Self::new(breakpoints, cells)
    }

    pub fn total_variation_u(&self) -> f64 {
        self.cells.windows(2).map(|w| (w[1].u - w[0].u).abs()).sum()
    }
}

fn variation(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Rounds `values` onto `2^-n ℤ ∩ [-a, a]` without increasing their total variation.
///
/// Nearest rounding (ties toward `-∞`) is used when it keeps the variation; otherwise the
/// shifted floor `⌊(u + θ)/h⌋ h` with the variation-minimising `θ ∈ [0, h)`. The average of
/// the shifted variation over `θ` equals the original variation, so the minimum never
/// exceeds it; the pointwise error stays below `h`.
pub fn round_to_grid(values: &[f64], n: u32, a: f64) -> Vec<f64> {
    let h = dyadic_step(n);
    let top = (a / h).floor() * h;
    let clamp = |v: f64| v.clamp(-top, top);
    let nearest: Vec<f64> = values.iter().map(|&u| clamp((u / h - 0.5).ceil() * h)).collect();
    let target = variation(values);
    if variation(&nearest) <= target {
        return nearest;
    }
    let mut thetas: Vec<f64> = values.iter().map(|&u| (u / h).ceil() * h - u).filter(|&t| t < h).collect();
    thetas.push(0.0);
    thetas.sort_by(f64::total_cmp);
    thetas.dedup();
    let shifted = |theta: f64| -> Vec<f64> { values.iter().map(|&u| clamp(((u + theta) / h).floor() * h)).collect() };
    let sup_err = |r: &[f64]| r.iter().zip(values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    thetas
        .into_iter()
        .map(shifted)
        .min_by(|x, y| variation(x).total_cmp(&variation(y)).then(sup_err(x).total_cmp(&sup_err(y))))
        .expect("at least theta = 0")
}

/// Rounds the data to level `n`, quantizes the curves and splits every jump into grid
/// fronts.
pub fn discretize_initial(data: &InitialData, n: u32) -> Result<PiecewiseState> {
    let a = data.cells[0].curve.a();
    let us: Vec<f64> = data.cells.iter().map(|c| c.u).collect();
    let rounded = round_to_grid(&us, n, a);
    let mut cells: Vec<Cell> = Vec::with_capacity(data.cells.len());
    let mut breaks: Vec<f64> = Vec::with_capacity(data.breakpoints.len());
    for (i, (c, &u)) in data.cells.iter().zip(&rounded).enumerate() {
        let curve: MemoryCurve = quantize_anchored(&c.curve, n, u)?;
        let cell = Cell::from_curve(curve);
        if let Some(last) = cells.last() {
            if *last == cell {
                continue;
            }
            breaks.push(data.breakpoints[i - 1]);
        }
        cells.push(cell);
    }
    let mut out_cells = vec![cells[0].clone()];
    let mut fronts = Vec::new();
    for (k, &x) in breaks.iter().enumerate() {
        let pattern = wave_pattern(&cells[k], &cells[k + 1], n)?;
        for (j, &speed) in pattern.speeds.iter().enumerate() {
            let kind = if pattern.cells[j].u == pattern.cells[j + 1].u { FrontKind::ZStationary } else { FrontKind::UShock };
            fronts.push(Front { id: fronts.len(), origin_x: x, origin_t: 0.0, speed, kind });
            out_cells.push(pattern.cells[j + 1].clone());
        }
    }
    PiecewiseState::new(0.0, out_cells, fronts)
}
