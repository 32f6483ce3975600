//! Exact areas, moments and L¹ distances for staircase curves.

use super::curve::{Line, MemoryCurve, Piece};
use crate::relay::RelaySign;

/// Region of relays flipped by one monotone move.
#[derive(Debug, Clone, PartialEq)]
pub struct FlipRegion {
    pub polygon: Vec<(f64, f64)>,
    pub direction: RelaySign,
}

/// Signed area and first moments `(A, ∫ρ₁, ∫ρ₂)` of a simple polygon.
pub fn polygon_moments(poly: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = poly.len();
    if n < 3 {
        return (0.0, 0.0, 0.0);
    }
    let (mut a, mut mx, mut my) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (x0, y0) = poly[i];
        let (x1, y1) = poly[(i + 1) % n];
        let cross = x0 * y1 - x1 * y0;
        a += cross;
        mx += (x0 + x1) * cross;
        my += (y0 + y1) * cross;
    }
    (a / 2.0, mx / 6.0, my / 6.0)
}

impl FlipRegion {
    pub fn empty(direction: RelaySign) -> Self {
        Self { polygon: Vec::new(), direction }
    }

    pub fn is_empty(&self) -> bool {
        self.area() == 0.0
    }

    /// Unsigned area and first moments.
    pub fn moments(&self) -> (f64, f64, f64) {
        let (a, mx, my) = polygon_moments(&self.polygon);
        if a < 0.0 {
            (-a, -mx, -my)
        } else {
            (a, mx, my)
        }
    }

    pub fn area(&self) -> f64 {
        self.moments().0
    }

    /// `∫ 2ρ₂` over an up-flip, `-∫ 2ρ₁` over a down-flip.
    pub fn psi(&self) -> f64 {
        let (_, m1, m2) = self.moments();
        match self.direction {
            RelaySign::Up => 2.0 * m2,
            RelaySign::Down => -2.0 * m1,
        }
    }

    /// Change of the Preisach output caused by the flip.
    pub fn delta_w(&self) -> f64 {
        2.0 * self.area() * self.direction.as_f64()
    }

    /// Even-odd point test; boundary points may go either way.
    pub fn contains(&self, p: (f64, f64)) -> bool {
        let n = self.polygon.len();
        if n < 3 {
            return false;
        }
        let mut inside = false;
        for i in 0..n {
            let (xi, yi) = self.polygon[i];
            let (xj, yj) = self.polygon[(i + n - 1) % n];
            if (yi > p.1) != (yj > p.1) && p.0 < (xj - xi) * (p.1 - yi) / (yj - yi) + xi {
                inside = !inside;
            }
        }
        inside
    }
}

/// Area of the `+1` region, `∫(H(ρ₁) - ρ₁) dρ₁`.
pub(crate) fn area_plus(curve: &MemoryCurve) -> f64 {
    curve
        .profile()
        .iter()
        .map(|p| {
            let sq = p.x1 * p.x1 - p.x0 * p.x0;
            match p.line {
                Line::AntiDiagonal => -sq,
                Line::Flat(m) => m * (p.x1 - p.x0) - sq / 2.0,
                Line::Diagonal => 0.0,
            }
        })
        .sum()
}

/// `∫ |f|` over `[x0, x1]` for `f` linear with end values `f0`, `f1`.
fn abs_linear_integral(f0: f64, f1: f64, width: f64) -> f64 {
    if f0 * f1 >= 0.0 {
        0.5 * (f0.abs() + f1.abs()) * width
    } else {
        0.5 * (f0 * f0 + f1 * f1) / (f0 - f1).abs() * width
    }
}

/// Walks two profiles over their common refinement, yielding `(x0, x1, line_a, line_b)`.
pub(crate) fn refine<'a>(
    pa: &'a [Piece],
    pb: &'a [Piece],
) -> impl Iterator<Item = (f64, f64, Line, Line)> + 'a {
    let (mut i, mut j) = (0usize, 0usize);
    let mut x = pa.first().map(|p| p.x0).unwrap_or(0.0);
    std::iter::from_fn(move || {
        while i < pa.len() && j < pb.len() {
            let end = pa[i].x1.min(pb[j].x1);
            let out = (x, end, pa[i].line, pb[j].line);
            if pa[i].x1 == end {
                i += 1;
            }
            if pb[j].x1 == end {
                j += 1;
            }
            let start = x;
            x = end;
            if end > start {
                return Some(out);
            }
        }
        None
    })
}

/// `∫ |H₁ - H₂| dρ₁`, the area of the symmetric difference of the `+1` regions.
pub(crate) fn symmetric_difference_area(c1: &MemoryCurve, c2: &MemoryCurve) -> f64 {
    let (p1, p2) = (c1.profile(), c2.profile());
    refine(&p1, &p2)
        .map(|(x0, x1, l1, l2)| abs_linear_integral(l1.at(x0) - l2.at(x0), l1.at(x1) - l2.at(x1), x1 - x0))
        .sum()
}

/// `∫ g(H₁(ρ₁), H₂(ρ₁), ρ₁) dρ₁` by Simpson's rule, exact for quadratic integrands.
pub(crate) fn integrate_pair(
    c1: &MemoryCurve,
    c2: &MemoryCurve,
    g: impl Fn(f64, f64, f64) -> f64,
) -> f64 {
    let (p1, p2) = (c1.profile(), c2.profile());
    refine(&p1, &p2)
        .map(|(x0, x1, l1, l2)| {
            let xm = 0.5 * (x0 + x1);
            let f = |x: f64| g(l1.at(x), l2.at(x), x);
            (x1 - x0) / 6.0 * (f(x0) + 4.0 * f(xm) + f(x1))
        })
        .sum()
}

/// `∫ (H₁² - H₀²)` where the ceiling rises and `∫ -2ρ₁ (H₀ - H₁)` where it falls, for the
/// jump from `c0` to `c1`.
pub(crate) fn jump_psi(c0: &MemoryCurve, c1: &MemoryCurve) -> f64 {
    let (p0, p1) = (c0.profile(), c1.profile());
    let simpson = |x0: f64, x1: f64, f: &dyn Fn(f64) -> f64| {
        (x1 - x0) / 6.0 * (f(x0) + 4.0 * f(0.5 * (x0 + x1)) + f(x1))
    };
    refine(&p0, &p1)
        .map(|(x0, x1, l0, l1)| {
            let d = |x: f64| l1.at(x) - l0.at(x);
            let (d0, d1) = (d(x0), d(x1));
            let mut cuts = vec![x0];
            if d0 * d1 < 0.0 {
                cuts.push(x0 + (x1 - x0) * d0 / (d0 - d1));
            }
            cuts.push(x1);
            cuts.windows(2)
                .map(|w| {
                    if d(0.5 * (w[0] + w[1])) >= 0.0 {
                        simpson(w[0], w[1], &|x| l1.at(x).powi(2) - l0.at(x).powi(2))
                    } else {
                        simpson(w[0], w[1], &|x| -2.0 * x * (l0.at(x) - l1.at(x)))
                    }
                })
                .sum::<f64>()
        })
        .sum()
}
