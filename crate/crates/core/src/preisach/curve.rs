use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Preisach support triangle with vertices `(-a,-a)`, `(a,a)`, `(-a,a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    a: f64,
}

impl Triangle {
    pub fn new(a: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidTriangle(a));
        }
        Ok(Self { a })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn area(&self) -> f64 {
        2.0 * self.a * self.a
    }

    pub fn contains_value(&self, v: f64) -> bool {
        v.is_finite() && v.abs() <= self.a
    }

    pub(crate) fn check_value(&self, v: f64) -> Result<()> {
        if self.contains_value(v) {
            Ok(())
        } else {
            Err(Error::OutOfTriangle { value: v, a: self.a })
        }
    }
}

/// Staircase memory curve encoded by its reduced memory sequence.
///
/// `corners` are the retained alternating extrema; `anchor` is the current input,
/// where the staircase meets the diagonal. Everything before the first corner is the
/// anti-diagonal of the virgin state. The anchor never repeats the last corner.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryCurve {
    triangle: Triangle,
    corners: Vec<f64>,
    anchor: f64,
}

/// One linear piece of the ceiling of the `+1` region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Line {
    AntiDiagonal,
    Flat(f64),
    Diagonal,
}

impl Line {
    pub(crate) fn at(self, x: f64) -> f64 {
        match self {
            Line::AntiDiagonal => -x,
            Line::Flat(m) => m,
            Line::Diagonal => x,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Piece {
    pub x0: f64,
    pub x1: f64,
    pub line: Line,
}

impl MemoryCurve {
    pub fn new(triangle: Triangle, corners: Vec<f64>, anchor: f64) -> Result<Self> {
        let curve = Self { triangle, corners, anchor };
        curve.validate()?;
        Ok(curve)
    }

    pub(crate) fn from_parts_unchecked(triangle: Triangle, corners: Vec<f64>, anchor: f64) -> Self {
        let curve = Self { triangle, corners, anchor };
        debug_assert!(curve.validate().is_ok(), "{:?}", curve.validate());
        curve
    }

    pub fn virgin(triangle: Triangle) -> Self {
        Self { triangle, corners: Vec::new(), anchor: 0.0 }
    }

    pub fn triangle(&self) -> Triangle {
        self.triangle
    }

    pub fn a(&self) -> f64 {
        self.triangle.a
    }

    pub fn corners(&self) -> &[f64] {
        &self.corners
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn is_virgin(&self) -> bool {
        self.corners.is_empty() && self.anchor == 0.0
    }

    /// Corners followed by the anchor.
    pub fn sequence(&self) -> Vec<f64> {
        let mut s = self.corners.clone();
        s.push(self.anchor);
        s
    }

    pub fn first_is_max(&self) -> bool {
        match self.corners.first() {
            Some(&c) => c > 0.0,
            None => self.anchor > 0.0,
        }
    }

    /// `Some(true)` if the anchor closes an increasing run, `Some(false)` a decreasing
    /// one, `None` for the virgin anchor.
    pub(crate) fn anchor_is_max(&self) -> Option<bool> {
        match self.corners.last() {
            Some(&c) => Some(self.anchor > c),
            None if self.anchor > 0.0 => Some(true),
            None if self.anchor < 0.0 => Some(false),
            None => None,
        }
    }

    fn validate(&self) -> Result<()> {
        let a = self.triangle.a;
        let s = self.sequence();
        for &v in &s {
            if !self.triangle.contains_value(v) {
                return Err(Error::OutOfTriangle { value: v, a });
            }
        }
        // The virgin prehistory acts as a mirrored predecessor -s[0].
        let mut prev = -s[0];
        let mut prev_swing = f64::INFINITY;
        for (i, &v) in s.iter().enumerate() {
            let swing = v - prev;
            if i == 0 {
                if s.len() > 1 && v == 0.0 {
                    return Err(Error::InvalidCurve("first corner on the anti-diagonal apex".into()));
                }
            } else {
                if swing == 0.0 || swing.signum() == prev_swing.signum() {
                    return Err(Error::InvalidCurve(format!("sequence {s:?} does not alternate at {i}")));
                }
                if swing.abs() >= prev_swing.abs() {
                    return Err(Error::InvalidCurve(format!("sequence {s:?} is not nested at {i}")));
                }
            }
            prev = v;
            prev_swing = swing;
        }
        Ok(())
    }

    /// Vertices of the staircase from `(-a, a)` to `(anchor, anchor)`.
    pub fn polyline(&self) -> Vec<(f64, f64)> {
        let a = self.triangle.a;
        let s = self.sequence();
        let mut pts = vec![(-a, a)];
        let mut push = |p: (f64, f64)| {
            if *pts.last().expect("nonempty") != p {
                pts.push(p);
            }
        };
        let s0 = s[0];
        push(if s0 >= 0.0 { (-s0, s0) } else { (s0, -s0) });
        let mut prev = -s0;
        for i in 0..s.len() {
            let next = s.get(i + 1).copied().unwrap_or(s[i]);
            if s[i] > prev {
                push((next, s[i]));
            } else {
                push((s[i], next));
            }
            prev = s[i];
        }
        pts
    }

    /// The ceiling `H(rho1)` of the `+1` region on `[-a, a]` as linear pieces.
    pub(crate) fn profile(&self) -> Vec<Piece> {
        let pts = self.polyline();
        let mut pieces = Vec::with_capacity(pts.len());
        for (k, w) in pts.windows(2).enumerate() {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            if x1 <= x0 {
                continue;
            }
            let line = if k == 0 && y1 != y0 { Line::AntiDiagonal } else { Line::Flat(y0) };
            pieces.push(Piece { x0, x1, line });
        }
        if self.anchor < self.triangle.a {
            pieces.push(Piece { x0: self.anchor, x1: self.triangle.a, line: Line::Diagonal });
        }
        pieces
    }
}

impl fmt::Display for MemoryCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let corners: Vec<String> = self.corners.iter().map(|c| format!("{c:?}")).collect();
        write!(
            f,
            "{:?}; {}; {}; {:?}",
            self.triangle.a,
            self.first_is_max(),
            corners.join(", "),
            self.anchor
        )
    }
}

impl FromStr for MemoryCurve {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fields: Vec<&str> = s.split(';').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(Error::Parse(format!("expected 4 ';'-separated fields, got {}", fields.len())));
        }
        let num = |t: &str| -> Result<f64> {
            t.parse::<f64>().map_err(|e| Error::Parse(format!("bad number {t:?}: {e}")))
        };
        let triangle = Triangle::new(num(fields[0])?)?;
        let first_is_max = match fields[1] {
            "true" | "max" => true,
            "false" | "min" => false,
            other => return Err(Error::Parse(format!("bad first-is-max flag {other:?}"))),
        };
        let corners = fields[2]
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(num)
            .collect::<Result<Vec<_>>>()?;
        let curve = MemoryCurve::new(triangle, corners, num(fields[3])?)?;
        if !curve.corners.is_empty() && curve.first_is_max() != first_is_max {
            return Err(Error::Parse("first-is-max flag contradicts the corners".into()));
        }
        Ok(curve)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri() -> Triangle {
        Triangle::new(1.0).unwrap()
    }

    #[test]
    fn validation_rules() {
        assert!(MemoryCurve::new(tri(), vec![0.5], 0.2).is_ok());
        assert!(MemoryCurve::new(tri(), vec![0.5], 0.5).is_err());
        assert!(MemoryCurve::new(tri(), vec![0.5], 0.7).is_err());
        // the virgin prehistory dominates: a max M must be followed by something above -M
        assert!(MemoryCurve::new(tri(), vec![0.5], -0.6).is_err());
        assert!(MemoryCurve::new(tri(), vec![0.5, -0.4], 0.1).is_ok());
        assert!(MemoryCurve::new(tri(), vec![0.5, -0.4], 0.45).is_ok());
        assert!(MemoryCurve::new(tri(), vec![0.5, -0.4], 0.55).is_err());
        assert!(MemoryCurve::new(tri(), vec![0.0], 0.1).is_err());
        assert!(MemoryCurve::new(tri(), vec![], 1.2).is_err());
        assert!(Triangle::new(0.0).is_err());
    }

    #[test]
    fn polyline_shapes() {
        let c = MemoryCurve::new(tri(), vec![0.5], 0.2).unwrap();
        assert_eq!(c.polyline(), vec![(-1.0, 1.0), (-0.5, 0.5), (0.2, 0.5), (0.2, 0.2)]);
        let v = MemoryCurve::virgin(tri());
        assert_eq!(v.polyline(), vec![(-1.0, 1.0), (0.0, 0.0)]);
        let d = MemoryCurve::new(tri(), vec![-0.5], -0.2).unwrap();
        assert_eq!(d.polyline(), vec![(-1.0, 1.0), (-0.5, 0.5), (-0.5, -0.2), (-0.2, -0.2)]);
        let low = MemoryCurve::new(tri(), vec![], -1.0).unwrap();
        assert_eq!(low.polyline(), vec![(-1.0, 1.0), (-1.0, -1.0)]);
    }

    #[test]
    fn serialization_round_trip() {
        let c = MemoryCurve::new(tri(), vec![0.75, -0.5], 0.25).unwrap();
        let text = c.to_string();
        assert_eq!(text, "1.0; true; 0.75, -0.5; 0.25");
        assert_eq!(text.parse::<MemoryCurve>().unwrap(), c);
        let v: MemoryCurve = "1; false; ; 0".parse().unwrap();
        assert!(v.is_virgin());
        assert!("1; false; 0.75, -0.5; 0.25".parse::<MemoryCurve>().is_err());
        assert!("1; true; 0.75".parse::<MemoryCurve>().is_err());
        assert!("1; true; x; 0.25".parse::<MemoryCurve>().is_err());
    }
}
