//! Scenario files: TOML with flat keys and repeated `[[piece]]` / `[[probe]]` tables.

use std::path::{Path, PathBuf};

use hystwave_core::analysis::EntropyProbe;
use hystwave_core::preisach::{apply_monotone, apply_signal, saturated};
use hystwave_core::wavefront::InitialData;
use hystwave_core::{Cell, Interpolation, MemoryCurve, PiecewiseMonotoneSignal, RelaySign, Triangle};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Triangle half-width.
    pub a: f64,
    pub n: Option<u32>,
    pub t_end: Option<f64>,
    #[serde(default)]
    pub checkpoints: Vec<f64>,
    pub out: Option<PathBuf>,
    /// Points of the sampled Riemann profile.
    pub samples: Option<usize>,
    #[serde(default, rename = "piece")]
    pub pieces: Vec<PieceSpec>,
    #[serde(default, rename = "probe")]
    pub probes: Vec<ProbeSpec>,
    #[serde(default)]
    pub oracle: OracleSpec,
}

/// Constant piece on `[x_left, x_right)`; the outermost pieces extend to infinity.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub x_left: f64,
    pub x_right: f64,
    pub u: f64,
    /// Serialized memory curve.
    pub curve: Option<String>,
    /// Input values applied to the virgin state; must end at `u`.
    pub signal: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    pub k: f64,
    /// `virgin`, `up`, `down` or a serialized curve; the input is then moved to `k`.
    #[serde(default = "virgin_name")]
    pub history: String,
}

fn virgin_name() -> String {
    "virgin".into()
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    /// Cells per side of the relay bank.
    pub sizes: Option<Vec<usize>>,
    /// Number of random signals when neither `signal` nor `rms` is given.
    pub signals: Option<usize>,
    pub signal: Option<Vec<f64>>,
    /// Reduced memory sequence, replayed from 0 at constant speed.
    pub rms: Option<Vec<f64>>,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        let cfg: Self = toml::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        Triangle::new(self.a)?;
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(CliError::Input(format!("{name} must be finite, got {v}")))
            }
        };
        for p in &self.pieces {
            finite("x_left", p.x_left)?;
            finite("x_right", p.x_right)?;
            finite("u", p.u)?;
            if p.curve.is_some() && p.signal.is_some() {
                return Err(CliError::Input("a piece takes either `curve` or `signal`, not both".into()));
            }
        }
        if let Some(t) = self.t_end {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::Input(format!("t_end must be positive, got {t}")));
            }
        }
        Ok(())
    }

    pub fn triangle(&self) -> Triangle {
        Triangle::new(self.a).expect("validated")
    }

    pub fn t_end(&self) -> Result<f64, CliError> {
        self.t_end.ok_or_else(|| CliError::Input("missing `t_end`".into()))
    }

    pub fn n(&self) -> Result<u32, CliError> {
        self.n.ok_or_else(|| CliError::Input("missing grid level `n`".into()))
    }

    /// `(u, curve)` of every piece, with compatibility checked.
    pub fn cells(&self) -> Result<Vec<Cell>, CliError> {
        let tri = self.triangle();
        self.pieces
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let curve = match (&p.curve, &p.signal) {
                    (Some(text), _) => text.parse::<MemoryCurve>()?,
                    (None, Some(values)) => {
                        let sig = PiecewiseMonotoneSignal::from_values(values, Interpolation::Linear)?;
                        apply_signal(&MemoryCurve::virgin(tri), &sig)?.0
                    }
                    (None, None) => apply_monotone(&MemoryCurve::virgin(tri), p.u)?.0,
                };
                if curve.a() != self.a {
                    return Err(CliError::Input(format!("piece {i}: curve triangle {} differs from a = {}", curve.a(), self.a)));
                }
                Cell::new(p.u, curve).map_err(|e| CliError::Input(format!("piece {i}: {e}")))
            })
            .collect()
    }

    pub fn initial_data(&self) -> Result<InitialData, CliError> {
        let cells = self.cells()?;
        if cells.is_empty() {
            return Err(CliError::Input("no [[piece]] tables".into()));
        }
        let pieces = self
            .pieces
            .iter()
            .zip(cells)
            .map(|(p, c)| (p.x_left, p.x_right, c.u, c.curve))
            .collect();
        Ok(InitialData::from_pieces(pieces)?)
    }

    pub fn probes(&self) -> Result<Vec<EntropyProbe>, CliError> {
        let tri = self.triangle();
        self.probes
            .iter()
            .map(|p| {
                let base = match p.history.as_str() {
                    "virgin" => MemoryCurve::virgin(tri),
                    "up" => saturated(tri, RelaySign::Up),
                    "down" => saturated(tri, RelaySign::Down),
                    text => text.parse()?,
                };
                Ok(EntropyProbe::from_history(&base, p.k)?)
            })
            .collect()
    }

    /// Checkpoints from the flag if given, else from the file; each must lie in `[0, t_end]`.
    pub fn checkpoint_times(&self, over: Option<&[f64]>, t_end: f64) -> Result<Vec<f64>, CliError> {
        let times = over.map_or_else(|| self.checkpoints.clone(), <[f64]>::to_vec);
        if let Some(t) = times.iter().find(|t| !(**t >= 0.0 && **t <= t_end)) {
            return Err(CliError::Input(format!("checkpoint {t} outside [0, {t_end}]")));
        }
        Ok(times)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ScenarioConfig, CliError> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| CliError::Input(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    #[test]
    fn piece_curves_from_signal_curve_or_default() {
        let cfg = parse(
            "a = 1.0\n[[piece]]\nx_left = 0.0\nx_right = 1.0\nu = 0.5\nsignal = [1.0, 0.5]\n\
             [[piece]]\nx_left = 1.0\nx_right = 2.0\nu = 0.0\ncurve = \"1.0; false; ; 0.0\"\n\
             [[piece]]\nx_left = 2.0\nx_right = 3.0\nu = -0.5\n",
        )
        .unwrap();
        let cells = cfg.cells().unwrap();
        assert_eq!(cells.len(), 3);
        assert!(cells[1].curve.is_virgin());
        assert_eq!(cells[2].curve.anchor(), -0.5);
        assert_eq!(cells[0].curve.to_string(), "1.0; true; 1.0; 0.5");
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(parse("a = -1.0\n").is_err());
        assert!(parse("a = 1.0\nt_end = 0.0\n").is_err());
        assert!(parse("a = 1.0\nextra = 1\n").is_err());
        assert!(parse("a = 1.0\n[[piece]]\nx_left = 0.0\nx_right = 1.0\nu = 0.0\ncurve = \"1.0; false; ; 0.0\"\nsignal = [0.0]\n").is_err());
    }

    #[test]
    fn checkpoint_flag_overrides_file() {
        let cfg = parse("a = 1.0\nt_end = 2.0\ncheckpoints = [0.5]\n").unwrap();
        assert_eq!(cfg.checkpoint_times(None, 2.0).unwrap(), vec![0.5]);
        assert_eq!(cfg.checkpoint_times(Some(&[1.0, 2.0]), 2.0).unwrap(), vec![1.0, 2.0]);
        assert!(cfg.checkpoint_times(Some(&[2.5]), 2.0).is_err());
    }

    #[test]
    fn probe_histories() {
        let cfg = parse("a = 1.0\n[[probe]]\nk = 0.2\nhistory = \"up\"\n[[probe]]\nk = -0.2\n").unwrap();
        let probes = cfg.probes().unwrap();
        assert_eq!(probes.len(), 2);
        assert_eq!(probes[0].k, 0.2);
        assert!(parse("a = 1.0\n[[probe]]\nk = 0.2\nhistory = \"sideways\"\n").unwrap().probes().is_err());
    }
}
