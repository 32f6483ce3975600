//! Wave-front tracking on the dyadic grid `A_n = 2^-n ℤ`.

mod discretize;
mod evolve;

pub use discretize::{discretize_initial, round_to_grid, InitialData};
pub use evolve::{
    evolve, evolve_with_cap, next_event, resolve_interaction, split_fan, wave_pattern, Event, WavePattern,
    DEFAULT_EVENT_CAP,
};

use crate::error::{Error, Result};
use crate::preisach::{dyadic_step, output_w, MemoryCurve};

/// Dyadic level, triangle half-width and final time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridParams {
    pub n: u32,
    pub a: f64,
    pub t_end: f64,
}

impl GridParams {
    pub fn new(n: u32, a: f64, t_end: f64) -> Result<Self> {
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(Error::OutOfRange { value: t_end, lo: 0.0, hi: f64::INFINITY });
        }
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidTriangle(a));
        }
        Ok(Self { n, a, t_end })
    }

    pub fn h(&self) -> f64 {
        dyadic_step(self.n)
    }
}

/// Constant state `(u, z)` with its cached output `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub u: f64,
    pub curve: MemoryCurve,
    pub w: f64,
}

impl Cell {
    pub fn new(u: f64, curve: MemoryCurve) -> Result<Self> {
        if u != curve.anchor() {
            return Err(Error::IncompatibleData(format!(
                "u = {u} but the curve meets the diagonal at {}; relays with thresholds between the two \
                 violate (z-1)(u-rho2) >= 0 or (z+1)(u-rho1) >= 0",
                curve.anchor()
            )));
        }
        let w = output_w(&curve);
        Ok(Self { u, curve, w })
    }

    pub(crate) fn from_curve(curve: MemoryCurve) -> Self {
        let w = output_w(&curve);
        Self { u: curve.anchor(), curve, w }
    }

    /// `u + w`, the conserved density.
    pub fn density(&self) -> f64 {
        self.u + self.w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrontKind {
    /// Jump of `u` by one grid step.
    UShock,
    /// Jump of the curve only; does not move.
    ZStationary,
}

impl FrontKind {
    pub fn name(self) -> &'static str {
        match self {
            FrontKind::UShock => "u_shock",
            FrontKind::ZStationary => "z_stationary",
        }
    }
}

/// Front `i` of a state separates cells `i` and `i + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Front {
    pub id: usize,
    pub origin_x: f64,
    pub origin_t: f64,
    pub speed: f64,
    pub kind: FrontKind,
}

impl Front {
    pub fn position(&self, t: f64) -> f64 {
        self.origin_x + self.speed * (t - self.origin_t)
    }
}

/// Piecewise constant solution at one time. The first and last cells extend to infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseState {
    pub time: f64,
    pub cells: Vec<Cell>,
    pub fronts: Vec<Front>,
}

impl PiecewiseState {
    pub fn new(time: f64, cells: Vec<Cell>, fronts: Vec<Front>) -> Result<Self> {
        if cells.len() != fronts.len() + 1 {
            return Err(Error::IncompatibleData(format!(
                "{} cells need {} fronts, got {}",
                cells.len(),
                cells.len() - 1,
                fronts.len()
            )));
        }
        let state = Self { time, cells, fronts };
        let xs = state.positions();
        if xs.windows(2).any(|w| w[1] < w[0] - 1e-9 * (1.0 + w[0].abs())) {
            return Err(Error::IncompatibleData("front positions are not ordered".into()));
        }
        Ok(state)
    }

    /// Single cell, no fronts.
    pub fn constant(time: f64, cell: Cell) -> Self {
        Self { time, cells: vec![cell], fronts: Vec::new() }
    }

    pub fn positions(&self) -> Vec<f64> {
        self.fronts.iter().map(|f| f.position(self.time)).collect()
    }

    /// Same fronts, positions read at time `t`.
    pub fn advanced_to(&self, t: f64) -> Self {
        Self { time: t, ..self.clone() }
    }

    pub fn left_cell(&self, front: usize) -> &Cell {
        &self.cells[front]
    }

    pub fn right_cell(&self, front: usize) -> &Cell {
        &self.cells[front + 1]
    }

    pub fn u_front_count(&self) -> usize {
        self.fronts.iter().filter(|f| f.kind == FrontKind::UShock).count()
    }

    /// Bounded cells as `(x_left, x_right, cell)`, tails with infinite ends.
    pub fn intervals(&self) -> Vec<(f64, f64, &Cell)> {
        let xs = self.positions();
        self.cells
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let lo = if i == 0 { f64::NEG_INFINITY } else { xs[i - 1] };
                let hi = if i == xs.len() { f64::INFINITY } else { xs[i] };
                (lo, hi.max(lo), c)
            })
            .collect()
    }

    /// Value at `x`; on a front the right state is returned.
    pub fn cell_at(&self, x: f64) -> &Cell {
        let xs = self.positions();
        &self.cells[xs.partition_point(|&p| p <= x)]
    }

    /// Grid closure and compatibility of every cell, and jump structure of every front.
    pub fn check_grid(&self, n: u32) -> Result<()> {
        let h = dyadic_step(n);
        for c in &self.cells {
            if (c.u / h).fract() != 0.0 || !crate::preisach::on_lattice(&c.curve, n) {
                return Err(Error::InternalInvariantViolation(format!("cell off the level-{n} grid: {}", c.curve)));
            }
            if c.u != c.curve.anchor() {
                return Err(Error::InternalInvariantViolation("incompatible cell".into()));
            }
        }
        for (i, f) in self.fronts.iter().enumerate() {
            let (l, r) = (&self.cells[i], &self.cells[i + 1]);
            let ok = match f.kind {
                FrontKind::UShock => (l.u - r.u).abs() == h && f.speed > 0.0 && f.speed <= 1.0,
                FrontKind::ZStationary => l.u == r.u && l.curve != r.curve && f.speed == 0.0,
            };
            if !ok {
                return Err(Error::InternalInvariantViolation(format!("front {i} ({:?}) malformed", f.kind)));
            }
        }
        Ok(())
    }
}

/// Lifetime and states of one front.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontRecord {
    pub id: usize,
    pub kind: FrontKind,
    pub birth_time: f64,
    /// `f64::INFINITY` while alive.
    pub death_time: f64,
    pub origin_x: f64,
    pub speed: f64,
    pub left: Cell,
    pub right: Cell,
}

impl FrontRecord {
    pub fn front(&self) -> Front {
        Front { id: self.id, origin_x: self.origin_x, origin_t: self.birth_time, speed: self.speed, kind: self.kind }
    }

    /// Length of `[birth, death) ∩ [t0, t1)`.
    pub fn overlap(&self, t0: f64, t1: f64) -> f64 {
        (self.death_time.min(t1) - self.birth_time.max(t0)).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    /// Opposite `u` jumps meet.
    Cancellation,
    /// A `u` shock crosses a stationary curve jump.
    Transmission,
    /// Anything else, e.g. several fronts meeting at one point.
    Compound,
}

impl EventKind {
    pub fn name(self) -> &'static str {
        match self {
            EventKind::Cancellation => "cancellation",
            EventKind::Transmission => "transmission",
            EventKind::Compound => "compound",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventRecord {
    pub time: f64,
    pub position: f64,
    pub kind: EventKind,
    /// Index of the first incoming front in the pre-event front list.
    pub first_front: usize,
    pub fronts_in: usize,
    pub fronts_out: usize,
    pub u_fronts_in: usize,
    pub u_fronts_out: usize,
    /// Ids of the incoming fronts, left to right.
    pub died: Vec<usize>,
    /// Ids of the outgoing fronts, left to right.
    pub born: Vec<usize>,
    pub u_fronts_before: usize,
    pub u_fronts_after: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub params: GridParams,
    pub initial: PiecewiseState,
    pub events: Vec<EventRecord>,
    /// `(time, state)` in the order requested.
    pub checkpoints: Vec<(f64, PiecewiseState)>,
    pub fronts: Vec<FrontRecord>,
}

impl Trajectory {
    /// State at `t`, rebuilt by replaying the front splices of every event at or before `t`.
    pub fn snapshot(&self, t: f64) -> Result<PiecewiseState> {
        if !(t >= 0.0 && t <= self.params.t_end) {
            return Err(Error::OutOfRange { value: t, lo: 0.0, hi: self.params.t_end });
        }
        let mut ids: Vec<usize> = self.initial.fronts.iter().map(|f| f.id).collect();
        for e in self.events.iter().take_while(|e| e.time <= t) {
            ids.splice(e.first_front..e.first_front + e.fronts_in, e.born.iter().copied());
        }
        if ids.is_empty() {
            return Ok(PiecewiseState::constant(t, self.initial.cells[0].clone()));
        }
        let mut cells = Vec::with_capacity(ids.len() + 1);
        cells.push(self.fronts[ids[0]].left.clone());
        let fronts = ids
            .iter()
            .map(|&id| {
                let r = &self.fronts[id];
                cells.push(r.right.clone());
                r.front()
            })
            .collect();
        Ok(PiecewiseState { time: t, cells, fronts })
    }

    pub fn final_state(&self) -> Result<PiecewiseState> {
        self.snapshot(self.params.t_end)
    }

    /// The same trajectory read backwards in time, `v(x, s) = u(x, T - s)`. Fronts move with
    /// negated speeds; it is not a solution and serves as a negative control.
    pub fn time_reversed(&self) -> Result<Trajectory> {
        let t_end = self.params.t_end;
        let initial = self.final_state()?;
        let fronts = self
            .fronts
            .iter()
            .map(|r| {
                let death = r.death_time.min(t_end);
                FrontRecord {
                    birth_time: t_end - death,
                    death_time: if r.birth_time == 0.0 { f64::INFINITY } else { t_end - r.birth_time },
                    origin_x: r.front().position(death),
                    speed: -r.speed,
                    ..r.clone()
                }
            })
            .collect();
        let initial = PiecewiseState {
            time: 0.0,
            fronts: initial
                .fronts
                .iter()
                .map(|f| Front { origin_x: f.position(t_end), origin_t: 0.0, speed: -f.speed, ..*f })
                .collect(),
            ..initial
        };
        let events = self
            .events
            .iter()
            .rev()
            .map(|e| EventRecord {
                time: t_end - e.time,
                fronts_in: e.fronts_out,
                fronts_out: e.fronts_in,
                u_fronts_in: e.u_fronts_out,
                u_fronts_out: e.u_fronts_in,
                died: e.born.clone(),
                born: e.died.clone(),
                u_fronts_before: e.u_fronts_after,
                u_fronts_after: e.u_fronts_before,
                ..e.clone()
            })
            .collect();
        Ok(Trajectory { params: self.params, initial, events, checkpoints: Vec::new(), fronts })
    }
}
