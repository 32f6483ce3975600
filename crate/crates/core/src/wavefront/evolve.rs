use super::{Cell, EventKind, EventRecord, Front, FrontKind, FrontRecord, GridParams, PiecewiseState, Trajectory};
use crate::error::{Error, Result};
use crate::preisach::{apply_monotone, dyadic_step};
use crate::riemann::{rh_speed, solve_riemann, RiemannData, RiemannFan};

pub const DEFAULT_EVENT_CAP: usize = 1_000_000;

/// Grid resolution of one Riemann problem: `cells[0]` and `cells[last]` are the data,
/// front `j` separates `cells[j]` and `cells[j + 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WavePattern {
    pub cells: Vec<Cell>,
    pub speeds: Vec<f64>,
}

impl WavePattern {
    pub fn kinds(&self) -> Vec<FrontKind> {
        self.cells
            .windows(2)
            .map(|w| if w[0].u == w[1].u { FrontKind::ZStationary } else { FrontKind::UShock })
            .collect()
    }
}

/// Replaces the fan by one shock per grid step, preceded by the stationary jump if any.
pub fn split_fan(fan: &RiemannFan, n: u32) -> Result<WavePattern> {
    let data = fan.data();
    let h = dyadic_step(n);
    let (u_l, u_r) = (data.u_left, data.u_right);
    if (u_l / h).fract() != 0.0 || (u_r / h).fract() != 0.0 {
        return Err(Error::IncompatibleData(format!("fan ends {u_l}, {u_r} are not on the level-{n} grid")));
    }
    let mut cells = vec![Cell::from_curve(data.curve_left.clone())];
    let mut speeds = Vec::new();
    if let Some((_, post)) = &fan.stationary {
        cells.push(Cell::from_curve(post.clone()));
        speeds.push(0.0);
    }
    let steps = ((u_l - u_r) / h).round() as i64;
    let dir = steps.signum() as f64;
    for k in 1..=steps.abs() {
        let curve = if k == steps.abs() {
            data.curve_right.clone()
        } else {
            apply_monotone(&data.curve_right, u_l - dir * k as f64 * h)?.0
        };
        let cell = Cell::from_curve(curve);
        let prev = cells.last().expect("nonempty");
        let s = rh_speed(prev.u, prev.w, cell.u, cell.w)?;
        if !(s > 0.0 && s <= 1.0 + 1e-12) || speeds.last().is_some_and(|&p| s <= p) {
            return Err(Error::InternalInvariantViolation(format!(
                "split shock speeds not strictly increasing in (0, 1]: {speeds:?} then {s}"
            )));
        }
        speeds.push(s.min(1.0));
        cells.push(cell);
    }
    Ok(WavePattern { cells, speeds })
}

/// Solves and splits the Riemann problem between two grid cells.
pub fn wave_pattern(left: &Cell, right: &Cell, n: u32) -> Result<WavePattern> {
    if left == right {
        return Ok(WavePattern { cells: vec![left.clone()], speeds: Vec::new() });
    }
    let data = RiemannData::new(left.u, left.curve.clone(), right.u, right.curve.clone())?;
    split_fan(&solve_riemann(&data)?, n)
}

/// Fronts `first..=last` meet at `(time, position)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub position: f64,
    pub first: usize,
    pub last: usize,
}

fn tolerance(x: f64, t: f64) -> f64 {
    1e-11 * (1.0 + x.abs() + t.abs())
}

/// Earliest meeting of adjacent fronts at or before `t_end`; ties go to the lowest position.
pub fn next_event(state: &PiecewiseState, t_end: f64) -> Option<Event> {
    let t = state.time;
    let xs = state.positions();
    let fronts = &state.fronts;
    let mut best: Option<(f64, f64, usize)> = None;
    for i in 0..fronts.len().saturating_sub(1) {
        let closing = fronts[i].speed - fronts[i + 1].speed;
        if closing <= 0.0 {
            continue;
        }
        let tau = t + (xs[i + 1] - xs[i]).max(0.0) / closing;
        if tau > t_end {
            continue;
        }
        let x = fronts[i].position(tau);
        let better = match best {
            None => true,
            Some((bt, bx, _)) => {
                let tol = tolerance(bx, bt);
                tau < bt - tol || (tau <= bt + tol && x < bx - tol)
            }
        };
        if better {
            best = Some((tau, x, i));
        }
    }
    let (time, _, i) = best?;
    let position = 0.5 * (fronts[i].position(time) + fronts[i + 1].position(time));
    let tol = tolerance(position, time);
    let near = |k: usize| (fronts[k].position(time) - position).abs() <= tol;
    let mut first = i;
    while first > 0 && near(first - 1) {
        first -= 1;
    }
    let mut last = i + 1;
    while last + 1 < fronts.len() && near(last + 1) {
        last += 1;
    }
    Some(Event { time, position, first, last })
}

/// Replaces the colliding fronts by the split solution of the outer Riemann problem.
/// Returns the new state and the outgoing pattern.
pub fn resolve_interaction(state: &PiecewiseState, event: &Event, n: u32) -> Result<(PiecewiseState, WavePattern)> {
    let (lo, hi) = (event.first, event.last);
    let left = &state.cells[lo];
    let right = &state.cells[hi + 1];
    let pattern = wave_pattern(left, right, n)?;
    let u_in = state.fronts[lo..=hi].iter().filter(|f| f.kind == FrontKind::UShock).count();
    let kinds = pattern.kinds();
    let u_out = kinds.iter().filter(|&&k| k == FrontKind::UShock).count();
    if u_out > u_in || kinds.iter().filter(|&&k| k == FrontKind::ZStationary).count() > 1 {
        return Err(Error::InternalInvariantViolation(format!(
            "interaction at t = {} produced {u_out} u-shocks from {u_in}",
            event.time
        )));
    }
    let next_id = state.fronts.iter().map(|f| f.id + 1).max().unwrap_or(0);
    let new_fronts: Vec<Front> = pattern
        .speeds
        .iter()
        .zip(&kinds)
        .enumerate()
        .map(|(j, (&speed, &kind))| Front {
            id: next_id + j,
            origin_x: event.position,
            origin_t: event.time,
            speed,
            kind,
        })
        .collect();
    let mut cells = state.cells[..lo].to_vec();
    cells.extend(pattern.cells.iter().cloned());
    cells.extend(state.cells[hi + 2..].iter().cloned());
    let mut fronts = state.fronts[..lo].to_vec();
    fronts.extend(new_fronts);
    fronts.extend(state.fronts[hi + 1..].iter().copied());
    Ok((PiecewiseState { time: event.time, cells, fronts }, pattern))
}

pub fn evolve(state0: &PiecewiseState, params: GridParams, checkpoint_times: &[f64]) -> Result<Trajectory> {
    evolve_with_cap(state0, params, checkpoint_times, DEFAULT_EVENT_CAP)
}

/// Processes interactions in time order up to `t_end`, recording the requested states.
pub fn evolve_with_cap(
    state0: &PiecewiseState,
    params: GridParams,
    checkpoint_times: &[f64],
    cap: usize,
) -> Result<Trajectory> {
    for &t in checkpoint_times {
        if !(t >= state0.time && t <= params.t_end) {
            return Err(Error::OutOfRange { value: t, lo: state0.time, hi: params.t_end });
        }
    }
    let mut order: Vec<usize> = (0..checkpoint_times.len()).collect();
    order.sort_by(|&i, &j| checkpoint_times[i].total_cmp(&checkpoint_times[j]));
    let mut checkpoints: Vec<Option<PiecewiseState>> = vec![None; checkpoint_times.len()];
    let mut pending = order.into_iter().peekable();

    // Renumber so that ids index the record list.
    let mut state = state0.clone();
    let mut records: Vec<FrontRecord> = Vec::new();
    for (i, f) in state.fronts.iter_mut().enumerate() {
        f.id = records.len();
        records.push(FrontRecord {
            id: f.id,
            kind: f.kind,
            birth_time: f.origin_t,
            death_time: f64::INFINITY,
            origin_x: f.origin_x,
            speed: f.speed,
            left: state.cells[i].clone(),
            right: state.cells[i + 1].clone(),
        });
    }
    let initial = state.clone();
    let mut events: Vec<EventRecord> = Vec::new();
    loop {
        let event = next_event(&state, params.t_end);
        let horizon = event.map_or(f64::INFINITY, |e| e.time);
        while let Some(&k) = pending.peek() {
            if checkpoint_times[k] < horizon {
                checkpoints[k] = Some(state.advanced_to(checkpoint_times[k]));
                pending.next();
            } else {
                break;
            }
        }
        let Some(event) = event else { break };
        if events.len() >= cap {
            return Err(Error::EventOverflow(cap));
        }
        let incoming = &state.fronts[event.first..=event.last];
        let u_in = incoming.iter().filter(|f| f.kind == FrontKind::UShock).count();
        let z_in = incoming.len() - u_in;
        let died: Vec<usize> = incoming.iter().map(|f| f.id).collect();
        let u_before = state.u_front_count();
        let (next, pattern) = resolve_interaction(&state, &event, params.n)?;
        for &id in &died {
            records[id].death_time = event.time;
        }
        let born: Vec<usize> = next.fronts[event.first..event.first + pattern.speeds.len()].iter().map(|f| f.id).collect();
        for (j, &id) in born.iter().enumerate() {
            let f = &next.fronts[event.first + j];
            debug_assert_eq!(id, records.len());
            records.push(FrontRecord {
                id,
                kind: f.kind,
                birth_time: event.time,
                death_time: f64::INFINITY,
                origin_x: f.origin_x,
                speed: f.speed,
                left: pattern.cells[j].clone(),
                right: pattern.cells[j + 1].clone(),
            });
        }
        let kind = match (u_in, z_in) {
            (_, 0) if u_in >= 2 => EventKind::Cancellation,
            (1, 1) => EventKind::Transmission,
            _ => EventKind::Compound,
        };
        let u_after = next.u_front_count();
        events.push(EventRecord {
            time: event.time,
            position: event.position,
            kind,
            first_front: event.first,
            fronts_in: died.len(),
            fronts_out: born.len(),
            u_fronts_in: u_in,
            u_fronts_out: pattern.kinds().iter().filter(|&&k| k == FrontKind::UShock).count(),
            died,
            born,
            u_fronts_before: u_before,
            u_fronts_after: u_after,
        });
        state = next;
    }
    let checkpoints = checkpoint_times
        .iter()
        .zip(checkpoints)
        .map(|(&t, s)| (t, s.expect("every checkpoint is recorded")))
        .collect();
    Ok(Trajectory { params, initial, events, checkpoints, fronts: records })
}
