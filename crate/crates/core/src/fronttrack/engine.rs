//! Event-driven front tracker.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::init::InitialDatum;
use super::interact::{Ctx, Outgoing};
use super::{EventRecord, Front, FrontKind, FrontSegment, Snapshot, SolverParams, Stats};
use crate::discretize::{stationary_jump_at_point, DeltaSourceGrid};
use crate::eos::{PressureLaw, State};
use crate::error::{Error, Result};
use crate::riemann::Family;

const NIL: usize = usize::MAX;
/// Fronts closer than this (relative) at an event time are resolved together.
const COINCIDENCE: f64 = 1e-13;
/// Fronts weaker than this cross a source point without being resolved.
const PASS_STRENGTH: f64 = 1e-12;

#[derive(Debug, Clone)]
struct Slot {
    front: Front,
    prev: usize,
    next: usize,
    alive: bool,
}

#[derive(Debug, Clone, Copy)]
struct Event {
    t: f64,
    x: f64,
    left: usize,
    left_id: u64,
    right: usize,
    right_id: u64,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    // Reversed so that the max-heap pops the earliest event; ties go to the
    // leftmost position, then to the oldest front.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .t
            .total_cmp(&self.t)
            .then_with(|| other.x.total_cmp(&self.x))
            .then_with(|| other.left_id.cmp(&self.left_id))
            .then_with(|| other.right_id.cmp(&self.right_id))
    }
}

/// Output of [`FrontTracker::run`].
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub events: Vec<EventRecord>,
    pub history: Vec<FrontSegment>,
    pub stats: Stats,
    pub lambda_np: f64,
    /// `(t, total variation of moving fronts, Glimm interaction potential)`
    /// at each snapshot.
    pub diagnostics: Vec<(f64, f64, f64)>,
    /// Relative drift of the mass metric at the final time.
    pub mass_drift: f64,
}

#[derive(Debug, Clone)]
pub struct FrontTracker {
    law: PressureLaw,
    grid: DeltaSourceGrid,
    params: SolverParams,
    slots: Vec<Slot>,
    free: Vec<usize>,
    head: usize,
    len: usize,
    heap: BinaryHeap<Event>,
    t: f64,
    next_id: u64,
    lambda_np: f64,
    far_left: State,
    far_right: State,
    history: Vec<FrontSegment>,
    events: Vec<EventRecord>,
    stats: Stats,
    tv_moving: f64,
    window: (f64, f64),
    mass0: f64,
}

fn max_speed(law: &PressureLaw, u: &State) -> f64 {
    u.velocity().abs() + law.c(u.rho)
}

impl FrontTracker {
    pub fn new(law: &PressureLaw, grid: &DeltaSourceGrid, datum: &InitialDatum, params: &SolverParams) -> Result<Self> {
        params.validate()?;
        let sampled = datum.sample(law, grid)?;
        let mut lambda = sampled.states.iter().map(|u| max_speed(law, u)).fold(0.0, f64::max);
        let mut initial: Vec<(f64, Vec<Outgoing>)> = Vec::with_capacity(sampled.positions.len());
        {
            let ctx = Ctx { law, eps_rarefaction: params.eps_rarefaction, lambda_np: f64::INFINITY };
            for (i, &x) in sampled.positions.iter().enumerate() {
                let (ul, ur) = (sampled.states[i], sampled.states[i + 1]);
                let out = match sampled.points[i] {
                    Some(j) => {
                        let p = &grid.points[j];
                        let junction = p.junction();
                        if stationary_jump_at_point(law, p, &ul).ok() == Some(ur) {
                            vec![Outgoing { kind: FrontKind::Zero { point: j, junction }, left: ul, right: ur, speed: 0.0 }]
                        } else {
                            ctx.junction(ul, ur, j, junction).map_err(|e| e.at(&format!("initial source point x = {x}")))?
                        }
                    }
                    None => ctx.classical(ul, ur).map_err(|e| e.at(&format!("initial jump at x = {x}")))?,
                };
                for o in &out {
                    lambda = lambda.max(max_speed(law, &o.left)).max(max_speed(law, &o.right));
                }
                initial.push((x, out));
            }
        }
        let lambda_np = 2.0 * lambda.max(1e-12);
        let far_left = sampled.states[0];
        let far_right = *sampled.states.last().unwrap();
        let mut ft = FrontTracker {
            law: law.clone(),
            grid: grid.clone(),
            params: params.clone(),
            slots: Vec::new(),
            free: Vec::new(),
            head: NIL,
            len: 0,
            heap: BinaryHeap::new(),
            t: 0.0,
            next_id: 0,
            lambda_np,
            far_left,
            far_right,
            history: Vec::new(),
            events: Vec::new(),
            stats: Stats::default(),
            tv_moving: 0.0,
            window: (0.0, 0.0),
            mass0: 0.0,
        };
        let mut tail = NIL;
        for (x, out) in initial {
            for o in out {
                tail = ft.insert_after(tail, o, x, 0.0, 0);
            }
        }
        if ft.tv_moving > params.delta_domain {
            return Err(Error::domain(format!(
                "initial total variation {} of moving fronts exceeds the budget {}",
                ft.tv_moving, params.delta_domain
            )));
        }
        let mut idx = ft.head;
        while idx != NIL {
            let next = ft.slots[idx].next;
            if next != NIL {
                ft.schedule(idx, next);
            }
            idx = next;
        }
        let xs: Vec<f64> = sampled.positions.clone();
        let lo = xs.first().copied().unwrap_or(0.0).min(0.0);
        let hi = xs.last().copied().unwrap_or(0.0).max(0.0);
        let reach = lambda_np * params.t_end + 1.0;
        ft.window = (lo - reach, hi + reach);
        ft.mass0 = ft.mass();
        ft.stats.max_fronts = ft.len;
        Ok(ft)
    }

    fn new_id(&mut self) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        self.stats.fronts_created += 1;
        id
    }

    /// Inserts after slot `after` (`NIL` inserts at the head).
    fn insert_after(&mut self, after: usize, o: Outgoing, x: f64, t: f64, generation: u32) -> usize {
        let x0 = match o.kind {
            FrontKind::Zero { point, .. } => self.grid.points[point].x,
            _ => x,
        };
        let front = Front { id: self.new_id(), x0, t0: t, speed: o.speed, kind: o.kind, left: o.left, right: o.right, generation };
        if !front.kind.is_zero() {
            self.tv_moving += front.strength();
        }
        let next = if after == NIL { self.head } else { self.slots[after].next };
        let slot = Slot { front, prev: after, next, alive: true };
        let idx = match self.free.pop() {
            Some(i) => {
                self.slots[i] = slot;
                i
            }
            None => {
                self.slots.push(slot);
                self.slots.len() - 1
            }
        };
        if after == NIL {
            self.head = idx;
        } else {
            self.slots[after].next = idx;
        }
        if next != NIL {
            self.slots[next].prev = idx;
        }
        self.len += 1;
        idx
    }

    fn remove(&mut self, idx: usize, t: f64) {
        let Slot { front, prev, next, .. } = self.slots[idx].clone();
        if prev == NIL {
            self.head = next;
        } else {
            self.slots[prev].next = next;
        }
        if next != NIL {
            self.slots[next].prev = prev;
        }
        if !front.kind.is_zero() {
            self.tv_moving -= front.strength();
        }
        if self.params.record_history {
            self.history.push(FrontSegment { front, t_end: t });
        }
        self.slots[idx].alive = false;
        self.free.push(idx);
        self.len -= 1;
    }

    fn schedule(&mut self, a: usize, b: usize) {
        let (fa, fb) = (self.slots[a].front, self.slots[b].front);
        let ds = fa.speed - fb.speed;
        if !(ds > 0.0) {
            return;
        }
        let tr = fa.t0.max(fb.t0);
        let gap = fb.position(tr) - fa.position(tr);
        let t = if gap <= 0.0 { tr } else { tr + gap / ds };
        if !t.is_finite() {
            return;
        }
        let x = 0.5 * (fa.position(t) + fb.position(t));
        self.heap.push(Event { t, x, left: a, left_id: fa.id, right: b, right_id: fb.id });
    }

    fn valid(&self, e: &Event) -> bool {
        let (l, r) = (&self.slots[e.left], &self.slots[e.right]);
        l.alive && r.alive && l.front.id == e.left_id && r.front.id == e.right_id && l.next == e.right
    }

    /// Earliest pending interaction `(t, x)`.
    pub fn next_event(&mut self) -> Option<(f64, f64)> {
        while let Some(top) = self.heap.peek() {
            if self.valid(top) {
                return Some((top.t, top.x));
            }
            self.heap.pop();
        }
        None
    }

    /// Time of the next interaction and the fronts meeting there; `+∞` and
    /// no fronts when nothing is pending.
    pub fn next_collision(&mut self) -> (f64, Vec<Front>) {
        let Some(e) = self.next_event().and_then(|_| self.heap.peek().copied()) else {
            return (f64::INFINITY, Vec::new());
        };
        let (fl, fr) = (self.slots[e.left].front, self.slots[e.right].front);
        let x = if fl.kind.is_zero() {
            fl.x0
        } else if fr.kind.is_zero() {
            fr.x0
        } else {
            0.5 * (fl.position(e.t) + fr.position(e.t))
        };
        let guard = COINCIDENCE * (1.0 + x.abs());
        let mut first = e.left;
        while self.slots[first].prev != NIL && (self.slots[self.slots[first].prev].front.position(e.t) - x).abs() <= guard {
            first = self.slots[first].prev;
        }
        let mut group = vec![self.slots[first].front];
        let mut idx = first;
        while idx != e.right || (self.slots[idx].next != NIL && (self.slots[self.slots[idx].next].front.position(e.t) - x).abs() <= guard) {
            idx = self.slots[idx].next;
            group.push(self.slots[idx].front);
        }
        (e.t, group)
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn lambda_np(&self) -> f64 {
        self.lambda_np
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    pub fn events(&self) -> &[EventRecord] {
        &self.events
    }

    pub fn grid(&self) -> &DeltaSourceGrid {
        &self.grid
    }

    pub fn law(&self) -> &PressureLaw {
        &self.law
    }

    pub fn params(&self) -> &SolverParams {
        &self.params
    }

    /// Live fronts, left to right.
    pub fn fronts(&self) -> Vec<Front> {
        let mut v = Vec::with_capacity(self.len);
        let mut idx = self.head;
        while idx != NIL {
            v.push(self.slots[idx].front);
            idx = self.slots[idx].next;
        }
        v
    }

    /// Recorded segments of removed fronts plus live fronts up to now.
    pub fn history(&self) -> Vec<FrontSegment> {
        let mut h = self.history.clone();
        h.extend(self.fronts().into_iter().map(|front| FrontSegment { front, t_end: self.t }));
        h
    }

    /// Total variation carried by moving fronts.
    pub fn moving_variation(&self) -> f64 {
        self.fronts().iter().filter(|f| !f.kind.is_zero()).map(Front::strength).sum()
    }

    pub fn snapshot(&self) -> Snapshot {
        let mut breakpoints = Vec::with_capacity(self.len);
        let mut states = Vec::with_capacity(self.len + 1);
        states.push(self.far_left);
        let mut last = f64::NEG_INFINITY;
        let mut idx = self.head;
        while idx != NIL {
            let f = &self.slots[idx].front;
            let x = f.position(self.t).max(last);
            breakpoints.push(x);
            states.push(f.right);
            last = x;
            idx = self.slots[idx].next;
        }
        Snapshot { t: self.t, breakpoints, states }
    }

    /// `∫ρ` over the tracking window plus the boundary fluxes accumulated so
    /// far; constant in time for an exactly conservative scheme.
    pub fn mass(&self) -> f64 {
        let (lo, hi) = self.window;
        self.snapshot().integral(lo, hi).0 + self.t * (self.far_right.q - self.far_left.q)
    }

    /// `|mass(t) − mass(0)| / |mass(0)|`.
    pub fn mass_drift(&self) -> f64 {
        (self.mass() - self.mass0).abs() / self.mass0.abs().max(f64::MIN_POSITIVE)
    }

    /// Processes every interaction with time `≤ target` and advances the
    /// clock to `target`.
    pub fn run_until(&mut self, target: f64) -> Result<()> {
        while let Some((t, _)) = self.next_event() {
            if t > target {
                break;
            }
            self.step()?;
        }
        if target > self.t {
            self.t = target;
        }
        Ok(())
    }

    /// Resolves the earliest pending interaction. Returns `false` when there
    /// is none.
    pub fn step(&mut self) -> Result<bool> {
        if self.next_event().is_none() {
            return Ok(false);
        }
        let e = self.heap.pop().unwrap();
        if self.stats.interactions >= self.params.max_events {
            return Err(Error::Instability(format!("more than {} interactions", self.params.max_events)));
        }
        let t = e.t.max(self.t);
        self.t = t;
        let zero_x = |f: &Front| if f.kind.is_zero() { Some(f.x0) } else { None };
        let (fl, fr) = (self.slots[e.left].front, self.slots[e.right].front);
        let x = zero_x(&fl).or(zero_x(&fr)).unwrap_or(0.5 * (fl.position(t) + fr.position(t)));
        let guard = COINCIDENCE * (1.0 + x.abs());
        let (mut first, mut last) = (e.left, e.right);
        while self.slots[first].prev != NIL && (self.slots[self.slots[first].prev].front.position(t) - x).abs() <= guard {
            first = self.slots[first].prev;
        }
        while self.slots[last].next != NIL && (self.slots[self.slots[last].next].front.position(t) - x).abs() <= guard {
            last = self.slots[last].next;
        }
        let mut group = vec![first];
        let mut idx = first;
        while idx != last {
            idx = self.slots[idx].next;
            group.push(idx);
        }
        let incoming: Vec<Front> = group.iter().map(|&i| self.slots[i].front).collect();
        let (kind, out) = self.resolve(&incoming, t, x)?;
        let ordered = out.windows(2).all(|w| w[0].speed <= w[1].speed + 1e-12 * (1.0 + w[1].speed.abs()));
        if !ordered {
            return Err(Error::Instability(format!("outgoing fronts out of order at t = {t}, x = {x}: {out:?}")));
        }
        let generation = incoming.iter().map(|f| f.generation).max().unwrap_or(0) + 1;
        let before = self.slots[first].prev;
        let after = self.slots[last].next;
        for &i in &group {
            self.remove(i, t);
        }
        let mut cursor = before;
        let mut created = Vec::with_capacity(out.len());
        for o in &out {
            cursor = self.insert_after(cursor, *o, x, t, generation);
            created.push(cursor);
        }
        let mut chain = Vec::with_capacity(created.len() + 2);
        if before != NIL {
            chain.push(before);
        }
        chain.extend(&created);
        if after != NIL {
            chain.push(after);
        }
        for w in chain.windows(2) {
            self.schedule(w[0], w[1]);
        }
        self.stats.interactions += 1;
        self.stats.max_fronts = self.stats.max_fronts.max(self.len);
        if self.params.record_history {
            self.events.push(EventRecord {
                t,
                x,
                kind,
                incoming: incoming.iter().map(Front::strength).collect(),
                outgoing: out.iter().map(|o| o.left.distance(&o.right)).collect(),
            });
        }
        if self.len > self.params.max_fronts {
            return Err(Error::Instability(format!("front count {} exceeds the limit {}", self.len, self.params.max_fronts)));
        }
        let cap = self.params.tv_cap_factor * self.params.delta_domain;
        if self.tv_moving > cap {
            return Err(Error::Instability(format!(
                "total variation {} exceeds the cap {cap} at t = {t}",
                self.tv_moving
            )));
        }
        Ok(true)
    }

    fn resolve(&mut self, incoming: &[Front], t: f64, x: f64) -> Result<(&'static str, Vec<Outgoing>)> {
        let ctx = Ctx { law: &self.law, eps_rarefaction: self.params.eps_rarefaction, lambda_np: self.lambda_np };
        let as_out = |f: &Front| Outgoing { kind: f.kind, left: f.left, right: f.right, speed: f.speed };
        let ul = incoming[0].left;
        let ur = incoming.last().unwrap().right;
        let zeros: Vec<usize> = (0..incoming.len()).filter(|&i| incoming[i].kind.is_zero()).collect();
        let located = |e: Error| e.at(&format!("interaction at t = {t}, x = {x}"));
        match zeros.as_slice() {
            [] => {
                if incoming.len() == 2 && incoming[0].kind == FrontKind::NonPhysical && incoming[1].kind.family().is_some() {
                    if let Ok(out) = ctx.overtake(&as_out(&incoming[0]), &as_out(&incoming[1])) {
                        return Ok(("overtake", out));
                    }
                }
                Ok(("classical", ctx.classical(ul, ur).map_err(located)?))
            }
            [z] => {
                let FrontKind::Zero { point, junction } = incoming[*z].kind else { unreachable!() };
                if incoming.len() == 2 {
                    let mover_left = *z == 1;
                    let mover = &incoming[1 - *z];
                    let zero = &incoming[*z];
                    let weak = mover.strength() <= PASS_STRENGTH * (1.0 + ul.rho + ul.q.abs());
                    if junction.is_trivial() || weak || mover.kind == FrontKind::NonPhysical {
                        return Ok(("pass_through", ctx.pass_through(&as_out(mover), &as_out(zero), mover_left)));
                    }
                    let expected = if mover_left { Family::Two } else { Family::One };
                    let product = mover.strength() * (junction.a.abs() + junction.b.abs());
                    if mover.kind.family() == Some(expected) && product < self.params.eps_nonphysical {
                        if let Ok(out) = ctx.simplified(&as_out(mover), &as_out(zero), mover_left) {
                            self.stats.simplified += 1;
                            return Ok(("simplified", out));
                        }
                    }
                }
                Ok(("junction", ctx.junction(ul, ur, point, junction).map_err(located)?))
            }
            _ => Err(Error::Instability(format!("two source points meet at t = {t}, x = {x}"))),
        }
    }

    /// Runs to `t_end`, recording snapshots at the requested times and at
    /// `t_end`.
    pub fn run(mut self) -> Result<Trajectory> {
        let mut times = self.params.snapshot_times.clone();
        times.push(self.params.t_end);
        times.sort_by(f64::total_cmp);
        times.dedup();
        let mut snapshots = Vec::with_capacity(times.len());
        let mut diagnostics = Vec::with_capacity(times.len());
        for &tau in &times {
            self.run_until(tau)?;
            let fronts = self.fronts();
            let potential = super::analysis::glimm_potential(&fronts);
            diagnostics.push((tau, potential.moving_variation, potential.interaction));
            snapshots.push(self.snapshot());
        }
        let mass_drift = self.mass_drift();
        let history = if self.params.record_history { self.history() } else { Vec::new() };
        Ok(Trajectory {
            snapshots,
            events: std::mem::take(&mut self.events),
            history,
            stats: self.stats.clone(),
            lambda_np: self.lambda_np,
            diagnostics,
            mass_drift,
        })
    }
}
