//! The self-map `f_Z` and its verifiers.
//!
//! Four rules define the map:
//!
//! 1. `o` is fixed;
//! 2. a first symbol `j >= 1` decrements: `[j]⧺w ↦ [j−1]⧺w`;
//! 3. the hubs `[0]` and `[0, r]` collapse to `o`;
//! 4. `[0, r, s]⧺w ↦ [h, r']⧺w` with `r' = r + s + 1` and
//!    `h = val(r') − val(r) − 1`.
//!
//! Rule 2 makes `f` restricted to `E_j` the copy-identity bijection onto
//! `E_{j−1}`; rule 4 consumes one tail symbol per visit to `U_0`, so an
//! orbit is a sequence of excursions whose lengths are lattice gaps.
//! `n + j − 1` is constant along an excursion and equals
//! `val(r_target) − val(r_start) − 1`, which the Admissibility Lemma puts
//! inside `Z` — that is the containment law in orbit coordinates.

use std::collections::BTreeSet;

use crate::lattice::{self, Rank};
use crate::scales::{ExactNat, ScaleTable};
use crate::space::{format_point, truncate, Gen, Point, Tail};
use crate::{Error, Result};

/// Read cursor over the symbols following `[0, rank]`: leftover prefix
/// symbols first, then the stream (if any).
#[derive(Clone, Debug)]
pub struct Cursor {
    pending: Vec<u64>,
    idx: usize,
    gen: Option<Gen>,
}

impl Cursor {
    fn new(pending: Vec<u64>, gen: Option<Gen>) -> Self {
        Cursor { pending, idx: 0, gen }
    }

    fn peek(&self) -> Option<u64> {
        if self.idx < self.pending.len() {
            Some(self.pending[self.idx])
        } else {
            self.gen.as_ref().map(|g| g.at(0))
        }
    }

    fn next_symbol(&mut self) -> Option<u64> {
        if self.idx < self.pending.len() {
            let s = self.pending[self.idx];
            self.idx += 1;
            Some(s)
        } else if let Some(g) = self.gen.take() {
            let s = g.at(0);
            self.gen = Some(g.advanced(1));
            Some(s)
        } else {
            None
        }
    }

    fn remaining(&self) -> &[u64] {
        &self.pending[self.idx..]
    }

    fn tail(&self) -> Tail {
        match &self.gen {
            Some(g) => Tail::Stream(g.clone()),
            None => Tail::Hub,
        }
    }

    /// Point `[a, b] ⧺ remaining ⧺ tail`.
    fn point_with(&self, a: u64, b: u64) -> Point {
        let mut prefix = vec![a, b];
        prefix.extend_from_slice(self.remaining());
        Point::at(prefix, self.tail()).expect("non-empty prefix")
    }
}

/// One application of `f_Z`.
pub fn step(p: &Point, t: &ScaleTable) -> Result<Point> {
    let Point::At { prefix, tail } = p else {
        return Ok(Point::O);
    };
    let j = prefix[0];
    if j >= 1 {
        let mut q = prefix.clone();
        q[0] = j - 1;
        return Point::at(q, tail.clone());
    }
    // First symbol 0: read r and s.
    let (r, s, rest, new_tail) = match (prefix.len(), tail) {
        (1, Tail::Hub) | (2, Tail::Hub) => return Ok(Point::O),
        (1, Tail::Stream(g)) => (g.at(0), g.at(1), Vec::new(), Tail::Stream(g.advanced(2))),
        (2, Tail::Stream(g)) => (prefix[1], g.at(0), Vec::new(), Tail::Stream(g.advanced(1))),
        (_, _) => (
            prefix[1],
            prefix[2],
            prefix[3..].to_vec(),
            tail.clone(),
        ),
    };
    let r_next = r
        .checked_add(s)
        .and_then(|x| x.checked_add(1))
        .ok_or(Error::HeightOverflow)?;
    let h = lattice::gap_minus_1(Rank(r), Rank(r_next), t)?
        .to_u64()
        .ok_or(Error::HeightOverflow)?;
    let mut new_prefix = vec![h, r_next];
    new_prefix.extend_from_slice(&rest);
    Point::at(new_prefix, new_tail)
}

/// The `n`-step orbit of `p` (n+1 points, including the start).
pub fn orbit(p: &Point, n: u64, t: &ScaleTable) -> Result<Vec<Point>> {
    let mut out = Vec::with_capacity((n + 1) as usize);
    out.push(p.clone());
    let mut cur = p.clone();
    for _ in 0..n {
        cur = step(&cur, t)?;
        out.push(cur.clone());
    }
    Ok(out)
}

/// A visit state: the orbit sits in `U_0` at `[0, rank]` with unread
/// symbols behind it. Ranks strictly increase across visits.
#[derive(Clone, Debug)]
pub struct OrbitState {
    /// `None` only for the bare hub `[0]`, which has no rank symbol.
    pub rank: Option<Rank>,
    cursor: Cursor,
    /// Step count since the orbit start.
    pub time: ExactNat,
}

impl OrbitState {
    pub fn point(&self) -> Point {
        match self.rank {
            Some(r) => self.cursor.point_with(0, r.0),
            None => Point::hub(vec![0]).expect("hub [0]"),
        }
    }
}

/// Interpret `p ∈ U_0` as a visit state at time 0.
pub fn visit_state(p: &Point) -> Result<OrbitState> {
    if p.first_symbol() != Some(0) {
        return Err(Error::Precondition(format!(
            "{} is not in U_0",
            format_point(p)
        )));
    }
    let Point::At { prefix, tail } = p else { unreachable!() };
    let gen = match tail {
        Tail::Hub => None,
        Tail::Stream(g) => Some(g.clone()),
    };
    let mut cursor = Cursor::new(prefix[1..].to_vec(), gen);
    let rank = cursor.next_symbol().map(Rank);
    Ok(OrbitState { rank, cursor, time: ExactNat::zero() })
}

/// What following one more excursion yields.
pub enum Advance {
    /// The next visit state.
    Visit(OrbitState),
    /// No further symbols: the next step lands on `o` forever.
    Terminal,
    /// The next rank leaves the usable levels; the gap provably exceeds
    /// `M` at the named scale.
    BeyondLevels { scale: u32 },
}

/// Excursion-level step: from one visit to the next in O(1).
pub fn advance(s: &OrbitState, t: &ScaleTable) -> Result<Advance> {
    let Some(rank) = s.rank else {
        return Ok(Advance::Terminal);
    };
    let Some(sym) = s.cursor.peek() else {
        return Ok(Advance::Terminal);
    };
    let r_next = rank
        .0
        .checked_add(sym)
        .and_then(|x| x.checked_add(1))
        .ok_or(Error::HeightOverflow)?;
    if r_next >= lattice::rank_span(t) {
        return Ok(Advance::BeyondLevels { scale: t.usable_level_top() + 1 });
    }
    let gap = lattice::gap(rank, Rank(r_next), t)?;
    let mut cursor = s.cursor.clone();
    cursor.next_symbol();
    Ok(Advance::Visit(OrbitState {
        rank: Some(Rank(r_next)),
        cursor,
        time: ExactNat::add(s.time.clone(), gap),
    }))
}

/// Jump to the next visit; bit-for-bit consistent with repeated [`step`].
pub fn leap(s: &OrbitState, t: &ScaleTable) -> Result<OrbitState> {
    match advance(s, t)? {
        Advance::Visit(next) => Ok(next),
        Advance::Terminal => Err(Error::Precondition(
            "state has no further visits (hub orbit ends at o)".into(),
        )),
        Advance::BeyondLevels { scale } => Err(Error::UnmaterializedScale { scale }),
    }
}

/// All `n <= horizon` with `f^n(p) ∈ U_0`, including 0; `p` must lie in
/// `U_0` and the horizon must be covered by the table (`<= M_{K_max}`).
pub fn visit_times(p: &Point, horizon: &ExactNat, t: &ScaleTable) -> Result<Vec<ExactNat>> {
    ensure_coverage(horizon, t)?;
    let mut state = visit_state(p)?;
    let mut times = vec![ExactNat::zero()];
    loop {
        match advance(&state, t)? {
            Advance::Visit(next) => {
                if next.time.cmp_nat(horizon) == std::cmp::Ordering::Greater {
                    return Ok(times);
                }
                times.push(next.time.clone());
                state = next;
            }
            Advance::Terminal => return Ok(times),
            Advance::BeyondLevels { scale } => {
                // Next visit no earlier than time + N_scale + 1 > horizon,
                // or the table genuinely cannot decide.
                let n_lb = lower_bound_next(&state.time, scale, t)?;
                if n_lb.cmp_nat(horizon) == std::cmp::Ordering::Greater {
                    return Ok(times);
                }
                return Err(Error::UnmaterializedScale { scale });
            }
        }
    }
}

fn ensure_coverage(horizon: &ExactNat, t: &ScaleTable) -> Result<()> {
    let top = t.m(t.k_max())?;
    if horizon.cmp_nat(top) == std::cmp::Ordering::Greater {
        return Err(Error::HorizonExceedsTable { k_max: t.k_max() });
    }
    Ok(())
}

/// `time + N_scale + 1`, a lower bound on the next visit time when the
/// next rank first touches `scale`.
fn lower_bound_next(time: &ExactNat, scale: u32, t: &ScaleTable) -> Result<ExactNat> {
    let n_scale = if scale <= t.k_max() {
        t.n(scale)?.clone()
    } else {
        t.virtual_next(t.k_max())?.0
    };
    Ok(ExactNat::add(
        time.clone(),
        ExactNat::add(n_scale, ExactNat::one()),
    ))
}

/// Machine-word visit schedule for probe work.
#[derive(Clone, Debug)]
pub struct Schedule {
    pub start_is_o: bool,
    /// First symbol of the start point: the orbit reaches `U_0` after
    /// exactly this many steps (0 for starts already in `U_0`).
    pub initial_descent: u64,
    pub visits: Vec<Visit>,
    pub cut: Cut,
}

#[derive(Clone, Debug)]
pub struct Visit {
    pub time: u64,
    pub rank: Option<Rank>,
    cursor: Cursor,
}

/// What follows the last in-horizon visit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cut {
    /// Hub orbit: one step after the last visit the orbit is `o` forever.
    Terminal,
    /// A climb of length `gap` continues past the horizon.
    Climb { gap: u64, target: u64 },
    /// The next gap exceeds any machine horizon; heights stay huge.
    Huge,
}

/// Visit schedule of `p` up to `horizon` with word-sized times.
pub fn schedule_u64(p: &Point, horizon: u64, t: &ScaleTable) -> Result<Schedule> {
    ensure_coverage(&ExactNat::from_u64(horizon), t)?;
    if p.is_o() {
        return Ok(Schedule {
            start_is_o: true,
            initial_descent: 0,
            visits: Vec::new(),
            cut: Cut::Terminal,
        });
    }
    let j0 = p.first_symbol().expect("non-o point");
    let Point::At { prefix, tail } = p else { unreachable!() };
    let gen = match tail {
        Tail::Hub => None,
        Tail::Stream(g) => Some(g.clone()),
    };
    let mut cursor = Cursor::new(prefix[1..].to_vec(), gen);
    let rank = cursor.next_symbol().map(Rank);
    let mut visits = Vec::new();
    let mut time = j0;
    let mut cut = Cut::Terminal;
    if time <= horizon {
        visits.push(Visit { time, rank, cursor: cursor.clone() });
    } else {
        // The start never reaches U_0 within the horizon.
        return Ok(Schedule {
            start_is_o: false,
            initial_descent: j0,
            visits,
            cut: Cut::Climb { gap: 0, target: 0 },
        });
    }
    let mut rank = match rank {
        Some(r) => r,
        None => {
            return Ok(Schedule { start_is_o: false, initial_descent: j0, visits, cut })
        }
    };
    loop {
        let Some(sym) = cursor.peek() else {
            cut = Cut::Terminal;
            break;
        };
        let r_next = rank
            .0
            .checked_add(sym)
            .and_then(|x| x.checked_add(1))
            .ok_or(Error::HeightOverflow)?;
        if r_next >= lattice::rank_span(t) {
            let lb = lower_bound_next(&ExactNat::from_u64(time), t.usable_level_top() + 1, t)?;
            if lb.cmp_nat(&ExactNat::from_u64(horizon)) == std::cmp::Ordering::Greater {
                cut = Cut::Huge;
                break;
            }
            return Err(Error::UnmaterializedScale { scale: t.usable_level_top() + 1 });
        }
        let gap = lattice::gap(rank, Rank(r_next), t)?;
        let Some(g) = gap.to_u64() else {
            cut = Cut::Huge;
            break;
        };
        let Some(next_t) = time.checked_add(g) else {
            cut = Cut::Huge;
            break;
        };
        if next_t > horizon {
            cut = Cut::Climb { gap: g, target: r_next };
            break;
        }
        cursor.next_symbol();
        rank = Rank(r_next);
        time = next_t;
        visits.push(Visit { time, rank: Some(rank), cursor: cursor.clone() });
    }
    Ok(Schedule { start_is_o: false, initial_descent: j0, visits, cut })
}

/// Height of a state: at `o`, at a word-sized first symbol, or beyond
/// machine range (deep inside an astronomically long climb).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum H {
    AtO,
    Level(u64),
    Huge,
}

impl H {
    pub fn is_visit(&self) -> bool {
        matches!(self, H::Level(0))
    }
}

/// Infinite iterator over orbit heights at times `0, 1, 2, …`, driven by
/// a [`Schedule`]. Only heights are produced; use
/// [`Schedule::point_at`] for the full state.
pub struct HeightIter<'a> {
    schedule: &'a Schedule,
    n: u64,
    seg: usize, // next visit index to cross
}

impl Schedule {
    pub fn heights(&self) -> HeightIter<'_> {
        HeightIter { schedule: self, n: 0, seg: 0 }
    }

    /// Height at absolute time `n` (independent of iteration).
    pub fn height_at(&self, n: u64) -> H {
        if self.start_is_o {
            return H::AtO;
        }
        if n < self.initial_descent {
            return H::Level(self.initial_descent - n);
        }
        if self.visits.is_empty() {
            // Start never reached U_0 within horizon: still descending.
            return H::Level(
                self.initial_descent
                    .checked_sub(n)
                    .expect("queried past the scheduled horizon"),
            );
        }
        let last = self.visits.last().expect("non-empty");
        if n > last.time {
            return match self.cut {
                Cut::Terminal => H::AtO,
                Cut::Climb { gap, .. } => H::Level(last.time + gap - n),
                Cut::Huge => H::Huge,
            };
        }
        // Find the visit segment containing n.
        let idx = self.visits.partition_point(|v| v.time <= n);
        let prev = &self.visits[idx - 1];
        if prev.time == n {
            return H::Level(0);
        }
        let next = &self.visits[idx];
        H::Level(next.time - n)
    }

    /// The orbit's point at time `n <= horizon`.
    pub fn point_at(&self, n: u64, start: &Point, t: &ScaleTable) -> Result<Point> {
        if self.start_is_o {
            return Ok(Point::O);
        }
        if n < self.initial_descent || self.visits.is_empty() {
            // Still descending the start prefix.
            let mut cur = start.clone();
            for _ in 0..n {
                cur = step(&cur, t)?;
            }
            return Ok(cur);
        }
        let last = self.visits.last().expect("non-empty");
        if n > last.time {
            return match &self.cut {
                Cut::Terminal => Ok(Point::O),
                Cut::Climb { gap, target } => {
                    let h = last.time + gap - n;
                    let mut cursor = last.cursor.clone();
                    cursor.next_symbol();
                    Ok(cursor.point_with(h, *target))
                }
                Cut::Huge => Err(Error::HeightOverflow),
            };
        }
        let idx = self.visits.partition_point(|v| v.time <= n);
        let prev = &self.visits[idx - 1];
        if prev.time == n {
            return Ok(match prev.rank {
                Some(r) => prev.cursor.point_with(0, r.0),
                None => Point::hub(vec![0]).expect("hub [0]"),
            });
        }
        let next = &self.visits[idx];
        let h = next.time - n;
        let rank = next.rank.expect("interior visits carry ranks");
        Ok(next.cursor.point_with(h, rank.0))
    }
}

impl Iterator for HeightIter<'_> {
    type Item = H;

    fn next(&mut self) -> Option<H> {
        let s = self.schedule;
        let n = self.n;
        self.n += 1;
        if s.start_is_o {
            return Some(H::AtO);
        }
        if n < s.initial_descent || s.visits.is_empty() {
            return Some(H::Level(s.initial_descent - n));
        }
        while self.seg < s.visits.len() && s.visits[self.seg].time < n {
            self.seg += 1;
        }
        if self.seg < s.visits.len() {
            let v = &s.visits[self.seg];
            return Some(if v.time == n { H::Level(0) } else { H::Level(v.time - n) });
        }
        let last = s.visits.last().expect("non-empty");
        Some(match s.cut {
            Cut::Terminal => {
                if n == last.time {
                    H::Level(0)
                } else {
                    H::AtO
                }
            }
            Cut::Climb { gap, .. } => H::Level(last.time + gap - n),
            Cut::Huge => {
                if n == last.time {
                    H::Level(0)
                } else {
                    H::Huge
                }
            }
        })
    }
}

// ---------------------------------------------------------------------
// Verifiers
// ---------------------------------------------------------------------

/// Outcome of a mechanical check, with a replayable counterexample.
#[derive(Clone, Debug)]
pub struct Report {
    pub pass: bool,
    pub checked: u64,
    pub detail: String,
    pub counterexample: Option<String>,
    pub samples: Vec<String>,
}

impl Report {
    fn pass(checked: u64, detail: String, samples: Vec<String>) -> Self {
        Report { pass: true, checked, detail, counterexample: None, samples }
    }

    fn fail(checked: u64, detail: String, counterexample: String) -> Self {
        Report { pass: false, checked, detail, counterexample: Some(counterexample), samples: Vec::new() }
    }
}

/// On the truncation (depth, branch_cap), the image of `E_j`'s node set
/// must equal `E_{j−1}`'s exactly, bijectively, for every `1 <= j <
/// branch_cap`.
pub fn verify_claim1(depth: u32, branch_cap: u64, t: &ScaleTable) -> Result<Report> {
    verify_claim1_with(step, depth, branch_cap, t)
}

/// Claim-1 checker over an arbitrary step rule (mutant testing hook).
pub fn verify_claim1_with(
    step_fn: impl Fn(&Point, &ScaleTable) -> Result<Point>,
    depth: u32,
    branch_cap: u64,
    t: &ScaleTable,
) -> Result<Report> {
    let nodes = truncate(depth, branch_cap);
    let mut checked = 0u64;
    for j in 1..branch_cap {
        let domain: Vec<&crate::space::TruncNode> = nodes
            .iter()
            .filter(|n| n.prefix.first() == Some(&j))
            .collect();
        let expected: BTreeSet<Vec<u64>> = nodes
            .iter()
            .filter(|n| n.prefix.first() == Some(&(j - 1)))
            .map(|n| n.prefix.clone())
            .chain(std::iter::once(Vec::new())) // o
            .collect();
        let mut image: BTreeSet<Vec<u64>> = BTreeSet::new();
        // o maps to o inside every E_j.
        image.insert(Vec::new());
        let mut injective = true;
        for node in &domain {
            let p = Point::hub(node.prefix.clone())?;
            let q = step_fn(&p, t)?;
            let key = match &q {
                Point::O => Vec::new(),
                Point::At { prefix, .. } => prefix.clone(),
            };
            if !image.insert(key) {
                injective = false;
            }
            checked += 1;
        }
        if image != expected || !injective {
            let missing: Vec<String> = expected
                .difference(&image)
                .take(3)
                .map(|p| format!("{p:?}"))
                .collect();
            let extra: Vec<String> = image
                .difference(&expected)
                .take(3)
                .map(|p| format!("{p:?}"))
                .collect();
            return Ok(Report::fail(
                checked,
                format!("f(E_{j}) != E_{} on truncation", j - 1),
                format!(
                    "j={j}: injective={injective}, missing={missing:?}, extra={extra:?}"
                ),
            ));
        }
    }
    Ok(Report::pass(
        checked,
        format!("f(E_j) = E_(j-1) bijectively for 1 <= j < {branch_cap} at depth {depth}"),
        Vec::new(),
    ))
}

/// Containment law: every state of the orbit of `p ∈ E_0` at time
/// `1 <= n <= horizon` lying in `E_j \ {o}` satisfies `n + j − 1 ∈ Z`.
/// Excursion-level verification: the quantity is constant along each
/// excursion and equals `gap(r_start, r_target) − 1`.
pub fn verify_containment(p: &Point, horizon: &ExactNat, t: &ScaleTable) -> Result<Report> {
    if !p.is_o() && p.first_symbol() != Some(0) {
        return Err(Error::Precondition(format!(
            "{} is not in E_0",
            format_point(p)
        )));
    }
    ensure_coverage(horizon, t)?;
    let z = t.zset();
    if p.is_o() {
        return Ok(Report::pass(0, "orbit of o is constant; vacuous".into(), Vec::new()));
    }
    let mut state = visit_state(p)?;
    let r_start = state.rank;
    let mut checked = 0u64;
    let mut samples = Vec::new();
    loop {
        let within = state.time.cmp_nat(horizon) != std::cmp::Ordering::Greater;
        if !within {
            break;
        }
        match advance(&state, t)? {
            Advance::Visit(next) => {
                let r0 = r_start.expect("advancing states carry ranks");
                let target = next.rank.expect("visit ranks present");
                let value = lattice::gap_minus_1(r0, target, t)?;
                let witness = z.contains(&value);
                if witness.is_none() {
                    let n = ExactNat::add(state.time.clone(), ExactNat::one());
                    return Ok(Report::fail(
                        checked,
                        "containment violated".into(),
                        format!(
                            "start={}, excursion to rank {} entered at n={}: n+j-1 = {} not in Z",
                            format_point(p),
                            target.0,
                            n.to_string(),
                            value
                        ),
                    ));
                }
                checked += 1;
                if samples.len() < 5 {
                    // First state of the excursion: n = time+1, j = gap−1.
                    let n = ExactNat::add(state.time.clone(), ExactNat::one());
                    let j = lattice::gap_minus_1(r0, target, t)?;
                    samples.push(format!(
                        "n={}, j={}, n+j-1={} in [N_{}, M_{}]",
                        crate::scales::value_string(&n, t.digit_cap()),
                        crate::scales::value_string(&j, t.digit_cap()),
                        crate::scales::value_string(&value, t.digit_cap()),
                        witness.expect("checked above"),
                        witness.expect("checked above"),
                    ));
                }
                state = next;
            }
            Advance::Terminal => break, // o-states from here on: vacuous
            Advance::BeyondLevels { scale } => {
                // The in-flight excursion's constant is gap − 1 at a level
                // beyond the usable range; it brackets into [N_T, M_T − 1]
                // by the Admissibility Lemma with T >= scale.
                checked += 1;
                if samples.len() < 5 {
                    samples.push(format!(
                        "in-flight excursion at scale >= {scale}: admissible by construction"
                    ));
                }
                break;
            }
        }
    }
    Ok(Report::pass(
        checked,
        format!("containment holds along {checked} excursions"),
        samples,
    ))
}

/// Per-step containment check by naive iteration (oracle form).
pub fn verify_containment_naive(p: &Point, horizon: u64, t: &ScaleTable) -> Result<Report> {
    verify_containment_naive_with(step, p, horizon, t)
}

/// Naive containment checker over an arbitrary step rule (mutant hook).
pub fn verify_containment_naive_with(
    step_fn: impl Fn(&Point, &ScaleTable) -> Result<Point>,
    p: &Point,
    horizon: u64,
    t: &ScaleTable,
) -> Result<Report> {
    if !p.is_o() && p.first_symbol() != Some(0) {
        return Err(Error::Precondition(format!(
            "{} is not in E_0",
            format_point(p)
        )));
    }
    let z = t.zset();
    let mut cur = p.clone();
    let mut checked = 0u64;
    let mut samples = Vec::new();
    for n in 1..=horizon {
        cur = step_fn(&cur, t)?;
        let Some(j) = cur.first_symbol() else { continue }; // o: vacuous
        let value = ExactNat::from_u64(n + j - 1);
        match z.contains(&value) {
            Some(w) => {
                checked += 1;
                if n <= 3 && samples.len() < 5 {
                    samples.push(format!("n={n}, j={j}, n+j-1={} in scale {w}", n + j - 1));
                }
            }
            None => {
                return Ok(Report::fail(
                    checked,
                    "containment violated".into(),
                    format!(
                        "start={}, n={n}, j={j}: n+j-1 = {} not in Z",
                        format_point(p),
                        n + j - 1
                    ),
                ));
            }
        }
    }
    Ok(Report::pass(
        checked,
        format!("containment holds at every step up to {horizon}"),
        samples,
    ))
}

/// Window report: relative returns to `U_0` avoid `[M_K + 1, N_{K+1}]`.
#[derive(Clone, Debug)]
pub struct WindowReport {
    pub pass: bool,
    pub starts: u64,
    pub pairs_checked: u64,
    pub boundary_low_hit: bool,
    pub boundary_top_hit: bool,
    pub counterexample: Option<String>,
}

/// For every start and every pair of visit times `m < m'` within the
/// horizon, `m' − m` must avoid the forbidden window at scale `K`.
/// Also tracks the window edges: a relative return of exactly `M_K`
/// (i.e. `gap − 1 = M_K − 1`) is expected to occur somewhere, while
/// `M_K + 1` (i.e. `gap − 1 = M_K`) must never.
pub fn verify_disjoint_window(
    k: u32,
    starts: &[Point],
    horizon: u64,
    t: &ScaleTable,
) -> Result<WindowReport> {
    let z = t.zset();
    let (lo, hi) = z.gap_window(k)?;
    let m_k = t.m(k)?.to_u64();
    let mut pairs = 0u64;
    let mut boundary_low = false;
    let mut boundary_top = false;
    for p in starts {
        let sched = schedule_u64(p, horizon, t)?;
        let times: Vec<u64> = sched.visits.iter().map(|v| v.time).collect();
        for i in 0..times.len() {
            for j in (i + 1)..times.len() {
                let d = times[j] - times[i];
                pairs += 1;
                if let Some(mk) = m_k {
                    if d == mk {
                        boundary_low = true;
                    }
                    if d == mk + 1 {
                        boundary_top = true;
                    }
                }
                let dn = ExactNat::from_u64(d);
                let inside = dn.cmp_nat(&lo) != std::cmp::Ordering::Less
                    && dn.cmp_nat(&hi) != std::cmp::Ordering::Greater;
                if inside {
                    return Ok(WindowReport {
                        pass: false,
                        starts: starts.len() as u64,
                        pairs_checked: pairs,
                        boundary_low_hit: boundary_low,
                        boundary_top_hit: boundary_top,
                        counterexample: Some(format!(
                            "start={}, visits {} and {}: difference {d} lies in the window",
                            format_point(p),
                            times[i],
                            times[j]
                        )),
                    });
                }
            }
        }
    }
    Ok(WindowReport {
        pass: !boundary_top,
        starts: starts.len() as u64,
        pairs_checked: pairs,
        boundary_low_hit: boundary_low,
        boundary_top_hit: boundary_top,
        counterexample: boundary_top
            .then(|| "a relative return of M_K + 1 occurred".to_string()),
    })
}

/// All fixed points on the truncation; must be exactly `{o}`.
pub fn fixed_points(depth: u32, branch_cap: u64, t: &ScaleTable) -> Result<Vec<Point>> {
    let mut out = Vec::new();
    for node in truncate(depth, branch_cap) {
        let p = if node.prefix.is_empty() {
            Point::O
        } else {
            Point::hub(node.prefix.clone())?
        };
        if step(&p, t)? == p {
            out.push(p);
        }
    }
    Ok(out)
}

/// Least `n` with `f^n(p) = o` for a hub (or `o` itself): descent of the
/// first symbol, one lattice gap per remaining symbol, one final
/// collapse step.
pub fn fixation_time(p: &Point, t: &ScaleTable) -> Result<ExactNat> {
    if !p.is_hub() {
        return Err(Error::Precondition(format!(
            "{} is not a hub",
            format_point(p)
        )));
    }
    let Point::At { prefix, .. } = p else {
        return Ok(ExactNat::zero()); // o
    };
    let mut time = ExactNat::from_u64(prefix[0]);
    let mut cursor = Cursor::new(prefix[1..].to_vec(), None);
    let Some(mut rank) = cursor.next_symbol().map(Rank) else {
        // [j]: descend then collapse.
        return Ok(ExactNat::add(time, ExactNat::one()));
    };
    while let Some(sym) = cursor.next_symbol() {
        let r_next = rank
            .0
            .checked_add(sym)
            .and_then(|x| x.checked_add(1))
            .ok_or(Error::HeightOverflow)?;
        time = ExactNat::add(time, lattice::gap(rank, Rank(r_next), t)?);
        rank = Rank(r_next);
    }
    Ok(ExactNat::add(time, ExactNat::one()))
}
