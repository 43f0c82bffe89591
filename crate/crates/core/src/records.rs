//! Functional records: detection, upper/lower classification and counting
//! processes.
//!
//! A curve `x_j` is a record when its depth among `x_1, ..., x_j` is one of
//! the two smallest depth values (ties included). The first two curves are
//! records by definition. A record is upper when it lies on or above the
//! deepest curve of the prefix for more than half of the time.

use log::warn;

use crate::depth::{depth_order, depth_rows, DepthKind, DepthOrder};
use crate::error::{FrecError, Result};
use crate::grid::{FunctionalSample, Grid};

/// How records are detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum RecordAlgorithm {
    /// Depth of every curve in the whole prefix at every time step.
    #[default]
    ExactPrefix,
    /// Track only the current upper and lower record curves and rank each
    /// new curve against them. Agrees with `ExactPrefix` on constant curves
    /// but not in general once curves cross.
    StreamingPair,
}

impl RecordAlgorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            RecordAlgorithm::ExactPrefix => "exact",
            RecordAlgorithm::StreamingPair => "streaming",
        }
    }
}

impl std::str::FromStr for RecordAlgorithm {
    type Err = FrecError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(RecordAlgorithm::ExactPrefix),
            "streaming" => Ok(RecordAlgorithm::StreamingPair),
            other => Err(FrecError::invalid(format!(
                "unknown algorithm '{other}' (expected exact|streaming)"
            ))),
        }
    }
}

impl std::fmt::Display for RecordAlgorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RecordKind {
    Upper,
    Lower,
}

impl RecordKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RecordKind::Upper => "U",
            RecordKind::Lower => "L",
        }
    }

    fn opposite(self) -> Self {
        match self {
            RecordKind::Upper => RecordKind::Lower,
            RecordKind::Lower => RecordKind::Upper,
        }
    }
}

/// One record observation.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordEvent {
    /// 1-based time index.
    pub time: usize,
    pub kind: RecordKind,
    /// Depth of the record curve in the set it was ranked in.
    pub depth_at_detection: f64,
    /// Fraction of time on or above the reference curve.
    pub t_upper: f64,
    /// Fraction of time strictly below the reference curve.
    pub t_lower: f64,
}

impl RecordEvent {
    /// The first two records exist by definition.
    pub fn is_definitional(&self) -> bool {
        self.time <= 2
    }
}

/// Record events of a sample together with their counting processes.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordTrajectory {
    events: Vec<RecordEvent>,
    n: usize,
    counts: Vec<usize>,
    upper: Vec<usize>,
    lower: Vec<usize>,
}

impl RecordTrajectory {
    fn from_events(events: Vec<RecordEvent>, n: usize) -> Self {
        let mut counts = Vec::with_capacity(n);
        let mut upper = Vec::with_capacity(n);
        let mut lower = Vec::with_capacity(n);
        let (mut c, mut u, mut l) = (0, 0, 0);
        let mut it = events.iter().peekable();
        for j in 1..=n {
            if let Some(e) = it.next_if(|e| e.time == j) {
                c += 1;
                match e.kind {
                    RecordKind::Upper => u += 1,
                    RecordKind::Lower => l += 1,
                }
            }
            counts.push(c);
            upper.push(u);
            lower.push(l);
        }
        RecordTrajectory {
            events,
            n,
            counts,
            upper,
            lower,
        }
    }

    pub fn events(&self) -> &[RecordEvent] {
        &self.events
    }

    /// Sample size.
    pub fn n(&self) -> usize {
        self.n
    }

    /// `N_1, ..., N_n`.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// `N^u_1, ..., N^u_n`.
    pub fn upper_counts(&self) -> &[usize] {
        &self.upper
    }

    /// `N^l_1, ..., N^l_n`.
    pub fn lower_counts(&self) -> &[usize] {
        &self.lower
    }

    /// Record times `L(1) = 1, L(2) = 2, ...` (1-based).
    pub fn record_times(&self) -> Vec<usize> {
        self.events.iter().map(|e| e.time).collect()
    }

    pub fn total(&self) -> usize {
        self.counts[self.n - 1]
    }

    pub fn total_upper(&self) -> usize {
        self.upper[self.n - 1]
    }

    pub fn total_lower(&self) -> usize {
        self.lower[self.n - 1]
    }

    /// The event at time `j`, if `x_j` is a record.
    pub fn event_at(&self, j: usize) -> Option<&RecordEvent> {
        self.events
            .binary_search_by_key(&j, |e| e.time)
            .ok()
            .map(|k| &self.events[k])
    }
}

/// One row of the counting process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountRow {
    pub j: usize,
    pub total: usize,
    pub upper: usize,
    pub lower: usize,
}

/// `(j, N_j, N^u_j, N^l_j)` for `j = 1..n`.
pub fn counting_process(traj: &RecordTrajectory) -> Vec<CountRow> {
    (0..traj.n)
        .map(|k| CountRow {
            j: k + 1,
            total: traj.counts[k],
            upper: traj.upper[k],
            lower: traj.lower[k],
        })
        .collect()
}

/// Side of `x` relative to `reference`, with the time fractions used to decide.
fn side_of(x: &[f64], reference: &[f64]) -> (RecordKind, f64, f64) {
    let m = x.len();
    let above = x.iter().zip(reference).filter(|(a, r)| a >= r).count();
    let t_upper = above as f64 / m as f64;
    let t_lower = (m - above) as f64 / m as f64;
    let kind = match (2 * above).cmp(&m) {
        std::cmp::Ordering::Greater => RecordKind::Upper,
        std::cmp::Ordering::Less => RecordKind::Lower,
        std::cmp::Ordering::Equal => {
            let mean = |v: &[f64]| v.iter().sum::<f64>() / m as f64;
            if mean(x) > mean(reference) {
                RecordKind::Upper
            } else {
                RecordKind::Lower
            }
        }
    };
    (kind, t_upper, t_lower)
}

/// Classifies the record `x_j` of a prefix as upper or lower, using the
/// deepest curve of `prefix_order` as the reference.
pub fn classify(
    j: usize,
    prefix_sample: &FunctionalSample,
    prefix_order: &DepthOrder,
) -> Result<RecordEvent> {
    if j == 0 || j > prefix_sample.len() || prefix_order.permutation().len() != prefix_sample.len()
    {
        return Err(FrecError::invalid(format!(
            "time {j} outside a prefix of {} curves",
            prefix_sample.len()
        )));
    }
    let idx = j - 1;
    if j >= 3 && !prefix_order.is_among_two_least_deep(idx) {
        return Err(FrecError::invalid(format!(
            "contract violation: x_{j} is not a record"
        )));
    }
    if prefix_sample.len() < 2 {
        return Err(FrecError::invalid(
            "classification needs at least two curves",
        ));
    }
    let reference = prefix_order
        .permutation()
        .iter()
        .copied()
        .find(|&i| i != idx)
        .expect("at least two curves");
    let (kind, t_upper, t_lower) = side_of(
        prefix_sample.curve(idx).values(),
        prefix_sample.curve(reference).values(),
    );
    Ok(RecordEvent {
        time: j,
        kind,
        depth_at_detection: prefix_order.depth(idx),
        t_upper,
        t_lower,
    })
}

/// The two definitional records: whichever of `x_1`, `x_2` lies above the
/// other more often is upper.
fn initial_events(x1: &[f64], x2: &[f64]) -> [RecordEvent; 2] {
    let (kind2, t_upper2, t_lower2) = side_of(x2, x1);
    [
        RecordEvent {
            time: 1,
            kind: kind2.opposite(),
            depth_at_detection: 1.0,
            t_upper: t_lower2,
            t_lower: t_upper2,
        },
        RecordEvent {
            time: 2,
            kind: kind2,
            depth_at_detection: 1.0,
            t_upper: t_upper2,
            t_lower: t_lower2,
        },
    ]
}

fn check_input(sample: &FunctionalSample) -> Result<()> {
    if sample.len() < 2 {
        return Err(FrecError::invalid(format!(
            "record detection needs at least 2 curves, got {}",
            sample.len()
        )));
    }
    Ok(())
}

/// Detects all records of `sample` and builds the counting processes.
pub fn detect_records(
    sample: &FunctionalSample,
    kind: DepthKind,
    algo: RecordAlgorithm,
    tiebreak_seed: Option<u64>,
) -> Result<RecordTrajectory> {
    check_input(sample)?;
    let rows = sample.rows();
    let events = match algo {
        RecordAlgorithm::ExactPrefix => exact_prefix(&rows, kind, tiebreak_seed)?,
        RecordAlgorithm::StreamingPair => streaming_pair(&rows, kind, tiebreak_seed)?,
    };
    Ok(RecordTrajectory::from_events(events, sample.len()))
}

/// Like [`detect_records`] on raw rows sharing `grid`; used by the Monte Carlo
/// harness to avoid building a sample per replicate.
pub(crate) fn detect_records_rows(
    rows: &[&[f64]],
    grid: &Grid,
    kind: DepthKind,
    algo: RecordAlgorithm,
    tiebreak_seed: Option<u64>,
) -> Result<RecordTrajectory> {
    if rows.iter().any(|r| r.len() != grid.len()) {
        return Err(FrecError::invalid("rows do not match the grid"));
    }
    if rows.len() < 2 {
        return Err(FrecError::invalid(
            "record detection needs at least 2 curves",
        ));
    }
    let events = match algo {
        RecordAlgorithm::ExactPrefix => exact_prefix(rows, kind, tiebreak_seed)?,
        RecordAlgorithm::StreamingPair => streaming_pair(rows, kind, tiebreak_seed)?,
    };
    Ok(RecordTrajectory::from_events(events, rows.len()))
}

fn warn_duplicate(j: usize, rows: &[&[f64]], candidates: &[usize], warned: &mut bool) {
    if *warned {
        return;
    }
    if candidates.iter().any(|&i| rows[i] == rows[j - 1]) {
        warn!("curve {j} duplicates an earlier curve; depth ties may break record uniqueness");
        *warned = true;
    }
}

/// Tie-breaking uniforms `W_1, ..., W_n`, drawn in the same order as
/// [`depth_order`] so every prefix sees the same values.
fn tiebreak_uniforms(n: usize, seed: Option<u64>) -> Option<Vec<f64>> {
    seed.map(|s| {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(s);
        (0..n).map(|_| rng.random::<f64>()).collect()
    })
}

/// Prefix depths maintained under insertion of one curve at a time.
///
/// For every curve and grid point it keeps the number of curves strictly
/// below and strictly above; inserting `x_t` changes each count by at most
/// one, so MBD scores and ED level histograms are updated in `O(t m)`
/// instead of being recomputed.
struct PrefixDepths<'a> {
    rows: &'a [&'a [f64]],
    kind: DepthKind,
    m: usize,
    cap: usize,
    len: usize,
    /// Column-major `[s * cap + i]`.
    values: Vec<f64>,
    below: Vec<u32>,
    above: Vec<u32>,
    /// MBD numerators over `m * C(len, 2)`.
    mbd: Vec<u64>,
    /// ED level histograms `[i * (cap + 1) + level]` and highest occupied level.
    hist: Vec<u32>,
    top: Vec<usize>,
}

impl<'a> PrefixDepths<'a> {
    fn new(rows: &'a [&'a [f64]], kind: DepthKind) -> Self {
        let cap = rows.len();
        let m = rows[0].len();
        let ed = kind == DepthKind::Ed;
        PrefixDepths {
            rows,
            kind,
            m,
            cap,
            len: 0,
            values: vec![0.0; m * cap],
            below: vec![0; m * cap],
            above: vec![0; m * cap],
            mbd: if ed { Vec::new() } else { vec![0; cap] },
            hist: if ed {
                vec![0; cap * (cap + 1)]
            } else {
                Vec::new()
            },
            top: if ed { vec![0; cap] } else { Vec::new() },
        }
    }

    fn choose2(k: u64) -> u64 {
        k * k.saturating_sub(1) / 2
    }

    fn move_level(&mut self, i: usize, from: usize, to: usize) {
        let base = i * (self.cap + 1);
        self.hist[base + from] -= 1;
        self.hist[base + to] += 1;
        if to > self.top[i] {
            self.top[i] = to;
        }
        while self.top[i] > 0 && self.hist[base + self.top[i]] == 0 {
            self.top[i] -= 1;
        }
    }

    /// Inserts the next curve of `rows`.
    fn push(&mut self) {
        let t = self.len;
        let cap = self.cap;
        let x = self.rows[t];
        let ed = self.kind == DepthKind::Ed;
        let tt = t as u64;
        for (s, &v) in x.iter().enumerate() {
            let (mut a_new, mut b_new) = (0u32, 0u32);
            let base = s * cap;
            if ed {
                for i in 0..t {
                    let xi = self.values[base + i];
                    let (a, b) = (self.below[base + i], self.above[base + i]);
                    if xi < v {
                        a_new += 1;
                        self.above[base + i] = b + 1;
                        self.move_level(i, a.abs_diff(b) as usize, a.abs_diff(b + 1) as usize);
                    } else if xi > v {
                        b_new += 1;
                        self.below[base + i] = a + 1;
                        self.move_level(i, a.abs_diff(b) as usize, (a + 1).abs_diff(b) as usize);
                    }
                }
            } else {
                let values = &self.values[base..base + t];
                let below = &mut self.below[base..base + t];
                let above = &mut self.above[base..base + t];
                let mbd = &mut self.mbd[..t];
                for i in 0..t {
                    let lt = u32::from(values[i] < v);
                    let gt = u32::from(values[i] > v);
                    mbd[i] += tt - u64::from(lt * above[i] + gt * below[i]);
                    above[i] += lt;
                    below[i] += gt;
                    a_new += lt;
                    b_new += gt;
                }
            }
            self.values[s * cap + t] = v;
            self.below[s * cap + t] = a_new;
            self.above[s * cap + t] = b_new;
            if ed {
                let level = a_new.abs_diff(b_new) as usize;
                self.hist[t * (cap + 1) + level] += 1;
                self.top[t] = self.top[t].max(level);
            } else {
                self.mbd[t] += Self::choose2(tt + 1)
                    - Self::choose2(a_new as u64)
                    - Self::choose2(b_new as u64);
            }
        }
        self.len += 1;
    }

    /// `Greater` when curve `i` is less deep than curve `k`.
    fn cmp_outlying(&self, i: usize, k: usize) -> std::cmp::Ordering {
        match self.kind {
            DepthKind::Mbd => self.mbd[k].cmp(&self.mbd[i]),
            DepthKind::Ed => {
                let w = self.cap + 1;
                let hi = self.top[i].max(self.top[k]);
                let a = &self.hist[i * w..i * w + hi + 1];
                let b = &self.hist[k * w..k * w + hi + 1];
                a.iter().rev().cmp(b.iter().rev())
            }
        }
    }

    /// True when the newest curve holds one of the two smallest depth values.
    fn newest_is_record(&self) -> bool {
        let t = self.len - 1;
        let mut deeper_count = 0;
        for i in 0..t {
            if self.cmp_outlying(i, t) == std::cmp::Ordering::Greater {
                deeper_count += 1;
                if deeper_count > 1 {
                    return false;
                }
            }
        }
        true
    }

    /// Deepest curve other than `skip`, ties broken as in [`depth_order`].
    fn deepest_except(&self, skip: usize, w: Option<&[f64]>) -> usize {
        let mut best: Option<usize> = None;
        for i in (0..self.len).filter(|&i| i != skip) {
            best = Some(match best {
                None => i,
                Some(b) => match self.cmp_outlying(i, b) {
                    std::cmp::Ordering::Less => i,
                    std::cmp::Ordering::Greater => b,
                    std::cmp::Ordering::Equal => match w {
                        Some(w) if w[i] > w[b] => i,
                        _ => b,
                    },
                },
            });
        }
        best.expect("prefix has at least two curves")
    }

    /// Depth of curve `i` in the current prefix.
    fn depth_of(&self, i: usize) -> f64 {
        let n = self.len as u64;
        match self.kind {
            DepthKind::Mbd => self.mbd[i] as f64 / (self.m as u64 * Self::choose2(n)) as f64,
            DepthKind::Ed => {
                let more_central = (0..self.len)
                    .filter(|&k| self.cmp_outlying(i, k) == std::cmp::Ordering::Greater)
                    .count() as u64;
                (n - more_central) as f64 / n as f64
            }
        }
    }
}

fn exact_prefix(rows: &[&[f64]], kind: DepthKind, seed: Option<u64>) -> Result<Vec<RecordEvent>> {
    let n = rows.len();
    let w = tiebreak_uniforms(n, seed);
    let mut events = initial_events(rows[0], rows[1]).to_vec();
    let mut warned = false;
    let earlier: Vec<usize> = (0..n).collect();
    let mut prefix = PrefixDepths::new(rows, kind);
    prefix.push();
    prefix.push();
    for j in 3..=n {
        warn_duplicate(j, rows, &earlier[..j - 1], &mut warned);
        prefix.push();
        if !prefix.newest_is_record() {
            continue;
        }
        let x = j - 1;
        let reference = prefix.deepest_except(x, w.as_deref());
        let (kind, t_upper, t_lower) = side_of(rows[x], rows[reference]);
        events.push(RecordEvent {
            time: j,
            kind,
            depth_at_detection: prefix.depth_of(x),
            t_upper,
            t_lower,
        });
    }
    Ok(events)
}

fn streaming_pair(rows: &[&[f64]], kind: DepthKind, seed: Option<u64>) -> Result<Vec<RecordEvent>> {
    let n = rows.len();
    let initial = initial_events(rows[0], rows[1]);
    let (mut up, mut low) = match initial[0].kind {
        RecordKind::Upper => (0usize, 1usize),
        RecordKind::Lower => (1, 0),
    };
    let mut events = initial.to_vec();
    let mut warned = false;
    for j in 3..=n {
        let x = j - 1;
        warn_duplicate(j, rows, &[up, low], &mut warned);
        let triple = [rows[up], rows[low], rows[x]];
        let dv = depth_rows(&triple, kind)?;
        let s = dv.scores();
        if s[2] > s[0] && s[2] > s[1] {
            continue;
        }
        // The deeper of the two current record curves is the reference.
        let reference = match s[0].cmp(&s[1]) {
            std::cmp::Ordering::Greater => up,
            std::cmp::Ordering::Less => low,
            std::cmp::Ordering::Equal => {
                let ord = depth_order(&dv, seed);
                if ord.permutation().iter().position(|&i| i == 0)
                    < ord.permutation().iter().position(|&i| i == 1)
                {
                    up
                } else {
                    low
                }
            }
        };
        let (side, t_upper, t_lower) = side_of(rows[x], rows[reference]);
        match side {
            RecordKind::Upper => up = x,
            RecordKind::Lower => low = x,
        }
        events.push(RecordEvent {
            time: j,
            kind: side,
            depth_at_detection: dv.value(2),
            t_upper,
            t_lower,
        });
    }
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::depth::depth;
    use crate::grid::uniform_grid;

    fn consts(values: &[f64]) -> FunctionalSample {
        FunctionalSample::constants(values, &uniform_grid(6).unwrap()).unwrap()
    }

    fn all_modes() -> Vec<(DepthKind, RecordAlgorithm)> {
        let mut v = Vec::new();
        for k in [DepthKind::Mbd, DepthKind::Ed] {
            for a in [RecordAlgorithm::ExactPrefix, RecordAlgorithm::StreamingPair] {
                v.push((k, a));
            }
        }
        v
    }

    #[test]
    fn constants_1_3_2_4() {
        for (k, a) in all_modes() {
            let t = detect_records(&consts(&[1.0, 3.0, 2.0, 4.0]), k, a, None).unwrap();
            assert_eq!(t.record_times(), vec![1, 2, 4], "{k} {a}");
            assert_eq!(t.counts(), &[1, 2, 2, 3]);
            let kinds: Vec<_> = t.events().iter().map(|e| e.kind).collect();
            assert_eq!(
                kinds,
                vec![RecordKind::Lower, RecordKind::Upper, RecordKind::Upper]
            );
        }
    }

    #[test]
    fn monotone_constants_are_all_records() {
        for (k, a) in all_modes() {
            let t = detect_records(&consts(&[1.0, 2.0, 3.0, 4.0, 5.0]), k, a, None).unwrap();
            assert_eq!(t.record_times(), vec![1, 2, 3, 4, 5]);
            assert_eq!(t.total(), 5);
            assert_eq!(t.total_upper(), 4);
        }
    }

    #[test]
    fn two_curves_are_two_records() {
        let s =
            FunctionalSample::from_rows(vec![vec![0.0, 1.0, -1.0], vec![2.0, -2.0, 0.5]]).unwrap();
        for (k, a) in all_modes() {
            let t = detect_records(&s, k, a, None).unwrap();
            assert_eq!(t.record_times(), vec![1, 2]);
            assert_eq!(t.counts(), &[1, 2]);
            assert_eq!(t.total_upper() + t.total_lower(), 2);
            assert_ne!(t.events()[0].kind, t.events()[1].kind);
        }
    }

    #[test]
    fn single_curve_rejected() {
        let s = FunctionalSample::from_rows(vec![vec![0.0, 1.0]]).unwrap();
        assert!(detect_records(&s, DepthKind::Mbd, RecordAlgorithm::ExactPrefix, None).is_err());
    }

    fn prefix_and_order(rows: Vec<Vec<f64>>) -> (FunctionalSample, DepthOrder) {
        let s = FunctionalSample::from_rows(rows).unwrap();
        let ord = depth_order(&depth(&s, DepthKind::Mbd).unwrap(), None);
        (s, ord)
    }

    #[test]
    fn classify_above_and_below() {
        let m = 50;
        let base = |c: f64| vec![c; m];
        let (s, ord) = prefix_and_order(vec![base(0.0), base(1.0), base(-1.0), base(5.0)]);
        let e = classify(4, &s, &ord).unwrap();
        assert_eq!(e.kind, RecordKind::Upper);
        assert_eq!((e.t_upper, e.t_lower), (1.0, 0.0));

        let (s, ord) = prefix_and_order(vec![base(0.0), base(1.0), base(-1.0), base(-5.0)]);
        let e = classify(4, &s, &ord).unwrap();
        assert_eq!(e.kind, RecordKind::Lower);
        assert_eq!(e.t_upper, 0.0);
    }

    #[test]
    fn classify_partial_overlap() {
        let m = 50;
        // Deepest curve is the zero curve; x_4 is above it on 30 of 50 points.
        let x4: Vec<f64> = (0..m).map(|k| if k < 30 { 10.0 } else { -10.0 }).collect();
        let (s, ord) = prefix_and_order(vec![vec![0.0; m], vec![1.0; m], vec![-1.0; m], x4]);
        assert_eq!(ord.deepest(), 0);
        let e = classify(4, &s, &ord).unwrap();
        assert_eq!(e.kind, RecordKind::Upper);
        assert!((e.t_upper - 0.6).abs() < 1e-15);
        assert!((e.t_upper + e.t_lower - 1.0).abs() < 1e-15);
    }

    #[test]
    fn classify_rejects_non_record() {
        let (s, ord) = prefix_and_order(vec![vec![1.0; 4], vec![3.0; 4], vec![2.0; 4]]);
        assert!(classify(3, &s, &ord).is_err());
    }

    #[test]
    fn classify_half_time_tie_uses_mean() {
        let m = 4;
        let x: Vec<f64> = vec![3.0, 3.0, -2.0, -2.0];
        let (s, ord) = prefix_and_order(vec![vec![0.0; m], vec![2.0; m], vec![-2.0; m], x]);
        let e = classify(4, &s, &ord).unwrap();
        assert_eq!(e.t_upper, 0.5);
        assert_eq!(e.kind, RecordKind::Upper);
    }

    #[test]
    fn counting_process_rows() {
        let ev = |time, kind| RecordEvent {
            time,
            kind,
            depth_at_detection: 0.0,
            t_upper: 0.0,
            t_lower: 1.0,
        };
        let t = RecordTrajectory::from_events(
            vec![
                ev(1, RecordKind::Upper),
                ev(2, RecordKind::Lower),
                ev(4, RecordKind::Upper),
            ],
            5,
        );
        let rows = counting_process(&t);
        let n: Vec<_> = rows.iter().map(|r| r.total).collect();
        let nu: Vec<_> = rows.iter().map(|r| r.upper).collect();
        assert_eq!(n, vec![1, 2, 2, 3, 3]);
        assert_eq!(nu, vec![1, 1, 1, 2, 2]);
        assert!(rows.iter().all(|r| r.upper + r.lower == r.total));

        let t = RecordTrajectory::from_events(
            vec![ev(1, RecordKind::Upper), ev(2, RecordKind::Lower)],
            4,
        );
        assert_eq!(t.counts(), &[1, 2, 2, 2]);
    }

    #[test]
    fn duplicate_curves_still_detected() {
        let s = consts(&[1.0, 3.0, 3.0, 2.0]);
        // A copy of the current maximum ties the extreme depth and counts as a record.
        for (k, a) in all_modes() {
            let t = detect_records(&s, k, a, Some(7)).unwrap();
            let expected = if (k, a) == (DepthKind::Mbd, RecordAlgorithm::ExactPrefix) {
                // Under MBD the two copies of 3 tie with the middle value 2 at j = 4.
                vec![1, 2, 3, 4]
            } else {
                vec![1, 2, 3]
            };
            assert_eq!(t.record_times(), expected, "{k} {a}");
        }
    }
}
