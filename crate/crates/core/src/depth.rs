//! Modified band depth and extremal depth, computed exactly.
//!
//! Depth values are stored as integer scores over a common denominator so
//! that ties are detected without rounding: MBD scores are band-membership
//! counts over `m * C(n, 2)`, ED scores are `n - #{less extreme curves}` over
//! `n`.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{FrecError, Result};
use crate::grid::{FunctionalSample, Grid};

/// Which depth notion induces the center-outward order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DepthKind {
    /// Modified band depth with pairwise bands.
    #[default]
    Mbd,
    /// Extremal depth.
    Ed,
}

impl DepthKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DepthKind::Mbd => "mbd",
            DepthKind::Ed => "ed",
        }
    }
}

impl std::str::FromStr for DepthKind {
    type Err = FrecError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mbd" => Ok(DepthKind::Mbd),
            "ed" => Ok(DepthKind::Ed),
            other => Err(FrecError::invalid(format!(
                "unknown depth '{other}' (expected mbd|ed)"
            ))),
        }
    }
}

impl std::fmt::Display for DepthKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-curve depth values of one sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthVector {
    kind: DepthKind,
    scores: Vec<u64>,
    denominator: u64,
}

impl DepthVector {
    pub(crate) fn from_scores(kind: DepthKind, scores: Vec<u64>, denominator: u64) -> Self {
        DepthVector {
            kind,
            scores,
            denominator,
        }
    }

    pub fn kind(&self) -> DepthKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Exact integer numerators; depth `i` is `scores()[i] / denominator()`.
    pub fn scores(&self) -> &[u64] {
        &self.scores
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn value(&self, i: usize) -> f64 {
        self.scores[i] as f64 / self.denominator as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.value(i)).collect()
    }

    /// Second smallest score counted with multiplicity.
    pub(crate) fn second_smallest_score(&self) -> Option<u64> {
        let mut lo = u64::MAX;
        let mut next = u64::MAX;
        for &s in &self.scores {
            if s < lo {
                next = lo;
                lo = s;
            } else if s < next {
                next = s;
            }
        }
        (self.scores.len() >= 2).then_some(next)
    }
}

/// Center-outward order induced by a depth vector (deepest first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthOrder {
    permutation: Vec<usize>,
    scores: Vec<u64>,
    denominator: u64,
    tie_groups: Vec<Vec<usize>>,
    tiebreak_seed: Option<u64>,
}

impl DepthOrder {
    /// Curve indices (0-based) by non-increasing depth.
    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    /// Partition of the indices into classes of equal depth, deepest class first.
    pub fn tie_groups(&self) -> &[Vec<usize>] {
        &self.tie_groups
    }

    /// Only the classes with more than one member.
    pub fn ties(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.tie_groups.iter().filter(|g| g.len() > 1)
    }

    pub fn tiebreak_seed(&self) -> Option<u64> {
        self.tiebreak_seed
    }

    /// Depth of curve `i` in the ordered sample.
    pub fn depth(&self, i: usize) -> f64 {
        self.scores[i] as f64 / self.denominator as f64
    }

    /// True when curve `i` holds one of the two smallest depth values
    /// (counted with multiplicity, ties included).
    pub fn is_among_two_least_deep(&self, i: usize) -> bool {
        let groups = &self.tie_groups;
        let last = groups.len() - 1;
        if groups[last].contains(&i) {
            return true;
        }
        last >= 1 && groups[last].len() == 1 && groups[last - 1].contains(&i)
    }

    /// The deepest curve after tie-breaking.
    pub fn deepest(&self) -> usize {
        self.permutation[0]
    }
}

fn choose2(k: u64) -> u64 {
    k * k.saturating_sub(1) / 2
}

/// For one grid point, `below[i] = #{j : v_j < v_i}` and `above[i] = #{j : v_j > v_i}`.
fn rank_counts(values: &[f64], order: &mut [usize], below: &mut [u64], above: &mut [u64]) {
    let n = values.len();
    for (k, o) in order.iter_mut().enumerate() {
        *o = k;
    }
    order.sort_unstable_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut start = 0;
    while start < n {
        let v = values[order[start]];
        let mut end = start + 1;
        while end < n && values[order[end]] == v {
            end += 1;
        }
        for &idx in &order[start..end] {
            below[idx] = start as u64;
            above[idx] = (n - end) as u64;
        }
        start = end;
    }
}

fn check_rows(rows: &[&[f64]]) -> Result<usize> {
    if rows.len() < 2 {
        return Err(FrecError::invalid(format!(
            "depth needs at least 2 curves, got {}",
            rows.len()
        )));
    }
    let m = rows[0].len();
    if m == 0 || rows.iter().any(|r| r.len() != m) {
        return Err(FrecError::invalid("curves must share a non-empty grid"));
    }
    Ok(m)
}

/// MBD of every row; rows are curves on a shared grid.
pub(crate) fn mbd_rows(rows: &[&[f64]]) -> Result<DepthVector> {
    let m = check_rows(rows)?;
    let n = rows.len();
    let total = choose2(n as u64);
    let mut scores = vec![0u64; n];
    let mut column = vec![0.0; n];
    let mut order = vec![0usize; n];
    let mut below = vec![0u64; n];
    let mut above = vec![0u64; n];
    for k in 0..m {
        for (c, r) in column.iter_mut().zip(rows) {
            *c = r[k];
        }
        rank_counts(&column, &mut order, &mut below, &mut above);
        for i in 0..n {
            scores[i] += total - choose2(below[i]) - choose2(above[i]);
        }
    }
    Ok(DepthVector::from_scores(
        DepthKind::Mbd,
        scores,
        m as u64 * total,
    ))
}

/// Histogram of pointwise outlyingness levels `|a - b|` for every row;
/// `hist[i * (n + 1) + level]` counts grid points of curve `i` at that level.
fn ed_histograms(rows: &[&[f64]], m: usize) -> Vec<u32> {
    let n = rows.len();
    let width = n + 1;
    let mut hist = vec![0u32; n * width];
    let mut column = vec![0.0; n];
    let mut order = vec![0usize; n];
    let mut below = vec![0u64; n];
    let mut above = vec![0u64; n];
    for k in 0..m {
        for (c, r) in column.iter_mut().zip(rows) {
            *c = r[k];
        }
        rank_counts(&column, &mut order, &mut below, &mut above);
        for i in 0..n {
            let level = below[i].abs_diff(above[i]) as usize;
            hist[i * width + level] += 1;
        }
    }
    hist
}

/// Compares extremeness from the left tail of the pointwise depth
/// distribution: the curve with more mass at the highest outlyingness level
/// where the two differ is the more extreme one. `Greater` means `a` is more
/// extreme than `b`.
fn ed_compare(a: &[u32], b: &[u32]) -> Ordering {
    a.iter().rev().cmp(b.iter().rev())
}

pub(crate) fn ed_rows(rows: &[&[f64]]) -> Result<DepthVector> {
    let m = check_rows(rows)?;
    let n = rows.len();
    let width = n + 1;
    let hist = ed_histograms(rows, m);
    let key = |i: usize| &hist[i * width..(i + 1) * width];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| ed_compare(key(a), key(b)));
    // order is least extreme first; count curves strictly less extreme than each.
    let mut scores = vec![0u64; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && ed_compare(key(order[end]), key(order[start])) == Ordering::Equal {
            end += 1;
        }
        for &i in &order[start..end] {
            scores[i] = (n - start) as u64;
        }
        start = end;
    }
    Ok(DepthVector::from_scores(DepthKind::Ed, scores, n as u64))
}

pub(crate) fn depth_rows(rows: &[&[f64]], kind: DepthKind) -> Result<DepthVector> {
    match kind {
        DepthKind::Mbd => mbd_rows(rows),
        DepthKind::Ed => ed_rows(rows),
    }
}

/// Modified band depth (pairwise bands, endpoints inclusive) of every curve.
pub fn mbd(sample: &FunctionalSample) -> Result<DepthVector> {
    mbd_rows(&sample.rows())
}

/// Extremal depth of every curve with respect to the sample.
pub fn extremal_depth(sample: &FunctionalSample) -> Result<DepthVector> {
    ed_rows(&sample.rows())
}

pub fn depth(sample: &FunctionalSample, kind: DepthKind) -> Result<DepthVector> {
    depth_rows(&sample.rows(), kind)
}

/// Pointwise depths `1 - |a_i(s) - b_i(s)| / n` for every curve and grid point.
pub fn pointwise_extremal_depth(sample: &FunctionalSample) -> Result<Vec<Vec<f64>>> {
    let rows = sample.rows();
    let m = check_rows(&rows)?;
    let n = rows.len();
    let mut out = vec![vec![0.0; m]; n];
    let mut column = vec![0.0; n];
    let mut order = vec![0usize; n];
    let mut below = vec![0u64; n];
    let mut above = vec![0u64; n];
    for k in 0..m {
        for (c, r) in column.iter_mut().zip(&rows) {
            *c = r[k];
        }
        rank_counts(&column, &mut order, &mut below, &mut above);
        for i in 0..n {
            out[i][k] = 1.0 - below[i].abs_diff(above[i]) as f64 / n as f64;
        }
    }
    Ok(out)
}

/// Sorts curves by decreasing depth.
///
/// Without a seed, equal depths keep their original index order. With a
/// seed, one uniform `W_i` is drawn per curve and larger `W` ranks deeper
/// among equals, giving a strict total order reproducible from the seed.
pub fn depth_order(dv: &DepthVector, tiebreak_seed: Option<u64>) -> DepthOrder {
    let n = dv.len();
    let scores = dv.scores();
    let mut permutation: Vec<usize> = (0..n).collect();
    match tiebreak_seed {
        None => permutation.sort_by(|&a, &b| scores[b].cmp(&scores[a]).then(a.cmp(&b))),
        Some(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            permutation.sort_by(|&a, &b| {
                scores[b]
                    .cmp(&scores[a])
                    .then(w[b].total_cmp(&w[a]))
                    .then(a.cmp(&b))
            });
        }
    }
    let mut tie_groups: Vec<Vec<usize>> = Vec::new();
    for &i in &permutation {
        match tie_groups.last_mut() {
            Some(g) if scores[g[0]] == scores[i] => g.push(i),
            _ => tie_groups.push(vec![i]),
        }
    }
    DepthOrder {
        permutation,
        scores: scores.to_vec(),
        denominator: dv.denominator(),
        tie_groups,
        tiebreak_seed,
    }
}

/// Checks on constant curves that the two least deep curves are exactly the
/// smallest and largest constants.
pub fn validate_assumption1(kind: DepthKind, constants: &[f64], grid: &Grid) -> Result<bool> {
    if constants.len() < 3 {
        return Err(FrecError::invalid(format!(
            "need at least 3 constants, got {}",
            constants.len()
        )));
    }
    let mut sorted = constants.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(FrecError::invalid("constants must be distinct"));
    }
    let sample = FunctionalSample::constants(constants, grid)?;
    let dv = depth(&sample, kind)?;
    let cutoff = dv.second_smallest_score().expect("n >= 3");
    let extreme: Vec<usize> = (0..dv.len())
        .filter(|&i| dv.scores()[i] <= cutoff)
        .collect();
    let argmin = (0..constants.len())
        .min_by(|&a, &b| constants[a].total_cmp(&constants[b]))
        .unwrap();
    let argmax = (0..constants.len())
        .max_by(|&a, &b| constants[a].total_cmp(&constants[b]))
        .unwrap();
    let mut expected = vec![argmin, argmax];
    expected.sort_unstable();
    Ok(extreme == expected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::uniform_grid;
    use proptest::prelude::*;

    fn consts(values: &[f64], m: usize) -> FunctionalSample {
        FunctionalSample::constants(values, &uniform_grid(m).unwrap()).unwrap()
    }

    #[test]
    fn mbd_of_three_constants() {
        let dv = mbd(&consts(&[1.0, 2.0, 3.0], 5)).unwrap();
        let v = dv.values();
        assert!((v[0] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(v[1], 1.0);
        assert!((v[2] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn mbd_of_two_curves_is_one() {
        let s =
            FunctionalSample::from_rows(vec![vec![0.3, -1.0, 2.0], vec![5.0, 0.0, -3.0]]).unwrap();
        assert_eq!(mbd(&s).unwrap().values(), vec![1.0, 1.0]);
    }

    #[test]
    fn ed_of_three_constants() {
        let s = consts(&[1.0, 2.0, 3.0], 4);
        let pw = pointwise_extremal_depth(&s).unwrap();
        assert!(pw[0].iter().all(|&d| (d - 1.0 / 3.0).abs() < 1e-15));
        assert!(pw[1].iter().all(|&d| d == 1.0));
        assert!(pw[2].iter().all(|&d| (d - 1.0 / 3.0).abs() < 1e-15));
        let dv = extremal_depth(&s).unwrap();
        assert_eq!(dv.scores(), &[2, 3, 2]);
        let ord = depth_order(&dv, None);
        assert_eq!(ord.permutation(), &[1, 0, 2]);
        assert_eq!(ord.tie_groups(), &[vec![1], vec![0, 2]]);
    }

    #[test]
    fn curve_above_everything_is_least_deep() {
        let s = FunctionalSample::from_rows(vec![
            vec![0.0, 0.1, -0.2, 0.3],
            vec![0.5, -0.4, 0.2, 0.1],
            vec![10.0, 10.0, 10.0, 10.0],
            vec![-0.1, 0.2, 0.0, -0.3],
        ])
        .unwrap();
        for kind in [DepthKind::Mbd, DepthKind::Ed] {
            let dv = depth(&s, kind).unwrap();
            let min = *dv.scores().iter().min().unwrap();
            assert_eq!(dv.scores()[2], min, "{kind}");
            assert!(dv
                .scores()
                .iter()
                .enumerate()
                .all(|(i, &v)| i == 2 || v > min));
        }
    }

    #[test]
    fn too_few_curves() {
        let s = FunctionalSample::from_rows(vec![vec![1.0, 2.0]]).unwrap();
        assert!(mbd(&s).is_err());
        assert!(extremal_depth(&s).is_err());
    }

    #[test]
    fn order_without_ties() {
        let dv = DepthVector::from_scores(DepthKind::Mbd, vec![2, 9, 5], 10);
        let ord = depth_order(&dv, None);
        assert_eq!(ord.permutation(), &[1, 2, 0]);
        assert_eq!(ord.ties().count(), 0);
    }

    #[test]
    fn order_with_tie_group() {
        let dv = DepthVector::from_scores(DepthKind::Mbd, vec![5, 5, 9], 10);
        let ord = depth_order(&dv, None);
        assert_eq!(ord.permutation(), &[2, 0, 1]);
        assert_eq!(ord.tie_groups(), &[vec![2], vec![0, 1]]);
        assert_eq!(ord.ties().collect::<Vec<_>>(), vec![&vec![0, 1]]);
    }

    #[test]
    fn seeded_tiebreak_is_reproducible() {
        let dv = DepthVector::from_scores(DepthKind::Mbd, vec![5, 5], 10);
        let a = depth_order(&dv, Some(42));
        let b = depth_order(&dv, Some(42));
        assert_eq!(a, b);
        assert_eq!(a.tiebreak_seed(), Some(42));
        let mut p = a.permutation().to_vec();
        p.sort_unstable();
        assert_eq!(p, vec![0, 1]);
        // Different seeds eventually flip the order of a tied pair.
        let firsts: std::collections::HashSet<usize> = (0..32)
            .map(|s| depth_order(&dv, Some(s)).deepest())
            .collect();
        assert_eq!(firsts.len(), 2);
    }

    #[test]
    fn assumption1_examples() {
        let g = uniform_grid(10).unwrap();
        assert!(validate_assumption1(DepthKind::Mbd, &[1.0, 2.0, 3.0, 4.0, 5.0], &g).unwrap());
        assert!(validate_assumption1(DepthKind::Ed, &[-3.0, 0.0, 7.0, 7.5], &g).unwrap());
        assert!(validate_assumption1(DepthKind::Mbd, &[1.0, 2.0], &g).is_err());
        assert!(validate_assumption1(DepthKind::Ed, &[1.0, 2.0, 2.0], &g).is_err());
    }

    #[test]
    fn mbd_lower_bound() {
        let s = FunctionalSample::from_rows(vec![
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 3.0],
            vec![2.0, 2.0, 1.0],
            vec![3.0, 3.0, 0.0],
        ])
        .unwrap();
        let n = 4.0;
        for v in mbd(&s).unwrap().values() {
            assert!(v >= 2.0 / n - 1e-15 && v <= 1.0);
        }
    }

    proptest! {
        #[test]
        fn second_smallest_matches_sort(scores in prop::collection::vec(0u64..6, 2..12)) {
            let dv = DepthVector::from_scores(DepthKind::Mbd, scores.clone(), 10);
            let mut s = scores;
            s.sort_unstable();
            prop_assert_eq!(dv.second_smallest_score(), Some(s[1]));
        }
    }
}
