//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use frec::RecordKind;

/// Classical upper and lower record times after the first two observations.
pub fn classical_records(values: &[f64]) -> Vec<(usize, RecordKind)> {
    let mut out = Vec::new();
    let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
    for (i, &v) in values.iter().enumerate() {
        if i >= 2 {
            if v > hi {
                out.push((i + 1, RecordKind::Upper));
            } else if v < lo {
                out.push((i + 1, RecordKind::Lower));
            }
        }
        hi = hi.max(v);
        lo = lo.min(v);
    }
    out
}

pub fn brute_mbd(rows: &[Vec<f64>]) -> Vec<f64> {
    let n = rows.len();
    let m = rows[0].len();
    let pairs = (n * (n - 1) / 2) as f64;
    (0..n)
        .map(|i| {
            let mut inside = 0usize;
            for a in 0..n {
                for b in a + 1..n {
                    inside += (0..m)
                        .filter(|&s| {
                            let lo = rows[a][s].min(rows[b][s]);
                            let hi = rows[a][s].max(rows[b][s]);
                            lo <= rows[i][s] && rows[i][s] <= hi
                        })
                        .count();
                }
            }
            inside as f64 / (pairs * m as f64)
        })
        .collect()
}

/// Extremal depth from the pointwise depth CDFs.
pub fn brute_ed(rows: &[Vec<f64>]) -> Vec<f64> {
    let more_extreme = extremeness_relation(rows);
    let n = rows.len();
    (0..n)
        .map(|i| {
            let less_extreme = (0..n).filter(|&k| more_extreme(i, k)).count();
            (n - less_extreme) as f64 / n as f64
        })
        .collect()
}

/// `more_extreme(a, b)`: at the smallest depth level where the pointwise
/// depth CDFs of `a` and `b` differ, `a` has more mass.
pub fn extremeness_relation(rows: &[Vec<f64>]) -> impl Fn(usize, usize) -> bool {
    let n = rows.len();
    let m = rows[0].len();
    let pointwise: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..m)
                .map(|s| {
                    let below = rows.iter().filter(|r| r[s] < rows[i][s]).count() as f64;
                    let above = rows.iter().filter(|r| r[s] > rows[i][s]).count() as f64;
                    1.0 - (below - above).abs() / n as f64
                })
                .collect()
        })
        .collect();
    let mut levels: Vec<f64> = pointwise.iter().flatten().copied().collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    move |a, b| {
        let cdf_at = |i: usize, d: f64| pointwise[i].iter().filter(|&&v| v <= d).count();
        for &d in &levels {
            let (ga, gb) = (cdf_at(a, d), cdf_at(b, d));
            if ga != gb {
                return ga > gb;
            }
        }
        false
    }
}
