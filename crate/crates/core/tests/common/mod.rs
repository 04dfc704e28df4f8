//! Independent oracles shared by the integration tests.
//!
//! Nothing here calls into the library's clustering or simulation code.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeSet, VecDeque};

/// Neighbour sets tabulated case by case (corners, edges, interior), 1-based indices
/// with `n` columns and `m` rows. Valid for n, m >= 3.
pub fn tabulated_neighbors(n: usize, m: usize, degree: usize) -> Vec<BTreeSet<usize>> {
    let mut nb: Vec<Vec<usize>> = vec![Vec::new(); n * m + 1];
    match degree {
        4 => {
            nb[1] = vec![2, n + 1];
            nb[n] = vec![n - 1, 2 * n];
            nb[n * m] = vec![n * (m - 1), n * m - 1];
            nb[(m - 1) * n + 1] = vec![(m - 1) * n + 2, (m - 2) * n + 1];
            for i in 2..n {
                nb[i] = vec![i - 1, i + 1, i + n];
            }
            for i in ((m - 1) * n + 2)..(n * m) {
                nb[i] = vec![i - 1, i + 1, i - n];
            }
            for i in 1..=(m - 2) {
                nb[n * i + 1] = vec![n * (i - 1) + 1, n * (i + 1) + 1, n * i + 2];
            }
            for i in 2..m {
                nb[n * i] = vec![n * (i - 1), n * (i + 1), n * i - 1];
            }
            for i in 1..=(m - 2) {
                for j in 1..=(n - 2) {
                    nb[i * n + 1 + j] = vec![
                        i * n + j,
                        i * n + 2 + j,
                        (i - 1) * n + 1 + j,
                        (i + 1) * n + 1 + j,
                    ];
                }
            }
        }
        6 => {
            nb[1] = vec![2, n + 1];
            nb[n] = vec![n - 1, 2 * n, 2 * n - 1];
            nb[n * m] = vec![n * (m - 1), n * m - 1];
            nb[(m - 1) * n + 1] = vec![(m - 1) * n + 2, (m - 2) * n + 1, (m - 2) * n + 2];
            for i in 2..n {
                nb[i] = vec![i - 1, i + 1, i + n, i + n - 1];
            }
            for i in ((m - 1) * n + 2)..(n * m) {
                nb[i] = vec![i - 1, i + 1, i - n, i - n + 1];
            }
            for i in 1..=(m - 2) {
                nb[n * i + 1] = vec![n * (i - 1) + 1, n * (i - 1) + 2, n * (i + 1) + 1, n * i + 2];
            }
            for i in 2..m {
                nb[n * i] = vec![n * (i - 1), n * (i + 1), n * (i + 1) - 1, n * i - 1];
            }
            for i in 1..=(m - 2) {
                for j in 1..=(n - 2) {
                    nb[i * n + 1 + j] = vec![
                        i * n + j,
                        i * n + 2 + j,
                        (i - 1) * n + 1 + j,
                        (i - 1) * n + j + 2,
                        (i + 1) * n + 1 + j,
                        (i + 1) * n + j,
                    ];
                }
            }
        }
        8 => {
            nb[1] = vec![2, n + 1, n + 2];
            nb[n] = vec![n - 1, 2 * n, 2 * n - 1];
            nb[n * m] = vec![n * (m - 1), n * m - 1, (m - 1) * n - 1];
            nb[(m - 1) * n + 1] = vec![(m - 1) * n + 2, (m - 2) * n + 1, (m - 2) * n + 2];
            for i in 2..n {
                nb[i] = vec![i - 1, i + 1, i + n, i + n - 1, i + n + 1];
            }
            for i in ((m - 1) * n + 2)..(n * m) {
                nb[i] = vec![i - 1, i + 1, i - n, i - n - 1, i - n + 1];
            }
            for i in 1..=(m - 2) {
                nb[n * i + 1] = vec![
                    n * (i - 1) + 1,
                    n * (i - 1) + 2,
                    n * (i + 1) + 1,
                    n * (i + 1) + 2,
                    n * i + 2,
                ];
            }
            for i in 2..m {
                nb[n * i] = vec![
                    n * (i - 1),
                    n * (i - 1) - 1,
                    n * (i + 1),
                    n * (i + 1) - 1,
                    n * i - 1,
                ];
            }
            for i in 1..=(m - 2) {
                for j in 1..=(n - 2) {
                    nb[i * n + 1 + j] = vec![
                        i * n + j,
                        i * n + 2 + j,
                        (i - 1) * n + 1 + j,
                        (i - 1) * n + j,
                        (i - 1) * n + j + 2,
                        (i + 1) * n + 1 + j,
                        (i + 1) * n + 2 + j,
                        (i + 1) * n + j,
                    ];
                }
            }
        }
        _ => panic!("unsupported degree {degree}"),
    }
    // shift to 0-based
    nb.into_iter()
        .skip(1)
        .map(|v| v.into_iter().map(|x| x - 1).collect())
        .collect()
}

/// Coordinate-based adjacency test, written without offset tables.
pub fn coord_adjacent(rows: usize, cols: usize, degree: usize, a: usize, b: usize) -> bool {
    let (ra, ca) = ((a / cols) as i64, (a % cols) as i64);
    let (rb, cb) = ((b / cols) as i64, (b % cols) as i64);
    let _ = rows;
    let (dr, dc) = (rb - ra, cb - ca);
    if (dr, dc) == (0, 0) || dr.abs() > 1 || dc.abs() > 1 {
        return false;
    }
    match degree {
        4 => dr == 0 || dc == 0,
        // triangular embedding: axial moves plus the up-right / down-left diagonal
        6 => dr == 0 || dc == 0 || dr == -dc,
        8 => true,
        _ => panic!("unsupported degree {degree}"),
    }
}

/// Component label per site (0 inactive, 1.. in scan order) by breadth-first search.
pub fn bfs_labels(rows: usize, cols: usize, degree: usize, active: &[bool]) -> Vec<usize> {
    let s = rows * cols;
    let mut labels = vec![0; s];
    let mut next = 0;
    let mut queue = VecDeque::new();
    for start in 0..s {
        if !active[start] || labels[start] != 0 {
            continue;
        }
        next += 1;
        labels[start] = next;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            let (r, c) = (v / cols, v % cols);
            for nr in r.saturating_sub(1)..=(r + 1).min(rows - 1) {
                for nc in c.saturating_sub(1)..=(c + 1).min(cols - 1) {
                    let w = nr * cols + nc;
                    if active[w] && labels[w] == 0 && coord_adjacent(rows, cols, degree, v, w) {
                        labels[w] = next;
                        queue.push_back(w);
                    }
                }
            }
        }
    }
    labels
}

pub fn bfs_largest(rows: usize, cols: usize, degree: usize, active: &[bool]) -> usize {
    let labels = bfs_labels(rows, cols, degree, active);
    let mut counts = vec![0usize; labels.iter().max().copied().unwrap_or(0) + 1];
    for &l in &labels {
        if l > 0 {
            counts[l] += 1;
        }
    }
    counts.into_iter().max().unwrap_or(0)
}

/// Exact P(M <= k), k = 0..=S, by enumerating all 2^S configurations.
pub fn exact_cdf(rows: usize, cols: usize, degree: usize, p: f64) -> Vec<f64> {
    let s = rows * cols;
    assert!(s <= 20, "enumeration too large");
    let mut pmf = vec![0.0; s + 1];
    for mask in 0u32..(1 << s) {
        let active: Vec<bool> = (0..s).map(|i| mask >> i & 1 == 1).collect();
        let n = mask.count_ones() as i32;
        let w = p.powi(n) * (1.0 - p).powi(s as i32 - n);
        pmf[bfs_largest(rows, cols, degree, &active)] += w;
    }
    // normalise by the total so rounding never pushes a value past 1
    let total: f64 = pmf.iter().sum();
    let mut acc = 0.0;
    pmf.iter()
        .map(|w| {
            acc += w;
            acc / total
        })
        .collect()
}

/// Exact law of the largest cluster given `n` uniformly chosen active sites:
/// `law[n][k]` = P(M = k | n active).
pub fn uniform_subset_law(rows: usize, cols: usize, degree: usize) -> Vec<Vec<f64>> {
    let s = rows * cols;
    let mut counts = vec![vec![0u64; s + 1]; s + 1];
    for mask in 0u32..(1 << s) {
        let active: Vec<bool> = (0..s).map(|i| mask >> i & 1 == 1).collect();
        let n = mask.count_ones() as usize;
        counts[n][bfs_largest(rows, cols, degree, &active)] += 1;
    }
    counts
        .into_iter()
        .map(|row| {
            let total: u64 = row.iter().sum();
            row.into_iter().map(|c| c as f64 / total as f64).collect()
        })
        .collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Canonical partition of active sites, independent of label numbering.
pub fn partition(labels: &[usize]) -> BTreeSet<BTreeSet<usize>> {
    let mut groups = std::collections::BTreeMap::<usize, BTreeSet<usize>>::new();
    for (site, &l) in labels.iter().enumerate() {
        if l > 0 {
            groups.entry(l).or_default().insert(site);
        }
    }
    groups.into_values().collect()
}
