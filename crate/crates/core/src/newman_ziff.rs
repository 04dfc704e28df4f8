//! Newman-Ziff estimation of the maximum-cluster-size distribution.
//!
//! Conditional on `n` active sites, every `n`-subset of the lattice is
//! equally likely, so the first `n` sites of a uniform random visiting order
//! sample the conditional law of the maximum cluster size for all `n` at
//! once. A run adds sites one at a time in that order, merging clusters
//! with union-find, and records the largest cluster after each addition.
//! The unconditional distribution for activation probability `p` then
//! follows by weighting with `Bin(S, p)`.

use rayon::prelude::*;

use crate::binomial::{binomial_pmf, BinomialPmf};
use crate::disjoint_sets::DisjointSets;
use crate::distribution::{Cdf, CdfEstimate, DistributionMeta};
use crate::error::{check_probability, Error, Result};
use crate::lattice::Lattice;
use crate::rng::{random_permutation, RngStream};

/// Runs drawn concurrently before their results are folded in run order.
const BATCH: usize = 256;

/// Largest cluster size after each of the `S` additions of one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxSizeCurve {
    sizes: Vec<usize>,
}

impl MaxSizeCurve {
    /// Wraps `sizes[n - 1]` for `n = 1..=S`, checking `1 <= size[n] <= n`
    /// and monotonicity.
    pub fn from_sizes(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::param("sizes", "empty curve"));
        }
        for (i, &s) in sizes.iter().enumerate() {
            if s == 0 || s > i + 1 {
                return Err(Error::param(
                    "sizes",
                    format!("size[{}] = {s} out of range", i + 1),
                ));
            }
        }
        if sizes.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::param("sizes", "curve is not nondecreasing"));
        }
        Ok(MaxSizeCurve { sizes })
    }

    /// Number of sites `S`.
    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    /// Largest cluster with `n` occupied sites; `at(0) == 0`.
    pub fn at(&self, n: usize) -> usize {
        if n == 0 {
            0
        } else {
            self.sizes[n - 1]
        }
    }

    /// `size[1..=S]`.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }
}

/// Adds the sites of `order` one by one and tracks the largest cluster.
///
/// `order` must be a permutation of the lattice sites.
pub fn curve_for_order(lattice: &Lattice, order: &[usize]) -> Result<MaxSizeCurve> {
    let s = lattice.site_count();
    if order.len() != s {
        return Err(Error::Shape {
            expected: format!("{s} sites in visiting order"),
            found: format!("{}", order.len()),
        });
    }
    let mut sets = DisjointSets::new(s);
    let mut sizes = Vec::with_capacity(s);
    let mut largest = 0;
    for &site in order {
        if site >= s || sets.is_occupied(site) {
            return Err(Error::param(
                "order",
                "not a permutation of the lattice sites",
            ));
        }
        let merged = sets.occupy_and_merge(site, lattice.adjacent(site));
        largest = largest.max(merged);
        sizes.push(largest);
    }
    Ok(MaxSizeCurve { sizes })
}

/// One Newman-Ziff run with a visiting order drawn from `rng`.
pub fn nz_run(lattice: &Lattice, rng: &mut RngStream) -> MaxSizeCurve {
    let order = random_permutation(lattice.site_count(), rng).expect("lattices are nonempty");
    curve_for_order(lattice, order.as_slice()).expect("permutation covers the lattice")
}

/// `F(k) = sum_n 1{size[n] <= k} b(n)` for `k = 0..=S`, with `size[0] = 0`.
pub fn convolve_cdf(curve: &MaxSizeCurve, pmf: &BinomialPmf) -> Result<Cdf> {
    if curve.len() != pmf.trials() {
        return Err(Error::Shape {
            expected: format!("curve over {} sites", pmf.trials()),
            found: format!("curve over {} sites", curve.len()),
        });
    }
    let mut values = vec![0.0; curve.len() + 1];
    accumulate_curve(&mut values, curve, &pmf.cumulative());
    Ok(Cdf::from_accumulated(values))
}

/// Adds one run's convolved CDF to `acc`.
///
/// The curve is nondecreasing, so `{n : size[n] <= k}` is a prefix `0..=n_k`
/// and `F(k)` is the binomial distribution function at `n_k`.
fn accumulate_curve(acc: &mut [f64], curve: &MaxSizeCurve, cumulative: &[f64]) {
    let sizes = curve.sizes();
    let mut n = 0;
    for (k, slot) in acc.iter_mut().enumerate() {
        while n < sizes.len() && sizes[n] <= k {
            n += 1;
        }
        *slot += cumulative[n];
    }
}

/// Computes `runs` results in parallel and hands them to `fold` in run order.
pub(crate) fn ordered_runs<T, P, F>(runs: usize, produce: P, mut fold: F)
where
    T: Send,
    P: Fn(u64) -> T + Sync,
    F: FnMut(T),
{
    let mut start = 0;
    while start < runs {
        let end = (start + BATCH).min(runs);
        let batch: Vec<T> = (start..end)
            .into_par_iter()
            .map(|r| produce(r as u64))
            .collect();
        batch.into_iter().for_each(&mut fold);
        start = end;
    }
}

fn check_runs(runs: usize) -> Result<()> {
    if runs == 0 {
        return Err(Error::param("runs", "at least one run is required"));
    }
    Ok(())
}

fn homogeneous_meta(lattice: &Lattice, p: f64, runs: usize, seed: u64) -> DistributionMeta {
    DistributionMeta {
        rows: lattice.rows(),
        cols: lattice.cols(),
        topology: lattice.topology(),
        p: Some(p),
        runs,
        seed,
        inhomogeneous: None,
    }
}

/// Average of `runs` single-run CDFs; run `r` uses stream `(seed, r)`.
///
/// The result does not depend on the number of worker threads.
pub fn estimate_cdf(lattice: &Lattice, p: f64, runs: usize, seed: u64) -> Result<CdfEstimate> {
    Ok(sweep(lattice, &[p], runs, seed, Ensemble::Shared)?.remove(0))
}

/// Whether a sweep reuses one ensemble of runs for every probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Ensemble {
    /// One ensemble, convolved once per probability. The curves do not
    /// depend on `p`, so every entry equals [`estimate_cdf`] at that `p`.
    #[default]
    Shared,
    /// An independent ensemble per probability; entry `i` uses streams
    /// `(seed, i * runs + r)`.
    Fresh,
}

/// Estimates for every probability in `probabilities`.
pub fn sweep(
    lattice: &Lattice,
    probabilities: &[f64],
    runs: usize,
    seed: u64,
    ensemble: Ensemble,
) -> Result<Vec<CdfEstimate>> {
    if probabilities.is_empty() {
        return Err(Error::param("probabilities", "empty list"));
    }
    for &p in probabilities {
        check_probability("p", p)?;
    }
    check_runs(runs)?;

    let s = lattice.site_count();
    let pmfs = probabilities
        .iter()
        .map(|&p| binomial_pmf(s, p).map(|b| b.cumulative()))
        .collect::<Result<Vec<_>>>()?;
    let mut sums = vec![vec![0.0; s + 1]; probabilities.len()];

    match ensemble {
        Ensemble::Shared => ordered_runs(
            runs,
            |r| nz_run(lattice, &mut RngStream::new(seed, r)),
            |curve| {
                for (acc, cumulative) in sums.iter_mut().zip(&pmfs) {
                    accumulate_curve(acc, &curve, cumulative);
                }
            },
        ),
        Ensemble::Fresh => {
            for (i, (acc, cumulative)) in sums.iter_mut().zip(&pmfs).enumerate() {
                let offset = (i * runs) as u64;
                ordered_runs(
                    runs,
                    |r| nz_run(lattice, &mut RngStream::new(seed, offset + r)),
                    |curve| accumulate_curve(acc, &curve, cumulative),
                );
            }
        }
    }

    Ok(probabilities
        .iter()
        .zip(sums)
        .map(|(&p, mut acc)| {
            acc.iter_mut().for_each(|v| *v /= runs as f64);
            CdfEstimate {
                cdf: Cdf::from_accumulated(acc),
                meta: homogeneous_meta(lattice, p, runs, seed),
            }
        })
        .collect())
}

/// The probabilities swept by the reference simulation on a 55x55 grid.
pub const REFERENCE_PROBABILITIES: [f64; 17] = [
    0.1, 0.2, 0.3, 0.4, 0.42, 0.44, 0.46, 0.48, 0.5, 0.52, 0.54, 0.56, 0.58, 0.6, 0.7, 0.8, 0.9,
];
