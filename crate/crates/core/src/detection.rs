//! The percolation test for the presence of an object.
//!
//! Under the null hypothesis the thresholded image is pure noise: every
//! pixel is active independently with the same probability. An object
//! raises the activation rate on its support and therefore produces an
//! unusually large cluster. The test rejects when the largest cluster
//! reaches the critical size derived from the simulated null distribution.
//!
//! The critical value is the smallest `k` whose null tail `P(M >= k)` is at
//! most `alpha`. The test is not randomised, so its size can fall below
//! `alpha` because of discreteness.

use serde::Serialize;

use crate::clustering::label_components;
use crate::distribution::{CdfEstimate, DistributionMeta};
use crate::error::{Error, Result};
use crate::image::BinaryImage;
use crate::inhomogeneous::{estimate_cdf_inhomogeneous, Subgrid};
use crate::lattice::Lattice;
use crate::newman_ziff::estimate_cdf;

/// Stream seed of the alternative ensemble is derived from the null seed.
const ALTERNATIVE_SEED_MIX: u64 = 0x9E37_79B9_7F4A_7C15;

/// Distribution of the maximum cluster size under pure noise.
#[derive(Debug, Clone, PartialEq)]
pub struct NullDistribution {
    estimate: CdfEstimate,
}

impl NullDistribution {
    pub fn new(estimate: CdfEstimate) -> Self {
        NullDistribution { estimate }
    }

    pub fn estimate(&self) -> &CdfEstimate {
        &self.estimate
    }

    pub fn meta(&self) -> &DistributionMeta {
        &self.estimate.meta
    }

    /// Number of sites `S`.
    pub fn site_count(&self) -> usize {
        self.estimate.cdf.site_count()
    }

    /// Null probability of a largest cluster of at least `k` sites.
    pub fn tail(&self, k: usize) -> f64 {
        self.estimate.cdf.tail(k)
    }
}

impl From<CdfEstimate> for NullDistribution {
    fn from(estimate: CdfEstimate) -> Self {
        NullDistribution::new(estimate)
    }
}

/// Outcome of testing one image.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectionResult {
    pub observed_max: usize,
    /// `S + 1` when the test cannot reject at this level.
    pub critical_value: usize,
    pub p_value: f64,
    pub alpha: f64,
    pub detected: bool,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::param("alpha", format!("{alpha} is not in (0, 1]")))
    }
}

/// Smallest `k` in `0..=S` with `P(M >= k) <= alpha`, or `S + 1` if none.
pub fn critical_value(null: &NullDistribution, alpha: f64) -> Result<usize> {
    check_alpha(alpha)?;
    let s = null.site_count();
    Ok((0..=s).find(|&k| null.tail(k) <= alpha).unwrap_or(s + 1))
}

/// Tests `image` against `null` at level `alpha`.
///
/// The image and lattice must both match the lattice the null was simulated on.
pub fn detect(
    image: &BinaryImage,
    lattice: &Lattice,
    null: &NullDistribution,
    alpha: f64,
) -> Result<DetectionResult> {
    check_alpha(alpha)?;
    let expected = null.meta().lattice();
    if lattice.descriptor() != expected {
        return Err(Error::Provenance(format!(
            "null distribution was simulated on {expected}, test lattice is {}",
            lattice.descriptor()
        )));
    }
    if (image.rows(), image.cols()) != (expected.rows, expected.cols) {
        return Err(Error::Provenance(format!(
            "null distribution was simulated on {expected}, image is {}x{}",
            image.rows(),
            image.cols()
        )));
    }

    let observed_max = label_components(image, lattice)?.largest;
    let critical_value = critical_value(null, alpha)?;
    let p_value = null.tail(observed_max);
    Ok(DetectionResult {
        observed_max,
        critical_value,
        p_value,
        alpha,
        detected: observed_max >= critical_value,
    })
}

/// Type II error of the test against an object occupying `subgrid`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerEstimate {
    /// Probability of missing the object.
    pub beta: f64,
    pub power: f64,
    pub critical_value: usize,
    /// Achieved size `P(M >= critical_value)` under the simulated null.
    pub size: f64,
    /// Set when no cluster size is significant at `alpha`; then `beta = 1`.
    pub never_rejects: bool,
}

/// Simulates the null at `p_out` and the alternative with `p_in` on the
/// subgrid, and returns `beta = P_alt(M < critical value)`.
///
/// The null uses streams `(seed, r)`; the alternative uses a seed derived
/// from `seed`, so the two ensembles are independent.
pub fn power_estimate(
    lattice: &Lattice,
    subgrid: &Subgrid,
    p_in: f64,
    p_out: f64,
    alpha: f64,
    runs: usize,
    seed: u64,
) -> Result<PowerEstimate> {
    check_alpha(alpha)?;
    if p_in < p_out {
        return Err(Error::param(
            "p_in",
            format!("object probability {p_in} is below background {p_out}"),
        ));
    }
    let null = NullDistribution::new(estimate_cdf(lattice, p_out, runs, seed)?);
    let t = critical_value(&null, alpha)?;
    let size = null.tail(t);
    if t > lattice.site_count() {
        return Ok(PowerEstimate {
            beta: 1.0,
            power: 0.0,
            critical_value: t,
            size,
            never_rejects: true,
        });
    }
    let alt = estimate_cdf_inhomogeneous(
        lattice,
        subgrid,
        p_in,
        p_out,
        runs,
        seed ^ ALTERNATIVE_SEED_MIX,
    )?;
    let beta = if t == 0 { 0.0 } else { alt.cdf.at(t - 1) };
    Ok(PowerEstimate {
        beta,
        power: 1.0 - beta,
        critical_value: t,
        size,
        never_rejects: false,
    })
}
