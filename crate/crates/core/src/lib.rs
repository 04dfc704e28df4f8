//! Percolation-based detection of objects in noisy images.
//!
//! A grey-value image is thresholded into active and inactive pixels. If the
//! image is pure noise, active pixels form a site-percolation configuration
//! whose largest cluster stays small; an object shows up as an unusually
//! large cluster. This crate provides the pieces of that test:
//!
//! * [`lattice`]: 4-, 6- and 8-neighbourhood grids,
//! * [`image`] and [`pnm`]: images, thresholding and Netpbm I/O,
//! * [`clustering`]: DFS spanning trees and connected-component labelling,
//! * [`newman_ziff`]: Monte Carlo estimation of the null distribution of the
//!   largest cluster,
//! * [`inhomogeneous`]: the same for a subgrid with a higher activation rate,
//! * [`detection`]: critical values, p-values and power.

pub mod binomial;
pub mod clustering;
pub mod detection;
pub mod disjoint_sets;
pub mod distribution;
pub mod error;
pub mod image;
pub mod inhomogeneous;
pub mod lattice;
pub mod newman_ziff;
pub mod pnm;
pub mod rng;

pub use binomial::{binomial_pmf, BinomialPmf};
pub use clustering::{
    dfs_spanning_tree, label_components, largest_cluster_size, ClusterLabeling, DepthLabeling,
};
pub use detection::{
    critical_value, detect, power_estimate, DetectionResult, NullDistribution, PowerEstimate,
};
pub use disjoint_sets::DisjointSets;
pub use distribution::{Cdf, CdfEstimate, DistributionMeta};
pub use error::{Error, Result};
pub use image::{generate_percolation, threshold, BinaryImage, Direction, GrayImage};
pub use inhomogeneous::{
    convolve_cdf_joint, estimate_cdf_inhomogeneous, nz_run_modified, rect_subgrid,
    JointMaxSizeTable, Subgrid,
};
pub use lattice::{Lattice, LatticeDescriptor, Topology};
pub use newman_ziff::{convolve_cdf, estimate_cdf, nz_run, sweep, Ensemble, MaxSizeCurve};
pub use rng::{random_permutation, Permutation, RngStream};
