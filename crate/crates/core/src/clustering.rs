//! Percolation clusters of a binary image.
//!
//! [`dfs_spanning_tree`] explores the single cluster containing a seed site
//! and records spanning-tree depths; [`label_components`] labels every
//! cluster of the image. Both are iterative, so deep clusters cannot
//! overflow the call stack, and both visit neighbours in adjacency-list
//! order.

use crate::error::{Error, Result};
use crate::image::BinaryImage;
use crate::lattice::Lattice;

/// Depths of the DFS spanning tree rooted at `seed`.
///
/// `depths[seed] == 1`, sites outside the seed's cluster have depth 0. A depth
/// is the distance from the root *within the tree*, which can exceed the
/// shortest-path distance in the lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthLabeling {
    pub depths: Vec<usize>,
    pub seed: usize,
}

impl DepthLabeling {
    /// Sites reached from the seed.
    pub fn cluster(&self) -> impl Iterator<Item = usize> + '_ {
        self.depths
            .iter()
            .enumerate()
            .filter(|(_, &d)| d > 0)
            .map(|(i, _)| i)
    }
}

/// Cluster labels of a whole image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterLabeling {
    /// 0 for inactive sites, otherwise a label in `1..=cluster_sizes.len()`.
    pub labels: Vec<usize>,
    /// `cluster_sizes[l - 1]` is the size of the cluster labelled `l`.
    pub cluster_sizes: Vec<usize>,
    pub largest: usize,
}

impl ClusterLabeling {
    pub fn num_clusters(&self) -> usize {
        self.cluster_sizes.len()
    }

    /// Label of the first cluster reaching the maximum size, if any.
    pub fn largest_label(&self) -> Option<usize> {
        self.cluster_sizes
            .iter()
            .position(|&s| s == self.largest)
            .filter(|_| self.largest > 0)
            .map(|i| i + 1)
    }
}

fn check_shape(image: &BinaryImage, lattice: &Lattice) -> Result<()> {
    if image.rows() != lattice.rows() || image.cols() != lattice.cols() {
        return Err(Error::Shape {
            expected: format!("{}x{} image", lattice.rows(), lattice.cols()),
            found: format!("{}x{} image", image.rows(), image.cols()),
        });
    }
    Ok(())
}

/// Builds the depth-first spanning tree of the cluster containing `seed`.
///
/// From the current site the first unlabelled active neighbour becomes the
/// new current site with depth one larger; when no such neighbour is left the
/// search backtracks to the mother site. The search ends once the seed itself
/// has no unexplored neighbours.
pub fn dfs_spanning_tree(
    image: &BinaryImage,
    lattice: &Lattice,
    seed: usize,
) -> Result<DepthLabeling> {
    check_shape(image, lattice)?;
    if seed >= lattice.site_count() {
        return Err(Error::Index {
            index: seed,
            len: lattice.site_count(),
        });
    }
    if !image.is_active(seed) {
        return Err(Error::InvalidSeed(seed));
    }

    let mut depths = vec![0usize; lattice.site_count()];
    // (site, index of the next neighbour to examine); the stack holds the mother chain.
    let mut stack = vec![(seed, 0usize)];
    depths[seed] = 1;

    while let Some(&mut (site, ref mut next)) = stack.last_mut() {
        let neighbours = lattice.adjacent(site);
        let found = neighbours[*next..]
            .iter()
            .position(|&nb| image.is_active(nb) && depths[nb] == 0);
        match found {
            Some(offset) => {
                let child = neighbours[*next + offset];
                *next += offset + 1;
                depths[child] = depths[site] + 1;
                stack.push((child, 0));
            }
            None => {
                stack.pop();
            }
        }
    }

    Ok(DepthLabeling { depths, seed })
}

/// Labels all clusters, numbering them 1, 2, ... in scan order of their
/// first site.
///
/// Neighbours are generated from the topology's offsets instead of read from
/// the adjacency table, and labels are kept in 32 bits while traversing when
/// the grid allows it. Both keep the working set small on large grids. Labels
/// depend only on scan order, so neither choice changes the result.
pub fn label_components(image: &BinaryImage, lattice: &Lattice) -> Result<ClusterLabeling> {
    check_shape(image, lattice)?;
    let (labels, cluster_sizes) = if lattice.site_count() < u32::MAX as usize {
        let (narrow, sizes) = label_with::<u32>(image.active(), lattice);
        (narrow.into_iter().map(|l| l as usize).collect(), sizes)
    } else {
        label_with::<usize>(image.active(), lattice)
    };
    let largest = cluster_sizes.iter().copied().max().unwrap_or(0);
    Ok(ClusterLabeling {
        labels,
        cluster_sizes,
        largest,
    })
}

/// Site or label storage used during traversal.
trait Index: Copy + Default + PartialEq {
    fn from_usize(v: usize) -> Self;
    fn to_usize(self) -> usize;
}

impl Index for u32 {
    #[inline]
    fn from_usize(v: usize) -> Self {
        v as u32
    }
    #[inline]
    fn to_usize(self) -> usize {
        self as usize
    }
}

impl Index for usize {
    #[inline]
    fn from_usize(v: usize) -> Self {
        v
    }
    #[inline]
    fn to_usize(self) -> usize {
        self
    }
}

/// Traversal behind [`label_components`]; `I` must hold every site index.
fn label_with<I: Index>(active: &[bool], lattice: &Lattice) -> (Vec<I>, Vec<usize>) {
    let (rows, cols) = (lattice.rows(), lattice.cols());
    let offsets = lattice.topology().offsets();
    let narrow = I::from_usize;
    let unset = I::default();
    let mut labels = vec![unset; lattice.site_count()];
    let mut cluster_sizes = Vec::new();
    let mut stack: Vec<I> = Vec::new();

    for start in 0..lattice.site_count() {
        if !active[start] || labels[start] != unset {
            continue;
        }
        let label = narrow(cluster_sizes.len() + 1);
        labels[start] = label;
        stack.push(narrow(start));
        let mut size = 0;
        while let Some(site) = stack.pop() {
            let site = site.to_usize();
            let (r, c) = (site / cols, site % cols);
            size += 1;
            for &(dr, dc) in offsets {
                // wrapping keeps off-grid coordinates out of range
                let (nr, nc) = (r.wrapping_add_signed(dr), c.wrapping_add_signed(dc));
                if nr >= rows || nc >= cols {
                    continue;
                }
                let nb = nr * cols + nc;
                if labels[nb] == unset && active[nb] {
                    labels[nb] = label;
                    stack.push(narrow(nb));
                }
            }
        }
        cluster_sizes.push(size);
    }
    (labels, cluster_sizes)
}

/// Size of the largest cluster, 0 when the image has no active site.
pub fn largest_cluster_size(labeling: &ClusterLabeling) -> usize {
    labeling.cluster_sizes.iter().copied().max().unwrap_or(0)
}
