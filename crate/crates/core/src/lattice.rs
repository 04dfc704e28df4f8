//! Rectangular grids with 4-, 6- or 8-neighbourhood topology.
//!
//! Sites are indexed `0..rows * cols` in row-major order, `site = row * cols + col`.
//! Each topology is a set of `(row, col)` offsets; the adjacency of a site is
//! obtained by applying every offset and dropping results that leave the grid.
//! This handles grids of any size, including single rows and columns.
//!
//! The six-neighbourhood is the triangular lattice drawn on a square grid:
//! left, right, up, up-right, down, down-left.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const FOUR: [(isize, isize); 4] = [(0, -1), (0, 1), (-1, 0), (1, 0)];

const SIX: [(isize, isize); 6] = [(0, -1), (0, 1), (-1, 0), (-1, 1), (1, 0), (1, -1)];

const EIGHT: [(isize, isize); 8] = [
    (0, -1),
    (0, 1),
    (-1, 0),
    (-1, -1),
    (-1, 1),
    (1, 0),
    (1, 1),
    (1, -1),
];

/// Neighbourhood structure of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Topology {
    Four,
    Six,
    Eight,
}

impl Topology {
    /// Row/column offsets in adjacency-list order.
    pub fn offsets(self) -> &'static [(isize, isize)] {
        match self {
            Topology::Four => &FOUR,
            Topology::Six => &SIX,
            Topology::Eight => &EIGHT,
        }
    }

    /// Degree of an interior site.
    pub fn degree(self) -> usize {
        self.offsets().len()
    }
}

impl TryFrom<u8> for Topology {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        match value {
            4 => Ok(Topology::Four),
            6 => Ok(Topology::Six),
            8 => Ok(Topology::Eight),
            other => Err(Error::param(
                "topology",
                format!("{other} is not one of 4, 6, 8"),
            )),
        }
    }
}

impl From<Topology> for u8 {
    fn from(t: Topology) -> u8 {
        t.degree() as u8
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.degree())
    }
}

/// Grid dimensions and topology, without the adjacency itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeDescriptor {
    pub rows: usize,
    pub cols: usize,
    pub topology: Topology,
}

impl fmt::Display for LatticeDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}x{} ({}-neighbourhood)",
            self.rows, self.cols, self.topology
        )
    }
}

/// A grid with precomputed adjacency, stored in compressed row form.
#[derive(Debug, Clone)]
pub struct Lattice {
    rows: usize,
    cols: usize,
    topology: Topology,
    starts: Vec<usize>,
    adjacency: Vec<usize>,
}

impl Lattice {
    /// Builds the adjacency of a `rows x cols` grid.
    pub fn new(rows: usize, cols: usize, topology: Topology) -> Result<Self> {
        let site_count = rows
            .checked_mul(cols)
            .filter(|&s| s > 0 && isize::try_from(s).is_ok())
            .ok_or(Error::InvalidDimension { rows, cols })?;

        let offsets = topology.offsets();
        let mut starts = Vec::with_capacity(site_count + 1);
        let mut adjacency = Vec::with_capacity(site_count * offsets.len());
        starts.push(0);
        for row in 0..rows as isize {
            for col in 0..cols as isize {
                for &(dr, dc) in offsets {
                    let (r, c) = (row + dr, col + dc);
                    if r >= 0 && c >= 0 && (r as usize) < rows && (c as usize) < cols {
                        adjacency.push(r as usize * cols + c as usize);
                    }
                }
                starts.push(adjacency.len());
            }
        }

        Ok(Lattice {
            rows,
            cols,
            topology,
            starts,
            adjacency,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    /// Number of sites, `rows * cols`.
    pub fn site_count(&self) -> usize {
        self.rows * self.cols
    }

    pub fn descriptor(&self) -> LatticeDescriptor {
        LatticeDescriptor {
            rows: self.rows,
            cols: self.cols,
            topology: self.topology,
        }
    }

    /// Neighbours of `site`, or an index error when it is off the grid.
    pub fn neighbors(&self, site: usize) -> Result<&[usize]> {
        if site >= self.site_count() {
            return Err(Error::Index {
                index: site,
                len: self.site_count(),
            });
        }
        Ok(self.adjacent(site))
    }

    /// Unchecked variant of [`Lattice::neighbors`] for inner loops.
    ///
    /// Panics if `site` is out of range.
    #[inline]
    pub fn adjacent(&self, site: usize) -> &[usize] {
        &self.adjacency[self.starts[site]..self.starts[site + 1]]
    }

    /// Sum of all degrees (twice the number of edges).
    pub fn degree_sum(&self) -> usize {
        self.adjacency.len()
    }
}
