//! Modified Newman-Ziff estimation for two occupation probabilities: `p_in`
//! on a subgrid and `p_out` on its complement.
//!
//! A run draws one visiting order for the subgrid and one for the
//! complement. For every inner prefix length `n_in` the occupied state is
//! snapshotted and the complement order is replayed on top of it, giving the
//! largest cluster for every pair `(n_in, n_out)`. The distribution then
//! follows by weighting with `Bin(|G'|, p_in) x Bin(S - |G'|, p_out)`.

use crate::binomial::binomial_pmf;
use crate::disjoint_sets::DisjointSets;
use crate::distribution::{Cdf, CdfEstimate, DistributionMeta, InhomogeneousMeta, SubgridRect};
use crate::error::{check_probability, Error, Result};
use crate::lattice::Lattice;
use crate::newman_ziff::ordered_runs;
use crate::rng::{random_permutation, RngStream};

/// A proper, nonempty subset `G'` of the lattice sites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgrid {
    sites: Vec<usize>,
    complement: Vec<usize>,
    rect: Option<SubgridRect>,
}

impl Subgrid {
    /// Builds a subgrid from arbitrary site indices (sorted internally).
    pub fn new(lattice: &Lattice, mut sites: Vec<usize>) -> Result<Self> {
        let s = lattice.site_count();
        sites.sort_unstable();
        if sites.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::param("subgrid", "duplicate sites"));
        }
        if let Some(&bad) = sites.iter().find(|&&i| i >= s) {
            return Err(Error::Index { index: bad, len: s });
        }
        if sites.is_empty() || sites.len() >= s {
            return Err(Error::param(
                "subgrid",
                format!(
                    "must hold between 1 and {} of {s} sites, has {}",
                    s - 1,
                    sites.len()
                ),
            ));
        }
        let mut inside = vec![false; s];
        sites.iter().for_each(|&i| inside[i] = true);
        let complement = (0..s).filter(|&i| !inside[i]).collect();
        Ok(Subgrid {
            sites,
            complement,
            rect: None,
        })
    }

    /// Sites of `G'` in increasing order.
    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    /// Sites of `G - G'` in increasing order.
    pub fn complement(&self) -> &[usize] {
        &self.complement
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// The rectangle this subgrid was built from, if any.
    pub fn rect(&self) -> Option<SubgridRect> {
        self.rect
    }
}

/// The axis-aligned rectangle with 0-based upper-left corner `(top, left)`.
pub fn rect_subgrid(
    lattice: &Lattice,
    top: usize,
    left: usize,
    height: usize,
    width: usize,
) -> Result<Subgrid> {
    let fits = height > 0
        && width > 0
        && top.checked_add(height).is_some_and(|b| b <= lattice.rows())
        && left.checked_add(width).is_some_and(|r| r <= lattice.cols());
    if !fits {
        return Err(Error::param(
            "subgrid",
            format!(
                "{height}x{width} rectangle at ({top}, {left}) does not fit in {}x{}",
                lattice.rows(),
                lattice.cols()
            ),
        ));
    }
    let sites = (top..top + height)
        .flat_map(|r| (left..left + width).map(move |c| r * lattice.cols() + c))
        .collect();
    let mut sub = Subgrid::new(lattice, sites)?;
    sub.rect = Some(SubgridRect {
        subgrid_top: top,
        subgrid_left: left,
        subgrid_height: height,
        subgrid_width: width,
    });
    Ok(sub)
}

/// Largest cluster size `T[n_in][n_out]` of one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointMaxSizeTable {
    inner: usize,
    outer: usize,
    entries: Vec<usize>,
}

impl JointMaxSizeTable {
    /// `|G'|`.
    pub fn inner_sites(&self) -> usize {
        self.inner
    }

    /// `S - |G'|`.
    pub fn outer_sites(&self) -> usize {
        self.outer
    }

    pub fn get(&self, n_in: usize, n_out: usize) -> usize {
        assert!(n_in <= self.inner && n_out <= self.outer);
        self.entries[n_in * (self.outer + 1) + n_out]
    }

    /// `T[n_in][0..=S - |G'|]`.
    pub fn row(&self, n_in: usize) -> &[usize] {
        let w = self.outer + 1;
        &self.entries[n_in * w..(n_in + 1) * w]
    }
}

/// Runs the modified algorithm for given inner and outer visiting orders.
///
/// `inner_order` permutes `0..|G'|` and `outer_order` permutes
/// `0..S - |G'|`; both index into the sorted site lists of `subgrid`.
pub fn table_for_orders(
    lattice: &Lattice,
    subgrid: &Subgrid,
    inner_order: &[usize],
    outer_order: &[usize],
) -> Result<JointMaxSizeTable> {
    let (m, j) = (subgrid.len(), subgrid.complement.len());
    if m + j != lattice.site_count() {
        return Err(Error::Shape {
            expected: format!("subgrid of a {}-site lattice", lattice.site_count()),
            found: format!("{} sites", m + j),
        });
    }
    check_order("inner order", inner_order, m)?;
    check_order("outer order", outer_order, j)?;

    let inner_sites: Vec<usize> = inner_order.iter().map(|&i| subgrid.sites[i]).collect();
    let outer_sites: Vec<usize> = outer_order.iter().map(|&i| subgrid.complement[i]).collect();

    let mut entries = Vec::with_capacity((m + 1) * (j + 1));
    let mut state = DisjointSets::new(lattice.site_count());
    let mut inner_largest = 0;
    for n_in in 0..=m {
        if n_in > 0 {
            let site = inner_sites[n_in - 1];
            inner_largest = inner_largest.max(state.occupy_and_merge(site, lattice.adjacent(site)));
        }
        // Snapshot of the inner state, extended by the outer order.
        let mut replay = state.clone();
        let mut largest = inner_largest;
        entries.push(largest);
        for &site in &outer_sites {
            largest = largest.max(replay.occupy_and_merge(site, lattice.adjacent(site)));
            entries.push(largest);
        }
    }
    Ok(JointMaxSizeTable {
        inner: m,
        outer: j,
        entries,
    })
}

fn check_order(what: &'static str, order: &[usize], len: usize) -> Result<()> {
    let mut seen = vec![false; len];
    if order.len() != len {
        return Err(Error::param(
            what,
            format!("expected {len} entries, found {}", order.len()),
        ));
    }
    for &i in order {
        match seen.get_mut(i) {
            Some(s) if !*s => *s = true,
            _ => return Err(Error::param(what, "not a permutation")),
        }
    }
    Ok(())
}

/// One run: the inner order is drawn first, then the outer order.
pub fn nz_run_modified(
    lattice: &Lattice,
    subgrid: &Subgrid,
    rng: &mut RngStream,
) -> JointMaxSizeTable {
    let inner = random_permutation(subgrid.len(), rng).expect("subgrid is nonempty");
    let outer = random_permutation(subgrid.complement.len(), rng).expect("complement is nonempty");
    table_for_orders(lattice, subgrid, inner.as_slice(), outer.as_slice())
        .expect("orders come from the subgrid")
}

/// `F(k) = sum over (n_in, n_out) of 1{T <= k} Bin(|G'|, p_in)(n_in) Bin(S - |G'|, p_out)(n_out)`.
pub fn convolve_cdf_joint(table: &JointMaxSizeTable, p_in: f64, p_out: f64) -> Result<Cdf> {
    let s = table.inner + table.outer;
    let mut acc = vec![0.0; s + 1];
    accumulate_table(&mut acc, table, p_in, p_out)?;
    Ok(Cdf::from_accumulated(acc))
}

fn accumulate_table(
    acc: &mut [f64],
    table: &JointMaxSizeTable,
    p_in: f64,
    p_out: f64,
) -> Result<()> {
    check_probability("p_in", p_in)?;
    check_probability("p_out", p_out)?;
    let inner = binomial_pmf(table.inner, p_in)?;
    let outer_cumulative = binomial_pmf(table.outer, p_out)?.cumulative();
    let mut row_cdf = vec![0.0; acc.len()];
    for (n_in, &weight) in inner.weights().iter().enumerate() {
        if weight == 0.0 {
            continue;
        }
        // Each row is nondecreasing, so the outer counts with T <= k form a prefix.
        row_cdf_into(&mut row_cdf, table.row(n_in), &outer_cumulative);
        for (a, r) in acc.iter_mut().zip(&row_cdf) {
            *a += weight * r;
        }
    }
    Ok(())
}

fn row_cdf_into(out: &mut [f64], row: &[usize], cumulative: &[f64]) {
    let mut n = 0;
    for (k, slot) in out.iter_mut().enumerate() {
        while n < row.len() && row[n] <= k {
            n += 1;
        }
        *slot = if n == 0 { 0.0 } else { cumulative[n - 1] };
    }
}

/// Average of `runs` single-run joint convolutions; run `r` uses stream `(seed, r)`.
pub fn estimate_cdf_inhomogeneous(
    lattice: &Lattice,
    subgrid: &Subgrid,
    p_in: f64,
    p_out: f64,
    runs: usize,
    seed: u64,
) -> Result<CdfEstimate> {
    check_probability("p_in", p_in)?;
    check_probability("p_out", p_out)?;
    if runs == 0 {
        return Err(Error::param("runs", "at least one run is required"));
    }
    if subgrid.len() + subgrid.complement.len() != lattice.site_count() {
        return Err(Error::Shape {
            expected: format!("subgrid of a {}-site lattice", lattice.site_count()),
            found: format!("{} sites", subgrid.len() + subgrid.complement.len()),
        });
    }

    let s = lattice.site_count();
    let mut sum = vec![0.0; s + 1];
    ordered_runs(
        runs,
        |r| {
            let table = nz_run_modified(lattice, subgrid, &mut RngStream::new(seed, r));
            let mut single = vec![0.0; s + 1];
            accumulate_table(&mut single, &table, p_in, p_out).expect("probabilities checked");
            single
        },
        |single| sum.iter_mut().zip(single).for_each(|(a, v)| *a += v),
    );
    sum.iter_mut().for_each(|v| *v /= runs as f64);

    Ok(CdfEstimate {
        cdf: Cdf::from_accumulated(sum),
        meta: DistributionMeta {
            rows: lattice.rows(),
            cols: lattice.cols(),
            topology: lattice.topology(),
            p: None,
            runs,
            seed,
            inhomogeneous: Some(InhomogeneousMeta {
                rect: subgrid.rect,
                subgrid_size: subgrid.len(),
                p_in,
                p_out,
            }),
        },
    })
}
