//! Weighted union-find over lattice sites, with path compression.
//!
//! Sites start unoccupied. Occupying a site creates a singleton cluster;
//! the size of every cluster is kept at its root.

const EMPTY: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct DisjointSets {
    parent: Vec<usize>,
    comp_size: Vec<usize>,
    occupied: usize,
}

impl DisjointSets {
    /// `n` unoccupied sites.
    pub fn new(n: usize) -> Self {
        DisjointSets {
            parent: vec![EMPTY; n],
            comp_size: vec![0; n],
            occupied: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    #[inline]
    pub fn is_occupied(&self, site: usize) -> bool {
        self.parent[site] != EMPTY
    }

    pub fn occupied_count(&self) -> usize {
        self.occupied
    }

    /// Turns an unoccupied site into a cluster of size one.
    ///
    /// Panics if the site is already occupied.
    pub fn occupy(&mut self, site: usize) {
        assert!(!self.is_occupied(site), "site {site} occupied twice");
        self.parent[site] = site;
        self.comp_size[site] = 1;
        self.occupied += 1;
    }

    /// Root of the cluster containing the occupied `site`.
    pub fn find(&mut self, site: usize) -> usize {
        debug_assert!(self.is_occupied(site));
        let mut root = site;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = site;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Merges the clusters of two occupied sites, smaller under larger, and
    /// returns the surviving root.
    pub fn union(&mut self, a: usize, b: usize) -> usize {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return ra;
        }
        let (big, small) = if self.comp_size[ra] >= self.comp_size[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small] = big;
        self.comp_size[big] += self.comp_size[small];
        self.comp_size[small] = 0;
        big
    }

    /// Size of the cluster containing the occupied `site`.
    pub fn component_size(&mut self, site: usize) -> usize {
        let root = self.find(site);
        self.comp_size[root]
    }

    /// Occupies `site`, joins it to every occupied site in `neighbours`
    /// and returns the size of the resulting cluster.
    #[inline]
    pub fn occupy_and_merge(&mut self, site: usize, neighbours: &[usize]) -> usize {
        self.occupy(site);
        let mut root = site;
        for &nb in neighbours {
            if self.is_occupied(nb) {
                root = self.union(root, nb);
            }
        }
        self.comp_size[root]
    }

    /// Sizes of all clusters, one entry per root, in site order.
    pub fn cluster_sizes(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&s| self.parent[s] == s)
            .map(|s| self.comp_size[s])
            .collect()
    }
}
