//! Degreewise bases of k(Q) = kQ/(ρ) for homogeneous relations.
//!
//! For every (source, target, degree) the path space is reduced modulo the
//! degree component of the relation ideal. The ideal is built bottom-up:
//! `I_t = ρ_t + arrows·I_{t-1} + I_{t-1}·arrows`. Basis elements are the
//! non-pivot paths of the fully reduced ideal echelon.

use crate::linalg::{Echelon, Scalar, SparseVec};
use crate::quiver::{BoundQuiver, LinComb, Path, DEFAULT_PATH_CAP};
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GradedError {
    #[error("path space exceeded cap {cap} at degree {degree}")]
    CapExceeded { cap: usize, degree: usize },
    #[error("degree {degree} is beyond the computed bound {bound}")]
    DegreeOutOfRange { degree: usize, bound: usize },
    #[error("relations are not homogeneous")]
    NotHomogeneous,
    #[error("no vanishing degree within bound {bound}")]
    NotFiniteDimensionalWithinBound { bound: usize },
    #[error("endpoints do not compose")]
    NotComposable,
}

/// One `(i, j, t)` cell: paths `i -> j` of length `t` modulo the ideal.
#[derive(Debug, Clone, Default)]
pub struct Cell {
    pub paths: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    pub ideal: Echelon,
    /// Path positions that are basis elements, ascending.
    pub basis: Vec<usize>,
    basis_pos: HashMap<usize, usize>,
}

impl Cell {
    pub fn position(&self, arrows: &[usize]) -> Option<usize> {
        self.index.get(arrows).copied()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of the path at position `k` over `basis`.
    pub fn normal_form_at(&self, k: usize) -> SparseVec {
        match self.ideal.row_for_pivot(k) {
            None => vec![(self.basis_pos[&k], Scalar::one())],
            Some(row) => row
                .iter()
                .filter(|(c, _)| *c != k)
                .map(|(c, x)| (self.basis_pos[c], -x.clone()))
                .collect(),
        }
    }

    /// Coordinates over `basis` of a vector over `paths`.
    pub fn reduce_vector(&self, v: &SparseVec) -> SparseVec {
        self.ideal.reduce(v).into_iter().map(|(c, x)| (self.basis_pos[&c], x)).collect()
    }
}

#[derive(Debug, Clone)]
pub struct GradedBasis {
    pub bq: BoundQuiver,
    bound: usize,
    /// `cells[t]` keyed by (source, target); only nonempty path spaces stored.
    cells: Vec<HashMap<(usize, usize), Cell>>,
    dims: Vec<usize>,
}

impl GradedBasis {
    /// Computes degrees `0..=maxdeg`, stopping early once a degree vanishes.
    pub fn new(bq: &BoundQuiver, maxdeg: usize) -> Result<Self, GradedError> {
        Self::with_cap(bq, maxdeg, DEFAULT_PATH_CAP)
    }

    pub fn with_cap(bq: &BoundQuiver, maxdeg: usize, cap: usize) -> Result<Self, GradedError> {
        if !bq.relations.iter().all(LinComb::is_homogeneous) {
            return Err(GradedError::NotHomogeneous);
        }
        let q = &bq.quiver;
        let n = q.num_vertices();
        let mut rel_by_deg: BTreeMap<usize, Vec<&LinComb>> = BTreeMap::new();
        for r in &bq.relations {
            if let Some(d) = r.degree() {
                rel_by_deg.entry(d).or_default().push(r);
            }
        }
        let mut cells: Vec<HashMap<(usize, usize), Cell>> = Vec::new();
        let mut dims = Vec::new();
        let mut level0 = HashMap::new();
        for v in 0..n {
            level0.insert((v, v), make_cell(vec![Vec::new()], Echelon::new()));
        }
        dims.push(n);
        cells.push(level0);
        let mut total_paths = n;
        for t in 1..=maxdeg {
            if dims[t - 1] == 0 {
                break;
            }
            let prev = &cells[t - 1];
            let mut paths: HashMap<(usize, usize), Vec<Vec<usize>>> = HashMap::new();
            for (&(i, m), cell) in prev {
                for p in &cell.paths {
                    for &a in q.out_arrows(m) {
                        let mut np = p.clone();
                        np.push(a);
                        paths.entry((i, q.arrow(a).target)).or_default().push(np);
                    }
                }
            }
            total_paths += paths.values().map(Vec::len).sum::<usize>();
            if total_paths > cap {
                return Err(GradedError::CapExceeded { cap, degree: t });
            }
            let mut level = HashMap::new();
            let mut dim_t = 0;
            for ((i, j), mut ps) in paths {
                ps.sort();
                let index: HashMap<Vec<usize>, usize> = ps.iter().cloned().enumerate().map(|(k, p)| (p, k)).collect();
                let mut ideal = Echelon::new();
                if t >= 2 {
                    // extend lower ideal on both sides
                    for (&(s, m), cell) in prev {
                        if s == i {
                            for &a in q.out_arrows(m) {
                                if q.arrow(a).target != j {
                                    continue;
                                }
                                for row in cell.ideal.rows() {
                                    ideal.insert(map_row(row, &cell.paths, &index, |p| {
                                        let mut np = p.to_vec();
                                        np.push(a);
                                        np
                                    }));
                                }
                            }
                        }
                        if m == j {
                            for &a in q.in_arrows(s) {
                                if q.arrow(a).source != i {
                                    continue;
                                }
                                for row in cell.ideal.rows() {
                                    ideal.insert(map_row(row, &cell.paths, &index, |p| {
                                        let mut np = vec![a];
                                        np.extend_from_slice(p);
                                        np
                                    }));
                                }
                            }
                        }
                    }
                }
                if let Some(rels) = rel_by_deg.get(&t) {
                    for r in rels {
                        if r.endpoints() != Some((i, j)) {
                            continue;
                        }
                        let mut acc = BTreeMap::new();
                        for (c, p) in &r.terms {
                            acc.insert(index[&p.arrows], c.clone());
                        }
                        ideal.insert(acc.into_iter().filter(|(_, c): &(usize, Scalar)| !c.is_zero()).collect());
                    }
                }
                let cell = make_cell_indexed(ps, index, ideal);
                dim_t += cell.dim();
                level.insert((i, j), cell);
            }
            dims.push(dim_t);
            cells.push(level);
        }
        let bound = dims.len() - 1;
        Ok(GradedBasis { bq: bq.clone(), bound, cells, dims })
    }

    /// Highest degree computed (known dimensions for every t ≤ bound).
    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// First degree whose component is zero, if reached.
    pub fn vanishing_degree(&self) -> Option<usize> {
        self.dims.iter().position(|&d| d == 0)
    }

    /// Highest nonzero degree when the algebra vanishes within the bound.
    pub fn top_degree(&self) -> Option<usize> {
        self.vanishing_degree().map(|z| z - 1)
    }

    fn known(&self, t: usize) -> Result<bool, GradedError> {
        if t <= self.bound {
            Ok(true)
        } else if self.vanishing_degree().is_some() {
            Ok(false)
        } else {
            Err(GradedError::DegreeOutOfRange { degree: t, bound: self.bound })
        }
    }

    pub fn cell(&self, i: usize, j: usize, t: usize) -> Option<&Cell> {
        self.cells.get(t).and_then(|c| c.get(&(i, j)))
    }

    pub fn cells_at(&self, t: usize) -> impl Iterator<Item = (&(usize, usize), &Cell)> {
        self.cells.get(t).into_iter().flat_map(|m| m.iter())
    }

    /// dim e_j Λ_t e_i (paths from i to j).
    pub fn dim(&self, i: usize, j: usize, t: usize) -> usize {
        self.cell(i, j, t).map_or(0, Cell::dim)
    }

    /// Basis paths of e_j Λ_t e_i.
    pub fn basis_paths(&self, i: usize, j: usize, t: usize) -> Vec<Path> {
        match self.cell(i, j, t) {
            None => Vec::new(),
            Some(c) => c.basis.iter().map(|&k| Path { source: i, target: j, arrows: c.paths[k].clone() }).collect(),
        }
    }

    /// Coordinates of a path over the basis of its cell.
    pub fn normal_form(&self, p: &Path) -> Result<SparseVec, GradedError> {
        if !self.known(p.len())? {
            return Ok(Vec::new());
        }
        match self.cell(p.source, p.target, p.len()) {
            None => Ok(Vec::new()),
            Some(c) => Ok(c.position(&p.arrows).map_or_else(Vec::new, |k| c.normal_form_at(k))),
        }
    }

    /// True when the path is zero in k(Q).
    pub fn is_zero_path(&self, p: &Path) -> Result<bool, GradedError> {
        Ok(self.normal_form(p)?.is_empty())
    }

    /// Product x·y (y first) of homogeneous parallel-term combinations, as a
    /// combination of basis paths.
    pub fn multiply(&self, x: &LinComb, y: &LinComb) -> Result<LinComb, GradedError> {
        let (Some((xs, xt)), Some((ys, yt))) = (x.endpoints(), y.endpoints()) else {
            return Ok(LinComb::new(Vec::new()));
        };
        if xs != yt {
            return Err(GradedError::NotComposable);
        }
        let deg = x.degree().unwrap() + y.degree().unwrap();
        if !self.known(deg)? {
            return Ok(LinComb::new(Vec::new()));
        }
        let Some(cell) = self.cell(ys, xt, deg) else {
            return Ok(LinComb::new(Vec::new()));
        };
        let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (a, p) in &x.terms {
            for (b, q) in &y.terms {
                let mut arrows = q.arrows.clone();
                arrows.extend_from_slice(&p.arrows);
                let k = cell.position(&arrows).expect("composable path lies in its cell");
                crate::linalg::accumulate(&mut acc, &(a * b), &cell.normal_form_at(k));
            }
        }
        Ok(LinComb::new(
            crate::linalg::from_accumulator(acc)
                .into_iter()
                .map(|(k, c)| (c, Path { source: ys, target: xt, arrows: cell.paths[cell.basis[k]].clone() }))
                .collect(),
        ))
    }
}

fn make_cell(paths: Vec<Vec<usize>>, ideal: Echelon) -> Cell {
    let index = paths.iter().cloned().enumerate().map(|(k, p)| (p, k)).collect();
    make_cell_indexed(paths, index, ideal)
}

fn make_cell_indexed(paths: Vec<Vec<usize>>, index: HashMap<Vec<usize>, usize>, ideal: Echelon) -> Cell {
    let basis: Vec<usize> = (0..paths.len()).filter(|&k| !ideal.is_pivot(k)).collect();
    let basis_pos = basis.iter().enumerate().map(|(p, &k)| (k, p)).collect();
    Cell { paths, index, ideal, basis, basis_pos }
}

fn map_row(
    row: &SparseVec,
    paths: &[Vec<usize>],
    index: &HashMap<Vec<usize>, usize>,
    f: impl Fn(&[usize]) -> Vec<usize>,
) -> SparseVec {
    let mut acc = BTreeMap::new();
    for (k, c) in row {
        acc.insert(index[&f(&paths[*k])], c.clone());
    }
    acc.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::linalg::int;
    use proptest::prelude::*;

    #[test]
    fn loop_dims() {
        let b = GradedBasis::new(&corpus::loop_quiver(1), 5).unwrap();
        assert_eq!(b.dims(), &[1, 1, 0]);
        assert_eq!(b.top_degree(), Some(1));
    }

    #[test]
    fn zigzag_a5_total_dimension() {
        // Oracle: 5 idempotents, 8 arrows, one socle element per vertex.
        let b = GradedBasis::new(&corpus::zigzag(5), 6).unwrap();
        assert_eq!(b.total_dim(), 18);
        assert_eq!(b.dims(), &[5, 8, 5, 0]);
    }

    #[test]
    fn cubic_cycle_has_constant_dimension() {
        let bq = crate::mckay::mckay_bound_quiver(1, 2, crate::mckay::Flavor::Cubic);
        let b = GradedBasis::new(&bq, 7).unwrap();
        assert!(b.dims().iter().all(|&d| d == 3));
        assert_eq!(b.bound(), 7);
        assert!(b.vanishing_degree().is_none());
        let long = Path { source: 0, target: 0, arrows: vec![0; 9] };
        assert!(matches!(b.normal_form(&long), Err(GradedError::DegreeOutOfRange { .. })));
    }

    #[test]
    fn multiplication_examples() {
        let lp = corpus::loop_quiver(1);
        let b = GradedBasis::new(&lp, 4).unwrap();
        let e = LinComb::monomial(Path::trivial(0));
        assert_eq!(b.multiply(&e, &e).unwrap(), e);
        let x = LinComb::monomial(Path { source: 0, target: 0, arrows: vec![0] });
        assert!(b.multiply(&x, &x).unwrap().terms.is_empty());

        // zigzag: a1: 1->2 then b1: 2->1 is the socle element at vertex 1
        let z = corpus::zigzag(5);
        let b = GradedBasis::new(&z, 4).unwrap();
        let q = &z.quiver;
        let a1 = q.arrow_by_id("a1").unwrap();
        let b1 = q.arrow_by_id("b1").unwrap();
        let x = LinComb::monomial(Path::from_arrows(q, vec![b1]).unwrap());
        let y = LinComb::monomial(Path::from_arrows(q, vec![a1]).unwrap());
        let prod = b.multiply(&x, &y).unwrap();
        let socle = b.basis_paths(0, 0, 2);
        assert_eq!(socle.len(), 1);
        assert_eq!(prod, LinComb::new(vec![(int(1), socle[0].clone())]));
    }

    #[test]
    fn cap_is_an_error() {
        let z = corpus::zigzag(5);
        assert!(matches!(GradedBasis::with_cap(&z, 3, 10), Err(GradedError::CapExceeded { .. })));
    }

    proptest! {
        #[test]
        fn hilbert_consistency(k in 0usize..corpus::small_battery().len()) {
            let (_, bq) = &corpus::small_battery()[k];
            let b = GradedBasis::new(bq, 12).unwrap();
            let arrows = bq.quiver.num_arrows();
            for w in b.dims().windows(2) {
                prop_assert!(w[1] <= arrows * w[0]);
                if w[0] == 0 { prop_assert_eq!(w[1], 0); }
            }
            for v in 0..bq.quiver.num_vertices() {
                for u in 0..bq.quiver.num_vertices() {
                    prop_assert_eq!(b.dim(v, u, 0), usize::from(v == u));
                }
            }
        }
    }
}
