//! Finite graded algebras given by structure constants on a basis of
//! elements `e_target · x · e_source`.
//!
//! `mul(a, b)` is the product a·b with b applied first, so it is nonzero
//! only when `source(a) == target(b)`.

use crate::graded::{GradedBasis, GradedError};
use crate::linalg::{accumulate, from_accumulator, Scalar, SparseVec};
use crate::quiver::{BoundQuiver, Path};
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructError {
    #[error("associativity fails on ({0}, {1}, {2})")]
    AssociativityCheckFailed(usize, usize, usize),
    #[error("idempotent check fails at element {0}")]
    IdempotentFailure(usize),
    #[error("product of {0} and {1} leaves the expected degree or endpoints")]
    GradingFailure(usize, usize),
    #[error("no vanishing degree within bound {bound}")]
    NotFiniteDimensionalWithinBound { bound: usize },
    #[error(transparent)]
    Graded(#[from] GradedError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Elem {
    pub label: String,
    pub source: usize,
    pub target: usize,
    pub degree: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructAlgebra {
    pub vertices: Vec<String>,
    pub elems: Vec<Elem>,
    /// Element index of e_v for each vertex.
    pub idempotents: Vec<usize>,
    products: HashMap<(usize, usize), SparseVec>,
}

impl StructAlgebra {
    /// Starts an algebra with one idempotent per vertex.
    pub fn with_vertices(vertices: Vec<String>) -> Self {
        let elems: Vec<Elem> = vertices
            .iter()
            .enumerate()
            .map(|(v, id)| Elem { label: format!("e_{id}"), source: v, target: v, degree: 0 })
            .collect();
        let idempotents = (0..vertices.len()).collect();
        let mut products = HashMap::new();
        for v in 0..vertices.len() {
            products.insert((v, v), vec![(v, Scalar::one())]);
        }
        StructAlgebra { vertices, elems, idempotents, products }
    }

    /// Adds a non-idempotent basis element; idempotent actions are filled in.
    pub fn push_elem(&mut self, e: Elem) -> usize {
        let k = self.elems.len();
        let (s, t) = (e.source, e.target);
        self.elems.push(e);
        let one = vec![(k, Scalar::one())];
        self.products.insert((k, self.idempotents[s]), one.clone());
        self.products.insert((self.idempotents[t], k), one);
        k
    }

    /// Records a·b for two non-idempotent elements.
    pub fn set_product(&mut self, a: usize, b: usize, v: SparseVec) {
        if v.is_empty() {
            self.products.remove(&(a, b));
        } else {
            self.products.insert((a, b), v);
        }
    }

    pub fn dim(&self) -> usize {
        self.elems.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn mul_basis(&self, a: usize, b: usize) -> SparseVec {
        self.products.get(&(a, b)).cloned().unwrap_or_default()
    }

    pub fn product_ref(&self, a: usize, b: usize) -> Option<&SparseVec> {
        self.products.get(&(a, b))
    }

    pub fn mul(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let mut acc = BTreeMap::new();
        for (a, c) in x {
            for (b, d) in y {
                if let Some(p) = self.products.get(&(*a, *b)) {
                    accumulate(&mut acc, &(c * d), p);
                }
            }
        }
        from_accumulator(acc)
    }

    /// Elements with the given endpoints and degree, ascending.
    pub fn elems_in(&self, source: usize, target: usize, degree: usize) -> Vec<usize> {
        (0..self.dim())
            .filter(|&k| {
                let e = &self.elems[k];
                e.source == source && e.target == target && e.degree == degree
            })
            .collect()
    }

    pub fn top_degree(&self) -> usize {
        self.elems.iter().map(|e| e.degree).max().unwrap_or(0)
    }

    /// Dimensions per degree.
    pub fn dims(&self) -> Vec<usize> {
        let mut d = vec![0; self.top_degree() + 1];
        for e in &self.elems {
            d[e.degree] += 1;
        }
        d
    }

    /// `m[t][i][j]` = dim e_j A_t e_i.
    pub fn dim_matrix(&self) -> Vec<Vec<Vec<usize>>> {
        let n = self.num_vertices();
        let mut m = vec![vec![vec![0; n]; n]; self.top_degree() + 1];
        for e in &self.elems {
            m[e.degree][e.source][e.target] += 1;
        }
        m
    }

    /// All nonzero products, sorted by key.
    pub fn table(&self) -> BTreeMap<(usize, usize), SparseVec> {
        self.products.iter().map(|(k, v)| (*k, v.clone())).collect()
    }

    /// Idempotents, grading and associativity on every composable triple.
    pub fn check(&self) -> Result<(), StructError> {
        for (k, e) in self.elems.iter().enumerate() {
            let left = self.mul_basis(self.idempotents[e.target], k);
            let right = self.mul_basis(k, self.idempotents[e.source]);
            if left != vec![(k, Scalar::one())] || right != left {
                return Err(StructError::IdempotentFailure(k));
            }
            for v in 0..self.num_vertices() {
                if v != e.target && !self.mul_basis(self.idempotents[v], k).is_empty() {
                    return Err(StructError::IdempotentFailure(k));
                }
                if v != e.source && !self.mul_basis(k, self.idempotents[v]).is_empty() {
                    return Err(StructError::IdempotentFailure(k));
                }
            }
        }
        for (&(a, b), v) in &self.products {
            let (ea, eb) = (&self.elems[a], &self.elems[b]);
            if ea.source != eb.target {
                return Err(StructError::GradingFailure(a, b));
            }
            for (c, _) in v {
                let ec = &self.elems[*c];
                if ec.degree != ea.degree + eb.degree || ec.source != eb.source || ec.target != ea.target {
                    return Err(StructError::GradingFailure(a, b));
                }
            }
        }
        let n = self.num_vertices();
        let mut by_source: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut by_target: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (k, e) in self.elems.iter().enumerate() {
            if e.degree > 0 {
                by_source[e.source].push(k);
                by_target[e.target].push(k);
            }
        }
        // Idempotent triples follow from the checks above.
        for b in 0..self.dim() {
            let eb = &self.elems[b];
            if eb.degree == 0 {
                continue;
            }
            for &c in &by_target[eb.source] {
                let bc = self.mul_basis(b, c);
                for &a in &by_source[eb.target] {
                    let ab = self.mul_basis(a, b);
                    if ab.is_empty() && bc.is_empty() {
                        continue;
                    }
                    let lhs = self.mul(&ab, &vec![(c, Scalar::one())]);
                    let rhs = self.mul(&vec![(a, Scalar::one())], &bc);
                    if lhs != rhs {
                        return Err(StructError::AssociativityCheckFailed(a, b, c));
                    }
                }
            }
        }
        Ok(())
    }

    /// Subalgebra e·A·e for the idempotent sum over `keep`.
    pub fn idempotent_subalgebra(&self, keep: &[usize]) -> StructAlgebra {
        let mut vmap = vec![None; self.num_vertices()];
        for (k, &v) in keep.iter().enumerate() {
            vmap[v] = Some(k);
        }
        let mut out = StructAlgebra::with_vertices(keep.iter().map(|&v| self.vertices[v].clone()).collect());
        let mut emap: HashMap<usize, usize> = HashMap::new();
        for (k, &v) in keep.iter().enumerate() {
            emap.insert(self.idempotents[v], out.idempotents[k]);
        }
        for (k, e) in self.elems.iter().enumerate() {
            if e.degree == 0 && self.idempotents[e.source] == k {
                continue;
            }
            if let (Some(s), Some(t)) = (vmap[e.source], vmap[e.target]) {
                let nk = out.push_elem(Elem { label: e.label.clone(), source: s, target: t, degree: e.degree });
                emap.insert(k, nk);
            }
        }
        for (&(a, b), v) in &self.products {
            let (Some(&na), Some(&nb)) = (emap.get(&a), emap.get(&b)) else { continue };
            if self.elems[a].degree == 0 || self.elems[b].degree == 0 {
                continue;
            }
            out.set_product(na, nb, v.iter().map(|(c, x)| (emap[c], x.clone())).collect());
        }
        out
    }
}

/// Structure constants of k(Q) on its graded basis; element labels are the
/// right-to-left path names so degree-1 labels are the arrow ids.
pub fn struct_from_bound(bq: &BoundQuiver, maxdeg: usize) -> Result<(StructAlgebra, GradedBasis), StructError> {
    let basis = GradedBasis::new(bq, maxdeg)?;
    let Some(top) = basis.top_degree() else {
        return Err(StructError::NotFiniteDimensionalWithinBound { bound: maxdeg });
    };
    Ok((struct_from_basis(&basis, top), basis))
}

/// Basis path of each element of `struct_from_basis(basis, top)`, in
/// element order: trivial paths, then each degree sorted by traversal
/// sequence (so degree 1 follows arrow order).
pub fn element_paths(basis: &GradedBasis, top: usize) -> Vec<Path> {
    let mut paths: Vec<Path> = (0..basis.bq.quiver.num_vertices()).map(Path::trivial).collect();
    for t in 1..=top {
        let mut ps: Vec<Path> = basis.cells_at(t).flat_map(|(k, _)| basis.basis_paths(k.0, k.1, t)).collect();
        ps.sort_by(|x, y| x.arrows.cmp(&y.arrows));
        paths.extend(ps);
    }
    paths
}

/// Structure constants of the degrees `0..=top` of a computed basis.
pub fn struct_from_basis(basis: &GradedBasis, top: usize) -> StructAlgebra {
    let q = &basis.bq.quiver;
    let n = q.num_vertices();
    let mut alg = StructAlgebra::with_vertices(q.vertices().to_vec());
    // (path arrows) -> element index, grouped by cell.
    let mut elem_of: HashMap<(usize, usize, usize), Vec<usize>> = HashMap::new();
    let paths = element_paths(basis, top);
    for p in &paths[n..] {
        let (i, j, t) = (p.source, p.target, p.len());
        let k = alg.push_elem(Elem { label: p.display(q), source: i, target: j, degree: t });
        elem_of.entry((i, j, t)).or_default().push(k);
    }
    for v in 0..n {
        elem_of.insert((v, v, 0), vec![v]);
    }
    for b in n..alg.dim() {
        for a in n..alg.dim() {
            let (pa, pb) = (&paths[a], &paths[b]);
            if pa.source != pb.target || pa.len() + pb.len() > top {
                continue;
            }
            let mut arrows = pb.arrows.clone();
            arrows.extend_from_slice(&pa.arrows);
            let prod = Path { source: pb.source, target: pa.target, arrows };
            let nf = basis.normal_form(&prod).expect("degree within computed range");
            if nf.is_empty() {
                continue;
            }
            let targets = &elem_of[&(prod.source, prod.target, prod.len())];
            alg.set_product(a, b, nf.into_iter().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (targets[k], c)).collect());
        }
    }
    alg
}
