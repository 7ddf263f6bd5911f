//! Minimal graded projective resolutions of simple modules, global
//! dimension, bounded Koszulity and BGP reflections against τ-mutation.
//!
//! Modules are left modules over a structure-constant algebra A. The free
//! module ⊕ A·g has basis pairs (g, e) with e running over elements
//! starting at the vertex of g.

use crate::graded::{GradedBasis, GradedError};
use crate::linalg::{kernel_of_images, Echelon, Scalar, SparseVec};
use crate::quiver::Quiver;
use crate::separated::SepVertex;
use crate::slices::{mutate, slice_algebra, Ambient, Direction, Mutation, SliceError, TauSlice};
use crate::structalg::StructAlgebra;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KoszulError {
    #[error("vertex {0} is neither a sink nor a source")]
    NotSinkOrSource(String),
    #[error("BGP comparison needs Loewy length 3, got {0}")]
    WrongLoewyLength(usize),
    #[error("slice algebra is not radical-square-zero")]
    NotRadicalSquareZero,
    #[error(transparent)]
    Slice(#[from] SliceError),
    #[error(transparent)]
    Graded(#[from] GradedError),
}

/// Generators (vertex, internal degree) of each free module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolution {
    pub vertex: usize,
    pub steps: Vec<Vec<(usize, usize)>>,
    /// The last computed syzygy vanished.
    pub complete: bool,
    /// Dimension vector of the last computed syzygy.
    pub last_syzygy: Vec<usize>,
}

/// steps[s] maps (internal degree) to multiplicity per vertex.
pub type BettiTable = Vec<BTreeMap<usize, Vec<usize>>>;

impl Resolution {
    /// Projective dimension when complete.
    pub fn length(&self) -> Option<usize> {
        self.complete.then(|| self.steps.len() - 1)
    }

    pub fn betti(&self, num_vertices: usize) -> BettiTable {
        self.steps
            .iter()
            .map(|gens| {
                let mut row: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
                for &(v, d) in gens {
                    row.entry(d).or_insert_with(|| vec![0; num_vertices])[v] += 1;
                }
                row
            })
            .collect()
    }

    /// Σ (-1)^s [P_s] = [S] + (-1)^c [last syzygy].
    pub fn euler_check(&self, a: &StructAlgebra) -> bool {
        let n = a.num_vertices();
        let mut proj = vec![vec![0i64; n]; n];
        for e in &a.elems {
            proj[e.source][e.target] += 1;
        }
        let mut acc = vec![0i64; n];
        for (s, gens) in self.steps.iter().enumerate() {
            let sign = if s % 2 == 0 { 1 } else { -1 };
            for &(u, _) in gens {
                for w in 0..n {
                    acc[w] += sign * proj[u][w];
                }
            }
        }
        let c = self.steps.len() - 1;
        let sign = if c % 2 == 0 { 1 } else { -1 };
        (0..n).all(|w| acc[w] == i64::from(w == self.vertex) + sign * self.last_syzygy[w] as i64)
    }
}

struct Free<'a> {
    a: &'a StructAlgebra,
    /// (vertex, degree) -> basis indices
    cells: BTreeMap<(usize, usize), Vec<usize>>,
    /// basis index -> (generator, element)
    entries: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
}

impl<'a> Free<'a> {
    fn new(a: &'a StructAlgebra, from: &[Vec<usize>], gens: Vec<(usize, usize)>) -> Self {
        let mut cells: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        let mut entries = Vec::new();
        let mut index = HashMap::new();
        for (g, &(u, d)) in gens.iter().enumerate() {
            for &e in &from[u] {
                let el = &a.elems[e];
                cells.entry((el.target, d + el.degree)).or_default().push(entries.len());
                index.insert((g, e), entries.len());
                entries.push((g, e));
            }
        }
        Free { a, cells, entries, index }
    }

    /// a_elem · x
    fn act(&self, a_elem: usize, x: &SparseVec) -> SparseVec {
        let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (k, c) in x {
            let (g, e) = self.entries[*k];
            if let Some(p) = self.a.product_ref(a_elem, e) {
                for (e2, d) in p {
                    *acc.entry(self.index[&(g, *e2)]).or_insert_with(Scalar::zero) += c * d;
                }
            }
        }
        acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }
}

/// Kernel of F -> (previous free module, or the simple when `images` is
/// None), per (vertex, degree) cell, in F's global coordinates.
fn kernel(f: &Free, prev: Option<(&Free, &[SparseVec])>, vertex: usize) -> BTreeMap<(usize, usize), Vec<SparseVec>> {
    let mut out = BTreeMap::new();
    for (&cell, idx) in &f.cells {
        let images: Vec<SparseVec> = idx
            .iter()
            .map(|&k| {
                let (g, e) = f.entries[k];
                match prev {
                    None => {
                        if e == f.a.idempotents[vertex] {
                            vec![(0, Scalar::one())]
                        } else {
                            Vec::new()
                        }
                    }
                    Some((pf, ims)) => pf.act(e, &ims[g]),
                }
            })
            .collect();
        let ker = kernel_of_images(&images);
        if !ker.is_empty() {
            out.insert(cell, ker.into_iter().map(|row| row.into_iter().map(|(j, c)| (idx[j], c)).collect()).collect());
        }
    }
    out
}

/// Minimal generators of a graded submodule given cellwise.
fn generators(f: &Free, sub: &BTreeMap<(usize, usize), Vec<SparseVec>>) -> Vec<((usize, usize), SparseVec)> {
    let a = f.a;
    let degree_one: Vec<usize> = (0..a.dim()).filter(|&k| a.elems[k].degree == 1).collect();
    let mut out = Vec::new();
    for (&(w, t), rows) in sub {
        let mut span = Echelon::new();
        for &x in &degree_one {
            if a.elems[x].target != w || t == 0 {
                continue;
            }
            if let Some(below) = sub.get(&(a.elems[x].source, t - 1)) {
                for y in below {
                    span.insert(f.act(x, y));
                }
            }
        }
        for row in rows {
            if span.insert(row.clone()) {
                out.push(((w, t), row.clone()));
            }
        }
    }
    out
}

/// Minimal graded projective resolution of the simple at `vertex`, with at
/// most `cap` steps after P_0.
pub fn minimal_resolution(a: &StructAlgebra, vertex: usize, cap: usize) -> Resolution {
    let n = a.num_vertices();
    let mut from: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, e) in a.elems.iter().enumerate() {
        from[e.source].push(k);
    }
    let mut steps = vec![vec![(vertex, 0)]];
    let mut cur = Free::new(a, &from, vec![(vertex, 0)]);
    let mut ker = kernel(&cur, None, vertex);
    loop {
        let dims = |k: &BTreeMap<(usize, usize), Vec<SparseVec>>| {
            let mut d = vec![0; n];
            for (&(w, _), rows) in k {
                d[w] += rows.len();
            }
            d
        };
        if ker.is_empty() {
            return Resolution { vertex, steps, complete: true, last_syzygy: vec![0; n] };
        }
        if steps.len() > cap {
            return Resolution { vertex, steps, complete: false, last_syzygy: dims(&ker) };
        }
        let gens = generators(&cur, &ker);
        let images: Vec<SparseVec> = gens.iter().map(|(_, v)| v.clone()).collect();
        let next_gens: Vec<(usize, usize)> = gens.iter().map(|(c, _)| *c).collect();
        steps.push(next_gens.clone());
        let next = Free::new(a, &from, next_gens);
        ker = kernel(&next, Some((&cur, &images)), vertex);
        cur = next;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlobalDimension {
    Finite(usize),
    InfiniteWithinCap(usize),
}

pub fn global_dimension(a: &StructAlgebra, cap: usize) -> GlobalDimension {
    let mut best = 0;
    for v in 0..a.num_vertices() {
        match minimal_resolution(a, v, cap).length() {
            Some(k) => best = best.max(k),
            None => return GlobalDimension::InfiniteWithinCap(cap),
        }
    }
    GlobalDimension::Finite(best)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KoszulReport {
    pub bound: usize,
    pub linear: bool,
    /// (vertex, step, internal degree) of the first nonlinear generator.
    pub failure: Option<(usize, usize, usize)>,
}

/// Default bound 2l+2 for an algebra of Loewy length l+1.
pub fn default_koszul_bound(l: usize) -> usize {
    2 * l + 2
}

/// Linearity of the minimal resolutions of all simples through step `bound`.
pub fn koszul_bounded(a: &StructAlgebra, bound: usize) -> KoszulReport {
    for v in 0..a.num_vertices() {
        let res = minimal_resolution(a, v, bound);
        for (s, gens) in res.steps.iter().enumerate() {
            if let Some(&(_, d)) = gens.iter().find(|(_, d)| *d != s) {
                return KoszulReport { bound, linear: false, failure: Some((v, s, d)) };
            }
        }
    }
    KoszulReport { bound, linear: true, failure: None }
}

/// Reverses every arrow at a sink or source.
pub fn bgp_reflect(q: &Quiver, v: usize) -> Result<Quiver, KoszulError> {
    if !q.out_arrows(v).is_empty() && !q.in_arrows(v).is_empty() {
        return Err(KoszulError::NotSinkOrSource(q.vertex_id(v).into()));
    }
    let mut out = Quiver::empty();
    for id in q.vertices() {
        out.add_vertex(id).unwrap();
    }
    for a in q.arrows() {
        let (s, t) = if a.source == v || a.target == v { (a.target, a.source) } else { (a.source, a.target) };
        out.add_arrow(&a.id, s, t).unwrap();
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BgpReport {
    pub direction: Direction,
    pub replacement: SepVertex,
    pub matches: bool,
}

/// For l = 2: the quiver of the mutated slice equals the BGP reflection of
/// the slice quiver, identifying the mutated vertex with its translate.
pub fn verify_bgp_tau(amb: &Ambient, slice: &TauSlice, v: SepVertex) -> Result<BgpReport, KoszulError> {
    if amb.l() != 2 {
        return Err(KoszulError::WrongLoewyLength(amb.l() + 1));
    }
    let alg = slice_algebra(amb, slice)?;
    let basis = GradedBasis::new(&alg, 3)?;
    if basis.dims().get(2).copied().unwrap_or(0) != 0 {
        return Err(KoszulError::NotRadicalSquareZero);
    }
    let q = &alg.quiver;
    let k = q.vertex(&amb.id(v)).ok_or_else(|| KoszulError::NotSinkOrSource(amb.id(v)))?;
    let direction = if q.out_arrows(k).is_empty() {
        Direction::Minus
    } else if q.in_arrows(k).is_empty() {
        Direction::Plus
    } else {
        return Err(KoszulError::NotSinkOrSource(amb.id(v)));
    };
    let reflected = bgp_reflect(q, k)?;
    let mutated = mutate(amb, slice, Mutation { vertex: v, direction })?;
    let replacement = *mutated.vertices.difference(&slice.vertices).next().expect("one vertex replaced");
    let mq = slice_algebra(amb, &mutated)?.quiver;
    let rename = |id: &str| if id == amb.id(v) { amb.id(replacement) } else { id.to_string() };
    let mut want: Vec<(String, String)> = reflected
        .arrows()
        .iter()
        .map(|a| (rename(reflected.vertex_id(a.source)), rename(reflected.vertex_id(a.target))))
        .collect();
    let mut got: Vec<(String, String)> =
        mq.arrows().iter().map(|a| (mq.vertex_id(a.source).to_string(), mq.vertex_id(a.target).to_string())).collect();
    want.sort();
    got.sort();
    Ok(BgpReport { direction, replacement, matches: want == got })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::extensions::beilinson_matrix;
    use crate::quiver::{BoundQuiver, LinComb, Path};
    use crate::slices::initial_slice;
    use crate::stability::check_stable;
    use crate::structalg::struct_from_bound;

    fn alg(bq: &BoundQuiver) -> StructAlgebra {
        struct_from_bound(bq, bq.quiver.num_vertices() + 4).unwrap().0
    }

    #[test]
    fn a2_resolutions() {
        let a = alg(&corpus::linear_a(2));
        let r = minimal_resolution(&a, 0, 5);
        assert_eq!(r.length(), Some(1));
        assert_eq!(r.steps[1], vec![(1, 1)]);
        assert!(r.euler_check(&a));
        assert_eq!(minimal_resolution(&a, 1, 5).length(), Some(0));
        assert_eq!(global_dimension(&a, 5), GlobalDimension::Finite(1));
    }

    #[test]
    fn dual_numbers_periodic() {
        let (a, _) = struct_from_bound(&corpus::loop_quiver(1), 4).unwrap();
        let r = minimal_resolution(&a, 0, 4);
        assert!(!r.complete);
        assert_eq!(r.steps, (0..=4).map(|s| vec![(0, s)]).collect::<Vec<_>>());
        assert!(r.euler_check(&a));
        assert_eq!(global_dimension(&a, 4), GlobalDimension::InfiniteWithinCap(4));
        assert!(koszul_bounded(&a, 6).linear);
    }

    #[test]
    fn cubic_relation_is_not_koszul() {
        let (a, _) = struct_from_bound(&corpus::loop_quiver(2), 5).unwrap();
        let rep = koszul_bounded(&a, 6);
        assert_eq!(rep.failure, Some((0, 2, 3)));
    }

    #[test]
    fn mutated_slice_resolution() {
        let amb = Ambient::new(&corpus::zigzag(5), None).unwrap();
        let s0 = initial_slice(&amb, 0).unwrap();
        let s1 = mutate(&amb, &s0, Mutation { vertex: SepVertex::new(1, 1), direction: Direction::Minus }).unwrap();
        let bq = slice_algebra(&amb, &s1).unwrap();
        let a = alg(&bq);
        let v = bq.quiver.vertex("(2,-1)").unwrap();
        let r = minimal_resolution(&a, v, 6);
        assert_eq!(r.length(), Some(2));
        assert!(r.euler_check(&a));
        assert_eq!(global_dimension(&a, 6), GlobalDimension::Finite(2));
        assert!(koszul_bounded(&a, 6).linear);
        let a0 = alg(&slice_algebra(&amb, &s0).unwrap());
        assert_eq!(global_dimension(&a0, 6), GlobalDimension::Finite(1));
    }

    #[test]
    fn beilinson_gldim() {
        for bq in [corpus::zigzag(4), crate::mckay::mckay_bound_quiver(3, 1, crate::mckay::Flavor::Exterior)] {
            let st = check_stable(&bq, None).unwrap();
            let b = beilinson_matrix(&st);
            assert_eq!(global_dimension(&b, 8), GlobalDimension::Finite(st.l - 1));
        }
    }

    #[test]
    fn reflection_is_involutive() {
        let q = corpus::linear_a(3).quiver;
        let r = bgp_reflect(&q, 0).unwrap();
        assert_eq!(bgp_reflect(&r, 0).unwrap(), q);
        assert!(bgp_reflect(&q, 1).is_err());
    }

    #[test]
    fn bgp_on_zigzag_a5() {
        let amb = Ambient::new(&corpus::zigzag(5), None).unwrap();
        let s0 = initial_slice(&amb, 0).unwrap();
        let rep = verify_bgp_tau(&amb, &s0, SepVertex::new(1, 1)).unwrap();
        assert!(rep.matches);
        assert_eq!(rep.direction, Direction::Minus);
        let rep = verify_bgp_tau(&amb, &s0, SepVertex::new(0, 0)).unwrap();
        assert!(rep.matches);
        assert_eq!(rep.direction, Direction::Plus);
        let amb3 = Ambient::new(&corpus::loop_quiver(3), None).unwrap();
        let s = initial_slice(&amb3, 0).unwrap();
        assert!(matches!(verify_bgp_tau(&amb3, &s, SepVertex::new(0, 0)), Err(KoszulError::WrongLoewyLength(4))));
    }

    #[test]
    fn monomial_cube_fails_linearity() {
        // a -> b -> c -> d with the length-3 path zero
        let q = corpus::linear_a(4).quiver;
        let rel = LinComb::monomial(Path::from_arrows(&q, vec![0, 1, 2]).unwrap());
        let a = alg(&BoundQuiver::new(q, vec![rel]));
        let rep = koszul_bounded(&a, 4);
        assert_eq!(rep.failure, Some((0, 2, 3)));
    }
}
