//! Level windows of the separated directed quiver, smash-product windows,
//! component structure and special truncations.
//!
//! Vertices of the separated quiver are pairs (i, n); an arrow α: i -> j
//! lifts to (α, n): (i, n) -> (j, n+1). Since every arrow raises the level by
//! one, the window on levels [n0, n1] is exactly the idempotent subalgebra of
//! the smash product on those vertices, so no boundary correction is needed.

use crate::graded::{GradedBasis, GradedError};
use crate::linalg::Scalar;
use crate::quiver::{induced_subquiver, BoundQuiver, LinComb, Path, Quiver};
use crate::stability::Stable;
use crate::structalg::{Elem, StructAlgebra};
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SepError {
    #[error("input quiver is not connected")]
    DisconnectedInput,
    #[error(transparent)]
    Graded(#[from] GradedError),
}

/// Vertex (base, level) of the separated quiver. Ordered by level first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SepVertex {
    pub level: i64,
    pub base: usize,
}

impl SepVertex {
    pub fn new(base: usize, level: i64) -> Self {
        SepVertex { level, base }
    }

    pub fn id(&self, q: &Quiver) -> String {
        sep_id(q.vertex_id(self.base), self.level)
    }
}

pub fn sep_id(base: &str, level: i64) -> String {
    format!("({base},{level})")
}

/// Parses "(id,n)" against a base quiver.
pub fn parse_sep_id(q: &Quiver, s: &str) -> Option<SepVertex> {
    let inner = s.trim().strip_prefix('(')?.strip_suffix(')')?;
    let (base, level) = inner.rsplit_once(',')?;
    Some(SepVertex::new(q.vertex(base.trim())?, level.trim().parse().ok()?))
}

pub fn tau_bar(st: &Stable, v: SepVertex) -> SepVertex {
    SepVertex::new(st.tau[v.base], v.level - st.l as i64)
}

pub fn tau_bar_inv(st: &Stable, v: SepVertex) -> SepVertex {
    SepVertex::new(st.tau_inv[v.base], v.level + st.l as i64)
}

#[derive(Debug, Clone)]
pub struct SepWindow {
    pub n0: i64,
    pub n1: i64,
    pub bq: BoundQuiver,
    pub vertices: Vec<SepVertex>,
    pub index: HashMap<SepVertex, usize>,
    /// Both hammocks of the vertex fit in the window.
    pub interior: Vec<bool>,
    /// τ̄ as a partial map on window indices.
    pub tau: Vec<Option<usize>>,
}

impl SepWindow {
    pub fn vertex(&self, v: SepVertex) -> Option<usize> {
        self.index.get(&v).copied()
    }
}

fn window_vertices(st: &Stable, n0: i64, n1: i64) -> Vec<SepVertex> {
    let n = st.num_vertices();
    (n0..=n1).flat_map(|lv| (0..n).map(move |b| SepVertex::new(b, lv))).collect()
}

/// Lift of a base path starting at level `n`.
pub fn lift_path(q: &Quiver, wq: &Quiver, p: &Path, n: i64) -> Option<Path> {
    let src = wq.vertex(&sep_id(q.vertex_id(p.source), n))?;
    let tgt = wq.vertex(&sep_id(q.vertex_id(p.target), n + p.len() as i64))?;
    let arrows: Option<Vec<usize>> = p
        .arrows
        .iter()
        .enumerate()
        .map(|(k, &a)| wq.arrow_by_id(&sep_id(&q.arrow(a).id, n + k as i64)))
        .collect();
    Some(Path { source: src, target: tgt, arrows: arrows? })
}

pub fn separated_window(st: &Stable, n0: i64, n1: i64) -> SepWindow {
    let q = &st.bq.quiver;
    let vertices = window_vertices(st, n0, n1);
    let mut wq = Quiver::empty();
    let mut index = HashMap::new();
    for (k, v) in vertices.iter().enumerate() {
        wq.add_vertex(&v.id(q)).unwrap();
        index.insert(*v, k);
    }
    for lv in n0..n1 {
        for a in q.arrows() {
            let s = index[&SepVertex::new(a.source, lv)];
            let t = index[&SepVertex::new(a.target, lv + 1)];
            wq.add_arrow(&sep_id(&a.id, lv), s, t).unwrap();
        }
    }
    let mut relations = Vec::new();
    for lv in n0..=n1 {
        for r in &st.bq.relations {
            let Some(d) = r.degree() else { continue };
            if lv + d as i64 > n1 {
                continue;
            }
            let terms = r
                .terms
                .iter()
                .map(|(c, p)| (c.clone(), lift_path(q, &wq, p, lv).expect("fits in window")))
                .collect();
            relations.push(LinComb::new(terms));
        }
    }
    let l = st.l as i64;
    let interior = vertices.iter().map(|v| v.level - l >= n0 && v.level + l <= n1).collect();
    let tau = vertices.iter().map(|v| index.get(&tau_bar(st, *v)).copied()).collect();
    SepWindow { n0, n1, bq: BoundQuiver::new(wq, relations), vertices, index, interior, tau }
}

/// Smash product Λ#kZ* restricted to levels [n0, n1]: basis x[n] for basis
/// paths x of Λ with n0 ≤ n and n + deg x ≤ n1; x[m]·y[n] = (xy)[n] when
/// m = n + deg y, else 0. Vertex order matches `separated_window`.
pub fn smash_window(st: &Stable, n0: i64, n1: i64) -> StructAlgebra {
    let q = &st.bq.quiver;
    let vertices = window_vertices(st, n0, n1);
    let index: HashMap<SepVertex, usize> = vertices.iter().enumerate().map(|(k, v)| (*v, k)).collect();
    let mut alg = StructAlgebra::with_vertices(vertices.iter().map(|v| v.id(q)).collect());
    // (base path arrows, level) -> element
    let mut elem_of: HashMap<(Vec<usize>, i64), usize> = HashMap::new();
    let mut lifted: Vec<(Path, i64)> = Vec::new();
    for t in 1..=st.l {
        let mut ps: Vec<Path> = st.basis.cells_at(t).flat_map(|(k, _)| st.basis.basis_paths(k.0, k.1, t)).collect();
        ps.sort_by(|x, y| x.arrows.cmp(&y.arrows));
        for lv in n0..=n1 - t as i64 {
            for p in &ps {
                let s = index[&SepVertex::new(p.source, lv)];
                let e = index[&SepVertex::new(p.target, lv + t as i64)];
                let label = lifted_label(q, p, lv);
                let k = alg.push_elem(Elem { label, source: s, target: e, degree: t });
                elem_of.insert((p.arrows.clone(), lv), k);
                lifted.push((p.clone(), lv));
            }
        }
    }
    let base = alg.num_vertices();
    for (bi, (pb, nb)) in lifted.iter().enumerate() {
        for (ai, (pa, na)) in lifted.iter().enumerate() {
            if *na != nb + pb.len() as i64 || pa.source != pb.target {
                continue;
            }
            let deg = pa.len() + pb.len();
            if deg > st.l || nb + deg as i64 > n1 {
                continue;
            }
            let mut arrows = pb.arrows.clone();
            arrows.extend_from_slice(&pa.arrows);
            let prod = Path { source: pb.source, target: pa.target, arrows };
            let nf = st.basis.normal_form(&prod).expect("within top degree");
            if nf.is_empty() {
                continue;
            }
            let cell_basis = st.basis.basis_paths(prod.source, prod.target, deg);
            let v: Vec<(usize, Scalar)> =
                nf.into_iter().map(|(k, c)| (elem_of[&(cell_basis[k].arrows.clone(), *nb)], c)).collect();
            alg.set_product(base + ai, base + bi, v);
        }
    }
    alg
}

/// Right-to-left name of a lifted path, e.g. "(b,1)·(a,0)".
pub fn lifted_label(q: &Quiver, p: &Path, n: i64) -> String {
    p.arrows
        .iter()
        .enumerate()
        .rev()
        .map(|(k, &a)| sep_id(&q.arrow(a).id, n + k as i64))
        .collect::<Vec<_>>()
        .join("·")
}

/// Component structure of the separated quiver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    /// Number of components; 0 means infinitely many (Q has no cycle).
    pub d: usize,
    /// Potential of each base vertex: forward arrows add 1.
    pub potential: Vec<i64>,
}

impl Components {
    pub fn label(&self, v: SepVertex) -> i64 {
        let x = v.level - self.potential[v.base];
        if self.d == 0 {
            x
        } else {
            x.rem_euclid(self.d as i64)
        }
    }
}

pub fn components(bq: &BoundQuiver) -> Result<Components, SepError> {
    let q = &bq.quiver;
    let n = q.num_vertices();
    if n == 0 || q.undirected_components().len() != 1 {
        return Err(SepError::DisconnectedInput);
    }
    let mut pot: Vec<Option<i64>> = vec![None; n];
    pot[0] = Some(0);
    let mut stack = vec![0];
    let mut g: i64 = 0;
    while let Some(v) = stack.pop() {
        let pv = pot[v].unwrap();
        for &a in q.out_arrows(v) {
            let w = q.arrow(a).target;
            match pot[w] {
                None => {
                    pot[w] = Some(pv + 1);
                    stack.push(w);
                }
                Some(pw) => g = g.gcd(&(pv + 1 - pw)),
            }
        }
        for &a in q.in_arrows(v) {
            let w = q.arrow(a).source;
            match pot[w] {
                None => {
                    pot[w] = Some(pv - 1);
                    stack.push(w);
                }
                Some(pw) => g = g.gcd(&(pw + 1 - pv)),
            }
        }
    }
    Ok(Components { d: g as usize, potential: pot.into_iter().map(Option::unwrap).collect() })
}

/// A special truncation and where its components are rooted.
#[derive(Debug, Clone)]
pub struct Truncation {
    pub bq: BoundQuiver,
    pub vertices: Vec<SepVertex>,
    /// Base vertices i_1 -> ... -> i_d of the lexicographically least path of
    /// length d-1; the (i_k, 0) lie in distinct components.
    pub roots: Vec<usize>,
}

impl Truncation {
    pub fn metadata(&self, q: &Quiver) -> serde_json::Value {
        serde_json::json!({
            "component_roots": self.roots.iter().map(|&i| q.vertex_id(i)).collect::<Vec<_>>(),
            "choice": "lexicographically least path of length d-1",
        })
    }
}

/// Lexicographically least path of length `len` (arrow index order).
pub fn least_path(q: &Quiver, len: usize) -> Vec<usize> {
    if len == 0 || q.num_arrows() == 0 {
        return vec![0];
    }
    let mut v = q.arrow(0).source;
    let mut out = vec![v];
    for _ in 0..len {
        let Some(&a) = q.out_arrows(v).iter().min() else { break };
        v = q.arrow(a).target;
        out.push(v);
    }
    out
}

/// Levels 0..=l-1 of the separated quiver with induced relations; with `i0`,
/// only the connected component containing (i0, 0).
pub fn special_truncation(st: &Stable, i0: Option<usize>) -> Result<Truncation, SepError> {
    let comps = components(&st.bq)?;
    let l = st.l as i64;
    let w = separated_window(st, 0, l - 1);
    let basis = GradedBasis::new(&w.bq, st.l + 1)?;
    let keep: Vec<usize> = match i0 {
        None => (0..w.vertices.len()).collect(),
        Some(i) => {
            let root = w.vertex(SepVertex::new(i, 0)).expect("level 0 present");
            w.bq.quiver.undirected_components().into_iter().find(|c| c.contains(&root)).unwrap()
        }
    };
    let bq = induced_subquiver(&w.bq, &basis, &keep)?;
    let roots = least_path(&st.bq.quiver, comps.d.saturating_sub(1));
    Ok(Truncation { bq, vertices: keep.iter().map(|&k| w.vertices[k]).collect(), roots })
}

/// Connected components of a window's quiver by BFS (oracle for labels).
pub fn window_component_count(w: &SepWindow) -> usize {
    w.bq.quiver.undirected_components().len()
}

/// Vertices of a component-labelled window, grouped by label.
pub fn group_by_label(comps: &Components, vs: &[SepVertex]) -> Vec<BTreeSet<SepVertex>> {
    let mut m: std::collections::BTreeMap<i64, BTreeSet<SepVertex>> = Default::default();
    for v in vs {
        m.entry(comps.label(*v)).or_default().insert(*v);
    }
    m.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::mckay::{mckay_bound_quiver, Flavor};
    use crate::stability::check_stable;
    use crate::structalg::struct_from_bound;

    fn st(bq: &BoundQuiver) -> Stable {
        check_stable(bq, None).unwrap()
    }

    #[test]
    fn loop_window_is_linear() {
        let s = st(&corpus::loop_quiver(2));
        let w = separated_window(&s, 0, 3);
        assert_eq!(w.bq.quiver.num_vertices(), 4);
        assert_eq!(w.bq.quiver.num_arrows(), 3);
        assert_eq!(w.bq.relations.len(), 1);
        assert!(w.bq.relations.iter().all(|r| r.degree() == Some(3)));
        assert!(w.bq.quiver.is_acyclic());
    }

    #[test]
    fn zigzag_window_component() {
        let s = st(&corpus::zigzag(5));
        let w = separated_window(&s, 0, 1);
        let q = &w.bq.quiver;
        let root = w.vertex(SepVertex::new(0, 0)).unwrap();
        let comp = q.undirected_components().into_iter().find(|c| c.contains(&root)).unwrap();
        let ids: BTreeSet<&str> = comp.iter().map(|&k| q.vertex_id(k)).collect();
        assert_eq!(ids, BTreeSet::from(["(1,0)", "(2,1)", "(3,0)", "(4,1)", "(5,0)"]));
    }

    #[test]
    fn mckay_window_relations_count() {
        let bq = mckay_bound_quiver(2, 1, Flavor::Exterior);
        let s = st(&bq);
        let w = separated_window(&s, 0, 3);
        assert_eq!(w.bq.quiver.num_vertices(), 16);
        // oracle: every relation has length 2 and instantiates at levels 0 and 1
        assert_eq!(w.bq.relations.len(), 2 * bq.relations.len());
    }

    #[test]
    fn smash_products_respect_levels() {
        let s = st(&corpus::zigzag(5));
        let a = smash_window(&s, 0, 2);
        a.check().unwrap();
        for (&(x, y), _) in &a.table() {
            let (ex, ey) = (&a.elems[x], &a.elems[y]);
            assert_eq!(ex.source, ey.target);
        }
        for k in 0..a.num_vertices() {
            assert_eq!(a.mul_basis(k, k), vec![(k, num_traits::One::one())]);
        }
    }

    #[test]
    fn smash_table_equals_window_table() {
        let s = st(&corpus::zigzag(5));
        let smash = smash_window(&s, 0, 2);
        let w = separated_window(&s, 0, 2);
        let (sep, _) = struct_from_bound(&w.bq, 4).unwrap();
        assert_eq!(smash.elems.len(), sep.elems.len());
        let labels: Vec<&str> = smash.elems.iter().map(|e| e.label.as_str()).collect();
        let other: Vec<&str> = sep.elems.iter().map(|e| e.label.as_str()).collect();
        let mut l1 = labels.clone();
        let mut l2 = other.clone();
        l1.sort();
        l2.sort();
        assert_eq!(l1, l2);
    }

    #[test]
    fn component_counts() {
        assert_eq!(components(&corpus::loop_quiver(2)).unwrap().d, 1);
        assert_eq!(components(&corpus::zigzag(5)).unwrap().d, 2);
        let cyc = mckay_bound_quiver(1, 2, Flavor::Exterior);
        let c = components(&cyc).unwrap();
        assert_eq!(c.d, 3);
        // BFS oracle on window [0, 9]
        let s = st(&cyc);
        let w = separated_window(&s, 0, 9);
        assert_eq!(window_component_count(&w), 3);
        for comp in w.bq.quiver.undirected_components() {
            let labels: BTreeSet<i64> = comp.iter().map(|&k| c.label(w.vertices[k])).collect();
            assert_eq!(labels.len(), 1);
        }
    }

    #[test]
    fn disconnected_input() {
        let q = Quiver::new(&["a", "b"], &[] as &[(&str, &str, &str)]).unwrap();
        assert_eq!(components(&BoundQuiver::free(q)), Err(SepError::DisconnectedInput));
    }

    #[test]
    fn truncations() {
        let s = st(&corpus::loop_quiver(3));
        let t = special_truncation(&s, None).unwrap();
        assert_eq!(t.bq.quiver.num_vertices(), 3);
        assert_eq!(t.bq.quiver.num_arrows(), 2);
        assert!(t.bq.relations.is_empty());

        let s = st(&corpus::zigzag(5));
        let t = special_truncation(&s, Some(0)).unwrap();
        let ids: BTreeSet<&str> = (0..5).map(|k| t.bq.quiver.vertex_id(k)).collect();
        assert_eq!(ids, BTreeSet::from(["(1,0)", "(2,1)", "(3,0)", "(4,1)", "(5,0)"]));
        assert!(t.bq.relations.is_empty());
        assert_eq!(t.roots.len(), 2);

        let cyc = corpus::cyclic_nakayama(3, 1);
        let s = st(&cyc);
        let t = special_truncation(&s, None).unwrap();
        assert_eq!(t.bq.quiver.num_vertices(), 3);
        assert_eq!(t.bq.quiver.num_arrows(), 0);
    }
}
