//! Quivers, paths, relations, validation, path enumeration, induced
//! subquivers and serialization.
//!
//! Paths are stored in traversal order (first arrow first). Printed notation
//! is right-to-left, so the traversal `[a, b]` prints as `b·a`. Arrows are
//! ordered by their declaration index, and every "lexicographic" order on
//! paths below refers to that index.

use crate::linalg::{format_scalar, parse_scalar, Echelon, Scalar, SparseVec};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use thiserror::Error;

pub const DEFAULT_PATH_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuiverError {
    #[error("path enumeration exceeded cap {cap}")]
    CapExceeded { cap: usize },
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("unknown arrow {0:?}")]
    UnknownArrow(String),
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("invalid bound quiver: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("malformed JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub id: String,
    pub source: usize,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quiver {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
    vertex_index: HashMap<String, usize>,
    arrow_index: HashMap<String, usize>,
    out_arrows: Vec<Vec<usize>>,
    in_arrows: Vec<Vec<usize>>,
}

impl Quiver {
    /// Builds a quiver from vertex ids and `(arrow id, from, to)` triples.
    pub fn new<S: AsRef<str>>(vertices: &[S], arrows: &[(S, S, S)]) -> Result<Self, QuiverError> {
        let mut q = Quiver::empty();
        for v in vertices {
            q.add_vertex(v.as_ref())?;
        }
        for (id, from, to) in arrows {
            let s = q.vertex(from.as_ref()).ok_or_else(|| QuiverError::UnknownVertex(from.as_ref().into()))?;
            let t = q.vertex(to.as_ref()).ok_or_else(|| QuiverError::UnknownVertex(to.as_ref().into()))?;
            q.add_arrow(id.as_ref(), s, t)?;
        }
        Ok(q)
    }

    pub fn empty() -> Self {
        Quiver {
            vertices: Vec::new(),
            arrows: Vec::new(),
            vertex_index: HashMap::new(),
            arrow_index: HashMap::new(),
            out_arrows: Vec::new(),
            in_arrows: Vec::new(),
        }
    }

    pub fn add_vertex(&mut self, id: &str) -> Result<usize, QuiverError> {
        if self.vertex_index.contains_key(id) {
            return Err(QuiverError::DuplicateId(id.into()));
        }
        let k = self.vertices.len();
        self.vertices.push(id.into());
        self.vertex_index.insert(id.into(), k);
        self.out_arrows.push(Vec::new());
        self.in_arrows.push(Vec::new());
        Ok(k)
    }

    pub fn add_arrow(&mut self, id: &str, source: usize, target: usize) -> Result<usize, QuiverError> {
        if self.arrow_index.contains_key(id) {
            return Err(QuiverError::DuplicateId(id.into()));
        }
        assert!(source < self.vertices.len() && target < self.vertices.len());
        let k = self.arrows.len();
        self.arrows.push(Arrow { id: id.into(), source, target });
        self.arrow_index.insert(id.into(), k);
        self.out_arrows[source].push(k);
        self.in_arrows[target].push(k);
        Ok(k)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow(&self, a: usize) -> &Arrow {
        &self.arrows[a]
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex(&self, id: &str) -> Option<usize> {
        self.vertex_index.get(id).copied()
    }

    pub fn arrow_by_id(&self, id: &str) -> Option<usize> {
        self.arrow_index.get(id).copied()
    }

    /// Outgoing arrows of `v` in declaration order.
    pub fn out_arrows(&self, v: usize) -> &[usize] {
        &self.out_arrows[v]
    }

    pub fn in_arrows(&self, v: usize) -> &[usize] {
        &self.in_arrows[v]
    }

    /// `A[i][j]` = number of arrows i -> j.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let n = self.num_vertices();
        let mut a = vec![vec![0; n]; n];
        for ar in &self.arrows {
            a[ar.source][ar.target] += 1;
        }
        a
    }

    pub fn arrows_between(&self, i: usize, j: usize) -> Vec<usize> {
        self.out_arrows[i].iter().copied().filter(|&a| self.arrows[a].target == j).collect()
    }

    pub fn is_multiplicity_free(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.arrows.iter().all(|a| seen.insert((a.source, a.target)))
    }

    pub fn is_acyclic(&self) -> bool {
        let n = self.num_vertices();
        let mut indeg: Vec<usize> = (0..n).map(|v| self.in_arrows[v].len()).collect();
        let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = stack.pop() {
            seen += 1;
            for &a in &self.out_arrows[v] {
                let t = self.arrows[a].target;
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    stack.push(t);
                }
            }
        }
        seen == n
    }

    /// Connected components of the underlying undirected graph, each sorted.
    pub fn undirected_components(&self) -> Vec<Vec<usize>> {
        let n = self.num_vertices();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                let nbrs = self.out_arrows[v]
                    .iter()
                    .map(|&a| self.arrows[a].target)
                    .chain(self.in_arrows[v].iter().map(|&a| self.arrows[a].source));
                for w in nbrs {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        members.push(w);
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn reversed(&self) -> Quiver {
        let arrows: Vec<(String, String, String)> = self
            .arrows
            .iter()
            .map(|a| (a.id.clone(), self.vertices[a.target].clone(), self.vertices[a.source].clone()))
            .collect();
        Quiver::new(&self.vertices, &arrows).expect("reversal of a valid quiver")
    }
}

/// A path in traversal order. Trivial paths carry their base vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub source: usize,
    pub target: usize,
    pub arrows: Vec<usize>,
}

impl Path {
    pub fn trivial(v: usize) -> Self {
        Path { source: v, target: v, arrows: Vec::new() }
    }

    pub fn from_arrows(q: &Quiver, arrows: Vec<usize>) -> Option<Self> {
        let first = *arrows.first()?;
        for w in arrows.windows(2) {
            if q.arrow(w[0]).target != q.arrow(w[1]).source {
                return None;
            }
        }
        let last = *arrows.last().unwrap();
        Some(Path { source: q.arrow(first).source, target: q.arrow(last).target, arrows })
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    /// Right-to-left notation, e.g. `b·a` for "a then b"; `e_v` for trivial paths.
    pub fn display(&self, q: &Quiver) -> String {
        if self.arrows.is_empty() {
            return format!("e_{}", q.vertex_id(self.source));
        }
        self.arrows.iter().rev().map(|&a| q.arrow(a).id.as_str()).collect::<Vec<_>>().join("·")
    }

    /// Vertices visited, source first.
    pub fn vertices(&self, q: &Quiver) -> Vec<usize> {
        let mut out = vec![self.source];
        out.extend(self.arrows.iter().map(|&a| q.arrow(a).target));
        out
    }
}

/// Linear combination of parallel paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinComb {
    pub terms: Vec<(Scalar, Path)>,
}

impl LinComb {
    pub fn new(terms: Vec<(Scalar, Path)>) -> Self {
        LinComb { terms }
    }

    pub fn monomial(p: Path) -> Self {
        LinComb { terms: vec![(Scalar::one(), p)] }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.terms.windows(2).all(|w| w[0].1.len() == w[1].1.len())
    }

    pub fn endpoints(&self) -> Option<(usize, usize)> {
        self.terms.first().map(|(_, p)| (p.source, p.target))
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.first().map(|(_, p)| p.len())
    }

    pub fn display(&self, q: &Quiver) -> String {
        let mut s = String::new();
        for (k, (c, p)) in self.terms.iter().enumerate() {
            let coef = format_scalar(c);
            match (k, coef.as_str()) {
                (0, "1") => {}
                (0, "-1") => s.push('-'),
                (0, _) => write!(s, "{coef} ").unwrap(),
                (_, "1") => s.push_str(" + "),
                (_, "-1") => s.push_str(" - "),
                (_, _) if coef.starts_with('-') => write!(s, " - {} ", &coef[1..]).unwrap(),
                _ => write!(s, " + {coef} ").unwrap(),
            }
            s.push_str(&p.display(q));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundQuiver {
    pub quiver: Quiver,
    pub relations: Vec<LinComb>,
    pub homogeneous: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DanglingEndpoint { arrow: String, vertex: String },
    DuplicateId(String),
    UnknownArrow { relation: usize, arrow: String },
    NotComposable { relation: usize, term: usize },
    EmptyRelation { relation: usize },
    ShortRelation { relation: usize },
    NonParallelTerms { relation: usize },
    InhomogeneousRelation { relation: usize },
    ZeroCoefficient { relation: usize, term: usize },
    BadCoefficient { relation: usize, term: usize, text: String },
    RepeatedPath { relation: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::DanglingEndpoint { arrow, vertex } => {
                write!(f, "dangling endpoint: arrow {arrow} uses undeclared vertex {vertex}")
            }
            Violation::DuplicateId(id) => write!(f, "duplicate id {id}"),
            Violation::UnknownArrow { relation, arrow } => write!(f, "relation {relation}: unknown arrow {arrow}"),
            Violation::NotComposable { relation, term } => {
                write!(f, "relation {relation}, term {term}: arrows not composable")
            }
            Violation::EmptyRelation { relation } => write!(f, "relation {relation}: no terms"),
            Violation::ShortRelation { relation } => write!(f, "relation {relation}: relation length < 2"),
            Violation::NonParallelTerms { relation } => write!(f, "relation {relation}: non-parallel terms"),
            Violation::InhomogeneousRelation { relation } => {
                write!(f, "relation {relation}: inhomogeneous relation under homogeneous flag")
            }
            Violation::ZeroCoefficient { relation, term } => write!(f, "relation {relation}, term {term}: zero coefficient"),
            Violation::BadCoefficient { relation, term, text } => {
                write!(f, "relation {relation}, term {term}: bad coefficient {text:?}")
            }
            Violation::RepeatedPath { relation } => write!(f, "relation {relation}: repeated path"),
        }
    }
}

impl BoundQuiver {
    pub fn new(quiver: Quiver, relations: Vec<LinComb>) -> Self {
        let homogeneous = relations.iter().all(LinComb::is_homogeneous);
        BoundQuiver { quiver, relations, homogeneous }
    }

    pub fn free(quiver: Quiver) -> Self {
        BoundQuiver { quiver, relations: Vec::new(), homogeneous: true }
    }

    /// Relation-level invariants; an empty list means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (r, rel) in self.relations.iter().enumerate() {
            check_relation(&self.quiver, r, rel, self.homogeneous, &mut out);
        }
        out
    }

    pub fn max_relation_length(&self) -> usize {
        self.relations.iter().flat_map(|r| r.terms.iter().map(|(_, p)| p.len())).max().unwrap_or(0)
    }

    /// Relations with every term passing through a vertex outside `keep`
    /// deleted, restated on the full subquiver on `keep` (the presentation of
    /// the quotient by the idempotents outside `keep`).
    pub fn quotient_truncation(&self, keep: &[usize]) -> BoundQuiver {
        let (sub, vmap, amap) = full_subquiver(&self.quiver, keep);
        let mut rels = Vec::new();
        for rel in &self.relations {
            let terms: Vec<(Scalar, Path)> = rel
                .terms
                .iter()
                .filter_map(|(c, p)| {
                    let arrows: Option<Vec<usize>> = p.arrows.iter().map(|a| amap[*a]).collect();
                    let arrows = arrows?;
                    Some((c.clone(), Path { source: vmap[p.source]?, target: vmap[p.target]?, arrows }))
                })
                .collect();
            if !terms.is_empty() {
                rels.push(LinComb::new(terms));
            }
        }
        BoundQuiver { quiver: sub, relations: rels, homogeneous: self.homogeneous }
    }
}

fn check_relation(q: &Quiver, r: usize, rel: &LinComb, homogeneous: bool, out: &mut Vec<Violation>) {
    if rel.terms.is_empty() {
        out.push(Violation::EmptyRelation { relation: r });
        return;
    }
    for (t, (c, p)) in rel.terms.iter().enumerate() {
        if c.is_zero() {
            out.push(Violation::ZeroCoefficient { relation: r, term: t });
        }
        if Path::from_arrows(q, p.arrows.clone()).as_ref() != Some(p) && !p.arrows.is_empty() {
            out.push(Violation::NotComposable { relation: r, term: t });
        }
    }
    if rel.terms.iter().any(|(_, p)| p.len() < 2) {
        out.push(Violation::ShortRelation { relation: r });
    }
    let (s, t) = (rel.terms[0].1.source, rel.terms[0].1.target);
    if rel.terms.iter().any(|(_, p)| p.source != s || p.target != t) {
        out.push(Violation::NonParallelTerms { relation: r });
    }
    if homogeneous && !rel.is_homogeneous() {
        out.push(Violation::InhomogeneousRelation { relation: r });
    }
    let distinct: BTreeSet<&Vec<usize>> = rel.terms.iter().map(|(_, p)| &p.arrows).collect();
    if distinct.len() != rel.terms.len() {
        out.push(Violation::RepeatedPath { relation: r });
    }
}

/// Full subquiver on `keep` (kept in the given order) with index maps from
/// the ambient vertices and arrows.
pub fn full_subquiver(q: &Quiver, keep: &[usize]) -> (Quiver, Vec<Option<usize>>, Vec<Option<usize>>) {
    let mut vmap = vec![None; q.num_vertices()];
    let mut sub = Quiver::empty();
    for &v in keep {
        vmap[v] = Some(sub.add_vertex(q.vertex_id(v)).expect("distinct vertices"));
    }
    let mut amap = vec![None; q.num_arrows()];
    for (k, a) in q.arrows().iter().enumerate() {
        if let (Some(s), Some(t)) = (vmap[a.source], vmap[a.target]) {
            amap[k] = Some(sub.add_arrow(&a.id, s, t).expect("distinct arrows"));
        }
    }
    (sub, vmap, amap)
}

/// All paths of length `t` from `i` to `j`, lexicographic in arrow index.
pub fn enumerate_paths(q: &Quiver, i: usize, j: usize, t: usize, cap: usize) -> Result<Vec<Path>, QuiverError> {
    if t == 0 {
        return Ok(if i == j { vec![Path::trivial(i)] } else { Vec::new() });
    }
    let mut out = Vec::new();
    let mut stack: Vec<usize> = Vec::with_capacity(t);
    fn go(
        q: &Quiver,
        v: usize,
        j: usize,
        t: usize,
        cap: usize,
        stack: &mut Vec<usize>,
        out: &mut Vec<Path>,
        root: usize,
    ) -> Result<(), QuiverError> {
        if stack.len() == t {
            if v == j {
                if out.len() == cap {
                    return Err(QuiverError::CapExceeded { cap });
                }
                out.push(Path { source: root, target: j, arrows: stack.clone() });
            }
            return Ok(());
        }
        for &a in q.out_arrows(v) {
            stack.push(a);
            go(q, q.arrow(a).target, j, t, cap, stack, out, root)?;
            stack.pop();
        }
        Ok(())
    }
    go(q, i, j, t, cap, &mut stack, &mut out, i)?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Induced subquivers

/// Full subquiver on `keep` whose relations generate, degreewise, the kernel
/// of evaluating `keep`-internal paths in the ambient algebra `basis`.
///
/// Relations are minimized per degree: among the reduced echelon rows of the
/// degree-`t` kernel, pivot rows not already generated by lower-degree
/// relations are kept. Degrees run from 2 up to the basis bound.
pub fn induced_subquiver(
    bq: &BoundQuiver,
    basis: &crate::graded::GradedBasis,
    keep: &[usize],
) -> Result<BoundQuiver, crate::graded::GradedError> {
    let (sub, vmap, amap) = full_subquiver(&bq.quiver, keep);
    let mut back_arrow = vec![0; sub.num_arrows()];
    for (k, m) in amap.iter().enumerate() {
        if let Some(m) = m {
            back_arrow[*m] = k;
        }
    }
    let _ = vmap;
    let eval = |p: &Path| -> Result<SparseVec, crate::graded::GradedError> {
        let ambient: Vec<usize> = p.arrows.iter().map(|&a| back_arrow[a]).collect();
        let ap = Path { source: keep[p.source], target: keep[p.target], arrows: ambient };
        basis.normal_form(&ap)
    };
    let top = match basis.vanishing_degree() {
        Some(z) => z.min(basis.bound()),
        None => basis.bound(),
    };
    let relations = kernel_relations(&sub, top, eval)?;
    Ok(BoundQuiver::new(sub, relations))
}

/// Minimal degreewise generators (degrees 2..=top) of the kernel of a path
/// evaluation map. Shared by induced subquivers and presentations.
pub(crate) fn kernel_relations<E, F>(q: &Quiver, top: usize, mut eval: F) -> Result<Vec<LinComb>, E>
where
    F: FnMut(&Path) -> Result<SparseVec, E>,
{
    let n = q.num_vertices();
    // paths[i][j] for the current degree, kernel rows keyed by (i, j).
    let mut prev_paths: Vec<Vec<Vec<Vec<usize>>>> = vec![vec![Vec::new(); n]; n];
    for (k, a) in q.arrows().iter().enumerate() {
        prev_paths[a.source][a.target].push(vec![k]);
    }
    let mut prev_kernel: HashMap<(usize, usize), Vec<SparseVec>> = HashMap::new();
    let mut relations = Vec::new();
    for _ in 2..=top {
        let mut paths: Vec<Vec<Vec<Vec<usize>>>> = vec![vec![Vec::new(); n]; n];
        for (i, row) in prev_paths.iter().enumerate() {
            for (k, ps) in row.iter().enumerate() {
                for p in ps {
                    for &a in q.out_arrows(k) {
                        let mut np = p.clone();
                        np.push(a);
                        paths[i][q.arrow(a).target].push(np);
                    }
                }
            }
        }
        let mut kernel: HashMap<(usize, usize), Vec<SparseVec>> = HashMap::new();
        for i in 0..n {
            for j in 0..n {
                let ps = &mut paths[i][j];
                if ps.is_empty() {
                    continue;
                }
                ps.sort();
                let index: HashMap<&Vec<usize>, usize> = ps.iter().enumerate().map(|(k, p)| (p, k)).collect();
                let mut images = Vec::with_capacity(ps.len());
                for p in ps.iter() {
                    images.push(eval(&Path { source: i, target: j, arrows: p.clone() })?);
                }
                let ker = crate::linalg::kernel_of_images(&images);
                if ker.is_empty() {
                    continue;
                }
                // Part generated by kernels one degree down.
                let mut generated = Echelon::new();
                for (&(s, m), rows) in &prev_kernel {
                    if s == i {
                        // extend on the right (later in traversal): p then arrow m -> j
                        for &a in q.out_arrows(m) {
                            if q.arrow(a).target != j {
                                continue;
                            }
                            for row in rows {
                                generated.insert(extend_row(row, &prev_paths[s][m], &index, |p| {
                                    let mut np = p.clone();
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
                            for row in rows {
                                generated.insert(extend_row(row, &prev_paths[s][m], &index, |p| {
                                    let mut np = vec![a];
                                    np.extend_from_slice(p);
                                    np
                                }));
                            }
                        }
                    }
                }
                for row in &ker {
                    if generated.insert(row.clone()) {
                        relations.push(LinComb::new(
                            row.iter()
                                .map(|(k, c)| (c.clone(), Path { source: i, target: j, arrows: ps[*k].clone() }))
                                .collect(),
                        ));
                    }
                }
                kernel.insert((i, j), ker);
            }
        }
        for row in paths.iter_mut() {
            for ps in row.iter_mut() {
                ps.sort();
            }
        }
        prev_paths = paths;
        prev_kernel = kernel;
    }
    Ok(relations)
}

fn extend_row(
    row: &SparseVec,
    prev: &[Vec<usize>],
    index: &HashMap<&Vec<usize>, usize>,
    f: impl Fn(&Vec<usize>) -> Vec<usize>,
) -> SparseVec {
    let mut acc = BTreeMap::new();
    for (k, c) in row {
        let np = f(&prev[*k]);
        acc.insert(index[&np], c.clone());
    }
    acc.into_iter().collect()
}

// ---------------------------------------------------------------------------
// Serialization

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawArrow {
    pub id: String,
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawTerm {
    pub coef: String,
    pub path: Vec<String>,
}

/// JSON shape of a bound quiver, before validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawBoundQuiver {
    pub vertices: Vec<String>,
    pub arrows: Vec<RawArrow>,
    #[serde(default)]
    pub relations: Vec<Vec<RawTerm>>,
}

/// Every violated invariant of a raw description.
pub fn validate_raw(raw: &RawBoundQuiver) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut vs = BTreeSet::new();
    for v in &raw.vertices {
        if !vs.insert(v.as_str()) {
            out.push(Violation::DuplicateId(v.clone()));
        }
    }
    let mut arrows: HashMap<&str, (&str, &str)> = HashMap::new();
    for a in &raw.arrows {
        if arrows.insert(a.id.as_str(), (a.from.as_str(), a.to.as_str())).is_some() {
            out.push(Violation::DuplicateId(a.id.clone()));
        }
        for end in [&a.from, &a.to] {
            if !vs.contains(end.as_str()) {
                out.push(Violation::DanglingEndpoint { arrow: a.id.clone(), vertex: end.clone() });
            }
        }
    }
    for (r, rel) in raw.relations.iter().enumerate() {
        if rel.is_empty() {
            out.push(Violation::EmptyRelation { relation: r });
            continue;
        }
        let mut ends = Vec::new();
        let mut ok = true;
        for (t, term) in rel.iter().enumerate() {
            match parse_scalar(&term.coef) {
                None => out.push(Violation::BadCoefficient { relation: r, term: t, text: term.coef.clone() }),
                Some(c) if c.is_zero() => out.push(Violation::ZeroCoefficient { relation: r, term: t }),
                _ => {}
            }
            let mut hops = Vec::new();
            for id in &term.path {
                match arrows.get(id.as_str()) {
                    Some(&e) => hops.push(e),
                    None => {
                        out.push(Violation::UnknownArrow { relation: r, arrow: id.clone() });
                        ok = false;
                    }
                }
            }
            if hops.windows(2).any(|w| w[0].1 != w[1].0) {
                out.push(Violation::NotComposable { relation: r, term: t });
                ok = false;
            }
            if let (Some(f), Some(l)) = (hops.first(), hops.last()) {
                ends.push((f.0, l.1, term.path.len()));
            }
        }
        if rel.iter().any(|t| t.path.len() < 2) {
            out.push(Violation::ShortRelation { relation: r });
        }
        if ok && ends.windows(2).any(|w| (w[0].0, w[0].1) != (w[1].0, w[1].1)) {
            out.push(Violation::NonParallelTerms { relation: r });
        }
        if ends.windows(2).any(|w| w[0].2 != w[1].2) {
            out.push(Violation::InhomogeneousRelation { relation: r });
        }
        let distinct: BTreeSet<&Vec<String>> = rel.iter().map(|t| &t.path).collect();
        if distinct.len() != rel.len() {
            out.push(Violation::RepeatedPath { relation: r });
        }
    }
    out
}

impl BoundQuiver {
    pub fn from_raw(raw: &RawBoundQuiver) -> Result<Self, QuiverError> {
        let violations = validate_raw(raw);
        if !violations.is_empty() {
            return Err(QuiverError::Invalid(violations));
        }
        let arrows: Vec<(&str, &str, &str)> =
            raw.arrows.iter().map(|a| (a.id.as_str(), a.from.as_str(), a.to.as_str())).collect();
        let verts: Vec<&str> = raw.vertices.iter().map(String::as_str).collect();
        let q = Quiver::new(&verts, &arrows)?;
        let mut rels = Vec::new();
        for rel in &raw.relations {
            let mut terms = Vec::new();
            for term in rel {
                let ids: Vec<usize> = term.path.iter().map(|id| q.arrow_by_id(id).unwrap()).collect();
                let p = Path::from_arrows(&q, ids).unwrap();
                terms.push((parse_scalar(&term.coef).unwrap(), p));
            }
            rels.push(LinComb::new(terms));
        }
        Ok(BoundQuiver::new(q, rels))
    }

    pub fn to_raw(&self) -> RawBoundQuiver {
        let q = &self.quiver;
        RawBoundQuiver {
            vertices: q.vertices().to_vec(),
            arrows: q
                .arrows()
                .iter()
                .map(|a| RawArrow {
                    id: a.id.clone(),
                    from: q.vertex_id(a.source).into(),
                    to: q.vertex_id(a.target).into(),
                })
                .collect(),
            relations: self
                .relations
                .iter()
                .map(|r| {
                    r.terms
                        .iter()
                        .map(|(c, p)| RawTerm {
                            coef: format_scalar(c),
                            path: p.arrows.iter().map(|&a| q.arrow(a).id.clone()).collect(),
                        })
                        .collect()
                })
                .collect(),
        }
    }

    /// Canonical JSON: sorted keys, lowest-terms coefficients, trailing newline.
    pub fn serialize(&self) -> String {
        let v = serde_json::to_value(self.to_raw()).expect("plain data");
        let mut s = serde_json::to_string_pretty(&v).expect("plain data");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Self, QuiverError> {
        let raw: RawBoundQuiver = serde_json::from_str(text).map_err(|e| QuiverError::Json(e.to_string()))?;
        Self::from_raw(&raw)
    }

    /// Graphviz text; relations become comment lines.
    pub fn dot_export(&self) -> String {
        let q = &self.quiver;
        let mut s = String::from("digraph Q {\n  rankdir=LR;\n");
        for rel in &self.relations {
            writeln!(s, "  // relation: {}", rel.display(q)).unwrap();
        }
        for v in q.vertices() {
            writeln!(s, "  {};", dot_quote(v)).unwrap();
        }
        for a in q.arrows() {
            writeln!(
                s,
                "  {} -> {} [label={}];",
                dot_quote(q.vertex_id(a.source)),
                dot_quote(q.vertex_id(a.target)),
                dot_quote(&a.id)
            )
            .unwrap();
        }
        s.push_str("}\n");
        s
    }
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::linalg::int;
    use proptest::prelude::*;

    fn raw(vertices: &[&str], arrows: &[(&str, &str, &str)], rels: Vec<Vec<(&str, Vec<&str>)>>) -> RawBoundQuiver {
        RawBoundQuiver {
            vertices: vertices.iter().map(|s| s.to_string()).collect(),
            arrows: arrows
                .iter()
                .map(|(i, f, t)| RawArrow { id: i.to_string(), from: f.to_string(), to: t.to_string() })
                .collect(),
            relations: rels
                .into_iter()
                .map(|r| {
                    r.into_iter()
                        .map(|(c, p)| RawTerm { coef: c.into(), path: p.into_iter().map(String::from).collect() })
                        .collect()
                })
                .collect(),
        }
    }

    #[test]
    fn validate_examples() {
        let ok = raw(&["v"], &[("a", "v", "v")], vec![vec![("1", vec!["a", "a"])]]);
        assert!(validate_raw(&ok).is_empty());
        let short = raw(&["v"], &[("a", "v", "v")], vec![vec![("1", vec!["a"])]]);
        assert_eq!(validate_raw(&short), vec![Violation::ShortRelation { relation: 0 }]);
        assert!(Violation::ShortRelation { relation: 0 }.to_string().contains("relation length < 2"));
        let nonpar = raw(
            &["v", "w", "u", "x"],
            &[("a", "v", "x"), ("b", "x", "w"), ("c", "x", "u")],
            vec![vec![("1", vec!["a", "b"]), ("1", vec!["a", "c"])]],
        );
        assert_eq!(validate_raw(&nonpar), vec![Violation::NonParallelTerms { relation: 0 }]);
        assert!(Violation::NonParallelTerms { relation: 0 }.to_string().contains("non-parallel terms"));
        let dangling = raw(&["v"], &[("a", "v", "w")], vec![]);
        assert!(matches!(validate_raw(&dangling)[0], Violation::DanglingEndpoint { .. }));
        let inhom = raw(&["v"], &[("a", "v", "v")], vec![vec![("1", vec!["a", "a"]), ("1", vec!["a", "a", "a"])]]);
        assert!(validate_raw(&inhom).contains(&Violation::InhomogeneousRelation { relation: 0 }));
    }

    #[test]
    fn path_enumeration_examples() {
        let lp = corpus::loop_quiver(2);
        assert_eq!(enumerate_paths(&lp.quiver, 0, 0, 3, DEFAULT_PATH_CAP).unwrap().len(), 1);
        let z = corpus::zigzag(5);
        let v1 = z.quiver.vertex("1").unwrap();
        let ps = enumerate_paths(&z.quiver, v1, v1, 2, DEFAULT_PATH_CAP).unwrap();
        assert_eq!(ps.len(), 1);
        let mk = crate::mckay::mckay_bound_quiver(2, 2, crate::mckay::Flavor::Exterior);
        let s = mk.quiver.vertex("(0,0)").unwrap();
        let t = mk.quiver.vertex("(1,1)").unwrap();
        assert_eq!(enumerate_paths(&mk.quiver, s, t, 2, DEFAULT_PATH_CAP).unwrap().len(), 2);
        assert_eq!(enumerate_paths(&z.quiver, v1, v1, 40, 10), Err(QuiverError::CapExceeded { cap: 10 }));
    }

    #[test]
    fn trivial_paths() {
        let z = corpus::zigzag(3);
        assert_eq!(enumerate_paths(&z.quiver, 0, 0, 0, 5).unwrap(), vec![Path::trivial(0)]);
        assert!(enumerate_paths(&z.quiver, 0, 1, 0, 5).unwrap().is_empty());
    }

    #[test]
    fn loop_serialization_is_canonical() {
        let lp = corpus::loop_quiver(1);
        let text = lp.serialize();
        let expected = "{\n  \"arrows\": [\n    {\n      \"from\": \"v\",\n      \"id\": \"x\",\n      \"to\": \"v\"\n    }\n  ],\n  \"relations\": [\n    [\n      {\n        \"coef\": \"1\",\n        \"path\": [\n          \"x\",\n          \"x\"\n        ]\n      }\n    ]\n  ],\n  \"vertices\": [\n    \"v\"\n  ]\n}\n";
        assert_eq!(text, expected);
        assert_eq!(BoundQuiver::parse(&text).unwrap(), lp);
    }

    #[test]
    fn dot_has_relation_comments() {
        let z = corpus::zigzag(3);
        let dot = z.dot_export();
        assert!(dot.lines().filter(|l| l.trim_start().starts_with("// relation:")).count() == z.relations.len());
    }

    #[test]
    fn lincomb_display_is_right_to_left() {
        let q = Quiver::new(&["1", "2", "3"], &[("a", "1", "2"), ("b", "2", "3")]).unwrap();
        let p = Path::from_arrows(&q, vec![0, 1]).unwrap();
        assert_eq!(p.display(&q), "b·a");
        let lc = LinComb::new(vec![(int(-2), p)]);
        assert_eq!(lc.display(&q), "-2 b·a");
    }

    fn battery_indices() -> impl Strategy<Value = usize> {
        0usize..corpus::small_battery().len()
    }

    proptest! {
        #[test]
        fn adjacency_power_counts_paths(k in battery_indices(), t in 0usize..4) {
            let (_, bq) = &corpus::small_battery()[k];
            let q = &bq.quiver;
            let n = q.num_vertices();
            let a = q.adjacency();
            // A^t by repeated multiplication.
            let mut pow: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| usize::from(i == j)).collect()).collect();
            for _ in 0..t {
                pow = (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| pow[i][k] * a[k][j]).sum()).collect()).collect();
            }
            for i in 0..n {
                for j in 0..n {
                    let c = enumerate_paths(q, i, j, t, DEFAULT_PATH_CAP).unwrap().len();
                    prop_assert_eq!(c, pow[i][j]);
                }
            }
        }

        #[test]
        fn serialization_round_trips(k in battery_indices()) {
            let (_, bq) = &corpus::small_battery()[k];
            let text = bq.serialize();
            prop_assert_eq!(&BoundQuiver::parse(&text).unwrap(), bq);
            prop_assert_eq!(BoundQuiver::parse(&text).unwrap().serialize(), text);
        }
    }
}
