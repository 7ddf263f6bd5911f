//! τ-hammocks, complete τ-slices, τ-mutations and slice algebras.
//!
//! Hammocks are read off the graded dimensions of Λ directly:
//! H^{(i,n)} = {(j, n+t) : dim e_j Λ_t e_i > 0}, so they never depend on a
//! finite window and there are no boundary cases to flag.

use crate::graded::{GradedBasis, GradedError};
use crate::quiver::{enumerate_paths, induced_subquiver, BoundQuiver, QuiverError};
use crate::separated::{
    components, parse_sep_id, separated_window, special_truncation, tau_bar, tau_bar_inv, Components, SepError,
    SepVertex,
};
use crate::stability::{check_stable, Stable, StabilityError};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SliceError {
    #[error("illegal mutation: {0} is not a {1} of the slice")]
    IllegalMutation(String, &'static str),
    #[error("reduction exceeded budget {0}")]
    BudgetExceeded(usize),
    #[error("unknown slice vertex {0:?}")]
    UnknownVertex(String),
    #[error(transparent)]
    Stability(#[from] StabilityError),
    #[error(transparent)]
    Separated(#[from] SepError),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
}

/// A stable bound quiver with its certificate and component structure.
#[derive(Debug, Clone)]
pub struct Ambient {
    pub st: Stable,
    pub comps: Components,
}

impl Ambient {
    pub fn new(bq: &BoundQuiver, maxdeg: Option<usize>) -> Result<Self, SliceError> {
        let st = check_stable(bq, maxdeg)?;
        let comps = components(&st.bq)?;
        Ok(Ambient { st, comps })
    }

    pub fn from_stable(st: Stable) -> Result<Self, SliceError> {
        let comps = components(&st.bq)?;
        Ok(Ambient { st, comps })
    }

    pub fn l(&self) -> usize {
        self.st.l
    }

    pub fn id(&self, v: SepVertex) -> String {
        v.id(&self.st.bq.quiver)
    }

    pub fn parse_vertex(&self, s: &str) -> Result<SepVertex, SliceError> {
        parse_sep_id(&self.st.bq.quiver, s).ok_or_else(|| SliceError::UnknownVertex(s.into()))
    }

    /// Key identifying the τ̄-orbit of v: (least vertex of the τ-cycle,
    /// level of the orbit's representative at that vertex mod cycle·l).
    pub fn orbit_key(&self, v: SepVertex) -> (usize, i64) {
        let cycle = self.st.tau_cycle(v.base);
        let k = cycle.iter().position(|&x| x == v.base).unwrap() as i64;
        let l = self.st.l as i64;
        let period = (cycle.len() as i64 * l).max(1);
        (cycle[0], (v.level + k * l).rem_euclid(period))
    }

    /// Orbit keys lying in the component with the given label.
    pub fn component_orbits(&self, label: i64) -> BTreeSet<(usize, i64)> {
        let mut out = BTreeSet::new();
        let l = self.st.l as i64;
        for i in 0..self.st.num_vertices() {
            let cycle = self.st.tau_cycle(i);
            if cycle[0] != i {
                continue;
            }
            let period = (cycle.len() as i64 * l).max(1);
            for lv in 0..period {
                let v = SepVertex::new(i, lv);
                if self.comps.label(v) == label {
                    out.insert(self.orbit_key(v));
                }
            }
        }
        out
    }

    /// Vertices with a bound path from v.
    pub fn hammock_start(&self, v: SepVertex) -> BTreeSet<SepVertex> {
        let st = &self.st;
        let mut out = BTreeSet::new();
        for t in 0..=st.l {
            for j in 0..st.num_vertices() {
                if st.dim(v.base, j, t) > 0 {
                    out.insert(SepVertex::new(j, v.level + t as i64));
                }
            }
        }
        out
    }

    /// Vertices with a bound path to v.
    pub fn hammock_end(&self, v: SepVertex) -> BTreeSet<SepVertex> {
        let st = &self.st;
        let mut out = BTreeSet::new();
        for t in 0..=st.l {
            for j in 0..st.num_vertices() {
                if st.dim(j, v.base, t) > 0 {
                    out.insert(SepVertex::new(j, v.level - t as i64));
                }
            }
        }
        out
    }

    /// Separated-quiver successors of v, one entry per arrow.
    pub fn successors(&self, v: SepVertex) -> Vec<SepVertex> {
        let q = &self.st.bq.quiver;
        q.out_arrows(v.base).iter().map(|&a| SepVertex::new(q.arrow(a).target, v.level + 1)).collect()
    }

    pub fn predecessors(&self, v: SepVertex) -> Vec<SepVertex> {
        let q = &self.st.bq.quiver;
        q.in_arrows(v.base).iter().map(|&a| SepVertex::new(q.arrow(a).source, v.level - 1)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// At a sink: (i, m) -> (τi, m-l).
    Minus,
    /// At a source: (j, m) -> (τ⁻¹j, m+l).
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mutation {
    pub vertex: SepVertex,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TauSlice {
    /// Component label of the separated quiver containing the slice.
    pub component: i64,
    pub vertices: BTreeSet<SepVertex>,
}

impl TauSlice {
    pub fn new(amb: &Ambient, vertices: BTreeSet<SepVertex>) -> Self {
        let component = vertices.iter().next().map_or(0, |v| amb.comps.label(*v));
        TauSlice { component, vertices }
    }

    pub fn min_level(&self) -> i64 {
        self.vertices.iter().map(|v| v.level).min().unwrap_or(0)
    }

    pub fn max_level(&self) -> i64 {
        self.vertices.iter().map(|v| v.level).max().unwrap_or(0)
    }

    pub fn depth(&self) -> i64 {
        self.max_level() - self.min_level()
    }

    pub fn contains(&self, v: SepVertex) -> bool {
        self.vertices.contains(&v)
    }

    /// Relabels levels by -r.
    pub fn shift(&self, amb: &Ambient, r: i64) -> TauSlice {
        TauSlice::new(amb, self.vertices.iter().map(|v| SepVertex::new(v.base, v.level - r)).collect())
    }

    pub fn sources(&self, amb: &Ambient) -> Vec<SepVertex> {
        self.vertices.iter().copied().filter(|v| amb.predecessors(*v).iter().all(|u| !self.contains(*u))).collect()
    }

    pub fn sinks(&self, amb: &Ambient) -> Vec<SepVertex> {
        self.vertices.iter().copied().filter(|v| amb.successors(*v).iter().all(|u| !self.contains(*u))).collect()
    }

    pub fn to_json(&self, amb: &Ambient) -> serde_json::Value {
        let q = &amb.st.bq.quiver;
        let anchor = self.vertices.iter().next().map(|v| amb.id(*v));
        serde_json::json!({
            "anchor": anchor,
            "component": self.component,
            "vertices": self.vertices.iter().map(|v| serde_json::json!([q.vertex_id(v.base), v.level])).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(amb: &Ambient, v: &serde_json::Value) -> Result<TauSlice, SliceError> {
        let q = &amb.st.bq.quiver;
        let list = v.get("vertices").and_then(|x| x.as_array()).ok_or_else(|| SliceError::UnknownVertex("vertices".into()))?;
        let mut out = BTreeSet::new();
        for item in list {
            let pair = item.as_array().filter(|p| p.len() == 2);
            let parsed = pair.and_then(|p| {
                let base = q.vertex(p[0].as_str()?)?;
                Some(SepVertex::new(base, p[1].as_i64()?))
            });
            out.insert(parsed.ok_or_else(|| SliceError::UnknownVertex(item.to_string()))?);
        }
        Ok(TauSlice::new(amb, out))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum SliceViolation {
    Empty,
    MixedComponents { vertex: String },
    OrbitRepeated { vertex: String, other: String },
    OrbitUncovered { expected: usize, found: usize },
    SourceNotInitial { vertex: String },
    SinkNotTerminal { vertex: String },
    ArrowForward { from: String, to: String },
    ArrowBackward { from: String, to: String },
}

impl std::fmt::Display for SliceViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SliceViolation::Empty => write!(f, "empty vertex set"),
            SliceViolation::MixedComponents { vertex } => write!(f, "{vertex} lies in another component"),
            SliceViolation::OrbitRepeated { vertex, other } => {
                write!(f, "τ-orbit met twice: {vertex} and {other}")
            }
            SliceViolation::OrbitUncovered { expected, found } => {
                write!(f, "τ-orbits met: {found} of {expected}")
            }
            SliceViolation::SourceNotInitial { vertex } => write!(f, "source {vertex} is not τ-initial"),
            SliceViolation::SinkNotTerminal { vertex } => write!(f, "sink {vertex} is not τ-terminal"),
            SliceViolation::ArrowForward { from, to } => {
                write!(f, "arrow {from} -> {to}: neither {to} nor its τ-translate is in the slice")
            }
            SliceViolation::ArrowBackward { from, to } => {
                write!(f, "arrow {from} -> {to}: neither {from} nor its inverse τ-translate is in the slice")
            }
        }
    }
}

/// Checks the single-point and completeness conditions; returns the first
/// violated one.
pub fn is_complete_slice(amb: &Ambient, s: &BTreeSet<SepVertex>) -> Result<(), SliceViolation> {
    let Some(first) = s.iter().next() else {
        return Err(SliceViolation::Empty);
    };
    let label = amb.comps.label(*first);
    let mut seen: BTreeMap<(usize, i64), SepVertex> = BTreeMap::new();
    for v in s {
        if amb.comps.label(*v) != label {
            return Err(SliceViolation::MixedComponents { vertex: amb.id(*v) });
        }
        if let Some(o) = seen.insert(amb.orbit_key(*v), *v) {
            return Err(SliceViolation::OrbitRepeated { vertex: amb.id(o), other: amb.id(*v) });
        }
    }
    let expected = amb.component_orbits(label).len();
    if seen.len() != expected {
        return Err(SliceViolation::OrbitUncovered { expected, found: seen.len() });
    }
    let slice = TauSlice { component: label, vertices: s.clone() };
    for v in slice.sources(amb) {
        let mut h = amb.hammock_start(v);
        h.remove(&tau_bar_inv(&amb.st, v));
        let inter: BTreeSet<SepVertex> = amb.hammock_start(v).intersection(s).copied().collect();
        if inter != h {
            return Err(SliceViolation::SourceNotInitial { vertex: amb.id(v) });
        }
    }
    for v in slice.sinks(amb) {
        let mut h = amb.hammock_end(v);
        h.remove(&tau_bar(&amb.st, v));
        let inter: BTreeSet<SepVertex> = amb.hammock_end(v).intersection(s).copied().collect();
        if inter != h {
            return Err(SliceViolation::SinkNotTerminal { vertex: amb.id(v) });
        }
    }
    for v in s {
        for u in amb.successors(*v) {
            if !s.contains(&u) && !s.contains(&tau_bar(&amb.st, u)) {
                return Err(SliceViolation::ArrowForward { from: amb.id(*v), to: amb.id(u) });
            }
        }
        for w in amb.predecessors(*v) {
            if !s.contains(&w) && !s.contains(&tau_bar_inv(&amb.st, w)) {
                return Err(SliceViolation::ArrowBackward { from: amb.id(w), to: amb.id(*v) });
            }
        }
    }
    Ok(())
}

/// The initial slice (Q^N, i0): the truncation component of (i0, 0).
pub fn initial_slice(amb: &Ambient, i0: usize) -> Result<TauSlice, SliceError> {
    let t = special_truncation(&amb.st, Some(i0))?;
    Ok(TauSlice::new(amb, t.vertices.into_iter().collect()))
}

pub fn mutate(amb: &Ambient, slice: &TauSlice, m: Mutation) -> Result<TauSlice, SliceError> {
    let v = m.vertex;
    let (ok, kind, replacement) = match m.direction {
        Direction::Minus => (slice.sinks(amb).contains(&v), "sink", tau_bar(&amb.st, v)),
        Direction::Plus => (slice.sources(amb).contains(&v), "source", tau_bar_inv(&amb.st, v)),
    };
    if !slice.contains(v) || !ok {
        return Err(SliceError::IllegalMutation(amb.id(v), kind));
    }
    let mut vs = slice.vertices.clone();
    vs.remove(&v);
    vs.insert(replacement);
    Ok(TauSlice { component: slice.component, vertices: vs })
}

/// Applies s⁻ at all maximum-level vertices until the depth is l-1.
pub fn reduce_to_initial(amb: &Ambient, slice: &TauSlice, budget: usize) -> Result<(Vec<Mutation>, TauSlice), SliceError> {
    let target = amb.l() as i64 - 1;
    let mut cur = slice.clone();
    let mut seq = Vec::new();
    while cur.depth() > target {
        let top = cur.max_level();
        let tops: Vec<SepVertex> = cur.vertices.iter().copied().filter(|v| v.level == top).collect();
        for v in tops {
            if seq.len() == budget {
                return Err(SliceError::BudgetExceeded(budget));
            }
            let m = Mutation { vertex: v, direction: Direction::Minus };
            cur = mutate(amb, &cur, m)?;
            seq.push(m);
        }
    }
    Ok((seq, cur))
}

/// Bound quiver of the slice with relations induced from the separated quiver.
pub fn slice_algebra(amb: &Ambient, slice: &TauSlice) -> Result<BoundQuiver, SliceError> {
    let (lo, hi) = (slice.min_level(), slice.max_level());
    let w = separated_window(&amb.st, lo, hi);
    let basis = GradedBasis::new(&w.bq, (hi - lo) as usize + 1)?;
    let keep: Vec<usize> = slice.vertices.iter().map(|v| w.vertex(*v).expect("inside window")).collect();
    Ok(induced_subquiver(&w.bq, &basis, &keep)?)
}

/// Every ambient bound path between two slice vertices that is joined by a
/// bound path inside the slice stays inside the slice.
pub fn convexity_check(amb: &Ambient, slice: &TauSlice, cap: usize) -> Result<bool, SliceError> {
    let st = &amb.st;
    let q = &st.bq.quiver;
    for u in &slice.vertices {
        for v in &slice.vertices {
            let t = v.level - u.level;
            if t < 1 || t as usize > st.l || st.dim(u.base, v.base, t as usize) == 0 {
                continue;
            }
            let mut bound_paths = Vec::new();
            for p in enumerate_paths(q, u.base, v.base, t as usize, cap)? {
                if !st.basis.is_zero_path(&p)? {
                    let inside = p
                        .vertices(q)
                        .iter()
                        .enumerate()
                        .all(|(k, &b)| slice.contains(SepVertex::new(b, u.level + k as i64)));
                    bound_paths.push(inside);
                }
            }
            if bound_paths.iter().any(|&x| x) && !bound_paths.iter().all(|&x| x) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// All mutations allowed at `slice`: s⁻ at each sink, s⁺ at each source.
pub fn legal_mutations(amb: &Ambient, slice: &TauSlice) -> Vec<Mutation> {
    let mut out: Vec<Mutation> =
        slice.sinks(amb).into_iter().map(|v| Mutation { vertex: v, direction: Direction::Minus }).collect();
    out.extend(slice.sources(amb).into_iter().map(|v| Mutation { vertex: v, direction: Direction::Plus }));
    out
}

/// Seeded chain of `len` legal mutations starting at `start`.
pub fn random_chain(amb: &Ambient, start: &TauSlice, len: usize, seed: u64) -> Result<Vec<Mutation>, SliceError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = start.clone();
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        let options = legal_mutations(amb, &cur);
        let Some(&m) = options.choose(&mut rng) else { break };
        cur = mutate(amb, &cur, m)?;
        out.push(m);
    }
    Ok(out)
}
