//! Certificate-or-inconclusive isomorphism search for bound quivers.
//!
//! Vertex bijections are found by backtracking, pruned by arrow counts and
//! graded dimension matrices. Arrows are then paired and rescaled: every
//! path maps to a monomial in the arrow scalars, so matching the reduced
//! echelon forms of the two ideals cell by cell yields monomial equations
//! that are solved by multiplicative elimination.

use crate::graded::{GradedBasis, GradedError};
use crate::linalg::{Echelon, Scalar, SparseVec};
use crate::quiver::BoundQuiver;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

pub const DEFAULT_SEARCH_BUDGET: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsoError {
    #[error("isomorphism search exceeded budget {0}")]
    SearchBudgetExceeded(usize),
    #[error(transparent)]
    Graded(#[from] GradedError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuiverIso {
    pub vertex_map: Vec<usize>,
    pub arrow_map: Vec<usize>,
    pub scaling: Vec<Scalar>,
    /// Ideals were compared in degrees `2..=checked_degree`.
    pub checked_degree: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoOutcome {
    Iso(QuiverIso),
    NotIsomorphic(String),
    Inconclusive(String),
}

impl IsoOutcome {
    pub fn iso(&self) -> Option<&QuiverIso> {
        match self {
            IsoOutcome::Iso(i) => Some(i),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct IsoOptions {
    /// Compare ideals up to this degree; default is the common vanishing degree.
    pub maxdeg: Option<usize>,
    /// Forced vertex bijection (a-index -> b-index).
    pub fixed_vertices: Option<Vec<usize>>,
    pub budget: usize,
}

impl Default for IsoOptions {
    fn default() -> Self {
        IsoOptions { maxdeg: None, fixed_vertices: None, budget: DEFAULT_SEARCH_BUDGET }
    }
}

struct Side<'a> {
    bq: &'a BoundQuiver,
    basis: GradedBasis,
    adj: Vec<Vec<usize>>,
    /// dims[t][i][j]
    dims: Vec<Vec<Vec<usize>>>,
}

impl<'a> Side<'a> {
    fn new(bq: &'a BoundQuiver, top: usize) -> Result<Self, GradedError> {
        let basis = GradedBasis::new(bq, top)?;
        let n = bq.quiver.num_vertices();
        let dims = (0..=top)
            .map(|t| (0..n).map(|i| (0..n).map(|j| basis.dim(i, j, t)).collect()).collect())
            .collect();
        Ok(Side { bq, basis, adj: bq.quiver.adjacency(), dims })
    }

    fn signature(&self, v: usize) -> Vec<Vec<usize>> {
        let n = self.adj.len();
        let mut sig = Vec::new();
        let mut out: Vec<usize> = (0..n).map(|j| self.adj[v][j]).collect();
        let mut inn: Vec<usize> = (0..n).map(|j| self.adj[j][v]).collect();
        out.sort_unstable();
        inn.sort_unstable();
        sig.push(out);
        sig.push(inn);
        for d in &self.dims {
            let mut row: Vec<usize> = d[v].clone();
            let mut col: Vec<usize> = (0..n).map(|j| d[j][v]).collect();
            row.sort_unstable();
            col.sort_unstable();
            sig.push(row);
            sig.push(col);
            sig.push(vec![d[v][v]]);
        }
        sig
    }
}

fn default_degree(bq: &BoundQuiver) -> usize {
    let n = bq.quiver.num_vertices();
    (2 * n * bq.max_relation_length()).max(n + 1)
}

pub fn quiver_isomorphic(a: &BoundQuiver, b: &BoundQuiver, opts: &IsoOptions) -> Result<IsoOutcome, IsoError> {
    let qa = &a.quiver;
    let qb = &b.quiver;
    if qa.num_vertices() != qb.num_vertices() || qa.num_arrows() != qb.num_arrows() {
        return Ok(IsoOutcome::NotIsomorphic("vertex or arrow counts differ".into()));
    }
    let top = match opts.maxdeg {
        Some(d) => d,
        None => {
            let ga = GradedBasis::new(a, default_degree(a).max(default_degree(b)))?;
            let gb = GradedBasis::new(b, default_degree(a).max(default_degree(b)))?;
            match (ga.vanishing_degree(), gb.vanishing_degree()) {
                (Some(x), Some(y)) if x == y => x,
                (Some(_), Some(_)) => return Ok(IsoOutcome::NotIsomorphic("Loewy lengths differ".into())),
                _ => ga.bound().min(gb.bound()),
            }
        }
    };
    let sa = Side::new(a, top)?;
    let sb = Side::new(b, top)?;
    let n = qa.num_vertices();
    for t in 0..=top.min(sa.basis.bound()).min(sb.basis.bound()) {
        if sa.basis.dims().get(t) != sb.basis.dims().get(t) {
            return Ok(IsoOutcome::NotIsomorphic(format!("graded dimension differs in degree {t}")));
        }
    }
    let sig_a: Vec<_> = (0..n).map(|v| sa.signature(v)).collect();
    let sig_b: Vec<_> = (0..n).map(|v| sb.signature(v)).collect();
    // Visit a-vertices in BFS order so constraints bite early.
    let mut order = Vec::new();
    let mut seen = vec![false; n];
    for comp in qa.undirected_components() {
        let mut queue = std::collections::VecDeque::from([comp[0]]);
        seen[comp[0]] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for w in 0..n {
                if !seen[w] && (sa.adj[v][w] > 0 || sa.adj[w][v] > 0) {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    let mut search = Search {
        sa: &sa,
        sb: &sb,
        sig_a,
        sig_b,
        order,
        map: vec![usize::MAX; n],
        used: vec![false; n],
        nodes: 0,
        budget: opts.budget,
        inconclusive: None,
        top,
        fixed: opts.fixed_vertices.clone(),
    };
    match search.run(0)? {
        Some(iso) => Ok(IsoOutcome::Iso(iso)),
        None => Ok(match search.inconclusive {
            Some(why) => IsoOutcome::Inconclusive(why),
            None => IsoOutcome::NotIsomorphic("no vertex bijection admits a relation-preserving rescaling".into()),
        }),
    }
}

struct Search<'s, 'a> {
    sa: &'s Side<'a>,
    sb: &'s Side<'a>,
    sig_a: Vec<Vec<Vec<usize>>>,
    sig_b: Vec<Vec<Vec<usize>>>,
    order: Vec<usize>,
    map: Vec<usize>,
    used: Vec<bool>,
    nodes: usize,
    budget: usize,
    inconclusive: Option<String>,
    top: usize,
    fixed: Option<Vec<usize>>,
}

impl Search<'_, '_> {
    fn consistent(&self, v: usize, w: usize) -> bool {
        if self.sig_a[v] != self.sig_b[w] {
            return false;
        }
        let (sa, sb) = (self.sa, self.sb);
        for &u in &self.order {
            let x = if u == v { w } else { self.map[u] };
            if x == usize::MAX {
                continue;
            }
            if sa.adj[v][u] != sb.adj[w][x] || sa.adj[u][v] != sb.adj[x][w] {
                return false;
            }
            for t in 0..sa.dims.len() {
                if sa.dims[t][v][u] != sb.dims[t][w][x] || sa.dims[t][u][v] != sb.dims[t][x][w] {
                    return false;
                }
            }
        }
        true
    }

    fn run(&mut self, depth: usize) -> Result<Option<QuiverIso>, IsoError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(IsoError::SearchBudgetExceeded(self.budget));
        }
        if depth == self.order.len() {
            return Ok(self.leaf());
        }
        let v = self.order[depth];
        let candidates: Vec<usize> = match &self.fixed {
            Some(f) => vec![f[v]],
            None => (0..self.map.len()).collect(),
        };
        for w in candidates {
            if self.used[w] || !self.consistent(v, w) {
                continue;
            }
            self.map[v] = w;
            self.used[w] = true;
            let r = self.run(depth + 1)?;
            self.map[v] = usize::MAX;
            self.used[w] = false;
            if r.is_some() {
                return Ok(r);
            }
        }
        Ok(None)
    }

    fn leaf(&mut self) -> Option<QuiverIso> {
        let qa = &self.sa.bq.quiver;
        let qb = &self.sb.bq.quiver;
        // Positional pairing of parallel arrows.
        let mut arrow_map = vec![0; qa.num_arrows()];
        let mut ambiguous = false;
        for i in 0..qa.num_vertices() {
            for j in 0..qa.num_vertices() {
                let xs = qa.arrows_between(i, j);
                let ys = qb.arrows_between(self.map[i], self.map[j]);
                ambiguous |= xs.len() > 1;
                for (x, y) in xs.into_iter().zip(ys) {
                    arrow_map[x] = y;
                }
            }
        }
        match solve_scaling(self.sa, self.sb, &self.map, &arrow_map, self.top) {
            Scaling::Found(scaling) => Some(QuiverIso {
                vertex_map: self.map.clone(),
                arrow_map,
                scaling,
                checked_degree: self.top,
            }),
            Scaling::Contradiction if !ambiguous => None,
            Scaling::Contradiction => {
                self.inconclusive
                    .get_or_insert_with(|| "parallel arrows: positional pairing admits no rescaling".into());
                None
            }
            Scaling::Undecided(why) => {
                self.inconclusive.get_or_insert(why);
                None
            }
        }
    }
}

enum Scaling {
    Found(Vec<Scalar>),
    Contradiction,
    Undecided(String),
}

/// λ-monomial with rational constant: c · Π λ_k^{e_k}.
#[derive(Clone, Debug)]
struct Monomial {
    c: Scalar,
    exps: BTreeMap<usize, i64>,
}

fn pow(x: &Scalar, e: i64) -> Scalar {
    let mut r = Scalar::one();
    let base = if e < 0 { x.recip() } else { x.clone() };
    for _ in 0..e.unsigned_abs() {
        r *= &base;
    }
    r
}

impl Monomial {
    fn mul_pow(&mut self, other: &Monomial, e: i64) {
        self.c *= pow(&other.c, e);
        for (&k, &x) in &other.exps {
            let v = self.exps.entry(k).or_insert(0);
            *v += x * e;
            if *v == 0 {
                self.exps.remove(&k);
            }
        }
    }

    fn substitute(&mut self, var: usize, value: &Monomial) {
        if let Some(e) = self.exps.remove(&var) {
            self.mul_pow(value, e);
        }
    }
}

fn path_exponents(arrows: &[usize]) -> BTreeMap<usize, i64> {
    let mut m = BTreeMap::new();
    for &a in arrows {
        *m.entry(a).or_insert(0) += 1;
    }
    m
}

/// Images of a's ideal rows in b's path coordinates, before scaling.
fn mapped_rows(
    sa: &Side,
    sb: &Side,
    vmap: &[usize],
    amap: &[usize],
    t: usize,
    i: usize,
    j: usize,
    scaling: Option<&[Scalar]>,
) -> Option<Vec<SparseVec>> {
    let ca = sa.basis.cell(i, j, t)?;
    let cb = sb.basis.cell(vmap[i], vmap[j], t)?;
    let rows = ca
        .ideal
        .rows()
        .map(|row| {
            let mut acc = BTreeMap::new();
            for (k, c) in row {
                let p = &ca.paths[*k];
                let img: Vec<usize> = p.iter().map(|&x| amap[x]).collect();
                let mut c = c.clone();
                if let Some(s) = scaling {
                    for &x in p {
                        c *= &s[x];
                    }
                }
                acc.insert(cb.position(&img).expect("bijection maps paths to paths"), c);
            }
            acc.into_iter().collect()
        })
        .collect();
    Some(rows)
}

fn solve_scaling(sa: &Side, sb: &Side, vmap: &[usize], amap: &[usize], top: usize) -> Scaling {
    let n = vmap.len();
    let mut equations: Vec<Monomial> = Vec::new();
    for t in 2..=top.min(sa.basis.bound()) {
        for i in 0..n {
            for j in 0..n {
                let (Some(ca), Some(cb)) = (sa.basis.cell(i, j, t), sb.basis.cell(vmap[i], vmap[j], t)) else {
                    continue;
                };
                if ca.ideal.rank() != cb.ideal.rank() {
                    return Scaling::Contradiction;
                }
                let rows = mapped_rows(sa, sb, vmap, amap, t, i, j, None).unwrap();
                let mut ech = Echelon::new();
                for r in rows {
                    ech.insert(r);
                }
                // b-position -> a-path exponents
                let mut back: HashMap<usize, BTreeMap<usize, i64>> = HashMap::new();
                for p in &ca.paths {
                    let img: Vec<usize> = p.iter().map(|&x| amap[x]).collect();
                    back.insert(cb.position(&img).unwrap(), path_exponents(p));
                }
                for (ra, rb) in ech.rows().zip(cb.ideal.rows()) {
                    if ra.len() != rb.len() || ra.iter().zip(rb).any(|(x, y)| x.0 != y.0) {
                        return Scaling::Contradiction;
                    }
                    let p = ra[0].0;
                    for ((q, x), (_, y)) in ra.iter().zip(rb).skip(1) {
                        // x μ(q)/μ(p) = y
                        let mut m = Monomial { c: y / x, exps: BTreeMap::new() };
                        m.mul_pow(&Monomial { c: Scalar::one(), exps: back[q].clone() }, -1);
                        m.mul_pow(&Monomial { c: Scalar::one(), exps: back[&p].clone() }, 1);
                        // equation: Π λ^{e(q)-e(p)} = y/x, stored as c·Π λ^{-e(q)+e(p)} = 1
                        equations.push(m);
                    }
                }
            }
        }
    }
    // Each equation reads c · Π λ^e = 1.
    let mut solved: BTreeMap<usize, Monomial> = BTreeMap::new();
    let mut pending = equations;
    loop {
        let mut progress = false;
        let mut rest = Vec::new();
        for mut eq in pending {
            for (v, val) in &solved {
                eq.substitute(*v, val);
            }
            if eq.exps.is_empty() {
                if !eq.c.is_one() {
                    return Scaling::Contradiction;
                }
                continue;
            }
            let unit = eq.exps.iter().find(|(_, e)| e.abs() == 1).map(|(&v, &e)| (v, e));
            match unit {
                Some((v, e)) => {
                    // λ_v^e = 1 / (c Π others)
                    let mut rhs = Monomial { c: eq.c.recip(), exps: BTreeMap::new() };
                    for (&w, &x) in &eq.exps {
                        if w != v {
                            rhs.exps.insert(w, -x);
                        }
                    }
                    let value = if e == 1 {
                        rhs
                    } else {
                        let mut inv = Monomial { c: Scalar::one(), exps: BTreeMap::new() };
                        inv.mul_pow(&rhs, -1);
                        inv
                    };
                    for s in solved.values_mut() {
                        s.substitute(v, &value);
                    }
                    solved.insert(v, value);
                    progress = true;
                }
                None => rest.push(eq),
            }
        }
        pending = rest;
        if pending.is_empty() {
            break;
        }
        if !progress {
            return Scaling::Undecided("monomial equations without unit exponent".into());
        }
    }
    let m = sa.bq.quiver.num_arrows();
    let scaling: Vec<Scalar> = (0..m)
        .map(|k| match solved.get(&k) {
            None => Scalar::one(),
            // free variables are set to 1
            Some(mono) => mono.c.clone(),
        })
        .collect();
    if scaling.iter().any(Zero::is_zero) {
        return Scaling::Contradiction;
    }
    if verify(sa, sb, vmap, amap, &scaling, top) {
        Scaling::Found(scaling)
    } else {
        Scaling::Undecided("rescaling failed verification".into())
    }
}

/// Degreewise ideal equality under the scaled bijection.
fn verify(sa: &Side, sb: &Side, vmap: &[usize], amap: &[usize], scaling: &[Scalar], top: usize) -> bool {
    let n = vmap.len();
    for t in 0..=top.min(sa.basis.bound()) {
        for i in 0..n {
            for j in 0..n {
                let (ca, cb) = (sa.basis.cell(i, j, t), sb.basis.cell(vmap[i], vmap[j], t));
                match (ca, cb) {
                    (None, None) => continue,
                    (Some(ca), Some(cb)) => {
                        if ca.ideal.rank() != cb.ideal.rank() || ca.paths.len() != cb.paths.len() {
                            return false;
                        }
                        let rows = mapped_rows(sa, sb, vmap, amap, t, i, j, Some(scaling)).unwrap();
                        if !rows.iter().all(|r| cb.ideal.contains(r)) {
                            return false;
                        }
                    }
                    _ => return false,
                }
            }
        }
    }
    true
}

/// The bijection matching vertex and arrow ids, with unit scaling.
pub fn iso_by_ids(a: &BoundQuiver, b: &BoundQuiver, checked_degree: usize) -> Option<QuiverIso> {
    let (qa, qb) = (&a.quiver, &b.quiver);
    if qa.num_vertices() != qb.num_vertices() || qa.num_arrows() != qb.num_arrows() {
        return None;
    }
    let vertex_map: Option<Vec<usize>> = qa.vertices().iter().map(|v| qb.vertex(v)).collect();
    let arrow_map: Option<Vec<usize>> = qa.arrows().iter().map(|x| qb.arrow_by_id(&x.id)).collect();
    Some(QuiverIso {
        vertex_map: vertex_map?,
        arrow_map: arrow_map?,
        scaling: vec![Scalar::one(); qa.num_arrows()],
        checked_degree,
    })
}

/// Applies an iso to a vertex-index map: `a -> b`.
pub fn check_iso_certificate(a: &BoundQuiver, b: &BoundQuiver, iso: &QuiverIso) -> Result<bool, GradedError> {
    let sa = Side::new(a, iso.checked_degree)?;
    let sb = Side::new(b, iso.checked_degree)?;
    for (k, ar) in a.quiver.arrows().iter().enumerate() {
        let br = b.quiver.arrow(iso.arrow_map[k]);
        if iso.vertex_map[ar.source] != br.source || iso.vertex_map[ar.target] != br.target {
            return Ok(false);
        }
    }
    Ok(verify(&sa, &sb, &iso.vertex_map, &iso.arrow_map, &iso.scaling, iso.checked_degree))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::linalg::int;
    use crate::quiver::{LinComb, Path, Quiver};

    #[test]
    fn identity_iso() {
        for (_, bq) in corpus::small_battery() {
            let out = quiver_isomorphic(&bq, &bq, &IsoOptions::default()).unwrap();
            let iso = out.iso().expect("self-iso");
            assert!(check_iso_certificate(&bq, &bq, iso).unwrap());
        }
    }

    #[test]
    fn orientation_distinguishes_a3() {
        let a = corpus::linear_a(3);
        let q = Quiver::new(&["1", "2", "3"], &[("a", "2", "1"), ("b", "3", "1")]).unwrap();
        let b = BoundQuiver::free(q);
        let out = quiver_isomorphic(&a, &b, &IsoOptions::default()).unwrap();
        assert!(matches!(out, IsoOutcome::NotIsomorphic(_)));
        let opp = BoundQuiver::free(a.quiver.reversed());
        // the opposite of linear A_3 is again linear, with vertices reversed
        let out = quiver_isomorphic(&a, &opp, &IsoOptions::default()).unwrap();
        assert_eq!(out.iso().unwrap().vertex_map, vec![2, 1, 0]);
    }

    #[test]
    fn rescaling_matches_signs() {
        // commutative square vs anticommutative square: iso after rescaling
        let q = Quiver::new(&["1", "2", "3", "4"], &[("a", "1", "2"), ("b", "2", "4"), ("c", "1", "3"), ("d", "3", "4")])
            .unwrap();
        let rel = |s: i64| {
            LinComb::new(vec![
                (int(1), Path::from_arrows(&q, vec![0, 1]).unwrap()),
                (int(s), Path::from_arrows(&q, vec![2, 3]).unwrap()),
            ])
        };
        let comm = BoundQuiver::new(q.clone(), vec![rel(-1)]);
        let anti = BoundQuiver::new(q.clone(), vec![rel(1)]);
        let out = quiver_isomorphic(&comm, &anti, &IsoOptions::default()).unwrap();
        let iso = out.iso().unwrap();
        assert!(check_iso_certificate(&comm, &anti, iso).unwrap());
        let zero = BoundQuiver::new(q.clone(), vec![LinComb::monomial(Path::from_arrows(&q, vec![0, 1]).unwrap())]);
        let out = quiver_isomorphic(&comm, &zero, &IsoOptions::default()).unwrap();
        assert!(matches!(out, IsoOutcome::NotIsomorphic(_)));
    }

    #[test]
    fn budget_is_an_error() {
        let z = corpus::zigzag(5);
        let opts = IsoOptions { budget: 2, ..IsoOptions::default() };
        assert_eq!(quiver_isomorphic(&z, &z, &opts), Err(IsoError::SearchBudgetExceeded(2)));
    }
}
