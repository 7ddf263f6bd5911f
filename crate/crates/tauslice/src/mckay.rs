//! McKay quivers of the diagonal cyclic action on k^m, the Iyama cone
//! quiver, τ-completion and absolute complete truncations.
//!
//! Lattice vertices are tuples over Z/(r+1), listed lexicographically with
//! the first coordinate most significant. Arrow `a{i}(v)` goes v -> v+ε_i.

use crate::iso::{quiver_isomorphic, IsoError, IsoOptions, IsoOutcome, QuiverIso};
use crate::linalg::int;
use crate::quiver::{BoundQuiver, LinComb, Path, Quiver};
use crate::separated::SepVertex;
use crate::slices::{Ambient, TauSlice};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    /// Exterior-algebra relations: anticommuting squares, zero at repeats.
    Exterior,
    /// Symmetric-algebra relations: commuting squares only.
    Cubic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lattice {
    pub m: usize,
    pub r: usize,
}

impl Lattice {
    pub fn new(m: usize, r: usize) -> Self {
        assert!(m >= 1 && r >= 1);
        Lattice { m, r }
    }

    pub fn size(&self) -> usize {
        (self.r + 1).pow(self.m as u32)
    }

    pub fn decode(&self, mut k: usize) -> Vec<usize> {
        let b = self.r + 1;
        let mut v = vec![0; self.m];
        for c in (0..self.m).rev() {
            v[c] = k % b;
            k /= b;
        }
        v
    }

    pub fn encode(&self, v: &[usize]) -> usize {
        v.iter().fold(0, |acc, &x| acc * (self.r + 1) + x % (self.r + 1))
    }

    /// v + ε_i (i is 1-based).
    pub fn step(&self, k: usize, i: usize) -> usize {
        let mut v = self.decode(k);
        v[i - 1] = (v[i - 1] + 1) % (self.r + 1);
        self.encode(&v)
    }

    /// v + (1, ..., 1).
    pub fn diagonal(&self, k: usize) -> usize {
        let v: Vec<usize> = self.decode(k).iter().map(|x| x + 1).collect();
        self.encode(&v)
    }

    pub fn id(&self, k: usize) -> String {
        tuple_id(&self.decode(k))
    }
}

pub fn tuple_id(v: &[usize]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

fn arrow_index(m: usize, v: usize, i: usize) -> usize {
    v * m + (i - 1)
}

pub fn mckay_bound_quiver(m: usize, r: usize, flavor: Flavor) -> BoundQuiver {
    let lat = Lattice::new(m, r);
    let mut q = Quiver::empty();
    for k in 0..lat.size() {
        q.add_vertex(&lat.id(k)).unwrap();
    }
    for k in 0..lat.size() {
        for i in 1..=m {
            q.add_arrow(&format!("a{i}{}", lat.id(k)), k, lat.step(k, i)).unwrap();
        }
    }
    let two = |v: usize, first: usize, second: usize| {
        let mid = lat.step(v, first);
        Path::from_arrows(&q, vec![arrow_index(m, v, first), arrow_index(m, mid, second)]).unwrap()
    };
    let sign = match flavor {
        Flavor::Exterior => int(1),
        Flavor::Cubic => int(-1),
    };
    let mut rels = Vec::new();
    for v in 0..lat.size() {
        for s in 1..=m {
            for t in s + 1..=m {
                rels.push(LinComb::new(vec![(int(1), two(v, t, s)), (sign.clone(), two(v, s, t))]));
            }
        }
        if flavor == Flavor::Exterior {
            for t in 1..=m {
                rels.push(LinComb::monomial(two(v, t, t)));
            }
        }
    }
    BoundQuiver::new(q, rels)
}

/// τ⁻¹ on ambient lattice indices: v -> v + (1, ..., 1).
pub fn lattice_tau_inv(m: usize, r: usize) -> Vec<usize> {
    let lat = Lattice::new(m, r);
    (0..lat.size()).map(|k| lat.diagonal(k)).collect()
}

/// Union of the layers c⁽⁰⁾ = B, c⁽ᵗ⁺¹⁾ = {v : v has an arrow into c⁽ᵗ⁾ and
/// τ⁻¹v ∈ c⁽ᵗ⁾}, stopping once a layer repeats.
pub fn tau_completion(q: &Quiver, tau_inv: &[usize], b: &BTreeSet<usize>) -> BTreeSet<usize> {
    let mut union = b.clone();
    let mut seen: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    let mut layer = b.clone();
    while seen.insert(layer.clone()) {
        let next: BTreeSet<usize> = (0..q.num_vertices())
            .filter(|&v| layer.contains(&tau_inv[v]) && q.out_arrows(v).iter().any(|&a| layer.contains(&q.arrow(a).target)))
            .collect();
        union.extend(next.iter().copied());
        layer = next;
    }
    union
}

#[derive(Debug, Clone)]
pub struct AbsoluteComplete {
    pub m: usize,
    pub r: usize,
    /// Cubic ambient Q*(m).
    pub ambient: BoundQuiver,
    /// Ambient indices of the kept vertices, increasing.
    pub vertices: Vec<usize>,
    /// Ambient vertices removed by the truncation.
    pub exceptional: Vec<usize>,
    /// Kept full subquiver; ambient relations meeting a removed vertex lose
    /// those terms.
    pub bq: BoundQuiver,
}

/// Vertex set of the absolute m-complete truncation, as coordinate tuples in
/// 1..=r (the label r+1 is the residue 0).
pub fn absolute_vertex_set(m: usize, r: usize) -> Vec<Vec<usize>> {
    // level 1: Q*(1) minus the vertex r+1
    let mut cur: Vec<Vec<usize>> = (1..=r).map(|u| vec![u]).collect();
    for k in 2..=m {
        let lat = Lattice::new(k, r);
        let amb = mckay_bound_quiver(k, r, Flavor::Cubic);
        let b: BTreeSet<usize> = cur
            .iter()
            .map(|p| {
                let mut v = p.clone();
                v.push(r);
                lat.encode(&v)
            })
            .collect();
        let done = tau_completion(&amb.quiver, &lattice_tau_inv(k, r), &b);
        cur = done
            .into_iter()
            .map(|x| lat.decode(x).into_iter().map(|c| if c == 0 { r + 1 } else { c }).collect())
            .collect();
    }
    cur.sort();
    cur
}

pub fn absolute_complete(m: usize, r: usize) -> AbsoluteComplete {
    let lat = Lattice::new(m, r);
    let ambient = mckay_bound_quiver(m, r, Flavor::Cubic);
    let keep: BTreeSet<usize> = absolute_vertex_set(m, r).iter().map(|v| lat.encode(v)).collect();
    let vertices: Vec<usize> = keep.iter().copied().collect();
    let exceptional = (0..lat.size()).filter(|k| !keep.contains(k)).collect();
    let bq = ambient.quotient_truncation(&vertices);
    AbsoluteComplete { m, r, ambient, vertices, exceptional, bq }
}

/// Vertices (i, h) of the cone quiver: 1 ≤ i ≤ r, h ∈ Z^{m-1}_{≥0}, |h| ≤ r-i.
pub fn iyama_vertices(m: usize, r: usize) -> Vec<(usize, Vec<usize>)> {
    fn rec(len: usize, budget: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for x in 0..=budget {
            cur.push(x);
            rec(len, budget - x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for i in 1..=r {
        let mut hs = Vec::new();
        rec(m - 1, r - i, &mut Vec::new(), &mut hs);
        out.extend(hs.into_iter().map(|h| (i, h)));
    }
    out
}

fn iyama_id(i: usize, h: &[i64]) -> String {
    let parts: Vec<String> = h.iter().map(|x| x.to_string()).collect();
    format!("({i};{})", parts.join(","))
}

/// Direction t of the cone quiver as a shift of (i, h). The m directions
/// sum to (0, ε_{m-1}), the shift τ_m.
fn direction(m: usize, t: usize) -> (i64, Vec<i64>) {
    let mut h = vec![0; m - 1];
    match t {
        0 => (1, h),
        1 => {
            h[0] = 1;
            (-1, h)
        }
        _ => {
            h[t - 2] = -1;
            h[t - 1] = 1;
            (0, h)
        }
    }
}

/// Cone quiver of the m-fold higher Auslander algebra of type A_r. Arrows
/// `d{t}(i;h)` shift by direction t; a square on directions {s, t} gives a
/// commutativity relation when both routes exist and a zero relation on
/// the route that exists otherwise.
pub fn iyama_quiver(m: usize, r: usize) -> BoundQuiver {
    let verts = iyama_vertices(m, r);
    let key = |i: i64, h: &[i64]| iyama_id(i as usize, h);
    let mut q = Quiver::empty();
    let mut index: HashMap<String, usize> = HashMap::new();
    for (i, h) in &verts {
        let hv: Vec<i64> = h.iter().map(|&x| x as i64).collect();
        let id = iyama_id(*i, &hv);
        index.insert(id.clone(), q.add_vertex(&id).unwrap());
    }
    let shift = |i: i64, h: &[i64], t: usize| -> (i64, Vec<i64>) {
        let (di, dh) = direction(m, t);
        (i + di, h.iter().zip(&dh).map(|(a, b)| a + b).collect())
    };
    // arrow lookup: (source, direction) -> arrow index
    let mut arrow_of: HashMap<(usize, usize), usize> = HashMap::new();
    let coords: Vec<(i64, Vec<i64>)> =
        verts.iter().map(|(i, h)| (*i as i64, h.iter().map(|&x| x as i64).collect())).collect();
    for (s, (i, h)) in coords.iter().enumerate() {
        for t in 0..m {
            let (ni, nh) = shift(*i, h, t);
            if ni < 1 || nh.iter().any(|&x| x < 0) {
                continue;
            }
            if let Some(&e) = index.get(&key(ni, &nh)) {
                let a = q.add_arrow(&format!("d{t}{}", key(*i, h)), s, e).unwrap();
                arrow_of.insert((s, t), a);
            }
        }
    }
    let route = |s: usize, first: usize, second: usize| -> Option<Path> {
        let a = *arrow_of.get(&(s, first))?;
        let b = *arrow_of.get(&(q.arrow(a).target, second))?;
        Path::from_arrows(&q, vec![a, b])
    };
    let mut rels = Vec::new();
    for (s, (i, h)) in coords.iter().enumerate() {
        for t1 in 0..m {
            for t2 in t1 + 1..m {
                let (ei, eh) = shift(*i, h, t1);
                let (ei, eh) = shift(ei, &eh, t2);
                if ei < 1 || eh.iter().any(|&x| x < 0) || !index.contains_key(&key(ei, &eh)) {
                    continue;
                }
                match (route(s, t1, t2), route(s, t2, t1)) {
                    (Some(p), Some(p2)) => rels.push(LinComb::new(vec![(int(1), p), (int(-1), p2)])),
                    (Some(p), None) | (None, Some(p)) => rels.push(LinComb::monomial(p)),
                    (None, None) => {}
                }
            }
        }
    }
    BoundQuiver::new(q, rels)
}

/// τ_m(i, h) = (i, h + ε_{m-1}) on cone-quiver indices, where defined.
pub fn iyama_tau(bq: &BoundQuiver, m: usize) -> Vec<Option<usize>> {
    let q = &bq.quiver;
    if m < 2 {
        return vec![None; q.num_vertices()];
    }
    iyama_vertices_of(bq)
        .iter()
        .map(|(i, h)| {
            let mut h2 = h.clone();
            h2[m - 2] += 1;
            q.vertex(&iyama_id(*i, &h2))
        })
        .collect()
}

fn iyama_vertices_of(bq: &BoundQuiver) -> Vec<(usize, Vec<i64>)> {
    bq.quiver
        .vertices()
        .iter()
        .map(|id| {
            let inner = id.trim_start_matches('(').trim_end_matches(')');
            let (i, h) = inner.split_once(';').unwrap();
            let h = if h.is_empty() { vec![] } else { h.split(',').map(|x| x.parse().unwrap()).collect() };
            (i.parse().unwrap(), h)
        })
        .collect()
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, j| acc * (n - j) / (j + 1))
}

/// The isolated-orbit initial slice of the exterior McKay quiver: levels
/// 0..m-1, vertex (w, n) kept when Σ(w - base) ≡ n mod r+1.
pub fn cubic_initial_slice(amb: &Ambient, m: usize, r: usize, base: usize) -> TauSlice {
    let lat = Lattice::new(m, r);
    let b = lat.decode(base);
    let mut vs = BTreeSet::new();
    for n in 0..m {
        for w in 0..lat.size() {
            let s: usize = lat.decode(w).iter().zip(&b).map(|(x, y)| x + (r + 1) - y).sum();
            if s % (r + 1) == n % (r + 1) {
                vs.insert(SepVertex::new(w, n as i64));
            }
        }
    }
    TauSlice::new(amb, vs)
}

#[derive(Debug, Error)]
pub enum AbsmcError {
    #[error("certificate failed: {0}")]
    Failed(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error(transparent)]
    Iso(#[from] IsoError),
}

#[derive(Debug, Clone)]
pub struct AbsmcCertificate {
    pub m: usize,
    pub r: usize,
    pub vertex_count: usize,
    pub iso: QuiverIso,
    /// Cone vertices where τ_m and the ambient τ⁻¹ were compared.
    pub tau_checked: usize,
}

impl AbsmcCertificate {
    pub fn to_json(&self, cone: &BoundQuiver, ac: &AbsoluteComplete) -> serde_json::Value {
        let map: BTreeMap<&str, &str> = (0..cone.quiver.num_vertices())
            .map(|v| (cone.quiver.vertex_id(v), ac.bq.quiver.vertex_id(self.iso.vertex_map[v])))
            .collect();
        serde_json::json!({
            "m": self.m,
            "r": self.r,
            "vertices": self.vertex_count,
            "expected_vertices": binomial(self.r + self.m - 1, self.m),
            "vertex_map": map,
            "ideal_checked_to_degree": self.iso.checked_degree,
            "tau_checked": self.tau_checked,
        })
    }
}

/// Cone quiver ≅ absolute complete truncation, with ideals compared up to
/// `maxdeg` and τ_m matched to the ambient τ⁻¹.
pub fn verify_absmc(m: usize, r: usize, maxdeg: usize) -> Result<(AbsmcCertificate, BoundQuiver, AbsoluteComplete), AbsmcError> {
    let cone = iyama_quiver(m, r);
    let ac = absolute_complete(m, r);
    let expected = binomial(r + m - 1, m);
    let (nc, na) = (cone.quiver.num_vertices(), ac.bq.quiver.num_vertices());
    if nc != expected || na != expected {
        return Err(AbsmcError::Failed(format!("vertex counts {nc} and {na}, expected {expected}")));
    }
    let opts = IsoOptions { maxdeg: Some(maxdeg), ..IsoOptions::default() };
    let iso = match quiver_isomorphic(&cone, &ac.bq, &opts)? {
        IsoOutcome::Iso(i) => i,
        IsoOutcome::NotIsomorphic(why) => return Err(AbsmcError::Failed(why)),
        IsoOutcome::Inconclusive(why) => return Err(AbsmcError::Inconclusive(why)),
    };
    let lat = Lattice::new(m, r);
    let amb_to_local: HashMap<usize, usize> = ac.vertices.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let tau_m = iyama_tau(&cone, m);
    let mut checked = 0;
    if m >= 2 {
        for w in 0..nc {
            let image = ac.vertices[iso.vertex_map[w]];
            let shifted = amb_to_local.get(&lat.diagonal(image)).copied();
            match (tau_m[w], shifted) {
                (Some(a), Some(b)) if iso.vertex_map[a] == b => checked += 1,
                (None, None) => {}
                _ => {
                    return Err(AbsmcError::Failed(format!(
                        "τ mismatch at {}",
                        cone.quiver.vertex_id(w)
                    )))
                }
            }
        }
    }
    Ok((AbsmcCertificate { m, r, vertex_count: nc, iso, tau_checked: checked }, cone, ac))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::GradedBasis;
    use crate::slices::is_complete_slice;
    use crate::stability::check_stable;

    #[test]
    fn lattice_round_trip() {
        let lat = Lattice::new(3, 2);
        for k in 0..lat.size() {
            assert_eq!(lat.encode(&lat.decode(k)), k);
        }
        assert_eq!(lat.id(lat.step(0, 2)), "(0,1,0)");
    }

    #[test]
    fn exterior_dims() {
        let bq = mckay_bound_quiver(2, 2, Flavor::Exterior);
        assert!(bq.validate().is_empty());
        let b = GradedBasis::new(&bq, 6).unwrap();
        assert_eq!(b.dims(), &[9, 18, 9, 0]);
        let st = check_stable(&bq, None).unwrap();
        assert!(st.tau.iter().enumerate().all(|(k, &t)| Lattice::new(2, 2).diagonal(t) == k));
    }

    #[test]
    fn cubic_grows() {
        let bq = mckay_bound_quiver(2, 1, Flavor::Cubic);
        let b = GradedBasis::new(&bq, 4).unwrap();
        // symmetric algebra in two variables: degree t has t+1 monomials per vertex
        assert_eq!(b.dims(), &[4, 8, 12, 16, 20]);
    }

    /// Closed form: weakly increasing tuples in 1..=r.
    fn oracle(m: usize, r: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..m {
            out = out
                .into_iter()
                .flat_map(|v: Vec<usize>| {
                    let lo = v.last().copied().unwrap_or(1);
                    (lo..=r).map(move |x| {
                        let mut w = v.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn completion_matches_closed_form() {
        for (m, r) in [(1, 3), (2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (3, 3), (2, 4), (4, 2)] {
            let got = absolute_vertex_set(m, r);
            assert_eq!(got, oracle(m, r), "({m},{r})");
            assert_eq!(got.len(), binomial(r + m - 1, m));
        }
    }

    #[test]
    fn completion_is_monotone_and_closed() {
        let bq = mckay_bound_quiver(2, 3, Flavor::Cubic);
        let ti = lattice_tau_inv(2, 3);
        let lat = Lattice::new(2, 3);
        let small: BTreeSet<usize> = [lat.encode(&[1, 3])].into();
        let big: BTreeSet<usize> = [lat.encode(&[1, 3]), lat.encode(&[2, 3])].into();
        let cs = tau_completion(&bq.quiver, &ti, &small);
        let cb = tau_completion(&bq.quiver, &ti, &big);
        assert!(cs.is_subset(&cb));
        assert!(tau_completion(&bq.quiver, &ti, &BTreeSet::new()).is_empty());
        assert_eq!(cs, small);
    }

    #[test]
    fn cone_quiver_small() {
        let q = iyama_quiver(2, 2);
        assert_eq!(q.quiver.num_vertices(), 3);
        assert_eq!(q.quiver.num_arrows(), 2);
        assert_eq!(q.relations.len(), 1);
        assert_eq!(q.relations[0].terms.len(), 1);
        let q1 = iyama_quiver(1, 4);
        assert_eq!(q1.quiver.num_arrows(), 3);
        assert!(q1.relations.is_empty());
    }

    #[test]
    fn absmc_small_cases() {
        for (m, r) in [(1, 2), (2, 2), (2, 3), (3, 2)] {
            let (cert, _, _) = verify_absmc(m, r, 4).unwrap_or_else(|e| panic!("({m},{r}): {e}"));
            assert_eq!(cert.vertex_count, binomial(r + m - 1, m));
        }
    }

    #[test]
    fn initial_slice_is_complete() {
        for (m, r) in [(1, 2), (2, 1), (2, 2)] {
            let amb = Ambient::new(&mckay_bound_quiver(m, r, Flavor::Exterior), None).unwrap();
            let s = cubic_initial_slice(&amb, m, r, 0);
            assert_eq!(s.vertices.len(), m * (r + 1).pow(m as u32 - 1));
            assert!(is_complete_slice(&amb, &s.vertices).is_ok(), "({m},{r})");
            let t = crate::slices::initial_slice(&amb, 0).unwrap();
            assert_eq!(t, s);
        }
    }
}
