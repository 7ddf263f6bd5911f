//! Beilinson algebras, trivial extensions, orbit quotients of the separated
//! quiver and repetitive windows, with the certificates comparing them.

use crate::graded::{GradedBasis, GradedError};
use crate::iso::{quiver_isomorphic, IsoError, IsoOptions, IsoOutcome, QuiverIso};
use crate::linalg::{accumulate, from_accumulator, Scalar, SparseVec};
use crate::present::{present, PresentError};
use crate::quiver::{BoundQuiver, LinComb, Path, Quiver};
use crate::separated::{lifted_label, smash_window, sep_id, tau_bar, tau_bar_inv, SepVertex};
use crate::slices::{mutate, slice_algebra, Ambient, Direction, Mutation, SliceError, TauSlice};
use crate::stability::{default_maxdeg, Stable};
use crate::structalg::{element_paths, struct_from_basis, Elem, StructAlgebra, StructError};
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExtError {
    #[error("invalid automorphism: {0}")]
    InvalidAutomorphism(String),
    #[error("quiver has parallel arrows; an arrow-level τ must be supplied")]
    ArrowTauRequired,
    #[error("arrow-level τ does not preserve the relations: {0}")]
    InvalidArrowTau(String),
    #[error("dual degree {degree} exceeds the grading bound {bound}")]
    GradingBound { degree: usize, bound: usize },
    #[error("certificate failed at step {step}: {reason}")]
    CertificateFailed { step: usize, reason: String },
    #[error("inconclusive at step {step}: {reason}")]
    Inconclusive { step: usize, reason: String },
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error(transparent)]
    Struct(#[from] StructError),
    #[error(transparent)]
    Present(#[from] PresentError),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Slice(#[from] SliceError),
    #[error(transparent)]
    Iso(#[from] IsoError),
}

fn sorted(mut v: SparseVec) -> SparseVec {
    v.sort_by_key(|(k, _)| *k);
    v
}

/// Upper-triangular l×l block matrix algebra with Λ_{q-p} in block (p, q).
/// Vertex (i, p) sits at index p·|V| + i, matching the window on levels
/// 0..l-1; products multiply block entries through Λ.
pub fn beilinson_matrix(st: &Stable) -> StructAlgebra {
    let q = &st.bq.quiver;
    let n = q.num_vertices();
    let l = st.l;
    let names: Vec<String> =
        (0..l as i64).flat_map(|p| (0..n).map(move |i| SepVertex::new(i, p))).map(|v| v.id(q)).collect();
    let mut alg = StructAlgebra::with_vertices(names);
    let mut entries: Vec<(usize, Path)> = Vec::new();
    let mut elem_of: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
    for t in 1..l {
        let mut ps: Vec<Path> = st.basis.cells_at(t).flat_map(|(k, _)| st.basis.basis_paths(k.0, k.1, t)).collect();
        ps.sort_by(|x, y| x.arrows.cmp(&y.arrows));
        for p in 0..l - t {
            for x in &ps {
                let e = Elem {
                    label: lifted_label(q, x, p as i64),
                    source: p * n + x.source,
                    target: (p + t) * n + x.target,
                    degree: t,
                };
                let k = alg.push_elem(e);
                elem_of.insert((p, x.arrows.clone()), k);
                entries.push((p, x.clone()));
            }
        }
    }
    for (bi, (pb, xb)) in entries.iter().enumerate() {
        for (ai, (pa, xa)) in entries.iter().enumerate() {
            if *pa != pb + xb.len() || xa.source != xb.target || pa + xa.len() >= l {
                continue;
            }
            let prod = st
                .basis
                .multiply(&LinComb::monomial(xa.clone()), &LinComb::monomial(xb.clone()))
                .expect("within the computed degrees");
            let v = prod.terms.iter().map(|(c, p)| (elem_of[&(*pb, p.arrows.clone())], c.clone())).collect();
            alg.set_product(n * l + ai, n * l + bi, sorted(v));
        }
    }
    alg
}

/// An algebra automorphism given on generators: vertex v -> vertex_perm[v],
/// arrow a -> arrows[a].1 · arrows[a].0.
#[derive(Debug, Clone, PartialEq)]
pub struct AutomorphismSpec {
    pub vertex_perm: Vec<usize>,
    pub arrows: Vec<(usize, Scalar)>,
}

impl AutomorphismSpec {
    pub fn identity(q: &Quiver) -> Self {
        AutomorphismSpec {
            vertex_perm: (0..q.num_vertices()).collect(),
            arrows: (0..q.num_arrows()).map(|a| (a, Scalar::one())).collect(),
        }
    }

    fn image(&self, q: &Quiver, p: &Path) -> (Scalar, Path) {
        let mut c = Scalar::one();
        let mut arrows = Vec::with_capacity(p.len());
        for &a in &p.arrows {
            c *= &self.arrows[a].1;
            arrows.push(self.arrows[a].0);
        }
        let path = if arrows.is_empty() {
            Path::trivial(self.vertex_perm[p.source])
        } else {
            Path::from_arrows(q, arrows).expect("checked composable")
        };
        (c, path)
    }

    fn validate(&self, bq: &BoundQuiver, basis: &GradedBasis) -> Result<(), ExtError> {
        let q = &bq.quiver;
        let bad = |s: String| Err(ExtError::InvalidAutomorphism(s));
        let mut seen = vec![false; q.num_vertices()];
        if self.vertex_perm.len() != q.num_vertices() || self.arrows.len() != q.num_arrows() {
            return bad("size mismatch".into());
        }
        for &v in &self.vertex_perm {
            if v >= seen.len() || std::mem::replace(&mut seen[v], true) {
                return bad("vertex map is not a permutation".into());
            }
        }
        let mut seen = vec![false; q.num_arrows()];
        for (a, (b, c)) in self.arrows.iter().enumerate() {
            if *b >= seen.len() || std::mem::replace(&mut seen[*b], true) || c.is_zero() {
                return bad(format!("arrow {} has no invertible image", q.arrow(a).id));
            }
            let (x, y) = (q.arrow(a), q.arrow(*b));
            if self.vertex_perm[x.source] != y.source || self.vertex_perm[x.target] != y.target {
                return bad(format!("arrow {} maps to a non-parallel arrow", x.id));
            }
        }
        for (k, rel) in bq.relations.iter().enumerate() {
            let mut acc = BTreeMap::new();
            for (c, p) in &rel.terms {
                let (d, img) = self.image(q, p);
                accumulate(&mut acc, &(c * d), &basis.normal_form(&img)?);
            }
            if !from_accumulator(acc).is_empty() {
                return bad(format!("relation {k} is not preserved"));
            }
        }
        Ok(())
    }
}

/// Matrix of σ on the element basis of `struct_from_basis(basis, top)`.
fn automorphism_matrix(basis: &GradedBasis, top: usize, sigma: &AutomorphismSpec) -> Result<Vec<SparseVec>, ExtError> {
    let q = &basis.bq.quiver;
    let paths = element_paths(basis, top);
    let mut elem_of: HashMap<(usize, usize, usize), Vec<usize>> = HashMap::new();
    for (k, p) in paths.iter().enumerate() {
        elem_of.entry((p.source, p.target, p.len())).or_default().push(k);
    }
    let mut out = Vec::with_capacity(paths.len());
    for p in &paths {
        let (c, img) = sigma.image(q, p);
        if img.is_empty() {
            out.push(vec![(img.source, Scalar::one())]);
            continue;
        }
        let nf = basis.normal_form(&img)?;
        let cell = &elem_of[&(img.source, img.target, img.len())];
        out.push(sorted(nf.into_iter().map(|(k, x)| (cell[k], x * &c)).collect()));
    }
    Ok(out)
}

/// ι(A) = A ⋉ DA with the dual of a degree-t element in degree top+1-t.
pub fn trivial_extension(a: &StructAlgebra) -> Result<StructAlgebra, ExtError> {
    extension_impl(a, a.top_degree() + 1, None)
}

/// ι(A) graded so that duals of degree-t elements sit in degree l - t.
pub fn trivial_extension_graded(a: &StructAlgebra, l: usize) -> Result<StructAlgebra, ExtError> {
    extension_impl(a, l, None)
}

/// ι_σ(A) for A = k(Q) presented by `bq`: right action on DA twisted by σ.
pub fn twisted_trivial_extension(bq: &BoundQuiver, sigma: &AutomorphismSpec) -> Result<StructAlgebra, ExtError> {
    let basis = GradedBasis::new(bq, default_maxdeg(bq))?;
    let top = basis.top_degree().ok_or(StructError::NotFiniteDimensionalWithinBound { bound: basis.bound() })?;
    sigma.validate(bq, &basis)?;
    let a = struct_from_basis(&basis, top);
    let m = automorphism_matrix(&basis, top, sigma)?;
    extension_impl(&a, top + 1, Some((&sigma.vertex_perm, &m)))
}

fn extension_impl(a: &StructAlgebra, l: usize, sigma: Option<(&[usize], &[SparseVec])>) -> Result<StructAlgebra, ExtError> {
    let n = a.num_vertices();
    let dim = a.dim();
    let mut out = StructAlgebra::with_vertices(a.vertices.clone());
    // A-part: element k of A -> index in out
    let mut amap = vec![0; dim];
    for v in 0..n {
        amap[a.idempotents[v]] = out.idempotents[v];
    }
    for (k, e) in a.elems.iter().enumerate() {
        if e.degree == 0 && a.idempotents[e.source] == k {
            continue;
        }
        amap[k] = out.push_elem(e.clone());
    }
    let mut inv_perm = (0..n).collect::<Vec<_>>();
    if let Some((perm, _)) = sigma {
        for (v, &w) in perm.iter().enumerate() {
            inv_perm[w] = v;
        }
    }
    let mut dual = vec![0; dim];
    for (k, e) in a.elems.iter().enumerate() {
        if e.degree > l {
            return Err(ExtError::GradingBound { degree: e.degree, bound: l });
        }
        let label = format!("D({})", e.label);
        dual[k] = out.push_elem(Elem { label, source: inv_perm[e.target], target: e.source, degree: l - e.degree });
    }
    let table = a.table();
    for (&(x, y), v) in &table {
        out.set_product(amap[x], amap[y], sorted(v.iter().map(|(k, c)| (amap[*k], c.clone())).collect()));
    }
    // b_y · f_k = Σ C[x][y][k] f_x and f_k · b_x = Σ C[x][y][k] f_y
    let mut left: BTreeMap<(usize, usize), BTreeMap<usize, Scalar>> = BTreeMap::new();
    let mut right: BTreeMap<(usize, usize), BTreeMap<usize, Scalar>> = BTreeMap::new();
    for (&(x, y), v) in &table {
        for (k, c) in v {
            *left.entry((y, *k)).or_default().entry(x).or_insert_with(Scalar::zero) += c;
            *right.entry((*k, x)).or_default().entry(y).or_insert_with(Scalar::zero) += c;
        }
    }
    let clean = |m: &BTreeMap<usize, Scalar>| -> SparseVec {
        m.iter().filter(|(_, c)| !c.is_zero()).map(|(f, c)| (dual[*f], c.clone())).collect()
    };
    // clear the idempotent actions set by push_elem; they are recomputed below
    for k in 0..dim {
        let e = &a.elems[k];
        out.set_product(dual[k], out.idempotents[inv_perm[e.target]], Vec::new());
        out.set_product(out.idempotents[e.source], dual[k], Vec::new());
    }
    for ((y, k), m) in &left {
        out.set_product(amap[*y], dual[*k], sorted(clean(m)));
    }
    match sigma {
        None => {
            for ((k, x), m) in &right {
                out.set_product(dual[*k], amap[*x], sorted(clean(m)));
            }
        }
        Some((_, smat)) => {
            for k in 0..dim {
                for (p, img) in smat.iter().enumerate() {
                    let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
                    for (s, c) in img {
                        if let Some(m) = right.get(&(k, *s)) {
                            for (f, d) in m {
                                *acc.entry(*f).or_insert_with(Scalar::zero) += c * d;
                            }
                        }
                    }
                    out.set_product(dual[k], amap[p], sorted(clean(&acc)));
                }
            }
        }
    }
    out.check()?;
    Ok(out)
}

/// Quiver of ι(slice algebra): the slice quiver plus dim e_a Λ^S_{l-1} e_b
/// returning arrows a -> b for each ordered pair.
pub fn trivial_ext_quiver_predict(slice_alg: &BoundQuiver, l: usize) -> Result<BoundQuiver, GradedError> {
    let basis = GradedBasis::new(slice_alg, l)?;
    let mut q = slice_alg.quiver.clone();
    let n = q.num_vertices();
    for b in 0..n {
        for a in 0..n {
            for k in 0..basis.dim(b, a, l - 1) {
                let id = format!("r{k}[{}->{}]", q.vertex_id(a), q.vertex_id(b));
                q.add_arrow(&id, a, b).expect("fresh id");
            }
        }
    }
    Ok(BoundQuiver::free(q))
}

#[derive(Debug, Clone)]
pub struct TrexsCertificate {
    /// Number of slices compared (mutations + 1).
    pub slices: usize,
    pub arrow_counts: Vec<usize>,
    pub isos: Vec<QuiverIso>,
}

fn te_presentation(amb: &Ambient, slice: &TauSlice) -> Result<(BoundQuiver, BoundQuiver), ExtError> {
    let alg = slice_algebra(amb, slice)?;
    let basis = GradedBasis::new(&alg, slice.depth() as usize + 1)?;
    let top = basis.top_degree().expect("slice algebras are finite dimensional");
    let te = trivial_extension_graded(&struct_from_basis(&basis, top), amb.l())?;
    Ok((alg, present(&te)?))
}

/// Replays `mutations` from `slice`, checking the arrow recipe for every
/// trivial extension and an isomorphism between consecutive ones.
pub fn verify_trexs(amb: &Ambient, slice: &TauSlice, mutations: &[Mutation]) -> Result<TrexsCertificate, ExtError> {
    let mut cur = slice.clone();
    let mut prev: Option<BoundQuiver> = None;
    let mut cert = TrexsCertificate { slices: 0, arrow_counts: Vec::new(), isos: Vec::new() };
    for step in 0..=mutations.len() {
        let mut moved = None;
        if step > 0 {
            let m = mutations[step - 1];
            cur = mutate(amb, &cur, m).map_err(|e| ExtError::CertificateFailed { step, reason: e.to_string() })?;
            let repl = match m.direction {
                Direction::Minus => tau_bar(&amb.st, m.vertex),
                Direction::Plus => tau_bar_inv(&amb.st, m.vertex),
            };
            moved = Some((m.vertex, repl));
        }
        let (alg, pres) = te_presentation(amb, &cur)?;
        let pred = trivial_ext_quiver_predict(&alg, amb.l())?;
        if pres.quiver.vertices() != pred.quiver.vertices() || pres.quiver.adjacency() != pred.quiver.adjacency() {
            return Err(ExtError::CertificateFailed { step, reason: "arrow recipe disagrees with presentation".into() });
        }
        if let Some(p) = prev.take() {
            let (old, new) = moved.expect("step > 0");
            let fixed: Option<Vec<usize>> = p
                .quiver
                .vertices()
                .iter()
                .map(|id| {
                    let v = amb.parse_vertex(id).ok()?;
                    pres.quiver.vertex(&amb.id(if v == old { new } else { v }))
                })
                .collect();
            let opts = IsoOptions { fixed_vertices: fixed, ..IsoOptions::default() };
            match quiver_isomorphic(&p, &pres, &opts)? {
                IsoOutcome::Iso(i) => cert.isos.push(i),
                IsoOutcome::NotIsomorphic(reason) => return Err(ExtError::CertificateFailed { step, reason }),
                IsoOutcome::Inconclusive(reason) => return Err(ExtError::Inconclusive { step, reason }),
            }
        }
        cert.arrow_counts.push(pres.quiver.num_arrows());
        cert.slices += 1;
        prev = Some(pres);
    }
    Ok(cert)
}

/// τ on arrows: arrow a -> (image arrow, scalar).
pub type ArrowTau = Vec<(usize, Scalar)>;

/// Scalar-one arrow τ on a multiplicity-free quiver.
pub fn default_arrow_tau(st: &Stable) -> Result<ArrowTau, ExtError> {
    let q = &st.bq.quiver;
    q.arrows()
        .iter()
        .map(|a| match q.arrows_between(st.tau[a.source], st.tau[a.target]).as_slice() {
            [b] => Ok((*b, Scalar::one())),
            _ => Err(ExtError::ArrowTauRequired),
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct OrbitQuiver {
    pub r: usize,
    pub bq: BoundQuiver,
    /// Representative of each vertex class, levels 0..r·l-1.
    pub vertex_reps: Vec<SepVertex>,
    /// Representative (arrow, level) of each arrow class.
    pub arrow_reps: Vec<(usize, i64)>,
}

/// Q^{T,r}: the separated quiver modulo τ̄^r, with relations the images of
/// the lifted relations.
pub fn orbit_quotient(st: &Stable, r: usize, arrow_tau: Option<ArrowTau>) -> Result<OrbitQuiver, ExtError> {
    assert!(r >= 1);
    let q = &st.bq.quiver;
    let tau_a = match arrow_tau {
        Some(t) => t,
        None => default_arrow_tau(st)?,
    };
    let sigma = AutomorphismSpec { vertex_perm: st.tau.clone(), arrows: tau_a.clone() };
    sigma.validate(&st.bq, &st.basis).map_err(|e| ExtError::InvalidArrowTau(e.to_string()))?;
    let n = q.num_vertices();
    let period = (r * st.l) as i64;
    let mut oq = Quiver::empty();
    let mut vertex_reps = Vec::new();
    for lv in 0..period {
        for i in 0..n {
            let v = SepVertex::new(i, lv);
            oq.add_vertex(&v.id(q)).unwrap();
            vertex_reps.push(v);
        }
    }
    let vidx = |v: SepVertex| (v.level as usize) * n + v.base;
    let mut arrow_reps = Vec::new();
    for lv in 0..period {
        for (k, a) in q.arrows().iter().enumerate() {
            let t = if lv + 1 < period {
                SepVertex::new(a.target, lv + 1)
            } else {
                SepVertex::new(st.tau_pow(a.target, r as i64), 0)
            };
            oq.add_arrow(&sep_id(&a.id, lv), vidx(SepVertex::new(a.source, lv)), vidx(t)).unwrap();
            arrow_reps.push((k, lv));
        }
    }
    let na = q.num_arrows();
    // (arrow, level) with level ≥ 0 -> (class arrow index, accumulated scalar)
    let class_of = |a: usize, lv: i64| -> (usize, Scalar) {
        let (mut a, mut lv, mut c) = (a, lv, Scalar::one());
        while lv >= period {
            for _ in 0..r {
                c *= &tau_a[a].1;
                a = tau_a[a].0;
            }
            lv -= period;
        }
        (lv as usize * na + a, c)
    };
    let mut rels = Vec::new();
    for lv in 0..period {
        for rel in &st.bq.relations {
            let terms = rel
                .terms
                .iter()
                .map(|(c, p)| {
                    let mut coef = c.clone();
                    let mut arrows = Vec::with_capacity(p.len());
                    for (k, &a) in p.arrows.iter().enumerate() {
                        let (x, s) = class_of(a, lv + k as i64);
                        coef *= s;
                        arrows.push(x);
                    }
                    (coef, Path::from_arrows(&oq, arrows).expect("lifted path stays composable"))
                })
                .collect();
            rels.push(LinComb::new(terms));
        }
    }
    Ok(OrbitQuiver { r, bq: BoundQuiver::new(oq, rels), vertex_reps, arrow_reps })
}

/// Repetitive algebra on S blocks: a copy A[s] of A on each block and DA
/// from block s to block s+1, with DA·DA = 0. The dual of a degree-t
/// element has degree top+1-t. Vertex (v, s) sits at index (s-1)·|A₀| + v.
pub fn repetitive_window(a: &StructAlgebra, blocks: usize) -> StructAlgebra {
    let l = a.top_degree() + 1;
    let n = a.num_vertices();
    let dim = a.dim();
    let names: Vec<String> =
        (1..=blocks).flat_map(|s| a.vertices.iter().map(move |v| format!("{v}[{s}]"))).collect();
    let mut out = StructAlgebra::with_vertices(names);
    // a_elem[s][k], d_elem[s][k] (s 0-based)
    let mut a_elem = vec![vec![0; dim]; blocks];
    let mut d_elem = vec![vec![0; dim]; blocks.saturating_sub(1)];
    for s in 0..blocks {
        for v in 0..n {
            a_elem[s][a.idempotents[v]] = out.idempotents[s * n + v];
        }
        for (k, e) in a.elems.iter().enumerate() {
            if e.degree == 0 && a.idempotents[e.source] == k {
                continue;
            }
            let label = format!("{}[{}]", e.label, s + 1);
            a_elem[s][k] = out.push_elem(Elem { label, source: s * n + e.source, target: s * n + e.target, ..e.clone() });
        }
    }
    for s in 0..blocks.saturating_sub(1) {
        for (k, e) in a.elems.iter().enumerate() {
            let label = format!("D({})[{}]", e.label, s + 1);
            d_elem[s][k] =
                out.push_elem(Elem { label, source: s * n + e.target, target: (s + 1) * n + e.source, degree: l - e.degree });
        }
    }
    let table = a.table();
    for s in 0..blocks {
        for (&(x, y), v) in &table {
            out.set_product(a_elem[s][x], a_elem[s][y], sorted(v.iter().map(|(k, c)| (a_elem[s][*k], c.clone())).collect()));
        }
    }
    for s in 0..blocks.saturating_sub(1) {
        let mut left: BTreeMap<(usize, usize), BTreeMap<usize, Scalar>> = BTreeMap::new();
        let mut right: BTreeMap<(usize, usize), BTreeMap<usize, Scalar>> = BTreeMap::new();
        for (&(x, y), v) in &table {
            for (k, c) in v {
                *left.entry((y, *k)).or_default().entry(x).or_insert_with(Scalar::zero) += c;
                *right.entry((*k, x)).or_default().entry(y).or_insert_with(Scalar::zero) += c;
            }
        }
        let d = &d_elem[s];
        let clean = |m: &BTreeMap<usize, Scalar>| -> SparseVec {
            sorted(m.iter().filter(|(_, c)| !c.is_zero()).map(|(f, c)| (d[*f], c.clone())).collect())
        };
        for k in 0..dim {
            let e = &a.elems[k];
            out.set_product(d[k], out.idempotents[s * n + e.target], Vec::new());
            out.set_product(out.idempotents[(s + 1) * n + e.source], d[k], Vec::new());
        }
        // A[s+1] acts on the left, A[s] on the right
        for ((y, k), m) in &left {
            out.set_product(a_elem[s + 1][*y], d[*k], clean(m));
        }
        for ((k, x), m) in &right {
            out.set_product(d[*k], a_elem[s][*x], clean(m));
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct RepetitiveReport {
    pub blocks: usize,
    pub dimension: usize,
    /// Connected components of the window's quiver.
    pub summands: usize,
    pub iso: QuiverIso,
}

/// Compares the repetitive window of the Beilinson algebra with the smash
/// window on levels 0..S·l-1, block s being levels (s-1)l..sl-1 with A's
/// vertex (i, p) placed at τ̄^{1-s}(i, p).
pub fn verify_repetitive(amb: &Ambient, blocks: usize) -> Result<RepetitiveReport, ExtError> {
    let st = &amb.st;
    let fail = |s: String| Err(ExtError::VerificationFailed(s));
    let n = st.num_vertices();
    let l = st.l;
    let beil = beilinson_matrix(st);
    let rep = repetitive_window(&beil, blocks);
    let win = smash_window(st, 0, (blocks * l) as i64 - 1);
    let nb = beil.num_vertices();
    let block_of = |w: usize| (w / n) / l;
    // R vertex index -> window vertex index
    let vmap: Vec<usize> = (0..blocks * nb)
        .map(|x| {
            let (s, k) = (x / nb, x % nb);
            let v = SepVertex::new(st.tau_pow(k % n, -(s as i64)), (k / n + s * l) as i64);
            v.level as usize * n + v.base
        })
        .collect();
    let (dr, dw) = (rep.dim_matrix(), win.dim_matrix());
    if dr.len() != dw.len() {
        return fail(format!("top degrees {} and {}", dr.len() - 1, dw.len() - 1));
    }
    for t in 0..dr.len() {
        for x in 0..vmap.len() {
            for y in 0..vmap.len() {
                if dr[t][x][y] != dw[t][vmap[x]][vmap[y]] {
                    return fail(format!("dimension of cell ({}, {}) in degree {t}", rep.vertices[x], rep.vertices[y]));
                }
            }
        }
    }
    for e in &win.elems {
        let (a, b) = (block_of(e.source), block_of(e.target));
        if b != a && b != a + 1 {
            return fail(format!("off-band element {}", e.label));
        }
    }
    let crossing = |k: usize| {
        let e = &win.elems[k];
        block_of(e.target) == block_of(e.source) + 1
    };
    for ((x, y), _) in win.table() {
        if crossing(x) && crossing(y) {
            return fail(format!("M-block product {} · {} is nonzero", win.elems[x].label, win.elems[y].label));
        }
    }
    // dim e_y M[s+1,s] e_x = dim e_x A e_y (over all degrees)
    let da = beil.dim_matrix();
    for s in 0..blocks - 1 {
        for x in 0..nb {
            for y in 0..nb {
                let wx = vmap[s * nb + x];
                let wy = vmap[(s + 1) * nb + y];
                let m: usize = dw.iter().map(|d| d[wx][wy]).sum();
                let a: usize = da.iter().map(|d| d[y][x]).sum();
                if m != a {
                    return fail(format!("dual dimension at block {}, ({}, {})", s + 1, beil.vertices[x], beil.vertices[y]));
                }
            }
        }
    }
    let (pr, pw) = (present(&rep)?, present(&win)?);
    let opts = IsoOptions { fixed_vertices: Some(vmap), ..IsoOptions::default() };
    let iso = match quiver_isomorphic(&pr, &pw, &opts)? {
        IsoOutcome::Iso(i) => i,
        IsoOutcome::NotIsomorphic(why) | IsoOutcome::Inconclusive(why) => return fail(why),
    };
    let summands = pw.quiver.undirected_components().len();
    Ok(RepetitiveReport { blocks, dimension: rep.dim(), summands, iso })
}
