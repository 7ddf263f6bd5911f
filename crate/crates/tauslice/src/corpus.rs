//! Generators for the example families shipped in `corpus/`.

use crate::linalg::int;
use crate::mckay::{mckay_bound_quiver, Flavor};
use crate::quiver::{BoundQuiver, LinComb, Path, Quiver};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn path(q: &Quiver, ids: &[&str]) -> Path {
    let arrows = ids.iter().map(|id| q.arrow_by_id(id).expect("known arrow")).collect();
    Path::from_arrows(q, arrows).expect("composable")
}

/// One vertex `v`, loop `x`, relation x^{l+1}.
pub fn loop_quiver(l: usize) -> BoundQuiver {
    let q = Quiver::new(&["v"], &[("x", "v", "v")]).unwrap();
    let rel = LinComb::monomial(Path { source: 0, target: 0, arrows: vec![0; l + 1] });
    BoundQuiver::new(q, vec![rel])
}

/// Zigzag algebra on the double quiver of A_n: a_i: i -> i+1, b_i: i+1 -> i.
/// Length-2 paths between distinct vertices vanish and the two loops at an
/// interior vertex agree. For n = 2 the relations are aba and bab.
pub fn zigzag(n: usize) -> BoundQuiver {
    assert!(n >= 2);
    let verts: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let mut arrows = Vec::new();
    for i in 1..n {
        arrows.push((format!("a{i}"), i.to_string(), (i + 1).to_string()));
        arrows.push((format!("b{i}"), (i + 1).to_string(), i.to_string()));
    }
    let q = Quiver::new(&verts, &arrows).unwrap();
    let mut rels = Vec::new();
    if n == 2 {
        rels.push(LinComb::monomial(path(&q, &["a1", "b1", "a1"])));
        rels.push(LinComb::monomial(path(&q, &["b1", "a1", "b1"])));
        return BoundQuiver::new(q, rels);
    }
    for i in 1..n - 1 {
        let (a, an) = (format!("a{i}"), format!("a{}", i + 1));
        let (b, bn) = (format!("b{i}"), format!("b{}", i + 1));
        rels.push(LinComb::monomial(path(&q, &[&a, &an])));
        rels.push(LinComb::monomial(path(&q, &[&bn, &b])));
    }
    for i in 2..n {
        let (a, b) = (format!("a{i}"), format!("b{i}"));
        let (ap, bp) = (format!("a{}", i - 1), format!("b{}", i - 1));
        rels.push(LinComb::new(vec![(int(1), path(&q, &[&a, &b])), (int(-1), path(&q, &[&bp, &ap]))]));
    }
    BoundQuiver::new(q, rels)
}

/// Path algebra of the linear quiver 1 -> 2 -> ... -> n.
pub fn linear_a(n: usize) -> BoundQuiver {
    let verts: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let arrows: Vec<(String, String, String)> =
        (1..n).map(|i| (format!("a{i}"), i.to_string(), (i + 1).to_string())).collect();
    BoundQuiver::free(Quiver::new(&verts, &arrows).unwrap())
}

/// Cyclic quiver on n vertices with every path of length l+1 zero.
pub fn cyclic_nakayama(n: usize, l: usize) -> BoundQuiver {
    let verts: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let arrows: Vec<(String, String, String)> =
        (1..=n).map(|i| (format!("c{i}"), i.to_string(), (i % n + 1).to_string())).collect();
    let q = Quiver::new(&verts, &arrows).unwrap();
    let rels = (0..n)
        .map(|s| {
            let arrows = (0..=l).map(|k| (s + k) % n).collect();
            LinComb::monomial(Path::from_arrows(&q, arrows).unwrap())
        })
        .collect();
    BoundQuiver::new(q, rels)
}

/// Same bound quiver with vertices listed in a seeded random order.
/// Returns the relabeled quiver and `perm[old] = new`.
pub fn relabel(bq: &BoundQuiver, seed: u64) -> (BoundQuiver, Vec<usize>) {
    let q = &bq.quiver;
    let n = q.num_vertices();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut perm = vec![0; n];
    for (new, &old) in order.iter().enumerate() {
        perm[old] = new;
    }
    let verts: Vec<&str> = order.iter().map(|&o| q.vertex_id(o)).collect();
    let arrows: Vec<(&str, &str, &str)> =
        q.arrows().iter().map(|a| (a.id.as_str(), q.vertex_id(a.source), q.vertex_id(a.target))).collect();
    let nq = Quiver::new(&verts, &arrows).unwrap();
    let rels = bq
        .relations
        .iter()
        .map(|r| {
            LinComb::new(
                r.terms
                    .iter()
                    .map(|(c, p)| {
                        (c.clone(), Path { source: perm[p.source], target: perm[p.target], arrows: p.arrows.clone() })
                    })
                    .collect(),
            )
        })
        .collect();
    (BoundQuiver { quiver: nq, relations: rels, homogeneous: bq.homogeneous }, perm)
}

/// Seeded random stable quiver: a relabeled cyclic Nakayama algebra.
pub fn random_stable(seed: u64) -> BoundQuiver {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=6);
    let l = rng.gen_range(1..=4);
    relabel(&cyclic_nakayama(n, l), seed ^ 0x9e37).0
}

/// Small stable examples used by unit-level property tests.
pub fn small_battery() -> Vec<(String, BoundQuiver)> {
    vec![
        ("loop_l1".into(), loop_quiver(1)),
        ("loop_l2".into(), loop_quiver(2)),
        ("loop_l3".into(), loop_quiver(3)),
        ("zigzag_a2".into(), zigzag(2)),
        ("zigzag_a3".into(), zigzag(3)),
        ("zigzag_a5".into(), zigzag(5)),
        ("exterior_m1_r2".into(), mckay_bound_quiver(1, 2, Flavor::Exterior)),
        ("exterior_m2_r1".into(), mckay_bound_quiver(2, 1, Flavor::Exterior)),
        ("cyclic_n3_l1".into(), cyclic_nakayama(3, 1)),
        ("cyclic_n3_l2".into(), cyclic_nakayama(3, 2)),
        ("cyclic_n2_l3".into(), cyclic_nakayama(2, 3)),
    ]
}

/// The stable battery: loops l ≤ 5, zigzag A_n for n ≤ 6, exterior McKay
/// quivers for (m, r) in {(1, ≤5), (2, ≤3), (3, ≤2)}, and cyclic Nakayama.
pub fn battery() -> Vec<(String, BoundQuiver)> {
    let mut out = Vec::new();
    for l in 1..=5 {
        out.push((format!("loop_l{l}"), loop_quiver(l)));
    }
    for n in 2..=6 {
        out.push((format!("zigzag_a{n}"), zigzag(n)));
    }
    for (m, rmax) in [(1, 5), (2, 3), (3, 2)] {
        for r in 1..=rmax {
            out.push((format!("exterior_m{m}_r{r}"), mckay_bound_quiver(m, r, Flavor::Exterior)));
        }
    }
    for (n, l) in [(3, 1), (3, 2), (2, 3), (4, 2)] {
        out.push((format!("cyclic_n{n}_l{l}"), cyclic_nakayama(n, l)));
    }
    out
}

/// Files shipped in `corpus/`, by name.
pub fn corpus_files() -> Vec<(String, BoundQuiver)> {
    let mut out = Vec::new();
    for l in 1..=5 {
        out.push((format!("loop_l{l}.json"), loop_quiver(l)));
    }
    for n in 2..=6 {
        out.push((format!("zigzag_a{n}.json"), zigzag(n)));
    }
    for (n, l) in [(3, 1), (4, 1), (3, 2), (2, 3)] {
        out.push((format!("cyclic_n{n}_l{l}.json"), cyclic_nakayama(n, l)));
    }
    for (m, r) in [(1, 2), (2, 1), (2, 2), (3, 1)] {
        out.push((format!("mckay_exterior_m{m}_r{r}.json"), mckay_bound_quiver(m, r, Flavor::Exterior)));
        out.push((format!("mckay_cubic_m{m}_r{r}.json"), mckay_bound_quiver(m, r, Flavor::Cubic)));
    }
    out.push(("linear_a3.json".into(), linear_a(3)));
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}
