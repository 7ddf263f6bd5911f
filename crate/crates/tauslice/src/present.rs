//! Bound-quiver presentation of a graded structure-constant algebra.

use crate::linalg::{Scalar, SparseVec};
use crate::quiver::{kernel_relations, BoundQuiver, Path, Quiver};
use crate::structalg::StructAlgebra;
use num_traits::One;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentError {
    #[error("degree-0 part is not spanned by the vertex idempotents")]
    DegreeZeroNotSemisimple,
    #[error("degree {0} is not generated by degree 1")]
    NotGeneratedInDegreeOne(usize),
}

/// Arrows are the degree-1 basis elements (ids from their labels); relations
/// are degreewise minimal generators of the kernel of path evaluation.
pub fn present(a: &StructAlgebra) -> Result<BoundQuiver, PresentError> {
    let n = a.num_vertices();
    let degree0 = a.elems.iter().filter(|e| e.degree == 0).count();
    let idem: BTreeSet<usize> = a.idempotents.iter().copied().collect();
    if degree0 != n || idem.len() != n || idem.iter().any(|&k| a.elems[k].degree != 0) {
        return Err(PresentError::DegreeZeroNotSemisimple);
    }
    let mut q = Quiver::empty();
    for v in &a.vertices {
        q.add_vertex(v).expect("distinct vertex labels");
    }
    let mut arrow_elem = Vec::new();
    for (k, e) in a.elems.iter().enumerate() {
        if e.degree == 1 {
            let mut id = e.label.clone();
            let mut bump = 1;
            while q.arrow_by_id(&id).is_some() {
                bump += 1;
                id = format!("{}#{bump}", e.label);
            }
            q.add_arrow(&id, e.source, e.target).unwrap();
            arrow_elem.push(k);
        }
    }
    let top = a.top_degree();
    // Generation in degree one, per degree.
    for t in 2..=top {
        let mut span = crate::linalg::Echelon::new();
        for (x, ex) in a.elems.iter().enumerate() {
            if ex.degree != 1 {
                continue;
            }
            for (y, ey) in a.elems.iter().enumerate() {
                if ey.degree == t - 1 && ey.target == ex.source {
                    span.insert(a.mul_basis(x, y));
                }
            }
        }
        let want = a.elems.iter().filter(|e| e.degree == t).count();
        if span.rank() != want {
            return Err(PresentError::NotGeneratedInDegreeOne(t));
        }
    }
    let eval = |p: &Path| -> Result<SparseVec, PresentError> {
        let mut v: SparseVec = vec![(arrow_elem[p.arrows[0]], Scalar::one())];
        for &ar in &p.arrows[1..] {
            v = a.mul(&vec![(arrow_elem[ar], Scalar::one())], &v);
            if v.is_empty() {
                break;
            }
        }
        Ok(v)
    };
    let relations = kernel_relations(&q, top + 1, eval)?;
    Ok(BoundQuiver::new(q, relations))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::graded::GradedBasis;
    use crate::structalg::{struct_from_bound, Elem};
    use proptest::prelude::*;

    #[test]
    fn dual_numbers() {
        let mut a = StructAlgebra::with_vertices(vec!["v".into()]);
        a.push_elem(Elem { label: "x".into(), source: 0, target: 0, degree: 1 });
        let bq = present(&a).unwrap();
        assert_eq!(bq.quiver.num_arrows(), 1);
        assert_eq!(bq.relations.len(), 1);
        assert_eq!(bq.relations[0].terms[0].1.arrows, vec![0, 0]);
    }

    #[test]
    fn non_semisimple_degree_zero() {
        let mut a = StructAlgebra::with_vertices(vec!["v".into()]);
        a.push_elem(Elem { label: "z".into(), source: 0, target: 0, degree: 0 });
        assert_eq!(present(&a), Err(PresentError::DegreeZeroNotSemisimple));
    }

    #[test]
    fn not_generated_in_degree_one() {
        let mut a = StructAlgebra::with_vertices(vec!["v".into()]);
        a.push_elem(Elem { label: "y".into(), source: 0, target: 0, degree: 2 });
        assert_eq!(present(&a), Err(PresentError::NotGeneratedInDegreeOne(2)));
    }

    fn same_ideal(a: &BoundQuiver, b: &BoundQuiver, maxdeg: usize) -> bool {
        let ga = GradedBasis::new(a, maxdeg).unwrap();
        let gb = GradedBasis::new(b, maxdeg).unwrap();
        (0..=maxdeg).all(|t| {
            ga.cells_at(t).all(|(k, c)| {
                let other = gb.cell(k.0, k.1, t).unwrap();
                c.ideal.rank() == other.ideal.rank() && c.ideal.rows().all(|r| other.ideal.contains(r))
            })
        })
    }

    proptest! {
        #[test]
        fn present_recovers_the_ideal(k in 0usize..corpus::small_battery().len()) {
            let (_, bq) = &corpus::small_battery()[k];
            let (alg, basis) = struct_from_bound(bq, 12).unwrap();
            let p = present(&alg).unwrap();
            prop_assert_eq!(p.quiver.vertices(), bq.quiver.vertices());
            prop_assert_eq!(p.quiver.arrows(), bq.quiver.arrows());
            let top = basis.top_degree().unwrap();
            prop_assert!(same_ideal(&p, bq, top + 1));
            let pb = GradedBasis::new(&p, top + 1).unwrap();
            prop_assert_eq!(pb.dims(), basis.dims());
        }
    }
}
