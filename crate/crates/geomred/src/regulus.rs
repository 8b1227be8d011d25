//! Reguli: q+1 pairwise disjoint s-spaces such that any line meeting three
//! elements meets all of them. Covers transversal lines through a point,
//! reguli arising from sublines under field reduction, and spans of
//! transversal lines.

use thiserror::Error;

use crate::field::FieldCtx;
use crate::projective::{
    contains_point, is_disjoint, meet, points_of, span, PPoint, Subspace,
};
use crate::reduction::ReductionMap;
use crate::subgeometry::Subgeometry;

#[derive(Debug, Error)]
pub enum RegulusError {
    #[error("input subspaces are not pairwise disjoint")]
    NotDisjoint,
    #[error("input subspaces do not all have the same dimension")]
    MixedDimensions,
    #[error("point lies outside the first subspace")]
    PointOutside,
    #[error("no transversal line exists through the point")]
    NoTransversal,
    #[error("subline expected: got a subgeometry of dimension {0}")]
    NotASubline(i64),
    #[error("field reduction of the subline failed regulus validation (upstream bug)")]
    ValidationFailed,
    #[error("need between 1 and s+1 points, got {0}")]
    BadPointCount(usize),
    #[error("points are not projectively independent")]
    DependentPoints,
    #[error("points do not all lie in one element of the regulus")]
    PointsNotInOneElement,
}

/// A validated regulus.
#[derive(Debug, Clone)]
pub struct Regulus {
    s: usize,
    elements: Vec<Subspace>,
}

impl Regulus {
    pub fn elements(&self) -> &[Subspace] {
        &self.elements
    }

    pub fn s(&self) -> usize {
        self.s
    }
}

/// The unique line through S (a point of sigma1) meeting sigma2 and sigma3,
/// computed as span(S, T) with T the point where <S, sigma2> meets sigma3.
pub fn transversal_through(
    ctx: &FieldCtx,
    sigma1: &Subspace,
    sigma2: &Subspace,
    sigma3: &Subspace,
    s_pt: &PPoint,
) -> Result<Subspace, RegulusError> {
    if sigma1.pdim() != sigma2.pdim() || sigma2.pdim() != sigma3.pdim() {
        return Err(RegulusError::MixedDimensions);
    }
    if !is_disjoint(ctx, sigma1, sigma2)
        || !is_disjoint(ctx, sigma1, sigma3)
        || !is_disjoint(ctx, sigma2, sigma3)
    {
        return Err(RegulusError::NotDisjoint);
    }
    if !contains_point(ctx, sigma1, s_pt) {
        return Err(RegulusError::PointOutside);
    }
    let s_sub = s_pt.to_subspace();
    let t = meet(ctx, &span(ctx, &s_sub, sigma2), sigma3);
    if t.pdim() != 0 {
        return Err(RegulusError::NoTransversal);
    }
    Ok(span(ctx, &s_sub, &t))
}

/// Field reduction of an F_q-subline of PG(1,q^{s+1}): q+1 pairwise disjoint
/// s-spaces forming a regulus. Validation is part of construction.
pub fn regulus_from_subline(
    rm: &ReductionMap,
    subline: &Subgeometry,
) -> Result<Regulus, RegulusError> {
    if subline.pdim() != 1 {
        return Err(RegulusError::NotASubline(subline.pdim()));
    }
    assert_eq!(rm.t() as usize, subline.ambient_n(), "reduction map domain mismatch");
    let elements = rm.fr_pointset(subline.points());
    if !is_regulus(rm.small(), &elements) {
        return Err(RegulusError::ValidationFailed);
    }
    Ok(Regulus {
        s: rm.s() as usize,
        elements,
    })
}

/// Checks both regulus conditions: q+1 pairwise disjoint s-spaces spanning a
/// (2s+1)-space, and transversal closure. Closure is checked by generating
/// the transversal through every point of the first element with respect to
/// the first three elements, and testing incidence with every element.
pub fn is_regulus(ctx: &FieldCtx, elements: &[Subspace]) -> bool {
    if elements.len() != ctx.order() as usize + 1 {
        return false;
    }
    let s = elements[0].pdim();
    if s < 0 || elements.iter().any(|e| e.pdim() != s) {
        return false;
    }
    for (i, a) in elements.iter().enumerate() {
        for b in elements.iter().skip(i + 1) {
            if !is_disjoint(ctx, a, b) {
                return false;
            }
        }
    }
    // The elements must span a (2s+1)-space (the ambient of the definition,
    // possibly embedded in a larger space).
    let total = elements
        .iter()
        .fold(Subspace::empty(elements[0].ambient_n()), |acc, e| {
            span(ctx, &acc, e)
        });
    if total.pdim() != 2 * s + 1 {
        return false;
    }
    for s_pt in points_of(ctx, &elements[0]) {
        let line = match transversal_through(ctx, &elements[0], &elements[1], &elements[2], &s_pt)
        {
            Ok(l) => l,
            Err(_) => return false,
        };
        for e in elements {
            if meet(ctx, &line, e).pdim() != 0 {
                return false;
            }
        }
    }
    true
}

/// The greedy lexicographically-first independent k-subset of the points of a
/// subspace, in the deterministic points_of order.
pub fn first_independent_points(ctx: &FieldCtx, a: &Subspace, k: usize) -> Vec<PPoint> {
    let mut out: Vec<PPoint> = Vec::with_capacity(k);
    let mut acc = Subspace::empty(a.ambient_n());
    for p in points_of(ctx, a) {
        if contains_point(ctx, &acc, &p) {
            continue;
        }
        acc = span(ctx, &acc, &p.to_subspace());
        out.push(p);
        if out.len() == k {
            break;
        }
    }
    out
}

/// Span of the transversal lines through k independent points of one regulus
/// element: a (2k-1)-space meeting every element exactly in a (k-1)-space.
pub fn transversal_span(
    ctx: &FieldCtx,
    reg: &Regulus,
    pts: &[PPoint],
) -> Result<Subspace, RegulusError> {
    let k = pts.len();
    if k < 1 || k > reg.s + 1 {
        return Err(RegulusError::BadPointCount(k));
    }
    let home = reg
        .elements
        .iter()
        .position(|e| contains_point(ctx, e, &pts[0]))
        .ok_or(RegulusError::PointsNotInOneElement)?;
    for p in pts.iter().skip(1) {
        if !contains_point(ctx, &reg.elements[home], p) {
            return Err(RegulusError::PointsNotInOneElement);
        }
    }
    let stacked = Subspace::from_points(ctx, reg.elements[0].ambient_n(), pts);
    if stacked.rank() != k {
        return Err(RegulusError::DependentPoints);
    }
    let mut others = reg.elements.iter().enumerate().filter(|(i, _)| *i != home);
    let (_, sb) = others.next().expect("regulus has at least 3 elements");
    let (_, sc) = others.next().expect("regulus has at least 3 elements");

    let mut total = Subspace::empty(reg.elements[0].ambient_n());
    for p in pts {
        let line = transversal_through(ctx, &reg.elements[home], sb, sc, p)?;
        total = span(ctx, &total, &line);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldElem;
    use crate::projective::enumerate_subspaces;
    use crate::subgeometry::Subgeometry;

    fn subline_regulus(q: u32, s: u32) -> (ReductionMap, Regulus) {
        let rm = ReductionMap::new(q, s, 1).unwrap();
        let c = Subgeometry::canonical(&rm, 1, 1);
        let reg = regulus_from_subline(&rm, &c).unwrap();
        (rm, reg)
    }

    #[test]
    fn canonical_subline_regulus_pg32() {
        let (rm, reg) = subline_regulus(2, 1);
        assert_eq!(reg.elements().len(), 3);
        for e in reg.elements() {
            assert_eq!(e.pdim(), 1);
        }
        assert!(is_regulus(rm.small(), reg.elements()));
    }

    #[test]
    fn subline_regulus_pg33_and_pg52() {
        let (rm, reg) = subline_regulus(3, 1);
        assert_eq!(reg.elements().len(), 4);
        assert!(is_regulus(rm.small(), reg.elements()));

        let (rm, reg) = subline_regulus(2, 2);
        assert_eq!(reg.elements().len(), 3);
        for e in reg.elements() {
            assert_eq!(e.pdim(), 2);
        }
        assert!(is_regulus(rm.small(), reg.elements()));
    }

    #[test]
    fn transversal_uniqueness_brute_force() {
        let (rm, reg) = subline_regulus(2, 1);
        let ctx = rm.small();
        let [s1, s2, s3] = [&reg.elements()[0], &reg.elements()[1], &reg.elements()[2]];
        let lines = enumerate_subspaces(ctx, 3, 1, 1_000_000).unwrap();
        for s_pt in points_of(ctx, s1) {
            let t = transversal_through(ctx, s1, s2, s3, &s_pt).unwrap();
            // Brute force: lines through S meeting both other elements.
            let hits: Vec<_> = lines
                .iter()
                .filter(|l| {
                    contains_point(ctx, l, &s_pt)
                        && meet(ctx, l, s2).pdim() == 0
                        && meet(ctx, l, s3).pdim() == 0
                })
                .collect();
            assert_eq!(hits.len(), 1);
            assert_eq!(hits[0], &t);
            // The transversal meets each regulus element in exactly a point.
            for e in reg.elements() {
                assert_eq!(meet(ctx, &t, e).pdim(), 0);
            }
        }
    }

    #[test]
    fn transversal_point_distribution() {
        let (rm, reg) = subline_regulus(2, 1);
        let ctx = rm.small();
        let s_pt = points_of(ctx, &reg.elements()[0])[0].clone();
        let t = transversal_through(
            ctx,
            &reg.elements()[0],
            &reg.elements()[1],
            &reg.elements()[2],
            &s_pt,
        )
        .unwrap();
        // q+1 points of the line distribute one per regulus element.
        let pts = points_of(ctx, &t);
        assert_eq!(pts.len(), 3);
        for e in reg.elements() {
            let on_e = pts.iter().filter(|p| contains_point(ctx, e, p)).count();
            assert_eq!(on_e, 1);
        }
    }

    #[test]
    fn transversal_errors() {
        let (rm, reg) = subline_regulus(2, 1);
        let ctx = rm.small();
        let s_pt = points_of(ctx, &reg.elements()[1])[0].clone();
        assert!(matches!(
            transversal_through(ctx, &reg.elements()[0], &reg.elements()[1], &reg.elements()[2], &s_pt),
            Err(RegulusError::PointOutside)
        ));
        assert!(matches!(
            transversal_through(ctx, &reg.elements()[0], &reg.elements()[0], &reg.elements()[2], &s_pt),
            Err(RegulusError::NotDisjoint)
        ));
    }

    #[test]
    fn is_regulus_rejects_wrong_cardinality() {
        let (rm, reg) = subline_regulus(2, 1);
        let ctx = rm.small();
        let mut too_few = reg.elements().to_vec();
        too_few.pop();
        assert!(!is_regulus(ctx, &too_few));
    }

    #[test]
    fn is_regulus_rejects_spoiled_element() {
        // Swap one element of a PG(3,3) regulus for a line disjoint from the
        // others but off the regulus; closure must fail.
        let (rm, reg) = subline_regulus(3, 1);
        let ctx = rm.small();
        let lines = enumerate_subspaces(ctx, 3, 1, 1_000_000).unwrap();
        let kept = &reg.elements()[..3];
        let mut found = None;
        for l in &lines {
            if kept.iter().all(|e| is_disjoint(ctx, e, l)) && l != &reg.elements()[3] {
                found = Some(l.clone());
                break;
            }
        }
        let spoiler = found.expect("a skew line off the regulus exists");
        let mut spoiled = kept.to_vec();
        spoiled.push(spoiler);
        assert!(!is_regulus(ctx, &spoiled));
    }

    #[test]
    fn transversal_span_base_case_is_a_line() {
        let (rm, reg) = subline_regulus(2, 1);
        let ctx = rm.small();
        let pts = first_independent_points(ctx, &reg.elements()[0], 1);
        let t = transversal_span(ctx, &reg, &pts).unwrap();
        assert_eq!(t.pdim(), 1);
    }

    #[test]
    fn transversal_span_k2_pg32() {
        // q=2, s=1, k=2: the span is the whole PG(3,2) and meets each line of
        // the regulus in a 1-space.
        let (rm, reg) = subline_regulus(2, 1);
        let ctx = rm.small();
        let pts = first_independent_points(ctx, &reg.elements()[0], 2);
        let t = transversal_span(ctx, &reg, &pts).unwrap();
        assert_eq!(t.pdim(), 3);
        for e in reg.elements() {
            assert_eq!(meet(ctx, &t, e).pdim(), 1);
        }
    }

    #[test]
    fn transversal_span_k2_pg52() {
        // q=2, s=2, k=2: a 3-space meeting each plane of the regulus in a line.
        let (rm, reg) = subline_regulus(2, 2);
        let ctx = rm.small();
        let pts = first_independent_points(ctx, &reg.elements()[0], 2);
        let t = transversal_span(ctx, &reg, &pts).unwrap();
        assert_eq!(t.pdim(), 3);
        for e in reg.elements() {
            assert_eq!(meet(ctx, &t, e).pdim(), 1);
        }
    }

    #[test]
    fn transversal_span_input_validation() {
        let (rm, reg) = subline_regulus(2, 1);
        let ctx = rm.small();
        assert!(matches!(
            transversal_span(ctx, &reg, &[]),
            Err(RegulusError::BadPointCount(0))
        ));
        // Points from different elements.
        let p0 = points_of(ctx, &reg.elements()[0])[0].clone();
        let p1 = points_of(ctx, &reg.elements()[1])[0].clone();
        assert!(matches!(
            transversal_span(ctx, &reg, &[p0.clone(), p1]),
            Err(RegulusError::PointsNotInOneElement)
        ));
        // Duplicated point is dependent.
        assert!(matches!(
            transversal_span(ctx, &reg, &[p0.clone(), p0]),
            Err(RegulusError::DependentPoints)
        ));
    }

    #[test]
    fn rejects_non_subline() {
        let rm = ReductionMap::new(2, 1, 1).unwrap();
        let pt = Subgeometry::from_vectors(&rm, vec![vec![FieldElem::ONE, FieldElem::ZERO]])
            .unwrap();
        assert!(matches!(
            regulus_from_subline(&rm, &pt),
            Err(RegulusError::NotASubline(0))
        ));
    }
}
