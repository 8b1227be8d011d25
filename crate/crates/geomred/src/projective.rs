//! Projective subspace algebra over PG(n,q).
//!
//! A subspace is held as the RREF of a generator matrix, which makes equality
//! a plain matrix comparison. The empty subspace has rank 0 and projective
//! dimension -1. Duality is the annihilator under the standard dot product;
//! meets are computed as the dual of the span of the duals, so one kernel
//! routine carries all the elimination work.

use thiserror::Error;

use crate::field::{FieldCtx, FieldElem};
use crate::linalg::Matrix;

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("enumeration of {required} subspaces exceeds the budget {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
}

/// A point of PG(n,q): nonzero coordinates normalized so the first nonzero
/// entry is 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PPoint {
    ambient_n: usize,
    coords: Vec<FieldElem>,
}

impl PPoint {
    /// Normalizes a nonzero coordinate vector. Panics on the zero vector.
    pub fn normalize(ctx: &FieldCtx, coords: &[FieldElem]) -> PPoint {
        let lead = coords
            .iter()
            .position(|c| !c.is_zero())
            .expect("zero vector is not a projective point");
        let inv = ctx.inv(coords[lead]);
        let coords: Vec<FieldElem> = coords.iter().map(|&c| ctx.mul(c, inv)).collect();
        PPoint {
            ambient_n: coords.len() - 1,
            coords,
        }
    }

    pub fn ambient_n(&self) -> usize {
        self.ambient_n
    }

    pub fn coords(&self) -> &[FieldElem] {
        &self.coords
    }

    /// The standard basis point e_i of PG(n,q).
    pub fn unit(n: usize, i: usize) -> PPoint {
        let mut coords = vec![FieldElem::ZERO; n + 1];
        coords[i] = FieldElem::ONE;
        PPoint {
            ambient_n: n,
            coords,
        }
    }

    pub fn to_subspace(&self) -> Subspace {
        Subspace {
            ambient_n: self.ambient_n,
            basis: Matrix::from_rows(vec![self.coords.clone()], self.ambient_n + 1),
        }
    }

    pub fn label(&self) -> String {
        join_codes(&self.coords)
    }
}

/// A projective subspace of PG(n,q) in canonical RREF form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient_n: usize,
    basis: Matrix,
}

impl Subspace {
    pub fn empty(ambient_n: usize) -> Subspace {
        Subspace {
            ambient_n,
            basis: Matrix::zeros(0, ambient_n + 1),
        }
    }

    pub fn whole(ambient_n: usize) -> Subspace {
        Subspace {
            ambient_n,
            basis: Matrix::identity(ambient_n + 1),
        }
    }

    /// Builds the subspace spanned by the given row vectors.
    pub fn from_rows(ctx: &FieldCtx, ambient_n: usize, rows: Vec<Vec<FieldElem>>) -> Subspace {
        let mut m = Matrix::from_rows(rows, ambient_n + 1);
        m.rref(ctx);
        Subspace {
            ambient_n,
            basis: m,
        }
    }

    pub fn from_matrix(ctx: &FieldCtx, m: Matrix) -> Subspace {
        let ambient_n = m.ncols() - 1;
        let mut m = m;
        m.rref(ctx);
        Subspace {
            ambient_n,
            basis: m,
        }
    }

    pub fn from_points(ctx: &FieldCtx, ambient_n: usize, points: &[PPoint]) -> Subspace {
        Subspace::from_rows(
            ctx,
            ambient_n,
            points.iter().map(|p| p.coords().to_vec()).collect(),
        )
    }

    pub fn ambient_n(&self) -> usize {
        self.ambient_n
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.nrows()
    }

    /// Projective dimension; -1 for the empty subspace.
    pub fn pdim(&self) -> i64 {
        self.basis.nrows() as i64 - 1
    }

    pub fn is_empty(&self) -> bool {
        self.basis.nrows() == 0
    }

    pub fn label(&self) -> String {
        if self.is_empty() {
            return "-".to_string();
        }
        (0..self.basis.nrows())
            .map(|i| join_codes(self.basis.row(i)))
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Appends zero coordinates on the right, embedding PG(n,q) into a larger
    /// space. RREF is preserved.
    pub fn pad_columns(&self, extra: usize) -> Subspace {
        let mut m = Matrix::zeros(self.basis.nrows(), self.basis.ncols() + extra);
        for i in 0..self.basis.nrows() {
            for j in 0..self.basis.ncols() {
                m.set(i, j, self.basis.at(i, j));
            }
        }
        Subspace {
            ambient_n: self.ambient_n + extra,
            basis: m,
        }
    }
}

fn join_codes(v: &[FieldElem]) -> String {
    v.iter()
        .map(|c| c.code().to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Smallest subspace containing both arguments.
pub fn span(ctx: &FieldCtx, a: &Subspace, b: &Subspace) -> Subspace {
    assert_eq!(a.ambient_n, b.ambient_n, "ambient mismatch");
    let mut m = a.basis.vstack(&b.basis);
    m.rref(ctx);
    Subspace {
        ambient_n: a.ambient_n,
        basis: m,
    }
}

/// Annihilator of the row space under the standard dot product.
pub fn dual(ctx: &FieldCtx, a: &Subspace) -> Subspace {
    Subspace {
        ambient_n: a.ambient_n,
        basis: a.basis.kernel(ctx),
    }
}

/// Intersection, computed as the dual of the span of the duals.
pub fn meet(ctx: &FieldCtx, a: &Subspace, b: &Subspace) -> Subspace {
    assert_eq!(a.ambient_n, b.ambient_n, "ambient mismatch");
    dual(ctx, &span(ctx, &dual(ctx, a), &dual(ctx, b)))
}

/// Whether b is contained in a.
pub fn contains(ctx: &FieldCtx, a: &Subspace, b: &Subspace) -> bool {
    assert_eq!(a.ambient_n, b.ambient_n, "ambient mismatch");
    if b.rank() > a.rank() {
        return false;
    }
    for i in 0..b.basis.nrows() {
        let mut v = b.basis.row(i).to_vec();
        a.basis.reduce_vector(ctx, &mut v);
        if v.iter().any(|c| !c.is_zero()) {
            return false;
        }
    }
    true
}

pub fn contains_point(ctx: &FieldCtx, a: &Subspace, p: &PPoint) -> bool {
    assert_eq!(a.ambient_n, p.ambient_n(), "ambient mismatch");
    let mut v = p.coords().to_vec();
    a.basis.reduce_vector(ctx, &mut v);
    v.iter().all(|c| c.is_zero())
}

pub fn is_disjoint(ctx: &FieldCtx, a: &Subspace, b: &Subspace) -> bool {
    meet(ctx, a, b).is_empty()
}

/// All points of a nonempty subspace, in a fixed deterministic order: for
/// every basis row k in turn, the combinations `row_k + sum(c_i * row_i)`
/// over later rows i > k, with the coefficient tuple advancing in code order.
/// The first point is always the first basis row.
pub fn points_of(ctx: &FieldCtx, a: &Subspace) -> Vec<PPoint> {
    assert!(!a.is_empty(), "points_of on the empty subspace");
    let r = a.rank();
    let cols = a.ambient_n + 1;
    let order = ctx.order() as u64;
    let mut out = Vec::new();
    for k in 0..r {
        let tail = r - 1 - k;
        let mut counter = vec![0u32; tail];
        loop {
            let mut coords = a.basis.row(k).to_vec();
            for (idx, &code) in counter.iter().enumerate() {
                let c = FieldElem::from_code(code);
                if !c.is_zero() {
                    let src = a.basis.row(k + 1 + idx);
                    for j in 0..cols {
                        coords[j] = ctx.add(coords[j], ctx.mul(c, src[j]));
                    }
                }
            }
            debug_assert!(!coords[..].iter().all(|c| c.is_zero()));
            out.push(PPoint {
                ambient_n: a.ambient_n,
                coords,
            });
            // Advance the counter, rightmost digit fastest.
            let mut pos = tail;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                counter[pos] += 1;
                if (counter[pos] as u64) < order {
                    break;
                }
                counter[pos] = 0;
                if pos == 0 {
                    break;
                }
            }
            if counter.iter().all(|&c| c == 0) {
                break;
            }
        }
    }
    debug_assert_eq!(
        out.len() as u128,
        (pow_u128(order as u128, r as u32) - 1) / (order as u128 - 1)
    );
    out
}

/// Gaussian binomial coefficient [m choose r]_q.
pub fn gaussian_binomial(m: u32, r: u32, q: u64) -> u128 {
    if r > m {
        return 0;
    }
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..r {
        num *= pow_u128(q as u128, m - i) - 1;
        den *= pow_u128(q as u128, i + 1) - 1;
    }
    num / den
}

pub fn pow_u128(base: u128, exp: u32) -> u128 {
    base.pow(exp)
}

/// Number of (t-1)-spaces of PG(s+t,q) disjoint from a fixed s-space.
pub fn count_disjoint_spaces(s: u32, t: u32, q: u64) -> u128 {
    pow_u128(q as u128, s * t + t)
}

/// All k-dimensional subspaces of PG(n,q), enumerated as canonical RREF
/// matrices: pivot-column sets in lexicographic order, free entries advancing
/// in code order.
pub fn enumerate_subspaces(
    ctx: &FieldCtx,
    n: usize,
    k: usize,
    budget: u64,
) -> Result<Vec<Subspace>, SpaceError> {
    let rows = k + 1;
    let cols = n + 1;
    assert!(rows <= cols, "subspace dimension exceeds ambient");
    let count = gaussian_binomial(cols as u32, rows as u32, ctx.order() as u64);
    if count > budget as u128 {
        return Err(SpaceError::BudgetExceeded {
            required: count,
            budget,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut pivots: Vec<usize> = (0..rows).collect();
    loop {
        emit_for_pivots(ctx, n, &pivots, &mut out);
        // Next pivot combination in lexicographic order.
        let mut i = rows;
        loop {
            if i == 0 {
                pivots.clear();
                break;
            }
            i -= 1;
            if pivots[i] < cols - (rows - i) {
                pivots[i] += 1;
                for j in i + 1..rows {
                    pivots[j] = pivots[j - 1] + 1;
                }
                break;
            }
        }
        if pivots.is_empty() {
            break;
        }
    }
    debug_assert_eq!(out.len() as u128, count);
    Ok(out)
}

fn emit_for_pivots(ctx: &FieldCtx, n: usize, pivots: &[usize], out: &mut Vec<Subspace>) {
    let rows = pivots.len();
    let cols = n + 1;
    let mut is_pivot = vec![false; cols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    // Free positions in row-major order.
    let mut free = Vec::new();
    for (i, &p) in pivots.iter().enumerate() {
        for j in p + 1..cols {
            if !is_pivot[j] {
                free.push((i, j));
            }
        }
    }
    let order = ctx.order() as u64;
    let mut counter = vec![0u32; free.len()];
    loop {
        let mut m = Matrix::zeros(rows, cols);
        for (i, &p) in pivots.iter().enumerate() {
            m.set(i, p, FieldElem::ONE);
        }
        for (slot, &(i, j)) in free.iter().enumerate() {
            m.set(i, j, FieldElem::from_code(counter[slot]));
        }
        out.push(Subspace {
            ambient_n: n,
            basis: m,
        });
        let mut pos = free.len();
        let mut done = true;
        while pos > 0 {
            pos -= 1;
            counter[pos] += 1;
            if (counter[pos] as u64) < order {
                done = false;
                break;
            }
            counter[pos] = 0;
        }
        if done {
            break;
        }
    }
}

/// Deterministic ordering on same-ambient subspaces: by rank, then by the
/// basis entries row-major in code order.
pub fn subspace_cmp(a: &Subspace, b: &Subspace) -> std::cmp::Ordering {
    a.rank().cmp(&b.rank()).then_with(|| {
        for i in 0..a.basis.nrows() {
            for j in 0..a.basis.ncols() {
                let c = a.basis.at(i, j).code().cmp(&b.basis.at(i, j).code());
                if c != std::cmp::Ordering::Equal {
                    return c;
                }
            }
        }
        std::cmp::Ordering::Equal
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(c: u32) -> FieldElem {
        FieldElem::from_code(c)
    }

    fn gf(p: u32, e: u32) -> FieldCtx {
        FieldCtx::new(p, e).unwrap()
    }

    #[test]
    fn two_points_span_a_line() {
        let ctx = gf(2, 1);
        let p = PPoint::unit(3, 0);
        let q = PPoint::unit(3, 1);
        let l = span(&ctx, &p.to_subspace(), &q.to_subspace());
        assert_eq!(l.pdim(), 1);
    }

    #[test]
    fn span_with_empty_is_identity() {
        let ctx = gf(3, 1);
        let a = Subspace::from_rows(
            &ctx,
            2,
            vec![vec![f(1), f(2), f(0)], vec![f(0), f(0), f(1)]],
        );
        assert_eq!(span(&ctx, &a, &Subspace::empty(2)), a);
    }

    #[test]
    fn disjoint_lines_span_pg32() {
        // Grassmann: 1 + 1 - (-1) = 3.
        let ctx = gf(2, 1);
        let a = Subspace::from_rows(
            &ctx,
            3,
            vec![
                vec![f(1), f(0), f(0), f(0)],
                vec![f(0), f(1), f(0), f(0)],
            ],
        );
        let b = Subspace::from_rows(
            &ctx,
            3,
            vec![
                vec![f(0), f(0), f(1), f(0)],
                vec![f(0), f(0), f(0), f(1)],
            ],
        );
        assert!(is_disjoint(&ctx, &a, &b));
        assert_eq!(span(&ctx, &a, &b).pdim(), 3);
    }

    #[test]
    fn meet_idempotent_and_plane_lines() {
        let ctx = gf(2, 1);
        let l1 = Subspace::from_rows(
            &ctx,
            2,
            vec![vec![f(1), f(0), f(0)], vec![f(0), f(1), f(0)]],
        );
        let l2 = Subspace::from_rows(
            &ctx,
            2,
            vec![vec![f(1), f(0), f(0)], vec![f(0), f(0), f(1)]],
        );
        assert_eq!(meet(&ctx, &l1, &l1), l1);
        let m = meet(&ctx, &l1, &l2);
        assert_eq!(m.pdim(), 0);
    }

    #[test]
    fn pdim_contains_disjoint_basics() {
        let ctx = gf(2, 1);
        let whole = Subspace::whole(4);
        assert_eq!(whole.pdim(), 4);
        assert_eq!(Subspace::empty(4).pdim(), -1);
        let a = Subspace::from_rows(
            &ctx,
            4,
            vec![vec![f(1), f(0), f(0), f(1), f(0)], vec![f(0), f(1), f(0), f(0), f(0)]],
        );
        let b = Subspace::from_rows(&ctx, 4, vec![vec![f(0), f(0), f(1), f(0), f(1)]]);
        assert!(contains(&ctx, &a, &meet(&ctx, &a, &b)));
        // Complementary coordinate subspaces are disjoint.
        let c1 = Subspace::from_rows(
            &ctx,
            4,
            vec![vec![f(1), f(0), f(0), f(0), f(0)], vec![f(0), f(1), f(0), f(0), f(0)]],
        );
        let c2 = Subspace::from_rows(
            &ctx,
            4,
            vec![
                vec![f(0), f(0), f(1), f(0), f(0)],
                vec![f(0), f(0), f(0), f(1), f(0)],
                vec![f(0), f(0), f(0), f(0), f(1)],
            ],
        );
        assert!(is_disjoint(&ctx, &c1, &c2));
    }

    #[test]
    fn points_counts() {
        let ctx2 = gf(2, 1);
        let line = Subspace::from_rows(
            &ctx2,
            3,
            vec![vec![f(1), f(0), f(0), f(0)], vec![f(0), f(1), f(0), f(0)]],
        );
        assert_eq!(points_of(&ctx2, &line).len(), 3);

        let ctx3 = gf(3, 1);
        let plane = Subspace::from_rows(
            &ctx3,
            3,
            vec![
                vec![f(1), f(0), f(0), f(0)],
                vec![f(0), f(1), f(0), f(0)],
                vec![f(0), f(0), f(1), f(0)],
            ],
        );
        // (3^3 - 1) / 2 = 13.
        assert_eq!(points_of(&ctx3, &plane).len(), 13);

        let pt = PPoint::unit(3, 2).to_subspace();
        assert_eq!(points_of(&ctx3, &pt), vec![PPoint::unit(3, 2)]);
    }

    #[test]
    fn points_lie_in_subspace_and_are_distinct() {
        let ctx = gf(2, 2);
        let a = Subspace::from_rows(
            &ctx,
            2,
            vec![vec![f(1), f(0), f(2)], vec![f(0), f(1), f(3)]],
        );
        let pts = points_of(&ctx, &a);
        assert_eq!(pts.len(), 5);
        let set: std::collections::HashSet<_> = pts.iter().collect();
        assert_eq!(set.len(), 5);
        for p in &pts {
            assert!(contains_point(&ctx, &a, p));
        }
    }

    #[test]
    fn dual_examples() {
        let ctx = gf(2, 1);
        assert_eq!(dual(&ctx, &Subspace::whole(3)), Subspace::empty(3));
        assert_eq!(dual(&ctx, &Subspace::empty(3)), Subspace::whole(3));
        // Dual of a point of PG(2,2) is a line.
        let p = PPoint::unit(2, 1).to_subspace();
        let d = dual(&ctx, &p);
        assert_eq!(d.pdim(), 1);
        assert_eq!(points_of(&ctx, &d).len(), 3);
    }

    #[test]
    fn enumerate_counts() {
        let ctx2 = gf(2, 1);
        // Lines of PG(3,2): [4 choose 2]_2 = 35.
        assert_eq!(gaussian_binomial(4, 2, 2), 35);
        let lines = enumerate_subspaces(&ctx2, 3, 1, 1_000_000).unwrap();
        assert_eq!(lines.len(), 35);
        // Fano plane points.
        let pts = enumerate_subspaces(&ctx2, 2, 0, 1_000_000).unwrap();
        assert_eq!(pts.len(), 7);
        // Whole space.
        let whole = enumerate_subspaces(&ctx2, 3, 3, 1_000_000).unwrap();
        assert_eq!(whole.len(), 1);
        assert_eq!(whole[0], Subspace::whole(3));
        // All distinct, all rank k+1.
        let set: std::collections::HashSet<_> = lines.iter().collect();
        assert_eq!(set.len(), 35);
    }

    #[test]
    fn enumerate_budget() {
        let ctx = gf(2, 1);
        let err = enumerate_subspaces(&ctx, 3, 1, 10).unwrap_err();
        match err {
            SpaceError::BudgetExceeded { required, budget } => {
                assert_eq!(required, 35);
                assert_eq!(budget, 10);
            }
        }
    }

    #[test]
    fn count_disjoint_brute_force_oracle() {
        // (s,t,q) = (1,2,2): lines of PG(3,2) disjoint from a fixed line.
        let ctx = gf(2, 1);
        let pi = Subspace::from_rows(
            &ctx,
            3,
            vec![vec![f(1), f(0), f(0), f(0)], vec![f(0), f(1), f(0), f(0)]],
        );
        let lines = enumerate_subspaces(&ctx, 3, 1, 1_000_000).unwrap();
        let disjoint = lines.iter().filter(|l| is_disjoint(&ctx, l, &pi)).count();
        assert_eq!(disjoint as u128, count_disjoint_spaces(1, 2, 2));
        assert_eq!(disjoint, 16);
        // 35 lines total, 19 meet pi.
        assert_eq!(lines.len() - disjoint, 19);
    }

    #[test]
    fn count_disjoint_affine_and_paper_value() {
        // t=1: points of PG(s+1,q) off a hyperplane.
        assert_eq!(count_disjoint_spaces(2, 1, 3), 27);
        assert_eq!(count_disjoint_spaces(1, 2, 3), 81);
    }

    #[test]
    fn meet_of_3spaces_in_pg52() {
        // Grassmann lower bound: 3 + 3 - 5 = 1.
        let ctx = gf(2, 1);
        let spaces = enumerate_subspaces(&ctx, 5, 3, 10_000_000).unwrap();
        let mid = spaces.len() / 2;
        let m = meet(&ctx, &spaces[3], &spaces[mid]);
        assert!(m.pdim() >= 1);
    }

    #[test]
    fn dual_involution_spot_check() {
        let ctx = gf(2, 1);
        for k in 0..=4 {
            let spaces = enumerate_subspaces(&ctx, 5, k, 10_000_000).unwrap();
            let step = spaces.len() / 7 + 1;
            for a in spaces.iter().step_by(step) {
                let dd = dual(&ctx, &dual(&ctx, a));
                assert_eq!(&dd, a);
                assert_eq!(dual(&ctx, a).pdim(), 5 - 1 - a.pdim());
            }
        }
    }

    proptest! {
        #[test]
        fn grassmann_identity_gf2(rows_a in proptest::collection::vec(proptest::collection::vec(0u32..2, 5), 0..4),
                                  rows_b in proptest::collection::vec(proptest::collection::vec(0u32..2, 5), 0..4)) {
            let ctx = gf(2, 1);
            let to_rows = |rs: &Vec<Vec<u32>>| rs.iter().map(|r| r.iter().map(|&c| f(c)).collect::<Vec<_>>()).collect::<Vec<_>>();
            let a = Subspace::from_rows(&ctx, 4, to_rows(&rows_a));
            let b = Subspace::from_rows(&ctx, 4, to_rows(&rows_b));
            let lhs = span(&ctx, &a, &b).pdim();
            let rhs = a.pdim() + b.pdim() - meet(&ctx, &a, &b).pdim();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn duality_reverses_inclusion_gf3(rows_a in proptest::collection::vec(proptest::collection::vec(0u32..3, 4), 0..4),
                                          rows_b in proptest::collection::vec(proptest::collection::vec(0u32..3, 4), 0..4)) {
            let ctx = gf(3, 1);
            let to_rows = |rs: &Vec<Vec<u32>>| rs.iter().map(|r| r.iter().map(|&c| f(c)).collect::<Vec<_>>()).collect::<Vec<_>>();
            let a = Subspace::from_rows(&ctx, 3, to_rows(&rows_a));
            let b = Subspace::from_rows(&ctx, 3, to_rows(&rows_b));
            prop_assert_eq!(contains(&ctx, &a, &b), contains(&ctx, &dual(&ctx, &b), &dual(&ctx, &a)));
            prop_assert_eq!(dual(&ctx, &dual(&ctx, &a)), a);
        }
    }
}
