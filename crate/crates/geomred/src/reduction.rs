//! The field reduction map PG(t,q^{s+1}) -> PG(st+s+t,q).
//!
//! A vector over GF(q^{s+1}) is expanded over the power basis (1, a, ..., a^s)
//! of the extension, a being the big field's generator. The (s+1)(t+1)
//! GF(q)-coordinates are grouped per original coordinate: coordinate j of the
//! big vector occupies block j of width s+1. Points map to s-spaces, and the
//! images of all points form a Desarguesian spread.

use thiserror::Error;

use crate::field::{embed, factor_prime_power, FieldCtx, FieldElem, FieldError, SubfieldEmbedding};
use crate::linalg::Matrix;
use crate::projective::{PPoint, Subspace};

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("power basis is not independent over the subfield (internal error)")]
    BasisDependent,
}

/// Field-reduction context for fixed (q, s, t).
///
/// Immutable after construction; operations are pure.
#[derive(Debug, Clone)]
pub struct ReductionMap {
    q: u32,
    s: u32,
    t: u32,
    prime: FieldCtx,
    small: FieldCtx,
    big: FieldCtx,
    emb: SubfieldEmbedding,
    /// Powers 1, a, ..., a^s of the big generator.
    basis: Vec<FieldElem>,
    /// Inverse of the GF(p)-matrix taking basis coordinates to big digits.
    expand_inv: Matrix,
}

impl ReductionMap {
    pub fn new(q: u32, s: u32, t: u32) -> Result<Self, ReductionError> {
        let (p, f) = factor_prime_power(q as u64)?;
        let prime = FieldCtx::new(p, 1)?;
        let small = FieldCtx::new(p, f)?;
        let big = FieldCtx::new(p, f * (s + 1))?;
        let emb = embed(&small, &big)?;

        let mut basis = Vec::with_capacity(s as usize + 1);
        let mut pw = FieldElem::ONE;
        for _ in 0..=s {
            basis.push(pw);
            pw = big.mul(pw, big.generator());
        }

        // Rows of the expansion matrix: GF(p)-digits of emb(x^j) * a^i, where
        // x^j runs over the polynomial basis of GF(q) and a^i over the power
        // basis. Invertibility is the independence check for the basis.
        let dim = big.e() as usize;
        let mut m = Matrix::zeros(0, dim);
        for b in &basis {
            for j in 0..f {
                let beta = emb.apply(small.from_digits(&unit_digits(f as usize, j as usize)));
                let prod = big.mul(beta, *b);
                let row: Vec<FieldElem> = big
                    .digits(prod)
                    .into_iter()
                    .map(|d| prime.from_int(d))
                    .collect();
                m.push_row(&row);
            }
        }
        let expand_inv = invert(&m, &prime).ok_or(ReductionError::BasisDependent)?;

        Ok(ReductionMap {
            q,
            s,
            t,
            prime,
            small,
            big,
            emb,
            basis,
            expand_inv,
        })
    }

    /// Same fields, different domain dimension. Used to restrict the map to a
    /// hyperplane (smaller t).
    pub fn restrict(&self, t: u32) -> ReductionMap {
        let mut m = self.clone();
        m.t = t;
        m
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    /// GF(q), the base field of the image space.
    pub fn small(&self) -> &FieldCtx {
        &self.small
    }

    /// GF(q^{s+1}), the field of the domain space.
    pub fn big(&self) -> &FieldCtx {
        &self.big
    }

    pub fn embedding(&self) -> &SubfieldEmbedding {
        &self.emb
    }

    /// Projective dimension of the domain PG(t, q^{s+1}).
    pub fn domain_n(&self) -> usize {
        self.t as usize
    }

    /// Projective dimension of the image PG(st+s+t, q).
    pub fn image_n(&self) -> usize {
        (self.s * self.t + self.s + self.t) as usize
    }

    /// Coordinates of a big-field element over the power basis, as GF(q)
    /// elements.
    pub fn expand(&self, c: FieldElem) -> Vec<FieldElem> {
        let f = self.small.e() as usize;
        let digits: Vec<FieldElem> = self
            .big
            .digits(c)
            .into_iter()
            .map(|d| self.prime.from_int(d))
            .collect();
        let width = self.s as usize + 1;
        let mut out = Vec::with_capacity(width);
        for i in 0..width {
            let mut chunk = Vec::with_capacity(f);
            for j in 0..f {
                let col = i * f + j;
                let mut acc = FieldElem::ZERO;
                for (l, &d) in digits.iter().enumerate() {
                    acc = self.prime.add(acc, self.prime.mul(d, self.expand_inv.at(l, col)));
                }
                chunk.push(acc);
            }
            out.push(self.small.from_digits(&chunk.iter().map(|c| c.code()).collect::<Vec<_>>()));
        }
        out
    }

    /// Rebuilds the big-field element from power-basis coordinates.
    pub fn compress(&self, coords: &[FieldElem]) -> FieldElem {
        assert_eq!(coords.len(), self.s as usize + 1);
        let mut acc = FieldElem::ZERO;
        for (i, &a) in coords.iter().enumerate() {
            acc = self.big.add(acc, self.big.mul(self.emb.apply(a), self.basis[i]));
        }
        acc
    }

    /// Expands a big-field vector blockwise: coordinate j lands in block j.
    pub fn expand_vector(&self, v: &[FieldElem]) -> Vec<FieldElem> {
        let width = self.s as usize + 1;
        let mut out = Vec::with_capacity(v.len() * width);
        for &c in v {
            out.extend(self.expand(c));
        }
        out
    }

    /// The GF(q)-linear matrix induced by a GF(q^{s+1})-linear matrix: each
    /// entry becomes the (s+1) x (s+1) block of multiplication by it, so that
    /// `expand(v * m) = expand(v) * blow_up(m)`.
    pub fn blow_up(&self, m: &Matrix) -> Matrix {
        let width = self.s as usize + 1;
        let mut out = Matrix::zeros(m.nrows() * width, m.ncols() * width);
        for i in 0..m.nrows() {
            for r in 0..width {
                let row_idx = i * width + r;
                // expand of basis[r] * row_i, block by block.
                for j in 0..m.ncols() {
                    let prod = self.big.mul(self.basis[r], m.at(i, j));
                    let ex = self.expand(prod);
                    for (c, &val) in ex.iter().enumerate() {
                        out.set(row_idx, j * width + c, val);
                    }
                }
            }
        }
        out
    }

    /// Image of a point: an s-space of the image PG.
    pub fn fr_point(&self, p: &PPoint) -> Subspace {
        assert_eq!(p.ambient_n(), self.domain_n(), "point not in the domain space");
        self.fr_subspace(&p.to_subspace())
    }

    /// Image of a subspace of dimension k: a subspace of dimension sk+s+k.
    pub fn fr_subspace(&self, kappa: &Subspace) -> Subspace {
        assert_eq!(kappa.ambient_n(), self.domain_n(), "subspace not in the domain space");
        if kappa.is_empty() {
            return Subspace::empty(self.image_n());
        }
        let blown = self.blow_up(kappa.basis());
        Subspace::from_matrix(&self.small, blown)
    }

    /// Elementwise images of a point list, order preserved.
    pub fn fr_pointset(&self, ps: &[PPoint]) -> Vec<Subspace> {
        ps.iter().map(|p| self.fr_point(p)).collect()
    }
}

fn unit_digits(len: usize, pos: usize) -> Vec<u32> {
    let mut v = vec![0u32; len];
    v[pos] = 1;
    v
}

/// Inverse of a square matrix, or None if singular.
fn invert(m: &Matrix, ctx: &FieldCtx) -> Option<Matrix> {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    let (r, t, rank) = m.rref_with_transform(ctx);
    if rank < n {
        return None;
    }
    debug_assert_eq!(r, Matrix::identity(n));
    Some(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projective::{
        contains, enumerate_subspaces, is_disjoint, points_of, Subspace,
    };

    #[test]
    fn expand_compress_roundtrip() {
        for (q, s) in [(2u32, 1u32), (2, 2), (3, 1), (4, 1)] {
            let m = ReductionMap::new(q, s, 1).unwrap();
            for c in m.big().elements() {
                let coords = m.expand(c);
                assert_eq!(coords.len(), s as usize + 1);
                assert_eq!(m.compress(&coords), c);
            }
        }
    }

    #[test]
    fn point_of_pg14_maps_to_line_of_pg32() {
        let m = ReductionMap::new(2, 1, 1).unwrap();
        let alpha = m.big().generator();
        let p = PPoint::normalize(m.big(), &[FieldElem::ONE, alpha]);
        let img = m.fr_point(&p);
        assert_eq!(img.ambient_n(), 3);
        assert_eq!(img.pdim(), 1);
    }

    #[test]
    fn representative_invariance() {
        let m = ReductionMap::new(2, 1, 1).unwrap();
        let alpha = m.big().generator();
        let coords = [FieldElem::ONE, alpha];
        let p = PPoint::normalize(m.big(), &coords);
        let img = m.fr_point(&p);
        for lambda in m.big().elements().skip(1) {
            let scaled: Vec<FieldElem> =
                coords.iter().map(|&c| m.big().mul(c, lambda)).collect();
            let q = PPoint::normalize(m.big(), &scaled);
            assert_eq!(m.fr_point(&q), img);
        }
    }

    #[test]
    fn s_zero_is_identity_reencoding() {
        let m = ReductionMap::new(3, 0, 2).unwrap();
        let p = PPoint::unit(2, 1);
        let img = m.fr_point(&p);
        assert_eq!(img.pdim(), 0);
        assert_eq!(img.ambient_n(), 2);
    }

    #[test]
    fn line_of_pg24_maps_to_3space_of_pg52() {
        let m = ReductionMap::new(2, 1, 2).unwrap();
        let line = Subspace::from_rows(
            m.big(),
            2,
            vec![
                vec![FieldElem::ONE, FieldElem::ZERO, FieldElem::ZERO],
                vec![FieldElem::ZERO, FieldElem::ONE, FieldElem::ZERO],
            ],
        );
        let img = m.fr_subspace(&line);
        assert_eq!(img.pdim(), 3);
        assert_eq!(img.ambient_n(), 5);
    }

    #[test]
    fn whole_and_empty() {
        let m = ReductionMap::new(2, 1, 2).unwrap();
        assert_eq!(
            m.fr_subspace(&Subspace::whole(2)),
            Subspace::whole(5)
        );
        assert_eq!(
            m.fr_subspace(&Subspace::empty(2)),
            Subspace::empty(5)
        );
    }

    #[test]
    fn all_points_of_pg14_form_a_spread() {
        let m = ReductionMap::new(2, 1, 1).unwrap();
        let pts = points_of(m.big(), &Subspace::whole(1));
        assert_eq!(pts.len(), 5);
        let images = m.fr_pointset(&pts);
        for (i, a) in images.iter().enumerate() {
            assert_eq!(a.pdim(), 1);
            for b in images.iter().skip(i + 1) {
                assert!(is_disjoint(m.small(), a, b));
            }
        }
        // 5 disjoint lines cover all 15 points of PG(3,2).
        let covered: usize = images.iter().map(|l| points_of(m.small(), l).len()).sum();
        assert_eq!(covered, 15);
    }

    #[test]
    fn dimension_law_and_injectivity_exhaustive_small() {
        // q=2, s=1, t=1: every subspace of PG(1,4).
        let m = ReductionMap::new(2, 1, 1).unwrap();
        let mut all = vec![Subspace::empty(1), Subspace::whole(1)];
        for k in [0usize] {
            all.extend(enumerate_subspaces(m.big(), 1, k, 10_000).unwrap());
        }
        let mut seen = std::collections::HashSet::new();
        for kappa in &all {
            let img = m.fr_subspace(kappa);
            let k = kappa.pdim();
            assert_eq!(img.pdim(), m.s() as i64 * k + m.s() as i64 + k);
            assert!(seen.insert(img.label()));
        }
        // Inclusion preservation over all pairs.
        for a in &all {
            for b in &all {
                if contains(m.big(), a, b) {
                    assert!(contains(m.small(), &m.fr_subspace(a), &m.fr_subspace(b)));
                }
            }
        }
    }

    #[test]
    fn blow_up_is_compatible_with_vector_multiplication() {
        let m = ReductionMap::new(3, 1, 2).unwrap();
        let big = m.big();
        let g = big.generator();
        let mat = Matrix::from_rows(
            vec![
                vec![FieldElem::ONE, g, FieldElem::ZERO],
                vec![g, FieldElem::ZERO, FieldElem::ONE],
            ],
            3,
        );
        let blown = m.blow_up(&mat);
        // Check expand(v * mat) == expand(v) * blown on a sample of vectors.
        for a in big.elements().take(5) {
            for b in big.elements().skip(3).take(5) {
                let v = vec![a, b];
                let mut prod = vec![FieldElem::ZERO; 3];
                for (i, &vi) in v.iter().enumerate() {
                    for j in 0..3 {
                        prod[j] = big.add(prod[j], big.mul(vi, mat.at(i, j)));
                    }
                }
                let lhs = m.expand_vector(&prod);
                let ev = m.expand_vector(&v);
                let small = m.small();
                let mut rhs = vec![FieldElem::ZERO; blown.ncols()];
                for (i, &ei) in ev.iter().enumerate() {
                    for j in 0..blown.ncols() {
                        rhs[j] = small.add(rhs[j], small.mul(ei, blown.at(i, j)));
                    }
                }
                assert_eq!(lhs, rhs);
            }
        }
    }
}
