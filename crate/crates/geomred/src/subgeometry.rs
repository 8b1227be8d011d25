//! F_q-subgeometries of PG(n,q^{s+1}): generator lattices, point enumeration,
//! sublines, extensions, and the pencil of t-dimensional subgeometries through
//! a fixed (t-1)-dimensional one.
//!
//! A subgeometry is represented by its generator vectors, since scaling a
//! generator changes the subgeometry; the cached point set is the identity
//! key.

use thiserror::Error;

use crate::field::FieldElem;
use crate::projective::{contains_point, PPoint, Subspace};
use crate::reduction::ReductionMap;

#[derive(Debug, Error)]
pub enum SubgeometryError {
    #[error("generators are dependent over the big field")]
    DependentGenerators,
    #[error("point {0} does not lie in the subgeometry")]
    PointNotInSubgeometry(String),
    #[error("the two points must be distinct")]
    EqualPoints,
    #[error("point {0} lies in the hyperplane")]
    PointInHyperplane(String),
    #[error("subgeometry has dimension {got}, expected {expected}")]
    WrongDimension { got: i64, expected: i64 },
}

/// An F_q-subgeometry of PG(n,q^{s+1}), given by d+1 generator vectors that
/// are independent over the big field. Its points are the projective classes
/// of the nonzero GF(q)-combinations of the generators.
#[derive(Debug, Clone)]
pub struct Subgeometry {
    ambient_n: usize,
    gens: Vec<Vec<FieldElem>>,
    points: Vec<PPoint>,
    sorted_points: Vec<PPoint>,
}

impl PartialEq for Subgeometry {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_n == other.ambient_n && self.sorted_points == other.sorted_points
    }
}

impl Eq for Subgeometry {}

impl Subgeometry {
    /// Builds the subgeometry generated by the given vectors.
    pub fn from_vectors(
        rm: &ReductionMap,
        vs: Vec<Vec<FieldElem>>,
    ) -> Result<Subgeometry, SubgeometryError> {
        assert!(!vs.is_empty(), "subgeometry needs at least one generator");
        let ambient_n = vs[0].len() - 1;
        let span = Subspace::from_rows(rm.big(), ambient_n, vs.clone());
        if span.rank() != vs.len() {
            return Err(SubgeometryError::DependentGenerators);
        }
        let points = enumerate_points(rm, &vs, ambient_n);
        let mut sorted_points = points.clone();
        sorted_points.sort();
        Ok(Subgeometry {
            ambient_n,
            gens: vs,
            points,
            sorted_points,
        })
    }

    /// The canonical d-dimensional subgeometry of PG(n,q^{s+1}): all points
    /// with GF(q)-coordinates in the first d+1 positions.
    pub fn canonical(rm: &ReductionMap, ambient_n: usize, d: usize) -> Subgeometry {
        let gens = (0..=d)
            .map(|i| PPoint::unit(ambient_n, i).coords().to_vec())
            .collect();
        Subgeometry::from_vectors(rm, gens).expect("standard basis vectors are independent")
    }

    pub fn ambient_n(&self) -> usize {
        self.ambient_n
    }

    pub fn pdim(&self) -> i64 {
        self.gens.len() as i64 - 1
    }

    pub fn gens(&self) -> &[Vec<FieldElem>] {
        &self.gens
    }

    /// Points in generation order; the first point is the class of the first
    /// generator.
    pub fn points(&self) -> &[PPoint] {
        &self.points
    }

    pub fn sorted_points(&self) -> &[PPoint] {
        &self.sorted_points
    }

    pub fn contains(&self, p: &PPoint) -> bool {
        self.sorted_points.binary_search(p).is_ok()
    }

    /// The big-field span of the subgeometry.
    pub fn span(&self, rm: &ReductionMap) -> Subspace {
        Subspace::from_rows(rm.big(), self.ambient_n, self.gens.clone())
    }

    /// The GF(q)-coefficient vector of a point with respect to the generator
    /// lattice, normalized so its first nonzero entry is 1. Errors if the
    /// point is not in the subgeometry.
    pub fn lattice_coefficients(
        &self,
        rm: &ReductionMap,
        p: &PPoint,
    ) -> Result<Vec<FieldElem>, SubgeometryError> {
        let big = rm.big();
        let gmat = crate::linalg::Matrix::from_rows(self.gens.clone(), self.ambient_n + 1);
        let x = gmat
            .solve_row(big, p.coords())
            .ok_or_else(|| SubgeometryError::PointNotInSubgeometry(p.label()))?;
        let lead = x
            .iter()
            .position(|c| !c.is_zero())
            .expect("nonzero point has nonzero coefficients");
        let inv = big.inv(x[lead]);
        let mut out = Vec::with_capacity(x.len());
        for &c in &x {
            let v = big.mul(c, inv);
            let small = rm
                .embedding()
                .preimage(v)
                .ok_or_else(|| SubgeometryError::PointNotInSubgeometry(p.label()))?;
            out.push(small);
        }
        Ok(out)
    }

    /// The representative vector of a point built from its normalized lattice
    /// coefficients.
    pub fn lattice_representative(
        &self,
        rm: &ReductionMap,
        p: &PPoint,
    ) -> Result<Vec<FieldElem>, SubgeometryError> {
        let coeffs = self.lattice_coefficients(rm, p)?;
        let big = rm.big();
        let mut v = vec![FieldElem::ZERO; self.ambient_n + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            let cb = rm.embedding().apply(c);
            for j in 0..=self.ambient_n {
                v[j] = big.add(v[j], big.mul(cb, self.gens[i][j]));
            }
        }
        Ok(v)
    }
}

fn enumerate_points(rm: &ReductionMap, gens: &[Vec<FieldElem>], ambient_n: usize) -> Vec<PPoint> {
    let big = rm.big();
    let emb = rm.embedding();
    let q = rm.small().order() as u64;
    let d1 = gens.len();
    let cols = ambient_n + 1;
    let mut out = Vec::new();
    // First nonzero coefficient fixed to 1; the tail advances in code order.
    for k in 0..d1 {
        let tail = d1 - 1 - k;
        let mut counter = vec![0u32; tail];
        loop {
            let mut coords = gens[k].clone();
            for (idx, &code) in counter.iter().enumerate() {
                let c = FieldElem::from_code(code);
                if !c.is_zero() {
                    let cb = emb.apply(c);
                    let src = &gens[k + 1 + idx];
                    for j in 0..cols {
                        coords[j] = big.add(coords[j], big.mul(cb, src[j]));
                    }
                }
            }
            out.push(PPoint::normalize(big, &coords));
            let mut pos = tail;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                counter[pos] += 1;
                if (counter[pos] as u64) < q {
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
    out
}

/// The F_q-subline of C through two of its points, built from C-lattice
/// representatives.
pub fn subline_in(
    rm: &ReductionMap,
    c: &Subgeometry,
    q_pt: &PPoint,
    r_pt: &PPoint,
) -> Result<Subgeometry, SubgeometryError> {
    if q_pt == r_pt {
        return Err(SubgeometryError::EqualPoints);
    }
    let vq = c.lattice_representative(rm, q_pt)?;
    let vr = c.lattice_representative(rm, r_pt)?;
    Subgeometry::from_vectors(rm, vec![vq, vr])
}

/// Extends a subgeometry by one more generator.
pub fn extend(
    rm: &ReductionMap,
    c: &Subgeometry,
    w: Vec<FieldElem>,
) -> Result<Subgeometry, SubgeometryError> {
    let mut gens = c.gens.clone();
    gens.push(w);
    Subgeometry::from_vectors(rm, gens)
}

/// All distinct t-dimensional subgeometries B containing C (of dimension t-1,
/// spanning the hyperplane Sigma) and the affine point P, as `extend(C, m*v_P)`
/// over coset representatives m of GF(q^{s+1})* / GF(q)*; deduplicated by
/// point set.
pub fn lines_of_y_through(
    rm: &ReductionMap,
    c: &Subgeometry,
    sigma: &Subspace,
    p: &PPoint,
) -> Result<Vec<Subgeometry>, SubgeometryError> {
    if contains_point(rm.big(), sigma, p) {
        return Err(SubgeometryError::PointInHyperplane(p.label()));
    }
    let big = rm.big();
    let emb = rm.embedding();

    // Coset representatives of big* modulo the embedded small*.
    let mut seen = vec![false; big.order() as usize];
    let mut reps = Vec::new();
    for mu in big.elements().skip(1) {
        if seen[mu.code() as usize] {
            continue;
        }
        reps.push(mu);
        for lambda in rm.small().elements().skip(1) {
            let v = big.mul(mu, emb.apply(lambda));
            seen[v.code() as usize] = true;
        }
    }

    let mut out: Vec<Subgeometry> = Vec::new();
    for mu in reps {
        let w: Vec<FieldElem> = p.coords().iter().map(|&x| big.mul(mu, x)).collect();
        let b = extend(rm, c, w)?;
        if out.iter().any(|prev| prev == &b) {
            log::warn!(
                "coset collision: two scalar cosets generated the same subgeometry through {}",
                p.label()
            );
            continue;
        }
        out.push(b);
    }
    Ok(out)
}
