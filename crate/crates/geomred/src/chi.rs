//! Construction of the special (st-1)-space that meets the field-reduced
//! image of every point of a spanning subgeometry exactly in an (s-1)-space.
//!
//! Two independent routes are provided. The inductive construction recurses on
//! the subgeometry dimension, splicing a transversal span over a subline's
//! regulus onto the recursive solution. The algebraic construction works only
//! in canonical position and spans the blow-ups of a^i * e_j; it serves as a
//! cross-oracle. The two results need not coincide, only the intersection
//! property is shared.

use serde::Serialize;
use thiserror::Error;

use crate::projective::{
    contains, enumerate_subspaces, meet, span, subspace_cmp, PPoint, Subspace,
};
use crate::reduction::ReductionMap;
use crate::regulus::{
    first_independent_points, regulus_from_subline, transversal_span, RegulusError,
};
use crate::subgeometry::{subline_in, Subgeometry, SubgeometryError};

#[derive(Debug, Error)]
pub enum ChiError {
    #[error("recursion invariant violated: {detail}")]
    InvariantViolation { detail: String, trace: ChiTrace },
    #[error("subgeometry is not in canonical position")]
    NotCanonical,
    #[error("subgeometry has dimension {got}, expected the ambient dimension {expected}")]
    NotSpanning { got: i64, expected: i64 },
    #[error(transparent)]
    Subgeometry(#[from] SubgeometryError),
    #[error(transparent)]
    Regulus(#[from] RegulusError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChiConstruction {
    Inductive,
    Algebraic,
}

impl std::fmt::Display for ChiConstruction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ChiConstruction::Inductive => write!(f, "inductive"),
            ChiConstruction::Algebraic => write!(f, "algebraic"),
        }
    }
}

/// One recursion level of the inductive construction.
#[derive(Debug, Clone, Serialize)]
pub struct ChiLevel {
    /// Domain dimension d at this level (the subgeometry spans PG(d, q^{s+1})).
    pub ambient_dim: u32,
    pub case: &'static str,
    pub q_point: Option<String>,
    pub subline_points: Vec<String>,
    pub dim_chi: i64,
    pub dim_t_cprime: Option<i64>,
    pub dim_t_subline: Option<i64>,
    pub dim_sigma_q_prime: Option<i64>,
    /// The subline's image space meets the recursive image space exactly in
    /// the image of the chosen point.
    pub subline_space_meets_recursive_space_in_sigma_q: Option<bool>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ChiTrace {
    pub levels: Vec<ChiLevel>,
}

impl ChiTrace {
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let json = serde_json::to_vec(self).expect("trace serializes");
        let mut hex = String::new();
        for b in Sha256::digest(&json) {
            hex.push_str(&format!("{b:02x}"));
        }
        hex
    }
}

#[derive(Debug, Clone)]
pub struct ChiResult {
    pub chi: Subspace,
    pub construction: ChiConstruction,
    pub trace: ChiTrace,
}

/// Per-point verification report.
#[derive(Debug, Clone)]
pub struct ChiReport {
    pub chi_pdim_ok: bool,
    pub per_point: Vec<(String, bool)>,
}

impl ChiReport {
    pub fn pass(&self) -> bool {
        self.chi_pdim_ok && self.per_point.iter().all(|(_, ok)| *ok)
    }
}

fn expect_dim(
    what: &str,
    got: i64,
    want: i64,
    trace: &ChiTrace,
) -> Result<(), ChiError> {
    if got == want {
        Ok(())
    } else {
        Err(ChiError::InvariantViolation {
            detail: format!("{what} has dimension {got}, expected {want}"),
            trace: trace.clone(),
        })
    }
}

/// The inductive construction. `c` must span its ambient space PG(d,q^{s+1})
/// with d = rm.t(); the result lives in the image space PG(sd+s+d, q) and has
/// projective dimension s(d+1)-1.
pub fn chi_inductive(rm: &ReductionMap, c: &Subgeometry) -> Result<ChiResult, ChiError> {
    let d = rm.t() as i64;
    if c.pdim() != d {
        return Err(ChiError::NotSpanning {
            got: c.pdim(),
            expected: d,
        });
    }
    let mut trace = ChiTrace::default();
    let chi = inductive_rec(rm, c, &mut trace)?;
    Ok(ChiResult {
        chi,
        construction: ChiConstruction::Inductive,
        trace,
    })
}

fn inductive_rec(
    rm: &ReductionMap,
    c: &Subgeometry,
    trace: &mut ChiTrace,
) -> Result<Subspace, ChiError> {
    let s = rm.s() as i64;
    let d = rm.t() as i64;
    let small = rm.small();

    if s == 0 {
        // Every image is a point; the empty space meets each in the empty
        // (s-1)-space.
        let chi = Subspace::empty(rm.image_n());
        trace.levels.push(ChiLevel {
            ambient_dim: d as u32,
            case: "s-zero",
            q_point: None,
            subline_points: Vec::new(),
            dim_chi: chi.pdim(),
            dim_t_cprime: None,
            dim_t_subline: None,
            dim_sigma_q_prime: None,
            subline_space_meets_recursive_space_in_sigma_q: None,
        });
        return Ok(chi);
    }

    if d == 0 {
        // Single point; its image is the whole s-space. Any hyperplane works;
        // take the lexicographically first one.
        let hyperplanes = enumerate_subspaces(small, s as usize, s as usize - 1, 1 << 21)
            .expect("hyperplane enumeration of a small space");
        let chi = hyperplanes
            .into_iter()
            .min_by(|a, b| subspace_cmp(a, b))
            .expect("an s-space has hyperplanes");
        trace.levels.push(ChiLevel {
            ambient_dim: 0,
            case: "base-point",
            q_point: Some(c.points()[0].label()),
            subline_points: Vec::new(),
            dim_chi: chi.pdim(),
            dim_t_cprime: None,
            dim_t_subline: None,
            dim_sigma_q_prime: None,
            subline_space_meets_recursive_space_in_sigma_q: None,
        });
        expect_dim("base-point chi", chi.pdim(), s - 1, trace)?;
        return Ok(chi);
    }

    if d == 1 {
        // Subline: its images form a regulus; span s transversal lines.
        let reg = regulus_from_subline(rm, c)?;
        let pts = first_independent_points(small, &reg.elements()[0], s as usize);
        let chi = transversal_span(small, &reg, &pts)?;
        trace.levels.push(ChiLevel {
            ambient_dim: 1,
            case: "base-subline",
            q_point: Some(c.points()[0].label()),
            subline_points: c.points().iter().map(|p| p.label()).collect(),
            dim_chi: chi.pdim(),
            dim_t_cprime: None,
            dim_t_subline: Some(chi.pdim()),
            dim_sigma_q_prime: None,
            subline_space_meets_recursive_space_in_sigma_q: None,
        });
        expect_dim("base-subline chi", chi.pdim(), 2 * s - 1, trace)?;
        return Ok(chi);
    }

    // d >= 2. The first d generators span a hyperplane U of the domain; in
    // coordinates relative to those generators the smaller subgeometry is
    // canonical, so recurse there and transport the result through the
    // blow-up of the generator matrix.
    let rm_sub = rm.restrict(d as u32 - 1);
    let c_sub = Subgeometry::canonical(&rm_sub, d as usize - 1, d as usize - 1);
    let chi_sub = inductive_rec(&rm_sub, &c_sub, trace)?;

    let gmat = crate::linalg::Matrix::from_rows(
        c.gens()[..d as usize].to_vec(),
        c.ambient_n() + 1,
    );
    let gdown = rm.blow_up(&gmat);
    let t_cprime = Subspace::from_matrix(small, chi_sub.basis().mul(&gdown, small));
    expect_dim("transported recursive space", t_cprime.pdim(), s * d - 1, trace)?;
    let pi_sigma = Subspace::from_matrix(small, gdown.clone());
    expect_dim("recursive image space", pi_sigma.pdim(), s * d + d - 1, trace)?;

    // Q: first point of the smaller subgeometry; L: subline of C through Q
    // and the last generator point, hence not contained in the smaller one.
    let q_pt = c.points()[0].clone();
    let last_gen = PPoint::normalize(rm.big(), &c.gens()[d as usize]);
    let subline = subline_in(rm, c, &q_pt, &last_gen)?;

    let sigma_q = rm.fr_point(&q_pt);
    let sigma_q_prime = meet(small, &t_cprime, &sigma_q);
    expect_dim("sigma_Q'", sigma_q_prime.pdim(), s - 1, trace)?;

    let pi_subline = rm.fr_subspace(&subline.span(rm));
    expect_dim("subline image space", pi_subline.pdim(), 2 * s + 1, trace)?;
    let pi_meet = meet(small, &pi_subline, &pi_sigma);
    let pi_meet_ok = pi_meet == sigma_q;

    let reg = regulus_from_subline(rm, &subline)?;
    let pts = first_independent_points(small, &sigma_q_prime, s as usize);
    let t_subline = transversal_span(small, &reg, &pts)?;
    expect_dim("transversal span", t_subline.pdim(), 2 * s - 1, trace)?;
    if !contains(small, &t_subline, &sigma_q_prime) {
        return Err(ChiError::InvariantViolation {
            detail: "transversal span does not pass through sigma_Q'".to_string(),
            trace: trace.clone(),
        });
    }
    let overlap = meet(small, &t_subline, &t_cprime);
    if overlap != sigma_q_prime {
        return Err(ChiError::InvariantViolation {
            detail: format!(
                "transversal span meets the recursive space in dimension {}, expected sigma_Q'",
                overlap.pdim()
            ),
            trace: trace.clone(),
        });
    }

    let chi = span(small, &t_subline, &t_cprime);
    trace.levels.push(ChiLevel {
        ambient_dim: d as u32,
        case: "inductive",
        q_point: Some(q_pt.label()),
        subline_points: subline.points().iter().map(|p| p.label()).collect(),
        dim_chi: chi.pdim(),
        dim_t_cprime: Some(t_cprime.pdim()),
        dim_t_subline: Some(t_subline.pdim()),
        dim_sigma_q_prime: Some(sigma_q_prime.pdim()),
        subline_space_meets_recursive_space_in_sigma_q: Some(pi_meet_ok),
    });
    if !pi_meet_ok {
        return Err(ChiError::InvariantViolation {
            detail: format!(
                "subline image space meets the recursive image space in dimension {}, expected sigma_Q",
                pi_meet.pdim()
            ),
            trace: trace.clone(),
        });
    }
    expect_dim("chi", chi.pdim(), s * (d + 1) - 1, trace)?;
    Ok(chi)
}

/// The algebraic construction: the span of the blow-ups of a^i * e_j for
/// i in 1..=s and j over the coordinate positions. Requires the subgeometry
/// in canonical position (all points with subfield coordinates).
pub fn chi_algebraic(rm: &ReductionMap, c: &Subgeometry) -> Result<ChiResult, ChiError> {
    let d = rm.t() as i64;
    if c.pdim() != d {
        return Err(ChiError::NotSpanning {
            got: c.pdim(),
            expected: d,
        });
    }
    let emb = rm.embedding();
    for p in c.points() {
        if !p.coords().iter().all(|&x| emb.contains(x)) {
            return Err(ChiError::NotCanonical);
        }
    }

    let s = rm.s() as usize;
    let big = rm.big();
    let small = rm.small();
    let cols = rm.image_n() + 1;
    let mut rows = Vec::new();
    let mut power = crate::field::FieldElem::ONE;
    for _ in 1..=s {
        power = big.mul(power, big.generator());
        for j in 0..=d as usize {
            let mut v = vec![crate::field::FieldElem::ZERO; d as usize + 1];
            v[j] = power;
            rows.push(rm.expand_vector(&v));
        }
    }
    let chi = if rows.is_empty() {
        Subspace::empty(rm.image_n())
    } else {
        Subspace::from_rows(small, cols - 1, rows)
    };
    let mut trace = ChiTrace::default();
    trace.levels.push(ChiLevel {
        ambient_dim: d as u32,
        case: "algebraic",
        q_point: None,
        subline_points: Vec::new(),
        dim_chi: chi.pdim(),
        dim_t_cprime: None,
        dim_t_subline: None,
        dim_sigma_q_prime: None,
        subline_space_meets_recursive_space_in_sigma_q: None,
    });
    expect_dim("algebraic chi", chi.pdim(), s as i64 * (d + 1) - 1, &trace)?;
    Ok(ChiResult {
        chi,
        construction: ChiConstruction::Algebraic,
        trace,
    })
}

/// Checks that chi meets the image of every point of the subgeometry exactly
/// in an (s-1)-space.
pub fn verify_chi(rm: &ReductionMap, chi: &Subspace, c: &Subgeometry) -> ChiReport {
    let s = rm.s() as i64;
    let d = rm.t() as i64;
    let chi_pdim_ok = chi.pdim() == s * (d + 1) - 1;
    let per_point = c
        .points()
        .iter()
        .map(|q| {
            let img = rm.fr_point(q);
            let ok = meet(rm.small(), chi, &img).pdim() == s - 1;
            (q.label(), ok)
        })
        .collect();
    ChiReport {
        chi_pdim_ok,
        per_point,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn setup(q: u32, s: u32, d: u32) -> (ReductionMap, Subgeometry) {
        let rm = ReductionMap::new(q, s, d).unwrap();
        let c = Subgeometry::canonical(&rm, d as usize, d as usize);
        (rm, c)
    }

    #[test]
    fn base_point_case() {
        // d=0 (single point): chi is an (s-1)-space, property vacuous.
        let (rm, c) = setup(2, 1, 0);
        let res = chi_inductive(&rm, &c).unwrap();
        assert_eq!(res.chi.pdim(), 0);
        assert!(verify_chi(&rm, &res.chi, &c).pass());
    }

    #[test]
    fn subline_case_pg32() {
        // q=2, s=1, subline: chi is a transversal line of the regulus.
        let (rm, c) = setup(2, 1, 1);
        let res = chi_inductive(&rm, &c).unwrap();
        assert_eq!(res.chi.pdim(), 1);
        let report = verify_chi(&rm, &res.chi, &c);
        assert!(report.pass());
        assert_eq!(report.per_point.len(), 3);
    }

    #[test]
    fn inductive_case_pg52() {
        // q=2, s=1, d=2: chi is a plane of PG(5,2) meeting each of the 7
        // image lines in a point.
        let (rm, c) = setup(2, 1, 2);
        let res = chi_inductive(&rm, &c).unwrap();
        assert_eq!(res.chi.pdim(), 2);
        let report = verify_chi(&rm, &res.chi, &c);
        assert!(report.pass());
        assert_eq!(report.per_point.len(), 7);
        assert_eq!(res.trace.levels.len(), 2);
    }

    #[test]
    fn algebraic_matches_property_pg32() {
        let (rm, c) = setup(2, 1, 1);
        let res = chi_algebraic(&rm, &c).unwrap();
        assert_eq!(res.chi.pdim(), 1);
        assert!(verify_chi(&rm, &res.chi, &c).pass());
    }

    #[test]
    fn algebraic_matches_property_pg33() {
        // q=3, s=1, subline: chi meets each of the 4 image lines of PG(3,3).
        let (rm, c) = setup(3, 1, 1);
        let res = chi_algebraic(&rm, &c).unwrap();
        let report = verify_chi(&rm, &res.chi, &c);
        assert!(report.pass());
        assert_eq!(report.per_point.len(), 4);
    }

    #[test]
    fn algebraic_rejects_non_canonical() {
        let rm = ReductionMap::new(2, 1, 1).unwrap();
        let alpha = rm.big().generator();
        let c = Subgeometry::from_vectors(
            &rm,
            vec![
                vec![crate::field::FieldElem::ONE, crate::field::FieldElem::ZERO],
                vec![alpha, crate::field::FieldElem::ONE],
            ],
        )
        .unwrap();
        assert!(matches!(chi_algebraic(&rm, &c), Err(ChiError::NotCanonical)));
    }

    #[test]
    fn inductive_handles_non_canonical() {
        let rm = ReductionMap::new(2, 1, 1).unwrap();
        let alpha = rm.big().generator();
        let c = Subgeometry::from_vectors(
            &rm,
            vec![
                vec![crate::field::FieldElem::ONE, crate::field::FieldElem::ZERO],
                vec![alpha, crate::field::FieldElem::ONE],
            ],
        )
        .unwrap();
        let res = chi_inductive(&rm, &c).unwrap();
        assert!(verify_chi(&rm, &res.chi, &c).pass());
    }

    #[test]
    fn random_space_generically_fails() {
        let (rm, c) = setup(2, 1, 2);
        let small = rm.small();
        let all = enumerate_subspaces(small, rm.image_n(), 2, 10_000_000).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut failures = 0;
        for _ in 0..20 {
            let idx = rng.gen_range(0..all.len());
            if !verify_chi(&rm, &all[idx], &c).pass() {
                failures += 1;
            }
        }
        assert!(failures > 0, "random planes should generically fail");
    }

    #[test]
    fn both_constructions_share_the_property_not_the_space() {
        let (rm, c) = setup(3, 1, 2);
        let ind = chi_inductive(&rm, &c).unwrap();
        let alg = chi_algebraic(&rm, &c).unwrap();
        assert!(verify_chi(&rm, &ind.chi, &c).pass());
        assert!(verify_chi(&rm, &alg.chi, &c).pass());
        assert_eq!(ind.chi.pdim(), alg.chi.pdim());
    }

    #[test]
    fn trace_digest_is_stable() {
        let (rm, c) = setup(2, 1, 2);
        let a = chi_inductive(&rm, &c).unwrap();
        let b = chi_inductive(&rm, &c).unwrap();
        assert_eq!(a.trace.digest(), b.trace.digest());
        assert_eq!(a.chi, b.chi);
    }
}
