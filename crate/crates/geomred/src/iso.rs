//! The map phi: tau -> F(tau)^d meet chi^d and the full verification that it
//! induces an isomorphism between Y(s,t,q) and X(s,t,q).
//!
//! The dual of chi is identified with PG(s+t,q) through the ordered basis
//! given by its RREF rows; the s-space pi = F(Sigma)^d and everything on the
//! X side live in those coordinates. The verifier re-derives both geometries
//! from scratch, maps every point and line through phi, and records each
//! check in a machine-readable certificate.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::chi::{chi_algebraic, chi_inductive, verify_chi, ChiError, ChiResult};
use crate::field::FieldElem;
use crate::geometry::{build_x, build_y, GeometryError};
use crate::projective::{
    contains, contains_point, dual, meet, span, PPoint, SpaceError, Subspace,
};
use crate::reduction::{ReductionError, ReductionMap};
use crate::subgeometry::Subgeometry;

#[derive(Debug, Error)]
pub enum IsoError {
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Chi(#[from] ChiError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("t must be at least 1")]
    BadParameters,
}

impl IsoError {
    /// Whether the failure is an enumeration budget overrun.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            IsoError::Geometry(GeometryError::Space(SpaceError::BudgetExceeded { .. }))
        )
    }
}

/// Which chi construction backs the certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    Inductive,
    Algebraic,
    Both,
}

impl std::fmt::Display for Construction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Construction::Inductive => write!(f, "inductive"),
            Construction::Algebraic => write!(f, "algebraic"),
            Construction::Both => write!(f, "both"),
        }
    }
}

impl std::str::FromStr for Construction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inductive" => Ok(Construction::Inductive),
            "algebraic" => Ok(Construction::Algebraic),
            "both" => Ok(Construction::Both),
            other => Err(format!("unknown construction {other}")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub construction: Construction,
    pub seed: u64,
    pub budget: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            construction: Construction::Both,
            seed: 0,
            budget: 10_000_000,
        }
    }
}

/// Everything phi needs: the reduction map, the Y-side infrastructure, chi
/// embedded in the image space, and the coordinate frame of its dual.
#[derive(Debug, Clone)]
pub struct PhiContext {
    rm: ReductionMap,
    sigma: Subspace,
    c: Subgeometry,
    chi: Subspace,
    chi_dual: Subspace,
    chi_dual_pivots: Vec<usize>,
    f_sigma: Subspace,
    pi: Subspace,
}

impl PhiContext {
    /// Builds the context from a chi of the restricted map (dimension st-1 in
    /// PG(st+t-1,q)), embedding it into PG(st+s+t,q) inside F(Sigma).
    pub fn new(rm: ReductionMap, sigma: Subspace, c: Subgeometry, chi_small: &Subspace) -> Self {
        let small = rm.small().clone();
        let chi = chi_small.pad_columns(rm.s() as usize + 1);
        let f_sigma = rm.fr_subspace(&sigma);
        assert!(
            contains(&small, &f_sigma, &chi),
            "chi must lie inside F(Sigma)"
        );
        let chi_dual = dual(&small, &chi);
        let chi_dual_pivots = chi_dual.basis().pivots();
        let mut ctx = PhiContext {
            rm,
            sigma,
            c,
            chi,
            chi_dual,
            chi_dual_pivots,
            f_sigma,
            pi: Subspace::empty(0),
        };
        let pi = ctx.express_in_chi_dual(&dual(&small, &ctx.f_sigma));
        ctx.pi = pi;
        ctx
    }

    pub fn rm(&self) -> &ReductionMap {
        &self.rm
    }

    pub fn sigma(&self) -> &Subspace {
        &self.sigma
    }

    pub fn c(&self) -> &Subgeometry {
        &self.c
    }

    pub fn chi(&self) -> &Subspace {
        &self.chi
    }

    pub fn chi_dual(&self) -> &Subspace {
        &self.chi_dual
    }

    pub fn f_sigma(&self) -> &Subspace {
        &self.f_sigma
    }

    /// phi(Sigma) = F(Sigma)^d in chi-dual coordinates: the distinguished
    /// s-space of the X side.
    pub fn pi(&self) -> &Subspace {
        &self.pi
    }

    /// Rewrites a subspace of chi^d in the coordinate frame of chi^d's RREF
    /// rows, i.e. as a subspace of PG(s+t,q).
    pub fn express_in_chi_dual(&self, w: &Subspace) -> Subspace {
        let small = self.rm.small();
        debug_assert!(contains(small, &self.chi_dual, w));
        let rank = self.chi_dual.rank();
        let mut rows = Vec::with_capacity(w.rank());
        for i in 0..w.rank() {
            let src = w.basis().row(i);
            let coords: Vec<FieldElem> =
                self.chi_dual_pivots.iter().map(|&p| src[p]).collect();
            debug_assert_eq!(coords.len(), rank);
            rows.push(coords);
        }
        if rows.is_empty() {
            return Subspace::empty(rank - 1);
        }
        Subspace::from_rows(small, rank - 1, rows)
    }

    /// F(tau)^d meet chi^d, in the big image ambient (no re-coordinatization).
    pub fn phi_raw(&self, tau: &Subspace) -> Subspace {
        let small = self.rm.small();
        meet(
            small,
            &dual(small, &self.rm.fr_subspace(tau)),
            &self.chi_dual,
        )
    }

    /// The map phi: subspaces of PG(t,q^{s+1}) to subspaces of PG(s+t,q).
    pub fn phi(&self, tau: &Subspace) -> Subspace {
        self.express_in_chi_dual(&self.phi_raw(tau))
    }

    /// phi on an affine point: a (t-1)-space of PG(s+t,q) disjoint from pi.
    pub fn phi_point(&self, p: &PPoint) -> Subspace {
        assert!(
            !contains_point(self.rm.big(), &self.sigma, p),
            "phi_point requires an affine point; use phi for subspaces of Sigma"
        );
        self.phi(&p.to_subspace())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub count: u64,
    pub witnesses: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertParams {
    pub q: u32,
    pub s: u32,
    pub t: u32,
    pub construction: String,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChiCert {
    pub construction: String,
    pub basis: Vec<String>,
    pub trace_digest: String,
}

/// The verifier's output: the checks, the maps, and the chi that was used.
#[derive(Debug, Clone, Serialize)]
pub struct IsoCertificate {
    pub params: CertParams,
    pub chi: ChiCert,
    pub checks: Vec<CheckResult>,
    pub point_map: Vec<(String, String)>,
    pub line_map: Vec<(usize, usize)>,
    pub pass: bool,
}

impl IsoCertificate {
    pub fn to_json_bytes(&self) -> Vec<u8> {
        let mut v = serde_json::to_vec_pretty(self).expect("certificate serializes");
        v.push(b'\n');
        v
    }
}

struct CheckCollector {
    checks: Vec<CheckResult>,
}

impl CheckCollector {
    fn new() -> Self {
        CheckCollector { checks: Vec::new() }
    }

    fn push(&mut self, name: &str, pass: bool, count: u64, witnesses: Vec<String>) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            pass,
            count,
            witnesses,
        });
    }

    fn skip(&mut self, name: &str, reason: &str) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            pass: false,
            count: 0,
            witnesses: vec![format!("skipped: {reason}")],
        });
    }

    fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

const MAX_WITNESSES: usize = 5;

/// Runs the full pipeline for (q,s,t): canonical Sigma and C, both chi
/// constructions (cross-verified), phi, both geometries, and the five
/// isomorphism checks plus the auxiliary invariants. Never silent: failures
/// land in the certificate with witnesses.
pub fn verify_isomorphism(
    q: u32,
    s: u32,
    t: u32,
    opts: &VerifyOptions,
) -> Result<IsoCertificate, IsoError> {
    if t == 0 {
        return Err(IsoError::BadParameters);
    }
    let rm = ReductionMap::new(q, s, t)?;
    let big = rm.big().clone();
    let small = rm.small().clone();
    let n = t as usize;

    // Canonical position: Sigma is the hyperplane X_t = 0, C the canonical
    // subgeometry inside it.
    let sigma = Subspace::from_rows(
        &big,
        n,
        (0..n).map(|i| PPoint::unit(n, i).coords().to_vec()).collect(),
    );
    let c = Subgeometry::from_vectors(
        &rm,
        (0..n).map(|i| PPoint::unit(n, i).coords().to_vec()).collect(),
    )
    .map_err(GeometryError::from)?;

    // chi for the restricted map on Sigma = PG(t-1, q^{s+1}).
    let rm_r = rm.restrict(t - 1);
    let c_r = Subgeometry::canonical(&rm_r, n - 1, n - 1);

    let mut checks = CheckCollector::new();
    let mut chi_results: Vec<ChiResult> = Vec::new();
    match opts.construction {
        Construction::Inductive => chi_results.push(chi_inductive(&rm_r, &c_r)?),
        Construction::Algebraic => chi_results.push(chi_algebraic(&rm_r, &c_r)?),
        Construction::Both => {
            chi_results.push(chi_inductive(&rm_r, &c_r)?);
            chi_results.push(chi_algebraic(&rm_r, &c_r)?);
        }
    }

    // Cross-verify every constructed chi against the defining property.
    let mut chi_witnesses = Vec::new();
    let mut chi_count = 0u64;
    for res in &chi_results {
        let report = verify_chi(&rm_r, &res.chi, &c_r);
        chi_count += report.per_point.len() as u64 + 1;
        if !report.chi_pdim_ok {
            chi_witnesses.push(format!("{} chi has wrong dimension", res.construction));
        }
        for (label, ok) in &report.per_point {
            if !ok && chi_witnesses.len() < MAX_WITNESSES {
                chi_witnesses.push(format!(
                    "{} chi misses the image of {label}",
                    res.construction
                ));
            }
        }
    }
    let chi_ok = chi_witnesses.is_empty();
    checks.push("chi_property", chi_ok, chi_count, chi_witnesses);

    // The certificate uses the first construction in the list.
    let used = &chi_results[0];
    let chi_cert = ChiCert {
        construction: used.construction.to_string(),
        basis: (0..used.chi.rank())
            .map(|i| {
                used.chi
                    .basis()
                    .row(i)
                    .iter()
                    .map(|c| c.code().to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect(),
        trace_digest: used.trace.digest(),
    };

    let params = CertParams {
        q,
        s,
        t,
        construction: opts.construction.to_string(),
        seed: opts.seed,
    };

    if !chi_ok {
        for name in [
            "phi_sigma",
            "claim1_bijection",
            "claim2_line_images",
            "maximal_intersection",
            "ekr_dichotomy",
            "line_map_bijection",
            "incidence_preservation",
            "c_point_images",
            "psi_triples",
        ] {
            checks.skip(name, "chi_property failed");
        }
        let pass = checks.all_pass();
        return Ok(IsoCertificate {
            params,
            chi: chi_cert,
            checks: checks.checks,
            point_map: Vec::new(),
            line_map: Vec::new(),
            pass,
        });
    }

    let ctx = PhiContext::new(rm.clone(), sigma.clone(), c.clone(), &used.chi);

    // phi(Sigma) = F(Sigma)^d is an s-space; chi^d has dimension s+t.
    {
        let mut w = Vec::new();
        if ctx.chi_dual.pdim() != (s + t) as i64 {
            w.push(format!("chi^d has dimension {}", ctx.chi_dual.pdim()));
        }
        if ctx.pi.pdim() != s as i64 {
            w.push(format!("pi has dimension {}", ctx.pi.pdim()));
        }
        if ctx.f_sigma.pdim() != (s * t + t - 1) as i64 {
            w.push(format!("F(Sigma) has dimension {}", ctx.f_sigma.pdim()));
        }
        let ok = w.is_empty();
        checks.push("phi_sigma", ok, 3, w);
    }

    // Build both geometries. pi is phi(Sigma) expressed in chi-dual
    // coordinates; X lives entirely in that frame.
    let built_x = build_x(&small, s, t, &ctx.pi, opts.budget)?;
    let built_y = build_y(&rm, &sigma, &c)?;
    let x_index: std::collections::HashMap<String, usize> = built_x
        .geometry
        .point_labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.clone(), i))
        .collect();
    let x_line_index: std::collections::HashMap<String, usize> = built_x
        .line_spaces
        .iter()
        .enumerate()
        .map(|(i, sp)| (sp.label(), i))
        .collect();

    // Claim 1: phi is a bijection from the affine points onto the
    // (t-1)-spaces disjoint from pi.
    let expected_points = crate::projective::count_disjoint_spaces(s, t, q as u64);
    let mut point_images: Vec<Option<usize>> = Vec::with_capacity(built_y.points.len());
    let mut point_map = Vec::new();
    {
        let mut w = Vec::new();
        let mut seen = vec![false; built_x.geometry.n_points()];
        for p in built_y.points.iter() {
            let img = ctx.phi_point(p);
            if img.pdim() != t as i64 - 1 {
                if w.len() < MAX_WITNESSES {
                    w.push(format!(
                        "image of {} has dimension {}",
                        p.label(),
                        img.pdim()
                    ));
                }
                point_images.push(None);
                continue;
            }
            match x_index.get(&img.label()) {
                Some(&xi) => {
                    if seen[xi] {
                        if w.len() < MAX_WITNESSES {
                            w.push(format!("image of {} repeats {}", p.label(), img.label()));
                        }
                        point_images.push(None);
                    } else {
                        seen[xi] = true;
                        point_images.push(Some(xi));
                        point_map
                            .push((p.label(), built_x.geometry.point_labels[xi].clone()));
                    }
                }
                None => {
                    if w.len() < MAX_WITNESSES {
                        w.push(format!(
                            "image {} of {} is not an X point",
                            img.label(),
                            p.label()
                        ));
                    }
                    point_images.push(None);
                }
            }
        }
        let counts_ok = built_y.points.len() as u128 == expected_points
            && built_x.geometry.n_points() as u128 == expected_points;
        if !counts_ok && w.len() < MAX_WITNESSES {
            w.push(format!(
                "|P_Y| = {}, |P_X| = {}, expected {}",
                built_y.points.len(),
                built_x.geometry.n_points(),
                expected_points
            ));
        }
        let ok = w.is_empty() && counts_ok;
        checks.push(
            "claim1_bijection",
            ok,
            built_y.points.len() as u64,
            w,
        );
    }
    let claim1_ok = checks.checks.last().map(|c| c.pass).unwrap_or(false);

    // Claim 2: the images of each Y line fill exactly one X line.
    let mut line_map_entries: Vec<Option<usize>> = Vec::new();
    if claim1_ok {
        let mut w = Vec::new();
        for (li, line) in built_y.geometry.lines.iter().enumerate() {
            let image_set: Vec<usize> = {
                let mut v: Vec<usize> = line
                    .iter()
                    .map(|&yi| point_images[yi].expect("claim 1 passed"))
                    .collect();
                v.sort_unstable();
                v
            };
            let spanned = line.iter().fold(
                Subspace::empty((s + t) as usize),
                |acc, &yi| {
                    span(
                        &small,
                        &acc,
                        &built_x.point_spaces[point_images[yi].expect("claim 1 passed")],
                    )
                },
            );
            let mut bad = None;
            if spanned.pdim() != t as i64 {
                bad = Some(format!(
                    "images of Y line {li} span dimension {}",
                    spanned.pdim()
                ));
            } else if meet(&small, &spanned, &ctx.pi).pdim() != 0 {
                bad = Some(format!(
                    "span of Y line {li} images meets pi in dimension {}",
                    meet(&small, &spanned, &ctx.pi).pdim()
                ));
            } else {
                match x_line_index.get(&spanned.label()) {
                    Some(&xl) => {
                        if built_x.geometry.lines[xl] != image_set {
                            bad = Some(format!(
                                "images of Y line {li} do not fill X line {xl}"
                            ));
                        } else {
                            line_map_entries.push(Some(xl));
                        }
                    }
                    None => {
                        bad = Some(format!(
                            "span of Y line {li} is not an X line"
                        ));
                    }
                }
            }
            if let Some(msg) = bad {
                if w.len() < MAX_WITNESSES {
                    w.push(msg);
                }
                line_map_entries.push(None);
            }
        }
        let ok = w.is_empty();
        checks.push(
            "claim2_line_images",
            ok,
            built_y.geometry.n_lines() as u64,
            w,
        );
    } else {
        checks.skip("claim2_line_images", "claim1 failed");
    }
    let claim2_ok = checks.checks.last().map(|c| c.pass).unwrap_or(false);

    // Pairwise maximal intersection: any two images on a Y line meet in a
    // (t-2)-space.
    if claim1_ok {
        let mut w = Vec::new();
        let mut count = 0u64;
        for (li, line) in built_y.geometry.lines.iter().enumerate() {
            for (i, &a) in line.iter().enumerate() {
                for &b in line.iter().skip(i + 1) {
                    count += 1;
                    let sa = &built_x.point_spaces[point_images[a].expect("claim 1 passed")];
                    let sb = &built_x.point_spaces[point_images[b].expect("claim 1 passed")];
                    let m = meet(&small, sa, sb);
                    if m.pdim() != t as i64 - 2 && w.len() < MAX_WITNESSES {
                        w.push(format!(
                            "images on Y line {li} meet in dimension {}",
                            m.pdim()
                        ));
                    }
                }
            }
        }
        let ok = w.is_empty();
        checks.push("maximal_intersection", ok, count, w);
    } else {
        checks.skip("maximal_intersection", "claim1 failed");
    }

    // Dichotomy guard: for t >= 2, the images of a Y line never share a
    // common (t-2)-space; that branch is possible only for t = 1.
    if claim1_ok {
        if t >= 2 {
            let mut w = Vec::new();
            for (li, line) in built_y.geometry.lines.iter().enumerate() {
                let common = line.iter().fold(
                    Subspace::whole((s + t) as usize),
                    |acc, &yi| {
                        meet(
                            &small,
                            &acc,
                            &built_x.point_spaces[point_images[yi].expect("claim 1 passed")],
                        )
                    },
                );
                if common.pdim() >= t as i64 - 2 && w.len() < MAX_WITNESSES {
                    w.push(format!(
                        "images of Y line {li} share a common {}-space",
                        common.pdim()
                    ));
                }
            }
            let ok = w.is_empty();
            checks.push(
                "ekr_dichotomy",
                ok,
                built_y.geometry.n_lines() as u64,
                w,
            );
        } else {
            // t = 1 is the collinearity branch; nothing to exclude.
            checks.push("ekr_dichotomy", true, 0, Vec::new());
        }
    } else {
        checks.skip("ekr_dichotomy", "claim1 failed");
    }

    // The induced line map is a bijection onto L_X.
    let mut line_map = Vec::new();
    if claim2_ok {
        let mut w = Vec::new();
        let mut seen = vec![false; built_x.geometry.n_lines()];
        for (li, entry) in line_map_entries.iter().enumerate() {
            match entry {
                Some(xl) => {
                    if seen[*xl] {
                        if w.len() < MAX_WITNESSES {
                            w.push(format!("X line {xl} hit twice"));
                        }
                    } else {
                        seen[*xl] = true;
                        line_map.push((li, *xl));
                    }
                }
                None => {
                    if w.len() < MAX_WITNESSES {
                        w.push(format!("Y line {li} has no image"));
                    }
                }
            }
        }
        if built_y.geometry.n_lines() != built_x.geometry.n_lines() && w.len() < MAX_WITNESSES {
            w.push(format!(
                "|L_Y| = {}, |L_X| = {}",
                built_y.geometry.n_lines(),
                built_x.geometry.n_lines()
            ));
        }
        let ok = w.is_empty() && line_map.len() == built_x.geometry.n_lines();
        checks.push(
            "line_map_bijection",
            ok,
            built_y.geometry.n_lines() as u64,
            w,
        );
    } else {
        checks.skip("line_map_bijection", "claim2 failed");
    }
    let line_map_ok = checks.checks.last().map(|c| c.pass).unwrap_or(false);

    // Incidence preservation in both directions: the Y lines through a point
    // map exactly onto the X lines through its image.
    if claim1_ok && line_map_ok {
        let mut w = Vec::new();
        let y_through = built_y.geometry.lines_through();
        let x_through = built_x.geometry.lines_through();
        for (yi, ylines) in y_through.iter().enumerate() {
            let xi = point_images[yi].expect("claim 1 passed");
            let mut mapped: Vec<usize> = ylines
                .iter()
                .map(|&li| line_map_entries[li].expect("line map total"))
                .collect();
            mapped.sort_unstable();
            let mut expect = x_through[xi].clone();
            expect.sort_unstable();
            if mapped != expect && w.len() < MAX_WITNESSES {
                w.push(format!(
                    "incidence mismatch at Y point {}",
                    built_y.geometry.point_labels[yi]
                ));
            }
        }
        let ok = w.is_empty();
        checks.push(
            "incidence_preservation",
            ok,
            built_y.geometry.n_points() as u64,
            w,
        );
    } else {
        checks.skip("incidence_preservation", "claim1 or line map failed");
    }

    // For every Q in C: phi(Q) is an (s+t-1)-space through pi.
    {
        let mut w = Vec::new();
        for qp in c.points() {
            let img = ctx.phi(&qp.to_subspace());
            if img.pdim() != (s + t) as i64 - 1 && w.len() < MAX_WITNESSES {
                w.push(format!(
                    "phi({}) has dimension {}",
                    qp.label(),
                    img.pdim()
                ));
            }
            if !contains(&small, &img, &ctx.pi) && w.len() < MAX_WITNESSES {
                w.push(format!("phi({}) does not contain pi", qp.label()));
            }
        }
        let ok = w.is_empty();
        checks.push("c_point_images", ok, c.points().len() as u64, w);
    }

    // Sampled triples (P1, P2, Q = P1P2 meet C): Psi = <F(P1),F(P2)> is a
    // (2s+1)-space and phi(Q) meets Psi^d in a (t-2)-space.
    {
        let mut w = Vec::new();
        let mut pairs = Vec::new();
        for line in &built_y.geometry.lines {
            for (i, &a) in line.iter().enumerate() {
                for &b in line.iter().skip(i + 1) {
                    pairs.push((a, b));
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        pairs.shuffle(&mut rng);
        pairs.truncate(64);
        pairs.sort_unstable();
        let mut count = 0u64;
        for (a, b) in pairs {
            let p1 = &built_y.points[a];
            let p2 = &built_y.points[b];
            let big_line = span(
                &big,
                &p1.to_subspace(),
                &p2.to_subspace(),
            );
            let q_pt = meet(&big, &big_line, &sigma);
            if q_pt.pdim() != 0 {
                continue;
            }
            let q_point = crate::projective::points_of(&big, &q_pt)[0].clone();
            if !c.contains(&q_point) {
                // The pair does not come from a common Y line through C.
                continue;
            }
            count += 1;
            let psi = span(&small, &rm.fr_point(p1), &rm.fr_point(p2));
            if psi.pdim() != 2 * s as i64 + 1 && w.len() < MAX_WITNESSES {
                w.push(format!("Psi has dimension {}", psi.pdim()));
                continue;
            }
            let psi_dual = dual(&small, &psi);
            let phi_q_raw = ctx.phi_raw(&q_point.to_subspace());
            let m = meet(&small, &phi_q_raw, &psi_dual);
            if m.pdim() != t as i64 - 2 && w.len() < MAX_WITNESSES {
                w.push(format!(
                    "phi(Q) meets Psi^d in dimension {} for Q = {}",
                    m.pdim(),
                    q_point.label()
                ));
            }
        }
        let ok = w.is_empty();
        checks.push("psi_triples", ok, count, w);
    }

    let pass = checks.all_pass();
    Ok(IsoCertificate {
        params,
        chi: chi_cert,
        checks: checks.checks,
        point_map,
        line_map,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(q: u32, s: u32, t: u32, construction: Construction) -> IsoCertificate {
        let opts = VerifyOptions {
            construction,
            seed: 7,
            budget: 10_000_000,
        };
        verify_isomorphism(q, s, t, &opts).unwrap()
    }

    #[test]
    fn iso_212_both() {
        let cert = run(2, 1, 2, Construction::Both);
        assert!(cert.pass, "checks: {:?}", cert.checks);
        assert_eq!(cert.point_map.len(), 16);
        assert_eq!(cert.line_map.len(), 12);
    }

    #[test]
    fn iso_211_t1_branch() {
        let cert = run(2, 1, 1, Construction::Both);
        assert!(cert.pass, "checks: {:?}", cert.checks);
        assert_eq!(cert.point_map.len(), 4);
        assert_eq!(cert.line_map.len(), 6);
    }

    #[test]
    fn iso_312() {
        let cert = run(3, 1, 2, Construction::Inductive);
        assert!(cert.pass, "checks: {:?}", cert.checks);
        assert_eq!(cert.point_map.len(), 81);
        assert_eq!(cert.line_map.len(), 36);
    }

    #[test]
    fn phi_maps_sigma_to_pi_and_whole_to_empty() {
        let rm = ReductionMap::new(2, 1, 2).unwrap();
        let big = rm.big().clone();
        let sigma = Subspace::from_rows(
            &big,
            2,
            vec![
                PPoint::unit(2, 0).coords().to_vec(),
                PPoint::unit(2, 1).coords().to_vec(),
            ],
        );
        let c = Subgeometry::from_vectors(
            &rm,
            vec![
                PPoint::unit(2, 0).coords().to_vec(),
                PPoint::unit(2, 1).coords().to_vec(),
            ],
        )
        .unwrap();
        let rm_r = rm.restrict(1);
        let c_r = Subgeometry::canonical(&rm_r, 1, 1);
        let chi = chi_inductive(&rm_r, &c_r).unwrap();
        let ctx = PhiContext::new(rm, sigma.clone(), c, &chi.chi);

        assert_eq!(ctx.phi(&sigma), ctx.pi().clone());
        assert_eq!(ctx.pi().pdim(), 1);
        let whole = ctx.phi(&Subspace::whole(2));
        assert!(whole.is_empty());
        // An affine point maps to a line of PG(3,2) disjoint from pi.
        let p = PPoint::unit(2, 2);
        let img = ctx.phi_point(&p);
        assert_eq!(img.pdim(), 1);
        assert!(crate::projective::is_disjoint(
            ctx.rm().small(),
            &img,
            ctx.pi()
        ));
    }

    #[test]
    fn certificate_deterministic() {
        let a = run(2, 1, 2, Construction::Both);
        let b = run(2, 1, 2, Construction::Both);
        assert_eq!(a.to_json_bytes(), b.to_json_bytes());
    }
}
