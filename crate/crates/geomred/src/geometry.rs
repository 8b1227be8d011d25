//! The three point-line geometries as finite incidence structures with
//! deterministic indexing: X(s,t,q) built from subspaces of PG(s+t,q),
//! Y(s,t,q) from affine points and subgeometries of PG(t,q^{s+1}), and the
//! linear representation T*(K) from punctured affine lines.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::field::FieldCtx;
use crate::projective::{
    contains_point, enumerate_subspaces, is_disjoint, meet, points_of, span, PPoint, SpaceError,
    Subspace,
};
use crate::reduction::ReductionMap;
use crate::subgeometry::{lines_of_y_through, Subgeometry, SubgeometryError};

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Subgeometry(#[from] SubgeometryError),
    #[error(transparent)]
    Reduction(#[from] crate::reduction::ReductionError),
    #[error("K must be a nonempty subset of the hyperplane at infinity")]
    KNotInHyperplane,
    #[error("incidence file is malformed: {0}")]
    BadIncidenceFile(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GeometryKind {
    X,
    Y,
    Tstar,
}

impl std::fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GeometryKind::X => write!(f, "X"),
            GeometryKind::Y => write!(f, "Y"),
            GeometryKind::Tstar => write!(f, "Tstar"),
        }
    }
}

/// A point-line geometry with indexed points and lines as sorted index lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceGeometry {
    pub kind: GeometryKind,
    pub q: u32,
    pub s: u32,
    pub t: u32,
    pub point_labels: Vec<String>,
    pub lines: Vec<Vec<usize>>,
}

impl IncidenceGeometry {
    pub fn n_points(&self) -> usize {
        self.point_labels.len()
    }

    pub fn n_lines(&self) -> usize {
        self.lines.len()
    }

    /// Lines through each point, by point index.
    pub fn lines_through(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.point_labels.len()];
        for (li, line) in self.lines.iter().enumerate() {
            for &pi in line {
                out[pi].push(li);
            }
        }
        out
    }
}

/// Parameter record of a geometry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeometryStats {
    pub points: usize,
    pub lines: usize,
    /// line size -> number of lines of that size
    pub line_sizes: BTreeMap<usize, usize>,
    /// point degree -> number of points of that degree
    pub degrees: BTreeMap<usize, usize>,
    pub partial_linear: bool,
}

/// Point/line counts, size and degree multisets, and the partial-linear-space
/// check (two points on at most one common line).
pub fn geometry_stats(g: &IncidenceGeometry) -> GeometryStats {
    let mut line_sizes = BTreeMap::new();
    for line in &g.lines {
        *line_sizes.entry(line.len()).or_insert(0) += 1;
    }
    let mut degree = vec![0usize; g.n_points()];
    let mut pair_seen: HashMap<(usize, usize), usize> = HashMap::new();
    let mut partial_linear = true;
    for line in &g.lines {
        for (i, &a) in line.iter().enumerate() {
            degree[a] += 1;
            for &b in line.iter().skip(i + 1) {
                let key = if a < b { (a, b) } else { (b, a) };
                let c = pair_seen.entry(key).or_insert(0);
                *c += 1;
                if *c > 1 {
                    partial_linear = false;
                }
            }
        }
    }
    let mut degrees = BTreeMap::new();
    for d in degree {
        *degrees.entry(d).or_insert(0) += 1;
    }
    GeometryStats {
        points: g.n_points(),
        lines: g.n_lines(),
        line_sizes,
        degrees,
        partial_linear,
    }
}

/// X(s,t,q) plus the underlying subspaces for each point and line.
#[derive(Debug, Clone)]
pub struct BuiltX {
    pub geometry: IncidenceGeometry,
    pub point_spaces: Vec<Subspace>,
    pub line_spaces: Vec<Subspace>,
}

/// Builds X(s,t,q) in PG(s+t,q): points are the (t-1)-spaces disjoint from
/// pi, lines are the t-spaces meeting pi in exactly one point, with members
/// computed by filtering each t-space's internal (t-1)-subspaces.
pub fn build_x(
    ctx: &FieldCtx,
    s: u32,
    t: u32,
    pi: &Subspace,
    budget: u64,
) -> Result<BuiltX, GeometryError> {
    let n = (s + t) as usize;
    assert_eq!(pi.ambient_n(), n, "pi must live in PG(s+t,q)");
    assert_eq!(pi.pdim(), s as i64, "pi must be an s-space");

    let candidates = enumerate_subspaces(ctx, n, t as usize - 1, budget)?;
    let mut point_labels = Vec::new();
    let mut point_spaces = Vec::new();
    let mut index = HashMap::new();
    for w in candidates {
        if is_disjoint(ctx, &w, pi) {
            index.insert(w.label(), point_labels.len());
            point_labels.push(w.label());
            point_spaces.push(w);
        }
    }

    // Internal parametrization of the (t-1)-subspaces of a t-space.
    let internal = enumerate_subspaces(ctx, t as usize, t as usize - 1, budget)?;
    let tspaces = enumerate_subspaces(ctx, n, t as usize, budget)?;
    let mut lines = Vec::new();
    let mut line_spaces = Vec::new();
    for big in tspaces {
        if meet(ctx, &big, pi).pdim() != 0 {
            continue;
        }
        let mut members = Vec::new();
        for coef in &internal {
            let w = Subspace::from_matrix(ctx, coef.basis().mul(big.basis(), ctx));
            debug_assert_eq!(w.pdim(), t as i64 - 1);
            if let Some(&i) = index.get(&w.label()) {
                members.push(i);
            }
        }
        members.sort_unstable();
        debug_assert_eq!(members.len() as u128, (ctx.order() as u128).pow(t));
        lines.push(members);
        line_spaces.push(big);
    }

    Ok(BuiltX {
        geometry: IncidenceGeometry {
            kind: GeometryKind::X,
            q: ctx.order(),
            s,
            t,
            point_labels,
            lines,
        },
        point_spaces,
        line_spaces,
    })
}

/// Y(s,t,q) plus the affine points backing each index.
#[derive(Debug, Clone)]
pub struct BuiltY {
    pub geometry: IncidenceGeometry,
    pub points: Vec<PPoint>,
}

/// Builds Y(s,t,q) in PG(t,q^{s+1}): points are the affine points (off
/// sigma), lines are the sets B minus C over all t-dimensional subgeometries
/// B containing C, generated per affine point and deduplicated globally.
pub fn build_y(
    rm: &ReductionMap,
    sigma: &Subspace,
    c: &Subgeometry,
) -> Result<BuiltY, GeometryError> {
    let big = rm.big();
    let all = points_of(big, &Subspace::whole(rm.domain_n()));
    let mut points = Vec::new();
    let mut index = HashMap::new();
    for p in all {
        if !contains_point(big, sigma, &p) {
            index.insert(p.label(), points.len());
            points.push(p);
        }
    }

    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut lines = Vec::new();
    for p in &points {
        for b in lines_of_y_through(rm, c, sigma, p)? {
            let mut members: Vec<usize> = b
                .points()
                .iter()
                .filter(|pt| !contains_point(big, sigma, pt))
                .map(|pt| index[&pt.label()])
                .collect();
            members.sort_unstable();
            if seen.insert(members.clone()) {
                lines.push(members);
            }
        }
    }

    Ok(BuiltY {
        geometry: IncidenceGeometry {
            kind: GeometryKind::Y,
            q: rm.q(),
            s: rm.s(),
            t: rm.t(),
            point_labels: points.iter().map(|p| p.label()).collect(),
            lines,
        },
        points,
    })
}

/// Builds the linear representation T*(K) in PG(n,q'): points are the affine
/// points, lines are the punctured lines l minus {P} over P in K and lines l
/// through P not inside the hyperplane at infinity.
pub fn build_tstar(
    ctx: &FieldCtx,
    hinf: &Subspace,
    k_points: &[PPoint],
    meta: (u32, u32, u32),
) -> Result<IncidenceGeometry, GeometryError> {
    if k_points.is_empty() || k_points.iter().any(|p| !contains_point(ctx, hinf, p)) {
        return Err(GeometryError::KNotInHyperplane);
    }
    let n = hinf.ambient_n();
    let all = points_of(ctx, &Subspace::whole(n));
    let mut points = Vec::new();
    let mut index = HashMap::new();
    for p in all {
        if !contains_point(ctx, hinf, &p) {
            index.insert(p.label(), points.len());
            points.push(p);
        }
    }

    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut lines = Vec::new();
    for kp in k_points {
        for a in &points {
            let l = span(ctx, &kp.to_subspace(), &a.to_subspace());
            let mut members: Vec<usize> = points_of(ctx, &l)
                .iter()
                .filter(|pt| !contains_point(ctx, hinf, pt))
                .map(|pt| index[&pt.label()])
                .collect();
            members.sort_unstable();
            if seen.insert(members.clone()) {
                lines.push(members);
            }
        }
    }

    let (q, s, t) = meta;
    Ok(IncidenceGeometry {
        kind: GeometryKind::Tstar,
        q,
        s,
        t,
        point_labels: points.iter().map(|p| p.label()).collect(),
        lines,
    })
}

/// The canonical D_{s,t,q}: an s-dimensional F_q-subgeometry of PG(s,q^t)
/// inside the hyperplane X_{s+1} = 0 of PG(s+1,q^t), together with its
/// ambient machinery. Returns T*(D_{s,t,q}).
pub fn build_tstar_d(q: u32, s: u32, t: u32) -> Result<IncidenceGeometry, GeometryError> {
    // Reuse the reduction machinery for the subfield pair GF(q) in GF(q^t):
    // extension degree t means the "s" slot is t-1; the domain dimension slot
    // is s+1, the ambient of the linear representation.
    let rm = ReductionMap::new(q, t - 1, s + 1)?;
    let ctx = rm.big().clone();
    let n = (s + 1) as usize;
    let hinf = Subspace::from_rows(
        &ctx,
        n,
        (0..n).map(|i| PPoint::unit(n, i).coords().to_vec()).collect(),
    );
    let d = Subgeometry::from_vectors(
        &rm,
        (0..=s as usize)
            .map(|i| PPoint::unit(n, i).coords().to_vec())
            .collect(),
    )?;
    build_tstar(&ctx, &hinf, d.points(), (q, s, t))
}

/// Line-oriented incidence text format:
/// header `p <npoints> l <nlines> q <q> s <s> t <t> kind <X|Y|Tstar>`,
/// then one line per geometry line as space-separated sorted point indices.
pub fn write_incidence(g: &IncidenceGeometry) -> String {
    let mut out = format!(
        "p {} l {} q {} s {} t {} kind {}\n",
        g.n_points(),
        g.n_lines(),
        g.q,
        g.s,
        g.t,
        g.kind
    );
    for line in &g.lines {
        let row: Vec<String> = line.iter().map(|i| i.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Parses the incidence text format. Point labels are not part of the format;
/// they are restored as index strings.
pub fn parse_incidence(text: &str) -> Result<IncidenceGeometry, GeometryError> {
    let mut lines_iter = text.lines();
    let header = lines_iter
        .next()
        .ok_or_else(|| GeometryError::BadIncidenceFile("empty file".into()))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 12
        || toks[0] != "p"
        || toks[2] != "l"
        || toks[4] != "q"
        || toks[6] != "s"
        || toks[8] != "t"
        || toks[10] != "kind"
    {
        return Err(GeometryError::BadIncidenceFile("bad header".into()));
    }
    let parse = |s: &str| -> Result<usize, GeometryError> {
        s.parse()
            .map_err(|_| GeometryError::BadIncidenceFile(format!("bad number {s}")))
    };
    let npoints = parse(toks[1])?;
    let nlines = parse(toks[3])?;
    let kind = match toks[11] {
        "X" => GeometryKind::X,
        "Y" => GeometryKind::Y,
        "Tstar" => GeometryKind::Tstar,
        other => {
            return Err(GeometryError::BadIncidenceFile(format!(
                "unknown kind {other}"
            )))
        }
    };
    let mut lines = Vec::with_capacity(nlines);
    for row in lines_iter {
        if row.trim().is_empty() {
            continue;
        }
        let mut members = Vec::new();
        for tok in row.split_whitespace() {
            let idx = parse(tok)?;
            if idx >= npoints {
                return Err(GeometryError::BadIncidenceFile(format!(
                    "index {idx} out of range"
                )));
            }
            members.push(idx);
        }
        lines.push(members);
    }
    if lines.len() != nlines {
        return Err(GeometryError::BadIncidenceFile(format!(
            "expected {nlines} lines, found {}",
            lines.len()
        )));
    }
    Ok(IncidenceGeometry {
        kind,
        q: parse(toks[5])? as u32,
        s: parse(toks[7])? as u32,
        t: parse(toks[9])? as u32,
        point_labels: (0..npoints).map(|i| i.to_string()).collect(),
        lines,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canonical_pi(ctx: &FieldCtx, s: u32, t: u32) -> Subspace {
        let n = (s + t) as usize;
        Subspace::from_rows(
            ctx,
            n,
            (0..=s as usize)
                .map(|i| PPoint::unit(n, i).coords().to_vec())
                .collect(),
        )
    }

    fn canonical_y(q: u32, s: u32, t: u32) -> (ReductionMap, Subspace, Subgeometry) {
        let rm = ReductionMap::new(q, s, t).unwrap();
        let n = t as usize;
        let sigma = Subspace::from_rows(
            rm.big(),
            n,
            (0..n).map(|i| PPoint::unit(n, i).coords().to_vec()).collect(),
        );
        let c = Subgeometry::from_vectors(
            &rm,
            (0..n).map(|i| PPoint::unit(n, i).coords().to_vec()).collect(),
        )
        .unwrap();
        (rm, sigma, c)
    }

    #[test]
    fn x_122_parameters() {
        // s=1, t=2, q=2: 16 points, 12 lines of size 4, degree 3.
        let ctx = FieldCtx::new(2, 1).unwrap();
        let pi = canonical_pi(&ctx, 1, 2);
        let built = build_x(&ctx, 1, 2, &pi, 1_000_000).unwrap();
        let stats = geometry_stats(&built.geometry);
        assert_eq!(stats.points, 16);
        assert_eq!(stats.lines, 12);
        assert_eq!(stats.line_sizes, BTreeMap::from([(4, 12)]));
        assert_eq!(stats.degrees, BTreeMap::from([(3, 16)]));
        assert!(stats.partial_linear);
    }

    #[test]
    fn x_t1_degenerate() {
        // t=1: points of PG(s+1,q) off a hyperplane.
        let ctx = FieldCtx::new(2, 1).unwrap();
        let pi = canonical_pi(&ctx, 1, 1);
        let built = build_x(&ctx, 1, 1, &pi, 1_000_000).unwrap();
        assert_eq!(built.geometry.n_points(), 4);
        assert_eq!(built.geometry.n_lines(), 6);
        for line in &built.geometry.lines {
            assert_eq!(line.len(), 2);
        }
    }

    #[test]
    fn y_122_parameters() {
        let (rm, sigma, c) = canonical_y(2, 1, 2);
        let built = build_y(&rm, &sigma, &c).unwrap();
        let stats = geometry_stats(&built.geometry);
        assert_eq!(stats.points, 16);
        assert_eq!(stats.lines, 12);
        assert_eq!(stats.line_sizes, BTreeMap::from([(4, 12)]));
        assert_eq!(stats.degrees, BTreeMap::from([(3, 16)]));
        assert!(stats.partial_linear);
    }

    #[test]
    fn x_and_y_records_match() {
        let ctx = FieldCtx::new(2, 1).unwrap();
        let pi = canonical_pi(&ctx, 1, 2);
        let x = build_x(&ctx, 1, 2, &pi, 1_000_000).unwrap();
        let (rm, sigma, c) = canonical_y(2, 1, 2);
        let y = build_y(&rm, &sigma, &c).unwrap();
        assert_eq!(geometry_stats(&x.geometry), geometry_stats(&y.geometry));
    }

    #[test]
    fn tstar_single_point() {
        // K a single point: one parallel class of q'^s lines.
        let ctx = FieldCtx::new(2, 2).unwrap();
        let hinf = Subspace::from_rows(
            &ctx,
            2,
            vec![
                PPoint::unit(2, 0).coords().to_vec(),
                PPoint::unit(2, 1).coords().to_vec(),
            ],
        );
        let k = vec![PPoint::unit(2, 0)];
        let g = build_tstar(&ctx, &hinf, &k, (2, 1, 2)).unwrap();
        assert_eq!(g.n_points(), 16);
        assert_eq!(g.n_lines(), 4);
        let stats = geometry_stats(&g);
        assert_eq!(stats.degrees, BTreeMap::from([(1, 16)]));
    }

    #[test]
    fn tstar_d_matches_x_and_y_parameters() {
        let g = build_tstar_d(2, 1, 2).unwrap();
        let stats = geometry_stats(&g);
        assert_eq!(stats.points, 16);
        assert_eq!(stats.lines, 12);
        assert_eq!(stats.line_sizes, BTreeMap::from([(4, 12)]));
        assert_eq!(stats.degrees, BTreeMap::from([(3, 16)]));
        assert!(stats.partial_linear);
    }

    #[test]
    fn tstar_k_validation() {
        let ctx = FieldCtx::new(2, 2).unwrap();
        let hinf = Subspace::from_rows(
            &ctx,
            2,
            vec![
                PPoint::unit(2, 0).coords().to_vec(),
                PPoint::unit(2, 1).coords().to_vec(),
            ],
        );
        assert!(matches!(
            build_tstar(&ctx, &hinf, &[], (2, 1, 2)),
            Err(GeometryError::KNotInHyperplane)
        ));
        assert!(matches!(
            build_tstar(&ctx, &hinf, &[PPoint::unit(2, 2)], (2, 1, 2)),
            Err(GeometryError::KNotInHyperplane)
        ));
    }

    #[test]
    fn incidence_roundtrip() {
        let (rm, sigma, c) = canonical_y(2, 1, 2);
        let built = build_y(&rm, &sigma, &c).unwrap();
        let text = write_incidence(&built.geometry);
        let parsed = parse_incidence(&text).unwrap();
        assert_eq!(parsed.lines, built.geometry.lines);
        assert_eq!(parsed.kind, GeometryKind::Y);
        // Re-serialization is byte-identical.
        assert_eq!(write_incidence(&parsed), text);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_incidence("").is_err());
        assert!(parse_incidence("p 4 l 1 q 2 s 1 t 1 kind Z\n0 1\n").is_err());
        assert!(parse_incidence("p 4 l 1 q 2 s 1 t 1 kind X\n0 9\n").is_err());
        assert!(parse_incidence("p 4 l 2 q 2 s 1 t 1 kind X\n0 1\n").is_err());
    }
}
