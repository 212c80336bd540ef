//! Ideal triangulations of compact surfaces with boundary.
//!
//! A surface is a finite set of right-angled hexagons glued in pairs along
//! alternate sides. Glued sides are the *edges* of the triangulation; the
//! remaining sides are boundary arcs, and each lies on one boundary
//! component. Boundary components are numbered `1..=n`; edge and face ids
//! are arbitrary positive integers.
//!
//! Text format, one record per line, `#` to end of line is a comment:
//!
//! ```text
//! surface <name>
//! boundaries <n>
//! edge <edge_id> <b_i> <b_j> <l0>
//! face <face_id> <e0> <e1> <e2> <c0> <c1> <c2>
//! ```
//!
//! Edge `e_t` is opposite corner `t`, and corner `t` lies on boundary
//! component `c_t`.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Boundary component index, `1..=n`.
pub type BoundaryId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: u32,
    /// Boundary components joined by the edge; may coincide.
    pub ends: [BoundaryId; 2],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub id: u32,
    /// `edges[t]` is the edge opposite corner `t`.
    pub edges: [u32; 3],
    /// `corners[t]` is the boundary component carrying the arc at corner `t`.
    pub corners: [BoundaryId; 3],
}

/// Combinatorics of an ideally triangulated surface.
///
/// Construction guarantees unique ids and that every reference resolves.
/// The topological invariants are checked separately by [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct IdealTriangulation {
    name: String,
    n_boundaries: usize,
    edges: Vec<Edge>,
    faces: Vec<Face>,
    edge_index: HashMap<u32, usize>,
    face_slots: Vec<[usize; 3]>,
}

impl IdealTriangulation {
    pub fn new(
        name: impl Into<String>,
        n_boundaries: usize,
        edges: Vec<Edge>,
        faces: Vec<Face>,
    ) -> Result<Self> {
        let mut edge_index = HashMap::with_capacity(edges.len());
        for (k, e) in edges.iter().enumerate() {
            if edge_index.insert(e.id, k).is_some() {
                return Err(Error::Options(format!("duplicate edge id {}", e.id)));
            }
            for &b in &e.ends {
                check_boundary(b, n_boundaries)?;
            }
        }
        let mut seen_faces = HashMap::with_capacity(faces.len());
        let mut face_slots = Vec::with_capacity(faces.len());
        for f in &faces {
            if seen_faces.insert(f.id, ()).is_some() {
                return Err(Error::Options(format!("duplicate face id {}", f.id)));
            }
            for &c in &f.corners {
                check_boundary(c, n_boundaries)?;
            }
            let mut slots = [0; 3];
            for (slot, id) in slots.iter_mut().zip(f.edges) {
                *slot = *edge_index.get(&id).ok_or_else(|| {
                    Error::Options(format!("face {} references undeclared edge {id}", f.id))
                })?;
            }
            face_slots.push(slots);
        }
        Ok(Self {
            name: name.into(),
            n_boundaries,
            edges,
            faces,
            edge_index,
            face_slots,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_boundaries(&self) -> usize {
        self.n_boundaries
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// Position of an edge id in [`edges`](Self::edges).
    pub fn edge_position(&self, id: u32) -> Option<usize> {
        self.edge_index.get(&id).copied()
    }

    /// Edge positions (into [`edges`](Self::edges)) of face number `face`, by corner slot.
    pub fn face_edge_positions(&self, face: usize) -> [usize; 3] {
        self.face_slots[face]
    }
}

fn check_boundary(b: BoundaryId, n: usize) -> Result<()> {
    if b == 0 || b > n {
        Err(Error::BoundaryOutOfRange { index: b, n })
    } else {
        Ok(())
    }
}

/// One hyperbolic length per edge, stored in the triangulation's edge order.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    lengths: Vec<f64>,
}

impl Metric {
    pub fn new(lengths: Vec<f64>) -> Result<Self> {
        for &l in &lengths {
            crate::error::check_positive("edge length", l)?;
        }
        Ok(Self { lengths })
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub code: &'static str,
    pub message: String,
    pub ids: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, code: &'static str, message: String, ids: Vec<u64>) {
        self.violations.push(Violation { code, message, ids });
    }

    pub fn has(&self, code: &str) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return write!(f, "ok");
        }
        write!(f, "{} violation(s)", self.violations.len())?;
        for v in &self.violations {
            write!(f, "; {}: {}", v.code, v.message)?;
        }
        Ok(())
    }
}

/// Check the combinatorial invariants of `tri` and positivity of `l0`.
pub fn validate(tri: &IdealTriangulation, l0: &Metric) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n_edges = tri.edges.len();
    let n_faces = tri.faces.len();

    if tri.n_boundaries == 0 {
        report.push(
            "no-boundaries",
            "surface has no boundary component".into(),
            vec![],
        );
    }
    if n_faces == 0 {
        report.push("no-faces", "surface has no faces".into(), vec![]);
    }
    if 2 * n_edges != 3 * n_faces {
        report.push(
            "edge-count",
            format!("{n_edges} edges but {n_faces} faces; need |E| = 3|F|/2"),
            vec![],
        );
    }

    let mut uses = vec![0usize; n_edges];
    for slots in &tri.face_slots {
        for &k in slots {
            uses[k] += 1;
        }
    }
    for (e, &count) in tri.edges.iter().zip(&uses) {
        if count != 2 {
            report.push(
                "edge-multiplicity",
                format!("edge {} appears in {count} face slot(s), expected 2", e.id),
                vec![e.id.into()],
            );
        }
    }

    for (face, slots) in tri.faces.iter().zip(&tri.face_slots) {
        for (t, &slot) in slots.iter().enumerate() {
            let edge = &tri.edges[slot];
            let mut want = [face.corners[(t + 1) % 3], face.corners[(t + 2) % 3]];
            let mut have = edge.ends;
            want.sort_unstable();
            have.sort_unstable();
            if want != have {
                report.push(
                    "corner-edge-mismatch",
                    format!(
                        "face {} slot {t}: edge {} joins {:?} but the other corners lie on {:?}",
                        face.id, edge.id, have, want
                    ),
                    vec![face.id.into(), edge.id.into()],
                );
            }
        }
    }

    let mut used = vec![false; tri.n_boundaries + 1];
    for face in &tri.faces {
        for &c in &face.corners {
            used[c] = true;
        }
    }
    for (b, _) in used.iter().enumerate().skip(1).filter(|(_, u)| !**u) {
        report.push(
            "unused-boundary",
            format!("boundary component {b} carries no corner"),
            vec![b as u64],
        );
    }

    if l0.len() != n_edges {
        report.push(
            "metric-size",
            format!("metric has {} lengths for {n_edges} edges", l0.len()),
            vec![],
        );
    }
    for (e, &l) in tri.edges.iter().zip(l0.lengths()) {
        if !(l > 0.0 && l.is_finite()) {
            report.push(
                "non-positive-length",
                format!("edge {} has length {l}", e.id),
                vec![e.id.into()],
            );
        }
    }
    report
}

/// `|F| - |E|`, which equals the Euler characteristic of the surface.
pub fn euler_characteristic(tri: &IdealTriangulation) -> i64 {
    tri.faces.len() as i64 - tri.edges.len() as i64
}

/// All `(face_id, corner slot)` pairs whose corner lies on component `i`,
/// ordered by face id and then slot.
pub fn corner_incidence(tri: &IdealTriangulation, i: BoundaryId) -> Result<Vec<(u32, usize)>> {
    check_boundary(i, tri.n_boundaries)?;
    let mut out: Vec<(u32, usize)> = tri
        .faces
        .iter()
        .flat_map(|f| {
            (0..3)
                .filter(move |&t| f.corners[t] == i)
                .map(move |t| (f.id, t))
        })
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// Parse a surface file and validate it.
pub fn parse_surface(text: &str) -> Result<(IdealTriangulation, Metric)> {
    let (tri, l0) = parse_surface_unchecked(text)?;
    let report = validate(&tri, &l0);
    if report.ok() {
        Ok((tri, l0))
    } else {
        Err(Error::Invalid(report))
    }
}

/// Parse a surface file, checking only syntax, id uniqueness, references and
/// positivity of lengths.
pub fn parse_surface_unchecked(text: &str) -> Result<(IdealTriangulation, Metric)> {
    let mut name: Option<String> = None;
    let mut n_boundaries: Option<(usize, usize)> = None;
    let mut edges: Vec<(usize, Edge)> = Vec::new();
    let mut lengths = Vec::new();
    let mut faces: Vec<(usize, Face)> = Vec::new();
    let mut edge_lines: HashMap<u32, usize> = HashMap::new();
    let mut face_lines: HashMap<u32, usize> = HashMap::new();

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some((&keyword, args)) = tokens.split_first() else {
            continue;
        };
        let err = |message: String| Error::Parse { line, message };
        let arity = |want: usize| {
            if args.len() == want {
                Ok(())
            } else {
                Err(err(format!(
                    "'{keyword}' takes {want} argument(s), got {}",
                    args.len()
                )))
            }
        };
        match keyword {
            "surface" => {
                arity(1)?;
                if name.is_some() {
                    return Err(err("second 'surface' line".into()));
                }
                name = Some(args[0].to_string());
            }
            "boundaries" => {
                arity(1)?;
                if n_boundaries.is_some() {
                    return Err(err("second 'boundaries' line".into()));
                }
                n_boundaries = Some((parse_int(args[0], line)?, line));
            }
            "edge" => {
                arity(4)?;
                let id = parse_id(args[0], line)?;
                let ends = [parse_int(args[1], line)?, parse_int(args[2], line)?];
                let l: f64 = args[3]
                    .parse()
                    .map_err(|_| err(format!("bad length '{}'", args[3])))?;
                if !(l > 0.0 && l.is_finite()) {
                    return Err(err(format!(
                        "edge {id}: length must be strictly positive, got {l}"
                    )));
                }
                if let Some(prev) = edge_lines.insert(id, line) {
                    return Err(err(format!(
                        "duplicate edge id {id} (first on line {prev})"
                    )));
                }
                edges.push((line, Edge { id, ends }));
                lengths.push(l);
            }
            "face" => {
                arity(7)?;
                let id = parse_id(args[0], line)?;
                let mut e = [0u32; 3];
                let mut c = [0usize; 3];
                for t in 0..3 {
                    e[t] = parse_id(args[1 + t], line)?;
                    c[t] = parse_int(args[4 + t], line)?;
                }
                if let Some(prev) = face_lines.insert(id, line) {
                    return Err(err(format!(
                        "duplicate face id {id} (first on line {prev})"
                    )));
                }
                faces.push((
                    line,
                    Face {
                        id,
                        edges: e,
                        corners: c,
                    },
                ));
            }
            other => return Err(err(format!("unknown record '{other}'"))),
        }
    }

    let name = name.ok_or(Error::Parse {
        line: 0,
        message: "missing 'surface' line".into(),
    })?;
    let (n, _) = n_boundaries.ok_or(Error::Parse {
        line: 0,
        message: "missing 'boundaries' line".into(),
    })?;

    // Resolve references here so errors carry line numbers.
    for (line, e) in &edges {
        for &b in &e.ends {
            if b == 0 || b > n {
                return Err(Error::Parse {
                    line: *line,
                    message: format!(
                        "edge {}: undeclared boundary index {b} (have 1..={n})",
                        e.id
                    ),
                });
            }
        }
    }
    for (line, f) in &faces {
        for &b in &f.corners {
            if b == 0 || b > n {
                return Err(Error::Parse {
                    line: *line,
                    message: format!(
                        "face {}: undeclared boundary index {b} (have 1..={n})",
                        f.id
                    ),
                });
            }
        }
        for id in f.edges {
            if !edge_lines.contains_key(&id) {
                return Err(Error::Parse {
                    line: *line,
                    message: format!("face {}: undeclared edge {id}", f.id),
                });
            }
        }
    }

    let tri = IdealTriangulation::new(
        name,
        n,
        edges.into_iter().map(|(_, e)| e).collect(),
        faces.into_iter().map(|(_, f)| f).collect(),
    )?;
    Ok((tri, Metric::new(lengths)?))
}

fn parse_int(tok: &str, line: usize) -> Result<usize> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        message: format!("expected a non-negative integer, got '{tok}'"),
    })
}

fn parse_id(tok: &str, line: usize) -> Result<u32> {
    match tok.parse::<u32>() {
        Ok(id) if id > 0 => Ok(id),
        _ => Err(Error::Parse {
            line,
            message: format!("expected a positive integer id, got '{tok}'"),
        }),
    }
}

/// Serialize in the surface file format. Lengths use the shortest
/// representation that parses back to the same value.
pub fn write_surface(tri: &IdealTriangulation, l0: &Metric) -> String {
    let mut out = format!("surface {}\nboundaries {}\n", tri.name, tri.n_boundaries);
    for (e, l) in tri.edges.iter().zip(l0.lengths()) {
        out.push_str(&format!(
            "edge {} {} {} {:?}\n",
            e.id, e.ends[0], e.ends[1], l
        ));
    }
    for f in &tri.faces {
        out.push_str(&format!(
            "face {} {} {} {} {} {} {}\n",
            f.id, f.edges[0], f.edges[1], f.edges[2], f.corners[0], f.corners[1], f.corners[2]
        ));
    }
    out
}
