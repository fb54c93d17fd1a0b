//! Books of I-bundles, modelled by their graph-of-spaces spine.
//!
//! Circles stand for the bindings, surfaces with boundary for the pages.
//! Every boundary component of every page is attached to exactly one circle
//! by a covering map of nonzero signed degree.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceType {
    pub orientable: bool,
    /// Handle count if orientable, crosscap count otherwise.
    pub genus: u32,
    #[serde(rename = "boundary")]
    pub boundary_count: u32,
}

impl SurfaceType {
    pub fn orientable(genus: u32, boundary_count: u32) -> Self {
        SurfaceType {
            orientable: true,
            genus,
            boundary_count,
        }
    }

    pub fn nonorientable(crosscaps: u32, boundary_count: u32) -> Self {
        SurfaceType {
            orientable: false,
            genus: crosscaps,
            boundary_count,
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        euler_characteristic(self)
    }

    /// Rank of the free fundamental group.
    pub fn free_rank(&self) -> usize {
        (1 - self.euler_characteristic()) as usize
    }
}

pub fn euler_characteristic(s: &SurfaceType) -> i64 {
    let g = s.genus as i64;
    let b = s.boundary_count as i64;
    if s.orientable {
        2 - 2 * g - b
    } else {
        2 - g - b
    }
}

impl fmt::Display for SurfaceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.orientable {
            write!(f, "orientable g={} s={}", self.genus, self.boundary_count)
        } else {
            write!(f, "non-orientable r={} s={}", self.genus, self.boundary_count)
        }
    }
}

/// Attachment of boundary component `boundary_index` of page `surface` to
/// binding circle `circle`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edge {
    pub surface: usize,
    pub boundary_index: usize,
    pub circle: usize,
    #[serde(default = "unit_degree")]
    pub degree: i64,
}

fn unit_degree() -> i64 {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BookComplex {
    #[serde(rename = "circles")]
    pub circle_count: usize,
    pub surfaces: Vec<SurfaceType>,
    pub edges: Vec<Edge>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NoCircles,
    NoBoundary {
        surface: usize,
    },
    NoCrosscaps {
        surface: usize,
    },
    NonNegativeEulerCharacteristic {
        surface: usize,
        chi: i64,
    },
    EdgeSurfaceOutOfRange {
        edge: usize,
        surface: usize,
    },
    EdgeBoundaryOutOfRange {
        edge: usize,
        boundary_index: usize,
    },
    EdgeCircleOutOfRange {
        edge: usize,
        circle: usize,
    },
    ZeroDegree {
        edge: usize,
    },
    BoundaryUnattached {
        surface: usize,
        boundary_index: usize,
    },
    BoundaryAttachedTwice {
        surface: usize,
        boundary_index: usize,
        edges: Vec<usize>,
    },
    Disconnected,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            NoCircles => write!(f, "book has no circles"),
            NoBoundary { surface } => write!(f, "surface {surface} has no boundary"),
            NoCrosscaps { surface } => {
                write!(f, "non-orientable surface {surface} has no crosscaps")
            }
            NonNegativeEulerCharacteristic { surface, chi } => write!(
                f,
                "surface {surface} has non-negative Euler characteristic (chi = {chi})"
            ),
            EdgeSurfaceOutOfRange { edge, surface } => {
                write!(f, "edge {edge} names surface {surface}, which does not exist")
            }
            EdgeBoundaryOutOfRange { edge, boundary_index } => write!(
                f,
                "edge {edge} names boundary component {boundary_index}, which does not exist"
            ),
            EdgeCircleOutOfRange { edge, circle } => {
                write!(f, "edge {edge} names circle {circle}, which does not exist")
            }
            ZeroDegree { edge } => write!(f, "edge {edge} has degree 0"),
            BoundaryUnattached {
                surface,
                boundary_index,
            } => write!(
                f,
                "boundary component {boundary_index} of surface {surface} is not attached"
            ),
            BoundaryAttachedTwice {
                surface,
                boundary_index,
                edges,
            } => write!(
                f,
                "boundary component {boundary_index} of surface {surface} attached twice (edges {edges:?})"
            ),
            Disconnected => write!(f, "underlying graph is disconnected"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Maximum circle valence, maximum absolute edge degree and circle count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GlobalBounds {
    pub val: u64,
    pub d: u64,
    pub m: u64,
}

impl BookComplex {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn surface_count(&self) -> usize {
        self.surfaces.len()
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }

    /// Validates and converts the report into an error.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidBook(report))
        }
    }

    pub fn circle_valence(&self, circle: usize) -> Result<usize> {
        circle_valence(self, circle)
    }

    pub fn global_bounds(&self) -> GlobalBounds {
        let val = (0..self.circle_count)
            .map(|i| self.edges.iter().filter(|e| e.circle == i).count())
            .max()
            .unwrap_or(0);
        let d = self.edges.iter().map(|e| e.degree.unsigned_abs()).max().unwrap_or(0);
        GlobalBounds {
            val: val as u64,
            d,
            m: self.circle_count as u64,
        }
    }

    /// Edge index attached to each boundary component, per surface.
    ///
    /// Only meaningful for valid books.
    pub fn boundary_edges(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self
            .surfaces
            .iter()
            .map(|s| vec![usize::MAX; s.boundary_count as usize])
            .collect();
        for (idx, e) in self.edges.iter().enumerate() {
            out[e.surface][e.boundary_index] = idx;
        }
        out
    }
}

pub fn circle_valence(book: &BookComplex, circle: usize) -> Result<usize> {
    if circle >= book.circle_count {
        return Err(Error::IndexOutOfRange {
            what: "circle",
            index: circle,
            len: book.circle_count,
        });
    }
    Ok(book.edges.iter().filter(|e| e.circle == circle).count())
}

pub fn validate(book: &BookComplex) -> ValidationReport {
    let mut violations = Vec::new();
    if book.circle_count == 0 {
        violations.push(Violation::NoCircles);
    }
    for (j, s) in book.surfaces.iter().enumerate() {
        if s.boundary_count == 0 {
            violations.push(Violation::NoBoundary { surface: j });
        }
        if !s.orientable && s.genus == 0 {
            violations.push(Violation::NoCrosscaps { surface: j });
        }
        let chi = s.euler_characteristic();
        if chi >= 0 {
            violations.push(Violation::NonNegativeEulerCharacteristic { surface: j, chi });
        }
    }

    let mut attached: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    let mut usable = Vec::new();
    for (idx, e) in book.edges.iter().enumerate() {
        let mut ok = true;
        if e.surface >= book.surfaces.len() {
            violations.push(Violation::EdgeSurfaceOutOfRange {
                edge: idx,
                surface: e.surface,
            });
            ok = false;
        } else if e.boundary_index >= book.surfaces[e.surface].boundary_count as usize {
            violations.push(Violation::EdgeBoundaryOutOfRange {
                edge: idx,
                boundary_index: e.boundary_index,
            });
            ok = false;
        }
        if e.circle >= book.circle_count {
            violations.push(Violation::EdgeCircleOutOfRange {
                edge: idx,
                circle: e.circle,
            });
            ok = false;
        }
        if e.degree == 0 {
            violations.push(Violation::ZeroDegree { edge: idx });
        }
        if ok {
            attached.entry((e.surface, e.boundary_index)).or_default().push(idx);
            usable.push(idx);
        }
    }
    for (j, s) in book.surfaces.iter().enumerate() {
        for k in 0..s.boundary_count as usize {
            match attached.get(&(j, k)) {
                None => violations.push(Violation::BoundaryUnattached {
                    surface: j,
                    boundary_index: k,
                }),
                Some(es) if es.len() > 1 => violations.push(Violation::BoundaryAttachedTwice {
                    surface: j,
                    boundary_index: k,
                    edges: es.clone(),
                }),
                _ => {}
            }
        }
    }

    // Connectivity of the bipartite graph: circles 0..m, surfaces m..m+k.
    let m = book.circle_count;
    let n = m + book.surfaces.len();
    if n > 0 {
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &idx in &usable {
            let e = &book.edges[idx];
            let a = find(&mut parent, e.circle);
            let b = find(&mut parent, m + e.surface);
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        if (1..n).any(|v| find(&mut parent, v) != root) {
            violations.push(Violation::Disconnected);
        }
    }
    ValidationReport { violations }
}
