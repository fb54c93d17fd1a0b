//! Lift of the graph-of-spaces decomposition to the regular cover defined by
//! a finite quotient.
//!
//! Vertices of the lifted graph are cosets: lifts of circle `i` are the
//! cosets `g<φ(t_i)>`, lifts of page `j` are the cosets `gφ(π1 Σ_j)`, and
//! lifts of edge `e` are the cosets `g<φ(b_e)>` of its boundary word. The
//! boundary lift at `g<φ(b_e)>` lies on the page lift through `g` and is
//! glued to the circle lift through `g·φ(u_e)`, with `u_e` the stable letter
//! of `e` (trivial on spanning-tree edges). Labels are least elements in
//! breadth-first order of the group table.

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::book::{BookComplex, SurfaceType};
use crate::perm::{Perm, StabChain};
use crate::presentation::{GroupPresentation, SurfaceLayout, Word};
use crate::quotient::{CosetPartition, FiniteQuotient, GroupTable};
use crate::{Caps, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircleLift {
    pub base_circle: usize,
    /// Coset representative, as a group element index.
    pub label: u32,
    /// Covering degree over the base circle.
    pub degree_over_base: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryLift {
    pub base_boundary: usize,
    pub edge: usize,
    pub label: u32,
    /// Index into [`CoveredComplex::circle_lifts`].
    pub circle_lift: usize,
    pub elevation_degree: i64,
    /// Covering degree over the base boundary circle.
    pub boundary_degree: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceLift {
    pub base_surface: usize,
    pub label: u32,
    pub degree_over_base: u64,
    pub topology: SurfaceType,
    /// Ordered by base boundary, then label.
    pub boundary_lifts: Vec<BoundaryLift>,
}

#[derive(Clone, Debug)]
pub struct CoveredComplex {
    pub base: BookComplex,
    pub presentation: GroupPresentation,
    pub quotient: FiniteQuotient,
    pub table: GroupTable,
    /// Ordered by base circle, then label.
    pub circle_lifts: Vec<CircleLift>,
    /// Ordered by base surface, then label.
    pub surface_lifts: Vec<SurfaceLift>,
    pub total_degree: u64,
    pub(crate) surface_partitions: Vec<CosetPartition>,
    circle_offsets: Vec<usize>,
    surface_offsets: Vec<usize>,
}

/// Orientation character of the page extended to the two extra points.
fn w1_perm(layout: &SurfaceLayout, gen: usize) -> Perm {
    if layout.w1(gen) {
        Perm::from_images(vec![1, 0]).expect("transposition")
    } else {
        Perm::identity(2)
    }
}

/// Whether the lift of a page to the cover is orientable: the restricted
/// kernel must lie in the kernel of the orientation character, which holds
/// iff adjoining the character does not enlarge the image group.
pub fn lift_orientable(q: &FiniteQuotient, layout: &SurfaceLayout, caps: &Caps) -> Result<bool> {
    if layout.surface.orientable {
        return Ok(true);
    }
    let gens: Vec<Word> = layout.free_generators().map(Word::gen).collect();
    let plain = q.image_subgroup_order(&gens, caps)?;
    let twisted: Vec<Perm> = layout
        .free_generators()
        .map(|g| q.images()[g].direct_sum(&w1_perm(layout, g)))
        .collect();
    let with_w1 = StabChain::new(q.degree() + 2, &twisted, caps.max_order.saturating_mul(2))?.order();
    Ok(with_w1 == plain)
}

/// Topological type of every lift of a page.
pub fn lift_topology(q: &FiniteQuotient, layout: &SurfaceLayout, caps: &Caps) -> Result<SurfaceType> {
    let gens: Vec<Word> = layout.free_generators().map(Word::gen).collect();
    let sheets = q.image_subgroup_order(&gens, caps)?;
    let mut boundary = 0u64;
    for b in &layout.boundary_words {
        let o = q.element_order(b);
        if sheets % o != 0 {
            return Err(Error::Internal(format!(
                "boundary order {o} does not divide page degree {sheets}"
            )));
        }
        boundary += sheets / o;
    }
    let chi = sheets as i64 * layout.surface.euler_characteristic();
    let orientable = lift_orientable(q, layout, caps)?;
    let excess = 2 - chi - boundary as i64;
    let genus = if orientable {
        if excess < 0 || excess % 2 != 0 {
            return Err(Error::Internal(format!(
                "orientable lift with chi {chi} and {boundary} boundaries"
            )));
        }
        excess / 2
    } else {
        if excess < 1 {
            return Err(Error::Internal(format!(
                "non-orientable lift with chi {chi} and {boundary} boundaries"
            )));
        }
        excess
    };
    Ok(SurfaceType {
        orientable,
        genus: genus as u32,
        boundary_count: boundary as u32,
    })
}

pub fn lift(book: &BookComplex, p: &GroupPresentation, q: &FiniteQuotient, caps: &Caps) -> Result<CoveredComplex> {
    q.ensure_homomorphism(p)?;
    let table = q.table(caps)?;
    let n = table.order() as u64;

    let circle_partitions: Vec<CosetPartition> = p
        .circle_gens
        .par_iter()
        .map(|&t| table.coset_partition(&[Word::gen(t)]))
        .collect();
    let surface_partitions: Vec<CosetPartition> = p
        .surfaces
        .par_iter()
        .map(|layout| {
            let gens: Vec<Word> = layout.free_generators().map(Word::gen).collect();
            table.coset_partition(&gens)
        })
        .collect();
    let topologies = p
        .surfaces
        .par_iter()
        .map(|layout| lift_topology(q, layout, caps))
        .collect::<Result<Vec<_>>>()?;

    let mut circle_lifts = Vec::new();
    let mut circle_offsets = Vec::new();
    for (i, part) in circle_partitions.iter().enumerate() {
        circle_offsets.push(circle_lifts.len());
        let d = part.coset_size() as u64;
        circle_lifts.extend(part.reps.iter().map(|&r| CircleLift {
            base_circle: i,
            label: r,
            degree_over_base: d,
        }));
    }

    let mut surface_lifts = Vec::new();
    let mut surface_offsets = Vec::new();
    for (j, part) in surface_partitions.iter().enumerate() {
        surface_offsets.push(surface_lifts.len());
        let sheets = part.coset_size() as u64;
        surface_lifts.extend(part.reps.iter().map(|&r| SurfaceLift {
            base_surface: j,
            label: r,
            degree_over_base: sheets,
            topology: topologies[j],
            boundary_lifts: Vec::new(),
        }));
    }

    let edge_lifts: Vec<Vec<(usize, BoundaryLift)>> = book
        .edges
        .par_iter()
        .enumerate()
        .map(|(idx, e)| {
            let layout = &p.surfaces[e.surface];
            let beta = &layout.boundary_words[e.boundary_index];
            let part = table.coset_partition(std::slice::from_ref(beta));
            let o = part.coset_size() as u64;
            let circle_degree = circle_partitions[e.circle].coset_size() as u64;
            let g = circle_degree.gcd(&e.degree.unsigned_abs());
            let elevation = e.degree.signum() * (e.degree.unsigned_abs() / g) as i64;
            let stable = p.stable_letters[idx].map(Word::gen).unwrap_or_else(Word::empty);
            part.reps
                .iter()
                .map(|&r| {
                    let s = surface_partitions[e.surface].coset_of[r as usize] as usize;
                    let at = table.act_word(r, &stable);
                    let c = circle_partitions[e.circle].coset_of[at as usize] as usize;
                    (
                        surface_offsets[e.surface] + s,
                        BoundaryLift {
                            base_boundary: e.boundary_index,
                            edge: idx,
                            label: r,
                            circle_lift: circle_offsets[e.circle] + c,
                            elevation_degree: elevation,
                            boundary_degree: o,
                        },
                    )
                })
                .collect()
        })
        .collect();
    for (s, b) in edge_lifts.into_iter().flatten() {
        surface_lifts[s].boundary_lifts.push(b);
    }
    for s in &mut surface_lifts {
        s.boundary_lifts.sort_by_key(|b| (b.base_boundary, b.label));
    }

    Ok(CoveredComplex {
        base: book.clone(),
        presentation: p.clone(),
        quotient: q.clone(),
        table,
        circle_lifts,
        surface_lifts,
        total_degree: n,
        surface_partitions,
        circle_offsets,
        surface_offsets,
    })
}

/// A failed structural identity of a computed cover.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoverViolation {
    DegreeSum {
        edge: usize,
        circle_lift: usize,
        sum: i64,
        expected: i64,
    },
    Divisibility {
        edge: usize,
        elevation: i64,
    },
    Counting {
        what: &'static str,
        index: usize,
    },
    Euler {
        surface_lift: usize,
    },
    GenusParity {
        surface_lift: usize,
    },
    BoundaryCount {
        surface_lift: usize,
        base_boundary: usize,
    },
    EdgeLiftCount {
        edge: usize,
    },
    Disconnected,
}

impl CoveredComplex {
    /// Lifts of base circle `i`.
    pub fn circle_lift_range(&self, i: usize) -> std::ops::Range<usize> {
        let end = self
            .circle_offsets
            .get(i + 1)
            .copied()
            .unwrap_or(self.circle_lifts.len());
        self.circle_offsets[i]..end
    }

    /// Lifts of base surface `j`.
    pub fn surface_lift_range(&self, j: usize) -> std::ops::Range<usize> {
        let end = self
            .surface_offsets
            .get(j + 1)
            .copied()
            .unwrap_or(self.surface_lifts.len());
        self.surface_offsets[j]..end
    }

    /// Number of lifts `ℓ_i` of each circle.
    pub fn circle_lift_counts(&self) -> Vec<usize> {
        (0..self.base.circle_count)
            .map(|i| self.circle_lift_range(i).len())
            .collect()
    }

    pub fn edge_lift_count(&self) -> usize {
        self.surface_lifts.iter().map(|s| s.boundary_lifts.len()).sum()
    }

    pub fn vertex_count(&self) -> usize {
        self.circle_lifts.len() + self.surface_lifts.len()
    }

    /// First Betti number of the lifted graph.
    pub fn graph_betti(&self) -> usize {
        self.edge_lift_count() + 1 - self.vertex_count()
    }

    /// Elements of the coset labelling surface lift `s`, increasing.
    pub fn surface_lift_elements(&self, s: usize) -> Vec<u32> {
        let lift = &self.surface_lifts[s];
        let part = &self.surface_partitions[lift.base_surface];
        let c = part.coset_of[lift.label as usize];
        (0..part.coset_of.len() as u32)
            .filter(|&g| part.coset_of[g as usize] == c)
            .collect()
    }

    pub fn label_perm(&self, label: u32) -> Perm {
        self.table.perm(label)
    }

    /// Checks the degree-sum law, divisibility, counting, Euler
    /// multiplicativity, genus parity and connectivity.
    pub fn check_invariants(&self) -> Vec<CoverViolation> {
        let mut out = Vec::new();
        let n = self.total_degree;
        for (i, part) in (0..self.base.circle_count).map(|i| (i, self.circle_lift_range(i))) {
            let d = self.circle_lifts[part.start].degree_over_base;
            if part.len() as u64 * d != n || self.circle_lifts[part].iter().any(|c| c.degree_over_base != d) {
                out.push(CoverViolation::Counting {
                    what: "circle",
                    index: i,
                });
            }
        }
        for j in 0..self.base.surfaces.len() {
            let r = self.surface_lift_range(j);
            let q = self.surface_lifts[r.start].degree_over_base;
            if r.len() as u64 * q != n {
                out.push(CoverViolation::Counting {
                    what: "surface",
                    index: j,
                });
            }
        }

        let mut sums = std::collections::BTreeMap::<(usize, usize), i64>::new();
        let mut per_edge = vec![0u64; self.base.edges.len()];
        for (si, s) in self.surface_lifts.iter().enumerate() {
            let base = &self.base.surfaces[s.base_surface];
            let chi = s.topology.euler_characteristic();
            if chi != s.degree_over_base as i64 * base.euler_characteristic() {
                out.push(CoverViolation::Euler { surface_lift: si });
            }
            let excess = 2 - chi - s.topology.boundary_count as i64;
            let parity_ok = if s.topology.orientable {
                excess >= 0 && excess % 2 == 0 && excess / 2 == s.topology.genus as i64
            } else {
                excess >= 1 && excess == s.topology.genus as i64
            };
            if !parity_ok {
                out.push(CoverViolation::GenusParity { surface_lift: si });
            }
            if s.boundary_lifts.len() != s.topology.boundary_count as usize {
                out.push(CoverViolation::BoundaryCount {
                    surface_lift: si,
                    base_boundary: usize::MAX,
                });
            }
            for k in 0..base.boundary_count as usize {
                let lifts: Vec<&BoundaryLift> = s.boundary_lifts.iter().filter(|b| b.base_boundary == k).collect();
                if lifts
                    .iter()
                    .any(|b| b.boundary_degree * lifts.len() as u64 != s.degree_over_base)
                {
                    out.push(CoverViolation::BoundaryCount {
                        surface_lift: si,
                        base_boundary: k,
                    });
                }
            }
            for b in &s.boundary_lifts {
                *sums.entry((b.edge, b.circle_lift)).or_default() += b.elevation_degree;
                per_edge[b.edge] += 1;
                let d = self.base.edges[b.edge].degree;
                if b.elevation_degree == 0 || d % b.elevation_degree != 0 || b.elevation_degree.signum() != d.signum() {
                    out.push(CoverViolation::Divisibility {
                        edge: b.edge,
                        elevation: b.elevation_degree,
                    });
                }
            }
        }
        for (idx, e) in self.base.edges.iter().enumerate() {
            let word = &self.presentation.surfaces[e.surface].boundary_words[e.boundary_index];
            let o = self.quotient.element_order(word);
            if per_edge[idx] as u64 * o != n {
                out.push(CoverViolation::EdgeLiftCount { edge: idx });
            }
            for c in self.circle_lift_range(e.circle) {
                let sum = sums.get(&(idx, c)).copied().unwrap_or(0);
                if sum != e.degree {
                    out.push(CoverViolation::DegreeSum {
                        edge: idx,
                        circle_lift: c,
                        sum,
                        expected: e.degree,
                    });
                }
            }
        }
        if !self.is_connected() {
            out.push(CoverViolation::Disconnected);
        }
        out
    }

    fn is_connected(&self) -> bool {
        let nc = self.circle_lifts.len();
        let mut parent: Vec<usize> = (0..self.vertex_count()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (si, s) in self.surface_lifts.iter().enumerate() {
            for b in &s.boundary_lifts {
                let (a, c) = (find(&mut parent, nc + si), find(&mut parent, b.circle_lift));
                parent[a] = c;
            }
        }
        let root = find(&mut parent, 0);
        (0..parent.len()).all(|v| find(&mut parent, v) == root)
    }

    pub fn to_export(&self) -> CoverExport {
        let fmt = |l: u32| self.table.perm(l).to_cycle_string();
        let circle_lifts = self
            .circle_lifts
            .iter()
            .enumerate()
            .map(|(index, c)| CircleLiftExport {
                index,
                base_circle: c.base_circle,
                label: fmt(c.label),
                degree_over_base: c.degree_over_base,
            })
            .collect();
        let mut attachments = Vec::new();
        let surface_lifts = self
            .surface_lifts
            .iter()
            .enumerate()
            .map(|(index, s)| {
                let boundary_lifts = s
                    .boundary_lifts
                    .iter()
                    .enumerate()
                    .map(|(bi, b)| {
                        attachments.push(Attachment {
                            surface_lift: index,
                            boundary_lift: bi,
                            circle_lift: b.circle_lift,
                            elevation_degree: b.elevation_degree,
                        });
                        BoundaryLiftExport {
                            base_boundary: b.base_boundary,
                            edge: b.edge,
                            label: fmt(b.label),
                            circle_lift: b.circle_lift,
                            elevation_degree: b.elevation_degree,
                            boundary_degree: b.boundary_degree,
                        }
                    })
                    .collect();
                SurfaceLiftExport {
                    index,
                    base_surface: s.base_surface,
                    label: fmt(s.label),
                    degree_over_base: s.degree_over_base,
                    topology: s.topology,
                    boundary_lifts,
                }
            })
            .collect();
        CoverExport {
            total_degree: self.total_degree,
            circle_lifts,
            surface_lifts,
            attachments,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverExport {
    pub total_degree: u64,
    pub circle_lifts: Vec<CircleLiftExport>,
    pub surface_lifts: Vec<SurfaceLiftExport>,
    pub attachments: Vec<Attachment>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CircleLiftExport {
    pub index: usize,
    pub base_circle: usize,
    pub label: String,
    pub degree_over_base: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SurfaceLiftExport {
    pub index: usize,
    pub base_surface: usize,
    pub label: String,
    pub degree_over_base: u64,
    pub topology: SurfaceType,
    pub boundary_lifts: Vec<BoundaryLiftExport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryLiftExport {
    pub base_boundary: usize,
    pub edge: usize,
    pub label: String,
    pub circle_lift: usize,
    pub elevation_degree: i64,
    pub boundary_degree: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Attachment {
    pub surface_lift: usize,
    pub boundary_lift: usize,
    pub circle_lift: usize,
    pub elevation_degree: i64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::book::fixtures::*;
    use crate::presentation::present;
    use std::collections::BTreeMap;

    fn quotient(p: &GroupPresentation, points: usize, imgs: &[(&str, &str)]) -> FiniteQuotient {
        let spec = crate::quotient::QuotientSpec {
            points,
            images: imgs
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect::<BTreeMap<_, _>>(),
        };
        FiniteQuotient::from_spec_unchecked(p, &spec, &Caps::default()).unwrap()
    }

    #[test]
    fn trivial_cover_is_the_base() {
        for book in [running_example(), mobius_example(), pants_example()] {
            let p = present(&book).unwrap();
            let q = FiniteQuotient::trivial(&p);
            let cov = lift(&book, &p, &q, &Caps::default()).unwrap();
            assert_eq!(cov.circle_lifts.len(), book.circle_count);
            assert_eq!(cov.surface_lifts.len(), book.surfaces.len());
            for (s, base) in cov.surface_lifts.iter().zip(&book.surfaces) {
                assert_eq!(&s.topology, base);
            }
            for s in &cov.surface_lifts {
                for b in &s.boundary_lifts {
                    assert_eq!(b.elevation_degree, book.edges[b.edge].degree);
                }
            }
            assert!(cov.check_invariants().is_empty());
            assert_eq!(
                cov.graph_betti(),
                book.edges.len() + 1 - book.circle_count - book.surfaces.len()
            );
        }
    }

    #[test]
    fn running_example_double_cover() {
        let book = running_example();
        let p = present(&book).unwrap();
        let q = quotient(&p, 2, &[("t0", "(1 2)")]);
        let cov = lift(&book, &p, &q, &Caps::default()).unwrap();
        assert_eq!(cov.circle_lifts.len(), 1);
        assert_eq!(cov.circle_lifts[0].degree_over_base, 2);
        assert_eq!(cov.surface_lifts.len(), 2);
        for s in &cov.surface_lifts {
            assert_eq!(s.degree_over_base, 1);
            assert_eq!(s.topology, book.surfaces[0]);
            assert_eq!(s.boundary_lifts.len(), 1);
            assert_eq!(s.boundary_lifts[0].circle_lift, 0);
            assert_eq!(s.boundary_lifts[0].elevation_degree, 1);
        }
        assert!(cov.check_invariants().is_empty());
    }

    #[test]
    fn orientability_of_lifts() {
        let book = mobius_example();
        let p = present(&book).unwrap();
        let layout = &p.surfaces[0];
        let caps = Caps::default();
        let q = FiniteQuotient::trivial(&p);
        assert!(!lift_orientable(&q, layout, &caps).unwrap());

        // orientation double cover
        let q = quotient(&p, 2, &[("x0_1", "(1 2)")]);
        assert!(lift_orientable(&q, layout, &caps).unwrap());
        let t = lift_topology(&q, layout, &caps).unwrap();
        assert_eq!(t, SurfaceType::orientable(0, 4));

        // x lies in the kernel but reverses orientation
        let q = quotient(&p, 2, &[("s0_1", "(1 2)")]);
        assert!(!lift_orientable(&q, layout, &caps).unwrap());
    }

    #[test]
    fn handle_double_cover_topology() {
        let book = running_example();
        let p = present(&book).unwrap();
        let q = quotient(&p, 2, &[("x0_1", "(1 2)")]);
        let t = lift_topology(&q, &p.surfaces[0], &Caps::default()).unwrap();
        assert_eq!(t, SurfaceType::orientable(1, 2));
    }

    #[test]
    fn mobius_cover_satisfies_invariants() {
        let book = mobius_example();
        let p = present(&book).unwrap();
        for u in ["()", "(1 2)"] {
            let q = quotient(
                &p,
                2,
                &[("t0", "(1 2)"), ("x0_1", "(1 2)"), ("s0_1", "(1 2)"), ("u1", u)],
            );
            let cov = lift(&book, &p, &q, &Caps::default()).unwrap();
            assert!(cov.check_invariants().is_empty());
            assert_eq!(cov.total_degree, 2);
        }
    }

    #[test]
    fn non_homomorphism_rejected() {
        let book = running_example();
        let p = present(&book).unwrap();
        let q = quotient(&p, 3, &[("t0", "(1 2 3)")]);
        assert!(matches!(
            lift(&book, &p, &q, &Caps::default()),
            Err(Error::NotHomomorphism(_))
        ));
    }

    #[test]
    fn export_lists_attachments() {
        let book = running_example();
        let p = present(&book).unwrap();
        let q = quotient(&p, 2, &[("t0", "(1 2)")]);
        let cov = lift(&book, &p, &q, &Caps::default()).unwrap();
        let v = serde_json::to_value(cov.to_export()).unwrap();
        assert_eq!(v["attachments"].as_array().unwrap().len(), 2);
        assert_eq!(v["surface_lifts"][1]["label"], "(1 2)");
        assert_eq!(v["surface_lifts"][0]["label"], "()");
    }
}
