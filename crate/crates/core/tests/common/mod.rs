#![allow(dead_code)]

use booktorsion::book::{BookComplex, Edge, SurfaceType};
use booktorsion::perm::Perm;
use booktorsion::presentation::{present, GroupPresentation, Role, Word};
use booktorsion::quotient::{FiniteQuotient, QuotientSpec};
use booktorsion::tower::mod_q_tower;
use booktorsion::Caps;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn running_example() -> BookComplex {
    BookComplex {
        circle_count: 1,
        surfaces: vec![SurfaceType::orientable(1, 1)],
        edges: vec![Edge {
            surface: 0,
            boundary_index: 0,
            circle: 0,
            degree: 2,
        }],
    }
}

pub fn mobius_example() -> BookComplex {
    BookComplex {
        circle_count: 1,
        surfaces: vec![SurfaceType::nonorientable(1, 2)],
        edges: vec![
            Edge {
                surface: 0,
                boundary_index: 0,
                circle: 0,
                degree: 1,
            },
            Edge {
                surface: 0,
                boundary_index: 1,
                circle: 0,
                degree: 3,
            },
        ],
    }
}

pub fn quotient(p: &GroupPresentation, points: usize, images: &[(&str, &str)]) -> FiniteQuotient {
    let spec = QuotientSpec {
        points,
        images: images.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
    };
    FiniteQuotient::from_spec(p, &spec, &Caps::default()).unwrap()
}

/// Pages with boundary and `-2 ≤ χ ≤ -1`.
pub fn page_types() -> Vec<SurfaceType> {
    vec![
        SurfaceType::orientable(0, 3),
        SurfaceType::orientable(1, 1),
        SurfaceType::nonorientable(1, 2),
        SurfaceType::nonorientable(2, 1),
        SurfaceType::orientable(0, 4),
        SurfaceType::orientable(1, 2),
        SurfaceType::nonorientable(1, 3),
        SurfaceType::nonorientable(2, 2),
        SurfaceType::nonorientable(3, 1),
    ]
}

fn degree(rng: &mut ChaCha8Rng) -> i64 {
    let d = rng.gen_range(1..=4);
    if rng.gen_bool(0.3) {
        -d
    } else {
        d
    }
}

fn book(
    circles: usize,
    pages: &[SurfaceType],
    circle_of: &[Vec<usize>],
    degrees: &mut dyn FnMut() -> i64,
) -> BookComplex {
    let mut edges = Vec::new();
    for (j, s) in pages.iter().enumerate() {
        for (k, &circle) in circle_of[j].iter().enumerate().take(s.boundary_count as usize) {
            edges.push(Edge {
                surface: j,
                boundary_index: k,
                circle,
                degree: degrees(),
            });
        }
    }
    BookComplex {
        circle_count: circles,
        surfaces: pages.to_vec(),
        edges,
    }
}

/// Books with at most two circles and two pages, `|χ| ≤ 2` per page and
/// `|d| ≤ 4`: every one-circle shape with unit degrees and with seeded
/// degrees, plus seeded two-circle attachments.
pub fn sweep_books(seed: u64) -> Vec<(String, BookComplex)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let types = page_types();
    let mut out = Vec::new();
    let mut shapes: Vec<Vec<SurfaceType>> = types.iter().map(|&t| vec![t]).collect();
    for a in 0..types.len() {
        for b in a..types.len() {
            shapes.push(vec![types[a], types[b]]);
        }
    }
    for (si, pages) in shapes.iter().enumerate() {
        let one: Vec<Vec<usize>> = pages.iter().map(|s| vec![0; s.boundary_count as usize]).collect();
        out.push((format!("c1-{si}-unit"), book(1, pages, &one, &mut || 1)));
        let b = book(1, pages, &one, &mut || degree(&mut rng));
        out.push((format!("c1-{si}-deg"), b));
        // two circles: every circle used, graph connected
        for attempt in 0..20 {
            let attach: Vec<Vec<usize>> = pages
                .iter()
                .map(|s| (0..s.boundary_count).map(|_| rng.gen_range(0..2)).collect())
                .collect();
            let b = book(2, pages, &attach, &mut || degree(&mut rng));
            if b.validate().is_valid() {
                out.push((format!("c2-{si}-{attempt}"), b));
                break;
            }
        }
    }
    out
}

/// All elements of the group generated by `gens`.
pub fn elements(gens: &[Perm], degree: usize) -> Vec<Perm> {
    let mut out = vec![Perm::identity(degree)];
    let mut seen: std::collections::HashSet<Perm> = out.iter().cloned().collect();
    let mut i = 0;
    while i < out.len() {
        for g in gens {
            let h = out[i].then(g);
            if seen.insert(h.clone()) {
                out.push(h);
            }
        }
        i += 1;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Cyclic,
    Dihedral,
    Alternating4,
    Symmetric4,
    ModQ,
}

pub fn family_group(f: Family, n: usize) -> (usize, Vec<Perm>) {
    let p = |s: &str, d: usize| Perm::parse_cycles(s, d).unwrap();
    match f {
        Family::Cyclic => {
            let cycle: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
            (n, vec![p(&format!("({})", cycle.join(" ")), n)])
        }
        Family::Dihedral => {
            let cycle: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
            let refl: String = (1..=n / 2).map(|i| format!("({} {})", i, n + 1 - i)).collect();
            (n, vec![p(&format!("({})", cycle.join(" ")), n), p(&refl, n)])
        }
        Family::Alternating4 => (4, vec![p("(1 2 3)", 4), p("(1 2)(3 4)", 4)]),
        Family::Symmetric4 => (4, vec![p("(1 2 3 4)", 4), p("(1 2)", 4)]),
        Family::ModQ => unreachable!(),
    }
}

/// A random homomorphism into the group generated by `gens`: free images
/// for handles, crosscaps, circles and stable letters, boundary images
/// forced by the edge relations, and the last boundary of each page solved
/// by a conjugator search. `None` if the last boundary cannot be matched.
pub fn random_homomorphism(
    p: &GroupPresentation,
    book: &BookComplex,
    degree: usize,
    gens: &[Perm],
    rng: &mut ChaCha8Rng,
) -> Option<FiniteQuotient> {
    let elts = elements(gens, degree);
    let n = p.generator_count();
    let mut images: Vec<Option<Perm>> = vec![None; n];
    let edge_of = book.boundary_edges();
    for (g, role) in p.roles.iter().enumerate() {
        match role {
            Role::Handle { .. } | Role::Crosscap { .. } | Role::Circle { .. } => {
                images[g] = Some(elts.choose(rng).unwrap().clone());
            }
            _ => {}
        }
    }
    let last_edges: Vec<usize> = edge_of.iter().map(|b| *b.last().unwrap()).collect();
    for (e, s) in p.stable_letters.iter().enumerate() {
        if let Some(u) = s {
            if !last_edges.contains(&e) {
                images[*u] = Some(elts.choose(rng).unwrap().clone());
            }
        }
    }
    let eval = |w: &Word, images: &[Option<Perm>]| -> Perm {
        w.letters().iter().fold(Perm::identity(degree), |acc, l| {
            let g = images[l.gen].as_ref().expect("assigned");
            if l.inv {
                acc.then(&g.inverse())
            } else {
                acc.then(g)
            }
        })
    };
    let target = |e: usize, images: &[Option<Perm>]| -> Perm {
        let edge = &book.edges[e];
        images[p.circle_gens[edge.circle]].as_ref().unwrap().pow(edge.degree)
    };
    for (j, layout) in p.surfaces.iter().enumerate() {
        let s = layout.surface.boundary_count as usize;
        for (k, &e) in edge_of[j].iter().enumerate().take(s - 1) {
            let t = target(e, &images);
            let img = match p.stable_letters[e] {
                Some(u) => {
                    let u = images[u].as_ref().unwrap();
                    u.then(&t).then(&u.inverse())
                }
                None => t,
            };
            let sigma = p
                .roles
                .iter()
                .position(|r| *r == Role::Boundary { surface: j, index: k })?;
            images[sigma] = Some(img);
        }
    }
    for (j, layout) in p.surfaces.iter().enumerate() {
        let s = layout.surface.boundary_count as usize;
        let e = edge_of[j][s - 1];
        let b = eval(&layout.boundary_words[s - 1], &images);
        let t = target(e, &images);
        match p.stable_letters[e] {
            Some(u) => {
                let mut cands: Vec<&Perm> = elts.iter().filter(|c| c.then(&t).then(&c.inverse()) == b).collect();
                cands.shuffle(rng);
                images[u] = Some((*cands.first()?).clone());
            }
            None => {
                if t != b {
                    return None;
                }
            }
        }
    }
    let images: Vec<Perm> = images
        .into_iter()
        .map(|x| x.expect("all generators assigned"))
        .collect();
    let q = FiniteQuotient::new(p, degree, images, &Caps::default()).ok()?;
    q.check_homomorphism(p).unwrap().then_some(q)
}

pub struct Instance {
    pub name: String,
    pub family: Option<Family>,
    pub book: BookComplex,
    pub presentation: GroupPresentation,
    pub quotient: FiniteQuotient,
}

const FAMILIES: [(Family, usize); 10] = [
    (Family::Cyclic, 2),
    (Family::Cyclic, 3),
    (Family::Cyclic, 4),
    (Family::Cyclic, 6),
    (Family::Dihedral, 3),
    (Family::Dihedral, 4),
    (Family::Dihedral, 6),
    (Family::Alternating4, 4),
    (Family::Symmetric4, 4),
    (Family::ModQ, 2),
];

/// Seeded (book, quotient) pairs with `|G| ≤ 24`: the trivial quotient of
/// every sweep book and random homomorphisms into rotating families.
pub fn sweep(seed: u64, per_book: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut out = Vec::new();
    let mut fam = 0usize;
    for (name, book) in sweep_books(seed) {
        let p = present(&book).unwrap();
        out.push(Instance {
            name: format!("{name}/trivial"),
            family: None,
            book: book.clone(),
            presentation: p.clone(),
            quotient: FiniteQuotient::trivial(&p),
        });
        let mut made = 0;
        let mut tries = 0;
        while made < per_book && tries < 40 {
            tries += 1;
            let (family, n) = FAMILIES[fam % FAMILIES.len()];
            fam += 1;
            let q = if family == Family::ModQ {
                let q = if rng.gen_bool(0.5) { 2 } else { 3 };
                let tower = match mod_q_tower(
                    &p,
                    q,
                    1,
                    &Caps {
                        max_order: 24,
                        max_degree: 24,
                        ..Caps::default()
                    },
                ) {
                    Ok(t) => t,
                    Err(_) => continue,
                };
                FiniteQuotient::from_spec(&p, &tower.levels[1].quotient_spec(), &Caps::default()).ok()
            } else {
                let (degree, gens) = family_group(family, n);
                random_homomorphism(&p, &book, degree, &gens, &mut rng)
            };
            let Some(q) = q else { continue };
            if q.group_order() > 24 {
                continue;
            }
            out.push(Instance {
                name: format!("{name}/{family:?}{n}/{made}"),
                family: Some(family),
                book: book.clone(),
                presentation: p.clone(),
                quotient: q,
            });
            made += 1;
        }
    }
    out
}
