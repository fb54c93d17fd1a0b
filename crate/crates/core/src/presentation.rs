//! Finite presentation of the fundamental group of a book's spine, read off
//! the graph-of-groups structure.
//!
//! Generators are the free generators of each page group, one generator
//! `t_i` per binding circle and one stable letter per edge outside a fixed
//! spanning tree of the underlying graph. Each edge contributes the relator
//! `b · u t^-d u^-1`, where `b` is the boundary word and `u` is the stable
//! letter (absent for tree edges).

use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;

use crate::book::{BookComplex, SurfaceType};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: usize,
    pub inv: bool,
}

impl Letter {
    pub fn pos(gen: usize) -> Self {
        Letter { gen, inv: false }
    }

    pub fn neg(gen: usize) -> Self {
        Letter { gen, inv: true }
    }

    pub fn inverse(self) -> Self {
        Letter {
            gen: self.gen,
            inv: !self.inv,
        }
    }

    pub fn exponent(self) -> i64 {
        if self.inv {
            -1
        } else {
            1
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn gen(g: usize) -> Self {
        Word(vec![Letter::pos(g)])
    }

    /// `g^e` for a signed exponent.
    pub fn power(g: usize, e: i64) -> Self {
        let l = if e < 0 { Letter::neg(g) } else { Letter::pos(g) };
        Word(vec![l; e.unsigned_abs() as usize])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &Word) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn repeat(&self, n: usize) -> Self {
        Word(self.0.repeat(n))
    }

    /// Renumbers generators by adding `offset`.
    pub fn shifted(&self, offset: usize) -> Self {
        Word(
            self.0
                .iter()
                .map(|l| Letter {
                    gen: l.gen + offset,
                    inv: l.inv,
                })
                .collect(),
        )
    }

    pub fn free_reduce(&self) -> Self {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != w[1].inverse())
    }

    pub fn exponent_sums(&self, ngens: usize) -> Vec<i64> {
        let mut v = vec![0; ngens];
        for l in &self.0 {
            v[l.gen] += l.exponent();
        }
        v
    }
}

/// What a generator stands for in the graph of groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum Role {
    Circle { circle: usize },
    Handle { surface: usize, index: usize },
    Crosscap { surface: usize, index: usize },
    Boundary { surface: usize, index: usize },
    Stable { edge: usize },
}

/// Generator ranges and boundary words of one page.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceLayout {
    pub surface: SurfaceType,
    /// First global generator index of this page; its free generators are
    /// contiguous.
    pub offset: usize,
    /// Boundary words in global generator indices.
    pub boundary_words: Vec<Word>,
}

impl SurfaceLayout {
    pub fn free_generators(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.surface.free_rank()
    }

    /// Orientation character on a free generator of this page.
    pub fn w1(&self, gen: usize) -> bool {
        !self.surface.orientable && gen >= self.offset && gen < self.offset + self.surface.genus as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPresentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
    pub roles: Vec<Role>,
    pub surfaces: Vec<SurfaceLayout>,
    /// Generator index of `t_i`.
    pub circle_gens: Vec<usize>,
    /// Stable letter of each edge; `None` for spanning-tree edges.
    pub stable_letters: Vec<Option<usize>>,
}

impl GroupPresentation {
    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == name)
    }

    pub fn stable_letter_count(&self) -> usize {
        self.stable_letters.iter().filter(|s| s.is_some()).count()
    }

    /// Exponent-sum matrix of the relators (relators x generators).
    pub fn abelianization_rows(&self) -> Vec<Vec<i64>> {
        let n = self.generator_count();
        self.relators.iter().map(|r| r.exponent_sums(n)).collect()
    }

    pub fn format_word(&self, w: &Word) -> String {
        w.letters()
            .iter()
            .map(|l| {
                let name = &self.generators[l.gen];
                if l.inv {
                    invert_name(name)
                } else {
                    name.clone()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Plain-text export: a `gen:` line, then one `rel:` line per relator.
    /// Capitalising the first character of a generator name denotes its
    /// inverse.
    pub fn to_text(&self) -> String {
        let mut s = format!("gen: {}\n", self.generators.join(" "));
        for r in &self.relators {
            s.push_str("rel: ");
            s.push_str(&self.format_word(r));
            s.push('\n');
        }
        s
    }
}

fn invert_name(name: &str) -> String {
    let mut c = name.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// Parses the plain-text export back into generator names and relators.
pub fn parse_text(text: &str) -> Result<(Vec<String>, Vec<Word>)> {
    let mut gens: Option<Vec<String>> = None;
    let mut rels = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        if let Some(rest) = line.strip_prefix("gen:") {
            let names: Vec<String> = rest.split_whitespace().map(String::from).collect();
            if names
                .iter()
                .any(|n| !n.chars().next().is_some_and(|c| c.is_ascii_lowercase()))
            {
                return Err(Error::Malformed(
                    "generator names must start with a lowercase letter".into(),
                ));
            }
            gens = Some(names);
        } else if let Some(rest) = line.strip_prefix("rel:") {
            let names = gens
                .as_ref()
                .ok_or_else(|| Error::Malformed("`rel:` before `gen:`".into()))?;
            let mut w = Vec::new();
            for tok in rest.split_whitespace() {
                if let Some(i) = names.iter().position(|n| n == tok) {
                    w.push(Letter::pos(i));
                } else if let Some(i) = names.iter().position(|n| invert_name(n) == tok) {
                    w.push(Letter::neg(i));
                } else {
                    return Err(Error::Malformed(format!("unknown generator `{tok}`")));
                }
            }
            rels.push(Word(w));
        } else {
            return Err(Error::Malformed(format!("unrecognised line `{line}`")));
        }
    }
    let gens = gens.ok_or_else(|| Error::Malformed("missing `gen:` line".into()))?;
    Ok((gens, rels))
}

/// Boundary word `k` of a surface in its local generators.
///
/// Local generators are `x1 y1 .. xg yg` (orientable) or `x1 .. xr`
/// (non-orientable), followed by `σ1 .. σ(s-1)`. The last boundary word
/// closes up the standard relation.
pub fn boundary_word(s: &SurfaceType, k: usize) -> Result<Word> {
    let nb = s.boundary_count as usize;
    if k >= nb {
        return Err(Error::IndexOutOfRange {
            what: "boundary component",
            index: k,
            len: nb,
        });
    }
    let body = if s.orientable {
        2 * s.genus as usize
    } else {
        s.genus as usize
    };
    if k + 1 < nb {
        return Ok(Word::gen(body + k));
    }
    let mut w = Vec::new();
    if s.orientable {
        for a in 0..s.genus as usize {
            let (x, y) = (2 * a, 2 * a + 1);
            w.extend([Letter::pos(x), Letter::pos(y), Letter::neg(x), Letter::neg(y)]);
        }
    } else {
        for a in 0..s.genus as usize {
            w.extend([Letter::pos(a), Letter::pos(a)]);
        }
    }
    for b in 0..nb - 1 {
        w.push(Letter::pos(body + b));
    }
    Ok(Word(w).inverse())
}

fn local_names(j: usize, s: &SurfaceType) -> (Vec<String>, Vec<Role>) {
    let mut names = Vec::new();
    let mut roles = Vec::new();
    if s.orientable {
        for a in 1..=s.genus as usize {
            names.push(format!("x{j}_{a}"));
            roles.push(Role::Handle {
                surface: j,
                index: 2 * a - 2,
            });
            names.push(format!("y{j}_{a}"));
            roles.push(Role::Handle {
                surface: j,
                index: 2 * a - 1,
            });
        }
    } else {
        for a in 1..=s.genus as usize {
            names.push(format!("x{j}_{a}"));
            roles.push(Role::Crosscap {
                surface: j,
                index: a - 1,
            });
        }
    }
    for k in 1..s.boundary_count as usize {
        names.push(format!("s{j}_{k}"));
        roles.push(Role::Boundary {
            surface: j,
            index: k - 1,
        });
    }
    (names, roles)
}

/// Spanning tree of the underlying graph by breadth-first search from
/// circle 0; neighbours are visited circles first, then by index, then by
/// edge index. Returns a flag per edge.
pub fn spanning_tree(book: &BookComplex) -> Vec<bool> {
    #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
    enum V {
        Circle(usize),
        Surface(usize),
    }
    let m = book.circle_count;
    let id = |v: V| match v {
        V::Circle(i) => i,
        V::Surface(j) => m + j,
    };
    let mut visited = vec![false; m + book.surfaces.len()];
    let mut in_tree = vec![false; book.edges.len()];
    if m == 0 {
        return in_tree;
    }
    let mut queue = VecDeque::from([V::Circle(0)]);
    visited[0] = true;
    while let Some(v) = queue.pop_front() {
        let mut nbrs: Vec<(V, usize)> = book
            .edges
            .iter()
            .enumerate()
            .filter_map(|(idx, e)| match v {
                V::Circle(i) if e.circle == i => Some((V::Surface(e.surface), idx)),
                V::Surface(j) if e.surface == j => Some((V::Circle(e.circle), idx)),
                _ => None,
            })
            .collect();
        nbrs.sort();
        for (w, idx) in nbrs {
            if !visited[id(w)] {
                visited[id(w)] = true;
                in_tree[idx] = true;
                queue.push_back(w);
            }
        }
    }
    in_tree
}

/// Builds the graph-of-groups presentation of the fundamental group.
pub fn present(book: &BookComplex) -> Result<GroupPresentation> {
    book.ensure_valid()?;
    let mut generators = Vec::new();
    let mut roles = Vec::new();
    let mut surfaces = Vec::new();
    for (j, s) in book.surfaces.iter().enumerate() {
        let offset = generators.len();
        let (names, rs) = local_names(j, s);
        generators.extend(names);
        roles.extend(rs);
        let boundary_words = (0..s.boundary_count as usize)
            .map(|k| boundary_word(s, k).map(|w| w.shifted(offset)))
            .collect::<Result<Vec<_>>>()?;
        surfaces.push(SurfaceLayout {
            surface: *s,
            offset,
            boundary_words,
        });
    }
    let mut circle_gens = Vec::new();
    for i in 0..book.circle_count {
        circle_gens.push(generators.len());
        generators.push(format!("t{i}"));
        roles.push(Role::Circle { circle: i });
    }
    let tree = spanning_tree(book);
    let mut stable_letters = Vec::new();
    for (idx, in_tree) in tree.iter().enumerate() {
        if *in_tree {
            stable_letters.push(None);
        } else {
            stable_letters.push(Some(generators.len()));
            generators.push(format!("u{idx}"));
            roles.push(Role::Stable { edge: idx });
        }
    }
    let relators = book
        .edges
        .iter()
        .enumerate()
        .map(|(idx, e)| {
            let b = &surfaces[e.surface].boundary_words[e.boundary_index];
            let t = Word::power(circle_gens[e.circle], -e.degree);
            let tail = match stable_letters[idx] {
                Some(u) => Word::gen(u).concat(&t).concat(&Word(vec![Letter::neg(u)])),
                None => t,
            };
            b.concat(&tail).free_reduce()
        })
        .collect();
    Ok(GroupPresentation {
        generators,
        relators,
        roles,
        surfaces,
        circle_gens,
        stable_letters,
    })
}

impl fmt::Display for GroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::book::fixtures::*;
    use proptest::prelude::*;

    fn w(letters: &[(usize, bool)]) -> Word {
        Word(letters.iter().map(|&(g, inv)| Letter { gen: g, inv }).collect())
    }

    #[test]
    fn boundary_words() {
        // [x,y]^-1
        let b = boundary_word(&SurfaceType::orientable(1, 1), 0).unwrap();
        assert_eq!(b, w(&[(1, false), (0, false), (1, true), (0, true)]));
        // (x^2 σ1)^-1
        let b = boundary_word(&SurfaceType::nonorientable(1, 2), 1).unwrap();
        assert_eq!(b, w(&[(1, true), (0, true), (0, true)]));
        // (σ1 σ2)^-1
        let b = boundary_word(&SurfaceType::orientable(0, 3), 2).unwrap();
        assert_eq!(b, w(&[(1, true), (0, true)]));
        assert_eq!(boundary_word(&SurfaceType::orientable(0, 3), 1).unwrap(), Word::gen(1));
        assert!(boundary_word(&SurfaceType::orientable(0, 3), 3).is_err());
    }

    #[test]
    fn running_example_presentation() {
        let p = present(&running_example()).unwrap();
        assert_eq!(p.generators, ["x0_1", "y0_1", "t0"]);
        assert_eq!(p.relators.len(), 1);
        assert_eq!(p.stable_letter_count(), 0);
        assert_eq!(p.format_word(&p.relators[0]), "y0_1 x0_1 Y0_1 X0_1 T0 T0");
        assert_eq!(p.abelianization_rows(), vec![vec![0, 0, -2]]);
    }

    #[test]
    fn mobius_example_presentation() {
        let p = present(&mobius_example()).unwrap();
        assert_eq!(p.generators, ["x0_1", "s0_1", "t0", "u1"]);
        assert_eq!(p.format_word(&p.relators[0]), "s0_1 T0");
        assert_eq!(p.format_word(&p.relators[1]), "S0_1 X0_1 X0_1 u1 T0 T0 T0 U1");
        assert_eq!(p.stable_letter_count(), 1);
        assert_eq!(p.roles[3], Role::Stable { edge: 1 });
    }

    #[test]
    fn pants_example_presentation() {
        // 3 vertices, 3 edges: one stable letter.
        let p = present(&pants_example()).unwrap();
        let count = |f: fn(&Role) -> bool| p.roles.iter().filter(|r| f(r)).count();
        assert_eq!(count(|r| matches!(r, Role::Boundary { .. })), 2);
        assert_eq!(count(|r| matches!(r, Role::Circle { .. })), 2);
        assert_eq!(count(|r| matches!(r, Role::Stable { .. })), 1);
        assert_eq!(p.relators.len(), 3);
        let b = pants_example();
        let vertices = b.circle_count + b.surfaces.len();
        assert_eq!(p.stable_letter_count(), b.edges.len() - (vertices - 1));
    }

    #[test]
    fn invalid_book_rejected() {
        let mut b = running_example();
        b.edges.clear();
        assert!(matches!(present(&b), Err(Error::InvalidBook(_))));
    }

    #[test]
    fn text_round_trip() {
        let p = present(&mobius_example()).unwrap();
        let (gens, rels) = parse_text(&p.to_text()).unwrap();
        assert_eq!(gens, p.generators);
        assert_eq!(rels, p.relators);
        assert!(parse_text("rel: a").is_err());
        assert!(parse_text("gen: a\nrel: b").is_err());
    }

    #[test]
    fn deterministic() {
        let a = present(&pants_example()).unwrap();
        let b = present(&pants_example()).unwrap();
        assert_eq!(a.to_text(), b.to_text());
    }

    proptest! {
        #[test]
        fn free_reduce_is_reduced_and_preserves_exponents(
            letters in prop::collection::vec((0usize..3, any::<bool>()), 0..30)
        ) {
            let word = w(&letters);
            let r = word.free_reduce();
            prop_assert!(r.is_reduced());
            prop_assert_eq!(r.exponent_sums(3), word.exponent_sums(3));
            prop_assert_eq!(word.concat(&word.inverse()).free_reduce(), Word::empty());
        }

        #[test]
        fn relators_reduced(g in 0u32..3, s in 1u32..4, orientable: bool, d in 1i64..4) {
            let g = if orientable { g } else { g + 1 };
            let surf = SurfaceType { orientable, genus: g, boundary_count: s };
            prop_assume!(surf.euler_characteristic() < 0);
            let book = BookComplex {
                circle_count: 1,
                surfaces: vec![surf],
                edges: (0..s as usize)
                    .map(|k| crate::book::Edge { surface: 0, boundary_index: k, circle: 0, degree: d })
                    .collect(),
            };
            let p = present(&book).unwrap();
            prop_assert!(p.relators.iter().all(|r| r.is_reduced()));
            prop_assert_eq!(p.stable_letter_count(), s as usize - 1);
        }
    }
}
