//! Permutations on `0..n` and a deterministic Schreier–Sims stabilizer chain.
//!
//! Products compose left to right: `a.then(&b)` applies `a` first. Points
//! act on the right, so `p^(ab) = (p^a)^b`.

use std::fmt;

use num_integer::Integer;

use crate::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    /// Builds a permutation from its image vector.
    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n || seen[x] {
                return Err(Error::Malformed(format!("not a permutation: {images:?}")));
            }
            seen[x] = true;
        }
        Ok(Perm(images))
    }

    /// Parses cycle notation such as `(1 2)(3 4 5)`, with 1-based points.
    /// The empty string and `()` denote the identity.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Self> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut seen = vec![false; degree];
        let mut rest = text.trim();
        while !rest.is_empty() {
            let open = rest
                .strip_prefix('(')
                .ok_or_else(|| Error::Malformed(format!("bad cycle notation `{text}`")))?;
            let close = open
                .find(')')
                .ok_or_else(|| Error::Malformed(format!("unclosed cycle in `{text}`")))?;
            let points = open[..close]
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<usize>()
                        .ok()
                        .filter(|&p| p >= 1 && p <= degree)
                        .ok_or_else(|| Error::Malformed(format!("bad point `{t}` in `{text}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            for &p in &points {
                if seen[p - 1] {
                    return Err(Error::Malformed(format!("point {p} repeated in `{text}`")));
                }
                seen[p - 1] = true;
            }
            for (i, &p) in points.iter().enumerate() {
                images[p - 1] = (points[(i + 1) % points.len()] - 1) as u32;
            }
            rest = open[close + 1..].trim_start();
        }
        Ok(Perm(images))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, p: u32) -> u32 {
        self.0[p as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&x| other.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm(inv)
    }

    pub fn pow(&self, e: i64) -> Perm {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut acc = Perm::identity(self.degree());
        for _ in 0..e.unsigned_abs() {
            acc = acc.then(&base);
        }
        acc
    }

    pub fn first_moved(&self) -> Option<u32> {
        self.0
            .iter()
            .enumerate()
            .find(|&(i, &x)| i as u32 != x)
            .map(|(i, _)| i as u32)
    }

    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for start in 0..self.0.len() {
            if seen[start] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                cyc.push(p as u32);
                p = self.0[p] as usize;
            }
            out.push(cyc);
        }
        out
    }

    /// Multiplicative order: lcm of the cycle lengths.
    pub fn order(&self) -> u64 {
        self.cycles().iter().fold(1u64, |acc, c| acc.lcm(&(c.len() as u64)))
    }

    /// Cycle notation with 1-based points; `()` for the identity.
    pub fn to_cycle_string(&self) -> String {
        let s: String = self
            .cycles()
            .into_iter()
            .filter(|c| c.len() > 1)
            .map(|c| {
                let pts: Vec<String> = c.iter().map(|p| (p + 1).to_string()).collect();
                format!("({})", pts.join(" "))
            })
            .collect();
        if s.is_empty() {
            "()".into()
        } else {
            s
        }
    }

    /// Block sum: `self` on the first points, `other` shifted after them.
    pub fn direct_sum(&self, other: &Perm) -> Perm {
        let n = self.0.len() as u32;
        let mut v = self.0.clone();
        v.extend(other.0.iter().map(|&x| x + n));
        Perm(v)
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_cycle_string())
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_cycle_string())
    }
}

struct Level {
    base_point: u32,
    /// Transversal element for each orbit point, indexed by point.
    transversal: Vec<Option<Perm>>,
    orbit: Vec<u32>,
}

/// Base and strong generating set of a permutation group.
pub struct StabChain {
    degree: usize,
    base: Vec<u32>,
    strong_gens: Vec<Perm>,
    levels: Vec<Level>,
}

impl StabChain {
    /// Runs Schreier–Sims on the given generators.
    ///
    /// Aborts with [`Error::CapExceeded`] as soon as the product of the
    /// basic orbit lengths (a lower bound for the order) passes `max_order`.
    pub fn new(degree: usize, gens: &[Perm], max_order: u64) -> Result<Self> {
        let mut chain = StabChain {
            degree,
            base: Vec::new(),
            strong_gens: Vec::new(),
            levels: Vec::new(),
        };
        for g in gens {
            if g.degree() != degree {
                return Err(Error::Malformed("generator degree mismatch".into()));
            }
            if !g.is_identity() && !chain.strong_gens.contains(g) {
                chain.push_strong_gen(g.clone());
            }
        }
        chain.rebuild_levels(0, max_order)?;
        let mut i = chain.base.len() as isize - 1;
        while i >= 0 {
            let lvl = i as usize;
            match chain.check_level(lvl) {
                None => i -= 1,
                Some((residue, depth)) => {
                    chain.push_strong_gen(residue);
                    chain.rebuild_levels(0, max_order)?;
                    i = depth.min(chain.base.len() - 1) as isize;
                }
            }
        }
        Ok(chain)
    }

    fn push_strong_gen(&mut self, g: Perm) {
        if g.is_identity() {
            return;
        }
        if self.base.iter().all(|&b| g.apply(b) == b) {
            self.base.push(g.first_moved().unwrap());
        }
        self.strong_gens.push(g);
    }

    fn level_gens(&self, lvl: usize) -> impl Iterator<Item = &Perm> {
        let fixed = &self.base[..lvl];
        self.strong_gens
            .iter()
            .filter(move |g| fixed.iter().all(|&b| g.apply(b) == b))
    }

    fn rebuild_levels(&mut self, from: usize, max_order: u64) -> Result<()> {
        self.levels.truncate(from);
        for lvl in from..self.base.len() {
            let b = self.base[lvl];
            let gens: Vec<Perm> = self.level_gens(lvl).cloned().collect();
            let mut transversal: Vec<Option<Perm>> = vec![None; self.degree];
            transversal[b as usize] = Some(Perm::identity(self.degree));
            let mut orbit = vec![b];
            let mut head = 0;
            while head < orbit.len() {
                let p = orbit[head];
                head += 1;
                for g in &gens {
                    let q = g.apply(p);
                    if transversal[q as usize].is_none() {
                        let u = transversal[p as usize].as_ref().unwrap().then(g);
                        transversal[q as usize] = Some(u);
                        orbit.push(q);
                    }
                }
            }
            self.levels.push(Level {
                base_point: b,
                transversal,
                orbit,
            });
        }
        let lower: u128 = self.levels.iter().map(|l| l.orbit.len() as u128).product();
        if lower > max_order as u128 {
            return Err(Error::CapExceeded {
                what: "group order",
                limit: max_order,
                actual: lower.min(u64::MAX as u128) as u64,
            });
        }
        Ok(())
    }

    /// Sifts `g` through levels `from..`; returns the residue and the level
    /// at which it stopped, or `None` if it sifts to the identity.
    fn sift(&self, mut g: Perm, from: usize) -> Option<(Perm, usize)> {
        for lvl in from..self.levels.len() {
            let l = &self.levels[lvl];
            let img = g.apply(l.base_point);
            match &l.transversal[img as usize] {
                Some(u) => g = g.then(&u.inverse()),
                None => return Some((g, lvl)),
            }
        }
        if g.is_identity() {
            None
        } else {
            Some((g, self.levels.len()))
        }
    }

    fn check_level(&self, lvl: usize) -> Option<(Perm, usize)> {
        let l = &self.levels[lvl];
        let gens: Vec<&Perm> = self.level_gens(lvl).collect();
        for &p in &l.orbit {
            let up = l.transversal[p as usize].as_ref().unwrap();
            for g in &gens {
                let q = g.apply(p);
                let uq = l.transversal[q as usize].as_ref().unwrap();
                let h = up.then(g).then(&uq.inverse());
                if let Some(r) = self.sift(h, lvl + 1) {
                    return Some(r);
                }
            }
        }
        None
    }

    pub fn order(&self) -> u64 {
        self.levels.iter().map(|l| l.orbit.len() as u64).product()
    }

    pub fn base(&self) -> &[u32] {
        &self.base
    }

    pub fn contains(&self, g: &Perm) -> bool {
        g.degree() == self.degree && self.sift(g.clone(), 0).is_none()
    }
}
