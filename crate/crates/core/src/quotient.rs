//! Finite quotients of the fundamental group, given by permutation images of
//! the presentation generators. The kernel defines a regular cover whose deck
//! group is the generated permutation group `G`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::perm::{Perm, StabChain};
use crate::presentation::{GroupPresentation, Letter, Word};
use crate::{Caps, Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuotientSpec {
    pub points: usize,
    #[serde(default)]
    pub images: BTreeMap<String, String>,
}

#[derive(Clone, Debug)]
pub struct FiniteQuotient {
    degree: usize,
    names: Vec<String>,
    images: Vec<Perm>,
    group_order: u64,
    base: Vec<u32>,
}

impl FiniteQuotient {
    /// `images[g]` is the image of presentation generator `g`. Relators are
    /// not checked; see [`FiniteQuotient::check_homomorphism`].
    pub fn new(p: &GroupPresentation, degree: usize, images: Vec<Perm>, caps: &Caps) -> Result<Self> {
        if images.len() != p.generator_count() {
            let missing = p
                .generators
                .get(images.len())
                .cloned()
                .unwrap_or_else(|| "<extra>".into());
            return Err(Error::MissingGenerator(missing));
        }
        Self::from_parts(p.generators.clone(), degree, images, caps)
    }

    fn from_parts(names: Vec<String>, degree: usize, images: Vec<Perm>, caps: &Caps) -> Result<Self> {
        if degree == 0 {
            return Err(Error::Malformed("a quotient needs at least one point".into()));
        }
        if degree > caps.max_degree {
            return Err(Error::CapExceeded {
                what: "permutation degree",
                limit: caps.max_degree as u64,
                actual: degree as u64,
            });
        }
        if images.iter().any(|g| g.degree() != degree) {
            return Err(Error::Malformed("image degree differs from `points`".into()));
        }
        let chain = StabChain::new(degree, &images, caps.max_order)?;
        Ok(FiniteQuotient {
            degree,
            names,
            group_order: chain.order(),
            base: chain.base().to_vec(),
            images,
        })
    }

    /// The quotient onto the trivial group.
    pub fn trivial(p: &GroupPresentation) -> Self {
        FiniteQuotient {
            degree: 1,
            names: p.generators.clone(),
            images: vec![Perm::identity(1); p.generator_count()],
            group_order: 1,
            base: Vec::new(),
        }
    }

    /// Parses cycle notation; unnamed generators map to the identity. Fails
    /// with [`Error::NotHomomorphism`] if a relator does not map to the
    /// identity.
    pub fn from_spec(p: &GroupPresentation, spec: &QuotientSpec, caps: &Caps) -> Result<Self> {
        let q = Self::from_spec_unchecked(p, spec, caps)?;
        q.ensure_homomorphism(p)?;
        Ok(q)
    }

    pub(crate) fn from_spec_unchecked(p: &GroupPresentation, spec: &QuotientSpec, caps: &Caps) -> Result<Self> {
        if spec.points > caps.max_degree {
            return Err(Error::CapExceeded {
                what: "permutation degree",
                limit: caps.max_degree as u64,
                actual: spec.points as u64,
            });
        }
        let mut images = vec![Perm::identity(spec.points); p.generator_count()];
        for (name, cycles) in &spec.images {
            let g = p
                .generator_index(name)
                .ok_or_else(|| Error::Malformed(format!("unknown generator `{name}`")))?;
            images[g] = Perm::parse_cycles(cycles, spec.points)?;
        }
        Self::new(p, spec.points, images, caps)
    }

    pub fn from_json(p: &GroupPresentation, text: &str, caps: &Caps) -> Result<Self> {
        let spec: QuotientSpec = serde_json::from_str(text)?;
        Self::from_spec(p, &spec, caps)
    }

    /// Serializable form; identity images are omitted.
    pub fn to_spec(&self) -> QuotientSpec {
        QuotientSpec {
            points: self.degree,
            images: self
                .names
                .iter()
                .zip(&self.images)
                .filter(|(_, g)| !g.is_identity())
                .map(|(n, g)| (n.clone(), g.to_cycle_string()))
                .collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn group_order(&self) -> u64 {
        self.group_order
    }

    pub fn images(&self) -> &[Perm] {
        &self.images
    }

    pub fn generator_names(&self) -> &[String] {
        &self.names
    }

    pub fn evaluate(&self, w: &Word) -> Perm {
        let mut acc = Perm::identity(self.degree);
        for l in w.letters() {
            let g = &self.images[l.gen];
            acc = if l.inv { acc.then(&g.inverse()) } else { acc.then(g) };
        }
        acc
    }

    pub fn element_order(&self, w: &Word) -> u64 {
        self.evaluate(w).order()
    }

    /// Order of the subgroup generated by the images of `ws`, by Schreier–Sims.
    pub fn image_subgroup_order(&self, ws: &[Word], caps: &Caps) -> Result<u64> {
        let gens: Vec<Perm> = ws.iter().map(|w| self.evaluate(w)).collect();
        Ok(StabChain::new(self.degree, &gens, caps.max_order)?.order())
    }

    /// True iff every relator maps to the identity.
    pub fn check_homomorphism(&self, p: &GroupPresentation) -> Result<bool> {
        Ok(self.first_failing_relator(p)?.is_none())
    }

    pub fn ensure_homomorphism(&self, p: &GroupPresentation) -> Result<()> {
        match self.first_failing_relator(p)? {
            None => Ok(()),
            Some(r) => Err(Error::NotHomomorphism(r)),
        }
    }

    fn first_failing_relator(&self, p: &GroupPresentation) -> Result<Option<usize>> {
        for (i, g) in p.generators.iter().enumerate() {
            if self.names.get(i) != Some(g) {
                return Err(Error::MissingGenerator(g.clone()));
            }
        }
        if self.names.len() != p.generator_count() {
            return Err(Error::Malformed("quotient has extra generators".into()));
        }
        Ok(p.relators.iter().position(|r| !self.evaluate(r).is_identity()))
    }

    /// Enumerates `G` as a Cayley table of right multiplication by the
    /// generator images. Elements are numbered in breadth-first order from
    /// the identity.
    pub fn table(&self, caps: &Caps) -> Result<GroupTable> {
        GroupTable::build(self, caps)
    }

    /// One representative per coset `gH` of the subgroup generated by the
    /// images of `subgroup_gens`, ordered by breadth-first element index; the
    /// representative is the element of least index in its coset.
    pub fn coset_labels(&self, subgroup_gens: &[Word], caps: &Caps) -> Result<Vec<Perm>> {
        let t = self.table(caps)?;
        let part = t.coset_partition(subgroup_gens);
        Ok(part.reps.iter().map(|&r| t.perm(r)).collect())
    }
}

/// Cayley table of a finite quotient.
#[derive(Clone, Debug)]
pub struct GroupTable {
    order: usize,
    ngens: usize,
    mul: Vec<u32>,
    mul_inv: Vec<u32>,
    /// Breadth-first tree: element reached from `parent[g].0` by generator
    /// `parent[g].1`. The identity is its own parent.
    parent: Vec<(u32, u32)>,
    images: Vec<Perm>,
}

/// Partition of the group elements into cosets `gH`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetPartition {
    pub coset_of: Vec<u32>,
    /// Least element of each coset, increasing.
    pub reps: Vec<u32>,
}

impl CosetPartition {
    pub fn count(&self) -> usize {
        self.reps.len()
    }

    pub fn coset_size(&self) -> usize {
        self.coset_of.len() / self.reps.len()
    }
}

impl GroupTable {
    fn build(q: &FiniteQuotient, caps: &Caps) -> Result<Self> {
        if q.group_order > caps.max_order {
            return Err(Error::CapExceeded {
                what: "group order",
                limit: caps.max_order,
                actual: q.group_order,
            });
        }
        let n = q.group_order as usize;
        let ngens = q.images.len();
        let mut index: HashMap<Vec<u32>, u32> = HashMap::with_capacity(n);
        let mut keys: Vec<Vec<u32>> = Vec::with_capacity(n);
        let mut parent = Vec::with_capacity(n);
        let mut mul = Vec::with_capacity(n * ngens);
        keys.push(q.base.clone());
        index.insert(q.base.clone(), 0);
        parent.push((0, 0));
        let mut head = 0;
        while head < keys.len() {
            for (a, img) in q.images.iter().enumerate() {
                let k: Vec<u32> = keys[head].iter().map(|&x| img.apply(x)).collect();
                let id = match index.get(&k) {
                    Some(&id) => id,
                    None => {
                        let id = keys.len() as u32;
                        if keys.len() >= n {
                            return Err(Error::Internal("element enumeration overran the group order".into()));
                        }
                        index.insert(k.clone(), id);
                        keys.push(k);
                        parent.push((head as u32, a as u32));
                        id
                    }
                };
                mul.push(id);
            }
            head += 1;
        }
        if keys.len() != n {
            return Err(Error::Internal(format!(
                "enumerated {} elements, expected {n}",
                keys.len()
            )));
        }
        let mut mul_inv = vec![0u32; n * ngens];
        for g in 0..n {
            for a in 0..ngens {
                mul_inv[mul[g * ngens + a] as usize * ngens + a] = g as u32;
            }
        }
        Ok(GroupTable {
            order: n,
            ngens,
            mul,
            mul_inv,
            parent,
            images: q.images.clone(),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn generator_count(&self) -> usize {
        self.ngens
    }

    #[inline]
    pub fn mul_gen(&self, g: u32, a: usize) -> u32 {
        self.mul[g as usize * self.ngens + a]
    }

    #[inline]
    pub fn mul_gen_inv(&self, g: u32, a: usize) -> u32 {
        self.mul_inv[g as usize * self.ngens + a]
    }

    #[inline]
    pub fn act(&self, g: u32, l: Letter) -> u32 {
        if l.inv {
            self.mul_gen_inv(g, l.gen)
        } else {
            self.mul_gen(g, l.gen)
        }
    }

    /// `g · φ(w)`.
    pub fn act_word(&self, g: u32, w: &Word) -> u32 {
        w.letters().iter().fold(g, |x, &l| self.act(x, l))
    }

    /// Whether the Cayley-graph edge `g -> g·a` belongs to the breadth-first tree.
    pub fn is_tree_edge(&self, g: u32, a: usize) -> bool {
        let h = self.mul_gen(g, a);
        h != 0 && self.parent[h as usize] == (g, a as u32)
    }

    pub fn perm(&self, g: u32) -> Perm {
        let mut path = Vec::new();
        let mut x = g;
        while x != 0 {
            let (p, a) = self.parent[x as usize];
            path.push(a);
            x = p;
        }
        let degree = self.images.first().map_or(1, Perm::degree);
        path.iter()
            .rev()
            .fold(Perm::identity(degree), |acc, &a| acc.then(&self.images[a as usize]))
    }

    /// Element permutation induced by right multiplication by `φ(w)`.
    pub fn word_action(&self, w: &Word) -> Vec<u32> {
        (0..self.order as u32).map(|g| self.act_word(g, w)).collect()
    }

    /// Cosets `gH` for `H` generated by the images of `gens`.
    pub fn coset_partition(&self, gens: &[Word]) -> CosetPartition {
        let actions: Vec<Vec<u32>> = gens.iter().map(|w| self.word_action(w)).collect();
        let mut coset_of = vec![u32::MAX; self.order];
        let mut reps = Vec::new();
        let mut stack = Vec::new();
        for start in 0..self.order {
            if coset_of[start] != u32::MAX {
                continue;
            }
            let c = reps.len() as u32;
            reps.push(start as u32);
            coset_of[start] = c;
            stack.push(start as u32);
            while let Some(x) = stack.pop() {
                for act in &actions {
                    let y = act[x as usize];
                    if coset_of[y as usize] == u32::MAX {
                        coset_of[y as usize] = c;
                        stack.push(y);
                    }
                }
            }
        }
        CosetPartition { coset_of, reps }
    }
}
