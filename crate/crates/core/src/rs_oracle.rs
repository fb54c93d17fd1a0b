//! Reidemeister–Schreier presentation of the kernel of a finite quotient,
//! computed directly from the group presentation. Cosets of the kernel are
//! the group elements; the coset graph is the Cayley graph of the generator
//! images and its breadth-first tree selects the trivial Schreier generators.

use rayon::prelude::*;

use crate::homology::{cokernel, HomologyResult, IntMatrix};
use crate::presentation::{GroupPresentation, Letter, Word};
use crate::quotient::{FiniteQuotient, GroupTable};
use crate::{Caps, Error, Result};

#[derive(Clone, Debug)]
pub struct SubgroupPresentation {
    /// `(coset, generator)` for each Schreier generator `s_{c,a} = p_c a p_{ca}^{-1}`.
    pub schreier_generators: Vec<(u32, usize)>,
    pub rewritten_relators: Vec<Word>,
    pub index: usize,
    pub base_generators: usize,
    pub base_relators: usize,
}

impl SubgroupPresentation {
    pub fn generator_name(&self, p: &GroupPresentation, i: usize) -> String {
        let (c, a) = self.schreier_generators[i];
        format!("{}@{c}", p.generators[a])
    }
}

fn rewrite(table: &GroupTable, ids: &[u32], ngens: usize, start: u32, w: &Word) -> Result<Word> {
    let mut out = Vec::new();
    let mut x = start;
    for &l in w.letters() {
        if l.inv {
            let y = table.mul_gen_inv(x, l.gen);
            let id = ids[y as usize * ngens + l.gen];
            if id != u32::MAX {
                out.push(Letter::neg(id as usize));
            }
            x = y;
        } else {
            let id = ids[x as usize * ngens + l.gen];
            if id != u32::MAX {
                out.push(Letter::pos(id as usize));
            }
            x = table.mul_gen(x, l.gen);
        }
    }
    if x != start {
        return Err(Error::Internal("rewritten relator is not closed".into()));
    }
    Ok(Word(out).free_reduce())
}

pub fn schreier_presentation(p: &GroupPresentation, q: &FiniteQuotient, caps: &Caps) -> Result<SubgroupPresentation> {
    q.ensure_homomorphism(p)?;
    let table = q.table(caps)?;
    let ngens = p.generator_count();
    let n = table.order();
    let mut ids = vec![u32::MAX; n * ngens];
    let mut schreier_generators = Vec::new();
    for c in 0..n as u32 {
        for a in 0..ngens {
            if !table.is_tree_edge(c, a) {
                ids[c as usize * ngens + a] = schreier_generators.len() as u32;
                schreier_generators.push((c, a));
            }
        }
    }
    let rewritten_relators = (0..n as u32)
        .into_par_iter()
        .map(|c| {
            p.relators
                .iter()
                .map(|r| rewrite(&table, &ids, ngens, c, r))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(SubgroupPresentation {
        schreier_generators,
        rewritten_relators,
        index: n,
        base_generators: ngens,
        base_relators: p.relators.len(),
    })
}

/// Exponent sums of the rewritten relators (relators x Schreier generators).
pub fn abelianization_matrix(sp: &SubgroupPresentation) -> IntMatrix {
    let cols = sp.schreier_generators.len();
    let rows: Vec<Vec<i64>> = sp.rewritten_relators.iter().map(|r| r.exponent_sums(cols)).collect();
    IntMatrix::from_rows(&rows, cols)
}

/// First homology of the cover: the cokernel of the abelianized subgroup
/// presentation.
pub fn cover_homology(p: &GroupPresentation, q: &FiniteQuotient, caps: &Caps) -> Result<HomologyResult> {
    let sp = schreier_presentation(p, q, caps)?;
    Ok(cokernel(&abelianization_matrix(&sp)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::book::fixtures::*;
    use crate::perm::Perm;
    use crate::presentation::{present, Role};
    use num_bigint::BigUint;

    fn free_cyclic() -> GroupPresentation {
        GroupPresentation {
            generators: vec!["a".into()],
            relators: vec![],
            roles: vec![Role::Circle { circle: 0 }],
            surfaces: vec![],
            circle_gens: vec![0],
            stable_letters: vec![],
        }
    }

    #[test]
    fn index_one_is_a_renaming() {
        let book = running_example();
        let p = present(&book).unwrap();
        let q = FiniteQuotient::trivial(&p);
        let sp = schreier_presentation(&p, &q, &Caps::default()).unwrap();
        assert_eq!(sp.schreier_generators.len(), p.generator_count());
        assert_eq!(sp.rewritten_relators, p.relators);
        let m = abelianization_matrix(&sp);
        assert_eq!(m, IntMatrix::from_i64(&[&[0, 0, -2]]));
        let h = cokernel(&m);
        assert_eq!(h.invariant_factors, vec![BigUint::from(2u32)]);
        assert_eq!(h.betti, 2);
    }

    #[test]
    fn index_two_subgroup_of_integers() {
        let p = free_cyclic();
        let a = Perm::parse_cycles("(1 2)", 2).unwrap();
        let q = FiniteQuotient::new(&p, 2, vec![a], &Caps::default()).unwrap();
        let sp = schreier_presentation(&p, &q, &Caps::default()).unwrap();
        // a at the identity is the tree edge; a at the other coset gives a^2
        assert_eq!(sp.schreier_generators, vec![(1, 0)]);
        assert!(sp.rewritten_relators.is_empty());
    }

    #[test]
    fn running_example_double_cover() {
        let book = running_example();
        let p = present(&book).unwrap();
        let spec = crate::quotient::QuotientSpec {
            points: 2,
            images: [("t0".to_string(), "(1 2)".to_string())].into_iter().collect(),
        };
        let q = FiniteQuotient::from_spec(&p, &spec, &Caps::default()).unwrap();
        let sp = schreier_presentation(&p, &q, &Caps::default()).unwrap();
        assert_eq!(sp.schreier_generators.len(), 2 * 3 - 1);
        assert_eq!(sp.rewritten_relators.len(), 2);
        let h = cover_homology(&p, &q, &Caps::default()).unwrap();
        assert!(h.invariant_factors.is_empty());
        assert_eq!(h.betti, 4);
    }

    #[test]
    fn abelianization_rows() {
        let sp = SubgroupPresentation {
            schreier_generators: vec![(0, 0), (0, 1), (0, 2)],
            rewritten_relators: vec![
                Word(vec![Letter::pos(0), Letter::pos(1), Letter::neg(0), Letter::neg(1)]),
                Word(vec![
                    Letter::pos(0),
                    Letter::pos(0),
                    Letter::pos(1),
                    Letter::neg(2),
                    Letter::neg(2),
                    Letter::neg(2),
                ]),
            ],
            index: 1,
            base_generators: 3,
            base_relators: 2,
        };
        let m = abelianization_matrix(&sp);
        assert_eq!(m, IntMatrix::from_i64(&[&[0, 0, 0], &[2, 1, -3]]));
    }
}
