//! Towers of finite quotients and torsion growth along them.
//!
//! A tower lists one quotient per level. Every level after the first carries
//! a projection: a map from its points onto the points of the previous level
//! that intertwines the two actions on every generator. The induced map of
//! permutation groups then sends each deeper image to the shallower one, so
//! the kernels are nested.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::book::{BookComplex, GlobalBounds};
use crate::cover::lift;
use crate::homology::{smith_normal_form, IntMatrix};
use crate::metabelian::ln_big;
use crate::paper_matrix::{self, index_decomposition, ratio_within_bound, MatrixOptions};
use crate::perm::Perm;
use crate::presentation::GroupPresentation;
use crate::quotient::{FiniteQuotient, QuotientSpec};
use crate::rs_oracle;
use crate::{Caps, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerLevel {
    pub points: usize,
    #[serde(default)]
    pub images: std::collections::BTreeMap<String, String>,
    /// Image in the previous level of each point, 1-based. Absent on the
    /// first level; elsewhere absent means the identity map.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projection: Option<Vec<u32>>,
}

impl TowerLevel {
    pub fn quotient_spec(&self) -> QuotientSpec {
        QuotientSpec {
            points: self.points,
            images: self.images.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerSpec {
    /// Recorded as given; never checked.
    #[serde(default)]
    pub declared_cofinal: bool,
    pub levels: Vec<TowerLevel>,
}

impl TowerSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn projection_map(level: &TowerLevel, prev_points: usize, n: usize) -> Result<Vec<u32>> {
    match &level.projection {
        None if level.points == prev_points => Ok((0..level.points as u32).collect()),
        None => Err(Error::NotNested {
            level: n - 1,
            next: n,
            reason: "no projection between levels of different degree".into(),
        }),
        Some(v) => {
            if v.len() != level.points {
                return Err(Error::Malformed(format!(
                    "level {n}: projection has {} entries for {} points",
                    v.len(),
                    level.points
                )));
            }
            v.iter()
                .map(|&x| {
                    if x == 0 || x as usize > prev_points {
                        Err(Error::Malformed(format!(
                            "level {n}: projection value {x} out of range"
                        )))
                    } else {
                        Ok(x - 1)
                    }
                })
                .collect()
        }
    }
}

/// Why a level does not project onto its predecessor, if it does not.
fn nesting_failure(
    p: &GroupPresentation,
    fine: &FiniteQuotient,
    coarse: &FiniteQuotient,
    map: &[u32],
) -> Option<String> {
    let mut hit = vec![false; coarse.degree()];
    for &y in map {
        hit[y as usize] = true;
    }
    if let Some(y) = hit.iter().position(|h| !h) {
        return Some(format!("point {} is not in the image of the projection", y + 1));
    }
    for (a, name) in p.generators.iter().enumerate() {
        let (f, c) = (&fine.images()[a], &coarse.images()[a]);
        for x in 0..fine.degree() as u32 {
            if map[f.apply(x) as usize] != c.apply(map[x as usize]) {
                return Some(format!("projection does not commute with the image of `{name}`"));
            }
        }
    }
    None
}

/// Per-level quotients after checking each is a homomorphism.
pub fn level_quotients(p: &GroupPresentation, t: &TowerSpec, caps: &Caps) -> Result<Vec<FiniteQuotient>> {
    t.levels
        .iter()
        .map(|l| {
            let q = FiniteQuotient::from_spec(p, &l.quotient_spec(), caps)?;
            q.ensure_homomorphism(p)?;
            Ok(q)
        })
        .collect()
}

/// First pair of consecutive levels that are not nested.
pub fn first_nesting_failure(p: &GroupPresentation, t: &TowerSpec, caps: &Caps) -> Result<Option<Error>> {
    let qs = level_quotients(p, t, caps)?;
    for n in 1..qs.len() {
        let map = projection_map(&t.levels[n], qs[n - 1].degree(), n)?;
        if let Some(reason) = nesting_failure(p, &qs[n], &qs[n - 1], &map) {
            return Ok(Some(Error::NotNested {
                level: n - 1,
                next: n,
                reason,
            }));
        }
    }
    Ok(None)
}

/// True iff every projection intertwines consecutive levels on all
/// generators.
pub fn verify_tower(p: &GroupPresentation, t: &TowerSpec, caps: &Caps) -> Result<bool> {
    Ok(first_nesting_failure(p, t, caps)?.is_none())
}

/// Abelian tower through `H1(X; Z/qⁿ)` for `n = 0..=depth`; level `n` is the
/// group acting on itself by translation.
pub fn mod_q_tower(p: &GroupPresentation, q: u64, depth: u32, caps: &Caps) -> Result<TowerSpec> {
    if q < 2 {
        return Err(Error::Malformed(format!("modulus {q} must be at least 2")));
    }
    let g = p.generator_count();
    let rows = p.abelianization_rows();
    let snf = smith_normal_form(&IntMatrix::from_rows(&rows, g), true);
    let v = snf.right.expect("witnesses requested");
    let top = BigUint::from(q).pow(depth);
    // (diagonal entry or 0 for free coordinates, column of V)
    let coords: Vec<(BigUint, usize)> = (0..g)
        .map(|i| {
            let d = snf.diagonal.get(i).map(|d| d.magnitude().clone()).unwrap_or_default();
            (d, i)
        })
        .filter(|(d, _)| d.is_zero() || d.gcd(&top) != BigUint::from(1u32))
        .collect();
    let modulus = |d: &BigUint, n: u32| -> u64 {
        let qn = BigUint::from(q).pow(n);
        let m = if d.is_zero() { qn } else { d.gcd(&qn) };
        u64::try_from(m).unwrap_or(u64::MAX)
    };
    let mut levels: Vec<TowerLevel> = Vec::new();
    let mut prev_moduli: Vec<u64> = Vec::new();
    for n in 0..=depth {
        let moduli: Vec<u64> = coords.iter().map(|(d, _)| modulus(d, n)).collect();
        let order = moduli
            .iter()
            .try_fold(1u64, |acc, &m| acc.checked_mul(m))
            .unwrap_or(u64::MAX);
        if order > caps.max_order || order > caps.max_degree as u64 {
            let (what, limit) = if order > caps.max_order {
                ("group order", caps.max_order)
            } else {
                ("permutation degree", caps.max_degree as u64)
            };
            return Err(Error::CapExceeded {
                what,
                limit,
                actual: order,
            });
        }
        let decode = |mut x: u64, radix: &[u64]| -> Vec<u64> {
            radix
                .iter()
                .map(|&m| {
                    let c = x % m;
                    x /= m;
                    c
                })
                .collect()
        };
        let encode =
            |c: &[u64], radix: &[u64]| -> u64 { c.iter().zip(radix).rev().fold(0, |acc, (&ci, &m)| acc * m + ci) };
        let mut images = std::collections::BTreeMap::new();
        for (a, name) in p.generators.iter().enumerate() {
            let shift: Vec<u64> = coords
                .iter()
                .zip(&moduli)
                .map(|((_, i), &m)| {
                    let x = &v[(a, *i)];
                    let r = x.mod_floor(&num_bigint::BigInt::from(m));
                    u64::try_from(r).expect("residue")
                })
                .collect();
            if shift.iter().all(|&s| s == 0) {
                continue;
            }
            let perm: Vec<u32> = (0..order)
                .map(|x| {
                    let c = decode(x, &moduli);
                    let moved: Vec<u64> = c
                        .iter()
                        .zip(&shift)
                        .zip(&moduli)
                        .map(|((&ci, &s), &m)| (ci + s) % m)
                        .collect();
                    encode(&moved, &moduli) as u32
                })
                .collect();
            images.insert(name.clone(), Perm::from_images(perm)?.to_cycle_string());
        }
        let projection = (n > 0).then(|| {
            (0..order)
                .map(|x| {
                    let c = decode(x, &moduli);
                    let r: Vec<u64> = c.iter().zip(&prev_moduli).map(|(&ci, &m)| ci % m).collect();
                    encode(&r, &prev_moduli) as u32 + 1
                })
                .collect()
        });
        levels.push(TowerLevel {
            points: order as usize,
            images,
            projection,
        });
        prev_moduli = moduli;
    }
    Ok(TowerSpec {
        declared_cofinal: false,
        levels,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthRow {
    pub level: usize,
    pub index: u64,
    #[serde(serialize_with = "crate::serde_big::uint")]
    pub torsion_order: BigUint,
    #[serde(serialize_with = "crate::serde_big::uint_vec")]
    pub invariant_factors: Vec<BigUint>,
    pub betti: usize,
    /// `log(torsion) / index`, for display.
    pub ratio: f64,
    /// `log(2·val·d)·d·m / D`, for display.
    pub hadamard_ratio: f64,
    pub lift_count: u64,
    pub circle_degree: u64,
    #[serde(serialize_with = "crate::serde_big::uint")]
    pub hadamard_bound: BigUint,
    /// `torsion ≤ hadamard_bound`, exactly.
    pub within_hadamard: bool,
    /// `torsion^D ≤ (2·val·d)^(d·m·index)`, exactly.
    pub ratio_within_bound: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleCheck>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleCheck {
    pub agree: bool,
    #[serde(serialize_with = "crate::serde_big::uint")]
    pub torsion_order: BigUint,
    pub betti: usize,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct GrowthOptions {
    pub oracle: bool,
    pub matrix: MatrixOptions,
}

fn growth_row(
    book: &BookComplex,
    p: &GroupPresentation,
    q: &FiniteQuotient,
    level: usize,
    bounds: &GlobalBounds,
    opts: &GrowthOptions,
    caps: &Caps,
) -> Result<GrowthRow> {
    let cov = lift(book, p, q, caps)?;
    let h = paper_matrix::homology(&cov, &opts.matrix)?;
    let idx = index_decomposition(&cov);
    let bound = paper_matrix::hadamard_bound(&cov);
    let oracle = if opts.oracle {
        let r = rs_oracle::cover_homology(p, q, caps)?;
        Some(OracleCheck {
            agree: r.torsion_order == h.torsion_order && r.betti == h.betti,
            torsion_order: r.torsion_order,
            betti: r.betti,
        })
    } else {
        None
    };
    let base = (2 * bounds.val * bounds.d) as f64;
    Ok(GrowthRow {
        level,
        index: cov.total_degree,
        ratio: ln_big(&h.torsion_order) / cov.total_degree as f64,
        hadamard_ratio: base.ln() * (bounds.d * bounds.m) as f64 / idx.circle_degree as f64,
        lift_count: idx.lift_count,
        circle_degree: idx.circle_degree,
        within_hadamard: h.torsion_order <= bound,
        ratio_within_bound: ratio_within_bound(&h.torsion_order, bounds, &idx),
        hadamard_bound: bound,
        torsion_order: h.torsion_order,
        invariant_factors: h.invariant_factors,
        betti: h.betti,
        oracle,
    })
}

/// One row per level; levels are computed concurrently.
pub fn growth_series(
    book: &BookComplex,
    p: &GroupPresentation,
    t: &TowerSpec,
    opts: &GrowthOptions,
    caps: &Caps,
) -> Result<Vec<GrowthRow>> {
    if let Some(e) = first_nesting_failure(p, t, caps)? {
        return Err(e);
    }
    let qs = level_quotients(p, t, caps)?;
    let bounds = book.global_bounds();
    qs.par_iter()
        .enumerate()
        .map(|(n, q)| growth_row(book, p, q, n, &bounds, opts, caps))
        .collect()
}
