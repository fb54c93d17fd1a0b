//! Boundary relation matrix of a cover.
//!
//! Rows are page lifts. Columns are circle lifts followed by the crosscap
//! generators of each non-orientable page lift. A row records the single
//! relation among the boundary classes of its page lift, with each boundary
//! class replaced by its elevation degree times the circle lift it is glued
//! to. The torsion of the first homology of the cover is the torsion of the
//! cokernel of this matrix, and the free rank adds the handles of orientable
//! page lifts and the cycles of the lifted graph.

use std::collections::{BTreeMap, VecDeque};

use num_bigint::{BigInt, BigUint};
use num_traits::{Pow, ToPrimitive, Zero};
use serde::Serialize;

use crate::book::GlobalBounds;
use crate::cover::CoveredComplex;
use crate::homology::{integer_kernel, smith_normal_form, IntMatrix};
use crate::presentation::Word;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MatrixOptions {
    /// One parity column per non-orientable page lift instead of one column
    /// per crosscap. The cokernel changes only by free summands, which
    /// [`homology`] adds back.
    pub compressed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColumnLabel {
    Circle { circle_lift: usize, base_circle: usize },
    Crosscap { surface_lift: usize, crosscap: usize },
    Parity { surface_lift: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowLabel {
    pub surface_lift: usize,
    pub base_surface: usize,
    pub orientable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PaperMatrix {
    pub matrix: IntMatrix,
    pub row_labels: Vec<RowLabel>,
    pub column_labels: Vec<ColumnLabel>,
    /// Leading columns that belong to circle lifts.
    pub circle_columns: usize,
    /// Sign of each boundary lift in its row, per page lift.
    pub signs: Vec<Vec<i8>>,
    pub bound_inputs: BoundInputs,
    pub compressed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BoundInputs {
    #[serde(flatten)]
    pub global: GlobalBounds,
    pub max_lift_count: u64,
}

/// Spanning forest of the Schreier graphs of all lifts of one page, with a
/// coordinate for every non-tree edge. Each lift's non-tree edges are a
/// basis of the first homology of that lift.
struct SchreierForest {
    gens: Vec<usize>,
    coord: Vec<u32>,
}

impl SchreierForest {
    fn new(cov: &CoveredComplex, j: usize) -> Self {
        let t = &cov.table;
        let n = t.order();
        let gens: Vec<usize> = cov.presentation.surfaces[j].free_generators().collect();
        let k = gens.len();
        let mut tree = vec![false; n * k];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        let part = &cov.surface_partitions[j];
        for &rep in &part.reps {
            seen[rep as usize] = true;
            queue.push_back(rep);
            while let Some(v) = queue.pop_front() {
                for (ai, &a) in gens.iter().enumerate() {
                    let w = t.mul_gen(v, a);
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        tree[v as usize * k + ai] = true;
                        queue.push_back(w);
                    }
                    let w = t.mul_gen_inv(v, a);
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        tree[w as usize * k + ai] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        let mut next = vec![0u32; part.count()];
        let mut coord = vec![u32::MAX; n * k];
        for g in 0..n {
            let c = part.coset_of[g] as usize;
            for ai in 0..k {
                if !tree[g * k + ai] {
                    coord[g * k + ai] = next[c];
                    next[c] += 1;
                }
            }
        }
        SchreierForest { gens, coord }
    }

    /// Homology class of the closed walk `w` from `start`, as sparse
    /// coordinates.
    fn class(&self, cov: &CoveredComplex, start: u32, w: &Word) -> BTreeMap<u32, i64> {
        let t = &cov.table;
        let k = self.gens.len();
        let local = |a: usize| self.gens.iter().position(|&g| g == a).expect("page generator");
        let mut out = BTreeMap::new();
        let mut x = start;
        for l in w.letters() {
            let ai = local(l.gen);
            let (edge, delta, next) = if l.inv {
                let y = t.mul_gen_inv(x, l.gen);
                (y, -1, y)
            } else {
                (x, 1, t.mul_gen(x, l.gen))
            };
            let c = self.coord[edge as usize * k + ai];
            if c != u32::MAX {
                *out.entry(c).or_insert(0) += delta;
            }
            x = next;
        }
        out.retain(|_, v| *v != 0);
        out
    }
}

/// Boundary classes of page lift `s` as rows indexed by homology coordinate:
/// each row lists `(boundary lift, coefficient)`.
fn boundary_rows(cov: &CoveredComplex, forest: &SchreierForest, s: usize) -> BTreeMap<u32, Vec<(usize, i64)>> {
    let lift = &cov.surface_lifts[s];
    let layout = &cov.presentation.surfaces[lift.base_surface];
    let mut rows: BTreeMap<u32, Vec<(usize, i64)>> = BTreeMap::new();
    for (bi, b) in lift.boundary_lifts.iter().enumerate() {
        let walk = layout.boundary_words[b.base_boundary].repeat(b.boundary_degree as usize);
        for (c, v) in forest.class(cov, b.label, &walk) {
            rows.entry(c).or_default().push((bi, v));
        }
    }
    rows
}

fn satisfies(rows: &BTreeMap<u32, Vec<(usize, i64)>>, c: &[i8]) -> bool {
    rows.values()
        .all(|r| r.iter().map(|&(b, v)| c[b] as i64 * v).sum::<i64>() == 0)
}

/// Signs from pairwise constraints `±c_a ± c_b = 0`, if they determine a
/// vector in the kernel.
fn propagate_signs(rows: &BTreeMap<u32, Vec<(usize, i64)>>, count: usize) -> Option<Vec<i8>> {
    let mut adj: Vec<Vec<(usize, i8)>> = vec![Vec::new(); count];
    for r in rows.values() {
        if let [(a, va), (b, vb)] = r[..] {
            if va.abs() == vb.abs() {
                let f = if va.signum() == vb.signum() { -1 } else { 1 };
                adj[a].push((b, f));
                adj[b].push((a, f));
            }
        }
    }
    let mut c = vec![0i8; count];
    c[0] = 1;
    let mut queue = VecDeque::from([0usize]);
    while let Some(a) = queue.pop_front() {
        for &(b, f) in &adj[a] {
            let want = c[a] * f;
            if c[b] == 0 {
                c[b] = want;
                queue.push_back(b);
            } else if c[b] != want {
                return None;
            }
        }
    }
    (c.iter().all(|&x| x != 0) && satisfies(rows, &c)).then_some(c)
}

fn kernel_signs(rows: &BTreeMap<u32, Vec<(usize, i64)>>, count: usize) -> Result<Vec<i8>> {
    let mut m = IntMatrix::zeros(rows.len(), count);
    for (i, r) in rows.values().enumerate() {
        for &(b, v) in r {
            m[(i, b)] += v;
        }
    }
    let kernel = integer_kernel(&m);
    if kernel.len() != 1 {
        return Err(Error::Internal(format!(
            "boundary relation kernel has rank {}",
            kernel.len()
        )));
    }
    let mut c: Vec<i8> = kernel[0]
        .iter()
        .map(|x| match x.to_i64() {
            Some(1) => Ok(1),
            Some(-1) => Ok(-1),
            _ => Err(Error::Internal(
                "boundary relation has a coefficient other than ±1".into(),
            )),
        })
        .collect::<Result<_>>()?;
    if c[0] < 0 {
        c.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(c)
}

fn signs_with(cov: &CoveredComplex, forest: &SchreierForest, s: usize) -> Result<Vec<i8>> {
    let lift = &cov.surface_lifts[s];
    let count = lift.boundary_lifts.len();
    if count == 0 {
        return Ok(Vec::new());
    }
    let rows = boundary_rows(cov, forest, s);
    if lift.topology.orientable {
        match propagate_signs(&rows, count) {
            Some(c) => Ok(c),
            None => kernel_signs(&rows, count),
        }
    } else {
        let even = rows.values().all(|r| r.iter().map(|&(_, v)| v).sum::<i64>() % 2 == 0);
        if !even {
            return Err(Error::Internal(format!(
                "boundary classes of page lift {s} do not sum to an even class"
            )));
        }
        Ok(vec![1; count])
    }
}

/// Signs `c_k = ±1` of the boundary lifts of page lift `s` in its relation.
///
/// For an orientable lift, `c` spans the integer kernel of the boundary
/// classes in the first homology of the lift. For a non-orientable lift
/// every sign vector makes the signed sum even; all ones is returned after
/// that parity is checked.
pub fn boundary_relation_signs(cov: &CoveredComplex, s: usize) -> Result<Vec<i8>> {
    let forest = SchreierForest::new(cov, cov.surface_lifts[s].base_surface);
    signs_with(cov, &forest, s)
}

fn all_signs(cov: &CoveredComplex) -> Result<Vec<Vec<i8>>> {
    let mut out = Vec::with_capacity(cov.surface_lifts.len());
    for j in 0..cov.base.surfaces.len() {
        let forest = SchreierForest::new(cov, j);
        for s in cov.surface_lift_range(j) {
            out.push(signs_with(cov, &forest, s)?);
        }
    }
    Ok(out)
}

pub fn bound_inputs(cov: &CoveredComplex) -> BoundInputs {
    BoundInputs {
        global: cov.base.global_bounds(),
        max_lift_count: cov.circle_lift_counts().into_iter().max().unwrap_or(0) as u64,
    }
}

pub fn build(cov: &CoveredComplex, opts: &MatrixOptions) -> Result<PaperMatrix> {
    let signs = all_signs(cov)?;
    let circle_columns = cov.circle_lifts.len();
    let mut column_labels: Vec<ColumnLabel> = cov
        .circle_lifts
        .iter()
        .enumerate()
        .map(|(i, c)| ColumnLabel::Circle {
            circle_lift: i,
            base_circle: c.base_circle,
        })
        .collect();
    let mut crosscap_cols: Vec<Vec<usize>> = Vec::new();
    for (s, lift) in cov.surface_lifts.iter().enumerate() {
        let mut cols = Vec::new();
        if !lift.topology.orientable {
            if opts.compressed {
                cols.push(column_labels.len());
                column_labels.push(ColumnLabel::Parity { surface_lift: s });
            } else {
                for x in 0..lift.topology.genus as usize {
                    cols.push(column_labels.len());
                    column_labels.push(ColumnLabel::Crosscap {
                        surface_lift: s,
                        crosscap: x,
                    });
                }
            }
        }
        crosscap_cols.push(cols);
    }
    let mut matrix = IntMatrix::zeros(cov.surface_lifts.len(), column_labels.len());
    let mut row_labels = Vec::new();
    for (s, lift) in cov.surface_lifts.iter().enumerate() {
        for (b, &c) in lift.boundary_lifts.iter().zip(&signs[s]) {
            matrix[(s, b.circle_lift)] += c as i64 * b.elevation_degree;
        }
        for &col in &crosscap_cols[s] {
            matrix[(s, col)] = BigInt::from(2);
        }
        row_labels.push(RowLabel {
            surface_lift: s,
            base_surface: lift.base_surface,
            orientable: lift.topology.orientable,
        });
    }
    Ok(PaperMatrix {
        matrix,
        row_labels,
        column_labels,
        circle_columns,
        signs,
        bound_inputs: bound_inputs(cov),
        compressed: opts.compressed,
    })
}

/// First homology of a cover, from its boundary relation matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverHomology {
    #[serde(serialize_with = "crate::serde_big::uint_vec")]
    pub invariant_factors: Vec<BigUint>,
    #[serde(serialize_with = "crate::serde_big::uint")]
    pub torsion_order: BigUint,
    /// Free rank of the first homology of the cover.
    pub betti: usize,
    /// Free rank of the matrix cokernel alone.
    pub matrix_betti: usize,
    pub handle_rank: usize,
    pub graph_betti: usize,
    pub rank: usize,
    pub matrix_shape: (usize, usize),
}

pub fn homology_of(cov: &CoveredComplex, pm: &PaperMatrix) -> CoverHomology {
    let snf = smith_normal_form(&pm.matrix, false);
    let (rows, cols) = pm.matrix.shape();
    let handle_rank: usize = cov
        .surface_lifts
        .iter()
        .filter(|s| s.topology.orientable)
        .map(|s| 2 * s.topology.genus as usize)
        .sum();
    let folded: usize = if pm.compressed {
        cov.surface_lifts
            .iter()
            .filter(|s| !s.topology.orientable)
            .map(|s| s.topology.genus as usize - 1)
            .sum()
    } else {
        0
    };
    let matrix_betti = cols - snf.rank + folded;
    let graph_betti = cov.graph_betti();
    CoverHomology {
        invariant_factors: snf.invariant_factors(),
        torsion_order: snf.torsion_order(),
        betti: matrix_betti + handle_rank + graph_betti,
        matrix_betti,
        handle_rank,
        graph_betti,
        rank: snf.rank,
        matrix_shape: (rows, cols),
    }
}

pub fn homology(cov: &CoveredComplex, opts: &MatrixOptions) -> Result<CoverHomology> {
    Ok(homology_of(cov, &build(cov, opts)?))
}

/// `(2·val·d)^(d·m·max ℓ)`.
pub fn hadamard_bound(cov: &CoveredComplex) -> BigUint {
    let b = bound_inputs(cov);
    final_bound(&b)
}

fn final_bound(b: &BoundInputs) -> BigUint {
    let g = b.global;
    let base = BigUint::from(2 * g.val * g.d);
    let exp = g.d * g.m * b.max_lift_count;
    Pow::pow(base, exp)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColumnNorm {
    pub column: usize,
    #[serde(serialize_with = "crate::serde_big::uint")]
    pub l1: BigUint,
    #[serde(serialize_with = "crate::serde_big::uint")]
    pub l2_squared: BigUint,
    pub limit: u64,
    pub ok: bool,
}

/// `‖C‖₁ ≤ val·d` for every circle column.
pub fn column_norm_check(pm: &PaperMatrix) -> Vec<ColumnNorm> {
    let g = pm.bound_inputs.global;
    let limit = g.val * g.d;
    (0..pm.circle_columns)
        .map(|j| {
            let l1 = pm.matrix.column_norm_l1(j);
            ColumnNorm {
                column: j,
                ok: l1 <= BigUint::from(limit),
                l1,
                l2_squared: pm.matrix.column_norm_sq(j),
                limit,
            }
        })
        .collect()
}

/// The two-step bound chain
/// `torsion ≤ d·∏ max(‖C‖₂, 2) ≤ (2·val·d)^(d·m·max ℓ)`, compared exactly
/// through squares. The product runs over circle columns; the
/// `all_columns` variant also includes crosscap columns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundChain {
    #[serde(serialize_with = "crate::serde_big::uint")]
    pub torsion: BigUint,
    /// Square of the middle term over circle columns.
    #[serde(serialize_with = "crate::serde_big::uint")]
    pub middle_squared: BigUint,
    #[serde(serialize_with = "crate::serde_big::uint")]
    pub all_columns_middle_squared: BigUint,
    #[serde(serialize_with = "crate::serde_big::uint")]
    pub final_bound: BigUint,
    pub torsion_within_middle: bool,
    pub middle_within_final: bool,
    pub torsion_within_all_columns: bool,
    pub torsion_within_final: bool,
}

impl BoundChain {
    pub fn holds(&self) -> bool {
        self.torsion_within_middle && self.middle_within_final
    }
}

fn middle_squared(pm: &PaperMatrix, cols: std::ops::Range<usize>) -> BigUint {
    let d = pm.bound_inputs.global.d;
    let four = BigUint::from(4u32);
    cols.map(|j| pm.matrix.column_norm_sq(j).max(four.clone()))
        .fold(BigUint::from(d * d), |acc, x| acc * x)
}

pub fn bound_chain(pm: &PaperMatrix, torsion: &BigUint) -> BoundChain {
    let mid = middle_squared(pm, 0..pm.circle_columns);
    let all = middle_squared(pm, 0..pm.matrix.cols());
    let fin = final_bound(&pm.bound_inputs);
    let t2 = torsion * torsion;
    BoundChain {
        torsion: torsion.clone(),
        torsion_within_middle: t2 <= mid,
        middle_within_final: mid <= &fin * &fin,
        torsion_within_all_columns: t2 <= all,
        torsion_within_final: torsion <= &fin,
        middle_squared: mid,
        all_columns_middle_squared: all,
        final_bound: fin,
    }
}

/// Row count against `m·max ℓ·d`, and against `pages·max ℓ·d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RowCount {
    pub rows: u64,
    pub circle_bound: u64,
    pub page_bound: u64,
}

impl RowCount {
    pub fn within_circle_bound(&self) -> bool {
        self.rows <= self.circle_bound
    }

    pub fn within_page_bound(&self) -> bool {
        self.rows <= self.page_bound
    }
}

pub fn row_count(cov: &CoveredComplex, pm: &PaperMatrix) -> RowCount {
    let b = pm.bound_inputs;
    RowCount {
        rows: pm.matrix.rows() as u64,
        circle_bound: b.global.m * b.max_lift_count * b.global.d,
        page_bound: cov.base.surfaces.len() as u64 * b.max_lift_count * b.global.d,
    }
}

/// Splitting of the index into the number of lifts of the most-lifted circle
/// and their covering degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IndexDecomposition {
    pub circle: usize,
    pub lift_count: u64,
    pub circle_degree: u64,
}

impl IndexDecomposition {
    pub fn index(&self) -> u64 {
        self.lift_count * self.circle_degree
    }
}

pub fn index_decomposition(cov: &CoveredComplex) -> IndexDecomposition {
    let counts = cov.circle_lift_counts();
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    let lift_count = counts.get(best).copied().unwrap_or(1) as u64;
    IndexDecomposition {
        circle: best,
        lift_count,
        circle_degree: cov.total_degree / lift_count,
    }
}

/// `torsion^D ≤ (2·val·d)^(d·m·index)`: the per-level form of
/// `log(torsion)/index ≤ log(2·val·d)·d·m/D`.
pub fn ratio_within_bound(torsion: &BigUint, bounds: &GlobalBounds, idx: &IndexDecomposition) -> bool {
    let lhs = Pow::pow(torsion.clone(), idx.circle_degree);
    let rhs = Pow::pow(
        BigUint::from(2 * bounds.val * bounds.d),
        bounds.d * bounds.m * idx.index(),
    );
    lhs <= rhs
}

/// Everything the matrix method reports for one cover.
#[derive(Clone, Debug, Serialize)]
pub struct MatrixReport {
    pub shape: (usize, usize),
    pub row_labels: Vec<RowLabel>,
    pub column_labels: Vec<ColumnLabel>,
    pub entries: IntMatrix,
    pub homology: CoverHomology,
    pub bound_inputs: BoundInputs,
    pub column_norms: Vec<ColumnNorm>,
    pub bound_chain: BoundChain,
    pub row_count: RowCount,
    pub index_decomposition: IndexDecomposition,
}

pub fn report(cov: &CoveredComplex, opts: &MatrixOptions) -> Result<MatrixReport> {
    let pm = build(cov, opts)?;
    let homology = homology_of(cov, &pm);
    let chain = bound_chain(&pm, &homology.torsion_order);
    Ok(MatrixReport {
        shape: pm.matrix.shape(),
        column_norms: column_norm_check(&pm),
        row_count: row_count(cov, &pm),
        index_decomposition: index_decomposition(cov),
        bound_chain: chain,
        bound_inputs: pm.bound_inputs,
        homology,
        row_labels: pm.row_labels,
        column_labels: pm.column_labels,
        entries: pm.matrix,
    })
}

impl PaperMatrix {
    /// Negates the sign vector of one row.
    pub fn flip_row(&mut self, row: usize) {
        for j in 0..self.circle_columns {
            let v = -self.matrix[(row, j)].clone();
            self.matrix[(row, j)] = v;
        }
        self.signs[row].iter_mut().for_each(|c| *c = -*c);
    }

    pub fn crosscap_columns_ok(&self) -> bool {
        (self.circle_columns..self.matrix.cols()).all(|j| {
            let col = self.matrix.column(j);
            let nz: Vec<&BigInt> = col.iter().filter(|x| !x.is_zero()).collect();
            nz.len() == 1 && *nz[0] == BigInt::from(2)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::book::fixtures::*;
    use crate::book::{BookComplex, Edge, SurfaceType};
    use crate::cover::lift;
    use crate::presentation::present;
    use crate::quotient::{FiniteQuotient, QuotientSpec};
    use crate::Caps;

    fn cover(book: &BookComplex, points: usize, imgs: &[(&str, &str)]) -> CoveredComplex {
        let p = present(book).unwrap();
        let spec = QuotientSpec {
            points,
            images: imgs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        };
        let q = FiniteQuotient::from_spec(&p, &spec, &Caps::default()).unwrap();
        lift(book, &p, &q, &Caps::default()).unwrap()
    }

    fn entries(pm: &PaperMatrix) -> Vec<Vec<i64>> {
        pm.matrix
            .to_rows()
            .iter()
            .map(|r| r.iter().map(|x| x.to_i64().unwrap()).collect())
            .collect()
    }

    #[test]
    fn running_example_base() {
        let cov = cover(&running_example(), 1, &[]);
        let pm = build(&cov, &MatrixOptions::default()).unwrap();
        assert_eq!(entries(&pm), vec![vec![2]]);
        let h = homology_of(&cov, &pm);
        assert_eq!(h.torsion_order, BigUint::from(2u32));
        assert_eq!(h.betti, 2);
        assert_eq!(hadamard_bound(&cov), BigUint::from(16u32));
        let norms = column_norm_check(&pm);
        assert_eq!(norms[0].l1, BigUint::from(2u32));
        assert_eq!(norms[0].limit, 2);
        assert_eq!(
            index_decomposition(&cov),
            IndexDecomposition {
                circle: 0,
                lift_count: 1,
                circle_degree: 1
            }
        );
    }

    #[test]
    fn running_example_double_cover() {
        let cov = cover(&running_example(), 2, &[("t0", "(1 2)")]);
        let pm = build(&cov, &MatrixOptions::default()).unwrap();
        assert_eq!(entries(&pm), vec![vec![1], vec![1]]);
        let h = homology_of(&cov, &pm);
        assert!(h.invariant_factors.is_empty());
        assert_eq!(h.betti, 4);
        assert_eq!(hadamard_bound(&cov), BigUint::from(16u32));
        let norms = column_norm_check(&pm);
        assert_eq!(norms[0].l1, BigUint::from(2u32));
        assert!(norms[0].ok);
        assert_eq!(
            index_decomposition(&cov),
            IndexDecomposition {
                circle: 0,
                lift_count: 1,
                circle_degree: 2
            }
        );
    }

    #[test]
    fn mobius_example_base() {
        let cov = cover(&mobius_example(), 1, &[]);
        let pm = build(&cov, &MatrixOptions::default()).unwrap();
        assert_eq!(entries(&pm), vec![vec![4, 2]]);
        assert!(pm.crosscap_columns_ok());
        let h = homology_of(&cov, &pm);
        assert_eq!(h.invariant_factors, vec![BigUint::from(2u32)]);
        assert_eq!(h.betti, 2);
        assert_eq!(hadamard_bound(&cov), BigUint::from(1728u32));
        assert_eq!(column_norm_check(&pm)[0].l1, BigUint::from(4u32));
        assert_eq!(column_norm_check(&pm)[0].limit, 6);
    }

    #[test]
    fn pants_signs() {
        let cov = cover(&pants_example(), 1, &[]);
        let s = boundary_relation_signs(&cov, 0).unwrap();
        assert_eq!(s, vec![1, 1, 1]);
    }

    #[test]
    fn orientation_double_cover_signs_alternate() {
        let book = BookComplex {
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
                    degree: 1,
                },
            ],
        };
        let cov = cover(&book, 2, &[("x0_1", "(1 2)")]);
        assert!(cov.surface_lifts[0].topology.orientable);
        assert_eq!(cov.surface_lifts[0].boundary_lifts.len(), 4);
        let s = boundary_relation_signs(&cov, 0).unwrap();
        let flipped: Vec<i8> = s.iter().map(|x| -x).collect();
        let expected = vec![1, -1, 1, -1];
        assert!(s == expected || flipped == expected, "{s:?}");
    }

    #[test]
    fn compressed_matrix_has_same_homology() {
        let book = BookComplex {
            circle_count: 1,
            surfaces: vec![SurfaceType::nonorientable(3, 1)],
            edges: vec![Edge {
                surface: 0,
                boundary_index: 0,
                circle: 0,
                degree: 2,
            }],
        };
        let cov = cover(&book, 1, &[]);
        let full = homology(&cov, &MatrixOptions::default()).unwrap();
        let small = homology(&cov, &MatrixOptions { compressed: true }).unwrap();
        assert_eq!(full.torsion_order, small.torsion_order);
        assert_eq!(full.betti, small.betti);
        assert_eq!(full.matrix_shape, (1, 4));
        assert_eq!(small.matrix_shape, (1, 2));
    }

    #[test]
    fn two_mobius_pages_on_one_circle() {
        let book = BookComplex {
            circle_count: 1,
            surfaces: vec![SurfaceType::nonorientable(1, 2); 2],
            edges: (0..2)
                .flat_map(|s| {
                    (0..2).map(move |k| Edge {
                        surface: s,
                        boundary_index: k,
                        circle: 0,
                        degree: 1,
                    })
                })
                .collect(),
        };
        let cov = cover(&book, 1, &[]);
        let pm = build(&cov, &MatrixOptions::default()).unwrap();
        assert_eq!(entries(&pm), vec![vec![2, 2, 0], vec![2, 0, 2]]);
        let h = homology_of(&cov, &pm);
        assert_eq!(h.torsion_order, BigUint::from(4u32));
        let chain = bound_chain(&pm, &h.torsion_order);
        // 4 exceeds 1·‖(2,2)‖₂ = 2√2 while the outer bound (2·4·1)^1 holds
        assert!(!chain.torsion_within_middle);
        assert!(chain.torsion_within_final);
        assert!(chain.torsion_within_all_columns);
        let rc = row_count(&cov, &pm);
        assert!(!rc.within_circle_bound());
        assert!(rc.within_page_bound());
    }

    #[test]
    fn ratio_check() {
        let idx = IndexDecomposition {
            circle: 0,
            lift_count: 1,
            circle_degree: 2,
        };
        let b = GlobalBounds { val: 1, d: 2, m: 1 };
        assert!(ratio_within_bound(&BigUint::from(16u32), &b, &idx));
        assert!(!ratio_within_bound(&BigUint::from(17u32), &b, &idx));
    }

    #[test]
    fn row_sign_flip_keeps_torsion() {
        let cov = cover(&pants_example(), 1, &[]);
        let mut pm = build(&cov, &MatrixOptions::default()).unwrap();
        let t = homology_of(&cov, &pm).torsion_order;
        pm.flip_row(0);
        assert_eq!(homology_of(&cov, &pm).torsion_order, t);
    }
}
