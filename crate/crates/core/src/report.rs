//! Serializable reports shared by the command-line front end and tests.

use std::fmt::Write as _;

use serde::Serialize;

use crate::book::{BookComplex, ValidationReport};
use crate::cover::lift;
use crate::homology::HomologyResult;
use crate::paper_matrix::{self, CoverHomology, IndexDecomposition, MatrixOptions};
use crate::presentation::GroupPresentation;
use crate::quotient::FiniteQuotient;
use crate::rs_oracle;
use crate::tower::GrowthRow;
use crate::{Caps, Result};

#[derive(Clone, Debug, Serialize)]
pub struct ValidationOutput {
    pub valid: bool,
    pub violations: Vec<String>,
}

impl From<&ValidationReport> for ValidationOutput {
    fn from(r: &ValidationReport) -> Self {
        ValidationOutput {
            valid: r.is_valid(),
            violations: r.violations.iter().map(|v| v.to_string()).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PresentationOutput {
    pub generators: Vec<String>,
    pub relators: Vec<String>,
    pub stable_letters: usize,
}

impl From<&GroupPresentation> for PresentationOutput {
    fn from(p: &GroupPresentation) -> Self {
        PresentationOutput {
            generators: p.generators.clone(),
            relators: p.relators.iter().map(|r| p.format_word(r)).collect(),
            stable_letters: p.stable_letter_count(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct H1Report {
    pub group_order: u64,
    #[serde(flatten)]
    pub homology: CoverHomology,
    pub index_decomposition: IndexDecomposition,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_result: Option<HomologyResult>,
}

impl H1Report {
    /// False only when the oracle ran and disagreed.
    pub fn oracle_agrees(&self) -> bool {
        self.oracle != Some("disagree")
    }
}

pub fn h1_report(
    book: &BookComplex,
    p: &GroupPresentation,
    q: &FiniteQuotient,
    opts: &MatrixOptions,
    oracle: bool,
    caps: &Caps,
) -> Result<H1Report> {
    let cov = lift(book, p, q, caps)?;
    let homology = paper_matrix::homology(&cov, opts)?;
    let (verdict, oracle_result) = if oracle {
        let r = rs_oracle::cover_homology(p, q, caps)?;
        let agree = r.torsion_order == homology.torsion_order
            && r.invariant_factors == homology.invariant_factors
            && r.betti == homology.betti;
        (Some(if agree { "agree" } else { "disagree" }), Some(r))
    } else {
        (None, None)
    };
    Ok(H1Report {
        group_order: cov.total_degree,
        index_decomposition: paper_matrix::index_decomposition(&cov),
        homology,
        oracle: verdict,
        oracle_result,
    })
}

fn factors(f: &[num_bigint::BigUint]) -> String {
    if f.is_empty() {
        "-".into()
    } else {
        f.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
    }
}

pub fn h1_table(r: &H1Report) -> String {
    let h = &r.homology;
    let mut s = String::new();
    let _ = writeln!(s, "group order        {}", r.group_order);
    let _ = writeln!(s, "invariant factors  {}", factors(&h.invariant_factors));
    let _ = writeln!(s, "torsion order      {}", h.torsion_order);
    let _ = writeln!(s, "betti              {}", h.betti);
    let _ = writeln!(s, "matrix shape       {}x{}", h.matrix_shape.0, h.matrix_shape.1);
    let _ = writeln!(
        s,
        "lifts x degree     {} x {}",
        r.index_decomposition.lift_count, r.index_decomposition.circle_degree
    );
    if let Some(v) = r.oracle {
        let _ = writeln!(s, "oracle             {v}");
    }
    s
}

pub fn growth_table(rows: &[GrowthRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>5} {:>8} {:>6} {:>6} {:>20} {:>6} {:>12} {:>12} {:>6}",
        "level", "index", "lifts", "D", "torsion", "betti", "ratio", "bound_ratio", "ok"
    );
    for r in rows {
        let ok = r.within_hadamard && r.ratio_within_bound && r.oracle.as_ref().is_none_or(|o| o.agree);
        let _ = writeln!(
            s,
            "{:>5} {:>8} {:>6} {:>6} {:>20} {:>6} {:>12.6} {:>12.6} {:>6}",
            r.level, r.index, r.lift_count, r.circle_degree, r.torsion_order, r.betti, r.ratio, r.hadamard_ratio, ok
        );
    }
    s
}

pub fn growth_csv(rows: &[GrowthRow]) -> String {
    let mut s = String::from("level,index,lift_count,circle_degree,torsion_order,betti,ratio,hadamard_ratio,within_hadamard,ratio_within_bound\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            r.level,
            r.index,
            r.lift_count,
            r.circle_degree,
            r.torsion_order,
            r.betti,
            r.ratio,
            r.hadamard_ratio,
            r.within_hadamard,
            r.ratio_within_bound
        );
    }
    s
}
