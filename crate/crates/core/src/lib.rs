//! Torsion in the first integral homology of finite regular covers of books
//! of I-bundles.
//!
//! A book is modelled by its 2-dimensional spine: binding circles, page
//! surfaces with boundary, and signed-degree attachments of every page
//! boundary to a circle. A regular cover is given by a homomorphism of the
//! fundamental group onto a finite permutation group. The crate lifts the
//! graph-of-spaces decomposition to the cover, assembles the boundary
//! relation matrix of the surface lifts, and reads torsion off its Smith
//! normal form. An independent Reidemeister–Schreier computation serves as
//! ground truth.
//!
//! ```
//! use booktorsion::{book::BookComplex, presentation::present, quotient::FiniteQuotient};
//! use booktorsion::{cover::lift, paper_matrix, Caps};
//!
//! let book: BookComplex = serde_json::from_str(
//!     r#"{"circles": 1,
//!         "surfaces": [{"orientable": true, "genus": 1, "boundary": 1}],
//!         "edges": [{"surface": 0, "boundary_index": 0, "circle": 0, "degree": 2}]}"#,
//! ).unwrap();
//! let p = present(&book).unwrap();
//! let q = FiniteQuotient::trivial(&p);
//! let cov = lift(&book, &p, &q, &Caps::default()).unwrap();
//! let h = paper_matrix::homology(&cov, &Default::default()).unwrap();
//! assert_eq!(h.torsion_order.to_string(), "2");
//! assert_eq!(h.betti, 2);
//! ```

pub mod book;
pub mod cover;
mod error;
pub mod homology;
pub mod metabelian;
pub mod paper_matrix;
pub mod perm;
pub mod presentation;
pub mod quotient;
pub mod report;
pub mod rs_oracle;
mod serde_big;
pub mod tower;

pub use error::{Error, Result};

/// Size limits for desk-scale computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Largest permitted order of a quotient group.
    pub max_order: u64,
    /// Largest permitted number of permuted points.
    pub max_degree: usize,
    /// Largest matrix dimension accepted by the gcd-of-minors reference.
    pub max_minors: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_order: 1_000_000,
            max_degree: 4096,
            max_minors: 8,
        }
    }
}
