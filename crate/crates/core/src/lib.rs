//! Guessing closed-form summation formulas for polynomial sequences whose
//! coefficients factor through triangular sequences (Stirling, Eulerian,
//! binomial and custom two-term recurrences).
//!
//! ```
//! use seqguess::{guess_polynomial_sequence, render::formula_text, PolySeq, SearchOptions};
//!
//! let seq = PolySeq::parse(
//!     &["n", "-n + n^2", "2*n - 3*n^2 + n^3", "-6*n + 11*n^2 - 6*n^3 + n^4",
//!       "24*n - 50*n^2 + 35*n^3 - 10*n^4 + n^5",
//!       "-120*n + 274*n^2 - 225*n^3 + 85*n^4 - 15*n^5 + n^6"],
//!     "n",
//!     1,
//! )
//! .unwrap();
//! let opts = SearchOptions::with_builtins(&["S1"]).unwrap();
//! let outcome = guess_polynomial_sequence(&seq, &opts).unwrap();
//! assert_eq!(formula_text(&outcome.formulas[0]), "Sum[i=0..j] S1[j, i] * (-1)^(j - i) * n^i");
//! ```

pub mod factorizer;
pub mod numbers;
pub mod polyseq;
pub mod recognizer;
pub mod render;
pub mod search;
pub mod triangles;

pub use factorizer::{factor_over_triangles, FactorDecomposition};
pub use numbers::Rational;
pub use polyseq::{GuessExpr, Normalization, Poly, PolySeq};
pub use recognizer::{recognize_sequence, ClosedForm, IndexPoly};
pub use search::{
    guess_polynomial_sequence, verify_formula, Formula, SearchOptions, SearchOutcome,
};
pub use triangles::{build_triangle, BuiltinTriangle, TriangleSpec, TriangleTable};
