//! Cube-of-resolutions spectral sequences over GF(2).
//!
//! A braid word on `2m` strands describes a composition of Dehn twists.
//! Resolving every twist in both possible ways gives a hypercube of closed
//! crossingless diagrams; the Frobenius algebra `GF(2)[X]/(X^2)` turns it
//! into a chain complex filtered by cube weight, and the spectral sequence of
//! that filtration bounds the rank of its limit from above. For plat
//! closures the first two pages are the Khovanov cube and Khovanov homology
//! over GF(2) of the closed-up link.
//!
//! The modules follow the pipeline:
//!
//! * [`tangle`]: braid words, plat closures, flat tangle composition
//! * [`cube`]: twists, resolutions, circle counts, merge/split edges
//! * [`tqft`]: vertex spaces, edge maps, the assembled complex
//! * [`f2linalg`]: bit-packed GF(2) matrices and subspaces
//! * [`specseq`]: filtered complexes, pages, rank bounds
//! * [`invariants`]: Goeritz determinant and auxiliary-strand doubling
//! * [`cli`]: the command-line front end and its JSON report
//!
//! ```
//! use twistcube::{tangle, e2_total};
//!
//! let trefoil = tangle::parse_braid_word("s2 s2 s2", 4).unwrap();
//! let plat = tangle::PlatClosure::standard(4).unwrap();
//! assert_eq!(e2_total(&trefoil, &plat, false).unwrap(), 6);
//! ```

pub mod cli;
pub mod cube;
pub mod f2linalg;
pub mod invariants;
pub mod specseq;
pub mod tangle;
pub mod tqft;

use thiserror::Error;

use crate::cube::CubeError;
use crate::specseq::{SpecSeqError, SpectralPages};
use crate::tangle::{BraidWord, PlatClosure, TangleError};
use crate::tqft::TqftError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Tangle(#[from] TangleError),
    #[error(transparent)]
    Cube(#[from] CubeError),
    #[error(transparent)]
    Tqft(#[from] TqftError),
    #[error(transparent)]
    SpecSeq(#[from] SpecSeqError),
    #[error("{0}")]
    Input(String),
}

impl Error {
    /// True for failures that point at a bug rather than at bad input.
    pub fn is_internal(&self) -> bool {
        match self {
            Error::Cube(CubeError::Internal(_)) => true,
            Error::Tqft(TqftError::FaceNotCommuting { .. }) => true,
            Error::Tqft(TqftError::Cube(CubeError::Internal(_))) => true,
            Error::SpecSeq(SpecSeqError::Internal(_) | SpecSeqError::DSquared(_)) => true,
            Error::Tqft(TqftError::Complex(SpecSeqError::Internal(_))) => true,
            _ => false,
        }
    }
}

/// Cube, complex, and pages for a braid word, with no higher maps.
pub fn pages_for_word(
    word: &BraidWord,
    plat: &PlatClosure,
    aux_unknot: bool,
    r_max: Option<usize>,
) -> Result<SpectralPages, Error> {
    let cube = cube::cube_for_word(word, plat, aux_unknot)?;
    let complex = tqft::assemble_complex(&cube)?;
    Ok(specseq::compute_pages(complex.filtered(), r_max)?)
}

/// Total dimension of the `E_2` page.
pub fn e2_total(word: &BraidWord, plat: &PlatClosure, aux_unknot: bool) -> Result<usize, Error> {
    let pages = pages_for_word(word, plat, aux_unknot, Some(2))?;
    pages
        .page(2)
        .map(|p| p.total())
        .ok_or_else(|| Error::Input("E_2 page not computed".into()))
}
