//! Rational (co)homology of a simplicial core with boundary: `H¹`, `H¹_c`,
//! the rank of `H¹_c → H¹`, and the number of ends.

mod cohomology;
mod complex;
pub mod generators;
mod io;
pub mod rational;

pub use cohomology::{betti, cohomology_report, ends_count, rank_i, relative_h1, CohomologyReport};
pub use complex::{closure, facets, Simplex, SimplicialComplex, MAX_DIM};
pub use io::{parse_complex, read_complex, write_complex};

use crate::error::{Error, Result};

/// Built-in complexes addressable by name from manifests.
pub fn builtin(name: &str) -> Result<SimplicialComplex> {
    Ok(match name {
        "annulus" => generators::annulus(6, 2),
        "ball" => generators::ball(2),
        "sphere_shell" | "s2_x_interval" => generators::sphere_shell(2),
        "torus_shell" | "t2_x_interval" => generators::torus_shell(3, 2),
        other => {
            return Err(Error::Argument(format!(
                "unknown builtin complex {other:?} (known: annulus, ball, sphere_shell, torus_shell)"
            )))
        }
    })
}
