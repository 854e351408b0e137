//! Secular polynomials, singular strata and spectra of metric trees.
//!
//! A metric tree with edge lengths `l` has spectrum `{k > 0 : P_G(exp(ikl)) = 0}`
//! where `P_G` is the determinant of the edge scattering matrix. This crate
//! computes `P_G` exactly over the integers, enumerates the strata of its
//! singular locus and their torus cohomology classes, and solves for
//! eigenvalues numerically along the path `k -> exp(ikl)`.
//!
//! ```
//! use treesec::{families, secular_polynomial};
//!
//! let p = secular_polynomial(&families::path(2)).unwrap();
//! assert_eq!(p.to_string(), "1 z1^2 z2^2 - 1");
//! ```

pub mod cohomology;
pub mod error;
pub mod graph;
pub mod lattice;
pub mod linalg;
pub mod poly;
pub mod secular;
pub mod spectrum;
pub mod strata;

pub use cohomology::{
    closure_class, discreteness_obstruction, intersection_number, parse_class, stratum_class,
    zero_locus_class, ExteriorClass, ObstructionReport, Pairing, Verdict,
};
pub use error::{Error, Result};
pub use graph::format::{parse_graph, write_graph};
pub use graph::{
    boundary_and_type, build_graph, components_after_deletion, enumerate_type_m, families,
    Condition, Edge, EdgeId, OpenSubgraph, TreeGraph, VertexId,
};
pub use lattice::{parse_relations, write_relations, RelationLattice};
pub use poly::{parse_poly, MultiPoly};
pub use secular::{
    eigenspace, eval_vertex, kernel_residual, project_coefficients, scattering_matrix,
    secular_polynomial, support_of_point, CoeffVector, Eigenspace, PolyMatrix, Support, TorusPoint,
    TAU_RANK, TAU_RESIDUAL, TAU_TORUS,
};
pub use spectrum::{
    compute_spectrum, genericity_trial, mingap_estimate, parse_spectrum_machine, sample_lengths,
    write_spectrum_human, write_spectrum_machine, Eigenvalue, GenericityReport, SpectrumOptions,
    SpectrumReport,
};
pub use strata::{
    build_stratum, component_graph, parse_strata_report, phase_aligned_error,
    predicted_multiplicity, reconstruct_eigenvector, reconstruction_error, sample_secular,
    sample_stratum, singular_components, special_vertex, verify_multiplicity, write_strata_report,
    MultiplicityCheck, Stratum,
};
