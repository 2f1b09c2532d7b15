//! Lower bounds on `p*`: the pentagon argument and SDP dual certificates.
//!
//! Any algorithm induces a coloring of `DB_distinct(n)` whose expected
//! monochromatic fraction equals `p(f)`, so a lower bound on the min-uncut
//! fraction of `DB_distinct(n)` bounds `p*` from below. The SDP pipeline is
//! [`build_sdp`] → [`solve_primal_dual`] → [`round_and_extract`] →
//! [`verify_certificate`]; only the last step is trusted.

pub mod cert;
pub mod ldl;
pub mod orbit;
pub mod sdp;

pub use cert::{
    pentagon_bound, pentagon_certificate, read_certificate, round_and_extract, sdp_lower_bound, verify_certificate, DiagEntry,
    Rejection, SdpCertificate, TriangleEntry, Verified,
};
pub use orbit::{orbit_classes, Arity, OrbitClass, PairAlgebra, SdpGraph, TriangleOrbit, TrianglePattern, TrianglePolicy};
pub use sdp::{build_graph_sdp, build_sdp, solve_primal_dual, solve_with, DualCandidate, SdpInstance, SolveReport, SolverOptions};
