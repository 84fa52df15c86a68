//! eigloc — guaranteed eigenvalue localization and stability certification
//! for real matrices with interval uncertainty.
//!
//! Everything here is built on one idea: disc (Gershgorin-type) bounds are
//! cheap, rigorous, and improvable. The crate provides
//!
//! * [`bounds`] — scalar bounds `σ_min ≤ Re λ ≤ σ_max` in four variants
//!   (plain, diagonally scaled, exponent-blended, and both), for constant
//!   and interval matrices, plus a deterministic optimizer over the
//!   scaling parameters;
//! * [`region`] — the localization sets themselves (discs and stadiums),
//!   with exact real-axis extent, certified imaginary extent, oscillation
//!   estimates, and SVG rendering;
//! * [`stability`] — certificates for linear time-varying interval
//!   systems (direct disc dominance or the symmetrized route) with
//!   explicit decay envelopes;
//! * [`synthesis`] — state-feedback gain synthesis via elementwise-linear
//!   feasibility programs solved by a built-in simplex;
//! * [`sim`] — a fixed-step RK4 integrator for validating envelopes and
//!   closed loops on actual trajectories;
//! * [`oracle`] — a self-contained dense eigenvalue solver (balancing,
//!   Hessenberg reduction, shifted QR) used only as an independent
//!   cross-check and benchmark baseline, plus a deterministic PRNG and
//!   interval-model samplers.
//!
//! The oracle is deliberately quarantined: no bound, region, certificate,
//! or gain depends on it; it exists to *test* the guaranteed results, and
//! the guarantees never depend on the tests.

// The dense kernels iterate several same-length buffers by index on
// purpose; iterator-zip rewrites obscure the subscript math they mirror.
#![allow(clippy::needless_range_loop)]

pub mod bounds;
pub mod matrix;
pub mod oracle;
pub mod region;
pub mod sim;
pub mod stability;
pub mod synthesis;

pub use bounds::{
    gershgorin_bounds, interval_bounds, optimize_scaling, optimize_scaling_with, ostrowski_bounds,
    BoundTarget, BoundVariant, BoundsReport, OptimizeObjective, OptimizerBudget,
};
pub use matrix::{IntervalMatrix, MatrixError, RealMatrix, Scaling};
pub use oracle::{
    eigenvalues, eigenvalues_fast, enclosure_check, sample_interval, EnclosureReport, OracleError,
    Rng, SampleLaw, Spectrum,
};
pub use region::{
    build_families, build_interval_families, render_svg, CanvasSpec, DiscFamily, FamilyLabel,
    Region, RegionError, RegionMode, Stadium,
};
pub use sim::{check_envelope, integrate, EnvelopeReport, SimError, Signal, Trajectory};
pub use stability::{
    certify, decay_envelope, demidovich_sigma, network_closed_loop, Certificate, CertifyStrategy,
    DecayEnvelope, LtvSystem, StabilityError, Verdict,
};
pub use synthesis::{
    build_constant_program, build_per_entry_program, build_vertex_program, closed_loop,
    extract_gain, solve_feasibility, synthesize, synthesize_with, verify_synthesis, ProgramMode,
    SlackRecord,
    SolveOutcome, SynthesisError, SynthesisOptions, SynthesisProblem, SynthesisResult,
    VerificationReport,
};
