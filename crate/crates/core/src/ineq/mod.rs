//! Both sides of the Fourier-restriction inequalities for fractal measures,
//! and a plateau test that turns their ratio over a grid of `L` into a
//! verdict.
//!
//! A finite grid cannot take a liminf or limsup. The last half of the grid
//! stands in for the limit: its median is reported, and the verdict looks at
//! the spread and the log-log trend there.

mod checks;
mod hudson;
mod report;

pub use checks::{
    check_strichartz_upper, check_theorem_b, check_theorem_c_density, check_theorem_d,
    CheckOptions, DensityFn, Weighting,
};
pub use hudson::{
    besicovitch_norm, check_hudson_coherent, check_hudson_discrete, nonincreasing_rearrangement,
    rearrangement_dominance, Dominance, ExponentialSum, HudsonOptions, PowerEnvelope,
};
pub use report::{
    classify, InequalityReport, Orientation, Plateau, PlateauGate, TheoremId, Verdict,
};
