//! Numerical tolerances shared by every module.
//!
//! Grouped in one record so a caller can tighten or relax them in one
//! place. The defaults are the values the test suites are pinned to.

/// Tolerance record. `Tolerances::DEFAULT` is used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Norms, Hermiticity, unit vectors, identity checks on exact algebra.
    pub structural: f64,
    /// Results of iterative spectral work (eigensolvers, unitarity of exponentials).
    pub spectral: f64,
    /// Agreement between two analytic routes to the same quantity.
    pub route_agreement: f64,
    /// Analytic model moments against oracle moments.
    pub analytic_match: f64,
    /// Slack allowed when a solver target sits on a correlation bound.
    pub bound_slack: f64,
    /// Residual of the correlation root solve.
    pub root_residual: f64,
    /// Bisection stopping width on the cap separation angle.
    pub bisection_width: f64,
    /// Hard cap on bisection steps.
    pub bisection_max_iter: u32,
    /// Requested absolute accuracy of the cap-overlap quadrature.
    pub quadrature: f64,
    /// Arguments of `acos` this close outside [-1, 1] are clamped; further out is an error.
    pub acos_clamp: f64,
    /// Phase convention threshold: first component above this magnitude is made real.
    pub phase_pivot: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        structural: 1e-12,
        spectral: 1e-10,
        route_agreement: 1e-9,
        analytic_match: 1e-8,
        bound_slack: 1e-9,
        root_residual: 1e-10,
        bisection_width: 1e-12,
        bisection_max_iter: 200,
        quadrature: 1e-13,
        acos_clamp: 1e-12,
        phase_pivot: 1e-9,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Shorthand for the default record.
pub const TOL: Tolerances = Tolerances::DEFAULT;
