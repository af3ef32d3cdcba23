//! End-to-end checks of a model against the quantum oracle.
//!
//! A report compares three things for one (ψ, X, Y): the oracle moments, the
//! model's analytic moments and outcome table (cap or arc measures), and a
//! seeded Monte Carlo estimate of the same quantities.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bell::{bell_assign_joint, bell_assign_single, bell_theta_hat};
use crate::error::{Error, Result};
use crate::frame::{CanonicalFrame, FrameSummary};
use crate::general::{assign_values, cap_fraction, cap_intersection, solve_ahat, ModelParams};
use crate::hidden::{sample_circle, sample_sphere, sign_index, McPlan, SignCounts, DEFAULT_CHUNK};
use crate::linalg::UnitVec3;
use crate::minimal::{circle_table, minimal_signs, minimal_theta_hat, MinimalParams};
use crate::oracle::{joint_probabilities, qm_averages_with, JointTable, Moments, QmAverages};
use crate::states::{singlet, LocalObservable, TwoQubitState};

/// Which hidden-variable model to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Bell,
    General,
    Minimal,
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bell" => Ok(ModelKind::Bell),
            "general" => Ok(ModelKind::General),
            "minimal" => Ok(ModelKind::Minimal),
            other => Err(Error::InvalidInput(format!("unknown model '{other}'"))),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Bell => "bell",
            ModelKind::General => "general",
            ModelKind::Minimal => "minimal",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Monte Carlo draws; 0 skips the Monte Carlo part.
    pub samples: u64,
    pub seed: u64,
    pub chunk: u64,
    /// MC estimates pass within this many standard errors.
    pub sigma_threshold: f64,
    /// Analytic moments and tables pass within this absolute difference.
    pub analytic_tolerance: f64,
    /// Record wall-clock time (makes reports non-reproducible byte for byte).
    pub timing: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            samples: 100_000,
            seed: 0,
            chunk: DEFAULT_CHUNK,
            sigma_threshold: 4.0,
            analytic_tolerance: 1e-8,
            timing: false,
        }
    }
}

/// Smallest Monte Carlo run accepted by the verifiers.
pub const MIN_SAMPLES: u64 = 10_000;

/// Model-specific parameters carried in a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelSummary {
    Bell { theta_hat: f64, a_hat: UnitVec3 },
    General(ModelParams),
    Minimal(MinimalParams),
}

/// ⟨F⟩, ⟨G⟩, ⟨FG⟩ of the ±1 response functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignMoments {
    pub f: f64,
    pub g: f64,
    pub fg: f64,
}

impl SignMoments {
    /// Moments of X = α₁ + α₂F and Y = β₁ + β₂G.
    pub fn lift(&self, x: &LocalObservable, y: &LocalObservable) -> Moments {
        let (a1, a2, b1, b2) = (x.alpha1(), x.alpha2(), y.alpha1(), y.alpha2());
        Moments {
            x: a1 + a2 * self.f,
            y: b1 + b2 * self.g,
            xy: a1 * b1 + a1 * b2 * self.g + a2 * b1 * self.f + a2 * b2 * self.fg,
        }
    }
}

/// A Monte Carlo mean against its analytic value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub expected: f64,
    /// |mean − expected| / stderr (stderr floored at 1e-12).
    pub z: f64,
    pub pass: bool,
}

impl McEstimate {
    fn new(values: &[(f64, u64)], n: u64, expected: f64, k: f64) -> Self {
        let nf = n as f64;
        let mean = values.iter().map(|&(v, c)| v * c as f64).sum::<f64>() / nf;
        let second = values.iter().map(|&(v, c)| v * v * c as f64).sum::<f64>() / nf;
        let var = (second - mean * mean).max(0.0);
        let stderr = (var / nf).sqrt();
        let z = (mean - expected).abs() / stderr.max(1e-12);
        McEstimate {
            mean,
            stderr,
            expected,
            z,
            pass: z <= k,
        }
    }
}

/// Monte Carlo counts for one run: joint signs plus the X sign when X is
/// measured alone.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct McCounts {
    pub joint: SignCounts,
    pub single: [u64; 2],
}

impl McCounts {
    fn merge(mut self, o: McCounts) -> McCounts {
        self.joint = self.joint.merge(o.joint);
        self.single[0] += o.single[0];
        self.single[1] += o.single[1];
        self
    }
}

/// Runs `draw` for every sample; `draw` returns (F joint, G joint, F single).
pub fn mc_counts<D>(plan: &McPlan, draw: D) -> McCounts
where
    D: Fn(&mut ChaCha8Rng) -> (i8, i8, i8) + Sync,
{
    plan.run(
        |rng, n| {
            let mut c = McCounts::default();
            for _ in 0..n {
                let (f, g, fs) = draw(rng);
                c.joint.record(f, g);
                c.single[sign_index(fs)] += 1;
            }
            c
        },
        McCounts::merge,
    )
    .unwrap_or_default()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McSummary {
    pub samples: u64,
    pub seed: u64,
    pub chunk: u64,
    pub x: McEstimate,
    pub y: McEstimate,
    pub xy: McEstimate,
    /// X when measured without a partner; its distribution must equal the joint marginal.
    pub x_single: McEstimate,
    pub table: JointTable,
    /// Largest cell deviation from the model table in binomial standard errors.
    pub table_max_z: f64,
    pub pass: bool,
}

impl McSummary {
    fn from_counts(
        c: &McCounts,
        plan: &McPlan,
        x: &LocalObservable,
        y: &LocalObservable,
        analytic: &Moments,
        model_table: &JointTable,
        k: f64,
    ) -> Self {
        let n = plan.samples;
        let cnt = c.joint.0;
        let signs = [1i8, -1];
        let xs: Vec<(f64, u64)> = (0..2).map(|i| (x.value(signs[i]), cnt[i][0] + cnt[i][1])).collect();
        let ys: Vec<(f64, u64)> = (0..2).map(|j| (y.value(signs[j]), cnt[0][j] + cnt[1][j])).collect();
        let mut xys = Vec::with_capacity(4);
        let mut table = [[0.0; 2]; 2];
        let mut table_max_z: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                xys.push((x.value(signs[i]) * y.value(signs[j]), cnt[i][j]));
                let freq = cnt[i][j] as f64 / n as f64;
                table[i][j] = freq;
                let p = model_table.0[i][j].clamp(0.0, 1.0);
                let se = (p * (1.0 - p) / n as f64).sqrt().max(1e-12);
                table_max_z = table_max_z.max((freq - p).abs() / se);
            }
        }
        let singles: Vec<(f64, u64)> = (0..2).map(|i| (x.value(signs[i]), c.single[i])).collect();
        let est_x = McEstimate::new(&xs, n, analytic.x, k);
        let est_y = McEstimate::new(&ys, n, analytic.y, k);
        let est_xy = McEstimate::new(&xys, n, analytic.xy, k);
        let est_single = McEstimate::new(&singles, n, analytic.x, k);
        let pass = est_x.pass && est_y.pass && est_xy.pass && est_single.pass && table_max_z <= k;
        McSummary {
            samples: n,
            seed: plan.seed,
            chunk: plan.chunk,
            x: est_x,
            y: est_y,
            xy: est_xy,
            x_single: est_single,
            table: JointTable(table),
            table_max_z,
            pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub model: ModelKind,
    pub frame: FrameSummary,
    pub params: ModelSummary,
    pub oracle: QmAverages,
    pub sign_moments: SignMoments,
    pub analytic: Moments,
    /// max |analytic − oracle| over the three moments.
    pub analytic_discrepancy: f64,
    pub born_table: JointTable,
    pub model_table: JointTable,
    pub table_discrepancy: f64,
    pub analytic_pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc: Option<McSummary>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

/// Table of (F, G) from the measures of cap F (fraction `a`), cap G (fraction `b`)
/// and their overlap `i`; recall G = −1 on cap G.
fn table_from_measures(a: f64, b: f64, i: f64) -> JointTable {
    JointTable([[a - i, i], [1.0 - a - b + i, b - i]])
}

struct ModelRun {
    params: ModelSummary,
    signs: SignMoments,
    table: JointTable,
}

fn check_samples(opts: &VerifyOptions) -> Result<()> {
    if opts.samples != 0 && opts.samples < MIN_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "at least {MIN_SAMPLES} samples are needed for a Monte Carlo check (got {})",
            opts.samples
        )));
    }
    Ok(())
}

/// |⟨singlet|ψ⟩| = 1 within rounding.
pub fn is_singlet(psi: &TwoQubitState) -> bool {
    singlet().ket().inner(psi.ket()).norm() >= 1.0 - 1e-10
}

/// Verifies one model on (ψ, X, Y).
pub fn verify(
    psi: &TwoQubitState,
    x: &LocalObservable,
    y: &LocalObservable,
    model: ModelKind,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    check_samples(opts)?;
    let start = Instant::now();
    let frame = CanonicalFrame::new(psi)?;
    let oracle = qm_averages_with(psi, &frame, x, y)?;
    let plan = McPlan::new(opts.samples, opts.seed).with_chunk(opts.chunk);
    let run_mc = opts.samples > 0;

    let (run, counts) = match model {
        ModelKind::Bell => {
            if !is_singlet(psi) {
                return Err(Error::InvalidInput(
                    "the bell model is defined only for the singlet state".into(),
                ));
            }
            let (a, b) = (x.axis(), y.axis());
            let (theta_hat, a_hat) = bell_theta_hat(&a, &b);
            let i = cap_intersection(theta_hat, PI / 2.0, PI / 2.0)?;
            let run = ModelRun {
                params: ModelSummary::Bell { theta_hat, a_hat },
                signs: SignMoments {
                    f: 0.0,
                    g: 0.0,
                    fg: 2.0 * theta_hat / PI - 1.0,
                },
                table: table_from_measures(0.5, 0.5, i),
            };
            let counts = run_mc.then(|| {
                mc_counts(&plan, |rng| {
                    let l = sample_sphere(rng);
                    let (f, g) = bell_assign_joint(&a, &b, &l);
                    (f, g, bell_assign_single(&a, &b, &l).0)
                })
            });
            (run, counts)
        }
        ModelKind::General => {
            let p = solve_ahat(&frame, x, y)?;
            let (f, g, fg) = p.sign_moments()?;
            let i = cap_intersection(p.gamma, p.xi, p.chi)?;
            let run = ModelRun {
                params: ModelSummary::General(p),
                signs: SignMoments { f, g, fg },
                table: table_from_measures(cap_fraction(p.xi), cap_fraction(p.chi), i),
            };
            let counts = run_mc.then(|| {
                mc_counts(&plan, |rng| {
                    let l = sample_sphere(rng);
                    let (_, _, f, g) = assign_values(&p, x, y, &l);
                    let fs = if p.a_prime.get().dot(&l.vec()) >= p.cos_xi { 1 } else { -1 };
                    (f, g, fs)
                })
            });
            (run, counts)
        }
        ModelKind::Minimal => {
            let p = minimal_theta_hat(&frame, x, y)?;
            let (f, g, fg) = p.sign_moments();
            let run = ModelRun {
                params: ModelSummary::Minimal(p),
                signs: SignMoments { f, g, fg },
                table: JointTable(circle_table(p.xi, p.chi, p.theta_hat)),
            };
            // alone, X's arc can sit anywhere; put it at b's position
            let single = MinimalParams { theta_hat: 0.0, ..p };
            let counts = run_mc.then(|| {
                mc_counts(&plan, |rng| {
                    let l = sample_circle(rng);
                    let (f, g) = minimal_signs(&p, &l);
                    (f, g, minimal_signs(&single, &l).0)
                })
            });
            (run, counts)
        }
    };

    let analytic = run.signs.lift(x, y);
    let analytic_discrepancy = analytic.max_abs_diff(&oracle.direct);
    let born_table = joint_probabilities(psi, x, y)?;
    let table_discrepancy = run.table.max_abs_diff(&born_table);
    let tol = opts.analytic_tolerance;
    let analytic_pass = analytic_discrepancy <= tol && table_discrepancy <= tol;
    let mc = counts.map(|c| {
        McSummary::from_counts(&c, &plan, x, y, &analytic, &run.table, opts.sigma_threshold)
    });
    let pass = analytic_pass && mc.as_ref().is_none_or(|m| m.pass);
    Ok(VerificationReport {
        model,
        frame: frame.summary(),
        params: run.params,
        oracle,
        sign_moments: run.signs,
        analytic,
        analytic_discrepancy,
        born_table,
        model_table: run.table,
        table_discrepancy,
        analytic_pass,
        mc,
        pass,
        timing_ms: opts.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    })
}

/// The sphere model with default thresholds.
pub fn verify_general(
    psi: &TwoQubitState,
    x: &LocalObservable,
    y: &LocalObservable,
    n_samples: u64,
    seed: u64,
) -> Result<VerificationReport> {
    let opts = VerifyOptions {
        samples: n_samples,
        seed,
        ..VerifyOptions::default()
    };
    verify(psi, x, y, ModelKind::General, &opts)
}
