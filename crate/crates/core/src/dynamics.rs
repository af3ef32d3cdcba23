//! Time evolution ψ_t = e^{−iHt} ψ₀ and the model rebuilt along the trajectory.
//!
//! The hidden variable keeps its uniform distribution at every t; only the
//! state, and through it the frame and the response parameters, move. The
//! frame is rebuilt from scratch at each time.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{schmidt_decompose, FrameSummary};
use crate::linalg::{unitary_exp, CMat4, C64};
use crate::states::{LocalObservable, TwoQubitState};
use crate::tolerances::TOL;
use crate::verify::{verify, ModelKind, ModelSummary, VerifyOptions};

/// A 4×4 Hermitian generator. JSON: `[[[re, im] ×4] ×4]`, row-major in the
/// |00⟩, |01⟩, |10⟩, |11⟩ basis; `{"matrix": ...}` around it is also read.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHamiltonian", into = "RawHamiltonian")]
pub struct Hamiltonian(CMat4);

type RawMatrix = [[[f64; 2]; 4]; 4];

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
enum RawHamiltonian {
    Bare(RawMatrix),
    Wrapped { matrix: RawMatrix },
}

impl TryFrom<RawHamiltonian> for Hamiltonian {
    type Error = Error;
    fn try_from(r: RawHamiltonian) -> Result<Self> {
        let (RawHamiltonian::Bare(m) | RawHamiltonian::Wrapped { matrix: m }) = r;
        Hamiltonian::new(CMat4::from_rows(m.map(|row| row.map(|[re, im]| C64::new(re, im)))))
    }
}

impl From<Hamiltonian> for RawHamiltonian {
    fn from(h: Hamiltonian) -> Self {
        RawHamiltonian::Bare(h.0 .0.map(|row| row.map(|c| [c.re, c.im])))
    }
}

impl Hamiltonian {
    /// Rejects matrices that are not Hermitian within the structural tolerance.
    pub fn new(m: CMat4) -> Result<Self> {
        if m.0.iter().flatten().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidInput("hamiltonian entries must be finite".into()));
        }
        m.ensure_hermitian()?;
        Ok(Hamiltonian(m))
    }

    pub fn zero() -> Self {
        Hamiltonian(CMat4::zeros())
    }

    pub fn matrix(&self) -> &CMat4 {
        &self.0
    }
}

/// ψ_t = e^{−iHt} ψ₀, renormalized.
pub fn evolve(psi0: &TwoQubitState, h: &Hamiltonian, t: f64) -> Result<TwoQubitState> {
    let v = unitary_exp(&h.0, t)?;
    let ket = v.apply(psi0.ket());
    let drift = (ket.norm() - 1.0).abs();
    if drift > TOL.structural * 100.0 {
        return Err(Error::Numerical(format!("norm drift {drift} under evolution")));
    }
    TwoQubitState::from_ket(ket)
}

/// One time point of a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimelineRecord {
    pub t: f64,
    pub state: TwoQubitState,
    pub mu1: f64,
    pub frame: Option<FrameSummary>,
    pub xi: Option<f64>,
    pub chi: Option<f64>,
    /// γ* for the sphere models, θ̂ for the circle model.
    pub response_angle: Option<f64>,
    pub analytic_discrepancy: Option<f64>,
    pub table_discrepancy: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timeline {
    pub model: ModelKind,
    pub records: Vec<TimelineRecord>,
    pub all_pass: bool,
    /// Times of the records that failed.
    pub failures: Vec<f64>,
}

/// Evolves ψ₀ to each time and verifies the chosen model there.
pub fn frame_timeline(
    psi0: &TwoQubitState,
    h: &Hamiltonian,
    times: &[f64],
    x: &LocalObservable,
    y: &LocalObservable,
    model: ModelKind,
    opts: &VerifyOptions,
) -> Result<Timeline> {
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("times must be finite and nondecreasing".into()));
    }
    let states = times
        .iter()
        .map(|&t| evolve(psi0, h, t))
        .collect::<Result<Vec<_>>>()?;
    let records: Vec<TimelineRecord> = times
        .par_iter()
        .zip(states.par_iter())
        .map(|(&t, psi)| {
            let mu1 = schmidt_decompose(psi).mu1;
            match verify(psi, x, y, model, opts) {
                Ok(r) => {
                    let (xi, chi, angle) = match r.params {
                        ModelSummary::Bell { theta_hat, .. } => {
                            let h = std::f64::consts::FRAC_PI_2;
                            (h, h, theta_hat)
                        }
                        ModelSummary::General(p) => (p.xi, p.chi, p.gamma),
                        ModelSummary::Minimal(p) => (p.xi, p.chi, p.theta_hat),
                    };
                    TimelineRecord {
                        t,
                        state: *psi,
                        mu1,
                        frame: Some(r.frame),
                        xi: Some(xi),
                        chi: Some(chi),
                        response_angle: Some(angle),
                        analytic_discrepancy: Some(r.analytic_discrepancy),
                        table_discrepancy: Some(r.table_discrepancy),
                        pass: r.pass,
                        error: None,
                    }
                }
                Err(e) => TimelineRecord {
                    t,
                    state: *psi,
                    mu1,
                    frame: None,
                    xi: None,
                    chi: None,
                    response_angle: None,
                    analytic_discrepancy: None,
                    table_discrepancy: None,
                    pass: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let failures: Vec<f64> = records.iter().filter(|r| !r.pass).map(|r| r.t).collect();
    Ok(Timeline {
        model,
        all_pass: failures.is_empty(),
        failures,
        records,
    })
}

/// `steps + 1` evenly spaced times on [0, t_max].
pub fn uniform_times(t_max: f64, steps: usize) -> Vec<f64> {
    if steps == 0 {
        return vec![0.0];
    }
    (0..=steps).map(|k| t_max * k as f64 / steps as f64).collect()
}

/// Random Hermitian 4×4 with Gaussian entries (GUE-like), for tests and demos.
pub fn random_hamiltonian_with<R: rand::Rng + ?Sized>(rng: &mut R) -> Hamiltonian {
    use rand_distr::StandardNormal;
    let mut m = CMat4::zeros();
    for i in 0..4 {
        m.0[i][i] = C64::new(rng.sample(StandardNormal), 0.0);
        for j in (i + 1)..4 {
            let c = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            m.0[i][j] = c;
            m.0[j][i] = c.conj();
        }
    }
    Hamiltonian(m)
}
