use std::f64::consts::FRAC_PI_4;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::input::{parse_hamiltonian, parse_observable, parse_state};
use super::{
    Command, ContextualityArgs, Demo, EvolveArgs, Format, McArgs, SweepArgs, SweepParam,
    VerifyArgs,
};
use crate::contextuality::{peres_square_with, product_rule_violation, Disagreement};
use crate::dynamics::{evolve, frame_timeline, uniform_times, Timeline};
use crate::error::{Error, Result};
use crate::frame::CanonicalFrame;
use crate::linalg::{UnitVec3, Vec3};
use crate::minimal::{locality_probe, LocalityReport};
use crate::report::{fmt17, to_json_pretty, Cell, Envelope, Table};
use crate::states::{random_axis_with, LocalObservable, TwoQubitState};
use crate::tolerances::TOL;
use crate::verify::{verify, McEstimate, ModelKind, VerificationReport, VerifyOptions};

/// Caps the worker pool used for Monte Carlo.
pub const THREADS_ENV: &str = "HV2Q_THREADS";

/// A finished command: the report text plus the verdict.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub text: String,
    pub out: Option<PathBuf>,
    pub pass: bool,
    /// One line for stderr.
    pub summary: String,
}

pub(super) fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidInput(format!("{THREADS_ENV}='{raw}' is not a positive integer")))?;
    // a second call in the same process (tests) finds the pool already built;
    // results do not depend on the thread count, so that is harmless
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub(super) fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Verify(a) => cmd_verify(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Evolve(a) => cmd_evolve(a),
        Command::Contextuality(a) => cmd_contextuality(a),
    }
}

fn verify_options(mc: &McArgs, default_samples: u64, sigma: f64) -> Result<VerifyOptions> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidInput(format!("--sigma must be positive (got {sigma})")));
    }
    if mc.chunk == 0 {
        return Err(Error::InvalidInput("--chunk must be positive".into()));
    }
    Ok(VerifyOptions {
        samples: mc.samples.unwrap_or(default_samples),
        seed: mc.seed,
        chunk: mc.chunk,
        sigma_threshold: sigma,
        ..VerifyOptions::default()
    })
}

fn sign_label(i: usize) -> &'static str {
    ["+", "-"][i]
}

#[derive(Debug, Serialize)]
struct VerifyOutput {
    state: TwoQubitState,
    obs_x: LocalObservable,
    obs_y: LocalObservable,
    verification: VerificationReport,
    locality: LocalityReport,
}

/// Y plus `extra` seeded random axes with Y's offset and gap.
fn probe_partners(y: &LocalObservable, extra: usize, seed: u64) -> Vec<LocalObservable> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ys = vec![*y];
    ys.extend((0..extra).map(|_| y.with_axis(random_axis_with(&mut rng))));
    ys
}

fn estimate_cells(e: Option<&McEstimate>) -> [Cell; 4] {
    match e {
        Some(e) => [e.mean.into(), e.stderr.into(), e.z.into(), e.pass.into()],
        None => [Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty],
    }
}

fn verify_csv(r: &VerificationReport, sigma: f64) -> Table {
    let mut t = Table::new(&["quantity", "oracle", "analytic", "mc_mean", "mc_stderr", "z", "pass"]);
    let mc = r.mc.as_ref();
    let rows = [
        ("x", r.oracle.direct.x, r.analytic.x, mc.map(|m| &m.x)),
        ("y", r.oracle.direct.y, r.analytic.y, mc.map(|m| &m.y)),
        ("xy", r.oracle.direct.xy, r.analytic.xy, mc.map(|m| &m.xy)),
        ("x_single", r.oracle.direct.x, r.analytic.x, mc.map(|m| &m.x_single)),
    ];
    for (name, oracle, analytic, est) in rows {
        let mut row = vec![name.into(), oracle.into(), analytic.into()];
        row.extend(estimate_cells(est));
        t.push(row);
    }
    for i in 0..2 {
        for j in 0..2 {
            let p = r.model_table.0[i][j];
            let mut row = vec![
                Cell::Text(format!("p{}{}", sign_label(i), sign_label(j))),
                r.born_table.0[i][j].into(),
                p.into(),
            ];
            match mc {
                Some(m) => {
                    let n = m.samples as f64;
                    let se = (p.clamp(0.0, 1.0) * (1.0 - p.clamp(0.0, 1.0)) / n).sqrt();
                    let freq = m.table.0[i][j];
                    let z = (freq - p).abs() / se.max(1e-12);
                    row.extend([freq.into(), se.into(), z.into(), (z <= sigma).into()]);
                }
                None => row.extend([Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty]),
            }
            t.push(row);
        }
    }
    t
}

fn cmd_verify(a: &VerifyArgs) -> Result<Outcome> {
    let psi = parse_state(&a.state)?;
    let x = parse_observable(&a.obs_x)?;
    let y = parse_observable(&a.obs_y)?;
    let mut opts = verify_options(&a.mc, 100_000, a.sigma)?;
    opts.timing = a.timing;
    let model: ModelKind = a.model.into();
    let report = verify(&psi, &x, &y, model, &opts)?;
    let frame = CanonicalFrame::new(&psi)?;
    let locality = locality_probe(&frame, &x, &probe_partners(&y, a.probe_partners, opts.seed))?;
    let pass = report.pass;
    let summary = format!(
        "verify {model}: {} (analytic discrepancy {:.3e}, table discrepancy {:.3e}{}, locality defect {:.3e})",
        if pass { "PASS" } else { "FAIL" },
        report.analytic_discrepancy,
        report.table_discrepancy,
        report
            .mc
            .as_ref()
            .map(|m| format!(", mc max z {:.2}", [m.x.z, m.y.z, m.xy.z, m.x_single.z, m.table_max_z].into_iter().fold(0.0, f64::max)))
            .unwrap_or_default(),
        locality.sup_defect,
    );
    let text = match a.output.format {
        Format::Json => to_json_pretty(&Envelope::new(
            "verify",
            pass,
            VerifyOutput {
                state: psi,
                obs_x: x,
                obs_y: y,
                verification: report,
                locality,
            },
        ))?,
        Format::Csv => verify_csv(&report, a.sigma).to_csv()?,
    };
    Ok(Outcome {
        text,
        out: a.output.out.clone(),
        pass,
        summary,
    })
}

/// Evenly spaced grid with both endpoints; one point means `from` alone.
pub(super) fn grid(from: f64, to: f64, points: usize) -> Result<Vec<f64>> {
    if points == 0 {
        return Err(Error::InvalidInput("empty range: --points must be at least 1".into()));
    }
    if !from.is_finite() || !to.is_finite() {
        return Err(Error::InvalidInput("range endpoints must be finite".into()));
    }
    if points == 1 {
        return Ok(vec![from]);
    }
    let last = (points - 1) as f64;
    Ok((0..points).map(|i| from + (to - from) * i as f64 / last).collect())
}

/// Unit vector at angle θ from b, in the plane spanned by b and X's axis.
fn axis_at_angle(b: &UnitVec3, toward: &UnitVec3, theta: f64) -> UnitVec3 {
    b.rotate_toward(&toward.get(), theta)
}

#[derive(Debug, Serialize)]
struct SweepRow {
    param: &'static str,
    value: f64,
    mu1: f64,
    report: VerificationReport,
    defect: f64,
    sup_defect_all_b: f64,
}

fn sweep_table(rows: &[SweepRow]) -> Table {
    let mut t = Table::new(&[
        "param",
        "value",
        "mu1",
        "oracle_x",
        "oracle_y",
        "oracle_xy",
        "analytic_x",
        "analytic_y",
        "analytic_xy",
        "mc_x",
        "mc_x_stderr",
        "mc_y",
        "mc_y_stderr",
        "mc_xy",
        "mc_xy_stderr",
        "analytic_discrepancy",
        "defect",
        "sup_defect_all_b",
        "pass",
    ]);
    for r in rows {
        let v = &r.report;
        let mc = v.mc.as_ref();
        let pick = |f: fn(&crate::verify::McSummary) -> &McEstimate| -> [Cell; 2] {
            mc.map_or([Cell::Empty, Cell::Empty], |m| [f(m).mean.into(), f(m).stderr.into()])
        };
        let mut row: Vec<Cell> = vec![
            r.param.into(),
            r.value.into(),
            r.mu1.into(),
            v.oracle.direct.x.into(),
            v.oracle.direct.y.into(),
            v.oracle.direct.xy.into(),
            v.analytic.x.into(),
            v.analytic.y.into(),
            v.analytic.xy.into(),
        ];
        row.extend(pick(|m| &m.x));
        row.extend(pick(|m| &m.y));
        row.extend(pick(|m| &m.xy));
        row.extend([
            v.analytic_discrepancy.into(),
            r.defect.into(),
            r.sup_defect_all_b.into(),
            v.pass.into(),
        ]);
        t.push(row);
    }
    t
}

fn cmd_sweep(a: &SweepArgs) -> Result<Outcome> {
    let values = grid(a.from, a.to, a.points)?;
    let x = parse_observable(&a.obs_x)?;
    let y = parse_observable(&a.obs_y)?;
    let opts = verify_options(&a.mc, 100_000, a.sigma)?;
    let model: ModelKind = a.model.into();
    let base = match a.param {
        SweepParam::Phi => None,
        _ => Some(parse_state(&a.state)?),
    };
    let h = match (a.param, &a.hamiltonian) {
        (SweepParam::T, Some(h)) => Some(parse_hamiltonian(h)?),
        (SweepParam::T, None) => {
            return Err(Error::InvalidInput("a t sweep needs --hamiltonian".into()))
        }
        _ => None,
    };
    let name = match a.param {
        SweepParam::Theta => "theta",
        SweepParam::Phi => "phi",
        SweepParam::T => "t",
    };
    let mut rows = Vec::with_capacity(values.len());
    for (i, &v) in values.iter().enumerate() {
        let (psi, xv) = match a.param {
            SweepParam::Theta => {
                let b = y.axis();
                (base.expect("state parsed"), x.with_axis(axis_at_angle(&b, &x.axis(), v)))
            }
            SweepParam::Phi => {
                if !(-TOL.structural..=FRAC_PI_4 + TOL.structural).contains(&v) {
                    return Err(Error::InvalidInput(format!("phi = {v} outside [0, pi/4]")));
                }
                let mu1 = (1.0 + (2.0 * v.clamp(0.0, FRAC_PI_4)).sin()) / 2.0;
                (TwoQubitState::schmidt_form(mu1)?, x)
            }
            SweepParam::T => {
                let psi0 = base.expect("state parsed");
                (evolve(&psi0, h.as_ref().expect("hamiltonian parsed"), v)?, x)
            }
        };
        let point_opts = VerifyOptions {
            seed: opts.seed.wrapping_add(i as u64),
            ..opts
        };
        let report = verify(&psi, &xv, &y, model, &point_opts)?;
        let frame = CanonicalFrame::new(&psi)?;
        let loc = locality_probe(&frame, &xv, &[y])?;
        rows.push(SweepRow {
            param: name,
            value: v,
            mu1: frame.schmidt.mu1,
            report,
            defect: loc.sup_defect,
            sup_defect_all_b: loc.sup_defect_all_b,
        });
    }
    let failures = rows.iter().filter(|r| !r.report.pass).count();
    let pass = failures == 0;
    let summary = format!(
        "sweep {name} ({model}, {} points): {} ({failures} failing)",
        rows.len(),
        if pass { "PASS" } else { "FAIL" }
    );
    let text = match a.format {
        Format::Csv => sweep_table(&rows).to_csv()?,
        Format::Json => to_json_pretty(&Envelope::new("sweep", pass, &rows))?,
    };
    Ok(Outcome {
        text,
        out: a.out.clone(),
        pass,
        summary,
    })
}

fn timeline_table(tl: &Timeline) -> Table {
    let mut t = Table::new(&[
        "t",
        "mu1",
        "phi",
        "xi",
        "chi",
        "response_angle",
        "analytic_discrepancy",
        "table_discrepancy",
        "pass",
        "error",
    ]);
    for r in &tl.records {
        t.push(vec![
            r.t.into(),
            r.mu1.into(),
            r.frame.as_ref().map(|f| f.phi).into(),
            r.xi.into(),
            r.chi.into(),
            r.response_angle.into(),
            r.analytic_discrepancy.into(),
            r.table_discrepancy.into(),
            r.pass.into(),
            r.error.as_deref().map_or(Cell::Empty, Cell::from),
        ]);
    }
    t
}

fn cmd_evolve(a: &EvolveArgs) -> Result<Outcome> {
    if !(a.t_max.is_finite() && a.t_max >= 0.0) {
        return Err(Error::InvalidInput(format!("--t-max must be finite and nonnegative (got {})", a.t_max)));
    }
    let psi = parse_state(&a.state)?;
    let h = parse_hamiltonian(&a.hamiltonian)?;
    let x = parse_observable(&a.obs_x)?;
    let y = parse_observable(&a.obs_y)?;
    let opts = verify_options(&a.mc, 0, a.sigma)?;
    let model: ModelKind = a.model.into();
    let tl = frame_timeline(&psi, &h, &uniform_times(a.t_max, a.steps), &x, &y, model, &opts)?;
    let pass = tl.all_pass;
    let summary = format!(
        "evolve {model} ({} records): {} ({} failing)",
        tl.records.len(),
        if pass { "PASS" } else { "FAIL" },
        tl.failures.len()
    );
    let text = match a.output.format {
        Format::Json => to_json_pretty(&Envelope::new("evolve", pass, &tl))?,
        Format::Csv => timeline_table(&tl).to_csv()?,
    };
    Ok(Outcome {
        text,
        out: a.output.out.clone(),
        pass,
        summary,
    })
}

fn disagreement_row(name: &str, d: &Disagreement) -> Vec<Cell> {
    vec![
        name.into(),
        d.angle.into(),
        d.angle_over_pi.into(),
        d.analytic.into(),
        d.mc.into(),
        d.mc_stderr.into(),
        d.pass.into(),
    ]
}

fn cmd_contextuality(a: &ContextualityArgs) -> Result<Outcome> {
    let psi = parse_state(&a.state)?;
    let seed = a.mc.seed;
    match a.demo {
        Demo::Peres => {
            let samples = a.mc.samples.unwrap_or(1000);
            let r = peres_square_with(&psi, samples, seed)?;
            let row_product: i8 = r.row_signs.iter().product();
            let col_product: i8 = r.column_signs.iter().product();
            let pass = r.product_residual <= TOL.structural
                && r.consistent_assignments == 0
                && row_product != col_product;
            let summary = format!(
                "contextuality peres: {} (rows {:?}, columns {:?}, {} consistent assignments, model breaks an identity on {} of draws)",
                if pass { "PASS" } else { "FAIL" },
                r.row_signs,
                r.column_signs,
                r.consistent_assignments,
                fmt17(r.any_violation),
            );
            let text = match a.output.format {
                Format::Json => to_json_pretty(&Envelope::new("contextuality", pass, &r))?,
                Format::Csv => {
                    let mut t = Table::new(&["line", "index", "sign", "model_violation"]);
                    for (line, signs, viol) in [
                        ("row", r.row_signs, r.row_violation),
                        ("column", r.column_signs, r.column_violation),
                    ] {
                        for k in 0..3 {
                            t.push(vec![
                                line.into(),
                                Cell::Int(k as i64),
                                Cell::Int(i64::from(signs[k])),
                                viol[k].into(),
                            ]);
                        }
                    }
                    t.to_csv()?
                }
            };
            Ok(Outcome {
                text,
                out: a.output.out.clone(),
                pass,
                summary,
            })
        }
        Demo::ProductRule => {
            let x = parse_observable(&a.obs_x)?;
            let y = match &a.obs_y {
                Some(s) => parse_observable(s)?,
                None => {
                    let (s, c) = (std::f64::consts::FRAC_PI_3).sin_cos();
                    LocalObservable::spin(UnitVec3::normalize(Vec3::new(s, 0.0, c))?)
                }
            };
            let samples = a.mc.samples.unwrap_or(100_000);
            let r = product_rule_violation(&psi, &x, &y, samples, seed)?;
            let pass = r.rotated_axis.pass && r.lab_axis.pass;
            let summary = format!(
                "contextuality product-rule: {} (disagreement {} vs angle/pi {})",
                if pass { "PASS" } else { "FAIL" },
                fmt17(r.rotated_axis.mc),
                fmt17(r.rotated_axis.angle_over_pi),
            );
            let text = match a.output.format {
                Format::Json => to_json_pretty(&Envelope::new("contextuality", pass, &r))?,
                Format::Csv => {
                    let mut t = Table::new(&[
                        "single_axis",
                        "angle",
                        "angle_over_pi",
                        "analytic",
                        "mc",
                        "mc_stderr",
                        "pass",
                    ]);
                    t.push(disagreement_row("rotated", &r.rotated_axis));
                    t.push(disagreement_row("lab", &r.lab_axis));
                    t.to_csv()?
                }
            };
            Ok(Outcome {
                text,
                out: a.output.out.clone(),
                pass,
                summary,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_and_empty() {
        assert_eq!(grid(0.0, 1.0, 3).unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(grid(2.0, 5.0, 1).unwrap(), vec![2.0]);
        assert!(matches!(grid(0.0, 1.0, 0), Err(Error::InvalidInput(_))));
        assert!(grid(0.0, f64::NAN, 2).is_err());
    }

    #[test]
    fn theta_axis_has_requested_angle() {
        let b = UnitVec3::Z;
        for theta in [0.0, 0.3, 1.5, 3.0] {
            let a = axis_at_angle(&b, &UnitVec3::Z, theta);
            assert!((a.dot(&b) - theta.cos()).abs() < 1e-14);
        }
    }
}
