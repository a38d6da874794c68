//! One function per subcommand. Each returns its series, the x-axis name and
//! human-readable notes for stderr.

use rayon::prelude::*;

use super::mccheck::mc_cases;
use super::params::{grid, req, Params, SchemeKind, Vary};
use super::report::{fmt_f64, Series};
use super::CliError;
use crate::analysis::{
    critical_sigma2_classical, critical_sigma2_discrimination, forbidden_interval_classical,
    forbidden_interval_discrimination, forbidden_rectangle, sweep_success, ClassicalScenario, DiscriminationScenario,
    EAScenario, Scheme, NO_INTERIOR_MAXIMUM,
};
use crate::error::Result;
use crate::private::{bob_information, conjecture_probe, eve_ensemble, holevo_chi, PrivateScenario};
use crate::qubit::{average_fidelity, choi_state, critical_sigma2_quantum, log_negativity, QuantumCommParams};

pub(crate) struct Output {
    pub x_name: &'static str,
    pub series: Vec<Series>,
    pub notes: Vec<String>,
}

fn theta_name(prefix: &str, theta: f64) -> String {
    format!("{prefix}={}", fmt_f64(theta))
}

fn points(xs: &[f64], ys: &[f64]) -> Vec<[f64; 2]> {
    xs.iter().zip(ys).map(|(&x, &y)| [x, y]).collect()
}

/// Evaluates `f` on every x in parallel, keeping order.
fn eval<T, F>(xs: &[f64], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync,
{
    xs.par_iter().map(|&x| f(x)).collect()
}

fn sigma_grid(p: &Params) -> std::result::Result<Vec<f64>, CliError> {
    let xs = grid(req(&p.start, "start")?, req(&p.stop, "stop")?, req(&p.step, "step")?)?;
    if xs[0] < 0.0 {
        return Err(CliError::Config("noise grid must start at sigma >= 0".into()));
    }
    Ok(xs)
}

fn classical(p: &Params) -> std::result::Result<ClassicalScenario, CliError> {
    Ok(ClassicalScenario::new(
        req(&p.eta, "eta")?,
        req(&p.alpha, "alpha")?,
        req(&p.r, "r")?,
        req(&p.prior, "prior")?,
        req(&p.site, "site")?.into(),
    )?)
}

fn ea(p: &Params, theta_q: f64, theta_p: f64) -> std::result::Result<EAScenario, CliError> {
    let alpha = req(&p.alpha, "alpha")?;
    let prior = req(&p.prior, "prior")?;
    let s = EAScenario {
        eta: req(&p.eta, "eta")?,
        r: req(&p.r, "r")?,
        prior_q: prior,
        prior_p: p.prior_p.unwrap_or(prior),
        alpha_q: alpha,
        alpha_p: p.alpha_p.unwrap_or(alpha),
        theta_q,
        theta_p,
        noise_site: req(&p.site, "site")?.into(),
    };
    s.validate()?;
    Ok(s)
}

fn describe_critical(v: Result<f64>) -> String {
    match v {
        Ok(v) if v == NO_INTERIOR_MAXIMUM => "no interior maximum".into(),
        Ok(v) if v > 0.0 => format!("sigma*^2 = {} (sigma* = {})", fmt_f64(v), fmt_f64(v.sqrt())),
        Ok(v) => format!("no resonance (sigma*^2 = {})", fmt_f64(v)),
        Err(e) if !e.is_numeric() => "no critical point".into(),
        Err(e) => format!("critical noise failed: {e}"),
    }
}

pub(crate) fn sweep(p: &Params) -> std::result::Result<Output, CliError> {
    let xs = sigma_grid(p)?;
    let thetas = req(&p.theta, "theta")?;
    let mut series = Vec::new();
    let mut notes = Vec::new();
    for &theta in &thetas {
        let (scheme, name, critical) = match req(&p.scheme, "scheme")? {
            SchemeKind::Classical => {
                let scenario = classical(p)?;
                let critical = describe_critical(critical_sigma2_classical(&scenario, theta));
                (Scheme::Classical { scenario, theta }, theta_name("theta", theta), critical)
            }
            SchemeKind::Ea => {
                let scenario = ea(p, theta, p.theta_p.unwrap_or(theta))?;
                let scheme = Scheme::EntanglementAssisted {
                    scenario,
                    sigma_p: p.sigma_p,
                };
                (scheme, theta_name("theta_q", theta), String::new())
            }
        };
        let curve = sweep_success(&scheme, &xs)?;
        let (am, pm) = curve.argmax();
        let mut note = format!(
            "{name}: nonmonotonic = {}, grid max P_s = {} at sigma = {}",
            curve.nonmonotonic,
            fmt_f64(pm),
            fmt_f64(am)
        );
        if !critical.is_empty() {
            note.push_str(", ");
            note.push_str(&critical);
        }
        notes.push(note);
        series.push(Series {
            name,
            points: curve.points.iter().map(|&(x, y)| [x, y]).collect(),
        });
    }
    Ok(Output {
        x_name: "sigma",
        series,
        notes,
    })
}

/// x values and the variable name for interval-type commands.
fn vary_axis(p: &Params) -> std::result::Result<(Vary, &'static str, Vec<f64>), CliError> {
    match req(&p.vary, "vary")? {
        Vary::None => Ok((Vary::None, "r", vec![req(&p.r, "r")?])),
        Vary::R => Ok((Vary::R, "r", sigma_grid(p)?)),
        Vary::Alpha => Ok((Vary::Alpha, "alpha", sigma_grid(p)?)),
    }
}

fn at_axis(p: &Params, vary: Vary, x: f64) -> Params {
    let mut q = p.clone();
    match vary {
        Vary::None => {}
        Vary::R => q.r = Some(x),
        Vary::Alpha => q.alpha = Some(x),
    }
    q
}

pub(crate) fn interval(p: &Params) -> std::result::Result<Output, CliError> {
    let (vary, x_name, xs) = vary_axis(p)?;
    let rows = xs
        .par_iter()
        .map(|&x| -> std::result::Result<_, CliError> {
            let s = classical(&at_axis(p, vary, x))?;
            Ok((forbidden_interval_classical(&s)?, s.signal_level()))
        })
        .collect::<std::result::Result<Vec<_>, CliError>>()?;
    let named: [(&str, Vec<f64>); 5] = [
        ("theta_minus", rows.iter().map(|r| r.0.lo).collect()),
        ("theta_plus", rows.iter().map(|r| r.0.hi).collect()),
        ("residual_minus", rows.iter().map(|r| r.0.residual_lo).collect()),
        ("residual_plus", rows.iter().map(|r| r.0.residual_hi).collect()),
        ("signal_level", rows.iter().map(|r| r.1).collect()),
    ];
    let worst = rows.iter().map(|r| r.0.residual_lo.max(r.0.residual_hi)).fold(0.0, f64::max);
    let notes = if vary == Vary::None {
        let iv = rows[0].0;
        vec![format!(
            "theta_- = {}, theta_+ = {}, residuals {:e}, {:e}",
            fmt_f64(iv.lo),
            fmt_f64(iv.hi),
            iv.residual_lo,
            iv.residual_hi
        )]
    } else {
        vec![format!("{} points, largest residual {:e}", rows.len(), worst)]
    };
    Ok(Output {
        x_name,
        series: named
            .into_iter()
            .map(|(n, ys)| Series {
                name: n.into(),
                points: points(&xs, &ys),
            })
            .collect(),
        notes,
    })
}

pub(crate) fn rectangle(p: &Params) -> std::result::Result<Output, CliError> {
    let (vary, x_name, xs) = vary_axis(p)?;
    let rows = xs
        .par_iter()
        .map(|&x| -> std::result::Result<_, CliError> { Ok(forbidden_rectangle(&ea(&at_axis(p, vary, x), 0.0, 0.0)?)?) })
        .collect::<std::result::Result<Vec<_>, CliError>>()?;
    let named: [(&str, Vec<f64>); 4] = [
        ("q_minus", rows.iter().map(|r| r.q_interval.lo).collect()),
        ("q_plus", rows.iter().map(|r| r.q_interval.hi).collect()),
        ("p_minus", rows.iter().map(|r| r.p_interval.lo).collect()),
        ("p_plus", rows.iter().map(|r| r.p_interval.hi).collect()),
    ];
    let r0 = rows[0];
    let notes = vec![format!(
        "first point: q in [{}, {}], p in [{}, {}]",
        fmt_f64(r0.q_interval.lo),
        fmt_f64(r0.q_interval.hi),
        fmt_f64(r0.p_interval.lo),
        fmt_f64(r0.p_interval.hi)
    )];
    Ok(Output {
        x_name,
        series: named
            .into_iter()
            .map(|(n, ys)| Series {
                name: n.into(),
                points: points(&xs, &ys),
            })
            .collect(),
        notes,
    })
}

pub(crate) fn discriminate(p: &Params) -> std::result::Result<Output, CliError> {
    let xs = sigma_grid(p)?;
    let scenario = DiscriminationScenario {
        eta0: req(&p.eta0, "eta0")?,
        eta1: req(&p.eta1, "eta1")?,
        alpha_q: req(&p.alpha, "alpha")?,
        r: req(&p.r, "r")?,
        prior0: req(&p.prior, "prior")?,
        noise_site: req(&p.site, "site")?.into(),
    };
    scenario.validate()?;
    let mut notes = vec![match forbidden_interval_discrimination(&scenario) {
        Ok(iv) => format!("no-resonance band [{}, {}]", fmt_f64(iv.lo), fmt_f64(iv.hi)),
        Err(e) => format!("no-resonance band unavailable: {e}"),
    }];
    let mut series = Vec::new();
    for theta in req(&p.theta, "theta")? {
        let curve = sweep_success(&Scheme::Discrimination { scenario, theta }, &xs)?;
        notes.push(format!(
            "theta={}: nonmonotonic = {}, {}",
            fmt_f64(theta),
            curve.nonmonotonic,
            describe_critical(critical_sigma2_discrimination(&scenario, theta))
        ));
        series.push(Series {
            name: theta_name("theta", theta),
            points: curve.points.iter().map(|&(x, y)| [x, y]).collect(),
        });
    }
    Ok(Output {
        x_name: "sigma",
        series,
        notes,
    })
}

fn qubit_curves(
    p: &Params,
    value: impl Fn(&QuantumCommParams) -> Result<f64> + Sync,
) -> std::result::Result<(Vec<f64>, Vec<(f64, Vec<f64>)>), CliError> {
    let xs = sigma_grid(p)?;
    let x0 = req(&p.x0, "x0")?;
    let curves = req(&p.theta, "theta")?
        .into_iter()
        .map(|theta| Ok((theta, eval(&xs, |x| value(&QuantumCommParams::new(x0, theta, x * x)?))?)))
        .collect::<Result<Vec<_>>>()?;
    Ok((xs, curves))
}

fn qubit_output(
    xs: &[f64],
    curves: Vec<(f64, Vec<f64>)>,
    note: impl Fn(f64, &[f64]) -> String,
) -> Output {
    let notes = curves.iter().map(|(t, ys)| note(*t, ys)).collect();
    Output {
        x_name: "sigma",
        series: curves
            .into_iter()
            .map(|(theta, ys)| Series {
                name: theta_name("theta", theta),
                points: points(xs, &ys),
            })
            .collect(),
        notes,
    }
}

fn rises(ys: &[f64]) -> bool {
    ys.iter().skip(1).any(|&y| y > ys[0] + crate::analysis::NONMONOTONIC_MARGIN)
}

fn grid_max(ys: &[f64]) -> f64 {
    ys.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

pub(crate) fn fidelity(p: &Params) -> std::result::Result<Output, CliError> {
    let x0 = req(&p.x0, "x0")?;
    let (xs, curves) = qubit_curves(p, average_fidelity)?;
    Ok(qubit_output(&xs, curves, |theta, ys| {
        let crit = match QuantumCommParams::new(x0, theta, 0.0).and_then(|q| critical_sigma2_quantum(&q)) {
            Ok(v) => {
                let at = QuantumCommParams::new(x0, theta, v).and_then(|q| average_fidelity(&q));
                format!(
                    "sigma*^2 = {}, <F>(sigma*) = {}",
                    fmt_f64(v),
                    at.map(fmt_f64).unwrap_or_else(|e| e.to_string())
                )
            }
            Err(_) => "no critical point".into(),
        };
        format!(
            "theta={}: nonmonotonic = {}, grid max <F> = {}, {crit}",
            fmt_f64(theta),
            rises(ys),
            fmt_f64(grid_max(ys))
        )
    }))
}

pub(crate) fn negativity(p: &Params) -> std::result::Result<Output, CliError> {
    let (xs, curves) = qubit_curves(p, |q| log_negativity(&choi_state(q)?))?;
    Ok(qubit_output(&xs, curves, |theta, ys| {
        format!(
            "theta={}: nonmonotonic = {}, grid max LN = {}",
            fmt_f64(theta),
            rises(ys),
            fmt_f64(grid_max(ys))
        )
    }))
}

fn private_scenario(p: &Params) -> std::result::Result<PrivateScenario, CliError> {
    Ok(PrivateScenario::new(classical(p)?, 0.0)?)
}

pub(crate) fn private(p: &Params) -> std::result::Result<Output, CliError> {
    let xs = sigma_grid(p)?;
    let s = private_scenario(p)?;
    let chi = eval(&xs, |x| holevo_chi(&eve_ensemble(&s, x * x)?))?;
    let mut series = Vec::new();
    let mut notes = Vec::new();
    for theta in req(&p.theta, "theta")? {
        let at = PrivateScenario { theta, ..s };
        let bob = eval(&xs, |x| bob_information(&at, x * x))?;
        let rate: Vec<f64> = bob.iter().zip(&chi).map(|(b, c)| b - c).collect();
        notes.push(format!(
            "theta={}: nonmonotonic = {}, grid max C_P = {}",
            fmt_f64(theta),
            rate.iter().skip(1).any(|&y| y > rate[0] + crate::private::PROBE_MARGIN),
            fmt_f64(grid_max(&rate))
        ));
        series.push(Series {
            name: theta_name("theta", theta),
            points: points(&xs, &rate),
        });
    }
    series.push(Series {
        name: "chi".into(),
        points: points(&xs, &chi),
    });
    Ok(Output {
        x_name: "sigma",
        series,
        notes,
    })
}

pub(crate) fn probe(p: &Params) -> std::result::Result<Output, CliError> {
    let xs = sigma_grid(p)?;
    let thetas = req(&p.theta, "theta")?;
    let reports = conjecture_probe(&private_scenario(p)?, &thetas, &xs)?;
    let flag = |b: bool| if b { 1.0 } else { 0.0 };
    let named: [(&str, Vec<f64>); 4] = [
        ("gain", reports.iter().map(|r| r.gain).collect()),
        ("argmax_sigma", reports.iter().map(|r| r.argmax_sigma).collect()),
        ("nonmonotonic", reports.iter().map(|r| flag(r.nonmonotonic)).collect()),
        ("at_grid_edge", reports.iter().map(|r| flag(r.at_grid_edge)).collect()),
    ];
    let flagged = reports.iter().filter(|r| r.nonmonotonic).count();
    let mut notes = vec![format!("{flagged} of {} thresholds gain from added noise", reports.len())];
    notes.extend(reports.iter().filter(|r| r.at_grid_edge).map(|r| {
        format!(
            "theta={}: best rate at the last grid point, the curve may still rise",
            fmt_f64(r.theta)
        )
    }));
    Ok(Output {
        x_name: "theta",
        series: named
            .into_iter()
            .map(|(n, ys)| Series {
                name: n.into(),
                points: points(&thetas, &ys),
            })
            .collect(),
        notes,
    })
}

pub(crate) fn mc_check(p: &Params) -> std::result::Result<Output, CliError> {
    let count = req(&p.scenarios, "scenarios")?;
    if count == 0 {
        return Err(CliError::Config("scenarios must be at least 1".into()));
    }
    let n = req(&p.n, "n")?;
    let cases = mc_cases(count, n, req(&p.seed, "seed")?)?;
    let xs: Vec<f64> = (0..cases.len()).map(|i| i as f64).collect();
    let named: [(&str, Vec<f64>); 5] = [
        ("kind", cases.iter().map(|c| f64::from(c.scenario.kind())).collect()),
        ("analytic", cases.iter().map(|c| c.analytic).collect()),
        ("estimate", cases.iter().map(|c| c.estimate.estimate).collect()),
        ("std_error", cases.iter().map(|c| c.binomial_se()).collect()),
        ("within_4se", cases.iter().map(|c| if c.within(4.0) { 1.0 } else { 0.0 }).collect()),
    ];
    let ok = cases.iter().filter(|c| c.within(4.0)).count();
    Ok(Output {
        x_name: "index",
        series: named
            .into_iter()
            .map(|(n, ys)| Series {
                name: n.into(),
                points: points(&xs, &ys),
            })
            .collect(),
        notes: vec![format!("{ok} of {} scenarios within 4 standard errors", cases.len())],
    })
}
