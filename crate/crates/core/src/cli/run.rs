//! Executes a manifest block by block in dependency order.

use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use super::manifest::{Analysis, ConeProfileSpec, LoadedManifest};
use super::report::{tool_version, Block, BlockError, Report, Status};
use crate::ac_geometry::{decay_classify, half_decades, integrate_geodesic, remainder_sweep, DecayQuantity, FieldClass};
use crate::cone_solver::{bounded_harmonic_dim, fredholm_window_probe_with, glue_harmonic, AcProfile, ProbeOptions, Warp};
use crate::error::{Error, Result};
use crate::indicial::{
    dim_H0, exceptional_weights, Branch, h0_contributions, sublinear_growth_exists, validate_epsilon, EndSpectra,
    DEFAULT_EPSILON,
};
use crate::link_spectrum::LinkSpectrum;
use crate::moduli::{moduli_report, ModuliInput};
use crate::topology::{cohomology_report, CohomologyReport};

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub seed: u64,
    pub timings: bool,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("values serialize")
}

struct Runner<'a> {
    m: &'a LoadedManifest,
    opts: RunOptions,
    blocks: Vec<Block>,
}

impl Runner<'_> {
    /// Runs `f` and records the outcome as a block; returns the value on success.
    fn block<T>(
        &mut self,
        id: &str,
        module: &str,
        operation: &str,
        inputs: Value,
        emit: bool,
        f: impl FnOnce() -> Result<(T, Value, Vec<String>)>,
    ) -> Option<T> {
        let start = Instant::now();
        let out = f();
        let wall_ms = self.opts.timings.then(|| start.elapsed().as_secs_f64() * 1e3);
        let (status, values, notes, error, ret) = match out {
            Ok((t, v, notes)) => (Status::Ok, v, notes, None, Some(t)),
            Err(e) => (Status::Failed, Value::Null, Vec::new(), Some(BlockError::from(&e)), None),
        };
        if emit {
            self.blocks.push(Block {
                id: id.into(),
                module: module.into(),
                operation: operation.into(),
                status,
                inputs,
                values,
                notes,
                error,
                wall_ms,
            });
        }
        ret
    }
}

fn dependency_failed(what: &str) -> Error {
    Error::Argument(format!("skipped: the {what} step failed"))
}

/// Rejects an `ε` that is exceptional or does not sit in the first gap above −1.
fn check_epsilon(m: &LoadedManifest, ends: &EndSpectra) -> Result<()> {
    let Some(eps) = m.manifest.weights.epsilon else {
        return Ok(());
    };
    validate_epsilon(eps, ends).map_err(|e| {
        let message = match &e {
            Error::ExceptionalWeight { weight, .. } => {
                let sources = exceptional_weights(ends, weight - 1e-9, weight + 1e-9)
                    .weights
                    .into_iter()
                    .flat_map(|w| w.sources)
                    .map(|s| {
                        let branch = match s.branch {
                            Branch::APlus => "a+",
                            Branch::AMinus => "a-",
                        };
                        format!("lambda = {} ({branch}, end {})", s.lambda, s.end)
                    })
                    .collect::<Vec<_>>()
                    .join(", ");
                format!("-1 + epsilon = {} is the exceptional weight {weight} from {sources}", -1.0 + eps)
            }
            other => other.to_string(),
        };
        Error::validation("/weights/epsilon", message)
    })
}

/// Runs every requested analysis. Manifest-level validation failures are
/// returned as errors; failures inside a block are recorded in the report.
pub fn run(m: &LoadedManifest, opts: RunOptions) -> Result<Report> {
    let man = &m.manifest;
    let mut r = Runner { m, opts, blocks: Vec::new() };

    let need_spectra = [Analysis::Spectrum, Analysis::Weights, Analysis::Moduli, Analysis::Cone]
        .iter()
        .any(|a| m.wants(*a));
    let mut ends: Option<EndSpectra> = None;
    if need_spectra {
        let inputs = json!({ "n": man.n, "ends": man.ends, "lambda_max": man.lambda_max });
        ends = r.block("spectrum", "link_spectrum", "spectrum", inputs, m.wants(Analysis::Spectrum), || {
            let spectra: Vec<LinkSpectrum> = (0..man.ends.len()).map(|i| m.end_spectrum(i)).collect::<Result<_>>()?;
            let es = EndSpectra::new(man.n, spectra)?;
            let values = json!({
                "ends": es.ends.iter().map(|s| json!({
                    "pairs": s.to_json_pairs(),
                    "truncation": s.truncation,
                    "source": s.source,
                })).collect::<Vec<_>>(),
                "sublinear_growth": sublinear_growth_exists(&es),
            });
            Ok((es, values, Vec::new()))
        });
        if let Some(es) = &ends {
            check_epsilon(m, es)?;
        }
    }

    if m.wants(Analysis::Weights) {
        let window = man.weights.window.unwrap_or([-(man.n as f64), man.n as f64]);
        let inputs = json!({ "window": window, "deltas": man.weights.deltas, "epsilon": man.weights.epsilon });
        let es = ends.clone();
        r.block("weights", "indicial", "exceptional_weights", inputs, true, || {
            let es = es.ok_or_else(|| dependency_failed("spectrum"))?;
            let w = exceptional_weights(&es, window[0], window[1]);
            let counts: Vec<Value> = man
                .weights
                .deltas
                .iter()
                .map(|&d| match h0_contributions(d, &es) {
                    Ok(c) => json!({ "delta": d, "dim_H0": c.iter().map(|c| c.multiplicity).sum::<usize>(), "contributions": c }),
                    Err(e) => json!({ "delta": d, "error": BlockError::from(&e) }),
                })
                .collect();
            let eps = man.weights.epsilon.unwrap_or(DEFAULT_EPSILON);
            let values = json!({
                "exceptional": w.weights,
                "dim_H0": counts,
                "epsilon": eps,
                "dim_H0_eps": dim_H0(-1.0 + eps, &es).ok(),
            });
            Ok(((), values, vec!["dim_H0 entries come from indicial::dim_H0".into()]))
        });
    }

    let mut cohomology: Option<CohomologyReport> = None;
    if m.wants(Analysis::Topology) || m.wants(Analysis::Moduli) {
        let inputs = json!({ "complex": man.topology });
        cohomology = r.block("topology", "topology", "cohomology_report", inputs, m.wants(Analysis::Topology), || {
            let (c, source) = m.complex()?;
            let rep = cohomology_report(&c)?;
            if rep.dim_h1c != rep.rank_i + rep.s - 1 {
                return Err(Error::Internal(format!(
                    "dim H1_c = {} but rank i + s - 1 = {}",
                    rep.dim_h1c,
                    rep.rank_i + rep.s - 1
                )));
            }
            let mut v = to_value(&rep);
            v["source"] = json!(source);
            Ok((rep, v, vec!["checked dim H1_c = rank i + s - 1".into()]))
        });
    }

    if m.wants(Analysis::Moduli) {
        let inputs = json!({
            "epsilon": man.weights.epsilon,
            "k1_deltas": man.weights.k1_deltas,
            "l2_theorem_applicable": man.l2_theorem_applicable,
        });
        let (es, coh) = (ends.clone(), cohomology.clone());
        r.block("moduli", "moduli", "moduli_report", inputs, true, || {
            let es = es.ok_or_else(|| dependency_failed("spectrum"))?;
            let coh = coh.ok_or_else(|| dependency_failed("topology"))?;
            let input = ModuliInput::new(es, coh, man.weights.epsilon, man.l2_theorem_applicable)?;
            let rep = moduli_report(&input, &man.weights.k1_deltas)?;
            Ok(((), to_value(&rep), Vec::new()))
        });
    }

    if m.wants(Analysis::Cone) {
        run_cone(&mut r, ends.clone());
    }
    if m.wants(Analysis::Geodesic) {
        run_geodesic(&mut r);
    }

    let exit_code = r
        .blocks
        .iter()
        .filter_map(|b| b.error.as_ref().map(|e| e.exit_code))
        .max()
        .unwrap_or(0);
    Ok(Report {
        tool: tool_version(),
        manifest: m.name.clone(),
        seed: opts.seed,
        exit_code,
        blocks: r.blocks,
    })
}

fn run_cone(r: &mut Runner, ends: Option<EndSpectra>) {
    let m = r.m;
    let man = &m.manifest;
    let c = man.cone.as_ref().expect("validated");
    let profile: Result<AcProfile> = ends.ok_or_else(|| dependency_failed("spectrum")).and_then(|es| {
        let warp = match c.profile {
            ConeProfileSpec::SmoothedNeck => Warp::SmoothedNeck,
            ConeProfileSpec::CappedCone { t0, amp } => Warp::CappedCone { t0, amp },
        };
        AcProfile::new(warp, es)
    });
    let lambda_max = c.lambda_max.unwrap_or(man.lambda_max);

    if !c.deltas.is_empty() {
        let inputs = json!({ "profile": c.profile, "deltas": c.deltas, "lambda_max": lambda_max, "truncation": c.truncation });
        let p = profile.as_ref().map_err(|e| Error::Argument(e.to_string()));
        r.block("cone.count", "cone_solver", "bounded_harmonic_dim", inputs, true, || {
            let p = p?;
            let mut rows = Vec::new();
            for &d in &c.deltas {
                let b = bounded_harmonic_dim(p, d, lambda_max, c.truncation)?;
                let h0 = dim_H0(d, &p.ends)?;
                rows.push(json!({ "delta": d, "bounded_harmonic_dim": b.total, "dim_H0": h0, "agree": b.total == h0, "modes": b.modes }));
            }
            let agree = rows.iter().all(|r| r["agree"] == json!(true));
            let notes = vec!["dim_H0 column from indicial::dim_H0".to_string()];
            if !agree {
                return Err(Error::Internal(format!("shooting count disagrees with dim_H0: {}", Value::Array(rows))));
            }
            Ok(((), json!({ "rows": rows }), notes))
        });
    }

    if let Some(g) = &c.glue {
        let inputs = to_value(g);
        let p = profile.as_ref().map_err(|e| Error::Argument(e.to_string()));
        r.block("cone.glue", "cone_solver", "glue_harmonic", inputs, true, || {
            let res = glue_harmonic(p?, g.end_values, g.truncation)?;
            let values = json!({
                "F_at_0": res.solution.eval(0.0),
                "decay_exponent": res.decay_exponent,
                "expected_decay_exponent": 2.0 - man.n as f64,
                "fit_points": res.fit_points,
                "residual": res.solution.residual,
                "grid_points": res.solution.grid.len(),
            });
            Ok(((), values, Vec::new()))
        });
    }

    if let Some(pr) = &c.probe {
        let seed = r.opts.seed;
        let popts = ProbeOptions {
            seeds: vec![seed, seed + 1, seed + 2],
            ..ProbeOptions::default()
        };
        let inputs = json!({ "probe": pr, "seeds": popts.seeds });
        let p = profile.as_ref().map_err(|e| Error::Argument(e.to_string()));
        r.block("cone.probe", "cone_solver", "fredholm_window_probe", inputs, true, || {
            let rep = fredholm_window_probe_with(p?, pr.lambda, &pr.deltas, &pr.truncations, &popts)?;
            let notes = vec!["indicator only: trends of discrete singular values, not a Fredholm certificate".to_string()];
            Ok(((), to_value(&rep), notes))
        });
    }
}

fn run_geodesic(r: &mut Runner) {
    let m = r.m;
    let g = m.manifest.geometry.clone().expect("validated");
    let xs = g.xs.clone().unwrap_or_else(half_decades);
    let chart = g.chart;

    r.block("geodesic.decay", "ac_geometry", "decay_classify", json!({ "chart": chart, "y": g.y }), true, || {
        let gamma = decay_classify(&chart, DecayQuantity::Christoffels, &g.y)?;
        let curv = decay_classify(&chart, DecayQuantity::Curvature, &g.y)?;
        let consistent = gamma.entries.iter().chain(&curv.entries).all(|e| e.consistent);
        let values = json!({ "christoffels": gamma.entries, "curvature": curv.entries, "consistent": consistent });
        Ok(((), values, Vec::new()))
    });

    let inputs = json!({ "chart": chart, "y": g.y, "field": g.field });
    r.block("geodesic.boundary", "ac_geometry", "integrate_geodesic", inputs, true, || {
        let s: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
        let t = integrate_geodesic(&chart, 0.0, &g.y, &g.field, &s)?;
        let drift = t
            .states
            .iter()
            .flat_map(|st| st.gamma[1..].iter().zip(&g.y).map(|(a, b)| (a - b).abs()))
            .fold(0.0f64, f64::max);
        let stays = t.states.iter().all(|st| st.gamma[0] == 0.0);
        let end = &t.states[t.states.len() - 1];
        let values = match g.field.class {
            FieldClass::ScField => json!({ "class": "sc_field", "max_drift": drift, "stationary": drift <= 1e-12 }),
            FieldClass::BField => json!({ "class": "b_field", "stays_on_boundary": stays, "endpoint": end.gamma }),
        };
        Ok(((), values, Vec::new()))
    });

    if g.field.class == FieldClass::ScField {
        let inputs = json!({ "chart": chart, "y": g.y, "field": g.field, "directions": g.directions, "xs": xs });
        r.block("geodesic.remainder", "ac_geometry", "remainder_sweep", inputs, true, || {
            let mut sweeps = Vec::new();
            for z in &g.directions {
                let sw = remainder_sweep(&chart, &g.y, &g.field, *z, &xs)?;
                sweeps.push(json!({ "direction": z, "sweep": sw }));
            }
            Ok(((), json!({ "sweeps": sweeps }), Vec::new()))
        });
    }
}
