//! Plain-text rendering of report blocks.

use std::fmt::Write;

use serde_json::Value;

use super::report::{Block, Report, Status};
use crate::error::{Error, Result};

fn num(v: &Value) -> String {
    match v {
        Value::Number(n) => n.to_string(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn table(out: &mut String, head: &[&str], rows: &[Vec<String>]) {
    let mut w: Vec<usize> = head.iter().map(|h| h.len()).collect();
    for r in rows {
        for (i, c) in r.iter().enumerate() {
            w[i] = w[i].max(c.len());
        }
    }
    let line = |cells: Vec<&str>| cells.iter().zip(&w).map(|(c, w)| format!("{c:<w$}")).collect::<Vec<_>>().join("  ");
    let _ = writeln!(out, "{}", line(head.to_vec()).trim_end());
    let _ = writeln!(out, "{}", w.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  "));
    for r in rows {
        let _ = writeln!(out, "{}", line(r.iter().map(String::as_str).collect()).trim_end());
    }
}

fn moduli(out: &mut String, v: &Value) {
    let i = &v["inputs"];
    let _ = writeln!(out, "n = {}, s = {}, epsilon = {}", num(&i["n"]), num(&i["s"]), num(&i["epsilon"]));
    let _ = writeln!(
        out,
        "dim Def_SL = dim H1 + dim H0_(-1+eps) - 1 = {} + {} - 1 = {}",
        num(&i["dim_h1"]),
        num(&i["dim_h0_eps"]),
        num(&v["dim_def_sl"])
    );
    match &v["dim_def_sl_l2"] {
        Value::Null => {
            let _ = writeln!(out, "dim Def_SL^L2 = dim H1_c: not asserted (l2_theorem_applicable = false)");
        }
        l2 => {
            let _ = writeln!(out, "dim Def_SL^L2 = dim H1_c = rank i + s - 1 = {} + {} - 1 = {}", num(&i["rank_i"]), num(&i["s"]), num(l2));
        }
    }
    if let Some(rows) = v["k1_table"].as_array().filter(|r| !r.is_empty()) {
        let rows: Vec<Vec<String>> = rows
            .iter()
            .map(|r| vec![num(&r["delta"]), num(&r["dim"]), r["formula"].as_str().unwrap_or("").to_string()])
            .collect();
        table(out, &["delta", "dim K1", "formula"], &rows);
    }
}

fn weights(out: &mut String, v: &Value) {
    let mut rows = Vec::new();
    for w in v["exceptional"].as_array().into_iter().flatten() {
        for s in w["sources"].as_array().into_iter().flatten() {
            rows.push(vec![num(&w["value"]), num(&s["lambda"]), s["branch"].as_str().unwrap_or("").to_string(), num(&s["end"])]);
        }
    }
    table(out, &["weight", "lambda", "branch", "end"], &rows);
    let counts: Vec<Vec<String>> = v["dim_H0"]
        .as_array()
        .into_iter()
        .flatten()
        .map(|c| {
            let val = if c.get("error").is_some() {
                format!("error: {}", c["error"]["message"].as_str().unwrap_or(""))
            } else {
                num(&c["dim_H0"])
            };
            vec![num(&c["delta"]), val]
        })
        .collect();
    if !counts.is_empty() {
        out.push('\n');
        table(out, &["delta", "dim H0"], &counts);
    }
}

fn cone_count(out: &mut String, v: &Value) {
    for row in v["rows"].as_array().into_iter().flatten() {
        let _ = writeln!(
            out,
            "delta = {}: shooting {} vs dim_H0 {}",
            num(&row["delta"]),
            num(&row["bounded_harmonic_dim"]),
            num(&row["dim_H0"])
        );
        let modes: Vec<Vec<String>> = row["modes"]
            .as_array()
            .into_iter()
            .flatten()
            .map(|m| {
                vec![
                    num(&m["lambda"]),
                    num(&m["multiplicity"]),
                    num(&m["a_plus"]),
                    num(&m["a_minus"]),
                    m["admissible"].as_array().map(|a| a.iter().map(|x| x.as_str().unwrap_or("")).collect::<Vec<_>>().join("/")).unwrap_or_default(),
                    num(&m["dim_per_eigenfunction"]),
                ]
            })
            .collect();
        table(out, &["lambda", "mult", "a+", "a-", "admissible", "dim"], &modes);
        out.push('\n');
    }
}

fn generic(out: &mut String, v: &Value) {
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(v).unwrap_or_default());
}

pub fn explain_block(b: &Block) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "[{}] {}::{} ({:?})", b.id, b.module, b.operation, b.status);
    if b.status == Status::Failed {
        if let Some(e) = &b.error {
            let _ = writeln!(out, "failed ({}): {}", e.kind, e.message);
        }
        return out;
    }
    match b.id.as_str() {
        "moduli" => moduli(&mut out, &b.values),
        "weights" => weights(&mut out, &b.values),
        "cone.count" => cone_count(&mut out, &b.values),
        _ => generic(&mut out, &b.values),
    }
    for n in &b.notes {
        let _ = writeln!(out, "note: {n}");
    }
    out
}

/// Renders the block `id`, or every block under the prefix `id.`.
pub fn explain(report: &Report, id: &str) -> Result<String> {
    let prefix = format!("{id}.");
    let hits: Vec<&Block> = report.blocks.iter().filter(|b| b.id == id || b.id.starts_with(&prefix)).collect();
    if hits.is_empty() {
        let known: Vec<&str> = report.blocks.iter().map(|b| b.id.as_str()).collect();
        return Err(Error::Argument(format!("unknown block {id:?}; report has {}", known.join(", "))));
    }
    Ok(hits.iter().map(|b| explain_block(b)).collect::<Vec<_>>().join("\n"))
}
