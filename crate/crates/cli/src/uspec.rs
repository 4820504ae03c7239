//! Scalarizer specs of the form `kind:key=v1,v2,key=v`.
//!
//! A token without `=` continues the list of the preceding key, so
//! `wsum:w=0.5,0.5` gives `w = [0.5, 0.5]`. Single numeric values are
//! broadcast to the objective count.

use std::collections::BTreeMap;

use robpareto::geometry::DominanceMode;
use robpareto::model::Instance;
use robpareto::scalarize::{constructive_scalarizer, Scalarizer};

use crate::error::CliError;

type Fields = BTreeMap<String, Vec<String>>;

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

fn fields(kind: &str, body: &str, allowed: &[&str]) -> Result<Fields, CliError> {
    let mut out = Fields::new();
    let mut key: Option<String> = None;
    for tok in body.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let value = match tok.split_once('=') {
            Some((k, v)) => {
                let k = k.trim().to_string();
                if !allowed.contains(&k.as_str()) {
                    return Err(bad(format!("`{kind}` does not take `{k}`; expected one of {allowed:?}")));
                }
                if out.contains_key(&k) {
                    return Err(bad(format!("`{k}` given twice")));
                }
                key = Some(k);
                v.trim()
            }
            None => tok,
        };
        let k = key.as_ref().ok_or_else(|| bad(format!("value `{tok}` has no key")))?;
        out.entry(k.clone()).or_default().push(value.to_string());
    }
    Ok(out)
}

pub fn parse_number(s: &str) -> Result<f64, CliError> {
    match s {
        "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
        _ => s
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| bad(format!("`{s}` is not a number"))),
    }
}

/// Parses a list, broadcasting a single value to length `n`.
pub fn vector(values: &[String], n: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let v = values.iter().map(|s| parse_number(s)).collect::<Result<Vec<_>, _>>()?;
    match v.len() {
        1 => Ok(vec![v[0]; n]),
        len if len == n => Ok(v),
        len => Err(bad(format!("{what} has {len} entries, the instance has {n} objectives"))),
    }
}

fn single<'a>(f: &'a Fields, key: &str) -> Result<Option<&'a str>, CliError> {
    match f.get(key).map(Vec::as_slice) {
        None => Ok(None),
        Some([v]) => Ok(Some(v.as_str())),
        Some(_) => Err(bad(format!("`{key}` takes one value"))),
    }
}

pub fn parse(spec: &str, instance: &Instance) -> Result<Scalarizer, CliError> {
    let (kind, body) = spec.split_once(':').unwrap_or((spec, ""));
    let n = instance.n();
    let weights = |f: &Fields| match f.get("w") {
        Some(v) => vector(v, n, "w"),
        None => Ok(vec![1.0; n]),
    };
    let reference = |f: &Fields| f.get("ref").map(|v| vector(v, n, "ref")).transpose();
    let u = match kind.trim() {
        "wsum" => {
            let f = fields(kind, body, &["w"])?;
            Scalarizer::weighted_sum(weights(&f)?)?
        }
        "pnorm" => {
            let f = fields(kind, body, &["p", "w", "ref"])?;
            let p = single(&f, "p")?.ok_or_else(|| bad("pnorm needs `p`"))?;
            Scalarizer::weighted_pnorm(weights(&f)?, parse_number(p)?, reference(&f)?)?
        }
        "cheb" => {
            let f = fields(kind, body, &["w", "ref"])?;
            Scalarizer::chebyshev(weights(&f)?, reference(&f)?)?
        }
        "construct" => {
            let f = fields(kind, body, &["anchor", "mode"])?;
            let anchor = single(&f, "anchor")?.ok_or_else(|| bad("construct needs `anchor`"))?;
            let mode: DominanceMode = single(&f, "mode")?
                .unwrap_or("plain")
                .parse()
                .map_err(|e: robpareto::Error| bad(e.to_string()))?;
            let d = instance.find_decision(anchor)?;
            constructive_scalarizer(instance, &d, mode)?
        }
        other => return Err(bad(format!("unknown scalarizer `{other}`; expected wsum, pnorm, cheb or construct"))),
    };
    if u.dim() != n {
        return Err(bad(format!("scalarizer expects {} objectives, the instance has {n}", u.dim())));
    }
    Ok(u)
}
