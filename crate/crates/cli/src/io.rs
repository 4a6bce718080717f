//! Reading domain specs and writing/reading result files.

use std::fs;
use std::path::Path;

use robin_core::spectral::Discretization;
use robin_core::{DomainSpec, Method, SpectralResult};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::{CliError, CliResult};

/// Column order of result CSV files.
pub const CSV_HEADER: [&str; 13] =
    ["domain_id", "alpha", "j", "E", "method", "err_est", "flagged", "l", "multiplicity", "tolerance", "h", "dofs", "order"];

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// Domain spec and its id (the file stem).
pub fn read_domain(path: &Path) -> CliResult<(String, DomainSpec)> {
    let spec: DomainSpec = read_json(path)?;
    spec.validate().map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or("domain").to_string();
    Ok((id, spec))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("cannot parse {}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| CliError::Config(format!("cannot serialize output: {e}")))?;
    text.push('\n');
    write_text(path, &text)
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

fn row(r: &SpectralResult) -> Vec<String> {
    let empty = String::new;
    let (mut l, mut mult, mut tol, mut h, mut dofs, mut order) = (empty(), empty(), empty(), empty(), empty(), empty());
    match &r.disc {
        Discretization::Radial { l: ll, multiplicity, tolerance } => {
            l = ll.to_string();
            mult = multiplicity.to_string();
            tol = fmt_f64(*tolerance);
        }
        Discretization::Fem { h: hh, dofs: d, order: o } => {
            h = fmt_f64(*hh);
            dofs = d.to_string();
            order = o.map(fmt_f64).unwrap_or_default();
        }
        Discretization::Model1D { tolerance } => tol = fmt_f64(*tolerance),
    }
    vec![
        r.domain_id.clone(),
        fmt_f64(r.alpha),
        r.j.to_string(),
        fmt_f64(r.energy),
        r.method.as_str().to_string(),
        fmt_f64(r.err_est),
        r.flagged.to_string(),
        l,
        mult,
        tol,
        h,
        dofs,
        order,
    ]
}

pub fn results_to_csv(results: &[SpectralResult]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Config(format!("csv: {e}"));
    w.write_record(CSV_HEADER).map_err(err)?;
    for r in results {
        w.write_record(row(r)).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Config(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Config(format!("csv: {e}")))
}

pub fn write_results(path: &Path, results: &[SpectralResult]) -> CliResult<()> {
    write_text(path, &results_to_csv(results)?)
}

pub fn parse_results(text: &str, origin: &str) -> CliResult<Vec<SpectralResult>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let bad = |line: usize, why: String| CliError::Config(format!("{origin}: record {line}: {why}"));
    let headers = rdr.headers().map_err(|e| CliError::Config(format!("{origin}: {e}")))?.clone();
    for (i, name) in CSV_HEADER.iter().take(6).enumerate() {
        if headers.get(i) != Some(name) {
            return Err(CliError::Config(format!("{origin}: column {} must be '{name}'", i + 1)));
        }
    }
    let col = |name: &str| headers.iter().position(|h| h == name);
    let mut out = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| bad(line + 1, e.to_string()))?;
        let get = |name: &str| col(name).and_then(|c| rec.get(c)).unwrap_or("");
        let num = |name: &str| get(name).parse::<f64>().map_err(|_| bad(line + 1, format!("bad {name} '{}'", get(name))));
        let int = |name: &str| get(name).parse::<usize>().map_err(|_| bad(line + 1, format!("bad {name} '{}'", get(name))));
        let method = Method::parse(get("method")).ok_or_else(|| bad(line + 1, format!("unknown method '{}'", get("method"))))?;
        let disc = match method {
            Method::RadialExact => Discretization::Radial {
                l: int("l")?,
                multiplicity: int("multiplicity")?,
                tolerance: num("tolerance")?,
            },
            Method::Fem2D => Discretization::Fem {
                h: num("h")?,
                dofs: int("dofs")?,
                order: if get("order").is_empty() { None } else { Some(num("order")?) },
            },
            Method::Model1D => Discretization::Model1D { tolerance: num("tolerance")? },
        };
        out.push(SpectralResult {
            domain_id: get("domain_id").to_string(),
            alpha: num("alpha")?,
            j: int("j")?,
            energy: num("E")?,
            method,
            disc,
            err_est: num("err_est")?,
            flagged: get("flagged") == "true",
        });
    }
    Ok(out)
}

pub fn read_results(path: &Path) -> CliResult<Vec<SpectralResult>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_results(&text, &path.display().to_string())
}
