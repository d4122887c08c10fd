//! Alignment model serialization.
//!
//! Line 1 is a header: `<kind> <tension> <null_prob> <iterations>`. Every
//! following line is one table entry, `<source> <target> <probability>`, in
//! sorted order. Probabilities are written with 17 significant digits so a
//! read-back reproduces the exact f64 values.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::align::{AlignmentModel, ModelKind, TranslationTable};
use crate::error::{Error, Result};

pub fn save_model(model: &AlignmentModel, path: &Path) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} {:.16e} {:.16e} {}",
        model.kind, model.tension, model.null_prob, model.iterations_run
    );
    for (f, row) in &model.ttable.probs {
        for (e, p) in row {
            let _ = writeln!(out, "{f} {e} {p:.16e}");
        }
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<AlignmentModel> {
    let lines = crate::corpus::read_lines(path)?;
    let header = lines
        .first()
        .ok_or_else(|| Error::parse(path, 1, "empty model file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 {
        return Err(Error::parse(
            path,
            1,
            format!("expected 'kind tension null_prob iterations', got {header:?}"),
        ));
    }
    let kind: ModelKind = fields[0]
        .parse()
        .map_err(|_| Error::parse(path, 1, format!("unknown model kind {:?}", fields[0])))?;
    let tension: f64 = fields[1]
        .parse()
        .map_err(|_| Error::parse(path, 1, format!("bad tension {:?}", fields[1])))?;
    let null_prob: f64 = fields[2]
        .parse()
        .map_err(|_| Error::parse(path, 1, format!("bad null_prob {:?}", fields[2])))?;
    let iterations_run: u32 = fields[3]
        .parse()
        .map_err(|_| Error::parse(path, 1, format!("bad iteration count {:?}", fields[3])))?;
    let mut probs: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    for (idx, line) in lines.iter().enumerate().skip(1) {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                path,
                idx + 1,
                format!("expected 'source target probability', got {line:?}"),
            ));
        }
        let p: f64 = fields[2]
            .parse()
            .map_err(|_| Error::parse(path, idx + 1, format!("bad probability {:?}", fields[2])))?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::parse(
                path,
                idx + 1,
                format!("probability {p} outside [0, 1]"),
            ));
        }
        probs
            .entry(fields[0].to_string())
            .or_default()
            .insert(fields[1].to_string(), p);
    }
    Ok(AlignmentModel {
        ttable: TranslationTable::new(probs),
        kind,
        tension,
        null_prob,
        iterations_run,
    })
}
