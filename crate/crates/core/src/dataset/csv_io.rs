//! CSV ingestion and emission.
//!
//! Long format with an explicit time axis: the features file has one row
//! per (sample, time step) under the header
//! `sample_id,time_index,<temporal names...>[,<static names...>]`, with
//! static values repeated (and required constant) across a sample's time
//! rows. The targets file holds `sample_id,target`. Floats are written
//! with 17 significant digits so save→load reproduces every `f64` bit.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::Grid;

use super::{FeatureSpec, Sample, TemporalDataset};

/// 17 significant digits: enough to round-trip any finite `f64`.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_cell(raw: &str, file: &str, line: usize, column: &str) -> Result<f64> {
    let v: f64 = raw.trim().parse().map_err(|_| {
        Error::data(format!(
            "{file}:{line}: non-numeric cell '{raw}' in column '{column}'"
        ))
    })?;
    if !v.is_finite() {
        return Err(Error::data(format!(
            "{file}:{line}: non-finite value '{raw}' in column '{column}'"
        )));
    }
    Ok(v)
}

/// Load a dataset from a features CSV and a targets CSV, validated
/// against `schema`. Samples keep their first-appearance order.
pub fn load_csv(
    features_path: &Path,
    targets_path: &Path,
    schema: &[FeatureSpec],
) -> Result<TemporalDataset> {
    let temporal_names: Vec<&str> = ordered_names(schema, super::FeatureKind::Temporal);
    let static_names: Vec<&str> = ordered_names(schema, super::FeatureKind::Static);
    let n_temporal = temporal_names.len();
    let n_static = static_names.len();

    let fname = features_path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(features_path)?;

    let mut expected_header = vec!["sample_id".to_string(), "time_index".to_string()];
    expected_header.extend(temporal_names.iter().map(|s| s.to_string()));
    expected_header.extend(static_names.iter().map(|s| s.to_string()));
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != expected_header {
        return Err(Error::data(format!(
            "{fname}: header {header:?} does not match schema {expected_header:?}"
        )));
    }

    // id -> (order, time_index -> temporal row, static values)
    struct Partial {
        order: usize,
        rows: BTreeMap<usize, Vec<f64>>,
        statics: Vec<f64>,
    }
    let mut partials: BTreeMap<String, Partial> = BTreeMap::new();
    let mut next_order = 0usize;

    for (i, record) in reader.records().enumerate() {
        let line = i + 2; // 1-based, after the header
        let record = record?;
        if record.len() != expected_header.len() {
            return Err(Error::data(format!(
                "{fname}:{line}: {} fields, expected {}",
                record.len(),
                expected_header.len()
            )));
        }
        let id = record[0].trim().to_string();
        let t: usize = record[1].trim().parse().map_err(|_| {
            Error::data(format!(
                "{fname}:{line}: non-numeric cell '{}' in column 'time_index'",
                &record[1]
            ))
        })?;
        let mut temporal_row = Vec::with_capacity(n_temporal);
        for (j, name) in temporal_names.iter().enumerate() {
            temporal_row.push(parse_cell(&record[2 + j], &fname, line, name)?);
        }
        let mut statics = Vec::with_capacity(n_static);
        for (j, name) in static_names.iter().enumerate() {
            statics.push(parse_cell(&record[2 + n_temporal + j], &fname, line, name)?);
        }

        let entry = partials.entry(id.clone()).or_insert_with(|| {
            let p = Partial {
                order: next_order,
                rows: BTreeMap::new(),
                statics: statics.clone(),
            };
            next_order += 1;
            p
        });
        if entry.rows.insert(t, temporal_row).is_some() {
            return Err(Error::data(format!(
                "{fname}:{line}: duplicate (sample_id, time_index) = ('{id}', {t})"
            )));
        }
        if entry.statics != statics {
            return Err(Error::data(format!(
                "{fname}:{line}: static values for sample '{id}' change across time rows"
            )));
        }
    }
    if partials.is_empty() {
        return Err(Error::data(format!("{fname}: no data rows")));
    }

    // Targets.
    let tname = targets_path.display().to_string();
    let mut treader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(targets_path)?;
    let theader: Vec<String> = treader.headers()?.iter().map(str::to_string).collect();
    if theader != ["sample_id", "target"] {
        return Err(Error::data(format!(
            "{tname}: header {theader:?}, expected [sample_id, target]"
        )));
    }
    let mut targets: BTreeMap<String, f64> = BTreeMap::new();
    for (i, record) in treader.records().enumerate() {
        let line = i + 2;
        let record = record?;
        if record.len() != 2 {
            return Err(Error::data(format!("{tname}:{line}: expected 2 fields")));
        }
        let id = record[0].trim().to_string();
        let y = parse_cell(&record[1], &tname, line, "target")?;
        if targets.insert(id.clone(), y).is_some() {
            return Err(Error::data(format!(
                "{tname}:{line}: duplicate target for sample '{id}'"
            )));
        }
        if !partials.contains_key(&id) {
            return Err(Error::data(format!(
                "{tname}:{line}: target for unknown sample '{id}'"
            )));
        }
    }

    // Assemble in first-appearance order; enforce a rectangular time axis.
    let t_steps = partials.values().map(|p| p.rows.len()).max().unwrap_or(0);
    let mut ordered: Vec<(String, Partial)> = partials.into_iter().collect();
    ordered.sort_by_key(|(_, p)| p.order);

    let mut samples = Vec::with_capacity(ordered.len());
    for (id, partial) in ordered {
        if partial.rows.len() != t_steps || partial.rows.keys().enumerate().any(|(i, &t)| i != t) {
            return Err(Error::data(format!(
                "{fname}: ragged time axis for sample '{id}': time indices {:?}, expected 0..{}",
                partial.rows.keys().collect::<Vec<_>>(),
                t_steps
            )));
        }
        let target = *targets
            .get(&id)
            .ok_or_else(|| Error::data(format!("missing target for sample '{id}'")))?;
        let rows: Vec<Vec<f64>> = partial.rows.into_values().collect();
        samples.push(Sample {
            id,
            temporal: Grid::from_rows(rows)?,
            static_features: partial.statics,
            target,
        });
    }

    TemporalDataset::new(schema.to_vec(), samples)
}

/// Write a dataset back out in the schema `load_csv` reads.
pub fn save_csv(
    dataset: &TemporalDataset,
    features_path: &Path,
    targets_path: &Path,
) -> Result<()> {
    let temporal = dataset.temporal_specs();
    let statics = dataset.static_specs();

    let mut writer = csv::Writer::from_path(features_path)?;
    let mut header = vec!["sample_id".to_string(), "time_index".to_string()];
    header.extend(temporal.iter().map(|f| f.name.clone()));
    header.extend(statics.iter().map(|f| f.name.clone()));
    writer.write_record(&header)?;
    for sample in &dataset.samples {
        for t in 0..sample.temporal.rows() {
            let mut record = vec![sample.id.clone(), t.to_string()];
            record.extend(sample.temporal.row(t).iter().map(|&v| fmt_f64(v)));
            record.extend(sample.static_features.iter().map(|&v| fmt_f64(v)));
            writer.write_record(&record)?;
        }
    }
    writer.flush()?;

    let mut twriter = csv::Writer::from_path(targets_path)?;
    twriter.write_record(["sample_id", "target"])?;
    for sample in &dataset.samples {
        twriter.write_record([sample.id.clone(), fmt_f64(sample.target)])?;
    }
    twriter.flush()?;
    Ok(())
}

/// Persist a feature schema as JSON alongside the CSVs.
pub fn save_schema(schema: &[FeatureSpec], path: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(schema)?;
    std::fs::write(path, json + "\n")?;
    Ok(())
}

pub fn load_schema(path: &Path) -> Result<Vec<FeatureSpec>> {
    let raw = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&raw)?)
}

fn ordered_names(schema: &[FeatureSpec], kind: super::FeatureKind) -> Vec<&str> {
    let mut named: Vec<(&FeatureSpec, &str)> = schema
        .iter()
        .filter(|f| f.kind == kind)
        .map(|f| (f, f.name.as_str()))
        .collect();
    named.sort_by_key(|(f, _)| f.index);
    named.into_iter().map(|(_, n)| n).collect()
}
