//! Viscosity CSV ingestion.
//!
//! Data: `liquid,T_K,eta_Pa_s`. Metadata: `liquid,T_liquidus_K,eta_liquidus_Pa_s`.

use std::collections::BTreeMap;

use enwidth_core::nonequil_observables::{ViscosityDataset, ViscosityRecord};
use serde::Serialize;

use crate::CliError;

pub const DATA_HEADER: [&str; 3] = ["liquid", "T_K", "eta_Pa_s"];
pub const META_HEADER: [&str; 3] = ["liquid", "T_liquidus_K", "eta_liquidus_Pa_s"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlaggedRow {
    pub liquid: String,
    pub line: u64,
    pub t_k: f64,
}

#[derive(Debug, Clone)]
pub struct Ingested {
    pub dataset: ViscosityDataset,
    /// Rows above the liquidus: kept, excluded from fitting.
    pub flagged: Vec<FlaggedRow>,
}

struct Row {
    line: u64,
    liquid: String,
    a: f64,
    b: f64,
}

fn parse_table(label: &str, bytes: &[u8], header: [&str; 3]) -> Result<Vec<Row>, CliError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes);
    let found: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if found != header {
        return Err(CliError::Input(format!(
            "{label}: header {:?}, expected {:?}",
            found.join(","),
            header.join(",")
        )));
    }
    let mut rows = Vec::new();
    let mut problems = Vec::new();
    for rec in reader.records() {
        let rec = match rec {
            Ok(r) => r,
            Err(e) => {
                problems.push(format!("{label}: {e}"));
                continue;
            }
        };
        let line = rec.position().map_or(0, |p| p.line());
        let num = |i: usize, what: &str| -> Result<f64, String> {
            let v: f64 = rec
                .get(i)
                .unwrap_or("")
                .parse()
                .map_err(|_| format!("{label} line {line}: {what} {:?} is not a number", rec.get(i).unwrap_or("")))?;
            if !(v > 0.0) || !v.is_finite() {
                return Err(format!("{label} line {line}: {what} must be positive, got {v}"));
            }
            Ok(v)
        };
        let liquid = rec.get(0).unwrap_or("").to_string();
        if liquid.is_empty() {
            problems.push(format!("{label} line {line}: empty liquid id"));
            continue;
        }
        match (num(1, header[1]), num(2, header[2])) {
            (Ok(a), Ok(b)) => rows.push(Row { line, liquid, a, b }),
            (Err(e), _) | (_, Err(e)) => problems.push(e),
        }
    }
    if problems.is_empty() {
        Ok(rows)
    } else {
        Err(CliError::Input(problems.join("; ")))
    }
}

/// Parses, validates and joins data with metadata.
pub fn ingest_bytes(data: &[u8], meta: &[u8]) -> Result<Ingested, CliError> {
    let rows = parse_table("data", data, DATA_HEADER)?;
    let meta_rows = parse_table("metadata", meta, META_HEADER)?;
    let mut meta_map = BTreeMap::new();
    for r in meta_rows {
        if meta_map.insert(r.liquid.clone(), (r.a, r.b)).is_some() {
            return Err(CliError::Input(format!("metadata line {}: duplicate liquid {}", r.line, r.liquid)));
        }
    }
    let mut grouped: BTreeMap<String, Vec<&Row>> = BTreeMap::new();
    for r in &rows {
        grouped.entry(r.liquid.clone()).or_default().push(r);
    }
    let missing: Vec<&str> = grouped
        .keys()
        .filter(|k| !meta_map.contains_key(*k))
        .map(String::as_str)
        .collect();
    if !missing.is_empty() {
        return Err(CliError::Input(format!("no metadata for liquid(s): {}", missing.join(", "))));
    }
    let mut flagged = Vec::new();
    let mut records = Vec::new();
    for (liquid, rs) in &grouped {
        let (t_l, eta_l) = meta_map[liquid];
        for r in rs.iter().filter(|r| r.a > t_l) {
            flagged.push(FlaggedRow {
                liquid: liquid.clone(),
                line: r.line,
                t_k: r.a,
            });
        }
        let pairs: Vec<(f64, f64)> = rs.iter().map(|r| (r.a, r.b)).collect();
        records.push(ViscosityRecord::new(liquid.as_str(), &pairs, t_l, eta_l)?);
    }
    Ok(Ingested {
        dataset: ViscosityDataset::new(records)?,
        flagged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const META: &str = "liquid,T_liquidus_K,eta_liquidus_Pa_s\na,1000,10\nb,800,1\n";

    #[test]
    fn two_liquids_no_flags() {
        let data = "liquid,T_K,eta_Pa_s\na,900,100\na,950,30\nb,700,50\n";
        let ing = ingest_bytes(data.as_bytes(), META.as_bytes()).unwrap();
        assert_eq!(ing.dataset.liquids().len(), 2);
        assert!(ing.flagged.is_empty());
    }

    #[test]
    fn non_positive_viscosity_is_rejected_with_line() {
        let data = "liquid,T_K,eta_Pa_s\na,900,100\na,950,0\n";
        let err = ingest_bytes(data.as_bytes(), META.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn above_liquidus_is_flagged() {
        let data = "liquid,T_K,eta_Pa_s\na,900,100\na,1100,3\n";
        let ing = ingest_bytes(data.as_bytes(), META.as_bytes()).unwrap();
        assert_eq!(ing.flagged, vec![FlaggedRow { liquid: "a".into(), line: 3, t_k: 1100.0 }]);
        assert_eq!(ing.dataset.liquids()[0].retained().count(), 1);
    }

    #[test]
    fn missing_metadata_lists_ids() {
        let data = "liquid,T_K,eta_Pa_s\nz,900,100\ny,900,1\n";
        let err = ingest_bytes(data.as_bytes(), META.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("y, z"), "{err}");
    }

    #[test]
    fn wrong_header() {
        let data = "liquid,T,eta\na,900,100\n";
        assert!(ingest_bytes(data.as_bytes(), META.as_bytes()).is_err());
    }
}
