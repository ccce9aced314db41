//! CSV tables passed between pipeline stages.

use std::io::{Read, Write};

use thiserror::Error;

use crate::bench::{Label, LabelTable, Runtime, RuntimeRecord, CONFIG_COUNT};
use crate::features::{FeatureVector, FEATURE_COUNT, FEATURE_NAMES};

#[derive(Debug, Error)]
pub enum TableError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("header mismatch: expected `{expected}`, found `{found}`")]
    Header { expected: String, found: String },
    #[error("row {row}: {message}")]
    Cell { row: usize, message: String },
}

fn check_header(found: &csv::StringRecord, expected: &[String]) -> Result<(), TableError> {
    if found.iter().eq(expected.iter().map(String::as_str)) {
        Ok(())
    } else {
        Err(TableError::Header { expected: expected.join(","), found: found.iter().collect::<Vec<_>>().join(",") })
    }
}

fn feature_header() -> Vec<String> {
    std::iter::once("ontology_id".to_string()).chain(FEATURE_NAMES.iter().map(|s| s.to_string())).collect()
}

fn benchmark_header() -> Vec<String> {
    std::iter::once("ontology_id".to_string()).chain((1..=CONFIG_COUNT).map(|i| format!("config_{i}"))).collect()
}

fn label_header() -> Vec<String> {
    ["ontology_id", "config", "label"].iter().map(|s| s.to_string()).collect()
}

fn cell_error(row: usize, message: impl Into<String>) -> TableError {
    TableError::Cell { row, message: message.into() }
}

/// Values are written in shortest round-trip decimal form.
pub fn write_feature_table<W: Write>(writer: W, rows: &[(String, FeatureVector)]) -> Result<(), TableError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(feature_header())?;
    for (id, fv) in rows {
        if let Some(i) = fv.values().iter().position(|v| !v.is_finite()) {
            return Err(cell_error(0, format!("{id}: {} is not finite", FEATURE_NAMES[i])));
        }
        let mut rec = vec![id.clone()];
        rec.extend(fv.values().iter().map(f64::to_string));
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_feature_table<R: Read>(reader: R) -> Result<Vec<(String, FeatureVector)>, TableError> {
    let mut r = csv::Reader::from_reader(reader);
    check_header(r.headers()?, &feature_header())?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let mut values = [0.0; FEATURE_COUNT];
        for (k, v) in values.iter_mut().enumerate() {
            let cell = &rec[k + 1];
            *v = cell
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| cell_error(row, format!("{}: `{cell}` is not a finite number", FEATURE_NAMES[k])))?;
        }
        out.push((rec[0].to_string(), FeatureVector(values)));
    }
    Ok(out)
}

/// Cells hold whole milliseconds (at least 1) or `TO`.
pub fn write_benchmark_table<W: Write>(writer: W, records: &[RuntimeRecord]) -> Result<(), TableError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(benchmark_header())?;
    for r in records {
        let mut rec = vec![r.id.clone()];
        rec.extend(r.runtimes.iter().map(|rt| match rt {
            Runtime::Millis(ms) => (ms.round().max(1.0) as u64).to_string(),
            Runtime::Timeout => "TO".to_string(),
        }));
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_benchmark_table<R: Read>(reader: R) -> Result<Vec<RuntimeRecord>, TableError> {
    let mut r = csv::Reader::from_reader(reader);
    check_header(r.headers()?, &benchmark_header())?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let mut runtimes = [Runtime::Timeout; CONFIG_COUNT];
        for (k, slot) in runtimes.iter_mut().enumerate() {
            let cell = rec[k + 1].trim();
            *slot = if cell == "TO" {
                Runtime::Timeout
            } else {
                match cell.parse::<u64>() {
                    Ok(ms) if ms > 0 => Runtime::Millis(ms as f64),
                    _ => return Err(cell_error(row, format!("config_{}: `{cell}` is neither a positive integer nor TO", k + 1))),
                }
            };
        }
        out.push(RuntimeRecord::new(&rec[0], runtimes));
    }
    Ok(out)
}

/// Long format: one `ontology_id,config,label` row per configuration.
pub fn write_label_table<W: Write>(writer: W, table: &LabelTable) -> Result<(), TableError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(label_header())?;
    for (id, labels) in &table.rows {
        for (k, l) in labels.iter().enumerate() {
            w.write_record([id.clone(), (k + 1).to_string(), l.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Rows may come in any order but every ontology needs all seven configs.
pub fn read_label_table<R: Read>(reader: R) -> Result<LabelTable, TableError> {
    let mut r = csv::Reader::from_reader(reader);
    check_header(r.headers()?, &label_header())?;
    let mut rows: Vec<(String, [Option<Label>; CONFIG_COUNT])> = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let cfg: usize = rec[1]
            .trim()
            .parse()
            .ok()
            .filter(|c| (1..=CONFIG_COUNT).contains(c))
            .ok_or_else(|| cell_error(row, format!("config `{}` is not in 1..7", &rec[1])))?;
        let label: Label = rec[2].trim().parse().map_err(|e: String| cell_error(row, e))?;
        let id = &rec[0];
        let idx = match rows.iter().position(|(rid, _)| rid == id) {
            Some(p) => p,
            None => {
                rows.push((id.to_string(), [None; CONFIG_COUNT]));
                rows.len() - 1
            }
        };
        rows[idx].1[cfg - 1] = Some(label);
    }
    let mut table = LabelTable::default();
    for (id, labels) in rows {
        let mut full = [Label::Bad; CONFIG_COUNT];
        for (k, l) in labels.iter().enumerate() {
            full[k] = l.ok_or_else(|| cell_error(0, format!("{id}: missing label for config {}", k + 1)))?;
        }
        table.rows.push((id, full));
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_only_feature_file_is_empty() {
        let text = feature_header().join(",") + "\n";
        assert!(read_feature_table(text.as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn zero_row_round_trip() {
        let rows = vec![("o1".to_string(), FeatureVector::default())];
        let mut buf = Vec::new();
        write_feature_table(&mut buf, &rows).unwrap();
        assert_eq!(read_feature_table(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn feature_schema_mismatch() {
        let err = read_feature_table("ontology_id,f00_exists\nx,1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, TableError::Header { .. }));
        let mut text = feature_header().join(",") + "\nx";
        for _ in 0..FEATURE_COUNT - 1 {
            text.push_str(",0");
        }
        text.push_str(",abc\n");
        assert!(matches!(read_feature_table(text.as_bytes()), Err(TableError::Cell { .. })));
    }

    #[test]
    fn benchmark_round_trip() {
        let mut r = RuntimeRecord::from_millis("a", [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]);
        r.runtimes[2] = Runtime::Timeout;
        let mut buf = Vec::new();
        write_benchmark_table(&mut buf, &[r.clone()]).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "ontology_id,config_1,config_2,config_3,config_4,config_5,config_6,config_7\na,1,2,TO,4,5,6,7\n"
        );
        assert_eq!(read_benchmark_table(buf.as_slice()).unwrap(), vec![r]);
    }

    #[test]
    fn sub_millisecond_runtimes_are_written_as_one() {
        let r = RuntimeRecord::from_millis("a", [0.2; 7]);
        let mut buf = Vec::new();
        write_benchmark_table(&mut buf, &[r]).unwrap();
        assert!(String::from_utf8(buf).unwrap().ends_with("a,1,1,1,1,1,1,1\n"));
    }

    #[test]
    fn label_round_trip() {
        let mut labels = [Label::Bad; 7];
        labels[3] = Label::Good;
        let table = LabelTable { rows: vec![("x".into(), labels), ("y".into(), [Label::Good; 7])] };
        let mut buf = Vec::new();
        write_label_table(&mut buf, &table).unwrap();
        assert_eq!(read_label_table(buf.as_slice()).unwrap(), table);
        assert!(read_label_table("ontology_id,config,label\nx,1,Good\n".as_bytes()).is_err());
    }
}
