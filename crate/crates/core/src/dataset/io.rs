use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Cell, Column, ColumnKind, ColumnRole, Dataset, Record, Schema};
use crate::{Error, Result};

/// How to read a delimited file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LoadOptions {
    pub delimiter: char,
    pub has_header: bool,
    /// Target column name; the last column when unset.
    pub target: Option<String>,
    /// Forces the target's kind instead of inferring it.
    pub target_kind: Option<ColumnKind>,
    /// Identifier columns kept out of the feature set.
    pub id_columns: Vec<String>,
    /// Tokens read as missing besides the empty field.
    pub missing_tokens: Vec<String>,
    /// Collapse a categorical target to `{positive_class, rest}`.
    pub positive_class: Option<String>,
    #[serde(skip)]
    pub schema_hint: Option<Schema>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            delimiter: ',',
            has_header: true,
            target: None,
            target_kind: None,
            id_columns: Vec::new(),
            missing_tokens: vec!["?".into()],
            positive_class: None,
            schema_hint: None,
        }
    }
}

pub const REST_CLASS: &str = "rest";

pub fn load_dataset(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut d = parse_delimited(&text, &path.display().to_string(), opts)?;
    d.provenance.source = Some(path.to_path_buf());
    Ok(d)
}

pub(crate) fn parse_delimited(text: &str, label: &str, opts: &LoadOptions) -> Result<Dataset> {
    let delimiter = u8::try_from(opts.delimiter)
        .map_err(|_| Error::Config(format!("delimiter {:?} is not ASCII", opts.delimiter)))?;
    let normalized = text.replace("\r\n", "\n").replace('\r', "\n");
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(normalized.as_bytes());

    let mut raw: Vec<(u64, Vec<String>)> = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Parse {
            path: label.to_string(),
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        raw.push((line, rec.iter().map(str::to_string).collect()));
    }

    let header: Vec<String> = if opts.has_header {
        if raw.is_empty() {
            return Err(Error::EmptyInput(format!("{label} has no header row")));
        }
        raw.remove(0).1
    } else {
        match &opts.schema_hint {
            Some(s) => s.columns().iter().map(|c| c.name.clone()).collect(),
            None => {
                return Err(Error::Config(format!(
                    "{label}: no header row and no schema hint"
                )))
            }
        }
    };
    if raw.is_empty() {
        return Err(Error::EmptyInput(format!("{label} has no data rows")));
    }
    for (line, fields) in &raw {
        if fields.len() != header.len() {
            return Err(Error::Parse {
                path: label.to_string(),
                line: *line,
                message: format!("expected {} fields, found {}", header.len(), fields.len()),
            });
        }
    }

    let is_missing = |tok: &str| tok.is_empty() || opts.missing_tokens.iter().any(|m| m == tok);

    let schema = match &opts.schema_hint {
        Some(hint) => {
            if hint.arity() != header.len() {
                return Err(Error::Schema(format!(
                    "schema hint has {} columns, file has {}",
                    hint.arity(),
                    header.len()
                )));
            }
            hint.clone()
        }
        None => infer_schema(&header, &raw, opts, &is_missing)?,
    };

    let mut rows = Vec::with_capacity(raw.len());
    for (line, fields) in &raw {
        let mut cells = Vec::with_capacity(fields.len());
        for (tok, col) in fields.iter().zip(schema.columns()) {
            let cell = if is_missing(tok) {
                Cell::Missing
            } else {
                match col.kind {
                    ColumnKind::Numeric => match parse_number(tok) {
                        Some(v) => Cell::Numeric(v),
                        None => {
                            return Err(Error::Type {
                                line: *line,
                                column: col.name.clone(),
                                token: tok.clone(),
                            })
                        }
                    },
                    ColumnKind::Categorical => Cell::Categorical(tok.clone()),
                }
            };
            cells.push(cell);
        }
        rows.push(Record::new(cells));
    }

    let schema = match &opts.positive_class {
        Some(pos) => binarize_target(schema, &mut rows, pos)?,
        None => schema,
    };
    Dataset::with_source(schema, rows, None)
}

fn parse_number(tok: &str) -> Option<f64> {
    tok.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn infer_schema(
    header: &[String],
    raw: &[(u64, Vec<String>)],
    opts: &LoadOptions,
    is_missing: &dyn Fn(&str) -> bool,
) -> Result<Schema> {
    let target = match &opts.target {
        Some(t) => header
            .iter()
            .position(|h| h == t)
            .ok_or_else(|| Error::Binding(format!("target column `{t}` not in header")))?,
        None => header.len() - 1,
    };
    for id in &opts.id_columns {
        if !header.contains(id) {
            return Err(Error::Binding(format!("id column `{id}` not in header")));
        }
    }
    let columns = header
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let numeric = raw
                .iter()
                .map(|(_, f)| f[i].as_str())
                .filter(|t| !is_missing(t))
                .all(|t| parse_number(t).is_some());
            let inferred = if numeric {
                ColumnKind::Numeric
            } else {
                ColumnKind::Categorical
            };
            let (kind, role) = if i == target {
                (opts.target_kind.unwrap_or(inferred), ColumnRole::Target)
            } else if opts.id_columns.contains(name) {
                (inferred, ColumnRole::EntityKey)
            } else {
                (inferred, ColumnRole::Feature)
            };
            Column::new(name.clone(), kind, role)
        })
        .collect();
    Schema::new(columns)
}

fn binarize_target(schema: Schema, rows: &mut [Record], positive: &str) -> Result<Schema> {
    if !schema.has_categorical_target() {
        return Err(Error::Config(
            "positive_class needs a categorical target".into(),
        ));
    }
    let t = schema.target_index();
    let mut found = false;
    for r in rows.iter_mut() {
        if let Cell::Categorical(s) = &mut r.cells[t] {
            if s == positive {
                found = true;
            } else {
                *s = REST_CLASS.to_string();
            }
        }
    }
    if !found {
        return Err(Error::Config(format!(
            "positive class `{positive}` never occurs in the target"
        )));
    }
    schema.with_classes(Vec::new())
}

pub(crate) fn to_delimited(d: &Dataset, delimiter: u8) -> String {
    let mut w = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(d.schema().columns().iter().map(|c| c.name.as_str()))
        .expect("in-memory write");
    for r in d.rows() {
        w.write_record(r.cells.iter().map(|c| c.to_string()))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

/// Writes `d` in canonical form with the given delimiter.
pub fn save_dataset(d: &Dataset, path: impl AsRef<Path>, delimiter: char) -> Result<()> {
    let path = path.as_ref();
    let delimiter = u8::try_from(delimiter)
        .map_err(|_| Error::Config(format!("delimiter {delimiter:?} is not ASCII")))?;
    std::fs::write(path, to_delimited(d, delimiter)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY: &str = "a,b,label\n1,x,yes\n2.5,y,no\n,x,yes\n";

    #[test]
    fn infers_kinds_and_missing() {
        let d = parse_delimited(TOY, "toy", &LoadOptions::default()).unwrap();
        let kinds: Vec<_> = d.schema().columns().iter().map(|c| c.kind).collect();
        assert_eq!(
            kinds,
            [ColumnKind::Numeric, ColumnKind::Categorical, ColumnKind::Categorical]
        );
        assert_eq!(d.len(), 3);
        assert!(d.cell(2, 0).is_missing());
        assert_eq!(d.schema().n_classes(), 2);
    }

    #[test]
    fn arity_mismatch_names_the_line() {
        let err = parse_delimited("a,b\n1,2\n3\n", "bad", &LoadOptions::default()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn header_only_is_empty_input() {
        let err = parse_delimited("a,b\n", "h", &LoadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::EmptyInput(_)));
        let err = parse_delimited("", "e", &LoadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::EmptyInput(_)));
    }

    #[test]
    fn hinted_numeric_column_rejects_tokens() {
        let hint = Schema::new(vec![
            Column::new("a", ColumnKind::Numeric, ColumnRole::Feature),
            Column::new("b", ColumnKind::Categorical, ColumnRole::Target),
        ])
        .unwrap();
        let opts = LoadOptions {
            schema_hint: Some(hint),
            ..Default::default()
        };
        let err = parse_delimited("a,b\n1,x\nfoo,y\n", "t", &opts).unwrap_err();
        assert!(matches!(err, Error::Type { line: 3, .. }));
    }

    #[test]
    fn headerless_file_uses_hint_names() {
        let hint = Schema::new(vec![
            Column::new("a", ColumnKind::Numeric, ColumnRole::Feature),
            Column::new("b", ColumnKind::Categorical, ColumnRole::Target),
        ])
        .unwrap();
        let opts = LoadOptions {
            has_header: false,
            schema_hint: Some(hint),
            ..Default::default()
        };
        let d = parse_delimited("1,x\n2,y\n", "t", &opts).unwrap();
        assert_eq!(d.len(), 2);
        let no_hint = LoadOptions {
            has_header: false,
            ..Default::default()
        };
        assert!(matches!(
            parse_delimited("1,x\n", "t", &no_hint),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn canonical_text_normalizes_tokens() {
        let d = parse_delimited("a , b\r\n 1.50 , x \r\n?,y\r\n", "t", &LoadOptions::default())
            .unwrap();
        assert_eq!(d.canonical_text(), "a,b\n1.5,x\n,y\n");
    }

    #[test]
    fn positive_class_binarizes() {
        let opts = LoadOptions {
            positive_class: Some("no".into()),
            ..Default::default()
        };
        let d = parse_delimited(TOY, "toy", &opts).unwrap();
        assert_eq!(d.schema().classes(), [REST_CLASS, "no"]);
    }
}
