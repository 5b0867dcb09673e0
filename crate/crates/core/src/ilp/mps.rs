//! MPS export and a reader for the files this module writes.
//!
//! Free format separates fields by whitespace. Fixed format places fields at
//! columns 2, 5, 15, 25 (names limited to 8 characters, values to 12).
//! Every column is declared `BV`.

use std::fmt::Write as _;

use super::model::{IlpModel, ObjectiveSense, RowSense};
use crate::error::{KmpError, Result};

const MODEL_NAME: &str = "KMP";
const OBJ_ROW: &str = "obj";
const RHS_SET: &str = "RHS";
const BOUND_SET: &str = "BND";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MpsFormat {
    #[default]
    Free,
    Fixed,
}

struct Fields {
    format: MpsFormat,
}

impl Fields {
    fn name<'a>(&self, s: &'a str) -> Result<&'a str> {
        if self.format == MpsFormat::Fixed && s.len() > 8 {
            return Err(KmpError::NameTooLong(s.to_string()));
        }
        Ok(s)
    }

    fn value(&self, v: f64) -> Result<String> {
        let s = v.to_string();
        if self.format == MpsFormat::Fixed && s.len() > 12 {
            return Err(KmpError::FieldTooWide(s));
        }
        Ok(s)
    }

    /// A data line: code, then up to two name fields, then a value.
    fn line(&self, out: &mut String, code: &str, a: &str, b: &str, v: Option<&str>) {
        match self.format {
            MpsFormat::Free => {
                let mut parts = vec![code, a, b];
                parts.retain(|p| !p.is_empty());
                if let Some(v) = v {
                    parts.push(v);
                }
                let _ = writeln!(out, " {}", parts.join("  "));
            }
            MpsFormat::Fixed => {
                let mut l = format!(" {code:<2} {a:<8}  {b:<8}");
                if let Some(v) = v {
                    let _ = write!(l, "  {v:>12}");
                }
                let _ = writeln!(out, "{}", l.trim_end());
            }
        }
    }
}

fn row_code(sense: RowSense) -> &'static str {
    match sense {
        RowSense::Le => "L",
        RowSense::Ge => "G",
    }
}

pub fn write_mps(m: &IlpModel, format: MpsFormat) -> Result<String> {
    let f = Fields { format };
    let mut out = String::new();
    match format {
        MpsFormat::Free => out.push_str(&format!("NAME {MODEL_NAME}\n")),
        MpsFormat::Fixed => out.push_str(&format!("NAME          {MODEL_NAME}\n")),
    }
    out.push_str("OBJSENSE\n");
    out.push_str(match m.sense() {
        ObjectiveSense::Maximize => "    MAX\n",
        ObjectiveSense::Minimize => "    MIN\n",
    });

    out.push_str("ROWS\n");
    f.line(&mut out, "N", OBJ_ROW, "", None);
    for row in m.constraints() {
        f.line(&mut out, row_code(row.sense), f.name(&row.name)?, "", None);
    }

    // column-major view: objective entry first, then rows in model order
    let mut columns: Vec<Vec<(&str, f64)>> = vec![Vec::new(); m.variables().len()];
    for &(v, c) in m.objective() {
        columns[v].push((OBJ_ROW, c));
    }
    for row in m.constraints() {
        for &(v, c) in &row.coeffs {
            columns[v].push((&row.name, c));
        }
    }
    out.push_str("COLUMNS\n");
    for (name, entries) in m.variables().iter().zip(&columns) {
        let name = f.name(name)?;
        if entries.is_empty() {
            f.line(&mut out, "", name, OBJ_ROW, Some("0"));
        }
        for &(row, c) in entries {
            f.line(&mut out, "", name, row, Some(&f.value(c)?));
        }
    }

    out.push_str("RHS\n");
    for row in m.constraints() {
        if row.rhs != 0.0 {
            f.line(&mut out, "", RHS_SET, &row.name, Some(&f.value(row.rhs)?));
        }
    }

    out.push_str("BOUNDS\n");
    for name in m.variables() {
        f.line(&mut out, "BV", BOUND_SET, name, None);
    }
    out.push_str("ENDATA\n");
    Ok(out)
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Start,
    Name,
    ObjSense,
    Rows,
    Columns,
    Rhs,
    Bounds,
    End,
}

fn parse_value(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| KmpError::parse(line, format!("bad number `{tok}`")))
}

/// Reads an MPS file (free or fixed) holding a pure binary program.
pub fn read_mps(text: &str) -> Result<IlpModel> {
    let mut section = Section::Start;
    let mut sense = ObjectiveSense::Minimize;
    let mut obj_row: Option<String> = None;
    let mut rows: Vec<(String, RowSense)> = Vec::new();
    let mut row_pos = std::collections::HashMap::new();
    let mut columns: Vec<String> = Vec::new();
    let mut col_pos = std::collections::HashMap::new();
    let mut objective: Vec<(usize, f64)> = Vec::new();
    let mut coeffs: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    let mut binary: Vec<bool> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let ln = idx + 1;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if !raw.starts_with(char::is_whitespace) {
            section = match toks[0] {
                "NAME" => Section::Name,
                "OBJSENSE" => {
                    if let Some(s) = toks.get(1) {
                        sense = parse_sense(s, ln)?;
                    }
                    Section::ObjSense
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => Section::End,
                other => return Err(KmpError::parse(ln, format!("unknown section `{other}`"))),
            };
            continue;
        }
        match section {
            Section::Start | Section::Name | Section::End => {
                return Err(KmpError::parse(ln, "data line outside a section"));
            }
            Section::ObjSense => sense = parse_sense(toks[0], ln)?,
            Section::Rows => {
                let [code, name] = toks[..] else {
                    return Err(KmpError::parse(ln, "ROWS entries need a type and a name"));
                };
                let rs = match code {
                    "N" => {
                        if obj_row.is_some() {
                            return Err(KmpError::parse(ln, "second objective row"));
                        }
                        obj_row = Some(name.to_string());
                        continue;
                    }
                    "L" => RowSense::Le,
                    "G" => RowSense::Ge,
                    other => {
                        return Err(KmpError::parse(ln, format!("unsupported row type `{other}`")))
                    }
                };
                if row_pos.insert(name.to_string(), rows.len()).is_some() {
                    return Err(KmpError::parse(ln, format!("duplicate row `{name}`")));
                }
                rows.push((name.to_string(), rs));
                coeffs.push(Vec::new());
                rhs.push(0.0);
            }
            Section::Columns => {
                if toks.contains(&"'MARKER'") {
                    continue;
                }
                if toks.len() != 3 && toks.len() != 5 {
                    return Err(KmpError::parse(ln, "COLUMNS entries need 3 or 5 fields"));
                }
                let col = toks[0];
                let v = match columns.last() {
                    Some(last) if last == col => columns.len() - 1,
                    _ => {
                        if col_pos.contains_key(col) {
                            return Err(KmpError::parse(ln, format!("column `{col}` is split")));
                        }
                        col_pos.insert(col.to_string(), columns.len());
                        columns.push(col.to_string());
                        binary.push(false);
                        columns.len() - 1
                    }
                };
                for pair in toks[1..].chunks(2) {
                    let c = parse_value(pair[1], ln)?;
                    if obj_row.as_deref() == Some(pair[0]) {
                        if c != 0.0 {
                            objective.push((v, c));
                        }
                    } else {
                        let r = *row_pos
                            .get(pair[0])
                            .ok_or_else(|| KmpError::parse(ln, format!("unknown row `{}`", pair[0])))?;
                        if c != 0.0 {
                            coeffs[r].push((v, c));
                        }
                    }
                }
            }
            Section::Rhs => {
                let body = if toks.len() % 2 == 1 { &toks[1..] } else { &toks[..] };
                for pair in body.chunks(2) {
                    if pair.len() != 2 {
                        return Err(KmpError::parse(ln, "RHS entry without value"));
                    }
                    let r = *row_pos
                        .get(pair[0])
                        .ok_or_else(|| KmpError::parse(ln, format!("unknown row `{}`", pair[0])))?;
                    rhs[r] = parse_value(pair[1], ln)?;
                }
            }
            Section::Bounds => {
                let (kind, var) = match toks[..] {
                    [kind, _, var] | [kind, var] => (kind, var),
                    _ => return Err(KmpError::parse(ln, "malformed bound")),
                };
                if kind != "BV" {
                    return Err(KmpError::parse(ln, format!("unsupported bound `{kind}`")));
                }
                let v = *col_pos
                    .get(var)
                    .ok_or_else(|| KmpError::parse(ln, format!("unknown column `{var}`")))?;
                binary[v] = true;
            }
        }
    }
    if section != Section::End {
        return Err(KmpError::parse(text.lines().count(), "missing ENDATA"));
    }
    if let Some(v) = binary.iter().position(|b| !b) {
        return Err(KmpError::parse(
            0,
            format!("column `{}` is not declared binary", columns[v]),
        ));
    }

    let mut m = IlpModel::new(sense);
    for c in columns {
        m.add_binary(c)?;
    }
    m.set_objective(objective)?;
    for (((name, rs), row), b) in rows.into_iter().zip(coeffs).zip(rhs) {
        m.add_constraint(name, row, rs, b)?;
    }
    Ok(m)
}

fn parse_sense(tok: &str, line: usize) -> Result<ObjectiveSense> {
    match tok {
        "MAX" | "MAXIMIZE" => Ok(ObjectiveSense::Maximize),
        "MIN" | "MINIMIZE" => Ok(ObjectiveSense::Minimize),
        other => Err(KmpError::parse(line, format!("unknown objective sense `{other}`"))),
    }
}
