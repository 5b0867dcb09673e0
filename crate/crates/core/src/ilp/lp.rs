//! CPLEX-LP export and a reader for the files this module writes.

use std::collections::HashMap;

use super::model::{IlpModel, ObjectiveSense, RowSense};
use crate::error::{KmpError, Result};

const WRAP_AT: usize = 200;

fn push_term(line: &mut String, out: &mut String, c: f64, name: &str, first: bool) {
    let term = match (c, first) {
        (1.0, true) => name.to_string(),
        (1.0, false) => format!("+ {name}"),
        (-1.0, _) => format!("- {name}"),
        (c, true) if c >= 0.0 => format!("{c} {name}"),
        (c, false) if c >= 0.0 => format!("+ {c} {name}"),
        (c, _) => format!("- {} {name}", -c),
    };
    if line.len() + term.len() > WRAP_AT {
        out.push_str(line.trim_end());
        out.push('\n');
        line.clear();
        line.push(' ');
    }
    line.push(' ');
    line.push_str(&term);
}

fn linear_expr(out: &mut String, head: &str, coeffs: &[(usize, f64)], vars: &[String]) -> String {
    let mut line = head.to_string();
    if coeffs.is_empty() {
        if let Some(v) = vars.first() {
            push_term(&mut line, out, 0.0, v, true);
        } else {
            line.push_str(" 0");
        }
    }
    for (n, &(v, c)) in coeffs.iter().enumerate() {
        push_term(&mut line, out, c, &vars[v], n == 0);
    }
    line
}

pub fn write_lp(m: &IlpModel) -> String {
    let vars = m.variables();
    let mut out = String::new();
    out.push_str(match m.sense() {
        ObjectiveSense::Maximize => "Maximize\n",
        ObjectiveSense::Minimize => "Minimize\n",
    });
    if m.objective().is_empty() {
        out.push_str("obj:\n");
    } else {
        let line = linear_expr(&mut out, "obj:", m.objective(), vars);
        out.push_str(&line);
        out.push('\n');
    }

    out.push_str("Subject To\n");
    for row in m.constraints() {
        let mut line = linear_expr(&mut out, &format!("{}:", row.name), &row.coeffs, vars);
        let op = match row.sense {
            RowSense::Le => "<=",
            RowSense::Ge => ">=",
        };
        line.push_str(&format!(" {op} {}", row.rhs));
        out.push_str(&line);
        out.push('\n');
    }

    if !vars.is_empty() {
        out.push_str("Binary\n");
        for chunk in vars.chunks(10) {
            out.push(' ');
            out.push_str(&chunk.join(" "));
            out.push('\n');
        }
    }
    out.push_str("End\n");
    out
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Start,
    Objective,
    Constraints,
    Binary,
    End,
}

struct RawRow {
    name: String,
    terms: Vec<(String, f64)>,
    sense: RowSense,
    rhs: f64,
    line: usize,
}

/// Parses `[+|-] [coef] name` terms until a comparison operator or the end
/// of `toks`. Returns the terms and the position after them.
fn parse_terms(toks: &[(usize, String)], mut pos: usize) -> Result<(Vec<(String, f64)>, usize)> {
    let mut terms = Vec::new();
    while pos < toks.len() {
        let (ln, tok) = &toks[pos];
        if is_operator(tok) {
            break;
        }
        let mut sign = 1.0;
        let mut tok = tok.as_str();
        if tok == "+" || tok == "-" {
            if tok == "-" {
                sign = -1.0;
            }
            pos += 1;
            tok = toks
                .get(pos)
                .map(|t| t.1.as_str())
                .ok_or_else(|| KmpError::parse(*ln, "dangling sign"))?;
        }
        let mut coef = 1.0;
        if let Ok(c) = tok.parse::<f64>() {
            coef = c;
            pos += 1;
            match toks.get(pos) {
                Some((_, t)) if !is_operator(t) => tok = t.as_str(),
                // bare constant, only meaningful as the empty-row placeholder
                _ => {
                    if c != 0.0 {
                        return Err(KmpError::parse(*ln, "constant terms are not supported"));
                    }
                    continue;
                }
            }
        }
        terms.push((tok.to_string(), sign * coef));
        pos += 1;
    }
    Ok((terms, pos))
}

fn is_operator(tok: &str) -> bool {
    matches!(tok, "<=" | ">=" | "=<" | "=>" | "<" | ">" | "=")
}

/// Reads a CPLEX-LP file holding a pure binary program. Column order is the
/// order of the `Binary` section.
pub fn read_lp(text: &str) -> Result<IlpModel> {
    let mut section = Section::Start;
    let mut sense = ObjectiveSense::Minimize;
    let mut obj_toks: Vec<(usize, String)> = Vec::new();
    let mut con_toks: Vec<(usize, String)> = Vec::new();
    let mut binaries: Vec<String> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let ln = idx + 1;
        let line = raw.split('\\').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let next = match line.to_ascii_lowercase().as_str() {
            "maximize" | "maximum" | "max" => {
                sense = ObjectiveSense::Maximize;
                Some(Section::Objective)
            }
            "minimize" | "minimum" | "min" => {
                sense = ObjectiveSense::Minimize;
                Some(Section::Objective)
            }
            "subject to" | "such that" | "st" | "s.t." => Some(Section::Constraints),
            "binary" | "binaries" | "bin" => Some(Section::Binary),
            "end" => Some(Section::End),
            _ => None,
        };
        if let Some(s) = next {
            section = s;
            continue;
        }
        let toks = line.split_whitespace().map(|t| (ln, t.to_string()));
        match section {
            Section::Objective => obj_toks.extend(toks),
            Section::Constraints => con_toks.extend(toks),
            Section::Binary => binaries.extend(toks.map(|t| t.1)),
            Section::Start | Section::End => {
                return Err(KmpError::parse(ln, "text outside a section"));
            }
        }
    }
    if section != Section::End {
        return Err(KmpError::parse(text.lines().count(), "missing End"));
    }

    let mut pos = 0;
    if obj_toks.first().is_some_and(|t| t.1.ends_with(':')) {
        pos = 1;
    }
    let (obj_terms, used) = parse_terms(&obj_toks, pos)?;
    if used != obj_toks.len() {
        return Err(KmpError::parse(obj_toks[used].0, "operator in objective"));
    }

    let mut rows = Vec::new();
    let mut pos = 0;
    while pos < con_toks.len() {
        let line = con_toks[pos].0;
        let name = match con_toks[pos].1.strip_suffix(':') {
            Some(name) => {
                pos += 1;
                name.to_string()
            }
            None => format!("R{}", rows.len() + 1),
        };
        let (terms, after) = parse_terms(&con_toks, pos)?;
        let op = con_toks
            .get(after)
            .ok_or_else(|| KmpError::parse(line, "constraint without operator"))?;
        let sense = match op.1.as_str() {
            "<=" | "=<" | "<" => RowSense::Le,
            ">=" | "=>" | ">" => RowSense::Ge,
            _ => return Err(KmpError::parse(op.0, "equality rows are not supported")),
        };
        let mut at = after + 1;
        let mut rhs_tok = con_toks
            .get(at)
            .map(|t| t.1.clone())
            .ok_or_else(|| KmpError::parse(op.0, "missing right-hand side"))?;
        if rhs_tok == "-" || rhs_tok == "+" {
            at += 1;
            let digits = con_toks
                .get(at)
                .ok_or_else(|| KmpError::parse(op.0, "missing right-hand side"))?;
            rhs_tok = format!("{rhs_tok}{}", digits.1);
        }
        let rhs = rhs_tok
            .parse::<f64>()
            .map_err(|_| KmpError::parse(op.0, format!("bad right-hand side `{rhs_tok}`")))?;
        rows.push(RawRow {
            name,
            terms,
            sense,
            rhs,
            line,
        });
        pos = at + 1;
    }

    let mut m = IlpModel::new(sense);
    let mut index = HashMap::new();
    for b in binaries {
        let v = m.add_binary(b.clone())?;
        index.insert(b, v);
    }
    let resolve = |terms: Vec<(String, f64)>, line: usize| -> Result<Vec<(usize, f64)>> {
        terms
            .into_iter()
            .filter(|&(_, c)| c != 0.0)
            .map(|(name, c)| {
                index
                    .get(&name)
                    .map(|&v| (v, c))
                    .ok_or_else(|| KmpError::parse(line, format!("`{name}` is not declared binary")))
            })
            .collect()
    };
    let obj_line = obj_toks.first().map_or(0, |t| t.0);
    m.set_objective(resolve(obj_terms, obj_line)?)?;
    for r in rows {
        let coeffs = resolve(r.terms, r.line)?;
        m.add_constraint(r.name, coeffs, r.sense, r.rhs)?;
    }
    Ok(m)
}
