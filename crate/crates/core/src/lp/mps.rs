//! MPS reader (fixed or free format, tokenized on whitespace) and a free-format writer.

use std::collections::HashMap;
use std::fmt::Write as _;

use log::warn;

use super::{LinearRow, NominalLp};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sense {
    Le,
    Ge,
    Eq,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Start,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
    End,
}

struct RawRow {
    name: String,
    sense: Sense,
    entries: Vec<(usize, f64)>,
    rhs: f64,
    range: Option<f64>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn number(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite() || tok.to_ascii_lowercase().contains("inf"))
        .ok_or_else(|| parse_err(line, format!("expected a number, found '{tok}'")))
}

/// Parses MPS text. `G` rows are negated into `≤` rows and ranged rows become two
/// inequalities named `R` and `R_rng`. Default bounds are `[0, ∞)`.
pub fn parse_mps(text: &str) -> Result<NominalLp> {
    let mut name = String::new();
    let mut section = Section::Start;
    let mut rows: Vec<RawRow> = Vec::new();
    let mut row_index: HashMap<String, usize> = HashMap::new();
    let mut objective_row: Option<usize> = None;
    let mut col_names: Vec<String> = Vec::new();
    let mut col_index: HashMap<String, usize> = HashMap::new();
    let mut objective: Vec<f64> = Vec::new();
    let mut bounds: Vec<(f64, f64)> = Vec::new();
    let mut objective_offset = 0.0;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if !raw.starts_with([' ', '\t']) {
            section = match toks[0] {
                "NAME" => {
                    name = toks[1..].join(" ");
                    Section::Start
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "RANGES" => Section::Ranges,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => Section::End,
                other => return Err(parse_err(line, format!("unknown section '{other}'"))),
            };
            if section == Section::End {
                break;
            }
            continue;
        }
        match section {
            Section::Start => return Err(parse_err(line, "data line before the ROWS section")),
            Section::End => unreachable!("loop exits at ENDATA"),
            Section::Rows => {
                if toks.len() != 2 {
                    return Err(parse_err(line, "ROWS entry needs a sense and a name"));
                }
                let sense = match toks[0] {
                    "N" | "n" => Sense::Free,
                    "L" | "l" => Sense::Le,
                    "G" | "g" => Sense::Ge,
                    "E" | "e" => Sense::Eq,
                    other => return Err(parse_err(line, format!("unknown row sense '{other}'"))),
                };
                let row_name = toks[1].to_string();
                if row_index.contains_key(&row_name) {
                    return Err(parse_err(line, format!("duplicate row '{row_name}'")));
                }
                if sense == Sense::Free {
                    if objective_row.is_none() {
                        objective_row = Some(rows.len());
                    } else {
                        warn!("line {line}: extra free row '{row_name}' ignored");
                    }
                }
                row_index.insert(row_name.clone(), rows.len());
                rows.push(RawRow { name: row_name, sense, entries: Vec::new(), rhs: 0.0, range: None });
            }
            Section::Columns => {
                if toks.len() >= 3 && toks[1].contains("MARKER") {
                    let marker = toks[2..].iter().find(|t| t.contains("INT"));
                    match marker.map(|t| t.trim_matches('\'')) {
                        Some("INTORG") => warn!("line {line}: integer markers ignored, solving the LP relaxation"),
                        Some("INTEND") => {}
                        _ => return Err(parse_err(line, "unrecognized MARKER line")),
                    }
                    continue;
                }
                if toks.len() != 3 && toks.len() != 5 {
                    return Err(parse_err(line, "COLUMNS entry needs 3 or 5 fields"));
                }
                let col = match col_index.get(toks[0]) {
                    Some(&c) => c,
                    None => {
                        let c = col_names.len();
                        col_index.insert(toks[0].to_string(), c);
                        col_names.push(toks[0].to_string());
                        objective.push(0.0);
                        bounds.push((0.0, f64::INFINITY));
                        c
                    }
                };
                for pair in toks[1..].chunks(2) {
                    let r =
                        *row_index.get(pair[0]).ok_or_else(|| parse_err(line, format!("unknown row '{}'", pair[0])))?;
                    let v = number(pair[1], line)?;
                    let row = &mut rows[r];
                    if row.entries.iter().any(|(c, _)| *c == col) {
                        return Err(parse_err(
                            line,
                            format!("duplicate entry for column '{}' in row '{}'", toks[0], pair[0]),
                        ));
                    }
                    row.entries.push((col, v));
                    if Some(r) == objective_row {
                        objective[col] = v;
                    }
                }
            }
            Section::Rhs | Section::Ranges => {
                // An optional set name precedes the (row, value) pairs.
                let pairs = if toks.len() % 2 == 1 { &toks[1..] } else { &toks[..] };
                if pairs.is_empty() {
                    return Err(parse_err(line, "entry has no (row, value) pair"));
                }
                for pair in pairs.chunks(2) {
                    let r =
                        *row_index.get(pair[0]).ok_or_else(|| parse_err(line, format!("unknown row '{}'", pair[0])))?;
                    let v = number(pair[1], line)?;
                    if section == Section::Rhs {
                        if Some(r) == objective_row {
                            objective_offset = -v;
                        } else {
                            rows[r].rhs = v;
                        }
                    } else {
                        if rows[r].sense == Sense::Free {
                            return Err(parse_err(line, format!("range on free row '{}'", pair[0])));
                        }
                        rows[r].range = Some(v);
                    }
                }
            }
            Section::Bounds => {
                let kind = toks[0].to_ascii_uppercase();
                let needs_value = !matches!(kind.as_str(), "FR" | "MI" | "PL" | "BV");
                let (col_tok, value_tok) = match (needs_value, toks.len()) {
                    (true, 4) => (toks[2], Some(toks[3])),
                    (true, 3) => (toks[1], Some(toks[2])),
                    (false, 3) => (toks[2], toks.get(3).copied()),
                    (false, 2) => (toks[1], None),
                    (false, 4) => (toks[2], None),
                    _ => return Err(parse_err(line, "malformed BOUNDS entry")),
                };
                let c =
                    *col_index.get(col_tok).ok_or_else(|| parse_err(line, format!("unknown column '{col_tok}'")))?;
                let value = value_tok.map(|t| number(t, line)).transpose()?;
                let b = &mut bounds[c];
                match (kind.as_str(), value) {
                    ("UP", Some(v)) => b.1 = v,
                    ("LO", Some(v)) => b.0 = v,
                    ("FX", Some(v)) => *b = (v, v),
                    ("FR", _) => *b = (f64::NEG_INFINITY, f64::INFINITY),
                    ("MI", _) => b.0 = f64::NEG_INFINITY,
                    ("PL", _) => b.1 = f64::INFINITY,
                    ("BV", _) => {
                        warn!("line {line}: binary bound on '{col_tok}' relaxed to [0, 1]");
                        *b = (0.0, 1.0);
                    }
                    ("UI", Some(v)) => {
                        warn!("line {line}: integer bound on '{col_tok}' read as continuous");
                        b.1 = v;
                    }
                    ("LI", Some(v)) => {
                        warn!("line {line}: integer bound on '{col_tok}' read as continuous");
                        b.0 = v;
                    }
                    (other, _) => return Err(parse_err(line, format!("unknown bound type '{other}'"))),
                }
            }
        }
    }
    if section != Section::End {
        return Err(parse_err(last_line.max(1), "missing ENDATA"));
    }

    let n = col_names.len();
    let dense = |entries: &[(usize, f64)], sign: f64| -> Vec<f64> {
        let mut v = vec![0.0; n];
        for &(c, a) in entries {
            v[c] = sign * a;
        }
        v
    };
    let mut ineq = Vec::new();
    let mut eq = Vec::new();
    for row in &rows {
        if row.sense == Sense::Free {
            continue;
        }
        let rng_name = format!("{}_rng", row.name);
        match (row.sense, row.range) {
            (Sense::Le, None) => ineq.push(LinearRow::new(&row.name, dense(&row.entries, 1.0), row.rhs)),
            (Sense::Ge, None) => ineq.push(LinearRow::new(&row.name, dense(&row.entries, -1.0), -row.rhs)),
            (Sense::Eq, None) => eq.push(LinearRow::new(&row.name, dense(&row.entries, 1.0), row.rhs)),
            (Sense::Le, Some(rg)) => {
                ineq.push(LinearRow::new(&row.name, dense(&row.entries, 1.0), row.rhs));
                ineq.push(LinearRow::new(rng_name, dense(&row.entries, -1.0), -(row.rhs - rg.abs())));
            }
            (Sense::Ge, Some(rg)) => {
                ineq.push(LinearRow::new(&row.name, dense(&row.entries, -1.0), -row.rhs));
                ineq.push(LinearRow::new(rng_name, dense(&row.entries, 1.0), row.rhs + rg.abs()));
            }
            (Sense::Eq, Some(rg)) => {
                let (lo, hi) = if rg >= 0.0 { (row.rhs, row.rhs + rg) } else { (row.rhs + rg, row.rhs) };
                ineq.push(LinearRow::new(&row.name, dense(&row.entries, -1.0), -lo));
                ineq.push(LinearRow::new(rng_name, dense(&row.entries, 1.0), hi));
            }
            (Sense::Free, _) => unreachable!(),
        }
    }
    let (lower, upper) = bounds.into_iter().unzip();
    let lp = NominalLp { name, objective, objective_offset, ineq, eq, lower, upper, col_names };
    lp.validate()?;
    Ok(lp)
}

fn fmt_num(v: f64) -> String {
    // `{:?}` prints the shortest representation that round-trips exactly.
    format!("{v:?}")
}

/// Writes `lp` as free-format MPS. Inequalities are emitted as `L` rows, so the
/// output contains no `G` rows and no RANGES section.
pub fn write_mps(lp: &NominalLp) -> String {
    let mut out = String::new();
    let obj = unique_objective_name(lp);
    let _ = writeln!(out, "NAME {}", if lp.name.is_empty() { "UNNAMED" } else { &lp.name });
    out.push_str("ROWS\n");
    let _ = writeln!(out, " N {obj}");
    for row in &lp.ineq {
        let _ = writeln!(out, " L {}", row.name);
    }
    for row in &lp.eq {
        let _ = writeln!(out, " E {}", row.name);
    }
    out.push_str("COLUMNS\n");
    for (j, col) in lp.col_names.iter().enumerate() {
        let mut wrote = false;
        if lp.objective[j] != 0.0 {
            let _ = writeln!(out, " {col} {obj} {}", fmt_num(lp.objective[j]));
            wrote = true;
        }
        for row in lp.ineq.iter().chain(&lp.eq) {
            if row.coeffs[j] != 0.0 {
                let _ = writeln!(out, " {col} {} {}", row.name, fmt_num(row.coeffs[j]));
                wrote = true;
            }
        }
        if !wrote {
            // Keep empty columns: an explicit zero objective entry.
            let _ = writeln!(out, " {col} {obj} 0.0");
        }
    }
    out.push_str("RHS\n");
    if lp.objective_offset != 0.0 {
        let _ = writeln!(out, " RHS {obj} {}", fmt_num(-lp.objective_offset));
    }
    for row in lp.ineq.iter().chain(&lp.eq) {
        if row.rhs != 0.0 {
            let _ = writeln!(out, " RHS {} {}", row.name, fmt_num(row.rhs));
        }
    }
    out.push_str("BOUNDS\n");
    for (j, col) in lp.col_names.iter().enumerate() {
        let (l, u) = (lp.lower[j], lp.upper[j]);
        if l == u {
            let _ = writeln!(out, " FX BND {col} {}", fmt_num(l));
            continue;
        }
        if l == f64::NEG_INFINITY && u == f64::INFINITY {
            let _ = writeln!(out, " FR BND {col}");
            continue;
        }
        if l == f64::NEG_INFINITY {
            let _ = writeln!(out, " MI BND {col}");
        } else if l != 0.0 {
            let _ = writeln!(out, " LO BND {col} {}", fmt_num(l));
        }
        if u != f64::INFINITY {
            let _ = writeln!(out, " UP BND {col} {}", fmt_num(u));
        }
    }
    out.push_str("ENDATA\n");
    out
}

fn unique_objective_name(lp: &NominalLp) -> String {
    let mut name = String::from("OBJ");
    while lp.ineq.iter().chain(&lp.eq).any(|r| r.name == name) {
        name.push('_');
    }
    name
}
