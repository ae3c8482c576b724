//! Free-format MPS reader.
//!
//! Accepts whitespace-delimited MPS text (fixed-format files parse too,
//! since their column positions are whitespace-separated) with the
//! sections NAME, ROWS (N/L/G/E), COLUMNS with INTORG/INTEND markers,
//! RHS, RANGES, BOUNDS (LO, UP, FX, FR, MI, PL, BV, LI, UI) and ENDATA.
//! Objective (N) rows are parsed and discarded; this reader only models
//! the constraint system.
//!
//! Conventions, chosen to match the most common reader behavior:
//!
//! * Row senses map to constraint sides: L gives (-inf, b], G gives
//!   [b, +inf), E gives [b, b], with b = 0 when no RHS entry names the
//!   row.
//! * RANGES with value r widen a row: L becomes [b - |r|, b], G becomes
//!   [b, b + |r|], and E becomes [b, b + r] for r >= 0 and [b + r, b]
//!   for r < 0. So sense E with RHS 4 and range 2 yields [4, 6], and
//!   range -2 yields [2, 4].
//! * The default domain is [0, +inf), also for integer columns; an
//!   integer column with no explicit upper bound gets a diagnostic.
//! * UP with a negative value on a column with no explicit lower bound
//!   sets the lower bound to -inf (with a warning), following the
//!   historical convention that such entries describe negative variables.
//! * Values with magnitude at or above the infinity threshold are read
//!   as infinite bounds. A row whose two sides both end up infinite
//!   constrains nothing and is dropped with a warning.
//! * Duplicate coefficients for one column/row pair are summed, and
//!   duplicate RHS/RANGES/BOUNDS entries overwrite, each with a warning.
//!
//! All diagnostics carry 1-based line numbers; line 0 marks file-level
//! notes that no single line causes.

use crate::ext::ExtReal;
use crate::model::{LinearConstraint, ModelError, ProblemInstance, VariableDomain};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MpsError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown section '{name}'")]
    UnknownSection { line: usize, name: String },
    #[error("line {line}: unknown row '{name}'")]
    UnknownRow { line: usize, name: String },
    #[error("line {line}: duplicate row '{name}'")]
    DuplicateRow { line: usize, name: String },
    #[error("line {line}: unknown column '{name}'")]
    UnknownColumn { line: usize, name: String },
    #[error("line {line}: cannot parse number '{token}'")]
    BadNumber { line: usize, token: String },
    #[error("column '{column}': {source}")]
    InvalidDomain { column: String, source: ModelError },
    #[error("row '{row}': {source}")]
    InvalidRow { row: String, source: ModelError },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A non-fatal observation made while parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// 1-based source line, or 0 for file-level notes.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseDiagnostics {
    pub warnings: Vec<Diagnostic>,
}

impl ParseDiagnostics {
    fn warn(&mut self, line: usize, message: impl Into<String>) {
        self.warnings.push(Diagnostic {
            line,
            message: message.into(),
        });
    }
}

/// A parsed file: the instance plus the source names of its rows and
/// columns, index-aligned with the instance's constraints and variables.
#[derive(Debug, Clone)]
pub struct ParsedMps {
    pub instance: ProblemInstance,
    pub name: Option<String>,
    pub row_names: Vec<String>,
    pub column_names: Vec<String>,
    pub diagnostics: ParseDiagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RowKind {
    Less,
    Greater,
    Equal,
}

#[derive(Debug, Clone, Copy)]
enum RowId {
    /// An N row; coefficients and RHS entries for it are discarded.
    Free,
    /// Index into the constraint row list.
    Constraint(usize),
}

#[derive(Debug)]
struct RowData {
    name: String,
    kind: RowKind,
    /// Column index -> summed coefficient.
    terms: HashMap<usize, f64>,
    rhs: Option<f64>,
    range: Option<f64>,
}

#[derive(Debug, Default)]
struct ColData {
    name: String,
    lower: Option<ExtReal>,
    upper: Option<ExtReal>,
    integer: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Preamble,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
    Ignored,
}

/// Sections that are recognized but carry nothing this model uses.
const IGNORED_SECTIONS: &[&str] = &[
    "OBJSENSE",
    "OBJSENSE:",
    "SOS",
    "QMATRIX",
    "QUADOBJ",
    "QCMATRIX",
    "INDICATORS",
    "CSECTION",
];

fn parse_number(line: usize, token: &str) -> Result<f64, MpsError> {
    let value: f64 = token.parse().map_err(|_| MpsError::BadNumber {
        line,
        token: token.to_string(),
    })?;
    if value.is_nan() {
        return Err(MpsError::BadNumber {
            line,
            token: token.to_string(),
        });
    }
    Ok(value)
}

fn parse_ext(line: usize, token: &str) -> Result<ExtReal, MpsError> {
    let value = parse_number(line, token)?;
    ExtReal::new(value).map_err(|_| MpsError::BadNumber {
        line,
        token: token.to_string(),
    })
}

fn strip_quotes(token: &str) -> &str {
    token.trim_matches(|c| c == '\'' || c == '"')
}

pub fn parse_mps(text: &str) -> Result<ParsedMps, MpsError> {
    let mut diagnostics = ParseDiagnostics::default();
    let mut name = None;
    let mut section = Section::Preamble;
    let mut rows: Vec<RowData> = Vec::new();
    let mut row_ids: HashMap<String, RowId> = HashMap::new();
    let mut objective_seen = false;
    let mut cols: Vec<ColData> = Vec::new();
    let mut col_ids: HashMap<String, usize> = HashMap::new();
    let mut in_integer_block = false;
    let mut saw_endata = false;

    for (index, raw_line) in text.lines().enumerate() {
        let line = index + 1;
        let trimmed = raw_line.trim_end();
        if trimmed.trim().is_empty() {
            continue;
        }
        if trimmed.trim_start().starts_with('*') {
            continue;
        }
        let is_header = !trimmed.starts_with(|c: char| c.is_whitespace());
        if is_header {
            let mut parts = trimmed.split_whitespace();
            let keyword = parts.next().expect("non-empty line").to_uppercase();
            match keyword.as_str() {
                "NAME" => {
                    let rest: Vec<&str> = parts.collect();
                    if !rest.is_empty() {
                        name = Some(rest.join(" "));
                    }
                    section = Section::Preamble;
                }
                "ROWS" => section = Section::Rows,
                "COLUMNS" => section = Section::Columns,
                "RHS" => section = Section::Rhs,
                "RANGES" => section = Section::Ranges,
                "BOUNDS" => section = Section::Bounds,
                "ENDATA" => {
                    saw_endata = true;
                    break;
                }
                other if IGNORED_SECTIONS.contains(&other) => {
                    diagnostics.warn(line, format!("section {other} ignored"));
                    section = Section::Ignored;
                }
                other => {
                    return Err(MpsError::UnknownSection {
                        line,
                        name: other.to_string(),
                    })
                }
            }
            continue;
        }

        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        match section {
            Section::Preamble => {
                return Err(MpsError::Syntax {
                    line,
                    message: "data before the first section header".to_string(),
                });
            }
            Section::Ignored => continue,
            Section::Rows => {
                if tokens.len() != 2 {
                    return Err(MpsError::Syntax {
                        line,
                        message: format!("expected 'sense name', got {} fields", tokens.len()),
                    });
                }
                let sense = tokens[0].to_uppercase();
                let row_name = tokens[1].to_string();
                if row_ids.contains_key(&row_name) {
                    return Err(MpsError::DuplicateRow {
                        line,
                        name: row_name,
                    });
                }
                let id = match sense.as_str() {
                    "N" => {
                        if objective_seen {
                            diagnostics
                                .warn(line, format!("extra free row '{row_name}' discarded"));
                        }
                        objective_seen = true;
                        RowId::Free
                    }
                    "L" | "G" | "E" => {
                        let kind = match sense.as_str() {
                            "L" => RowKind::Less,
                            "G" => RowKind::Greater,
                            _ => RowKind::Equal,
                        };
                        rows.push(RowData {
                            name: row_name.clone(),
                            kind,
                            terms: HashMap::new(),
                            rhs: None,
                            range: None,
                        });
                        RowId::Constraint(rows.len() - 1)
                    }
                    other => {
                        return Err(MpsError::Syntax {
                            line,
                            message: format!("unknown row sense '{other}'"),
                        })
                    }
                };
                row_ids.insert(row_name, id);
            }
            Section::Columns => {
                if tokens
                    .iter()
                    .any(|t| strip_quotes(t).eq_ignore_ascii_case("MARKER"))
                {
                    let has = |word: &str| {
                        tokens
                            .iter()
                            .any(|t| strip_quotes(t).eq_ignore_ascii_case(word))
                    };
                    if has("INTORG") {
                        in_integer_block = true;
                    } else if has("INTEND") {
                        in_integer_block = false;
                    } else {
                        return Err(MpsError::Syntax {
                            line,
                            message: "marker line without INTORG or INTEND".to_string(),
                        });
                    }
                    continue;
                }
                if tokens.len() < 3 || tokens.len().is_multiple_of(2) {
                    return Err(MpsError::Syntax {
                        line,
                        message: "expected 'column row value [row value]'".to_string(),
                    });
                }
                let col_name = tokens[0];
                let col = match col_ids.get(col_name) {
                    Some(&c) => c,
                    None => {
                        cols.push(ColData {
                            name: col_name.to_string(),
                            ..ColData::default()
                        });
                        col_ids.insert(col_name.to_string(), cols.len() - 1);
                        cols.len() - 1
                    }
                };
                if in_integer_block {
                    cols[col].integer = true;
                }
                for pair in tokens[1..].chunks(2) {
                    let row_name = pair[0];
                    let value = parse_number(line, pair[1])?;
                    match row_ids.get(row_name) {
                        None => {
                            return Err(MpsError::UnknownRow {
                                line,
                                name: row_name.to_string(),
                            })
                        }
                        Some(RowId::Free) => {}
                        Some(&RowId::Constraint(r)) => {
                            if value == 0.0 {
                                diagnostics.warn(
                                    line,
                                    format!(
                                        "zero coefficient for column '{col_name}' in row \
                                         '{row_name}' dropped"
                                    ),
                                );
                                continue;
                            }
                            if let Some(existing) = rows[r].terms.get_mut(&col) {
                                diagnostics.warn(
                                    line,
                                    format!(
                                        "duplicate coefficient for column '{col_name}' in row \
                                         '{row_name}' summed"
                                    ),
                                );
                                *existing += value;
                            } else {
                                rows[r].terms.insert(col, value);
                            }
                        }
                    }
                }
            }
            Section::Rhs | Section::Ranges => {
                // A set name makes the pair list start at an odd offset;
                // entries always come in (row, value) pairs.
                let pairs = if tokens.len() % 2 == 1 {
                    &tokens[1..]
                } else {
                    &tokens[..]
                };
                if pairs.is_empty() {
                    return Err(MpsError::Syntax {
                        line,
                        message: "expected '[set] row value [row value]'".to_string(),
                    });
                }
                for pair in pairs.chunks(2) {
                    let row_name = pair[0];
                    let value = parse_number(line, pair[1])?;
                    match row_ids.get(row_name) {
                        None => {
                            return Err(MpsError::UnknownRow {
                                line,
                                name: row_name.to_string(),
                            })
                        }
                        Some(RowId::Free) => {
                            if section == Section::Ranges {
                                diagnostics
                                    .warn(line, format!("range on free row '{row_name}' ignored"));
                            }
                            // An RHS entry on the objective row is a
                            // constant offset; nothing to keep.
                        }
                        Some(&RowId::Constraint(r)) => {
                            let slot = if section == Section::Rhs {
                                &mut rows[r].rhs
                            } else {
                                &mut rows[r].range
                            };
                            if slot.is_some() {
                                let what = if section == Section::Rhs {
                                    "rhs"
                                } else {
                                    "range"
                                };
                                diagnostics.warn(
                                    line,
                                    format!("duplicate {what} for row '{row_name}' overwritten"),
                                );
                            }
                            *slot = Some(value);
                        }
                    }
                }
            }
            Section::Bounds => {
                apply_bound(line, &tokens, &col_ids, &mut cols, &mut diagnostics)?;
            }
        }
    }
    if !saw_endata {
        diagnostics.warn(0, "file ends without ENDATA");
    }
    if in_integer_block {
        diagnostics.warn(0, "INTORG marker left open at end of COLUMNS");
    }

    build_instance(rows, cols, name, diagnostics)
}

fn apply_bound(
    line: usize,
    tokens: &[&str],
    col_ids: &HashMap<String, usize>,
    cols: &mut [ColData],
    diagnostics: &mut ParseDiagnostics,
) -> Result<(), MpsError> {
    let kind = tokens[0].to_uppercase();
    let valued = matches!(kind.as_str(), "LO" | "UP" | "FX" | "LI" | "UI");
    let valueless = matches!(kind.as_str(), "FR" | "MI" | "PL" | "BV");
    if !valued && !valueless {
        return Err(MpsError::Syntax {
            line,
            message: format!("unknown bound type '{}'", tokens[0]),
        });
    }
    let rest = &tokens[1..];
    let (col_name, value_token) = if valued {
        match rest.len() {
            2 => (rest[0], Some(rest[1])),
            3 => (rest[1], Some(rest[2])),
            n => {
                return Err(MpsError::Syntax {
                    line,
                    message: format!("expected '[set] column value', got {n} fields"),
                })
            }
        }
    } else {
        // Some writers emit a dummy numeric value after valueless types;
        // accept and ignore it.
        match rest.len() {
            1 => (rest[0], None),
            2 => {
                if rest[1].parse::<f64>().is_ok() {
                    diagnostics.warn(line, format!("value after {kind} bound ignored"));
                    (rest[0], None)
                } else {
                    (rest[1], None)
                }
            }
            3 => {
                diagnostics.warn(line, format!("value after {kind} bound ignored"));
                (rest[1], None)
            }
            n => {
                return Err(MpsError::Syntax {
                    line,
                    message: format!("expected '[set] column', got {n} fields"),
                })
            }
        }
    };
    let col = *col_ids
        .get(col_name)
        .ok_or_else(|| MpsError::UnknownColumn {
            line,
            name: col_name.to_string(),
        })?;
    let data = &mut cols[col];
    let value = match value_token {
        Some(tok) => Some(parse_ext(line, tok)?),
        None => None,
    };
    match kind.as_str() {
        "LO" | "LI" => {
            data.lower = value;
            if kind == "LI" {
                data.integer = true;
            }
        }
        "UP" | "UI" => {
            if kind == "UP"
                && data.lower.is_none()
                && value.is_some_and(|v| v < ExtReal::new(0.0).expect("zero is finite"))
            {
                diagnostics.warn(
                    line,
                    format!(
                        "negative upper bound on column '{col_name}' with no explicit lower \
                         bound; lower bound set to -inf"
                    ),
                );
                data.lower = Some(ExtReal::NegInf);
            }
            data.upper = value;
            if kind == "UI" {
                data.integer = true;
            }
        }
        "FX" => {
            data.lower = value;
            data.upper = value;
        }
        "FR" => {
            data.lower = Some(ExtReal::NegInf);
            data.upper = Some(ExtReal::PosInf);
        }
        "MI" => data.lower = Some(ExtReal::NegInf),
        "PL" => data.upper = Some(ExtReal::PosInf),
        "BV" => {
            data.integer = true;
            data.lower = Some(ExtReal::new(0.0).expect("finite"));
            data.upper = Some(ExtReal::new(1.0).expect("finite"));
        }
        _ => unreachable!("bound type checked above"),
    }
    Ok(())
}

fn build_instance(
    rows: Vec<RowData>,
    cols: Vec<ColData>,
    name: Option<String>,
    mut diagnostics: ParseDiagnostics,
) -> Result<ParsedMps, MpsError> {
    let mut domains = Vec::with_capacity(cols.len());
    let mut column_names = Vec::with_capacity(cols.len());
    for col in &cols {
        let mut lower = col
            .lower
            .unwrap_or_else(|| ExtReal::new(0.0).expect("finite"));
        let mut upper = col.upper.unwrap_or(ExtReal::PosInf);
        if col.integer {
            if col.upper.is_none() {
                diagnostics.warn(
                    0,
                    format!(
                        "integer column '{}' has no explicit upper bound; keeping +inf",
                        col.name
                    ),
                );
            }
            // Integer domains must sit on integer endpoints; fractional
            // file values are tightened inward.
            if let Some(v) = lower.finite_value() {
                let rounded = (v - 1e-6).ceil();
                if rounded != v {
                    diagnostics.warn(
                        0,
                        format!(
                            "fractional lower bound {v} on integer column '{}' raised to \
                             {rounded}",
                            col.name
                        ),
                    );
                    lower = ExtReal::new(rounded).expect("ceil of finite is finite");
                }
            }
            if let Some(v) = upper.finite_value() {
                let rounded = (v + 1e-6).floor();
                if rounded != v {
                    diagnostics.warn(
                        0,
                        format!(
                            "fractional upper bound {v} on integer column '{}' lowered to \
                             {rounded}",
                            col.name
                        ),
                    );
                    upper = ExtReal::new(rounded).expect("floor of finite is finite");
                }
            }
        }
        let domain = VariableDomain::new(lower, upper, col.integer).map_err(|source| {
            MpsError::InvalidDomain {
                column: col.name.clone(),
                source,
            }
        })?;
        domains.push(domain);
        column_names.push(col.name.clone());
    }

    let mut constraints = Vec::with_capacity(rows.len());
    let mut row_names = Vec::with_capacity(rows.len());
    for row in rows {
        let b = row.rhs.unwrap_or(0.0);
        let (mut lhs_raw, mut rhs_raw) = match row.kind {
            RowKind::Less => (f64::NEG_INFINITY, b),
            RowKind::Greater => (b, f64::INFINITY),
            RowKind::Equal => (b, b),
        };
        if let Some(r) = row.range {
            if r != 0.0 {
                match row.kind {
                    RowKind::Less => lhs_raw = b - r.abs(),
                    RowKind::Greater => rhs_raw = b + r.abs(),
                    RowKind::Equal => {
                        if r >= 0.0 {
                            rhs_raw = b + r;
                        } else {
                            lhs_raw = b + r;
                        }
                    }
                }
            }
        }
        let lhs = ExtReal::new(lhs_raw).map_err(|_| MpsError::BadNumber {
            line: 0,
            token: lhs_raw.to_string(),
        })?;
        let rhs = ExtReal::new(rhs_raw).map_err(|_| MpsError::BadNumber {
            line: 0,
            token: rhs_raw.to_string(),
        })?;
        if !lhs.is_finite() && !rhs.is_finite() {
            diagnostics.warn(
                0,
                format!("row '{}' has no finite side and was dropped", row.name),
            );
            continue;
        }
        let mut terms: Vec<(usize, f64)> = row
            .terms
            .into_iter()
            .filter(|&(_, coef)| {
                if coef == 0.0 {
                    diagnostics.warn(
                        0,
                        format!(
                            "coefficients in row '{}' cancel to zero; term dropped",
                            row.name
                        ),
                    );
                    false
                } else {
                    true
                }
            })
            .collect();
        terms.sort_by_key(|&(col, _)| col);
        let constraint =
            LinearConstraint::new(terms, lhs, rhs).map_err(|source| MpsError::InvalidRow {
                row: row.name.clone(),
                source,
            })?;
        constraints.push(constraint);
        row_names.push(row.name);
    }

    let instance = ProblemInstance::new(domains, constraints)?;
    Ok(ParsedMps {
        instance,
        name,
        row_names,
        column_names,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ext(v: f64) -> ExtReal {
        ExtReal::new(v).unwrap()
    }

    #[test]
    fn parses_bounded_pair_with_range() {
        // x1 in [0,3], x2 in [0,10], one row 1 <= x1 + x2 <= 4 written as
        // an L row with RHS 4 and range 3.
        let text = "\
NAME          PAIR
ROWS
 N  COST
 L  C1
COLUMNS
    X1        COST      1.0   C1        1.0
    X2        C1        1.0
RHS
    RHS       C1        4.0
RANGES
    RNG       C1        3.0
BOUNDS
 UP BND       X1        3.0
 UP BND       X2        10.0
ENDATA
";
        let parsed = parse_mps(text).unwrap();
        assert_eq!(parsed.name.as_deref(), Some("PAIR"));
        assert_eq!(parsed.column_names, vec!["X1", "X2"]);
        assert_eq!(parsed.row_names, vec!["C1"]);
        assert!(parsed.diagnostics.warnings.is_empty());
        let instance = &parsed.instance;
        assert_eq!(instance.num_vars(), 2);
        assert_eq!(instance.num_constraints(), 1);
        assert_eq!(instance.domain(0).lower(), ext(0.0));
        assert_eq!(instance.domain(0).upper(), ext(3.0));
        assert_eq!(instance.domain(1).upper(), ext(10.0));
        let con = instance.constraint(0);
        assert_eq!(con.lhs(), ext(1.0));
        assert_eq!(con.rhs(), ext(4.0));
        assert_eq!(con.terms(), &[(0, 1.0), (1, 1.0)]);
    }

    #[test]
    fn range_on_equality_row_follows_sign_rule() {
        let base = "\
ROWS
 E  R1
COLUMNS
    X         R1        1.0
RHS
    RHS       R1        4.0
RANGES
    RNG       R1        {R}
ENDATA
";
        let pos = parse_mps(&base.replace("{R}", "2.0")).unwrap();
        let con = pos.instance.constraint(0);
        assert_eq!((con.lhs(), con.rhs()), (ext(4.0), ext(6.0)));
        let neg = parse_mps(&base.replace("{R}", "-2.0")).unwrap();
        let con = neg.instance.constraint(0);
        assert_eq!((con.lhs(), con.rhs()), (ext(2.0), ext(4.0)));
    }

    #[test]
    fn range_widens_inequality_rows_by_magnitude() {
        let text = "\
ROWS
 L  LE
 G  GE
COLUMNS
    X         LE        1.0   GE        1.0
RHS
    RHS       LE        5.0   GE        1.0
RANGES
    RNG       LE        -3.0  GE        2.0
ENDATA
";
        let parsed = parse_mps(text).unwrap();
        let le = parsed.instance.constraint(0);
        assert_eq!((le.lhs(), le.rhs()), (ext(2.0), ext(5.0)));
        let ge = parsed.instance.constraint(1);
        assert_eq!((ge.lhs(), ge.rhs()), (ext(1.0), ext(3.0)));
    }

    #[test]
    fn bound_types_cover_the_standard_set() {
        let text = "\
ROWS
 L  C1
COLUMNS
    A         C1        1.0
    B         C1        1.0
    C         C1        1.0
    D         C1        1.0
    E         C1        1.0
    F         C1        1.0
RHS
    RHS       C1        100.0
BOUNDS
 LO BND       A         -2.0
 UP BND       A         9.0
 FX BND       B         7.5
 FR BND       C
 MI BND       D
 BV BND       E
 LI BND       F         1.0
 UI BND       F         6.0
ENDATA
";
        let parsed = parse_mps(text).unwrap();
        let d = |i: usize| parsed.instance.domain(i);
        assert_eq!((d(0).lower(), d(0).upper()), (ext(-2.0), ext(9.0)));
        assert_eq!((d(1).lower(), d(1).upper()), (ext(7.5), ext(7.5)));
        assert_eq!(
            (d(2).lower(), d(2).upper()),
            (ExtReal::NegInf, ExtReal::PosInf)
        );
        assert_eq!(
            (d(3).lower(), d(3).upper()),
            (ExtReal::NegInf, ExtReal::PosInf)
        );
        assert!(!d(3).is_integer());
        assert_eq!((d(4).lower(), d(4).upper()), (ext(0.0), ext(1.0)));
        assert!(d(4).is_integer());
        assert_eq!((d(5).lower(), d(5).upper()), (ext(1.0), ext(6.0)));
        assert!(d(5).is_integer());
    }

    #[test]
    fn intorg_block_marks_integer_columns() {
        let text = "\
ROWS
 L  C1
COLUMNS
    X         C1        1.0
    M1        'MARKER'                 'INTORG'
    Y         C1        1.0
    M2        'MARKER'                 'INTEND'
    Z         C1        1.0
RHS
    RHS       C1        10.0
BOUNDS
 UP BND       Y         4.0
ENDATA
";
        let parsed = parse_mps(text).unwrap();
        assert!(!parsed.instance.domain(0).is_integer());
        assert!(parsed.instance.domain(1).is_integer());
        assert!(!parsed.instance.domain(2).is_integer());
        assert!(parsed.diagnostics.warnings.is_empty());
    }

    #[test]
    fn integer_column_without_upper_gets_diagnostic() {
        let text = "\
ROWS
 G  C1
COLUMNS
    M1        'MARKER'                 'INTORG'
    X         C1        1.0
    M2        'MARKER'                 'INTEND'
RHS
    RHS       C1        1.0
ENDATA
";
        let parsed = parse_mps(text).unwrap();
        assert!(parsed.instance.domain(0).is_integer());
        assert_eq!(parsed.instance.domain(0).upper(), ExtReal::PosInf);
        assert!(parsed
            .diagnostics
            .warnings
            .iter()
            .any(|w| w.message.contains("no explicit upper bound")));
    }

    #[test]
    fn negative_up_without_lower_frees_the_lower_bound() {
        let text = "\
ROWS
 L  C1
COLUMNS
    X         C1        1.0
BOUNDS
 UP BND       X         -5.0
ENDATA
";
        let parsed = parse_mps(text).unwrap();
        let d = parsed.instance.domain(0);
        assert_eq!(d.lower(), ExtReal::NegInf);
        assert_eq!(d.upper(), ext(-5.0));
        assert_eq!(parsed.diagnostics.warnings.len(), 1);
    }

    #[test]
    fn fractional_integer_bounds_are_tightened_inward() {
        let text = "\
ROWS
 L  C1
COLUMNS
    X         C1        1.0
BOUNDS
 LI BND       X         0.4
 UI BND       X         6.7
ENDATA
";
        let parsed = parse_mps(text).unwrap();
        let d = parsed.instance.domain(0);
        assert_eq!((d.lower(), d.upper()), (ext(1.0), ext(6.0)));
        assert!(d.is_integer());
        assert_eq!(parsed.diagnostics.warnings.len(), 2);
    }

    #[test]
    fn huge_rhs_values_become_infinite_and_may_drop_rows() {
        // The L row's rhs reads as +inf, leaving both sides infinite:
        // the row is dropped. The G row keeps its finite lower side.
        let text = "\
ROWS
 L  FREEISH
 G  KEPT
COLUMNS
    X         FREEISH   1.0   KEPT      1.0
RHS
    RHS       FREEISH   1e30  KEPT      2.0
ENDATA
";
        let parsed = parse_mps(text).unwrap();
        assert_eq!(parsed.instance.num_constraints(), 1);
        assert_eq!(parsed.row_names, vec!["KEPT"]);
        assert!(parsed
            .diagnostics
            .warnings
            .iter()
            .any(|w| w.message.contains("no finite side")));
    }

    #[test]
    fn duplicate_coefficients_sum_with_warning() {
        let text = "\
ROWS
 L  C1
COLUMNS
    X         C1        1.0
    X         C1        2.5
RHS
    RHS       C1        4.0
ENDATA
";
        let parsed = parse_mps(text).unwrap();
        assert_eq!(parsed.instance.constraint(0).terms(), &[(0, 3.5)]);
        assert!(parsed
            .diagnostics
            .warnings
            .iter()
            .any(|w| w.message.contains("summed")));
    }

    #[test]
    fn set_names_are_optional_in_rhs_and_bounds() {
        let text = "\
ROWS
 L  C1
COLUMNS
    X         C1        1.0
RHS
    C1        4.0
BOUNDS
 UP X         2.0
ENDATA
";
        let parsed = parse_mps(text).unwrap();
        assert_eq!(parsed.instance.constraint(0).rhs(), ext(4.0));
        assert_eq!(parsed.instance.domain(0).upper(), ext(2.0));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "\
ROWS
 L  C1
COLUMNS
    X         NOPE      1.0
ENDATA
";
        match parse_mps(text) {
            Err(MpsError::UnknownRow { line, name }) => {
                assert_eq!(line, 4);
                assert_eq!(name, "NOPE");
            }
            other => panic!("expected unknown row, got {other:?}"),
        }
        match parse_mps("GARBAGE\n") {
            Err(MpsError::UnknownSection { line, name }) => {
                assert_eq!(line, 1);
                assert_eq!(name, "GARBAGE");
            }
            other => panic!("expected unknown section, got {other:?}"),
        }
        match parse_mps("ROWS\n L  C1\nCOLUMNS\n    X   C1   abc\nENDATA\n") {
            Err(MpsError::BadNumber { line, token }) => {
                assert_eq!(line, 4);
                assert_eq!(token, "abc");
            }
            other => panic!("expected bad number, got {other:?}"),
        }
    }

    #[test]
    fn objsense_section_is_skipped_with_warning() {
        let text = "\
OBJSENSE
    MAX
ROWS
 L  C1
COLUMNS
    X         C1        1.0
ENDATA
";
        let parsed = parse_mps(text).unwrap();
        assert_eq!(parsed.instance.num_constraints(), 1);
        assert!(parsed
            .diagnostics
            .warnings
            .iter()
            .any(|w| w.message.contains("OBJSENSE")));
    }

    #[test]
    fn missing_endata_warns_but_parses() {
        let text = "\
ROWS
 L  C1
COLUMNS
    X         C1        1.0
";
        let parsed = parse_mps(text).unwrap();
        assert!(parsed
            .diagnostics
            .warnings
            .iter()
            .any(|w| w.message.contains("ENDATA")));
        assert_eq!(parsed.diagnostics.warnings[0].line, 0);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "\
* header comment
NAME TEST

ROWS
* inside a section
 L  C1
COLUMNS
    X         C1        1.0
ENDATA
";
        let parsed = parse_mps(text).unwrap();
        assert_eq!(parsed.name.as_deref(), Some("TEST"));
        assert_eq!(parsed.instance.num_constraints(), 1);
    }
}
