//! Dependency extraction from Metamath `.mm` databases.
//!
//! Only what the dependency network needs is tracked: statement labels and
//! kinds, hypothesis scoping, and the labels each proof refers to. Proofs are
//! not verified; compressed step streams are decoded and range-checked but
//! never replayed.

use std::collections::{HashMap, HashSet};
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Dag, Digraph, FieldVector, GraphBuilder, FIELD_DIMS};

/// The provable typecode; `$a` statements with any other typecode are syntax.
pub const PROVABLE_TYPECODE: &str = "|-";

/// Field names in index order of the field vector.
pub const FIELD_NAMES: [&str; FIELD_DIMS] = [
    "logic",
    "set theory",
    "analysis",
    "number theory",
    "algebra",
    "topology",
    "order theory",
    "category theory",
    "geometry",
    "graph theory",
];

pub fn field_index(name: &str) -> Option<usize> {
    let name = name.trim();
    if let Ok(i) = name.parse::<usize>() {
        return (i < FIELD_DIMS).then_some(i);
    }
    FIELD_NAMES.iter().position(|f| f.eq_ignore_ascii_case(name))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatementKind {
    Axiom,
    Definition,
    Syntax,
    Theorem,
    Hypothesis,
    Other,
}

impl StatementKind {
    /// Classifies a `$a` statement by typecode and label prefix.
    pub fn of_axiomatic(label: &str, typecode: &str) -> Self {
        if typecode != PROVABLE_TYPECODE {
            StatementKind::Syntax
        } else if label.starts_with("df-") {
            StatementKind::Definition
        } else {
            StatementKind::Axiom
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MmStatement {
    pub label: String,
    pub kind: StatementKind,
    pub typecode: String,
    /// Distinct non-hypothesis labels referenced by the proof, in order of
    /// first reference. Empty for `$a` statements.
    pub proof_labels: Vec<String>,
    pub field: Option<usize>,
    /// 1-based line of the label token.
    pub line: usize,
}

struct Tokens<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Tokens<'a> {
    fn new(src: &'a str) -> Self {
        Tokens { src, pos: 0, line: 1 }
    }

    fn next_token(&mut self) -> Option<(&'a str, usize)> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            if bytes[self.pos] == b'\n' {
                self.line += 1;
            }
            self.pos += 1;
        }
        if self.pos == bytes.len() {
            return None;
        }
        let start = self.pos;
        while self.pos < bytes.len() && !bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        Some((&self.src[start..self.pos], self.line))
    }

    /// Next token that is not inside a `$( ... $)` comment.
    fn next_real(&mut self) -> Result<Option<(&'a str, usize)>> {
        loop {
            match self.next_token() {
                Some(("$(", line)) => loop {
                    match self.next_token() {
                        Some(("$)", _)) => break,
                        Some((t, l)) if t.contains("$(") || t.contains("$)") => {
                            return Err(Error::parse(l, format!("malformed comment token '{t}'")));
                        }
                        Some(_) => {}
                        None => return Err(Error::parse(line, "unterminated comment")),
                    }
                },
                other => return Ok(other),
            }
        }
    }
}

fn is_label(tok: &str) -> bool {
    !tok.is_empty()
        && tok
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_' || b == b'.')
}

fn is_math_symbol(tok: &str) -> bool {
    tok.bytes().all(|b| b.is_ascii_graphic() && b != b'$')
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LabelKind {
    Floating,
    Essential,
    Assertion,
}

struct Hyp {
    label: String,
    floating: bool,
    /// typecode followed by the math string
    symbols: Vec<String>,
}

#[derive(Default)]
struct Parser {
    labels: HashMap<String, LabelKind>,
    active: Vec<Hyp>,
    active_index: HashMap<String, usize>,
    scope_marks: Vec<usize>,
    out: Vec<MmStatement>,
}

impl Parser {
    /// Math symbols up to the closing keyword, which is returned.
    fn math_string<'a>(tokens: &mut Tokens<'a>, start_line: usize, closers: &[&str]) -> Result<(Vec<String>, &'a str)> {
        let mut syms = Vec::new();
        loop {
            match tokens.next_real()? {
                Some((t, _)) if closers.contains(&t) => return Ok((syms, t)),
                Some((t, line)) if t.starts_with('$') => {
                    return Err(Error::parse(line, format!("unexpected keyword '{t}' in statement")))
                }
                Some((t, line)) if !is_math_symbol(t) => {
                    return Err(Error::parse(line, format!("malformed math symbol '{t}'")))
                }
                Some((t, _)) => syms.push(t.to_owned()),
                None => return Err(Error::parse(start_line, "statement not terminated before end of file")),
            }
        }
    }

    fn define(&mut self, label: &str, kind: LabelKind, line: usize) -> Result<()> {
        if self.labels.insert(label.to_owned(), kind).is_some() {
            return Err(Error::parse(line, format!("duplicate label '{label}'")));
        }
        Ok(())
    }

    fn push_hyp(&mut self, label: &str, floating: bool, symbols: Vec<String>) {
        self.active_index.insert(label.to_owned(), self.active.len());
        self.active.push(Hyp {
            label: label.to_owned(),
            floating,
            symbols,
        });
    }

    fn close_scope(&mut self, line: usize) -> Result<()> {
        let mark = self
            .scope_marks
            .pop()
            .ok_or_else(|| Error::parse(line, "'$}' without matching '${'"))?;
        for hyp in self.active.drain(mark..) {
            self.active_index.remove(&hyp.label);
        }
        Ok(())
    }

    /// Mandatory hypotheses of an assertion: every active `$e`, plus each
    /// active `$f` whose variable occurs in the assertion or an active `$e`.
    fn mandatory_count(&self, assertion: &[String]) -> usize {
        let mut used: HashSet<&str> = assertion.iter().skip(1).map(String::as_str).collect();
        for h in self.active.iter().filter(|h| !h.floating) {
            used.extend(h.symbols.iter().skip(1).map(String::as_str));
        }
        self.active
            .iter()
            .filter(|h| !h.floating || h.symbols.get(1).is_some_and(|v| used.contains(v.as_str())))
            .count()
    }

    /// Resolves a proof label: assertions are dependencies, active
    /// hypotheses are skipped, anything else is an error.
    fn resolve<'t>(&self, label: &'t str, line: usize) -> Result<Option<&'t str>> {
        match self.labels.get(label) {
            Some(LabelKind::Assertion) => Ok(Some(label)),
            Some(_) if self.active_index.contains_key(label) => Ok(None),
            Some(_) => Err(Error::parse(line, format!("hypothesis '{label}' is not active here"))),
            None => Err(Error::parse(line, format!("unknown label '{label}' in proof"))),
        }
    }

    fn proof(&self, tokens: &mut Tokens<'_>, theorem: &str, assertion: &[String], start_line: usize) -> Result<Vec<String>> {
        let mut refs: Vec<String> = Vec::new();
        let mut seen: HashSet<String> = HashSet::new();
        let mut add = |l: &str| {
            if seen.insert(l.to_owned()) {
                refs.push(l.to_owned());
            }
        };
        let (first, first_line) = tokens
            .next_real()?
            .ok_or_else(|| Error::parse(start_line, format!("proof of '{theorem}' not terminated")))?;
        if first == "(" {
            let mut list_len = 0usize;
            loop {
                let (t, line) = tokens
                    .next_real()?
                    .ok_or_else(|| Error::parse(first_line, "unterminated compressed proof label list"))?;
                if t == ")" {
                    break;
                }
                if t == theorem {
                    return Err(Error::parse(line, format!("proof of '{theorem}' refers to itself")));
                }
                if let Some(l) = self.resolve(t, line)? {
                    add(l);
                }
                list_len += 1;
            }
            let mandatory = self.mandatory_count(assertion);
            let mut steps = String::new();
            let mut steps_line = first_line;
            loop {
                match tokens.next_real()? {
                    Some(("$.", _)) => break,
                    Some((t, line)) => {
                        if steps.is_empty() {
                            steps_line = line;
                        }
                        steps.push_str(t);
                    }
                    None => return Err(Error::parse(first_line, format!("proof of '{theorem}' not terminated"))),
                }
            }
            check_compressed_steps(&steps, mandatory + list_len, steps_line)?;
        } else {
            let mut tok = Some((first, first_line));
            while let Some((t, line)) = tok {
                match t {
                    "$." => return Ok(refs),
                    "?" => {}
                    _ if t == theorem => {
                        return Err(Error::parse(line, format!("proof of '{theorem}' refers to itself")))
                    }
                    _ if t.starts_with('$') => {
                        return Err(Error::parse(line, format!("unexpected keyword '{t}' in proof")))
                    }
                    _ => {
                        if let Some(l) = self.resolve(t, line)? {
                            add(l);
                        }
                    }
                }
                tok = tokens.next_real()?;
            }
            return Err(Error::parse(first_line, format!("proof of '{theorem}' not terminated")));
        }
        Ok(refs)
    }

    fn run(mut self, src: &str) -> Result<Vec<MmStatement>> {
        let mut tokens = Tokens::new(src);
        while let Some((tok, line)) = tokens.next_real()? {
            match tok {
                "${" => self.scope_marks.push(self.active.len()),
                "$}" => self.close_scope(line)?,
                "$c" | "$v" | "$d" => {
                    Self::math_string(&mut tokens, line, &["$."])?;
                }
                "$[" => return Err(Error::parse(line, "file inclusion '$[' is not supported")),
                _ if tok.starts_with('$') => {
                    return Err(Error::parse(line, format!("unexpected token '{tok}'")));
                }
                label => {
                    if !is_label(label) {
                        return Err(Error::parse(line, format!("malformed label '{label}'")));
                    }
                    let (kw, kw_line) = tokens
                        .next_real()?
                        .ok_or_else(|| Error::parse(line, format!("label '{label}' without statement")))?;
                    match kw {
                        "$f" | "$e" => {
                            let (syms, _) = Self::math_string(&mut tokens, kw_line, &["$."])?;
                            let floating = kw == "$f";
                            if syms.is_empty() || (floating && syms.len() != 2) {
                                return Err(Error::parse(kw_line, format!("malformed hypothesis '{label}'")));
                            }
                            let kind = if floating { LabelKind::Floating } else { LabelKind::Essential };
                            self.define(label, kind, line)?;
                            self.push_hyp(label, floating, syms);
                        }
                        "$a" => {
                            let (syms, _) = Self::math_string(&mut tokens, kw_line, &["$."])?;
                            let typecode = syms
                                .first()
                                .ok_or_else(|| Error::parse(kw_line, format!("'{label}' has no typecode")))?
                                .clone();
                            self.define(label, LabelKind::Assertion, line)?;
                            self.out.push(MmStatement {
                                label: label.to_owned(),
                                kind: StatementKind::of_axiomatic(label, &typecode),
                                typecode,
                                proof_labels: Vec::new(),
                                field: None,
                                line,
                            });
                        }
                        "$p" => {
                            let (syms, closer) = Self::math_string(&mut tokens, kw_line, &["$=", "$."])?;
                            if closer != "$=" {
                                return Err(Error::parse(kw_line, format!("'{label}' has no proof")));
                            }
                            let typecode = syms
                                .first()
                                .ok_or_else(|| Error::parse(kw_line, format!("'{label}' has no typecode")))?
                                .clone();
                            let proof_labels = self.proof(&mut tokens, label, &syms, kw_line)?;
                            self.define(label, LabelKind::Assertion, line)?;
                            self.out.push(MmStatement {
                                label: label.to_owned(),
                                kind: StatementKind::Theorem,
                                typecode,
                                proof_labels,
                                field: None,
                                line,
                            });
                        }
                        other => {
                            return Err(Error::parse(kw_line, format!("expected statement keyword after '{label}', got '{other}'")))
                        }
                    }
                }
            }
        }
        if !self.scope_marks.is_empty() {
            return Err(Error::parse(
                tokens.line,
                format!("{} unclosed '${{' scope(s) at end of file", self.scope_marks.len()),
            ));
        }
        Ok(self.out)
    }
}

/// Decodes the letter stream of a compressed proof and checks every step
/// number against the labels and saved subproofs available at that point.
fn check_compressed_steps(steps: &str, base: usize, line: usize) -> Result<()> {
    let mut saved = 0usize;
    let mut acc = 0usize;
    let mut pending = false;
    for c in steps.bytes() {
        match c {
            b'U'..=b'Y' => {
                acc = acc * 5 + usize::from(c - b'U' + 1);
                pending = true;
            }
            b'A'..=b'T' => {
                let n = acc * 20 + usize::from(c - b'A' + 1);
                if n > base + saved {
                    return Err(Error::parse(line, format!("compressed proof step {n} exceeds {} available", base + saved)));
                }
                acc = 0;
                pending = false;
            }
            b'Z' if !pending => saved += 1,
            b'?' if !pending => {}
            _ => return Err(Error::parse(line, format!("invalid character '{}' in compressed proof", c as char))),
        }
    }
    if pending {
        return Err(Error::parse(line, "compressed proof ends inside a step number"));
    }
    Ok(())
}

pub fn parse_metamath_str(src: &str) -> Result<Vec<MmStatement>> {
    Parser::default().run(src)
}

pub fn parse_metamath<R: Read>(mut src: R) -> Result<Vec<MmStatement>> {
    let mut buf = Vec::new();
    src.read_to_end(&mut buf)?;
    let text = String::from_utf8(buf).map_err(|e| {
        let line = 1 + e.as_bytes()[..e.utf8_error().valid_up_to()].iter().filter(|&&b| b == b'\n').count();
        Error::parse(line, "database is not valid UTF-8")
    })?;
    parse_metamath_str(&text)
}

/// Counts per statement kind.
pub fn kind_counts(statements: &[MmStatement]) -> HashMap<StatementKind, usize> {
    let mut counts = HashMap::new();
    for s in statements {
        *counts.entry(s.kind).or_insert(0) += 1;
    }
    counts
}

/// Assigns fields from a `label,field` CSV, where `field` is a field name or
/// an index in `0..10`. Returns the labels that matched no statement.
pub fn apply_field_sidecar<R: Read>(statements: &mut [MmStatement], src: R) -> Result<Vec<String>> {
    let by_label: HashMap<String, usize> = statements
        .iter()
        .enumerate()
        .map(|(i, s)| (s.label.clone(), i))
        .collect();
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(src);
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::parse(1, format!("field sidecar lacks a '{name}' column")))
    };
    let (label_col, field_col) = (col("label")?, col("field")?);
    let mut unknown = Vec::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let label = row.get(label_col).unwrap_or_default();
        let field = row.get(field_col).unwrap_or_default();
        let f = field_index(field).ok_or_else(|| Error::parse(line, format!("unknown field '{field}'")))?;
        match by_label.get(label) {
            Some(&i) => statements[i].field = Some(f),
            None => unknown.push(label.to_owned()),
        }
    }
    Ok(unknown)
}

/// Dependency network over axioms and theorems, in database order.
/// Definitions and syntax statements are not nodes.
pub fn theorem_network(statements: &[MmStatement]) -> Result<Dag> {
    let nodes: Vec<&MmStatement> = statements
        .iter()
        .filter(|s| matches!(s.kind, StatementKind::Axiom | StatementKind::Theorem))
        .collect();
    let index: HashMap<&str, usize> = nodes.iter().enumerate().map(|(i, s)| (s.label.as_str(), i)).collect();
    if index.len() != nodes.len() {
        return Err(Error::InvalidArgument("statement labels are not unique".into()));
    }
    let mut builder = GraphBuilder::new(nodes.len());
    for (i, s) in nodes.iter().enumerate() {
        for l in &s.proof_labels {
            if let Some(&j) = index.get(l.as_str()) {
                builder.add_edge(i, j)?;
            }
        }
        let meta = builder.meta_mut();
        meta.labels[i] = Some(s.label.clone());
        meta.fields[i] = s.field.map(FieldVector::one_hot);
    }
    let (g, _): (Digraph, _) = builder.build();
    // Proofs may only cite earlier statements; a cycle here is a parser bug.
    Dag::try_from_digraph(g)
}
