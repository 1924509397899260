//! Set constraint problem instances and the line-oriented constraint DSL.
//!
//! ```text
//! universe: a b c d e f g
//! sets: X Y Z
//! X \ Y = {a, d}
//! c !in X
//! e in Z
//! ```
//!
//! A set-valued difference line expands into one [`Constraint::Difference`]
//! per listed element and says nothing about elements it does not list.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

/// Returns true if `name` is a legal identifier: nonempty, letters, digits or `_`.
pub fn is_identifier(name: &str) -> bool {
    !name.is_empty() && name.chars().all(is_ident_char)
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

macro_rules! identifier {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(String);

        impl $name {
            pub fn new(name: impl Into<String>) -> Self {
                Self(name.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl AsRef<str> for $name {
            fn as_ref(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl serde::Serialize for $name {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&self.0)
            }
        }
    };
}

identifier!(
    /// An element of the universe.
    ElementId
);
identifier!(
    /// A named subset of the universe.
    SetId
);

/// One element-level constraint.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Constraint {
    /// `x in S`
    Inclusion { element: ElementId, set: SetId },
    /// `x !in S`
    Exclusion { element: ElementId, set: SetId },
    /// `x` lies in `in_set` but not in `not_in_set`.
    Difference {
        element: ElementId,
        in_set: SetId,
        not_in_set: SetId,
    },
}

impl Constraint {
    pub fn element(&self) -> &ElementId {
        match self {
            Constraint::Inclusion { element, .. }
            | Constraint::Exclusion { element, .. }
            | Constraint::Difference { element, .. } => element,
        }
    }

    /// The `(set, is_member)` cell assertions this constraint makes about its element.
    pub fn assertions(&self) -> Vec<(&SetId, bool)> {
        match self {
            Constraint::Inclusion { set, .. } => vec![(set, true)],
            Constraint::Exclusion { set, .. } => vec![(set, false)],
            Constraint::Difference {
                in_set, not_in_set, ..
            } => vec![(in_set, true), (not_in_set, false)],
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Inclusion { element, set } => write!(f, "{element} in {set}"),
            Constraint::Exclusion { element, set } => write!(f, "{element} !in {set}"),
            Constraint::Difference {
                element,
                in_set,
                not_in_set,
            } => write!(f, "{in_set} \\ {not_in_set} = {{{element}}}"),
        }
    }
}

/// A universe, a family of named sets and an ordered constraint list.
///
/// Declaration order is significant: it fixes matrix row and column order.
/// Instances built with [`ScpInstance::from_parts`] are not checked; run
/// [`ScpInstance::validate`] before handing them to the solver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScpInstance {
    universe: Vec<ElementId>,
    sets: Vec<SetId>,
    constraints: Vec<Constraint>,
}

impl ScpInstance {
    pub fn from_parts(
        universe: Vec<ElementId>,
        sets: Vec<SetId>,
        constraints: Vec<Constraint>,
    ) -> Self {
        Self {
            universe,
            sets,
            constraints,
        }
    }

    pub fn universe(&self) -> &[ElementId] {
        &self.universe
    }

    pub fn sets(&self) -> &[SetId] {
        &self.sets
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Same universe and sets, different constraint list.
    pub fn with_constraints(&self, constraints: Vec<Constraint>) -> Self {
        Self {
            universe: self.universe.clone(),
            sets: self.sets.clone(),
            constraints,
        }
    }

    pub fn element_index(&self, element: &ElementId) -> Option<usize> {
        self.universe.iter().position(|e| e == element)
    }

    pub fn set_index(&self, set: &SetId) -> Option<usize> {
        self.sets.iter().position(|s| s == set)
    }

    /// Collects every invariant violation of the instance.
    pub fn validate(&self) -> ValidationReport {
        let mut findings = Vec::new();

        if self.universe.is_empty() {
            findings.push(Finding::EmptyUniverse);
        }
        if self.sets.is_empty() {
            findings.push(Finding::EmptySetFamily);
        }

        let mut seen = HashSet::new();
        for e in &self.universe {
            if !is_identifier(e.as_str()) {
                findings.push(Finding::InvalidName(e.to_string()));
            }
            if !seen.insert(e.as_str()) {
                findings.push(Finding::DuplicateElement(e.clone()));
            }
        }
        let elements: HashSet<&str> = seen;

        let mut sets = HashSet::new();
        for s in &self.sets {
            if !is_identifier(s.as_str()) {
                findings.push(Finding::InvalidName(s.to_string()));
            }
            if !sets.insert(s.as_str()) {
                findings.push(Finding::DuplicateSet(s.clone()));
            }
            if elements.contains(s.as_str()) {
                findings.push(Finding::SharedName(s.to_string()));
            }
        }

        for (index, c) in self.constraints.iter().enumerate() {
            if !elements.contains(c.element().as_str()) {
                findings.push(Finding::UnknownElement {
                    constraint: index,
                    element: c.element().clone(),
                });
            }
            for (set, _) in c.assertions() {
                if !sets.contains(set.as_str()) {
                    findings.push(Finding::UnknownSet {
                        constraint: index,
                        set: set.clone(),
                    });
                }
            }
            if let Constraint::Difference {
                in_set, not_in_set, ..
            } = c
            {
                if in_set == not_in_set {
                    findings.push(Finding::SelfDifference {
                        constraint: index,
                        set: in_set.clone(),
                    });
                }
            }
        }

        ValidationReport { findings }
    }

    /// Renders the instance as DSL text that parses back to an identical instance.
    pub fn to_dsl(&self) -> String {
        let mut out = String::new();
        out.push_str("universe:");
        for e in &self.universe {
            out.push(' ');
            out.push_str(e.as_str());
        }
        out.push_str("\nsets:");
        for s in &self.sets {
            out.push(' ');
            out.push_str(s.as_str());
        }
        out.push('\n');

        let mut i = 0;
        while i < self.constraints.len() {
            match &self.constraints[i] {
                Constraint::Difference {
                    in_set, not_in_set, ..
                } => {
                    // Consecutive differences over the same pair of sets share one line.
                    let mut members = Vec::new();
                    while let Some(Constraint::Difference {
                        element,
                        in_set: a,
                        not_in_set: b,
                    }) = self.constraints.get(i)
                    {
                        if a != in_set || b != not_in_set {
                            break;
                        }
                        members.push(element.as_str());
                        i += 1;
                    }
                    out.push_str(&format!(
                        "{in_set} \\ {not_in_set} = {{{}}}\n",
                        members.join(", ")
                    ));
                }
                other => {
                    out.push_str(&other.to_string());
                    out.push('\n');
                    i += 1;
                }
            }
        }
        out
    }
}

/// A single invariant violation found by [`ScpInstance::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Finding {
    EmptyUniverse,
    EmptySetFamily,
    InvalidName(String),
    DuplicateElement(ElementId),
    DuplicateSet(SetId),
    SharedName(String),
    UnknownElement {
        constraint: usize,
        element: ElementId,
    },
    UnknownSet {
        constraint: usize,
        set: SetId,
    },
    SelfDifference {
        constraint: usize,
        set: SetId,
    },
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finding::EmptyUniverse => write!(f, "universe is empty"),
            Finding::EmptySetFamily => write!(f, "set family is empty"),
            Finding::InvalidName(n) => write!(f, "`{n}` is not a valid identifier"),
            Finding::DuplicateElement(e) => write!(f, "element `{e}` declared more than once"),
            Finding::DuplicateSet(s) => write!(f, "set `{s}` declared more than once"),
            Finding::SharedName(n) => write!(f, "`{n}` is used as both an element and a set"),
            Finding::UnknownElement {
                constraint,
                element,
            } => write!(
                f,
                "constraint #{constraint} references unknown element `{element}`"
            ),
            Finding::UnknownSet { constraint, set } => {
                write!(f, "constraint #{constraint} references unknown set `{set}`")
            }
            Finding::SelfDifference { constraint, set } => {
                write!(
                    f,
                    "constraint #{constraint} is a self-difference `{set} \\ {set}`"
                )
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.findings.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, finding) in self.findings.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{finding}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("expected {expected}, found {found}")]
    Syntax { expected: String, found: String },
    #[error("missing `{0}:` header")]
    MissingHeader(&'static str),
    #[error("`{0}:` header must declare at least one name")]
    EmptyHeader(&'static str),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("unknown set `{0}`")]
    UnknownSet(String),
    #[error("duplicate declaration of `{0}`")]
    Duplicate(String),
    #[error("`{0}` is used as both an element and a set")]
    SharedName(String),
    #[error("self-difference `{0} \\ {0}`")]
    SelfDifference(String),
}

/// A diagnostic with a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok<'a> {
    Ident(&'a str),
    Colon,
    Backslash,
    Eq,
    LBrace,
    RBrace,
    Comma,
    Bang,
}

impl fmt::Display for Tok<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Backslash => f.write_str("`\\`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Bang => f.write_str("`!`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned<'a> {
    tok: Tok<'a>,
    column: usize,
}

fn tokenize(line: &str, line_no: usize) -> Result<Vec<Spanned<'_>>, ParseError> {
    let mut out = Vec::new();
    let mut chars = line.char_indices().peekable();
    let mut column = 0;
    while let Some((start, c)) = chars.next() {
        column += 1;
        let col = column;
        let tok = match c {
            '#' => break,
            c if c.is_whitespace() => continue,
            ':' => Tok::Colon,
            '\\' => Tok::Backslash,
            '=' => Tok::Eq,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ',' => Tok::Comma,
            '!' => Tok::Bang,
            c if is_ident_char(c) => {
                let mut end = start + c.len_utf8();
                while let Some(&(i, n)) = chars.peek() {
                    if !is_ident_char(n) {
                        break;
                    }
                    end = i + n.len_utf8();
                    column += 1;
                    chars.next();
                }
                Tok::Ident(&line[start..end])
            }
            other => {
                return Err(ParseError {
                    line: line_no,
                    column: col,
                    kind: ParseErrorKind::UnexpectedChar(other),
                })
            }
        };
        out.push(Spanned { tok, column: col });
    }
    Ok(out)
}

struct LineParser<'a> {
    line: usize,
    toks: Vec<Spanned<'a>>,
    pos: usize,
    end_column: usize,
}

impl<'a> LineParser<'a> {
    fn err(&self, column: usize, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.line,
            column,
            kind,
        }
    }

    fn column(&self) -> usize {
        self.toks
            .get(self.pos)
            .map_or(self.end_column, |t| t.column)
    }

    fn found(&self) -> String {
        self.toks
            .get(self.pos)
            .map_or_else(|| "end of line".to_owned(), |t| t.tok.to_string())
    }

    fn expect(&mut self, tok: Tok<'static>, what: &str) -> Result<(), ParseError> {
        if self.toks.get(self.pos).map(|t| &t.tok) == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.syntax(what))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(&'a str, usize), ParseError> {
        match self.toks.get(self.pos) {
            Some(Spanned {
                tok: Tok::Ident(s),
                column,
            }) => {
                self.pos += 1;
                Ok((s, *column))
            }
            _ => Err(self.syntax(what)),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            Err(self.syntax("end of line"))
        }
    }

    fn syntax(&self, expected: &str) -> ParseError {
        self.err(
            self.column(),
            ParseErrorKind::Syntax {
                expected: expected.to_owned(),
                found: self.found(),
            },
        )
    }
}

struct Scope {
    elements: HashMap<String, usize>,
    sets: HashMap<String, usize>,
}

/// Parses DSL text into an instance whose declarations and constraints keep source order.
pub fn parse_scp(source: &str) -> Result<ScpInstance, ParseError> {
    let mut lines = source
        .lines()
        .enumerate()
        .map(|(i, text)| (i + 1, text))
        .filter_map(|(no, text)| match tokenize(text, no) {
            Ok(toks) if toks.is_empty() => None,
            Ok(toks) => Some(Ok(LineParser {
                line: no,
                toks,
                pos: 0,
                end_column: text.chars().count() + 1,
            })),
            Err(e) => Some(Err(e)),
        });

    let total_lines = source.lines().count().max(1);
    let missing = |header: &'static str| ParseError {
        line: total_lines,
        column: 1,
        kind: ParseErrorKind::MissingHeader(header),
    };

    let mut p = lines.next().ok_or_else(|| missing("universe"))??;
    let universe = parse_header(&mut p, "universe", &HashMap::new())?;
    let mut p = lines.next().ok_or_else(|| missing("sets"))??;
    let element_names: HashMap<String, usize> = universe
        .iter()
        .enumerate()
        .map(|(i, e)| (e.clone(), i))
        .collect();
    let sets = parse_header(&mut p, "sets", &element_names)?;
    let scope = Scope {
        elements: element_names,
        sets: sets
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect(),
    };

    let mut constraints = Vec::new();
    for p in lines {
        let mut p = p?;
        parse_constraint_line(&mut p, &scope, &mut constraints)?;
    }

    Ok(ScpInstance {
        universe: universe.into_iter().map(ElementId).collect(),
        sets: sets.into_iter().map(SetId).collect(),
        constraints,
    })
}

fn parse_header(
    p: &mut LineParser<'_>,
    header: &'static str,
    other_namespace: &HashMap<String, usize>,
) -> Result<Vec<String>, ParseError> {
    match (p.toks.first(), p.toks.get(1)) {
        (
            Some(Spanned {
                tok: Tok::Ident(h), ..
            }),
            Some(Spanned {
                tok: Tok::Colon, ..
            }),
        ) if *h == header => p.pos = 2,
        _ => return Err(p.err(p.column(), ParseErrorKind::MissingHeader(header))),
    }
    let mut names: Vec<String> = Vec::new();
    while p.pos < p.toks.len() {
        let (name, column) = p.ident("identifier")?;
        if names.iter().any(|n| n == name) {
            return Err(p.err(column, ParseErrorKind::Duplicate(name.to_owned())));
        }
        if other_namespace.contains_key(name) {
            return Err(p.err(column, ParseErrorKind::SharedName(name.to_owned())));
        }
        names.push(name.to_owned());
    }
    if names.is_empty() {
        return Err(p.err(p.end_column, ParseErrorKind::EmptyHeader(header)));
    }
    Ok(names)
}

fn parse_constraint_line(
    p: &mut LineParser<'_>,
    scope: &Scope,
    out: &mut Vec<Constraint>,
) -> Result<(), ParseError> {
    let (first, first_col) = p.ident("element or set name")?;
    match p.toks.get(p.pos).map(|t| &t.tok) {
        Some(Tok::Backslash) => {
            p.pos += 1;
            let in_set = lookup_set(p, scope, first, first_col)?;
            let (second, second_col) = p.ident("set name")?;
            let not_in_set = lookup_set(p, scope, second, second_col)?;
            if in_set == not_in_set {
                return Err(p.err(second_col, ParseErrorKind::SelfDifference(first.to_owned())));
            }
            p.expect(Tok::Eq, "`=`")?;
            p.expect(Tok::LBrace, "`{`")?;
            if p.toks.get(p.pos).map(|t| &t.tok) == Some(&Tok::RBrace) {
                p.pos += 1;
                return p.finish();
            }
            loop {
                let (elem, col) = p.ident("element name")?;
                let element = lookup_element(p, scope, elem, col)?;
                out.push(Constraint::Difference {
                    element,
                    in_set: in_set.clone(),
                    not_in_set: not_in_set.clone(),
                });
                match p.toks.get(p.pos).map(|t| &t.tok) {
                    Some(Tok::Comma) => p.pos += 1,
                    Some(Tok::RBrace) => {
                        p.pos += 1;
                        break;
                    }
                    _ => return Err(p.syntax("`,` or `}`")),
                }
            }
            p.finish()
        }
        Some(Tok::Bang) => {
            p.pos += 1;
            expect_keyword_in(p)?;
            let element = lookup_element(p, scope, first, first_col)?;
            let (set, col) = p.ident("set name")?;
            let set = lookup_set(p, scope, set, col)?;
            p.finish()?;
            out.push(Constraint::Exclusion { element, set });
            Ok(())
        }
        Some(Tok::Ident("in")) => {
            p.pos += 1;
            let element = lookup_element(p, scope, first, first_col)?;
            let (set, col) = p.ident("set name")?;
            let set = lookup_set(p, scope, set, col)?;
            p.finish()?;
            out.push(Constraint::Inclusion { element, set });
            Ok(())
        }
        _ => Err(p.syntax("`in`, `!in` or `\\`")),
    }
}

fn expect_keyword_in(p: &mut LineParser<'_>) -> Result<(), ParseError> {
    match p.toks.get(p.pos).map(|t| &t.tok) {
        Some(Tok::Ident("in")) => {
            p.pos += 1;
            Ok(())
        }
        _ => Err(p.syntax("`in`")),
    }
}

fn lookup_element(
    p: &LineParser<'_>,
    scope: &Scope,
    name: &str,
    column: usize,
) -> Result<ElementId, ParseError> {
    if scope.elements.contains_key(name) {
        Ok(ElementId::new(name))
    } else {
        Err(p.err(column, ParseErrorKind::UnknownElement(name.to_owned())))
    }
}

fn lookup_set(
    p: &LineParser<'_>,
    scope: &Scope,
    name: &str,
    column: usize,
) -> Result<SetId, ParseError> {
    if scope.sets.contains_key(name) {
        Ok(SetId::new(name))
    } else {
        Err(p.err(column, ParseErrorKind::UnknownSet(name.to_owned())))
    }
}
