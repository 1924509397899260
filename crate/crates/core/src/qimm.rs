//! The ternary membership matrix.
//!
//! Rows follow the universe, columns follow the set family. A cell is `IN` (1)
//! or `OUT` (-1) once a constraint pins it, and stays `UNCERTAIN` (0) otherwise.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::instance::{Constraint, ElementId, ScpInstance, SetId, ValidationReport};

/// Default bound on uncertain cells for variant and completion enumeration.
pub const DEFAULT_ENUMERATION_CAP: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TernaryValue {
    In,
    Uncertain,
    Out,
}

impl TernaryValue {
    pub fn code(self) -> i8 {
        match self {
            TernaryValue::In => 1,
            TernaryValue::Uncertain => 0,
            TernaryValue::Out => -1,
        }
    }

    pub fn from_code(code: i8) -> Option<Self> {
        match code {
            1 => Some(TernaryValue::In),
            0 => Some(TernaryValue::Uncertain),
            -1 => Some(TernaryValue::Out),
            _ => None,
        }
    }

    pub fn from_membership(member: bool) -> Self {
        if member {
            TernaryValue::In
        } else {
            TernaryValue::Out
        }
    }

    pub fn is_determinate(self) -> bool {
        self != TernaryValue::Uncertain
    }
}

impl Serialize for TernaryValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i8(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("invalid instance:\n{0}")]
    Invalid(ValidationReport),
    #[error(
        "contradiction on ({element}, {set}): constraint #{conflicting} (`{conflicting_text}`) \
         contradicts constraint #{first} (`{first_text}`)"
    )]
    Contradiction {
        element: ElementId,
        set: SetId,
        first: usize,
        first_text: String,
        conflicting: usize,
        conflicting_text: String,
    },
    #[error("unknown set `{0}`")]
    UnknownSet(SetId),
    #[error("set `{set}` has {uncertain} uncertain elements, above the enumeration cap of {cap}")]
    CapExceeded {
        set: SetId,
        uncertain: usize,
        cap: u32,
    },
}

/// Dense ternary matrix with per-cell provenance.
///
/// Equality compares labels and cell values only; provenance is ignored.
#[derive(Debug, Clone)]
pub struct TernaryMatrix {
    elements: Vec<ElementId>,
    sets: Vec<SetId>,
    entries: Vec<TernaryValue>,
    provenance: Vec<Option<usize>>,
}

impl TernaryMatrix {
    /// An all-`UNCERTAIN` matrix.
    pub fn uncertain(elements: Vec<ElementId>, sets: Vec<SetId>) -> Self {
        let len = elements.len() * sets.len();
        Self {
            elements,
            sets,
            entries: vec![TernaryValue::Uncertain; len],
            provenance: vec![None; len],
        }
    }

    /// Builds a matrix from explicit row-major values, with no provenance.
    pub fn from_entries(
        elements: Vec<ElementId>,
        sets: Vec<SetId>,
        entries: Vec<TernaryValue>,
    ) -> Option<Self> {
        if entries.len() != elements.len() * sets.len() {
            return None;
        }
        let provenance = vec![None; entries.len()];
        Some(Self {
            elements,
            sets,
            entries,
            provenance,
        })
    }

    pub fn elements(&self) -> &[ElementId] {
        &self.elements
    }

    pub fn sets(&self) -> &[SetId] {
        &self.sets
    }

    pub fn rows(&self) -> usize {
        self.elements.len()
    }

    pub fn cols(&self) -> usize {
        self.sets.len()
    }

    pub fn get(&self, row: usize, col: usize) -> TernaryValue {
        self.entries[row * self.cols() + col]
    }

    /// Index of the constraint that pinned the cell, if any.
    pub fn provenance(&self, row: usize, col: usize) -> Option<usize> {
        self.provenance[row * self.cols() + col]
    }

    /// Row-major cell values.
    pub fn entries(&self) -> &[TernaryValue] {
        &self.entries
    }

    pub fn row(&self, row: usize) -> &[TernaryValue] {
        let cols = self.cols();
        &self.entries[row * cols..(row + 1) * cols]
    }

    pub fn set_index(&self, set: &SetId) -> Option<usize> {
        self.sets.iter().position(|s| s == set)
    }

    pub fn value(&self, element: &ElementId, set: &SetId) -> Option<TernaryValue> {
        let row = self.elements.iter().position(|e| e == element)?;
        let col = self.set_index(set)?;
        Some(self.get(row, col))
    }

    /// All `UNCERTAIN` cells as `(row, col)` in row-major order.
    pub fn uncertain_positions(&self) -> Vec<(usize, usize)> {
        let cols = self.cols();
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_determinate())
            .map(|(i, _)| (i / cols, i % cols))
            .collect()
    }

    /// All `UNCERTAIN` cells by name, row-major.
    pub fn uncertain_cells(&self) -> Vec<(ElementId, SetId)> {
        self.uncertain_positions()
            .into_iter()
            .map(|(r, c)| (self.elements[r].clone(), self.sets[c].clone()))
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("matrix serializes")
    }

    /// Plain-text table with right-aligned codes.
    pub fn to_table(&self) -> String {
        let label = self
            .elements
            .iter()
            .map(|e| e.as_str().chars().count())
            .max()
            .unwrap_or(0);
        let width = self
            .sets
            .iter()
            .map(|s| s.as_str().chars().count())
            .max()
            .unwrap_or(0)
            .max(2);
        let mut out = format!("{:label$}", "");
        for s in &self.sets {
            out.push_str(&format!("  {:>width$}", s.as_str()));
        }
        out.push('\n');
        for (r, e) in self.elements.iter().enumerate() {
            out.push_str(&format!("{:label$}", e.as_str()));
            for v in self.row(r) {
                out.push_str(&format!("  {:>width$}", v.code()));
            }
            out.push('\n');
        }
        out
    }
}

impl PartialEq for TernaryMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements && self.sets == other.sets && self.entries == other.entries
    }
}

impl Eq for TernaryMatrix {}

impl Serialize for TernaryMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<&[TernaryValue]> = (0..self.rows()).map(|r| self.row(r)).collect();
        let mut st = s.serialize_struct("TernaryMatrix", 3)?;
        st.serialize_field("elements", &self.elements)?;
        st.serialize_field("sets", &self.sets)?;
        st.serialize_field("entries", &rows)?;
        st.end()
    }
}

/// Applies the constraints in order. Re-asserting a cell's value is a no-op;
/// asserting the opposite value is a contradiction.
pub fn build_matrix(instance: &ScpInstance) -> Result<TernaryMatrix, MatrixError> {
    let report = instance.validate();
    if !report.is_valid() {
        return Err(MatrixError::Invalid(report));
    }
    let mut m = TernaryMatrix::uncertain(instance.universe().to_vec(), instance.sets().to_vec());
    let cols = m.cols();
    let constraints = instance.constraints();
    for (index, c) in constraints.iter().enumerate() {
        let row = instance
            .element_index(c.element())
            .expect("validated element");
        for (set, member) in c.assertions() {
            let col = instance.set_index(set).expect("validated set");
            let cell = row * cols + col;
            let value = TernaryValue::from_membership(member);
            match m.entries[cell] {
                TernaryValue::Uncertain => {
                    m.entries[cell] = value;
                    m.provenance[cell] = Some(index);
                }
                existing if existing == value => {}
                _ => {
                    let first = m.provenance[cell].expect("determinate cells carry provenance");
                    return Err(contradiction(constraints, c, set, first, index));
                }
            }
        }
    }
    Ok(m)
}

fn contradiction(
    constraints: &[Constraint],
    conflicting: &Constraint,
    set: &SetId,
    first: usize,
    index: usize,
) -> MatrixError {
    MatrixError::Contradiction {
        element: conflicting.element().clone(),
        set: set.clone(),
        first,
        first_text: constraints[first].to_string(),
        conflicting: index,
        conflicting_text: conflicting.to_string(),
    }
}

/// Three-way partition of the universe by one set's column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SetDescription {
    pub set: SetId,
    pub members: Vec<ElementId>,
    pub non_members: Vec<ElementId>,
    pub uncertain: Vec<ElementId>,
}

impl fmt::Display for SetDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(xs: &[ElementId]) -> String {
            xs.iter()
                .map(ElementId::as_str)
                .collect::<Vec<_>>()
                .join(", ")
        }
        write!(
            f,
            "{}: in {{{}}}; not in {{{}}}; could be in {{{}}}",
            self.set,
            list(&self.members),
            list(&self.non_members),
            list(&self.uncertain)
        )
    }
}

pub fn describe_set(matrix: &TernaryMatrix, set: &SetId) -> Result<SetDescription, MatrixError> {
    let col = matrix
        .set_index(set)
        .ok_or_else(|| MatrixError::UnknownSet(set.clone()))?;
    let mut d = SetDescription {
        set: set.clone(),
        members: Vec::new(),
        non_members: Vec::new(),
        uncertain: Vec::new(),
    };
    for (row, e) in matrix.elements().iter().enumerate() {
        let bucket = match matrix.get(row, col) {
            TernaryValue::In => &mut d.members,
            TernaryValue::Out => &mut d.non_members,
            TernaryValue::Uncertain => &mut d.uncertain,
        };
        bucket.push(e.clone());
    }
    Ok(d)
}

/// One determinate version of a set, named `<set>-<index>`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Variant {
    pub set: SetId,
    pub index: u64,
    pub members: Vec<ElementId>,
}

impl Variant {
    pub fn name(&self) -> String {
        format!("{}-{}", self.set, self.index)
    }
}

/// Lazily yields the variants of one set in index order.
///
/// Bit `k` of the index (counting from the most significant of `|u|` bits)
/// decides whether the `k`-th uncertain element, in universe order, is included.
#[derive(Debug, Clone)]
pub struct Variants {
    set: SetId,
    // (element, Some(bit position from the least significant end)) for uncertain cells.
    column: Vec<(ElementId, Option<u32>)>,
    next: u64,
    total: u64,
}

impl Iterator for Variants {
    type Item = Variant;

    fn next(&mut self) -> Option<Variant> {
        if self.next >= self.total {
            return None;
        }
        let index = self.next;
        self.next += 1;
        let members = self
            .column
            .iter()
            .filter(|(_, bit)| bit.is_none_or(|b| (index >> b) & 1 == 1))
            .map(|(e, _)| e.clone())
            .collect();
        Some(Variant {
            set: self.set.clone(),
            index,
            members,
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.total - self.next) as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Variants {}

/// Iterator over the `2^|u|` variants of `set`, refusing when `|u| > cap`.
pub fn variants(matrix: &TernaryMatrix, set: &SetId, cap: u32) -> Result<Variants, MatrixError> {
    let d = describe_set(matrix, set)?;
    let u = d.uncertain.len();
    if u > cap as usize || u >= 64 {
        return Err(MatrixError::CapExceeded {
            set: set.clone(),
            uncertain: u,
            cap,
        });
    }
    let col = matrix.set_index(set).expect("described set");
    let mut remaining = u as u32;
    let column = matrix
        .elements()
        .iter()
        .enumerate()
        .filter_map(|(row, e)| match matrix.get(row, col) {
            TernaryValue::In => Some((e.clone(), None)),
            TernaryValue::Out => None,
            TernaryValue::Uncertain => {
                remaining -= 1;
                Some((e.clone(), Some(remaining)))
            }
        })
        .collect();
    Ok(Variants {
        set: set.clone(),
        column,
        next: 0,
        total: 1u64 << u,
    })
}

pub fn enumerate_variants(
    matrix: &TernaryMatrix,
    set: &SetId,
    cap: u32,
) -> Result<Vec<Variant>, MatrixError> {
    Ok(variants(matrix, set, cap)?.collect())
}
