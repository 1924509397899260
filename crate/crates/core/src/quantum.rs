//! Qubit view of the ternary matrix.
//!
//! Membership maps to `|0>`, non-membership to `|1>`, and an uncertain cell
//! to the equal superposition `(|0> + |1>)/sqrt(2)`. Amplitudes are real and
//! no other states exist.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::instance::{ElementId, SetId};
use crate::qimm::{MatrixError, TernaryMatrix, TernaryValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellState {
    /// `|0>`
    In,
    /// `|1>`
    Out,
    /// `(1/sqrt2)(|0>+|1>)`
    Superposed,
}

impl CellState {
    /// `(amp0, amp1)` on the computational basis.
    pub fn amplitudes(self) -> (f64, f64) {
        match self {
            CellState::In => (1.0, 0.0),
            CellState::Out => (0.0, 1.0),
            CellState::Superposed => (FRAC_1_SQRT_2, FRAC_1_SQRT_2),
        }
    }

    /// Probability of measuring `|0>`, i.e. membership.
    pub fn member_probability(self) -> f64 {
        let (a0, _) = self.amplitudes();
        a0 * a0
    }

    pub fn from_ternary(value: TernaryValue) -> Self {
        match value {
            TernaryValue::In => CellState::In,
            TernaryValue::Out => CellState::Out,
            TernaryValue::Uncertain => CellState::Superposed,
        }
    }

    pub fn to_ternary(self) -> TernaryValue {
        match self {
            CellState::In => TernaryValue::In,
            CellState::Out => TernaryValue::Out,
            CellState::Superposed => TernaryValue::Uncertain,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CellState::In => "in",
            CellState::Out => "out",
            CellState::Superposed => "superposed",
        }
    }

    pub fn ket(self) -> &'static str {
        match self {
            CellState::In => "|0>",
            CellState::Out => "|1>",
            CellState::Superposed => "(1/sqrt2)(|0>+|1>)",
        }
    }
}

impl fmt::Display for CellState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.ket())
    }
}

impl Serialize for CellState {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantumMatrix {
    elements: Vec<ElementId>,
    sets: Vec<SetId>,
    states: Vec<CellState>,
}

impl QuantumMatrix {
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

    pub fn get(&self, row: usize, col: usize) -> CellState {
        self.states[row * self.cols() + col]
    }

    /// Row-major cell states.
    pub fn states(&self) -> &[CellState] {
        &self.states
    }

    pub fn state(&self, element: &ElementId, set: &SetId) -> Option<CellState> {
        let row = self.elements.iter().position(|e| e == element)?;
        let col = self.sets.iter().position(|s| s == set)?;
        Some(self.get(row, col))
    }

    /// Maps every state back to its ternary value.
    pub fn to_ternary(&self) -> TernaryMatrix {
        TernaryMatrix::from_entries(
            self.elements.clone(),
            self.sets.clone(),
            self.states.iter().map(|s| s.to_ternary()).collect(),
        )
        .expect("dimensions preserved")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("quantum matrix serializes")
    }

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
            .chain(self.states.iter().map(|s| s.ket().len()))
            .max()
            .unwrap_or(0);
        let mut out = format!("{:label$}", "");
        for s in &self.sets {
            out.push_str(&format!("  {:<width$}", s.as_str()));
        }
        out = out.trim_end().to_owned();
        out.push('\n');
        for (r, e) in self.elements.iter().enumerate() {
            let mut line = format!("{:label$}", e.as_str());
            for c in 0..self.cols() {
                line.push_str(&format!("  {:<width$}", self.get(r, c).ket()));
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }
}

impl Serialize for QuantumMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let cols = self.cols().max(1);
        let rows: Vec<&[CellState]> = self.states.chunks(cols).collect();
        let mut st = s.serialize_struct("QuantumMatrix", 3)?;
        st.serialize_field("elements", &self.elements)?;
        st.serialize_field("sets", &self.sets)?;
        st.serialize_field("entries", &rows)?;
        st.end()
    }
}

pub fn lift(matrix: &TernaryMatrix) -> QuantumMatrix {
    QuantumMatrix {
        elements: matrix.elements().to_vec(),
        sets: matrix.sets().to_vec(),
        states: matrix
            .entries()
            .iter()
            .map(|v| CellState::from_ternary(*v))
            .collect(),
    }
}

/// A set written as a sum of kets over element groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SetExpression {
    pub set: SetId,
    pub in_group: Vec<ElementId>,
    pub out_group: Vec<ElementId>,
    pub superposed_group: Vec<ElementId>,
}

pub fn set_expression(qmatrix: &QuantumMatrix, set: &SetId) -> Result<SetExpression, MatrixError> {
    let col = qmatrix
        .sets
        .iter()
        .position(|s| s == set)
        .ok_or_else(|| MatrixError::UnknownSet(set.clone()))?;
    let mut expr = SetExpression {
        set: set.clone(),
        in_group: Vec::new(),
        out_group: Vec::new(),
        superposed_group: Vec::new(),
    };
    for (row, e) in qmatrix.elements.iter().enumerate() {
        let group = match qmatrix.get(row, col) {
            CellState::In => &mut expr.in_group,
            CellState::Out => &mut expr.out_group,
            CellState::Superposed => &mut expr.superposed_group,
        };
        group.push(e.clone());
    }
    Ok(expr)
}

fn term(ket: &str, group: &[ElementId]) -> Option<String> {
    if group.is_empty() {
        return None;
    }
    let sum = group
        .iter()
        .map(ElementId::as_str)
        .collect::<Vec<_>>()
        .join("+");
    Some(format!("{ket}.({sum})"))
}

/// `X = |0>.(a+d) + |1>.(b+c+f) + (1/sqrt2)(|0>+|1>).(e+g)`, omitting empty groups.
pub fn render_expression(expr: &SetExpression) -> String {
    let terms: Vec<String> = [
        term(CellState::In.ket(), &expr.in_group),
        term(CellState::Out.ket(), &expr.out_group),
        term(CellState::Superposed.ket(), &expr.superposed_group),
    ]
    .into_iter()
    .flatten()
    .collect();
    if terms.is_empty() {
        format!("{} = (empty)", expr.set)
    } else {
        format!("{} = {}", expr.set, terms.join(" + "))
    }
}

/// `U = |0>.(a+b+...)`: a labelled family written as one `|0>` sum.
pub fn render_family<T: AsRef<str>>(label: &str, names: &[T]) -> String {
    if names.is_empty() {
        return format!("{label} = (empty)");
    }
    let sum = names
        .iter()
        .map(|n| n.as_ref())
        .collect::<Vec<_>>()
        .join("+");
    format!("{label} = |0>.({sum})")
}
