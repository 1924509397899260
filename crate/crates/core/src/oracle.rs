//! Brute-force ground truth for small instances.
//!
//! Completions are enumerated directly from the matrix, while [`satisfies`]
//! checks an assignment against the raw constraint list without going through
//! the matrix builder, so each side can falsify the other.

use std::collections::HashMap;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::assignment::{Assignment, Membership};
use crate::instance::{Constraint, ScpInstance};
use crate::qimm::{TernaryMatrix, TernaryValue};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("{uncertain} uncertain cells exceed the enumeration cap of {cap}")]
    CapExceeded { uncertain: usize, cap: u32 },
    #[error("assignment is {found_rows}x{found_cols} but the instance grid is {rows}x{cols}")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        found_rows: usize,
        found_cols: usize,
    },
    #[error("sample #{index} is not a consistent completion: sampler bug")]
    SampleOutsideCompletions { index: usize },
    #[error("{samples} samples is fewer than 10 per completion ({completions} completions)")]
    InsufficientSamples { samples: usize, completions: usize },
    #[error("significance must lie in (0, 1), got {0}")]
    InvalidSignificance(f64),
}

/// Every assignment extending the determinate cells, in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletionSet {
    rows: usize,
    cols: usize,
    uncertain: Vec<usize>,
    base: Assignment,
    completions: Vec<Assignment>,
}

impl CompletionSet {
    pub fn len(&self) -> usize {
        self.completions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.completions.is_empty()
    }

    pub fn completions(&self) -> &[Assignment] {
        &self.completions
    }

    /// Row-major grid indices of the uncertain cells.
    pub fn uncertain_cells(&self) -> &[usize] {
        &self.uncertain
    }

    /// Position of `assignment` in the completion order, or `None` if it is
    /// not a consistent completion.
    pub fn index_of(&self, assignment: &Assignment) -> Option<usize> {
        if assignment.rows() != self.rows || assignment.cols() != self.cols {
            return None;
        }
        let mut index = 0usize;
        let mut next_uncertain = self.uncertain.iter().peekable();
        for (i, (&got, &fixed)) in assignment.cells().iter().zip(self.base.cells()).enumerate() {
            if next_uncertain.peek() == Some(&&i) {
                next_uncertain.next();
                index = (index << 1) | got.bit() as usize;
            } else if got != fixed {
                return None;
            }
        }
        Some(index)
    }
}

impl Serialize for CompletionSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CompletionSet", 1)?;
        st.serialize_field("completions", &self.completions)?;
        st.end()
    }
}

pub fn enumerate_completions(
    matrix: &TernaryMatrix,
    cap: u32,
) -> Result<CompletionSet, OracleError> {
    let uncertain: Vec<usize> = matrix
        .entries()
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_determinate())
        .map(|(i, _)| i)
        .collect();
    let u = uncertain.len();
    if u > cap as usize || u >= usize::BITS as usize {
        return Err(OracleError::CapExceeded { uncertain: u, cap });
    }
    let base_cells = matrix
        .entries()
        .iter()
        .map(|v| match v {
            TernaryValue::Out => Membership::NonMember,
            _ => Membership::Member,
        })
        .collect();
    let base = Assignment::new(matrix.rows(), matrix.cols(), base_cells).expect("matrix shape");

    let completions = (0..1usize << u)
        .map(|index| {
            let mut a = base.clone();
            for (k, &cell) in uncertain.iter().enumerate() {
                let bit = (index >> (u - 1 - k)) & 1;
                let m = Membership::from_bit(bit as u8).expect("bit");
                a.set(cell / matrix.cols(), cell % matrix.cols(), m);
            }
            a
        })
        .collect();

    Ok(CompletionSet {
        rows: matrix.rows(),
        cols: matrix.cols(),
        uncertain,
        base,
        completions,
    })
}

/// True iff `assignment` satisfies every constraint of `instance`.
pub fn satisfies(assignment: &Assignment, instance: &ScpInstance) -> Result<bool, OracleError> {
    let rows = instance.universe().len();
    let cols = instance.sets().len();
    if assignment.rows() != rows || assignment.cols() != cols {
        return Err(OracleError::DimensionMismatch {
            rows,
            cols,
            found_rows: assignment.rows(),
            found_cols: assignment.cols(),
        });
    }
    let row: HashMap<&str, usize> = instance
        .universe()
        .iter()
        .enumerate()
        .map(|(i, e)| (e.as_str(), i))
        .collect();
    let col: HashMap<&str, usize> = instance
        .sets()
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let member = |e: &str, s: &str| -> Option<bool> {
        Some(assignment.get(*row.get(e)?, *col.get(s)?).is_member())
    };

    Ok(instance.constraints().iter().all(|c| match c {
        Constraint::Inclusion { element, set } => {
            member(element.as_str(), set.as_str()) == Some(true)
        }
        Constraint::Exclusion { element, set } => {
            member(element.as_str(), set.as_str()) == Some(false)
        }
        Constraint::Difference {
            element,
            in_set,
            not_in_set,
        } => {
            member(element.as_str(), in_set.as_str()) == Some(true)
                && member(element.as_str(), not_in_set.as_str()) == Some(false)
        }
    }))
}

/// Chi-square goodness of fit of observed completions against uniform.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquareReport {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    pub significance: f64,
    pub samples: usize,
    pub categories: usize,
    pub pass: bool,
}

/// Pearson statistic of `counts` against equal expected frequencies.
pub fn chi_square_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    if counts.is_empty() || total == 0 {
        return 0.0;
    }
    let expected = total as f64 / counts.len() as f64;
    counts
        .iter()
        .map(|&o| {
            let d = o as f64 - expected;
            d * d / expected
        })
        .sum()
}

/// Upper-tail probability of a chi-square variate with `df` degrees of freedom.
pub fn chi_square_p_value(statistic: f64, df: usize) -> f64 {
    if df == 0 {
        return 1.0;
    }
    let dist = ChiSquared::new(df as f64).expect("positive degrees of freedom");
    dist.sf(statistic)
}

pub fn distribution_check(
    samples: &[Assignment],
    completions: &CompletionSet,
    significance: f64,
) -> Result<ChiSquareReport, OracleError> {
    if !(significance > 0.0 && significance < 1.0) {
        return Err(OracleError::InvalidSignificance(significance));
    }
    let k = completions.len();
    if samples.len() < 10 * k {
        return Err(OracleError::InsufficientSamples {
            samples: samples.len(),
            completions: k,
        });
    }
    let mut counts = vec![0u64; k];
    for (index, s) in samples.iter().enumerate() {
        let slot = completions
            .index_of(s)
            .ok_or(OracleError::SampleOutsideCompletions { index })?;
        counts[slot] += 1;
    }
    let statistic = chi_square_uniform(&counts);
    let df = k.saturating_sub(1);
    let p_value = chi_square_p_value(statistic, df);
    Ok(ChiSquareReport {
        statistic,
        degrees_of_freedom: df,
        p_value,
        significance,
        samples: samples.len(),
        categories: k,
        pass: p_value >= significance,
    })
}
