//! Fully measured outcomes over the element x set grid.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Measured membership of one cell. Bit 0 is a member, bit 1 a non-member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Membership {
    Member,
    NonMember,
}

impl Membership {
    pub fn bit(self) -> u8 {
        match self {
            Membership::Member => 0,
            Membership::NonMember => 1,
        }
    }

    pub fn from_bit(bit: u8) -> Option<Self> {
        match bit {
            0 => Some(Membership::Member),
            1 => Some(Membership::NonMember),
            _ => None,
        }
    }

    pub fn is_member(self) -> bool {
        self == Membership::Member
    }

    pub fn flipped(self) -> Self {
        match self {
            Membership::Member => Membership::NonMember,
            Membership::NonMember => Membership::Member,
        }
    }
}

/// Row-major memberships for every `(element, set)` cell.
///
/// Ordering is lexicographic over cells with `Member < NonMember`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    rows: usize,
    cols: usize,
    cells: Vec<Membership>,
}

impl Assignment {
    pub fn new(rows: usize, cols: usize, cells: Vec<Membership>) -> Option<Self> {
        (cells.len() == rows * cols).then_some(Self { rows, cols, cells })
    }

    pub fn from_bit_rows(rows: &[Vec<u8>]) -> Option<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut cells = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return None;
            }
            for &bit in row {
                cells.push(Membership::from_bit(bit)?);
            }
        }
        Some(Self {
            rows: rows.len(),
            cols,
            cells,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Membership {
        self.cells[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Membership) {
        self.cells[row * self.cols + col] = value;
    }

    pub fn cells(&self) -> &[Membership] {
        &self.cells
    }

    pub fn bit_rows(&self) -> Vec<Vec<u8>> {
        self.cells
            .chunks(self.cols.max(1))
            .map(|r| r.iter().map(|m| m.bit()).collect())
            .collect()
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.cells.chunks(self.cols.max(1)).enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            for m in row {
                write!(f, "{}", m.bit())?;
            }
        }
        Ok(())
    }
}

impl Serialize for Assignment {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.bit_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Assignment {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<u8>>::deserialize(d)?;
        Assignment::from_bit_rows(&rows)
            .ok_or_else(|| D::Error::custom("expected equal-length rows of 0/1 bits"))
    }
}
