//! Separate-state sampling: one qubit per `(element, set)` cell, measured
//! together once per round.
//!
//! The register is a product of fixed single-qubit states, so measuring it is
//! exactly a sequence of independent per-cell draws: determinate cells collapse
//! to their fixed value and each superposed cell is a fair coin. Draws come
//! from a ChaCha8 stream seeded by `seed` on stream `round`, one 32-bit word per
//! cell index, so any round can be reproduced on its own.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::assignment::{Assignment, Membership};
use crate::instance::{ElementId, SetId};
use crate::quantum::{CellState, QuantumMatrix};

/// Upper bound on the default round budget.
pub const MAX_DEFAULT_ROUNDS: u64 = 1 << 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SampleError {
    #[error("target is {found_rows}x{found_cols} but the register is {rows}x{cols}")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        found_rows: usize,
        found_cols: usize,
    },
    #[error("target is unreachable: it contradicts the determinate cell ({element}, {set})")]
    UnreachableTarget { element: ElementId, set: SetId },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QubitRegister {
    elements: Vec<ElementId>,
    sets: Vec<SetId>,
    states: Vec<CellState>,
    preparation_count: u64,
}

impl QubitRegister {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn rows(&self) -> usize {
        self.elements.len()
    }

    pub fn cols(&self) -> usize {
        self.sets.len()
    }

    pub fn elements(&self) -> &[ElementId] {
        &self.elements
    }

    pub fn sets(&self) -> &[SetId] {
        &self.sets
    }

    pub fn preparation_count(&self) -> u64 {
        self.preparation_count
    }

    pub fn states(&self) -> &[CellState] {
        &self.states
    }

    /// `(element, set, state)` for every qubit, row-major.
    pub fn cells(&self) -> impl Iterator<Item = (&ElementId, &SetId, CellState)> + '_ {
        let cols = self.cols();
        self.states
            .iter()
            .enumerate()
            .map(move |(i, s)| (&self.elements[i / cols], &self.sets[i % cols], *s))
    }

    /// Register indices of the superposed qubits, row-major.
    pub fn superposed(&self) -> Vec<usize> {
        self.states
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == CellState::Superposed)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn uncertain_count(&self) -> usize {
        self.states
            .iter()
            .filter(|s| **s == CellState::Superposed)
            .count()
    }

    /// `2^(u+4)`, capped at [`MAX_DEFAULT_ROUNDS`].
    pub fn default_max_rounds(&self) -> u64 {
        let exp = self.uncertain_count() + 4;
        if exp >= 30 {
            MAX_DEFAULT_ROUNDS
        } else {
            1 << exp
        }
    }

    /// Checks that `target` has the register's shape and agrees with every
    /// determinate qubit.
    pub fn check_target(&self, target: &Assignment) -> Result<(), SampleError> {
        if target.rows() != self.rows() || target.cols() != self.cols() {
            return Err(SampleError::DimensionMismatch {
                rows: self.rows(),
                cols: self.cols(),
                found_rows: target.rows(),
                found_cols: target.cols(),
            });
        }
        for ((element, set, state), &m) in self.cells().zip(target.cells()) {
            let fixed = match state {
                CellState::In => Membership::Member,
                CellState::Out => Membership::NonMember,
                CellState::Superposed => continue,
            };
            if m != fixed {
                return Err(SampleError::UnreachableTarget {
                    element: element.clone(),
                    set: set.clone(),
                });
            }
        }
        Ok(())
    }
}

/// One qubit per cell, `m x n` preparations.
pub fn prepare(qmatrix: &QuantumMatrix) -> QubitRegister {
    let states = qmatrix.states().to_vec();
    QubitRegister {
        elements: qmatrix.elements().to_vec(),
        sets: qmatrix.sets().to_vec(),
        preparation_count: states.len() as u64,
        states,
    }
}

fn round_stream(seed: u64, round: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(round);
    rng
}

/// Measures every qubit once. Identical `(seed, round)` give identical outcomes.
pub fn measure_all(register: &QubitRegister, seed: u64, round: u64) -> Assignment {
    let mut rng = round_stream(seed, round);
    let cells = register
        .states
        .iter()
        .map(|state| {
            // Every cell consumes its word so the draw for cell i is word i of the stream.
            let word = rng.next_u32();
            match state {
                CellState::In => Membership::Member,
                CellState::Out => Membership::NonMember,
                CellState::Superposed if word >> 31 == 0 => Membership::Member,
                CellState::Superposed => Membership::NonMember,
            }
        })
        .collect();
    Assignment::new(register.rows(), register.cols(), cells).expect("register shape")
}

/// Per-superposed-qubit member counts over some number of rounds.
///
/// `merge` is associative and commutative, so rounds may be tallied in any
/// grouping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tally {
    rounds: u64,
    member_counts: Vec<u64>,
}

impl Tally {
    pub fn new(superposed: usize) -> Self {
        Self {
            rounds: 0,
            member_counts: vec![0; superposed],
        }
    }

    pub fn record(&mut self, outcome: &Assignment, superposed: &[usize]) {
        self.rounds += 1;
        for (count, &i) in self.member_counts.iter_mut().zip(superposed) {
            if outcome.cells()[i].is_member() {
                *count += 1;
            }
        }
    }

    pub fn merge(mut self, other: Tally) -> Tally {
        self.rounds += other.rounds;
        for (a, b) in self.member_counts.iter_mut().zip(other.member_counts) {
            *a += b;
        }
        self
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    pub fn member_counts(&self) -> &[u64] {
        &self.member_counts
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellFrequency {
    pub element: ElementId,
    pub set: SetId,
    /// Fraction of rounds in which the cell measured as a member.
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleReport {
    pub seed: u64,
    pub rounds: u64,
    pub target: Option<Assignment>,
    pub hit: bool,
    pub per_cell_frequency: Vec<CellFrequency>,
    pub preparations: u64,
    pub measurements: u64,
}

impl SampleReport {
    fn from_tally(
        register: &QubitRegister,
        superposed: &[usize],
        tally: &Tally,
        seed: u64,
        target: Option<Assignment>,
        hit: bool,
    ) -> Self {
        let per_cell_frequency = superposed
            .iter()
            .zip(tally.member_counts())
            .map(|(&i, &count)| CellFrequency {
                element: register.elements[i / register.cols()].clone(),
                set: register.sets[i % register.cols()].clone(),
                frequency: if tally.rounds() == 0 {
                    0.0
                } else {
                    count as f64 / tally.rounds() as f64
                },
            })
            .collect();
        let cost = complexity_report(register, tally.rounds());
        Self {
            seed,
            rounds: tally.rounds(),
            target,
            hit,
            per_cell_frequency,
            preparations: cost.preparations,
            measurements: cost.measurements,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

struct FrequencyMap<'a>(&'a [CellFrequency]);

impl Serialize for FrequencyMap<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for c in self.0 {
            map.serialize_entry(&format!("{},{}", c.element, c.set), &c.frequency)?;
        }
        map.end()
    }
}

impl Serialize for SampleReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SampleReport", 6)?;
        st.serialize_field("rounds", &self.rounds)?;
        st.serialize_field("hit", &self.hit)?;
        st.serialize_field(
            "per_cell_frequency",
            &FrequencyMap(&self.per_cell_frequency),
        )?;
        st.serialize_field("preparations", &self.preparations)?;
        st.serialize_field("measurements", &self.measurements)?;
        st.serialize_field("seed", &self.seed)?;
        st.end()
    }
}

/// Runs exactly `rounds` rounds with no target and reports member frequencies.
pub fn sample_rounds(register: &QubitRegister, seed: u64, rounds: u64) -> SampleReport {
    let superposed = register.superposed();
    let tally = (1..=rounds)
        .into_par_iter()
        .fold(
            || Tally::new(superposed.len()),
            |mut t, round| {
                t.record(&measure_all(register, seed, round), &superposed);
                t
            },
        )
        .reduce(|| Tally::new(superposed.len()), Tally::merge);
    SampleReport::from_tally(register, &superposed, &tally, seed, None, false)
}

/// Runs rounds `1..=max_rounds` until one measures exactly `target`.
pub fn sample_until(
    register: &QubitRegister,
    target: &Assignment,
    seed: u64,
    max_rounds: u64,
) -> Result<SampleReport, SampleError> {
    register.check_target(target)?;
    let superposed = register.superposed();
    let mut tally = Tally::new(superposed.len());
    let mut hit = false;
    for round in 1..=max_rounds {
        let outcome = measure_all(register, seed, round);
        tally.record(&outcome, &superposed);
        if outcome == *target {
            hit = true;
            break;
        }
    }
    Ok(SampleReport::from_tally(
        register,
        &superposed,
        &tally,
        seed,
        Some(target.clone()),
        hit,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Complexity {
    pub preparations: u64,
    pub measurements: u64,
}

/// Every round prepares and measures each of the `m x n` qubits once.
pub fn complexity_report(register: &QubitRegister, rounds: u64) -> Complexity {
    let per_round = register.preparation_count();
    Complexity {
        preparations: per_round * rounds,
        measurements: per_round * rounds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::parse_scp;
    use crate::qimm::build_matrix;
    use crate::qimm::tests::example_matrix;
    use crate::quantum::lift;

    fn register(src: &str) -> QubitRegister {
        prepare(&lift(&build_matrix(&parse_scp(src).unwrap()).unwrap()))
    }

    fn example_register() -> QubitRegister {
        prepare(&lift(&example_matrix()))
    }

    #[test]
    fn prepare_counts() {
        let r = example_register();
        assert_eq!(r.len(), 21);
        assert_eq!(r.preparation_count(), 21);
        assert_eq!(r.uncertain_count(), 8);
        let (e, s, st) = r.cells().nth(5).unwrap();
        assert_eq!((e.as_str(), s.as_str(), st), ("b", "Z", CellState::In));
        let one = register("universe: a\nsets: X\na in X\n");
        assert_eq!(one.len(), 1);
    }

    #[test]
    fn determinate_register_measures_its_matrix() {
        let r = register("universe: a b\nsets: X Y\na in X\na !in Y\nY \\ X = {b}\n");
        let expected = Assignment::from_bit_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
        for seed in [0, 1, 99] {
            assert_eq!(measure_all(&r, seed, 1), expected);
        }
    }

    #[test]
    fn rounds_are_reproducible_and_agree_with_fixed_cells() {
        let r = example_register();
        let m = example_matrix();
        for round in 1..50 {
            let a = measure_all(&r, 7, round);
            assert_eq!(a, measure_all(&r, 7, round));
            for (i, v) in m.entries().iter().enumerate() {
                match v.code() {
                    1 => assert_eq!(a.cells()[i], Membership::Member),
                    -1 => assert_eq!(a.cells()[i], Membership::NonMember),
                    _ => {}
                }
            }
        }
        let distinct: std::collections::HashSet<_> =
            (1..50).map(|round| measure_all(&r, 7, round)).collect();
        assert!(distinct.len() > 1);
    }

    #[test]
    fn marginal_frequencies_near_half() {
        let report = sample_rounds(&example_register(), 42, 10_000);
        assert_eq!(report.per_cell_frequency.len(), 8);
        for c in &report.per_cell_frequency {
            assert!((0.48..=0.52).contains(&c.frequency), "{c:?}");
        }
        assert_eq!(report.measurements, 210_000);
        assert_eq!(report.preparations, 210_000);
        assert!(!report.hit);
    }

    #[test]
    fn deterministic_target_hits_first_round() {
        let r = register("universe: a\nsets: X Y\na in X\na !in Y\n");
        let target = Assignment::from_bit_rows(&[vec![0, 1]]).unwrap();
        let report = sample_until(&r, &target, 0, 10).unwrap();
        assert!(report.hit);
        assert_eq!(report.rounds, 1);
    }

    #[test]
    fn unreachable_target() {
        let r = register("universe: a\nsets: X Y\na in X\n");
        let target = Assignment::from_bit_rows(&[vec![1, 0]]).unwrap();
        assert_eq!(
            sample_until(&r, &target, 0, 10).unwrap_err(),
            SampleError::UnreachableTarget {
                element: "a".into(),
                set: "X".into()
            }
        );
        let wrong_shape = Assignment::from_bit_rows(&[vec![0]]).unwrap();
        assert!(matches!(
            sample_until(&r, &wrong_shape, 0, 10),
            Err(SampleError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn exhausted_budget_reports_miss() {
        let r = example_register();
        let target = measure_all(&r, 3, 1000);
        let report = sample_until(&r, &target, 3, 0).unwrap();
        assert!(!report.hit);
        assert_eq!(report.rounds, 0);
        assert_eq!(report.measurements, 0);
    }

    #[test]
    fn tally_merge_is_order_independent() {
        let r = example_register();
        let sup = r.superposed();
        let mut parts: Vec<Tally> = (0..4)
            .map(|k| {
                let mut t = Tally::new(sup.len());
                for round in (k * 25 + 1)..=(k * 25 + 25) {
                    t.record(&measure_all(&r, 5, round), &sup);
                }
                t
            })
            .collect();
        let forward = parts
            .iter()
            .cloned()
            .fold(Tally::new(sup.len()), Tally::merge);
        parts.reverse();
        let backward = parts.into_iter().fold(Tally::new(sup.len()), Tally::merge);
        assert_eq!(forward, backward);
        assert_eq!(forward.rounds(), 100);
        let serial = sample_rounds(&r, 5, 100);
        for (c, &n) in serial
            .per_cell_frequency
            .iter()
            .zip(forward.member_counts())
        {
            assert_eq!(c.frequency, n as f64 / 100.0);
        }
    }

    #[test]
    fn complexity_is_linear_in_rounds() {
        let r = example_register();
        let c1 = complexity_report(&r, 1);
        assert_eq!((c1.preparations, c1.measurements), (21, 21));
        let c10 = complexity_report(&r, 10);
        assert_eq!((c10.preparations, c10.measurements), (210, 210));
        let one = register("universe: a\nsets: X\n");
        let c0 = complexity_report(&one, 0);
        assert_eq!((c0.preparations, c0.measurements), (0, 0));
    }

    #[test]
    fn default_budget() {
        assert_eq!(example_register().default_max_rounds(), 1 << 12);
        assert_eq!(
            register("universe: a\nsets: X\na in X\n").default_max_rounds(),
            16
        );
    }

    #[test]
    fn report_json_keys() {
        let r = register("universe: a\nsets: X\n");
        let report = sample_rounds(&r, 9, 4);
        let json = report.to_json();
        let keys: Vec<&str> = json
            .as_object()
            .unwrap()
            .keys()
            .map(|k| k.as_str())
            .collect();
        for k in [
            "rounds",
            "hit",
            "per_cell_frequency",
            "preparations",
            "measurements",
            "seed",
        ] {
            assert!(keys.contains(&k), "{k}");
        }
        assert!(json["per_cell_frequency"]["a,X"].is_number());
        assert_eq!(json["seed"], 9);
    }
}
