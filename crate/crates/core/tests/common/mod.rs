#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use scp_core::{parse_scp, Constraint, ElementId, ScpInstance, SetId};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

pub fn corpus_file(name: &str) -> PathBuf {
    corpus_dir().join(name)
}

pub fn load(name: &str) -> ScpInstance {
    let text = std::fs::read_to_string(corpus_file(name)).unwrap();
    parse_scp(&text).unwrap()
}

pub fn worked_example() -> ScpInstance {
    load("worked_example.scp")
}

/// Every parseable, non-contradictory corpus instance, by file name.
pub fn corpus() -> Vec<(String, ScpInstance)> {
    let mut names: Vec<String> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".scp"))
        .collect();
    names.sort();
    names
        .into_iter()
        .filter_map(|n| {
            let inst = load(&n);
            scp_core::build_matrix(&inst).ok().map(|_| (n, inst))
        })
        .collect()
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// A random instance whose constraints all agree with one hidden assignment.
pub fn consistent_instance<R: Rng>(
    rng: &mut R,
    max_elements: usize,
    max_sets: usize,
    max_constraints: usize,
) -> ScpInstance {
    let n = rng.gen_range(1..=max_elements);
    let k = rng.gen_range(1..=max_sets);
    let truth: Vec<Vec<bool>> = (0..n)
        .map(|_| (0..k).map(|_| rng.gen()).collect())
        .collect();
    let elements: Vec<ElementId> = names("e", n).into_iter().map(ElementId::new).collect();
    let sets: Vec<SetId> = names("S", k).into_iter().map(SetId::new).collect();
    let count = rng.gen_range(0..=max_constraints);
    let mut constraints = Vec::with_capacity(count);
    for _ in 0..count {
        let x = rng.gen_range(0..n);
        let row = &truth[x];
        let ins: Vec<usize> = (0..k).filter(|&j| row[j]).collect();
        let outs: Vec<usize> = (0..k).filter(|&j| !row[j]).collect();
        let c = if k > 1 && !ins.is_empty() && !outs.is_empty() && rng.gen_bool(0.4) {
            Constraint::Difference {
                element: elements[x].clone(),
                in_set: sets[*ins.choose(rng).unwrap()].clone(),
                not_in_set: sets[*outs.choose(rng).unwrap()].clone(),
            }
        } else {
            let j = rng.gen_range(0..k);
            if row[j] {
                Constraint::Inclusion {
                    element: elements[x].clone(),
                    set: sets[j].clone(),
                }
            } else {
                Constraint::Exclusion {
                    element: elements[x].clone(),
                    set: sets[j].clone(),
                }
            }
        };
        constraints.push(c);
    }
    ScpInstance::from_parts(elements, sets, constraints)
}

/// A random valid instance whose constraints may contradict each other.
pub fn arbitrary_instance<R: Rng>(
    rng: &mut R,
    max_elements: usize,
    max_sets: usize,
    max_constraints: usize,
) -> ScpInstance {
    let n = rng.gen_range(1..=max_elements);
    let k = rng.gen_range(1..=max_sets);
    let elements: Vec<ElementId> = names("e", n).into_iter().map(ElementId::new).collect();
    let sets: Vec<SetId> = names("S", k).into_iter().map(SetId::new).collect();
    let count = rng.gen_range(0..=max_constraints);
    let constraints = (0..count)
        .map(|_| {
            let element = elements[rng.gen_range(0..n)].clone();
            let a = rng.gen_range(0..k);
            match rng.gen_range(0..3) {
                0 => Constraint::Inclusion {
                    element,
                    set: sets[a].clone(),
                },
                1 if k > 1 => {
                    let b = (a + rng.gen_range(1..k)) % k;
                    Constraint::Difference {
                        element,
                        in_set: sets[a].clone(),
                        not_in_set: sets[b].clone(),
                    }
                }
                _ => Constraint::Exclusion {
                    element,
                    set: sets[a].clone(),
                },
            }
        })
        .collect();
    ScpInstance::from_parts(elements, sets, constraints)
}

/// Four elements, two sets, and exactly `u` (0..=8) uncertain cells: the
/// first `8 - u` cells in row-major order are pinned.
pub fn synthetic_with_uncertain(u: usize) -> ScpInstance {
    assert!(u <= 8);
    let mut src = String::from("universe: x0 x1 x2 x3\nsets: A B\n");
    for cell in 0..(8 - u) {
        let (row, col) = (cell / 2, cell % 2);
        let set = ["A", "B"][col];
        let op = if cell % 3 == 0 { "!in" } else { "in" };
        src.push_str(&format!("x{row} {op} {set}\n"));
    }
    parse_scp(&src).unwrap()
}

pub fn shuffled<R: Rng>(inst: &ScpInstance, rng: &mut R) -> ScpInstance {
    let mut cs = inst.constraints().to_vec();
    cs.shuffle(rng);
    inst.with_constraints(cs)
}
