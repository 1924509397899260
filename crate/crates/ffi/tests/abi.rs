use std::ffi::{c_char, CStr, CString};
use std::ptr;

use scp_ffi::*;
use serde_json::Value;

const EXAMPLE: &str = include_str!("../../core/tests/corpus/worked_example.scp");

struct Owned(*mut c_char);

impl Owned {
    fn text(&self) -> String {
        unsafe { CStr::from_ptr(self.0) }
            .to_str()
            .unwrap()
            .to_owned()
    }

    fn json(&self) -> Value {
        serde_json::from_str(&self.text()).unwrap()
    }
}

impl Drop for Owned {
    fn drop(&mut self) {
        unsafe { scp_string_free(self.0) }
    }
}

fn last_error() -> String {
    let p = scp_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn parse(src: &str) -> Result<*mut ScpInstanceHandle, ScpStatus> {
    let src = CString::new(src).unwrap();
    let mut inst = ptr::null_mut();
    match unsafe { scp_instance_parse(src.as_ptr(), &mut inst) } {
        ScpStatus::Ok => Ok(inst),
        status => Err(status),
    }
}

fn example() -> (*mut ScpInstanceHandle, *mut ScpMatrixHandle) {
    let inst = parse(EXAMPLE).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { scp_matrix_build(inst, &mut m) }, ScpStatus::Ok);
    (inst, m)
}

fn release(inst: *mut ScpInstanceHandle, m: *mut ScpMatrixHandle) {
    unsafe {
        scp_matrix_free(m);
        scp_instance_free(inst);
    }
}

#[test]
fn matrix_cells_through_the_abi() {
    let (inst, m) = example();
    let (mut rows, mut cols) = (0usize, 0usize);
    assert_eq!(
        unsafe { scp_matrix_dims(m, &mut rows, &mut cols) },
        ScpStatus::Ok
    );
    assert_eq!((rows, cols), (7, 3));
    let expected: [[i8; 3]; 7] = [
        [1, -1, 1],
        [-1, 1, 1],
        [-1, 0, 0],
        [1, -1, -1],
        [0, 0, 1],
        [-1, 1, 0],
        [0, 0, 0],
    ];
    for (r, row) in expected.iter().enumerate() {
        for (c, &want) in row.iter().enumerate() {
            let mut v = 99i8;
            assert_eq!(unsafe { scp_matrix_get(m, r, c, &mut v) }, ScpStatus::Ok);
            assert_eq!(v, want, "({r}, {c})");
        }
    }
    let mut v = 0i8;
    assert_eq!(
        unsafe { scp_matrix_get(m, 7, 0, &mut v) },
        ScpStatus::OutOfRange
    );
    let mut u = 0usize;
    assert_eq!(
        unsafe { scp_matrix_uncertain_count(m, &mut u) },
        ScpStatus::Ok
    );
    assert_eq!(u, 8);
    release(inst, m);
}

#[test]
fn json_documents() {
    let (inst, m) = example();
    let mut s = ptr::null_mut();

    assert_eq!(unsafe { scp_matrix_to_json(m, &mut s) }, ScpStatus::Ok);
    let doc = Owned(s).json();
    assert_eq!(doc["entries"][2], serde_json::json!([-1, 0, 0]));

    assert_eq!(unsafe { scp_quantum_to_json(m, &mut s) }, ScpStatus::Ok);
    assert_eq!(Owned(s).json()["entries"][0][1], "out");

    let x = CString::new("X").unwrap();
    assert_eq!(
        unsafe { scp_set_expression(m, x.as_ptr(), &mut s) },
        ScpStatus::Ok
    );
    assert_eq!(
        Owned(s).text(),
        "X = |0>.(a+d) + |1>.(b+c+f) + (1/sqrt2)(|0>+|1>).(e+g)"
    );

    assert_eq!(
        unsafe { scp_variants_json(m, x.as_ptr(), 20, &mut s) },
        ScpStatus::Ok
    );
    let names: Vec<String> = Owned(s).json()["variants"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["name"].as_str().unwrap().to_owned())
        .collect();
    assert_eq!(names, ["X-0", "X-1", "X-2", "X-3"]);

    assert_eq!(
        unsafe { scp_completions_json(m, 20, &mut s) },
        ScpStatus::Ok
    );
    assert_eq!(
        Owned(s).json()["completions"].as_array().unwrap().len(),
        256
    );

    assert_eq!(unsafe { scp_instance_to_dsl(inst, &mut s) }, ScpStatus::Ok);
    let again = parse(&Owned(s).text()).unwrap();
    unsafe { scp_instance_free(again) };

    release(inst, m);
}

#[test]
fn sampling_round_trip() {
    let (inst, m) = example();
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { scp_sample_json(m, 42, 10_000, &mut s) },
        ScpStatus::Ok
    );
    let doc = Owned(s).json();
    assert_eq!(doc["measurements"], 210_000);
    for f in doc["per_cell_frequency"].as_object().unwrap().values() {
        assert!((0.48..=0.52).contains(&f.as_f64().unwrap()));
    }

    assert_eq!(
        unsafe { scp_completions_json(m, 20, &mut s) },
        ScpStatus::Ok
    );
    let target = Owned(s).json()["completions"][100].to_string();
    let target = CString::new(target).unwrap();
    let run = |seed| {
        let mut s = ptr::null_mut();
        assert_eq!(
            unsafe { scp_sample_until_json(m, target.as_ptr(), seed, 0, &mut s) },
            ScpStatus::Ok
        );
        Owned(s).json()
    };
    let a = run(9);
    assert_eq!(a["hit"], true);
    assert_eq!(a, run(9));

    let bad = CString::new("[[1, 1, 1]]").unwrap();
    assert_eq!(
        unsafe { scp_sample_until_json(m, bad.as_ptr(), 0, 0, &mut s) },
        ScpStatus::InvalidTarget
    );
    assert!(last_error().contains("target"));
    release(inst, m);
}

#[test]
fn error_codes_and_messages() {
    assert_eq!(
        parse("universe: a\nsets: X\na on X\n").unwrap_err(),
        ScpStatus::Parse
    );
    assert!(last_error().starts_with("3:3:"), "{}", last_error());

    let inst = parse("universe: c\nsets: X\nc in X\nc !in X\n").unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { scp_matrix_build(inst, &mut m) },
        ScpStatus::Contradiction
    );
    assert!(m.is_null());
    let msg = last_error();
    assert!(msg.contains("#0") && msg.contains("#1"), "{msg}");
    unsafe { scp_instance_free(inst) };

    let (inst, m) = example();
    let mut s = ptr::null_mut();
    let w = CString::new("W").unwrap();
    assert_eq!(
        unsafe { scp_set_expression(m, w.as_ptr(), &mut s) },
        ScpStatus::UnknownSet
    );
    assert_eq!(
        unsafe { scp_completions_json(m, 4, &mut s) },
        ScpStatus::CapExceeded
    );
    let z = CString::new("Z").unwrap();
    assert_eq!(
        unsafe { scp_variants_json(m, z.as_ptr(), 2, &mut s) },
        ScpStatus::CapExceeded
    );
    release(inst, m);
}

#[test]
fn null_and_utf8_arguments_are_rejected() {
    let mut inst = ptr::null_mut();
    assert_eq!(
        unsafe { scp_instance_parse(ptr::null(), &mut inst) },
        ScpStatus::NullPointer
    );
    let src = CString::new(EXAMPLE).unwrap();
    assert_eq!(
        unsafe { scp_instance_parse(src.as_ptr(), ptr::null_mut()) },
        ScpStatus::NullPointer
    );
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { scp_matrix_build(ptr::null(), &mut m) },
        ScpStatus::NullPointer
    );

    let bad = [0xffu8, 0xfe, 0];
    assert_eq!(
        unsafe { scp_instance_parse(bad.as_ptr().cast(), &mut inst) },
        ScpStatus::InvalidUtf8
    );

    unsafe {
        scp_instance_free(ptr::null_mut());
        scp_matrix_free(ptr::null_mut());
        scp_string_free(ptr::null_mut());
    }
    let v = unsafe { CStr::from_ptr(scp_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
