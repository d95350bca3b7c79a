use std::ffi::c_char;
use std::ptr;

use dail_ffi::*;

fn family(q: usize) -> *mut DailFamily {
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { dail_family_generate(q, &mut f) }, DailStatus::Ok);
    f
}

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    let n = unsafe { dail_last_error_message(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf.iter().take_while(|&&c| c != 0).map(|&c| c as u8).collect();
    assert_eq!(bytes.len(), n.min(255));
    String::from_utf8(bytes).unwrap()
}

#[test]
fn family_round_trip() {
    let f = family(7);
    let (mut len, mut order) = (0, 0);
    assert_eq!(unsafe { dail_family_info(f, &mut len, &mut order) }, DailStatus::Ok);
    assert_eq!((len, order), (6, 7));
    let mut orth = false;
    assert_eq!(unsafe { dail_family_are_orthogonal(f, 0, 5, &mut orth) }, DailStatus::Ok);
    assert!(orth);
    assert_eq!(unsafe { dail_family_are_orthogonal(f, 0, 6, &mut orth) }, DailStatus::OutOfRange);
    assert!(last_error().contains("out of range"));
    unsafe { dail_family_free(f) };
}

#[test]
fn non_prime_order() {
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { dail_family_generate(12, &mut f) }, DailStatus::NotPrime);
    assert!(f.is_null());
    assert!(last_error().contains("13"));
}

#[test]
fn null_arguments() {
    assert_eq!(unsafe { dail_family_generate(5, ptr::null_mut()) }, DailStatus::NullPointer);
    let mut n = 0;
    assert_eq!(unsafe { dail_family_info(ptr::null(), &mut n, &mut n) }, DailStatus::NullPointer);
    unsafe { dail_family_free(ptr::null_mut()) };
    unsafe { dail_rectangle_free(ptr::null_mut()) };
}

#[test]
fn rectangle_patterns_and_overlap() {
    let f = family(17);
    let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
    assert_eq!(unsafe { dail_family_cut(f, 0, 16, 12, &mut a) }, DailStatus::Ok);
    assert_eq!(unsafe { dail_family_cut(f, 3, 16, 12, &mut b) }, DailStatus::Ok);
    let (mut rows, mut cols) = (0, 0);
    assert_eq!(unsafe { dail_rectangle_shape(a, &mut rows, &mut cols) }, DailStatus::Ok);
    assert_eq!((rows, cols), (16, 12));
    let mut sym = 0;
    assert_eq!(unsafe { dail_rectangle_get(a, 2, 5, &mut sym) }, DailStatus::Ok);
    assert_eq!(sym, 7);
    assert_eq!(unsafe { dail_rectangle_get(a, 16, 0, &mut sym) }, DailStatus::OutOfRange);

    let mut len = 0;
    let mut small = [DailHop::default(); 4];
    assert_eq!(unsafe { dail_rectangle_pattern(a, 0, small.as_mut_ptr(), small.len(), &mut len) }, DailStatus::BufferTooSmall);
    let mut hops = vec![DailHop::default(); len];
    assert_eq!(unsafe { dail_rectangle_pattern(a, 0, hops.as_mut_ptr(), hops.len(), &mut len) }, DailStatus::Ok);
    for h in &hops {
        let mut s = 99;
        unsafe { dail_rectangle_get(a, h.channel as usize, h.slot as usize, &mut s) };
        assert_eq!(s, 0);
    }

    let mut shared = 9;
    assert_eq!(unsafe { dail_pattern_overlap(a, 1, a, 2, &mut shared) }, DailStatus::Ok);
    assert_eq!(shared, 0);
    for s in 0..17 {
        for t in 0..17 {
            assert_eq!(unsafe { dail_pattern_overlap(a, s, b, t, &mut shared) }, DailStatus::Ok);
            assert!(shared <= 1);
        }
    }
    unsafe {
        dail_rectangle_free(a);
        dail_rectangle_free(b);
        dail_family_free(f);
    }
}

#[test]
fn analysis_entry_points() {
    let mut v = 0.0;
    assert_eq!(unsafe { dail_success_probability(0, 16, 12, 0.5, 16, DailInterpretation::Literal, &mut v) }, DailStatus::Ok);
    assert_eq!(v, 1.0);
    assert_eq!(unsafe { dail_success_probability(3, 4, 4, 0.5, 0, DailInterpretation::Literal, &mut v) }, DailStatus::InvalidArgument);
    let (mut lo, mut hi) = (0, 0);
    assert_eq!(unsafe { dail_collision_bounds(20, 12, &mut lo, &mut hi) }, DailStatus::Ok);
    assert_eq!((lo, hi), (9, 20));
}

#[test]
fn simulation_matches_library() {
    let cfg = DailSimConfig {
        n_wbans: 4,
        sensors_per_wban: 4,
        channels: 8,
        frame_length: 8,
        omega: 1.0,
        superframes: 20,
        seed: 3,
        scheme: DailScheme::Latin,
        coordinated: true,
        abstract_neighbors: 6,
        retry_limit: 1,
    };
    let mut r = DailSimResult::default();
    assert_eq!(unsafe { dail_simulate(&cfg, &mut r) }, DailStatus::Ok);
    assert!(r.total_tx > 0 && r.mcp > 0.0 && r.mcp <= 1.0);

    let mut lib = dail::sim::NetworkConfig::new(4, 4);
    lib.channels = 8;
    lib.frame_length = 8;
    lib.omega = 1.0;
    lib.superframes = 20;
    lib.seed = 3;
    lib.geometry = dail::sim::Geometry::AbstractQ { neighbors: 6 };
    let net = dail::sim::build_network(&lib).unwrap();
    let sched = dail::sim::assign_dail_schedules(&net, &dail::sim::dail_family(&lib).unwrap(), &lib).unwrap();
    let rep = dail::sim::run(&net, &sched, &lib).unwrap();
    assert_eq!((r.total_tx, r.collided_tx), (rep.total_tx, rep.collided_tx));

    let bad = DailSimConfig { abstract_neighbors: 100, ..cfg };
    assert_eq!(unsafe { dail_simulate(&bad, &mut r) }, DailStatus::Simulation);
    assert!(last_error().contains("neighbours"));
}

#[test]
fn header_is_current() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/dail.h")).unwrap();
    for name in [
        "dail_family_generate",
        "dail_family_free",
        "dail_family_cut",
        "dail_rectangle_pattern",
        "dail_pattern_overlap",
        "dail_success_probability",
        "dail_collision_bounds",
        "dail_simulate",
        "dail_last_error_message",
        "typedef struct DailFamily DailFamily;",
        "DAIL_STATUS_BUFFER_TOO_SMALL = 5",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
