//! C interface to the `dail` crate.
//!
//! Objects cross the boundary as opaque heap handles released with the
//! matching `*_free` function. Every fallible call returns a [`DailStatus`];
//! the message for the most recent failure on the calling thread is
//! available from [`dail_last_error_message`]. Panics are caught and
//! reported as [`DailStatus::Internal`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dail::analysis::{collision_bounds, success_probability_with, AnalyticalParams, Interpretation};
use dail::latin::{are_orthogonal, generate_mols, overlap_count, LatinError, LatinRectangle, OrthogonalFamily};
use dail::sim::{
    assign_dail_schedules, assign_sms_schedules, build_network, dail_family, run, AssignmentMode, Geometry, NetworkConfig,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DailStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotPrime = 3,
    OutOfRange = 4,
    BufferTooSmall = 5,
    ModelInconsistency = 6,
    Simulation = 7,
    Internal = 8,
}

/// Reading of the success-probability formula.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DailInterpretation {
    Literal = 0,
    Standalone = 1,
    Normalized = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DailHop {
    pub channel: u32,
    pub slot: u32,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DailScheme {
    Latin = 0,
    StaticChannel = 1,
}

/// Simulation parameters. `abstract_neighbors < 0` selects the default disk
/// geometry; otherwise every sensor gets exactly that many cross-network
/// neighbours.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct DailSimConfig {
    pub n_wbans: u32,
    pub sensors_per_wban: u32,
    pub channels: u32,
    pub frame_length: u32,
    pub omega: f64,
    pub superframes: u32,
    pub seed: u64,
    pub scheme: DailScheme,
    pub coordinated: bool,
    pub abstract_neighbors: i32,
    pub retry_limit: u32,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct DailSimResult {
    pub mcp: f64,
    pub pc: f64,
    pub total_tx: u64,
    pub collided_tx: u64,
}

/// Opaque orthogonal family.
pub struct DailFamily(OrthogonalFamily);

/// Opaque Latin rectangle.
pub struct DailRectangle(LatinRectangle);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(status: DailStatus, message: impl ToString) -> DailStatus {
    let text = message.to_string().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
    status
}

fn latin_status(e: &LatinError) -> DailStatus {
    match e {
        LatinError::NotPrime { .. } => DailStatus::NotPrime,
        LatinError::CutTooLarge { .. } | LatinError::NoSuchSquare { .. } | LatinError::NoSuchSymbol { .. } => DailStatus::OutOfRange,
        _ => DailStatus::InvalidArgument,
    }
}

fn guard(body: impl FnOnce() -> DailStatus) -> DailStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(s) => s,
        Err(_) => fail(DailStatus::Internal, "internal panic"),
    }
}

macro_rules! deref {
    ($p:expr) => {
        match unsafe { $p.as_ref() } {
            Some(v) => v,
            None => return fail(DailStatus::NullPointer, concat!(stringify!($p), " is null")),
        }
    };
}

macro_rules! out {
    ($p:expr) => {
        match unsafe { $p.as_mut() } {
            Some(v) => v,
            None => return fail(DailStatus::NullPointer, concat!(stringify!($p), " is null")),
        }
    };
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length excluding the NUL,
/// or 0 when there is no message.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn dail_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            unsafe {
                ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
        }
        bytes.len()
    })
}

/// Complete family of `q − 1` squares for prime `q`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dail_family_generate(q: usize, out: *mut *mut DailFamily) -> DailStatus {
    guard(|| {
        let out = out!(out);
        match generate_mols(q) {
            Ok(f) => {
                *out = Box::into_raw(Box::new(DailFamily(f)));
                DailStatus::Ok
            }
            Err(e) => fail(latin_status(&e), e),
        }
    })
}

/// # Safety
/// `family` must be null or a handle from [`dail_family_generate`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dail_family_free(family: *mut DailFamily) {
    if !family.is_null() {
        drop(unsafe { Box::from_raw(family) });
    }
}

/// Number of squares and their order.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn dail_family_info(family: *const DailFamily, len: *mut usize, order: *mut usize) -> DailStatus {
    guard(|| {
        let f = deref!(family);
        *out!(len) = f.0.len();
        *out!(order) = f.0.order();
        DailStatus::Ok
    })
}

/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn dail_family_are_orthogonal(family: *const DailFamily, a: usize, b: usize, out: *mut bool) -> DailStatus {
    guard(|| {
        let f = deref!(family);
        let out = out!(out);
        let pair = f.0.square(a).and_then(|x| f.0.square(b).map(|y| (x, y)));
        match pair.and_then(|(x, y)| are_orthogonal(x, y)) {
            Ok(v) => {
                *out = v;
                DailStatus::Ok
            }
            Err(e) => fail(latin_status(&e), e),
        }
    })
}

/// Cuts square `index` to `channels x slots`.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn dail_family_cut(
    family: *const DailFamily,
    index: usize,
    channels: usize,
    slots: usize,
    out: *mut *mut DailRectangle,
) -> DailStatus {
    guard(|| {
        let f = deref!(family);
        let out = out!(out);
        match f.0.rectangle(index, channels, slots) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(DailRectangle(r)));
                DailStatus::Ok
            }
            Err(e) => fail(latin_status(&e), e),
        }
    })
}

/// # Safety
/// `rect` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dail_rectangle_free(rect: *mut DailRectangle) {
    if !rect.is_null() {
        drop(unsafe { Box::from_raw(rect) });
    }
}

/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn dail_rectangle_shape(rect: *const DailRectangle, channels: *mut usize, slots: *mut usize) -> DailStatus {
    guard(|| {
        let r = deref!(rect);
        *out!(channels) = r.0.channels();
        *out!(slots) = r.0.slots();
        DailStatus::Ok
    })
}

/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn dail_rectangle_get(rect: *const DailRectangle, channel: usize, slot: usize, out: *mut u32) -> DailStatus {
    guard(|| {
        let r = deref!(rect);
        let out = out!(out);
        if channel >= r.0.channels() || slot >= r.0.slots() {
            return fail(DailStatus::OutOfRange, format!("cell ({channel}, {slot}) outside {}x{}", r.0.channels(), r.0.slots()));
        }
        *out = r.0.get(channel, slot);
        DailStatus::Ok
    })
}

/// Writes the hops of `symbol` into `hops`. `len` always receives the hop
/// count; if it exceeds `capacity` nothing is written and
/// [`DailStatus::BufferTooSmall`] is returned.
///
/// # Safety
/// `hops` must be valid for `capacity` elements (or null with capacity 0).
#[no_mangle]
pub unsafe extern "C" fn dail_rectangle_pattern(
    rect: *const DailRectangle,
    symbol: u32,
    hops: *mut DailHop,
    capacity: usize,
    len: *mut usize,
) -> DailStatus {
    guard(|| {
        let r = deref!(rect);
        let len = out!(len);
        let p = match r.0.pattern(symbol) {
            Ok(p) => p,
            Err(e) => return fail(latin_status(&e), e),
        };
        *len = p.len();
        if p.len() > capacity {
            return fail(DailStatus::BufferTooSmall, format!("pattern has {} hops, buffer holds {capacity}", p.len()));
        }
        if p.is_empty() {
            return DailStatus::Ok;
        }
        if hops.is_null() {
            return fail(DailStatus::NullPointer, "hops is null");
        }
        for (i, h) in p.hops().iter().enumerate() {
            unsafe { *hops.add(i) = DailHop { channel: h.channel as u32, slot: h.slot as u32 } };
        }
        DailStatus::Ok
    })
}

/// Cells shared by symbol `sa` of `a` and symbol `sb` of `b`.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn dail_pattern_overlap(
    a: *const DailRectangle,
    sa: u32,
    b: *const DailRectangle,
    sb: u32,
    out: *mut usize,
) -> DailStatus {
    guard(|| {
        let (a, b) = (deref!(a), deref!(b));
        let out = out!(out);
        match a.0.pattern(sa).and_then(|pa| b.0.pattern(sb).and_then(|pb| overlap_count(&pa, &pb))) {
            Ok(n) => {
                *out = n;
                DailStatus::Ok
            }
            Err(e) => fail(latin_status(&e), e),
        }
    })
}

/// Per-packet success probability for `q` neighbours, `m` channels, `k`
/// slots, use factor `omega` and `family_size` rectangles.
///
/// # Safety
/// `out` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn dail_success_probability(
    q: u32,
    m: u32,
    k: u32,
    omega: f64,
    family_size: u32,
    interpretation: DailInterpretation,
    out: *mut f64,
) -> DailStatus {
    guard(|| {
        let out = out!(out);
        let params = match AnalyticalParams::new(q, m, k, omega, family_size) {
            Ok(p) => p,
            Err(e) => return fail(DailStatus::InvalidArgument, e),
        };
        let interp = match interpretation {
            DailInterpretation::Literal => Interpretation::Literal,
            DailInterpretation::Standalone => Interpretation::Standalone,
            DailInterpretation::Normalized => Interpretation::NormalizedBinomial,
        };
        match success_probability_with(&params, interp) {
            Ok(v) => {
                *out = v;
                DailStatus::Ok
            }
            Err(e) => fail(DailStatus::ModelInconsistency, e),
        }
    })
}

/// `(max(q − k + 1, 0), q)`.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn dail_collision_bounds(q: u32, k: u32, lower: *mut u32, upper: *mut u32) -> DailStatus {
    guard(|| {
        let (lo, hi) = collision_bounds(q, k);
        *out!(lower) = lo;
        *out!(upper) = hi;
        DailStatus::Ok
    })
}

/// Builds a network, schedules it and runs it.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn dail_simulate(config: *const DailSimConfig, result: *mut DailSimResult) -> DailStatus {
    guard(|| {
        let c = deref!(config);
        let result = out!(result);
        let mut cfg = NetworkConfig::new(c.n_wbans as usize, c.sensors_per_wban as usize);
        cfg.channels = c.channels as usize;
        cfg.frame_length = c.frame_length as usize;
        cfg.omega = c.omega;
        cfg.superframes = c.superframes as usize;
        cfg.seed = c.seed;
        cfg.energy.retry_limit = c.retry_limit;
        cfg.assignment_mode = if c.coordinated { AssignmentMode::CoordinatedDistinct } else { AssignmentMode::IidRandom };
        if c.abstract_neighbors >= 0 {
            cfg.geometry = Geometry::AbstractQ { neighbors: c.abstract_neighbors as usize };
        }
        let report = build_network(&cfg).and_then(|net| {
            let sched = match c.scheme {
                DailScheme::Latin => assign_dail_schedules(&net, &dail_family(&cfg)?, &cfg)?,
                DailScheme::StaticChannel => assign_sms_schedules(&net, &cfg)?,
            };
            run(&net, &sched, &cfg)
        });
        match report {
            Ok(r) => {
                *result = DailSimResult { mcp: r.mcp, pc: r.pc, total_tx: r.total_tx, collided_tx: r.collided_tx };
                DailStatus::Ok
            }
            Err(e) => fail(DailStatus::Simulation, e),
        }
    })
}
