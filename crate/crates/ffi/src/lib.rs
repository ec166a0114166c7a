//! C ABI for `dualis`.
//!
//! Graphs live behind the opaque [`DualisGraph`] handle. Every fallible
//! call returns a [`DualisStatus`]; on failure the message is available
//! from [`dualis_last_error`] on the same thread. Strings returned by the
//! library must be released with [`dualis_string_free`], handles with
//! [`dualis_graph_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dualis::budget::Budget;
use dualis::duality::{graph_self_dual, mutual_duality, DualityError};
use dualis::format::{parse_graph, write_graph};
use dualis::graph::dual_graph;
use dualis::hardness::{enumerate_assignments, gen_3partition_mpd, HardnessError, ThreePartitionInstance};
use dualis::planarity::planar_embed;
use dualis::{Multigraph, RotationSystem};

/// Result of a library call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualisStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInput = 4,
    NotPlanar = 5,
    Budget = 6,
    Panic = 7,
}

/// A multigraph, optionally with a rotation system.
pub struct DualisGraph {
    graph: Multigraph,
    rotation: Option<RotationSystem>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

struct Failure(DualisStatus, String);

impl From<DualityError> for Failure {
    fn from(e: DualityError) -> Self {
        let status = match e {
            DualityError::Budget(_) => DualisStatus::Budget,
            DualityError::NotPlanar => DualisStatus::NotPlanar,
            _ => DualisStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

impl From<HardnessError> for Failure {
    fn from(e: HardnessError) -> Self {
        let status = match e {
            HardnessError::Budget(_) => DualisStatus::Budget,
            HardnessError::Parse { .. } => DualisStatus::Parse,
            _ => DualisStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

/// Runs `f`, turning errors and panics into a status and the last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DualisStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DualisStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            DualisStatus::Panic
        }
    }
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure(DualisStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Failure(DualisStatus::InvalidUtf8, "string is not UTF-8".into()))
}

unsafe fn handle<'a>(g: *const DualisGraph) -> Result<&'a DualisGraph, Failure> {
    g.as_ref().ok_or_else(|| Failure(DualisStatus::NullPointer, "null graph handle".into()))
}

unsafe fn out_ptr<'a, T>(p: *mut T) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure(DualisStatus::NullPointer, "null output pointer".into()))
}

fn boxed(graph: Multigraph, rotation: Option<RotationSystem>) -> *mut DualisGraph {
    Box::into_raw(Box::new(DualisGraph { graph, rotation }))
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dualis_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dualis_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a graph in the text format (with or without rotations).
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dualis_graph_parse(source: *const c_char, out: *mut *mut DualisGraph) -> DualisStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let file = parse_graph(text(source)?).map_err(|e| Failure(DualisStatus::Parse, e.to_string()))?;
        *out = boxed(file.graph, file.rotation);
        Ok(())
    })
}

/// Releases a graph handle. NULL is ignored.
///
/// # Safety
/// `graph` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn dualis_graph_free(graph: *mut DualisGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Number of vertices, or 0 for NULL.
///
/// # Safety
/// `graph` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dualis_graph_vertex_count(graph: *const DualisGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.graph.vertex_count())
}

/// Number of edges, or 0 for NULL.
///
/// # Safety
/// `graph` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dualis_graph_edge_count(graph: *const DualisGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.graph.edge_count())
}

/// Serializes a graph (with its rotation, if any). Free the result with
/// `dualis_string_free`.
///
/// # Safety
/// `graph` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dualis_graph_write(graph: *const DualisGraph, out: *mut *mut c_char) -> DualisStatus {
    guard(|| {
        let g = handle(graph)?;
        let out = out_ptr(out)?;
        let s = write_graph(&g.graph, g.rotation.as_ref());
        *out = CString::new(s).map_err(|_| Failure(DualisStatus::InvalidInput, "name contains NUL".into()))?.into_raw();
        Ok(())
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn dualis_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Replaces the graph's rotation by a computed planar embedding.
///
/// # Safety
/// `graph` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dualis_graph_embed(graph: *mut DualisGraph) -> DualisStatus {
    guard(|| {
        let g = graph.as_mut().ok_or_else(|| Failure(DualisStatus::NullPointer, "null graph handle".into()))?;
        let rho = planar_embed(&g.graph).map_err(|e| Failure(DualisStatus::NotPlanar, e.to_string()))?;
        g.rotation = Some(rho);
        Ok(())
    })
}

/// Dual of an embedded graph, with its induced rotation. A graph without
/// a rotation is embedded first.
///
/// # Safety
/// `graph` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dualis_graph_dual(graph: *const DualisGraph, out: *mut *mut DualisGraph) -> DualisStatus {
    guard(|| {
        let g = handle(graph)?;
        let out = out_ptr(out)?;
        let rho = match &g.rotation {
            Some(r) => r.clone(),
            None => planar_embed(&g.graph).map_err(|e| Failure(DualisStatus::NotPlanar, e.to_string()))?,
        };
        let dual = dual_graph(&g.graph, &rho).map_err(|e| Failure(DualisStatus::NotPlanar, e.to_string()))?;
        *out = boxed(dual.graph, Some(dual.rotation));
        Ok(())
    })
}

/// Whether `g2` is a dual of `g1`; both must be biconnected and planar.
///
/// # Safety
/// `g1`, `g2` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dualis_mutual_duality(
    g1: *const DualisGraph,
    g2: *const DualisGraph,
    out: *mut bool,
) -> DualisStatus {
    guard(|| {
        let (a, b) = (handle(g1)?, handle(g2)?);
        let out = out_ptr(out)?;
        *out = mutual_duality(&a.graph, &b.graph)?;
        Ok(())
    })
}

/// Whether a biconnected planar graph is isomorphic to one of its duals.
///
/// # Safety
/// `graph` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dualis_graph_self_dual(graph: *const DualisGraph, out: *mut bool) -> DualisStatus {
    guard(|| {
        let g = handle(graph)?;
        let out = out_ptr(out)?;
        *out = graph_self_dual(&g.graph)?;
        Ok(())
    })
}

/// Generates the mutual-duality pair for a 3-Partition instance given as
/// text (`B <int>` then `A <ints>`).
///
/// # Safety
/// `instance` must be a NUL-terminated string; `g1`, `g2` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn dualis_gen_3partition(
    instance: *const c_char,
    simple: bool,
    g1: *mut *mut DualisGraph,
    g2: *mut *mut DualisGraph,
) -> DualisStatus {
    guard(|| {
        let (g1, g2) = (out_ptr(g1)?, out_ptr(g2)?);
        let inst = ThreePartitionInstance::parse(text(instance)?)?;
        let pair = gen_3partition_mpd(&inst, simple)?;
        *g1 = boxed(pair.g1, None);
        *g2 = boxed(pair.g2, None);
        Ok(())
    })
}

/// Decides the generated pair of a 3-Partition instance by enumerating
/// star-to-face assignments, within `budget` steps.
///
/// # Safety
/// `instance` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dualis_verify_3partition(
    instance: *const c_char,
    budget: u64,
    out: *mut bool,
) -> DualisStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let inst = ThreePartitionInstance::parse(text(instance)?)?;
        *out = enumerate_assignments(&inst, &mut Budget::new(budget))?.answer;
        Ok(())
    })
}
