//! C ABI over `graphorder`.
//!
//! Graphs and models are opaque heap handles released with their `_free`
//! function. Every fallible call returns a [`GordStatus`]; on failure the
//! message is available from [`gord_last_error`] on the same thread until the
//! next failing call. Output arrays are caller-allocated.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use graphorder::apps::{self, GREEDY_SLACK};
use graphorder::checkpoint::load_don;
use graphorder::{
    degree_order, don_order_graph, f_score_graph, go_order, load_edge_list, read_edge_list, similarity, DonModel, Error,
    Graph, Permutation, WindowSize,
};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GordStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Io = 4,
    Refused = 5,
    NonFinite = 6,
    Checkpoint = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GordPartitionMethod {
    OrderSweep = 0,
    Random = 1,
    Greedy = 2,
}

/// Opaque graph handle.
pub struct GordGraph(Graph);

/// Opaque DON model handle.
pub struct GordModel(DonModel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(GordStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parse { .. } | Error::Range { .. } => GordStatus::Parse,
            Error::Io { .. } => GordStatus::Io,
            Error::Refused(_) => GordStatus::Refused,
            Error::NonFinite(_) => GordStatus::NonFinite,
            Error::Checkpoint(_) => GordStatus::Checkpoint,
            Error::Contract(_) | Error::Config(_) => GordStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn fail(status: GordStatus, msg: impl Into<String>) -> Failure {
    Failure(status, msg.into())
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GordStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GordStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            GordStatus::Panic
        }
    }
}

unsafe fn non_null<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| fail(GordStatus::NullPointer, format!("{what} is null")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(GordStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, need: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if len < need {
        return Err(fail(
            GordStatus::BufferTooSmall,
            format!("{what} holds {len} entries, {need} needed"),
        ));
    }
    if need == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(fail(GordStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts_mut(p, need))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(GordStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(GordStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn write_out<T>(p: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(fail(GordStatus::NullPointer, format!("{what} is null")));
    }
    p.write(value);
    Ok(())
}

fn window(w: usize) -> Result<WindowSize, Failure> {
    Ok(WindowSize::new(w)?)
}

unsafe fn permutation(g: &Graph, order: *const usize, len: usize) -> Result<Permutation, Failure> {
    let order = slice(order, len, "order")?;
    if order.len() != g.n() {
        return Err(fail(
            GordStatus::InvalidArgument,
            format!("order has {} entries, graph has {} vertices", order.len(), g.n()),
        ));
    }
    Ok(Permutation::new(order.to_vec())?)
}

fn copy_order(perm: &Permutation, out: &mut [usize]) {
    out.copy_from_slice(perm.order());
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gord_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Builds a graph from `len` arcs `src[i] -> dst[i]`. Self-loops and repeated
/// arcs are dropped.
///
/// # Safety
/// `src` and `dst` must point to `len` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gord_graph_from_arcs(
    n: usize,
    src: *const usize,
    dst: *const usize,
    len: usize,
    out: *mut *mut GordGraph,
) -> GordStatus {
    guard(|| {
        let src = slice(src, len, "src")?;
        let dst = slice(dst, len, "dst")?;
        let (g, _) = Graph::from_arcs(n, src.iter().copied().zip(dst.iter().copied()))?;
        write_out(out, Box::into_raw(Box::new(GordGraph(g))), "out")
    })
}

/// Parses edge-list text.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gord_graph_parse(text: *const c_char, out: *mut *mut GordGraph) -> GordStatus {
    guard(|| {
        let g = load_edge_list(c_str(text, "text")?)?.graph;
        write_out(out, Box::into_raw(Box::new(GordGraph(g))), "out")
    })
}

/// Reads an edge-list file.
///
/// # Safety
/// `path` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gord_graph_read(path: *const c_char, out: *mut *mut GordGraph) -> GordStatus {
    guard(|| {
        let g = read_edge_list(Path::new(c_str(path, "path")?))?.graph;
        write_out(out, Box::into_raw(Box::new(GordGraph(g))), "out")
    })
}

/// # Safety
/// `g` must come from a graph constructor and not be freed twice. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn gord_graph_free(g: *mut GordGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live graph handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn gord_graph_vertex_count(g: *const GordGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.n())
}

/// # Safety
/// `g` must be a live graph handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn gord_graph_arc_count(g: *const GordGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.arc_count())
}

/// Number of undirected edges, the length partition outputs use.
///
/// # Safety
/// `g` must be a live graph handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn gord_graph_edge_count(g: *const GordGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.undirected_edges().len())
}

/// # Safety
/// `g` must be a live graph handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gord_similarity(g: *const GordGraph, u: usize, v: usize, out: *mut u64) -> GordStatus {
    guard(|| {
        let g = &non_null(g, "graph")?.0;
        write_out(out, similarity(g, u, v)?, "out")
    })
}

/// Window score of `order` (a permutation of all vertices).
///
/// # Safety
/// `g` must be live; `order` must hold `len` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gord_f_score(
    g: *const GordGraph,
    order: *const usize,
    len: usize,
    w: usize,
    out: *mut u64,
) -> GordStatus {
    guard(|| {
        let g = &non_null(g, "graph")?.0;
        let perm = permutation(g, order, len)?;
        write_out(out, f_score_graph(g, &perm, window(w)?), "out")
    })
}

/// Greedy window ordering written to `out` (capacity `cap`, needs n).
///
/// # Safety
/// `g` must be live; `out` must have room for `cap` values.
#[no_mangle]
pub unsafe extern "C" fn gord_go_order(g: *const GordGraph, w: usize, out: *mut usize, cap: usize) -> GordStatus {
    guard(|| {
        let g = &non_null(g, "graph")?.0;
        let w = window(w)?;
        let out = slice_mut(out, cap, g.n(), "out")?;
        copy_order(&go_order(g, w), out);
        Ok(())
    })
}

/// Vertices by decreasing total degree.
///
/// # Safety
/// `g` must be live; `out` must have room for `cap` values.
#[no_mangle]
pub unsafe extern "C" fn gord_degree_order(g: *const GordGraph, out: *mut usize, cap: usize) -> GordStatus {
    guard(|| {
        let g = &non_null(g, "graph")?.0;
        let out = slice_mut(out, cap, g.n(), "out")?;
        copy_order(&degree_order(g), out);
        Ok(())
    })
}

/// Non-empty `b x b` blocks of the permuted adjacency matrix and their share
/// of all blocks.
///
/// # Safety
/// `g` must be live; `order` must hold `len` values; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn gord_compression_cost(
    g: *const GordGraph,
    order: *const usize,
    len: usize,
    b: usize,
    out_nonzero: *mut usize,
    out_ratio: *mut f64,
) -> GordStatus {
    guard(|| {
        let g = &non_null(g, "graph")?.0;
        let perm = permutation(g, order, len)?;
        let c = apps::compression_cost(g, &perm, b)?;
        write_out(out_nonzero, c.nonzero_blocks, "out_nonzero")?;
        write_out(out_ratio, c.ratio, "out_ratio")
    })
}

/// Partitions the undirected edges into `k` parts and reports the
/// replication factor. `order` is read only by the order sweep and may be
/// null otherwise; `seed` is read only by the random method. When
/// `out_parts` is non-null it receives one part id per edge, edges sorted by
/// `(min, max)` endpoint, and must hold [`gord_graph_edge_count`] entries.
///
/// # Safety
/// `g` must be live; pointer arguments must be valid for their lengths.
#[no_mangle]
pub unsafe extern "C" fn gord_partition(
    g: *const GordGraph,
    method: GordPartitionMethod,
    k: usize,
    order: *const usize,
    len: usize,
    seed: u64,
    out_parts: *mut usize,
    parts_cap: usize,
    out_rf: *mut f64,
) -> GordStatus {
    guard(|| {
        let g = &non_null(g, "graph")?.0;
        let part = match method {
            GordPartitionMethod::OrderSweep => apps::partition_from_order(g, &permutation(g, order, len)?, k)?,
            GordPartitionMethod::Random => apps::random_partition(g, k, seed)?,
            GordPartitionMethod::Greedy => apps::greedy_partition(g, k, GREEDY_SLACK)?,
        };
        if !out_parts.is_null() {
            let out = slice_mut(out_parts, parts_cap, part.edge_count(), "out_parts")?;
            for (slot, (_, p)) in out.iter_mut().zip(part.assignment()) {
                *slot = p;
            }
        }
        write_out(out_rf, apps::replication_factor(g, &part), "out_rf")
    })
}

/// Loads a DON checkpoint.
///
/// # Safety
/// `path` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gord_model_load(path: *const c_char, out: *mut *mut GordModel) -> GordStatus {
    guard(|| {
        let m = load_don(Path::new(c_str(path, "path")?))?;
        write_out(out, Box::into_raw(Box::new(GordModel(m))), "out")
    })
}

/// # Safety
/// `m` must come from [`gord_model_load`] and not be freed twice. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn gord_model_free(m: *mut GordModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live model handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn gord_model_vertex_count(m: *const GordModel) -> usize {
    m.as_ref().map_or(0, |m| m.0.n())
}

/// Ordering decoded with the model, starting from the highest-degree vertex.
///
/// # Safety
/// `m` and `g` must be live; `out` must have room for `cap` values.
#[no_mangle]
pub unsafe extern "C" fn gord_don_order(
    m: *const GordModel,
    g: *const GordGraph,
    w: usize,
    out: *mut usize,
    cap: usize,
) -> GordStatus {
    guard(|| {
        let m = &non_null(m, "model")?.0;
        let g = &non_null(g, "graph")?.0;
        let w = window(w)?;
        let out = slice_mut(out, cap, g.n(), "out")?;
        copy_order(&don_order_graph(g, m, w)?, out);
        Ok(())
    })
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn gord_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
