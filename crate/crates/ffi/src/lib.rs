//! C ABI over `spectral_nsr`.
//!
//! Objects are opaque handles created by `snsr_*_new`/`_load` functions and
//! released with the matching `_free`. Every fallible call returns an
//! [`SnsrStatus`]; on failure the message is available through
//! [`snsr_last_error`] on the same thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::slice;

use spectral_nsr::graph::{anonymous_nodes, build_graph, ReasoningGraph};
use spectral_nsr::laplacian::{laplacian, LaplacianKind};
use spectral_nsr::pipeline::{Pipeline, PipelineConfig};
use spectral_nsr::rules::parse_rules;
use spectral_nsr::spectral::{chebyshev_filter, lambda_max_for, ChebyshevFilter, GraphSignal};
use spectral_nsr::symbolic::KnowledgeBase;
use spectral_nsr::trainer::Checkpoint;
use spectral_nsr::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnsrStatus {
    Ok = 0,
    NullPointer = 1,
    /// Input rejected by validation.
    InvalidInput = 2,
    /// Numerical failure (non-convergence, non-finite values).
    Numerical = 3,
    Io = 4,
    /// Output buffer too small; the required size was written back.
    BufferTooSmall = 5,
    Panic = 6,
}

/// Which Laplacian to filter with.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnsrLaplacian {
    Combinatorial = 0,
    Normalized = 1,
}

impl From<SnsrLaplacian> for LaplacianKind {
    fn from(k: SnsrLaplacian) -> Self {
        match k {
            SnsrLaplacian::Combinatorial => LaplacianKind::Combinatorial,
            SnsrLaplacian::Normalized => LaplacianKind::Normalized,
        }
    }
}

pub struct SnsrGraph(ReasoningGraph);
pub struct SnsrFilter(ChebyshevFilter);
pub struct SnsrPipeline(Pipeline);
pub struct SnsrKb(KnowledgeBase);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(e: Error) -> SnsrStatus {
    let status = match &e {
        Error::Io(_) => SnsrStatus::Io,
        e if e.is_numerical() => SnsrStatus::Numerical,
        _ => SnsrStatus::InvalidInput,
    };
    set_error(e.to_string());
    status
}

fn null(what: &str) -> SnsrStatus {
    set_error(format!("{what} is null"));
    SnsrStatus::NullPointer
}

fn guard(f: impl FnOnce() -> SnsrStatus) -> SnsrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic".into());
            SnsrStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, SnsrStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        SnsrStatus::InvalidInput
    })
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], SnsrStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

macro_rules! lib {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return fail(e),
        }
    };
}

fn put<T>(out: *mut *mut T, value: T) -> SnsrStatus {
    if out.is_null() {
        return null("output handle");
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    SnsrStatus::Ok
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len`). Returns the full message length, 0 if
/// there is none.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn snsr_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else {
            return 0;
        };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn snsr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Graph on `n` anonymous nodes from parallel edge arrays.
///
/// # Safety
/// `src`, `dst` and `weight` must each point to `m` readable elements.
#[no_mangle]
pub unsafe extern "C" fn snsr_graph_new(
    n: usize,
    src: *const usize,
    dst: *const usize,
    weight: *const f64,
    m: usize,
    out: *mut *mut SnsrGraph,
) -> SnsrStatus {
    guard(|| {
        let src = tri!(slice_arg(src, m, "src"));
        let dst = tri!(slice_arg(dst, m, "dst"));
        let weight = tri!(slice_arg(weight, m, "weight"));
        let edges: Vec<_> = (0..m).map(|k| (src[k], dst[k], weight[k])).collect();
        let g = lib!(build_graph(anonymous_nodes(n), &edges));
        put(out, SnsrGraph(g))
    })
}

/// Graph from a text or `.json` graph file.
///
/// # Safety
/// `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn snsr_graph_load(path: *const c_char, out: *mut *mut SnsrGraph) -> SnsrStatus {
    guard(|| {
        let path = tri!(str_arg(path, "path"));
        let g = lib!(spectral_nsr::io::read_graph(Path::new(path)));
        put(out, SnsrGraph(g))
    })
}

/// Node count, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn snsr_graph_node_count(g: *const SnsrGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.node_count())
}

/// # Safety
/// `g` must be null or a graph handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn snsr_graph_free(g: *mut SnsrGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Spectral bound used to rescale the Laplacian.
///
/// # Safety
/// `g` must be a live graph handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn snsr_lambda_max(g: *const SnsrGraph, kind: SnsrLaplacian, out: *mut f64) -> SnsrStatus {
    guard(|| {
        let Some(g) = g.as_ref() else { return null("graph") };
        if out.is_null() {
            return null("out");
        }
        *out = lambda_max_for(&laplacian(&g.0, kind.into()));
        SnsrStatus::Ok
    })
}

/// Chebyshev filter with coefficients `theta[0..len]`.
///
/// # Safety
/// `theta` must point to `len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn snsr_filter_new(
    theta: *const f64,
    len: usize,
    lambda_max: f64,
    out: *mut *mut SnsrFilter,
) -> SnsrStatus {
    guard(|| {
        let theta = tri!(slice_arg(theta, len, "theta"));
        let f = lib!(ChebyshevFilter::new(theta.to_vec(), lambda_max));
        put(out, SnsrFilter(f))
    })
}

/// Frequency response `h(lambda)`.
///
/// # Safety
/// `f` must be a live filter handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn snsr_filter_response(f: *const SnsrFilter, lambda: f64, out: *mut f64) -> SnsrStatus {
    guard(|| {
        let Some(f) = f.as_ref() else { return null("filter") };
        if out.is_null() {
            return null("out");
        }
        *out = f.0.response(lambda);
        SnsrStatus::Ok
    })
}

/// `y = h(L) x` via the Chebyshev recurrence; `x` and `y` hold `n` values
/// where `n` is the graph's node count.
///
/// # Safety
/// Handles must be live; `x` readable and `y` writable for `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn snsr_filter_apply(
    g: *const SnsrGraph,
    kind: SnsrLaplacian,
    f: *const SnsrFilter,
    x: *const f64,
    y: *mut f64,
    n: usize,
) -> SnsrStatus {
    guard(|| {
        let Some(g) = g.as_ref() else { return null("graph") };
        let Some(f) = f.as_ref() else { return null("filter") };
        if y.is_null() {
            return null("y");
        }
        let x = tri!(slice_arg(x, n, "x"));
        let signal = lib!(GraphSignal::vertex(x.to_vec()));
        let l = laplacian(&g.0, kind.into());
        let out = lib!(chebyshev_filter(&l, &f.0, &signal));
        ptr::copy_nonoverlapping(out.values().as_ptr(), y, out.len());
        SnsrStatus::Ok
    })
}

/// # Safety
/// `f` must be null or a filter handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn snsr_filter_free(f: *mut SnsrFilter) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Knowledge base from its text form.
///
/// # Safety
/// `text` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn snsr_kb_parse(text: *const c_char, out: *mut *mut SnsrKb) -> SnsrStatus {
    guard(|| {
        let text = tri!(str_arg(text, "text"));
        let kb = lib!(KnowledgeBase::parse(text));
        put(out, SnsrKb(kb))
    })
}

/// # Safety
/// `kb` must be null or a KB handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn snsr_kb_free(kb: *mut SnsrKb) {
    if !kb.is_null() {
        drop(Box::from_raw(kb));
    }
}

/// Freshly initialised pipeline from config text and rule text (either may
/// be null for defaults / no rules).
///
/// # Safety
/// Non-null strings must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn snsr_pipeline_new(
    config: *const c_char,
    rules: *const c_char,
    out: *mut *mut SnsrPipeline,
) -> SnsrStatus {
    guard(|| {
        let cfg = if config.is_null() {
            PipelineConfig::default()
        } else {
            lib!(PipelineConfig::parse(tri!(str_arg(config, "config"))))
        };
        let rules = if rules.is_null() {
            Vec::new()
        } else {
            lib!(parse_rules(tri!(str_arg(rules, "rules")), None))
        };
        let p = lib!(Pipeline::new(cfg, rules));
        put(out, SnsrPipeline(p))
    })
}

/// Pipeline restored from a training checkpoint.
///
/// # Safety
/// `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn snsr_pipeline_load(path: *const c_char, out: *mut *mut SnsrPipeline) -> SnsrStatus {
    guard(|| {
        let path = tri!(str_arg(path, "path"));
        let ckpt = lib!(Checkpoint::load(Path::new(path)));
        let p = lib!(ckpt.pipeline());
        put(out, SnsrPipeline(p))
    })
}

/// Stages 1 and 2 plus thresholding: writes the filtered signal to `y`
/// and 0/1 predicate truth to `truth` (either may be null).
///
/// # Safety
/// Handles must be live; `x` readable and `y`/`truth` writable for `n`
/// elements.
#[no_mangle]
pub unsafe extern "C" fn snsr_pipeline_predict(
    p: *const SnsrPipeline,
    g: *const SnsrGraph,
    x: *const f64,
    n: usize,
    y: *mut f64,
    truth: *mut u8,
) -> SnsrStatus {
    guard(|| {
        let Some(p) = p.as_ref() else { return null("pipeline") };
        let Some(g) = g.as_ref() else { return null("graph") };
        let x = tri!(slice_arg(x, n, "x"));
        let signal = lib!(GraphSignal::vertex(x.to_vec()));
        let (filtered, predicates) = lib!(p.0.predict(&g.0, &signal));
        if !y.is_null() {
            ptr::copy_nonoverlapping(filtered.values().as_ptr(), y, filtered.len());
        }
        if !truth.is_null() {
            for (i, t) in predicates.truth().into_iter().enumerate() {
                *truth.add(i) = u8::from(t);
            }
        }
        SnsrStatus::Ok
    })
}

/// Full run; writes the answer atom ids (the closure) to `answers`.
/// `*count` receives the number of answers; if it exceeds `capacity`
/// nothing is written and `BufferTooSmall` is returned.
///
/// # Safety
/// Handles must be live; `x` readable for `n` doubles; `answers` writable
/// for `capacity` elements; `count` writable.
#[no_mangle]
pub unsafe extern "C" fn snsr_pipeline_run(
    p: *const SnsrPipeline,
    g: *const SnsrGraph,
    x: *const f64,
    n: usize,
    kb: *const SnsrKb,
    answers: *mut usize,
    capacity: usize,
    count: *mut usize,
) -> SnsrStatus {
    guard(|| {
        let Some(p) = p.as_ref() else { return null("pipeline") };
        let Some(g) = g.as_ref() else { return null("graph") };
        let Some(kb) = kb.as_ref() else { return null("kb") };
        if count.is_null() {
            return null("count");
        }
        let x = tri!(slice_arg(x, n, "x"));
        let signal = lib!(GraphSignal::vertex(x.to_vec()));
        let out = lib!(p.0.run(&g.0, &signal, &kb.0));
        let atoms = out.answers();
        *count = atoms.len();
        if atoms.len() > capacity {
            set_error(format!("{} answers do not fit in {capacity}", atoms.len()));
            return SnsrStatus::BufferTooSmall;
        }
        if !atoms.is_empty() && answers.is_null() {
            return null("answers");
        }
        for (i, &a) in atoms.iter().enumerate() {
            *answers.add(i) = a;
        }
        SnsrStatus::Ok
    })
}

/// # Safety
/// `p` must be null or a pipeline handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn snsr_pipeline_free(p: *mut SnsrPipeline) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}
