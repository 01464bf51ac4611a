//! C ABI over the gpfactor analyses.
//!
//! Documents are parsed once into an opaque [`GpfDocument`] handle. Functions
//! return a [`GpfStatus`]; on failure [`gpf_last_error`] describes the cause.
//! Strings handed out by the library must be released with [`gpf_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gpfactor::caps::Caps;
use gpfactor::cli::{self, InputDocument};
use gpfactor::coxeter::CoxeterGroup;
use gpfactor::{Error, SimpleGraph};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GpfStatus {
    Ok = 0,
    NullPointer = 1,
    Validation = 2,
    Cap = 3,
    InvalidUtf8 = 4,
    Panic = 5,
}

/// Parsed and validated input document.
pub struct GpfDocument {
    doc: InputDocument,
    digest: String,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(e: Error) -> GpfStatus {
    set_error(&e.to_string());
    match e {
        Error::Validation(_) => GpfStatus::Validation,
        Error::Cap(_) => GpfStatus::Cap,
    }
}

fn guarded(f: impl FnOnce() -> GpfStatus) -> GpfStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| {
        set_error("internal panic");
        GpfStatus::Panic
    })
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, GpfStatus> {
    if p.is_null() {
        set_error("null pointer argument");
        return Err(GpfStatus::NullPointer);
    }
    unsafe { CStr::from_ptr(p) }.to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        GpfStatus::InvalidUtf8
    })
}

fn hand_out(s: String, out: *mut *mut c_char) -> GpfStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            GpfStatus::Ok
        }
        Err(_) => {
            set_error("report contains a NUL byte");
            GpfStatus::Panic
        }
    }
}

fn report(doc: &GpfDocument, command: &str, body: serde_json::Value) -> String {
    let mut head = serde_json::Map::new();
    head.insert("tool".into(), "gpfactor".into());
    head.insert("version".into(), gpfactor::VERSION.into());
    head.insert("command".into(), command.into());
    head.insert("input_digest".into(), doc.digest.clone().into());
    if let serde_json::Value::Object(b) = body {
        head.extend(b);
    }
    cli::emit(&serde_json::Value::Object(head))
}

fn caps_of(doc: &InputDocument) -> Caps {
    doc.caps.unwrap_or_default()
}

/// Parses a JSON input document. On success `*out` owns a new handle.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn gpf_document_parse(json: *const c_char, out: *mut *mut GpfDocument) -> GpfStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output pointer");
            return GpfStatus::NullPointer;
        }
        let text = match unsafe { read_str(json) } {
            Ok(t) => t,
            Err(s) => return s,
        };
        match cli::parse(text) {
            Ok(doc) => {
                let h = Box::new(GpfDocument {
                    doc,
                    digest: cli::digest(text.as_bytes()),
                });
                unsafe { *out = Box::into_raw(h) };
                GpfStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Releases a handle from [`gpf_document_parse`]. Null is ignored.
///
/// # Safety
/// `doc` must come from [`gpf_document_parse`] and not be used afterwards.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn gpf_document_free(doc: *mut GpfDocument) {
    if !doc.is_null() {
        drop(unsafe { Box::from_raw(doc) });
    }
}

/// Number of vertices in the document, or -1 for a null handle.
///
/// # Safety
/// `doc` must be null or a live handle.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn gpf_document_vertex_count(doc: *const GpfDocument) -> i64 {
    match unsafe { doc.as_ref() } {
        Some(d) => d.doc.vertices.len() as i64,
        None => -1,
    }
}

unsafe fn with_doc(
    doc: *const GpfDocument,
    out: *mut *mut c_char,
    f: impl FnOnce(&GpfDocument) -> Result<String, Error>,
) -> GpfStatus {
    guarded(|| {
        let Some(d) = (unsafe { doc.as_ref() }) else {
            set_error("null document handle");
            return GpfStatus::NullPointer;
        };
        if out.is_null() {
            set_error("null output pointer");
            return GpfStatus::NullPointer;
        }
        match f(d) {
            Ok(s) => hand_out(s, out),
            Err(e) => fail(e),
        }
    })
}

/// Full structural report as canonical JSON in `*out`.
///
/// # Safety
/// `doc` must be a live handle and `out` a valid pointer.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn gpf_analyze(doc: *const GpfDocument, out: *mut *mut c_char) -> GpfStatus {
    unsafe {
        with_doc(doc, out, |d| {
            let body = cli::analyze_document(&d.doc, caps_of(&d.doc))?;
            Ok(report(d, "analyze", body))
        })
    }
}

/// Irreducible and connected components as canonical JSON in `*out`.
///
/// # Safety
/// `doc` must be a live handle and `out` a valid pointer.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn gpf_components(doc: *const GpfDocument, out: *mut *mut c_char) -> GpfStatus {
    unsafe {
        with_doc(doc, out, |d| {
            let g: SimpleGraph = d.doc.graph()?;
            let body = serde_json::json!({
                "irreducible_components": gpfactor::graph::sets_to_ids(&g, &g.irreducible_components()),
                "connected_components": gpfactor::graph::sets_to_ids(&g, &g.connected_components()),
            });
            Ok(report(d, "components", body))
        })
    }
}

/// Growth counts `|{w : |w| = n}|` for `n ≤ max_len` as canonical JSON in `*out`.
///
/// # Safety
/// `doc` must be a live handle and `out` a valid pointer.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn gpf_growth_counts(doc: *const GpfDocument, max_len: u32, out: *mut *mut c_char) -> GpfStatus {
    unsafe {
        with_doc(doc, out, |d| {
            let g = d.doc.graph()?;
            let q = vec![1.0; g.len()];
            let t = CoxeterGroup::new(&g).growth_counts_transfer(max_len as usize, &q, caps_of(&d.doc).cliques)?;
            Ok(report(
                d,
                "growth-counts",
                serde_json::json!({"max_len": max_len, "counts": t.counts}),
            ))
        })
    }
}

/// Whether the graph is rigid: 1 yes, 0 no, -1 null handle or invalid graph.
///
/// # Safety
/// `doc` must be null or a live handle.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn gpf_is_rigid(doc: *const GpfDocument) -> i32 {
    match unsafe { doc.as_ref() }.map(|d| d.doc.graph()) {
        Some(Ok(g)) => i32::from(g.is_rigid()),
        _ => -1,
    }
}

/// Releases a string returned through an `out` parameter. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn gpf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Message for the last failure on this thread, or null. Valid until the next call.
#[unsafe(no_mangle)]
pub extern "C" fn gpf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[unsafe(no_mangle)]
pub extern "C" fn gpf_version() -> *const c_char {
    static V: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    V.as_ptr().cast()
}
