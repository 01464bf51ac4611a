use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use gpfactor_ffi::*;

const Z5: &str = r#"{"vertices":[
 {"id":"1","algebra":{"kind":"hecke","q":0.5}},{"id":"2","algebra":{"kind":"hecke","q":0.5}},
 {"id":"3","algebra":{"kind":"hecke","q":0.5}},{"id":"4","algebra":{"kind":"hecke","q":0.5}},
 {"id":"5","algebra":{"kind":"hecke","q":0.5}}],
 "edges":[["1","2"],["2","3"],["3","4"],["4","5"],["5","1"]]}"#;

fn parse(text: &str) -> (GpfStatus, *mut GpfDocument) {
    let c = CString::new(text).unwrap();
    let mut h = ptr::null_mut();
    let s = unsafe { gpf_document_parse(c.as_ptr(), &mut h) };
    (s, h)
}

fn take(s: *mut c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { gpf_string_free(s) };
    out
}

#[test]
fn analyze_round_trip() {
    let (s, h) = parse(Z5);
    assert_eq!(s, GpfStatus::Ok);
    assert_eq!(unsafe { gpf_document_vertex_count(h) }, 5);
    assert_eq!(unsafe { gpf_is_rigid(h) }, 1);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { gpf_analyze(h, &mut out) }, GpfStatus::Ok);
    let json: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(json["command"], "analyze");
    assert_eq!(json["graph"]["rigid"], true);
    assert_eq!(
        json,
        serde_json::from_str::<serde_json::Value>(&gpfactor::cli::emit(&gpfactor::cli::analyze_text(Z5).unwrap()))
            .unwrap()
    );

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { gpf_growth_counts(h, 3, &mut out) }, GpfStatus::Ok);
    let json: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(json["counts"], serde_json::json!([1, 5, 15, 40]));

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { gpf_components(h, &mut out) }, GpfStatus::Ok);
    assert!(take(out).contains("irreducible_components"));
    unsafe { gpf_document_free(h) };
}

#[test]
fn errors_are_reported() {
    let (s, h) = parse(r#"{"vertices":[{"id":"a","algebra":{"kind":"matrix","n":2}}],"edges":[["a","a"]]}"#);
    assert_eq!(s, GpfStatus::Validation);
    assert!(h.is_null());
    let msg = unsafe { CStr::from_ptr(gpf_last_error()) }.to_str().unwrap();
    assert!(msg.contains("self-edge"));

    let mut h = ptr::null_mut();
    assert_eq!(
        unsafe { gpf_document_parse(ptr::null(), &mut h) },
        GpfStatus::NullPointer
    );
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { gpf_analyze(ptr::null(), &mut out) }, GpfStatus::NullPointer);
    assert_eq!(unsafe { gpf_is_rigid(ptr::null()) }, -1);
    assert_eq!(unsafe { gpf_document_vertex_count(ptr::null()) }, -1);
    unsafe { gpf_document_free(ptr::null_mut()) };
    unsafe { gpf_string_free(ptr::null_mut()) };

    let bad = [0xffu8, 0];
    assert_eq!(
        unsafe { gpf_document_parse(bad.as_ptr().cast(), &mut h) },
        GpfStatus::InvalidUtf8
    );
}

#[test]
fn cap_errors_map_to_cap_status() {
    let (s, h) = parse(&Z5.replacen("\"edges\"", "\"options\":{\"caps\":{\"cliques\":3}},\"edges\"", 1));
    assert_eq!(s, GpfStatus::Ok);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { gpf_growth_counts(h, 3, &mut out) }, GpfStatus::Cap);
    unsafe { gpf_document_free(h) };
}

#[test]
fn version_matches_core() {
    let v = unsafe { CStr::from_ptr(gpf_version()) }.to_str().unwrap();
    assert_eq!(v, gpfactor::VERSION);
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/gpfactor.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in [
        "gpf_document_parse",
        "gpf_analyze",
        "gpf_string_free",
        "gpf_last_error",
        "GPF_STATUS_CAP",
    ] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let dir = std::env::temp_dir().join(format!("gpf-header-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("use.c");
    std::fs::write(
        &src,
        format!(
            "#include \"{}\"\nint main(void) {{ GpfDocument *d = 0; char *s = 0; \
             return gpf_analyze(d, &s) == GPF_STATUS_OK ? 0 : 1; }}\n",
            header.display()
        ),
    )
    .unwrap();
    match Command::new("cc")
        .arg("-fsyntax-only")
        .arg("-Wall")
        .arg("-Werror")
        .arg(&src)
        .status()
    {
        Ok(st) => assert!(st.success(), "header does not compile as C"),
        Err(_) => eprintln!("no C compiler found; header syntax check skipped"),
    }
}
