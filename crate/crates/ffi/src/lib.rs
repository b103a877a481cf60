//! C interface to ontoforge.
//!
//! Every fallible call returns an [`OntoStatus`]; on failure the message is
//! available from [`onto_last_error`] on the same thread. Strings handed out
//! by the library are released with [`onto_string_free`], handles with their
//! matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use ontoforge::cleaning::edit_distance;
use ontoforge::cluster::{ngd_distance, tta_cluster, ClusterParams, DistanceMatrix};
use ontoforge::corpus::{tokenize_documents, CorpusTag, Document, HitCountSnapshot, PhraseIndex};
use ontoforge::frames::{process_document, write_jsonl, ChunkParams, FrameRecord};
use ontoforge::pipeline::{Phase, Pipeline, PipelineConfig};
use ontoforge::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OntoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    Invalid = 5,
    Dependency = 6,
    Data = 7,
    Panic = 8,
}

/// Loaded hit-count snapshot.
pub struct OntoSnapshot {
    inner: HitCountSnapshot,
}

/// Pipeline bound to one configuration and output directory.
pub struct OntoPipeline {
    inner: Pipeline,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> OntoStatus {
    match e {
        Error::Io { .. } => OntoStatus::Io,
        Error::Parse { .. } | Error::Json { .. } | Error::Ingest { .. } => OntoStatus::Parse,
        Error::Validation(_) | Error::Usage(_) => OntoStatus::Invalid,
        Error::Dependency { .. } => OntoStatus::Dependency,
        _ => OntoStatus::Data,
    }
}

struct Failure(OntoStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

/// Runs `f`, turning errors and panics into a status plus last-error text.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> OntoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OntoStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            OntoStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(OntoStatus::NullPointer, format!("`{name}` is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(OntoStatus::InvalidUtf8, format!("`{name}` is not valid UTF-8")))
}

fn null_out(name: &str) -> Failure {
    Failure(OntoStatus::NullPointer, format!("`{name}` is null"))
}

fn into_c(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure(OntoStatus::Data, "output contains a nul byte".into()))
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn onto_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn onto_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn onto_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Levenshtein distance between two UTF-8 strings, in characters.
///
/// # Safety
/// `a` and `b` must be nul-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn onto_edit_distance(a: *const c_char, b: *const c_char, out: *mut usize) -> OntoStatus {
    guard(|| {
        let (a, b) = (str_arg(a, "a")?, str_arg(b, "b")?);
        if out.is_null() {
            return Err(null_out("out"));
        }
        *out = edit_distance(a, b);
        Ok(())
    })
}

/// Loads a hit-count snapshot from a JSON file.
///
/// # Safety
/// `path` must be nul-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn onto_snapshot_load(path: *const c_char, out: *mut *mut OntoSnapshot) -> OntoStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        if out.is_null() {
            return Err(null_out("out"));
        }
        let inner = ontoforge::corpus::load_hit_count_snapshot(path.as_ref())?;
        *out = Box::into_raw(Box::new(OntoSnapshot { inner }));
        Ok(())
    })
}

/// Parses a hit-count snapshot from JSON text.
///
/// # Safety
/// `json` must be nul-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn onto_snapshot_from_json(json: *const c_char, out: *mut *mut OntoSnapshot) -> OntoStatus {
    guard(|| {
        let json = str_arg(json, "json")?;
        if out.is_null() {
            return Err(null_out("out"));
        }
        let inner = HitCountSnapshot::from_json(json, "<ffi>")?;
        *out = Box::into_raw(Box::new(OntoSnapshot { inner }));
        Ok(())
    })
}

/// NGD between two terms under the snapshot's counts.
///
/// # Safety
/// `snapshot` must be a live handle; `x`, `y` nul-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn onto_snapshot_ngd(snapshot: *const OntoSnapshot, x: *const c_char, y: *const c_char, out: *mut f64) -> OntoStatus {
    guard(|| {
        let snap = snapshot.as_ref().ok_or_else(|| null_out("snapshot"))?;
        let (x, y) = (str_arg(x, "x")?, str_arg(y, "y")?);
        if out.is_null() {
            return Err(null_out("out"));
        }
        *out = ngd_distance(x, y, &snap.inner)?;
        Ok(())
    })
}

/// # Safety
/// `snapshot` must come from this library and not have been freed. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn onto_snapshot_free(snapshot: *mut OntoSnapshot) {
    if !snapshot.is_null() {
        drop(Box::from_raw(snapshot));
    }
}

/// Opens a pipeline from a JSON config file. `out_dir` may be null to keep
/// the configured directory.
///
/// # Safety
/// `config_path` (and `out_dir` when not null) must be nul-terminated; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn onto_pipeline_open(config_path: *const c_char, out_dir: *const c_char, out: *mut *mut OntoPipeline) -> OntoStatus {
    guard(|| {
        let path = str_arg(config_path, "config_path")?;
        if out.is_null() {
            return Err(null_out("out"));
        }
        let mut config = PipelineConfig::from_file(path.as_ref())?;
        if !out_dir.is_null() {
            config.out_dir = PathBuf::from(str_arg(out_dir, "out_dir")?);
        }
        let inner = Pipeline::new(config)?;
        *out = Box::into_raw(Box::new(OntoPipeline { inner }));
        Ok(())
    })
}

/// Sets the seed used by later phases.
///
/// # Safety
/// `pipeline` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn onto_pipeline_set_seed(pipeline: *mut OntoPipeline, seed: u64) -> OntoStatus {
    guard(|| {
        let p = pipeline.as_mut().ok_or_else(|| null_out("pipeline"))?;
        p.inner.config.seed = seed;
        Ok(())
    })
}

/// Runs one phase by name (`ingest`, `clean`, `frames`, `terms`, `cluster`,
/// `ontology`, `eval`) or every phase for `run-all`.
///
/// # Safety
/// `pipeline` must be a live handle; `phase` nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn onto_pipeline_run(pipeline: *mut OntoPipeline, phase: *const c_char) -> OntoStatus {
    guard(|| {
        let p = pipeline.as_ref().ok_or_else(|| null_out("pipeline"))?;
        match str_arg(phase, "phase")? {
            "run-all" => {
                p.inner.run_all()?;
            }
            name => {
                p.inner.run_phase(name.parse::<Phase>()?)?;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `pipeline` must come from this library and not have been freed. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn onto_pipeline_free(pipeline: *mut OntoPipeline) {
    if !pipeline.is_null() {
        drop(Box::from_raw(pipeline));
    }
}

/// Extracts frames from one CoNLL-U document and returns them as JSON
/// lines. Chunking statistics come from the document itself.
///
/// # Safety
/// `conllu` must be nul-terminated; `out_jsonl` must be writable. The result
/// is freed with `onto_string_free`.
#[no_mangle]
pub unsafe extern "C" fn onto_extract_frames_conllu(conllu: *const c_char, out_jsonl: *mut *mut c_char) -> OntoStatus {
    guard(|| {
        let text = str_arg(conllu, "conllu")?;
        if out_jsonl.is_null() {
            return Err(null_out("out_jsonl"));
        }
        let doc = Document::conllu("ffi", CorpusTag::Domain, text);
        let phrases = PhraseIndex::new(&tokenize_documents(std::slice::from_ref(&doc))?);
        let frames = process_document(&doc, &phrases, &ChunkParams::default())?.frames;
        let records: Vec<FrameRecord> = frames.iter().map(|f| f.record()).collect();
        *out_jsonl = into_c(write_jsonl(&records))?;
        Ok(())
    })
}

/// Clusters a distance matrix given in the `distances.tsv` format with
/// default parameters and `seed`, returning the tree as JSON.
///
/// # Safety
/// `tsv` must be nul-terminated; `out_json` must be writable. The result is
/// freed with `onto_string_free`.
#[no_mangle]
pub unsafe extern "C" fn onto_cluster_tsv(tsv: *const c_char, seed: u64, out_json: *mut *mut c_char) -> OntoStatus {
    guard(|| {
        let text = str_arg(tsv, "tsv")?;
        if out_json.is_null() {
            return Err(null_out("out_json"));
        }
        let matrix = DistanceMatrix::from_tsv(text, "<ffi>")?;
        let params = ClusterParams { seed, ..ClusterParams::default() };
        let tree = tta_cluster(&matrix, &params)?;
        let json = serde_json::to_string(&tree).map_err(|e| Failure(OntoStatus::Data, e.to_string()))?;
        *out_json = into_c(json)?;
        Ok(())
    })
}
