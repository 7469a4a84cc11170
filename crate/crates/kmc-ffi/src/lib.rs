//! C ABI for the model checker.
//!
//! The surface mirrors the CLI's pipeline: load a model from text,
//! build its state graph under a limit, then query verdicts either
//! one formula at a time or as the full JSON report.
//!
//! Conventions:
//!
//! * Handles (`KmcModel`, `KmcGraph`) are opaque; free them with the
//!   matching `_free` function exactly once.
//! * Functions returning a status use [`KmcStatus`]; `KMC_OK` is zero.
//! * On failure, functions taking an `err_out` parameter store a
//!   heap-allocated UTF-8 message there (or null); release it with
//!   [`kmc_string_free`].
//! * All strings are NUL-terminated UTF-8.
//!
//! The matching C declarations live in `include/kmc.h`.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kmc::{build_state_graph, check_all, Model, RunReport, StateGraph};

/// Opaque handle to a compiled model.
pub struct KmcModel(Model);

/// Opaque handle to a built state graph.
pub struct KmcGraph(StateGraph);

/// Status codes returned by fallible entry points.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KmcStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null or text was not UTF-8.
    BadArgument = 1,
    /// The model text failed to parse or validate.
    BadModel = 2,
    /// State-graph construction hit the state limit.
    LimitExceeded = 3,
    /// No formula with the requested name exists.
    UnknownFormula = 4,
    /// An internal invariant failed (a bug; never expected).
    Internal = 5,
}

fn string_out(s: String) -> *mut c_char {
    // Model text is UTF-8 without interior NULs; errors never embed them
    // either, but fall back to a fixed message rather than panicking.
    match CString::new(s) {
        Ok(c) => c.into_raw(),
        Err(_) => CString::new("message contained an interior NUL byte")
            .expect("static message is NUL-free")
            .into_raw(),
    }
}

fn set_err(err_out: *mut *mut c_char, message: String) {
    if !err_out.is_null() {
        unsafe { *err_out = string_out(message) };
    }
}

fn clear_err(err_out: *mut *mut c_char) {
    if !err_out.is_null() {
        unsafe { *err_out = ptr::null_mut() };
    }
}

unsafe fn text_in<'a>(text: *const c_char) -> Result<&'a str, ()> {
    if text.is_null() {
        return Err(());
    }
    CStr::from_ptr(text).to_str().map_err(|_| ())
}

/// Parses and validates a model from NUL-terminated text.
///
/// Returns a handle, or null with `*err_out` set to the parse or
/// validation message.
///
/// # Safety
///
/// `text` must point to a NUL-terminated string; `err_out`, if
/// non-null, must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn kmc_model_load(
    text: *const c_char,
    err_out: *mut *mut c_char,
) -> *mut KmcModel {
    clear_err(err_out);
    let Ok(src) = text_in(text) else {
        set_err(err_out, "model text must be non-null UTF-8".to_string());
        return ptr::null_mut();
    };
    let loaded = catch_unwind(|| kmc::load_model(src));
    match loaded {
        Ok(Ok(model)) => Box::into_raw(Box::new(KmcModel(model))),
        Ok(Err(e)) => {
            set_err(err_out, e.to_string());
            ptr::null_mut()
        }
        Err(_) => {
            set_err(err_out, "internal error while loading model".to_string());
            ptr::null_mut()
        }
    }
}

/// Releases a model handle. Passing null is a no-op.
///
/// # Safety
///
/// `model` must be a handle from [`kmc_model_load`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kmc_model_free(model: *mut KmcModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of formulas declared in the model.
///
/// # Safety
///
/// `model` must be a live handle from [`kmc_model_load`].
#[no_mangle]
pub unsafe extern "C" fn kmc_model_formula_count(model: *const KmcModel) -> u64 {
    if model.is_null() {
        return 0;
    }
    (*model).0.formulas().len() as u64
}

/// Builds the reachable state graph, exploring at most `limit` states.
///
/// Returns a handle, or null with `*err_out` set (limit exceeded or an
/// assignment left a variable's domain).
///
/// # Safety
///
/// `model` must be a live handle from [`kmc_model_load`]; `err_out`,
/// if non-null, must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn kmc_graph_build(
    model: *const KmcModel,
    limit: u64,
    err_out: *mut *mut c_char,
) -> *mut KmcGraph {
    clear_err(err_out);
    if model.is_null() {
        set_err(err_out, "model handle must be non-null".to_string());
        return ptr::null_mut();
    }
    let model = &(*model).0;
    let built = catch_unwind(AssertUnwindSafe(|| build_state_graph(model, limit as usize)));
    match built {
        Ok(Ok(graph)) => Box::into_raw(Box::new(KmcGraph(graph))),
        Ok(Err(e)) => {
            set_err(err_out, e.to_string());
            ptr::null_mut()
        }
        Err(_) => {
            set_err(err_out, "internal error while building state graph".to_string());
            ptr::null_mut()
        }
    }
}

/// Releases a graph handle. Passing null is a no-op.
///
/// # Safety
///
/// `graph` must be a handle from [`kmc_graph_build`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kmc_graph_free(graph: *mut KmcGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Number of reachable states in a built graph.
///
/// # Safety
///
/// `graph` must be a live handle from [`kmc_graph_build`].
#[no_mangle]
pub unsafe extern "C" fn kmc_graph_states(graph: *const KmcGraph) -> u64 {
    if graph.is_null() {
        return 0;
    }
    (*graph).0.num_states() as u64
}

/// Number of transitions in a built graph.
///
/// # Safety
///
/// `graph` must be a live handle from [`kmc_graph_build`].
#[no_mangle]
pub unsafe extern "C" fn kmc_graph_edges(graph: *const KmcGraph) -> u64 {
    if graph.is_null() {
        return 0;
    }
    (*graph).0.num_edges() as u64
}

/// Checks one named formula from the model against a built graph.
///
/// On `KMC_OK`, `*holds_out` is 1 when the formula holds in every
/// initial state (0 otherwise) and `*sat_count_out` is the number of
/// reachable states satisfying it. Output pointers may be null when
/// the caller does not need that value.
///
/// # Safety
///
/// `model` and `graph` must be live handles built from one another;
/// `name` must be NUL-terminated; non-null output pointers must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn kmc_check_formula(
    model: *const KmcModel,
    graph: *const KmcGraph,
    name: *const c_char,
    holds_out: *mut i32,
    sat_count_out: *mut u64,
) -> KmcStatus {
    if model.is_null() || graph.is_null() {
        return KmcStatus::BadArgument;
    }
    let Ok(name) = text_in(name) else {
        return KmcStatus::BadArgument;
    };
    let model = &(*model).0;
    let graph = &(*graph).0;
    let Some(def) = model.formula(name) else {
        return KmcStatus::UnknownFormula;
    };
    let checked =
        catch_unwind(AssertUnwindSafe(|| kmc::check(model, graph, name, &def.body)));
    match checked {
        Ok(Ok(outcome)) => {
            if !holds_out.is_null() {
                *holds_out = outcome.holds as i32;
            }
            if !sat_count_out.is_null() {
                *sat_count_out = outcome.sat_count as u64;
            }
            KmcStatus::Ok
        }
        Ok(Err(_)) => KmcStatus::BadModel,
        Err(_) => KmcStatus::Internal,
    }
}

/// Checks every formula in the model and returns the JSON report
/// (states, edges, build time, per-formula verdicts and traces).
///
/// Returns a heap-allocated string to release with
/// [`kmc_string_free`], or null on failure.
///
/// # Safety
///
/// `model` and `graph` must be live handles built from one another.
#[no_mangle]
pub unsafe extern "C" fn kmc_report_json(
    model: *const KmcModel,
    graph: *const KmcGraph,
) -> *mut c_char {
    if model.is_null() || graph.is_null() {
        return ptr::null_mut();
    }
    let model = &(*model).0;
    let graph = &(*graph).0;
    let rendered = catch_unwind(AssertUnwindSafe(|| {
        let outcomes = check_all(model, graph);
        let report = RunReport::new("", model, graph, 0, &outcomes);
        serde_json::to_string(&report)
    }));
    match rendered {
        Ok(Ok(json)) => string_out(json),
        _ => ptr::null_mut(),
    }
}

/// Reformats model text into canonical form.
///
/// Returns a heap-allocated string to release with
/// [`kmc_string_free`], or null with `*err_out` set on parse failure.
///
/// # Safety
///
/// `text` must be NUL-terminated; `err_out`, if non-null, must point
/// to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn kmc_format(
    text: *const c_char,
    err_out: *mut *mut c_char,
) -> *mut c_char {
    clear_err(err_out);
    let Ok(src) = text_in(text) else {
        set_err(err_out, "model text must be non-null UTF-8".to_string());
        return ptr::null_mut();
    };
    match kmc::parse_model(src) {
        Ok(def) => string_out(kmc::format_model(&def)),
        Err(e) => {
            set_err(err_out, e.to_string());
            ptr::null_mut()
        }
    }
}

/// Returns the bundled surveillance scenario as model text.
///
/// Release the string with [`kmc_string_free`].
#[no_mangle]
pub extern "C" fn kmc_scenario_text() -> *mut c_char {
    let def = kmc::scenario::build_usv_model(&kmc::scenario::ScenarioConfig::default());
    string_out(kmc::format_model(&def))
}

/// Releases a string returned by this library. Passing null is a no-op.
///
/// # Safety
///
/// `s` must be a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kmc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    const TOY: &str = "agent Light {\n  var on : {off, lit} init off;\n  rule Light.on = off -> on := lit;\n}\n\nformula Flip := AG(Light.on = off -> AX(Light.on = lit));\n";

    #[test]
    fn load_build_check_free_round_trip() {
        let text = CString::new(TOY).unwrap();
        let mut err = ptr::null_mut();
        unsafe {
            let model = kmc_model_load(text.as_ptr(), &mut err);
            assert!(!model.is_null());
            assert!(err.is_null());
            assert_eq!(kmc_model_formula_count(model), 1);

            let graph = kmc_graph_build(model, 1000, &mut err);
            assert!(!graph.is_null());
            assert_eq!(kmc_graph_states(graph), 2);
            assert_eq!(kmc_graph_edges(graph), 2);

            let name = CString::new("Flip").unwrap();
            let mut holds = -1;
            let mut sat = 0;
            let status =
                kmc_check_formula(model, graph, name.as_ptr(), &mut holds, &mut sat);
            assert_eq!(status, KmcStatus::Ok);
            assert_eq!(holds, 1);
            assert_eq!(sat, 2);

            let json = kmc_report_json(model, graph);
            assert!(!json.is_null());
            let parsed: serde_json::Value =
                serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
            assert_eq!(parsed["states"], 2);
            kmc_string_free(json);

            kmc_graph_free(graph);
            kmc_model_free(model);
        }
    }

    #[test]
    fn errors_come_back_as_messages_not_crashes() {
        let text = CString::new("agent {").unwrap();
        let mut err = ptr::null_mut();
        unsafe {
            let model = kmc_model_load(text.as_ptr(), &mut err);
            assert!(model.is_null());
            assert!(!err.is_null());
            let message = CStr::from_ptr(err).to_str().unwrap().to_string();
            assert!(message.contains("line 1"), "got: {message}");
            kmc_string_free(err);
        }
    }

    #[test]
    fn unknown_formula_is_a_status_not_a_panic() {
        let text = CString::new(TOY).unwrap();
        unsafe {
            let model = kmc_model_load(text.as_ptr(), ptr::null_mut());
            let graph = kmc_graph_build(model, 1000, ptr::null_mut());
            let name = CString::new("Nope").unwrap();
            let status =
                kmc_check_formula(model, graph, name.as_ptr(), ptr::null_mut(), ptr::null_mut());
            assert_eq!(status, KmcStatus::UnknownFormula);
            kmc_graph_free(graph);
            kmc_model_free(model);
        }
    }

    #[test]
    fn header_declares_every_exported_symbol() {
        let header = include_str!("../include/kmc.h");
        for symbol in [
            "kmc_model_load",
            "kmc_model_free",
            "kmc_model_formula_count",
            "kmc_graph_build",
            "kmc_graph_free",
            "kmc_graph_states",
            "kmc_graph_edges",
            "kmc_check_formula",
            "kmc_report_json",
            "kmc_format",
            "kmc_scenario_text",
            "kmc_string_free",
        ] {
            assert!(header.contains(symbol), "header missing {symbol}");
        }
    }

    #[test]
    fn scenario_text_is_exported() {
        unsafe {
            let text = kmc_scenario_text();
            assert!(!text.is_null());
            let s = CStr::from_ptr(text).to_str().unwrap();
            assert!(s.contains("agent USV"));
            kmc_string_free(text);
        }
    }
}
