//! C ABI surface over the ring gathering simulator and verifier.
//!
//! Simulations are opaque handles created from scenario JSON; results
//! come back as JSON strings allocated by this library and released with
//! [`rg_string_free`]. All functions return an [`RgStatus`] code; out
//! parameters are written only on `RG_STATUS_OK`.

use ring_gather::cli::{cmd_simulate, render_trace, Scenario, TraceHeader};
use ring_gather::engine::RunResult;
use ring_gather::ring::RingConfig;
use ring_gather::verify::{classify_theory, explore_all, Problem, DEFAULT_STATE_BUDGET};
use std::ffi::{c_char, CStr, CString};
use std::ptr;

/// Status codes returned by every API entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    RunFailed = 4,
    BudgetExceeded = 5,
}

/// An opaque simulation: a parsed scenario and, once run, its result.
pub struct RgSimulation {
    scenario: Scenario,
    rendered: Option<String>,
    result: Option<RunResult>,
}

fn c_str<'a>(ptr: *const c_char) -> Result<&'a str, RgStatus> {
    if ptr.is_null() {
        return Err(RgStatus::NullPointer);
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|_| RgStatus::InvalidUtf8)
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

fn write_out(out: *mut *mut c_char, value: String) -> RgStatus {
    if out.is_null() {
        return RgStatus::NullPointer;
    }
    let raw = to_c_string(value);
    if raw.is_null() {
        return RgStatus::InvalidInput;
    }
    unsafe { *out = raw };
    RgStatus::Ok
}

fn config_from_raw(
    n: u32,
    counts: *const u32,
    len: usize,
    distinct: bool,
) -> Result<(RingConfig, Problem), RgStatus> {
    if counts.is_null() {
        return Err(RgStatus::NullPointer);
    }
    if n as usize != len {
        return Err(RgStatus::InvalidInput);
    }
    let counts = unsafe { std::slice::from_raw_parts(counts, len) };
    let config = RingConfig::new(counts.to_vec()).map_err(|_| RgStatus::InvalidInput)?;
    let problem = if distinct { Problem::Distinct } else { Problem::Gathering };
    if distinct && !config.is_distinct() {
        return Err(RgStatus::InvalidInput);
    }
    Ok((config, problem))
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn rg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Release a string allocated by this library.
#[no_mangle]
pub extern "C" fn rg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Parse a scenario JSON document into a simulation handle.
#[no_mangle]
pub extern "C" fn rg_simulation_new(
    scenario_json: *const c_char,
    out: *mut *mut RgSimulation,
) -> RgStatus {
    if out.is_null() {
        return RgStatus::NullPointer;
    }
    let raw = match c_str(scenario_json) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let scenario: Scenario = match serde_json::from_str(raw) {
        Ok(s) => s,
        Err(_) => return RgStatus::InvalidInput,
    };
    if scenario.config().is_err() {
        return RgStatus::InvalidInput;
    }
    let sim = Box::new(RgSimulation { scenario, rendered: None, result: None });
    unsafe { *out = Box::into_raw(sim) };
    RgStatus::Ok
}

/// Run the simulation to its outcome. Idempotent.
#[no_mangle]
pub extern "C" fn rg_simulation_run(sim: *mut RgSimulation) -> RgStatus {
    let Some(sim) = (unsafe { sim.as_mut() }) else {
        return RgStatus::NullPointer;
    };
    if sim.result.is_some() {
        return RgStatus::Ok;
    }
    match cmd_simulate(&sim.scenario) {
        Ok((rendered, result, _)) => {
            sim.rendered = Some(rendered);
            sim.result = Some(result);
            RgStatus::Ok
        }
        Err(_) => RgStatus::RunFailed,
    }
}

/// The outcome of a finished run, as JSON.
#[no_mangle]
pub extern "C" fn rg_simulation_outcome_json(
    sim: *const RgSimulation,
    out: *mut *mut c_char,
) -> RgStatus {
    let Some(sim) = (unsafe { sim.as_ref() }) else {
        return RgStatus::NullPointer;
    };
    let Some(result) = &sim.result else {
        return RgStatus::RunFailed;
    };
    match serde_json::to_string(&result.outcome) {
        Ok(json) => write_out(out, json),
        Err(_) => RgStatus::RunFailed,
    }
}

/// The full trace of a finished run as JSON lines (header, events,
/// outcome), byte-identical to the CLI output.
#[no_mangle]
pub extern "C" fn rg_simulation_trace_jsonl(
    sim: *const RgSimulation,
    out: *mut *mut c_char,
) -> RgStatus {
    let Some(sim) = (unsafe { sim.as_ref() }) else {
        return RgStatus::NullPointer;
    };
    match &sim.rendered {
        Some(rendered) => write_out(out, rendered.clone()),
        None => RgStatus::RunFailed,
    }
}

/// Destroy a simulation handle.
#[no_mangle]
pub extern "C" fn rg_simulation_free(sim: *mut RgSimulation) {
    if !sim.is_null() {
        drop(unsafe { Box::from_raw(sim) });
    }
}

/// Classify a configuration against the known unsolvable families.
/// Writes the verdict as JSON.
#[no_mangle]
pub extern "C" fn rg_classify(
    n: u32,
    counts: *const u32,
    len: usize,
    distinct: bool,
    out: *mut *mut c_char,
) -> RgStatus {
    let (config, problem) = match config_from_raw(n, counts, len, distinct) {
        Ok(pair) => pair,
        Err(status) => return status,
    };
    match classify_theory(&config, problem) {
        Ok(verdict) => match serde_json::to_string(&verdict) {
            Ok(json) => write_out(out, json),
            Err(_) => RgStatus::RunFailed,
        },
        Err(_) => RgStatus::InvalidInput,
    }
}

/// Exhaustively explore a configuration over every assignment and
/// adversarial branch. `state_budget` of 0 selects the default cap.
/// Writes the exploration result as JSON.
#[no_mangle]
pub extern "C" fn rg_explore(
    n: u32,
    counts: *const u32,
    len: usize,
    distinct: bool,
    state_budget: u64,
    out: *mut *mut c_char,
) -> RgStatus {
    let (config, problem) = match config_from_raw(n, counts, len, distinct) {
        Ok(pair) => pair,
        Err(status) => return status,
    };
    let budget = if state_budget == 0 { DEFAULT_STATE_BUDGET } else { state_budget as usize };
    match explore_all(&config, problem, budget) {
        Ok((result, _)) => match serde_json::to_string(&result) {
            Ok(json) => write_out(out, json),
            Err(_) => RgStatus::RunFailed,
        },
        Err(ring_gather::verify::VerifyError::BudgetExceeded { .. }) => RgStatus::BudgetExceeded,
        Err(_) => RgStatus::InvalidInput,
    }
}

// keep the render_trace/TraceHeader surface linked so the header exposes
// a complete trace story for binders that replay scenarios themselves
#[doc(hidden)]
pub fn _render_for_binding(header: &TraceHeader, result: &RunResult) -> String {
    render_trace(header, result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    fn run_scenario(json: &str) -> (RgStatus, Option<String>) {
        let c = CString::new(json).unwrap();
        let mut sim: *mut RgSimulation = ptr::null_mut();
        let status = rg_simulation_new(c.as_ptr(), &mut sim);
        if status != RgStatus::Ok {
            return (status, None);
        }
        assert_eq!(rg_simulation_run(sim), RgStatus::Ok);
        let mut out: *mut c_char = ptr::null_mut();
        assert_eq!(rg_simulation_outcome_json(sim, &mut out), RgStatus::Ok);
        let outcome = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_string();
        rg_string_free(out);
        rg_simulation_free(sim);
        (RgStatus::Ok, Some(outcome))
    }

    #[test]
    fn simulation_round_trip() {
        let (status, outcome) =
            run_scenario(r#"{"n":6,"counts":[0,1,1,0,1,2]}"#);
        assert_eq!(status, RgStatus::Ok);
        let outcome = outcome.unwrap();
        assert!(outcome.contains("\"kind\""), "{outcome}");
    }

    #[test]
    fn rejects_bad_input() {
        let (status, _) = run_scenario(r#"{"n":3,"counts":[0,0,0]}"#);
        assert_eq!(status, RgStatus::InvalidInput);
        let mut sim: *mut RgSimulation = ptr::null_mut();
        assert_eq!(rg_simulation_new(ptr::null(), &mut sim), RgStatus::NullPointer);
    }

    #[test]
    fn classify_exports_json() {
        let counts = [1u32, 0, 2, 2, 0];
        let mut out: *mut c_char = ptr::null_mut();
        let status = rg_classify(5, counts.as_ptr(), counts.len(), false, &mut out);
        assert_eq!(status, RgStatus::Ok);
        let json = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_string();
        rg_string_free(out);
        assert!(json.contains("FiveRingThreeVerticesAdjMult"), "{json}");
    }

    #[test]
    fn explore_exports_json() {
        let counts = [1u32, 1, 1, 0, 0, 0];
        let mut out: *mut c_char = ptr::null_mut();
        let status = rg_explore(6, counts.as_ptr(), counts.len(), true, 0, &mut out);
        assert_eq!(status, RgStatus::Ok);
        let json = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_string();
        rg_string_free(out);
        assert!(json.contains("exists_failure"), "{json}");
    }

    #[test]
    fn version_is_static() {
        let v = unsafe { CStr::from_ptr(rg_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
