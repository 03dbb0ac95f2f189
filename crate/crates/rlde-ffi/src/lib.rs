//! C ABI over the rlde engine: benchmark instances, landscape fingerprints,
//! configured DE runs, and trained-agent design, behind opaque handles and
//! plain status codes. The matching header is generated into
//! `include/rlde.h` at build time.

use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::ptr;

use rlde::bbob::{evaluate, gap, make_instance, ProblemInstance};
use rlde::de::{run_de, DEConfig};
use rlde::ela::{assemble_state, FEATURE_COUNT};
use rlde::error::Error;
use rlde::harness::{canonical_de_config, log_checkpoints};
use rlde::meta::{design_for, load_checkpoint, TrainedAgent};
use rlde::rng::seed_rng;

/// Status code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RldeStatus {
    Ok = 0,
    InvalidArgument = 1,
    ConfigError = 2,
    IoError = 3,
    ParseError = 4,
    NullPointer = 5,
}

fn status_of(err: &Error) -> RldeStatus {
    match err {
        Error::InvalidArgument(_) => RldeStatus::InvalidArgument,
        Error::Config(_) => RldeStatus::ConfigError,
        Error::Io { .. } => RldeStatus::IoError,
        Error::Parse { .. } => RldeStatus::ParseError,
    }
}

/// Opaque benchmark-problem handle.
pub struct RldeProblem {
    instance: ProblemInstance,
}

/// Opaque trained-agent handle.
pub struct RldeAgent {
    agent: TrainedAgent,
}

/// Width of the fingerprint written by `rlde_problem_features`.
#[no_mangle]
pub extern "C" fn rlde_feature_count() -> usize {
    FEATURE_COUNT
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn rlde_status_message(status: RldeStatus) -> *const c_char {
    let msg: &'static [u8] = match status {
        RldeStatus::Ok => b"ok\0",
        RldeStatus::InvalidArgument => b"invalid argument\0",
        RldeStatus::ConfigError => b"configuration error\0",
        RldeStatus::IoError => b"i/o error\0",
        RldeStatus::ParseError => b"parse error\0",
        RldeStatus::NullPointer => b"null pointer\0",
    };
    msg.as_ptr().cast()
}

/// Creates a benchmark instance.
///
/// # Safety
/// `out` must be a valid pointer to an `RldeProblem*` slot.
#[no_mangle]
pub unsafe extern "C" fn rlde_problem_new(
    function_id: u8,
    dimension: usize,
    instance_seed: u64,
    out: *mut *mut RldeProblem,
) -> RldeStatus {
    if out.is_null() {
        return RldeStatus::NullPointer;
    }
    match make_instance(function_id, dimension, instance_seed) {
        Ok(instance) => {
            *out = Box::into_raw(Box::new(RldeProblem { instance }));
            RldeStatus::Ok
        }
        Err(e) => {
            *out = ptr::null_mut();
            status_of(&e)
        }
    }
}

/// Releases a problem handle. Null is a no-op.
///
/// # Safety
/// `problem` must be a pointer from `rlde_problem_new`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rlde_problem_free(problem: *mut RldeProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Problem dimension; 0 for a null handle.
///
/// # Safety
/// `problem` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn rlde_problem_dimension(problem: *const RldeProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.instance.dimension)
}

/// Optimal objective value.
///
/// # Safety
/// `problem` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn rlde_problem_f_opt(
    problem: *const RldeProblem,
    out: *mut f64,
) -> RldeStatus {
    let (Some(p), false) = (problem.as_ref(), out.is_null()) else {
        return RldeStatus::NullPointer;
    };
    *out = p.instance.f_opt;
    RldeStatus::Ok
}

/// Copies the optimum location into `out` (length `dimension`).
///
/// # Safety
/// `problem` must be live; `out` must hold at least `dimension` doubles.
#[no_mangle]
pub unsafe extern "C" fn rlde_problem_x_opt(
    problem: *const RldeProblem,
    out: *mut f64,
) -> RldeStatus {
    let (Some(p), false) = (problem.as_ref(), out.is_null()) else {
        return RldeStatus::NullPointer;
    };
    ptr::copy_nonoverlapping(p.instance.x_opt.as_ptr(), out, p.instance.dimension);
    RldeStatus::Ok
}

/// Evaluates the objective at `x` (length `len`, which must equal the
/// problem dimension).
///
/// # Safety
/// `problem` must be live; `x` must hold `len` readable doubles; `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn rlde_problem_evaluate(
    problem: *const RldeProblem,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> RldeStatus {
    let (Some(p), false, false) = (problem.as_ref(), x.is_null(), out.is_null()) else {
        return RldeStatus::NullPointer;
    };
    let point = std::slice::from_raw_parts(x, len);
    match evaluate(&p.instance, point) {
        Ok(f) => {
            *out = f;
            RldeStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Distance of an objective value from the instance optimum.
///
/// # Safety
/// `problem` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rlde_problem_gap(
    problem: *const RldeProblem,
    f_value: f64,
    out: *mut f64,
) -> RldeStatus {
    let (Some(p), false) = (problem.as_ref(), out.is_null()) else {
        return RldeStatus::NullPointer;
    };
    *out = gap(&p.instance, f_value);
    RldeStatus::Ok
}

/// Computes the 62-value fingerprint into `out` (length
/// `rlde_feature_count()`), spending 50 * dimension evaluations.
///
/// # Safety
/// `problem` must be live; `out` must hold `rlde_feature_count()` doubles.
#[no_mangle]
pub unsafe extern "C" fn rlde_problem_features(
    problem: *const RldeProblem,
    sample_seed: u64,
    out: *mut f64,
) -> RldeStatus {
    let (Some(p), false) = (problem.as_ref(), out.is_null()) else {
        return RldeStatus::NullPointer;
    };
    let features = assemble_state(&p.instance, &mut seed_rng(sample_seed));
    ptr::copy_nonoverlapping(features.values.as_ptr(), out, FEATURE_COUNT);
    RldeStatus::Ok
}

/// Loads a trained agent checkpoint.
///
/// # Safety
/// `path` must be a NUL-terminated UTF-8 string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rlde_agent_load(
    path: *const c_char,
    out: *mut *mut RldeAgent,
) -> RldeStatus {
    if path.is_null() || out.is_null() {
        return RldeStatus::NullPointer;
    }
    *out = ptr::null_mut();
    let Ok(path) = CStr::from_ptr(path).to_str() else {
        return RldeStatus::InvalidArgument;
    };
    match load_checkpoint(&PathBuf::from(path)) {
        Ok(agent) => {
            *out = Box::into_raw(Box::new(RldeAgent { agent }));
            RldeStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Releases an agent handle. Null is a no-op.
///
/// # Safety
/// `agent` must be a pointer from `rlde_agent_load`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rlde_agent_free(agent: *mut RldeAgent) {
    if !agent.is_null() {
        drop(Box::from_raw(agent));
    }
}

/// Designs a configuration for the problem and returns it as a JSON string
/// (free with `rlde_string_free`).
///
/// # Safety
/// `agent` and `problem` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rlde_agent_design_json(
    agent: *const RldeAgent,
    problem: *const RldeProblem,
    sample_seed: u64,
    out: *mut *mut c_char,
) -> RldeStatus {
    let (Some(a), Some(p), false) = (agent.as_ref(), problem.as_ref(), out.is_null()) else {
        return RldeStatus::NullPointer;
    };
    *out = ptr::null_mut();
    let config = design_for(&a.agent, &p.instance, &mut seed_rng(sample_seed));
    let json = match serde_json::to_string(&config) {
        Ok(j) => j,
        Err(_) => return RldeStatus::ParseError,
    };
    match CString::new(json) {
        Ok(s) => {
            *out = s.into_raw();
            RldeStatus::Ok
        }
        Err(_) => RldeStatus::ParseError,
    }
}

/// Frees a string returned by this library. Null is a no-op.
///
/// # Safety
/// `s` must come from an rlde function returning an owned string.
#[no_mangle]
pub unsafe extern "C" fn rlde_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Runs a configured DE on the problem. `config_json` may be null for the
/// canonical baseline (rand/1, binomial, NP = 5D, F = 0.5, Cr = 0.9).
/// Writes the final best objective and the evaluations consumed; when
/// `out_best_x` is non-null it receives the best point (length `dimension`).
///
/// # Safety
/// `problem` must be live; `config_json`, when non-null, must be a
/// NUL-terminated JSON string; output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn rlde_run(
    problem: *const RldeProblem,
    config_json: *const c_char,
    max_fes: usize,
    seed: u64,
    out_best_f: *mut f64,
    out_fes_used: *mut usize,
    out_best_x: *mut f64,
) -> RldeStatus {
    let (Some(p), false, false) = (problem.as_ref(), out_best_f.is_null(), out_fes_used.is_null())
    else {
        return RldeStatus::NullPointer;
    };
    let config: DEConfig = if config_json.is_null() {
        canonical_de_config()
    } else {
        let Ok(text) = CStr::from_ptr(config_json).to_str() else {
            return RldeStatus::InvalidArgument;
        };
        match serde_json::from_str::<DEConfig>(text) {
            Ok(c) => c,
            Err(_) => return RldeStatus::ParseError,
        }
    };
    if let Err(e) = config.validate() {
        return status_of(&e);
    }
    let checkpoints = log_checkpoints(max_fes);
    match run_de(&config, &p.instance, max_fes, &checkpoints, &mut seed_rng(seed)) {
        Ok(result) => {
            *out_best_f = result.best_f;
            *out_fes_used = result.fes_used;
            if !out_best_x.is_null() {
                ptr::copy_nonoverlapping(result.best_x.as_ptr(), out_best_x, p.instance.dimension);
            }
            RldeStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn problem_lifecycle_through_the_abi() {
        unsafe {
            let mut problem: *mut RldeProblem = ptr::null_mut();
            assert_eq!(rlde_problem_new(1, 4, 7, &mut problem), RldeStatus::Ok);
            assert_eq!(rlde_problem_dimension(problem), 4);

            let mut x_opt = vec![0.0; 4];
            assert_eq!(rlde_problem_x_opt(problem, x_opt.as_mut_ptr()), RldeStatus::Ok);
            let mut f = 0.0;
            assert_eq!(
                rlde_problem_evaluate(problem, x_opt.as_ptr(), 4, &mut f),
                RldeStatus::Ok
            );
            let mut f_opt = 0.0;
            assert_eq!(rlde_problem_f_opt(problem, &mut f_opt), RldeStatus::Ok);
            assert!((f - f_opt).abs() <= 1e-9);

            let mut g = 0.0;
            assert_eq!(rlde_problem_gap(problem, f_opt + 0.5, &mut g), RldeStatus::Ok);
            assert!((g - 0.5).abs() < 1e-12);
            rlde_problem_free(problem);
        }
    }

    #[test]
    fn invalid_ids_and_nulls_are_reported() {
        unsafe {
            let mut problem: *mut RldeProblem = ptr::null_mut();
            assert_eq!(rlde_problem_new(0, 4, 7, &mut problem), RldeStatus::InvalidArgument);
            assert!(problem.is_null());
            assert_eq!(rlde_problem_new(1, 4, 7, ptr::null_mut()), RldeStatus::NullPointer);
            assert_eq!(rlde_problem_dimension(ptr::null()), 0);
            rlde_problem_free(ptr::null_mut());
            rlde_string_free(ptr::null_mut());
        }
    }

    #[test]
    fn features_and_run_through_the_abi() {
        unsafe {
            let mut problem: *mut RldeProblem = ptr::null_mut();
            assert_eq!(rlde_problem_new(1, 2, 3, &mut problem), RldeStatus::Ok);

            let mut features = vec![0.0; rlde_feature_count()];
            assert_eq!(
                rlde_problem_features(problem, 5, features.as_mut_ptr()),
                RldeStatus::Ok
            );
            assert_eq!(features[0], 2.0);
            assert!(features.iter().all(|v| v.is_finite()));

            let mut best_f = 0.0;
            let mut fes = 0usize;
            let mut best_x = vec![0.0; 2];
            let status = rlde_run(
                problem,
                ptr::null(),
                2000,
                11,
                &mut best_f,
                &mut fes,
                best_x.as_mut_ptr(),
            );
            assert_eq!(status, RldeStatus::Ok);
            assert_eq!(fes, 2000);
            let mut g = 0.0;
            rlde_problem_gap(problem, best_f, &mut g);
            assert!(g < 1e-3, "canonical baseline should crack a 2-D sphere, gap {g}");

            let bad = CString::new("{\"bogus\": 1}").unwrap();
            let status = rlde_run(
                problem,
                bad.as_ptr(),
                2000,
                11,
                &mut best_f,
                &mut fes,
                ptr::null_mut(),
            );
            assert_eq!(status, RldeStatus::ParseError);
            rlde_problem_free(problem);
        }
    }

    #[test]
    fn status_messages_are_nul_terminated_statics() {
        unsafe {
            let msg = CStr::from_ptr(rlde_status_message(RldeStatus::ConfigError));
            assert_eq!(msg.to_str().unwrap(), "configuration error");
        }
    }
}
