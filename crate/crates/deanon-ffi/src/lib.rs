//! C ABI for the deanon library.
//!
//! Conventions:
//! * Fallible calls return a `DN_*` status code; `DN_OK` is zero.
//! * Graphs and configurations cross the boundary as opaque handles that
//!   must be released with their matching `dn_*_free` function.
//! * On failure the call stores a thread-local message retrievable with
//!   [`dn_last_error_message`]; the pointer stays valid until the next
//!   failure on the same thread.
//! * Attack *failure* (empty candidate or matching sets) is a domain
//!   outcome reported through [`DnGameResult`], not an error code.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::os::raw::{c_char, c_int};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Duration;

use deanon::defender::PerturbationSpec;
use deanon::graph::{random_graph, Graph};
use deanon::harness::{run_experiment, run_single_game, write_csv, AttackVariant, ExperimentConfig};
use deanon::Error;

/// Success.
pub const DN_OK: c_int = 0;
/// A required pointer argument was null.
pub const DN_ERR_NULL_ARGUMENT: c_int = 1;
/// An argument was malformed or out of range.
pub const DN_ERR_INVALID_INPUT: c_int = 2;
/// The configuration cannot be satisfied (e.g. fingerprint pool too small).
pub const DN_ERR_INFEASIBLE: c_int = 3;
/// A file could not be read or written.
pub const DN_ERR_IO: c_int = 4;
/// The library panicked internally; state may be inconsistent.
pub const DN_ERR_PANIC: c_int = 5;

/// Variant selector: exact search (zero tolerances).
pub const DN_VARIANT_ORIGINAL: c_int = 0;
/// Variant selector: noise-tolerant search.
pub const DN_VARIANT_ROBUST: c_int = 1;

/// Perturbation selector: release the graph unmodified.
pub const DN_PERTURB_NONE: c_int = 0;
/// Perturbation selector: flip a rate-proportional number of random pairs.
pub const DN_PERTURB_RANDOM_FLIP: c_int = 1;

/// Opaque undirected-graph handle.
pub struct DnGraph {
    inner: Graph,
}

/// Opaque experiment-configuration handle.
pub struct DnConfig {
    inner: ExperimentConfig,
}

/// Outcome of a single attacker-defender game.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct DnGameResult {
    /// Probability that the attacker names every victim correctly, in [0, 1].
    pub success_probability: f64,
    /// Number of candidate sybil vectors retrieved.
    pub candidate_count: u64,
    /// Total fingerprint matchings across all candidates.
    pub matching_count: u64,
    /// 1 if a search cap trimmed candidates or matchings.
    pub truncated: u8,
    /// 1 if no candidate produced any matching.
    pub failed: u8,
    /// 1 if the wall-clock budget expired mid-run.
    pub timed_out: u8,
    /// 1 if the fingerprint pool made the run impossible.
    pub skipped: u8,
    /// 1 if there were no victims, making success vacuous.
    pub vacuous: u8,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let bytes: Vec<u8> = msg.into_bytes().into_iter().filter(|&b| b != 0).collect();
    let msg = CString::new(bytes).expect("nul bytes stripped");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(err: Error) -> c_int {
    let code = match err {
        Error::Infeasible(_) => DN_ERR_INFEASIBLE,
        Error::Io(_) => DN_ERR_IO,
        _ => DN_ERR_INVALID_INPUT,
    };
    set_error(err.to_string());
    code
}

fn null_arg(name: &str) -> c_int {
    set_error(format!("null argument: {name}"));
    DN_ERR_NULL_ARGUMENT
}

fn guarded(f: impl FnOnce() -> c_int) -> c_int {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(_) => {
            set_error("internal panic".into());
            DN_ERR_PANIC
        }
    }
}

fn variant_from(code: c_int) -> Result<AttackVariant, Error> {
    match code {
        DN_VARIANT_ORIGINAL => Ok(AttackVariant::Original),
        DN_VARIANT_ROBUST => Ok(AttackVariant::Robust),
        other => Err(Error::InvalidInput(format!(
            "unknown variant code {other}"
        ))),
    }
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn dn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message describing the most recent failure on this thread, or null if
/// no call has failed yet.
#[no_mangle]
pub extern "C" fn dn_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |msg| msg.as_ptr())
    })
}

/// Sample a graph on vertices 0..n where each pair is an edge independently
/// with probability `density`, and store a handle in `*out`.
#[no_mangle]
pub unsafe extern "C" fn dn_graph_random(
    n: u32,
    density: f64,
    seed: u64,
    out: *mut *mut DnGraph,
) -> c_int {
    guarded(|| {
        if out.is_null() {
            return null_arg("out");
        }
        match random_graph(n as usize, density, seed) {
            Ok(g) => {
                unsafe { *out = Box::into_raw(Box::new(DnGraph { inner: g })) };
                DN_OK
            }
            Err(e) => fail(e),
        }
    })
}

/// Build a graph on vertices 0..n from `num_edges` endpoint pairs laid out
/// flat as u0, v0, u1, v1, ... Self-loops and duplicates are rejected.
#[no_mangle]
pub unsafe extern "C" fn dn_graph_from_edges(
    n: u32,
    endpoints: *const u32,
    num_edges: usize,
    out: *mut *mut DnGraph,
) -> c_int {
    guarded(|| {
        if out.is_null() {
            return null_arg("out");
        }
        if endpoints.is_null() && num_edges > 0 {
            return null_arg("endpoints");
        }
        let len = match num_edges.checked_mul(2) {
            Some(len) => len,
            None => return fail(Error::InvalidInput("edge count overflows".into())),
        };
        let flat = if len == 0 {
            &[][..]
        } else {
            unsafe { std::slice::from_raw_parts(endpoints, len) }
        };
        let edges: Vec<(usize, usize)> = flat
            .chunks_exact(2)
            .map(|p| (p[0] as usize, p[1] as usize))
            .collect();
        match Graph::from_edges(n as usize, &edges) {
            Ok(g) => {
                unsafe { *out = Box::into_raw(Box::new(DnGraph { inner: g })) };
                DN_OK
            }
            Err(e) => fail(e),
        }
    })
}

/// Parse a graph from an edge-list file (header "n m", then one "u v" line
/// per edge) and store a handle in `*out`.
#[no_mangle]
pub unsafe extern "C" fn dn_graph_read_edge_list(
    path: *const c_char,
    out: *mut *mut DnGraph,
) -> c_int {
    guarded(|| {
        if out.is_null() {
            return null_arg("out");
        }
        if path.is_null() {
            return null_arg("path");
        }
        let path = match unsafe { CStr::from_ptr(path) }.to_str() {
            Ok(p) => p,
            Err(_) => return fail(Error::InvalidInput("path is not valid UTF-8".into())),
        };
        let file = match File::open(path) {
            Ok(f) => f,
            Err(e) => return fail(e.into()),
        };
        match Graph::read_edge_list(BufReader::new(file)) {
            Ok(g) => {
                unsafe { *out = Box::into_raw(Box::new(DnGraph { inner: g })) };
                DN_OK
            }
            Err(e) => fail(e),
        }
    })
}

/// Number of vertices, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn dn_graph_num_vertices(graph: *const DnGraph) -> u32 {
    if graph.is_null() {
        return 0;
    }
    unsafe { &*graph }.inner.num_vertices() as u32
}

/// Number of edges, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn dn_graph_num_edges(graph: *const DnGraph) -> u64 {
    if graph.is_null() {
        return 0;
    }
    unsafe { &*graph }.inner.num_edges() as u64
}

/// Release a graph handle. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn dn_graph_free(graph: *mut DnGraph) {
    if !graph.is_null() {
        drop(unsafe { Box::from_raw(graph) });
    }
}

/// Allocate a configuration with library defaults and store it in `*out`.
#[no_mangle]
pub unsafe extern "C" fn dn_config_new(out: *mut *mut DnConfig) -> c_int {
    guarded(|| {
        if out.is_null() {
            return null_arg("out");
        }
        let config = DnConfig {
            inner: ExperimentConfig::default(),
        };
        unsafe { *out = Box::into_raw(Box::new(config)) };
        DN_OK
    })
}

/// Release a configuration handle. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn dn_config_free(config: *mut DnConfig) {
    if !config.is_null() {
        drop(unsafe { Box::from_raw(config) });
    }
}

unsafe fn with_config(
    config: *mut DnConfig,
    f: impl FnOnce(&mut ExperimentConfig) -> c_int,
) -> c_int {
    guarded(|| {
        if config.is_null() {
            return null_arg("config");
        }
        f(&mut unsafe { &mut *config }.inner)
    })
}

/// Set the order of each generated graph (before sybils are added).
#[no_mangle]
pub unsafe extern "C" fn dn_config_set_num_vertices(config: *mut DnConfig, n: u32) -> c_int {
    unsafe {
        with_config(config, |c| {
            c.n = n as usize;
            DN_OK
        })
    }
}

/// Replace the density grid with `len` values from `densities`.
#[no_mangle]
pub unsafe extern "C" fn dn_config_set_densities(
    config: *mut DnConfig,
    densities: *const f64,
    len: usize,
) -> c_int {
    unsafe {
        with_config(config, |c| {
            if densities.is_null() {
                return null_arg("densities");
            }
            if len == 0 {
                return fail(Error::InvalidInput("no densities given".into()));
            }
            c.densities = std::slice::from_raw_parts(densities, len).to_vec();
            DN_OK
        })
    }
}

/// Set how many graphs are sampled per density.
#[no_mangle]
pub unsafe extern "C" fn dn_config_set_graphs_per_density(
    config: *mut DnConfig,
    count: u32,
) -> c_int {
    unsafe {
        with_config(config, |c| {
            c.graphs_per_density = count as usize;
            DN_OK
        })
    }
}

/// Set the number of sybil vertices the attacker plants.
#[no_mangle]
pub unsafe extern "C" fn dn_config_set_num_sybils(config: *mut DnConfig, count: u32) -> c_int {
    unsafe {
        with_config(config, |c| {
            c.num_sybils = count as usize;
            DN_OK
        })
    }
}

/// Set the number of victims the attacker targets.
#[no_mangle]
pub unsafe extern "C" fn dn_config_set_num_victims(config: *mut DnConfig, count: u32) -> c_int {
    unsafe {
        with_config(config, |c| {
            c.num_victims = count as usize;
            DN_OK
        })
    }
}

/// Set the noise tolerances the robust variant plays with: `theta` bounds
/// retrieval dissimilarity, `beta` bounds fingerprint distance. The original
/// variant always plays (0, 0).
#[no_mangle]
pub unsafe extern "C" fn dn_config_set_tolerances(
    config: *mut DnConfig,
    theta: u32,
    beta: u32,
) -> c_int {
    unsafe {
        with_config(config, |c| {
            c.theta = theta as usize;
            c.beta = beta as usize;
            DN_OK
        })
    }
}

/// Choose the defender's perturbation: `DN_PERTURB_NONE` ignores `rate`,
/// `DN_PERTURB_RANDOM_FLIP` flips floor(rate * n(n-1)/2) random pairs.
#[no_mangle]
pub unsafe extern "C" fn dn_config_set_perturbation(
    config: *mut DnConfig,
    kind: c_int,
    rate: f64,
) -> c_int {
    unsafe {
        with_config(config, |c| {
            match kind {
                DN_PERTURB_NONE => c.perturbation = PerturbationSpec::None,
                DN_PERTURB_RANDOM_FLIP => c.perturbation = PerturbationSpec::RandomFlip { rate },
                other => {
                    return fail(Error::InvalidInput(format!(
                        "unknown perturbation code {other}"
                    )))
                }
            }
            DN_OK
        })
    }
}

/// Replace the variant list (reporting order) with `len` codes from
/// `variants`; each must be `DN_VARIANT_ORIGINAL` or `DN_VARIANT_ROBUST`.
#[no_mangle]
pub unsafe extern "C" fn dn_config_set_variants(
    config: *mut DnConfig,
    variants: *const c_int,
    len: usize,
) -> c_int {
    unsafe {
        with_config(config, |c| {
            if variants.is_null() {
                return null_arg("variants");
            }
            if len == 0 {
                return fail(Error::InvalidInput("no attack variant selected".into()));
            }
            let mut parsed = Vec::with_capacity(len);
            for &code in std::slice::from_raw_parts(variants, len) {
                match variant_from(code) {
                    Ok(v) => parsed.push(v),
                    Err(e) => return fail(e),
                }
            }
            c.variants = parsed;
            DN_OK
        })
    }
}

/// Set the master seed the experiment grid fans out from.
#[no_mangle]
pub unsafe extern "C" fn dn_config_set_seed(config: *mut DnConfig, seed: u64) -> c_int {
    unsafe {
        with_config(config, |c| {
            c.seed = seed;
            DN_OK
        })
    }
}

/// Set the per-run wall-clock budget in milliseconds; a breach scores the
/// run 0 and flags it.
#[no_mangle]
pub unsafe extern "C" fn dn_config_set_time_budget_ms(
    config: *mut DnConfig,
    millis: u64,
) -> c_int {
    unsafe {
        with_config(config, |c| {
            c.time_budget = Duration::from_millis(millis);
            DN_OK
        })
    }
}

/// Cap retrieval's per-level surviving candidates; 0 removes the cap.
#[no_mangle]
pub unsafe extern "C" fn dn_config_set_frontier_cap(config: *mut DnConfig, cap: u64) -> c_int {
    unsafe {
        with_config(config, |c| {
            c.frontier_cap = if cap == 0 { None } else { Some(cap as usize) };
            DN_OK
        })
    }
}

/// Cap simultaneously tracked matching assignments (must stay positive).
#[no_mangle]
pub unsafe extern "C" fn dn_config_set_partial_cap(config: *mut DnConfig, cap: u64) -> c_int {
    unsafe {
        with_config(config, |c| {
            c.partial_cap = cap as usize;
            DN_OK
        })
    }
}

/// Play one full game on `graph` under `config` with the given variant and
/// seed, writing the outcome into `*out`. The seed covers victim choice,
/// sybil construction, fingerprint assignment and the defender.
#[no_mangle]
pub unsafe extern "C" fn dn_run_game(
    graph: *const DnGraph,
    config: *const DnConfig,
    variant: c_int,
    seed: u64,
    out: *mut DnGameResult,
) -> c_int {
    guarded(|| {
        if graph.is_null() {
            return null_arg("graph");
        }
        if config.is_null() {
            return null_arg("config");
        }
        if out.is_null() {
            return null_arg("out");
        }
        let variant = match variant_from(variant) {
            Ok(v) => v,
            Err(e) => return fail(e),
        };
        let graph = &unsafe { &*graph }.inner;
        let config = &unsafe { &*config }.inner;
        match run_single_game(graph, config, variant, seed) {
            Ok(r) => {
                unsafe {
                    *out = DnGameResult {
                        success_probability: r.pr,
                        candidate_count: r.candidate_count as u64,
                        matching_count: r.matching_count as u64,
                        truncated: r.truncated.into(),
                        failed: r.failed.into(),
                        timed_out: r.timed_out.into(),
                        skipped: r.skipped.into(),
                        vacuous: r.vacuous.into(),
                    };
                }
                DN_OK
            }
            Err(e) => fail(e),
        }
    })
}

/// Run the full experiment grid described by `config` and write the summary
/// CSV to `path`, overwriting any existing file.
#[no_mangle]
pub unsafe extern "C" fn dn_run_experiment_csv(
    config: *const DnConfig,
    path: *const c_char,
) -> c_int {
    guarded(|| {
        if config.is_null() {
            return null_arg("config");
        }
        if path.is_null() {
            return null_arg("path");
        }
        let path = match unsafe { CStr::from_ptr(path) }.to_str() {
            Ok(p) => p,
            Err(_) => return fail(Error::InvalidInput("path is not valid UTF-8".into())),
        };
        let config = &unsafe { &*config }.inner;
        let rows = match run_experiment(config) {
            Ok(rows) => rows,
            Err(e) => return fail(e),
        };
        let file = match File::create(path) {
            Ok(f) => f,
            Err(e) => return fail(e.into()),
        };
        match write_csv(&rows, BufWriter::new(file)) {
            Ok(()) => DN_OK,
            Err(e) => fail(e),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;
    use std::ptr;

    fn last_error() -> String {
        let ptr = dn_last_error_message();
        assert!(!ptr.is_null());
        unsafe { CStr::from_ptr(ptr) }.to_str().unwrap().to_owned()
    }

    #[test]
    fn version_is_static_c_string() {
        let v = unsafe { CStr::from_ptr(dn_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn random_graph_roundtrip() {
        let mut g: *mut DnGraph = ptr::null_mut();
        assert_eq!(unsafe { dn_graph_random(30, 0.3, 7, &mut g) }, DN_OK);
        assert!(!g.is_null());
        assert_eq!(unsafe { dn_graph_num_vertices(g) }, 30);
        let m = unsafe { dn_graph_num_edges(g) };
        assert!(m > 0 && m < 30 * 29 / 2);
        unsafe { dn_graph_free(g) };
    }

    #[test]
    fn null_out_pointer_is_reported() {
        assert_eq!(
            unsafe { dn_graph_random(10, 0.5, 0, ptr::null_mut()) },
            DN_ERR_NULL_ARGUMENT
        );
        assert!(last_error().contains("out"));
    }

    #[test]
    fn invalid_density_is_invalid_input() {
        let mut g: *mut DnGraph = ptr::null_mut();
        assert_eq!(
            unsafe { dn_graph_random(10, 1.5, 0, &mut g) },
            DN_ERR_INVALID_INPUT
        );
        assert!(g.is_null());
    }

    #[test]
    fn graph_from_edges_builds_and_rejects_duplicates() {
        let flat: [u32; 6] = [0, 1, 1, 2, 0, 2];
        let mut g: *mut DnGraph = ptr::null_mut();
        assert_eq!(unsafe { dn_graph_from_edges(4, flat.as_ptr(), 3, &mut g) }, DN_OK);
        assert_eq!(unsafe { dn_graph_num_vertices(g) }, 4);
        assert_eq!(unsafe { dn_graph_num_edges(g) }, 3);
        unsafe { dn_graph_free(g) };

        let dup: [u32; 4] = [0, 1, 1, 0];
        let mut g: *mut DnGraph = ptr::null_mut();
        assert_eq!(
            unsafe { dn_graph_from_edges(4, dup.as_ptr(), 2, &mut g) },
            DN_ERR_INVALID_INPUT
        );
        assert!(last_error().contains("duplicate"));
    }

    #[test]
    fn edge_list_file_loads() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.edges");
        std::fs::write(&path, "3 2\n0 1\n1 2\n").unwrap();
        let cpath = CString::new(path.to_str().unwrap()).unwrap();
        let mut g: *mut DnGraph = ptr::null_mut();
        assert_eq!(unsafe { dn_graph_read_edge_list(cpath.as_ptr(), &mut g) }, DN_OK);
        assert_eq!(unsafe { dn_graph_num_vertices(g) }, 3);
        assert_eq!(unsafe { dn_graph_num_edges(g) }, 2);
        unsafe { dn_graph_free(g) };

        let missing = CString::new(dir.path().join("absent").to_str().unwrap()).unwrap();
        let mut g: *mut DnGraph = ptr::null_mut();
        assert_eq!(
            unsafe { dn_graph_read_edge_list(missing.as_ptr(), &mut g) },
            DN_ERR_IO
        );
    }

    unsafe fn small_config() -> *mut DnConfig {
        let mut c: *mut DnConfig = ptr::null_mut();
        assert_eq!(dn_config_new(&mut c), DN_OK);
        assert_eq!(dn_config_set_num_vertices(c, 30), DN_OK);
        assert_eq!(dn_config_set_num_sybils(c, 4), DN_OK);
        assert_eq!(dn_config_set_num_victims(c, 2), DN_OK);
        assert_eq!(dn_config_set_tolerances(c, 4, 4), DN_OK);
        assert_eq!(dn_config_set_perturbation(c, DN_PERTURB_NONE, 0.0), DN_OK);
        assert_eq!(dn_config_set_time_budget_ms(c, 30_000), DN_OK);
        c
    }

    #[test]
    fn game_runs_on_clean_release() {
        unsafe {
            let config = small_config();
            let mut g: *mut DnGraph = ptr::null_mut();
            assert_eq!(dn_graph_random(30, 0.3, 11, &mut g), DN_OK);
            let mut out = DnGameResult::default();
            assert_eq!(dn_run_game(g, config, DN_VARIANT_ROBUST, 42, &mut out), DN_OK);
            assert!(out.skipped == 0 && out.timed_out == 0);
            assert!(out.failed == 0);
            assert!(out.candidate_count >= 1);
            assert!(out.matching_count >= 1);
            assert!((0.0..=1.0).contains(&out.success_probability));
            dn_graph_free(g);
            dn_config_free(config);
        }
    }

    #[test]
    fn game_rejects_unknown_variant_and_small_graph() {
        unsafe {
            let config = small_config();
            let mut g: *mut DnGraph = ptr::null_mut();
            assert_eq!(dn_graph_random(30, 0.3, 11, &mut g), DN_OK);
            let mut out = DnGameResult::default();
            assert_eq!(dn_run_game(g, config, 9, 0, &mut out), DN_ERR_INVALID_INPUT);
            assert!(last_error().contains("variant"));

            let mut tiny: *mut DnGraph = ptr::null_mut();
            assert_eq!(dn_graph_random(5, 0.3, 1, &mut tiny), DN_OK);
            assert_eq!(
                dn_run_game(tiny, config, DN_VARIANT_ROBUST, 0, &mut out),
                DN_ERR_INVALID_INPUT
            );
            dn_graph_free(tiny);
            dn_graph_free(g);
            dn_config_free(config);
        }
    }

    #[test]
    fn config_setters_validate_codes() {
        unsafe {
            let config = small_config();
            assert_eq!(
                dn_config_set_perturbation(config, 7, 0.1),
                DN_ERR_INVALID_INPUT
            );
            let codes = [DN_VARIANT_ROBUST, 5];
            assert_eq!(
                dn_config_set_variants(config, codes.as_ptr(), 2),
                DN_ERR_INVALID_INPUT
            );
            assert_eq!(
                dn_config_set_densities(config, ptr::null(), 3),
                DN_ERR_NULL_ARGUMENT
            );
            dn_config_free(config);
        }
    }

    #[test]
    fn experiment_writes_csv() {
        unsafe {
            let config = small_config();
            let densities = [0.2f64];
            assert_eq!(dn_config_set_densities(config, densities.as_ptr(), 1), DN_OK);
            assert_eq!(dn_config_set_graphs_per_density(config, 2), DN_OK);
            let variants = [DN_VARIANT_ORIGINAL, DN_VARIANT_ROBUST];
            assert_eq!(dn_config_set_variants(config, variants.as_ptr(), 2), DN_OK);

            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("out.csv");
            let cpath = CString::new(path.to_str().unwrap()).unwrap();
            assert_eq!(dn_run_experiment_csv(config, cpath.as_ptr()), DN_OK);

            let text = std::fs::read_to_string(&path).unwrap();
            let lines: Vec<&str> = text.lines().collect();
            assert_eq!(
                lines[0],
                "density,variant,perturbation,mean_success,std_success,runs,failed,timed_out"
            );
            assert_eq!(lines.len(), 3);
            assert!(lines[1].starts_with("0.2,original,"));
            assert!(lines[2].starts_with("0.2,robust,"));
            dn_config_free(config);
        }
    }

    #[test]
    fn infeasible_pool_is_skip_not_error() {
        unsafe {
            let config = small_config();
            assert_eq!(dn_config_set_num_sybils(config, 2), DN_OK);
            assert_eq!(dn_config_set_num_victims(config, 9), DN_OK);
            let mut g: *mut DnGraph = ptr::null_mut();
            assert_eq!(dn_graph_random(30, 0.3, 11, &mut g), DN_OK);
            let mut out = DnGameResult::default();
            assert_eq!(dn_run_game(g, config, DN_VARIANT_ROBUST, 7, &mut out), DN_OK);
            assert_eq!(out.skipped, 1);
            assert_eq!(out.success_probability, 0.0);
            dn_graph_free(g);
            dn_config_free(config);
        }
    }
}
