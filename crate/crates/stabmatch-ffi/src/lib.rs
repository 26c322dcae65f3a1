//! C ABI for the stabmatch library.
//!
//! Graphs and measures are opaque handles created from the same text
//! formats the CLI reads; analysis entry points return a status code and,
//! where applicable, a JSON document identical to the CLI output. All
//! strings returned by this library must be released with
//! `sm_string_free`, handles with their `_free` functions. The last error
//! message is thread-local and queried with `sm_last_error`.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use stabmatch::closed_form;
use stabmatch::decompose;
use stabmatch::error::Error;
use stabmatch::flow;
use stabmatch::graph::Multigraph;
use stabmatch::measure::NodeMeasure;
use stabmatch::report;
use stabmatch::sim::{self, MatchingPolicy};
use stabmatch::sim_bipartite::{self, PairArrivalLaw};
use stabmatch::stability;
use stabmatch::Rat;

/// Status codes mirroring the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmStatus {
    /// Success; for region checks: the measure is a member.
    SmOk = 0,
    /// Invalid arguments at the ABI boundary (null pointers, bad UTF-8,
    /// unknown mode names).
    SmUsage = 1,
    /// Malformed input data or failed validation.
    SmInput = 2,
    /// The measure is not a member of the requested region.
    SmNotMember = 3,
}

/// Opaque compatibility multigraph.
pub struct SmGraph {
    inner: Multigraph,
}

/// Opaque node measure tied to the graph it was parsed against.
pub struct SmMeasure {
    inner: NodeMeasure,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn fail(status: SmStatus, msg: impl Into<String>) -> SmStatus {
    set_error(msg);
    status
}

fn error_status(e: &Error) -> SmStatus {
    match e {
        Error::Input(_) | Error::Resource(_) | Error::Reversibility { .. } => SmStatus::SmInput,
    }
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s)
        .map(CString::into_raw)
        .unwrap_or(ptr::null_mut())
}

/// # Safety
/// `p` must be null or a valid NUL-terminated string.
unsafe fn opt_str<'a>(p: *const c_char) -> Result<Option<&'a str>, SmStatus> {
    if p.is_null() {
        return Ok(None);
    }
    match CStr::from_ptr(p).to_str() {
        Ok(s) => Ok(Some(s)),
        Err(_) => Err(SmStatus::SmUsage),
    }
}

unsafe fn req_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, SmStatus> {
    match opt_str(p) {
        Ok(Some(s)) => Ok(s),
        Ok(None) => {
            set_error(format!("{what} must not be null"));
            Err(SmStatus::SmUsage)
        }
        Err(s) => {
            set_error(format!("{what} is not valid UTF-8"));
            Err(s)
        }
    }
}

fn guarded(f: impl FnOnce() -> SmStatus) -> SmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(SmStatus::SmInput, "internal panic"),
    }
}

fn emit_json(out_json: *mut *mut c_char, value: serde_json::Value) {
    if !out_json.is_null() {
        let text = serde_json::to_string_pretty(&value).expect("valid JSON");
        unsafe {
            *out_json = to_c_string(text);
        }
    }
}

fn parse_v1(g: &Multigraph, csv: Option<&str>) -> Result<Vec<usize>, Error> {
    let csv = csv.ok_or_else(|| Error::input("a v1 node list is required"))?;
    let mut out = Vec::new();
    for name in csv.split(',') {
        let name = name.trim();
        if name.is_empty() {
            continue;
        }
        out.push(g.node_index(name)?);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Copies the thread-local message describing the most recent failure.
/// The result must be freed with `sm_string_free`.
#[no_mangle]
pub extern "C" fn sm_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| to_c_string(e.borrow().clone()))
}

/// Frees a string returned by this library. Null is a no-op.
///
/// # Safety
/// `s` must have been returned by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn sm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses the edge-list format (`u v` per line, `u u` a self-loop,
/// `#` comments). On success stores a graph handle in `out`.
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sm_graph_parse(text: *const c_char, out: *mut *mut SmGraph) -> SmStatus {
    guarded(|| {
        if out.is_null() {
            return fail(SmStatus::SmUsage, "out must not be null");
        }
        let text = match req_str(text, "text") {
            Ok(s) => s,
            Err(st) => return st,
        };
        match Multigraph::parse(text) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(SmGraph { inner: g }));
                SmStatus::SmOk
            }
            Err(e) => fail(error_status(&e), e.to_string()),
        }
    })
}

/// # Safety
/// `g` must be a graph handle from `sm_graph_parse`, not freed before.
#[no_mangle]
pub unsafe extern "C" fn sm_graph_free(g: *mut SmGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Serializes the graph back to the edge-list format.
///
/// # Safety
/// `g` must be a valid graph handle.
#[no_mangle]
pub unsafe extern "C" fn sm_graph_serialize(g: *const SmGraph) -> *mut c_char {
    if g.is_null() {
        return ptr::null_mut();
    }
    to_c_string((*g).inner.serialize())
}

/// Number of nodes of the graph; 0 for a null handle.
///
/// # Safety
/// `g` must be null or a valid graph handle.
#[no_mangle]
pub unsafe extern "C" fn sm_graph_node_count(g: *const SmGraph) -> usize {
    if g.is_null() {
        0
    } else {
        (*g).inner.node_count()
    }
}

/// Parses a measure file (`node value` lines, decimals or `p/q`) against
/// the graph; every node needs exactly one positive value.
///
/// # Safety
/// `g` must be a valid graph handle; `text` a valid string; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn sm_measure_parse(
    g: *const SmGraph,
    text: *const c_char,
    out: *mut *mut SmMeasure,
) -> SmStatus {
    guarded(|| {
        if g.is_null() || out.is_null() {
            return fail(SmStatus::SmUsage, "graph and out must not be null");
        }
        let text = match req_str(text, "text") {
            Ok(s) => s,
            Err(st) => return st,
        };
        match NodeMeasure::parse(text, &(*g).inner) {
            Ok(m) => {
                *out = Box::into_raw(Box::new(SmMeasure { inner: m }));
                SmStatus::SmOk
            }
            Err(e) => fail(error_status(&e), e.to_string()),
        }
    })
}

/// # Safety
/// `m` must be a measure handle from `sm_measure_parse`, not freed before.
#[no_mangle]
pub unsafe extern "C" fn sm_measure_free(m: *mut SmMeasure) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Region membership. `region` is `"general"`, `"bipartite"` or `"asym"`
/// (the latter requires `v1_csv`, a comma-separated node list). Returns
/// `SmOk` for members and `SmNotMember` otherwise; `out_json` (nullable)
/// receives the verdict document.
///
/// # Safety
/// Handles must be valid; strings valid or null as documented.
#[no_mangle]
pub unsafe extern "C" fn sm_check(
    g: *const SmGraph,
    m: *const SmMeasure,
    region: *const c_char,
    v1_csv: *const c_char,
    out_json: *mut *mut c_char,
) -> SmStatus {
    guarded(|| {
        if g.is_null() || m.is_null() {
            return fail(SmStatus::SmUsage, "graph and measure must not be null");
        }
        let graph = &(*g).inner;
        let mu = &(*m).inner;
        let region = match req_str(region, "region") {
            Ok(s) => s,
            Err(st) => return st,
        };
        let v1 = match opt_str(v1_csv) {
            Ok(v) => v,
            Err(st) => return fail(st, "v1_csv is not valid UTF-8"),
        };
        let verdict = match region {
            "general" => stability::check_ncond(graph, mu),
            "bipartite" => stability::check_ncond_bipartite(graph, mu),
            "asym" => parse_v1(graph, v1)
                .and_then(|v1| stability::check_ncond_asym(graph, &v1, mu)),
            other => return fail(SmStatus::SmUsage, format!("unknown region {other:?}")),
        };
        match verdict {
            Ok(v) => {
                emit_json(out_json, v.to_json(graph));
                if v.member {
                    SmStatus::SmOk
                } else {
                    SmStatus::SmNotMember
                }
            }
            Err(e) => fail(error_status(&e), e.to_string()),
        }
    })
}

/// Constructive decomposition. `mode` is `"general"`, `"asym"` or
/// `"maxflow"` (the latter two require `v1_csv`). `SmOk` when strictly
/// positive weights exist, `SmNotMember` otherwise; `out_json` receives
/// weights or the certificate.
///
/// # Safety
/// Handles must be valid; strings valid or null as documented.
#[no_mangle]
pub unsafe extern "C" fn sm_decompose(
    g: *const SmGraph,
    m: *const SmMeasure,
    mode: *const c_char,
    v1_csv: *const c_char,
    out_json: *mut *mut c_char,
) -> SmStatus {
    guarded(|| {
        if g.is_null() || m.is_null() {
            return fail(SmStatus::SmUsage, "graph and measure must not be null");
        }
        let graph = &(*g).inner;
        let mu = &(*m).inner;
        let mode = match req_str(mode, "mode") {
            Ok(s) => s,
            Err(st) => return st,
        };
        let v1 = match opt_str(v1_csv) {
            Ok(v) => v,
            Err(st) => return fail(st, "v1_csv is not valid UTF-8"),
        };
        match mode {
            "general" => match decompose::find_weights(graph, mu) {
                Ok(out) => {
                    let member = out.is_member();
                    emit_json(out_json, report::decompose_json(graph, &out));
                    if member {
                        SmStatus::SmOk
                    } else {
                        SmStatus::SmNotMember
                    }
                }
                Err(e) => fail(error_status(&e), e.to_string()),
            },
            "asym" => match parse_v1(graph, v1)
                .and_then(|v1| decompose::decompose_asym(graph, &v1, mu))
            {
                Ok(out) => {
                    let member = out.is_member();
                    emit_json(out_json, report::asym_json(graph, &out));
                    if member {
                        SmStatus::SmOk
                    } else {
                        SmStatus::SmNotMember
                    }
                }
                Err(e) => fail(error_status(&e), e.to_string()),
            },
            "maxflow" => match parse_v1(graph, v1)
                .and_then(|v1| flow::maxflow_decompose(graph, &v1, mu))
            {
                Ok(out) => {
                    let member = out.is_member();
                    emit_json(out_json, report::maxflow_json(graph, &out));
                    if member {
                        SmStatus::SmOk
                    } else {
                        SmStatus::SmNotMember
                    }
                }
                Err(e) => fail(error_status(&e), e.to_string()),
            },
            other => fail(SmStatus::SmUsage, format!("unknown mode {other:?}")),
        }
    })
}

/// Closed-form matching rates (`kind` one of unique/none/family in the
/// JSON). `SmInput` on topologies without a closed form.
///
/// # Safety
/// Handles must be valid.
#[no_mangle]
pub unsafe extern "C" fn sm_rates(
    g: *const SmGraph,
    m: *const SmMeasure,
    out_json: *mut *mut c_char,
) -> SmStatus {
    guarded(|| {
        if g.is_null() || m.is_null() {
            return fail(SmStatus::SmUsage, "graph and measure must not be null");
        }
        let graph = &(*g).inner;
        match closed_form::solve_system(graph, &(*m).inner) {
            Ok(solution) => {
                emit_json(out_json, report::rates_json(graph, &solution));
                SmStatus::SmOk
            }
            Err(e) => fail(error_status(&e), e.to_string()),
        }
    })
}

/// Simulates the general matching model (`policy` one of fcfm/ml/random);
/// the measure is normalized internally. JSON mirrors the CLI output.
///
/// # Safety
/// Handles must be valid.
#[no_mangle]
pub unsafe extern "C" fn sm_simulate(
    g: *const SmGraph,
    m: *const SmMeasure,
    policy: *const c_char,
    steps: u64,
    seed: u64,
    replications: u64,
    out_json: *mut *mut c_char,
) -> SmStatus {
    guarded(|| {
        if g.is_null() || m.is_null() {
            return fail(SmStatus::SmUsage, "graph and measure must not be null");
        }
        let graph = &(*g).inner;
        let mu = (*m).inner.normalize();
        let policy = match req_str(policy, "policy") {
            Ok(s) => s,
            Err(st) => return st,
        };
        let policy = match MatchingPolicy::parse(policy) {
            Ok(p) => p,
            Err(e) => return fail(SmStatus::SmUsage, e.to_string()),
        };
        match sim::simulate_general_replicated(graph, &mu, policy, steps, seed, replications) {
            Ok((est, slope)) => {
                emit_json(out_json, report::simulate_json(graph, &est, &mu, slope));
                SmStatus::SmOk
            }
            Err(e) => fail(error_status(&e), e.to_string()),
        }
    })
}

/// Simulates the extended bipartite model with the product arrival law of
/// the two marginal files (`node value` lines; normalized internally).
///
/// # Safety
/// Handles and strings must be valid.
#[no_mangle]
pub unsafe extern "C" fn sm_simulate_bipartite(
    g: *const SmGraph,
    marginal1: *const c_char,
    marginal2: *const c_char,
    policy: *const c_char,
    steps: u64,
    seed: u64,
    out_json: *mut *mut c_char,
) -> SmStatus {
    guarded(|| {
        if g.is_null() {
            return fail(SmStatus::SmUsage, "graph must not be null");
        }
        let graph = &(*g).inner;
        let m1 = match req_str(marginal1, "marginal1") {
            Ok(s) => s,
            Err(st) => return st,
        };
        let m2 = match req_str(marginal2, "marginal2") {
            Ok(s) => s,
            Err(st) => return st,
        };
        let policy = match req_str(policy, "policy") {
            Ok(s) => s,
            Err(st) => return st,
        };
        let policy = match MatchingPolicy::parse(policy) {
            Ok(p) => p,
            Err(e) => return fail(SmStatus::SmUsage, e.to_string()),
        };
        let run = || -> Result<serde_json::Value, Error> {
            let m1 = parse_side(m1, graph)?;
            let m2 = parse_side(m2, graph)?;
            let law = PairArrivalLaw::product(graph, m1, m2)?;
            let (est, slope) =
                sim_bipartite::simulate_bipartite_replicated(graph, &law, policy, steps, seed, 1)?;
            Ok(report::simulate_bipartite_json(graph, &est, &law, slope))
        };
        match run() {
            Ok(value) => {
                emit_json(out_json, value);
                SmStatus::SmOk
            }
            Err(e) => fail(error_status(&e), e.to_string()),
        }
    })
}

fn parse_side(text: &str, g: &Multigraph) -> Result<BTreeMap<usize, Rat>, Error> {
    let mut out: BTreeMap<usize, Rat> = BTreeMap::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::input(format!("expected `node value`, got {line:?}")));
        }
        let i = g.node_index(tokens[0])?;
        let v = Rat::parse(tokens[1]).map_err(Error::Input)?;
        if !v.is_positive() {
            return Err(Error::input("marginal values must be positive"));
        }
        if out.insert(i, v).is_some() {
            return Err(Error::input(format!("duplicate node {:?}", tokens[0])));
        }
    }
    let total: Rat = out.values().sum();
    if !total.is_positive() {
        return Err(Error::input("empty marginal"));
    }
    Ok(out.into_iter().map(|(i, v)| (i, &v / &total)).collect())
}
