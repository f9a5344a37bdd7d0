//! C ABI over the `strategic_pricing` solver.
//!
//! Every fallible call returns an [`SpStatus`]. On failure the message is
//! available from [`sp_last_error`] on the same thread. Objects cross the
//! boundary as opaque handles that the caller releases with the matching
//! `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};


use strategic_pricing::continuous::{solve_continuous_pbe, ContinuousParams};
use strategic_pricing::network::{self, MechanismKind, SocialGraph};
use strategic_pricing::pbe::{classify_region, solve_pbe_nonuniform, EquilibriumOutcome};
use strategic_pricing::welfare::welfare_report;
use strategic_pricing::{Error, MarketParams, Region};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    InvalidInput = 3,
    Parse = 4,
    NoBracket = 5,
    UtilityCondition = 6,
    Io = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpRegion {
    I = 1,
    Ii = 2,
    Iii = 3,
    Iv = 4,
    V = 5,
    Skewed = 6,
}

impl From<Region> for SpRegion {
    fn from(r: Region) -> Self {
        match r {
            Region::I => SpRegion::I,
            Region::II => SpRegion::Ii,
            Region::III => SpRegion::Iii,
            Region::IV => SpRegion::Iv,
            Region::V => SpRegion::V,
            Region::Skewed => SpRegion::Skewed,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpMechanism {
    Nlp = 0,
    Ulp = 1,
    Slp = 2,
}

/// Market parameters.
pub struct SpMarket(MarketParams);

/// Solved two-buyer equilibrium.
pub struct SpOutcome(EquilibriumOutcome);

/// Social graph with preferences.
pub struct SpGraph(SocialGraph);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SpWelfare {
    pub revenue_no_learning: f64,
    pub revenue_undisclosed: f64,
    pub revenue_strategic: f64,
    pub payoff_undisclosed: f64,
    pub payoff_strategic: f64,
    pub gain_strategic_vs_no: f64,
    pub loss_awareness: f64,
    pub known_low_gain: f64,
    pub buyer_worse_off: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SpContinuousOutcome {
    pub case_id: u8,
    pub rho_star: f64,
    pub p1_on_signal1: f64,
    pub p1_on_signal0: f64,
    /// Second prices indexed `[signal][first buyer bought]`.
    pub p2: [[f64; 2]; 2],
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SpEstimate {
    pub mean: f64,
    pub std_err: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> SpStatus {
    match e {
        Error::InvalidParameter { .. } => SpStatus::InvalidParameter,
        Error::InvalidInput(_) => SpStatus::InvalidInput,
        Error::Parse { .. } => SpStatus::Parse,
        Error::NoBracket { .. } => SpStatus::NoBracket,
        Error::UtilityCondition(_) => SpStatus::UtilityCondition,
        Error::Io(_) => SpStatus::Io,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (SpStatus, String)>) -> SpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SpStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SpStatus::Panic
        }
    }
}

fn lift(e: Error) -> (SpStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (SpStatus, String) {
    (SpStatus::NullPointer, format!("`{name}` is null"))
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, (SpStatus, String)> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn write<T>(out: *mut T, value: T, name: &str) -> Result<(), (SpStatus, String)> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

/// Message of the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn sp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates market parameters.
///
/// # Safety
/// `out` must be null or point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn sp_market_new(
    v_h: f64,
    v_l: f64,
    l: f64,
    c: f64,
    r: f64,
    alpha: f64,
    out: *mut *mut SpMarket,
) -> SpStatus {
    guard(|| {
        let p = MarketParams::with_all(v_h, v_l, l, c, r, alpha).map_err(lift)?;
        write(out, Box::into_raw(Box::new(SpMarket(p))), "out")
    })
}

/// # Safety
/// `market` must be null or a handle from [`sp_market_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sp_market_free(market: *mut SpMarket) {
    if !market.is_null() {
        drop(Box::from_raw(market));
    }
}

/// Region of the uniform-prior model.
///
/// # Safety
/// `out` must be null or point to writable storage for one `SpRegion`.
#[no_mangle]
pub unsafe extern "C" fn sp_classify_region(v_h: f64, v_l: f64, l: f64, out: *mut SpRegion) -> SpStatus {
    guard(|| {
        let r = classify_region(v_h, v_l, l).map_err(lift)?;
        write(out, r.into(), "out")
    })
}

/// Solves the two-buyer equilibrium.
///
/// # Safety
/// `market` must be a live handle; `out` must point to storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn sp_solve(market: *const SpMarket, out: *mut *mut SpOutcome) -> SpStatus {
    guard(|| {
        let m = deref(market, "market")?;
        let o = solve_pbe_nonuniform(&m.0).map_err(lift)?;
        write(out, Box::into_raw(Box::new(SpOutcome(o))), "out")
    })
}

/// # Safety
/// `outcome` must be null or a handle from [`sp_solve`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sp_outcome_free(outcome: *mut SpOutcome) {
    if !outcome.is_null() {
        drop(Box::from_raw(outcome));
    }
}

/// # Safety
/// `outcome` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_outcome_region(outcome: *const SpOutcome, out: *mut SpRegion) -> SpStatus {
    guard(|| write(out, deref(outcome, "outcome")?.0.region.into(), "out"))
}

/// # Safety
/// `outcome` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_outcome_rho(outcome: *const SpOutcome, out: *mut f64) -> SpStatus {
    guard(|| write(out, deref(outcome, "outcome")?.0.rho_star, "out"))
}

/// Seller mixing weight; `has_beta` is false where the seller plays pure.
///
/// # Safety
/// `outcome` must be a live handle; `beta` and `has_beta` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_outcome_beta(outcome: *const SpOutcome, beta: *mut f64, has_beta: *mut bool) -> SpStatus {
    guard(|| {
        let b = deref(outcome, "outcome")?.0.beta_star;
        write(has_beta, b.is_some(), "has_beta")?;
        write(beta, b.unwrap_or(0.0), "beta")
    })
}

/// # Safety
/// `outcome` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_outcome_belief_s(outcome: *const SpOutcome, out: *mut f64) -> SpStatus {
    guard(|| write(out, deref(outcome, "outcome")?.0.belief_s, "out"))
}

/// Revenue and payoff comparison under the uniform prior.
///
/// # Safety
/// `market` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_welfare(market: *const SpMarket, out: *mut SpWelfare) -> SpStatus {
    guard(|| {
        let w = welfare_report(&deref(market, "market")?.0).map_err(lift)?;
        write(
            out,
            SpWelfare {
                revenue_no_learning: w.revenue_no_learning,
                revenue_undisclosed: w.revenue_undisclosed,
                revenue_strategic: w.revenue_strategic,
                payoff_undisclosed: w.payoff_undisclosed,
                payoff_strategic: w.payoff_strategic,
                gain_strategic_vs_no: w.gain_strategic_vs_no,
                loss_awareness: w.loss_awareness,
                known_low_gain: w.known_low_gain,
                buyer_worse_off: w.buyer_worse_off,
            },
            "out",
        )
    })
}

/// Equilibrium with valuations uniform on `[0, v_bar]`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_continuous_solve(v_bar: f64, l: f64, out: *mut SpContinuousOutcome) -> SpStatus {
    guard(|| {
        let p = ContinuousParams::new(v_bar, l).map_err(lift)?;
        let o = solve_continuous_pbe(&p).map_err(lift)?;
        write(
            out,
            SpContinuousOutcome {
                case_id: o.case_id,
                rho_star: o.rho_star,
                p1_on_signal1: o.p1_on_signal1,
                p1_on_signal0: o.p1_on_signal0,
                p2: [[o.p2(0, false), o.p2(0, true)], [o.p2(1, false), o.p2(1, true)]],
            },
            "out",
        )
    })
}

/// Parses an edge list from a NUL-terminated string.
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_graph_parse(text: *const c_char, out: *mut *mut SpGraph) -> SpStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let s = CStr::from_ptr(text).to_str().map_err(|_| (SpStatus::InvalidInput, "text is not UTF-8".to_string()))?;
        let g = network::load_edge_list_str(s).map_err(lift)?;
        write(out, Box::into_raw(Box::new(SpGraph(g))), "out")
    })
}

/// The bundled 100-node graph.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_graph_bundled(out: *mut *mut SpGraph) -> SpStatus {
    guard(|| write(out, Box::into_raw(Box::new(SpGraph(network::bundled_fixture()))), "out"))
}

/// # Safety
/// `graph` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn sp_graph_free(graph: *mut SpGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// # Safety
/// `graph` must be a live handle; `nodes` and `edges` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_graph_size(graph: *const SpGraph, nodes: *mut usize, edges: *mut usize) -> SpStatus {
    guard(|| {
        let g = &deref(graph, "graph")?.0;
        write(nodes, g.n_nodes(), "nodes")?;
        write(edges, g.n_edges(), "edges")
    })
}

/// Draws preferences in place.
///
/// # Safety
/// `graph` must be a live handle not used concurrently.
#[no_mangle]
pub unsafe extern "C" fn sp_graph_sample_preferences(graph: *mut SpGraph, alpha: f64, seed: u64) -> SpStatus {
    guard(|| {
        let g = graph.as_mut().ok_or_else(|| null("graph"))?;
        g.0 = network::sample_preferences(&g.0, alpha, seed).map_err(lift)?;
        Ok(())
    })
}

/// Mean revenue of one mechanism over `shuffles` replications.
///
/// # Safety
/// `graph` and `market` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sp_mechanism_revenue(
    graph: *const SpGraph,
    market: *const SpMarket,
    mechanism: SpMechanism,
    shuffles: u64,
    seed: u64,
    out: *mut SpEstimate,
) -> SpStatus {
    guard(|| {
        let g = &deref(graph, "graph")?.0;
        let m = &deref(market, "market")?.0;
        let c = network::compare_mechanisms(g, m, shuffles, seed).map_err(lift)?;
        let kind = match mechanism {
            SpMechanism::Nlp => MechanismKind::Nlp,
            SpMechanism::Ulp => MechanismKind::Ulp,
            SpMechanism::Slp => MechanismKind::Slp,
        };
        let e = c.get(kind);
        write(out, SpEstimate { mean: e.mean, std_err: e.std_err }, "out")
    })
}

