//! C interface to divstats.
//!
//! A link is created from a [`DsConfig`] and used through an opaque
//! `DsLink*`. Every call returns a [`DsStatus`]; on failure the message is
//! available from [`ds_last_error`] on the same thread. Results are written
//! through out-pointers only on success.

use divstats::analytic::{
    afd, level_crossing_rate, outage_probability, sinr_pdf, AfdFlag, AnalyticError,
};
use divstats::model::{derive, Regime, SystemConfig};
use divstats::specfun::QuadratureSpec;
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsStatus {
    Ok = 0,
    NullPointer = 1,
    /// The link parameters are invalid.
    InvalidConfig = 2,
    /// An argument is outside the domain of the statistic.
    Domain = 3,
    /// A series or integral did not converge.
    Numerical = 4,
    /// Internal error; the call had no effect.
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsRegime {
    General = 0,
    InterferenceLimited = 1,
    NoiseLimited = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsAfdFlag {
    Regular = 0,
    ZeroThreshold = 1,
    /// Outage is positive but the crossing rate underflows; the value is +inf.
    Unbounded = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsStatistic {
    Outage = 0,
    Lcr = 1,
    Afd = 2,
    Pdf = 3,
}

/// Link parameters; powers share one arbitrary unit, Dopplers are in Hz.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DsConfig {
    pub m_s: u32,
    pub m_i: u32,
    pub omega_s: f64,
    pub omega_i: f64,
    pub sigma2: f64,
    pub n: u32,
    pub f_m0: f64,
    pub f_mi: f64,
}

/// Opaque link handle.
pub struct DsLink {
    cfg: SystemConfig,
    spec: QuadratureSpec,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn analytic_status(e: &AnalyticError) -> DsStatus {
    match e {
        AnalyticError::Model(_) => DsStatus::InvalidConfig,
        AnalyticError::Domain(_) | AnalyticError::Regime { .. } => DsStatus::Domain,
        _ => DsStatus::Numerical,
    }
}

/// Runs `f`, recording any error message and turning panics into
/// `DsStatus::Panic`.
fn guard(f: impl FnOnce() -> Result<(), (DsStatus, String)>) -> DsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            DsStatus::Ok
        }
        Ok(Err((s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            DsStatus::Panic
        }
    }
}

fn link_ref<'a>(link: *const DsLink) -> Result<&'a DsLink, (DsStatus, String)> {
    // SAFETY: non-null handles come from ds_link_new and stay valid until ds_link_free.
    unsafe { link.as_ref() }.ok_or((DsStatus::NullPointer, "null link handle".into()))
}

fn check_out<T>(p: *mut T, name: &str) -> Result<(), (DsStatus, String)> {
    if p.is_null() {
        Err((DsStatus::NullPointer, format!("null {name}")))
    } else {
        Ok(())
    }
}

fn eval(link: &DsLink, stat: DsStatistic, z: f64) -> Result<f64, AnalyticError> {
    match stat {
        DsStatistic::Outage => outage_probability(z, &link.cfg, &link.spec),
        DsStatistic::Lcr => level_crossing_rate(z, &link.cfg),
        DsStatistic::Afd => {
            let t = afd(z, &link.cfg, &link.spec)?;
            Ok(if t.flag == AfdFlag::Unbounded { f64::INFINITY } else { t.value })
        }
        DsStatistic::Pdf => sinr_pdf(z, &link.cfg),
    }
}

/// Validates `config` and stores a new handle in `*out`.
///
/// # Safety
/// `config` must point to a `DsConfig` and `out` to writable storage.
#[no_mangle]
pub unsafe extern "C" fn ds_link_new(config: *const DsConfig, out: *mut *mut DsLink) -> DsStatus {
    guard(|| {
        check_out(out, "out pointer")?;
        let c = unsafe { config.as_ref() }.ok_or((DsStatus::NullPointer, "null config".to_string()))?;
        let cfg = SystemConfig {
            m_s: c.m_s,
            m_i: c.m_i,
            omega_s: c.omega_s,
            omega_i: c.omega_i,
            sigma2: c.sigma2,
            n: c.n,
            f_m0: c.f_m0,
            f_mi: c.f_mi,
        };
        cfg.validate().map_err(|e| (DsStatus::InvalidConfig, e.to_string()))?;
        let link = Box::new(DsLink { cfg, spec: QuadratureSpec::default() });
        unsafe { *out = Box::into_raw(link) };
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `link` must be null or a handle from `ds_link_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ds_link_free(link: *mut DsLink) {
    if !link.is_null() {
        drop(unsafe { Box::from_raw(link) });
    }
}

/// μ, c and the operating regime of the link. Any out-pointer may be null.
///
/// # Safety
/// `link` must be a live handle; non-null out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_link_derived(
    link: *const DsLink,
    mu: *mut f64,
    c: *mut f64,
    regime: *mut DsRegime,
) -> DsStatus {
    guard(|| {
        let l = link_ref(link)?;
        let d = derive(&l.cfg).map_err(|e| (DsStatus::InvalidConfig, e.to_string()))?;
        unsafe {
            if !mu.is_null() {
                *mu = d.mu;
            }
            if !c.is_null() {
                *c = d.c;
            }
            if !regime.is_null() {
                *regime = match d.regime {
                    Regime::General => DsRegime::General,
                    Regime::InterferenceLimited => DsRegime::InterferenceLimited,
                    Regime::NoiseLimited => DsRegime::NoiseLimited,
                };
            }
        }
        Ok(())
    })
}

/// One statistic at SINR threshold `z`: outage probability, crossing rate
/// (1/s), fade duration (s, +inf when unbounded) or SINR density.
///
/// # Safety
/// `link` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ds_eval(link: *const DsLink, statistic: DsStatistic, z: f64, out: *mut f64) -> DsStatus {
    guard(|| {
        let l = link_ref(link)?;
        check_out(out, "out pointer")?;
        let v = eval(l, statistic, z).map_err(|e| (analytic_status(&e), e.to_string()))?;
        unsafe { *out = v };
        Ok(())
    })
}

/// Average fade duration at `z` with its boundary flag.
///
/// # Safety
/// `link` must be a live handle; `out` and `flag` writable.
#[no_mangle]
pub unsafe extern "C" fn ds_afd(link: *const DsLink, z: f64, out: *mut f64, flag: *mut DsAfdFlag) -> DsStatus {
    guard(|| {
        let l = link_ref(link)?;
        check_out(out, "out pointer")?;
        check_out(flag, "flag pointer")?;
        let t = afd(z, &l.cfg, &l.spec).map_err(|e| (analytic_status(&e), e.to_string()))?;
        unsafe {
            *out = if t.flag == AfdFlag::Unbounded { f64::INFINITY } else { t.value };
            *flag = match t.flag {
                AfdFlag::Regular => DsAfdFlag::Regular,
                AfdFlag::ZeroThreshold => DsAfdFlag::ZeroThreshold,
                AfdFlag::Unbounded => DsAfdFlag::Unbounded,
            };
        }
        Ok(())
    })
}

/// Evaluates `statistic` at `len` thresholds. Points that fail are NaN in
/// `out` and the first failure's status is returned; the rest are filled.
///
/// # Safety
/// `link` must be a live handle; `z` and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ds_sweep(
    link: *const DsLink,
    statistic: DsStatistic,
    z: *const f64,
    len: usize,
    out: *mut f64,
) -> DsStatus {
    guard(|| {
        let l = link_ref(link)?;
        if len == 0 {
            return Ok(());
        }
        if z.is_null() || out.is_null() {
            return Err((DsStatus::NullPointer, "null threshold or output array".into()));
        }
        let zs = unsafe { std::slice::from_raw_parts(z, len) };
        let out = unsafe { std::slice::from_raw_parts_mut(out, len) };
        let mut first: Option<(DsStatus, String)> = None;
        for (o, &zi) in out.iter_mut().zip(zs) {
            *o = match eval(l, statistic, zi) {
                Ok(v) => v,
                Err(e) => {
                    first.get_or_insert_with(|| (analytic_status(&e), format!("z = {zi}: {e}")));
                    f64::NAN
                }
            };
        }
        first.map_or(Ok(()), Err)
    })
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ds_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ds_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
