//! Exact engine for Walters-class potentials on the binary full shift.
//!
//! Everything here reduces to three series shapes in the log domain,
//! each closed analytically past a finite horizon:
//!
//! - plain:   `1 + sum_{j>=1} exp(beta*(s_{q+1}+...+s_{q+j}) - j p)`
//! - from:    `sum_{j>=n} exp(beta*(s_2+...+s_j) - j p)`
//! - counted: `sum_{j>=n} (j-n+1) exp(beta*(s_2+...+s_j) - j p)`
//!
//! Once the partial sums have settled onto the geometric tail, the
//! remaining terms form an exact geometric (or arithmetico-geometric)
//! series in `exp(-p)`; the closure is evaluated with `exp_m1`-based
//! primitives so that pressures as small as `exp(-75)` keep full relative
//! accuracy. At `beta = 50` the explicit horizon is about 60 terms.
//!
//! The pressure solves the scalar consistency equation
//! `2 p = beta (b + d) + log D_a(p) + log D_c(p)` (with `D` the plain
//! series at offset 1), obtained by evaluating the eigenvalue equation of
//! the transfer operator at the all-zeros fixed point. The root is
//! bracketed in `log p`, which keeps relative accuracy when the root is
//! tiny.

use crate::numerics::{ln_one_minus_exp_neg, lse2, lse_slice, softplus, LogAcc};
use crate::potential::{classify, GeometricTailSequence, PointClass, PotentialError, WaltersPotential};
use crate::shift_space::{shift, EPPoint};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WaltersError {
    #[error("inverse temperature must be nonnegative, got {0}")]
    NegativeBeta(f64),
    #[error("series require a strictly positive pressure argument, got {0}")]
    NonPositivePressure(f64),
    #[error("pressure root bracketing failed (residual does not change sign)")]
    NoBracket,
    #[error(
        "potential lies on a regime boundary (equality in the defining tail inequalities); \
         the deviation function is not determined there"
    )]
    BoundaryRegime,
    #[error("cylinder index must be at least 1")]
    EmptyRunCylinder,
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

/// Which of the two strict tail inequalities holds, if any.
///
/// `AsymALessCSide`: `sum a < b + d + sum c` (deviation positive at the
/// all-zeros fixed point); `AsymCLessASide` is the mirror image;
/// `Symmetric`: both reversed strictly, deviation zero at both fixed
/// points. Exact equality is rejected as a boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WaltersRegime {
    AsymALessCSide,
    AsymCLessASide,
    Symmetric,
}

pub fn regime(f: &WaltersPotential) -> Result<WaltersRegime, WaltersError> {
    let sum_a = f.a_seq().tail_sum(1);
    let sum_c = f.c_seq().tail_sum(1);
    let bd = f.coeff_b() + f.coeff_d();
    if sum_a == bd + sum_c || sum_c == bd + sum_a {
        return Err(WaltersError::BoundaryRegime);
    }
    if sum_a < bd + sum_c {
        Ok(WaltersRegime::AsymALessCSide)
    } else if sum_c < bd + sum_a {
        Ok(WaltersRegime::AsymCLessASide)
    } else {
        Ok(WaltersRegime::Symmetric)
    }
}

/// A log-domain series value with its truncation diagnostics.
#[derive(Clone, Copy, Debug)]
pub struct SeriesValue {
    pub log_value: f64,
    pub terms_used: usize,
    /// Guaranteed relative truncation error of the analytic closure.
    pub tail_bound: f64,
}

const TAIL_TOLERANCE: f64 = 1e-13;
const MAX_EXPLICIT_TERMS: usize = 200_000;

/// Smallest horizon `J >= lo` such that replacing the remaining partial
/// sums by their limit changes terms by a relative factor below the
/// tolerance.
fn horizon(seq: &GeometricTailSequence, beta: f64, lo: u32) -> u32 {
    let mut j = lo.max(1);
    while beta * seq.tail_sum(j).abs() > TAIL_TOLERANCE {
        j += 1;
        if j as usize > MAX_EXPLICIT_TERMS {
            break;
        }
    }
    j
}

/// `log(1 + sum_{j>=1} exp(beta*(s_{q+1}+...+s_{q+j}) - j p))`.
pub fn series_plain_log(
    seq: &GeometricTailSequence,
    beta: f64,
    p: f64,
    q: u32,
) -> Result<SeriesValue, WaltersError> {
    if !(p > 0.0) {
        return Err(WaltersError::NonPositivePressure(p));
    }
    assert!(q >= 1, "series offset must be at least 1");
    let big_j = horizon(seq, beta, 0);
    let s_inf = seq.tail_sum(q);
    let mut terms = Vec::with_capacity(big_j as usize + 2);
    terms.push(0.0);
    let mut partial = 0.0;
    for j in 1..=big_j {
        partial += seq.value(q + j);
        terms.push(beta * partial - j as f64 * p);
    }
    // sum_{j>J} exp(beta s_inf) x^j = exp(beta s_inf) x^(J+1) / (1-x)
    let closure = beta * s_inf - (big_j as f64 + 1.0) * p - ln_one_minus_exp_neg(p);
    terms.push(closure);
    Ok(SeriesValue {
        log_value: lse_slice(&terms),
        terms_used: big_j as usize,
        tail_bound: (beta * seq.tail_sum(q + big_j).abs()).exp_m1(),
    })
}

/// `log(sum_{j>=n} exp(beta*(s_2+...+s_j) - j p))` with the convention
/// that the `j = 1` partial sum is empty.
pub fn series_from_log(
    seq: &GeometricTailSequence,
    beta: f64,
    p: f64,
    n: u32,
) -> Result<SeriesValue, WaltersError> {
    if !(p > 0.0) {
        return Err(WaltersError::NonPositivePressure(p));
    }
    assert!(n >= 1, "series start must be at least 1");
    let j0 = horizon(seq, beta, n.saturating_sub(1));
    let full = seq.tail_sum(1);
    let mut terms = Vec::with_capacity((j0 + 2).saturating_sub(n) as usize);
    let mut partial = partial_sum_from_2(seq, n);
    for j in n..=j0 {
        terms.push(beta * partial - j as f64 * p);
        partial += seq.value(j + 1);
    }
    let closure = beta * full - (j0 as f64 + 1.0) * p - ln_one_minus_exp_neg(p);
    terms.push(closure);
    Ok(SeriesValue {
        log_value: lse_slice(&terms),
        terms_used: terms.len() - 1,
        tail_bound: (beta * seq.tail_sum(j0).abs()).exp_m1(),
    })
}

/// `log(sum_{j>=n} (j-n+1) exp(beta*(s_2+...+s_j) - j p))`.
pub fn series_counted_log(
    seq: &GeometricTailSequence,
    beta: f64,
    p: f64,
    n: u32,
) -> Result<SeriesValue, WaltersError> {
    if !(p > 0.0) {
        return Err(WaltersError::NonPositivePressure(p));
    }
    assert!(n >= 1, "series start must be at least 1");
    let j0 = horizon(seq, beta, n.saturating_sub(1));
    let full = seq.tail_sum(1);
    let mut terms = Vec::with_capacity((j0 + 2).saturating_sub(n) as usize);
    let mut partial = partial_sum_from_2(seq, n);
    for j in n..=j0 {
        let weight = (j - n + 1) as f64;
        terms.push(weight.ln() + beta * partial - j as f64 * p);
        partial += seq.value(j + 1);
    }
    // sum_{j>J} (j-n+1) x^j = x^(J+1) [ (J+2-n)/(1-x) + x/(1-x)^2 ]
    let lnw = ln_one_minus_exp_neg(p);
    let bracket = lse2(((j0 + 2 - n) as f64).ln() - lnw, -p - 2.0 * lnw);
    let closure = beta * full - (j0 as f64 + 1.0) * p + bracket;
    terms.push(closure);
    Ok(SeriesValue {
        log_value: lse_slice(&terms),
        terms_used: terms.len() - 1,
        tail_bound: (beta * seq.tail_sum(j0).abs()).exp_m1(),
    })
}

/// `s_2 + ... + s_j` (empty for `j = 1`).
fn partial_sum_from_2(seq: &GeometricTailSequence, j: u32) -> f64 {
    let mut sum = 0.0;
    for i in 2..=j {
        sum += seq.value(i);
    }
    sum
}

/// Residual of the pressure consistency equation at candidate `p`.
pub fn consistency_residual(f: &WaltersPotential, beta: f64, p: f64) -> Result<f64, WaltersError> {
    let da = series_plain_log(f.a_seq(), beta, p, 1)?.log_value;
    let dc = series_plain_log(f.c_seq(), beta, p, 1)?.log_value;
    Ok(2.0 * p - beta * (f.coeff_b() + f.coeff_d()) - da - dc)
}

/// Topological pressure `P(beta f)` by bisection in `log p`.
///
/// The residual tends to minus infinity as `p -> 0+` and is strictly
/// positive at `p = log 2` for `beta > 0`, so a sign change is
/// guaranteed for any valid potential. At `beta = 0` the root is exactly
/// `log 2`.
pub fn pressure_w(f: &WaltersPotential, beta: f64) -> Result<f64, WaltersError> {
    if beta < 0.0 {
        return Err(WaltersError::NegativeBeta(beta));
    }
    let ln2 = std::f64::consts::LN_2;
    if beta == 0.0 {
        return Ok(ln2);
    }
    let hi_res = consistency_residual(f, beta, ln2)?;
    if hi_res == 0.0 {
        return Ok(ln2);
    }
    if hi_res < 0.0 {
        return Err(WaltersError::NoBracket);
    }
    let mut hi_u = ln2.ln();
    let mut lo_u = hi_u - 2.0;
    let mut step = 2.0;
    loop {
        if consistency_residual(f, beta, lo_u.exp())? < 0.0 {
            break;
        }
        hi_u = lo_u;
        step *= 2.0;
        lo_u -= step;
        if lo_u < -720.0 {
            return Err(WaltersError::NoBracket);
        }
    }
    while hi_u - lo_u > 1e-13 {
        let mid = 0.5 * (hi_u + lo_u);
        if consistency_residual(f, beta, mid.exp())? < 0.0 {
            lo_u = mid;
        } else {
            hi_u = mid;
        }
    }
    Ok((0.5 * (hi_u + lo_u)).exp())
}

/// `log H_beta` on a run-cylinder class, with `H` the eigenfunction
/// normalized to 1 at the all-zeros fixed point.
pub fn eigenfunction_w(
    f: &WaltersPotential,
    beta: f64,
    class: PointClass,
) -> Result<f64, WaltersError> {
    let p = pressure_w(f, beta)?;
    eigenfunction_w_at(f, beta, p, class)
}

/// As [`eigenfunction_w`], with the pressure supplied by the caller to
/// avoid repeated root solves.
pub fn eigenfunction_w_at(
    f: &WaltersPotential,
    beta: f64,
    p: f64,
    class: PointClass,
) -> Result<f64, WaltersError> {
    match class {
        PointClass::ZeroFix => Ok(0.0),
        PointClass::OneFix => {
            let series = series_plain_log(f.a_seq(), beta, p, 1)?;
            Ok(beta * f.coeff_b() - p + series.log_value)
        }
        PointClass::ZeroRun(q) => {
            let series = series_plain_log(f.a_seq(), beta, p, q)?;
            Ok(ln_one_minus_exp_neg(p) + series.log_value)
        }
        PointClass::OneRun(q) => {
            let one_fix = eigenfunction_w_at(f, beta, p, PointClass::OneFix)?;
            let series = series_plain_log(f.c_seq(), beta, p, q)?;
            Ok(one_fix + ln_one_minus_exp_neg(p) + series.log_value)
        }
    }
}

/// The `S` ratios controlling the masses of the constant-run cylinders.
#[derive(Clone, Debug)]
pub struct SValues {
    pub log_s0: f64,
    pub log_s1: f64,
    /// `(n, log S_0^n)` for each requested `n >= 2`.
    pub log_s0_n: Vec<(u32, f64)>,
    pub log_s1_n: Vec<(u32, f64)>,
}

pub fn s_values(f: &WaltersPotential, beta: f64, ns: &[u32]) -> Result<SValues, WaltersError> {
    let p = pressure_w(f, beta)?;
    s_values_at(f, beta, p, ns)
}

pub fn s_values_at(
    f: &WaltersPotential,
    beta: f64,
    p: f64,
    ns: &[u32],
) -> Result<SValues, WaltersError> {
    let da = series_plain_log(f.a_seq(), beta, p, 1)?.log_value;
    let dc = series_plain_log(f.c_seq(), beta, p, 1)?.log_value;
    let s0 = p + series_counted_log(f.a_seq(), beta, p, 1)?.log_value - da;
    let s1 = p + series_counted_log(f.c_seq(), beta, p, 1)?.log_value - dc;
    let mut s0n = Vec::with_capacity(ns.len());
    let mut s1n = Vec::with_capacity(ns.len());
    for &n in ns {
        assert!(n >= 2, "S^n variants are defined for n >= 2");
        s0n.push((n, p + series_counted_log(f.a_seq(), beta, p, n)?.log_value - da));
        s1n.push((n, p + series_counted_log(f.c_seq(), beta, p, n)?.log_value - dc));
    }
    Ok(SValues {
        log_s0: s0,
        log_s1: s1,
        log_s0_n: s0n,
        log_s1_n: s1n,
    })
}

/// A run cylinder of the binary shift.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunCylinder {
    /// `[0^n]`
    Zeros(u32),
    /// `[1^n]`
    Ones(u32),
    /// `[0^j 1]` (`j = 1` is `[01]`)
    ZeroRunThenOne(u32),
    /// `[1^j 0]`
    OneRunThenZero(u32),
}

impl std::fmt::Display for RunCylinder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunCylinder::Zeros(n) => write!(f, "[0^{n}]"),
            RunCylinder::Ones(n) => write!(f, "[1^{n}]"),
            RunCylinder::ZeroRunThenOne(j) => write!(f, "[0^{j}1]"),
            RunCylinder::OneRunThenZero(j) => write!(f, "[1^{j}0]"),
        }
    }
}

/// `log mu_beta` of a run cylinder, by the closed forms
/// `mu([0^n]) = S_0^n / (S_0 + S_1)`, `mu([01]) = mu([10]) = 1/(S_0+S_1)`
/// and the one-step recursion for `[0^j 1]`, `[1^j 0]`.
pub fn mu_w(f: &WaltersPotential, beta: f64, cyl: RunCylinder) -> Result<f64, WaltersError> {
    let p = pressure_w(f, beta)?;
    mu_w_at(f, beta, p, cyl)
}

pub fn mu_w_at(
    f: &WaltersPotential,
    beta: f64,
    p: f64,
    cyl: RunCylinder,
) -> Result<f64, WaltersError> {
    check_cyl(cyl)?;
    let sv = s_values_at(f, beta, p, &[])?;
    let denom = lse2(sv.log_s0, sv.log_s1);
    match cyl {
        RunCylinder::Zeros(n) => {
            let da = series_plain_log(f.a_seq(), beta, p, 1)?.log_value;
            Ok(p + series_counted_log(f.a_seq(), beta, p, n)?.log_value - da - denom)
        }
        RunCylinder::Ones(n) => {
            let dc = series_plain_log(f.c_seq(), beta, p, 1)?.log_value;
            Ok(p + series_counted_log(f.c_seq(), beta, p, n)?.log_value - dc - denom)
        }
        RunCylinder::ZeroRunThenOne(j) => {
            if j == 1 {
                return Ok(-denom);
            }
            let h_j = series_plain_log(f.a_seq(), beta, p, j)?.log_value;
            let h_1 = series_plain_log(f.a_seq(), beta, p, 1)?.log_value;
            Ok(-denom + beta * partial_sum_from_2(f.a_seq(), j) + h_j - h_1 - (j as f64 - 1.0) * p)
        }
        RunCylinder::OneRunThenZero(j) => {
            if j == 1 {
                return Ok(-denom);
            }
            let h_j = series_plain_log(f.c_seq(), beta, p, j)?.log_value;
            let h_1 = series_plain_log(f.c_seq(), beta, p, 1)?.log_value;
            Ok(-denom + beta * partial_sum_from_2(f.c_seq(), j) + h_j - h_1 - (j as f64 - 1.0) * p)
        }
    }
}

/// `log nu_beta` of a run cylinder, with `nu` the eigenmeasure of the
/// unnormalized transfer operator. Follows from the exact one-step
/// recursions `nu([0^j 1]) = exp(beta a_j - P) nu([0^{j-1} 1])`,
/// `nu([01]) = exp(beta b - P) nu([1])`, `nu([10]) = exp(beta d - P) nu([0])`
/// and `nu([0]) + nu([1]) = 1`.
pub fn nu_w(f: &WaltersPotential, beta: f64, cyl: RunCylinder) -> Result<f64, WaltersError> {
    let p = pressure_w(f, beta)?;
    nu_w_at(f, beta, p, cyl)
}

pub fn nu_w_at(
    f: &WaltersPotential,
    beta: f64,
    p: f64,
    cyl: RunCylinder,
) -> Result<f64, WaltersError> {
    check_cyl(cyl)?;
    let pf_a1 = series_from_log(f.a_seq(), beta, p, 1)?.log_value;
    let pf_c1 = series_from_log(f.c_seq(), beta, p, 1)?.log_value;
    // nu([0]) = nu([01]) e^p PF_a(1); nu([1]) = e^{beta d} nu([01]) PF_a(1) e^p PF_c(1)
    let ln_nu01 = -(p + pf_a1) - softplus(beta * f.coeff_d() + pf_c1);
    let ln_nu10 = beta * f.coeff_d() + ln_nu01 + p + pf_a1;
    match cyl {
        RunCylinder::Zeros(n) => Ok(ln_nu01 + p + series_from_log(f.a_seq(), beta, p, n)?.log_value),
        RunCylinder::Ones(n) => Ok(ln_nu10 + p + series_from_log(f.c_seq(), beta, p, n)?.log_value),
        RunCylinder::ZeroRunThenOne(j) => {
            Ok(ln_nu01 + beta * partial_sum_from_2(f.a_seq(), j) - (j as f64 - 1.0) * p)
        }
        RunCylinder::OneRunThenZero(j) => {
            Ok(ln_nu10 + beta * partial_sum_from_2(f.c_seq(), j) - (j as f64 - 1.0) * p)
        }
    }
}

fn check_cyl(cyl: RunCylinder) -> Result<(), WaltersError> {
    let idx = match cyl {
        RunCylinder::Zeros(n) | RunCylinder::Ones(n) => n,
        RunCylinder::ZeroRunThenOne(j) | RunCylinder::OneRunThenZero(j) => j,
    };
    if idx == 0 {
        Err(WaltersError::EmptyRunCylinder)
    } else {
        Ok(())
    }
}

/// Exponential growth rate `A` of the pressure: the three-case closed
/// form in the tail sums; the cases agree where they overlap.
pub fn limit_a(f: &WaltersPotential) -> f64 {
    let sum_a = f.a_seq().tail_sum(1);
    let sum_c = f.c_seq().tail_sum(1);
    let bd = f.coeff_b() + f.coeff_d();
    if sum_a <= bd + sum_c {
        bd + sum_c
    } else if sum_c <= bd + sum_a {
        bd + sum_a
    } else {
        0.5 * bd + 0.5 * sum_a + 0.5 * sum_c
    }
}

/// Zero-temperature limit `U` of `(1/beta) log H_beta` on a run class.
/// `U` is a calibrated subaction normalized to 0 at the all-zeros fixed
/// point. (In the symmetric regime one can add `d/2 + (sum c)/2` for a
/// symbol-symmetric display; the coboundary `U - U o sigma` is the same,
/// so the unnormalized form is used throughout.)
pub fn limit_u(f: &WaltersPotential, class: PointClass) -> f64 {
    let a = limit_a(f);
    match class {
        PointClass::ZeroFix => 0.0,
        PointClass::OneFix => {
            let sum_a = f.a_seq().tail_sum(1);
            f.coeff_b() + (sum_a - a).max(0.0)
        }
        PointClass::ZeroRun(q) => a.max(f.a_seq().tail_sum(q)),
        PointClass::OneRun(q) => {
            limit_u(f, PointClass::OneFix) + a.max(f.c_seq().tail_sum(q))
        }
    }
}

/// Pointwise nonnegative cocycle `R_+ = -f - U + U o sigma`.
pub fn r_plus_w(f: &WaltersPotential, p: &EPPoint) -> Result<f64, WaltersError> {
    let here = classify(p)?;
    let next = classify(&shift(p))?;
    Ok(-f.class_value(here) - limit_u(f, here) + limit_u(f, next))
}

/// Deviation values at the two fixed points for a strict regime.
pub fn fixed_point_deviations(f: &WaltersPotential) -> Result<(f64, f64), WaltersError> {
    let reg = regime(f)?;
    let sum_a = f.a_seq().tail_sum(1);
    let sum_c = f.c_seq().tail_sum(1);
    Ok(match reg {
        WaltersRegime::AsymALessCSide => (limit_a(f) - sum_a, 0.0),
        WaltersRegime::AsymCLessASide => (0.0, limit_a(f) - sum_c),
        WaltersRegime::Symmetric => (0.0, 0.0),
    })
}

/// Closed-form deviation function at an eventually periodic point:
/// the cocycle summed over the preperiod plus the anchor at the fixed
/// tail, `+infinity` for any other periodic tail (each extra symbol
/// alternation carries strictly positive cocycle cost per period).
pub fn deviation_w(f: &WaltersPotential, point: &EPPoint) -> Result<f64, WaltersError> {
    let (i_zero, i_one) = fixed_point_deviations(f)?;
    let mut total = 0.0;
    let mut cur = point.clone();
    for _ in 0..point.preperiod().len() {
        total += r_plus_w(f, &cur)?;
        cur = shift(&cur);
    }
    if cur.period().len() == 1 {
        let anchor = if cur.period()[0] == 0 { i_zero } else { i_one };
        Ok(total + anchor)
    } else {
        Ok(f64::INFINITY)
    }
}

/// `R_+^infinity`: the full forward cocycle sum. Finite exactly when the
/// periodic tail is a fixed point (it carries zero cocycle); any other
/// tail accumulates a strictly positive amount per period.
pub fn r_plus_infinity_w(f: &WaltersPotential, point: &EPPoint) -> Result<f64, WaltersError> {
    let mut total = 0.0;
    let mut cur = point.clone();
    for _ in 0..point.preperiod().len() {
        total += r_plus_w(f, &cur)?;
        cur = shift(&cur);
    }
    if cur.period().len() == 1 {
        return Ok(total);
    }
    let mut cycle = 0.0;
    for _ in 0..cur.period().len() {
        cycle += r_plus_w(f, &cur)?;
        cur = shift(&cur);
    }
    if cycle.abs() <= 1e-12 {
        Ok(total)
    } else {
        Ok(f64::INFINITY)
    }
}

/// `g_beta` at an eventually periodic point from the closed forms:
/// `beta f + log H - log H o sigma - P(beta f)`.
pub fn log_g_at_point(
    f: &WaltersPotential,
    beta: f64,
    p: f64,
    point: &EPPoint,
) -> Result<f64, WaltersError> {
    let here = classify(point)?;
    let next = classify(&shift(point))?;
    Ok(beta * f.class_value(here) + eigenfunction_w_at(f, beta, p, here)?
        - eigenfunction_w_at(f, beta, p, next)?
        - p)
}

/// Residual of the eigenvalue equation evaluated at a fixed point:
/// `| log(lambda H(s^inf)) - log sum_a e^{beta f(a s^inf)} H(a s^inf) |`.
pub fn eigen_identity_residual(
    f: &WaltersPotential,
    beta: f64,
    at_one: bool,
) -> Result<f64, WaltersError> {
    let p = pressure_w(f, beta)?;
    let (lhs, branch0, branch1);
    if at_one {
        lhs = p + eigenfunction_w_at(f, beta, p, PointClass::OneFix)?;
        // preimages of 1^inf: 0.1^inf in [01], 1^inf itself
        branch0 = beta * f.coeff_b() + eigenfunction_w_at(f, beta, p, PointClass::ZeroRun(1))?;
        branch1 = eigenfunction_w_at(f, beta, p, PointClass::OneFix)?;
    } else {
        lhs = p; // lambda * H(0^inf) with H(0^inf) = 1
        branch0 = 0.0;
        branch1 = beta * f.coeff_d() + eigenfunction_w_at(f, beta, p, PointClass::OneRun(1))?;
    }
    let mut acc = LogAcc::new();
    acc.add(branch0);
    acc.add(branch1);
    Ok((lhs - acc.value()).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::shift_space::EPPoint;

    const LN2: f64 = std::f64::consts::LN_2;

    fn pt(pre: &[u8], per: &[u8]) -> EPPoint {
        EPPoint::new(pre.to_vec(), per.to_vec(), &fixtures::binary_space()).unwrap()
    }

    #[test]
    fn plain_series_examples() {
        let f = fixtures::w1();
        // beta = 0: log(1 + sum 2^-j) = log 2 for p = log 2.
        let v = series_plain_log(f.a_seq(), 0.0, LN2, 1).unwrap();
        assert!((v.log_value - LN2).abs() < 1e-14);
        assert_eq!(v.tail_bound, 0.0);

        // Zero sequence: log(e^p / (e^p - 1)).
        let zero = GeometricTailSequence::pure(0.0, 0.5).unwrap();
        let p = 0.37;
        let v = series_plain_log(&zero, 3.0, p, 1).unwrap();
        let expect = (p.exp() / (p.exp() - 1.0)).ln();
        assert!((v.log_value - expect).abs() < 1e-13);

        // Convergence diagnostic at beta = 10.
        let p10 = pressure_w(&f, 10.0).unwrap();
        let v = series_plain_log(f.a_seq(), 10.0, p10, 1).unwrap();
        assert!(v.log_value.is_finite());
        assert!(v.tail_bound <= 1e-12);
    }

    #[test]
    fn counted_series_examples() {
        let f = fixtures::w1();
        // beta = 0, n = 1, p = log 2: sum j 2^-j = 2.
        let v = series_counted_log(f.a_seq(), 0.0, LN2, 1).unwrap();
        assert!((v.log_value - 2.0f64.ln()).abs() < 1e-13);

        // W1 c-sequence diagnostics at beta = 20, n = 3.
        let p20 = pressure_w(&f, 20.0).unwrap();
        let v = series_counted_log(f.c_seq(), 20.0, p20, 3).unwrap();
        assert!(v.tail_bound <= 1e-12);
    }

    #[test]
    fn pressure_at_zero_temperature_is_log2() {
        for f in [fixtures::w1(), fixtures::w2()] {
            assert_eq!(pressure_w(&f, 0.0).unwrap(), LN2);
        }
    }

    #[test]
    fn pressure_consistency_residual_is_tiny() {
        for f in [fixtures::w1(), fixtures::w2()] {
            for &beta in &[0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0] {
                let p = pressure_w(&f, beta).unwrap();
                assert!(p > 0.0 && p < LN2, "pressure out of range at beta={beta}");
                let r = consistency_residual(&f, beta, p).unwrap().abs();
                assert!(r <= 1e-12, "residual {r} at beta={beta}");
            }
        }
    }

    #[test]
    fn eigenfunction_examples() {
        let f = fixtures::w1();
        assert_eq!(eigenfunction_w(&f, 1.0, PointClass::ZeroFix).unwrap(), 0.0);
        // Small beta: H tends to the constant function 1.
        for class in [
            PointClass::OneFix,
            PointClass::ZeroRun(1),
            PointClass::ZeroRun(3),
            PointClass::OneRun(2),
        ] {
            let v = eigenfunction_w(&f, 1e-7, class).unwrap();
            assert!(v.abs() < 1e-5, "log H = {v} for {class:?}");
        }
    }

    #[test]
    fn eigen_identity_holds_at_both_fixed_points() {
        for f in [fixtures::w1(), fixtures::w2(), fixtures::w1_mirror()] {
            for &beta in &[0.5, 2.0, 10.0, 30.0] {
                assert!(eigen_identity_residual(&f, beta, false).unwrap() < 1e-10);
                assert!(eigen_identity_residual(&f, beta, true).unwrap() < 1e-10);
            }
        }
    }

    #[test]
    fn s_values_at_zero_temperature() {
        let f = fixtures::w1();
        let sv = s_values(&f, 0.0, &[]).unwrap();
        assert!((sv.log_s0 - LN2).abs() < 1e-12);
        assert!((sv.log_s1 - LN2).abs() < 1e-12);
    }

    #[test]
    fn mu_examples() {
        let f = fixtures::w1();
        let m01 = mu_w(&f, 0.0, RunCylinder::ZeroRunThenOne(1)).unwrap();
        assert!((m01 - 0.25f64.ln()).abs() < 1e-12);
        for &beta in &[0.0, 0.5, 3.0, 12.0] {
            let m0 = mu_w(&f, beta, RunCylinder::Zeros(1)).unwrap();
            let m1 = mu_w(&f, beta, RunCylinder::Ones(1)).unwrap();
            assert!(lse2(m0, m1).abs() < 1e-12, "mass defect at beta={beta}");
        }
    }

    #[test]
    fn mu_run_decomposition_is_consistent() {
        // mu([0]) = sum_j mu([0^j 1]).
        let f = fixtures::w1();
        for &beta in &[0.5, 1.0, 2.0, 5.0] {
            let m0 = mu_w(&f, beta, RunCylinder::Zeros(1)).unwrap();
            let mut acc = LogAcc::new();
            for j in 1..400 {
                acc.add(mu_w(&f, beta, RunCylinder::ZeroRunThenOne(j)).unwrap());
            }
            assert!(
                (acc.value() - m0).abs() < 1e-10,
                "decomposition defect {} at beta={beta}",
                (acc.value() - m0).abs()
            );
        }
    }

    #[test]
    fn nu_is_a_probability_and_consistent() {
        let f = fixtures::w1();
        for &beta in &[0.5, 2.0, 8.0, 30.0] {
            let p = pressure_w(&f, beta).unwrap();
            let n0 = nu_w_at(&f, beta, p, RunCylinder::Zeros(1)).unwrap();
            let n1 = nu_w_at(&f, beta, p, RunCylinder::Ones(1)).unwrap();
            assert!(lse2(n0, n1).abs() < 1e-11, "nu mass defect at beta={beta}");
            // nu([01]) = e^{beta b - P} nu([1])
            let n01 = nu_w_at(&f, beta, p, RunCylinder::ZeroRunThenOne(1)).unwrap();
            let rhs = beta * f.coeff_b() - p + n1;
            assert!((n01 - rhs).abs() < 1e-10, "nu recursion defect at beta={beta}");
        }
    }

    #[test]
    fn limit_a_cases() {
        assert!((limit_a(&fixtures::w1()) + 0.7).abs() < 1e-15);
        assert!((limit_a(&fixtures::w2()) + 1.5).abs() < 1e-15);
        assert!((limit_a(&fixtures::w1_mirror()) + 0.7).abs() < 1e-15);
    }

    #[test]
    fn limit_u_values_on_fixtures() {
        let f = fixtures::w1();
        assert_eq!(limit_u(&f, PointClass::ZeroFix), 0.0);
        assert!((limit_u(&f, PointClass::ZeroRun(1)) + 0.7).abs() < 1e-15);
        assert!((limit_u(&f, PointClass::ZeroRun(2)) + 0.5).abs() < 1e-15);
        assert!((limit_u(&f, PointClass::OneRun(1)) + 0.6).abs() < 1e-15);
        assert!((limit_u(&f, PointClass::OneFix) + 0.1).abs() < 1e-15);

        let g = fixtures::w2();
        assert_eq!(limit_u(&g, PointClass::OneFix), 0.0);
        assert!((limit_u(&g, PointClass::ZeroRun(1)) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn vlimit_matches_theorem_displays_in_each_regime() {
        // Strict asymmetric side: U(0^q1) = max{b+d+sum c, tail_a(q)},
        // U(1^inf) = b, U(1^q0) = b + tail_c(q).
        let f = fixtures::w1();
        let a = limit_a(&f);
        for q in 1..=20 {
            assert_eq!(
                limit_u(&f, PointClass::ZeroRun(q)),
                a.max(f.a_seq().tail_sum(q))
            );
            assert_eq!(
                limit_u(&f, PointClass::OneRun(q)),
                f.coeff_b() + f.c_seq().tail_sum(q)
            );
        }
        assert_eq!(limit_u(&f, PointClass::OneFix), f.coeff_b());

        // Mirror regime: U(0^q1) = tail_a(q), U(1^inf) = -d,
        // U(1^q0) = -d + max{A, tail_c(q)}.
        let m = fixtures::w1_mirror();
        let am = limit_a(&m);
        for q in 1..=20 {
            assert_eq!(limit_u(&m, PointClass::ZeroRun(q)), m.a_seq().tail_sum(q));
            assert_eq!(
                limit_u(&m, PointClass::OneRun(q)),
                -m.coeff_d() + am.max(m.c_seq().tail_sum(q))
            );
        }
        assert_eq!(limit_u(&m, PointClass::OneFix), -m.coeff_d());

        // Symmetric regime: U(0^q1) = tail_a(q),
        // U(1^inf) = b/2 - d/2 + (sum a)/2 - (sum c)/2,
        // U(1^q0) = U(1^inf) + tail_c(q).
        let g = fixtures::w2();
        let u1 = 0.5 * g.coeff_b() - 0.5 * g.coeff_d() + 0.5 * g.a_seq().tail_sum(1)
            - 0.5 * g.c_seq().tail_sum(1);
        assert_eq!(limit_u(&g, PointClass::OneFix), u1);
        for q in 1..=20 {
            assert_eq!(limit_u(&g, PointClass::ZeroRun(q)), g.a_seq().tail_sum(q));
            assert_eq!(
                limit_u(&g, PointClass::OneRun(q)),
                u1 + g.c_seq().tail_sum(q)
            );
        }
    }

    #[test]
    fn regime_classification() {
        assert_eq!(regime(&fixtures::w1()).unwrap(), WaltersRegime::AsymALessCSide);
        assert_eq!(regime(&fixtures::w1_mirror()).unwrap(), WaltersRegime::AsymCLessASide);
        assert_eq!(regime(&fixtures::w2()).unwrap(), WaltersRegime::Symmetric);
        // Exact boundary: sum a = b + d + sum c.
        let boundary = WaltersPotential::new(
            -0.25,
            -0.25,
            GeometricTailSequence::pure(-2.0, 0.5).unwrap(),
            GeometricTailSequence::pure(-1.0, 0.5).unwrap(),
            0.5,
        )
        .unwrap();
        assert_eq!(regime(&boundary).unwrap_err(), WaltersError::BoundaryRegime);
        assert_eq!(
            deviation_w(&boundary, &pt(&[], &[0])).unwrap_err(),
            WaltersError::BoundaryRegime
        );
    }

    #[test]
    fn deviation_values_on_w1() {
        let f = fixtures::w1();
        let dv = |p: &EPPoint| deviation_w(&f, p).unwrap();
        assert!((dv(&pt(&[], &[0])) - 0.3).abs() < 1e-12);
        assert_eq!(dv(&pt(&[], &[1])), 0.0);
        assert!((dv(&pt(&[0], &[1])) - 0.7).abs() < 1e-12);
        assert!((dv(&pt(&[0, 0], &[1])) - 1.0).abs() < 1e-12);
        assert_eq!(dv(&pt(&[], &[0, 1])), f64::INFINITY);
        // r_plus along the 001^inf orbit: 0.3 then 0.7.
        assert!((r_plus_w(&f, &pt(&[0, 0], &[1])).unwrap() - 0.3).abs() < 1e-12);
        assert!((r_plus_w(&f, &pt(&[0], &[1])).unwrap() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn deviation_values_on_w2() {
        let f = fixtures::w2();
        assert_eq!(deviation_w(&f, &pt(&[], &[0])).unwrap(), 0.0);
        assert_eq!(deviation_w(&f, &pt(&[], &[1])).unwrap(), 0.0);
        assert_eq!(deviation_w(&f, &pt(&[], &[0, 1])).unwrap(), f64::INFINITY);
        // I = R_+^infinity in the symmetric regime.
        for p in [pt(&[0], &[1]), pt(&[1], &[0]), pt(&[0, 0], &[1]), pt(&[1, 0, 0], &[1])] {
            assert_eq!(
                deviation_w(&f, &p).unwrap(),
                r_plus_infinity_w(&f, &p).unwrap()
            );
        }
    }

    #[test]
    fn deviation_cocycle_relation() {
        for f in [fixtures::w1(), fixtures::w2(), fixtures::w1_mirror()] {
            for p in [
                pt(&[0], &[1]),
                pt(&[1], &[0]),
                pt(&[0, 0], &[1]),
                pt(&[1, 1, 0], &[1]),
                pt(&[0, 1, 1], &[0]),
            ] {
                let i_p = deviation_w(&f, &p).unwrap();
                let i_sp = deviation_w(&f, &shift(&p)).unwrap();
                let r = r_plus_w(&f, &p).unwrap();
                assert!(r >= -1e-12);
                assert!((i_p - r - i_sp).abs() < 1e-10);
            }
        }
    }
}
