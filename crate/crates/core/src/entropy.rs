//! Partial trajectories, inertness, and intrinsic entropy.
//!
//! For an endomorphism `f` and a subgroup `H`, the partial trajectory is
//! `T_n(f, H) = H + f(H) + ... + f^{n-1}(H)`. `H` is inert when
//! `(H + f(H)) / H` is finite, and then the intrinsic entropy of `f` with
//! respect to `H` is the limit of `log |T_n / H| / n`.
//!
//! The limit is certified exactly only when the increments
//! `|T_{n+1} / T_n|` settle on a constant `c` for a full stability window,
//! in which case the value is `log c`. Otherwise the result is
//! [`EntropyResult::Undetermined`] with floating-point bounds taken over the
//! observed tail.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::endo::{power, Endo, EndoPower};
use crate::error::{Error, Result};
use crate::groups::{quotient_index, Ambient, Element, FgSubgroup};
use crate::linalg::Cardinality;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct EntropyOptions {
    /// Largest `n` for which `T_n` is computed.
    pub max_n: usize,
    /// Number of equal trailing increments required to certify a value.
    pub stability_window: usize,
    /// Largest trajectory level searched for an inert `T_m(f, F)`.
    pub max_m: usize,
}

impl Default for EntropyOptions {
    fn default() -> Self {
        EntropyOptions { max_n: 64, stability_window: 4, max_m: 16 }
    }
}

/// The observed growth of `T_n(f, H)` over `H` for `n = 1..=N`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GrowthTrace {
    pub subgroup: FgSubgroup,
    /// `indices[n-1] = |T_n / H|`.
    pub indices: Vec<Cardinality>,
    /// `increments[n-1] = |T_{n+1} / T_n|`.
    pub increments: Vec<Cardinality>,
    /// Smallest `n` with `T_{n+1} = T_n`, if reached.
    pub saturated_at: Option<usize>,
}

impl GrowthTrace {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// The constant value of the last `window` increments, if they agree.
    fn stable_increment(&self, window: usize) -> Option<&BigUint> {
        if window == 0 || self.increments.len() < window {
            return None;
        }
        let tail = &self.increments[self.increments.len() - window..];
        let first = tail[0].as_finite()?;
        tail.iter().all(|c| c.as_finite() == Some(first)).then_some(first)
    }
}

#[derive(Clone, PartialEq, Debug)]
pub enum EntropyResult {
    /// `log c`; `ExactLog(1)` is entropy zero.
    ExactLog(BigUint),
    Undetermined {
        trace: GrowthTrace,
        lower: f64,
        upper: f64,
    },
}

impl EntropyResult {
    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            EntropyResult::ExactLog(c) => Some(c),
            EntropyResult::Undetermined { .. } => None,
        }
    }

    pub fn into_exact(self) -> Result<BigUint> {
        match self {
            EntropyResult::ExactLog(c) => Ok(c),
            undetermined => Err(Error::NotStabilized(Box::new(undetermined))),
        }
    }

    /// `k · log c = log c^k`, exact. `None` when undetermined.
    pub fn times(&self, k: u32) -> Option<EntropyResult> {
        self.exact().map(|c| EntropyResult::ExactLog(c.pow(k)))
    }

    /// Natural-log value; the midpoint of the bounds when undetermined.
    pub fn value(&self) -> f64 {
        match self {
            EntropyResult::ExactLog(c) => ln(c),
            EntropyResult::Undetermined { lower, upper, .. } => (lower + upper) / 2.0,
        }
    }
}

/// Natural logarithm of a positive big integer, accurate for any size.
pub fn ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return x.to_f64().expect("fits").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("fits");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InertCertificate {
    /// `|(H + f(H)) / H|`.
    pub defect: Cardinality,
    pub verdict: bool,
}

/// `H + f(H) + ... + f^{n-1}(H)`.
pub fn partial_trajectory(f: &EndoPower, h: &FgSubgroup, n: usize) -> Result<FgSubgroup> {
    if n == 0 {
        return Err(Error::InvalidArgument("trajectory length must be at least 1".into()));
    }
    f.ambient().expect_same(&h.ambient())?;
    let mut layer = h.generators();
    let mut gens = layer.clone();
    for _ in 1..n {
        layer = apply_all(f, &layer)?;
        gens.extend(layer.iter().cloned());
    }
    FgSubgroup::generated(h.ambient(), &gens)
}

fn apply_all(f: &EndoPower, xs: &[Element]) -> Result<Vec<Element>> {
    xs.iter().map(|x| f.apply(x)).filter(|r| !matches!(r, Ok(x) if x.is_zero())).collect()
}

pub fn inert_certificate(f: &EndoPower, h: &FgSubgroup) -> Result<InertCertificate> {
    f.ambient().expect_same(&h.ambient())?;
    let grown = h.sum(&f.image(h)?)?;
    let defect = quotient_index(&grown, h)?;
    Ok(InertCertificate { verdict: defect.is_finite(), defect })
}

/// Steps through `T_1, T_2, ...` adding one image layer at a time.
struct TrajectoryWalk<'a> {
    f: &'a EndoPower,
    current: FgSubgroup,
    layer: Vec<Element>,
}

impl<'a> TrajectoryWalk<'a> {
    fn new(f: &'a EndoPower, h: &FgSubgroup) -> Self {
        TrajectoryWalk { f, current: h.clone(), layer: h.generators() }
    }

    fn advance(&mut self) -> Result<&FgSubgroup> {
        self.layer = apply_all(self.f, &self.layer)?;
        self.current = self.current.extend(&self.layer)?;
        Ok(&self.current)
    }
}

/// Builds the trace up to `max_n`, stopping early once `stop` holds.
fn trace_with(f: &EndoPower, h: &FgSubgroup, max_n: usize, stop: impl Fn(&GrowthTrace) -> bool) -> Result<GrowthTrace> {
    if max_n == 0 {
        return Err(Error::InvalidArgument("max_n must be at least 1".into()));
    }
    let mut trace = GrowthTrace {
        subgroup: h.clone(),
        indices: vec![Cardinality::one()],
        increments: Vec::new(),
        saturated_at: None,
    };
    let mut walk = TrajectoryWalk::new(f, h);
    for n in 1..max_n {
        if stop(&trace) {
            break;
        }
        let prev = walk.current.clone();
        let next = walk.advance()?;
        if *next == prev {
            trace.saturated_at = Some(n);
            let last = trace.indices[n - 1].clone();
            trace.indices.resize(max_n, last);
            trace.increments.resize(max_n - 1, Cardinality::one());
            break;
        }
        let increment = quotient_index(next, &prev)?;
        if !increment.is_finite() {
            return Err(Error::InternalInvariantViolation(format!(
                "|T_{} / T_{}| is infinite for an inert subgroup",
                n + 1,
                n
            )));
        }
        trace.indices.push(quotient_index(next, h)?);
        trace.increments.push(increment);
    }
    Ok(trace)
}

/// `|T_n / H|` and `|T_{n+1} / T_n|` for `n = 1..=max_n`. Requires `H` inert.
pub fn growth_trace(f: &EndoPower, h: &FgSubgroup, max_n: usize) -> Result<GrowthTrace> {
    if !inert_certificate(f, h)?.verdict {
        return Err(Error::NotInert);
    }
    trace_with(f, h, max_n, |_| false)
}

pub fn entropy_wrt(f: &EndoPower, h: &FgSubgroup, opts: &EntropyOptions) -> Result<EntropyResult> {
    if !inert_certificate(f, h)?.verdict {
        return Err(Error::NotInert);
    }
    let window = opts.stability_window;
    let trace = trace_with(f, h, opts.max_n, |t| t.stable_increment(window).is_some())?;
    if trace.saturated_at.is_some() {
        return Ok(EntropyResult::ExactLog(BigUint::one()));
    }
    if let Some(c) = trace.stable_increment(window) {
        return Ok(EntropyResult::ExactLog(c.clone()));
    }
    let tail_start = trace.increments.len().saturating_sub(window.max(1));
    let logs: Vec<f64> =
        trace.increments[tail_start..].iter().map(|c| c.as_finite().map_or(f64::INFINITY, ln)).collect();
    let (lower, upper) = if logs.is_empty() {
        (0.0, f64::INFINITY)
    } else {
        (logs.iter().copied().fold(f64::INFINITY, f64::min), logs.iter().copied().fold(f64::NEG_INFINITY, f64::max))
    };
    Ok(EntropyResult::Undetermined { trace, lower, upper })
}

/// Smallest `m <= max_m` such that `T_m(f, F)` is inert.
pub fn find_inert_trajectory_level(
    f: &EndoPower,
    fgen: &FgSubgroup,
    max_m: usize,
) -> Result<Option<(usize, FgSubgroup)>> {
    f.ambient().expect_same(&fgen.ambient())?;
    let mut walk = TrajectoryWalk::new(f, fgen);
    for m in 1..=max_m {
        if m > 1 {
            walk.advance()?;
        }
        if inert_certificate(f, &walk.current)?.verdict {
            return Ok(Some((m, walk.current.clone())));
        }
    }
    Ok(None)
}

/// Entropy of `f` restricted to the invariant subgroup `T(f, F)`, computed
/// at the first inert level `H = T_m(f, F)`.
pub fn entropy_on_trajectory(f: &Endo, fgen: &FgSubgroup, opts: &EntropyOptions) -> Result<EntropyResult> {
    let phi = EndoPower::from(f.clone());
    let (_, h) =
        find_inert_trajectory_level(&phi, fgen, opts.max_m)?.ok_or(Error::InertLevelNotFound { max_m: opts.max_m })?;
    entropy_wrt(&phi, &h, opts)
}

/// The subgroup `H = T_{m+k-1}(f, F)` with `m` the first inert level, after
/// checking that it is both `f`-inert and `f^k`-inert.
pub fn power_base_subgroup(f: &Endo, k: u32, fgen: &FgSubgroup, max_m: usize) -> Result<(usize, FgSubgroup)> {
    let phi = EndoPower::from(f.clone());
    let phi_k = power(f, k)?;
    let (m, _) = find_inert_trajectory_level(&phi, fgen, max_m)?.ok_or(Error::InertLevelNotFound { max_m })?;
    let h = partial_trajectory(&phi, fgen, m + k as usize - 1)?;
    if !inert_certificate(&phi, &h)?.verdict {
        return Err(Error::InternalInvariantViolation(format!("T_{}(f, F) is not f-inert", m + k as usize - 1)));
    }
    if !inert_certificate(&phi_k, &h)?.verdict {
        return Err(Error::InternalInvariantViolation(format!("T_{}(f, F) is not f^{k}-inert", m + k as usize - 1)));
    }
    Ok((m, h))
}

/// Entropy of `f^k` restricted to `T(f, F)`.
pub fn entropy_power_on_trajectory(
    f: &Endo,
    k: u32,
    fgen: &FgSubgroup,
    opts: &EntropyOptions,
) -> Result<EntropyResult> {
    let (_, h) = power_base_subgroup(f, k, fgen, opts.max_m)?;
    entropy_wrt(&power(f, k)?, &h, opts)
}

/// With `H = T_{m+k-1}(f, F)`, whether `T_n(f^k, H) = T_{kn-k+1}(f, H)`.
pub fn trajectory_identity_check(f: &Endo, k: u32, m: usize, fgen: &FgSubgroup, n: usize) -> Result<bool> {
    if k == 0 || m == 0 || n == 0 {
        return Err(Error::InvalidArgument("k, m and n must all be at least 1".into()));
    }
    let phi = EndoPower::from(f.clone());
    let k_us = k as usize;
    let h = partial_trajectory(&phi, fgen, m + k_us - 1)?;
    let lhs = partial_trajectory(&power(f, k)?, &h, n)?;
    let rhs = partial_trajectory(&phi, &h, k_us * n - k_us + 1)?;
    Ok(lhs == rhs)
}

#[derive(Clone, PartialEq, Debug)]
pub struct Lemma311aReport {
    /// Entropy with respect to `H`.
    pub left: EntropyResult,
    /// Entropy with respect to `T_k(f, H)`.
    pub right: EntropyResult,
    /// `None` unless both sides are exact.
    pub equal: Option<bool>,
}

/// Compares the entropy of `f` at `H` and at `T_k(f, H)`.
pub fn lemma_311a_check(f: &EndoPower, h: &FgSubgroup, k: usize, opts: &EntropyOptions) -> Result<Lemma311aReport> {
    let left = entropy_wrt(f, h, opts)?;
    let h_k = partial_trajectory(f, h, k)?;
    let right = entropy_wrt(f, &h_k, opts)?;
    let equal = match (left.exact(), right.exact()) {
        (Some(a), Some(b)) => Some(a == b),
        _ => None,
    };
    Ok(Lemma311aReport { left, right, equal })
}

#[derive(Clone, PartialEq, Debug)]
pub struct LogLawReport {
    pub k: u32,
    pub ent_phi: EntropyResult,
    pub ent_phi_k: EntropyResult,
    /// `k · ent_phi`, present when `ent_phi` is exact.
    pub k_times_ent_phi: Option<EntropyResult>,
    /// `None` when either entropy is undetermined.
    pub law_holds: Option<bool>,
}

/// Checks `ent(f^k) = k · ent(f)` on the trajectory generated by `F`.
pub fn log_law_report(f: &Endo, k: u32, fgen: &FgSubgroup, opts: &EntropyOptions) -> Result<LogLawReport> {
    if k == 0 {
        return Err(Error::InvalidExponent(k));
    }
    let ent_phi = entropy_on_trajectory(f, fgen, opts)?;
    let ent_phi_k = entropy_power_on_trajectory(f, k, fgen, opts)?;
    let k_times_ent_phi = ent_phi.times(k);
    let law_holds = match (&k_times_ent_phi, ent_phi_k.exact()) {
        (Some(EntropyResult::ExactLog(a)), Some(b)) => Some(a == b),
        _ => None,
    };
    Ok(LogLawReport { k, ent_phi, ent_phi_k, k_times_ent_phi, law_holds })
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CounterexampleRow {
    pub n: usize,
    /// `|T_n(β², H) / H|`.
    pub index_h: Cardinality,
    /// `|T_n(β², H') / H'|`.
    pub index_h_prime: Cardinality,
}

#[derive(Clone, PartialEq, Debug)]
pub struct CounterexampleReport {
    pub h: FgSubgroup,
    pub h_prime: FgSubgroup,
    /// `(subgroup, exponent, certificate)` for H and H' under β and β².
    pub certificates: Vec<(&'static str, u32, InertCertificate)>,
    pub rows: Vec<CounterexampleRow>,
    pub entropy_h: EntropyResult,
    pub entropy_h_prime: EntropyResult,
    /// True when the two entropies under β² differ.
    pub refuted: bool,
}

/// Number of growth rows checked in [`counterexample_report`].
pub const COUNTEREXAMPLE_ROWS: usize = 8;

/// Right shift β on `⊕ Z/2`, `H = <e_0>`, `H' = T_2(β, H)`: both are β- and
/// β²-inert, `|T_n(β², H)/H| = 2^{n-1}`, `|T_n(β², H')/H'| = 2^{2n-2}`, so
/// the β²-entropies are `log 2` and `log 4`. Any deviation is an error.
pub fn counterexample_report() -> Result<CounterexampleReport> {
    let ambient = Ambient::torsion_sum(2)?;
    let beta = Endo::right_shift(2)?;
    let beta1 = EndoPower::from(beta.clone());
    let beta2 = power(&beta, 2)?;
    let h = FgSubgroup::generated(ambient, &[ambient.unit(0)?])?;
    let h_prime = partial_trajectory(&beta1, &h, 2)?;
    let expected_h_prime = FgSubgroup::generated(ambient, &[ambient.unit(0)?, ambient.unit(1)?])?;
    let mismatch = |what: String| Error::CounterexampleMismatch(what);
    if h_prime != expected_h_prime {
        return Err(mismatch(format!("T_2(β, H) = {h_prime}, expected <e0, e1>")));
    }

    let mut certificates = Vec::new();
    for (name, sub) in [("H", &h), ("H'", &h_prime)] {
        for (k, f) in [(1, &beta1), (2, &beta2)] {
            let cert = inert_certificate(f, sub)?;
            if !cert.verdict {
                return Err(mismatch(format!("{name} is not β^{k}-inert")));
            }
            certificates.push((name, k, cert));
        }
    }

    let trace_h = growth_trace(&beta2, &h, COUNTEREXAMPLE_ROWS)?;
    let trace_hp = growth_trace(&beta2, &h_prime, COUNTEREXAMPLE_ROWS)?;
    let two = BigUint::from(2u32);
    let mut rows = Vec::with_capacity(COUNTEREXAMPLE_ROWS);
    for n in 1..=COUNTEREXAMPLE_ROWS {
        let index_h = trace_h.indices[n - 1].clone();
        let index_h_prime = trace_hp.indices[n - 1].clone();
        let want_h = Cardinality::Finite(two.pow(n as u32 - 1));
        let want_hp = Cardinality::Finite(two.pow(2 * n as u32 - 2));
        if index_h != want_h {
            return Err(mismatch(format!("|T_{n}(β², H)/H| = {index_h}, expected {want_h}")));
        }
        if index_h_prime != want_hp {
            return Err(mismatch(format!("|T_{n}(β², H')/H'| = {index_h_prime}, expected {want_hp}")));
        }
        rows.push(CounterexampleRow { n, index_h, index_h_prime });
    }

    let opts = EntropyOptions::default();
    let entropy_h = entropy_wrt(&beta2, &h, &opts)?;
    let entropy_h_prime = entropy_wrt(&beta2, &h_prime, &opts)?;
    if entropy_h != EntropyResult::ExactLog(two.clone()) {
        return Err(mismatch(format!("ent(β², H) = {entropy_h:?}, expected log 2")));
    }
    if entropy_h_prime != EntropyResult::ExactLog(BigUint::from(4u32)) {
        return Err(mismatch(format!("ent(β², H') = {entropy_h_prime:?}, expected log 4")));
    }
    let refuted = entropy_h != entropy_h_prime;
    Ok(CounterexampleReport { h, h_prime, certificates, rows, entropy_h, entropy_h_prime, refuted })
}
