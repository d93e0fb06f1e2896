//! Measure representations and the catalog of example distributions.
//!
//! A [`MeasureSpec`] bundles whatever representations a distribution admits:
//! exact rational moments, Jacobi recurrence coefficients (equivalently the
//! continued-fraction data of its Cauchy transform), a Lebesgue density with
//! atoms, closed-form transforms, and/or a free characteristic triplet.
//! Everything is immutable after construction and safe to share across
//! threads.

use std::fmt;
use std::sync::Arc;

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levy::{FreeCharacteristicTriplet, KFunction, LevyMeasure};
use crate::rat::{rat_display, rat_from_f64, rat_i64, rat_parse, rat_to_f64, Rat};

/// Hard default for how many exact moments catalog entries precompute.
pub const DEFAULT_MOMENT_ORDER: usize = 16;

// ---------------------------------------------------------------------------
// Moment sequences
// ---------------------------------------------------------------------------

/// Exact rational moments `m_0, ..., m_N` with `m_0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence {
    entries: Vec<Rat>,
}

impl MomentSequence {
    pub fn new(entries: Vec<Rat>) -> Result<Self> {
        if entries.is_empty() || !entries[0].is_one() {
            return Err(Error::NotAMomentSequence("m_0 must be 1".into()));
        }
        Ok(Self { entries })
    }

    /// Order N (highest moment index stored).
    pub fn order(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn entry(&self, n: usize) -> &Rat {
        &self.entries[n]
    }

    pub fn entries(&self) -> &[Rat] {
        &self.entries
    }

    pub fn truncate(&self, order: usize) -> MomentSequence {
        MomentSequence {
            entries: self.entries[..=order.min(self.order())].to_vec(),
        }
    }

    /// Moment-sequence validity: the Hankel matrices `(m_{i+j})_{0<=i,j<=N}`
    /// must be positive semidefinite. Checked exactly; sequences produced by
    /// formal cumulant inversion need not satisfy this.
    pub fn validate_hankel(&self) -> Result<()> {
        let n = self.order() / 2;
        // reuse the shifted conditional-PD test: with seq[t] = m_{t-1} the
        // matrix (a_{i+j})_{i,j=1..N+1} is exactly (m_{i+j})_{i,j=0..N}
        let mut seq = vec![Rat::zero()];
        seq.extend_from_slice(&self.entries);
        let rep = crate::cumulants::is_conditionally_positive_definite(&seq, n + 1)?;
        if rep.psd {
            Ok(())
        } else {
            Err(Error::NotAMomentSequence(format!(
                "Hankel matrix of order {} is not positive semidefinite",
                n + 1
            )))
        }
    }
}

// ---------------------------------------------------------------------------
// Jacobi coefficients
// ---------------------------------------------------------------------------

/// Closed-form extension rule for recurrence coefficients, so that continued
/// fractions can be truncated adaptively at depths far beyond what is worth
/// storing explicitly.
#[derive(Debug, Clone, PartialEq)]
pub enum JacobiRule {
    /// `alpha_n = alpha` for all n >= 0, `beta_n = beta_p + beta_q * n` for n >= 1.
    Affine { alpha: Rat, beta_p: Rat, beta_q: Rat },
    /// `alpha_0`, then `alpha_n = alpha` for n >= 1; `beta_1`, then `beta_n = beta` for n >= 2.
    TwoPhase { alpha0: Rat, alpha: Rat, beta1: Rat, beta: Rat },
}

impl JacobiRule {
    fn alpha(&self, n: usize) -> Rat {
        match self {
            JacobiRule::Affine { alpha, .. } => alpha.clone(),
            JacobiRule::TwoPhase { alpha0, alpha, .. } => {
                if n == 0 {
                    alpha0.clone()
                } else {
                    alpha.clone()
                }
            }
        }
    }

    fn beta(&self, n: usize) -> Rat {
        debug_assert!(n >= 1);
        match self {
            JacobiRule::Affine { beta_p, beta_q, .. } => beta_p + beta_q * rat_i64(n as i64),
            JacobiRule::TwoPhase { beta1, beta, .. } => {
                if n == 1 {
                    beta1.clone()
                } else {
                    beta.clone()
                }
            }
        }
    }
}

/// Three-term recurrence data `(alpha_n)_{n>=0}`, `(beta_n)_{n>=1}` of the
/// orthogonal polynomials of a measure; equivalently the coefficients of the
/// continued fraction `G(z) = 1/(z - alpha_0 - beta_1/(z - alpha_1 - ...))`.
///
/// `beta` is stored starting at `beta_1`. A finitely supported measure with
/// k atoms stores k alphas and k-1 betas and the recurrence terminates.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiCoefficients {
    alpha: Vec<Rat>,
    beta: Vec<Rat>,
    rule: Option<JacobiRule>,
    /// True when the recurrence genuinely terminates (finitely supported
    /// measure with `alpha.len()` atoms), as opposed to being a truncation
    /// of an infinite one.
    terminating: bool,
}

impl JacobiCoefficients {
    /// Truncated data for a measure whose full recurrence is unknown beyond
    /// the stored depth.
    pub fn explicit(alpha: Vec<Rat>, beta: Vec<Rat>) -> Result<Self> {
        Self::check_lists(&alpha, &beta)?;
        Ok(Self {
            alpha,
            beta,
            rule: None,
            terminating: false,
        })
    }

    /// Complete data for a finitely supported measure (`alpha.len()` atoms,
    /// `alpha.len() - 1` betas).
    pub fn finite_support(alpha: Vec<Rat>, beta: Vec<Rat>) -> Result<Self> {
        Self::check_lists(&alpha, &beta)?;
        if alpha.len() != beta.len() + 1 {
            return Err(Error::ParameterDomain(
                "finite-support data needs one more alpha than beta".into(),
            ));
        }
        Ok(Self {
            alpha,
            beta,
            rule: None,
            terminating: true,
        })
    }

    fn check_lists(alpha: &[Rat], beta: &[Rat]) -> Result<()> {
        if alpha.is_empty() {
            return Err(Error::ParameterDomain("need at least alpha_0".into()));
        }
        if beta.iter().any(|b| !b.is_positive()) {
            return Err(Error::ParameterDomain("all beta_n must be > 0".into()));
        }
        Ok(())
    }

    pub fn from_rule(rule: JacobiRule) -> Result<Self> {
        // Reject rules that would produce a non-positive beta_1 or beta_2.
        let probe = Self {
            alpha: Vec::new(),
            beta: Vec::new(),
            rule: Some(rule),
            terminating: false,
        };
        for n in 1..=2 {
            if let Some(b) = probe.beta(n) {
                if !b.is_positive() {
                    return Err(Error::ParameterDomain(format!(
                        "rule gives beta_{n} <= 0"
                    )));
                }
            }
        }
        Ok(probe)
    }

    /// `alpha_n`, if available (explicit entry or rule).
    pub fn alpha(&self, n: usize) -> Option<Rat> {
        if n < self.alpha.len() {
            Some(self.alpha[n].clone())
        } else {
            self.rule.as_ref().map(|r| r.alpha(n))
        }
    }

    /// `beta_n` for n >= 1, if available.
    pub fn beta(&self, n: usize) -> Option<Rat> {
        debug_assert!(n >= 1);
        if n - 1 < self.beta.len() {
            Some(self.beta[n - 1].clone())
        } else {
            self.rule.as_ref().map(|r| r.beta(n))
        }
    }

    /// Number of (alpha_n, beta_{n+1}) pairs available; `usize::MAX` when a
    /// rule extends the data indefinitely.
    pub fn available_pairs(&self) -> usize {
        if self.rule.is_some() {
            usize::MAX
        } else {
            self.beta.len()
        }
    }

    /// True for terminating recurrences (finitely supported measures).
    pub fn terminates(&self) -> bool {
        self.terminating
    }

    pub fn alpha_f64(&self, n: usize) -> Option<f64> {
        self.alpha(n).map(|r| rat_to_f64(&r))
    }

    pub fn beta_f64(&self, n: usize) -> Option<f64> {
        self.beta(n).map(|r| rat_to_f64(&r))
    }

    pub fn stored_alpha(&self) -> &[Rat] {
        &self.alpha
    }

    pub(crate) fn rule_ref(&self) -> Option<&JacobiRule> {
        self.rule.as_ref()
    }

    pub fn stored_beta(&self) -> &[Rat] {
        &self.beta
    }
}

// ---------------------------------------------------------------------------
// Densities
// ---------------------------------------------------------------------------

/// Support of an absolutely continuous part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Support {
    /// Compact interval `[a, b]`.
    Interval(f64, f64),
    /// The whole line, integrated numerically on `[-truncation, truncation]`
    /// with an analytic tail correction supplied by the evaluator's
    /// `tail_decay` data when present.
    RealLine { truncation: f64 },
}

type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A (sub-)probability density plus a finite list of atoms.
#[derive(Clone)]
pub struct DensitySpec {
    eval: Option<DensityFn>,
    support: Support,
    atoms: Vec<(f64, f64)>,
    /// `Some(c4)` means `density(t) ~ c4 / t^4` as |t| -> oo, used for tail
    /// corrections beyond the truncation radius.
    tail_decay_c4: Option<f64>,
}

impl fmt::Debug for DensitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensitySpec")
            .field("has_density", &self.eval.is_some())
            .field("support", &self.support)
            .field("atoms", &self.atoms)
            .finish()
    }
}

impl DensitySpec {
    pub fn continuous<F>(eval: F, support: Support) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            eval: Some(Arc::new(eval)),
            support,
            atoms: Vec::new(),
            tail_decay_c4: None,
        }
    }

    pub fn atoms_only(atoms: Vec<(f64, f64)>) -> Self {
        Self {
            eval: None,
            support: Support::Interval(0.0, 0.0),
            atoms,
            tail_decay_c4: None,
        }
    }

    pub fn with_atoms(mut self, atoms: Vec<(f64, f64)>) -> Self {
        self.atoms = atoms;
        self
    }

    pub fn with_tail_decay_c4(mut self, c4: f64) -> Self {
        self.tail_decay_c4 = Some(c4);
        self
    }

    pub fn density_at(&self, t: f64) -> f64 {
        match (&self.eval, self.support) {
            (Some(f), Support::Interval(a, b)) => {
                if t >= a && t <= b {
                    f(t)
                } else {
                    0.0
                }
            }
            (Some(f), Support::RealLine { .. }) => f(t),
            (None, _) => 0.0,
        }
    }

    pub fn has_density(&self) -> bool {
        self.eval.is_some()
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn tail_decay_c4(&self) -> Option<f64> {
        self.tail_decay_c4
    }
}

// ---------------------------------------------------------------------------
// Closed-form transform families
// ---------------------------------------------------------------------------

/// Families whose transforms have explicit global formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ClosedForm {
    Semicircle { a: f64, r: f64 },
    FreeMeixner { a: f64, b: f64 },
    FreePoisson { lambda: f64, alpha: f64 },
    Dirac { a: f64 },
}

/// Marker that the measure is an affine image of an Askey-Wimp-Kerov law
/// `mu_c`, unlocking Riccati-based analytic continuation of its transforms:
/// the measure is the law of `scale * X + shift` with `X ~ mu_c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AwkMap {
    pub c: f64,
    pub shift: f64,
    pub scale: f64,
}

// ---------------------------------------------------------------------------
// MeasureSpec
// ---------------------------------------------------------------------------

/// A probability measure on the real line, given in one or more mutually
/// consistent representations.
#[derive(Debug, Clone)]
pub struct MeasureSpec {
    name: String,
    params: Vec<(String, f64)>,
    moments: Option<MomentSequence>,
    jacobi: Option<JacobiCoefficients>,
    density: Option<DensitySpec>,
    closed_form: Option<ClosedForm>,
    triplet: Option<FreeCharacteristicTriplet>,
    awk: Option<AwkMap>,
}

impl MeasureSpec {
    pub fn builder(name: impl Into<String>) -> MeasureSpecBuilder {
        MeasureSpecBuilder {
            spec: MeasureSpec {
                name: name.into(),
                params: Vec::new(),
                moments: None,
                jacobi: None,
                density: None,
                closed_form: None,
                triplet: None,
                awk: None,
            },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[(String, f64)] {
        &self.params
    }

    pub fn moments(&self) -> Option<&MomentSequence> {
        self.moments.as_ref()
    }

    pub fn jacobi(&self) -> Option<&JacobiCoefficients> {
        self.jacobi.as_ref()
    }

    pub fn density(&self) -> Option<&DensitySpec> {
        self.density.as_ref()
    }

    pub fn closed_form(&self) -> Option<ClosedForm> {
        self.closed_form
    }

    pub fn triplet(&self) -> Option<&FreeCharacteristicTriplet> {
        self.triplet.as_ref()
    }

    pub fn awk_map(&self) -> Option<AwkMap> {
        self.awk
    }

    /// True when a Cauchy-transform evaluation path exists (closed form,
    /// Jacobi continued fraction, or density quadrature).
    pub fn supports_cauchy(&self) -> bool {
        self.closed_form.is_some() || self.jacobi.is_some() || self.density.is_some()
    }
}

pub struct MeasureSpecBuilder {
    spec: MeasureSpec,
}

impl MeasureSpecBuilder {
    pub fn param(mut self, key: &str, v: f64) -> Self {
        self.spec.params.push((key.to_string(), v));
        self
    }

    pub fn moments(mut self, m: MomentSequence) -> Self {
        self.spec.moments = Some(m);
        self
    }

    pub fn jacobi(mut self, j: JacobiCoefficients) -> Self {
        self.spec.jacobi = Some(j);
        self
    }

    pub fn density(mut self, d: DensitySpec) -> Self {
        self.spec.density = Some(d);
        self
    }

    pub fn closed_form(mut self, c: ClosedForm) -> Self {
        self.spec.closed_form = Some(c);
        self
    }

    pub fn triplet(mut self, t: FreeCharacteristicTriplet) -> Self {
        self.spec.triplet = Some(t);
        self
    }

    pub fn awk(mut self, m: AwkMap) -> Self {
        self.spec.awk = Some(m);
        self
    }

    pub fn build(self) -> Result<MeasureSpec> {
        let s = &self.spec;
        if s.moments.is_none()
            && s.jacobi.is_none()
            && s.density.is_none()
            && s.closed_form.is_none()
            && s.triplet.is_none()
        {
            return Err(Error::ParameterDomain(format!(
                "measure `{}` has no representation",
                s.name
            )));
        }
        if !s.supports_cauchy() && s.triplet.is_none() {
            return Err(Error::UnsupportedRepresentation(s.name.clone()));
        }
        Ok(self.spec)
    }
}

// ---------------------------------------------------------------------------
// moments <-> Jacobi bridges
// ---------------------------------------------------------------------------

/// Moments from recurrence coefficients: `m_n` is the (1,1) entry of the n-th
/// power of the truncated Jacobi matrix, accumulated as a weighted Motzkin
/// path sum (up-steps weight 1, level-k flats weight alpha_k, down-steps from
/// level k weight beta_k). Exact in rational arithmetic.
pub fn moments_from_jacobi(j: &JacobiCoefficients, order: usize) -> Result<MomentSequence> {
    // A rule extends the data indefinitely and a terminating recurrence is
    // complete by itself; truncated explicit data must be deep enough that
    // no length-`order` Motzkin path runs past it.
    if j.rule.is_none() && !j.terminates() {
        let need = order.div_ceil(2);
        let need_alpha = if order == 0 { 1 } else { (order - 1) / 2 + 1 };
        if j.beta.len() < need || j.alpha.len() < need_alpha {
            return Err(Error::Truncation {
                need,
                have: j.beta.len().min(j.alpha.len()),
            });
        }
    }

    let max_level = order / 2 + 1;
    let mut cur: Vec<Rat> = vec![Rat::zero(); max_level + 2];
    cur[0] = Rat::one();
    let mut out = Vec::with_capacity(order + 1);
    out.push(Rat::one());

    for _ in 1..=order {
        let mut next: Vec<Rat> = vec![Rat::zero(); max_level + 2];
        for k in 0..=max_level {
            if cur[k].is_zero() {
                continue;
            }
            let w = cur[k].clone();
            // flat
            if let Some(a) = j.alpha(k) {
                if !a.is_zero() {
                    next[k] += &w * a;
                }
            }
            // up: allowed only if beta_{k+1} exists (terminating recurrences
            // stop the climb at the top level)
            if j.beta(k + 1).is_some() {
                next[k + 1] += w.clone();
            }
            // down
            if k >= 1 {
                if let Some(b) = j.beta(k) {
                    next[k - 1] += &w * b;
                }
            }
        }
        out.push(next[0].clone());
        cur = next;
    }
    MomentSequence::new(out)
}

/// Recurrence coefficients from moments via the Chebyshev algorithm, exact in
/// rational arithmetic. From `m_0..m_L` it recovers `alpha_0..alpha_A` with
/// `A = floor((L-1)/2)` and `beta_1..beta_B` with `B = floor(L/2)`.
pub fn jacobi_from_moments(m: &MomentSequence) -> Result<JacobiCoefficients> {
    let big_l = m.order();
    if big_l < 1 {
        return Err(Error::NotAMomentSequence(
            "need at least m_0, m_1".into(),
        ));
    }
    let n_alpha = (big_l - 1) / 2 + 1;
    let n_beta = big_l / 2;

    // sigma[k][l] for l in k..=L-k
    let mut sigma_prev: Vec<Rat> = vec![Rat::zero(); big_l + 1]; // k-1 row (k=0 -> zeros)
    let mut sigma_cur: Vec<Rat> = m.entries().to_vec(); // k = 0 row

    let mut alpha: Vec<Rat> = Vec::with_capacity(n_alpha);
    let mut beta: Vec<Rat> = Vec::with_capacity(n_beta);

    alpha.push(m.entry(1).clone()); // alpha_0 = m_1 / m_0, m_0 = 1
    let mut cur_diag = Rat::one(); // sigma_{0,0} = m_0 = 1
    let mut prev_alpha_term = m.entry(1).clone(); // sigma_{0,1}/sigma_{0,0}

    for k in 1..=n_beta {
        let lo = k;
        let hi = big_l - k;
        let mut row: Vec<Rat> = vec![Rat::zero(); big_l + 1];
        let a_km1 = alpha[k - 1].clone();
        let b_km1 = if k == 1 {
            Rat::zero()
        } else {
            beta[k - 2].clone()
        };
        for l in lo..=hi {
            let mut v = sigma_cur[l + 1].clone();
            v -= &a_km1 * &sigma_cur[l];
            if k >= 2 {
                v -= &b_km1 * &sigma_prev[l];
            }
            row[l] = v;
        }
        let diag = row[k].clone();
        if !diag.is_positive() {
            return Err(Error::NotAMomentSequence(format!(
                "Hankel pivot sigma_{{{k},{k}}} = {} is not positive",
                rat_display(&diag)
            )));
        }
        beta.push(&diag / &cur_diag);
        if k < hi {
            let alpha_k = &row[k + 1] / &diag - &prev_alpha_term;
            prev_alpha_term = &row[k + 1] / &diag;
            alpha.push(alpha_k);
        }
        cur_diag = diag;
        sigma_prev = sigma_cur;
        sigma_cur = row;
    }

    debug_assert_eq!(alpha.len(), n_alpha);
    debug_assert_eq!(beta.len(), n_beta);
    JacobiCoefficients::explicit(alpha, beta)
}

// ---------------------------------------------------------------------------
// Parameter records
// ---------------------------------------------------------------------------

/// Plain-text `key=value` parameter record, the CLI-facing way of naming
/// catalog parameters.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamRecord {
    entries: Vec<(String, f64)>,
}

impl ParamRecord {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, v: f64) -> &mut Self {
        self.entries.retain(|(k, _)| k != key);
        self.entries.push((key.to_string(), v));
        self
    }

    pub fn with(mut self, key: &str, v: f64) -> Self {
        self.set(key, v);
        self
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| *v)
    }

    pub fn get_or(&self, key: &str, default: f64) -> f64 {
        self.get(key).unwrap_or(default)
    }

    pub fn require(&self, key: &str) -> Result<f64> {
        self.get(key)
            .ok_or_else(|| Error::ParameterDomain(format!("missing parameter `{key}`")))
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }
}

impl std::str::FromStr for ParamRecord {
    type Err = Error;

    /// Parses `a=0, r=2` style records (commas, whitespace or newlines
    /// between pairs).
    fn from_str(s: &str) -> Result<Self> {
        let mut rec = ParamRecord::new();
        for tok in s.split(|c: char| c == ',' || c.is_whitespace()) {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| Error::Usage(format!("expected key=value, got `{tok}`")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Usage(format!("bad numeric value in `{tok}`")))?;
            rec.set(k.trim(), v);
        }
        Ok(rec)
    }
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

fn exact(x: f64) -> Rat {
    rat_from_f64(x).expect("finite parameter")
}

/// Looks up one of the built-in example distributions, returning the richest
/// representation set available for it.
///
/// Known names: `semicircle`, `free_meixner`, `free_poisson`, `free_gamma`,
/// `free_stable`, `gaussian`, `awk`, `dirac`, `bernoulli`, `student_t3`.
pub fn catalog_lookup(name: &str, params: &ParamRecord) -> Result<MeasureSpec> {
    match name {
        "semicircle" => semicircle(params.get_or("a", 0.0), params.get_or("r", 2.0)),
        "free_meixner" => free_meixner(params.require("a")?, params.require("b")?),
        "free_poisson" => free_poisson(
            params.get_or("lambda", 1.0),
            params.get_or("alpha", 1.0),
        ),
        "free_gamma" => free_gamma(
            params.get_or("c", 1.0),
            params.get_or("alpha", 1.0),
            params.get_or("eta", 0.0),
        ),
        "free_stable" => free_stable(
            params.require("alpha")?,
            params.get_or("c", 1.0),
            params.get_or("cprime", 0.0),
            params.get_or("eta", 0.0),
        ),
        "gaussian" => gaussian(params.get_or("xi", 0.0), params.get_or("sigma2", 1.0)),
        "awk" => awk(params.require("c")?),
        "dirac" => dirac(params.get_or("a", 0.0)),
        "bernoulli" => bernoulli(),
        "student_t3" => student_t3(),
        other => Err(Error::UnknownDistribution(other.to_string())),
    }
}

/// Semicircle law centered at `a` with radius `r`; triplet `(r^2/4, a, 0)`.
pub fn semicircle(a: f64, r: f64) -> Result<MeasureSpec> {
    if !(r > 0.0) {
        return Err(Error::ParameterDomain(format!("semicircle needs r > 0, got {r}")));
    }
    let beta = exact(r) * exact(r) / rat_i64(4);
    let jacobi = JacobiCoefficients::from_rule(JacobiRule::Affine {
        alpha: exact(a),
        beta_p: beta,
        beta_q: Rat::zero(),
    })?;
    let moments = moments_from_jacobi(&jacobi, DEFAULT_MOMENT_ORDER)?;
    let (ca, cr) = (a, r);
    let density = DensitySpec::continuous(
        move |t| {
            // factored edge form avoids cancellation at the endpoints
            let d2 = (t - (ca - cr)) * ((ca + cr) - t);
            if d2 > 0.0 {
                2.0 / (std::f64::consts::PI * cr * cr) * d2.sqrt()
            } else {
                0.0
            }
        },
        Support::Interval(a - r, a + r),
    );
    MeasureSpec::builder("semicircle")
        .param("a", a)
        .param("r", r)
        .jacobi(jacobi)
        .moments(moments)
        .density(density)
        .closed_form(ClosedForm::Semicircle { a, r })
        .triplet(FreeCharacteristicTriplet::new(
            r * r / 4.0,
            a,
            LevyMeasure::zero(),
        )?)
        .build()
}

/// Free Meixner law `mu_{a,b}` (mean 0, variance 1), `b >= -1`.
pub fn free_meixner(a: f64, b: f64) -> Result<MeasureSpec> {
    if b < -1.0 {
        return Err(Error::ParameterDomain(format!(
            "free_meixner needs b >= -1, got {b}"
        )));
    }
    let mut builder = MeasureSpec::builder("free_meixner")
        .param("a", a)
        .param("b", b)
        .closed_form(ClosedForm::FreeMeixner { a, b });

    if b > -1.0 {
        let jacobi = JacobiCoefficients::from_rule(JacobiRule::TwoPhase {
            alpha0: Rat::zero(),
            alpha: exact(a),
            beta1: Rat::one(),
            beta: Rat::one() + exact(b),
        })?;
        let moments = moments_from_jacobi(&jacobi, DEFAULT_MOMENT_ORDER)?;
        builder = builder.jacobi(jacobi).moments(moments);
    }

    if b > 0.0 {
        // Free Levy measure (c = 1 scaling): k(x) = sqrt(4b - (x-a)^2) / (2 pi b |x|)
        // on [a - 2 sqrt(b), a + 2 sqrt(b)]; the drift eta is fixed by kappa_1 = 0.
        let lo = a - 2.0 * b.sqrt();
        let hi = a + 2.0 * b.sqrt();
        let k = KFunction::new(
            move |x: f64| {
                let d2 = (x - lo) * (hi - x);
                if d2 > 0.0 {
                    d2.sqrt() / (2.0 * std::f64::consts::PI * b * x.abs())
                } else {
                    0.0
                }
            },
            Some((lo.min(0.0), hi.max(0.0))),
            4.0 * b >= a * a,
        );
        let nu = LevyMeasure::k_over_abs_x(k);
        let eta = -nu.integrate(|x| if x.abs() > 1.0 { x } else { 0.0 }, 1e-10)?;
        builder = builder.triplet(FreeCharacteristicTriplet::new(0.0, eta, nu)?);
    }

    builder.build()
}

/// Free Poisson (Marchenko-Pastur) law with rate `lambda > 0` and jump `alpha != 0`.
pub fn free_poisson(lambda: f64, alpha: f64) -> Result<MeasureSpec> {
    if !(lambda > 0.0) || alpha == 0.0 {
        return Err(Error::ParameterDomain(format!(
            "free_poisson needs lambda > 0 and alpha != 0, got lambda={lambda} alpha={alpha}"
        )));
    }
    let la = exact(lambda);
    let al = exact(alpha);
    let jacobi = JacobiCoefficients::from_rule(JacobiRule::TwoPhase {
        alpha0: &la * &al,
        alpha: (Rat::one() + &la) * &al,
        beta1: &la * &al * &al,
        beta: &la * &al * &al,
    })?;
    let moments = moments_from_jacobi(&jacobi, DEFAULT_MOMENT_ORDER)?;

    let (l, c) = (lambda, alpha);
    let edge_lo = alpha * (1.0 - lambda.sqrt()).powi(2);
    let edge_hi = alpha * (1.0 + lambda.sqrt()).powi(2);
    let (lo, hi) = if alpha > 0.0 {
        (edge_lo, edge_hi)
    } else {
        (edge_hi, edge_lo)
    };
    let mut atoms = Vec::new();
    if lambda < 1.0 {
        atoms.push((0.0, 1.0 - lambda));
    }
    let density = DensitySpec::continuous(
        move |t| {
            // factored edge form avoids cancellation at the endpoints
            let e_lo = c * (1.0 - l.sqrt()).powi(2);
            let e_hi = c * (1.0 + l.sqrt()).powi(2);
            let d2 = (t - e_lo.min(e_hi)) * (e_lo.max(e_hi) - t);
            if d2 > 0.0 && t != 0.0 {
                d2.sqrt() / (2.0 * std::f64::consts::PI * c.abs() * t)
            } else {
                0.0
            }
        },
        Support::Interval(lo, hi),
    )
    .with_atoms(atoms);

    MeasureSpec::builder("free_poisson")
        .param("lambda", lambda)
        .param("alpha", alpha)
        .jacobi(jacobi)
        .moments(moments)
        .density(density)
        .closed_form(ClosedForm::FreePoisson { lambda, alpha })
        .triplet(FreeCharacteristicTriplet::new(
            0.0,
            lambda * alpha,
            LevyMeasure::atoms(vec![(alpha, lambda)])?,
        )?)
        .build()
}

/// Free gamma law (Bercovici-Pata image of the classical gamma): triplet-only,
/// Levy measure `c e^{-alpha x} / x dx` on `(0, oo)`.
pub fn free_gamma(c: f64, alpha: f64, eta: f64) -> Result<MeasureSpec> {
    if !(c > 0.0) || !(alpha > 0.0) {
        return Err(Error::ParameterDomain(format!(
            "free_gamma needs c > 0 and alpha > 0, got c={c} alpha={alpha}"
        )));
    }
    let k = KFunction::new(
        move |x: f64| if x > 0.0 { c * (-alpha * x).exp() } else { 0.0 },
        Some((0.0, 40.0 / alpha)),
        true,
    );
    MeasureSpec::builder("free_gamma")
        .param("c", c)
        .param("alpha", alpha)
        .param("eta", eta)
        .triplet(FreeCharacteristicTriplet::new(
            0.0,
            eta,
            LevyMeasure::k_over_abs_x(k),
        )?)
        .build()
}

/// Free stable law of index `alpha in (0,2)`: triplet-only, Levy measure
/// `k(x)/|x| dx` with `k(x) = c x^{-alpha}` on the right half line and
/// `c' |x|^{-alpha}` on the left.
pub fn free_stable(alpha: f64, c: f64, cprime: f64, eta: f64) -> Result<MeasureSpec> {
    if !(alpha > 0.0 && alpha < 2.0) || c < 0.0 || cprime < 0.0 || c + cprime == 0.0 {
        return Err(Error::ParameterDomain(format!(
            "free_stable needs alpha in (0,2), c, c' >= 0, c + c' > 0; got alpha={alpha}, c={c}, c'={cprime}"
        )));
    }
    let k = KFunction::new(
        move |x: f64| {
            if x > 0.0 {
                c * x.powf(-alpha)
            } else {
                cprime * (-x).powf(-alpha)
            }
        },
        None,
        true,
    );
    MeasureSpec::builder("free_stable")
        .param("alpha", alpha)
        .param("c", c)
        .param("cprime", cprime)
        .param("eta", eta)
        .triplet(FreeCharacteristicTriplet::new(
            0.0,
            eta,
            LevyMeasure::k_over_abs_x(k),
        )?)
        .build()
}

/// Classical normal law `N(xi, sigma2)`; Jacobi data `alpha_n = xi`,
/// `beta_n = n sigma2`.
pub fn gaussian(xi: f64, sigma2: f64) -> Result<MeasureSpec> {
    if !(sigma2 > 0.0) {
        return Err(Error::ParameterDomain(format!(
            "gaussian needs sigma2 > 0, got {sigma2}"
        )));
    }
    let jacobi = JacobiCoefficients::from_rule(JacobiRule::Affine {
        alpha: exact(xi),
        beta_p: Rat::zero(),
        beta_q: exact(sigma2),
    })?;
    let moments = moments_from_jacobi(&jacobi, DEFAULT_MOMENT_ORDER)?;
    let sigma = sigma2.sqrt();
    let density = DensitySpec::continuous(
        move |t| {
            let u = (t - xi) / sigma;
            (-0.5 * u * u).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
        },
        Support::RealLine {
            truncation: xi.abs() + 40.0 * sigma,
        },
    );
    MeasureSpec::builder("gaussian")
        .param("xi", xi)
        .param("sigma2", sigma2)
        .jacobi(jacobi)
        .moments(moments)
        .density(density)
        .awk(AwkMap {
            c: 0.0,
            shift: xi,
            scale: sigma,
        })
        .build()
}

/// Askey-Wimp-Kerov law `mu_c`, `c >= -1`; `c = -1` is the Dirac mass at 0
/// and `c = 0` the standard Gaussian.
pub fn awk(c: f64) -> Result<MeasureSpec> {
    if c == -1.0 {
        let mut spec = dirac(0.0)?;
        spec.name = "awk".into();
        spec.params = vec![("c".into(), -1.0)];
        spec.awk = Some(AwkMap {
            c: -1.0,
            shift: 0.0,
            scale: 1.0,
        });
        return Ok(spec);
    }
    if !(c > -1.0) {
        return Err(Error::ParameterDomain(format!(
            "awk needs c >= -1, got {c}"
        )));
    }
    let jacobi = JacobiCoefficients::from_rule(JacobiRule::Affine {
        alpha: Rat::zero(),
        beta_p: exact(c),
        beta_q: Rat::one(),
    })?;
    let moments = moments_from_jacobi(&jacobi, DEFAULT_MOMENT_ORDER)?;
    let mut builder = MeasureSpec::builder("awk")
        .param("c", c)
        .jacobi(jacobi)
        .moments(moments)
        .awk(AwkMap {
            c,
            shift: 0.0,
            scale: 1.0,
        });
    if c >= 0.0 {
        builder = builder.density(DensitySpec::continuous(
            move |t| crate::awk::awk_density(c, t).unwrap_or(f64::NAN),
            Support::RealLine {
                truncation: 12.0 + 4.0 * c.max(0.0).sqrt(),
            },
        ));
    }
    builder.build()
}

/// Dirac point mass at `a`.
pub fn dirac(a: f64) -> Result<MeasureSpec> {
    let jacobi = JacobiCoefficients::finite_support(vec![exact(a)], vec![])?;
    let mut moments = Vec::with_capacity(DEFAULT_MOMENT_ORDER + 1);
    let ra = exact(a);
    let mut acc = Rat::one();
    for _ in 0..=DEFAULT_MOMENT_ORDER {
        moments.push(acc.clone());
        acc *= &ra;
    }
    MeasureSpec::builder("dirac")
        .param("a", a)
        .jacobi(jacobi)
        .moments(MomentSequence::new(moments)?)
        .density(DensitySpec::atoms_only(vec![(a, 1.0)]))
        .closed_form(ClosedForm::Dirac { a })
        .triplet(FreeCharacteristicTriplet::new(0.0, a, LevyMeasure::zero())?)
        .build()
}

/// Symmetric Bernoulli law `(delta_{-1} + delta_1)/2`. Not freely infinitely
/// divisible; carries no triplet.
pub fn bernoulli() -> Result<MeasureSpec> {
    let jacobi =
        JacobiCoefficients::finite_support(vec![Rat::zero(), Rat::zero()], vec![Rat::one()])?;
    let mut moments = Vec::with_capacity(DEFAULT_MOMENT_ORDER + 1);
    for n in 0..=DEFAULT_MOMENT_ORDER {
        moments.push(if n % 2 == 0 { Rat::one() } else { Rat::zero() });
    }
    MeasureSpec::builder("bernoulli")
        .jacobi(jacobi)
        .moments(MomentSequence::new(moments)?)
        .density(DensitySpec::atoms_only(vec![(-1.0, 0.5), (1.0, 0.5)]))
        .build()
}

/// Student t distribution with 3 degrees of freedom: density-only; moments
/// exist only to order 2, so it is excluded from cumulant-based checks.
pub fn student_t3() -> Result<MeasureSpec> {
    let norm = 2.0 / (std::f64::consts::PI * 3f64.sqrt());
    let density = DensitySpec::continuous(
        move |t| norm * (1.0 + t * t / 3.0).powi(-2),
        Support::RealLine { truncation: 1e3 },
    )
    // f(t) ~ (18 / (pi sqrt(3))) t^{-4} as |t| -> oo
    .with_tail_decay_c4(18.0 / (std::f64::consts::PI * 3f64.sqrt()));
    MeasureSpec::builder("student_t3").density(density).build()
}

// ---------------------------------------------------------------------------
// JSON serialization with representation tags
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct MeasureJson {
    name: String,
    #[serde(default)]
    params: Vec<(String, f64)>,
    representations: Vec<ReprJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum JacobiRuleJson {
    Affine {
        alpha: String,
        beta_p: String,
        beta_q: String,
    },
    TwoPhase {
        alpha0: String,
        alpha: String,
        beta1: String,
        beta: String,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum ReprJson {
    Moments {
        entries: Vec<String>,
    },
    Jacobi {
        alpha: Vec<String>,
        beta: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rule: Option<JacobiRuleJson>,
        #[serde(default)]
        terminating: bool,
    },
    Atoms {
        atoms: Vec<(f64, f64)>,
    },
    Density {
        kind: String,
    },
    ClosedForm {
        form: ClosedForm,
    },
    Triplet {
        #[serde(flatten)]
        t: crate::levy::TripletJson,
    },
    AwkMap {
        #[serde(flatten)]
        m: AwkMap,
    },
}

/// Serializes a measure to the tagged-representation JSON document.
/// Function-valued densities are emitted as an opaque `density` tag and do
/// not round-trip; every other representation does.
pub fn measure_to_json(m: &MeasureSpec) -> serde_json::Value {
    let mut reps = Vec::new();
    if let Some(ms) = m.moments() {
        reps.push(ReprJson::Moments {
            entries: ms.entries().iter().map(rat_display).collect(),
        });
    }
    if let Some(j) = m.jacobi() {
        let rule = j.rule.as_ref().map(|r| match r {
            JacobiRule::Affine {
                alpha,
                beta_p,
                beta_q,
            } => JacobiRuleJson::Affine {
                alpha: rat_display(alpha),
                beta_p: rat_display(beta_p),
                beta_q: rat_display(beta_q),
            },
            JacobiRule::TwoPhase {
                alpha0,
                alpha,
                beta1,
                beta,
            } => JacobiRuleJson::TwoPhase {
                alpha0: rat_display(alpha0),
                alpha: rat_display(alpha),
                beta1: rat_display(beta1),
                beta: rat_display(beta),
            },
        });
        reps.push(ReprJson::Jacobi {
            alpha: j.stored_alpha().iter().map(rat_display).collect(),
            beta: j.stored_beta().iter().map(rat_display).collect(),
            rule,
            terminating: j.terminates(),
        });
    }
    if let Some(d) = m.density() {
        if d.has_density() {
            reps.push(ReprJson::Density {
                kind: m.name().to_string(),
            });
        }
        if !d.atoms().is_empty() || !d.has_density() {
            reps.push(ReprJson::Atoms {
                atoms: d.atoms().to_vec(),
            });
        }
    }
    if let Some(cf) = m.closed_form() {
        reps.push(ReprJson::ClosedForm { form: cf });
    }
    if let Some(t) = m.triplet() {
        reps.push(ReprJson::Triplet { t: t.to_json() });
    }
    if let Some(a) = m.awk_map() {
        reps.push(ReprJson::AwkMap { m: a });
    }
    serde_json::to_value(MeasureJson {
        name: m.name().to_string(),
        params: m.params().to_vec(),
        representations: reps,
    })
    .expect("measure serialization")
}

/// Reads a measure back from the tagged JSON document. Supports moments,
/// explicit Jacobi data, atom lists, closed forms, triplets and AWK maps;
/// opaque `density` tags are ignored.
pub fn measure_from_json(v: &serde_json::Value) -> Result<MeasureSpec> {
    let doc: MeasureJson = serde_json::from_value(v.clone())
        .map_err(|e| Error::Usage(format!("bad measure JSON: {e}")))?;
    let mut b = MeasureSpec::builder(doc.name);
    for (k, v) in doc.params {
        b = b.param(&k, v);
    }
    for rep in doc.representations {
        match rep {
            ReprJson::Moments { entries } => {
                let mut es = Vec::with_capacity(entries.len());
                for e in &entries {
                    es.push(rat_parse(e).ok_or_else(|| {
                        Error::Usage(format!("bad rational `{e}` in moments"))
                    })?);
                }
                b = b.moments(MomentSequence::new(es)?);
            }
            ReprJson::Jacobi {
                alpha,
                beta,
                rule,
                terminating,
            } => {
                let parse1 = |s: &String| -> Result<Rat> {
                    rat_parse(s)
                        .ok_or_else(|| Error::Usage(format!("bad rational `{s}` in jacobi")))
                };
                let parse = |v: &[String]| -> Result<Vec<Rat>> { v.iter().map(parse1).collect() };
                let j = match rule {
                    Some(JacobiRuleJson::Affine {
                        alpha,
                        beta_p,
                        beta_q,
                    }) => JacobiCoefficients::from_rule(JacobiRule::Affine {
                        alpha: parse1(&alpha)?,
                        beta_p: parse1(&beta_p)?,
                        beta_q: parse1(&beta_q)?,
                    })?,
                    Some(JacobiRuleJson::TwoPhase {
                        alpha0,
                        alpha,
                        beta1,
                        beta,
                    }) => JacobiCoefficients::from_rule(JacobiRule::TwoPhase {
                        alpha0: parse1(&alpha0)?,
                        alpha: parse1(&alpha)?,
                        beta1: parse1(&beta1)?,
                        beta: parse1(&beta)?,
                    })?,
                    None if terminating => {
                        JacobiCoefficients::finite_support(parse(&alpha)?, parse(&beta)?)?
                    }
                    None => JacobiCoefficients::explicit(parse(&alpha)?, parse(&beta)?)?,
                };
                b = b.jacobi(j);
            }
            ReprJson::Atoms { atoms } => {
                b = b.density(DensitySpec::atoms_only(atoms));
            }
            ReprJson::Density { .. } => {}
            ReprJson::ClosedForm { form } => {
                b = b.closed_form(form);
            }
            ReprJson::Triplet { t } => {
                b = b.triplet(FreeCharacteristicTriplet::from_json(&t)?);
            }
            ReprJson::AwkMap { m } => {
                b = b.awk(m);
            }
        }
    }
    // A moments-only document still describes a usable measure: derive the
    // recurrence coefficients so the Cauchy transform is evaluable.
    if b.spec.jacobi.is_none()
        && b.spec.closed_form.is_none()
        && b.spec.density.is_none()
        && b.spec.triplet.is_none()
    {
        if let Some(m) = &b.spec.moments {
            let j = jacobi_from_moments(m)?;
            b = b.jacobi(j);
        }
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_frac;

    fn rats(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| rat_i64(x)).collect()
    }

    #[test]
    fn semicircle_moments_are_catalan() {
        // semicircle(0,2): moments (1,0,1,0,2,0,5), oracle: NC pairing count
        let j = JacobiCoefficients::from_rule(JacobiRule::Affine {
            alpha: Rat::zero(),
            beta_p: Rat::one(),
            beta_q: Rat::zero(),
        })
        .unwrap();
        let m = moments_from_jacobi(&j, 6).unwrap();
        assert_eq!(m.entries(), rats(&[1, 0, 1, 0, 2, 0, 5]).as_slice());
    }

    #[test]
    fn awk_low_moments() {
        // m2 = c+1, m4 = (c+1)^2 + (c+1)(c+2); c = 1/2 exercised exactly
        let c = rat_frac(1, 2);
        let j = JacobiCoefficients::from_rule(JacobiRule::Affine {
            alpha: Rat::zero(),
            beta_p: c.clone(),
            beta_q: Rat::one(),
        })
        .unwrap();
        let m = moments_from_jacobi(&j, 4).unwrap();
        let c1 = &c + rat_i64(1);
        let c2 = &c + rat_i64(2);
        assert_eq!(m.entry(2), &c1);
        assert_eq!(*m.entry(4), &c1 * &c1 + &c1 * &c2);
    }

    #[test]
    fn order_zero_is_normalization() {
        let j = JacobiCoefficients::explicit(vec![rat_i64(3)], vec![]).unwrap();
        let m = moments_from_jacobi(&j, 0).unwrap();
        assert_eq!(m.entries(), rats(&[1]).as_slice());
    }

    #[test]
    fn jacobi_from_gaussian_moments() {
        let m = MomentSequence::new(rats(&[1, 0, 1, 0, 3, 0, 15])).unwrap();
        let j = jacobi_from_moments(&m).unwrap();
        assert_eq!(j.stored_alpha(), rats(&[0, 0, 0]).as_slice());
        assert_eq!(j.stored_beta(), rats(&[1, 2, 3]).as_slice());
        // exact roundtrip
        let back = moments_from_jacobi(&j, 6).unwrap();
        assert_eq!(back.entries(), m.entries());
    }

    #[test]
    fn jacobi_from_semicircle_moments() {
        let m = MomentSequence::new(rats(&[1, 0, 1, 0, 2])).unwrap();
        let j = jacobi_from_moments(&m).unwrap();
        assert_eq!(j.stored_alpha(), rats(&[0, 0]).as_slice());
        assert_eq!(j.stored_beta(), rats(&[1, 1]).as_slice());
    }

    #[test]
    fn jacobi_from_order_one() {
        let m = MomentSequence::new(vec![rat_i64(1), rat_frac(5, 7)]).unwrap();
        let j = jacobi_from_moments(&m).unwrap();
        assert_eq!(j.stored_alpha(), &[rat_frac(5, 7)]);
        assert!(j.stored_beta().is_empty());
    }

    #[test]
    fn indefinite_hankel_is_rejected() {
        // m2 = 0 with m1 = 1 cannot be a probability moment sequence
        let m = MomentSequence::new(rats(&[1, 1, 0])).unwrap();
        assert!(matches!(
            jacobi_from_moments(&m),
            Err(Error::NotAMomentSequence(_))
        ));
    }

    #[test]
    fn catalog_semicircle_triplet() {
        let m = catalog_lookup("semicircle", &ParamRecord::new().with("a", 0.0).with("r", 2.0))
            .unwrap();
        let t = m.triplet().unwrap();
        assert_eq!(t.gaussian_part(), 1.0);
        assert_eq!(t.drift(), 0.0);
        assert!(t.levy_measure().is_zero());
    }

    #[test]
    fn catalog_free_poisson_levy_measure() {
        let m = catalog_lookup(
            "free_poisson",
            &ParamRecord::new().with("lambda", 1.0).with("alpha", 1.0),
        )
        .unwrap();
        let t = m.triplet().unwrap();
        match t.levy_measure() {
            LevyMeasure::Atoms(atoms) => assert_eq!(atoms.as_slice(), &[(1.0, 1.0)]),
            other => panic!("expected atomic Levy measure, got {other:?}"),
        }
        assert_eq!(t.drift(), 1.0);
    }

    #[test]
    fn awk_at_zero_matches_gaussian_jacobi() {
        let awk = catalog_lookup("awk", &ParamRecord::new().with("c", 0.0)).unwrap();
        let gauss = catalog_lookup("gaussian", &ParamRecord::new()).unwrap();
        let (ja, jg) = (awk.jacobi().unwrap(), gauss.jacobi().unwrap());
        for n in 1..=10 {
            assert_eq!(ja.beta(n), jg.beta(n));
            assert_eq!(ja.alpha(n - 1), jg.alpha(n - 1));
        }
        assert_eq!(
            awk.moments().unwrap().entries(),
            gauss.moments().unwrap().entries()
        );
    }

    #[test]
    fn catalog_rejects_bad_params() {
        assert!(catalog_lookup("semicircle", &ParamRecord::new().with("r", -1.0)).is_err());
        assert!(catalog_lookup("free_meixner", &ParamRecord::new().with("a", 0.0).with("b", -2.0))
            .is_err());
        assert!(catalog_lookup("nope", &ParamRecord::new()).is_err());
    }

    #[test]
    fn param_record_parsing() {
        let rec: ParamRecord = "a=0, r=2".parse().unwrap();
        assert_eq!(rec.get("a"), Some(0.0));
        assert_eq!(rec.get("r"), Some(2.0));
        assert!("r=x".parse::<ParamRecord>().is_err());
    }

    #[test]
    fn measure_json_roundtrip() {
        let m = catalog_lookup("free_poisson", &ParamRecord::new()).unwrap();
        let v = measure_to_json(&m);
        let back = measure_from_json(&v).unwrap();
        assert_eq!(back.name(), "free_poisson");
        assert_eq!(
            back.moments().unwrap().entries(),
            m.moments().unwrap().entries()
        );
        assert_eq!(back.triplet().unwrap().drift(), 1.0);
    }

    #[test]
    fn hankel_validity_check() {
        // catalog moments are valid; the Bernoulli-kappa-style sequence
        // (1,1,0) is not a moment sequence
        let good = catalog_lookup("gaussian", &ParamRecord::new()).unwrap();
        good.moments().unwrap().validate_hankel().unwrap();
        let bad = MomentSequence::new(rats(&[1, 1, 0, 0, 5])).unwrap();
        assert!(bad.validate_hankel().is_err());
    }

    #[test]
    fn student_t3_is_density_only() {
        let m = catalog_lookup("student_t3", &ParamRecord::new()).unwrap();
        assert!(m.moments().is_none());
        assert!(m.jacobi().is_none());
        assert!(m.density().is_some());
    }
}
