//! Numerical evaluation of the analytic transforms of a measure: the Cauchy
//! transform `G`, its reciprocal `F`, the right inverse of `F`, the free
//! cumulant transform `C(w) = w F^{-1}(1/w) - 1` and its derivative, the
//! Voiculescu transform `phi(z) = F^{-1}(z) - z`, and Stieltjes inversion.
//!
//! Evaluation paths, in priority order: closed form, Riccati-backed analytic
//! continuation (Askey-Wimp-Kerov family), Jacobi continued fraction with
//! Newton continuation for inverses, density quadrature, and (for the
//! cumulant transform only) the Levy-Khintchine integral from a triplet.
//!
//! Every inverse is computed by continuation from high on the imaginary
//! axis, where `F` is close to the identity; a continuation that leaves the
//! upper half plane is reported as an error, never silently patched.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::levy::{levy_khintchine_derivative_eval, levy_khintchine_eval};
use crate::measures::{ClosedForm, JacobiCoefficients, JacobiRule, MeasureSpec, Support};
use crate::quad;
use crate::rat::rat_to_f64;

pub type ComplexPoint = Complex64;

/// Adaptive continued fractions stop doubling at this depth.
pub const CF_DEPTH_CAP: usize = 1 << 14;

#[derive(Debug, Clone, Copy)]
pub struct TransformOptions {
    /// Initial continued-fraction truncation depth (doubled adaptively).
    pub cf_depth: usize,
    pub cf_adaptive_tol: f64,
    pub quad_tol: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    /// Geometric steps of the Newton walk from high on the ray to the target.
    pub continuation_steps: usize,
    /// Local error tolerance of the Riccati / inverse-function ODE
    /// integration.
    pub ode_tol: f64,
}

impl Default for TransformOptions {
    fn default() -> Self {
        Self {
            cf_depth: 32,
            cf_adaptive_tol: 1e-12,
            quad_tol: 1e-10,
            newton_tol: 1e-12,
            newton_max_iter: 50,
            continuation_steps: 32,
            ode_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalMethod {
    ContinuedFraction,
    Quadrature,
    ClosedForm,
    NewtonInversion,
    RiccatiContinuation,
}

#[derive(Debug, Clone, Copy)]
pub struct TransformValue {
    pub value: Complex64,
    pub est_error: f64,
    pub method: EvalMethod,
}

impl TransformValue {
    fn closed(value: Complex64) -> Self {
        Self {
            value,
            est_error: 4.0 * f64::EPSILON * (1.0 + value.norm()),
            method: EvalMethod::ClosedForm,
        }
    }
}

// ---------------------------------------------------------------------------
// Branch-stable square roots
// ---------------------------------------------------------------------------

/// `sqrt((z - e1)(z - e2))` for real branch points, as the product of
/// principal square roots of the factors. Continuous off the real segment
/// `[min(e1,e2), max(e1,e2)]` and asymptotic to `z` at infinity, which is
/// exactly the branch making `Im G < 0` on the upper half plane for the
/// catalog closed forms.
fn sqrt_prod(z: Complex64, e1: f64, e2: f64) -> Complex64 {
    (z - e1).sqrt() * (z - e2).sqrt()
}

/// `sqrt((1 - c1 w)(1 - c2 w))` with the branch fixed to `+1` at `w = 0`,
/// continuous on either open half plane when `c1, c2` are real.
fn sqrt_prod_at_one(w: Complex64, c1: f64, c2: f64) -> Complex64 {
    (1.0 - c1 * w).sqrt() * (1.0 - c2 * w).sqrt()
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

fn meixner_edges(a: f64, b: f64) -> (f64, f64) {
    let s = 2.0 * (1.0 + b).max(0.0).sqrt();
    (a + s, a - s)
}

/// Closed-form `G` on the upper half plane.
pub(crate) fn closed_cauchy(cf: ClosedForm, z: Complex64) -> Complex64 {
    match cf {
        ClosedForm::Dirac { a } => (z - a).inv(),
        ClosedForm::Semicircle { a, r } => {
            let s = sqrt_prod(z, a + r, a - r);
            2.0 * (z - a - s) / (r * r)
        }
        ClosedForm::FreeMeixner { a, b } => {
            let (e1, e2) = meixner_edges(a, b);
            let s = sqrt_prod(z, e1, e2);
            // Two algebraically equal forms; each is 0/0 at a root of
            // b z^2 + a z + 1 for one branch of s, never both at once, so
            // evaluate with the better-conditioned denominator.
            let d1 = 2.0 * (b * z * z + a * z + 1.0);
            let d2 = z * (z - a + s) - 2.0;
            if d1.norm() >= d2.norm() {
                ((1.0 + 2.0 * b) * z + a - s) / d1
            } else {
                (z - a + s) / d2
            }
        }
        ClosedForm::FreePoisson { lambda, alpha } => {
            let e1 = alpha * (1.0 + lambda.sqrt()).powi(2);
            let e2 = alpha * (1.0 - lambda.sqrt()).powi(2);
            let s = sqrt_prod(z, e1, e2);
            (z + alpha * (1.0 - lambda) - s) / (2.0 * alpha * z)
        }
    }
}

/// Closed-form `G'` on the upper half plane.
pub(crate) fn closed_cauchy_derivative(cf: ClosedForm, z: Complex64) -> Complex64 {
    match cf {
        ClosedForm::Dirac { a } => {
            let d = z - a;
            -(d * d).inv()
        }
        ClosedForm::Semicircle { a, r } => {
            let s = sqrt_prod(z, a + r, a - r);
            2.0 * (1.0 - (z - a) / s) / (r * r)
        }
        ClosedForm::FreeMeixner { a, b } => {
            let (e1, e2) = meixner_edges(a, b);
            let s = sqrt_prod(z, e1, e2);
            let sd = (z - 0.5 * (e1 + e2)) / s;
            let d1 = 2.0 * (b * z * z + a * z + 1.0);
            let d2 = z * (z - a + s) - 2.0;
            if d1.norm() >= d2.norm() {
                let num = (1.0 + 2.0 * b) * z + a - s;
                let num_d = (1.0 + 2.0 * b) - sd;
                let den_d = 2.0 * (2.0 * b * z + a);
                (num_d * d1 - num * den_d) / (d1 * d1)
            } else {
                let num = z - a + s;
                let num_d = 1.0 + sd;
                let den_d = (z - a + s) + z * (1.0 + sd);
                (num_d * d2 - num * den_d) / (d2 * d2)
            }
        }
        ClosedForm::FreePoisson { lambda, alpha } => {
            let e1 = alpha * (1.0 + lambda.sqrt()).powi(2);
            let e2 = alpha * (1.0 - lambda.sqrt()).powi(2);
            let s = sqrt_prod(z, e1, e2);
            let num = z + alpha * (1.0 - lambda) - s;
            let num_d = 1.0 - (z - alpha * (1.0 + lambda)) / s;
            (num_d * (2.0 * alpha * z) - num * (2.0 * alpha)) / (4.0 * alpha * alpha * z * z)
        }
    }
}

/// Closed-form free cumulant transform on the lower half plane, `None` when
/// the family has no globally valid formula there (free Meixner with b < 0).
pub(crate) fn closed_cumulant(cf: ClosedForm, w: Complex64) -> Option<Complex64> {
    match cf {
        ClosedForm::Dirac { a } => Some(a * w),
        ClosedForm::Semicircle { a, r } => Some(a * w + (r * r / 4.0) * w * w),
        ClosedForm::FreePoisson { lambda, alpha } => {
            Some(lambda * alpha * w / (1.0 - alpha * w))
        }
        ClosedForm::FreeMeixner { a, b } => {
            if b > 0.0 {
                let rb = 2.0 * b.sqrt();
                let s = sqrt_prod_at_one(w, a + rb, a - rb);
                Some(((1.0 - a * w) - s) / (2.0 * b))
            } else if b == 0.0 {
                Some(w * w / (1.0 - a * w))
            } else {
                None
            }
        }
    }
}

/// Closed-form derivative of the free cumulant transform.
pub(crate) fn closed_cumulant_derivative(cf: ClosedForm, w: Complex64) -> Option<Complex64> {
    match cf {
        ClosedForm::Dirac { a } => Some(Complex64::new(a, 0.0)),
        ClosedForm::Semicircle { a, r } => Some(a + (r * r / 2.0) * w),
        ClosedForm::FreePoisson { lambda, alpha } => {
            let d = 1.0 - alpha * w;
            Some(lambda * alpha / (d * d))
        }
        ClosedForm::FreeMeixner { a, b } => {
            if b > 0.0 {
                let rb = 2.0 * b.sqrt();
                let s = sqrt_prod_at_one(w, a + rb, a - rb);
                Some((-a + (a * (1.0 - a * w) + 4.0 * b * w) / s) / (2.0 * b))
            } else if b == 0.0 {
                let d = 1.0 - a * w;
                Some((2.0 * w - a * w * w) / (d * d))
            } else {
                None
            }
        }
    }
}

/// Closed-form Voiculescu transform on the upper half plane.
pub(crate) fn closed_voiculescu(cf: ClosedForm, z: Complex64) -> Option<Complex64> {
    match cf {
        ClosedForm::Dirac { a } => Some(Complex64::new(a, 0.0)),
        ClosedForm::Semicircle { a, r } => Some(a + (r * r / 4.0) / z),
        ClosedForm::FreePoisson { lambda, alpha } => Some(lambda * alpha * z / (z - alpha)),
        ClosedForm::FreeMeixner { a, b } => {
            if b > 0.0 {
                // phi of mu_{a,b} is the Cauchy transform of the semicircle
                // law centered at a with radius 2 sqrt(b)
                let rb = 2.0 * b.sqrt();
                let s = sqrt_prod(z, a + rb, a - rb);
                Some((z - a - s) / (2.0 * b))
            } else if b == 0.0 {
                Some((z - a).inv())
            } else {
                None
            }
        }
    }
}

fn closed_f_inverse(cf: ClosedForm, zeta: Complex64) -> Option<Complex64> {
    closed_voiculescu(cf, zeta).map(|phi| zeta + phi)
}

// ---------------------------------------------------------------------------
// Continued fractions
// ---------------------------------------------------------------------------

enum RuleF64 {
    Affine { alpha: f64, beta_p: f64, beta_q: f64 },
    TwoPhase { alpha0: f64, alpha: f64, beta1: f64, beta: f64 },
}

/// f64 snapshot of Jacobi data for tight evaluation loops.
pub(crate) struct CoeffView {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    rule: Option<RuleF64>,
}

impl CoeffView {
    pub(crate) fn new(j: &JacobiCoefficients) -> Self {
        let rule = j.rule_ref().map(|r| match r {
            JacobiRule::Affine {
                alpha,
                beta_p,
                beta_q,
            } => RuleF64::Affine {
                alpha: rat_to_f64(alpha),
                beta_p: rat_to_f64(beta_p),
                beta_q: rat_to_f64(beta_q),
            },
            JacobiRule::TwoPhase {
                alpha0,
                alpha,
                beta1,
                beta,
            } => RuleF64::TwoPhase {
                alpha0: rat_to_f64(alpha0),
                alpha: rat_to_f64(alpha),
                beta1: rat_to_f64(beta1),
                beta: rat_to_f64(beta),
            },
        });
        Self {
            alpha: j.stored_alpha().iter().map(rat_to_f64).collect(),
            beta: j.stored_beta().iter().map(rat_to_f64).collect(),
            rule,
        }
    }

    #[inline]
    fn alpha(&self, n: usize) -> Option<f64> {
        if n < self.alpha.len() {
            return Some(self.alpha[n]);
        }
        match &self.rule {
            Some(RuleF64::Affine { alpha, .. }) => Some(*alpha),
            Some(RuleF64::TwoPhase { alpha0, alpha, .. }) => {
                Some(if n == 0 { *alpha0 } else { *alpha })
            }
            None => None,
        }
    }

    /// `beta_n`, n >= 1.
    #[inline]
    fn beta(&self, n: usize) -> Option<f64> {
        if n - 1 < self.beta.len() {
            return Some(self.beta[n - 1]);
        }
        match &self.rule {
            Some(RuleF64::Affine { beta_p, beta_q, .. }) => Some(beta_p + beta_q * n as f64),
            Some(RuleF64::TwoPhase { beta1, beta, .. }) => {
                Some(if n == 1 { *beta1 } else { *beta })
            }
            None => None,
        }
    }

    fn max_depth(&self) -> usize {
        if self.rule.is_some() {
            usize::MAX
        } else {
            self.beta.len() + 1
        }
    }

    /// `(G, G')` of the depth-`d` truncation (zero tail).
    fn eval_at_depth(&self, z: Complex64, d: usize) -> (Complex64, Complex64) {
        let d = d.min(self.max_depth());
        // s_k = beta_{k+1} / (z - alpha_{k+1} - s_{k+1}), s_{d-1} tail = 0
        let mut s = Complex64::new(0.0, 0.0);
        let mut sd = Complex64::new(0.0, 0.0);
        for k in (1..d).rev() {
            let beta = self.beta(k).unwrap_or(0.0);
            if beta == 0.0 {
                continue;
            }
            let u = z - self.alpha(k).unwrap_or(0.0) - s;
            let inv = u.inv();
            let news = beta * inv;
            let newsd = -beta * (1.0 - sd) * inv * inv;
            s = news;
            sd = newsd;
        }
        let u = z - self.alpha(0).unwrap_or(0.0) - s;
        let g = u.inv();
        let gd = -(1.0 - sd) * g * g;
        (g, gd)
    }

    /// Adaptive evaluation: doubles the depth until two successive
    /// truncations agree, up to the cap.
    pub(crate) fn eval_adaptive(
        &self,
        z: Complex64,
        opts: &TransformOptions,
    ) -> Result<(Complex64, Complex64, f64)> {
        let finite = self.max_depth();
        if finite != usize::MAX {
            // terminating recurrence: exact at its own depth
            let (g, gd) = self.eval_at_depth(z, finite);
            return Ok((g, gd, 4.0 * f64::EPSILON * (1.0 + g.norm())));
        }
        let mut d = opts.cf_depth.max(4);
        let mut g_prev = self.eval_at_depth(z, d).0;
        loop {
            let d2 = 2 * d;
            let (g, gd) = self.eval_at_depth(z, d2);
            let diff = (g - g_prev).norm();
            if diff <= opts.cf_adaptive_tol * (1.0 + g.norm()) {
                return Ok((g, gd, diff));
            }
            if d2 >= CF_DEPTH_CAP {
                return Err(Error::CfConvergence {
                    depth: d2,
                    last: g,
                    prev: g_prev,
                });
            }
            d = d2;
            g_prev = g;
        }
    }
}

// ---------------------------------------------------------------------------
// Density quadrature for G
// ---------------------------------------------------------------------------

fn density_cauchy(
    m: &MeasureSpec,
    z: Complex64,
    opts: &TransformOptions,
    derivative: bool,
) -> Result<(Complex64, f64)> {
    let d = m
        .density()
        .ok_or_else(|| Error::UnsupportedRepresentation(m.name().into()))?;
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for &(loc, mass) in d.atoms() {
        let term = (z - loc).inv();
        value += mass * if derivative { -term * term } else { term };
    }
    if d.has_density() {
        let kernel = |t: f64| {
            let inv = (z - t).inv();
            if derivative {
                -inv * inv
            } else {
                inv
            }
        };
        let (lo, hi) = match d.support() {
            Support::Interval(a, b) => (a, b),
            Support::RealLine { truncation } => (-truncation, truncation),
        };
        let f = |t: f64| kernel(t) * d.density_at(t);
        let mut pts = vec![lo, hi];
        if z.re > lo && z.re < hi {
            pts.insert(1, z.re);
        }
        let r = quad::integrate_with_breakpoints(f, &pts, opts.quad_tol)?;
        value += r.value;
        err += r.est_error;

        // Analytic tail correction for ~ c4/t^4 decay beyond the truncation:
        //   int_T^oo  c4 t^-4/(z-t) dt = -c4 sum_k       z^k / ((k+4) T^{k+4})
        //   int_-oo^-T c4 t^-4/(z-t) dt = +c4 sum_k (-1)^k z^k / ((k+4) T^{k+4})
        // (expand 1/(z -+ t) in powers of z/t), differentiated termwise for
        // the derivative kernel.
        if let (Support::RealLine { truncation }, Some(c4)) = (d.support(), d.tail_decay_c4()) {
            let t0 = truncation;
            if z.norm() < 0.5 * t0 {
                let mut acc = Complex64::new(0.0, 0.0);
                let mut zk = Complex64::new(1.0, 0.0); // z^k (or z^{k-1} * k below)
                for k in 0..60 {
                    let scale = ((k + 4) as f64) * t0.powi(k + 4);
                    let sign = if k % 2 == 0 { 0.0 } else { -2.0 }; // -1 + (-1)^k
                    let term = zk / scale;
                    if derivative {
                        if k >= 1 {
                            acc += (k as f64) * term / z * sign;
                        }
                    } else {
                        acc += term * sign;
                    }
                    zk *= z;
                    if term.norm() < 1e-20 {
                        break;
                    }
                }
                value += c4 * acc;
            }
        }
    }
    Ok((value, err))
}

// ---------------------------------------------------------------------------
// Primary transform evaluators
// ---------------------------------------------------------------------------

fn require_upper(z: Complex64, what: &str) -> Result<()> {
    if z.im > 0.0 {
        Ok(())
    } else {
        Err(Error::ParameterDomain(format!(
            "{what} requires Im z > 0, got {z}"
        )))
    }
}

fn require_lower(w: Complex64, what: &str) -> Result<()> {
    if w.im < 0.0 {
        Ok(())
    } else {
        Err(Error::ParameterDomain(format!(
            "{what} requires Im w < 0, got {w}"
        )))
    }
}

/// `G_mu(z)` for `z` in the upper half plane. Method priority: closed form,
/// then Jacobi continued fraction, then density quadrature.
pub fn cauchy_eval(m: &MeasureSpec, z: Complex64, opts: &TransformOptions) -> Result<TransformValue> {
    require_upper(z, "cauchy_eval")?;
    if let Some(cf) = m.closed_form() {
        return Ok(TransformValue::closed(closed_cauchy(cf, z)));
    }
    if let Some(j) = m.jacobi() {
        let view = CoeffView::new(j);
        match view.eval_adaptive(z, opts) {
            Ok((g, _, err)) => {
                return Ok(TransformValue {
                    value: g,
                    est_error: err,
                    method: EvalMethod::ContinuedFraction,
                });
            }
            // Convergence slows like exp(-c Im(z) sqrt(depth)) for unbounded
            // recurrence coefficients; near the axis, fall through to the
            // density representation when one exists.
            Err(e) if m.density().is_none() => return Err(e),
            Err(_) => {}
        }
    }
    if m.density().is_some() {
        let (g, err) = density_cauchy(m, z, opts, false)?;
        return Ok(TransformValue {
            value: g,
            est_error: err,
            method: EvalMethod::Quadrature,
        });
    }
    Err(Error::UnsupportedRepresentation(m.name().into()))
}

/// `F_mu(z) = 1/G_mu(z)`; for probability measures `Im F(z) >= Im z`.
pub fn reciprocal_cauchy_eval(
    m: &MeasureSpec,
    z: Complex64,
    opts: &TransformOptions,
) -> Result<TransformValue> {
    let g = cauchy_eval(m, z, opts)?;
    let f = g.value.inv();
    Ok(TransformValue {
        value: f,
        // first-order propagation: |d(1/G)| = |dG| / |G|^2 = |dG| |F|^2
        est_error: g.est_error * f.norm_sqr(),
        method: g.method,
    })
}

/// `(F, F')` by the best direct path (closed form, continued fraction, or
/// density quadrature) at a point of the upper half plane.
pub(crate) fn f_and_fprime(
    m: &MeasureSpec,
    z: Complex64,
    opts: &TransformOptions,
) -> Result<(Complex64, Complex64, EvalMethod)> {
    if let Some(ClosedForm::Dirac { a }) = m.closed_form() {
        // F = z - a exactly (margin-zero boundary cases stay exact)
        return Ok((z - a, Complex64::new(1.0, 0.0), EvalMethod::ClosedForm));
    }
    let cf_result = if m.closed_form().is_some() {
        None
    } else {
        m.jacobi().map(|j| CoeffView::new(j).eval_adaptive(z, opts))
    };
    let (g, gd, method) = if let Some(cf) = m.closed_form() {
        (
            closed_cauchy(cf, z),
            closed_cauchy_derivative(cf, z),
            EvalMethod::ClosedForm,
        )
    } else if let Some(Ok((g, gd, _))) = cf_result {
        (g, gd, EvalMethod::ContinuedFraction)
    } else if m.density().is_some() {
        let (g, _) = density_cauchy(m, z, opts, false)?;
        let (gd, _) = density_cauchy(m, z, opts, true)?;
        (g, gd, EvalMethod::Quadrature)
    } else if let Some(Err(e)) = cf_result {
        return Err(e);
    } else {
        return Err(Error::UnsupportedRepresentation(m.name().into()));
    };
    let f = g.inv();
    let fd = -gd * f * f;
    Ok((f, fd, method))
}

/// Right inverse of `F`: finds `z` in the upper half plane with
/// `F(z) = w`, by Newton iteration with geometric continuation along the
/// ray through `w` from high on it (where `F` is near the identity),
/// re-seeding each step with the previous solution. An iterate leaving the
/// upper half plane aborts with the path position reached.
pub fn invert_reciprocal_cauchy(
    m: &MeasureSpec,
    w: Complex64,
    opts: &TransformOptions,
) -> Result<Complex64> {
    require_upper(w, "invert_reciprocal_cauchy")?;
    if let Some(cf) = m.closed_form() {
        if let Some(z) = closed_f_inverse(cf, w) {
            return Ok(z);
        }
    }
    if let Some(map) = m.awk_map() {
        let ev = crate::awk::AwkEvaluator::new(map, opts)?;
        return ev.f_inverse(w);
    }
    newton_invert_f(m, w, opts)
}

pub(crate) fn newton_invert_f(
    m: &MeasureSpec,
    w: Complex64,
    opts: &TransformOptions,
) -> Result<Complex64> {
    let radius = (4.0 * w.norm()).max(10.0);
    let steps = opts.continuation_steps.max(1);
    let dir = w / w.norm();
    let mut z = radius * dir; // F ~ id high up
    for k in 0..=steps {
        // geometric walk of the modulus from `radius` down to |w|
        let frac = k as f64 / steps as f64;
        let target = dir * radius * (w.norm() / radius).powf(frac);
        let mut converged = false;
        for _ in 0..opts.newton_max_iter {
            let (f, fd, _) = f_and_fprime(m, z, opts)?;
            let resid = f - target;
            if resid.norm() <= opts.newton_tol * (1.0 + target.norm()) {
                converged = true;
                break;
            }
            if fd.norm() < 1e-12 {
                return Err(Error::InversionFailure {
                    target: w,
                    reached: target,
                    reason: format!("|F'| = {:.3e} at z = {z}", fd.norm()),
                });
            }
            let mut step = resid / fd;
            // damped steps near the real axis
            let max_step = 0.5 * z.im.max(1e-6) + 0.25 * z.norm();
            if step.norm() > max_step {
                step *= max_step / step.norm();
            }
            z -= step;
            if z.im <= 0.0 {
                return Err(Error::InversionFailure {
                    target: w,
                    reached: target,
                    reason: format!("Newton iterate left the upper half plane at {z}"),
                });
            }
        }
        if !converged {
            return Err(Error::InversionFailure {
                target: w,
                reached: target,
                reason: "Newton did not converge within the iteration budget".into(),
            });
        }
    }
    Ok(z)
}

/// Free cumulant transform `C(w) = w F^{-1}(1/w) - 1` on the lower half
/// plane. Triplet-only measures evaluate through the Levy-Khintchine
/// integral instead.
pub fn free_cumulant_transform_eval(
    m: &MeasureSpec,
    w: Complex64,
    opts: &TransformOptions,
) -> Result<TransformValue> {
    require_lower(w, "free_cumulant_transform_eval")?;
    if let Some(cf) = m.closed_form() {
        if let Some(v) = closed_cumulant(cf, w) {
            return Ok(TransformValue::closed(v));
        }
    }
    if let Some(map) = m.awk_map() {
        let ev = crate::awk::AwkEvaluator::new(map, opts)?;
        let v = ev.cumulant(w)?;
        return Ok(TransformValue {
            value: v,
            est_error: 10.0 * opts.ode_tol * (1.0 + v.norm()),
            method: EvalMethod::RiccatiContinuation,
        });
    }
    if m.supports_cauchy() {
        let z = newton_invert_f(m, w.inv(), opts)?;
        let v = w * z - 1.0;
        return Ok(TransformValue {
            value: v,
            est_error: opts.newton_tol * (1.0 + v.norm()) * 10.0,
            method: EvalMethod::NewtonInversion,
        });
    }
    if let Some(t) = m.triplet() {
        let v = levy_khintchine_eval(t, w)?;
        return Ok(TransformValue {
            value: v,
            est_error: opts.quad_tol * (1.0 + v.norm()),
            method: EvalMethod::Quadrature,
        });
    }
    Err(Error::UnsupportedRepresentation(m.name().into()))
}

/// Derivative of the free cumulant transform on the lower half plane,
/// computed through `C'(w) = omega - F(omega)/F'(omega)` at
/// `omega = F^{-1}(1/w)` (one inversion, no second derivative of the
/// inverse); closed forms and the Levy-Khintchine integral where available.
pub fn free_cumulant_transform_derivative_eval(
    m: &MeasureSpec,
    w: Complex64,
    opts: &TransformOptions,
) -> Result<TransformValue> {
    require_lower(w, "free_cumulant_transform_derivative_eval")?;
    if let Some(cf) = m.closed_form() {
        if let Some(v) = closed_cumulant_derivative(cf, w) {
            return Ok(TransformValue::closed(v));
        }
    }
    if let Some(map) = m.awk_map() {
        let ev = crate::awk::AwkEvaluator::new(map, opts)?;
        let v = ev.cumulant_derivative(w)?;
        return Ok(TransformValue {
            value: v,
            est_error: 10.0 * opts.ode_tol * (1.0 + v.norm()),
            method: EvalMethod::RiccatiContinuation,
        });
    }
    if m.supports_cauchy() {
        let omega = newton_invert_f(m, w.inv(), opts)?;
        let (f, fd, _) = f_and_fprime(m, omega, opts)?;
        if fd.norm() < 1e-12 {
            return Err(Error::DerivativeSingularity(fd.norm()));
        }
        let v = omega - f / fd;
        return Ok(TransformValue {
            value: v,
            est_error: opts.newton_tol * (1.0 + v.norm()) * 100.0,
            method: EvalMethod::NewtonInversion,
        });
    }
    if let Some(t) = m.triplet() {
        let v = levy_khintchine_derivative_eval(t, w)?;
        return Ok(TransformValue {
            value: v,
            est_error: opts.quad_tol * (1.0 + v.norm()),
            method: EvalMethod::Quadrature,
        });
    }
    Err(Error::UnsupportedRepresentation(m.name().into()))
}

/// Central-difference derivative of `C` for cross-validation of the
/// analytic `C'` path (diagnostic; the two must agree to about 1e-6).
pub fn cprime_numeral_check(
    m: &MeasureSpec,
    w: Complex64,
    opts: &TransformOptions,
) -> Result<(Complex64, Complex64)> {
    let h = 1e-5 * (1.0 + w.norm()).min(0.49 * w.im.abs() / (1.0 + w.norm())).max(1e-7);
    let cp = free_cumulant_transform_derivative_eval(m, w, opts)?.value;
    let c1 = free_cumulant_transform_eval(m, w + h, opts)?.value;
    let c2 = free_cumulant_transform_eval(m, w - h, opts)?.value;
    Ok((cp, (c1 - c2) / (2.0 * h)))
}

/// Voiculescu transform `phi(z) = F^{-1}(z) - z` on the upper half plane.
pub fn voiculescu_eval(
    m: &MeasureSpec,
    z: Complex64,
    opts: &TransformOptions,
) -> Result<TransformValue> {
    require_upper(z, "voiculescu_eval")?;
    if let Some(cf) = m.closed_form() {
        if let Some(v) = closed_voiculescu(cf, z) {
            return Ok(TransformValue::closed(v));
        }
    }
    if let Some(map) = m.awk_map() {
        let ev = crate::awk::AwkEvaluator::new(map, opts)?;
        let omega = ev.f_inverse(z)?;
        let v = omega - z;
        return Ok(TransformValue {
            value: v,
            est_error: 10.0 * opts.ode_tol * (1.0 + v.norm()),
            method: EvalMethod::RiccatiContinuation,
        });
    }
    if m.supports_cauchy() {
        let omega = newton_invert_f(m, z, opts)?;
        let v = omega - z;
        return Ok(TransformValue {
            value: v,
            est_error: opts.newton_tol * (1.0 + v.norm()) * 10.0,
            method: EvalMethod::NewtonInversion,
        });
    }
    if let Some(t) = m.triplet() {
        // Eq-(2) route: phi(z) = z C(1/z)
        let v = z * levy_khintchine_eval(t, z.inv())?;
        return Ok(TransformValue {
            value: v,
            est_error: opts.quad_tol * (1.0 + v.norm()),
            method: EvalMethod::Quadrature,
        });
    }
    Err(Error::UnsupportedRepresentation(m.name().into()))
}

// ---------------------------------------------------------------------------
// Stieltjes inversion
// ---------------------------------------------------------------------------

const STIELTJES_Y0: f64 = 0.5;
const STIELTJES_MAX_LEVELS: usize = 26;

/// Density recovery at a real point by Richardson extrapolation of
/// `-(1/pi) Im g(x + iy)` over the dyadic sequence `y = y0, y0/2, ...`.
/// `g` returns a value and an evaluation-error estimate; levels stop when
/// evaluation error would dominate. Returns the density estimate and an
/// extrapolation error estimate.
pub fn stieltjes_inversion<G>(g: G, x: f64) -> Result<(f64, f64)>
where
    G: Fn(Complex64) -> Result<(Complex64, f64)>,
{
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut eval_err: f64 = 0.0;
    let mut y = STIELTJES_Y0;
    for _ in 0..STIELTJES_MAX_LEVELS {
        match g(Complex64::new(x, y)) {
            Ok((v, e)) => {
                eval_err = eval_err.max(e);
                let val = -v.im / std::f64::consts::PI;
                // Richardson: T[k][j] = (2^j T[k][j-1] - T[k-1][j-1]) / (2^j - 1)
                let mut row = vec![val];
                let prev = rows.last();
                if let Some(prev) = prev {
                    for j in 1..=prev.len() {
                        let pow = 2f64.powi(j as i32);
                        let t = (pow * row[j - 1] - prev[j - 1]) / (pow - 1.0);
                        row.push(t);
                        if j == prev.len() {
                            break;
                        }
                    }
                }
                rows.push(row);
            }
            Err(_) => break,
        }
        y *= 0.5;
        // deeper levels cannot beat the evaluation noise
        if let Some(last) = rows.last() {
            if last.len() >= 3 {
                let n = last.len();
                let spread = (last[n - 1] - last[n - 2]).abs();
                if spread < 1e-13 * (1.0 + last[n - 1].abs()) {
                    break;
                }
            }
        }
    }
    if rows.len() < 3 {
        return Err(Error::InversionUnstable {
            x,
            spread: f64::INFINITY,
        });
    }
    // pick the entry with the smallest neighbor spread across the table
    let mut best = f64::NAN;
    let mut best_err = f64::INFINITY;
    for (k, row) in rows.iter().enumerate().skip(1) {
        for (j, &v) in row.iter().enumerate().skip(1) {
            let neighbor = rows[k][j - 1];
            let prev_diag = rows[k - 1].get(j - 1).copied().unwrap_or(neighbor);
            let spread = (v - neighbor).abs().max((v - prev_diag).abs());
            let err = spread + eval_err * (1 << j.min(20)) as f64;
            if err < best_err {
                best_err = err;
                best = v;
            }
        }
    }
    // raw deepest value competes too (fractional-power boundary behavior)
    let deepest = rows.last().unwrap()[0];
    let prev_deep = rows[rows.len() - 2][0];
    let raw_err = (deepest - prev_deep).abs() + eval_err;
    if raw_err < best_err {
        best = deepest;
        best_err = raw_err;
    }
    if !best.is_finite() || best_err > 0.1 * (1.0 + best.abs()) {
        return Err(Error::InversionUnstable {
            x,
            spread: best_err,
        });
    }
    Ok((best, best_err))
}

/// Stieltjes inversion wired to a measure's Cauchy transform.
pub fn stieltjes_density(m: &MeasureSpec, x: f64, opts: &TransformOptions) -> Result<(f64, f64)> {
    stieltjes_inversion(
        |z| cauchy_eval(m, z, opts).map(|tv| (tv.value, tv.est_error)),
        x,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{catalog_lookup, ParamRecord};
    use num_complex::Complex64 as C;

    fn opts() -> TransformOptions {
        TransformOptions::default()
    }

    fn semicircle02() -> MeasureSpec {
        catalog_lookup("semicircle", &ParamRecord::new().with("a", 0.0).with("r", 2.0)).unwrap()
    }

    #[test]
    fn semicircle_g_closed_form() {
        let m = semicircle02();
        let v = cauchy_eval(&m, C::new(0.0, 2.0), &opts()).unwrap();
        // G(2i) = i(1 - sqrt 2)
        let expect = C::new(0.0, 1.0 - 2f64.sqrt());
        assert!((v.value - expect).norm() < 1e-14);
        assert_eq!(v.method, EvalMethod::ClosedForm);
    }

    #[test]
    fn dirac_g_is_resolvent() {
        let m = catalog_lookup("dirac", &ParamRecord::new().with("a", 1.5)).unwrap();
        let z = C::new(0.3, 0.7);
        let v = cauchy_eval(&m, z, &opts()).unwrap();
        assert!((v.value - (z - 1.5).inv()).norm() < 1e-15);
    }

    #[test]
    fn semicircle_f_value() {
        let m = semicircle02();
        let v = reciprocal_cauchy_eval(&m, C::new(0.0, 2.0), &opts()).unwrap();
        let expect = C::new(0.0, 1.0 + 2f64.sqrt());
        assert!((v.value - expect).norm() < 1e-13);
    }

    #[test]
    fn cf_matches_closed_form_for_semicircle() {
        let m = semicircle02();
        let j = m.jacobi().unwrap();
        let view = CoeffView::new(j);
        for &z in &[C::new(0.0, 2.0), C::new(1.0, 0.5), C::new(-2.5, 0.1)] {
            let (g, gd, _) = view.eval_adaptive(z, &opts()).unwrap();
            let cg = closed_cauchy(m.closed_form().unwrap(), z);
            let cgd = closed_cauchy_derivative(m.closed_form().unwrap(), z);
            assert!((g - cg).norm() < 1e-10, "G mismatch at {z}");
            assert!((gd - cgd).norm() < 1e-8, "G' mismatch at {z}");
        }
    }

    #[test]
    fn awk_cf_matches_gaussian_quadrature() {
        // two independent evaluation paths for the c = 0 continued fraction
        let awk = catalog_lookup("awk", &ParamRecord::new().with("c", 0.0)).unwrap();
        let gauss = catalog_lookup("gaussian", &ParamRecord::new()).unwrap();
        let z = C::new(0.0, 2.0);
        let via_cf = cauchy_eval(&awk, z, &opts()).unwrap();
        assert_eq!(via_cf.method, EvalMethod::ContinuedFraction);
        let (via_quad, _) = density_cauchy(&gauss, z, &opts(), false).unwrap();
        assert!(
            (via_cf.value - via_quad).norm() < 1e-8,
            "cf {} vs quad {}",
            via_cf.value,
            via_quad
        );
    }

    #[test]
    fn meixner_closed_g_matches_cf() {
        for (a, b) in [(0.0, 1.0), (2.0, 1.0), (2.0, 0.5), (1.0, 1.0)] {
            let m = catalog_lookup(
                "free_meixner",
                &ParamRecord::new().with("a", a).with("b", b),
            )
            .unwrap();
            let view = CoeffView::new(m.jacobi().unwrap());
            for &z in &[C::new(0.0, 1.0), C::new(1.5, 0.25), C::new(-0.7, 2.0)] {
                let (g, _, _) = view.eval_adaptive(z, &opts()).unwrap();
                let cg = closed_cauchy(m.closed_form().unwrap(), z);
                assert!((g - cg).norm() < 1e-9, "({a},{b}) at {z}: {g} vs {cg}");
            }
        }
    }

    #[test]
    fn poisson_closed_g_matches_cf_and_density() {
        let m = catalog_lookup("free_poisson", &ParamRecord::new()).unwrap();
        let view = CoeffView::new(m.jacobi().unwrap());
        for &z in &[C::new(0.0, 1.0), C::new(2.0, 0.3)] {
            let (g, _, _) = view.eval_adaptive(z, &opts()).unwrap();
            let cg = closed_cauchy(m.closed_form().unwrap(), z);
            assert!((g - cg).norm() < 1e-9);
            let (gq, _) = density_cauchy(&m, z, &opts(), false).unwrap();
            assert!((gq - cg).norm() < 1e-8, "quad {gq} vs closed {cg}");
        }
    }

    #[test]
    fn inversion_examples() {
        // semicircle: F^{-1}(2i) = 2i + 1/(2i) = 1.5i
        let m = semicircle02();
        let z = invert_reciprocal_cauchy(&m, C::new(0.0, 2.0), &opts()).unwrap();
        assert!((z - C::new(0.0, 1.5)).norm() < 1e-12);

        // dirac at 0: F = id
        let d = catalog_lookup("dirac", &ParamRecord::new()).unwrap();
        let w = C::new(0.7, 1.1);
        assert!((invert_reciprocal_cauchy(&d, w, &opts()).unwrap() - w).norm() < 1e-12);
    }

    #[test]
    fn newton_inversion_roundtrip_gaussian() {
        let m = catalog_lookup("gaussian", &ParamRecord::new()).unwrap();
        let w = C::new(0.0, 3.0);
        let z = newton_invert_f(&m, w, &opts()).unwrap();
        let f = reciprocal_cauchy_eval(&m, z, &opts()).unwrap();
        assert!((f.value - w).norm() < 1e-10);
        let g = cauchy_eval(&m, z, &opts()).unwrap();
        assert!((g.value - w.inv()).norm() < 1e-10);
    }

    #[test]
    fn cumulant_transform_examples() {
        // semicircle(a, r): C(w) = a w + (r^2/4) w^2 at w = -i
        let m = catalog_lookup("semicircle", &ParamRecord::new().with("a", 0.5).with("r", 2.0))
            .unwrap();
        let w = C::new(0.0, -1.0);
        let v = free_cumulant_transform_eval(&m, w, &opts()).unwrap();
        assert!((v.value - (0.5 * w + w * w)).norm() < 1e-13);

        // free Poisson: C(w) = w/(1-w) at w = -0.5i
        let fp = catalog_lookup("free_poisson", &ParamRecord::new()).unwrap();
        let w = C::new(0.0, -0.5);
        let v = free_cumulant_transform_eval(&fp, w, &opts()).unwrap();
        assert!((v.value - w / (1.0 - w)).norm() < 1e-14);

        // dirac: C(w) = a w
        let d = catalog_lookup("dirac", &ParamRecord::new().with("a", 2.0)).unwrap();
        let v = free_cumulant_transform_eval(&d, w, &opts()).unwrap();
        assert!((v.value - 2.0 * w).norm() < 1e-14);
    }

    #[test]
    fn cumulant_derivative_examples() {
        // semicircle(0,2): C'(w) = 2w
        let m = semicircle02();
        let w = C::new(0.0, -1.0);
        let v = free_cumulant_transform_derivative_eval(&m, w, &opts()).unwrap();
        assert!((v.value - 2.0 * w).norm() < 1e-13);

        // free Poisson at w = 1.1 - 0.1i: C' = 1/(1-w)^2 = 50i
        let fp = catalog_lookup("free_poisson", &ParamRecord::new()).unwrap();
        let w = C::new(1.1, -0.1);
        let v = free_cumulant_transform_derivative_eval(&fp, w, &opts()).unwrap();
        assert!((v.value - C::new(0.0, 50.0)).norm() < 1e-10);
    }

    #[test]
    fn voiculescu_examples() {
        let m = semicircle02();
        let z = C::new(0.0, 2.0);
        let v = voiculescu_eval(&m, z, &opts()).unwrap();
        assert!((v.value - z.inv()).norm() < 1e-14);

        let fp = catalog_lookup("free_poisson", &ParamRecord::new()).unwrap();
        let v = voiculescu_eval(&fp, z, &opts()).unwrap();
        assert!((v.value - z / (z - 1.0)).norm() < 1e-14);
    }

    #[test]
    fn newton_path_matches_closed_cumulant() {
        // strip the measure to Jacobi-only and drive the full Newton path
        let full = semicircle02();
        let jac_only = MeasureSpec::builder("semicircle-jacobi")
            .jacobi(full.jacobi().unwrap().clone())
            .build()
            .unwrap();
        let w = C::new(0.3, -0.4); // |w| < 1 keeps the preimage in the upper half plane
        let v = free_cumulant_transform_eval(&jac_only, w, &opts()).unwrap();
        assert_eq!(v.method, EvalMethod::NewtonInversion);
        assert!((v.value - w * w).norm() < 1e-10, "{} vs {}", v.value, w * w);
    }

    #[test]
    fn newton_path_reports_escape() {
        // |w| > 1: the true preimage für the semicircle lies below the axis
        let full = semicircle02();
        let jac_only = MeasureSpec::builder("semicircle-jacobi")
            .jacobi(full.jacobi().unwrap().clone())
            .build()
            .unwrap();
        let res = newton_invert_f(&jac_only, C::new(0.0, 0.2), &opts());
        assert!(res.is_err());
    }

    #[test]
    fn stieltjes_semicircle_density() {
        let m = semicircle02();
        let (v, _) = stieltjes_density(&m, 0.0, &opts()).unwrap();
        assert!((v - 1.0 / std::f64::consts::PI).abs() < 1e-6, "{v}");
        let (v, _) = stieltjes_density(&m, 3.0, &opts()).unwrap();
        assert!(v.abs() < 1e-6, "outside support: {v}");
    }

    #[test]
    fn stieltjes_gaussian_density_via_cf() {
        let m = catalog_lookup("gaussian", &ParamRecord::new()).unwrap();
        let (v, err) = stieltjes_density(&m, 0.0, &opts()).unwrap();
        let expect = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        assert!((v - expect).abs() < 1e-4, "{v} vs {expect}, est {err}");
    }

    #[test]
    fn student_t3_quadrature_matches_residue_formula() {
        // closed form by residues: G(z) = 1/(z + i sqrt 3) + i sqrt 3/(z + i sqrt 3)^2
        let m = catalog_lookup("student_t3", &ParamRecord::new()).unwrap();
        let z = C::new(0.0, 2.0);
        let v = cauchy_eval(&m, z, &opts()).unwrap();
        let d = z + C::new(0.0, 3f64.sqrt());
        let expect = d.inv() + C::new(0.0, 3f64.sqrt()) / (d * d);
        assert!(
            (v.value - expect).norm() < 1e-8,
            "quad {} vs residue {expect}",
            v.value
        );
    }

    #[test]
    fn derivative_cross_check() {
        for (name, rec) in [
            ("semicircle", ParamRecord::new().with("a", 0.0).with("r", 2.0)),
            ("free_poisson", ParamRecord::new()),
            (
                "free_meixner",
                ParamRecord::new().with("a", 2.0).with("b", 1.0),
            ),
        ] {
            let m = catalog_lookup(name, &rec).unwrap();
            for &w in &[C::new(0.2, -0.3), C::new(-1.0, -2.0)] {
                let (analytic, numeric) = cprime_numeral_check(&m, w, &opts()).unwrap();
                assert!(
                    (analytic - numeric).norm() < 1e-6 * (1.0 + analytic.norm()),
                    "{name} at {w}: {analytic} vs {numeric}"
                );
            }
        }
    }
}
