//! Exact free-cumulant calculus: moment/cumulant conversion, the brute-force
//! non-crossing-partition oracle, and conditional positive definiteness of
//! Hankel matrices in rational arithmetic.
//!
//! The conversion uses the generating identity `M(x) = 1 + sum_s k_s x^s M(x)^s`,
//! i.e. `m_n = sum_{s=1..n} k_s [x^{n-s}] M(x)^s`, which is the non-crossing
//! moment-cumulant relation in series form. The oracle recomputes `k_n` by
//! direct Moebius inversion over all non-crossing partitions and the two must
//! agree exactly; they are independent routes.

use num::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::MomentSequence;
use crate::rat::{rat_display, rat_i64, rat_to_f64, Rat};
use crate::report::{CheckReport, GridInfo, Verdict};

/// Hard cap for the brute-force partition enumeration; Catalan(12) = 208012.
pub const NC_ORACLE_CAP: usize = 12;

/// Free cumulants `k_1 .. k_N`, exact rationals.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeCumulantSequence {
    entries: Vec<Rat>,
}

impl FreeCumulantSequence {
    pub fn new(entries: Vec<Rat>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::ParameterDomain(
                "cumulant sequence needs at least k_1".into(),
            ));
        }
        Ok(Self { entries })
    }

    pub fn order(&self) -> usize {
        self.entries.len()
    }

    /// `k_n`, 1-indexed.
    pub fn entry(&self, n: usize) -> &Rat {
        &self.entries[n - 1]
    }

    pub fn entries(&self) -> &[Rat] {
        &self.entries
    }
}

// ---------------------------------------------------------------------------
// Series conversion
// ---------------------------------------------------------------------------

/// Incrementally maintained table of coefficients `p[s][j] = [x^j] M(x)^s`.
struct PowerTable {
    p: Vec<Vec<Rat>>,
}

impl PowerTable {
    fn new(max_s: usize) -> Self {
        let mut p = vec![Vec::new(); max_s + 1];
        for (s, row) in p.iter_mut().enumerate() {
            // column 0: m_0^s = 1
            row.push(Rat::one());
            let _ = s;
        }
        Self { p }
    }

    /// Appends column `j` once `m_0..m_j` are known.
    fn push_column(&mut self, moments: &[Rat]) {
        let j = self.p[0].len();
        debug_assert!(moments.len() > j);
        self.p[0].push(Rat::zero()); // [x^j] M^0 = 0 for j >= 1
        for s in 1..self.p.len() {
            let mut acc = Rat::zero();
            for i in 0..=j {
                if !moments[i].is_zero() && !self.p[s - 1][j - i].is_zero() {
                    acc += &moments[i] * &self.p[s - 1][j - i];
                }
            }
            self.p[s].push(acc);
        }
    }

    fn coeff(&self, s: usize, j: usize) -> &Rat {
        &self.p[s][j]
    }
}

/// Moments -> free cumulants, exact, via the series recursion
/// `k_n = m_n - sum_{s=1..n-1} k_s [x^{n-s}] M(x)^s`.
pub fn free_cumulants_from_moments(m: &MomentSequence) -> Result<FreeCumulantSequence> {
    let order = m.order();
    if order < 1 {
        return Err(Error::ParameterDomain("need moments to order >= 1".into()));
    }
    let moments = m.entries();
    let mut table = PowerTable::new(order);
    for _ in 1..order {
        table.push_column(moments);
    }
    let mut kappa: Vec<Rat> = Vec::with_capacity(order);
    for n in 1..=order {
        let mut v = moments[n].clone();
        for (s, k_s) in kappa.iter().enumerate().map(|(i, k)| (i + 1, k)) {
            if !k_s.is_zero() {
                v -= k_s * table.coeff(s, n - s);
            }
        }
        // the s = n term is k_n * [x^0] M^n = k_n
        kappa.push(v);
    }
    FreeCumulantSequence::new(kappa)
}

/// Free cumulants -> moments, exact inverse of
/// [`free_cumulants_from_moments`]; the cumulant sequence is implicitly
/// extended by zeros up to `order`.
pub fn moments_from_free_cumulants(k: &FreeCumulantSequence, order: usize) -> MomentSequence {
    let mut moments: Vec<Rat> = vec![Rat::one()];
    let mut table = PowerTable::new(order);
    for n in 1..=order {
        let mut v = Rat::zero();
        for s in 1..=n.min(k.order()) {
            let k_s = k.entry(s);
            if !k_s.is_zero() {
                v += k_s * table.coeff(s, n - s);
            }
        }
        moments.push(v);
        if n < order {
            table.push_column(&moments);
        }
    }
    MomentSequence::new(moments).expect("m_0 = 1 by construction")
}

// ---------------------------------------------------------------------------
// Non-crossing partition oracle
// ---------------------------------------------------------------------------

/// Calls `cb` once per non-crossing partition of `{0, .., n-1}`, blocks
/// sorted, in a deterministic order.
pub fn for_each_nc_partition<F: FnMut(&[Vec<usize>])>(n: usize, cb: F) {
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut cb = cb;
    // segments of still-unpartitioned contiguous elements
    let mut segments: Vec<(usize, usize)> = if n > 0 { vec![(0, n)] } else { vec![] };
    recurse(&mut segments, &mut blocks, &mut cb);
}

fn recurse<F: FnMut(&[Vec<usize>])>(
    segments: &mut Vec<(usize, usize)>,
    blocks: &mut Vec<Vec<usize>>,
    cb: &mut F,
) {
    // Invariant: only non-empty segments are ever on the stack.
    match segments.pop() {
        None => cb(blocks),
        Some((lo, hi)) => {
            blocks.push(vec![lo]);
            extend_block(lo + 1, hi, segments, blocks, cb);
            blocks.pop();
            segments.push((lo, hi));
        }
    }
}

fn extend_block<F: FnMut(&[Vec<usize>])>(
    from: usize,
    hi: usize,
    segments: &mut Vec<(usize, usize)>,
    blocks: &mut Vec<Vec<usize>>,
    cb: &mut F,
) {
    // Option 1: close the block here; everything in [from, hi) is a fresh segment.
    if from < hi {
        segments.push((from, hi));
        recurse(segments, blocks, cb);
        segments.pop();
    } else {
        recurse(segments, blocks, cb);
    }

    // Option 2: adjoin a next element j; the gap (from..j) becomes an
    // independent segment (blocks inside it cannot cross the enclosing pair).
    for j in from..hi {
        blocks.last_mut().unwrap().push(j);
        if from < j {
            segments.push((from, j));
        }
        extend_block(j + 1, hi, segments, blocks, cb);
        if from < j {
            segments.pop();
        }
        blocks.last_mut().unwrap().pop();
    }
}

/// Catalan numbers as exact rationals.
fn catalan(n: usize) -> Rat {
    let mut c = Rat::one();
    for i in 0..n {
        c = c * rat_i64(2 * (2 * i as i64 + 1)) / rat_i64(i as i64 + 2);
    }
    c
}

/// Moebius function `mu(pi, 1_n)` of the non-crossing partition lattice,
/// computed through the Kreweras complement: representing `pi` as the
/// permutation with one cycle per block (elements in increasing order), the
/// cycles of `pi^{-1} \circ (1 2 ... n)` are the blocks of `K(pi)`, and
/// `mu(pi, 1_n) = prod_{V in K(pi)} (-1)^{|V|-1} Catalan(|V|-1)`.
fn kreweras_mobius(blocks: &[Vec<usize>], n: usize) -> Rat {
    let mut perm = vec![0usize; n];
    for b in blocks {
        for w in 0..b.len() {
            perm[b[w]] = b[(w + 1) % b.len()];
        }
    }
    let mut inv = vec![0usize; n];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    // q = perm^{-1} o cycle
    let q: Vec<usize> = (0..n).map(|i| inv[(i + 1) % n]).collect();
    let mut seen = vec![false; n];
    let mut mu = Rat::one();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0usize;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = q[i];
            len += 1;
        }
        let c = catalan(len - 1);
        mu = if (len - 1).is_multiple_of(2) { mu * c } else { -(mu * c) };
    }
    mu
}

/// Brute-force `k_n` by Moebius inversion over all non-crossing partitions:
/// `k_n = sum_{pi in NC(n)} mu(pi, 1_n) prod_{B in pi} m_{|B|}`.
///
/// Independent of the series recursion; capped at `n <= 12`.
pub fn nc_partition_oracle(m: &MomentSequence, n: usize) -> Result<Rat> {
    if n > NC_ORACLE_CAP {
        return Err(Error::OrderCap(n, NC_ORACLE_CAP));
    }
    if n < 1 || m.order() < n {
        return Err(Error::ParameterDomain(format!(
            "oracle needs moments to order {n}"
        )));
    }
    let mut acc = Rat::zero();
    for_each_nc_partition(n, |blocks| {
        let mut term = kreweras_mobius(blocks, n);
        for b in blocks {
            term *= m.entry(b.len());
        }
        acc += term;
    });
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Hankel positivity
// ---------------------------------------------------------------------------

/// Result of an exact conditional-positive-definiteness test of a sequence
/// `a_1, a_2, ...`: the `N x N` Hankel matrix `(a_{i+j})_{i,j=1..N}` is
/// decided PSD or not in rational arithmetic.
#[derive(Debug, Clone)]
pub struct HankelReport {
    pub order: usize,
    /// Row-major matrix entries.
    pub entries: Vec<Vec<Rat>>,
    pub psd: bool,
    /// Determinants of the leading principal submatrices.
    pub leading_minors: Vec<Rat>,
    /// For PSD: the positive pivots of a rank-revealing LDL^T pass.
    pub pivots: Vec<Rat>,
    pub rank: usize,
    /// For non-PSD: an exact vector with `v^T A v < 0`.
    pub witness_vector: Option<Vec<Rat>>,
    /// Value of `v^T A v` for the witness.
    pub witness_value: Option<Rat>,
}

impl HankelReport {
    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct J<'a> {
            order: usize,
            matrix: Vec<Vec<String>>,
            psd: bool,
            leading_minors: Vec<String>,
            pivots: Vec<String>,
            rank: usize,
            #[serde(skip_serializing_if = "Option::is_none")]
            witness_vector: Option<Vec<String>>,
            #[serde(skip_serializing_if = "Option::is_none")]
            witness_value: Option<String>,
            semantics: &'a str,
        }
        serde_json::to_value(J {
            order: self.order,
            matrix: self
                .entries
                .iter()
                .map(|row| row.iter().map(rat_display).collect())
                .collect(),
            psd: self.psd,
            leading_minors: self.leading_minors.iter().map(rat_display).collect(),
            pivots: self.pivots.iter().map(rat_display).collect(),
            rank: self.rank,
            witness_vector: self
                .witness_vector
                .as_ref()
                .map(|v| v.iter().map(rat_display).collect()),
            witness_value: self.witness_value.as_ref().map(rat_display),
            semantics: "positive semidefinite test with rank-deficiency handling",
        })
        .expect("hankel report serializes")
    }
}

fn det_exact(a: &[Vec<Rat>]) -> Rat {
    // rational Gaussian elimination with partial (nonzero) pivoting
    let n = a.len();
    let mut m: Vec<Vec<Rat>> = a.to_vec();
    let mut det = Rat::one();
    for col in 0..n {
        let pivot_row = (col..n).find(|&r| !m[r][col].is_zero());
        let pr = match pivot_row {
            Some(pr) => pr,
            None => return Rat::zero(),
        };
        if pr != col {
            m.swap(pr, col);
            det = -det;
        }
        let pivot = m[col][col].clone();
        det *= &pivot;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &pivot;
            for c in col..n {
                let sub = &factor * &m[col][c];
                m[r][c] -= sub;
            }
        }
    }
    det
}

/// Exact PSD decision by Schur-complement recursion with PSD-safe pivoting.
/// Returns either the pivot list (PSD) or a rational witness `v` with
/// `v^T A v < 0`.
fn psd_decide(a: &[Vec<Rat>]) -> (bool, Vec<Rat>, Option<Vec<Rat>>) {
    let n = a.len();
    if n == 0 {
        return (true, Vec::new(), None);
    }
    // Any negative diagonal entry is an immediate witness.
    for i in 0..n {
        if a[i][i].is_negative() {
            let mut v = vec![Rat::zero(); n];
            v[i] = Rat::one();
            return (false, Vec::new(), Some(v));
        }
    }
    // Zero diagonal with a nonzero row entry: 2ts a_ij + s^2 a_jj can be
    // driven negative.
    for i in 0..n {
        if a[i][i].is_zero() {
            for j in 0..n {
                if j != i && !a[i][j].is_zero() {
                    let mut v = vec![Rat::zero(); n];
                    // v_i = t, v_j = 1 with t = -(a_jj + 1)/(2 a_ij)
                    // gives v^T A v = 2 t a_ij + a_jj = -1.
                    v[i] = -((&a[j][j] + rat_i64(1)) / (rat_i64(2) * &a[i][j]));
                    v[j] = Rat::one();
                    return (false, Vec::new(), Some(v));
                }
            }
        }
    }
    // First positive diagonal pivot, if any.
    let piv = (0..n).find(|&i| a[i][i].is_positive());
    let piv = match piv {
        Some(p) => p,
        // all-zero matrix
        None => return (true, Vec::new(), None),
    };
    let p = a[piv][piv].clone();
    let rest: Vec<usize> = (0..n).filter(|&i| i != piv).collect();
    let mut schur: Vec<Vec<Rat>> = vec![vec![Rat::zero(); n - 1]; n - 1];
    for (ri, &i) in rest.iter().enumerate() {
        for (rj, &j) in rest.iter().enumerate() {
            schur[ri][rj] = &a[i][j] - &(&a[i][piv] * &a[piv][j] / &p);
        }
    }
    let (ok, mut pivots, sub_witness) = psd_decide(&schur);
    if ok {
        pivots.insert(0, p);
        return (true, pivots, None);
    }
    // Lift the Schur witness u to v: v_rest = u, v_piv = -(sum_j u_j a[piv][j])/p;
    // then v^T A v = u^T S u < 0.
    let u = sub_witness.expect("non-PSD recursion returns witness");
    let mut v = vec![Rat::zero(); n];
    let mut dot = Rat::zero();
    for (rj, &j) in rest.iter().enumerate() {
        v[j] = u[rj].clone();
        dot += &u[rj] * &a[piv][j];
    }
    v[piv] = -(dot / &p);
    (false, Vec::new(), Some(v))
}

fn quadratic_form(a: &[Vec<Rat>], v: &[Rat]) -> Rat {
    let n = a.len();
    let mut acc = Rat::zero();
    for i in 0..n {
        if v[i].is_zero() {
            continue;
        }
        for j in 0..n {
            if !v[j].is_zero() {
                acc += &v[i] * &(&a[i][j] * &v[j]);
            }
        }
    }
    acc
}

/// Builds the Hankel matrix `(a_{i+j})_{i,j=1..N}` from `seq` (0-indexed:
/// `seq[t]` is `a_{t+1}`) and decides positive semidefiniteness exactly.
pub fn is_conditionally_positive_definite(seq: &[Rat], order: usize) -> Result<HankelReport> {
    if seq.len() < 2 * order {
        return Err(Error::Truncation {
            need: 2 * order,
            have: seq.len(),
        });
    }
    // seq[t] holds a_{t+1}, so the (i,j) entry a_{i+j} is seq[i+j-1].
    let a: Vec<Vec<Rat>> = (1..=order)
        .map(|i| (1..=order).map(|j| seq[i + j - 1].clone()).collect())
        .collect();
    let leading_minors: Vec<Rat> = (1..=order)
        .map(|k| {
            let sub: Vec<Vec<Rat>> = a[..k].iter().map(|row| row[..k].to_vec()).collect();
            det_exact(&sub)
        })
        .collect();
    let (psd, pivots, witness) = psd_decide(&a);
    let witness_value = witness.as_ref().map(|v| quadratic_form(&a, v));
    if let Some(wv) = &witness_value {
        debug_assert!(wv.is_negative(), "witness must certify v^T A v < 0");
    }
    let rank = pivots.len();
    Ok(HankelReport {
        order,
        entries: a,
        psd,
        leading_minors,
        pivots,
        rank,
        witness_vector: witness,
        witness_value,
    })
}

// ---------------------------------------------------------------------------
// FSD / FID criteria at cumulant level
// ---------------------------------------------------------------------------

fn hankel_check_report(
    check: &str,
    seq: &[Rat],
    order: usize,
    sequence_name: &str,
) -> Result<(CheckReport, HankelReport)> {
    let hankel = is_conditionally_positive_definite(seq, order)?;
    let verdict = if hankel.psd {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let margin = hankel
        .witness_value
        .as_ref()
        .map(rat_to_f64)
        .unwrap_or(0.0);
    let mut notes = vec![format!(
        "exact rational Hankel test of {{{sequence_name}}} at order {order}"
    )];
    if hankel.psd {
        notes.push(
            "consistent-with-FSD/FID at this order; equivalence to the property itself holds \
             only under the compact-support hypothesis"
                .into(),
        );
    } else {
        notes.push(format!(
            "witness vector certifies v^T A v = {} < 0",
            hankel
                .witness_value
                .as_ref()
                .map(rat_display)
                .unwrap_or_default()
        ));
    }
    let report = CheckReport {
        check: check.into(),
        verdict,
        margin,
        witness: None,
        tolerance: 0.0,
        grid: GridInfo::Hankel { order },
        evaluation_failures: 0,
        notes,
    };
    Ok((report, hankel))
}

/// Corollary-level FSD test: `{n k_n}` must be conditionally positive
/// definite. A failing Hankel matrix disproves FSD outright; a passing one
/// is equivalent to FSD only for compactly supported measures, and the
/// report's notes carry that qualifier.
pub fn fsd_cumulant_criterion(
    m: &MomentSequence,
    order: usize,
) -> Result<(CheckReport, HankelReport)> {
    if m.order() < 2 * order {
        return Err(Error::Truncation {
            need: 2 * order,
            have: m.order(),
        });
    }
    let kappa = free_cumulants_from_moments(m)?;
    let seq: Vec<Rat> = kappa
        .entries()
        .iter()
        .enumerate()
        .map(|(i, k)| k * rat_i64(i as i64 + 1))
        .collect();
    hankel_check_report("fsd-cumulant-hankel", &seq, order, "n kappa_n")
}

/// FID test at cumulant level: `{k_n}` conditionally positive definite
/// (equivalent to FID for compactly supported measures).
pub fn fid_cumulant_criterion(
    m: &MomentSequence,
    order: usize,
) -> Result<(CheckReport, HankelReport)> {
    if m.order() < 2 * order {
        return Err(Error::Truncation {
            need: 2 * order,
            have: m.order(),
        });
    }
    let kappa = free_cumulants_from_moments(m)?;
    hankel_check_report(
        "fid-cumulant-hankel",
        kappa.entries(),
        order,
        "kappa_n",
    )
}

// ---------------------------------------------------------------------------
// Exponential growth diagnostic
// ---------------------------------------------------------------------------

/// Diagnostic growth estimate for `|k_n| <= c^n`: per-prefix values of
/// `max_{n <= N} |k_n|^{1/n}`. Compact support corresponds to a bounded
/// estimate as N grows; no verdict is attached.
#[derive(Debug, Clone, Serialize)]
pub struct GrowthEstimate {
    /// `(N, max_{n<=N} |k_n|^{1/n})` for each tested prefix length.
    pub per_prefix: Vec<(usize, f64)>,
    /// Estimate at the longest prefix.
    pub c_estimate: f64,
    /// Minimum over tested prefixes.
    pub min_prefix_estimate: f64,
}

pub fn exponential_growth_check(k: &FreeCumulantSequence) -> Result<GrowthEstimate> {
    if k.order() < 4 {
        return Err(Error::ParameterDomain(
            "growth check needs at least 4 cumulants".into(),
        ));
    }
    let mut per_prefix = Vec::new();
    let mut running: f64 = 0.0;
    for n in 1..=k.order() {
        let v = rat_to_f64(&k.entry(n).abs()).powf(1.0 / n as f64);
        running = running.max(v);
        if n >= 4 {
            per_prefix.push((n, running));
        }
    }
    let c_estimate = per_prefix.last().unwrap().1;
    let min_prefix_estimate = per_prefix
        .iter()
        .map(|&(_, v)| v)
        .fold(f64::INFINITY, f64::min);
    Ok(GrowthEstimate {
        per_prefix,
        c_estimate,
        min_prefix_estimate,
    })
}
