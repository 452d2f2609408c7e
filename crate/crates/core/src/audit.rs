//! Numeric evaluation of the inequalities behind the finiteness argument.
//!
//! Nothing here proves anything. Each check evaluates both sides of one
//! inequality at concrete parameters and records the values, the margin and
//! whether the inequality held. Proven statements (the Chebyshev and Mertens
//! bounds, the window lemmas for genuine solutions) should never fail; a
//! failure there points at a bug. The explicit abc inequality is conjectural
//! and is only ever recorded.

use std::fmt;
use std::ops::RangeInclusive;

use num_bigint::BigUint;
use num_integer::Integer;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::equations::DeltaForm;
use crate::factorint::{
    self, largest_prime_factor_table, radical_table, shared_table, smallest_prime_factor_table,
    CompensatedSum,
};
use crate::par;

/// Relative slack for non-strict real comparisons.
pub const COMPARISON_SLACK: f64 = 1e-9;

/// Largest `ν` the prime-sum audits will sieve to.
pub const AUDIT_CAPACITY: f64 = 1e8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AuditError {
    #[error("range bound {0} must be a finite number >= 1")]
    BadBound(f64),
    #[error("bound {requested} exceeds sieve capacity {capacity}")]
    Capacity { requested: f64, capacity: f64 },
    #[error("empty or inverted range {lo}..={hi}")]
    BadRange { lo: u64, hi: u64 },
    #[error("k1 must be at least {min}, got {got}")]
    K1TooSmall { min: u64, got: u64 },
    #[error("the Δ-form identity does not hold")]
    NotHolding,
    #[error("the Δ-form has no leftover factorials")]
    NoLeftover,
    #[error("{0} must be positive")]
    NonPositive(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckId {
    /// `θ(p) < 1.00008·p`.
    Theta,
    /// `Σ_{p≤ν} log p / p < log ν`.
    Mertens,
    /// `a·log a − a ≤ log a!`.
    StirlingLower,
    /// `P(m₁+i) < m₁+i`, i.e. the window term is composite.
    WindowComposite,
    /// `k₁ ≤ m₁`.
    WindowHeadSize,
    /// `log a! ≤ (Σ kⱼ)·log(2m₁)`.
    WindowLogFactorial,
    /// `a·log a − a ≤ (Σ kⱼ)·log(2m₁)`.
    WindowStirling,
    /// `P(Δ(x,k)) > (2/7)·k·log k`.
    ErdosPDelta,
    /// `c < N(abc)^{7/4}`, compared as logs; `ok` is decided exactly.
    AbcExplicit,
    /// `Σ log N(m₁+i) ≤ 1.00008·a₂ + k₁·log k₁`.
    WindowRadicalProduct,
    /// `log N(m₁+j₂) ≤ Σ log N(m₁+i) / (k₁−1)`.
    SecondRadical,
    /// `log m₁ ≤ (7/4)(2.00016·a₂/(k₁−1) + 2k₁·log k₁/(k₁−1) + log k₁)`.
    AbcLogBound,
    /// The multiplied-through form `k₁·log m₁ ≤ (7/4)(…)`.
    ChainScaled,
    /// `a₂ > (2/7)·k₁·log k₁`, evaluated for `k₁ ≥ κ`.
    ChainLowerA2,
    /// Raw ratio `k₁·log k₁ / a₂`: the smallest admissible linear constant.
    ChainImpliedC1,
    /// Raw ratio `k_max·log m₁ / a₂` on the branch `k₁ < k_max`.
    ChainImpliedC9,
}

impl CheckId {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckId::Theta => "theta",
            CheckId::Mertens => "mertens",
            CheckId::StirlingLower => "stirling_lower",
            CheckId::WindowComposite => "window_composite",
            CheckId::WindowHeadSize => "window_head_size",
            CheckId::WindowLogFactorial => "window_log_factorial",
            CheckId::WindowStirling => "window_stirling",
            CheckId::ErdosPDelta => "erdos_pdelta",
            CheckId::AbcExplicit => "abc_explicit",
            CheckId::WindowRadicalProduct => "window_radical_product",
            CheckId::SecondRadical => "second_radical",
            CheckId::AbcLogBound => "abc_log_bound",
            CheckId::ChainScaled => "chain_scaled",
            CheckId::ChainLowerA2 => "chain_lower_a2",
            CheckId::ChainImpliedC1 => "chain_implied_c1",
            CheckId::ChainImpliedC9 => "chain_implied_c9",
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Param {
    Int(u64),
    Real(f64),
}

impl Serialize for Param {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match *self {
            Param::Int(v) => s.serialize_u64(v),
            Param::Real(v) => s.serialize_f64(v),
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Int(v) => write!(f, "{v}"),
            Param::Real(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditFinding {
    pub check: CheckId,
    pub params: Vec<(&'static str, Param)>,
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
    /// `rhs − lhs`, except for the raw-ratio checks where it is the ratio.
    pub margin: f64,
}

impl AuditFinding {
    fn strict(check: CheckId, params: Vec<(&'static str, Param)>, lhs: f64, rhs: f64) -> Self {
        AuditFinding {
            check,
            params,
            lhs,
            rhs,
            ok: lhs < rhs,
            margin: rhs - lhs,
        }
    }

    fn non_strict(check: CheckId, params: Vec<(&'static str, Param)>, lhs: f64, rhs: f64) -> Self {
        AuditFinding {
            check,
            params,
            lhs,
            rhs,
            ok: lhs <= rhs + COMPARISON_SLACK * rhs.abs().max(1.0),
            margin: rhs - lhs,
        }
    }

    /// `params` flattened as `name=value;name=value`.
    pub fn params_string(&self) -> String {
        self.params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

pub fn violations(findings: &[AuditFinding]) -> usize {
    findings.iter().filter(|f| !f.ok).count()
}

fn sieve_bound(nu_max: f64) -> Result<Option<u64>, AuditError> {
    if !nu_max.is_finite() || nu_max < 1.0 {
        return Err(AuditError::BadBound(nu_max));
    }
    if nu_max > AUDIT_CAPACITY {
        return Err(AuditError::Capacity {
            requested: nu_max,
            capacity: AUDIT_CAPACITY,
        });
    }
    Ok((nu_max >= 2.0).then(|| nu_max.floor() as u64))
}

/// `θ(p) < 1.00008·p` at every prime `p ≤ ν_max`. Between primes the left
/// side is constant and the right side grows, so primes are the only
/// points that can fail.
pub fn audit_theta(nu_max: f64) -> Result<Vec<AuditFinding>, AuditError> {
    let Some(bound) = sieve_bound(nu_max)? else {
        return Ok(Vec::new());
    };
    let table = shared_table(bound);
    let mut acc = CompensatedSum::default();
    Ok(table
        .primes_up_to(bound)
        .iter()
        .map(|&p| {
            acc.add((p as f64).ln());
            AuditFinding::strict(
                CheckId::Theta,
                vec![("nu", Param::Int(p))],
                acc.value(),
                1.00008 * p as f64,
            )
        })
        .collect())
}

/// `Σ_{p≤ν} log p / p < log ν` at every prime `p ≤ ν_max` and at `ν_max`
/// itself.
pub fn audit_mertens(nu_max: f64) -> Result<Vec<AuditFinding>, AuditError> {
    let Some(bound) = sieve_bound(nu_max)? else {
        return Ok(Vec::new());
    };
    let table = shared_table(bound);
    let mut acc = CompensatedSum::default();
    let primes = table.primes_up_to(bound);
    let mut out: Vec<AuditFinding> = primes
        .iter()
        .map(|&p| {
            acc.add((p as f64).ln() / p as f64);
            AuditFinding::strict(
                CheckId::Mertens,
                vec![("nu", Param::Int(p))],
                acc.value(),
                (p as f64).ln(),
            )
        })
        .collect();
    if primes.last().map(|&p| p as f64) != Some(nu_max) {
        out.push(AuditFinding::strict(
            CheckId::Mertens,
            vec![("nu", Param::Real(nu_max))],
            acc.value(),
            nu_max.ln(),
        ));
    }
    Ok(out)
}

/// `a·log a − a ≤ log a!` for `2 ≤ a ≤ n_max`, with `log a!` summed term
/// by term.
pub fn audit_stirling_lower(n_max: u64) -> Result<Vec<AuditFinding>, AuditError> {
    if n_max < 2 {
        return Err(AuditError::BadRange { lo: 2, hi: n_max });
    }
    let mut log_fact = CompensatedSum::default();
    Ok((2..=n_max)
        .map(|a| {
            let x = a as f64;
            log_fact.add(x.ln());
            AuditFinding::non_strict(
                CheckId::StirlingLower,
                vec![("a", Param::Int(a))],
                x * x.ln() - x,
                log_fact.value(),
            )
        })
        .collect())
}

fn log_factorial(a: u64) -> f64 {
    (2..=a)
        .map(|i| (i as f64).ln())
        .collect::<CompensatedSum>()
        .value()
}

/// Window properties every genuine solution must have: no prime among
/// `m₁, …, m₁+k₁−1`, `m₁ ≥ k₁`, and the two-sided size bound on the
/// largest leftover entry.
pub fn audit_solution_window(df: &DeltaForm) -> Result<Vec<AuditFinding>, AuditError> {
    let head = df.head();
    if head.k < 2 {
        return Err(AuditError::K1TooSmall {
            min: 2,
            got: head.k,
        });
    }
    if !df.identity_holds() {
        return Err(AuditError::NotHolding);
    }
    let a = df.max_leftover().ok_or(AuditError::NoLeftover)?;
    let mut out = Vec::with_capacity(head.k as usize + 3);
    for i in 0..head.k {
        let x = head.m + i;
        let p = factorint::largest_prime_factor(x).expect("window terms are positive");
        out.push(AuditFinding::strict(
            CheckId::WindowComposite,
            vec![("m", Param::Int(x))],
            p as f64,
            x as f64,
        ));
    }
    out.push(AuditFinding::non_strict(
        CheckId::WindowHeadSize,
        vec![("m1", Param::Int(head.m)), ("k1", Param::Int(head.k))],
        head.k as f64,
        head.m as f64,
    ));
    let af = a as f64;
    let rhs = df.k_sum() as f64 * (2.0 * head.m as f64).ln();
    let params = vec![
        ("a", Param::Int(a)),
        ("m1", Param::Int(head.m)),
        ("k_sum", Param::Int(df.k_sum())),
    ];
    out.push(AuditFinding::non_strict(
        CheckId::WindowLogFactorial,
        params.clone(),
        log_factorial(a),
        rhs,
    ));
    out.push(AuditFinding::non_strict(
        CheckId::WindowStirling,
        params,
        af * af.ln() - af,
        rhs,
    ));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErdosRow {
    pub k: u64,
    pub windows: usize,
    pub min_ratio: f64,
    pub x_at_min: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErdosScan {
    /// One finding per all-composite window, ordered by `(k, x)`.
    pub findings: Vec<AuditFinding>,
    /// `(ratio, x, k)` at the overall minimum.
    pub min: Option<(f64, u64, u64)>,
    /// Minimum ratio per window length (lengths without eligible windows omitted).
    pub per_k: Vec<ErdosRow>,
}

/// `P(Δ(x,k)) / ((2/7)·k·log k)` over every window `x, …, x+k−1` made
/// entirely of composites. There is no pass/fail: the threshold beyond
/// which the bound is claimed is not quantified.
pub fn audit_erdos_pdelta(
    x_range: RangeInclusive<u64>,
    k_range: RangeInclusive<u64>,
) -> Result<ErdosScan, AuditError> {
    let (x_lo, x_hi) = (*x_range.start(), *x_range.end());
    let (k_lo, k_hi) = (*k_range.start(), *k_range.end());
    if x_lo > x_hi || x_lo < 1 {
        return Err(AuditError::BadRange { lo: x_lo, hi: x_hi });
    }
    if k_lo > k_hi || k_lo < 2 {
        return Err(AuditError::BadRange { lo: k_lo, hi: k_hi });
    }
    let top = (x_hi + k_hi - 1) as usize;
    let lpf = largest_prime_factor_table(top);
    // primes_before[n] = number of primes < n
    let mut primes_before = vec![0u32; top + 2];
    for n in 1..=top + 1 {
        let prev = n - 1;
        let is_p = prev >= 2 && lpf[prev] == prev as u64;
        primes_before[n] = primes_before[n - 1] + u32::from(is_p);
    }

    let per_k: Vec<Vec<AuditFinding>> = par::map_range(k_lo..k_hi + 1, |k| {
        let threshold = 2.0 / 7.0 * k as f64 * (k as f64).ln();
        (x_lo.max(2)..=x_hi)
            .filter(|&x| {
                let end = (x + k) as usize;
                primes_before[end] == primes_before[x as usize]
            })
            .map(|x| {
                let p = (x..x + k).map(|y| lpf[y as usize]).max().unwrap();
                AuditFinding::strict(
                    CheckId::ErdosPDelta,
                    vec![("x", Param::Int(x)), ("k", Param::Int(k))],
                    threshold,
                    p as f64,
                )
            })
            .collect()
    });

    let ratio = |f: &AuditFinding| f.rhs / f.lhs;
    let mut rows = Vec::new();
    let mut min: Option<(f64, u64, u64)> = None;
    for (k, group) in (k_lo..=k_hi).zip(&per_k) {
        let Some(best) = group.iter().min_by(|a, b| ratio(a).total_cmp(&ratio(b))) else {
            continue;
        };
        let x = match best.params[0].1 {
            Param::Int(x) => x,
            Param::Real(_) => unreachable!(),
        };
        let r = ratio(best);
        rows.push(ErdosRow {
            k,
            windows: group.len(),
            min_ratio: r,
            x_at_min: x,
        });
        if min.is_none_or(|(m, _, _)| r < m) {
            min = Some((r, x, k));
        }
    }
    Ok(ErdosScan {
        findings: per_k.into_iter().flatten().collect(),
        min,
        per_k: rows,
    })
}

/// Two smallest-radical terms of a window turned into a coprime triple
/// `a + b = c`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbcTripleReport {
    pub m1: u64,
    pub k1: u64,
    pub window_radicals: Vec<u64>,
    pub j1: u64,
    pub j2: u64,
    pub d: u64,
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub radical_abc: u64,
    pub quality: f64,
    pub explicit_ok: bool,
    /// Window inequalities, present when `a2` was supplied.
    pub findings: Vec<AuditFinding>,
}

trait Factorizer {
    fn distinct_primes(&self, n: u64) -> Vec<u64>;
    fn radical(&self, n: u64) -> u64 {
        self.distinct_primes(n).iter().product()
    }
}

struct TrialDivision;

impl Factorizer for TrialDivision {
    fn distinct_primes(&self, n: u64) -> Vec<u64> {
        shared_table(n.isqrt() + 1)
            .factorize(n)
            .into_iter()
            .map(|(p, _)| p)
            .collect()
    }
}

struct SieveTables {
    spf: Vec<u32>,
    rad: Vec<u64>,
}

impl SieveTables {
    fn new(limit: usize) -> Self {
        SieveTables {
            spf: smallest_prime_factor_table(limit),
            rad: radical_table(limit),
        }
    }
}

impl Factorizer for SieveTables {
    fn distinct_primes(&self, mut n: u64) -> Vec<u64> {
        let mut out = Vec::new();
        while n > 1 {
            let p = u64::from(self.spf[n as usize]);
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        out
    }

    fn radical(&self, n: u64) -> u64 {
        self.rad[n as usize]
    }
}

/// Exact `c < r^{7/4}`, i.e. `c⁴ < r⁷`.
pub fn explicit_abc_holds(c: u64, radical_abc: u64) -> bool {
    BigUint::from(c).pow(4) < BigUint::from(radical_abc).pow(7)
}

fn window_report(
    m1: u64,
    k1: u64,
    a2: Option<u64>,
    fz: &impl Factorizer,
) -> Result<AbcTripleReport, AuditError> {
    if k1 < 3 {
        return Err(AuditError::K1TooSmall { min: 3, got: k1 });
    }
    if m1 < 1 {
        return Err(AuditError::NonPositive("m1"));
    }
    let radicals: Vec<u64> = (0..k1).map(|i| fz.radical(m1 + i)).collect();
    let mut order: Vec<u64> = (0..k1).collect();
    order.sort_by_key(|&i| (radicals[i as usize], i));
    let (j1, j2) = (order[0], order[1]);
    let (u, v) = (m1 + j1, m1 + j2);
    let d = u.gcd(&v);
    let (u, v) = (u / d, v / d);
    let b = j1.abs_diff(j2) / d;
    let (a, c) = (u.min(v), u.max(v));
    debug_assert_eq!(a + b, c);

    let mut primes: Vec<u64> = [a, b, c]
        .iter()
        .flat_map(|&x| fz.distinct_primes(x))
        .collect();
    primes.sort_unstable();
    primes.dedup();
    let radical_abc: u64 = primes.iter().product();
    let explicit_ok = explicit_abc_holds(c, radical_abc);
    let quality = (c as f64).ln() / (radical_abc as f64).ln();

    let mut findings = vec![AuditFinding {
        check: CheckId::AbcExplicit,
        params: vec![("m1", Param::Int(m1)), ("k1", Param::Int(k1))],
        lhs: (c as f64).ln(),
        rhs: 1.75 * (radical_abc as f64).ln(),
        ok: explicit_ok,
        margin: 1.75 * (radical_abc as f64).ln() - (c as f64).ln(),
    }];
    if let Some(a2) = a2 {
        findings.extend(window_bounds(m1, k1, a2, &radicals, radicals[j2 as usize]));
    }

    Ok(AbcTripleReport {
        m1,
        k1,
        window_radicals: radicals,
        j1,
        j2,
        d,
        a,
        b,
        c,
        radical_abc,
        quality,
        explicit_ok,
        findings,
    })
}

fn window_bounds(m1: u64, k1: u64, a2: u64, radicals: &[u64], second: u64) -> Vec<AuditFinding> {
    let (m, k, a2f) = (m1 as f64, k1 as f64, a2 as f64);
    let params = vec![
        ("m1", Param::Int(m1)),
        ("k1", Param::Int(k1)),
        ("a2", Param::Int(a2)),
    ];
    let log_prod = radicals
        .iter()
        .map(|&r| (r as f64).ln())
        .collect::<CompensatedSum>()
        .value();
    let klogk = k * k.ln();
    vec![
        AuditFinding::non_strict(
            CheckId::WindowRadicalProduct,
            params.clone(),
            log_prod,
            1.00008 * a2f + klogk,
        ),
        AuditFinding::non_strict(
            CheckId::SecondRadical,
            params.clone(),
            (second as f64).ln(),
            log_prod / (k - 1.0),
        ),
        AuditFinding::non_strict(
            CheckId::AbcLogBound,
            params.clone(),
            m.ln(),
            1.75 * (2.00016 * a2f / (k - 1.0) + 2.0 * klogk / (k - 1.0) + k.ln()),
        ),
        chain_scaled(params, m1, k1, a2),
    ]
}

fn chain_scaled(params: Vec<(&'static str, Param)>, m1: u64, k1: u64, a2: u64) -> AuditFinding {
    let (m, k, a2f) = (m1 as f64, k1 as f64, a2 as f64);
    let klogk = k * k.ln();
    AuditFinding::non_strict(
        CheckId::ChainScaled,
        params,
        k * m.ln(),
        1.75 * (k * 2.00016 * a2f / (k - 1.0) + 2.0 * k * klogk / (k - 1.0) + klogk),
    )
}

/// Smallest-radical triple for the window `m₁, …, m₁+k₁−1` (ties go to the
/// smaller offset). With `a2`, also evaluates the window bounds that feed
/// the abc step.
pub fn abc_window_report(m1: u64, k1: u64, a2: Option<u64>) -> Result<AbcTripleReport, AuditError> {
    window_report(m1, k1, a2, &TrialDivision)
}

/// Aggregate of [`abc_scan`]: every report is checked structurally as it is
/// produced.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AbcScanSummary {
    pub windows: u64,
    pub structural_failures: u64,
    pub selection_failures: u64,
    /// Windows where `c < N(abc)^{7/4}` failed, as `(m1, k1)`.
    pub explicit_violations: Vec<(u64, u64)>,
    /// `(quality, m1, k1)` of the best triple.
    pub max_quality: Option<(f64, u64, u64)>,
}

/// Structural obligations of a report: the triple is coprime, sums
/// correctly, matches the window, its radical factors as a product of
/// radicals, and the chosen pair is minimal in the window.
pub fn report_is_structurally_valid(r: &AbcTripleReport) -> bool {
    let coprime = r.a.gcd(&r.b) == 1 && r.a.gcd(&r.c) == 1 && r.b.gcd(&r.c) == 1;
    let terms = {
        let (u, v) = ((r.m1 + r.j1) / r.d, (r.m1 + r.j2) / r.d);
        (u.min(v), u.max(v)) == (r.a, r.c)
            && (r.m1 + r.j1) % r.d == 0
            && (r.m1 + r.j2) % r.d == 0
            && r.b * r.d == r.j1.abs_diff(r.j2)
    };
    let rad = |x| factorint::radical(x).expect("positive");
    r.a + r.b == r.c
        && coprime
        && terms
        && r.radical_abc == rad(r.a) * rad(r.b) * rad(r.c)
        && r.explicit_ok == explicit_abc_holds(r.c, r.radical_abc)
}

pub fn selection_is_minimal(r: &AbcTripleReport) -> bool {
    let (n1, n2) = (
        r.window_radicals[r.j1 as usize],
        r.window_radicals[r.j2 as usize],
    );
    r.j1 != r.j2
        && n1 <= n2
        && r.window_radicals
            .iter()
            .enumerate()
            .filter(|&(i, _)| i as u64 != r.j1 && i as u64 != r.j2)
            .all(|(_, &x)| x >= n2)
}

/// [`abc_window_report`] over every `1 ≤ m₁ ≤ m1_max` and `k₁ ∈ k_range`.
pub fn abc_scan(m1_max: u64, k_range: RangeInclusive<u64>) -> Result<AbcScanSummary, AuditError> {
    let (k_lo, k_hi) = (*k_range.start(), *k_range.end());
    if k_lo < 3 {
        return Err(AuditError::K1TooSmall { min: 3, got: k_lo });
    }
    if k_lo > k_hi || m1_max < 1 {
        return Err(AuditError::BadRange { lo: k_lo, hi: k_hi });
    }
    let tables = SieveTables::new((m1_max + k_hi) as usize);
    let parts = par::map_range(1..m1_max + 1, |m1| {
        let mut s = AbcScanSummary::default();
        for k1 in k_lo..=k_hi {
            let r = window_report(m1, k1, None, &tables).expect("k1 >= 3");
            s.windows += 1;
            let rad = |x: u64| tables.rad[x as usize];
            let structural = r.a + r.b == r.c
                && r.a.gcd(&r.b) == 1
                && r.b.gcd(&r.c) == 1
                && r.a.gcd(&r.c) == 1
                && r.radical_abc == rad(r.a) * rad(r.b) * rad(r.c);
            if !structural {
                s.structural_failures += 1;
            }
            if !selection_is_minimal(&r) {
                s.selection_failures += 1;
            }
            if !r.explicit_ok {
                s.explicit_violations.push((m1, k1));
            }
            if s.max_quality.is_none_or(|(q, _, _)| r.quality > q) {
                s.max_quality = Some((r.quality, m1, k1));
            }
        }
        s
    });
    let mut total = AbcScanSummary::default();
    for s in parts {
        total.windows += s.windows;
        total.structural_failures += s.structural_failures;
        total.selection_failures += s.selection_failures;
        total.explicit_violations.extend(s.explicit_violations);
        if let Some(q) = s.max_quality {
            if total.max_quality.is_none_or(|(best, _, _)| q.0 > best) {
                total.max_quality = Some(q);
            }
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainBranch {
    /// `s = 1`: no second gap to compare.
    SingleBlock,
    /// `max(k₂..k_s) ≤ k₁`.
    TailNotLarger,
    /// `k₁ < max(k₂..k_s) ≤ c·k₁`.
    TailLarger,
    /// `max(k₂..k_s) > c·k₁`: outside `N(c)`, no branch applies.
    OutsideRatio,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainAudit {
    pub branch: ChainBranch,
    pub findings: Vec<AuditFinding>,
}

/// Evaluates the proof-chain inequalities at a Δ-form. `kappa` is the
/// caller's choice of the threshold beyond which the `2/7` lower bound on
/// `a₂` is evaluated; the linear constants are reported as raw ratios.
pub fn audit_proof_chain(df: &DeltaForm, c: u64, kappa: u64) -> Result<ChainAudit, AuditError> {
    let head = df.head();
    if head.k < 2 {
        return Err(AuditError::K1TooSmall {
            min: 2,
            got: head.k,
        });
    }
    if c == 0 {
        return Err(AuditError::NonPositive("c"));
    }
    if kappa == 0 {
        return Err(AuditError::NonPositive("kappa"));
    }
    let a2 = df.max_leftover().ok_or(AuditError::NoLeftover)?;
    let (m1, k1) = (head.m, head.k);
    let branch = match df.max_tail_k() {
        None => ChainBranch::SingleBlock,
        Some(k) if k <= k1 => ChainBranch::TailNotLarger,
        Some(k) if u128::from(k) <= u128::from(c) * u128::from(k1) => ChainBranch::TailLarger,
        Some(_) => ChainBranch::OutsideRatio,
    };
    let params = vec![
        ("m1", Param::Int(m1)),
        ("k1", Param::Int(k1)),
        ("a2", Param::Int(a2)),
        ("c", Param::Int(c)),
        ("kappa", Param::Int(kappa)),
    ];
    let kf = k1 as f64;
    let klogk = kf * kf.ln();
    let a2f = a2 as f64;
    let mut findings = vec![chain_scaled(params.clone(), m1, k1, a2)];
    if k1 >= kappa {
        findings.push(AuditFinding::strict(
            CheckId::ChainLowerA2,
            params.clone(),
            2.0 / 7.0 * klogk,
            a2f,
        ));
    }
    findings.push(AuditFinding {
        check: CheckId::ChainImpliedC1,
        params: params.clone(),
        lhs: klogk,
        rhs: a2f,
        ok: true,
        margin: klogk / a2f,
    });
    if branch == ChainBranch::TailLarger {
        let kmax = df.max_tail_k().expect("tail present") as f64;
        let lhs = kmax * (m1 as f64).ln();
        findings.push(AuditFinding {
            check: CheckId::ChainImpliedC9,
            params: params.clone(),
            lhs,
            rhs: a2f,
            ok: true,
            margin: lhs / a2f,
        });
    }
    let rhs = df.k_sum() as f64 * (2.0 * m1 as f64).ln();
    findings.push(AuditFinding::non_strict(
        CheckId::WindowStirling,
        params,
        a2f * a2f.ln() - a2f,
        rhs,
    ));
    Ok(ChainAudit { branch, findings })
}
