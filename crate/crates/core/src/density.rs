//! Volume of the ordering region behind the positive-density result.
//!
//! With `xⱼ = nⱼ/N` and `yᵢ = aᵢ/N` the region is
//!
//! ```text
//! x₁ ≥ … ≥ x_s,  y₁ ≥ … ≥ y_t,  x₁ > y₁,  xⱼ > y_{iⱼ},
//! max_j (xⱼ − y_{iⱼ}) ≤ c·(x₁ − y₁)
//! ```
//!
//! inside `[0,1]^{s+t}`. This is the region of gap constraints only; no
//! equation is checked, the solution set itself has density zero.
//!
//! Three independent values are available: the closed form for `t = 3,
//! s = 2`, a seeded Monte Carlo mean, and a nested-integration oracle.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::par;

/// Largest `s + t` the quadrature oracle accepts.
pub const QUADRATURE_MAX_DIM: usize = 6;
pub const DEFAULT_RESOLUTION: usize = 8;

/// Samples handled per work item in [`mc_density`].
const MC_CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DensityError {
    #[error("c must be a positive integer")]
    ZeroC,
    #[error("c must be a finite real >= 1, got {0}")]
    BadC(f64),
    #[error("need t >= 2, got {0}")]
    TooFewLhs(usize),
    #[error("need s >= 1")]
    NoRhs,
    #[error("need s <= t, got s = {s}, t = {t}")]
    SExceedsT { s: usize, t: usize },
    #[error("pairing must list {expected} distinct indices in 2..={t}, got {got:?}")]
    BadPairing {
        expected: usize,
        t: usize,
        got: Vec<usize>,
    },
    #[error("the gap-exceeded region needs s >= 2")]
    ExceededNeedsTail,
    #[error("point has dimension {got}, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("quadrature is limited to s + t <= {max}, got {got}")]
    DimensionGuard { max: usize, got: usize },
    #[error("{0} must be positive")]
    NonPositive(&'static str),
}

/// `1/60 − 1/(120c)`, the closed form for `t = 3`, `s = 2`, pairing `i₂ = 2`.
pub fn analytic_density_t3s2(c: u64) -> Result<Ratio<u128>, DensityError> {
    if c == 0 {
        return Err(DensityError::ZeroC);
    }
    Ok(Ratio::new(1, 60) - Ratio::new(1, 120 * u128::from(c)))
}

/// Which side of the gap ratio constraint to measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioMode {
    /// `max gap ≤ c·(x₁ − y₁)`: the region itself.
    Bounded,
    /// No ratio constraint.
    Dropped,
    /// `max gap > c·(x₁ − y₁)`: the part cut away from the unconstrained region.
    Exceeded,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionSpec {
    t: usize,
    s: usize,
    c: f64,
    /// `i₂, …, i_s`, 1-based indices into the `y`s.
    pairing: Vec<usize>,
    mode: RatioMode,
}

impl RegionSpec {
    /// Region with the identity pairing `iⱼ = j`.
    pub fn new(t: usize, s: usize, c: f64) -> Result<Self, DensityError> {
        Self::with_pairing(t, s, c, (2..=s).collect())
    }

    pub fn with_pairing(
        t: usize,
        s: usize,
        c: f64,
        pairing: Vec<usize>,
    ) -> Result<Self, DensityError> {
        if t < 2 {
            return Err(DensityError::TooFewLhs(t));
        }
        if s < 1 {
            return Err(DensityError::NoRhs);
        }
        if s > t {
            return Err(DensityError::SExceedsT { s, t });
        }
        if !c.is_finite() || c < 1.0 {
            return Err(DensityError::BadC(c));
        }
        let mut seen = pairing.clone();
        seen.sort_unstable();
        seen.dedup();
        if pairing.len() != s - 1
            || seen.len() != pairing.len()
            || pairing.iter().any(|&i| i < 2 || i > t)
        {
            return Err(DensityError::BadPairing {
                expected: s - 1,
                t,
                got: pairing,
            });
        }
        Ok(RegionSpec {
            t,
            s,
            c,
            pairing,
            mode: RatioMode::Bounded,
        })
    }

    pub fn with_mode(mut self, mode: RatioMode) -> Result<Self, DensityError> {
        if mode == RatioMode::Exceeded && self.s < 2 {
            return Err(DensityError::ExceededNeedsTail);
        }
        self.mode = mode;
        Ok(self)
    }

    pub fn t(&self) -> usize {
        self.t
    }
    pub fn s(&self) -> usize {
        self.s
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn pairing(&self) -> &[usize] {
        &self.pairing
    }
    pub fn mode(&self) -> RatioMode {
        self.mode
    }
    pub fn dim(&self) -> usize {
        self.s + self.t
    }

    /// Exact value when a closed form is known.
    pub fn analytic(&self) -> Option<Ratio<u128>> {
        if self.t != 3 || self.s != 2 || self.pairing != [2] {
            return None;
        }
        let c = self.c as u64;
        if c as f64 != self.c {
            return None;
        }
        match self.mode {
            RatioMode::Bounded => analytic_density_t3s2(c).ok(),
            RatioMode::Dropped => Some(Ratio::new(1, 60)),
            RatioMode::Exceeded => Some(Ratio::new(1, 120 * u128::from(c))),
        }
    }
}

/// Membership of `point = (x₁, …, x_s, y₁, …, y_t)`. Orderings within a
/// side are non-strict, comparisons across sides strict.
pub fn indicator(point: &[f64], spec: &RegionSpec) -> Result<bool, DensityError> {
    if point.len() != spec.dim() {
        return Err(DensityError::Dimension {
            expected: spec.dim(),
            got: point.len(),
        });
    }
    Ok(inside(point, spec))
}

fn inside(point: &[f64], spec: &RegionSpec) -> bool {
    let (x, y) = point.split_at(spec.s);
    if x.windows(2).any(|w| w[0] < w[1]) || y.windows(2).any(|w| w[0] < w[1]) {
        return false;
    }
    if x[0] <= y[0] {
        return false;
    }
    let mut max_gap = f64::NEG_INFINITY;
    for (j, &i) in spec.pairing.iter().enumerate() {
        let gap = x[j + 1] - y[i - 1];
        if gap <= 0.0 {
            return false;
        }
        max_gap = max_gap.max(gap);
    }
    let limit = spec.c * (x[0] - y[0]);
    match spec.mode {
        RatioMode::Dropped => true,
        RatioMode::Bounded => max_gap <= limit,
        RatioMode::Exceeded => max_gap > limit,
    }
}

fn serialize_ratio<S: Serializer>(r: &Option<Ratio<u128>>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&format!("{}/{}", r.numer(), r.denom())),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityEstimate {
    #[serde(serialize_with = "serialize_ratio")]
    pub analytic: Option<Ratio<u128>>,
    pub mc_mean: f64,
    pub mc_stderr: f64,
    pub samples: u64,
    pub hits: u64,
    pub seed: u64,
    pub quadrature: Option<f64>,
}

impl fmt::Display for DensityEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.analytic {
            Some(r) => write!(f, "analytic {}/{}", r.numer(), r.denom())?,
            None => write!(f, "analytic n/a")?,
        }
        write!(
            f,
            ", mc {:.6} ± {:.6} ({} samples, seed {})",
            self.mc_mean, self.mc_stderr, self.samples, self.seed
        )?;
        if let Some(q) = self.quadrature {
            write!(f, ", quadrature {q:.9}")?;
        }
        Ok(())
    }
}

#[inline]
fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Hits among samples `lo..hi`. Sample `i` reads 64-bit words
/// `i·dim … i·dim + dim − 1` of the stream keyed by `seed`, so any split
/// of the index range sees the same points.
fn count_hits(spec: &RegionSpec, seed: u64, lo: u64, hi: u64) -> u64 {
    let dim = spec.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_word_pos(u128::from(lo) * dim as u128 * 2);
    let mut point = vec![0.0; dim];
    let mut hits = 0;
    for _ in lo..hi {
        for v in point.iter_mut() {
            *v = unit_f64(rng.next_u64());
        }
        hits += u64::from(inside(&point, spec));
    }
    hits
}

/// Fraction of `samples` uniform points that land in the region.
/// Quadrature is attached when the dimension allows it.
pub fn mc_density(
    spec: &RegionSpec,
    samples: u64,
    seed: u64,
) -> Result<DensityEstimate, DensityError> {
    let mut est = mc_only(spec, samples, seed)?;
    if spec.dim() <= QUADRATURE_MAX_DIM {
        est.quadrature = Some(quadrature_density(spec, DEFAULT_RESOLUTION)?);
    }
    Ok(est)
}

/// [`mc_density`] without the quadrature value.
pub fn mc_only(
    spec: &RegionSpec,
    samples: u64,
    seed: u64,
) -> Result<DensityEstimate, DensityError> {
    if samples == 0 {
        return Err(DensityError::NonPositive("samples"));
    }
    let chunks = samples.div_ceil(MC_CHUNK);
    let hits = par::sum_range(0..chunks, |k| {
        let lo = k * MC_CHUNK;
        count_hits(spec, seed, lo, (lo + MC_CHUNK).min(samples))
    });
    let p = hits as f64 / samples as f64;
    Ok(DensityEstimate {
        analytic: spec.analytic(),
        mc_mean: p,
        mc_stderr: (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
        hits,
        seed,
        quadrature: None,
    })
}

// Nested integration.
//
// Every constraint is homogeneous and x₁ is the largest coordinate, so the
// slice at fixed x₁ is the slice at x₁ = 1 scaled by x₁. The outer x₁ loop
// is numeric; the slice volume is integrated symbolically one variable at
// a time, splitting on which lower and which upper bound is active.

/// `coeffs · z + constant ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
struct Lin {
    coeffs: Vec<f64>,
    constant: f64,
}

const LIN_EPS: f64 = 1e-12;

impl Lin {
    fn var(n: usize, i: usize) -> Self {
        let mut coeffs = vec![0.0; n];
        coeffs[i] = 1.0;
        Lin {
            coeffs,
            constant: 0.0,
        }
    }

    fn constant(n: usize, v: f64) -> Self {
        Lin {
            coeffs: vec![0.0; n],
            constant: v,
        }
    }

    fn sub(&self, other: &Lin) -> Lin {
        Lin {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
            constant: self.constant - other.constant,
        }
    }

    fn scale(&self, k: f64) -> Lin {
        Lin {
            coeffs: self.coeffs.iter().map(|a| a * k).collect(),
            constant: self.constant * k,
        }
    }

    fn is_constant(&self) -> bool {
        self.coeffs.iter().all(|a| a.abs() < LIN_EPS)
    }

    /// Scaled so the largest coefficient has magnitude one.
    fn normalized(&self) -> Lin {
        let m = self
            .coeffs
            .iter()
            .fold(self.constant.abs(), |acc, a| acc.max(a.abs()));
        if m == 0.0 {
            self.clone()
        } else {
            self.scale(1.0 / m)
        }
    }

    fn same_as(&self, other: &Lin) -> bool {
        (self.constant - other.constant).abs() < 1e-10
            && self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .all(|(a, b)| (a - b).abs() < 1e-10)
    }
}

/// Polynomial in the slice variables, monomials keyed by exponent tuples.
#[derive(Debug, Clone, PartialEq)]
struct Poly {
    terms: BTreeMap<Vec<u8>, f64>,
    n: usize,
}

impl Poly {
    fn one(n: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![0; n], 1.0);
        Poly { terms, n }
    }

    fn from_lin(l: &Lin) -> Self {
        let n = l.coeffs.len();
        let mut terms = BTreeMap::new();
        if l.constant != 0.0 {
            terms.insert(vec![0; n], l.constant);
        }
        for (i, &a) in l.coeffs.iter().enumerate() {
            if a != 0.0 {
                let mut e = vec![0; n];
                e[i] = 1;
                terms.insert(e, a);
            }
        }
        Poly { terms, n }
    }

    fn add_scaled(&mut self, other: &Poly, k: f64) {
        for (e, &v) in &other.terms {
            *self.terms.entry(e.clone()).or_insert(0.0) += k * v;
        }
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut terms = BTreeMap::new();
        for (ea, &va) in &self.terms {
            for (eb, &vb) in &other.terms {
                let e: Vec<u8> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *terms.entry(e).or_insert(0.0) += va * vb;
            }
        }
        Poly { terms, n: self.n }
    }

    /// Antiderivative in variable `v`.
    fn integrate(&self, v: usize) -> Poly {
        let terms = self
            .terms
            .iter()
            .map(|(e, &c)| {
                let mut e = e.clone();
                e[v] += 1;
                let k = f64::from(e[v]);
                (e, c / k)
            })
            .collect();
        Poly { terms, n: self.n }
    }

    /// Replaces variable `v` by the linear form `l` (which must not involve `v`).
    fn substitute(&self, v: usize, l: &Lin) -> Poly {
        let base = Poly::from_lin(l);
        let max_deg = self.terms.keys().map(|e| e[v]).max().unwrap_or(0);
        let mut powers = vec![Poly::one(self.n)];
        for k in 1..=max_deg as usize {
            let next = powers[k - 1].mul(&base);
            powers.push(next);
        }
        let mut out = Poly {
            terms: BTreeMap::new(),
            n: self.n,
        };
        for (e, &c) in &self.terms {
            let mut rest = e.clone();
            let k = rest[v] as usize;
            rest[v] = 0;
            let mut mono = BTreeMap::new();
            mono.insert(rest, c);
            out.add_scaled(
                &Poly {
                    terms: mono,
                    n: self.n,
                }
                .mul(&powers[k]),
                1.0,
            );
        }
        out
    }

    fn constant_term(&self) -> f64 {
        self.terms
            .iter()
            .filter(|(e, _)| e.iter().all(|&x| x == 0))
            .map(|(_, &c)| c)
            .sum()
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.abs() > 1e-300);
    }
}

fn push_unique(list: &mut Vec<Lin>, l: Lin) {
    if !list.iter().any(|m| m.same_as(&l)) {
        list.push(l);
    }
}

/// `∫ poly` over `{z : all constraints ≥ 0}` with `alive` variables free.
fn integrate_region(constraints: Vec<Lin>, alive: &[usize], poly: &Poly) -> f64 {
    let mut live = Vec::new();
    for c in constraints {
        let c = c.normalized();
        if c.is_constant() {
            if c.constant < -LIN_EPS {
                return 0.0;
            }
        } else {
            push_unique(&mut live, c);
        }
    }
    if alive.is_empty() {
        return poly.constant_term();
    }
    // Eliminate the variable with the fewest bound pairs.
    let &v = alive
        .iter()
        .min_by_key(|&&v| {
            let lo = live.iter().filter(|c| c.coeffs[v] > LIN_EPS).count();
            let hi = live.iter().filter(|c| c.coeffs[v] < -LIN_EPS).count();
            (lo.max(1) * hi.max(1), v)
        })
        .expect("alive is nonempty");
    let n = poly.n;
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let mut rest = Vec::new();
    for c in live {
        let a = c.coeffs[v];
        if a.abs() < LIN_EPS {
            rest.push(c);
            continue;
        }
        // a·v + r ≥ 0  ⇔  v ≥ −r/a (a > 0)  or  v ≤ r/(−a) (a < 0)
        let mut r = c.clone();
        r.coeffs[v] = 0.0;
        if a > 0.0 {
            push_unique(&mut lower, r.scale(-1.0 / a));
        } else {
            push_unique(&mut upper, r.scale(-1.0 / a));
        }
    }
    if lower.is_empty() {
        lower.push(Lin::constant(n, 0.0));
    }
    if upper.is_empty() {
        upper.push(Lin::constant(n, 1.0));
    }
    let remaining: Vec<usize> = alive.iter().copied().filter(|&w| w != v).collect();
    let anti = poly.integrate(v);
    let mut total = 0.0;
    for (i, lo) in lower.iter().enumerate() {
        for (j, hi) in upper.iter().enumerate() {
            let mut cs = rest.clone();
            for (k, other) in lower.iter().enumerate() {
                if k != i {
                    cs.push(lo.sub(other));
                }
            }
            for (k, other) in upper.iter().enumerate() {
                if k != j {
                    cs.push(other.sub(hi));
                }
            }
            cs.push(hi.sub(lo));
            let mut piece = anti.substitute(v, hi);
            piece.add_scaled(&anti.substitute(v, lo), -1.0);
            piece.prune();
            if piece.terms.is_empty() {
                continue;
            }
            total += integrate_region(cs, &remaining, &piece);
        }
    }
    total
}

/// Constraints of the slice at `x₁ = x1` over the variables
/// `(x₂, …, x_s, y₁, …, y_t)`. `apply_ratio` adds the gap constraints.
fn slice_constraints(spec: &RegionSpec, x1: f64, apply_ratio: bool) -> Vec<Lin> {
    let n = spec.dim() - 1;
    let xv = |j: usize| -> Lin {
        if j == 1 {
            Lin::constant(n, x1)
        } else {
            Lin::var(n, j - 2)
        }
    };
    let yv = |i: usize| Lin::var(n, spec.s - 1 + i - 1);
    let mut cs = Vec::new();
    for j in 1..spec.s {
        cs.push(xv(j).sub(&xv(j + 1)));
    }
    for i in 1..spec.t {
        cs.push(yv(i).sub(&yv(i + 1)));
    }
    cs.push(yv(spec.t));
    cs.push(xv(1).sub(&yv(1)));
    for (k, &i) in spec.pairing.iter().enumerate() {
        let j = k + 2;
        cs.push(xv(j).sub(&yv(i)));
        if apply_ratio {
            // c(x₁ − y₁) − (xⱼ − y_i) ≥ 0
            cs.push(xv(1).sub(&yv(1)).scale(spec.c).sub(&xv(j).sub(&yv(i))));
        }
    }
    cs
}

fn slice_volume(spec: &RegionSpec, x1: f64, apply_ratio: bool) -> f64 {
    let n = spec.dim() - 1;
    let alive: Vec<usize> = (0..n).collect();
    integrate_region(
        slice_constraints(spec, x1, apply_ratio),
        &alive,
        &Poly::one(n),
    )
}

const GL4_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL4_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];
const GL2_NODE: f64 = 0.577_350_269_189_625_8;

/// Composite Gauss–Legendre over `x₁ ∈ [0,1]`: `resolution` cells with
/// the 4-point rule, and the same cells with the 2-point rule.
fn outer_rules(spec: &RegionSpec, resolution: usize, apply_ratio: bool) -> (f64, f64) {
    let h = 1.0 / resolution as f64;
    let mut nodes = Vec::with_capacity(resolution * 6);
    for cell in 0..resolution {
        let mid = (cell as f64 + 0.5) * h;
        for (&z, &w) in GL4_NODES.iter().zip(&GL4_WEIGHTS) {
            nodes.push((false, mid + 0.5 * h * z, 0.5 * h * w));
        }
        for z in [-GL2_NODE, GL2_NODE] {
            nodes.push((true, mid + 0.5 * h * z, 0.5 * h));
        }
    }
    let values = par::map_vec(nodes, |(coarse, x, w)| {
        (coarse, w * slice_volume(spec, x, apply_ratio))
    });
    let mut fine = 0.0;
    let mut coarse = 0.0;
    for (is_coarse, v) in values {
        if is_coarse {
            coarse += v;
        } else {
            fine += v;
        }
    }
    (fine, coarse)
}

/// Quadrature value and a resolution-error estimate (the gap to the
/// lower-order rule on the same cells).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

impl Quadrature {
    /// Strictly positive by more than ten times the resolution error.
    pub fn clearly_positive(&self) -> bool {
        self.value > 0.0 && self.value > 10.0 * self.error
    }
}

pub fn quadrature_with_error(
    spec: &RegionSpec,
    resolution: usize,
) -> Result<Quadrature, DensityError> {
    if spec.dim() > QUADRATURE_MAX_DIM {
        return Err(DensityError::DimensionGuard {
            max: QUADRATURE_MAX_DIM,
            got: spec.dim(),
        });
    }
    if resolution == 0 {
        return Err(DensityError::NonPositive("resolution"));
    }
    let (fine, coarse) = match spec.mode {
        RatioMode::Bounded => outer_rules(spec, resolution, true),
        RatioMode::Dropped => outer_rules(spec, resolution, false),
        RatioMode::Exceeded => {
            let (f0, c0) = outer_rules(spec, resolution, false);
            let (f1, c1) = outer_rules(spec, resolution, true);
            (f0 - f1, c0 - c1)
        }
    };
    Ok(Quadrature {
        value: fine,
        error: (fine - coarse).abs(),
    })
}

/// Deterministic nested-integration estimate of the region volume.
pub fn quadrature_density(spec: &RegionSpec, resolution: usize) -> Result<f64, DensityError> {
    quadrature_with_error(spec, resolution).map(|q| q.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(t: usize, s: usize, c: f64) -> RegionSpec {
        RegionSpec::new(t, s, c).unwrap()
    }

    fn ratio_f64(r: Ratio<u128>) -> f64 {
        *r.numer() as f64 / *r.denom() as f64
    }

    #[test]
    fn closed_form() {
        assert_eq!(analytic_density_t3s2(1), Ok(Ratio::new(1, 120)));
        assert_eq!(analytic_density_t3s2(2), Ok(Ratio::new(1, 80)));
        assert_eq!(analytic_density_t3s2(0), Err(DensityError::ZeroC));
        let far = analytic_density_t3s2(1 << 40).unwrap();
        assert!((ratio_f64(far) - 1.0 / 60.0).abs() < 1e-12);
    }

    #[test]
    fn region_validation() {
        assert!(matches!(
            RegionSpec::new(2, 3, 1.0),
            Err(DensityError::SExceedsT { .. })
        ));
        assert!(matches!(
            RegionSpec::new(1, 1, 1.0),
            Err(DensityError::TooFewLhs(1))
        ));
        assert!(matches!(
            RegionSpec::new(3, 2, 0.5),
            Err(DensityError::BadC(_))
        ));
        assert!(RegionSpec::with_pairing(3, 2, 1.0, vec![1]).is_err());
        assert!(RegionSpec::with_pairing(4, 3, 1.0, vec![3, 3]).is_err());
        assert!(RegionSpec::with_pairing(4, 3, 1.0, vec![4, 2]).is_ok());
        assert!(spec(3, 1, 1.0).with_mode(RatioMode::Exceeded).is_err());
    }

    #[test]
    fn indicator_examples() {
        let s = spec(3, 2, 1.0);
        assert_eq!(indicator(&[0.9, 0.5, 0.6, 0.3, 0.1], &s), Ok(true));
        assert_eq!(indicator(&[0.9, 0.8, 0.85, 0.3, 0.1], &s), Ok(false));
        assert_eq!(indicator(&[0.6, 0.5, 0.6, 0.3, 0.1], &s), Ok(false));
        assert!(matches!(
            indicator(&[0.5; 4], &s),
            Err(DensityError::Dimension { .. })
        ));
    }

    #[test]
    fn quadrature_matches_closed_form() {
        for c in [1u64, 2, 3, 5, 10] {
            let q = quadrature_density(&spec(3, 2, c as f64), DEFAULT_RESOLUTION).unwrap();
            let a = ratio_f64(analytic_density_t3s2(c).unwrap());
            assert!((q - a).abs() < 1e-6, "c = {c}: {q} vs {a}");
        }
    }

    #[test]
    fn quadrature_volumes_of_parts() {
        let dropped = spec(3, 2, 1.0).with_mode(RatioMode::Dropped).unwrap();
        let v1 = quadrature_density(&dropped, DEFAULT_RESOLUTION).unwrap();
        assert!((v1 - 1.0 / 60.0).abs() < 1e-6, "{v1}");
        for c in [1.0, 2.0, 4.0] {
            let cut = spec(3, 2, c).with_mode(RatioMode::Exceeded).unwrap();
            let v2 = quadrature_density(&cut, DEFAULT_RESOLUTION).unwrap();
            assert!((v2 - 1.0 / (120.0 * c)).abs() < 1e-6, "c = {c}: {v2}");
        }
    }

    #[test]
    fn single_rhs_is_a_simplex_fraction() {
        // x₁ > y₁ ≥ … ≥ y_t is one ordering of t+1 coordinates.
        for t in 2..=5 {
            let q = quadrature_density(&spec(t, 1, 1.0), 4).unwrap();
            let fact: f64 = (1..=t + 1).map(|i| i as f64).product();
            assert!((q - 1.0 / fact).abs() < 1e-9, "t = {t}");
        }
    }

    #[test]
    fn monotone_in_c_and_positive() {
        for (t, s) in [(2, 2), (3, 2), (4, 2), (3, 3)] {
            let mut prev = 0.0;
            for c in [1.0, 1.5, 2.0, 3.0, 5.0] {
                let q = quadrature_with_error(&spec(t, s, c), DEFAULT_RESOLUTION).unwrap();
                assert!(q.clearly_positive(), "t={t} s={s} c={c}: {q:?}");
                assert!(q.value >= prev - 1e-12);
                prev = q.value;
            }
        }
    }

    #[test]
    fn quadrature_dimension_guard() {
        assert!(matches!(
            quadrature_density(&spec(4, 3, 1.0), 4),
            Err(DensityError::DimensionGuard { .. })
        ));
    }

    #[test]
    fn mc_is_chunking_independent() {
        let s = spec(3, 2, 1.0);
        let whole = count_hits(&s, 7, 0, 5000);
        let split = count_hits(&s, 7, 0, 1234) + count_hits(&s, 7, 1234, 5000);
        assert_eq!(whole, split);
    }

    #[test]
    fn mc_agrees_with_quadrature() {
        for (t, s, c) in [(2, 1, 1.0), (3, 2, 2.0), (4, 2, 3.0), (3, 3, 1.0)] {
            let sp = spec(t, s, c);
            let est = mc_density(&sp, 200_000, 11).unwrap();
            let q = est.quadrature.unwrap();
            assert!(
                (est.mc_mean - q).abs() <= 4.0 * est.mc_stderr,
                "{t},{s},{c}: {est}"
            );
        }
    }

    #[test]
    fn mc_same_across_workers() {
        let s = spec(3, 2, 2.0);
        let runs: Vec<u64> = [1, 2, 8]
            .iter()
            .map(|&w| par::with_workers(w, || mc_only(&s, 100_000, 42).unwrap().hits))
            .collect();
        assert!(runs.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn estimate_json() {
        let est = mc_only(&spec(3, 2, 2.0), 1000, 42).unwrap();
        let v = serde_json::to_value(&est).unwrap();
        assert_eq!(v["analytic"], "1/80");
        assert_eq!(v["seed"], 42);
        assert!(v["quadrature"].is_null());
    }
}
