//! Complete bounded enumeration of factorial-product identities.
//!
//! Each right-hand side `n₁ ≥ … ≥ n_s` is an independent work unit. Inside a
//! unit the left side is grown depth-first in non-increasing order while a
//! dense residual `R = Σ vec(nⱼ!) − Σ vec(aᵢ!)` is maintained. A branch dies
//! when an exponent would go negative, when the largest prime still owed by
//! `R` exceeds every admissible next entry (only `a ≥ p` supplies `p`), or at
//! the depth limit. Results are merged and sorted, so the output does not
//! depend on the worker count.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::equations::{
    delta_form_in_nc, to_delta_form, verify_unchecked, Classification, FactorialEquation, Pairing,
    SolutionRecord,
};
use crate::factorint::{legendre, shared_table};
use crate::par;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchSpec {
    pub n1_max: u64,
    pub t_max: usize,
    pub s_max: usize,
    /// Keep only records in `N(c)` under at least one pairing.
    pub c: Option<u64>,
    pub nontrivial_only: bool,
    /// Also report solutions that share a value between sides (diagnostics).
    pub include_cancelling: bool,
}

impl SearchSpec {
    pub fn new(n1_max: u64, t_max: usize, s_max: usize) -> Self {
        SearchSpec {
            n1_max,
            t_max,
            s_max,
            c: None,
            nontrivial_only: false,
            include_cancelling: false,
        }
    }

    pub fn nontrivial_only(mut self, yes: bool) -> Self {
        self.nontrivial_only = yes;
        self
    }

    pub fn with_c(mut self, c: Option<u64>) -> Self {
        self.c = c;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResourceGuards {
    pub max_n1: u64,
    pub max_nodes: u64,
    pub max_wall: Option<Duration>,
}

impl Default for ResourceGuards {
    fn default() -> Self {
        ResourceGuards {
            max_n1: 100,
            max_nodes: 2_000_000_000,
            max_wall: Some(Duration::from_secs(600)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GuardKind {
    N1Max { requested: u64, ceiling: u64 },
    Nodes(u64),
    WallTime(Duration),
}

impl fmt::Display for GuardKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GuardKind::N1Max { requested, ceiling } => {
                write!(f, "bound {requested} exceeds the ceiling {ceiling}")
            }
            GuardKind::Nodes(n) => write!(f, "node budget of {n} exhausted"),
            GuardKind::WallTime(d) => {
                write!(f, "wall-time budget of {:.1}s exhausted", d.as_secs_f64())
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid search spec: {0}")]
    InvalidSpec(String),
    /// The search stopped early. `partial` holds the records of every unit
    /// in `frontier` (the right-hand sides that ran to completion).
    #[error("resource guard exceeded: {kind}")]
    Guard {
        kind: GuardKind,
        partial: Vec<SolutionRecord>,
        frontier: Vec<Vec<u64>>,
    },
}

struct Budget {
    nodes: AtomicU64,
    max_nodes: u64,
    start: Instant,
    max_wall: Option<Duration>,
    stop: AtomicBool,
}

impl Budget {
    fn new(guards: &ResourceGuards) -> Self {
        Budget {
            nodes: AtomicU64::new(0),
            max_nodes: guards.max_nodes,
            start: Instant::now(),
            max_wall: guards.max_wall,
            stop: AtomicBool::new(false),
        }
    }

    #[inline]
    fn tick(&self) -> Result<(), GuardKind> {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed);
        if n >= self.max_nodes {
            self.stop.store(true, Ordering::Relaxed);
            return Err(GuardKind::Nodes(self.max_nodes));
        }
        if n % 4096 == 0 {
            if let Some(limit) = self.max_wall {
                if self.start.elapsed() > limit {
                    self.stop.store(true, Ordering::Relaxed);
                    return Err(GuardKind::WallTime(limit));
                }
            }
            if self.stop.load(Ordering::Relaxed) {
                return Err(GuardKind::Nodes(self.max_nodes));
            }
        }
        Ok(())
    }
}

/// Dense factorial exponent vectors over the primes up to `top`, shared
/// read-only by all workers of one run.
struct FactorialMemo {
    primes: Vec<u64>,
    /// `vecs[n][i]` = exponent of `primes[i]` in `n!`, truncated to `π(n)`.
    vecs: Vec<Vec<i32>>,
}

impl FactorialMemo {
    fn new(top: u64) -> Self {
        let primes = shared_table(top).primes_up_to(top).to_vec();
        let vecs = (0..=top)
            .map(|n| {
                primes
                    .iter()
                    .take_while(|&&p| p <= n)
                    .map(|&p| legendre(n, p) as i32)
                    .collect()
            })
            .collect();
        FactorialMemo { primes, vecs }
    }

    fn add_into(&self, acc: &mut [i32], n: u64, sign: i32) {
        for (slot, &e) in acc.iter_mut().zip(&self.vecs[n as usize]) {
            *slot += sign * e;
        }
    }

    /// All non-increasing left sides `a₁ ≤ a_max` with `∏ aᵢ! = target`.
    fn complete(
        &self,
        target: &[i32],
        a_max: u64,
        t_max: usize,
        budget: &Budget,
    ) -> Result<Vec<Vec<u64>>, GuardKind> {
        let mut residual = target.to_vec();
        let mut lhs = Vec::with_capacity(t_max);
        let mut out = Vec::new();
        self.descend(&mut residual, a_max, t_max, &mut lhs, &mut out, budget)?;
        Ok(out)
    }

    fn descend(
        &self,
        residual: &mut [i32],
        bound: u64,
        t_max: usize,
        lhs: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
        budget: &Budget,
    ) -> Result<(), GuardKind> {
        budget.tick()?;
        let Some(top) = residual.iter().rposition(|&e| e > 0) else {
            if !lhs.is_empty() {
                out.push(lhs.clone());
            }
            return Ok(());
        };
        let owed = self.primes[top];
        if lhs.len() == t_max || owed > bound {
            return Ok(());
        }
        for a in owed.max(2)..=bound {
            let fa = &self.vecs[a as usize];
            // Exponents of a! grow with a, so the first overdraw ends the scan.
            if residual.iter().zip(fa).any(|(&r, &f)| r < f) {
                break;
            }
            self.add_into(residual, a, -1);
            lhs.push(a);
            let res = self.descend(residual, a, t_max, lhs, out, budget);
            lhs.pop();
            self.add_into(residual, a, 1);
            res?;
        }
        Ok(())
    }
}

/// Non-increasing sequences of length `len` with entries in `[lo, hi]`.
fn non_increasing(len: usize, lo: u64, hi: u64) -> Vec<Vec<u64>> {
    fn rec(len: usize, lo: u64, hi: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        let cap = cur.last().copied().unwrap_or(hi).min(hi);
        for v in (lo..=cap).rev() {
            cur.push(v);
            rec(len, lo, hi, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if len == 0 {
        return vec![Vec::new()];
    }
    if lo > hi {
        return out;
    }
    rec(len, lo, hi, &mut Vec::new(), &mut out);
    out
}

type UnitResult<T> = (Vec<u64>, Result<Vec<T>, GuardKind>);

fn merge_units<T>(units: Vec<UnitResult<T>>) -> Result<Vec<T>, (GuardKind, Vec<T>, Vec<Vec<u64>>)> {
    let mut partial = Vec::new();
    let mut frontier = Vec::new();
    let mut failure = None;
    for (unit, res) in units {
        match res {
            Ok(recs) => {
                partial.extend(recs);
                frontier.push(unit);
            }
            Err(kind) => {
                failure.get_or_insert(kind);
            }
        }
    }
    match failure {
        None => Ok(partial),
        Some(kind) => Err((kind, partial, frontier)),
    }
}

fn check_common(t_max: usize, guards: &ResourceGuards, bound: u64) -> Result<(), SearchError> {
    if t_max < 1 {
        return Err(SearchError::InvalidSpec("t_max must be at least 1".into()));
    }
    if bound > guards.max_n1 {
        return Err(SearchError::Guard {
            kind: GuardKind::N1Max {
                requested: bound,
                ceiling: guards.max_n1,
            },
            partial: Vec::new(),
            frontier: Vec::new(),
        });
    }
    Ok(())
}

fn record_in_nc(rec: &SolutionRecord, c: u64) -> bool {
    rec.is_nontrivial()
        && Pairing::enumerate(&rec.eq).iter().any(|p| {
            to_delta_form(&rec.eq, p)
                .map(|df| delta_form_in_nc(&df, c))
                .unwrap_or(false)
        })
}

/// Every identity within `spec`, in canonical order (lexicographic on the
/// non-increasing rhs, then the non-increasing lhs).
pub fn search_factorial_products(
    spec: &SearchSpec,
    guards: &ResourceGuards,
) -> Result<Vec<SolutionRecord>, SearchError> {
    if spec.n1_max < 3 {
        return Err(SearchError::InvalidSpec("n1_max must be at least 3".into()));
    }
    if spec.t_max < 2 {
        return Err(SearchError::InvalidSpec("t_max must be at least 2".into()));
    }
    if spec.s_max < 1 {
        return Err(SearchError::InvalidSpec("s_max must be at least 1".into()));
    }
    if spec.c == Some(0) {
        return Err(SearchError::InvalidSpec("c must be positive".into()));
    }
    check_common(spec.t_max, guards, spec.n1_max)?;

    let memo = FactorialMemo::new(spec.n1_max);
    let budget = Budget::new(guards);
    let units: Vec<Vec<u64>> = (1..=spec.s_max)
        .flat_map(|s| {
            (3..=spec.n1_max).flat_map(move |n1| {
                non_increasing(s - 1, 2, n1)
                    .into_iter()
                    .map(move |mut tail| {
                        tail.insert(0, n1);
                        tail
                    })
            })
        })
        .collect();

    let results = par::map_vec(units, |rhs| {
        let mut target = vec![0i32; memo.vecs[rhs[0] as usize].len()];
        for &n in &rhs {
            memo.add_into(&mut target, n, 1);
        }
        let res = memo
            .complete(&target, rhs[0] - 1, spec.t_max, &budget)
            .map(|lhss| {
                lhss.into_iter()
                    .filter_map(|lhs| emit(spec, lhs, &rhs))
                    .collect::<Vec<_>>()
            });
        (rhs, res)
    });

    let mut records = merge_units(results).map_err(|(kind, mut partial, frontier)| {
        sort_records(&mut partial);
        SearchError::Guard {
            kind,
            partial,
            frontier,
        }
    })?;
    sort_records(&mut records);
    Ok(records)
}

fn emit(spec: &SearchSpec, lhs: Vec<u64>, rhs: &[u64]) -> Option<SolutionRecord> {
    let eq = FactorialEquation::relaxed(lhs, rhs.to_vec());
    let disjoint = eq.lhs().iter().all(|a| !eq.rhs().contains(a));
    if !disjoint && !spec.include_cancelling {
        return None;
    }
    let rec = verify_unchecked(&eq);
    debug_assert!(rec.holds);
    if spec.nontrivial_only && !rec.is_nontrivial() {
        return None;
    }
    if let Some(c) = spec.c {
        if !record_in_nc(&rec, c) {
            return None;
        }
    }
    Some(rec)
}

fn sort_records(records: &mut [SolutionRecord]) {
    records.sort_by(|a, b| (a.eq.rhs(), a.eq.lhs()).cmp(&(b.eq.rhs(), b.eq.lhs())));
}

/// Fixed block lengths for `∏ aᵢ! = ∏ⱼ Δ(xⱼ, kⱼ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaSearchSpec {
    pub k_list: Vec<u64>,
    pub x_max: u64,
    pub t_max: usize,
    /// Ratio filter `max(k₂..k_s) ≤ c·k₁`; it depends only on `k_list`.
    pub c: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct DeltaSolution {
    pub x: Vec<u64>,
    pub k: Vec<u64>,
    pub a: Vec<u64>,
}

/// All `x₁ ≥ … ≥ x_s` with `x₁ ≤ x_max` and non-increasing `a` with
/// `x₁ > a₁`, `t ≤ t_max`, solving the block equation; sorted by `(x, a)`.
pub fn search_delta(
    spec: &DeltaSearchSpec,
    guards: &ResourceGuards,
) -> Result<Vec<DeltaSolution>, SearchError> {
    if spec.k_list.is_empty() || spec.k_list.contains(&0) {
        return Err(SearchError::InvalidSpec(
            "k_list must be non-empty with every k >= 1".into(),
        ));
    }
    if spec.x_max < 1 {
        return Err(SearchError::InvalidSpec("x_max must be at least 1".into()));
    }
    check_common(spec.t_max, guards, spec.x_max)?;
    if let Some(c) = spec.c {
        let k1 = spec.k_list[0];
        let tail = spec.k_list[1..].iter().copied().max().unwrap_or(0);
        if c == 0 || u128::from(tail) > u128::from(c) * u128::from(k1) {
            return Ok(Vec::new());
        }
    }
    let k_max = *spec.k_list.iter().max().unwrap();
    let top = spec.x_max + k_max - 1;
    let memo = FactorialMemo::new(top);
    let budget = Budget::new(guards);
    let s = spec.k_list.len();
    let units = non_increasing(s, 1, spec.x_max);

    let results = par::map_vec(units, |x| {
        let mut target = vec![0i32; memo.primes.len()];
        for (&xj, &kj) in x.iter().zip(&spec.k_list) {
            memo.add_into(&mut target, xj + kj - 1, 1);
            memo.add_into(&mut target, xj - 1, -1);
        }
        let res = if x[0] < 3 {
            Ok(Vec::new())
        } else {
            memo.complete(&target, x[0] - 1, spec.t_max, &budget)
                .map(|lhss| {
                    lhss.into_iter()
                        .map(|a| DeltaSolution {
                            x: x.clone(),
                            k: spec.k_list.clone(),
                            a,
                        })
                        .collect()
                })
        };
        (x, res)
    });
    let mut sols = merge_units(results).map_err(|(kind, _, frontier)| SearchError::Guard {
        kind,
        partial: Vec::new(),
        frontier,
    })?;
    sols.sort();
    Ok(sols)
}

/// Aggregates of a completed search.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CensusSummary {
    /// Records per `(t, s, classification)`.
    pub counts: BTreeMap<(usize, usize, Classification), usize>,
    pub extremal_n1: Option<u64>,
    /// Literals of the nontrivial identities, in record order.
    pub nontrivial: Vec<String>,
    pub c: Option<u64>,
    /// Per pairing assignment: `(in N(c), not in N(c))` over all records
    /// admitting that pairing. Empty unless `c` is given.
    pub nc_tallies: BTreeMap<Vec<usize>, (usize, usize)>,
}

impl CensusSummary {
    pub fn nontrivial_count(&self) -> usize {
        self.counts
            .iter()
            .filter(|((_, _, cls), _)| *cls == Classification::Nontrivial)
            .map(|(_, n)| n)
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

pub fn census_report(records: &[SolutionRecord], c: Option<u64>) -> CensusSummary {
    let mut summary = CensusSummary {
        c,
        ..CensusSummary::default()
    };
    for rec in records.iter().filter(|r| r.holds) {
        let cls = rec.classification.expect("holding records are classified");
        *summary
            .counts
            .entry((rec.eq.t(), rec.eq.s(), cls))
            .or_default() += 1;
        let n1 = rec.eq.rhs()[0];
        summary.extremal_n1 = Some(summary.extremal_n1.map_or(n1, |m| m.max(n1)));
        if cls == Classification::Nontrivial {
            summary.nontrivial.push(rec.eq.literal());
        }
        if let Some(c) = c {
            for p in Pairing::enumerate(&rec.eq) {
                let inside = cls == Classification::Nontrivial
                    && to_delta_form(&rec.eq, &p)
                        .map(|df| delta_form_in_nc(&df, c))
                        .unwrap_or(false);
                let tally = summary
                    .nc_tallies
                    .entry(p.assignment().to_vec())
                    .or_default();
                if inside {
                    tally.0 += 1;
                } else {
                    tally.1 += 1;
                }
            }
        }
    }
    summary
}

#[cfg(test)]
mod tests {
    use super::*;

    fn literals(recs: &[SolutionRecord]) -> Vec<String> {
        recs.iter().map(|r| r.eq.literal()).collect()
    }

    #[test]
    fn non_increasing_counts() {
        assert_eq!(non_increasing(2, 2, 4).len(), 6);
        assert_eq!(non_increasing(0, 2, 4).len(), 1);
        assert_eq!(non_increasing(1, 3, 2).len(), 0);
        assert_eq!(non_increasing(3, 1, 3)[0], vec![3, 3, 3]);
    }

    #[test]
    fn nontrivial_up_to_ten() {
        let spec = SearchSpec::new(10, 4, 1).nontrivial_only(true);
        let recs = search_factorial_products(&spec, &ResourceGuards::default()).unwrap();
        assert_eq!(literals(&recs), ["7,3,3,2=9", "7,5,3=10", "7,6=10"]);
    }

    #[test]
    fn trivial_eight() {
        let spec = SearchSpec::new(8, 4, 1);
        let recs = search_factorial_products(&spec, &ResourceGuards::default()).unwrap();
        let r = recs.iter().find(|r| r.eq.literal() == "7,2,2,2=8").unwrap();
        assert_eq!(r.classification, Some(Classification::Trivial));
        assert!(recs.iter().all(|r| r.holds && r.eq.validate().is_ok()));
    }

    #[test]
    fn guards() {
        let spec = SearchSpec::new(1_000_000_000, 4, 1);
        assert!(matches!(
            search_factorial_products(&spec, &ResourceGuards::default()),
            Err(SearchError::Guard {
                kind: GuardKind::N1Max { .. },
                ..
            })
        ));
        let spec = SearchSpec::new(30, 5, 2);
        let tight = ResourceGuards {
            max_nodes: 500,
            ..ResourceGuards::default()
        };
        match search_factorial_products(&spec, &tight) {
            Err(SearchError::Guard {
                kind: GuardKind::Nodes(500),
                partial,
                frontier,
            }) => {
                assert!(frontier.len() < 500);
                assert!(partial
                    .iter()
                    .all(|r| frontier.contains(&r.eq.rhs().to_vec())));
            }
            other => panic!("expected node guard, got {other:?}"),
        }
        assert!(matches!(
            search_factorial_products(&SearchSpec::new(2, 4, 1), &ResourceGuards::default()),
            Err(SearchError::InvalidSpec(_))
        ));
    }

    #[test]
    fn cancelling_solutions_are_opt_in() {
        let mut spec = SearchSpec::new(9, 5, 2);
        let plain = search_factorial_products(&spec, &ResourceGuards::default()).unwrap();
        spec.include_cancelling = true;
        let all = search_factorial_products(&spec, &ResourceGuards::default()).unwrap();
        assert!(all.len() > plain.len());
        assert!(all.iter().any(|r| r.eq.literal() == "7,3,3,3,2=9,3"));
        assert!(plain.iter().all(|r| r.eq.validate().is_ok()));
    }

    #[test]
    fn c_filter_keeps_only_nc_members() {
        let spec = SearchSpec::new(16, 5, 1).with_c(Some(1));
        let recs = search_factorial_products(&spec, &ResourceGuards::default()).unwrap();
        assert_eq!(recs.len(), 4);
        assert!(recs.iter().all(|r| r.is_nontrivial()));
    }

    #[test]
    fn delta_search_examples() {
        let g = ResourceGuards::default();
        let run = |k: Vec<u64>, x_max| {
            search_delta(
                &DeltaSearchSpec {
                    k_list: k,
                    x_max,
                    t_max: 4,
                    c: None,
                },
                &g,
            )
            .unwrap()
        };
        let sols = run(vec![3], 8);
        assert!(sols.contains(&DeltaSolution {
            x: vec![8],
            k: vec![3],
            a: vec![6]
        }));
        let sols = run(vec![2], 15);
        assert!(sols.contains(&DeltaSolution {
            x: vec![15],
            k: vec![2],
            a: vec![5, 2]
        }));
        let sols = run(vec![1], 6);
        assert_eq!(
            sols.iter()
                .map(|s| (s.x[0], s.a.clone()))
                .collect::<Vec<_>>(),
            vec![(4, vec![2, 2]), (6, vec![3])]
        );
        let filtered = search_delta(
            &DeltaSearchSpec {
                k_list: vec![2, 5],
                x_max: 10,
                t_max: 3,
                c: Some(2),
            },
            &g,
        )
        .unwrap();
        assert!(filtered.is_empty());
    }

    #[test]
    fn census_of_small_run() {
        let spec = SearchSpec::new(16, 5, 1);
        let recs = search_factorial_products(&spec, &ResourceGuards::default()).unwrap();
        let summary = census_report(&recs, Some(1));
        assert_eq!(summary.nontrivial_count(), 4);
        assert_eq!(summary.extremal_n1, Some(16));
        assert_eq!(summary.nc_tallies.get(&vec![0]).map(|t| t.0), Some(4));
        assert!(census_report(&[], None).is_empty());
    }
}
