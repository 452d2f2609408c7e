//! The equation `∏ aᵢ! = ∏ nⱼ!`: validation, exact verification,
//! triviality, rewrites into products of consecutive-integer blocks
//! `Δ(m, k)`, and membership in the ratio-constrained set `N(c)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::factorint::{delta_expvec, factorial_expvec, ExpVec};

/// Largest `n` accepted by [`trivial_family`] unless the caller widens it.
pub const DEFAULT_TRIVIAL_BOUND: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lhs,
    Rhs,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Lhs => "lhs",
            Side::Rhs => "rhs",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquationError {
    #[error("cannot parse equation literal {literal:?}: {reason}")]
    Parse { literal: String, reason: String },
    #[error("{0} is empty")]
    Empty(Side),
    #[error("{side} entry {value} is below 2")]
    EntryTooSmall { side: Side, value: u64 },
    #[error("{0} is not non-increasing")]
    Ordering(Side),
    #[error("{0} appears on both sides")]
    NotDisjoint(u64),
    #[error("largest rhs entry {n1} must exceed largest lhs entry {a1}")]
    Orientation { n1: u64, a1: u64 },
    #[error("pairing needs one lhs index per rhs entry ({expected}), got {got}")]
    PairingLength { expected: usize, got: usize },
    #[error("pairing must start by matching n1 with a1")]
    PairingHead,
    #[error("pairing index {0} is out of range or repeated")]
    PairingIndex(usize),
    #[error("pairing requires n{j} = {n} > a = {a}", j = .j + 1)]
    PairingGap { j: usize, n: u64, a: u64 },
    #[error("equation does not hold")]
    NotASolution,
    #[error("trivial family value {value} exceeds bound {bound}")]
    FamilyBound { value: String, bound: u64 },
    #[error("delta block needs m >= 1 and k >= 1, got m={m}, k={k}")]
    BadBlock { m: u64, k: u64 },
}

/// A candidate identity `a₁!⋯a_t! = n₁!⋯n_s!`.
///
/// Built through [`FactorialEquation::new`] the sides are non-increasing,
/// entries are at least 2, no value is shared between sides, and `n₁ > a₁`.
/// [`FactorialEquation::relaxed`] skips all of that for ad-hoc residuals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FactorialEquation {
    lhs: Vec<u64>,
    rhs: Vec<u64>,
}

impl FactorialEquation {
    pub fn new(lhs: Vec<u64>, rhs: Vec<u64>) -> Result<Self, EquationError> {
        let eq = FactorialEquation { lhs, rhs };
        eq.validate()?;
        Ok(eq)
    }

    pub fn relaxed(lhs: Vec<u64>, rhs: Vec<u64>) -> Self {
        FactorialEquation { lhs, rhs }
    }

    /// Parses `"7,3,3,2=9"`; whitespace anywhere is ignored.
    pub fn parse_relaxed(literal: &str) -> Result<Self, EquationError> {
        let compact: String = literal.chars().filter(|c| !c.is_whitespace()).collect();
        let err = |reason: &str| EquationError::Parse {
            literal: literal.to_string(),
            reason: reason.to_string(),
        };
        let (l, r) = compact.split_once('=').ok_or_else(|| err("missing '='"))?;
        if r.contains('=') {
            return Err(err("more than one '='"));
        }
        let side = |s: &str, name: &str| -> Result<Vec<u64>, EquationError> {
            if s.is_empty() {
                return Err(err(&format!("{name} is empty")));
            }
            s.split(',')
                .map(|tok| {
                    tok.parse::<u64>()
                        .map_err(|_| err(&format!("bad integer {tok:?} on {name}")))
                })
                .collect()
        };
        Ok(FactorialEquation {
            lhs: side(l, "lhs")?,
            rhs: side(r, "rhs")?,
        })
    }

    pub fn lhs(&self) -> &[u64] {
        &self.lhs
    }

    pub fn rhs(&self) -> &[u64] {
        &self.rhs
    }

    pub fn t(&self) -> usize {
        self.lhs.len()
    }

    pub fn s(&self) -> usize {
        self.rhs.len()
    }

    pub fn validate(&self) -> Result<(), EquationError> {
        for (side, xs) in [(Side::Lhs, &self.lhs), (Side::Rhs, &self.rhs)] {
            if xs.is_empty() {
                return Err(EquationError::Empty(side));
            }
            if let Some(&value) = xs.iter().find(|&&x| x < 2) {
                return Err(EquationError::EntryTooSmall { side, value });
            }
            if xs.windows(2).any(|w| w[0] < w[1]) {
                return Err(EquationError::Ordering(side));
            }
        }
        if let Some(&v) = self.lhs.iter().find(|a| self.rhs.contains(a)) {
            return Err(EquationError::NotDisjoint(v));
        }
        if self.rhs[0] <= self.lhs[0] {
            return Err(EquationError::Orientation {
                n1: self.rhs[0],
                a1: self.lhs[0],
            });
        }
        Ok(())
    }

    /// `"7,3,3,2=9"`.
    pub fn literal(&self) -> String {
        let join = |xs: &[u64]| {
            xs.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        format!("{}={}", join(&self.lhs), join(&self.rhs))
    }

    /// Sorted copies of both sides, the key for multiset comparisons.
    pub fn multiset_key(&self) -> (Vec<u64>, Vec<u64>) {
        let mut l = self.lhs.clone();
        let mut r = self.rhs.clone();
        l.sort_unstable_by(|a, b| b.cmp(a));
        r.sort_unstable_by(|a, b| b.cmp(a));
        (l, r)
    }
}

impl FromStr for FactorialEquation {
    type Err = EquationError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let eq = FactorialEquation::parse_relaxed(s)?;
        eq.validate()?;
        Ok(eq)
    }
}

impl fmt::Display for FactorialEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |xs: &[u64]| xs.iter().map(|x| format!("{x}!")).collect::<String>();
        write!(f, "{} = {}", side(&self.lhs), side(&self.rhs))
    }
}

/// `Σⱼ vec(nⱼ!) − Σᵢ vec(aᵢ!)`; zero exactly when the identity holds.
pub fn residual(eq: &FactorialEquation) -> ExpVec {
    let rhs: ExpVec = eq.rhs.iter().map(|&n| factorial_expvec(n)).sum();
    let lhs: ExpVec = eq.lhs.iter().map(|&a| factorial_expvec(a)).sum();
    &rhs - &lhs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Trivial,
    Nontrivial,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Trivial => "trivial",
            Classification::Nontrivial => "nontrivial",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Trivial iff some `|aᵢ − nⱼ| = 1`.
pub fn classify(eq: &FactorialEquation) -> Classification {
    let adjacent = eq
        .lhs
        .iter()
        .any(|&a| eq.rhs.iter().any(|&n| a.abs_diff(n) == 1));
    if adjacent {
        Classification::Trivial
    } else {
        Classification::Nontrivial
    }
}

/// Identities that the literature lists as nontrivial solutions of
/// `a₁!⋯a_t! = n!`.
pub const LISTED_NONTRIVIAL: [(&[u64], u64); 5] = [
    (&[7, 3, 3, 2], 9),
    (&[7, 6], 10),
    (&[7, 5, 3], 10),
    (&[14, 5, 2], 16),
    (&[15, 2, 2, 2, 2], 16),
];

/// Flags equations that appear in [`LISTED_NONTRIVIAL`] but classify as
/// trivial under the adjacency rule.
pub fn classification_note(eq: &FactorialEquation) -> Option<String> {
    let listed = LISTED_NONTRIVIAL
        .iter()
        .any(|(l, n)| eq.rhs == [*n] && eq.lhs == *l);
    (listed && classify(eq) == Classification::Trivial).then(|| {
        format!(
            "{} is listed among the known nontrivial solutions, but |a_i - n_j| = 1 holds for some pair, so the adjacency rule classifies it trivial",
            eq
        )
    })
}

/// Outcome of [`verify`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub eq: FactorialEquation,
    pub holds: bool,
    /// Present only when `holds`.
    pub classification: Option<Classification>,
    /// Δ-form under the first valid pairing, when the identity holds.
    pub delta_form: Option<DeltaForm>,
}

#[derive(Serialize)]
struct RecordLine<'a> {
    lhs: &'a [u64],
    rhs: &'a [u64],
    holds: bool,
    class: Option<Classification>,
    t: usize,
    s: usize,
}

impl SolutionRecord {
    /// One JSON-lines record:
    /// `{"lhs":[..],"rhs":[..],"holds":true,"class":"nontrivial","t":4,"s":1}`.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(&RecordLine {
            lhs: self.eq.lhs(),
            rhs: self.eq.rhs(),
            holds: self.holds,
            class: self.classification,
            t: self.eq.t(),
            s: self.eq.s(),
        })
        .expect("record serialization cannot fail")
    }

    pub fn is_nontrivial(&self) -> bool {
        self.classification == Some(Classification::Nontrivial)
    }
}

pub fn verify(eq: &FactorialEquation) -> Result<SolutionRecord, EquationError> {
    eq.validate()?;
    Ok(verify_unchecked(eq))
}

/// [`verify`] for equations already known to be valid.
pub(crate) fn verify_unchecked(eq: &FactorialEquation) -> SolutionRecord {
    let holds = residual(eq).is_zero();
    let classification = holds.then(|| classify(eq));
    let delta_form = if holds {
        Pairing::enumerate(eq)
            .first()
            .and_then(|p| to_delta_form(eq, p).ok())
    } else {
        None
    };
    SolutionRecord {
        eq: eq.clone(),
        holds,
        classification,
        delta_form,
    }
}

/// The family `(n−1)!·∏ tail! = n!` with `n = ∏_{a ∈ tail} a!`.
pub fn trivial_family(tail: &[u64], bound: u64) -> Result<FactorialEquation, EquationError> {
    if tail.is_empty() {
        return Err(EquationError::Empty(Side::Lhs));
    }
    if let Some(&value) = tail.iter().find(|&&a| a < 2) {
        return Err(EquationError::EntryTooSmall {
            side: Side::Lhs,
            value,
        });
    }
    let mut n = BigUint::one();
    for &a in tail {
        for i in 2..=a {
            n *= i;
            if n > BigUint::from(bound) {
                let value = tail
                    .iter()
                    .map(|a| format!("{a}!"))
                    .collect::<Vec<_>>()
                    .join("*");
                return Err(EquationError::FamilyBound { value, bound });
            }
        }
    }
    let n = n.to_u64().expect("bounded by a u64");
    let mut lhs: Vec<u64> = tail.to_vec();
    lhs.push(n - 1);
    lhs.sort_unstable_by(|a, b| b.cmp(a));
    FactorialEquation::new(lhs, vec![n])
}

/// Assignment of each rhs entry `nⱼ` to a distinct lhs index `i_j`
/// (0-based here, so `i₁ = 0` pairs `n₁` with `a₁`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pairing {
    assignment: Vec<usize>,
}

impl Pairing {
    pub fn new(assignment: Vec<usize>) -> Self {
        Pairing { assignment }
    }

    /// `[0]`, the only pairing for a single-factorial right side.
    pub fn head_only() -> Self {
        Pairing {
            assignment: vec![0],
        }
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn validate(&self, eq: &FactorialEquation) -> Result<(), EquationError> {
        if self.assignment.len() != eq.s() {
            return Err(EquationError::PairingLength {
                expected: eq.s(),
                got: self.assignment.len(),
            });
        }
        if self.assignment.first() != Some(&0) {
            return Err(EquationError::PairingHead);
        }
        let mut used = vec![false; eq.t()];
        for (j, &i) in self.assignment.iter().enumerate() {
            if i >= eq.t() || used[i] {
                return Err(EquationError::PairingIndex(i));
            }
            used[i] = true;
            let (n, a) = (eq.rhs[j], eq.lhs[i]);
            if n <= a {
                return Err(EquationError::PairingGap { j, n, a });
            }
        }
        Ok(())
    }

    /// Every valid pairing, in lexicographic order of assignments.
    pub fn enumerate(eq: &FactorialEquation) -> Vec<Pairing> {
        fn rec(eq: &FactorialEquation, j: usize, cur: &mut Vec<usize>, out: &mut Vec<Pairing>) {
            if j == eq.s() {
                out.push(Pairing::new(cur.clone()));
                return;
            }
            for i in 1..eq.t() {
                if !cur.contains(&i) && eq.rhs[j] > eq.lhs[i] {
                    cur.push(i);
                    rec(eq, j + 1, cur, out);
                    cur.pop();
                }
            }
        }
        let mut out = Vec::new();
        if eq.s() == 0 || eq.t() < eq.s() || eq.rhs[0] <= eq.lhs[0] {
            return out;
        }
        let mut cur = vec![0];
        rec(eq, 1, &mut cur, &mut out);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeltaBlock {
    pub m: u64,
    pub k: u64,
}

impl DeltaBlock {
    /// Last factor `m + k − 1`.
    pub fn top(&self) -> u64 {
        self.m + self.k - 1
    }
}

/// `∏_{leftover} a! = ∏ⱼ Δ(mⱼ, kⱼ)`, the rewrite induced by a pairing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaForm {
    blocks: Vec<DeltaBlock>,
    leftover: Vec<u64>,
}

impl DeltaForm {
    /// A Δ-form given directly by its parts, not derived from an equation.
    pub fn new(blocks: Vec<DeltaBlock>, mut leftover: Vec<u64>) -> Result<Self, EquationError> {
        if let Some(b) = blocks.iter().find(|b| b.m == 0 || b.k == 0) {
            return Err(EquationError::BadBlock { m: b.m, k: b.k });
        }
        if blocks.is_empty() {
            return Err(EquationError::Empty(Side::Rhs));
        }
        leftover.sort_unstable_by(|a, b| b.cmp(a));
        Ok(DeltaForm { blocks, leftover })
    }

    pub fn blocks(&self) -> &[DeltaBlock] {
        &self.blocks
    }

    pub fn leftover(&self) -> &[u64] {
        &self.leftover
    }

    pub fn head(&self) -> DeltaBlock {
        self.blocks[0]
    }

    /// Largest leftover argument, the `a` of the Stirling-type bounds.
    pub fn max_leftover(&self) -> Option<u64> {
        self.leftover.first().copied()
    }

    /// `max(k₂, …, k_s)`, absent for a single block.
    pub fn max_tail_k(&self) -> Option<u64> {
        self.blocks[1..].iter().map(|b| b.k).max()
    }

    pub fn k_sum(&self) -> u64 {
        self.blocks.iter().map(|b| b.k).sum()
    }

    /// Some `kⱼ = 1`, i.e. a paired entry differs from its partner by one.
    pub fn has_unit_gap(&self) -> bool {
        self.blocks.iter().any(|b| b.k == 1)
    }

    /// `Σⱼ vec(Δ(mⱼ,kⱼ)) − Σ vec(a!)` over the leftover.
    pub fn identity_residual(&self) -> ExpVec {
        let blocks: ExpVec = self.blocks.iter().map(|b| delta_expvec(b.m, b.k)).sum();
        let rest: ExpVec = self.leftover.iter().map(|&a| factorial_expvec(a)).sum();
        &blocks - &rest
    }

    pub fn identity_holds(&self) -> bool {
        self.identity_residual().is_zero()
    }
}

pub fn to_delta_form(
    eq: &FactorialEquation,
    pairing: &Pairing,
) -> Result<DeltaForm, EquationError> {
    pairing.validate(eq)?;
    let blocks = pairing
        .assignment
        .iter()
        .zip(&eq.rhs)
        .map(|(&i, &n)| DeltaBlock {
            m: eq.lhs[i] + 1,
            k: n - eq.lhs[i],
        })
        .collect();
    let leftover = eq
        .lhs
        .iter()
        .enumerate()
        .filter(|(i, _)| !pairing.assignment.contains(i))
        .map(|(_, &a)| a)
        .collect();
    Ok(DeltaForm { blocks, leftover })
}

/// Membership of a holding equation in `N(c)` under `pairing`: nontrivial,
/// every paired gap `kⱼ ≥ 2`, and `max(k₂..k_s) ≤ c·k₁`.
pub fn in_nc(eq: &FactorialEquation, pairing: &Pairing, c: u64) -> Result<bool, EquationError> {
    let record = verify(eq)?;
    if !record.holds {
        return Err(EquationError::NotASolution);
    }
    let df = to_delta_form(eq, pairing)?;
    Ok(delta_form_in_nc(&df, c) && record.is_nontrivial())
}

/// The gap part of [`in_nc`], on a Δ-form alone.
pub fn delta_form_in_nc(df: &DeltaForm, c: u64) -> bool {
    if df.has_unit_gap() {
        return false;
    }
    let k1 = df.head().k;
    df.max_tail_k()
        .is_none_or(|k| u128::from(k) <= u128::from(c) * u128::from(k1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn eq(lit: &str) -> FactorialEquation {
        lit.parse().unwrap()
    }

    #[test]
    fn parse_literals() {
        let e = eq(" 7, 3,3 ,2 = 9 ");
        assert_eq!(e.lhs(), &[7, 3, 3, 2]);
        assert_eq!(e.rhs(), &[9]);
        assert_eq!(e.literal(), "7,3,3,2=9");
        assert_eq!(e.to_string(), "7!3!3!2! = 9!");
        assert!(matches!(
            "7,6=".parse::<FactorialEquation>(),
            Err(EquationError::Parse { .. })
        ));
        assert!(matches!(
            "7,6".parse::<FactorialEquation>(),
            Err(EquationError::Parse { .. })
        ));
        assert!(matches!(
            "7,x=9".parse::<FactorialEquation>(),
            Err(EquationError::Parse { .. })
        ));
        assert!(matches!(
            "7=8=9".parse::<FactorialEquation>(),
            Err(EquationError::Parse { .. })
        ));
    }

    #[test]
    fn validation_errors_are_distinct() {
        assert_eq!(
            "2=2".parse::<FactorialEquation>(),
            Err(EquationError::NotDisjoint(2))
        );
        assert_eq!(
            "3,5=9".parse::<FactorialEquation>(),
            Err(EquationError::Ordering(Side::Lhs))
        );
        assert_eq!(
            "3,1=9".parse::<FactorialEquation>(),
            Err(EquationError::EntryTooSmall {
                side: Side::Lhs,
                value: 1
            })
        );
        assert_eq!(
            "9=7,3,3,2".parse::<FactorialEquation>(),
            Err(EquationError::Orientation { n1: 7, a1: 9 })
        );
        assert_eq!(
            "3=4,5".parse::<FactorialEquation>(),
            Err(EquationError::Ordering(Side::Rhs))
        );
    }

    #[test]
    fn residual_examples() {
        assert!(residual(&FactorialEquation::relaxed(vec![2], vec![2])).is_zero());
        assert!(residual(&eq("7,6=10")).is_zero());
        // 10!/(7!·5!) = 6
        let r = residual(&eq("7,5=10"));
        assert_eq!(r, ExpVec::of_integer(6));
        assert_eq!(r.exponent(3), 1);
        let r = residual(&FactorialEquation::relaxed(vec![7, 5], vec![10, 3]));
        assert_eq!(r.exponent(3), 2);
    }

    #[test]
    fn verify_examples() {
        let r = verify(&eq("7,3,3,2=9")).unwrap();
        assert!(r.holds);
        assert_eq!(r.classification, Some(Classification::Nontrivial));

        let r = verify(&eq("23,4=24")).unwrap();
        assert!(r.holds);
        assert_eq!(r.classification, Some(Classification::Trivial));

        let r = verify(&eq("15,2,2,2,2=16")).unwrap();
        assert!(r.holds);
        assert_eq!(r.classification, Some(Classification::Trivial));
        assert!(classification_note(&r.eq).is_some());
        assert!(classification_note(&eq("14,5,2=16")).is_none());

        let r = verify(&eq("8,3=9")).unwrap();
        assert!(!r.holds);
        assert_eq!(r.classification, None);
        assert_eq!(r.delta_form, None);
    }

    #[test]
    fn json_line_shape() {
        let r = verify(&eq("7,6=10")).unwrap();
        assert_eq!(
            r.to_json_line(),
            r#"{"lhs":[7,6],"rhs":[10],"holds":true,"class":"nontrivial","t":2,"s":1}"#
        );
    }

    #[test]
    fn trivial_family_examples() {
        let e = trivial_family(&[4], DEFAULT_TRIVIAL_BOUND).unwrap();
        assert_eq!(e, eq("23,4=24"));
        let e = trivial_family(&[3, 3], DEFAULT_TRIVIAL_BOUND).unwrap();
        assert_eq!(e, eq("35,3,3=36"));
        assert!(trivial_family(&[2], DEFAULT_TRIVIAL_BOUND).is_err());
        assert!(matches!(
            trivial_family(&[10], 1000),
            Err(EquationError::FamilyBound { .. })
        ));
        for tail in [&[3u64][..], &[4, 2], &[5, 3, 2], &[2, 2, 2], &[6, 6]] {
            let r = verify(&trivial_family(tail, DEFAULT_TRIVIAL_BOUND).unwrap()).unwrap();
            assert!(r.holds);
            assert_eq!(r.classification, Some(Classification::Trivial));
        }
    }

    #[test]
    fn delta_form_examples() {
        let e = eq("14,5,2=16");
        let df = to_delta_form(&e, &Pairing::head_only()).unwrap();
        assert_eq!(df.blocks(), &[DeltaBlock { m: 15, k: 2 }]);
        assert_eq!(df.leftover(), &[5, 2]);
        assert!(df.identity_holds());

        let e = FactorialEquation::new(vec![10, 6, 4, 2], vec![12, 8]).unwrap();
        let df = to_delta_form(&e, &Pairing::new(vec![0, 1])).unwrap();
        assert_eq!(
            df.blocks(),
            &[DeltaBlock { m: 11, k: 2 }, DeltaBlock { m: 7, k: 2 }]
        );
        assert_eq!(df.leftover(), &[4, 2]);

        let e = eq("7,6=10");
        let df = to_delta_form(&e, &Pairing::head_only()).unwrap();
        assert_eq!(df.blocks(), &[DeltaBlock { m: 8, k: 3 }]);
        assert_eq!(df.leftover(), &[6]);
        assert!(df.identity_holds());
    }

    #[test]
    fn pairing_errors() {
        let e = FactorialEquation::new(vec![10, 9, 4], vec![12, 8]).unwrap();
        assert_eq!(
            to_delta_form(&e, &Pairing::new(vec![0, 1])),
            Err(EquationError::PairingGap { j: 1, n: 8, a: 9 })
        );
        assert_eq!(
            to_delta_form(&e, &Pairing::new(vec![1, 2])),
            Err(EquationError::PairingHead)
        );
        assert_eq!(
            to_delta_form(&e, &Pairing::new(vec![0, 0])),
            Err(EquationError::PairingIndex(0))
        );
        assert_eq!(
            to_delta_form(&e, &Pairing::new(vec![0])).unwrap_err(),
            EquationError::PairingLength {
                expected: 2,
                got: 1
            }
        );
        assert_eq!(Pairing::enumerate(&e), vec![Pairing::new(vec![0, 2])]);
        let df = to_delta_form(&eq("7,6=8"), &Pairing::head_only()).unwrap();
        assert!(df.has_unit_gap());
    }

    #[test]
    fn nc_membership() {
        assert_eq!(in_nc(&eq("14,5,2=16"), &Pairing::head_only(), 1), Ok(true));
        assert_eq!(
            in_nc(&eq("8,3=9"), &Pairing::head_only(), 1),
            Err(EquationError::NotASolution)
        );
        assert_eq!(
            in_nc(&eq("15,2,2,2,2=16"), &Pairing::head_only(), 5),
            Ok(false)
        );
        let df = DeltaForm::new(
            vec![DeltaBlock { m: 20, k: 2 }, DeltaBlock { m: 9, k: 5 }],
            vec![4],
        )
        .unwrap();
        assert!(!delta_form_in_nc(&df, 2));
        assert!(delta_form_in_nc(&df, 3));
    }

    fn lit_product(xs: &[u64]) -> BigUint {
        xs.iter()
            .map(|&x| (1..=x).fold(BigUint::one(), |acc, i| acc * i))
            .fold(BigUint::one(), |acc, f| acc * f)
    }

    proptest! {
        #[test]
        fn residual_agrees_with_big_integers(
            lhs in proptest::collection::vec(2u64..30, 1..6),
            rhs in proptest::collection::vec(2u64..=30, 1..4),
        ) {
            let e = FactorialEquation::relaxed(lhs.clone(), rhs.clone());
            prop_assert_eq!(residual(&e).is_zero(), lit_product(&lhs) == lit_product(&rhs));
        }

        #[test]
        fn delta_form_reexpansion(
            n1 in 4u64..40, gap in 1u64..10, n2 in 3u64..30,
            rest in proptest::collection::vec(2u64..12, 0..3),
        ) {
            let a1 = n1.saturating_sub(gap).max(2);
            prop_assume!(a1 < n1);
            let a2 = (n2 - 1).min(a1);
            let mut lhs = vec![a1, a2];
            lhs.extend(rest);
            lhs.sort_unstable_by(|a, b| b.cmp(a));
            let mut rhs = vec![n1, n2];
            rhs.sort_unstable_by(|a, b| b.cmp(a));
            let e = FactorialEquation::relaxed(lhs, rhs);
            for p in Pairing::enumerate(&e) {
                let df = to_delta_form(&e, &p).unwrap();
                prop_assert_eq!(df.identity_residual(), residual(&e));
                for (b, (&i, &n)) in df.blocks().iter().zip(p.assignment().iter().zip(e.rhs())) {
                    prop_assert_eq!(b.top(), n);
                    prop_assert_eq!(b.m, e.lhs()[i] + 1);
                }
            }
        }

        #[test]
        fn classification_ignores_order_of_equal_entries(
            lhs in proptest::collection::vec(2u64..20, 1..6),
            rhs in proptest::collection::vec(2u64..25, 1..3),
        ) {
            let a = FactorialEquation::relaxed(lhs.clone(), rhs.clone());
            let mut l2 = lhs; l2.reverse();
            let mut r2 = rhs; r2.reverse();
            let b = FactorialEquation::relaxed(l2, r2);
            prop_assert_eq!(classify(&a), classify(&b));
            prop_assert_eq!(residual(&a), residual(&b));
        }
    }
}
