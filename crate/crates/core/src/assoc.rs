//! Per-forum gendered term detection.
//!
//! Every term in a forum's presence table is a 2x2 contingency table
//!
//! ```text
//!              has term   lacks term
//!   female        a           b        a + b = female_total
//!   male          c           d        c + d = male_total
//! ```
//!
//! tested with the Pearson chi-squared statistic (no continuity correction).
//! Terms too rare to reach significance at the uncorrected level, even if
//! only the minority gender used them, are dropped first; Benjamini-Hochberg
//! then runs over the survivors.

use alloc::string::String;
use alloc::vec::Vec;

use crate::genderlex::Gender;
use crate::termcount::TermTable;

pub const DEFAULT_ALPHA: f64 = 0.05;

/// Pearson chi-squared statistic of a 2x2 table. Zero when any margin is empty.
pub fn chi_squared(a: u64, b: u64, c: u64, d: u64) -> f64 {
    let rows = [a + b, c + d];
    let cols = [a + c, b + d];
    if rows.contains(&0) || cols.contains(&0) {
        return 0.0;
    }
    // Exact cross-product difference; `a * d` overflows f64's mantissa for large tables.
    let cross = i128::from(a) * i128::from(d) - i128::from(b) * i128::from(c);
    let cross = cross as f64;
    let n = (rows[0] + rows[1]) as f64;
    let denom = rows[0] as f64 * rows[1] as f64 * cols[0] as f64 * cols[1] as f64;
    n * cross * cross / denom
}

/// Upper tail probability of the chi-squared distribution with one degree of freedom.
pub fn chi_sq_p(chi2: f64) -> f64 {
    if chi2 <= 0.0 || chi2.is_nan() {
        return 1.0;
    }
    libm::erfc(libm::sqrt(chi2 / 2.0))
}

/// The statistic whose one-degree-of-freedom tail probability is `alpha`.
pub fn chi_sq_critical(alpha: f64) -> f64 {
    assert!(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while chi_sq_p(hi) > alpha {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if chi_sq_p(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Largest statistic any split of `t` term-bearing comments could produce
/// given the two gender totals.
///
/// With margins fixed the statistic grows with `|a·N − F·t|`, so the maximum
/// sits at an end of the feasible range of `a`. For `t` up to the smaller
/// gender total that end is "every occurrence in the minority gender".
pub fn max_attainable_chi(t: u64, female_total: u64, male_total: u64) -> f64 {
    let n = female_total + male_total;
    if t == 0 || t >= n {
        return 0.0;
    }
    let split = |a: u64| {
        let c = t - a;
        chi_squared(a, female_total - a, c, male_total - c)
    };
    let lo = t.saturating_sub(male_total);
    let hi = t.min(female_total);
    split(lo).max(split(hi))
}

/// Terms that could still reach `critical`, in term order.
pub fn prune_terms(table: &TermTable, critical: f64) -> Vec<&str> {
    table
        .presence
        .iter()
        .filter(|(_, p)| max_attainable_chi(p.total(), table.female_total, table.male_total) >= critical)
        .map(|(term, _)| term.as_str())
        .collect()
}

/// Number of Benjamini-Hochberg rejections for ascending p-values: the
/// largest `k` with `p(k) <= k * alpha / m`, or 0.
pub fn bh_cutoff(sorted_p: &[f64], alpha: f64) -> usize {
    let m = sorted_p.len() as f64;
    (1..=sorted_p.len()).rev().find(|&k| sorted_p[k - 1] <= k as f64 * alpha / m).unwrap_or(0)
}

/// Benjamini-Hochberg step-up selection.
///
/// Sorts by p-value (ties by label) and returns the rejected labels in that order.
pub fn bh_select<T: Ord + Clone>(pvalues: &[(T, f64)], alpha: f64) -> Vec<T> {
    let mut order: Vec<&(T, f64)> = pvalues.iter().collect();
    order.sort_by(|x, y| x.1.total_cmp(&y.1).then_with(|| x.0.cmp(&y.0)));
    let sorted: Vec<f64> = order.iter().map(|(_, p)| *p).collect();
    let k = bh_cutoff(&sorted, alpha);
    order[..k].iter().map(|(label, _)| label.clone()).collect()
}

/// One candidate term's test outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct TermAssociation {
    pub term: String,
    /// Female comments containing the term.
    pub a: u64,
    /// Female comments without it.
    pub b: u64,
    /// Male comments containing the term.
    pub c: u64,
    /// Male comments without it.
    pub d: u64,
    pub chi2: f64,
    pub p: f64,
    pub significant: bool,
    /// The gender with the higher presence rate.
    pub direction: Gender,
}

impl TermAssociation {
    pub fn new(term: impl Into<String>, f_with: u64, female_total: u64, m_with: u64, male_total: u64) -> Self {
        let (a, b, c, d) = (f_with, female_total - f_with, m_with, male_total - m_with);
        let chi2 = chi_squared(a, b, c, d);
        // a/(a+b) > c/(c+d), compared exactly.
        let female_higher = u128::from(a) * u128::from(c + d) > u128::from(c) * u128::from(a + b);
        TermAssociation {
            term: term.into(),
            a,
            b,
            c,
            d,
            chi2,
            p: chi_sq_p(chi2),
            significant: false,
            direction: if female_higher { Gender::Female } else { Gender::Male },
        }
    }

    pub fn female_total(&self) -> u64 {
        self.a + self.b
    }

    pub fn male_total(&self) -> u64 {
        self.c + self.d
    }

    pub fn female_rate(&self) -> f64 {
        self.a as f64 / self.female_total() as f64
    }

    pub fn male_rate(&self) -> f64 {
        self.c as f64 / self.male_total() as f64
    }
}

/// Outcome of testing every candidate term of one forum.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationRun {
    pub subreddit: String,
    pub alpha: f64,
    /// Uncorrected critical value used for pruning.
    pub critical: f64,
    pub female_total: u64,
    pub male_total: u64,
    /// Terms in the table before pruning.
    pub terms_seen: usize,
    /// Candidates (terms that survived pruning), by descending statistic.
    pub results: Vec<TermAssociation>,
}

impl AssociationRun {
    /// Number of candidate terms entering Benjamini-Hochberg.
    pub fn candidates(&self) -> usize {
        self.results.len()
    }

    pub fn significant(&self) -> impl Iterator<Item = &TermAssociation> {
        self.results.iter().filter(|r| r.significant)
    }

    pub fn n_significant(&self) -> usize {
        self.significant().count()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AssocError {
    #[error("subreddit {subreddit:?} has no {gender} comments; the test is undefined")]
    EmptyGender { subreddit: String, gender: Gender },
    #[error("alpha {0} outside (0, 1)")]
    InvalidAlpha(f64),
}

/// Sorts by descending statistic, ties by term.
pub fn sort_by_strength(results: &mut [TermAssociation]) {
    results.sort_by(|x, y| y.chi2.total_cmp(&x.chi2).then_with(|| x.term.cmp(&y.term)));
}

/// Prunes, tests and applies Benjamini-Hochberg at `alpha` to one forum's table.
pub fn associate(table: &TermTable, alpha: f64) -> Result<AssociationRun, AssocError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(AssocError::InvalidAlpha(alpha));
    }
    for gender in [Gender::Female, Gender::Male] {
        if table.gender_total(gender) == 0 {
            return Err(AssocError::EmptyGender { subreddit: table.subreddit.clone(), gender });
        }
    }
    let critical = chi_sq_critical(alpha);
    let mut results: Vec<TermAssociation> = prune_terms(table, critical)
        .into_iter()
        .map(|term| {
            let p = &table.presence[term];
            TermAssociation::new(term, p.f_with, table.female_total, p.m_with, table.male_total)
        })
        .collect();

    let pvalues: Vec<(usize, f64)> = results.iter().enumerate().map(|(i, r)| (i, r.p)).collect();
    // Indices follow term order, so index ties break by term.
    for i in bh_select(&pvalues, alpha) {
        results[i].significant = true;
    }
    sort_by_strength(&mut results);

    Ok(AssociationRun {
        subreddit: table.subreddit.clone(),
        alpha,
        critical,
        female_total: table.female_total,
        male_total: table.male_total,
        terms_seen: table.presence.len(),
        results,
    })
}
