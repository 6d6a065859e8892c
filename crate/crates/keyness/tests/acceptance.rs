//! Acceptance checks 1-10. Runs without the libtest harness so every check
//! prints exactly one PASS/FAIL line; exits non-zero if any check fails.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use keyness::lexicon::{build_from_census_files, bundled_lexicon};
use keyness::report::{share_table_csv, share_table_markdown};
use keyness_core::analysis::{analyze, AnalysisConfig};
use keyness_core::assoc::{
    associate, bh_select, chi_sq_critical, chi_sq_p, chi_squared, max_attainable_chi, prune_terms, AssociationRun,
};
use keyness_core::genderlex::{Gender, GenderLexicon, MIN_DOMINANCE, POPULARITY_CUTOFF};
use keyness_core::report::{female_share_table, REFERENCE_LEXICON_SIZE};
use keyness_core::sampler::{select_samples, SampleKey, SampleMode};
use keyness_core::synth::{
    empirical_fdr, generate_corpus, pseudo_word, PlantedEffect, SubredditSpec, SynthConfig, VocabTerm,
};
use keyness_core::termcount::{Presence, TermTable};
use keyness_core::{Comment, SubredditStats, YearMonth};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>, Duration);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------- oracles

/// Sum over the four cells of (observed - expected)^2 / expected.
fn chi2_expected_counts(a: u64, b: u64, c: u64, d: u64) -> f64 {
    let o = [[a as f64, b as f64], [c as f64, d as f64]];
    let n = o[0][0] + o[0][1] + o[1][0] + o[1][1];
    let rows = [o[0][0] + o[0][1], o[1][0] + o[1][1]];
    let cols = [o[0][0] + o[1][0], o[0][1] + o[1][1]];
    if rows.contains(&0.0) || cols.contains(&0.0) {
        return 0.0;
    }
    let mut x = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let e = rows[i] * cols[j] / n;
            x += (o[i][j] - e).powi(2) / e;
        }
    }
    x
}

/// Upper tail of the one-degree-of-freedom density, integrated directly.
///
/// Substituting x = u^2 turns the density into twice the standard normal
/// density in u, integrated here with composite Simpson (`n` even panels)
/// over [sqrt(c), sqrt(c) + 16].
fn chi2_tail_quadrature(c: f64, n: usize) -> f64 {
    let lo = c.sqrt();
    let hi = lo + 16.0;
    let h = (hi - lo) / n as f64;
    let phi = |u: f64| (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut s = phi(lo) + phi(hi);
    for k in 1..n {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * phi(lo + k as f64 * h);
    }
    2.0 * s * h / 3.0
}

/// Best statistic over every feasible split of `t` occurrences.
fn exhaustive_max(t: u64, f: u64, m: u64) -> f64 {
    (t.saturating_sub(m)..=t.min(f)).map(|a| chi2_expected_counts(a, f - a, t - a, m - (t - a))).fold(0.0, f64::max)
}

/// Literal step-up: indices of the rejected p-values.
fn bh_literal(p: &[f64], alpha: f64) -> BTreeSet<usize> {
    let m = p.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| p[i].total_cmp(&p[j]).then(i.cmp(&j)));
    let mut k = 0;
    for r in 1..=m {
        if p[order[r - 1]] <= r as f64 * alpha / m as f64 {
            k = r;
        }
    }
    order[..k].iter().copied().collect()
}

// ---------------------------------------------------------------- fixtures

const FEMALE_STEMS: [&str; 4] = ["Sarah", "Jennifer", "Mary", "Linda"];
const MALE_STEMS: [&str; 4] = ["Mike", "David", "John", "Robert"];

fn one_forum(n_per_gender: u32, vocabulary: Vec<VocabTerm>, planted: Vec<PlantedEffect>, seed: u64) -> SynthConfig {
    SynthConfig {
        n_female_users: n_per_gender,
        n_male_users: n_per_gender,
        n_ungendered_users: 0,
        months: 1,
        start_month: YearMonth { year: 2018, month: 1 },
        repeat_prob: 0.0,
        subreddits: vec![SubredditSpec { name: "S".into(), female_activity: 1.0, male_activity: 1.0 }],
        vocabulary,
        planted_effects: planted,
        female_names: FEMALE_STEMS.map(String::from).to_vec(),
        male_names: MALE_STEMS.map(String::from).to_vec(),
        noise_rate: 0.0,
        seed,
    }
}

fn run_synth(cfg: &SynthConfig, lexicon: &GenderLexicon) -> (AssociationRun, keyness_core::synth::GroundTruth) {
    let corpus = generate_corpus(cfg).expect("valid config");
    let mut analysis = analyze(corpus.comments, lexicon, &AnalysisConfig::default());
    let run = analysis.runs.remove("S").expect("forum tested");
    (run, corpus.truth)
}

// ---------------------------------------------------------------- criteria

fn gaming_statistic() -> Outcome {
    // 560,440 sampled comments, 18.2% female; "girl" in 0.55% vs 0.33%.
    let total = 560_440f64;
    let female = (total * 0.182).round() as u64;
    let male = 560_440 - female;
    let a = (female as f64 * 0.0055).round() as u64;
    let c = (male as f64 * 0.0033).round() as u64;
    let x = chi_squared(a, female - a, c, male - c);
    check((105.0..=118.0).contains(&x), format!("chi2({a}, {}, {c}, {}) = {x:.4}, in [105, 118]", female - a, male - c))
}

fn statistic_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_rel = 0.0f64;
    for i in 0..1000 {
        // Mix wide and narrow count ranges so small and lopsided tables occur.
        let hi = if i % 2 == 0 { 1_000_000 } else { 60 };
        let [a, b, c, d] = [(); 4].map(|_| rng.gen_range(1..=hi));
        let (x, y) = (chi_squared(a, b, c, d), chi2_expected_counts(a, b, c, d));
        let rel = if y == 0.0 { x.abs() } else { ((x - y) / y).abs() };
        worst_rel = worst_rel.max(rel);
    }
    let mut worst_abs = 0.0f64;
    let grid = (0..=500).map(|k| k as f64 * 0.1).chain((0..200).map(|_| rng.gen_range(0.0..50.0)));
    for c in grid {
        worst_abs = worst_abs.max((chi_sq_p(c) - chi2_tail_quadrature(c, 60_000)).abs());
    }
    check(
        worst_rel <= 1e-9 && worst_abs <= 1e-8,
        format!("max relative chi2 error {worst_rel:.2e} (<= 1e-9), max p error {worst_abs:.2e} (<= 1e-8)"),
    )
}

fn pruning_brute_force() -> Outcome {
    let crit = 3.841_459;
    let mut sizes: Vec<u64> = (1..=12).collect();
    sizes.extend((15..=500).step_by(23));
    sizes.push(500);
    let (mut cases, mut pruned, mut failures) = (0u64, 0u64, Vec::new());
    for &f in &sizes {
        for &m in &sizes {
            let mut table = TermTable::new("grid");
            table.female_total = f;
            table.male_total = m;
            for t in 0..=50u64.min(f + m) {
                cases += 1;
                let got = max_attainable_chi(t, f, m);
                let want = exhaustive_max(t, f, m);
                if (got - want).abs() > 1e-9 * want.max(1.0) {
                    failures.push(format!("max({t},{f},{m}) = {got} vs {want}"));
                }
                if got < crit {
                    pruned += 1;
                    if want >= crit {
                        failures.push(format!("t={t} F={f} M={m} pruned but a split reaches {want}"));
                    }
                }
                if t > 0 {
                    table.presence.insert(format!("t{t:02}"), Presence { f_with: t.min(f), m_with: t - t.min(f) });
                }
            }
            let kept: BTreeSet<&str> = prune_terms(&table, chi_sq_critical(0.05)).into_iter().collect();
            for (term, p) in &table.presence {
                let survives = exhaustive_max(p.total(), f, m) >= chi_sq_critical(0.05);
                if survives != kept.contains(term.as_str()) {
                    failures.push(format!("prune_terms disagrees on t={} F={f} M={m}", p.total()));
                }
            }
        }
    }
    check(
        failures.is_empty(),
        format!(
            "{cases} (t, F, M) cases, {pruned} pruned, {} disagreements{}",
            failures.len(),
            failures.first().map_or(String::new(), |f| format!(", first: {f}"))
        ),
    )
}

fn bh_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let alphas = [0.01, 0.05, 0.1, 0.2];
    let (mut mismatches, mut non_monotone) = (0, 0);
    for v in 0..10_000 {
        let m = rng.gen_range(1..=200);
        // Some vectors use coarse values so ties occur; some hold a cluster of small p.
        let p: Vec<f64> = (0..m)
            .map(|_| match v % 3 {
                0 => rng.gen::<f64>(),
                1 => f64::from(rng.gen_range(0..40u32)) / 400.0,
                _ => rng.gen::<f64>().powi(6),
            })
            .collect();
        let labelled: Vec<(usize, f64)> = p.iter().copied().enumerate().collect();
        let mut previous: Option<BTreeSet<usize>> = None;
        for &alpha in &alphas {
            let got: BTreeSet<usize> = bh_select(&labelled, alpha).into_iter().collect();
            if got != bh_literal(&p, alpha) {
                mismatches += 1;
            }
            if let Some(prev) = &previous {
                if !prev.is_subset(&got) {
                    non_monotone += 1;
                }
            }
            previous = Some(got);
        }
    }
    check(
        mismatches == 0 && non_monotone == 0,
        format!(
            "10000 vectors x {} alphas: {mismatches} mismatches, {non_monotone} monotonicity violations",
            alphas.len()
        ),
    )
}

fn null_fdr(lexicon: &GenderLexicon) -> Outcome {
    let seeds = 1000u64;
    // Rates from 0.005 to 0.05 keep nearly every term above the pruning floor.
    let vocab: Vec<VocabTerm> =
        (0..2500).map(|i| VocabTerm { term: pseudo_word(i), rate: 0.005 + 0.045 * (i % 100) as f64 / 99.0 }).collect();
    let results: Vec<(f64, usize, usize)> = (0..seeds)
        .into_par_iter()
        .map(|seed| {
            let (run, truth) = run_synth(&one_forum(1000, vocab.clone(), vec![], 10_000 + seed), lexicon);
            (empirical_fdr([&run], &truth).fdr, run.candidates(), run.n_significant())
        })
        .collect();
    let mean_fdr = results.iter().map(|r| r.0).sum::<f64>() / seeds as f64;
    let min_candidates = results.iter().map(|r| r.1).min().unwrap_or(0);
    let with_any = results.iter().filter(|r| r.2 > 0).count();
    check(
        mean_fdr <= 0.07 && min_candidates >= 2000,
        format!(
            "{seeds} null corpora, >= {min_candidates} candidates each, {with_any} with any discovery, mean FDR {mean_fdr:.4} (<= 0.07)"
        ),
    )
}

/// Detection rate of each planted term, from binomial draws of the counts
/// run through literal pruning and step-up at alpha 0.05.
fn power_by_simulation(n: u64, vocab: &[VocabTerm], planted: &[PlantedEffect], trials: usize) -> BTreeMap<String, f64> {
    let shift: HashMap<&str, f64> = planted.iter().map(|e| (e.term.as_str(), e.shift)).collect();
    let floor = (0..=2 * n).find(|&t| exhaustive_max(t, n, n) >= 3.841_458_820_694_124).expect("reachable");
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let binom = |rng: &mut ChaCha8Rng, p: f64| (0..n).filter(|_| rng.gen_bool(p)).count() as u64;
    let mut hits: BTreeMap<String, usize> = planted.iter().map(|e| (e.term.clone(), 0)).collect();
    for _ in 0..trials {
        let counts: Vec<(u64, u64)> = vocab
            .iter()
            .map(|v| {
                let s = shift.get(v.term.as_str()).copied().unwrap_or(0.0);
                let female = 1.0 / (1.0 + (-((v.rate / (1.0 - v.rate)).ln() + s)).exp());
                (binom(&mut rng, female), binom(&mut rng, v.rate))
            })
            .collect();
        let candidates: Vec<usize> = (0..vocab.len()).filter(|&i| counts[i].0 + counts[i].1 >= floor).collect();
        let p: Vec<f64> = candidates
            .iter()
            .map(|&i| {
                chi2_tail_quadrature(
                    chi2_expected_counts(counts[i].0, n - counts[i].0, counts[i].1, n - counts[i].1),
                    4000,
                )
            })
            .collect();
        for idx in bh_literal(&p, 0.05) {
            let i = candidates[idx];
            if let Some(&s) = shift.get(vocab[i].term.as_str()) {
                let female_higher = counts[i].0 > counts[i].1;
                if s != 0.0 && female_higher == (s > 0.0) {
                    *hits.get_mut(&vocab[i].term).expect("planted") += 1;
                }
            }
        }
    }
    hits.into_iter().map(|(t, h)| (t, h as f64 / trials as f64)).collect()
}

fn power_recovery(lexicon: &GenderLexicon) -> Outcome {
    let n = 1000u32;
    let mut vocab: Vec<VocabTerm> =
        (0..200).map(|i| VocabTerm { term: pseudo_word(i), rate: 0.01 + 0.04 * (i % 50) as f64 / 49.0 }).collect();
    let effects = [(0.05, 1.0), (0.10, -1.0), (0.02, 1.5), (0.20, -0.8), (0.05, 0.5), (0.08, -0.4), (0.05, 0.0)];
    let mut planted = Vec::new();
    for (j, &(base, shift)) in effects.iter().enumerate() {
        let term = pseudo_word(200 + j);
        vocab.push(VocabTerm { term: term.clone(), rate: base });
        planted.push(PlantedEffect { term, subreddit: "S".into(), shift });
    }
    let power = power_by_simulation(u64::from(n), &vocab, &planted, 400);
    let strong: Vec<&String> = power.iter().filter(|(_, &p)| p > 0.99).map(|(t, _)| t).collect();

    let seeds = 100u64;
    let runs: Vec<_> = (0..seeds)
        .into_par_iter()
        .map(|s| run_synth(&one_forum(n, vocab.clone(), planted.clone(), 20_000 + s), lexicon))
        .collect();
    let mut worst = 1.0f64;
    for term in &strong {
        let dir =
            planted
                .iter()
                .find(|e| &&e.term == term)
                .map(|e| if e.shift > 0.0 { Gender::Female } else { Gender::Male });
        let found = runs
            .iter()
            .filter(|(run, _)| run.significant().any(|t| &&t.term == term && Some(t.direction) == dir))
            .count();
        worst = worst.min(found as f64 / seeds as f64);
    }
    let mean_fdr = runs.iter().map(|(run, truth)| empirical_fdr([run], truth).fdr).sum::<f64>() / seeds as f64;
    let null_hits: usize = runs.iter().map(|(run, truth)| empirical_fdr([run], truth).false_discoveries).sum();
    let oracle: Vec<String> = power.values().map(|p| format!("{p:.2}")).collect();
    check(
        !strong.is_empty() && worst >= 0.95 && mean_fdr <= 0.07,
        format!(
            "oracle power [{}]; {} effects above 0.99, worst recovery {worst:.2} over {seeds} seeds (>= 0.95); \
             {null_hits} zero-shift discoveries, mean FDR {mean_fdr:.4} (<= 0.07)",
            oracle.join(", "),
            strong.len()
        ),
    )
}

/// Exact two-sided probability that Binomial(n, p) lands more than `z`
/// standard deviations from its mean.
fn binomial_outside(n: u64, p: f64, z: f64) -> f64 {
    let mu = n as f64 * p;
    let sd = (n as f64 * p * (1.0 - p)).sqrt();
    let mut log_pmf = n as f64 * (1.0 - p).ln();
    let mut total = 0.0;
    for x in 0..=n {
        if x > 0 {
            log_pmf += ((n - x + 1) as f64).ln() - (x as f64).ln() + (p / (1.0 - p)).ln();
        }
        if (x as f64 - mu).abs() > z * sd {
            total += log_pmf.exp();
        }
    }
    total
}

fn sampling_determinism() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let start = YearMonth { year: 2019, month: 1 }.start_utc();
    let stems = ["Sarah", "Mike", "Mary", "John", "Linda", "David"];
    let comments: Vec<(Comment, Gender)> = (0..10_000)
        .map(|i| {
            // 150 authors x 4 forums x 3 months, skewed so some keys hold many comments.
            let author = rng.gen_range(0..150u32).min(rng.gen_range(0..150u32));
            let comment = Comment {
                id: format!("c{i}"),
                author: format!("{}{author}", stems[author as usize % stems.len()]),
                subreddit: ["A", "B", "C", "D"][rng.gen_range(0..4)].into(),
                created_utc: start + rng.gen_range(0..3 * 30 * 86_400),
                body: "x".into(),
            };
            (comment, if author % 2 == 0 { Gender::Female } else { Gender::Male })
        })
        .collect();

    let mut failures = Vec::new();
    let mut detail = String::new();
    for mode in [SampleMode::Subreddit, SampleMode::Site] {
        let key_sizes: HashMap<SampleKey, u64> = comments.iter().fold(HashMap::new(), |mut m, (c, _)| {
            *m.entry(SampleKey::of(c, mode)).or_default() += 1;
            m
        });
        let base = select_samples(comments.iter().cloned(), mode, 42);
        let keys: BTreeSet<&SampleKey> = base.iter().map(|s| &s.key).collect();
        if base.len() != key_sizes.len() || keys.len() != base.len() {
            failures.push(format!("{mode:?}: {} samples for {} keys", base.len(), key_sizes.len()));
        }
        let ids: BTreeSet<&str> = base.iter().map(|s| s.comment.id.as_str()).collect();
        for _ in 0..10 {
            let mut shuffled = comments.clone();
            shuffled.shuffle(&mut rng);
            let again = select_samples(shuffled, mode, 42);
            if again.iter().map(|s| s.comment.id.as_str()).collect::<BTreeSet<_>>() != ids {
                failures.push(format!("{mode:?}: permutation changed the selection"));
            }
        }
        if mode == SampleMode::Subreddit {
            let (outside, expected_outside, mean_z2, max_k) = uniformity(&comments, &key_sizes, mode);
            let bound = expected_outside + 4.0 * expected_outside.sqrt() + 1.0;
            if outside as f64 > bound || !(0.9..=1.1).contains(&mean_z2) {
                failures
                    .push(format!("uniformity: {outside} outside 3 sigma (bound {bound:.1}), mean z^2 {mean_z2:.3}"));
            }
            detail = format!(
                "{} keys (max {max_k} comments per key), 10 permutations x 2 modes identical; \
                 {outside} of {} comments outside 3 sigma over 1000 seeds (binomial expectation {expected_outside:.1}), \
                 mean z^2 {mean_z2:.3}",
                key_sizes.len(),
                comments.len()
            );
        }
    }
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(failures.join("; "))
    }
}

/// Selection counts over 1000 seeds against Binomial(1000, 1/k) per comment.
fn uniformity(
    comments: &[(Comment, Gender)],
    key_sizes: &HashMap<SampleKey, u64>,
    mode: SampleMode,
) -> (usize, f64, f64, u64) {
    let seeds = 1000u64;
    let counts: HashMap<String, u64> = (0..seeds)
        .into_par_iter()
        .map(|seed| select_samples(comments.iter().cloned(), mode, seed))
        .fold(HashMap::new, |mut m, samples| {
            for s in samples {
                *m.entry(s.comment.id).or_default() += 1;
            }
            m
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        });
    let mut tail_cache: HashMap<u64, f64> = HashMap::new();
    let (mut outside, mut expected, mut z2_sum, mut n_terms, mut max_k) = (0, 0.0, 0.0, 0usize, 0);
    for (c, _) in comments {
        let k = key_sizes[&SampleKey::of(c, mode)];
        max_k = max_k.max(k);
        if k == 1 {
            continue;
        }
        let p = 1.0 / k as f64;
        let mu = seeds as f64 * p;
        let sd = (seeds as f64 * p * (1.0 - p)).sqrt();
        let x = counts.get(&c.id).copied().unwrap_or(0) as f64;
        let z = (x - mu) / sd;
        z2_sum += z * z;
        n_terms += 1;
        if z.abs() > 3.0 {
            outside += 1;
        }
        expected += *tail_cache.entry(k).or_insert_with(|| binomial_outside(seeds, p, 3.0));
    }
    (outside, expected, z2_sum / n_terms.max(1) as f64, max_k)
}

fn lexicon_validity() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/census1990");
    let (male_path, female_path) = (dir.join("dist.male.first"), dir.join("dist.female.first"));
    let lex = build_from_census_files(&male_path, &female_path).map_err(|e| e.to_string())?;
    let bad = lex
        .iter()
        .filter(|(_, e)| e.dominance < MIN_DOMINANCE || e.popularity_rank > POPULARITY_CUTOFF || e.popularity_rank == 0)
        .count();

    // Independent count straight from the files.
    let read = |p: &Path| -> HashMap<String, f64> {
        fs::read_to_string(p)
            .expect("census file")
            .lines()
            .filter_map(|l| {
                let cols: Vec<&str> = l.split_whitespace().collect();
                (cols.len() == 4).then(|| (cols[0].to_lowercase(), cols[1].parse::<f64>().expect("freq")))
            })
            .fold(HashMap::new(), |mut m, (k, v)| {
                *m.entry(k).or_default() += v;
                m
            })
    };
    let (male, female) = (read(&male_path), read(&female_path));
    let mut names: Vec<(&String, f64, f64)> = male
        .keys()
        .chain(female.keys())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(|n| (n, male.get(n).copied().unwrap_or(0.0), female.get(n).copied().unwrap_or(0.0)))
        .collect();
    names.sort_by(|x, y| (y.1 + y.2).total_cmp(&(x.1 + x.2)).then(x.0.cmp(y.0)));
    let oracle_count = names.iter().take(10_000).filter(|(_, m, f)| m.max(*f) / (m + f) >= 0.9 - 1e-12).count();

    let (n_f, n_m) = (lex.count(Gender::Female), lex.count(Gender::Male));
    check(
        bad == 0 && oracle_count == lex.len() && !lex.is_empty(),
        format!(
            "{} entries ({n_f} female, {n_m} male; independent recount {oracle_count}), reference figure {REFERENCE_LEXICON_SIZE}; \
             {bad} entries violate dominance >= 0.90 or rank <= 10000",
            lex.len()
        ),
    )
}

fn throughput() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let records = 1_000_000usize;
    let vocabulary: Vec<VocabTerm> = (0..1500)
        .map(|i| VocabTerm { term: pseudo_word(i), rate: (0.4 / (1.0 + i as f64 / 8.0)).max(0.002) })
        .collect();
    let subreddits: Vec<SubredditSpec> = (0..40)
        .map(|i| SubredditSpec {
            name: format!("Forum{i:02}"),
            female_activity: 0.02 + 0.003 * (i % 7) as f64,
            male_activity: 0.05 + 0.002 * (i % 5) as f64,
        })
        .collect();
    let cfg = SynthConfig {
        n_female_users: 30_000,
        n_male_users: 45_000,
        n_ungendered_users: 25_000,
        months: 6,
        start_month: YearMonth { year: 2017, month: 7 },
        repeat_prob: 0.3,
        subreddits,
        vocabulary,
        planted_effects: vec![PlantedEffect { term: pseudo_word(40), subreddit: "Forum00".into(), shift: 0.7 }],
        female_names: FEMALE_STEMS.map(String::from).to_vec(),
        male_names: MALE_STEMS.map(String::from).to_vec(),
        noise_rate: 0.05,
        seed: 9,
    };
    let mut corpus = generate_corpus(&cfg).map_err(|e| e.to_string())?;
    if corpus.comments.len() < records {
        return Err(format!("generator produced only {} records", corpus.comments.len()));
    }
    corpus.comments.truncate(records);
    let input = dir.path().join("corpus.ndjson");
    keyness::synth::write_ndjson(&input, &corpus.comments).map_err(|e| e.to_string())?;
    drop(corpus);
    let config = dir.path().join("run.json");
    fs::write(&config, r#"{"inputs": ["corpus.ndjson"], "out": "out", "seed": 1, "top_n": null}"#)
        .map_err(|e| e.to_string())?;

    let started = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_keyness"))
        .args(["run", "--config"])
        .arg(&config)
        .env("RUST_LOG", "warn")
        .status()
        .map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    let summary = fs::read_to_string(dir.path().join("out/summary.md")).unwrap_or_default();
    let read_line = format!("| read | {records} |");
    check(
        status.success() && summary.contains(&read_line) && elapsed < Duration::from_secs(60),
        format!(
            "`run` on {records} records took {:.1} s (< 60 s) on {} thread(s), {status}",
            elapsed.as_secs_f64(),
            rayon::current_num_threads()
        ),
    )
}

fn report_fidelity() -> Outcome {
    let fixture = [
        ("Videos", 528_169u64, 0.197),
        ("TodayILearned", 485_965, 0.215),
        ("Gifs", 316_892, 0.217),
        ("InterestingAsFuck", 64_683, 0.218),
        ("Pics", 851_012, 0.238),
        ("MildlyInteresting", 192_183, 0.242),
        ("AskReddit", 2_030_184, 0.272),
    ];
    let stats: Vec<SubredditStats> = fixture
        .iter()
        .rev()
        .map(|&(name, n, share)| {
            let f = (n as f64 * share).round() as u64;
            SubredditStats::new(name, f, n - f).expect("nonempty")
        })
        .collect();
    let runs: BTreeMap<String, AssociationRun> = stats
        .iter()
        .map(|s| {
            let mut t = TermTable::new(s.subreddit.clone());
            t.female_total = s.female_total;
            t.male_total = s.male_total;
            (s.subreddit.clone(), associate(&t, 0.05).expect("both genders present"))
        })
        .collect();
    let table = female_share_table(&stats, &runs, None, 5);
    let csv = share_table_csv(&table);
    let md = share_table_markdown(&table);
    let order: Vec<&str> = table.rows.iter().map(|r| r.subreddit.as_str()).collect();
    let expected_order: Vec<&str> = fixture.iter().map(|r| r.0).collect();
    let all_rows = fixture.iter().all(|&(name, n, share)| {
        csv.contains(&format!("\n{name},{n},{:.1}%,", share * 100.0))
            && md.contains(&format!("| {name} | {n} | {:.1}% |", share * 100.0))
    });
    check(
        csv.contains("\nAskReddit,2030184,27.2%,")
            && md.contains("| AskReddit | 2030184 | 27.2% |")
            && all_rows
            && order == expected_order,
        format!("AskReddit row \"AskReddit,2030184,27.2%\" in CSV and Markdown; order {}", order.join(" < ")),
    )
}

fn main() {
    let lexicon = bundled_lexicon();
    let criteria: Vec<Criterion> = vec![
        ("Gaming \"girl\" statistic", Box::new(gaming_statistic), Duration::from_secs(1)),
        ("statistic oracles", Box::new(statistic_oracles), Duration::from_secs(5)),
        ("pruning brute force", Box::new(pruning_brute_force), Duration::from_secs(30)),
        ("BH step-up", Box::new(bh_correctness), Duration::from_secs(10)),
        ("null FDR", Box::new(|| null_fdr(&lexicon)), Duration::from_secs(600)),
        ("power recovery", Box::new(|| power_recovery(&lexicon)), Duration::from_secs(600)),
        ("sampling", Box::new(sampling_determinism), Duration::from_secs(120)),
        ("lexicon", Box::new(lexicon_validity), Duration::from_secs(60)),
        ("throughput", Box::new(throughput), Duration::from_secs(600)),
        ("report fidelity", Box::new(report_fidelity), Duration::from_secs(1)),
    ];
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = f();
        let elapsed = started.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= *budget => (true, d),
            Ok(d) => (false, format!("{d}; over the {budget:?} budget")),
            Err(d) => (false, d),
        };
        failed += usize::from(!ok);
        println!("{} {:>2} {name}: {detail} [{:.2} s]", if ok { "PASS" } else { "FAIL" }, i + 1, elapsed.as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
