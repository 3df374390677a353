//! t-existential-closure: exhaustive certification over bitset rows, the
//! character-sum functions `f`, `g`, `h`, the sufficient inequality in exact
//! integers, and the least prime `q_1` for which it holds.

use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;

use crate::cayley::CayleyGraph;
use crate::error::{Error, Result};
use crate::number_theory::{is_pythagorean_prime, legendre_symbol, GraphParams, QuadraticCharacter};

/// Default word-operation budget for [`brute_force_ec`].
pub const DEFAULT_BUDGET: f64 = 1e12;

/// Largest `t` the exhaustive engine accepts; it keeps a `2^t` word buffer per subset.
pub const MAX_EXHAUSTIVE_T: u32 = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exhaustive,
    SufficientCondition,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    #[serde(rename = "A")]
    pub a: Vec<u64>,
    #[serde(rename = "B")]
    pub b: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EcCertificate {
    pub t: u32,
    pub verified: bool,
    pub method: Method,
    pub counterexample: Option<Counterexample>,
    pub witness_count_min: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct BruteForceOptions {
    pub budget: f64,
    pub force: bool,
    /// Worker count; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl Default for BruteForceOptions {
    fn default() -> Self {
        BruteForceOptions {
            budget: DEFAULT_BUDGET,
            force: false,
            threads: None,
        }
    }
}

/// Sorts, dedups and range-checks `A` and `B`, rejecting any overlap.
fn normalize_pair(g: &CayleyGraph, a: &[u64], b: &[u64]) -> Result<(Vec<u64>, Vec<u64>)> {
    let prep = |s: &[u64]| -> Result<Vec<u64>> {
        let mut v = s.to_vec();
        v.sort_unstable();
        v.dedup();
        for &x in &v {
            g.check_vertex(x)?;
        }
        Ok(v)
    };
    let (a, b) = (prep(a)?, prep(b)?);
    if let Some(&x) = a.iter().find(|x| b.binary_search(x).is_ok()) {
        return Err(Error::OverlappingSets(x));
    }
    Ok((a, b))
}

/// Bitset of valid extenders for `(A, B)`, as raw words.
fn extender_words(g: &CayleyGraph, a: &[u64], b: &[u64]) -> Vec<u64> {
    let n = g.n();
    let words = n.div_ceil(64);
    let mut acc = vec![u64::MAX; words];
    if let Some(last) = acc.last_mut() {
        *last = g.row(0).tail_mask();
    }
    for &x in a {
        for (w, r) in acc.iter_mut().zip(g.row(x as usize).words()) {
            *w &= r;
        }
    }
    for &x in b {
        for (w, r) in acc.iter_mut().zip(g.row(x as usize).words()) {
            *w &= !r;
        }
    }
    for &x in a.iter().chain(b) {
        acc[x as usize / 64] &= !(1u64 << (x % 64));
    }
    acc
}

/// Smallest `z` outside `A ∪ B` adjacent to all of `A` and none of `B`.
pub fn extender(g: &CayleyGraph, a: &[u64], b: &[u64]) -> Result<Option<u64>> {
    let (a, b) = normalize_pair(g, a, b)?;
    let words = extender_words(g, &a, &b);
    Ok(words
        .iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, &w)| (i * 64) as u64 + w.trailing_zeros() as u64))
}

/// Number of valid extenders for `(A, B)`.
pub fn extender_count(g: &CayleyGraph, a: &[u64], b: &[u64]) -> Result<u64> {
    let (a, b) = normalize_pair(g, a, b)?;
    Ok(extender_words(g, &a, &b).iter().map(|w| w.count_ones() as u64).sum())
}

/// `C(n, t) * 2^t * ceil(n / 64)` as a float.
pub fn brute_force_cost(n: u64, t: u32) -> f64 {
    let mut binom = 1f64;
    for i in 0..t as u64 {
        binom = binom * (n - i) as f64 / (i + 1) as f64;
    }
    binom * 2f64.powi(t as i32) * n.div_ceil(64) as f64
}

struct ChunkOutcome {
    failure: Option<(Vec<u64>, usize)>,
    min_count: u64,
}

/// For every split mask of `subset` (bit `i` set puts `subset[i]` in `A`),
/// the number of extenders, accumulated one word at a time.
struct SplitCounter {
    buf: Vec<u64>,
    counts: Vec<u64>,
}

impl SplitCounter {
    fn new(t: u32) -> Self {
        SplitCounter {
            buf: vec![0; 1 << t],
            counts: vec![0; 1 << t],
        }
    }

    fn run(&mut self, g: &CayleyGraph, subset: &[u64]) -> &[u64] {
        let words = g.n().div_ceil(64);
        let tail = g.row(0).tail_mask();
        self.counts.iter_mut().for_each(|c| *c = 0);
        for w in 0..words {
            let mut full = if w + 1 == words { tail } else { u64::MAX };
            for &c in subset {
                if c as usize / 64 == w {
                    full &= !(1u64 << (c % 64));
                }
            }
            self.buf[0] = full;
            for (i, &c) in subset.iter().enumerate() {
                let r = g.row(c as usize).words()[w];
                let half = 1usize << i;
                for m in 0..half {
                    let v = self.buf[m];
                    self.buf[m] = v & !r;
                    self.buf[m | half] = v & r;
                }
            }
            for (count, v) in self.counts.iter_mut().zip(&self.buf) {
                *count += v.count_ones() as u64;
            }
        }
        &self.counts
    }
}

/// All `t`-subsets whose least element is `first`, in lexicographic order,
/// stopping early once a failure at a smaller first element is known.
fn scan_chunk(g: &CayleyGraph, t: u32, first: u64, best_fail: &AtomicU64) -> ChunkOutcome {
    let n = g.n() as u64;
    let k = t as usize - 1;
    let mut outcome = ChunkOutcome {
        failure: None,
        min_count: u64::MAX,
    };
    if first + k as u64 >= n {
        return outcome;
    }
    let mut counter = SplitCounter::new(t);
    let mut subset: Vec<u64> = (0..=k as u64).map(|i| first + i).collect();
    loop {
        if best_fail.load(Ordering::Relaxed) < first {
            return outcome;
        }
        let counts = counter.run(g, &subset);
        if let Some(mask) = counts.iter().position(|&c| c == 0) {
            outcome.failure = Some((subset, mask));
            outcome.min_count = 0;
            best_fail.fetch_min(first, Ordering::Relaxed);
            return outcome;
        }
        outcome.min_count = outcome.min_count.min(*counts.iter().min().unwrap());
        // advance the tail subset[1..] to the next combination of {first+1, .., n-1}
        let mut i = k;
        while i >= 1 && subset[i] == n - (k - i) as u64 - 1 {
            i -= 1;
        }
        if i == 0 {
            return outcome;
        }
        subset[i] += 1;
        for j in i + 1..=k {
            subset[j] = subset[j - 1] + 1;
        }
    }
}

/// Exhaustive t-e.c. check over every `t`-subset and every split into `(A, B)`.
///
/// Work is split by the least element of the subset; the lexicographically
/// first counterexample is reported regardless of how many workers ran.
pub fn brute_force_ec(g: &CayleyGraph, t: u32, opts: &BruteForceOptions) -> Result<EcCertificate> {
    let n = g.params().n();
    let max_t = (n - 1).min(MAX_EXHAUSTIVE_T as u64);
    if t == 0 || t as u64 > max_t {
        return Err(Error::InvalidT { t, max: max_t });
    }
    let cost = brute_force_cost(n, t);
    if cost > opts.budget && !opts.force {
        return Err(Error::BudgetExceeded {
            cost,
            budget: opts.budget,
        });
    }

    let best_fail = AtomicU64::new(u64::MAX);
    let work = || {
        (0..n)
            .into_par_iter()
            .map(|first| scan_chunk(g, t, first, &best_fail))
            .reduce(
                || ChunkOutcome {
                    failure: None,
                    min_count: u64::MAX,
                },
                |x, y| ChunkOutcome {
                    failure: match (x.failure, y.failure) {
                        (Some(p), Some(q)) => Some(p.min(q)),
                        (p, q) => p.or(q),
                    },
                    min_count: x.min_count.min(y.min_count),
                },
            )
    };
    let merged = match opts.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .expect("thread pool")
            .install(work),
        None => work(),
    };

    Ok(match merged.failure {
        Some((subset, mask)) => {
            let (a, b) = split_subset(&subset, mask);
            EcCertificate {
                t,
                verified: false,
                method: Method::Exhaustive,
                counterexample: Some(Counterexample { a, b }),
                witness_count_min: Some(0),
            }
        }
        None => EcCertificate {
            t,
            verified: true,
            method: Method::Exhaustive,
            counterexample: None,
            witness_count_min: Some(merged.min_count),
        },
    })
}

fn split_subset(subset: &[u64], mask: usize) -> (Vec<u64>, Vec<u64>) {
    let (a, b): (Vec<_>, Vec<_>) = subset.iter().enumerate().partition(|(i, _)| mask >> i & 1 == 1);
    (a.into_iter().map(|(_, &x)| x).collect(), b.into_iter().map(|(_, &x)| x).collect())
}

/// Certificate derived from [`sufficient_condition`]; `verified = false`
/// means only that the inequality fails, not that the graph is not t-e.c.
pub fn sufficient_certificate(params: &GraphParams, t: u32) -> EcCertificate {
    EcCertificate {
        t,
        verified: sufficient_condition(params, t),
        method: Method::SufficientCondition,
        counterexample: None,
        witness_count_min: None,
    }
}

fn big_pow(base: u64, exp: u32) -> BigInt {
    num_traits::pow(BigInt::from(base), exp as usize)
}

/// `c1 = t 2^(t-1) - 2^t + 1` and `L = q^e - t 2^t q^(e-1) + t 2^(t-1)`.
fn inequality_terms(q: u64, e: u32, t: u32) -> (BigInt, BigInt) {
    let t_big = BigInt::from(t);
    let two_t = num_traits::pow(BigInt::from(2), t as usize);
    let two_t1 = &two_t / 2;
    let c1 = &t_big * &two_t1 - &two_t + 1;
    let l = big_pow(q, e) - &t_big * &two_t * big_pow(q, e - 1) + &t_big * &two_t1;
    (c1, l)
}

/// `q^e - (t 2^(t-1) - 2^t + 1) q^(e-1/2) - t 2^t q^(e-1) + t 2^(t-1) > 0`,
/// decided in exact integers as `L > 0 && L^2 > c1^2 q^(2e-1)`.
pub fn sufficient_condition(params: &GraphParams, t: u32) -> bool {
    sufficient_condition_raw(params.q(), params.e(), t)
}

fn sufficient_condition_raw(q: u64, e: u32, t: u32) -> bool {
    if t == 0 {
        return false;
    }
    let (c1, l) = inequality_terms(q, e, t);
    debug_assert!(!c1.is_negative());
    l.is_positive() && &l * &l > &c1 * &c1 * big_pow(q, 2 * e - 1)
}

/// Floating-point value of the left side of the sufficient inequality, for display.
pub fn sufficient_condition_margin(params: &GraphParams, t: u32) -> f64 {
    let (q, e) = (params.q() as f64, params.e() as f64);
    let t = t as f64;
    let two_t = 2f64.powf(t);
    q.powf(e) - (t * two_t / 2.0 - two_t + 1.0) * q.powf(e - 0.5) - t * two_t * q.powf(e - 1.0)
        + t * two_t / 2.0
}

/// Least prime `q = 1 (mod 4)` satisfying [`sufficient_condition`] for `(t, e)`.
pub fn find_least_q1(t: u32, e: u32) -> Result<u64> {
    if t == 0 {
        return Err(Error::InvalidT { t, max: u64::MAX });
    }
    if e % 2 == 0 {
        return Err(Error::InvalidParams {
            q: 0,
            e,
            reason: "e must be odd".into(),
        });
    }
    let mut q = 5;
    loop {
        if is_pythagorean_prime(q) && sufficient_condition_raw(q, e, t) {
            return Ok(q);
        }
        q += 4;
    }
}

/// `Z_{A,B}`: every residue congruent mod `q` to some element of `A ∪ B`.
pub fn forbidden_set(g: &CayleyGraph, a: &[u64], b: &[u64]) -> Result<Vec<u64>> {
    let (a, b) = normalize_pair(g, a, b)?;
    let classes = class_marks(g.params().q(), a.iter().chain(&b));
    Ok((0..g.params().n())
        .filter(|z| classes[(z % g.params().q()) as usize])
        .collect())
}

fn class_marks<'a>(q: u64, points: impl Iterator<Item = &'a u64>) -> Vec<bool> {
    let mut marks = vec![false; q as usize];
    for &c in points {
        marks[(c % q) as usize] = true;
    }
    marks
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharSumReport {
    #[serde(rename = "A")]
    pub a: Vec<u64>,
    #[serde(rename = "B")]
    pub b: Vec<u64>,
    pub t: u32,
    pub f_value: i64,
    pub g_value: i64,
    pub h_value: i64,
    pub z_forbidden_size: u64,
    pub g_lower_bound: f64,
}

/// `q^e - (t 2^(t-1) - 2^t + 1) q^(e-1/2) - t 2^t q^(e-1) + t 2^t`.
pub fn g_lower_bound(params: &GraphParams, t: u32) -> f64 {
    let (q, e) = (params.q() as f64, params.e() as f64);
    let t = t as f64;
    let two_t = 2f64.powf(t);
    q.powf(e) - (t * two_t / 2.0 - two_t + 1.0) * q.powf(e - 0.5) - t * two_t * q.powf(e - 1.0)
        + t * two_t
}

fn summand(chi: &QuadraticCharacter, z: u64, a: &[u64], b: &[u64]) -> i64 {
    let mut p = 1i64;
    for &x in a {
        p *= 1 + chi.at_diff(z, x) as i64;
    }
    for &x in b {
        p *= 1 - chi.at_diff(z, x) as i64;
    }
    p
}

/// Direct evaluation of `f`, `g` and `h` over their respective ranges.
pub fn char_sums(g: &CayleyGraph, a: &[u64], b: &[u64]) -> Result<CharSumReport> {
    let (a, b) = normalize_pair(g, a, b)?;
    let t = (a.len() + b.len()) as u32;
    if t == 0 {
        return Err(Error::InvalidT { t, max: g.params().n() - 1 });
    }
    let chi = g.character();
    let q = g.params().q();
    let classes = class_marks(q, a.iter().chain(&b));
    let in_z = |z: u64| classes[(z % q) as usize];
    let in_ab = |z: u64| a.binary_search(&z).is_ok() || b.binary_search(&z).is_ok();

    let n = g.params().n();
    let f_value = (0..n).filter(|&z| !in_z(z)).map(|z| summand(chi, z, &a, &b)).sum();
    // Z* = Z \ (A ∪ B)
    let g_value = (0..n)
        .filter(|&z| !in_z(z) || in_ab(z))
        .map(|z| summand(chi, z, &a, &b))
        .sum();
    let h_value = a.iter().chain(&b).map(|&z| summand(chi, z, &a, &b)).sum();
    let z_forbidden_size = (0..n).filter(|&z| in_z(z)).count() as u64;

    Ok(CharSumReport {
        g_lower_bound: g_lower_bound(g.params(), t),
        a,
        b,
        t,
        f_value,
        g_value,
        h_value,
        z_forbidden_size,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeilCheck {
    pub sum: i64,
    pub bound: f64,
    pub ok: bool,
    /// The same product sum over `Z/q` at the points reduced mod `q`.
    pub reduced_sum: i64,
    pub reduced_distinct: bool,
    /// `sum == q^(e-1) * reduced_sum`.
    pub reduction_holds: bool,
}

/// `sum_x chi(x - a_1) ... chi(x - a_k)` against `(k - 1) q^(e-1/2)`.
pub fn verify_weil_bound(chi: &QuadraticCharacter, points: &[u64]) -> Result<WeilCheck> {
    let params = *chi.params();
    let (n, q) = (params.n(), params.q());
    let mut sorted = points.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DuplicatePoint(w[0]));
        }
    }
    for &p in points {
        if p >= n {
            return Err(Error::VertexOutOfRange { vertex: p, n });
        }
    }
    let k = points.len() as u64;
    if k == 0 {
        return Err(Error::InvalidT { t: 0, max: n });
    }

    let sum: i64 = (0..n)
        .map(|x| points.iter().map(|&a| chi.at_diff(x, a) as i64).product::<i64>())
        .sum();

    let reduced: Vec<u64> = points.iter().map(|p| p % q).collect();
    let mut reduced_sorted = reduced.clone();
    reduced_sorted.sort_unstable();
    reduced_sorted.dedup();
    let reduced_distinct = reduced_sorted.len() == reduced.len();
    let legendre: Vec<i64> = (0..q)
        .map(|r| legendre_symbol(r as i64, q).expect("q is an odd prime") as i64)
        .collect();
    let reduced_sum: i64 = (0..q)
        .map(|x| {
            reduced
                .iter()
                .map(|&a| legendre[((x + q - a) % q) as usize])
                .product::<i64>()
        })
        .sum();
    let reduction_holds = sum == params.q_pow_e_minus_1() as i64 * reduced_sum;

    // |sum| <= (k-1) q^(e-1) sqrt(q)  <=>  sum^2 <= (k-1)^2 q^(2e-1)
    let lhs = (sum as i128 * sum as i128) as u128;
    let rhs = (k as u128 - 1)
        .checked_pow(2)
        .and_then(|c| c.checked_mul((q as u128).checked_pow(2 * params.e() - 1)?));
    let ok = rhs.is_none_or(|rhs| lhs <= rhs);
    let bound = (k - 1) as f64 * (q as f64).powf(params.e() as f64 - 0.5);

    Ok(WeilCheck {
        sum,
        bound,
        ok,
        reduced_sum,
        reduced_distinct,
        reduction_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(q: u64, e: u32) -> CayleyGraph {
        CayleyGraph::new(q, e).unwrap()
    }

    fn params(q: u64, e: u32) -> GraphParams {
        GraphParams::new(q, e).unwrap()
    }

    #[test]
    fn extender_examples() {
        let p13 = graph(13, 1);
        assert_eq!(extender(&p13, &[0], &[]).unwrap(), Some(1));
        assert_eq!(extender(&p13, &[], &[0]).unwrap(), Some(2));
        let c5 = graph(5, 1);
        assert_eq!(extender(&c5, &[0, 2], &[]).unwrap(), Some(1));
        assert_eq!(extender(&c5, &[0, 1], &[]).unwrap(), None);
        assert!(matches!(extender(&c5, &[0, 1], &[1]), Err(Error::OverlappingSets(1))));
        assert!(matches!(extender(&c5, &[5], &[]), Err(Error::VertexOutOfRange { .. })));
    }

    #[test]
    fn brute_force_small() {
        let c5 = graph(5, 1);
        let opts = BruteForceOptions::default();
        let cert = brute_force_ec(&c5, 1, &opts).unwrap();
        assert!(cert.verified);
        assert_eq!(cert.witness_count_min, Some(2));
        let cert = brute_force_ec(&c5, 2, &opts).unwrap();
        assert!(!cert.verified);
        assert_eq!(
            cert.counterexample,
            Some(Counterexample { a: vec![0, 1], b: vec![] })
        );
        assert!(brute_force_ec(&graph(13, 1), 2, &opts).unwrap().verified);
    }

    #[test]
    fn brute_force_rejects_bad_t_and_budget() {
        let g = graph(13, 1);
        assert!(matches!(
            brute_force_ec(&g, 0, &BruteForceOptions::default()),
            Err(Error::InvalidT { .. })
        ));
        assert!(matches!(
            brute_force_ec(&g, 13, &BruteForceOptions::default()),
            Err(Error::InvalidT { .. })
        ));
        let tight = BruteForceOptions {
            budget: 10.0,
            ..Default::default()
        };
        assert!(matches!(brute_force_ec(&g, 2, &tight), Err(Error::BudgetExceeded { .. })));
        let forced = BruteForceOptions { force: true, ..tight };
        assert!(brute_force_ec(&g, 2, &forced).unwrap().verified);
    }

    #[test]
    fn brute_force_independent_of_threads() {
        let g = graph(5, 3);
        for t in 1..=3 {
            let one = brute_force_ec(&g, t, &BruteForceOptions { threads: Some(1), ..Default::default() }).unwrap();
            let many = brute_force_ec(&g, t, &BruteForceOptions { threads: Some(7), ..Default::default() }).unwrap();
            assert_eq!(one, many, "t = {t}");
        }
    }

    #[test]
    fn sufficient_condition_examples() {
        assert!(sufficient_condition(&params(13, 1), 2));
        assert!(!sufficient_condition(&params(5, 3), 2));
        assert!(sufficient_condition(&params(13, 3), 2));
        assert!(!sufficient_condition(&params(5, 1), 2));
        assert!(sufficient_condition(&params(53, 1), 3));
    }

    #[test]
    fn least_q1_examples() {
        assert_eq!(find_least_q1(1, 3).unwrap(), 5);
        assert_eq!(find_least_q1(2, 3).unwrap(), 13);
        assert_eq!(find_least_q1(1, 1).unwrap(), 5);
        assert!(find_least_q1(0, 3).is_err());
        assert!(find_least_q1(2, 2).is_err());
    }

    #[test]
    fn forbidden_set_examples() {
        let g = graph(5, 3);
        let z = forbidden_set(&g, &[0], &[]).unwrap();
        assert_eq!(z, (0..125).step_by(5).collect::<Vec<_>>());
        assert_eq!(forbidden_set(&g, &[0], &[5]).unwrap().len(), 25);
        assert_eq!(forbidden_set(&g, &[], &[0, 1]).unwrap().len(), 50);
    }

    #[test]
    fn char_sum_examples() {
        let g = graph(5, 3);
        let r = char_sums(&g, &[7], &[]).unwrap();
        assert_eq!(r.h_value, 1);
        assert_eq!(r.f_value, r.g_value - r.h_value);
        assert!(char_sums(&g, &[], &[]).is_err());

        let g = graph(13, 3);
        let r = char_sums(&g, &[3], &[100]).unwrap();
        assert!((g_lower_bound(g.params(), 2) - (2197.0 - 13f64.powf(2.5) - 1352.0 + 8.0)).abs() < 1e-9);
        assert!(r.g_value as f64 >= r.g_lower_bound);
    }

    #[test]
    fn weil_examples() {
        let chi = QuadraticCharacter::new(params(5, 3));
        let w = verify_weil_bound(&chi, &[17]).unwrap();
        assert_eq!((w.sum, w.bound, w.ok), (0, 0.0, true));
        let w = verify_weil_bound(&chi, &[0, 1]).unwrap();
        assert!(w.ok && w.reduction_holds && w.reduced_distinct);
        assert_eq!(w.sum, 25 * w.reduced_sum);
        assert!(matches!(verify_weil_bound(&chi, &[3, 3]), Err(Error::DuplicatePoint(3))));
    }

    #[test]
    fn weil_bound_fails_when_points_collide_mod_q() {
        // 0 and 5 are distinct in Z/125 but equal mod 5: the product is chi^2 = 1
        // off the class, so the sum is 125 - 25 = 100 > 5^(2.5).
        let chi = QuadraticCharacter::new(params(5, 3));
        let w = verify_weil_bound(&chi, &[0, 5]).unwrap();
        assert_eq!(w.sum, 100);
        assert!(!w.reduced_distinct && w.reduction_holds && !w.ok);
    }
}
