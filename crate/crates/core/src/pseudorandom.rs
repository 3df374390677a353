//! Pseudo-randomness measurements: expander-mixing deviations, empirical
//! bi-jumbledness, the `lambda / sqrt(d)` family trend, Cheeger bounds and
//! quasi-random statistics.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bitset::Bitset;
use crate::cayley::CayleyGraph;
use crate::error::{Error, Result};
use crate::number_theory::GraphParams;
use crate::spectrum::{closed_form_spectrum, SpectrumReport};

/// Absolute slack when comparing a float deviation with `lambda`.
pub const MIXING_SLACK: f64 = 1e-9;

/// Largest graph [`cheeger_bruteforce`] will enumerate.
pub const CHEEGER_CAP: u64 = 20;

/// Largest graph for which [`jumbledness_alpha`] enumerates every pair.
pub const EXHAUSTIVE_JUMBLE_CAP: usize = 16;

fn to_bitset(g: &CayleyGraph, vertices: &[u64]) -> Bitset {
    Bitset::from_indices(g.n(), vertices.iter().map(|&v| v as usize))
}

fn edge_count_bits(g: &CayleyGraph, u: &Bitset, w: &Bitset) -> u64 {
    u.iter_ones().map(|x| g.row(x).intersection_count(w) as u64).sum()
}

/// `e(U, W) = sum_{u in U} |N(u) ∩ W|`; edges inside `U ∩ W` count twice.
pub fn edge_count(g: &CayleyGraph, u: &[u64], w: &[u64]) -> Result<u64> {
    for &v in u.iter().chain(w) {
        g.check_vertex(v)?;
    }
    Ok(edge_count_bits(g, &to_bitset(g, u), &to_bitset(g, w)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingSample {
    #[serde(rename = "U")]
    pub u: Vec<u64>,
    #[serde(rename = "W")]
    pub w: Vec<u64>,
    pub e_uw: u64,
    pub expected: f64,
    pub deviation: f64,
    pub normalized: f64,
}

fn measure(e_uw: u64, u_len: usize, w_len: usize, p: f64) -> (f64, f64, f64) {
    let expected = p * u_len as f64 * w_len as f64;
    let deviation = (e_uw as f64 - expected).abs();
    let scale = ((u_len * w_len) as f64).sqrt();
    let normalized = if scale == 0.0 { 0.0 } else { deviation / scale };
    (expected, deviation, normalized)
}

fn sample(g: &CayleyGraph, p: f64, u: Vec<u64>, w: Vec<u64>) -> MixingSample {
    let e_uw = edge_count_bits(g, &to_bitset(g, &u), &to_bitset(g, &w));
    let (expected, deviation, normalized) = measure(e_uw, u.len(), w.len(), p);
    MixingSample {
        u,
        w,
        e_uw,
        expected,
        deviation,
        normalized,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingScan {
    pub seed: u64,
    pub sample_count: usize,
    pub max_normalized: f64,
    pub lambda: f64,
    pub violations: usize,
    pub ok: bool,
    #[serde(skip)]
    pub samples: Vec<MixingSample>,
}

/// Stream `i` of the seeded generator; independent of scheduling.
fn stream_rng(seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    rng
}

/// Size log-uniform in `[1, n]`, members uniform without replacement.
fn random_subset(rng: &mut ChaCha8Rng, n: usize) -> Vec<u64> {
    let size = (rng.random::<f64>() * ((n + 1) as f64).ln()).exp().floor() as usize;
    let size = size.clamp(1, n);
    let mut v: Vec<u64> = index::sample(rng, n, size).into_iter().map(|x| x as u64).collect();
    v.sort_unstable();
    v
}

/// Draws `samples` seeded pairs `(U, W)` and compares each normalized
/// deviation against `lambda` from the spectrum.
pub fn mixing_scan(g: &CayleyGraph, spectrum: &SpectrumReport, samples: usize, seed: u64) -> Result<MixingScan> {
    if samples == 0 {
        return Err(Error::NoSamples);
    }
    let n = g.n();
    let p = g.degree() as f64 / n as f64;
    let drawn: Vec<MixingSample> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            let u = random_subset(&mut rng, n);
            let w = random_subset(&mut rng, n);
            sample(g, p, u, w)
        })
        .collect();
    Ok(summarize(seed, drawn, spectrum.lambda))
}

fn summarize(seed: u64, samples: Vec<MixingSample>, lambda: f64) -> MixingScan {
    let max_normalized = samples.iter().map(|s| s.normalized).fold(0.0, f64::max);
    let violations = samples
        .iter()
        .filter(|s| s.normalized > lambda + MIXING_SLACK)
        .count();
    MixingScan {
        seed,
        sample_count: samples.len(),
        max_normalized,
        lambda,
        violations,
        ok: violations == 0,
        samples,
    }
}

fn subsets_up_to(n: usize, max_size: usize) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_size {
        let mut next = Vec::new();
        for s in &frontier {
            let start = s.last().map_or(0, |&x: &u64| x + 1);
            for v in start..n as u64 {
                let mut t = s.clone();
                t.push(v);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Every pair `(U, W)` with `1 <= |U|, |W| <= max_size`. Samples are not retained.
pub fn mixing_exhaustive(g: &CayleyGraph, spectrum: &SpectrumReport, max_size: usize) -> MixingScan {
    let p = g.degree() as f64 / g.n() as f64;
    let subsets: Vec<Vec<u64>> = subsets_up_to(g.n(), max_size).into_iter().skip(1).collect();
    let (count, max_normalized, violations) = subsets
        .par_iter()
        .map(|u| {
            let ub = to_bitset(g, u);
            let mut best = 0f64;
            let mut bad = 0usize;
            for w in &subsets {
                let e_uw = edge_count_bits(g, &ub, &to_bitset(g, w));
                let (_, _, normalized) = measure(e_uw, u.len(), w.len(), p);
                best = best.max(normalized);
                bad += (normalized > spectrum.lambda + MIXING_SLACK) as usize;
            }
            (subsets.len(), best, bad)
        })
        .reduce(|| (0, 0.0, 0), |a, b| (a.0 + b.0, a.1.max(b.1), a.2 + b.2));
    MixingScan {
        seed: 0,
        sample_count: count,
        max_normalized,
        lambda: spectrum.lambda,
        violations,
        ok: violations == 0,
        samples: Vec::new(),
    }
}

/// Empirical lower bound on the bi-jumbledness constant `alpha` at density `p`:
/// the maximum of `|e(U,W) - p|U||W|| / sqrt(|U||W|)` over sampled pairs, and
/// over every pair when `n <= 16`. Not a certificate.
pub fn jumbledness_alpha(g: &CayleyGraph, p: f64, samples: usize, seed: u64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    let n = g.n();
    let mut best = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            let u = random_subset(&mut rng, n);
            let w = random_subset(&mut rng, n);
            sample(g, p, u, w).normalized
        })
        .reduce(|| 0.0, f64::max);
    if n <= EXHAUSTIVE_JUMBLE_CAP {
        best = best.max(exhaustive_alpha(g, p));
    }
    Ok(best)
}

fn small_rows(g: &CayleyGraph) -> Vec<u32> {
    (0..g.n())
        .map(|v| g.neighbors(v).fold(0u32, |m, x| m | 1 << x))
        .collect()
}

fn exhaustive_alpha(g: &CayleyGraph, p: f64) -> f64 {
    let n = g.n();
    let rows = small_rows(g);
    let full = 1u32 << n;
    (0..full)
        .into_par_iter()
        .map(|u| {
            let mut best = 0f64;
            for w in 0..full {
                let e: u32 = (0..n)
                    .filter(|&x| u >> x & 1 == 1)
                    .map(|x| (rows[x] & w).count_ones())
                    .sum();
                let (_, _, normalized) =
                    measure(e as u64, u.count_ones() as usize, w.count_ones() as usize, p);
                best = best.max(normalized);
            }
            best
        })
        .reduce(|| 0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrendInstance {
    pub q: u64,
    pub e: u32,
    pub n: u64,
    pub degree: u64,
    pub lambda: f64,
    pub ratio: f64,
    pub edge_probability: f64,
    /// `d / n == 1/2 - 1/(2q)` checked by cross-multiplication.
    pub edge_probability_exact: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrendVerdict {
    /// `lambda / sqrt(d)` strictly increasing: not a best pseudo-random family.
    GrowingRatio,
    /// `lambda / sqrt(d) <= 2` throughout.
    BoundedRatio,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyTrendReport {
    pub instances: Vec<TrendInstance>,
    pub epsilon: f64,
    pub strictly_increasing: bool,
    pub max_ratio: f64,
    pub verdict: TrendVerdict,
}

/// Bound on `lambda / sqrt(d)` used to call an `e = 1` family bounded.
pub const BOUNDED_RATIO: f64 = 2.0;

/// `lambda / sqrt(d)` per instance from the closed-form spectrum, sorted by `q`.
pub fn best_pr_trend(instances: &[GraphParams]) -> Result<FamilyTrendReport> {
    if instances.len() < 2 {
        return Err(Error::TooFewInstances(instances.len()));
    }
    let e = instances[0].e();
    if let Some(other) = instances.iter().find(|p| p.e() != e) {
        return Err(Error::MixedExponents(e, other.e()));
    }
    let mut sorted = instances.to_vec();
    sorted.sort_by_key(|p| p.q());
    let rows: Vec<TrendInstance> = sorted
        .iter()
        .map(|p| {
            let lambda = closed_form_spectrum(p).lambda;
            let d = p.degree();
            TrendInstance {
                q: p.q(),
                e: p.e(),
                n: p.n(),
                degree: d,
                lambda,
                ratio: lambda / (d as f64).sqrt(),
                edge_probability: d as f64 / p.n() as f64,
                edge_probability_exact: d as u128 * 2 * p.q() as u128
                    == p.n() as u128 * (p.q() - 1) as u128,
            }
        })
        .collect();
    let strictly_increasing = rows.windows(2).all(|w| w[1].ratio > w[0].ratio);
    let max_ratio = rows.iter().map(|r| r.ratio).fold(f64::MIN, f64::max);
    let verdict = if e >= 3 && strictly_increasing {
        TrendVerdict::GrowingRatio
    } else if e == 1 && max_ratio <= BOUNDED_RATIO {
        TrendVerdict::BoundedRatio
    } else {
        TrendVerdict::Inconclusive
    };
    Ok(FamilyTrendReport {
        instances: rows,
        epsilon: (e as f64 - 1.0) / 2.0,
        strictly_increasing,
        max_ratio,
        verdict,
    })
}

/// Spectral lower bound `(d - lambda_2) / 2` on the Cheeger constant.
pub fn cheeger_spectral_lower(spectrum: &SpectrumReport) -> f64 {
    (spectrum.degree() - spectrum.lambda2()) / 2.0
}

/// `min |E(S, V \ S)| / |S|` over nonempty `S` with `|S| <= n/2`, by enumeration.
pub fn cheeger_bruteforce(g: &CayleyGraph) -> Result<f64> {
    let n = g.n();
    if n as u64 > CHEEGER_CAP {
        return Err(Error::CapExceeded {
            what: "Cheeger enumeration",
            n: n as u64,
            cap: CHEEGER_CAP,
        });
    }
    let rows = small_rows(g);
    let all = (1u32 << n) - 1;
    let (num, den) = (1u32..=all)
        .filter(|s| s.count_ones() as usize <= n / 2)
        .map(|s| {
            let cut: u32 = (0..n)
                .filter(|&x| s >> x & 1 == 1)
                .map(|x| (rows[x] & !s & all).count_ones())
                .sum();
            (cut as u64, s.count_ones() as u64)
        })
        .min_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)))
        .unwrap_or((0, 1));
    Ok(num as f64 / den as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuasiRandomStats {
    pub edge_count: u64,
    pub lambda1_over_pn: f64,
    pub lambda2_over_n: f64,
}

pub fn quasirandom_stats(g: &CayleyGraph, spectrum: &SpectrumReport) -> QuasiRandomStats {
    let n = g.n() as f64;
    let p = g.degree() as f64 / n;
    QuasiRandomStats {
        edge_count: g.edge_count(),
        lambda1_over_pn: spectrum.degree() / (p * n),
        lambda2_over_n: spectrum.lambda2() / n,
    }
}
