//! Exact spectrum of `G_{q^e}` from the Gauss-sum closed form, with two
//! independent oracles: additive-character sums over the connection set and a
//! dense symmetric eigensolver.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cayley::CayleyGraph;
use crate::error::{Error, Result};
use crate::number_theory::{jacobi_symbol, pairwise_sum, root_of_unity, unit_squares, GraphParams};

/// Default vertex cap for [`numerical_spectrum`].
pub const NUMERICAL_CAP: u64 = 3000;

/// `(a_coeff + b_coeff * sqrt(q)) / 2` with a multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ExactEigenvalue {
    pub a_coeff: i64,
    pub b_coeff: i64,
    #[serde(rename = "mult")]
    pub multiplicity: u64,
}

impl ExactEigenvalue {
    pub fn value(&self, q: u64) -> f64 {
        (self.a_coeff as f64 + self.b_coeff as f64 * (q as f64).sqrt()) / 2.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub params: GraphParams,
    /// Distinct eigenvalues in descending order.
    pub eigenvalues: Vec<ExactEigenvalue>,
    /// `max(lambda_2, -lambda_n)`.
    pub lambda: f64,
}

impl SpectrumReport {
    pub fn degree(&self) -> f64 {
        self.eigenvalues[0].value(self.params.q())
    }

    /// Second largest eigenvalue counted with multiplicity.
    pub fn lambda2(&self) -> f64 {
        let q = self.params.q();
        match self.eigenvalues.as_slice() {
            [top, ..] if top.multiplicity > 1 => top.value(q),
            [_, second, ..] => second.value(q),
            [top] => top.value(q),
            [] => f64::NAN,
        }
    }

    pub fn smallest(&self) -> f64 {
        self.eigenvalues.last().map_or(f64::NAN, |v| v.value(self.params.q()))
    }

    /// Every eigenvalue repeated by multiplicity, descending.
    pub fn expanded(&self) -> Vec<f64> {
        let q = self.params.q();
        self.eigenvalues
            .iter()
            .flat_map(|ev| std::iter::repeat_n(ev.value(q), ev.multiplicity as usize))
            .collect()
    }

    /// `sum mult * lambda`, as exact `(a, b)` coordinates over 2.
    pub fn trace_exact(&self) -> (i128, i128) {
        self.eigenvalues.iter().fold((0, 0), |(sa, sb), ev| {
            let m = ev.multiplicity as i128;
            (sa + m * ev.a_coeff as i128, sb + m * ev.b_coeff as i128)
        })
    }

    /// `sum mult * lambda^2 = (R + S sqrt(q)) / 4`, returned as `(R, S)`.
    pub fn second_moment_exact(&self) -> (i128, i128) {
        let q = self.params.q() as i128;
        self.eigenvalues.iter().fold((0, 0), |(r, s), ev| {
            let (m, a, b) = (ev.multiplicity as i128, ev.a_coeff as i128, ev.b_coeff as i128);
            (r + m * (a * a + b * b * q), s + m * 2 * a * b)
        })
    }
}

/// Four-value spectrum `{d, (-q^(e-1) + q^(e-1/2))/2, 0, (-q^(e-1) - q^(e-1/2))/2}`.
///
/// Multiplicities `1, (q-1)/2, q^e - q, (q-1)/2` come from counting the
/// frequencies `a` that land in each case; the zero eigenvalue is absent when `e = 1`.
pub fn closed_form_spectrum(params: &GraphParams) -> SpectrumReport {
    let q = params.q();
    let qe1 = params.q_pow_e_minus_1() as i64;
    let half = (q - 1) / 2;
    let mut eigenvalues = vec![
        ExactEigenvalue {
            a_coeff: 2 * params.degree() as i64,
            b_coeff: 0,
            multiplicity: 1,
        },
        ExactEigenvalue {
            a_coeff: -qe1,
            b_coeff: qe1,
            multiplicity: half,
        },
    ];
    if params.n() > q {
        eigenvalues.push(ExactEigenvalue {
            a_coeff: 0,
            b_coeff: 0,
            multiplicity: params.n() - q,
        });
    }
    eigenvalues.push(ExactEigenvalue {
        a_coeff: -qe1,
        b_coeff: -qe1,
        multiplicity: half,
    });
    let lambda = (qe1 as f64 * (q as f64).sqrt() + qe1 as f64) / 2.0;
    SpectrumReport {
        params: *params,
        eigenvalues,
        lambda,
    }
}

/// Eigenvalue belonging to the additive character `x -> exp(2 pi i a x / n)`.
/// The returned multiplicity is 0 (unset).
pub fn eigenvalue_for_frequency(a: u64, params: &GraphParams) -> ExactEigenvalue {
    let (n, q) = (params.n(), params.q());
    let qe1 = params.q_pow_e_minus_1();
    let a = a % n;
    let (a_coeff, b_coeff) = if a == 0 {
        (2 * params.degree() as i64, 0)
    } else if a % qe1 == 0 {
        let b = a / qe1;
        let sign = jacobi_symbol(b as i64, q).expect("q is odd") as i64;
        (-(qe1 as i64), sign * qe1 as i64)
    } else {
        (0, 0)
    };
    ExactEigenvalue {
        a_coeff,
        b_coeff,
        multiplicity: 0,
    }
}

/// `sum_{s in Q} exp(2 pi i a s / n)` given the connection set.
pub fn character_sum(a: u64, connection_set: &[u64], n: u64) -> Complex64 {
    let terms: Vec<Complex64> = connection_set
        .iter()
        .map(|&s| root_of_unity(((a as u128 * s as u128) % n as u128) as u64, n))
        .collect();
    pairwise_sum(&terms)
}

/// Real part of [`character_sum`] over `Q = unit_squares(params)`.
pub fn character_sum_eigenvalue(a: u64, params: &GraphParams) -> f64 {
    character_sum(a, &unit_squares(params), params.n()).re
}

/// Character sums for every frequency `a in Z/n`, in frequency order.
pub fn character_sum_spectrum(params: &GraphParams) -> Vec<Complex64> {
    let q_set = unit_squares(params);
    let n = params.n();
    (0..n)
        .into_par_iter()
        .map(|a| character_sum(a, &q_set, n))
        .collect()
}

/// Dense symmetric eigendecomposition of the adjacency matrix, descending.
pub fn numerical_spectrum(g: &CayleyGraph, cap: u64) -> Result<Vec<f64>> {
    let n = g.n();
    if n as u64 > cap {
        return Err(Error::CapExceeded {
            what: "dense eigendecomposition",
            n: n as u64,
            cap,
        });
    }
    let adjacency = DMatrix::from_fn(n, n, |i, j| if g.row(i).contains(j) { 1.0 } else { 0.0 });
    let mut values: Vec<f64> = adjacency.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|x, y| y.total_cmp(x));
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(q: u64, e: u32) -> GraphParams {
        GraphParams::new(q, e).unwrap()
    }

    #[test]
    fn closed_form_125() {
        let s = closed_form_spectrum(&params(5, 3));
        let values: Vec<(f64, u64)> = s.eigenvalues.iter().map(|v| (v.value(5), v.multiplicity)).collect();
        let expect = [(50.0, 1), (15.450849718747, 2), (0.0, 120), (-40.450849718747, 2)];
        assert_eq!(values.len(), 4);
        for ((v, m), (ev, em)) in values.iter().zip(expect) {
            assert!((v - ev).abs() < 1e-9, "{v} vs {ev}");
            assert_eq!(*m, em);
        }
        assert_eq!(s.eigenvalues[0], ExactEigenvalue { a_coeff: 100, b_coeff: 0, multiplicity: 1 });
        assert!((s.lambda - 40.450849718747).abs() < 1e-9);
    }

    #[test]
    fn closed_form_paley() {
        let s = closed_form_spectrum(&params(5, 1));
        assert_eq!(s.eigenvalues.iter().map(|v| v.multiplicity).collect::<Vec<_>>(), vec![1, 2, 2]);
        let s = closed_form_spectrum(&params(13, 1));
        assert!((s.lambda - (1.0 + 13f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!((s.lambda - 2.302775637732).abs() < 1e-9);
    }

    #[test]
    fn frequency_classification() {
        let p = params(5, 3);
        assert_eq!(eigenvalue_for_frequency(0, &p).value(5), 50.0);
        assert_eq!(eigenvalue_for_frequency(25, &p), ExactEigenvalue { a_coeff: -25, b_coeff: 25, multiplicity: 0 });
        assert_eq!(eigenvalue_for_frequency(50, &p).b_coeff, -25);
        assert_eq!(eigenvalue_for_frequency(7, &p).value(5), 0.0);
        assert_eq!(eigenvalue_for_frequency(10, &p).value(5), 0.0);
    }

    #[test]
    fn character_sum_examples() {
        let p = params(5, 3);
        assert!((character_sum_eigenvalue(0, &p) - 50.0).abs() < 1e-9);
        assert!((character_sum_eigenvalue(25, &p) - 15.450849718747).abs() < 1e-9);
        assert!(character_sum_eigenvalue(1, &p).abs() < 1e-9);
    }

    #[test]
    fn numerical_small() {
        let c5 = CayleyGraph::new(5, 1).unwrap();
        let v = numerical_spectrum(&c5, NUMERICAL_CAP).unwrap();
        let expect = [2.0, 0.618033988750, 0.618033988750, -1.618033988750, -1.618033988750];
        for (x, y) in v.iter().zip(expect) {
            assert!((x - y).abs() < 1e-9);
        }
        assert!(matches!(numerical_spectrum(&c5, 4), Err(Error::CapExceeded { cap: 4, .. })));
    }
}
