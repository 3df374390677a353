//! Modular arithmetic over `Z/q^e`: primality, Legendre/Jacobi symbols, the
//! quadratic character of conductor `q`, unit squares and quadratic Gauss sums.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Validated `(q, e)` with `q` a prime congruent to 1 mod 4 and `e` odd.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GraphParams {
    q: u64,
    e: u32,
    n: u64,
    degree: u64,
}

impl GraphParams {
    pub fn new(q: u64, e: u32) -> Result<Self> {
        let invalid = |reason: &str| Error::InvalidParams {
            q,
            e,
            reason: reason.to_string(),
        };
        if q < 2 || !is_prime(q) {
            return Err(invalid("q must be prime"));
        }
        if q % 4 != 1 {
            return Err(invalid("q must satisfy q = 1 (mod 4)"));
        }
        if e == 0 {
            return Err(invalid("e must be at least 1"));
        }
        if e % 2 == 0 {
            return Err(invalid("e must be odd"));
        }
        let n = q
            .checked_pow(e)
            .filter(|&n| n <= i64::MAX as u64)
            .ok_or_else(|| invalid("q^e does not fit in 63 bits"))?;
        let degree = (n - n / q) / 2;
        Ok(GraphParams { q, e, n, degree })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    /// Number of vertices, `q^e`.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// `(q^e - q^(e-1)) / 2`.
    pub fn degree(&self) -> u64 {
        self.degree
    }

    /// `q^(e-1)`.
    pub fn q_pow_e_minus_1(&self) -> u64 {
        self.n / self.q
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod m`.
pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

// First twelve primes: a complete witness set for every n < 2^64.
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin, exact for all `u64`.
pub fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    for &p in &MR_WITNESSES {
        if m % p == 0 {
            return m == p;
        }
    }
    let s = (m - 1).trailing_zeros();
    let d = (m - 1) >> s;
    'witness: for &a in &MR_WITNESSES {
        let mut x = pow_mod(a, d, m);
        if x == 1 || x == m - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, m);
            if x == m - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn is_pythagorean_prime(m: u64) -> bool {
    m % 4 == 1 && is_prime(m)
}

/// Smallest prime `p > m` with `p = 1 (mod 4)`.
pub fn next_pythagorean_prime(m: u64) -> u64 {
    let mut p = m + 1;
    while !is_pythagorean_prime(p) {
        p += 1;
    }
    p
}

fn reduce(a: i64, m: u64) -> u64 {
    (a as i128).rem_euclid(m as i128) as u64
}

/// Legendre symbol `(a/q)` by Euler's criterion.
pub fn legendre_symbol(a: i64, q: u64) -> Result<i8> {
    if q == 2 || !is_prime(q) {
        return Err(Error::NotOddPrime(q));
    }
    Ok(legendre_unchecked(reduce(a, q), q))
}

fn legendre_unchecked(a: u64, q: u64) -> i8 {
    match pow_mod(a, (q - 1) / 2, q) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

/// Jacobi symbol `(a/m)` for odd `m >= 1`, via reciprocity.
pub fn jacobi_symbol(a: i64, m: u64) -> Result<i8> {
    if m == 0 || m % 2 == 0 {
        return Err(Error::EvenModulus(m));
    }
    let mut a = reduce(a, m);
    let mut m = m;
    let mut sign = 1i8;
    while a != 0 {
        let twos = a.trailing_zeros();
        a >>= twos;
        if twos % 2 == 1 && (m % 8 == 3 || m % 8 == 5) {
            sign = -sign;
        }
        if a % 4 == 3 && m % 4 == 3 {
            sign = -sign;
        }
        (a, m) = (m % a, a);
    }
    Ok(if m == 1 { sign } else { 0 })
}

/// The quadratic character `chi(x) = (x / q)^e` on `Z/q^e`, tabulated.
#[derive(Clone, Debug)]
pub struct QuadraticCharacter {
    params: GraphParams,
    table: Vec<i8>,
}

impl QuadraticCharacter {
    pub fn new(params: GraphParams) -> Self {
        let q = params.q();
        let base: Vec<i8> = (0..q).map(|r| legendre_unchecked(r, q)).collect();
        let table = (0..params.n()).map(|x| base[(x % q) as usize]).collect();
        QuadraticCharacter { params, table }
    }

    pub fn params(&self) -> &GraphParams {
        &self.params
    }

    /// Value at a residue already reduced mod `n`.
    #[inline]
    pub fn at(&self, x: u64) -> i8 {
        self.table[x as usize]
    }

    /// Value at an arbitrary integer.
    pub fn eval(&self, x: i64) -> i8 {
        self.at(reduce(x, self.params.n()))
    }

    /// `chi(x - y)` for residues `x, y`.
    #[inline]
    pub fn at_diff(&self, x: u64, y: u64) -> i8 {
        let n = self.params.n();
        self.at(if x >= y { x - y } else { x + n - y })
    }

    pub fn table(&self) -> &[i8] {
        &self.table
    }
}

/// `chi_{q^e}(x)` without building a table.
pub fn quadratic_character(x: i64, params: &GraphParams) -> i8 {
    // e is odd, so (x/q)^e = (x/q).
    legendre_unchecked(reduce(x, params.q()), params.q())
}

/// `Q = { u^2 mod n : gcd(u, q) = 1 }`, sorted ascending.
pub fn unit_squares(params: &GraphParams) -> Vec<u64> {
    let n = params.n();
    let q = params.q();
    let mut mark = vec![false; n as usize];
    for u in (1..n).filter(|u| u % q != 0) {
        mark[mul_mod(u, u, n) as usize] = true;
    }
    mark.iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .map(|(x, _)| x as u64)
        .collect()
}

/// Pairwise (cascade) summation; error grows as O(log n) rather than O(n).
pub fn pairwise_sum(terms: &[Complex64]) -> Complex64 {
    const LEAF: usize = 32;
    if terms.len() <= LEAF {
        return terms.iter().sum();
    }
    let (lo, hi) = terms.split_at(terms.len() / 2);
    pairwise_sum(lo) + pairwise_sum(hi)
}

/// `exp(2 pi i r / m)` for an exact residue `r`.
pub fn root_of_unity(r: u64, m: u64) -> Complex64 {
    let theta = std::f64::consts::TAU * (r as f64 / m as f64);
    Complex64::from_polar(1.0, theta)
}

/// Direct summation `sum_{x in Z/q^k} exp(2 pi i b x^2 / q^k)`.
pub fn gauss_sum(b: i64, q: u64, k: u32) -> Result<Complex64> {
    if reduce(b, q) == 0 {
        return Err(Error::NotCoprime { b, q });
    }
    let m = q.pow(k);
    let b = reduce(b, m);
    let terms: Vec<Complex64> = (0..m)
        .map(|x| root_of_unity(mul_mod(b, mul_mod(x, x, m), m), m))
        .collect();
    Ok(pairwise_sum(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(q: u64, e: u32) -> GraphParams {
        GraphParams::new(q, e).unwrap()
    }

    #[test]
    fn pythagorean_primes() {
        assert!(is_pythagorean_prime(5));
        assert!(!is_pythagorean_prime(7));
        assert!(is_pythagorean_prime(13));
        assert!(!is_pythagorean_prime(25));
        assert!(!is_pythagorean_prime(1));
        // 2^61 - 1 is prime but 3 mod 4
        assert!(is_prime((1u64 << 61) - 1));
        assert!(!is_pythagorean_prime((1u64 << 61) - 1));
        // strong pseudoprime to bases 2..=11
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn miller_rabin_matches_trial_division() {
        let trial = |m: u64| m >= 2 && (2..).take_while(|d| d * d <= m).all(|d| m % d != 0);
        for m in 0..5000 {
            assert_eq!(is_prime(m), trial(m), "m = {m}");
        }
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_symbol(4, 5).unwrap(), 1);
        assert_eq!(legendre_symbol(0, 5).unwrap(), 0);
        assert_eq!(legendre_symbol(2, 5).unwrap(), -1);
        assert_eq!(legendre_symbol(-1, 13).unwrap(), 1);
        assert!(matches!(legendre_symbol(3, 9), Err(Error::NotOddPrime(9))));
        assert!(matches!(legendre_symbol(3, 2), Err(Error::NotOddPrime(2))));
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi_symbol(2, 25).unwrap(), 1);
        assert_eq!(jacobi_symbol(2, 125).unwrap(), -1);
        assert_eq!(jacobi_symbol(7, 1).unwrap(), 1);
        assert_eq!(jacobi_symbol(5, 25).unwrap(), 0);
        for b in (1..200).filter(|b| b % 13 != 0) {
            assert_eq!(jacobi_symbol(b, 169).unwrap(), 1);
        }
        assert!(matches!(jacobi_symbol(3, 10), Err(Error::EvenModulus(10))));
    }

    #[test]
    fn jacobi_is_product_of_legendre() {
        let primes = [3u64, 5, 7, 11, 13];
        for &p1 in &primes {
            for &p2 in &primes {
                for a in -30i64..30 {
                    let expect = legendre_symbol(a, p1).unwrap() * legendre_symbol(a, p2).unwrap();
                    assert_eq!(jacobi_symbol(a, p1 * p2).unwrap(), expect);
                }
            }
        }
    }

    #[test]
    fn params_validation() {
        assert!(GraphParams::new(7, 1).is_err());
        assert!(GraphParams::new(9, 1).is_err());
        assert!(GraphParams::new(5, 2).is_err());
        assert!(GraphParams::new(5, 0).is_err());
        assert!(GraphParams::new(5, 29).is_err());
        let g = p(5, 3);
        assert_eq!((g.n(), g.degree(), g.q_pow_e_minus_1()), (125, 50, 25));
    }

    #[test]
    fn character_examples() {
        let g = p(5, 3);
        assert_eq!(quadratic_character(6, &g), 1);
        assert_eq!(quadratic_character(10, &g), 0);
        assert_eq!(quadratic_character(7, &g), -1);
        assert_eq!(quadratic_character(-1, &g), 1);
        let chi = QuadraticCharacter::new(g);
        for x in -300i64..300 {
            assert_eq!(chi.eval(x), quadratic_character(x, &g));
        }
    }

    #[test]
    fn unit_squares_examples() {
        assert_eq!(unit_squares(&p(5, 1)), vec![1, 4]);
        assert_eq!(unit_squares(&p(5, 3)).len(), 50);
        assert_eq!(unit_squares(&p(13, 1)), vec![1, 3, 4, 9, 10, 12]);
    }

    #[test]
    fn gauss_sum_examples() {
        let s5 = 5f64.sqrt();
        let g = gauss_sum(1, 5, 1).unwrap();
        assert!((g.re - s5).abs() < 1e-12 && g.im.abs() < 1e-12);
        let g = gauss_sum(2, 5, 1).unwrap();
        assert!((g.re + s5).abs() < 1e-12 && g.im.abs() < 1e-12);
        let g = gauss_sum(1, 5, 2).unwrap();
        assert!((g.re - 5.0).abs() < 1e-12 && g.im.abs() < 1e-12);
        assert!(matches!(gauss_sum(10, 5, 2), Err(Error::NotCoprime { .. })));
    }
}
