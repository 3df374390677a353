use ecgraph_core::number_theory::{
    gauss_sum, is_pythagorean_prime, jacobi_symbol, legendre_symbol, quadratic_character, unit_squares,
    GraphParams, QuadraticCharacter,
};
use proptest::prelude::*;

const INSTANCES: [(u64, u32); 7] = [(5, 1), (13, 1), (5, 3), (13, 3), (17, 3), (5, 5), (29, 3)];

fn squares_mod(q: u64) -> Vec<bool> {
    let mut sq = vec![false; q as usize];
    for x in 1..q {
        sq[(x * x % q) as usize] = true;
    }
    sq
}

#[test]
fn character_table_invariants() {
    for (q, e) in INSTANCES {
        let p = GraphParams::new(q, e).unwrap();
        let chi = QuadraticCharacter::new(p);
        let n = p.n();
        let sq = squares_mod(q);
        let mut plus = 0;
        let mut minus = 0;
        for x in 0..n {
            let v = chi.at(x);
            let expect = if x % q == 0 { 0 } else if sq[(x % q) as usize] { 1 } else { -1 };
            assert_eq!(v, expect, "q={q} e={e} x={x}");
            assert_eq!(v, chi.at(x % q));
            plus += (v == 1) as u64;
            minus += (v == -1) as u64;
        }
        assert_eq!(plus, p.degree());
        assert_eq!(minus, p.degree());
        assert_eq!(chi.table().iter().map(|&v| v as i64).sum::<i64>(), 0);
    }
}

#[test]
fn unit_squares_agree_with_character() {
    for (q, e) in INSTANCES {
        let p = GraphParams::new(q, e).unwrap();
        let squares = unit_squares(&p);
        assert_eq!(squares.len() as u64, p.degree());
        let n = p.n();
        let mut member = vec![false; n as usize];
        for &s in &squares {
            member[s as usize] = true;
        }
        for x in 0..n {
            let hensel = x % q != 0 && legendre_symbol(x as i64, q).unwrap() == 1;
            assert_eq!(member[x as usize], hensel, "q={q} e={e} x={x}");
        }
        // closed under negation and multiplication
        assert!(member[(n - 1) as usize]);
        for &s in squares.iter().take(40) {
            assert!(member[(n - s) as usize]);
            for &r in squares.iter().take(40) {
                assert!(member[((s as u128 * r as u128) % n as u128) as usize]);
            }
        }
    }
}

#[test]
fn jacobi_simplifications_used_by_the_spectrum() {
    for q in [5u64, 13, 17, 29] {
        for b in (1i64..300).filter(|b| b % q as i64 != 0) {
            assert_eq!(jacobi_symbol(b, q * q).unwrap(), 1);
            for k in 1..4 {
                let lo = jacobi_symbol(b, q.pow(k)).unwrap();
                let hi = jacobi_symbol(b, q.pow(k + 2)).unwrap();
                assert_eq!(lo, hi);
                assert_eq!(lo, legendre_symbol(b, q).unwrap().pow(k));
            }
        }
    }
}

#[test]
fn gauss_sums_match_closed_form() {
    for q in [5u64, 13] {
        for k in 1..=3u32 {
            let m = q.pow(k);
            for b in (1i64..).filter(|b| b % q as i64 != 0).take(10) {
                let s = gauss_sum(b, q, k).unwrap();
                let expect = jacobi_symbol(b, m).unwrap() as f64 * (m as f64).sqrt();
                assert!((s.re - expect).abs() < 1e-9, "b={b} q={q} k={k}: {s}");
                assert!(s.im.abs() < 1e-9);
            }
        }
    }
}

proptest! {
    #[test]
    fn character_is_multiplicative(x in 1u64..2197, y in 1u64..2197) {
        let p = GraphParams::new(13, 3).unwrap();
        prop_assume!(x % 13 != 0 && y % 13 != 0);
        let xy = (x * y % 2197) as i64;
        prop_assert_eq!(
            quadratic_character(xy, &p),
            quadratic_character(x as i64, &p) * quadratic_character(y as i64, &p)
        );
    }

    #[test]
    fn legendre_matches_euler_by_enumeration(a in -10_000i64..10_000, idx in 0usize..6) {
        let q = [5u64, 13, 17, 29, 37, 41][idx];
        let r = a.rem_euclid(q as i64) as u64;
        let expect = if r == 0 { 0 } else if squares_mod(q)[r as usize] { 1 } else { -1 };
        prop_assert_eq!(legendre_symbol(a, q).unwrap(), expect);
    }

    #[test]
    fn pythagorean_primes_by_trial_division(m in 2u64..200_000) {
        let prime = (2..).take_while(|d| d * d <= m).all(|d| m % d != 0);
        prop_assert_eq!(is_pythagorean_prime(m), prime && m % 4 == 1);
    }
}
