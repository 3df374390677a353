use ecgraph_core::pseudorandom::{
    cheeger_bruteforce, cheeger_spectral_lower, edge_count, jumbledness_alpha, mixing_scan,
};
use ecgraph_core::spectrum::{
    character_sum_spectrum, closed_form_spectrum, eigenvalue_for_frequency, numerical_spectrum, NUMERICAL_CAP,
};
use ecgraph_core::{CayleyGraph, GraphParams};

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

#[test]
fn three_routes_agree_on_small_instances() {
    for (q, e) in [(5, 1), (13, 1), (17, 1), (29, 1), (5, 3)] {
        let g = CayleyGraph::new(q, e).unwrap();
        let closed = closed_form_spectrum(g.params());
        let expanded = closed.expanded();
        let sums = character_sum_spectrum(g.params());
        assert!(sums.iter().all(|z| z.im.abs() < 1e-9));
        let chars = sorted_desc(sums.iter().map(|z| z.re).collect());
        let numeric = numerical_spectrum(&g, NUMERICAL_CAP).unwrap();
        assert_eq!(expanded.len(), g.n());
        for ((x, y), z) in expanded.iter().zip(&chars).zip(&numeric) {
            assert!((x - y).abs() < 1e-8 && (x - z).abs() < 1e-8, "q={q} e={e}: {x} {y} {z}");
        }
        let lambda_num = numeric[1].abs().max(numeric[g.n() - 1].abs());
        assert!((closed.lambda - lambda_num).abs() < 1e-8);
    }
}

#[test]
fn frequency_classification_matches_character_sums() {
    for (q, e) in [(5, 3), (13, 3), (5, 5)] {
        let p = GraphParams::new(q, e).unwrap();
        let sums = character_sum_spectrum(&p);
        for (a, z) in sums.iter().enumerate() {
            let exact = eigenvalue_for_frequency(a as u64, &p).value(q);
            assert!((exact - z.re).abs() < 1e-8, "q={q} e={e} a={a}");
        }
    }
}

#[test]
fn moment_identities_exact() {
    for (q, e) in [(5, 1), (13, 1), (17, 1), (5, 3), (13, 3), (17, 5), (101, 3)] {
        let p = GraphParams::new(q, e).unwrap();
        let s = closed_form_spectrum(&p);
        assert_eq!(s.eigenvalues.iter().map(|v| v.multiplicity).sum::<u64>(), p.n());
        assert_eq!(s.trace_exact(), (0, 0));
        // sum mult * lambda^2 = (R + S sqrt q) / 4 = n d
        let (r, s2) = s.second_moment_exact();
        assert_eq!(s2, 0);
        assert_eq!(r, 4 * p.n() as i128 * p.degree() as i128);
    }
}

#[test]
fn mixing_bound_holds_on_samples() {
    for (q, e) in [(5, 1), (13, 1), (5, 3), (29, 1)] {
        let g = CayleyGraph::new(q, e).unwrap();
        let spec = closed_form_spectrum(g.params());
        let scan = mixing_scan(&g, &spec, 2000, 11).unwrap();
        assert!(scan.ok, "q={q} e={e} max={}", scan.max_normalized);
        assert_eq!(scan.samples.len(), 2000);
        for s in &scan.samples {
            assert_eq!(s.e_uw, edge_count(&g, &s.w, &s.u).unwrap());
        }
        let alpha = jumbledness_alpha(&g, g.degree() as f64 / g.n() as f64, 500, 3).unwrap();
        assert!(alpha <= spec.lambda + 1e-9);
    }
}

#[test]
fn cheeger_lower_bound_holds() {
    for q in [5, 13, 17] {
        let g = CayleyGraph::new(q, 1).unwrap();
        let h = cheeger_bruteforce(&g).unwrap();
        let lower = cheeger_spectral_lower(&closed_form_spectrum(g.params()));
        assert!(h >= lower - 1e-12, "q={q}: {h} < {lower}");
        assert!(h <= g.degree() as f64);
    }
}
