use num_rational::Ratio;
use qinterp_core::interpolation::{
    analytic_distribution, build_image, circuit_decoded_state, circuit_distribution, run_protocol_analytic,
    run_protocol_circuit, total_variation, trials, Mode, ProtocolParams,
};
use qinterp_core::polynomial::{z_map, MonomialBasis, Polynomial};
use qinterp_core::Field;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn params(q: u32, n: usize, d: u32) -> ProtocolParams {
    ProtocolParams::new(Field::prime(q).unwrap(), n, d).unwrap()
}

/// Image size of the Z map by direct enumeration of every (x, y) tuple
/// into a set, sharing nothing with the transversal builder.
fn image_size_oracle(q: u32, n: usize, d: u32, k: usize) -> usize {
    let f = Field::prime(q).unwrap();
    let basis = MonomialBasis::new(n, d, true).unwrap();
    let cells = k * (n + 1);
    let mut image = std::collections::BTreeSet::new();
    for mut idx in 0..(q as usize).pow(cells as u32) {
        let mut digits = Vec::with_capacity(cells);
        for _ in 0..cells {
            digits.push((idx % q as usize) as u32);
            idx /= q as usize;
        }
        let points: Vec<Vec<u32>> = digits[..n * k].chunks(n).map(|c| c.to_vec()).collect();
        image.insert(z_map(&f, &basis, &points, &digits[n * k..]).unwrap());
    }
    image.len()
}

#[test]
fn linear_image_closed_form() {
    for q in [2u32, 3, 5, 7, 11, 13] {
        let p = params(q, 1, 1);
        let t = build_image(&p).unwrap();
        let expect = (q * q - q + 1) as usize;
        assert_eq!(t.image_size(), expect, "q={q}");
        assert_eq!(image_size_oracle(q, 1, 1, 1), expect);
        let prob = t.success_probability().exact();
        assert_eq!(prob, Ratio::new(1, 1) - Ratio::new((q - 1) as u128, (q * q) as u128));
    }
    assert_eq!(build_image(&params(13, 1, 1)).unwrap().success_probability().exact(), Ratio::new(157, 169));
}

#[test]
fn builder_matches_set_oracle() {
    for (q, n, d) in [(3, 1, 2), (5, 1, 2), (3, 2, 1), (3, 2, 2), (5, 2, 1)] {
        let p = params(q, n, d);
        assert_eq!(build_image(&p).unwrap().image_size(), image_size_oracle(q, n, d, p.k()), "q={q} n={n} d={d}");
    }
}

#[test]
fn decoded_peak_mass_equals_image_ratio() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for (q, n, d) in [(3, 1, 1), (3, 1, 2), (5, 1, 2), (3, 2, 1)] {
        let p = params(q, n, d);
        let t = build_image(&p).unwrap();
        let expect = t.success_probability().as_f64();
        for _ in 0..20 {
            let f = Polynomial::random_with(p.field().clone(), p.basis().clone(), &mut rng);
            let dist = analytic_distribution(&f, &p, &t).unwrap();
            let idx = f.coeffs().iter().rev().fold(0usize, |acc, &c| acc * q as usize + c as usize);
            assert!((dist[idx] - expect).abs() < 1e-12, "q={q} n={n} d={d}");
            let best = dist.iter().cloned().fold(0.0, f64::max);
            assert!((best - dist[idx]).abs() < 1e-12);
        }
    }
}

#[test]
fn zero_polynomial_peaks_at_origin_in_circuit_mode() {
    let p = params(3, 1, 2);
    let t = build_image(&p).unwrap();
    let f = Polynomial::zero(p.field().clone(), p.basis().clone());
    let dist = circuit_distribution(&f, &p, &t).unwrap();
    assert!((dist[0] - t.success_probability().as_f64()).abs() < 1e-12);
}

#[test]
fn circuit_mode_uses_k_oracle_calls() {
    for (q, n, d) in [(3, 1, 1), (3, 1, 2), (5, 1, 3), (3, 2, 2)] {
        let p = params(q, n, d);
        let t = build_image(&p).unwrap();
        let f = Polynomial::random(p.field().clone(), p.basis().clone(), 1);
        let (_, calls) = circuit_decoded_state(&f, &p, &t).unwrap();
        assert_eq!(calls, p.k());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(run_protocol_circuit(&f, &p, &t, &mut rng).unwrap().queries, p.k());
        assert_eq!(run_protocol_analytic(&f, &p, &t, &mut rng).unwrap().queries, p.k());
    }
}

#[test]
fn modes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for (q, n, d) in [(3, 1, 1), (3, 1, 2), (5, 1, 2), (3, 2, 1), (3, 2, 2)] {
        let p = params(q, n, d);
        let t = build_image(&p).unwrap();
        for _ in 0..5 {
            let f = Polynomial::random_with(p.field().clone(), p.basis().clone(), &mut rng);
            let tv = total_variation(&analytic_distribution(&f, &p, &t).unwrap(), &circuit_distribution(&f, &p, &t).unwrap());
            assert!(tv <= 1e-8, "q={q} n={n} d={d} tv={tv}");
        }
    }
}

#[test]
fn extension_field_protocol() {
    // F_4 with trace characters
    let f4 = Field::new(2, 2, None).unwrap();
    let p = ProtocolParams::new(f4, 1, 2).unwrap();
    let t = build_image(&p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..5 {
        let f = Polynomial::random_with(p.field().clone(), p.basis().clone(), &mut rng);
        let a = analytic_distribution(&f, &p, &t).unwrap();
        let c = circuit_distribution(&f, &p, &t).unwrap();
        assert!(total_variation(&a, &c) <= 1e-8);
        let idx = f.coeffs().iter().rev().fold(0usize, |acc, &c| acc * 4 + c as usize);
        assert!((a[idx] - t.success_probability().as_f64()).abs() < 1e-12);
    }
}

#[test]
fn empirical_rates_within_three_sigma() {
    for (q, n, d, mode) in [(3, 1, 1, Mode::Analytic), (3, 1, 2, Mode::Analytic), (5, 1, 1, Mode::Circuit)] {
        let p = params(q, n, d);
        let t = build_image(&p).unwrap();
        let runs = 4000;
        let s = trials(&p, &t, runs, 2024, mode).unwrap();
        let exact = t.success_probability().as_f64();
        let sigma = (exact * (1.0 - exact) / runs as f64).sqrt();
        let rate = s.empirical_rate().unwrap();
        assert!((rate - exact).abs() <= 3.0 * sigma, "q={q} n={n} d={d} rate={rate} exact={exact}");
    }
}

#[test]
fn trials_are_deterministic() {
    let p = params(3, 1, 2);
    let t = build_image(&p).unwrap();
    let a = trials(&p, &t, 500, 7, Mode::Analytic).unwrap();
    let b = trials(&p, &t, 500, 7, Mode::Analytic).unwrap();
    assert_eq!(a, b);
    let c = trials(&p, &t, 500, 8, Mode::Analytic).unwrap();
    assert_eq!(c.trials, 500);
}

#[test]
fn quadratic_trend_table() {
    let mut rows = Vec::new();
    for q in [3u32, 5, 7] {
        let t = build_image(&params(q, 1, 2)).unwrap();
        let prob = t.success_probability().exact();
        let scaled = (Ratio::new(1u128, 1) - prob) * Ratio::from_integer(q as u128);
        println!("q={q} |R|={} q^D={} q(1-P)={}", t.image_size(), t.q_pow_dim(), scaled);
        rows.push(scaled);
    }
    assert!(rows.iter().all(|r| *r <= rows[0]));
}
