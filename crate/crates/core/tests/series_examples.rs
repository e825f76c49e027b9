use std::time::Instant;

use graphlog::spaces::{h_norm_sq, linf_embedding_check, log_energy};
use graphlog::verify::{
    c_epsilon_estimate, example1_build, example1_verify, example2_default_shells, example2_verify,
    Verdict, DEFAULT_SCHEDULE,
};
use graphlog::Potential;

fn direct_sum(from: u64, to: u64, f: impl Fn(f64) -> f64) -> f64 {
    // Smallest terms first.
    (from..=to).rev().map(|x| f(x as f64)).sum()
}

#[test]
fn example1_verdicts_and_bounds() {
    let start = Instant::now();
    let r = example1_verify(&DEFAULT_SCHEDULE).unwrap();
    assert!(start.elapsed().as_secs_f64() < 10.0);
    println!("{r}");
    assert!(r.confirms_counterexample(), "{:?}", r.verdicts());
    for s in [&r.l2, &r.grad, &r.logneg] {
        // Gradient terms fall below one ulp of the sum long before 10^6.
        assert!(s.is_monotone());
    }

    let &(n, s_l2) = r.l2.partial_sums.last().unwrap();
    assert_eq!(n, 1_000_000);
    let oracle = direct_sum(3, n, |x| 1.0 / (x * x.ln().powi(2)));
    assert!((s_l2 - oracle).abs() <= 1e-12 * oracle);
    let tail = r.l2.tail_bounds.last().unwrap().1;
    assert!((tail - 1.0 / 1e6f64.ln()).abs() < 1e-15);
    assert!((tail - 0.0724).abs() < 1e-4);
    // The bound dominates the actual remainder, estimated from further terms.
    let more = direct_sum(n + 1, 20 * n, |x| 1.0 / (x * x.ln().powi(2)));
    assert!(more <= tail);

    let grad_tail = r.grad.tail_bounds.last().unwrap().1;
    let expected = 2.0 / (1e6 * 1e6f64.ln().powi(2));
    assert!((grad_tail - expected).abs() <= 1e-12 * expected);

    // Minorant series Σ 2/(x log x) exceeds 5 at an exactly reported N.
    let c5 = &r.logneg.crossings[0];
    assert_eq!(c5.bound, 5.0);
    let n5 = c5.n_minorant_series.expect("minorant series crosses 5");
    let at = direct_sum(3, n5, |x| 2.0 / (x * x.ln()));
    let before = direct_sum(3, n5 - 1, |x| 2.0 / (x * x.ln()));
    assert!(at > 5.0 && before <= 5.0, "{before} {at}");
    assert!(c5.n_series.unwrap() <= n5);
    // Unreached bounds still carry a finite certified crossing.
    for c in &r.logneg.crossings[1..] {
        assert!(c.n_minorant_series.is_none());
        assert!(c.log_n_certified.is_finite() && c.log_n_certified > 1e6f64.ln());
    }
}

#[test]
fn example1_energy_finite_but_log_energy_unbounded() {
    let r = example1_verify(&[50, 100_000]).unwrap();
    let cap = r.l2.partial_sums[1].1
        + r.l2.tail_bounds[1].1
        + r.grad.partial_sums[1].1
        + r.grad.tail_bounds[1].1;
    let mut last_neg = 0.0;
    for n in [100usize, 1_000, 10_000, 100_000] {
        let (g, u) = example1_build(n).unwrap();
        let a = Potential::constant(&g, 0.0).unwrap();
        let h = h_norm_sq(&g, &a, &u).unwrap();
        assert!(h.is_finite() && h <= cap, "{h} {cap}");
        assert!(linf_embedding_check(&g, &a, &u).unwrap());
        let (_, neg) = log_energy(&g, &u).unwrap();
        assert!(neg > last_neg);
        last_neg = neg;
    }
    assert!(last_neg > 5.0);
}

#[test]
fn example2_verdicts() {
    let start = Instant::now();
    let shells = example2_default_shells(&DEFAULT_SCHEDULE);
    let r = example2_verify(&shells, &DEFAULT_SCHEDULE).unwrap();
    assert!(start.elapsed().as_secs_f64() < 10.0);
    println!("{r}");
    assert_eq!(
        r.verdicts(),
        [
            Verdict::ConvergentWithTailBound,
            Verdict::ConvergentWithTailBound,
            Verdict::DivergentBeyondAllBounds
        ]
    );
    let &(n, s) = r.logneg.partial_sums.last().unwrap();
    let oracle = direct_sum(3, n, |x| 1.0 / (x * x.ln()) + 2.0 * x.ln().ln() / (x * x.ln().powi(2)));
    assert!((s - oracle).abs() <= 1e-12 * oracle);
    assert!(r.logneg.crossings[0].n_series.is_some());
}

#[test]
fn c_epsilon_validates_on_fresh_samples() {
    let c01 = c_epsilon_estimate(0.1, 1).unwrap();
    let c05 = c_epsilon_estimate(0.5, 2).unwrap();
    assert_eq!(c05.violations, 0);
    assert_eq!(c01.violations, 0);
    assert_eq!(c05.samples, 100_000);
    assert!(c01.value >= c05.value);
    // The maximizer is interior.
    assert!(c05.argmax > 1e-6 && c05.argmax < 1e6);
    println!("C_0.1 = {}, C_0.5 = {}", c01.value, c05.value);
}
