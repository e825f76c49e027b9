use graphlog::sampling::{random_function, random_instance, Instance};
use graphlog::spaces::{h_norm_sq, l2_sq, linf_embedding_check, lp_norm};
use graphlog::variational::{derivative, energy, functional, nehari_project, nehari_scale, residual};
use graphlog::{VertexFunction, WeightedGraph};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64) -> (Instance, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (random_instance(&mut rng).unwrap(), rng)
}

fn interior_nonzero(g: &WeightedGraph, u: &VertexFunction) -> bool {
    g.interior_vertices().any(|x| u.get(x) != 0.0)
}

/// Root of `t -> J'(t u) . u` by bisection in `log t`, using only `derivative`.
fn bisect_t(i: &Instance, u: &VertexFunction) -> f64 {
    let slope = |t: f64| derivative(&i.graph, &i.potential, &u.scaled(t), u).unwrap();
    let (mut lo, mut hi) = (0.0_f64, 0.0_f64);
    while slope(lo.exp()) <= 0.0 {
        lo -= 1.0;
    }
    while slope(hi.exp()) >= 0.0 {
        hi += 1.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if slope(mid.exp()) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn summation_by_parts(seed in any::<u64>(), scale in 0.01f64..10.0) {
        let (i, mut rng) = instance(seed);
        let g = &i.graph;
        let u = random_function(&mut rng, g, scale, false);
        let v = random_function(&mut rng, g, 1.0, false);
        let lap = g.laplacian(&u).unwrap();
        let lhs = -g.integrate(&VertexFunction::from_fn(g, |x| lap.get(x) * v.get(x))).unwrap();
        let rhs = g.integrate(&g.gradient_form(&u, &v).unwrap()).unwrap();
        let edge: f64 = g.edges().iter().map(|e| e.w * (u.get(e.y) - u.get(e.x)) * (v.get(e.y) - v.get(e.x))).sum();
        let size: f64 = g.edges().iter().map(|e| e.w * ((u.get(e.y) - u.get(e.x)) * (v.get(e.y) - v.get(e.x))).abs()).sum();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (size + 1e-300));
        prop_assert!((edge - rhs).abs() <= 1e-12 * (size + 1e-300));
        let d = g.dirichlet_energy(&u).unwrap();
        let self_form = g.integrate(&g.gradient_form(&u, &u).unwrap()).unwrap();
        prop_assert!((d - self_form).abs() <= 1e-12 * d.max(1e-300));
    }

    #[test]
    fn derivative_is_linear_in_direction(seed in any::<u64>(), s in -3.0f64..3.0) {
        let (i, mut rng) = instance(seed);
        let g = &i.graph;
        let u = random_function(&mut rng, g, 2.0, false);
        let v = random_function(&mut rng, g, 1.0, false);
        let w = random_function(&mut rng, g, 1.0, false);
        let d = |z: &VertexFunction| derivative(g, &i.potential, &u, z).unwrap();
        let combo = v.scaled(s).add_scaled(1.0, &w);
        let lhs = d(&combo);
        let rhs = s * d(&v) + d(&w);
        let size = s.abs() * d(&v).abs() + d(&w).abs() + h_norm_sq(g, &i.potential, &u).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-11 * size);
    }

    #[test]
    fn derivative_against_vertex_indicator_is_residual(seed in any::<u64>()) {
        let (i, mut rng) = instance(seed);
        let g = &i.graph;
        let u = random_function(&mut rng, g, 1.5, true);
        let r = residual(g, &i.potential, &u).unwrap();
        for x in g.interior_vertices() {
            let d = derivative(g, &i.potential, &u, &VertexFunction::indicator(g, x)).unwrap();
            let expected = g.mu(x) * r.get(x);
            let size = g.mu(x) * (u.linf() * (1.0 + u.linf().ln().abs() + i.potential.get(x).abs()))
                + g.weighted_degree(x) * u.linf();
            prop_assert!((d - expected).abs() <= 1e-12 * size);
        }
    }

    #[test]
    fn nehari_scale_is_homogeneous(seed in any::<u64>(), s in 0.01f64..100.0) {
        let (i, mut rng) = instance(seed);
        let g = &i.graph;
        let u = random_function(&mut rng, g, 1.0, false);
        prop_assume!(interior_nonzero(g, &u));
        let t = nehari_scale(g, &i.potential, &u).unwrap();
        let ts = nehari_scale(g, &i.potential, &u.scaled(s)).unwrap();
        prop_assert!((ts * s - t).abs() <= 1e-10 * t);
    }

    #[test]
    fn interpolation_inequality(seed in any::<u64>(), p in 2.0f64..12.0) {
        let (i, mut rng) = instance(seed);
        let g = &i.graph;
        let u = random_function(&mut rng, g, 5.0, false);
        let lhs = lp_norm(g, &u, p).unwrap().powf(p);
        let rhs = u.linf().powf(p - 2.0) * l2_sq(g, &u).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn embedding_inequality(seed in any::<u64>(), scale in 1e-3f64..1e3) {
        let (i, mut rng) = instance(seed);
        let g = &i.graph;
        let u = random_function(&mut rng, g, scale, false);
        prop_assume!(interior_nonzero(g, &u));
        prop_assert!(linf_embedding_check(g, &i.potential, &u).unwrap());
    }

    #[test]
    fn energy_identity(seed in any::<u64>(), scale in 1e-3f64..10.0) {
        let (i, mut rng) = instance(seed);
        let g = &i.graph;
        let u = random_function(&mut rng, g, scale, false);
        let e = energy(g, &i.potential, &u).unwrap();
        let size = e.h_norm_sq + e.l2_sq + e.log_energy.abs();
        prop_assert!(e.identity_gap() <= 1e-10 * size.max(1e-300));
        let d = derivative(g, &i.potential, &u, &u).unwrap();
        prop_assert!((d - e.nehari_defect).abs() <= 1e-12 * size.max(1e-300));
        prop_assert!((e.nehari_defect - (e.h_norm_sq - e.l2_sq - e.log_energy)).abs() <= 1e-12 * size.max(1e-300));
    }

    #[test]
    fn central_differences_match_derivative(seed in any::<u64>()) {
        let (i, mut rng) = instance(seed);
        let g = &i.graph;
        let mut u = random_function(&mut rng, g, 1.5, true);
        for x in g.interior_vertices() {
            u.values_mut()[x] += 0.5;
        }
        let v = random_function(&mut rng, g, 1.0, false);
        let h = 1e-5;
        let j = |z: &VertexFunction| functional(g, &i.potential, z).unwrap();
        let fd = (j(&u.add_scaled(h, &v)) - j(&u.add_scaled(-h, &v))) / (2.0 * h);
        let d = derivative(g, &i.potential, &u, &v).unwrap();
        prop_assert!((fd - d).abs() <= 1e-6 * d.abs().max(1e-3 * h_norm_sq(g, &i.potential, &u).unwrap()));
    }

    #[test]
    fn closed_form_scale_matches_bisection(seed in any::<u64>(), scale in 1e-2f64..1e2) {
        let (i, mut rng) = instance(seed);
        let g = &i.graph;
        let u = random_function(&mut rng, g, scale, true);
        let f = nehari_project(g, &i.potential, &u).unwrap();
        let t = bisect_t(&i, &u);
        prop_assert!((f.t_u - t).abs() <= 1e-10 * f.t_u, "{} vs {}", f.t_u, t);
        prop_assert!(f.slopes_decreasing());
        prop_assert!(f.is_fiber_max(1e-12));
        let on = energy(g, &i.potential, &u.scaled(f.t_u)).unwrap();
        prop_assert!(on.on_nehari());
        prop_assert!((on.j - 0.5 * on.l2_sq).abs() <= 1e-10 * on.j);
    }
}
