use std::f64::consts::PI;

use poisson_grad::action::{action, action_gradient, continuity_bound};
use poisson_grad::expr::ExprPotential;
use poisson_grad::grid::{l2_inner, l2_norm};
use poisson_grad::potential::{CosineLattice, GrowthEnvelope, Potential, ShiftedQuadratic};
use poisson_grad::{Field, GridSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_field(g: &GridSpec, rng: &mut ChaCha8Rng, amp: f64) -> Field {
    let values = (0..g.len())
        .map(|_| amp * (2.0 * rng.random::<f64>() - 1.0))
        .collect();
    Field::new(g.clone(), values).unwrap()
}

/// Direct nested-loop action on a 2-axis grid, written without the library's
/// neighbour tables or reductions.
fn action_oracle_2d(u: &Field, f: &dyn Potential) -> f64 {
    let g = u.grid();
    let (n1, n2) = (g.nodes()[0], g.nodes()[1]);
    let (h1, h2) = (g.extents()[0] / n1 as f64, g.extents()[1] / n2 as f64);
    let n = g.components();
    let val = |i: usize, j: usize, c: usize| u.values()[(i * n2 + j) * n + c];
    let mut total = 0.0;
    for i in 0..n1 {
        for j in 0..n2 {
            let mut density = 0.0;
            for c in 0..n {
                let d1 = (val((i + 1) % n1, j, c) - val(i, j, c)) / h1;
                let d2 = (val(i, (j + 1) % n2, c) - val(i, j, c)) / h2;
                density += 0.5 * (d1 * d1 + d2 * d2);
            }
            let x: Vec<f64> = (0..n).map(|c| val(i, j, c)).collect();
            density += f.value(&[i as f64 * h1, j as f64 * h2], &x).unwrap();
            total += density;
        }
    }
    total * h1 * h2
}

fn pendulum2() -> CosineLattice {
    CosineLattice::new(vec![1.0, 0.5], vec![2.0 * PI, 1.5], 0.1)
        .unwrap()
        .with_modulation(0.4, 0, 1.0)
        .unwrap()
}

fn expr2() -> ExprPotential {
    ExprPotential::new(
        "1.1 + sin(x1)*cos(x2 + t1) + 0.2*sin(2*pi*t2)*cos(x1)^2 + 0.1*exp(-x2^2)",
        2,
        2,
    )
    .unwrap()
}

#[test]
fn matches_independent_summation() {
    let g = GridSpec::new(vec![1.0, 1.5], vec![8, 8], 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let potentials: [&dyn Potential; 2] = [&pendulum2(), &expr2()];
    for f in potentials {
        for _ in 0..10 {
            let u = random_field(&g, &mut rng, 3.0);
            let a = action(&u, f).unwrap().total;
            let b = action_oracle_2d(&u, f);
            assert!((a - b).abs() <= 1e-12 * b.abs(), "{a} vs {b}");
        }
    }
}

#[test]
fn gradient_matches_central_differences() {
    let g = GridSpec::new(vec![1.0, 1.5], vec![8, 8], 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let potentials: [&dyn Potential; 2] = [&pendulum2(), &expr2()];
    let eps = 1e-6;
    for f in potentials {
        for _ in 0..25 {
            let u = random_field(&g, &mut rng, 2.0);
            let v = random_field(&g, &mut rng, 1.0);
            let v = v.scale(1.0 / l2_norm(&v));
            let exact = l2_inner(&action_gradient(&u, f).unwrap(), &v).unwrap();
            let up = action(&u.axpy(eps, &v).unwrap(), f).unwrap().total;
            let down = action(&u.axpy(-eps, &v).unwrap(), f).unwrap().total;
            let fd = (up - down) / (2.0 * eps);
            assert!(
                (fd - exact).abs() <= 1e-6 * exact.abs().max(1.0),
                "{fd} vs {exact}"
            );
        }
    }
}

#[test]
fn lattice_shift_leaves_action_unchanged() {
    let g = GridSpec::new(vec![1.0, 1.5], vec![8, 8], 2).unwrap();
    let f = pendulum2();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let u = random_field(&g, &mut rng, 4.0);
        let base = action(&u, &f).unwrap().total;
        for (i, p) in f.periods().unwrap().iter().enumerate() {
            let mut shift = vec![0.0; 2];
            shift[i] = *p;
            let moved = action(&u.add_constant(&shift).unwrap(), &f).unwrap().total;
            assert!((moved - base).abs() <= 1e-12 * base.abs());
        }
    }
}

#[test]
fn continuity_bound_sweep() {
    let g = GridSpec::new(vec![2.0], vec![32], 1).unwrap();
    let f = CosineLattice::new(vec![1.0], vec![2.0 * PI], 0.1).unwrap();
    let env = GrowthEnvelope::gradient_only(0.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..200 {
        let u = random_field(&g, &mut rng, 5.0);
        let v = random_field(&g, &mut rng, 5.0);
        assert!(continuity_bound(&u, &v, &f, &env).unwrap().pass);
    }
}

#[test]
fn shrinking_perturbation_is_dominated() {
    let g = GridSpec::new(vec![2.0], vec![32], 1).unwrap();
    let f = CosineLattice::new(vec![1.0], vec![2.0 * PI], 0.1).unwrap();
    let env = GrowthEnvelope::gradient_only(0.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let u = random_field(&g, &mut rng, 2.0);
    let delta = random_field(&g, &mut rng, 1.0);
    let mut prev = f64::INFINITY;
    for k in 0..40 {
        let v = u.axpy(0.5f64.powi(k), &delta).unwrap();
        let b = continuity_bound(&v, &u, &f, &env).unwrap();
        assert!(b.pass);
        assert!(b.lhs <= prev);
        assert!(b.rhs < prev || k == 0);
        prev = b.rhs;
    }
    assert!(prev < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kinetic_ignores_constants(
        values in prop::collection::vec(-3.0f64..3.0, 2 * 5 * 4),
        c in prop::collection::vec(-100.0f64..100.0, 2),
    ) {
        let g = GridSpec::new(vec![1.0, 2.0], vec![5, 4], 2).unwrap();
        let u = Field::new(g, values).unwrap();
        let f = ShiftedQuadratic::new(vec![0.0, 0.0], 1.0).unwrap();
        let a = action(&u, &f).unwrap().kinetic;
        let b = action(&u.add_constant(&c).unwrap(), &f).unwrap().kinetic;
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
    }

    #[test]
    fn action_at_least_potential_floor(values in prop::collection::vec(-10.0f64..10.0, 16)) {
        let g = GridSpec::new(vec![3.0], vec![16], 1).unwrap();
        let u = Field::new(g.clone(), values).unwrap();
        let f = CosineLattice::new(vec![1.0], vec![2.0 * PI], 0.1).unwrap();
        let a = action(&u, &f).unwrap();
        prop_assert!(a.kinetic >= 0.0);
        prop_assert!(a.total >= a.kinetic);
        prop_assert!(a.total >= g.volume() * 0.1 - 1e-9);
    }
}
