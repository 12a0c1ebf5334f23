use std::f64::consts::PI;

use poisson_grad::grid::split_mean;
use poisson_grad::io::{
    read_closed_csv, read_field_csv, write_closed_csv, write_field_csv, ClosedField,
};
use poisson_grad::verify::{boundary_check, wirtinger_check};
use poisson_grad::{Field, GridSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn random_zero_mean_fields_satisfy_wirtinger() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for k in 0..100 {
        let p = 1 + k % 3;
        let nodes: Vec<usize> = (0..p).map(|_| rng.random_range(3..12)).collect();
        let extents: Vec<f64> = (0..p).map(|_| rng.random_range(0.2..5.0)).collect();
        let g = GridSpec::new(extents, nodes, 1 + k % 2).unwrap();
        let raw = Field::new(
            g.clone(),
            (0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect(),
        )
        .unwrap();
        let (_, u) = split_mean(&raw);
        let c = wirtinger_check(&u);
        assert!(c.pass, "{c:?}");
        assert!(c.lhs > 0.0);
    }
}

#[test]
fn lowest_mode_attains_the_constant() {
    // Axis 0 has the largest h/(2 sin(π/N)); its lowest Fourier modes are extremal.
    let g = GridSpec::new(vec![5.0, 1.0], vec![10, 8], 1).unwrap();
    for phase in [0.0, 0.3, 1.1] {
        let u = Field::from_fn(&g, |t, o| o[0] = (2.0 * PI * t[0] / 5.0 + phase).sin()).unwrap();
        let c = wirtinger_check(&u);
        assert!((c.lhs / c.rhs - 1.0).abs() <= 1e-12, "{c:?}");
    }
}

#[test]
fn constant_converges_to_continuum_value() {
    let t = 3.0;
    let mut prev = f64::INFINITY;
    for n in [8usize, 16, 32, 64] {
        let c = GridSpec::new(vec![t], vec![n], 1)
            .unwrap()
            .wirtinger_constant();
        let gap = (c - t / (2.0 * PI)).abs();
        assert!(
            gap <= t * PI / (12.0 * (n * n) as f64) * 1.1,
            "N = {n}: {gap}"
        );
        assert!(gap < prev);
        prev = gap;
    }
}

fn field() -> impl Strategy<Value = Field> {
    (prop::collection::vec(3usize..7, 1..=3), 1usize..=2).prop_flat_map(|(nodes, n)| {
        let extents = nodes.iter().map(|k| 0.3 * *k as f64).collect();
        let g = GridSpec::new(extents, nodes, n).unwrap();
        let len = g.len();
        prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::ZERO, len)
            .prop_map(move |v| Field::new(g.clone(), v).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn csv_round_trip_is_bit_exact(u in field()) {
        let mut buf = Vec::new();
        write_field_csv(&u, &mut buf).unwrap();
        let back = read_field_csv(buf.as_slice(), u.grid()).unwrap();
        let bits = |f: &Field| f.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&back), bits(&u));
    }

    #[test]
    fn closed_exports_pass_boundary_check(u in field()) {
        let closed = ClosedField::from_field(&u);
        let mut buf = Vec::new();
        write_closed_csv(&closed, &mut buf).unwrap();
        let back = read_closed_csv(buf.as_slice(), u.grid()).unwrap();
        let report = boundary_check(&back);
        prop_assert!(report.pass);
        prop_assert_eq!(report.axes.len(), u.grid().dims());
    }

    #[test]
    fn single_corruption_is_detected(u in field(), pick in any::<prop::sample::Index>(), bump in 1e-3f64..1.0) {
        let closed = ClosedField::from_field(&u);
        let dims = closed.closed_nodes();
        let n = u.grid().components();
        // Corrupt a node on the high face of a random axis.
        let axis = pick.index(dims.len());
        let mut idx: Vec<usize> = dims.iter().map(|d| pick.index(*d)).collect();
        idx[axis] = dims[axis] - 1;
        let flat = idx.iter().zip(&dims).fold(0, |acc, (k, d)| acc * d + k);
        let mut values = closed.values().to_vec();
        let scale = 1.0 + closed.max_abs();
        values[flat * n] += bump * scale;
        let report = boundary_check(&ClosedField::new(u.grid().clone(), values).unwrap());
        prop_assert!(!report.axes[axis].pass);
    }
}
