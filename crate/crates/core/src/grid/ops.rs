use super::{pairwise_sum_by, Field};
use crate::error::Result;

/// Discrete `L²` pairing `Vol_cell · Σ_nodes Σ_i uⁱ vⁱ`.
pub fn l2_inner(u: &Field, v: &Field) -> Result<f64> {
    u.check_same_grid(v)?;
    let (a, b) = (u.values(), v.values());
    Ok(u.grid().cell_volume() * pairwise_sum_by(a.len(), |j| a[j] * b[j]))
}

pub fn l2_norm(u: &Field) -> f64 {
    let a = u.values();
    (u.grid().cell_volume() * pairwise_sum_by(a.len(), |j| a[j] * a[j])).sqrt()
}

/// The `H¹` pairing: `L²` part plus the `L²` pairing of every forward difference.
pub fn h1_inner(u: &Field, v: &Field) -> Result<f64> {
    u.check_same_grid(v)?;
    let mut total = l2_inner(u, v)?;
    for axis in 0..u.grid().dims() {
        total += l2_inner(&forward_diff(u, axis)?, &forward_diff(v, axis)?)?;
    }
    Ok(total)
}

pub fn h1_norm(u: &Field) -> f64 {
    let d = stacked_diff_norm(u);
    (l2_norm(u).powi(2) + d * d).sqrt()
}

/// `(D_α u)(k) = (u(k + e_α) − u(k)) / h_α` with periodic wrap. Axes are 0-based.
pub fn forward_diff(u: &Field, axis: usize) -> Result<Field> {
    difference(u, axis, true)
}

/// `(B_α u)(k) = (u(k) − u(k − e_α)) / h_α`; the `L²` adjoint of `D_α` is `−B_α`.
pub fn backward_diff(u: &Field, axis: usize) -> Result<Field> {
    difference(u, axis, false)
}

fn difference(u: &Field, axis: usize, forward: bool) -> Result<Field> {
    let grid = u.grid();
    grid.check_axis(axis)?;
    let n = grid.components();
    let inv_h = 1.0 / grid.spacing(axis);
    let mut out = vec![0.0; u.values().len()];
    for node in 0..grid.node_count() {
        let other = grid.neighbor(node, axis, forward);
        let (here, there) = (u.at(node), u.at(other));
        for i in 0..n {
            out[node * n + i] = if forward {
                (there[i] - here[i]) * inv_h
            } else {
                (here[i] - there[i]) * inv_h
            };
        }
    }
    Ok(Field::from_raw(grid.clone(), out))
}

/// `‖D u‖ = (Σ_α ‖D_α u‖²_{L²})^{1/2}`, the norm of the stacked forward differences.
pub fn stacked_diff_norm(u: &Field) -> f64 {
    let grid = u.grid();
    let n = grid.components();
    let inv_h: Vec<f64> = grid.spacings().iter().map(|h| 1.0 / h).collect();
    let vals = u.values();
    let sum = pairwise_sum_by(vals.len(), |j| {
        let (node, i) = (j / n, j % n);
        (0..grid.dims())
            .map(|a| {
                let d = (vals[grid.neighbor(node, a, true) * n + i] - vals[j]) * inv_h[a];
                d * d
            })
            .sum::<f64>()
    });
    (grid.cell_volume() * sum).sqrt()
}

/// The `(2p+1)`-point periodic Laplacian `Σ_α (u(k+e_α) − 2u(k) + u(k−e_α)) / h_α²`.
pub fn laplacian(u: &Field) -> Field {
    let grid = u.grid();
    let n = grid.components();
    let inv_h2: Vec<f64> = grid.spacings().iter().map(|h| 1.0 / (h * h)).collect();
    let vals = u.values();
    let mut out = vec![0.0; vals.len()];
    for node in 0..grid.node_count() {
        for (axis, w) in inv_h2.iter().enumerate() {
            let fwd = grid.neighbor(node, axis, true);
            let bwd = grid.neighbor(node, axis, false);
            for i in 0..n {
                out[node * n + i] +=
                    (vals[fwd * n + i] - 2.0 * vals[node * n + i] + vals[bwd * n + i]) * w;
            }
        }
    }
    Field::from_raw(grid.clone(), out)
}

/// Domain average `ū = (1/Π Nᵅ) Σ_nodes u(k)`, one entry per component.
pub fn mean(u: &Field) -> Vec<f64> {
    let grid = u.grid();
    let n = grid.components();
    let count = grid.node_count();
    let vals = u.values();
    (0..n)
        .map(|i| pairwise_sum_by(count, |node| vals[node * n + i]) / count as f64)
        .collect()
}

/// `u = ū + ũ` with `ũ` of zero mean.
pub fn split_mean(u: &Field) -> (Vec<f64>, Field) {
    let m = mean(u);
    let n = m.len();
    let values = u
        .values()
        .iter()
        .enumerate()
        .map(|(j, v)| v - m[j % n])
        .collect();
    (m, Field::from_raw(u.grid().clone(), values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use std::f64::consts::PI;

    fn line(t: f64, vals: &[f64]) -> Field {
        let g = GridSpec::new(vec![t], vec![vals.len()], 1).unwrap();
        Field::new(g, vals.to_vec()).unwrap()
    }

    #[test]
    fn l2_examples() {
        let u = line(1.0, &[1.0; 4]);
        assert_eq!(l2_inner(&u, &u).unwrap(), 1.0);
        let z = Field::zeros(u.grid());
        assert_eq!(l2_inner(&z, &u).unwrap(), 0.0);

        let g = GridSpec::new(vec![1.0], vec![64], 1).unwrap();
        let s = Field::from_fn(&g, |t, o| o[0] = (2.0 * PI * t[0]).sin()).unwrap();
        assert!((l2_norm(&s).powi(2) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn mismatched_grids_rejected() {
        let a = line(1.0, &[1.0; 4]);
        let b = line(2.0, &[1.0; 4]);
        assert!(l2_inner(&a, &b).is_err());
        assert!(h1_inner(&a, &b).is_err());
    }

    #[test]
    fn h1_of_constant() {
        let g = GridSpec::new(vec![2.0, 3.0], vec![5, 4], 2).unwrap();
        let c = Field::constant(&g, &[1.5, -2.0]).unwrap();
        let expected = (1.5f64 * 1.5 + 4.0) * 6.0;
        assert!((h1_inner(&c, &c).unwrap() - expected).abs() < 1e-12);
        assert_eq!(h1_norm(&Field::zeros(&g)), 0.0);
    }

    #[test]
    fn forward_diff_examples() {
        let u = line(4.0, &[0.0, 1.0, 2.0, 3.0]);
        assert_eq!(
            forward_diff(&u, 0).unwrap().values(),
            &[1.0, 1.0, 1.0, -3.0]
        );
        assert_eq!(
            backward_diff(&u, 0).unwrap().values(),
            &[-3.0, 1.0, 1.0, 1.0]
        );
        let c = line(4.0, &[2.0; 4]);
        assert_eq!(forward_diff(&c, 0).unwrap().max_abs(), 0.0);
        assert!(forward_diff(&c, 1).is_err());
    }

    #[test]
    fn forward_diff_is_first_order() {
        let err = |n: usize| {
            let g = GridSpec::new(vec![1.0], vec![n], 1).unwrap();
            let u = Field::from_fn(&g, |t, o| o[0] = (2.0 * PI * t[0]).sin()).unwrap();
            let exact =
                Field::from_fn(&g, |t, o| o[0] = 2.0 * PI * (2.0 * PI * t[0]).cos()).unwrap();
            l2_norm(&forward_diff(&u, 0).unwrap().sub(&exact).unwrap())
        };
        let ratio = err(128) / err(256);
        assert!((ratio - 2.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn laplacian_examples() {
        let u = line(4.0, &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(laplacian(&u).values(), &[1.0, -2.0, 1.0, 0.0]);
        assert_eq!(laplacian(&line(4.0, &[3.0; 4])).max_abs(), 0.0);

        let n = 32;
        let g = GridSpec::new(vec![3.0], vec![n], 1).unwrap();
        let h = g.spacing(0);
        let u = Field::from_fn(&g, |t, o| o[0] = (2.0 * PI * t[0] / 3.0).sin()).unwrap();
        let lambda = (2.0 * (PI / n as f64).sin() / h).powi(2);
        let expected = u.scale(-lambda);
        assert!(laplacian(&u).max_abs_diff(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn mean_examples() {
        let u = line(1.0, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(mean(&u), vec![2.5]);
        assert_eq!(mean(&Field::zeros(u.grid())), vec![0.0]);
        let g = GridSpec::new(vec![1.0], vec![16], 1).unwrap();
        let s = Field::from_fn(&g, |t, o| o[0] = 0.75 + (2.0 * PI * t[0]).sin()).unwrap();
        assert!((mean(&s)[0] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn split_mean_examples() {
        let u = line(1.0, &[1.0, 2.0, 3.0, 4.0]);
        let (m, fluct) = split_mean(&u);
        assert_eq!(m, vec![2.5]);
        assert_eq!(fluct.values(), &[-1.5, -0.5, 0.5, 1.5]);
        let (_, zero) = split_mean(&line(1.0, &[7.0; 5]));
        assert_eq!(zero.max_abs(), 0.0);
    }
}
