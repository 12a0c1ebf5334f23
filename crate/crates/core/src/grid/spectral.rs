//! Discrete-Fourier solve of the linear periodic Poisson problem `Δ_h u = f`.
//!
//! The DFT diagonalizes the periodic stencil exactly: mode `κ` has eigenvalue
//! `λ(κ) = −Σ_α (2 sin(π κ_α / N_α) / h_α)²`. This is used as an oracle for
//! manufactured solutions, never inside the nonlinear solver.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::{l2_norm, mean, Field, GridSpec};
use crate::error::{Error, Result};

/// Returns the zero-mean `u` with `Δ_h u = f`. Each component of `f` must have
/// mean zero to within `1e-10 · ‖f‖_{L²}`.
pub fn solve_linear_poisson(f: &Field) -> Result<Field> {
    let grid = f.grid();
    let norm = l2_norm(f);
    for (component, m) in mean(f).into_iter().enumerate() {
        if m.abs() > 1e-10 * norm {
            return Err(Error::NonZeroMean { component, mean: m });
        }
    }

    let n = grid.components();
    let count = grid.node_count();
    let eigen = eigenvalues(grid);
    let mut planner = FftPlanner::new();
    let mut out = vec![0.0; f.values().len()];
    for i in 0..n {
        let mut buf: Vec<Complex64> = (0..count)
            .map(|node| Complex64::new(f.component(node, i), 0.0))
            .collect();
        transform(grid, &mut buf, &mut planner, false);
        buf[0] = Complex64::new(0.0, 0.0);
        for (c, lambda) in buf.iter_mut().zip(&eigen).skip(1) {
            *c /= *lambda;
        }
        transform(grid, &mut buf, &mut planner, true);
        let scale = 1.0 / count as f64;
        for (node, c) in buf.iter().enumerate() {
            out[node * n + i] = c.re * scale;
        }
    }
    Field::new(grid.clone(), out)
}

fn eigenvalues(grid: &GridSpec) -> Vec<f64> {
    let spacings = grid.spacings();
    (0..grid.node_count())
        .map(|node| {
            let idx = grid.multi_index(node);
            -idx.iter()
                .zip(grid.nodes())
                .zip(&spacings)
                .map(|((k, n), h)| (2.0 * (PI * *k as f64 / *n as f64).sin() / h).powi(2))
                .sum::<f64>()
        })
        .collect()
}

/// In-place multi-dimensional FFT, one axis at a time, unnormalized.
fn transform(
    grid: &GridSpec,
    data: &mut [Complex64],
    planner: &mut FftPlanner<f64>,
    inverse: bool,
) {
    for axis in 0..grid.dims() {
        let len = grid.nodes()[axis];
        let stride = grid.stride(axis);
        let fft = if inverse {
            planner.plan_fft_inverse(len)
        } else {
            planner.plan_fft_forward(len)
        };
        let mut line = vec![Complex64::new(0.0, 0.0); len];
        for start in (0..grid.node_count()).filter(|node| (node / stride).is_multiple_of(len)) {
            for (k, slot) in line.iter_mut().enumerate() {
                *slot = data[start + k * stride];
            }
            fft.process(&mut line);
            for (k, value) in line.iter().enumerate() {
                data[start + k * stride] = *value;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::laplacian;

    #[test]
    fn zero_rhs() {
        let g = GridSpec::new(vec![1.0, 2.0], vec![6, 5], 2).unwrap();
        let u = solve_linear_poisson(&Field::zeros(&g)).unwrap();
        assert_eq!(u.max_abs(), 0.0);
    }

    #[test]
    fn eigenfunction() {
        let n = 24;
        let g = GridSpec::new(vec![2.0], vec![n], 1).unwrap();
        let h = g.spacing(0);
        let lambda = (2.0 * (PI / n as f64).sin() / h).powi(2);
        let s = Field::from_fn(&g, |t, o| o[0] = (PI * t[0]).sin()).unwrap();
        let u = solve_linear_poisson(&s.scale(-lambda)).unwrap();
        assert!(u.max_abs_diff(&s).unwrap() < 1e-12);
    }

    #[test]
    fn nonzero_mean_rejected() {
        let g = GridSpec::new(vec![1.0], vec![8], 1).unwrap();
        let f = Field::constant(&g, &[1.0]).unwrap();
        assert!(matches!(
            solve_linear_poisson(&f),
            Err(Error::NonZeroMean { component: 0, .. })
        ));
    }

    #[test]
    fn inverts_the_stencil_in_3d() {
        let g = GridSpec::new(vec![1.0, 2.0, 0.5], vec![4, 6, 5], 1).unwrap();
        let raw = Field::from_fn(&g, |t, o| {
            o[0] = (3.0 * t[0] + 1.7 * t[1] * t[1] - t[2]).sin() + t[1]
        })
        .unwrap();
        let (_, f) = crate::grid::split_mean(&raw);
        let u = solve_linear_poisson(&f).unwrap();
        let back = laplacian(&u);
        assert!(back.max_abs_diff(&f).unwrap() <= 1e-10 * f.max_abs());
        assert!(mean(&u)[0].abs() < 1e-14);
    }
}
