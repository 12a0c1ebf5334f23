use crate::error::{Error, Result};
use crate::grid::{mean, Field};
use crate::potential::validate_periods;

/// Shifts `u` by whole periods so that its mean lands in the fundamental cell.
///
/// `kᵢ = −floor(ūⁱ / Pᵢ)`; the returned field is `u + Σᵢ kᵢPᵢeᵢ`, which only moves
/// the mean. When the shift is zero the field is returned unchanged.
pub fn canonicalize(u: &Field, periods: &[f64]) -> Result<(Field, Vec<i64>)> {
    let n = u.grid().components();
    validate_periods(periods, n).map_err(|_| Error::MissingPeriods)?;
    let m = mean(u);
    let shifts: Vec<i64> = m
        .iter()
        .zip(periods)
        .map(|(mi, p)| -(mi / p).floor() as i64)
        .collect();
    if shifts.iter().all(|k| *k == 0) {
        return Ok((u.clone(), shifts));
    }
    let offset: Vec<f64> = shifts
        .iter()
        .zip(periods)
        .map(|(k, p)| *k as f64 * p)
        .collect();
    Ok((u.add_constant(&offset)?, shifts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use std::f64::consts::PI;

    fn line(values: Vec<f64>) -> Field {
        let g = GridSpec::new(vec![1.0], vec![values.len()], 1).unwrap();
        Field::new(g, values).unwrap()
    }

    #[test]
    fn examples() {
        let u = line(vec![7.0, 7.6, 7.3]);
        let (c, k) = canonicalize(&u, &[2.0 * PI]).unwrap();
        assert_eq!(k, vec![-1]);
        assert!((mean(&c)[0] - (7.3 - 2.0 * PI)).abs() < 1e-14);
        assert!((mean(&c)[0] - 1.01681).abs() < 1e-5);

        let (c, k) = canonicalize(&line(vec![-0.5; 4]), &[1.0]).unwrap();
        assert_eq!(k, vec![1]);
        assert_eq!(mean(&c)[0], 0.5);

        let zero_mean = line(vec![1.0, -1.0, 0.0]);
        let (c, k) = canonicalize(&zero_mean, &[3.0]).unwrap();
        assert_eq!(k, vec![0]);
        assert_eq!(c, zero_mean);
    }

    #[test]
    fn fluctuation_untouched() {
        let g = GridSpec::new(vec![1.0, 1.0], vec![3, 4], 2).unwrap();
        let u = Field::from_fn(&g, |t, o| {
            o[0] = 10.0 + t[0];
            o[1] = -3.0 + t[1];
        })
        .unwrap();
        let (c, k) = canonicalize(&u, &[2.0, 1.5]).unwrap();
        assert_eq!(k, vec![-5, 2]);
        for node in 0..g.node_count() {
            assert!((c.at(node)[0] - u.at(node)[0] + 10.0).abs() < 1e-14);
            assert!((c.at(node)[1] - u.at(node)[1] - 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_periods() {
        let u = line(vec![0.0; 3]);
        assert!(matches!(canonicalize(&u, &[]), Err(Error::MissingPeriods)));
        assert!(canonicalize(&u, &[0.0]).is_err());
    }
}
