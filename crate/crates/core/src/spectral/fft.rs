use super::{FrequencyGrid, SpectralField};
use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

fn transform_axes(data: &mut [Complex64], sizes: &[usize], direction: FftDirection) {
    let mut planner = FftPlanner::<f64>::new();
    let total: usize = sizes.iter().product();
    let mut stride = 1;
    for axis in (0..sizes.len()).rev() {
        let m = sizes[axis];
        let fft = planner.plan_fft(m, direction);
        let outer = total / (stride * m);
        let mut line = vec![Complex64::new(0.0, 0.0); m];
        for o in 0..outer {
            for inner in 0..stride {
                let base = o * stride * m + inner;
                for k in 0..m {
                    line[k] = data[base + k * stride];
                }
                fft.process(&mut line);
                for k in 0..m {
                    data[base + k * stride] = line[k];
                }
            }
        }
        stride *= m;
    }
}

fn bin(n: i64, m: usize) -> usize {
    n.rem_euclid(m as i64) as usize
}

/// Samples the field on the uniform physical grid `x_j = j L / sizes[axis]`
/// (row-major, last axis fastest). Every size must be at least `2N+1`.
pub fn to_physical(field: &SpectralField, sizes: &[usize]) -> Result<Vec<Complex64>> {
    let grid = &field.grid;
    check_sizes(grid, sizes)?;
    let total: usize = sizes.iter().product();
    let mut data = vec![Complex64::new(0.0, 0.0); total];
    for i in 0..grid.len() {
        let mode = grid.mode(i);
        let mut idx = 0;
        for (a, &n) in mode.iter().enumerate() {
            idx = idx * sizes[a] + bin(n, sizes[a]);
        }
        data[idx] = field.coeffs[i];
    }
    transform_axes(&mut data, sizes, FftDirection::Inverse);
    Ok(data)
}

/// Inverse of [`to_physical`]: projects samples onto the modes of `grid`.
pub fn from_physical(grid: &FrequencyGrid, samples: &[Complex64], sizes: &[usize]) -> Result<SpectralField> {
    check_sizes(grid, sizes)?;
    let total: usize = sizes.iter().product();
    if samples.len() != total {
        return Err(Error::GridMismatch(format!("{} samples for physical grid {:?}", samples.len(), sizes)));
    }
    let mut data = samples.to_vec();
    transform_axes(&mut data, sizes, FftDirection::Forward);
    let scale = 1.0 / total as f64;
    let coeffs = (0..grid.len())
        .map(|i| {
            let mode = grid.mode(i);
            let mut idx = 0;
            for (a, &n) in mode.iter().enumerate() {
                idx = idx * sizes[a] + bin(n, sizes[a]);
            }
            data[idx] * scale
        })
        .collect();
    SpectralField::new(grid.clone(), coeffs)
}

fn check_sizes(grid: &FrequencyGrid, sizes: &[usize]) -> Result<()> {
    if sizes.len() != grid.dim() || grid.axes().iter().zip(sizes).any(|(a, &m)| m < a.modes()) {
        return Err(Error::GridMismatch(format!("physical sizes {:?} too small for {}", sizes, grid.summary())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Axis;

    #[test]
    fn roundtrip_and_point_values() {
        let g = FrequencyGrid::new(vec![Axis::new(1.0, 3), Axis::new(2.0, 2)], false).unwrap();
        let f = SpectralField::random(&g, 7, |_, _| 1.0);
        let sizes = [9, 7];
        let phys = to_physical(&f, &sizes).unwrap();
        let x = [2.0 / 9.0, 3.0 * 2.0 / 7.0];
        assert!((phys[2 * 7 + 3] - f.eval_at(&x)).norm() < 1e-12);
        let back = from_physical(&g, &phys, &sizes).unwrap();
        assert!(back.max_abs_diff(&f) < 1e-13);
    }
}
