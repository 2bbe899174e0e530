//! Polynomial roots from companion-matrix eigenvalues.

use super::poly::Poly;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

/// Diagonal similarity balancing (Parlett–Reinsch, radix 2) in place.
fn balance(a: &mut DMatrix<Complex64>) {
    let n = a.nrows();
    let radix = 2.0f64;
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].l1_norm();
                    r += a[(i, j)].l1_norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let (mut c2, mut r2) = (c, r);
            while c2 < r2 / radix {
                c2 *= radix;
                r2 /= radix;
                f *= radix;
            }
            while c2 >= r2 * radix {
                c2 /= radix;
                r2 *= radix;
                f /= radix;
            }
            if (c2 + r2) < 0.95 * s {
                converged = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
        if converged {
            break;
        }
    }
}

/// All roots of `p` (with multiplicity), ascending coefficient order.
pub fn poly_roots(p: &Poly) -> Result<Vec<Complex64>> {
    let deg = p.degree().ok_or_else(|| Error::Numerical("zero polynomial has no roots".into()))?;
    if deg == 0 {
        return Ok(vec![]);
    }
    let lead = p.0[deg];
    let mut c = DMatrix::<Complex64>::zeros(deg, deg);
    for i in 1..deg {
        c[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..deg {
        c[(i, deg - 1)] = -p.0[i] / lead;
    }
    balance(&mut c);
    let dp = p.derivative();
    let eig = Schur::try_new(c, f64::EPSILON, 200 * deg)
        .and_then(|s| s.eigenvalues())
        .map(|e| e.iter().copied().collect::<Vec<_>>());
    let eig = match eig {
        Some(e) => e,
        None => aberth(p, &dp, deg)?,
    };
    Ok(eig.into_iter().map(|z| polish(p, &dp, z)).collect())
}

/// Simultaneous Aberth–Ehrlich iteration, used when the QR sweep stalls.
fn aberth(p: &Poly, dp: &Poly, deg: usize) -> Result<Vec<Complex64>> {
    let lead = p.0[deg].norm();
    let radius = 1.0 + p.0[..deg].iter().map(|c| c.norm() / lead).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(0.5 * radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / deg as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let v = p.eval(z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / dp.eval(z[i]);
            let repel: Complex64 = (0..deg).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let step = ratio / (1.0 - ratio * repel);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            return Ok(z);
        }
    }
    if z.iter().all(|v| v.is_finite()) {
        Ok(z)
    } else {
        Err(Error::Numerical("root iteration did not converge".into()))
    }
}

/// A few guarded Newton steps on the original polynomial.
fn polish(p: &Poly, dp: &Poly, mut z: Complex64) -> Complex64 {
    let mut res = p.eval(z).norm();
    for _ in 0..4 {
        let d = dp.eval(z);
        if d.norm() == 0.0 || res == 0.0 {
            break;
        }
        let cand = z - p.eval(z) / d;
        let r2 = p.eval(cand).norm();
        if r2 < res {
            z = cand;
            res = r2;
        } else {
            break;
        }
    }
    z
}

/// Groups roots lying within `tol` of each other; returns `(representative, multiplicity)`.
pub fn cluster_roots(roots: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    for &r in roots {
        if let Some(entry) = out.iter_mut().find(|(z, _)| (z - r).norm() <= tol) {
            entry.1 += 1;
        } else {
            out.push((r, 1));
        }
    }
    out
}
