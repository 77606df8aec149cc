//! Dense Hermitian eigenvalues by cyclic complex Jacobi rotations.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary and then annihilates it with a real Givens rotation. Sweeps visit
//! pivots in fixed row-major order, so the result is a deterministic function
//! of the input bits.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::C64;

const MAX_SWEEPS: usize = 64;

/// Absolute Hermiticity tolerance, scaled by `max(1, max |a_ij|)`.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Largest entrywise deviation `|a_ij - conj(a_ji)|`.
pub fn hermitian_deviation(a: &DMatrix<C64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of a Hermitian matrix, sorted in descending order.
pub fn hermitian_eigenvalues(a: &DMatrix<C64>) -> Result<Vec<f64>> {
    if a.nrows() != a.ncols() {
        return Err(Error::Dimension {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    let scale = a.iter().fold(1.0f64, |m, z| m.max(z.norm()));
    let dev = hermitian_deviation(a);
    if dev > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian(dev));
    }

    let n = a.nrows();
    // symmetrize so the iteration sees an exactly Hermitian matrix
    let mut m = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(a[(i, i)].re, 0.0)
        } else {
            (a[(i, j)] + a[(j, i)].conj()) * 0.5
        }
    });

    let frob = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&m);
        if off == 0.0 || off <= f64::EPSILON * frob {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, p, q);
            }
        }
    }

    let mut eig: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    eig.sort_by(|x, y| y.total_cmp(x));
    Ok(eig)
}

/// Eigenvalues of a real symmetric matrix, descending.
pub fn symmetric_eigenvalues(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    hermitian_eigenvalues(&a.map(|x| C64::new(x, 0.0)))
}

fn off_diagonal_norm(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut s = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            s += m[(p, q)].norm_sqr();
        }
    }
    (2.0 * s).sqrt()
}

fn rotate(m: &mut DMatrix<C64>, p: usize, q: usize) {
    let apq = m[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;

    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // e^{-iα} with α = arg(a_pq)
    let phase = apq.conj() / mag;

    // U restricted to (p, q): [[c, s], [-s e^{-iα}, c e^{-iα}]]
    let u_pp = C64::new(c, 0.0);
    let u_pq = C64::new(s, 0.0);
    let u_qp = -phase * s;
    let u_qq = phase * c;

    let n = m.nrows();
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp * u_pp + mkq * u_qp;
        m[(k, q)] = mkp * u_pq + mkq * u_qq;
    }
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = u_pp.conj() * mpk + u_qp.conj() * mqk;
        m[(q, k)] = u_pq.conj() * mpk + u_qq.conj() * mqk;
    }
    m[(p, q)] = C64::new(0.0, 0.0);
    m[(q, p)] = C64::new(0.0, 0.0);
    m[(p, p)] = C64::new(app - t * mag, 0.0);
    m[(q, q)] = C64::new(aqq + t * mag, 0.0);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn diagonal_input_is_sorted() {
        let a = DMatrix::from_row_slice(2, 2, &[c(0.25, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.75, 0.0)]);
        let eig = hermitian_eigenvalues(&a).unwrap();
        assert_eq!(eig, vec![0.75, 0.25]);
    }

    #[test]
    fn all_halves_has_eigenvalues_one_and_zero() {
        let a = DMatrix::from_element(2, 2, c(0.5, 0.0));
        let eig = hermitian_eigenvalues(&a).unwrap();
        assert!((eig[0] - 1.0).abs() < 1e-15);
        assert!(eig[1].abs() < 1e-15);
    }

    #[test]
    fn complex_two_by_two() {
        // [[2, i], [-i, 2]] has eigenvalues 3 and 1
        let a = DMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let eig = hermitian_eigenvalues(&a).unwrap();
        assert!((eig[0] - 3.0).abs() < 1e-14);
        assert!((eig[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.3, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(hermitian_eigenvalues(&a), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn trace_is_preserved() {
        let a = DMatrix::from_fn(5, 5, |i, j| {
            let (lo, hi) = (i.min(j) as f64, i.max(j) as f64);
            let im = if i < j {
                0.1 * hi
            } else if i > j {
                -0.1 * hi
            } else {
                0.0
            };
            c(1.0 / (1.0 + lo + hi), im)
        });
        let eig = hermitian_eigenvalues(&a).unwrap();
        let tr: f64 = (0..5).map(|i| a[(i, i)].re).sum();
        assert!((eig.iter().sum::<f64>() - tr).abs() < 1e-13);
    }
}
