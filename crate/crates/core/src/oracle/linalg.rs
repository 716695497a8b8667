//! Small dense linear algebra for the oracle: floating Gaussian elimination with an
//! exact integer fallback.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// Solves `a x = b` by partial pivoting; `None` when a pivot falls below `tol` times
/// the largest entry.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>, tol: f64) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return if n == 0 { Some(Vec::new()) } else { None };
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= tol * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for c in r + 1..n {
            s -= a[r][c] * x[c];
        }
        x[r] = s / a[r][r];
    }
    Some(x)
}

/// Exact determinant by fraction-free elimination.
pub fn det_exact(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = 1i32;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Exact solution of an integer system as floats, by Cramer's rule. `None` if singular.
pub fn solve_exact(a: &[Vec<BigInt>], b: &[BigInt]) -> Option<Vec<f64>> {
    let det = det_exact(a);
    if det.is_zero() {
        return None;
    }
    let n = b.len();
    Some(
        (0..n)
            .map(|j| {
                let mut aj = a.to_vec();
                for i in 0..n {
                    aj[i][j] = b[i].clone();
                }
                ratio(&det_exact(&aj), &det)
            })
            .collect(),
    )
}

/// `num / den` as a float without overflowing intermediate conversions.
pub fn ratio(num: &BigInt, den: &BigInt) -> f64 {
    let shift = num.bits().max(den.bits()).saturating_sub(900) as usize;
    let n = (num >> shift).to_f64().unwrap_or(0.0);
    let d = (den >> shift).to_f64().unwrap_or(1.0);
    if d == 0.0 {
        return if num.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    n / d
}

pub fn big(v: i64) -> BigInt {
    BigInt::from(v)
}
