use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{QError, Result};

/// Largest matrix [`permanent`] accepts.
pub const PERMANENT_MAX: usize = 20;
/// Largest matrix [`permanent_naive`] accepts.
pub const PERMANENT_NAIVE_MAX: usize = 8;

fn check_square(a: &DMatrix<C64>, cap: usize) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(QError::SizeMismatch {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    if a.nrows() > cap {
        return Err(QError::CapExceeded {
            requested: a.nrows(),
            cap,
        });
    }
    Ok(a.nrows())
}

/// Ryser's inclusion–exclusion formula walked in Gray-code order,
/// `O(2^n n)`.
pub fn permanent(a: &DMatrix<C64>) -> Result<C64> {
    let n = check_square(a, PERMANENT_MAX)?;
    if n == 0 {
        return Ok(C64::new(1.0, 0.0));
    }
    let mut row_sums = vec![C64::new(0.0, 0.0); n];
    let mut total = C64::new(0.0, 0.0);
    let mut gray = 0usize;
    for k in 1..1usize << n {
        // column toggled between consecutive Gray codes
        let j = k.trailing_zeros() as usize;
        gray ^= 1 << j;
        let add = gray >> j & 1 == 1;
        for (i, s) in row_sums.iter_mut().enumerate() {
            if add {
                *s += a[(i, j)];
            } else {
                *s -= a[(i, j)];
            }
        }
        let prod: C64 = row_sums.iter().product();
        if gray.count_ones() % 2 == n as u32 % 2 {
            total += prod;
        } else {
            total -= prod;
        }
    }
    Ok(total)
}

/// Sum over all permutations, `O(n! n)`; the test oracle.
pub fn permanent_naive(a: &DMatrix<C64>) -> Result<C64> {
    let n = check_square(a, PERMANENT_NAIVE_MAX)?;
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = C64::new(0.0, 0.0);
    permute(a, &mut perm, 0, &mut total);
    Ok(total)
}

fn permute(a: &DMatrix<C64>, perm: &mut Vec<usize>, k: usize, total: &mut C64) {
    if k == perm.len() {
        *total += perm.iter().enumerate().map(|(i, &j)| a[(i, j)]).product::<C64>();
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute(a, perm, k + 1, total);
        perm.swap(k, i);
    }
}
