//! Damped Gauss-Newton for the small bound-constrained vector-loop systems.
//!
//! Problems have at most four unknowns and four residuals, so everything is
//! stack-allocated via const generics. Bounds are enforced by projection
//! after each step; a start converges when the residual norm drops below
//! `RESIDUAL_CONVERGED` or the projected step falls below `STEP_CONVERGED`.

use crate::scalar::{c, Real};

pub const RESIDUAL_CONVERGED: f64 = 1e-10;
pub const STEP_CONVERGED: f64 = 1e-12;
/// A start counts as a success only below this final residual norm.
pub const SUCCESS_RESIDUAL: f64 = 1e-8;

const MAX_ITER: usize = 80;

#[derive(Debug, Clone, Copy)]
pub struct LsFit<T, const N: usize> {
    pub x: [T; N],
    pub residual_norm: T,
}

impl<T: Real, const N: usize> LsFit<T, N> {
    pub fn is_success(&self) -> bool {
        self.residual_norm < c(SUCCESS_RESIDUAL)
    }
}

fn norm<T: Real, const M: usize>(v: &[T; M]) -> T {
    v.iter().fold(T::zero(), |a, &x| a + x * x).sqrt()
}

fn project<T: Real, const N: usize>(x: &mut [T; N], lo: &[T; N], hi: &[T; N]) {
    for i in 0..N {
        x[i] = x[i].max(lo[i]).min(hi[i]);
    }
}

/// Solves `A d = b` for a small symmetric positive system via Gaussian
/// elimination with partial pivoting. Returns `None` on a (near-)singular
/// pivot.
fn solve_linear<T: Real, const N: usize>(mut a: [[T; N]; N], mut b: [T; N]) -> Option<[T; N]> {
    for col in 0..N {
        let mut pivot = col;
        for row in col + 1..N {
            if a[row][col].abs() > a[pivot][col].abs() {
                pivot = row;
            }
        }
        if a[pivot][col].abs() < c(1e-300) {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..N {
            let f = a[row][col] / a[col][col];
            for k in col..N {
                a[row][k] = a[row][k] - f * a[col][k];
            }
            b[row] = b[row] - f * b[col];
        }
    }
    let mut x = [T::zero(); N];
    for col in (0..N).rev() {
        let mut s = b[col];
        for k in col + 1..N {
            s = s - a[col][k] * x[k];
        }
        x[col] = s / a[col][col];
    }
    Some(x)
}

/// Minimizes `||f(x)||` over the box `[lo, hi]` starting from `x0`.
///
/// `eval` returns the residual vector and the row-major Jacobian at `x`.
pub fn gauss_newton<T: Real, const M: usize, const N: usize>(
    x0: [T; N],
    lo: [T; N],
    hi: [T; N],
    eval: impl Fn(&[T; N]) -> ([T; M], [[T; N]; M]),
) -> LsFit<T, N> {
    let mut x = x0;
    project(&mut x, &lo, &hi);
    let (mut res, mut jac) = eval(&x);
    let mut cost = norm(&res);
    let mut lambda = c::<T>(1e-4);

    for _ in 0..MAX_ITER {
        if cost < c(RESIDUAL_CONVERGED) {
            break;
        }
        // Normal equations with Levenberg damping.
        let mut a = [[T::zero(); N]; N];
        let mut g = [T::zero(); N];
        for r in 0..M {
            for i in 0..N {
                g[i] = g[i] - jac[r][i] * res[r];
                for j in 0..N {
                    a[i][j] = a[i][j] + jac[r][i] * jac[r][j];
                }
            }
        }
        for i in 0..N {
            a[i][i] = a[i][i] + lambda * (T::one() + a[i][i]);
        }
        let step = match solve_linear(a, g) {
            Some(d) => d,
            None => {
                lambda = lambda * c(10.0);
                if lambda > c(1e12) {
                    break;
                }
                continue;
            }
        };
        let mut x_new = x;
        for i in 0..N {
            x_new[i] = x_new[i] + step[i];
        }
        project(&mut x_new, &lo, &hi);
        let mut moved = T::zero();
        for i in 0..N {
            moved = moved + (x_new[i] - x[i]) * (x_new[i] - x[i]);
        }
        let moved = moved.sqrt();
        let (res_new, jac_new) = eval(&x_new);
        let cost_new = norm(&res_new);
        if cost_new < cost {
            x = x_new;
            res = res_new;
            jac = jac_new;
            cost = cost_new;
            lambda = (lambda / c(3.0)).max(c(1e-12));
            if moved < c(STEP_CONVERGED) {
                break;
            }
        } else {
            lambda = lambda * c(10.0);
            if lambda > c(1e12) {
                break;
            }
        }
    }

    LsFit {
        x,
        residual_norm: cost,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_quadratic_root_in_box() {
        // f(x, y) = (x^2 + y - 2, y - 1), root at (1, 1) within [0, 5]^2.
        let fit = gauss_newton(
            [3.0f64, 4.0],
            [0.0, 0.0],
            [5.0, 5.0],
            |x| {
                (
                    [x[0] * x[0] + x[1] - 2.0, x[1] - 1.0],
                    [[2.0 * x[0], 1.0], [0.0, 1.0]],
                )
            },
        );
        assert!(fit.is_success());
        assert!((fit.x[0] - 1.0).abs() < 1e-9);
        assert!((fit.x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_box_reports_failure() {
        // Root at x = 2 but box is [0, 1].
        let fit = gauss_newton([0.5f64], [0.0], [1.0], |x| ([x[0] - 2.0], [[1.0]]));
        assert!(!fit.is_success());
        assert!((fit.x[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn underdetermined_system_converges_with_damping() {
        // One equation, two unknowns: x + y = 1.
        let fit = gauss_newton([4.0f64, -3.0], [-10.0, -10.0], [10.0, 10.0], |x| {
            ([x[0] + x[1] - 1.0], [[1.0, 1.0]])
        });
        assert!(fit.is_success());
        assert!((fit.x[0] + fit.x[1] - 1.0).abs() < 1e-9);
    }
}
