//! Test-only reference computations, kept independent of the production
//! linear-algebra paths they are used to check.
//!
//! * Eigenvalues of a Hermitian matrix via Sylvester inertia counts from an
//!   LDL† factorization ("bisection on the leading principal minors").
//! * Concurrence of a 4×4 state via the characteristic polynomial of the
//!   spin-flipped operator, with roots located by recursive bisection.

use crate::linalg::{c64, ComplexMatrix, C_ZERO};
use num_complex::Complex64;

/// Number of eigenvalues of `m` strictly below `x`, from the signs of the
/// diagonal of the LDL† factorization of `m − x·I` (Sylvester's law of
/// inertia applied to the leading principal minors).
///
/// Returns `None` when the factorization breaks down (x hits an eigenvalue
/// of a leading principal submatrix); callers perturb `x` and retry.
fn count_below(m: &ComplexMatrix, x: f64) -> Option<usize> {
    let n = m.dim();
    let scale = m.max_abs().max(x.abs()).max(1.0);
    let mut l = vec![vec![C_ZERO; n]; n];
    let mut d = vec![0.0_f64; n];
    for j in 0..n {
        let mut dj = m.get(j, j).re - x;
        for k in 0..j {
            dj -= l[j][k].norm_sqr() * d[k];
        }
        if dj.abs() < 1e-14 * scale {
            return None;
        }
        d[j] = dj;
        for i in (j + 1)..n {
            let mut s = m.get(i, j);
            for k in 0..j {
                s -= l[i][k] * l[j][k].conj() * c64(d[k], 0.0);
            }
            l[i][j] = s / c64(dj, 0.0);
        }
    }
    Some(d.iter().filter(|&&v| v < 0.0).count())
}

fn count_below_robust(m: &ComplexMatrix, x: f64) -> usize {
    let mut shift = 0.0;
    loop {
        if let Some(c) = count_below(m, x + shift) {
            return c;
        }
        shift = if shift == 0.0 {
            1e-13 * m.max_abs().max(1.0)
        } else {
            shift * 3.0
        };
    }
}

/// All eigenvalues of a Hermitian matrix, ascending, each located by
/// bisection on the inertia count within its Gershgorin interval.
pub fn hermitian_eigenvalues_by_bisection(m: &ComplexMatrix) -> Vec<f64> {
    let n = m.dim();
    let mut lo_all = f64::INFINITY;
    let mut hi_all = f64::NEG_INFINITY;
    for i in 0..n {
        let radius: f64 = (0..n).filter(|&j| j != i).map(|j| m.get(i, j).norm()).sum();
        lo_all = lo_all.min(m.get(i, i).re - radius);
        hi_all = hi_all.max(m.get(i, i).re + radius);
    }
    let width = (hi_all - lo_all).max(1.0);
    (0..n)
        .map(|k| {
            let mut lo = lo_all - 1e-8 * width;
            let mut hi = hi_all + 1e-8 * width;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if count_below_robust(m, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// Characteristic polynomial coefficients of a complex square matrix by the
/// Faddeev–LeVerrier recursion. Returned in descending powers with leading
/// coefficient 1: `p(λ) = λⁿ + c₁λⁿ⁻¹ + … + cₙ`.
fn char_poly(m: &ComplexMatrix) -> Vec<f64> {
    let n = m.dim();
    let mut coeffs = vec![1.0_f64];
    let mut work = ComplexMatrix::identity(n);
    let mut ck = Complex64::new(0.0, 0.0);
    for k in 1..=n {
        if k > 1 {
            for i in 0..n {
                work.add_at(i, i, ck);
            }
        }
        work = m * &work;
        ck = -work.trace() / (k as f64);
        assert!(
            ck.im.abs() <= 1e-9 * ck.norm().max(1.0),
            "characteristic polynomial coefficient not real: {ck}"
        );
        coeffs.push(ck.re);
    }
    coeffs
}

fn poly_eval(p: &[f64], x: f64) -> f64 {
    p.iter().fold(0.0, |acc, &c| acc * x + c)
}

fn poly_derivative(p: &[f64]) -> Vec<f64> {
    let deg = p.len() - 1;
    p.iter()
        .take(deg)
        .enumerate()
        .map(|(i, &c)| c * (deg - i) as f64)
        .collect()
}

fn bisect_root(p: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = poly_eval(p, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = poly_eval(p, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Real roots (with multiplicity) of a polynomial whose roots are all real.
///
/// Simple roots come from sign changes between consecutive critical points;
/// multiple roots are critical points where the polynomial itself vanishes,
/// with multiplicity one more than their multiplicity in the derivative.
fn real_roots(p: &[f64]) -> Vec<f64> {
    let deg = p.len() - 1;
    match deg {
        0 => return vec![],
        1 => return vec![-p[1] / p[0]],
        2 => {
            let (a, b, c) = (p[0], p[1], p[2]);
            let disc = (b * b - 4.0 * a * c).max(0.0);
            let q = -0.5 * (b + b.signum() * disc.sqrt());
            let mut roots = if q == 0.0 {
                vec![0.0, 0.0]
            } else {
                vec![q / a, c / q]
            };
            roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
            return roots;
        }
        _ => {}
    }

    let crit = real_roots(&poly_derivative(p));
    // group repeated critical points
    let mut grouped: Vec<(f64, usize)> = Vec::new();
    for c in crit {
        match grouped.last_mut() {
            Some((v, m)) if (c - *v).abs() <= 1e-9 * v.abs().max(1.0) => *m += 1,
            _ => grouped.push((c, 1)),
        }
    }

    let bound = 1.0
        + p.iter()
            .skip(1)
            .map(|c| (c / p[0]).abs())
            .fold(0.0, f64::max);
    let mut roots: Vec<f64> = Vec::new();
    let poly_scale = |x: f64| -> f64 {
        p.iter()
            .rev()
            .enumerate()
            .map(|(i, &c)| c.abs() * x.abs().powi(i as i32))
            .sum::<f64>()
            .max(1e-300)
    };
    // critical points where p itself vanishes are multiple roots; mark them
    // so the interval scan can skip their neighbourhoods
    let mut breakpoints = vec![(-bound, false)];
    for &(c, m) in &grouped {
        let is_root = poly_eval(p, c).abs() <= 1e-8 * poly_scale(c);
        if is_root {
            for _ in 0..=m {
                roots.push(c);
            }
        }
        breakpoints.push((c, is_root));
    }
    breakpoints.push((bound, false));

    // p is monotonic between consecutive critical points, so an interval
    // bounded by a counted root holds no further root; elsewhere a sign
    // change brackets exactly one simple root
    for w in breakpoints.windows(2) {
        let ((x_lo, lo_is_root), (x_hi, hi_is_root)) = (w[0], w[1]);
        if lo_is_root || hi_is_root || x_hi <= x_lo {
            continue;
        }
        if poly_eval(p, x_lo) * poly_eval(p, x_hi) < 0.0 {
            roots.push(bisect_root(p, x_lo, x_hi));
        }
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots
}

/// Concurrence of a 4×4 two-qubit density matrix computed independently:
/// builds `R = ρ (σy⊗σy) ρ* (σy⊗σy)` directly, extracts its eigenvalues as
/// the roots of the characteristic polynomial, and applies
/// `C = max(√r₁ − √r₂ − √r₃ − √r₄, 0)`.
pub fn concurrence_by_char_poly(rho: &ComplexMatrix) -> f64 {
    assert_eq!(rho.dim(), 4);
    let mut yy = ComplexMatrix::zeros(4, 4);
    yy.set(0, 3, c64(-1.0, 0.0));
    yy.set(1, 2, c64(1.0, 0.0));
    yy.set(2, 1, c64(1.0, 0.0));
    yy.set(3, 0, c64(-1.0, 0.0));
    let r = &(rho * &yy) * &(&rho.conj() * &yy);
    let poly = char_poly(&r);
    let roots = real_roots(&poly);
    assert_eq!(roots.len(), 4, "expected 4 real roots, got {roots:?}");
    let mut lambdas: Vec<f64> = roots.iter().map(|&x| x.max(0.0).sqrt()).collect();
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_oracle_on_diagonal() {
        let m = ComplexMatrix::diagonal(&[3.0, -1.0, 2.0]);
        let eig = hermitian_eigenvalues_by_bisection(&m);
        assert!((eig[0] + 1.0).abs() < 1e-9);
        assert!((eig[1] - 2.0).abs() < 1e-9);
        assert!((eig[2] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn real_roots_with_triple_root() {
        // (x - 2)(x - 5)³ = x⁴ - 17x³ + 105x² - 275x + 250
        let p = [1.0, -17.0, 105.0, -275.0, 250.0];
        let roots = real_roots(&p);
        assert_eq!(roots.len(), 4);
        assert!((roots[0] - 2.0).abs() < 1e-6);
        for r in &roots[1..] {
            assert!((r - 5.0).abs() < 1e-6);
        }
    }

    #[test]
    fn real_roots_distinct() {
        // (x+1)x(x-1)(x-3) = x⁴ - 3x³ - x² + 3x
        let p = [1.0, -3.0, -1.0, 3.0, 0.0];
        let roots = real_roots(&p);
        let expect = [-1.0, 0.0, 1.0, 3.0];
        assert_eq!(roots.len(), 4);
        for (r, e) in roots.iter().zip(expect) {
            assert!((r - e).abs() < 1e-8, "{r} vs {e}");
        }
    }
}
