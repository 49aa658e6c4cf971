//! Independent reference solutions used by the integration and acceptance
//! tests. Nothing here shares code with the library's solvers.

#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::PI;

const GL4_X: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL4_W: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];

/// Butcher tableau of the 4-stage Gauss–Legendre collocation method (order 8).
struct Tableau {
    c: [f64; 4],
    b: [f64; 4],
    a: [[f64; 4]; 4],
}

fn gauss4() -> Tableau {
    let c = GL4_X.map(|x| 0.5 * (1.0 + x));
    let b = GL4_W.map(|w| 0.5 * w);
    let lagrange = |j: usize, s: f64| {
        (0..4)
            .filter(|&m| m != j)
            .map(|m| (s - c[m]) / (c[j] - c[m]))
            .product::<f64>()
    };
    let mut a = [[0.0; 4]; 4];
    for i in 0..4 {
        for (j, aij) in a[i].iter_mut().enumerate() {
            // degree-3 integrand: the same 4-point rule on [0, c_i] is exact
            *aij = (0..4)
                .map(|k| 0.5 * c[i] * GL4_W[k] * lagrange(j, 0.5 * c[i] * (1.0 + GL4_X[k])))
                .sum();
        }
    }
    Tableau { c, b, a }
}

fn solve4(mut m: [[Complex64; 4]; 4], mut r: [Complex64; 4]) -> [Complex64; 4] {
    for col in 0..4 {
        let piv = (col..4)
            .max_by(|&x, &y| m[x][col].norm().total_cmp(&m[y][col].norm()))
            .unwrap();
        m.swap(col, piv);
        r.swap(col, piv);
        for row in col + 1..4 {
            let f = m[row][col] / m[col][col];
            for k in col..4 {
                let v = m[col][k];
                m[row][k] -= f * v;
            }
            let v = r[col];
            r[row] -= f * v;
        }
    }
    let mut x = [Complex64::default(); 4];
    for row in (0..4).rev() {
        let s: Complex64 = (row + 1..4).map(|k| m[row][k] * x[k]).sum();
        x[row] = (r[row] - s) / m[row][row];
    }
    x
}

/// Periodic solution of `−i u′ + λ c(t) u = f(t)` sampled at `2πk/n_out`,
/// by collocation time stepping of `u′ = i(f − λcu)` with the periodicity
/// condition solved for the initial value. Integrates in the direction in
/// which the homogeneous flow contracts over one period.
pub fn shooting(
    lambda: f64,
    c: impl Fn(f64) -> Complex64,
    f: impl Fn(f64) -> Complex64,
    c_sup: f64,
    n_out: usize,
) -> Vec<Complex64> {
    let tab = gauss4();
    let two_pi = 2.0 * PI;
    let per_out = ((two_pi * lambda * c_sup / 0.1) / n_out as f64).ceil().max(8.0) as usize;
    let steps = per_out * n_out;
    let c0_im = {
        // mean of Im c by the trapezoid rule on a fine grid (c is smooth)
        let m = 4096;
        (0..m).map(|k| c(two_pi * k as f64 / m as f64).im).sum::<f64>() / m as f64
    };
    let backward = c0_im > 0.0;
    let h = if backward { -two_pi / steps as f64 } else { two_pi / steps as f64 };
    let t_start = if backward { two_pi } else { 0.0 };
    let i = Complex64::i();

    // propagate both the homogeneous (u₀ = 1, f = 0) and particular (u₀ = 0) parts
    let advance = |u: Complex64, t: f64, with_f: bool| {
        let ts = tab.c.map(|ck| t + ck * h);
        let alpha = ts.map(|s| -i * lambda * c(s));
        let g = ts.map(|s| if with_f { i * f(s) } else { Complex64::default() });
        let mut m = [[Complex64::default(); 4]; 4];
        let mut r = [Complex64::default(); 4];
        for p in 0..4 {
            for q in 0..4 {
                m[p][q] = -alpha[p] * h * tab.a[p][q];
            }
            m[p][p] += 1.0;
            r[p] = alpha[p] * u + g[p];
        }
        let k = solve4(m, r);
        u + h * (0..4).map(|p| tab.b[p] * k[p]).sum::<Complex64>()
    };

    let mut phi = Complex64::new(1.0, 0.0);
    let mut part = Complex64::default();
    let mut homog = Vec::with_capacity(steps + 1);
    let mut partic = Vec::with_capacity(steps + 1);
    homog.push(phi);
    partic.push(part);
    for s in 0..steps {
        let t = t_start + s as f64 * h;
        phi = advance(phi, t, false);
        part = advance(part, t, true);
        homog.push(phi);
        partic.push(part);
    }
    let u0 = part / (1.0 - phi);
    let along: Vec<Complex64> = homog.iter().zip(&partic).map(|(a, b)| a * u0 + b).collect();
    (0..n_out)
        .map(|k| {
            let idx = if backward { (steps - k * per_out) % steps } else { k * per_out };
            along[idx]
        })
        .collect()
}

/// `min_{j ≤ n} j^ε · dist(jα, ℤ)` in double precision.
pub fn brute_force_weighted_gap(alpha: f64, n: usize, eps: f64) -> (usize, f64) {
    (1..=n)
        .map(|j| {
            let x = alpha * j as f64;
            (j, (j as f64).powf(eps) * (x - x.round()).abs())
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
}
