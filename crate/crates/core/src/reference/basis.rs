//! Orthonormal modal bases on the reference interval and triangle.

/// Orthonormal Jacobi polynomial `P_n^{(α,β)}(x)` (weight `(1-x)^α (1+x)^β`).
pub fn jacobi(x: f64, alpha: f64, beta: f64, n: usize) -> f64 {
    let ab = alpha + beta;
    let gamma0 = 2f64.powf(ab + 1.0) / (ab + 1.0) * gamma(alpha + 1.0) * gamma(beta + 1.0) / gamma(ab + 1.0);
    let p0 = 1.0 / gamma0.sqrt();
    if n == 0 {
        return p0;
    }
    let gamma1 = (alpha + 1.0) * (beta + 1.0) / (ab + 3.0) * gamma0;
    let p1 = ((ab + 2.0) * x / 2.0 + (alpha - beta) / 2.0) / gamma1.sqrt();
    if n == 1 {
        return p1;
    }
    let mut a_old = 2.0 / (2.0 + ab) * ((alpha + 1.0) * (beta + 1.0) / (ab + 3.0)).sqrt();
    let (mut pm1, mut p) = (p0, p1);
    for i in 1..n {
        let i = i as f64;
        let h1 = 2.0 * i + ab;
        let a_new = 2.0 / (h1 + 2.0)
            * ((i + 1.0) * (i + 1.0 + ab) * (i + 1.0 + alpha) * (i + 1.0 + beta) / (h1 + 1.0) / (h1 + 3.0)).sqrt();
        let b_new = -(alpha * alpha - beta * beta) / h1 / (h1 + 2.0);
        let next = (-a_old * pm1 + (x - b_new) * p) / a_new;
        a_old = a_new;
        pm1 = p;
        p = next;
    }
    p
}

/// Derivative of [`jacobi`].
pub fn jacobi_derivative(x: f64, alpha: f64, beta: f64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        let nf = n as f64;
        (nf * (nf + alpha + beta + 1.0)).sqrt() * jacobi(x, alpha + 1.0, beta + 1.0, n - 1)
    }
}

// Lanczos approximation; only ever called with small integer-valued arguments.
fn gamma(x: f64) -> f64 {
    if (x - x.round()).abs() < 1e-14 && x > 0.0 {
        return (1..x.round() as u64).fold(1.0, |acc, k| acc * k as f64);
    }
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = C[0];
        let t = x + G + 0.5;
        for (i, c) in C.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

/// Number of modes in `P^N` for the given spatial dimension.
pub fn mode_count(dim: usize, degree: usize) -> usize {
    match dim {
        1 => degree + 1,
        _ => (degree + 1) * (degree + 2) / 2,
    }
}

/// Evaluates all orthonormal modes of `P^N` and their reference gradients at
/// `point`. Returns `(values, d/dr, d/ds)`; `d/ds` is zero in 1D.
pub fn eval_modes(dim: usize, degree: usize, point: [f64; 2]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    if dim == 1 {
        let r = point[0];
        let vals = (0..=degree).map(|n| jacobi(r, 0.0, 0.0, n)).collect();
        let dr = (0..=degree).map(|n| jacobi_derivative(r, 0.0, 0.0, n)).collect();
        return (vals, dr, vec![0.0; degree + 1]);
    }
    let (r, s) = (point[0], point[1]);
    let a = if (1.0 - s).abs() > 1e-14 {
        2.0 * (1.0 + r) / (1.0 - s) - 1.0
    } else {
        -1.0
    };
    let b = s;
    let n = mode_count(2, degree);
    let mut vals = Vec::with_capacity(n);
    let mut dr = Vec::with_capacity(n);
    let mut ds = Vec::with_capacity(n);
    for i in 0..=degree {
        for j in 0..=(degree - i) {
            let fi = i as f64;
            let alpha_b = 2.0 * fi + 1.0;
            let fa = jacobi(a, 0.0, 0.0, i);
            let dfa = jacobi_derivative(a, 0.0, 0.0, i);
            let gb = jacobi(b, alpha_b, 0.0, j);
            let dgb = jacobi_derivative(b, alpha_b, 0.0, j);
            let half = 0.5 * (1.0 - b);
            vals.push(std::f64::consts::SQRT_2 * fa * gb * (1.0 - b).powi(i as i32));

            let lower = if i > 0 { half.powi(i as i32 - 1) } else { 1.0 };
            let mut d_r = dfa * gb * lower;
            let mut d_s = dfa * gb * 0.5 * (1.0 + a) * lower;
            let mut tmp = dgb * half.powi(i as i32);
            if i > 0 {
                tmp -= 0.5 * fi * gb * lower;
            }
            d_s += fa * tmp;
            let scale = 2f64.powf(fi + 0.5);
            d_r *= scale;
            d_s *= scale;
            dr.push(d_r);
            ds.push(d_s);
        }
    }
    (vals, dr, ds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::quadrature::{gauss_legendre, triangle_rule};

    #[test]
    fn legendre_modes_are_orthonormal() {
        let (x, w) = gauss_legendre(10);
        for m in 0..=7 {
            for n in 0..=7 {
                let ip: f64 = x
                    .iter()
                    .zip(&w)
                    .map(|(x, w)| w * jacobi(*x, 0.0, 0.0, m) * jacobi(*x, 0.0, 0.0, n))
                    .sum();
                let expect = if m == n { 1.0 } else { 0.0 };
                assert!((ip - expect).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn triangle_modes_are_orthonormal() {
        let degree = 4;
        let (nodes, w) = triangle_rule(2 * degree);
        let np = mode_count(2, degree);
        let mut gram = vec![0.0; np * np];
        for (p, wq) in nodes.iter().zip(&w) {
            let (v, _, _) = eval_modes(2, degree, *p);
            for a in 0..np {
                for b in 0..np {
                    gram[a * np + b] += wq * v[a] * v[b];
                }
            }
        }
        for a in 0..np {
            for b in 0..np {
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((gram[a * np + b] - expect).abs() < 1e-13, "{a} {b}");
            }
        }
    }

    #[test]
    fn triangle_gradients_match_finite_differences() {
        let degree = 4;
        let eps = 1e-6;
        for p in [[-0.3, -0.5], [0.2, -0.9], [-0.95, 0.9], [-1.0, 1.0 - 1e-3]] {
            let (_, dr, ds) = eval_modes(2, degree, p);
            let (vp, _, _) = eval_modes(2, degree, [p[0] + eps, p[1]]);
            let (vm, _, _) = eval_modes(2, degree, [p[0] - eps, p[1]]);
            let (vsp, _, _) = eval_modes(2, degree, [p[0], p[1] + eps]);
            let (vsm, _, _) = eval_modes(2, degree, [p[0], p[1] - eps]);
            for k in 0..dr.len() {
                let fd_r = (vp[k] - vm[k]) / (2.0 * eps);
                let fd_s = (vsp[k] - vsm[k]) / (2.0 * eps);
                assert!((fd_r - dr[k]).abs() < 1e-6 * (1.0 + dr[k].abs()), "mode {k} at {p:?}");
                assert!((fd_s - ds[k]).abs() < 1e-6 * (1.0 + ds[k].abs()), "mode {k} at {p:?}");
            }
        }
    }
}
