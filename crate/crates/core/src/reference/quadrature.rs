//! One-dimensional Gauss rules and a collapsed-coordinate rule on the triangle.

/// Legendre polynomial `P_n(x)` and `P_{n-1}(x)`.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    if n == 0 {
        return (p_prev, 0.0);
    }
    let mut p = x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = next;
    }
    (p, p_prev)
}

/// `n`-point Gauss-Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for k in 0..n.div_ceil(2) {
        let derivative = |x: f64| {
            let (p, pm1) = legendre_pair(n, x);
            (p, nf * (x * p - pm1) / (x * x - 1.0))
        };
        let mut x = -(std::f64::consts::PI * (k as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = derivative(x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = derivative(x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[k] = x;
        nodes[n - 1 - k] = -x;
        weights[k] = w;
        weights[n - 1 - k] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// `n`-point Gauss-Lobatto nodes and weights on `[-1, 1]`, ascending (`n >= 2`).
pub fn gauss_lobatto(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let m = n - 1;
    let mf = m as f64;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for k in 0..n {
        // Chebyshev-Gauss-Lobatto start, Newton on (1-x^2) P_m'(x)
        let mut x = -(std::f64::consts::PI * k as f64 / mf).cos();
        if k > 0 && k < m {
            for _ in 0..100 {
                let (p, pm1) = legendre_pair(m, x);
                let dx = (x * p - pm1) / (n as f64 * p);
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
        }
        let (p, _) = legendre_pair(m, x);
        nodes[k] = x;
        weights[k] = 2.0 / (mf * (mf + 1.0) * p * p);
    }
    for k in 0..n / 2 {
        let x = 0.5 * (nodes[n - 1 - k] - nodes[k]);
        let w = 0.5 * (weights[k] + weights[n - 1 - k]);
        nodes[k] = -x;
        nodes[n - 1 - k] = x;
        weights[k] = w;
        weights[n - 1 - k] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Rule on the reference triangle `(-1,-1), (1,-1), (-1,1)` exact for total
/// degree `degree`, from a Duffy-collapsed tensor Gauss rule.
pub fn triangle_rule(degree: usize) -> (Vec<[f64; 2]>, Vec<f64>) {
    let na = degree / 2 + 1;
    let nb = degree.div_ceil(2) + 1;
    let (a, wa) = gauss_legendre(na);
    let (b, wb) = gauss_legendre(nb);
    let mut nodes = Vec::with_capacity(na * nb);
    let mut weights = Vec::with_capacity(na * nb);
    for (bj, wbj) in b.iter().zip(&wb) {
        for (ai, wai) in a.iter().zip(&wa) {
            let r = 0.5 * (1.0 + ai) * (1.0 - bj) - 1.0;
            nodes.push([r, *bj]);
            weights.push(wai * wbj * 0.5 * (1.0 - bj));
        }
    }
    (nodes, weights)
}

/// Exact integral of `x^a y^b` over the reference triangle.
pub fn triangle_monomial_integral(a: u32, b: u32) -> f64 {
    // inner integral over x in [-1, -y]
    let sign = if a.is_multiple_of(2) { -1.0 } else { 1.0 };
    sign / (a as f64 + 1.0) * (line_monomial_integral(a + b + 1) - line_monomial_integral(b))
}

/// Exact integral of `x^a` over `[-1, 1]`.
pub fn line_monomial_integral(a: u32) -> f64 {
    if a % 2 == 1 {
        0.0
    } else {
        2.0 / (a as f64 + 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact() {
        for n in 1..=12 {
            let (x, w) = gauss_legendre(n);
            for a in 0..(2 * n) as u32 {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(a as i32)).sum();
                assert!((q - line_monomial_integral(a)).abs() < 1e-14, "n={n} a={a}");
            }
        }
    }

    #[test]
    fn gauss_lobatto_is_exact_and_includes_endpoints() {
        for n in 2..=10 {
            let (x, w) = gauss_lobatto(n);
            assert_eq!(x[0], -1.0);
            assert_eq!(x[n - 1], 1.0);
            for a in 0..(2 * n - 2) as u32 {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(a as i32)).sum();
                assert!((q - line_monomial_integral(a)).abs() < 1e-14, "n={n} a={a}");
            }
        }
    }

    #[test]
    fn triangle_rule_is_exact() {
        assert!((triangle_monomial_integral(0, 0) - 2.0).abs() < 1e-15);
        assert!((triangle_monomial_integral(1, 0) + 2.0 / 3.0).abs() < 1e-15);
        for d in 0..=12 {
            let (nodes, w) = triangle_rule(d);
            for a in 0..=d as u32 {
                for b in 0..=(d as u32 - a) {
                    let q: f64 = nodes
                        .iter()
                        .zip(&w)
                        .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32))
                        .sum();
                    let exact = triangle_monomial_integral(a, b);
                    assert!((q - exact).abs() < 1e-13, "d={d} a={a} b={b}");
                }
            }
        }
    }
}
