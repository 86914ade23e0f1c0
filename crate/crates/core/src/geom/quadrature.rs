//! Quadrature and interpolation helpers shared by the curve code.

use std::sync::OnceLock;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, computed by Newton
/// iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

pub(crate) fn gl8() -> &'static (Vec<f64>, Vec<f64>) {
    static GL: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    GL.get_or_init(|| gauss_legendre(8))
}

/// `∫_a^b f` with one 8-point Gauss-Legendre panel.
pub fn gl8_panel(a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let (nodes, weights) = gl8();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    nodes
        .iter()
        .zip(weights)
        .map(|(z, w)| w * f(mid + half * z))
        .sum::<f64>()
        * half
}

/// `∫_a^b f` with one 4-point Gauss-Legendre panel.
pub fn gl4_panel(a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    const Z: [f64; 2] = [0.339_981_043_584_856_3, 0.861_136_311_594_052_6];
    const W: [f64; 2] = [0.652_145_154_862_546_1, 0.347_854_845_137_453_9];
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for (z, w) in Z.iter().zip(W) {
        acc += w * (f(mid - half * z) + f(mid + half * z));
    }
    acc * half
}

/// Cubic Lagrange weights for a point at fractional offset `u` relative to
/// nodes at -1, 0, 1, 2.
#[inline]
pub(crate) fn cubic_weights(u: f64) -> [f64; 4] {
    let um1 = u - 1.0;
    let um2 = u - 2.0;
    let up1 = u + 1.0;
    [
        -u * um1 * um2 / 6.0,
        up1 * um1 * um2 / 2.0,
        -up1 * u * um2 / 2.0,
        up1 * u * um1 / 6.0,
    ]
}

/// Lagrange interpolation through four arbitrary abscissae.
pub(crate) fn lagrange4(xs: [f64; 4], ys: [f64; 4], x: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..4 {
        let mut w = 1.0;
        for j in 0..4 {
            if i != j {
                w *= (x - xs[j]) / (xs[i] - xs[j]);
            }
        }
        acc += w * ys[i];
    }
    acc
}

/// Fourth-order first and second derivative stencils on a uniform grid.
/// `vals` holds five samples at offsets -2..=2 (times the spacing `h`).
pub(crate) fn central5(vals: [f64; 5], h: f64) -> (f64, f64) {
    let d1 = (vals[0] - 8.0 * vals[1] + 8.0 * vals[3] - vals[4]) / (12.0 * h);
    let d2 = (-vals[0] + 16.0 * vals[1] - 30.0 * vals[2] + 16.0 * vals[3] - vals[4]) / (12.0 * h * h);
    (d1, d2)
}

/// One-sided five-point stencils; `offset` is the position of the target
/// (0 = first of the five samples, 1 = second).
pub(crate) fn onesided5(vals: [f64; 5], h: f64, offset: usize) -> (f64, f64) {
    match offset {
        0 => {
            let d1 = (-25.0 * vals[0] + 48.0 * vals[1] - 36.0 * vals[2] + 16.0 * vals[3]
                - 3.0 * vals[4])
                / (12.0 * h);
            let d2 = (35.0 * vals[0] - 104.0 * vals[1] + 114.0 * vals[2] - 56.0 * vals[3]
                + 11.0 * vals[4])
                / (12.0 * h * h);
            (d1, d2)
        }
        1 => {
            let d1 = (-3.0 * vals[0] - 10.0 * vals[1] + 18.0 * vals[2] - 6.0 * vals[3] + vals[4])
                / (12.0 * h);
            let d2 = (11.0 * vals[0] - 20.0 * vals[1] + 6.0 * vals[2] + 4.0 * vals[3] - vals[4])
                / (12.0 * h * h);
            (d1, d2)
        }
        _ => panic!("offset must be 0 or 1"),
    }
}

/// Composite Simpson rule on a uniform grid with an even number of intervals;
/// falls back to trapezoid on the last interval when the count is odd.
pub fn simpson_uniform(vals: &[f64], h: f64) -> f64 {
    let n = vals.len().saturating_sub(1);
    if n == 0 {
        return 0.0;
    }
    let even = n - n % 2;
    let mut acc = 0.0;
    let mut i = 0;
    while i < even {
        acc += vals[i] + 4.0 * vals[i + 1] + vals[i + 2];
        i += 2;
    }
    acc *= h / 3.0;
    if even < n {
        acc += 0.5 * h * (vals[n - 1] + vals[n]);
    }
    acc
}

/// Wrap an angle difference into `(-π, π]`.
#[inline]
pub fn wrap_angle(d: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut r = d % two_pi;
    if r > std::f64::consts::PI {
        r -= two_pi;
    } else if r <= -std::f64::consts::PI {
        r += two_pi;
    }
    r
}
