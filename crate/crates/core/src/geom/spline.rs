//! Interpolating cubic splines through point lists, used to turn polylines
//! and raw samples into something that can be resampled by arclength.

use super::curve::ParametricCurve;
use crate::{Error, Result};

/// Solve a tridiagonal system in place (Thomas algorithm).
/// `a` is the sub-diagonal (a[0] unused), `b` the diagonal, `c` the
/// super-diagonal (c[n-1] unused).
fn thomas(a: &[f64], b: &[f64], c: &[f64], d: &mut [f64]) {
    let n = d.len();
    let mut cp = vec![0.0; n];
    let mut bp = b[0];
    cp[0] = c[0] / bp;
    d[0] /= bp;
    for i in 1..n {
        bp = b[i] - a[i] * cp[i - 1];
        cp[i] = c[i] / bp;
        d[i] = (d[i] - a[i] * d[i - 1]) / bp;
    }
    for i in (0..n - 1).rev() {
        d[i] -= cp[i] * d[i + 1];
    }
}

/// Cyclic tridiagonal solve via Sherman-Morrison. `alpha` couples the last
/// row to the first column, `beta` the first row to the last column.
fn cyclic(a: &[f64], b: &[f64], c: &[f64], alpha: f64, beta: f64, d: &mut [f64]) {
    let n = d.len();
    let gamma = -b[0];
    let mut bb = b.to_vec();
    bb[0] -= gamma;
    bb[n - 1] -= alpha * beta / gamma;
    thomas(a, &bb, c, d);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = alpha;
    thomas(a, &bb, c, &mut u);
    let fact = (d[0] + beta * d[n - 1] / gamma) / (1.0 + u[0] + beta * u[n - 1] / gamma);
    for i in 0..n {
        d[i] -= fact * u[i];
    }
}

/// Cubic spline in chord-length parameter through `dim`-dimensional knots.
#[derive(Clone, Debug)]
pub struct ChordSpline {
    dim: usize,
    knots: Vec<f64>,
    values: Vec<Vec<f64>>,
    second: Vec<Vec<f64>>,
    closed: bool,
}

impl ChordSpline {
    /// Natural spline for open data, periodic spline for closed data. For
    /// closed data the first point must not be repeated at the end.
    pub fn new(points: &[Vec<f64>], closed: bool) -> Result<Self> {
        if points.len() < 4 {
            return Err(Error::InvalidSpec(format!(
                "need at least 4 points, got {}",
                points.len()
            )));
        }
        let dim = points[0].len();
        if dim < 2 || points.iter().any(|p| p.len() != dim) {
            return Err(Error::InvalidSpec("points must share a dimension >= 2".into()));
        }
        let mut pts: Vec<Vec<f64>> = points.to_vec();
        if closed {
            pts.push(points[0].clone());
        }
        let m = pts.len();
        let mut knots = vec![0.0; m];
        for i in 1..m {
            let d: f64 = pts[i]
                .iter()
                .zip(&pts[i - 1])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if d == 0.0 {
                return Err(Error::InvalidSpec(format!("repeated point at index {i}")));
            }
            knots[i] = knots[i - 1] + d;
        }
        let h: Vec<f64> = (0..m - 1).map(|i| knots[i + 1] - knots[i]).collect();
        let mut values = vec![vec![0.0; m]; dim];
        for (i, p) in pts.iter().enumerate() {
            for d in 0..dim {
                values[d][i] = p[d];
            }
        }
        let mut second = vec![vec![0.0; m]; dim];
        for d in 0..dim {
            let y = &values[d];
            if closed {
                // unknowns M_0..M_{m-2}, M_{m-1} = M_0
                let n = m - 1;
                let mut a = vec![0.0; n];
                let mut b = vec![0.0; n];
                let mut c = vec![0.0; n];
                let mut rhs = vec![0.0; n];
                for i in 0..n {
                    let hp = h[(i + n - 1) % n];
                    let hn = h[i];
                    let yp = if i == 0 { y[n - 1] } else { y[i - 1] };
                    a[i] = hp;
                    b[i] = 2.0 * (hp + hn);
                    c[i] = hn;
                    rhs[i] = 6.0 * ((y[i + 1] - y[i]) / hn - (y[i] - yp) / hp);
                }
                let alpha = a[0];
                let beta = c[n - 1];
                cyclic(&a, &b, &c, beta, alpha, &mut rhs);
                second[d][..n].copy_from_slice(&rhs);
                second[d][n] = rhs[0];
            } else {
                let n = m - 2;
                let mut a = vec![0.0; n];
                let mut b = vec![0.0; n];
                let mut c = vec![0.0; n];
                let mut rhs = vec![0.0; n];
                for k in 0..n {
                    let i = k + 1;
                    a[k] = h[i - 1];
                    b[k] = 2.0 * (h[i - 1] + h[i]);
                    c[k] = h[i];
                    rhs[k] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
                }
                thomas(&a, &b, &c, &mut rhs);
                second[d][1..m - 1].copy_from_slice(&rhs);
            }
        }
        Ok(ChordSpline {
            dim,
            knots,
            values,
            second,
            closed,
        })
    }

    fn segment(&self, t: f64) -> usize {
        let m = self.knots.len();
        match self.knots.binary_search_by(|k| k.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(m - 2),
            Err(i) => i.clamp(1, m - 1) - 1,
        }
    }
}

impl ParametricCurve for ChordSpline {
    fn dim(&self) -> usize {
        self.dim
    }

    fn domain(&self) -> (f64, f64) {
        (0.0, *self.knots.last().unwrap())
    }

    fn closed(&self) -> bool {
        self.closed
    }

    fn eval(&self, t: f64, pos: &mut [f64], d1: &mut [f64], d2: &mut [f64]) {
        let i = self.segment(t);
        let (t0, t1) = (self.knots[i], self.knots[i + 1]);
        let h = t1 - t0;
        let a = (t1 - t) / h;
        let b = (t - t0) / h;
        for d in 0..self.dim {
            let (y0, y1) = (self.values[d][i], self.values[d][i + 1]);
            let (m0, m1) = (self.second[d][i], self.second[d][i + 1]);
            pos[d] = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
            d1[d] = (y1 - y0) / h - (3.0 * a * a - 1.0) * h * m0 / 6.0 + (3.0 * b * b - 1.0) * h * m1 / 6.0;
            d2[d] = a * m0 + b * m1;
        }
    }
}
