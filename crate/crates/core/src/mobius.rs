//! Möbius maps of the direction circle and Lorentz matrices.
//!
//! A bike direction `α` is stored projectively as the pair
//! `(p, q) = (sin α/2, cos α/2)`, so `u = p/q = tan(α/2)`. A unimodular real
//! 2×2 matrix acts on pairs linearly, hence on `α` by a Möbius map.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::{Error, Result};

/// Default tolerance on `|trace| − 2` for the parabolic class.
pub const EPS_PAR: f64 = 1e-6;
/// Tolerance on `MᵀQM = Q`.
pub const TAU_LORENTZ: f64 = 1e-7;

/// Chart conventions for directions on the circle.
pub struct DirectionChart;

impl DirectionChart {
    pub fn pair(alpha: f64) -> [f64; 2] {
        let (s, c) = (0.5 * alpha).sin_cos();
        [s, c]
    }

    /// Angle in `(−π, π]`.
    pub fn alpha(pair: [f64; 2]) -> f64 {
        let a = 2.0 * pair[0].atan2(pair[1]);
        crate::geom::quadrature::wrap_angle(a)
    }

    /// `u = tan(α/2)`; infinite for the pair `(1, 0)`.
    pub fn u(pair: [f64; 2]) -> f64 {
        if pair[1] == 0.0 {
            f64::INFINITY
        } else {
            pair[0] / pair[1]
        }
    }

    pub fn from_u(u: f64) -> [f64; 2] {
        if u.is_infinite() {
            [1.0, 0.0]
        } else {
            normalize([u, 1.0]).unwrap()
        }
    }
}

fn normalize(v: [f64; 2]) -> Result<[f64; 2]> {
    let n = v[0].hypot(v[1]);
    if n == 0.0 || !n.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok([v[0] / n, v[1] / n])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MobiusKind {
    Elliptic,
    Parabolic,
    Hyperbolic,
    Identity,
}

impl std::fmt::Display for MobiusKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            MobiusKind::Elliptic => "elliptic",
            MobiusKind::Parabolic => "parabolic",
            MobiusKind::Hyperbolic => "hyperbolic",
            MobiusKind::Identity => "identity",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MobiusType {
    pub kind: MobiusKind,
    pub abs_trace: f64,
    /// `|trace| − 2`.
    pub margin: f64,
}

/// A fixed direction with the derivative of the circle map there.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FixedPoint {
    pub pair: [f64; 2],
    pub multiplier: f64,
}

impl FixedPoint {
    pub fn alpha(&self) -> f64 {
        DirectionChart::alpha(self.pair)
    }
}

/// Real 2×2 matrix with unit determinant, defined up to sign.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MobiusMap {
    pub m: [[f64; 2]; 2],
}

impl MobiusMap {
    /// Rescales to unit determinant; errors if the determinant is not positive.
    pub fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Result<Self> {
        let det = m11 * m22 - m12 * m21;
        if !(det > 0.0) || !det.is_finite() {
            return Err(Error::Numerical(format!("matrix determinant {det:.3e} is not positive")));
        }
        let s = det.sqrt();
        Ok(MobiusMap {
            m: [[m11 / s, m12 / s], [m21 / s, m22 / s]],
        })
    }

    /// Take an integrated product that is unimodular up to rounding. The
    /// determinant is only recomputed when that is well conditioned; for
    /// strongly hyperbolic products it is lost to cancellation.
    pub fn from_unimodular(m: [[f64; 2]; 2]) -> Result<Self> {
        if m.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite matrix entry".into()));
        }
        let scale = (m[0][0] * m[1][1]).abs() + (m[0][1] * m[1][0]).abs();
        if scale < 1e6 {
            MobiusMap::new(m[0][0], m[0][1], m[1][0], m[1][1])
        } else {
            Ok(MobiusMap { m })
        }
    }

    pub fn identity() -> Self {
        MobiusMap {
            m: [[1.0, 0.0], [0.0, 1.0]],
        }
    }

    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        MobiusMap { m: [[c, -s], [s, c]] }
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn renormalized(&self) -> Self {
        let s = self.det().sqrt();
        MobiusMap {
            m: [
                [self.m[0][0] / s, self.m[0][1] / s],
                [self.m[1][0] / s, self.m[1][1] / s],
            ],
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        let (a, b) = (&self.m, &other.m);
        let mut m = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        MobiusMap { m }.renormalized()
    }

    pub fn inverse(&self) -> MobiusMap {
        let m = &self.m;
        MobiusMap {
            m: [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]],
        }
        .renormalized()
    }

    /// Representative with nonnegative trace, for comparing maps up to sign.
    pub fn sign_normalized(&self) -> MobiusMap {
        if self.trace() < 0.0 {
            MobiusMap {
                m: self.m.map(|r| r.map(|v| -v)),
            }
        } else {
            *self
        }
    }

    pub fn max_abs_diff(&self, other: &MobiusMap) -> f64 {
        let (a, b) = (self.sign_normalized(), other.sign_normalized());
        (0..4)
            .map(|k| (a.m[k / 2][k % 2] - b.m[k / 2][k % 2]).abs())
            .fold(0.0, f64::max)
    }

    fn mul_vec(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// Action on a projective pair, renormalized to unit length.
    pub fn apply(&self, dir: [f64; 2]) -> Result<[f64; 2]> {
        normalize(dir)?;
        normalize(self.mul_vec(dir))
    }

    /// Action on the direction angle.
    pub fn apply_alpha(&self, alpha: f64) -> f64 {
        DirectionChart::alpha(self.mul_vec(DirectionChart::pair(alpha)))
    }

    /// Derivative of the induced circle map at `dir`, `1/|Mv|²` for unit `v`.
    pub fn derivative(&self, dir: [f64; 2]) -> Result<f64> {
        let v = normalize(dir)?;
        let w = self.mul_vec(v);
        Ok(1.0 / (w[0] * w[0] + w[1] * w[1]))
    }

    /// Derivative at a fixed direction. Repelling points use `|M⁻¹v|²`,
    /// equal there to `1/|Mv|²` but without the `λ²` amplification of
    /// errors in `v`.
    pub fn fixed_multiplier(&self, dir: [f64; 2]) -> Result<f64> {
        let d = self.derivative(dir)?;
        if d <= 1.0 {
            return Ok(d);
        }
        let v = normalize(dir)?;
        let w = self.inverse().mul_vec(v);
        Ok(w[0] * w[0] + w[1] * w[1])
    }

    pub fn classify(&self) -> MobiusType {
        self.classify_with(EPS_PAR)
    }

    pub fn classify_with(&self, eps: f64) -> MobiusType {
        let abs_trace = self.trace().abs();
        let margin = abs_trace - 2.0;
        let s = self.sign_normalized();
        let id_defect = (s.m[0][0] - 1.0)
            .abs()
            .max((s.m[1][1] - 1.0).abs())
            .max(s.m[0][1].abs())
            .max(s.m[1][0].abs());
        let kind = if id_defect <= eps {
            MobiusKind::Identity
        } else if margin > eps {
            MobiusKind::Hyperbolic
        } else if margin < -eps {
            MobiusKind::Elliptic
        } else {
            MobiusKind::Parabolic
        };
        MobiusType {
            kind,
            abs_trace,
            margin,
        }
    }

    /// Fixed directions: two for hyperbolic, one for parabolic, none for
    /// elliptic maps. Hyperbolic points come attracting first.
    pub fn fixed_points(&self) -> Result<Vec<FixedPoint>> {
        let ty = self.classify();
        let tr = self.trace();
        let lambdas: Vec<f64> = match ty.kind {
            MobiusKind::Identity => return Err(Error::IdentityMonodromy),
            MobiusKind::Elliptic => return Ok(Vec::new()),
            MobiusKind::Parabolic => vec![0.5 * tr],
            MobiusKind::Hyperbolic => {
                let disc = (tr * tr - 4.0).sqrt();
                // stable root formulas avoid cancellation for large traces
                let big = 0.5 * (tr + tr.signum() * disc);
                vec![big, 1.0 / big]
            }
        };
        lambdas
            .into_iter()
            .map(|l| {
                let pair = self.eigenvector(l)?;
                Ok(FixedPoint {
                    pair,
                    multiplier: 1.0 / (l * l),
                })
            })
            .collect()
    }

    fn eigenvector(&self, lambda: f64) -> Result<[f64; 2]> {
        let r0 = [self.m[0][0] - lambda, self.m[0][1]];
        let r1 = [self.m[1][0], self.m[1][1] - lambda];
        let row = if r0[0].hypot(r0[1]) >= r1[0].hypot(r1[1]) { r0 } else { r1 };
        if row[0] == 0.0 && row[1] == 0.0 {
            return Err(Error::IdentityMonodromy);
        }
        let v = normalize([row[1], -row[0]])?;
        // canonical sign: q >= 0, or p > 0 at q = 0
        if v[1] < 0.0 || (v[1] == 0.0 && v[0] < 0.0) {
            Ok([-v[0], -v[1]])
        } else {
            Ok(v)
        }
    }

    /// The unique Möbius map sending three distinct directions to three others.
    pub fn fit(from: [[f64; 2]; 3], to: [[f64; 2]; 3]) -> Result<MobiusMap> {
        fn frame(v: [[f64; 2]; 3]) -> Result<[[f64; 2]; 2]> {
            // v3 = a v1 + b v2
            let det = v[0][0] * v[1][1] - v[1][0] * v[0][1];
            if det.abs() < 1e-14 {
                return Err(Error::InvalidArgument("directions are not distinct".into()));
            }
            let a = (v[2][0] * v[1][1] - v[1][0] * v[2][1]) / det;
            let b = (v[0][0] * v[2][1] - v[2][0] * v[0][1]) / det;
            // columns a v1, b v2
            Ok([[a * v[0][0], b * v[1][0]], [a * v[0][1], b * v[1][1]]])
        }
        let a = frame(from)?;
        let b = frame(to)?;
        let det_a = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        let ainv = [
            [a[1][1] / det_a, -a[0][1] / det_a],
            [-a[1][0] / det_a, a[0][0] / det_a],
        ];
        let mut m = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = b[i][0] * ainv[0][j] + b[i][1] * ainv[1][j];
            }
        }
        MobiusMap::new(m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

/// The quadratic form `Q = diag(1, …, 1, −1)` of signature `(n, 1)`.
pub fn lorentz_form(n: usize) -> DMatrix<f64> {
    let mut q = DMatrix::identity(n + 1, n + 1);
    q[(n, n)] = -1.0;
    q
}

/// An `(n+1)×(n+1)` matrix preserving `Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct LorentzMatrix {
    pub m: DMatrix<f64>,
}

impl LorentzMatrix {
    pub fn identity(n: usize) -> Self {
        LorentzMatrix {
            m: DMatrix::identity(n + 1, n + 1),
        }
    }

    pub fn n(&self) -> usize {
        self.m.nrows() - 1
    }

    /// Largest entry of `MᵀQM − Q`.
    pub fn q_defect(&self) -> f64 {
        let q = lorentz_form(self.n());
        (self.m.transpose() * &q * &self.m - q).amax()
    }

    /// One first-order correction toward `MᵀQM = Q`. Skipped when the defect
    /// is not small: for strong boosts the defect is rounding in `MᵀQM`
    /// itself (entries ~ |M|²ε) and the linearized step would diverge.
    pub fn reorthonormalize(&mut self) {
        let n = self.n();
        let q = lorentz_form(n);
        let e = self.m.transpose() * &q * &self.m - &q;
        if !(e.amax() < 0.1) {
            return;
        }
        let corr = DMatrix::identity(n + 1, n + 1) - (&q * e) * 0.5;
        self.m = &self.m * corr;
    }

    pub fn compose(&self, other: &LorentzMatrix) -> LorentzMatrix {
        LorentzMatrix {
            m: &self.m * &other.m,
        }
    }
}

/// Infinitesimal boost along `v`: zero spatial block, `v` in the last row
/// and column.
pub fn lorentz_generator(v: &[f64]) -> DMatrix<f64> {
    let n = v.len();
    let mut c = DMatrix::zeros(n + 1, n + 1);
    for (i, &vi) in v.iter().enumerate() {
        c[(i, n)] = vi;
        c[(n, i)] = vi;
    }
    c
}

/// Action on the unit sphere through the null cone at height 1.
pub fn sphere_action(m: &LorentzMatrix, r: &[f64]) -> Result<Vec<f64>> {
    let n = m.n();
    if r.len() != n {
        return Err(Error::InvalidArgument(format!(
            "direction has dimension {}, expected {n}",
            r.len()
        )));
    }
    let mut x = nalgebra::DVector::from_element(n + 1, 1.0);
    for (i, &ri) in r.iter().enumerate() {
        x[i] = ri;
    }
    let y = &m.m * x;
    let h = y[n];
    if !(h > 0.0) {
        return Err(Error::ChartBreakdown(h));
    }
    Ok((0..n).map(|i| y[i] / h).collect())
}

/// Matrix exponential by scaling and squaring with a degree-6 Padé
/// approximant.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    const C: [f64; 7] = [
        1.0,
        0.5,
        5.0 / 44.0,
        1.0 / 66.0,
        1.0 / 792.0,
        1.0 / 15840.0,
        1.0 / 665280.0,
    ];
    let dim = a.nrows();
    let norm = a.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let x = a / 2f64.powi(s);
    let id = DMatrix::<f64>::identity(dim, dim);
    let mut num = id.clone() * C[0];
    let mut den = id.clone() * C[0];
    let mut pow = id.clone();
    for (k, c) in C.iter().enumerate().skip(1) {
        pow = &pow * &x;
        num += &pow * *c;
        den += &pow * (if k % 2 == 0 { *c } else { -*c });
    }
    let mut r = den.lu().solve(&num).expect("Padé denominator is nonsingular for small norm");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}
