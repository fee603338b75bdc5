//! Fixed-size dense complex matrices for the single-replica (2×2) and
//! replica-doubled (4×4) spin spaces.
//!
//! Basis order is `(↑, ↓)` for 2×2 and `(↑↑, ↑↓, ↓↑, ↓↓)` for 4×4, with the
//! pair index `2·s1 + s2`.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{Error, Result};

pub type Complex = num_complex::Complex64;

/// Shorthand for `Complex::new(re, im)`.
#[inline]
pub const fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

const ZERO: Complex = c(0.0, 0.0);
const ONE: Complex = c(1.0, 0.0);

/// Square complex matrix of compile-time dimension `D`, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat<const D: usize>(pub [[Complex; D]; D]);

pub type ComplexMat2 = Mat<2>;
pub type ComplexMat4 = Mat<4>;

impl<const D: usize> Default for Mat<D> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const D: usize> Mat<D> {
    pub const fn zeros() -> Self {
        Mat([[ZERO; D]; D])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..D {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn diag(entries: [Complex; D]) -> Self {
        let mut m = Self::zeros();
        for (i, e) in entries.into_iter().enumerate() {
            m.0[i][i] = e;
        }
        m
    }

    pub const fn from_rows(rows: [[Complex; D]; D]) -> Self {
        Mat(rows)
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros();
        for i in 0..D {
            for j in 0..D {
                out.0[j][i] = self.0[i][j].conj();
            }
        }
        out
    }

    /// Elementwise complex conjugate.
    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros();
        for i in 0..D {
            for j in 0..D {
                out.0[j][i] = self.0[i][j];
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(Complex) -> Complex) -> Self {
        let mut out = *self;
        for row in out.0.iter_mut() {
            for z in row.iter_mut() {
                *z = f(*z);
            }
        }
        out
    }

    pub fn scale(&self, s: Complex) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> Complex {
        (0..D).map(|i| self.0[i][i]).sum()
    }

    /// Maximum absolute row sum (the induced ∞-norm).
    pub fn norm_inf(&self) -> f64 {
        self.0.iter().map(|row| row.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..D {
            for j in 0..D {
                worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `self · v` for a column vector.
    pub fn mul_vec(&self, v: &[Complex; D]) -> [Complex; D] {
        let mut out = [ZERO; D];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..D).map(|j| self.0[i][j] * v[j]).sum();
        }
        out
    }

    /// `vᵀ · self` for a row vector.
    pub fn vec_mul(v: &[Complex; D], m: &Self) -> [Complex; D] {
        let mut out = [ZERO; D];
        for (j, o) in out.iter_mut().enumerate() {
            *o = (0..D).map(|i| v[i] * m.0[i][j]).sum();
        }
        out
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, mut n: u64) -> Self {
        let mut base = *self;
        let mut acc = Self::identity();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            n >>= 1;
        }
        acc
    }

    /// Determinant via partially pivoted LU.
    pub fn det(&self) -> Complex {
        match Lu::factor(self) {
            Some(lu) => lu.det(),
            None => ZERO,
        }
    }

    /// Solves `self · X = rhs`. Returns `None` for a numerically singular matrix.
    pub fn solve(&self, rhs: &Self) -> Option<Self> {
        Lu::factor(self).map(|lu| lu.solve(rhs))
    }
}

impl<const D: usize> Index<(usize, usize)> for Mat<D> {
    type Output = Complex;
    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        &self.0[i][j]
    }
}

impl<const D: usize> IndexMut<(usize, usize)> for Mat<D> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        &mut self.0[i][j]
    }
}

impl<const D: usize> Mul for Mat<D> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        mat_mul(&self, &rhs)
    }
}

impl<const D: usize> Add for Mat<D> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..D {
            for j in 0..D {
                self.0[i][j] += rhs.0[i][j];
            }
        }
        self
    }
}

impl<const D: usize> Sub for Mat<D> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..D {
            for j in 0..D {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
        self
    }
}

impl<const D: usize> Neg for Mat<D> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|z| -z)
    }
}

impl<const D: usize> Mul<Mat<D>> for Complex {
    type Output = Mat<D>;
    fn mul(self, rhs: Mat<D>) -> Mat<D> {
        rhs.scale(self)
    }
}

impl<const D: usize> Mul<Mat<D>> for f64 {
    type Output = Mat<D>;
    fn mul(self, rhs: Mat<D>) -> Mat<D> {
        rhs.scale(c(self, 0.0))
    }
}

pub fn mat_mul<const D: usize>(a: &Mat<D>, b: &Mat<D>) -> Mat<D> {
    let mut out = Mat::<D>::zeros();
    for i in 0..D {
        for k in 0..D {
            let aik = a.0[i][k];
            for j in 0..D {
                out.0[i][j] += aik * b.0[k][j];
            }
        }
    }
    out
}

/// Replica-doubled product: `(a ⊗ b)[(s1', s2'), (s1, s2)] = a[s1'][s1] · b[s2'][s2]`.
pub fn tensor2(a: &ComplexMat2, b: &ComplexMat2) -> ComplexMat4 {
    let mut out = ComplexMat4::zeros();
    for s1p in 0..2 {
        for s2p in 0..2 {
            for s1 in 0..2 {
                for s2 in 0..2 {
                    out.0[2 * s1p + s2p][2 * s1 + s2] = a.0[s1p][s1] * b.0[s2p][s2];
                }
            }
        }
    }
    out
}

struct Lu<const D: usize> {
    lu: Mat<D>,
    perm: [usize; D],
    sign: f64,
}

impl<const D: usize> Lu<D> {
    fn factor(m: &Mat<D>) -> Option<Self> {
        let mut lu = *m;
        let mut perm = [0usize; D];
        for (i, p) in perm.iter_mut().enumerate() {
            *p = i;
        }
        let mut sign = 1.0;
        let scale = m.norm_inf().max(f64::MIN_POSITIVE);
        for k in 0..D {
            let pivot_row = (k..D).max_by(|&x, &y| lu.0[x][k].norm().total_cmp(&lu.0[y][k].norm())).unwrap_or(k);
            if lu.0[pivot_row][k].norm() <= scale * 1e-300 {
                return None;
            }
            if pivot_row != k {
                lu.0.swap(pivot_row, k);
                perm.swap(pivot_row, k);
                sign = -sign;
            }
            let pivot = lu.0[k][k];
            for i in k + 1..D {
                let factor = lu.0[i][k] / pivot;
                lu.0[i][k] = factor;
                for j in k + 1..D {
                    let t = lu.0[k][j];
                    lu.0[i][j] -= factor * t;
                }
            }
        }
        Some(Lu { lu, perm, sign })
    }

    fn det(&self) -> Complex {
        (0..D).fold(c(self.sign, 0.0), |acc, i| acc * self.lu.0[i][i])
    }

    fn solve(&self, rhs: &Mat<D>) -> Mat<D> {
        let mut x = Mat::<D>::zeros();
        for col in 0..D {
            let mut y = [ZERO; D];
            for i in 0..D {
                let mut s = rhs.0[self.perm[i]][col];
                for (j, yj) in y.iter().enumerate().take(i) {
                    s -= self.lu.0[i][j] * yj;
                }
                y[i] = s;
            }
            for i in (0..D).rev() {
                let mut s = y[i];
                for j in i + 1..D {
                    s -= self.lu.0[i][j] * x.0[j][col];
                }
                x.0[i][col] = s / self.lu.0[i][i];
            }
        }
        x
    }
}

/// Inputs with `norm_inf` above this are rejected by [`mat_exp`].
pub const MAX_EXP_NORM: f64 = 1.0e6;

// Backward-error thresholds for the [m/m] Padé approximants, m = 3, 5, 7, 9, 13
// (Higham 2005).
const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.53939833006323e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const PADE_3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE_5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE_7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const PADE_9: [f64; 10] =
    [17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0, 2162160.0, 110880.0, 3960.0, 90.0, 1.0];
const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Matrix exponential by scaling and squaring with a diagonal Padé approximant.
///
/// The approximant degree is picked from the ∞-norm; above `THETA_13` the
/// matrix is scaled by `2^-s` and the degree-13 result squared `s` times.
/// Correct for non-normal and defective input.
pub fn mat_exp<const D: usize>(m: &Mat<D>) -> Result<Mat<D>> {
    if !m.is_finite() {
        return Err(Error::NonFinite("mat_exp input"));
    }
    let norm = m.norm_inf();
    if norm > MAX_EXP_NORM {
        return Err(Error::Overflow { norm, limit: MAX_EXP_NORM });
    }

    let ident = Mat::<D>::identity();
    let a2 = *m * *m;

    let (u, v, squarings) = if norm <= THETA_3 {
        let (u, v) = pade_low(m, &a2, &PADE_3);
        (u, v, 0)
    } else if norm <= THETA_5 {
        let (u, v) = pade_low(m, &a2, &PADE_5);
        (u, v, 0)
    } else if norm <= THETA_7 {
        let (u, v) = pade_low(m, &a2, &PADE_7);
        (u, v, 0)
    } else if norm <= THETA_9 {
        let (u, v) = pade_low(m, &a2, &PADE_9);
        (u, v, 0)
    } else {
        let s = (norm / THETA_13).log2().ceil().max(0.0) as i32;
        let scaled = m.scale(c(0.5f64.powi(s), 0.0));
        let (u, v) = pade_13(&scaled, &ident);
        (u, v, s)
    };

    let p = v + u;
    let q = v - u;
    let mut result = q.solve(&p).ok_or(Error::Overflow { norm, limit: MAX_EXP_NORM })?;
    for _ in 0..squarings {
        result = result * result;
    }
    if !result.is_finite() {
        return Err(Error::Overflow { norm, limit: MAX_EXP_NORM });
    }
    Ok(result)
}

/// Odd part `u` and even part `v` of the numerator for degrees 3..=9.
fn pade_low<const D: usize>(a: &Mat<D>, a2: &Mat<D>, b: &[f64]) -> (Mat<D>, Mat<D>) {
    let ident = Mat::<D>::identity();
    let mut power = ident;
    let mut odd = Mat::<D>::zeros();
    let mut even = Mat::<D>::zeros();
    for k in (0..b.len()).step_by(2) {
        even = even + b[k] * power;
        odd = odd + b[k + 1] * power;
        power = power * *a2;
    }
    (*a * odd, even)
}

fn pade_13<const D: usize>(a: &Mat<D>, ident: &Mat<D>) -> (Mat<D>, Mat<D>) {
    let b = &PADE_13;
    let a2 = *a * *a;
    let a4 = a2 * a2;
    let a6 = a4 * a2;
    let inner_u = b[13] * a6 + b[11] * a4 + b[9] * a2;
    let u = *a * (a6 * inner_u + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * *ident);
    let inner_v = b[12] * a6 + b[10] * a4 + b[8] * a2;
    let v = a6 * inner_v + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * *ident;
    (u, v)
}
