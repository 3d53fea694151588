//! Dual 3-vectors, 3×3 dual matrices, and axis-angle rotation.
//!
//! Every entry is a `Dual2`, so a rotation whose angle — or axis — depends on
//! the sweep variable transports first and second derivatives through the
//! full geometric chain.

use crate::dual::Dual2;
use crate::error::{Error, Result};

/// Levi-Civita permutation symbol ε(i,j,k) for indices in {0, 1, 2}.
pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    debug_assert!(i < 3 && j < 3 && k < 3);
    let (i, j, k) = (i as i32, j as i32, k as i32);
    ((j - i) * (k - i) * (k - j)) as f64 / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DVec3(pub [Dual2; 3]);

impl DVec3 {
    pub fn new(x: Dual2, y: Dual2, z: Dual2) -> Self {
        DVec3([x, y, z])
    }

    /// Vector with no dependence on the sweep variable.
    pub fn constant(v: [f64; 3]) -> Self {
        DVec3([Dual2::constant(v[0]), Dual2::constant(v[1]), Dual2::constant(v[2])])
    }

    pub fn values(&self) -> [f64; 3] {
        [self.0[0].val, self.0[1].val, self.0[2].val]
    }

    pub fn d1s(&self) -> [f64; 3] {
        [self.0[0].d1, self.0[1].d1, self.0[2].d1]
    }

    pub fn d2s(&self) -> [f64; 3] {
        [self.0[0].d2, self.0[1].d2, self.0[2].d2]
    }

    pub fn dot(&self, other: &DVec3) -> Dual2 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    /// Cross product as the ε-tensor contraction cᵢ = Σⱼₖ ε(i,j,k)·aⱼ·bₖ.
    #[allow(clippy::needless_range_loop)]
    pub fn cross(&self, other: &DVec3) -> DVec3 {
        let mut out = [Dual2::ZERO; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let e = levi_civita(i, j, k);
                    if e != 0.0 {
                        out[i] = out[i] + self.0[j] * other.0[k] * e;
                    }
                }
            }
        }
        DVec3(out)
    }

    /// √(v·v) with full derivative transport.
    pub fn norm(&self) -> Result<Dual2> {
        self.dot(self).sqrt()
    }

    /// Unit vector in the same dual direction; the value-part norm must
    /// exceed 1e-12.
    pub fn normalize(&self) -> Result<DVec3> {
        let n2 = self.dot(self);
        let norm = n2.val.sqrt();
        if norm <= 1e-12 {
            return Err(Error::DegenerateVector { norm });
        }
        let n = n2.sqrt()?;
        Ok(DVec3([self.0[0].div(n)?, self.0[1].div(n)?, self.0[2].div(n)?]))
    }
}

impl std::ops::Index<usize> for DVec3 {
    type Output = Dual2;
    fn index(&self, i: usize) -> &Dual2 {
        &self.0[i]
    }
}

impl std::ops::Add for DVec3 {
    type Output = DVec3;
    fn add(self, rhs: DVec3) -> DVec3 {
        DVec3([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1], self.0[2] + rhs.0[2]])
    }
}

impl std::ops::Sub for DVec3 {
    type Output = DVec3;
    fn sub(self, rhs: DVec3) -> DVec3 {
        DVec3([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1], self.0[2] - rhs.0[2]])
    }
}

impl std::ops::Neg for DVec3 {
    type Output = DVec3;
    fn neg(self) -> DVec3 {
        DVec3([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl std::ops::Mul<Dual2> for DVec3 {
    type Output = DVec3;
    fn mul(self, s: Dual2) -> DVec3 {
        DVec3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

impl std::ops::Mul<f64> for DVec3 {
    type Output = DVec3;
    fn mul(self, s: f64) -> DVec3 {
        DVec3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

/// Row-major 3×3 matrix of dual entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DMat3 {
    pub rows: [DVec3; 3],
}

impl DMat3 {
    pub fn identity() -> Self {
        let mut rows = [DVec3::constant([0.0; 3]); 3];
        for (i, row) in rows.iter_mut().enumerate() {
            row.0[i] = Dual2::ONE;
        }
        DMat3 { rows }
    }

    pub fn transpose(&self) -> DMat3 {
        let mut rows = [DVec3::constant([0.0; 3]); 3];
        for (i, row) in rows.iter_mut().enumerate() {
            for j in 0..3 {
                row.0[j] = self.rows[j].0[i];
            }
        }
        DMat3 { rows }
    }

    pub fn mul_vec(&self, v: &DVec3) -> DVec3 {
        DVec3([
            self.rows[0].dot(v),
            self.rows[1].dot(v),
            self.rows[2].dot(v),
        ])
    }

    pub fn mul_mat(&self, other: &DMat3) -> DMat3 {
        let t = other.transpose();
        let mut rows = [DVec3::constant([0.0; 3]); 3];
        for (i, row) in rows.iter_mut().enumerate() {
            for j in 0..3 {
                row.0[j] = self.rows[i].dot(&t.rows[j]);
            }
        }
        DMat3 { rows }
    }

    /// Determinant as the scalar triple product of the rows.
    pub fn det(&self) -> Dual2 {
        self.rows[0].dot(&self.rows[1].cross(&self.rows[2]))
    }
}

fn check_unit_axis(axis: &DVec3) -> Result<()> {
    let norm = norm3(axis.values());
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NonUnitAxis { norm });
    }
    Ok(())
}

/// Axis-angle rotation applied to a vector:
/// R·v = v·cosϑ + (k×v)·sinϑ + k·(k·v)·(1−cosϑ).
///
/// Angle, axis, and vector may all carry derivatives; the axis value part
/// must be unit within 1e-9.
pub fn rotate(angle: Dual2, axis: &DVec3, v: &DVec3) -> Result<DVec3> {
    check_unit_axis(axis)?;
    Ok(rotate_unchecked(angle, axis, v))
}

/// `rotate` without the unit-axis check, for call sites that normalize or
/// validate the axis themselves.
pub(crate) fn rotate_unchecked(angle: Dual2, axis: &DVec3, v: &DVec3) -> DVec3 {
    let c = angle.cos();
    let s = angle.sin();
    let one_minus_c = Dual2::ONE - c;
    *v * c + axis.cross(v) * s + *axis * (axis.dot(v) * one_minus_c)
}

/// Rotation matrix R(ϑ, k) with dual entries:
/// Rᵢⱼ = cosϑ·δᵢⱼ + sinϑ·Σₘ ε(i,m,j)·kₘ + (1−cosϑ)·kᵢ·kⱼ.
pub fn rotation(angle: Dual2, axis: &DVec3) -> Result<DMat3> {
    check_unit_axis(axis)?;
    let c = angle.cos();
    let s = angle.sin();
    let one_minus_c = Dual2::ONE - c;
    let mut rows = [DVec3::constant([0.0; 3]); 3];
    for (i, row) in rows.iter_mut().enumerate() {
        for j in 0..3 {
            let mut entry = one_minus_c * axis.0[i] * axis.0[j];
            if i == j {
                entry = entry + c;
            }
            for m in 0..3 {
                let e = levi_civita(i, m, j);
                if e != 0.0 {
                    entry = entry + s * axis.0[m] * e;
                }
            }
            row.0[j] = entry;
        }
    }
    Ok(DMat3 { rows })
}

// ---- plain real 3-vector helpers (assembly-time geometry) ----

pub fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

pub fn normalize3(a: [f64; 3]) -> Result<[f64; 3]> {
    let n = norm3(a);
    if n <= 1e-12 {
        return Err(Error::DegenerateVector { norm: n });
    }
    Ok([a[0] / n, a[1] / n, a[2] / n])
}

pub(crate) fn add3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub(crate) fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn scale3(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}
