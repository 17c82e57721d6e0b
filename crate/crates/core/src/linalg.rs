// SPDX-License-Identifier: Apache-2.0

//! Fixed-size real 3-vectors and 3x3 matrices.

use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Real 3-vector. Bloch vectors, measurement vectors and their derivatives
/// all live here.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Vec3<T> {
    pub const fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn from_array(a: [T; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm_sq(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn scale(self, k: T) -> Self {
        Self::new(self.x * k, self.y * k, self.z * k)
    }

    /// Largest absolute component.
    pub fn max_abs(self) -> T {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn cast<U: Real>(self) -> Vec3<U> {
        Vec3::new(
            U::lit(self.x.to_f64_lossy()),
            U::lit(self.y.to_f64_lossy()),
            U::lit(self.z.to_f64_lossy()),
        )
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> AddAssign for Vec3<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Real> Mul<T> for Vec3<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        self.scale(k)
    }
}

impl<T: Real> Div<T> for Vec3<T> {
    type Output = Self;
    fn div(self, k: T) -> Self {
        Self::new(self.x / k, self.y / k, self.z / k)
    }
}

impl<T: Real> Index<usize> for Vec3<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}

/// Row-major 3x3 real matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat3<T> {
    pub m: [[T; 3]; 3],
}

impl<T: Real> Mat3<T> {
    pub fn identity() -> Self {
        let (o, z) = (T::one(), T::zero());
        Self { m: [[o, z, z], [z, o, z], [z, z, o]] }
    }

    pub fn zero() -> Self {
        Self { m: [[T::zero(); 3]; 3] }
    }

    pub fn from_columns(c: [Vec3<T>; 3]) -> Self {
        let mut m = [[T::zero(); 3]; 3];
        for (j, col) in c.iter().enumerate() {
            for i in 0..3 {
                m[i][j] = col[i];
            }
        }
        Self { m }
    }

    pub fn column(&self, j: usize) -> Vec3<T> {
        Vec3::new(self.m[0][j], self.m[1][j], self.m[2][j])
    }

    pub fn transpose(&self) -> Self {
        let mut m = self.m;
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.m[j][i];
            }
        }
        Self { m }
    }

    pub fn mul_vec(&self, v: Vec3<T>) -> Vec3<T> {
        let r = |i: usize| self.m[i][0] * v.x + self.m[i][1] * v.y + self.m[i][2] * v.z;
        Vec3::new(r(0), r(1), r(2))
    }

    pub fn mul_mat(&self, o: &Self) -> Self {
        let mut m = [[T::zero(); 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).fold(T::zero(), |acc, k| acc + self.m[i][k] * o.m[k][j]);
            }
        }
        Self { m }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut m = self.m;
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = *v - o.m[i][j];
            }
        }
        Self { m }
    }

    pub fn det(&self) -> T {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Inverse by adjugate; `None` when `|det| <= min_abs_det`.
    pub fn inverse(&self, min_abs_det: T) -> Option<Self> {
        let d = self.det();
        if !(d.abs() > min_abs_det) {
            return None;
        }
        let m = &self.m;
        let c = |i0: usize, i1: usize, j0: usize, j1: usize| m[i0][j0] * m[i1][j1] - m[i0][j1] * m[i1][j0];
        let adj = [
            [c(1, 2, 1, 2), -c(0, 2, 1, 2), c(0, 1, 1, 2)],
            [-c(1, 2, 0, 2), c(0, 2, 0, 2), -c(0, 1, 0, 2)],
            [c(1, 2, 0, 1), -c(0, 2, 0, 1), c(0, 1, 0, 1)],
        ];
        let mut out = [[T::zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = adj[i][j] / d;
            }
        }
        Some(Self { m: out })
    }

    pub fn max_abs_diff(&self, o: &Self) -> T {
        let mut best = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                best = best.max((self.m[i][j] - o.m[i][j]).abs());
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let a = Mat3 { m: [[2.0, 1.0, 0.5], [-1.0, 3.0, 0.0], [0.25, 0.0, 1.5]] };
        let inv = a.inverse(1e-12).unwrap();
        assert!(a.mul_mat(&inv).max_abs_diff(&Mat3::identity()) < 1e-14);
    }

    #[test]
    fn singular_has_no_inverse() {
        let a = Mat3::from_columns([Vec3::new(1.0, 0.0, 0.0), Vec3::new(2.0, 0.0, 0.0), Vec3::new(0.0, 0.0, 1.0)]);
        assert!(a.inverse(1e-6).is_none());
    }

    #[test]
    fn columns_and_transpose() {
        let c = [Vec3::new(1.0, 2.0, 3.0), Vec3::new(4.0, 5.0, 6.0), Vec3::new(7.0, 8.0, 9.0)];
        let a = Mat3::from_columns(c);
        assert_eq!(a.column(1), c[1]);
        assert_eq!(a.transpose().m[1], [4.0, 5.0, 6.0]);
        assert_eq!(a.mul_vec(Vec3::new(0.0, 1.0, 0.0)), c[1]);
    }
}
