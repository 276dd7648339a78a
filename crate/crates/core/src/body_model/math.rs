//! Small fixed-size linear algebra, generic over [`Real`] so the same
//! kinematics code runs on plain floats and on the gradient tape.

use crate::autodiff::Real;

#[derive(Clone, Copy)]
pub struct Vec3<R>(pub [R; 3]);

#[derive(Clone, Copy)]
pub struct Mat3<R>(pub [[R; 3]; 3]);

impl<R: Real> Vec3<R> {
    pub fn lift(ctx: R, v: [f64; 3]) -> Self {
        Vec3([ctx.lift(v[0]), ctx.lift(v[1]), ctx.lift(v[2])])
    }

    pub fn x(&self) -> R {
        self.0[0]
    }
    pub fn y(&self) -> R {
        self.0[1]
    }
    pub fn z(&self) -> R {
        self.0[2]
    }

    pub fn add(&self, o: &Self) -> Self {
        Vec3([
            self.0[0] + o.0[0],
            self.0[1] + o.0[1],
            self.0[2] + o.0[2],
        ])
    }

    pub fn sub(&self, o: &Self) -> Self {
        Vec3([
            self.0[0] - o.0[0],
            self.0[1] - o.0[1],
            self.0[2] - o.0[2],
        ])
    }

    pub fn dot(&self, o: &Self) -> R {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    pub fn scale_by(&self, k: R) -> Self {
        Vec3([self.0[0] * k, self.0[1] * k, self.0[2] * k])
    }

    pub fn norm(&self) -> R {
        self.dot(self).sqrt()
    }

    pub fn values(&self) -> [f64; 3] {
        [self.0[0].value(), self.0[1].value(), self.0[2].value()]
    }
}

impl<R: Real> Mat3<R> {
    pub fn identity(ctx: R) -> Self {
        let o = ctx.lift(1.0);
        let z = ctx.lift(0.0);
        Mat3([[o, z, z], [z, o, z], [z, z, o]])
    }

    pub fn lift(ctx: R, m: [[f64; 3]; 3]) -> Self {
        Mat3([
            [ctx.lift(m[0][0]), ctx.lift(m[0][1]), ctx.lift(m[0][2])],
            [ctx.lift(m[1][0]), ctx.lift(m[1][1]), ctx.lift(m[1][2])],
            [ctx.lift(m[2][0]), ctx.lift(m[2][1]), ctx.lift(m[2][2])],
        ])
    }

    pub fn mul(&self, o: &Self) -> Self {
        let a = &self.0;
        let b = &o.0;
        let mut out = *self;
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &Vec3<R>) -> Vec3<R> {
        let a = &self.0;
        Vec3([
            a[0][0] * v.0[0] + a[0][1] * v.0[1] + a[0][2] * v.0[2],
            a[1][0] * v.0[0] + a[1][1] * v.0[1] + a[1][2] * v.0[2],
            a[2][0] * v.0[0] + a[2][1] * v.0[1] + a[2][2] * v.0[2],
        ])
    }

    pub fn values(&self) -> [[f64; 3]; 3] {
        let a = &self.0;
        [
            [a[0][0].value(), a[0][1].value(), a[0][2].value()],
            [a[1][0].value(), a[1][1].value(), a[1][2].value()],
            [a[2][0].value(), a[2][1].value(), a[2][2].value()],
        ]
    }
}

/// Rotation matrix for an axis-angle 3-vector (direction = axis, norm = angle).
///
/// Uses R = cosθ·I + B·ωωᵀ + A·[ω]ₓ with A = sinθ/θ and B = (1−cosθ)/θ²,
/// switching to series expansions of A, B, cosθ in θ² near zero so the map is
/// smooth through the identity and never divides by a vanishing angle.
pub fn rodrigues_generic<R: Real>(aa: &[R; 3]) -> Mat3<R> {
    let (wx, wy, wz) = (aa[0], aa[1], aa[2]);
    let t2 = wx * wx + wy * wy + wz * wz;
    let (a, b, c) = if t2.value() < 1e-12 {
        // sinθ/θ, (1-cosθ)/θ², cosθ as series in θ².
        let a = t2.lift(1.0) - t2.scale(1.0 / 6.0) + (t2 * t2).scale(1.0 / 120.0);
        let b = t2.lift(0.5) - t2.scale(1.0 / 24.0) + (t2 * t2).scale(1.0 / 720.0);
        let c = t2.lift(1.0) - t2.scale(0.5) + (t2 * t2).scale(1.0 / 24.0);
        (a, b, c)
    } else {
        let theta = t2.sqrt();
        let a = theta.sin() / theta;
        let cos = theta.cos();
        let b = (t2.lift(1.0) - cos) / t2;
        (a, b, cos)
    };
    let m = |i: R, j: R, skew: R| i * j * b + skew;
    Mat3([
        [c + wx * wx * b, m(wx, wy, -(wz * a)), m(wx, wz, wy * a)],
        [m(wy, wx, wz * a), c + wy * wy * b, m(wy, wz, -(wx * a))],
        [m(wz, wx, -(wy * a)), m(wz, wy, wx * a), c + wz * wz * b],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn max_abs_diff(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                m = m.max((a[i][j] - b[i][j]).abs());
            }
        }
        m
    }

    #[test]
    fn zero_rotation_is_identity() {
        let r = rodrigues_generic(&[0.0f64, 0.0, 0.0]);
        let eye = Mat3::<f64>::identity(0.0);
        assert_eq!(max_abs_diff(&r.values(), &eye.values()), 0.0);
    }

    #[test]
    fn quarter_turn_about_z_maps_x_to_y() {
        let r = rodrigues_generic(&[0.0f64, 0.0, FRAC_PI_2]);
        let v = r.mul_vec(&Vec3([1.0, 0.0, 0.0]));
        let got = v.values();
        assert!((got[0]).abs() < 1e-12);
        assert!((got[1] - 1.0).abs() < 1e-12);
        assert!((got[2]).abs() < 1e-12);
    }

    #[test]
    fn rotation_angle_recovered_from_trace() {
        let aa = [0.3f64, -0.2, 0.9];
        let r = rodrigues_generic(&aa).values();
        let trace = r[0][0] + r[1][1] + r[2][2];
        let angle = ((trace - 1.0) / 2.0).clamp(-1.0, 1.0).acos();
        let norm = (0.3f64 * 0.3 + 0.2 * 0.2 + 0.9 * 0.9).sqrt();
        assert!((angle - norm % (2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn series_branch_is_continuous_with_trig_branch() {
        // Evaluate just on either side of the switch at |ω|² = 1e-12.
        let eps_lo = 0.9e-6;
        let eps_hi = 1.1e-6;
        let lo = rodrigues_generic(&[eps_lo, 0.0, 0.0]).values();
        let hi = rodrigues_generic(&[eps_hi, 0.0, 0.0]).values();
        assert!(max_abs_diff(&lo, &hi) < 1e-9);
    }

    #[test]
    fn orthonormality() {
        let aa = [1.2f64, 0.4, -2.2];
        let r = rodrigues_generic(&aa);
        let rt = Mat3([
            [r.0[0][0], r.0[1][0], r.0[2][0]],
            [r.0[0][1], r.0[1][1], r.0[2][1]],
            [r.0[0][2], r.0[1][2], r.0[2][2]],
        ]);
        let prod = rt.mul(&r).values();
        let eye = Mat3::<f64>::identity(0.0).values();
        assert!(max_abs_diff(&prod, &eye) < 1e-12);
    }
}
