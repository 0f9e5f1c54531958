//! Small fixed-size vector helpers.

use num_complex::Complex64;

pub type Vec3 = [f64; 3];
pub type CVec3 = [Complex64; 3];

#[inline]
pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn normalize(a: Vec3) -> Vec3 {
    let n = norm(a);
    scale(a, 1.0 / n)
}

#[inline]
pub fn neg(a: Vec3) -> Vec3 {
    [-a[0], -a[1], -a[2]]
}

/// Complex vector `re + i·im`.
#[inline]
pub fn cvec(re: Vec3, im: Vec3) -> CVec3 {
    [
        Complex64::new(re[0], im[0]),
        Complex64::new(re[1], im[1]),
        Complex64::new(re[2], im[2]),
    ]
}

#[inline]
pub fn creal(a: Vec3) -> CVec3 {
    cvec(a, [0.0; 3])
}

/// Bilinear (non-Hermitian) product `a·b`.
#[inline]
pub fn cdot(a: CVec3, b: CVec3) -> Complex64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cdot_real(a: CVec3, b: Vec3) -> Complex64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Orthonormal frame `(e1, e2)` completing the unit vector `beta`.
///
/// Gram–Schmidt against the coordinate axis least aligned with `beta`, so the
/// frame is a deterministic function of `beta`.
pub fn complete_frame(beta: Vec3) -> (Vec3, Vec3) {
    let abs = [beta[0].abs(), beta[1].abs(), beta[2].abs()];
    let mut axis = 0;
    for i in 1..3 {
        if abs[i] < abs[axis] {
            axis = i;
        }
    }
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    let e1 = normalize(sub(e, scale(beta, dot(e, beta))));
    let e2 = cross(beta, e1);
    (e1, e2)
}

pub fn is_unit(v: Vec3) -> bool {
    (norm(v) - 1.0).abs() < 1e-9
}

/// Deterministic quasi-uniform spiral point set on the unit sphere.
///
/// Points sit at heights `z_i = 1 - (2i + 1)/n` with golden-angle azimuths.
pub fn spiral_directions(n: usize) -> Vec<Vec3> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// `spiral_directions(n)` together with the antipode of every point.
pub fn symmetric_directions(n: usize) -> Vec<Vec3> {
    let mut out = spiral_directions(n);
    let anti: Vec<Vec3> = out.iter().map(|&b| neg(b)).collect();
    out.extend(anti);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_is_orthonormal() {
        for beta in spiral_directions(40) {
            let (e1, e2) = complete_frame(beta);
            assert!(is_unit(e1) && is_unit(e2));
            assert!(dot(e1, beta).abs() < 1e-14);
            assert!(dot(e2, beta).abs() < 1e-14);
            assert!(dot(e1, e2).abs() < 1e-14);
        }
    }

    #[test]
    fn spiral_is_balanced() {
        let pts = spiral_directions(200);
        let mut c = [0.0; 3];
        for p in &pts {
            assert!(is_unit(*p));
            c = add(c, *p);
        }
        assert!(norm(c) / 200.0 < 1e-2);
    }
}
