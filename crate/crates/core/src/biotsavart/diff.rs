//! Fourth-order central differences of vector fields.

use crate::geometry::Vec3;

/// `J[i][j] = ∂_j u_i` at `x` with step `h`.
pub fn jacobian_fd<F, E>(field: F, x: Vec3, h: f64) -> Result<[[f64; 3]; 3], E>
where
    F: Fn(Vec3) -> Result<Vec3, E>,
{
    let mut jac = [[0.0; 3]; 3];
    for j in 0..3 {
        let e = Vec3::axis(j) * h;
        let p1 = field(x + e)?;
        let m1 = field(x - e)?;
        let p2 = field(x + e * 2.0)?;
        let m2 = field(x - e * 2.0)?;
        let d = (m2 - p2 + (p1 - m1) * 8.0) * (1.0 / (12.0 * h));
        for (i, row) in jac.iter_mut().enumerate() {
            row[j] = d.component(i);
        }
    }
    Ok(jac)
}

pub fn divergence(jac: &[[f64; 3]; 3]) -> f64 {
    jac[0][0] + jac[1][1] + jac[2][2]
}

pub fn curl(jac: &[[f64; 3]; 3]) -> Vec3 {
    Vec3::new(
        jac[2][1] - jac[1][2],
        jac[0][2] - jac[2][0],
        jac[1][0] - jac[0][1],
    )
}

pub fn frobenius(jac: &[[f64; 3]; 3]) -> f64 {
    jac.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

/// `|div u| / ‖∇u‖_F` by finite differences.
pub fn relative_divergence<F, E>(field: F, x: Vec3, h: f64) -> Result<f64, E>
where
    F: Fn(Vec3) -> Result<Vec3, E>,
{
    let jac = jacobian_fd(field, x, h)?;
    let scale = frobenius(&jac);
    Ok(if scale == 0.0 { 0.0 } else { divergence(&jac).abs() / scale })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_field_exact() {
        let f = |p: Vec3| -> Result<Vec3, ()> {
            Ok(Vec3::new(p.y * p.z, p.x * p.x * p.z, p.x + p.y * p.y * p.y))
        };
        let x = Vec3::new(0.3, -0.7, 1.1);
        let jac = jacobian_fd(f, x, 1e-2).unwrap();
        let c = curl(&jac);
        let want = Vec3::new(3.0 * x.y * x.y - x.x * x.x, x.y - 1.0, 2.0 * x.x * x.z - x.z);
        assert!((c - want).norm() < 1e-10, "{c:?}");
        assert!((divergence(&jac) - 0.0).abs() < 1e-10);
    }
}
