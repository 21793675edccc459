use num_complex::Complex64;

/// Solves `a x = b` for a complex symmetric 3x3 `a` and two right-hand sides
/// through the adjugate. Returns `None` when the determinant vanishes.
pub(crate) fn solve_sym3(a: &[[Complex64; 3]; 3], b: &[[Complex64; 2]; 3]) -> Option<[[Complex64; 2]; 3]> {
    let c00 = a[1][1] * a[2][2] - a[1][2] * a[1][2];
    let c01 = a[0][2] * a[1][2] - a[0][1] * a[2][2];
    let c02 = a[0][1] * a[1][2] - a[0][2] * a[1][1];
    let c11 = a[0][0] * a[2][2] - a[0][2] * a[0][2];
    let c12 = a[0][1] * a[0][2] - a[0][0] * a[1][2];
    let c22 = a[0][0] * a[1][1] - a[0][1] * a[0][1];
    let det = a[0][0] * c00 + a[0][1] * c01 + a[0][2] * c02;
    let n = det.norm_sqr();
    if !(n > 0.0) || !n.is_finite() {
        return None;
    }
    let inv = det.inv();
    let adj = [[c00, c01, c02], [c01, c11, c12], [c02, c12, c22]];
    let mut x = [[Complex64::new(0.0, 0.0); 2]; 3];
    for r in 0..3 {
        for k in 0..2 {
            x[r][k] = (adj[r][0] * b[0][k] + adj[r][1] * b[1][k] + adj[r][2] * b[2][k]) * inv;
        }
    }
    Some(x)
}
