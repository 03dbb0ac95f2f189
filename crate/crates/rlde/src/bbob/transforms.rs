//! The standard coordinate transforms shared by the 24 benchmark functions:
//! the oscillation map `T_osz`, the asymmetry map `T_asy^beta`, the
//! ill-conditioning scaling `Lambda^alpha`, and the boundary penalty `f_pen`.

/// Oscillation transform applied to one coordinate. Fixes 0.
pub fn t_osz_scalar(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let xhat = x.abs().ln();
    let (c1, c2) = if x > 0.0 { (10.0, 7.9) } else { (5.5, 3.1) };
    x.signum() * (xhat + 0.049 * ((c1 * xhat).sin() + (c2 * xhat).sin())).exp()
}

/// Componentwise oscillation transform.
pub fn t_osz(x: &mut [f64]) {
    for v in x.iter_mut() {
        *v = t_osz_scalar(*v);
    }
}

/// Asymmetry transform: positive components are raised to a power that grows
/// with the coordinate index; non-positive components pass through.
pub fn t_asy(x: &mut [f64], beta: f64) {
    let d = x.len();
    for (i, v) in x.iter_mut().enumerate() {
        if *v > 0.0 {
            let expo = 1.0 + beta * (i as f64 / (d - 1) as f64) * v.sqrt();
            *v = v.powf(expo);
        }
    }
}

/// Ill-conditioning scaling: multiplies component `i` by
/// `alpha^(0.5 * i / (D-1))`.
pub fn lambda_scale(x: &mut [f64], alpha: f64) {
    let d = x.len();
    for (i, v) in x.iter_mut().enumerate() {
        *v *= alpha.powf(0.5 * i as f64 / (d - 1) as f64);
    }
}

/// Boundary penalty: squared excursion beyond [-5, 5] per component.
pub fn f_pen(x: &[f64]) -> f64 {
    x.iter().map(|v| (v.abs() - 5.0).max(0.0).powi(2)).sum()
}
