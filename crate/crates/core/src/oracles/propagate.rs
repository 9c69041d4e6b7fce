use nalgebra::Matrix2;

/// `exp(A t)` for the companion matrix `A = [[0, 1], [-a, -b]]`, `b > 0`.
///
/// With `mu = b/2` and `q^2 = mu^2 - a`, `exp(A t) = C I + S (A + mu I)` where
/// `C = e^{-mu t} cosh(q t)` and `S = e^{-mu t} sinh(q t) / q`, continued
/// analytically to `q^2 <= 0`.
pub fn transition_matrix(a: f64, b: f64, t: f64) -> Matrix2<f64> {
    let mu = 0.5 * b;
    let q2 = mu * mu - a;
    let decay = (-mu * t).exp();
    let (c, s) = if q2 > 0.0 {
        let q = q2.sqrt();
        if q * t > 20.0 {
            let up = ((q - mu) * t).exp();
            let down = (-(q + mu) * t).exp();
            (0.5 * (up + down), 0.5 * (up - down) / q)
        } else if q * t < 1e-8 {
            (decay, decay * t)
        } else {
            (decay * (q * t).cosh(), decay * (q * t).sinh() / q)
        }
    } else if q2 < 0.0 {
        let nu = (-q2).sqrt();
        if nu * t < 1e-8 {
            (decay, decay * t)
        } else {
            (decay * (nu * t).cos(), decay * (nu * t).sin() / nu)
        }
    } else {
        (decay, decay * t)
    };
    Matrix2::new(c + mu * s, s, -a * s, c - mu * s)
}
