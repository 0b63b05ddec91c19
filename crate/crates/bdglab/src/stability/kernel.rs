/// `k(x, y; T) = (x + y)/(tanh(x/T) + tanh(y/T))`.
///
/// Near `tanh(x/T) + tanh(y/T) = 0` the equivalent form
/// `T (u / sinh u) cosh(x/T) cosh(y/T)` with `u = (x + y)/T` is used.
pub fn k_kernel(x: f64, y: f64, t: f64) -> f64 {
    let a = x / t;
    let b = y / t;
    let den = a.tanh() + b.tanh();
    if den.abs() >= 1e-8 {
        return (x + y) / den;
    }
    let u = a + b;
    let ratio = if u.abs() < 1e-4 { 1.0 - u * u / 6.0 } else { u / u.sinh() };
    t * ratio * (ln_cosh(a) + ln_cosh(b)).exp()
}

/// `(x - y)/(tanh(x/T) - tanh(y/T))`, with the value `T cosh²(x/T)` at `x = y`.
pub fn gamma_kernel(x: f64, y: f64, t: f64) -> f64 {
    k_kernel(x, -y, t)
}

fn ln_cosh(a: f64) -> f64 {
    let a = a.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}
