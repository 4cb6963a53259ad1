//! Gamma-type functions and Bessel functions of the first kind.

use statrs::function::gamma as sg;

pub fn ln_gamma(x: f64) -> f64 {
    sg::ln_gamma(x)
}

pub fn gamma(x: f64) -> f64 {
    sg::gamma(x)
}

pub fn digamma(x: f64) -> f64 {
    sg::digamma(x)
}

/// log of the Beta function B(a, b).
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// `E χ_k^p` for a chi variable with `k` degrees of freedom.
pub fn chi_moment(k: f64, p: f64) -> f64 {
    (0.5 * p * std::f64::consts::LN_2 + ln_gamma(0.5 * (k + p)) - ln_gamma(0.5 * k)).exp()
}

/// `J_0(x), …, J_nmax(x)` by Miller's backward recurrence, normalised with
/// `J_0 + 2 Σ J_{2k} = 1`.
pub fn bessel_j_int_array(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let top = nmax.max(ax.ceil() as usize);
    let mut m = top + 20 + (40.0 * top as f64).sqrt() as usize;
    if m % 2 == 1 {
        m += 1;
    }
    let mut fkp1 = 0.0f64;
    let mut fk = 1.0f64;
    let mut sum = 0.0f64;
    if m <= nmax {
        out[m] = fk;
    }
    for k in (1..=m).rev() {
        let fkm1 = (2.0 * k as f64 / ax) * fk - fkp1;
        fkp1 = fk;
        fk = fkm1;
        let idx = k - 1;
        if idx <= nmax {
            out[idx] = fk;
        }
        if idx > 0 && idx % 2 == 0 {
            sum += 2.0 * fk;
        }
        if fk.abs() > 1e200 {
            let sc = 1e-200;
            fk *= sc;
            fkp1 *= sc;
            sum *= sc;
            for v in out.iter_mut() {
                *v *= sc;
            }
        }
    }
    sum += fk;
    for v in out.iter_mut() {
        *v /= sum;
    }
    if x < 0.0 {
        for (n, v) in out.iter_mut().enumerate() {
            if n % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out
}

/// `J_n(x)` for integer order (negative orders by `J_{-n} = (-1)^n J_n`).
pub fn bessel_jn(n: i64, x: f64) -> f64 {
    let m = n.unsigned_abs() as usize;
    let v = bessel_j_int_array(m, x)[m];
    if n < 0 && m % 2 == 1 {
        -v
    } else {
        v
    }
}

/// Power series for `J_ν(x)`, `x ≥ 0`. Intended for moderate arguments
/// (|x| ≲ 20); negative integer orders go through the reflection rule.
pub fn bessel_j(nu: f64, x: f64) -> f64 {
    if nu < 0.0 && nu.fract() == 0.0 {
        return bessel_jn(nu as i64, x);
    }
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    let h = 0.5 * x;
    let q = -h * h;
    let mut term = h.powf(nu) / gamma(nu + 1.0);
    let mut sum = term;
    let mut m = 0.0;
    loop {
        m += 1.0;
        term *= q / (m * (m + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && m > h {
            break;
        }
        if m > 500.0 {
            break;
        }
    }
    sum
}

/// `∂J_ν(x)/∂ν` at integer order `n ≥ 0`, from the termwise-differentiated series.
pub fn bessel_j_order_derivative(n: usize, x: f64) -> f64 {
    assert!(x > 0.0);
    let h = 0.5 * x;
    let lh = h.ln();
    let q = -h * h;
    let nf = n as f64;
    let mut term = (nf * lh - ln_gamma(nf + 1.0)).exp();
    let mut sum = term * (lh - digamma(nf + 1.0));
    let mut m = 0.0;
    loop {
        m += 1.0;
        term *= q / (m * (m + nf));
        let t = term * (lh - digamma(m + nf + 1.0));
        sum += t;
        if t.abs() <= 1e-18 * sum.abs().max(1e-300) && m > h + 2.0 {
            break;
        }
        if m > 500.0 {
            break;
        }
    }
    sum
}

/// `x J_ν'(x)` using `J_ν' = J_{ν-1} - (ν/x) J_ν`.
pub fn x_bessel_j_prime(nu: f64, x: f64) -> f64 {
    x * bessel_j(nu - 1.0, x) - nu * bessel_j(nu, x)
}

/// Modified Bessel `I_0(x)` by its power series.
pub fn bessel_i0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut m = 0.0;
    loop {
        m += 1.0;
        term *= q / (m * m);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_reference_values() {
        // scipy.special.jv
        let j = bessel_j_int_array(5, 1.0);
        assert!((j[0] - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((j[1] - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((j[5] - 2.497_577_302_112_344e-4).abs() < 1e-18);
        let j = bessel_j_int_array(3, 7.5);
        assert!((j[0] - 0.266_339_657_880_378_1).abs() < 1e-14);
        assert!((j[3] - (-0.258_060_913_193_460_3)).abs() < 1e-14);
        let v = bessel_j(0.5, 2.0);
        assert!((v - 0.513_016_136_561_827_8).abs() < 4e-15, "{v}");
    }

    #[test]
    fn series_matches_recurrence() {
        for &x in &[0.1, 0.7, 1.3, 2.9, 6.0] {
            let arr = bessel_j_int_array(12, x);
            for (n, v) in arr.iter().enumerate() {
                let s = bessel_j(n as f64, x);
                assert!((s - v).abs() < 1e-14, "n={n} x={x}: {s} vs {v}");
            }
        }
        assert!((bessel_jn(-3, 1.7) + bessel_jn(3, 1.7)).abs() < 1e-16);
        let neg = bessel_j_int_array(4, -1.2);
        assert!((neg[1] + bessel_jn(1, 1.2)).abs() < 1e-16);
    }

    #[test]
    fn order_derivative_matches_finite_difference() {
        for &n in &[0usize, 1, 4] {
            for &x in &[0.5, 1.7, 3.2] {
                let h = 1e-5;
                let fd = (bessel_j(n as f64 + h, x) - bessel_j(n as f64 - h, x)) / (2.0 * h);
                let d = bessel_j_order_derivative(n, x);
                assert!((fd - d).abs() < 1e-8, "n={n} x={x}: {fd} vs {d}");
            }
        }
    }

    #[test]
    fn i0_is_angular_average() {
        let x = 1.3;
        let m = 64;
        let avg: f64 = (0..m)
            .map(|k| (x * (2.0 * std::f64::consts::PI * k as f64 / m as f64).cos()).exp())
            .sum::<f64>()
            / m as f64;
        assert!((avg - bessel_i0(x)).abs() < 1e-14);
    }

    #[test]
    fn chi_moments() {
        // χ_1 = |N(0,1)|: E|Z| = sqrt(2/π), E Z^2 = 1
        assert!((chi_moment(1.0, 1.0) - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-14);
        assert!((chi_moment(3.0, 2.0) - 3.0).abs() < 1e-13);
    }
}
