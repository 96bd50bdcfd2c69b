//! Scalar special functions used by normalizing constants: Riemann zeta,
//! the polylogarithm on (0, 1], generalized hypergeometric series, and
//! the parabolic cylinder function.

use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::quad::{integrate_zero_inf, QuadOptions};

// Bernoulli numbers B_2, B_4, ..., B_12 for the Euler-Maclaurin tail.
const BERNOULLI: [f64; 6] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
];

/// Riemann zeta for real `s > 1` by Euler-Maclaurin summation.
pub fn zeta(s: f64) -> Result<f64> {
    if s <= 1.0 {
        return Err(Error::Domain(format!("zeta({s}) requires s > 1")));
    }
    let n = 24usize;
    let mut sum = 0.0;
    for j in 1..n {
        sum += (j as f64).powf(-s);
    }
    let nf = n as f64;
    sum += 0.5 * nf.powf(-s);
    sum += nf.powf(1.0 - s) / (s - 1.0);
    // Correction terms B_{2i}/(2i)! * (s)_{2i-1} * n^{-s-2i+1}.
    let mut poch = s; // (s)_1
    let mut fact = 2.0; // (2i)! running value
    for (i, &b2i) in BERNOULLI.iter().enumerate() {
        let power = nf.powf(-s - 2.0 * i as f64 - 1.0);
        sum += b2i / fact * poch * power;
        // Advance (s)_{2i-1} -> (s)_{2i+1} and (2i)! -> (2i+2)!.
        poch *= (s + 2.0 * i as f64 + 1.0) * (s + 2.0 * i as f64 + 2.0);
        let next = 2.0 * (i as f64 + 2.0);
        fact *= (next - 1.0) * next;
    }
    Ok(sum)
}

/// Polylogarithm `Li_s(x) = sum_{j>=1} x^j / j^s` for `0 < x <= 1`.
///
/// At `x = 1` this is the zeta function and needs `s > 1`; below 1 the
/// series converges geometrically for every real `s`.
pub fn polylog(s: f64, x: f64) -> Result<f64> {
    if !(0.0 < x && x <= 1.0) {
        return Err(Error::Domain(format!("polylog needs 0 < x <= 1, got {x}")));
    }
    if x == 1.0 {
        return zeta(s);
    }
    let mut sum = 0.0;
    let mut xj = 1.0;
    for j in 1..100_000u64 {
        xj *= x;
        let term = xj * (j as f64).powf(-s);
        sum += term;
        if term.abs() <= 1e-16 * sum.abs().max(1e-300) && j > 8 {
            return Ok(sum);
        }
    }
    Err(Error::NonconvergedSeries(format!(
        "polylog({s}, {x}) did not settle"
    )))
}

/// Generalized hypergeometric series `pFq(a; b; z)` by direct term
/// recursion. Demands `p <= q + 1`; for `p == q + 1` the argument must
/// satisfy `|z| < 1`.
pub fn pfq(a: &[f64], b: &[f64], z: f64) -> Result<f64> {
    if a.len() > b.len() + 1 {
        return Err(Error::ParameterOutOfRange(format!(
            "series {}F{} diverges for nonzero arguments",
            a.len(),
            b.len()
        )));
    }
    if a.len() == b.len() + 1 && z.abs() >= 1.0 {
        return Err(Error::ParameterOutOfRange(format!(
            "series {}F{} needs |z| < 1, got {z}",
            a.len(),
            b.len()
        )));
    }
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut small = 0u32;
    for j in 0..10_000u64 {
        let jf = j as f64;
        let mut ratio = z / (jf + 1.0);
        for &ai in a {
            ratio *= ai + jf;
        }
        for &bi in b {
            let denom = bi + jf;
            if denom == 0.0 {
                return Err(Error::Domain(format!(
                    "lower parameter {bi} hits a nonpositive integer"
                )));
            }
            ratio /= denom;
        }
        term *= ratio;
        sum += term;
        if !sum.is_finite() {
            return Err(Error::Domain(format!(
                "hypergeometric series overflowed at term {j}"
            )));
        }
        if term.abs() <= 1e-15 * sum.abs().max(1e-300) {
            small += 1;
            if small >= 3 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NonconvergedSeries(
        "hypergeometric series did not settle in 10000 terms".into(),
    ))
}

/// Natural log of `pFq(a; b; z)` for nonnegative `z` and positive
/// parameters, with periodic rescaling of the running sum so arguments far
/// beyond the overflow point of [`pfq`] still evaluate (the log itself
/// stays modest, of order `sqrt(z)` for the entire cases used here).
pub fn pfq_ln(a: &[f64], b: &[f64], z: f64) -> Result<f64> {
    if a.len() > b.len() + 1 {
        return Err(Error::ParameterOutOfRange(format!(
            "series {}F{} diverges for nonzero arguments",
            a.len(),
            b.len()
        )));
    }
    if a.len() == b.len() + 1 && z.abs() >= 1.0 {
        return Err(Error::ParameterOutOfRange(format!(
            "series {}F{} needs |z| < 1, got {z}",
            a.len(),
            b.len()
        )));
    }
    if !(z >= 0.0) {
        return Err(Error::Domain(format!(
            "log-space hypergeometric evaluation needs z >= 0, got {z}"
        )));
    }
    const RESCALE: f64 = 1e280;
    let ln_rescale = RESCALE.ln();
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut ln_scale = 0.0f64;
    let mut small = 0u32;
    for j in 0..200_000u64 {
        let jf = j as f64;
        let mut ratio = z / (jf + 1.0);
        for &ai in a {
            ratio *= ai + jf;
        }
        for &bi in b {
            let denom = bi + jf;
            if denom <= 0.0 {
                return Err(Error::Domain(format!(
                    "lower parameter {bi} is nonpositive at term {j}"
                )));
            }
            ratio /= denom;
        }
        term *= ratio;
        sum += term;
        if sum > RESCALE {
            sum /= RESCALE;
            term /= RESCALE;
            ln_scale += ln_rescale;
        }
        if term <= 1e-15 * sum {
            small += 1;
            if small >= 3 {
                return Ok(sum.ln() + ln_scale);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NonconvergedSeries(
        "hypergeometric series did not settle in 200000 terms".into(),
    ))
}

/// Parabolic cylinder function `D_{-nu}(z)` for `nu > 0` through its
/// integral representation
/// `D_{-nu}(z) = e^{-z^2/4} / Gamma(nu) * int_0^inf t^{nu-1} e^{-zt - t^2/2} dt`.
pub fn parabolic_cylinder_d(minus_nu: f64, z: f64) -> Result<f64> {
    let nu = -minus_nu;
    if nu <= 0.0 {
        return Err(Error::Domain(format!(
            "parabolic cylinder order {minus_nu} must be negative here"
        )));
    }
    let ln_pref = -z * z / 4.0 - ln_gamma(nu);
    let q = integrate_zero_inf(
        |t| ((nu - 1.0) * t.ln() - z * t - 0.5 * t * t).exp(),
        &QuadOptions::default(),
    )?
    .strict("parabolic cylinder integral")?;
    Ok((ln_pref + q.value.ln()).exp())
}

/// Complementary error function forwarded for callers of this module.
pub fn erfc_scalar(x: f64) -> f64 {
    erfc(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn zeta_reference_values() {
        assert_relative_eq!(zeta(2.0).unwrap(), PI * PI / 6.0, max_relative = 1e-13);
        assert_relative_eq!(zeta(3.0).unwrap(), 1.202_056_903_159_594_2, max_relative = 1e-13);
        assert_relative_eq!(zeta(1.5).unwrap(), 2.612_375_348_685_488_3, max_relative = 1e-12);
        assert!(zeta(1.0).is_err());
    }

    #[test]
    fn polylog_dilogarithm_value() {
        // Li_2(1/2) = pi^2/12 - ln(2)^2/2.
        let expect = PI * PI / 12.0 - 0.5 * 2f64.ln().powi(2);
        assert_relative_eq!(polylog(2.0, 0.5).unwrap(), expect, max_relative = 1e-13);
        // Li_s(1) falls back to zeta.
        assert_relative_eq!(
            polylog(2.0, 1.0).unwrap(),
            PI * PI / 6.0,
            max_relative = 1e-13
        );
    }

    #[test]
    fn hypergeometric_closed_forms() {
        // 1F1(1; 2; z) = (e^z - 1)/z.
        let z = 1.7;
        assert_relative_eq!(
            pfq(&[1.0], &[2.0], z).unwrap(),
            (z.exp() - 1.0) / z,
            max_relative = 1e-12
        );
        // 0F1(; 3/2; -z^2/4) = sin(z)/z.
        let z = 2.3;
        assert_relative_eq!(
            pfq(&[], &[1.5], -z * z / 4.0).unwrap(),
            z.sin() / z,
            max_relative = 1e-12
        );
        // 2F1 needs |z| < 1.
        assert!(pfq(&[0.5, 0.7], &[1.1], 1.3).is_err());
    }

    #[test]
    fn parabolic_cylinder_against_erfc() {
        // D_{-1}(z) = e^{z^2/4} sqrt(pi/2) erfc(z/sqrt(2)).
        let z = 1.3f64;
        let expect = (z * z / 4.0).exp() * (PI / 2.0).sqrt() * erfc_scalar(z / 2f64.sqrt());
        assert_relative_eq!(
            parabolic_cylinder_d(-1.0, z).unwrap(),
            expect,
            max_relative = 1e-9
        );
    }
}
