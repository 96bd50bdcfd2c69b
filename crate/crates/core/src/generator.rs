//! Shape generators: the scalar functions `h` that turn the matrix
//! density template `det(X)^{(n-m-1)/2} h(tr Sigma^{-1} X)` into a
//! concrete distribution, together with the moment integrals
//! `gamma_k(a) = int_0^inf y^{am+k-1} h(y) dy`, Taylor data at the
//! origin, the log-derivative used by maximum likelihood, and the radial
//! density that drives exact sampling.
//!
//! A generator is bound to the pair `(n, m)` at construction: several
//! kinds (t-prime, Kummer, hypergeometric) have constants that depend on
//! the product `n*m`, and binding rules out mixing a generator with a
//! distribution of a different dimension.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use serde::Serialize;
use statrs::function::gamma::{digamma, ln_gamma};

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_zero_inf, QuadOptions};
use crate::special::{pfq, pfq_ln, zeta};

/// Sign and log-magnitude of a real quantity; the representation used for
/// Taylor derivatives and other factors that overflow `f64` directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignLn {
    pub sign: f64,
    pub ln_abs: f64,
}

impl SignLn {
    pub const ZERO: SignLn = SignLn {
        sign: 0.0,
        ln_abs: f64::NEG_INFINITY,
    };

    pub fn new(sign: f64, ln_abs: f64) -> Self {
        SignLn { sign, ln_abs }
    }

    pub fn from_value(v: f64) -> Self {
        if v == 0.0 {
            SignLn::ZERO
        } else {
            SignLn {
                sign: v.signum(),
                ln_abs: v.abs().ln(),
            }
        }
    }

    pub fn value(&self) -> f64 {
        self.sign * self.ln_abs.exp()
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0.0
    }
}

/// Tail bound a user-registered shape must declare so the existence of
/// its moment integrals can be pre-checked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    /// `h(y) <= C e^{-eta y}` for large `y`, `eta > 0`.
    Exponential { eta: f64 },
    /// `h(y) <= C y^{-rho}` for large `y`; moments need `a*m + k < rho`.
    Polynomial { rho: f64 },
}

/// A user-registered scalar shape.
pub struct CustomShape {
    pub name: String,
    pub h: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    /// Upper end of the support; `f64::INFINITY` for the half line.
    pub support_end: f64,
    pub decay: Decay,
}

impl std::fmt::Debug for CustomShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CustomShape")
            .field("name", &self.name)
            .field("support_end", &self.support_end)
            .field("decay", &self.decay)
            .finish()
    }
}

static REGISTRY: OnceLock<RwLock<HashMap<String, Arc<CustomShape>>>> = OnceLock::new();

fn registry() -> &'static RwLock<HashMap<String, Arc<CustomShape>>> {
    REGISTRY.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Registers a named scalar shape for later use through
/// [`ShapeGenerator::custom`]. Names are global and single-assignment.
pub fn register_custom_shape(
    name: &str,
    h: impl Fn(f64) -> f64 + Send + Sync + 'static,
    support_end: f64,
    decay: Decay,
) -> Result<()> {
    if let Decay::Exponential { eta } = decay {
        if eta <= 0.0 {
            return Err(Error::ParameterOutOfRange(format!(
                "exponential decay rate {eta} must be positive"
            )));
        }
    }
    if !(support_end > 0.0) {
        return Err(Error::ParameterOutOfRange(format!(
            "support end {support_end} must be positive"
        )));
    }
    let mut map = registry().write().expect("shape registry poisoned");
    if map.contains_key(name) {
        return Err(Error::ParameterOutOfRange(format!(
            "shape `{name}` is already registered"
        )));
    }
    map.insert(
        name.to_string(),
        Arc::new(CustomShape {
            name: name.to_string(),
            h: Box::new(h),
            support_end,
            decay,
        }),
    );
    Ok(())
}

fn lookup_custom(name: &str) -> Result<Arc<CustomShape>> {
    registry()
        .read()
        .expect("shape registry poisoned")
        .get(name)
        .cloned()
        .ok_or_else(|| Error::ParameterOutOfRange(format!("no registered shape named `{name}`")))
}

/// The built-in shape families. Constants derived from `(n, m)` are
/// frozen into the variant at construction.
#[derive(Debug, Clone, PartialEq)]
pub enum ShapeKind {
    /// `h(y) = e^{-y/2}`: the classical Wishart case.
    Exponential,
    /// `h(y) = (1+y)^{-c}` with `c = nm/2 + p`: matrix-t type.
    TPrime { p: f64, c: f64 },
    /// `h(y) = e^{-a y^b}`: power-exponential.
    Power { a: f64, b: f64 },
    /// `h(y) = (a+y)^{-q} e^{-b y}` with `q = (nm-1)/2`: Kummer type.
    Kummer { a: f64, b: f64, q: f64 },
    /// `h(y) = e^{-b y} (1 - e^{-b y})^{-2}`: logistic type. The extra
    /// parameter `a` only enters the reported closed-form normalizer.
    Logistic { a: f64, b: f64 },
    /// `h(y) = e^{-a y^2} sin(b y)` on the support `[0, pi/b]`.
    SinGaussian { a: f64, b: f64 },
    /// `h(y) = e^{-y} ln(y)`: signed below `y = 1`.
    LogExp,
    /// `h(y) = pFq(a; b; c y) e^{-y}` with `p < q`.
    HypergeomExp { a: Vec<f64>, b: Vec<f64>, c: f64 },
    /// A registered scalar shape, referenced by name.
    Custom { name: String },
}

/// How a moment integral was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaMethod {
    Analytic,
    Quadrature,
}

/// One moment integral `gamma_k(a)` on the log scale.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GammaK {
    pub a: f64,
    pub k: u32,
    pub m: usize,
    pub ln_value: f64,
    pub method: GammaMethod,
    /// Relative error estimate when quadrature was used.
    pub rel_error: Option<f64>,
}

/// A shape function bound to `(n, m)`.
#[derive(Debug, Clone)]
pub struct ShapeGenerator {
    kind: ShapeKind,
    n: f64,
    m: usize,
    custom: Option<Arc<CustomShape>>,
    gamma0_ln: f64,
}

impl ShapeGenerator {
    fn build(kind: ShapeKind, n: f64, m: usize, custom: Option<Arc<CustomShape>>) -> Result<Self> {
        if m == 0 {
            return Err(Error::ParameterOutOfRange("dimension m must be >= 1".into()));
        }
        if !(n > 0.0) {
            return Err(Error::ParameterOutOfRange(format!(
                "degrees of freedom n = {n} must be positive"
            )));
        }
        let mut gen = ShapeGenerator {
            kind,
            n,
            m,
            custom,
            gamma0_ln: f64::NAN,
        };
        gen.positivity_check()?;
        gen.gamma0_ln = gen.gamma_k_ln(n / 2.0, 0)?.ln_value;
        Ok(gen)
    }

    pub fn exponential(n: f64, m: usize) -> Result<Self> {
        Self::build(ShapeKind::Exponential, n, m, None)
    }

    pub fn t_prime(p: f64, n: f64, m: usize) -> Result<Self> {
        if !(p > 0.0) {
            return Err(Error::ParameterOutOfRange(format!(
                "tail parameter p = {p} must be positive"
            )));
        }
        let c = n * m as f64 / 2.0 + p;
        Self::build(ShapeKind::TPrime { p, c }, n, m, None)
    }

    pub fn power(a: f64, b: f64, n: f64, m: usize) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::ParameterOutOfRange(format!(
                "power shape needs a > 0 and b > 0, got ({a}, {b})"
            )));
        }
        Self::build(ShapeKind::Power { a, b }, n, m, None)
    }

    pub fn kummer(a: f64, b: f64, n: f64, m: usize) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::ParameterOutOfRange(format!(
                "Kummer shape needs a > 0 and b > 0, got ({a}, {b})"
            )));
        }
        let q = (n * m as f64 - 1.0) / 2.0;
        if q < 0.0 {
            return Err(Error::ParameterOutOfRange(format!(
                "Kummer exponent (nm-1)/2 = {q} must be nonnegative"
            )));
        }
        Self::build(ShapeKind::Kummer { a, b, q }, n, m, None)
    }

    pub fn logistic(a: f64, b: f64, n: f64, m: usize) -> Result<Self> {
        if !(0.0 < a && a <= 1.0) {
            return Err(Error::ParameterOutOfRange(format!(
                "logistic weight a = {a} must lie in (0, 1]"
            )));
        }
        if !(b > 0.0) {
            return Err(Error::ParameterOutOfRange(format!(
                "logistic rate b = {b} must be positive"
            )));
        }
        if n * m as f64 <= 4.0 {
            return Err(Error::ParameterOutOfRange(format!(
                "logistic shape needs n*m > 4 for a finite normalizer, got {}",
                n * m as f64
            )));
        }
        Self::build(ShapeKind::Logistic { a, b }, n, m, None)
    }

    pub fn sin_gaussian(a: f64, b: f64, n: f64, m: usize) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::ParameterOutOfRange(format!(
                "sine-Gaussian shape needs a > 0 and b > 0, got ({a}, {b})"
            )));
        }
        Self::build(ShapeKind::SinGaussian { a, b }, n, m, None)
    }

    pub fn log_exp(n: f64, m: usize) -> Result<Self> {
        // The signed integral gamma_0(n/2) = Gamma(nm/2) psi(nm/2) must
        // be positive for a valid normalizer.
        if digamma(n * m as f64 / 2.0) <= 0.0 {
            return Err(Error::ParameterOutOfRange(format!(
                "log-weighted shape needs nm/2 in the region where the digamma \
                 function is positive; nm = {} is too small",
                n * m as f64
            )));
        }
        Self::build(ShapeKind::LogExp, n, m, None)
    }

    pub fn hypergeom_exp(a: Vec<f64>, b: Vec<f64>, c: f64, n: f64, m: usize) -> Result<Self> {
        if a.len() >= b.len() {
            return Err(Error::ParameterOutOfRange(format!(
                "hypergeometric shape needs p < q, got p={} q={}",
                a.len(),
                b.len()
            )));
        }
        if a.iter().any(|&v| v <= 0.0) || b.iter().any(|&v| v <= 0.0) {
            return Err(Error::ParameterOutOfRange(
                "hypergeometric parameters must be positive for a nonnegative shape".into(),
            ));
        }
        if c < 0.0 {
            return Err(Error::ParameterOutOfRange(format!(
                "hypergeometric scale c = {c} must be nonnegative"
            )));
        }
        Self::build(ShapeKind::HypergeomExp { a, b, c }, n, m, None)
    }

    pub fn custom(name: &str, n: f64, m: usize) -> Result<Self> {
        let shape = lookup_custom(name)?;
        Self::build(
            ShapeKind::Custom {
                name: name.to_string(),
            },
            n,
            m,
            Some(shape),
        )
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn kind(&self) -> &ShapeKind {
        &self.kind
    }

    pub fn kind_name(&self) -> String {
        match &self.kind {
            ShapeKind::Exponential => "exponential".into(),
            ShapeKind::TPrime { .. } => "t_prime".into(),
            ShapeKind::Power { .. } => "power".into(),
            ShapeKind::Kummer { .. } => "kummer".into(),
            ShapeKind::Logistic { .. } => "logistic".into(),
            ShapeKind::SinGaussian { .. } => "sin_gaussian".into(),
            ShapeKind::LogExp => "log_exp".into(),
            ShapeKind::HypergeomExp { .. } => "hypergeom_exp".into(),
            ShapeKind::Custom { name } => format!("custom:{name}"),
        }
    }

    /// Upper end of the support of `h` as a density factor.
    pub fn support_end(&self) -> f64 {
        match &self.kind {
            ShapeKind::SinGaussian { b, .. } => std::f64::consts::PI / b,
            ShapeKind::Custom { .. } => self.custom.as_ref().expect("custom shape present").support_end,
            _ => f64::INFINITY,
        }
    }

    /// Lowest trace from which `h` is guaranteed nonnegative (1 for the
    /// log-weighted shape, 0 otherwise).
    pub fn positivity_start(&self) -> f64 {
        match self.kind {
            ShapeKind::LogExp => 1.0,
            _ => 0.0,
        }
    }

    /// `ln gamma_0(n/2)`: the scalar part of the normalizing constant,
    /// fixed at construction.
    pub fn gamma0_ln(&self) -> f64 {
        self.gamma0_ln
    }

    fn positivity_check(&self) -> Result<()> {
        let points = 1000usize;
        let (lo, hi, log_spaced) = match &self.kind {
            ShapeKind::SinGaussian { .. } => (1e-9, self.support_end() * (1.0 - 1e-12), false),
            ShapeKind::LogExp => (1.0, 1e4, true),
            // The series factor overflows for very large arguments; the
            // sign is constant anyway, so probe a moderate range.
            ShapeKind::HypergeomExp { .. } => (1e-6, 1e3, true),
            ShapeKind::Custom { .. } => {
                let end = self.support_end();
                if end.is_finite() {
                    (end * 1e-9, end * (1.0 - 1e-12), false)
                } else {
                    (1e-6, 1e6, true)
                }
            }
            _ => (1e-6, 1e6, true),
        };
        let mut seen_not_one = false;
        for i in 0..points {
            let t = i as f64 / (points - 1) as f64;
            let y = if log_spaced {
                lo * (hi / lo).powf(t)
            } else {
                lo + (hi - lo) * t
            };
            let v = self.h_eval(y)?;
            if v < 0.0 {
                return Err(Error::NonpositiveDensity { trace: y });
            }
            if (v - 1.0).abs() > 1e-12 {
                seen_not_one = true;
            }
        }
        if !seen_not_one {
            return Err(Error::ParameterOutOfRange(
                "shape function is identically 1 on the probe grid".into(),
            ));
        }
        Ok(())
    }

    /// Value of `h` at `y`. Signed for the log-weighted shape; errors
    /// outside the sine-Gaussian positivity window.
    pub fn h_eval(&self, y: f64) -> Result<f64> {
        if y < 0.0 {
            return Err(Error::Domain(format!("shape argument {y} must be nonnegative")));
        }
        match &self.kind {
            ShapeKind::Exponential => Ok((-0.5 * y).exp()),
            ShapeKind::TPrime { c, .. } => Ok((-c * y.ln_1p()).exp()),
            ShapeKind::Power { a, b } => Ok((-a * y.powf(*b)).exp()),
            ShapeKind::Kummer { a, b, q } => Ok((-q * (a + y).ln() - b * y).exp()),
            ShapeKind::Logistic { b, .. } => {
                let u = (-b * y).exp_m1(); // e^{-by} - 1 in (-1, 0)
                Ok((-b * y).exp() / (u * u))
            }
            ShapeKind::SinGaussian { a, b } => {
                if y > std::f64::consts::PI / b {
                    return Err(Error::NonpositiveDensity { trace: y });
                }
                Ok((-a * y * y).exp() * (b * y).sin().max(0.0))
            }
            ShapeKind::LogExp => Ok((-y).exp() * y.ln()),
            ShapeKind::HypergeomExp { a, b, c } => Ok((pfq_ln(a, b, c * y)? - y).exp()),
            ShapeKind::Custom { .. } => {
                let shape = self.custom.as_ref().expect("custom shape present");
                if y > shape.support_end {
                    Ok(0.0)
                } else {
                    Ok((shape.h)(y))
                }
            }
        }
    }

    /// `ln h(y)`, computed without overflow. Errors where `h` is
    /// negative; returns negative infinity where `h` vanishes.
    pub fn ln_h(&self, y: f64) -> Result<f64> {
        if y < 0.0 {
            return Err(Error::Domain(format!("shape argument {y} must be nonnegative")));
        }
        match &self.kind {
            ShapeKind::Exponential => Ok(-0.5 * y),
            ShapeKind::TPrime { c, .. } => Ok(-c * y.ln_1p()),
            ShapeKind::Power { a, b } => Ok(-a * y.powf(*b)),
            ShapeKind::Kummer { a, b, q } => Ok(-q * (a + y).ln() - b * y),
            ShapeKind::Logistic { b, .. } => {
                if y == 0.0 {
                    return Ok(f64::INFINITY);
                }
                Ok(-b * y - 2.0 * (-(-b * y).exp_m1()).ln())
            }
            ShapeKind::SinGaussian { a, b } => {
                if y > std::f64::consts::PI / b {
                    return Err(Error::NonpositiveDensity { trace: y });
                }
                Ok(-a * y * y + (b * y).sin().max(0.0).ln())
            }
            ShapeKind::LogExp => {
                if y < 1.0 {
                    Err(Error::NonpositiveDensity { trace: y })
                } else {
                    Ok(-y + y.ln().ln())
                }
            }
            ShapeKind::HypergeomExp { a, b, c } => Ok(pfq_ln(a, b, c * y)? - y),
            ShapeKind::Custom { .. } => {
                let v = self.h_eval(y)?;
                if v < 0.0 {
                    Err(Error::NonpositiveDensity { trace: y })
                } else {
                    Ok(v.ln())
                }
            }
        }
    }

    pub fn has_analytic_gamma_k(&self) -> bool {
        !matches!(
            self.kind,
            ShapeKind::Kummer { .. } | ShapeKind::SinGaussian { .. } | ShapeKind::Custom { .. }
        )
    }

    /// `ln gamma_k(a)` with `gamma_k(a) = int y^{am+k-1} h(y) dy` over
    /// the support of `h`.
    pub fn gamma_k_ln(&self, a: f64, k: u32) -> Result<GammaK> {
        let m = self.m;
        let s = a * m as f64 + k as f64;
        if s <= 0.0 {
            return Err(Error::Domain(format!(
                "moment integral needs a*m + k > 0, got {s}"
            )));
        }
        let analytic: Option<f64> = match &self.kind {
            ShapeKind::Exponential => Some(s * std::f64::consts::LN_2 + ln_gamma(s)),
            ShapeKind::TPrime { c, .. } => {
                if s >= *c {
                    return Err(Error::DivergentIntegral(format!(
                        "moment integral of the t-prime shape needs a*m + k < {c}, got {s}"
                    )));
                }
                Some(ln_gamma(s) + ln_gamma(c - s) - ln_gamma(*c))
            }
            ShapeKind::Power { a: aa, b } => Some(ln_gamma(s / b) - b.ln() - s / b * aa.ln()),
            ShapeKind::Logistic { b, .. } => {
                if s <= 2.0 {
                    return Err(Error::DivergentIntegral(format!(
                        "moment integral of the logistic shape needs a*m + k > 2, got {s}"
                    )));
                }
                Some(ln_gamma(s) + zeta(s - 1.0)?.ln() - s * b.ln())
            }
            ShapeKind::LogExp => {
                let psi = digamma(s);
                if psi <= 0.0 {
                    return Err(Error::Domain(format!(
                        "signed moment integral Gamma({s}) psi({s}) is not positive"
                    )));
                }
                Some(ln_gamma(s) + psi.ln())
            }
            ShapeKind::HypergeomExp { a: av, b: bv, c } => {
                let mut upper = Vec::with_capacity(av.len() + 1);
                upper.push(s);
                upper.extend_from_slice(av);
                Some(ln_gamma(s) + pfq(&upper, bv, *c)?.ln())
            }
            ShapeKind::Kummer { .. } | ShapeKind::SinGaussian { .. } | ShapeKind::Custom { .. } => {
                None
            }
        };
        if let Some(ln_value) = analytic {
            return Ok(GammaK {
                a,
                k,
                m,
                ln_value,
                method: GammaMethod::Analytic,
                rel_error: None,
            });
        }

        if let ShapeKind::Custom { .. } = self.kind {
            let shape = self.custom.as_ref().expect("custom shape present");
            if shape.support_end.is_infinite() {
                if let Decay::Polynomial { rho } = shape.decay {
                    if s >= rho {
                        return Err(Error::DivergentIntegral(format!(
                            "declared polynomial decay {rho} cannot support a*m + k = {s}"
                        )));
                    }
                }
            }
        }
        self.gamma_quad_ln(a, k, s)
    }

    /// Quadrature fallback with peak scaling so that large `s` does not
    /// overflow the integrand.
    fn gamma_quad_ln(&self, a: f64, k: u32, s: f64) -> Result<GammaK> {
        let end = self.support_end();
        let ln_f = |y: f64| -> f64 {
            if y <= 0.0 {
                return f64::NEG_INFINITY;
            }
            match self.ln_h(y) {
                Ok(lh) => (s - 1.0) * y.ln() + lh,
                Err(_) => f64::NEG_INFINITY,
            }
        };
        // Probe for the peak on a log grid inside the support.
        let hi = if end.is_finite() { end } else { 1e8 };
        let lo = 1e-8 * hi.min(1.0);
        let mut peak = f64::NEG_INFINITY;
        for i in 0..=400 {
            let y = lo * (hi / lo).powf(i as f64 / 400.0);
            peak = peak.max(ln_f(y));
        }
        if !peak.is_finite() {
            return Err(Error::Domain(
                "moment integrand vanishes on the entire probe grid".into(),
            ));
        }
        let g = |y: f64| (ln_f(y) - peak).exp();
        let opts = QuadOptions::default();
        let q = if end.is_finite() {
            integrate(g, 0.0, end, &opts)?
        } else {
            integrate_zero_inf(g, &opts)?
        };
        let q = q.strict("moment integral")?;
        if !(q.value > 0.0) {
            return Err(Error::DivergentIntegral(
                "moment integral evaluated to a nonpositive value".into(),
            ));
        }
        Ok(GammaK {
            a,
            k,
            m: self.m,
            ln_value: peak + q.value.ln(),
            method: GammaMethod::Quadrature,
            rel_error: Some(q.abs_error / q.value),
        })
    }

    pub fn has_taylor(&self) -> bool {
        match &self.kind {
            ShapeKind::Exponential | ShapeKind::TPrime { .. } | ShapeKind::HypergeomExp { .. } => {
                true
            }
            ShapeKind::Power { b, .. } => b.fract() == 0.0 && *b >= 1.0,
            _ => false,
        }
    }

    /// Radius of convergence of the Taylor expansion of `h` at 0.
    pub fn taylor_radius(&self) -> Result<f64> {
        if !self.has_taylor() {
            return Err(Error::NoTaylorExpansion(format!(
                "shape `{}` has no Taylor expansion at the origin",
                self.kind_name()
            )));
        }
        Ok(match self.kind {
            ShapeKind::TPrime { .. } => 1.0,
            _ => f64::INFINITY,
        })
    }

    /// Derivative `h^(k)(0)` as sign and log-magnitude.
    pub fn taylor_coeff(&self, k: u32) -> Result<SignLn> {
        let kf = k as f64;
        match &self.kind {
            ShapeKind::Exponential => Ok(SignLn::new(
                if k % 2 == 0 { 1.0 } else { -1.0 },
                -kf * std::f64::consts::LN_2,
            )),
            ShapeKind::TPrime { c, .. } => Ok(SignLn::new(
                if k % 2 == 0 { 1.0 } else { -1.0 },
                ln_gamma(c + kf) - ln_gamma(*c),
            )),
            ShapeKind::Power { a, b } if self.has_taylor() => {
                let bi = *b as u32;
                if k % bi != 0 {
                    return Ok(SignLn::ZERO);
                }
                let j = (k / bi) as f64;
                Ok(SignLn::new(
                    if (k / bi) % 2 == 0 { 1.0 } else { -1.0 },
                    j * a.ln() + ln_gamma(kf + 1.0) - ln_gamma(j + 1.0),
                ))
            }
            ShapeKind::HypergeomExp { a, b, c } => {
                if k > 120 {
                    return Err(Error::NoTaylorExpansion(
                        "hypergeometric Taylor coefficients beyond order 120 lose precision"
                            .into(),
                    ));
                }
                // Convolution of the series of pFq(c y) with e^{-y},
                // scaled so the k! factor is restored in log space.
                let mut t = 1.0f64; // pFq series term j
                let mut sum = 0.0f64;
                // j runs over the pFq index; (k-j)! alternates sign.
                let mut cj = 1.0f64;
                for j in 0..=k {
                    let jf = j as f64;
                    let parity = if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
                    sum += parity * t * cj * (-ln_gamma((k - j) as f64 + 1.0)).exp();
                    if j < k {
                        let mut ratio = 1.0 / (jf + 1.0);
                        for &ai in a {
                            ratio *= ai + jf;
                        }
                        for &bi in b {
                            ratio /= bi + jf;
                        }
                        t *= ratio;
                        cj *= c;
                    }
                }
                if sum == 0.0 {
                    return Ok(SignLn::ZERO);
                }
                Ok(SignLn::new(sum.signum(), sum.abs().ln() + ln_gamma(kf + 1.0)))
            }
            _ => Err(Error::NoTaylorExpansion(format!(
                "shape `{}` has no Taylor expansion at the origin",
                self.kind_name()
            ))),
        }
    }

    /// Derivative `h^(k)(t0)` away from the origin; available for the
    /// shapes whose derivatives have closed forms at any point.
    pub fn taylor_coeff_at(&self, t0: f64, k: u32) -> Result<SignLn> {
        if t0 < 0.0 {
            return Err(Error::Domain(format!("expansion point {t0} must be nonnegative")));
        }
        let kf = k as f64;
        match &self.kind {
            ShapeKind::Exponential => Ok(SignLn::new(
                if k % 2 == 0 { 1.0 } else { -1.0 },
                -kf * std::f64::consts::LN_2 - 0.5 * t0,
            )),
            ShapeKind::TPrime { c, .. } => Ok(SignLn::new(
                if k % 2 == 0 { 1.0 } else { -1.0 },
                ln_gamma(c + kf) - ln_gamma(*c) - (c + kf) * t0.ln_1p(),
            )),
            _ => Err(Error::NoTaylorExpansion(format!(
                "shape `{}` has no closed-form derivatives away from the origin",
                self.kind_name()
            ))),
        }
    }

    /// `g'(x)` for `g = -ln h`: the quantity the likelihood equations
    /// need. Analytic for built-ins, central finite difference for
    /// registered shapes.
    pub fn g_prime(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("log-derivative needs x > 0, got {x}")));
        }
        match &self.kind {
            ShapeKind::Exponential => Ok(0.5),
            ShapeKind::TPrime { c, .. } => Ok(c / (1.0 + x)),
            ShapeKind::Power { a, b } => Ok(a * b * x.powf(b - 1.0)),
            ShapeKind::Kummer { a, b, q } => Ok(q / (a + x) + b),
            ShapeKind::Logistic { b, .. } => {
                // b * coth(b x / 2)
                let t = (b * x / 2.0).tanh();
                Ok(b / t)
            }
            ShapeKind::SinGaussian { a, b } => {
                if x >= std::f64::consts::PI / b {
                    return Err(Error::Domain(format!(
                        "log-derivative undefined outside the support (x = {x})"
                    )));
                }
                Ok(2.0 * a * x - b * (b * x).cos() / (b * x).sin())
            }
            ShapeKind::LogExp => {
                if x <= 1.0 {
                    return Err(Error::Domain(format!(
                        "log-derivative needs a positive shape value, got x = {x}"
                    )));
                }
                Ok(1.0 - 1.0 / (x * x.ln()))
            }
            ShapeKind::HypergeomExp { a, b, c } => {
                let ln_f = pfq_ln(a, b, c * x)?;
                let mut lead = *c;
                for &ai in a {
                    lead *= ai;
                }
                for &bi in b {
                    lead /= bi;
                }
                let up: Vec<f64> = a.iter().map(|v| v + 1.0).collect();
                let dn: Vec<f64> = b.iter().map(|v| v + 1.0).collect();
                let ln_fp = pfq_ln(&up, &dn, c * x)?;
                Ok(1.0 - lead * (ln_fp - ln_f).exp())
            }
            ShapeKind::Custom { .. } => {
                let step = 1e-6 * x.max(1.0);
                let hi = self.h_eval(x + step)?;
                let lo = self.h_eval((x - step).max(0.0))?;
                let here = self.h_eval(x)?;
                if here <= 0.0 {
                    return Err(Error::Domain(format!(
                        "log-derivative needs h(x) > 0 at x = {x}"
                    )));
                }
                Ok(-(hi - lo) / (2.0 * step) / here)
            }
        }
    }

    /// Whether the radial law at `a = n/2` has a closed-form sampler.
    pub fn has_radial_sampler(&self) -> bool {
        matches!(
            self.kind,
            ShapeKind::Exponential | ShapeKind::TPrime { .. } | ShapeKind::Power { .. }
        )
    }

    /// Log of the trace density under the identity scale:
    /// `y^{nm/2 - 1} h(y) / gamma_0(n/2)`.
    pub fn radial_logpdf(&self, y: f64) -> Result<f64> {
        if !(y > 0.0) {
            return Err(Error::Domain(format!("radial argument {y} must be positive")));
        }
        let s0 = self.n * self.m as f64 / 2.0;
        Ok((s0 - 1.0) * y.ln() + self.ln_h(y)? - self.gamma0_ln)
    }

    /// Signed value of the radial density (meaningful for the
    /// log-weighted shape where the log form does not exist below 1).
    pub fn radial_density(&self, y: f64) -> Result<f64> {
        if !(y > 0.0) {
            return Err(Error::Domain(format!("radial argument {y} must be positive")));
        }
        let s0 = self.n * self.m as f64 / 2.0;
        Ok(((s0 - 1.0) * y.ln() - self.gamma0_ln).exp() * self.h_eval(y)?)
    }
}
