//! Moments, integral transforms, eigenvalue laws, region probabilities and
//! matrix-ratio densities for the shape-generator family.
//!
//! Everything in this module is a zonal-polynomial expansion indexed by
//! partition weight.  Layers are summed with [`LayerAccum`] and every term is
//! assembled in sign/log form: a weight-`k` zonal polynomial is evaluated at
//! eigenvalues rescaled to unit size, and the true scale re-enters as
//! `k * ln(scale)` added to the log-coefficient before a single `exp`.  The
//! large factorial, gamma and power contributions then cancel in log space,
//! which keeps expansions with hundreds of layers inside f64 range.

use nalgebra::DMatrix;
use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::dist::WgdParams;
use crate::error::{Error, Result};
use crate::generator::{ShapeGenerator, ShapeKind, SignLn};
use crate::matrix::{mv_gamma_ln, SpdMatrix, SymMatrix, DEFAULT_SYM_TOL};
use crate::partition::{gamma_m_partition_ln, ln_gen_pochhammer, Partition};
use crate::series::{LayerAccum, LayerStep, SeriesOptions, SeriesValue, Truncation};
use crate::zonal::ZonalTable;

/// Tolerated overshoot of a truncated probability series outside `[0, 1]`.
/// Larger excursions are reported as [`Error::NonconvergedSeries`] instead of
/// being clamped silently.
pub const PROB_CLAMP_TOL: f64 = 1e-6;

/// Eigenvalues rescaled to unit size for overflow-free zonal evaluation.
///
/// `C_kappa` is homogeneous of degree `k`, so `C_kappa(E) = s^k C_kappa(E/s)`
/// for any scale `s > 0`.  Nonnegative spectra are normalized by their trace
/// (each normalized zonal value then lies in `[0, 1]`); mixed-sign spectra by
/// the largest magnitude.
pub(crate) struct ScaledEigs {
    eigs: Vec<f64>,
    ln_scale: f64,
    /// Every eigenvalue is zero; only the weight-0 layer survives.
    zero: bool,
}

impl ScaledEigs {
    pub(crate) fn new(raw: &[f64]) -> ScaledEigs {
        let scale = if raw.iter().all(|&e| e >= 0.0) {
            raw.iter().sum::<f64>()
        } else {
            raw.iter().fold(0.0_f64, |acc, e| acc.max(e.abs()))
        };
        if !(scale > 0.0) {
            return ScaledEigs {
                eigs: vec![0.0; raw.len()],
                ln_scale: 0.0,
                zero: true,
            };
        }
        ScaledEigs {
            eigs: raw.iter().map(|e| e / scale).collect(),
            ln_scale: scale.ln(),
            zero: false,
        }
    }
}

/// Eigenvalues of a not-exactly-symmetric product, after symmetrizing away
/// the floating-point asymmetry.
pub(crate) fn sym_eigs(mat: DMatrix<f64>) -> Result<Vec<f64>> {
    let sym = 0.5 * (&mat + mat.transpose());
    Ok(SymMatrix::from_dmatrix(sym, DEFAULT_SYM_TOL)?.eigenvalues())
}

pub(crate) fn check_table(table: &ZonalTable, m: usize) -> Result<()> {
    if table.max_len() < m {
        return Err(Error::ParameterOutOfRange(format!(
            "zonal table holds partitions of at most {} rows, need {m}",
            table.max_len()
        )));
    }
    Ok(())
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Sum of `coef(kappa) * C_kappa(E)` over all partitions of weight `k` with
/// at most `m` rows.  `coef` supplies the coefficient in sign/log form; the
/// zonal scale of `E` is re-applied inside the exponent.
pub(crate) fn signed_layer<F>(
    table: &mut ZonalTable,
    k: usize,
    m: usize,
    arg: &ScaledEigs,
    mut coef: F,
) -> Result<f64>
where
    F: FnMut(&Partition) -> Result<SignLn>,
{
    if arg.zero {
        if k == 0 {
            let c = coef(&Partition::empty())?;
            return Ok(c.sign * c.ln_abs.exp());
        }
        return Ok(0.0);
    }
    table.ensure_weight(k)?;
    let wt = table.weight(k)?;
    let vals = wt.eval_all(&arg.eigs);
    let kf = k as f64;
    let mut layer = 0.0;
    for (kappa, cval) in wt.parts.iter().zip(vals.iter()) {
        if kappa.len() > m || *cval == 0.0 {
            continue;
        }
        let c = coef(kappa)?;
        if c.is_zero() {
            continue;
        }
        layer += c.sign * cval * (c.ln_abs + kf * arg.ln_scale).exp();
    }
    Ok(layer)
}

fn i_pow(k: usize) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `ln E[det(X)^r]`, assembled entirely in log space.
///
/// The closed form is a ratio of ordinary and multivariate gamma values
/// together with the ratio of radial moment integrals at shifted order, times
/// `r * ln det(scale)`.  Requires `r + n/2 > (m-1)/2` and a finite radial
/// moment at the shifted order.
pub fn log_det_expectation(params: &WgdParams, r: f64) -> Result<f64> {
    if r == 0.0 {
        return Ok(0.0);
    }
    let m = params.m();
    let n = params.n();
    let mf = m as f64;
    let a = r + 0.5 * n;
    if !(a > 0.5 * (mf - 1.0)) {
        return Err(Error::Domain(format!(
            "determinant moment needs r + n/2 > (m-1)/2, got r={r}, n={n}, m={m}"
        )));
    }
    let gen = params.generator();
    let half_nm = 0.5 * n * mf;
    let shifted = gen.gamma_k_ln(a, 0)?;
    Ok(ln_gamma(half_nm) - ln_gamma(a * mf) + mv_gamma_ln(m, a)? - mv_gamma_ln(m, 0.5 * n)?
        + shifted.ln_value
        - gen.gamma0_ln()
        + r * params.sigma().ln_det())
}

/// `E[det(X)^r]` by the closed gamma-ratio formula; exactly 1 at `r = 0`.
pub fn det_moment(params: &WgdParams, r: f64) -> Result<f64> {
    Ok(log_det_expectation(params, r)?.exp())
}

/// `E[C_kappa(X)]` with the order-`k` radial moment and the partition
/// Pochhammer factor in place.
pub fn zonal_expectation(
    params: &WgdParams,
    kappa: &Partition,
    table: &mut ZonalTable,
) -> Result<f64> {
    let m = params.m();
    let n = params.n();
    if kappa.len() > m {
        return Err(Error::ParameterOutOfRange(format!(
            "partition {kappa} has more than m={m} parts"
        )));
    }
    let k = kappa.weight();
    let gen = params.generator();
    let gk = gen.gamma_k_ln(0.5 * n, k as u32)?;
    let (psign, pln) = ln_gen_pochhammer(0.5 * n, kappa);
    if psign == 0.0 {
        return Ok(0.0);
    }
    let half_nm = 0.5 * n * m as f64;
    let c = table.zonal_matrix(kappa, params.sigma().sym())?;
    let ln = ln_gamma(half_nm) + pln + gk.ln_value
        - gen.gamma0_ln()
        - ln_gamma(half_nm + k as f64);
    Ok(psign * c * ln.exp())
}

/// Zonal expectation without the order-`k` moment correction: the compact
/// display `Γ(nm/2)/(Γ_m(n/2)γ_0) · C_kappa(scale)`.  Kept for diagnostic
/// comparison only; the default form is the one validated by simulation.
pub fn zonal_expectation_literal(
    params: &WgdParams,
    kappa: &Partition,
    table: &mut ZonalTable,
) -> Result<f64> {
    let m = params.m();
    let n = params.n();
    if kappa.len() > m {
        return Err(Error::ParameterOutOfRange(format!(
            "partition {kappa} has more than m={m} parts"
        )));
    }
    let gen = params.generator();
    let half_nm = 0.5 * n * m as f64;
    let c = table.zonal_matrix(kappa, params.sigma().sym())?;
    let ln = ln_gamma(half_nm) - mv_gamma_ln(m, 0.5 * n)? - gen.gamma0_ln();
    Ok(c * ln.exp())
}

/// Characteristic function `E[etr(iTX)]` as a zonal series.
///
/// Term `k` carries the phase `i^k` on the real zonal values of the
/// symmetrized product `scale^{1/2} T scale^{1/2}`, the order-`k` radial
/// moment, and a gamma ratio.  `T = 0` returns exactly 1.  For heavy-tailed
/// shapes only finitely many radial moments exist; the series then stops at
/// the last finite order (the classical finite-moment expansion of a
/// characteristic function that is not analytic at the origin).
pub fn cf_series(
    params: &WgdParams,
    t: &SymMatrix,
    table: &mut ZonalTable,
    trunc: &Truncation,
) -> Result<SeriesValue<Complex64>> {
    let m = params.m();
    let n = params.n();
    check_dim(m, t.dim())?;
    check_table(table, m)?;
    let sq = params.sigma().sqrt();
    let eigs = sym_eigs(sq.mat() * t.mat() * sq.mat())?;
    let arg = ScaledEigs::new(&eigs);
    if arg.zero {
        return Ok(SeriesValue {
            value: Complex64::new(1.0, 0.0),
            terms_used: 1,
            last_layer_magnitude: 0.0,
            converged: true,
        });
    }
    let gen = params.generator();
    let half_nm = 0.5 * n * m as f64;
    let g0 = gen.gamma0_ln();
    let mut accum: LayerAccum<Complex64> = LayerAccum::new(*trunc, SeriesOptions::default());
    for k in 0..=trunc.max_degree {
        let kf = k as f64;
        let gk = match gen.gamma_k_ln(0.5 * n, k as u32) {
            Ok(g) => g,
            Err(Error::DivergentIntegral(_)) if k > 0 => break,
            Err(e) => return Err(e),
        };
        let common =
            ln_gamma(half_nm) + gk.ln_value - g0 - ln_gamma(half_nm + kf) - ln_gamma(kf + 1.0);
        let real = signed_layer(table, k, m, &arg, |kappa| {
            let (s, l) = ln_gen_pochhammer(0.5 * n, kappa);
            Ok(SignLn::new(s, l + common))
        })?;
        if let LayerStep::Converged = accum.push(i_pow(k) * real)? {
            break;
        }
    }
    accum.finish()
}

/// Closed-form characteristic function of the classical matrix case:
/// principal-branch power of the complex determinant `det(I - 2iT·scale)`.
pub fn wishart_cf_closed(sigma: &SpdMatrix, n: f64, t: &SymMatrix) -> Result<Complex64> {
    check_dim(sigma.dim(), t.dim())?;
    let sq = sigma.sqrt();
    let eigs = sym_eigs(sq.mat() * t.mat() * sq.mat())?;
    let mut ln_sum = Complex64::new(0.0, 0.0);
    for lam in eigs {
        let factor = Complex64::new(1.0, -2.0 * lam);
        if factor.norm() < 1e-300 {
            return Err(Error::SingularMatrix);
        }
        ln_sum += factor.ln();
    }
    Ok((-0.5 * n * ln_sum).exp())
}

fn laplace_inner(
    params: &WgdParams,
    s: f64,
    table: &mut ZonalTable,
    trunc: &Truncation,
    with_shape_coeffs: bool,
) -> Result<SeriesValue<f64>> {
    if !(s > 0.0) {
        return Err(Error::Domain(format!("transform argument must be > 0, got {s}")));
    }
    let m = params.m();
    let n = params.n();
    check_table(table, m)?;
    let gen = params.generator();
    if with_shape_coeffs && !gen.has_taylor() {
        return Err(Error::NoTaylorExpansion(gen.kind_name()));
    }
    let inv_eigs: Vec<f64> = params.sigma().eigenvalues().iter().map(|e| 1.0 / e).collect();
    let arg = ScaledEigs::new(&inv_eigs);
    let half_nm = 0.5 * n * m as f64;
    let pref = ln_gamma(half_nm) - gen.gamma0_ln() - 0.5 * n * params.sigma().ln_det();
    let ln_s = s.ln();
    let mut accum: LayerAccum<f64> = LayerAccum::new(*trunc, SeriesOptions::default());
    for k in 0..=trunc.max_degree {
        let kf = k as f64;
        let h = if with_shape_coeffs {
            gen.taylor_coeff(k as u32)?
        } else {
            SignLn::new(1.0, 0.0)
        };
        // Shapes like the power-exponential have zero derivatives between
        // multiples of b; skip those layers so the convergence streak only
        // judges layers that actually contribute.
        if h.is_zero() {
            if k == 0 {
                accum.push(0.0)?;
            }
            continue;
        }
        let common = h.ln_abs - ln_gamma(kf + 1.0) - (half_nm + kf) * ln_s;
        let layer = signed_layer(table, k, m, &arg, |kappa| {
            let (ps, pl) = ln_gen_pochhammer(0.5 * n, kappa);
            Ok(SignLn::new(ps * h.sign, pl + common))
        })?;
        if let LayerStep::Converged = accum.push(layer)? {
            break;
        }
    }
    Ok(accum.finish()?.map(|v| v * pref.exp()))
}

/// Laplace transform `E[etr(-sX)]` as a zonal series in `s^{-(nm/2+k)}`.
///
/// Each order carries the `k`-th derivative of the shape function at the
/// origin, so a Taylor expansion of the shape is required.  Writing `rho` for
/// the spectral radius of the inverse scale, the layers decay geometrically
/// once `s` exceeds `rho` times the growth rate of `|h^(k)(0)|/k!` (1/2 for
/// the classical exponential shape, the reciprocal Taylor radius for shapes
/// with a finite radius).  When the derivative pattern decays too slowly for
/// that product to be finite (heavy tails, super-exponential decay) the
/// expansion is only asymptotic in `1/s`: truncate before the smallest layer
/// at large `s`, or the divergence guard reports the growth.
pub fn laplace_series(
    params: &WgdParams,
    s: f64,
    table: &mut ZonalTable,
    trunc: &Truncation,
) -> Result<SeriesValue<f64>> {
    laplace_inner(params, s, table, trunc, true)
}

/// The same `s^{-(nm/2+k)}` series without the shape-derivative factors, as
/// the compact display writes it.  Diagnostic only: for every shape other
/// than the trivial constant it differs from the transform that simulation
/// validates.
pub fn laplace_series_literal(
    params: &WgdParams,
    s: f64,
    table: &mut ZonalTable,
    trunc: &Truncation,
) -> Result<SeriesValue<f64>> {
    laplace_inner(params, s, table, trunc, false)
}

/// Log of the joint eigenvalue density at `lambdas` (weakly descending,
/// positive).  Coincident eigenvalues give a legitimate `-inf` (the repulsion
/// factor vanishes).  The zonal series is summed from weight 0 and divided by
/// `C_kappa(I_m)` termwise.
pub fn eig_joint_logpdf(
    params: &WgdParams,
    lambdas: &[f64],
    table: &mut ZonalTable,
    trunc: &Truncation,
) -> Result<SeriesValue<f64>> {
    let m = params.m();
    let n = params.n();
    check_dim(m, lambdas.len())?;
    check_table(table, m)?;
    for w in lambdas.windows(2) {
        if w[1] > w[0] {
            return Err(Error::Domain(
                "eigenvalues must be in descending order".into(),
            ));
        }
    }
    if !(lambdas[m - 1] > 0.0) {
        return Err(Error::Domain("eigenvalues must be positive".into()));
    }
    if lambdas.windows(2).any(|w| w[0] == w[1]) {
        return Ok(SeriesValue {
            value: f64::NEG_INFINITY,
            terms_used: 0,
            last_layer_magnitude: 0.0,
            converged: true,
        });
    }
    let gen = params.generator();
    if !gen.has_taylor() {
        return Err(Error::NoTaylorExpansion(gen.kind_name()));
    }
    let mf = m as f64;
    let half_nm = 0.5 * n * mf;
    let mut pref = 0.5 * mf * mf * std::f64::consts::PI.ln() + ln_gamma(half_nm)
        - 0.5 * n * params.sigma().ln_det()
        - mv_gamma_ln(m, 0.5 * mf)?
        - mv_gamma_ln(m, 0.5 * n)?
        - gen.gamma0_ln();
    for i in 0..m {
        for j in (i + 1)..m {
            pref += (lambdas[i] - lambdas[j]).ln();
        }
        pref += 0.5 * (n - mf - 1.0) * lambdas[i].ln();
    }
    let inv_eigs: Vec<f64> = params.sigma().eigenvalues().iter().map(|e| 1.0 / e).collect();
    let si = ScaledEigs::new(&inv_eigs);
    let la = ScaledEigs::new(lambdas);
    let mut accum: LayerAccum<f64> = LayerAccum::new(*trunc, SeriesOptions::default());
    for k in 0..=trunc.max_degree {
        let kf = k as f64;
        let h = gen.taylor_coeff(k as u32)?;
        if h.is_zero() {
            if k == 0 {
                accum.push(0.0)?;
            }
            continue;
        }
        table.ensure_weight(k)?;
        let wt = table.weight(k)?;
        let v_scale = wt.eval_all(&si.eigs);
        let v_lam = wt.eval_all(&la.eigs);
        let mut layer = 0.0;
        for ((kappa, cs), cl) in wt.parts.iter().zip(v_scale.iter()).zip(v_lam.iter()) {
            if kappa.len() > m || *cs == 0.0 || *cl == 0.0 {
                continue;
            }
            let c_id = zonal_at_identity_ln_checked(kappa, m)?;
            let ln = h.ln_abs - ln_gamma(kf + 1.0) + kf * (si.ln_scale + la.ln_scale) - c_id;
            layer += h.sign * cs * cl * ln.exp();
        }
        if let LayerStep::Converged = accum.push(layer)? {
            break;
        }
    }
    let series = accum.finish()?;
    if !(series.value > 0.0) {
        return Err(Error::NonpositiveDensity {
            trace: lambdas.iter().sum(),
        });
    }
    Ok(series.map(|v| v.ln() + pref))
}

fn zonal_at_identity_ln_checked(kappa: &Partition, m: usize) -> Result<f64> {
    crate::partition::zonal_at_identity_ln(kappa, m).ok_or_else(|| {
        Error::ParameterOutOfRange(format!("partition {kappa} has more than {m} parts"))
    })
}

/// `P(X < A)` (matrix order) as a convergent zonal series.
///
/// The series is an expansion of the truncated density integral in the
/// eigenvalues of `B = A^{1/2} scale^{-1} A^{1/2}`, with the
/// `det(A)^{n/2} det(scale)^{-n/2}` prefactor in place and layers summed from
/// weight 0.  Two expansions of the same integral are used:
///
/// * shapes with derivatives available at an arbitrary point (exponential and
///   t-prime) are expanded about `t0 = tr B`, which yields an all-positive,
///   cancellation-free series valid for every `A`;
/// * all other Taylor shapes are expanded about the origin, valid while
///   `tr B` stays inside the expansion radius.
///
/// The truncated value is clamped to `[0, 1]`; an excursion beyond
/// [`PROB_CLAMP_TOL`] is reported as [`Error::NonconvergedSeries`].
pub fn prob_less_than(
    params: &WgdParams,
    a_mat: &SpdMatrix,
    table: &mut ZonalTable,
    trunc: &Truncation,
) -> Result<SeriesValue<f64>> {
    let m = params.m();
    let n = params.n();
    check_dim(m, a_mat.dim())?;
    check_table(table, m)?;
    let gen = params.generator();
    let mf = m as f64;
    let half_nm = 0.5 * n * mf;
    let a_half = a_mat.sqrt();
    let b_eigs = sym_eigs(a_half.mat() * params.sigma().inv_mat() * a_half.mat())?;
    let t0: f64 = b_eigs.iter().sum();
    let arg = ScaledEigs::new(&b_eigs);
    let pref = 0.5 * n * (a_mat.ln_det() - params.sigma().ln_det()) + ln_gamma(half_nm)
        - gen.gamma0_ln()
        + mv_gamma_ln(m, 0.5 * (mf + 1.0))?
        - mv_gamma_ln(m, 0.5 * (n + mf + 1.0))?;
    let endpoint = matches!(gen.kind(), ShapeKind::Exponential | ShapeKind::TPrime { .. });
    if !endpoint {
        let radius = gen.taylor_radius()?;
        if t0 >= radius {
            return Err(Error::Domain(format!(
                "region trace {t0} is outside the shape expansion radius {radius}"
            )));
        }
    }
    let mut accum: LayerAccum<f64> = LayerAccum::new(*trunc, SeriesOptions::default());
    for k in 0..=trunc.max_degree {
        let kf = k as f64;
        let h = if endpoint {
            let c = gen.taylor_coeff_at(t0, k as u32)?;
            // (-1)^k pairs with the k-th derivative at t0; for both shapes
            // the product is positive, so the layers never cancel.
            SignLn::new(if k % 2 == 0 { c.sign } else { -c.sign }, c.ln_abs)
        } else {
            gen.taylor_coeff(k as u32)?
        };
        if h.is_zero() {
            if k == 0 {
                accum.push(0.0)?;
            }
            continue;
        }
        let common = h.ln_abs - ln_gamma(kf + 1.0);
        let layer = signed_layer(table, k, m, &arg, |kappa| {
            let (ns, nl) = if endpoint {
                ln_gen_pochhammer(0.5 * (mf + 1.0), kappa)
            } else {
                ln_gen_pochhammer(0.5 * n, kappa)
            };
            let (_, dl) = ln_gen_pochhammer(0.5 * (n + mf + 1.0), kappa);
            Ok(SignLn::new(h.sign * ns, nl - dl + common))
        })?;
        if let LayerStep::Converged = accum.push(layer)? {
            break;
        }
    }
    let series = accum.finish()?.map(|v| v * pref.exp());
    if series.value < -PROB_CLAMP_TOL || series.value > 1.0 + PROB_CLAMP_TOL {
        return Err(Error::NonconvergedSeries(format!(
            "truncated probability {} is outside [0, 1]",
            series.value
        )));
    }
    Ok(series.map(|v| v.clamp(0.0, 1.0)))
}

/// CDF of the largest eigenvalue: `P(X < aI)` by delegation.
pub fn lmax_cdf(
    params: &WgdParams,
    a: f64,
    table: &mut ZonalTable,
    trunc: &Truncation,
) -> Result<SeriesValue<f64>> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("threshold must be > 0, got {a}")));
    }
    let a_mat = SpdMatrix::scaled_identity(params.m(), a)?;
    prob_less_than(params, &a_mat, table, trunc)
}

fn region_series_literal(
    params: &WgdParams,
    arg_eigs: &[f64],
    extra_ln_per_k: f64,
    table: &mut ZonalTable,
    trunc: &Truncation,
) -> Result<SeriesValue<f64>> {
    let m = params.m();
    let n = params.n();
    check_table(table, m)?;
    let gen = params.generator();
    let mf = m as f64;
    let half_nm = 0.5 * n * mf;
    let pref = ln_gamma(half_nm) - mv_gamma_ln(m, 0.5 * n)? - gen.gamma0_ln()
        - 0.5 * n * params.sigma().ln_det();
    let arg = ScaledEigs::new(arg_eigs);
    let mut accum: LayerAccum<f64> = LayerAccum::new(*trunc, SeriesOptions::default());
    // The display sums from weight 1: the weight-0 layer is absent.
    for k in 1..=trunc.max_degree {
        let kf = k as f64;
        let h = gen.taylor_coeff(k as u32)?;
        if h.is_zero() {
            continue;
        }
        let common = h.ln_abs - ln_gamma(kf + 1.0) + kf * extra_ln_per_k;
        let layer = signed_layer(table, k, m, &arg, |kappa| {
            let num1 = gamma_m_partition_ln(m, 0.5 * n, kappa)?;
            let num2 = gamma_m_partition_ln(m, 0.5 * (mf + 1.0), kappa)?;
            let den = gamma_m_partition_ln(m, 0.5 * (n + mf + 1.0), kappa)?;
            Ok(SignLn::new(h.sign, num1 + num2 - den + common))
        })?;
        if let LayerStep::Converged = accum.push(layer)? {
            break;
        }
    }
    Ok(accum.finish()?.map(|v| v * pref.exp()))
}

/// The region probability series in its compact displayed form: no
/// `det(A)^{n/2}` prefactor, partition-shifted gamma ratios, and the k-sum
/// starting at weight 1.  Diagnostic only — the values are not probabilities.
pub fn prob_less_than_literal(
    params: &WgdParams,
    a_mat: &SpdMatrix,
    table: &mut ZonalTable,
    trunc: &Truncation,
) -> Result<SeriesValue<f64>> {
    check_dim(params.m(), a_mat.dim())?;
    let a_half = a_mat.sqrt();
    let eigs = sym_eigs(a_half.mat() * params.sigma().inv_mat() * a_half.mat())?;
    region_series_literal(params, &eigs, 0.0, table, trunc)
}

/// The largest-eigenvalue series in its compact displayed form (`a^k` on the
/// inverse-scale zonal values, no `a^{nm/2}` prefactor, k from 1).
/// Diagnostic only.
pub fn lmax_cdf_literal(
    params: &WgdParams,
    a: f64,
    table: &mut ZonalTable,
    trunc: &Truncation,
) -> Result<SeriesValue<f64>> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("threshold must be > 0, got {a}")));
    }
    let inv_eigs: Vec<f64> = params.sigma().eigenvalues().iter().map(|e| 1.0 / e).collect();
    region_series_literal(params, &inv_eigs, a.ln(), table, trunc)
}

fn trace_pdf_inner(
    params: &WgdParams,
    y: f64,
    table: &mut ZonalTable,
    trunc: &Truncation,
    with_shape_coeffs: bool,
) -> Result<SeriesValue<f64>> {
    if !(y > 0.0) {
        return Err(Error::Domain(format!("trace value must be > 0, got {y}")));
    }
    let m = params.m();
    let n = params.n();
    check_table(table, m)?;
    let gen = params.generator();
    if with_shape_coeffs && !gen.has_taylor() {
        return Err(Error::NoTaylorExpansion(gen.kind_name()));
    }
    let half_nm = 0.5 * n * m as f64;
    let mut pref = ln_gamma(half_nm) - 0.5 * n * params.sigma().ln_det() - gen.gamma0_ln();
    if !with_shape_coeffs {
        // The compact display carries a spurious e^{-y} in front.
        pref -= y;
    }
    let inv_eigs: Vec<f64> = params.sigma().eigenvalues().iter().map(|e| 1.0 / e).collect();
    let arg = ScaledEigs::new(&inv_eigs);
    let ln_y = y.ln();
    let mut accum: LayerAccum<f64> = LayerAccum::new(*trunc, SeriesOptions::default());
    for k in 0..=trunc.max_degree {
        let kf = k as f64;
        let h = if with_shape_coeffs {
            gen.taylor_coeff(k as u32)?
        } else {
            SignLn::new(1.0, 0.0)
        };
        if h.is_zero() {
            if k == 0 {
                accum.push(0.0)?;
            }
            continue;
        }
        let common =
            h.ln_abs - ln_gamma(kf + 1.0) - ln_gamma(half_nm + kf) + (half_nm + kf - 1.0) * ln_y;
        let layer = signed_layer(table, k, m, &arg, |kappa| {
            let (ps, pl) = ln_gen_pochhammer(0.5 * n, kappa);
            Ok(SignLn::new(ps * h.sign, pl + common))
        })?;
        if let LayerStep::Converged = accum.push(layer)? {
            break;
        }
    }
    Ok(accum.finish()?.map(|v| v * pref.exp()))
}

/// Density of `tr X` as a zonal series with the shape-derivative factors in
/// place.  Converges while `y` times the spectral radius of the inverse
/// scale stays inside the shape expansion radius.
pub fn trace_pdf(
    params: &WgdParams,
    y: f64,
    table: &mut ZonalTable,
    trunc: &Truncation,
) -> Result<SeriesValue<f64>> {
    trace_pdf_inner(params, y, table, trunc, true)
}

/// The trace-density series in its compact displayed form (leading `e^{-y}`,
/// no shape-derivative factors).  Diagnostic only: it does not integrate to 1
/// for any non-trivial shape, and tests record its disagreement with the
/// exact isotropic density.
pub fn trace_pdf_literal(
    params: &WgdParams,
    y: f64,
    table: &mut ZonalTable,
    trunc: &Truncation,
) -> Result<SeriesValue<f64>> {
    trace_pdf_inner(params, y, table, trunc, false)
}

/// Exact density of `tr X` for an isotropic scale `sigma2 * I`:
/// `y^{nm/2-1} h(y/sigma2) / (sigma2^{nm/2} gamma_0)` by radial
/// decomposition.  Authoritative oracle for the series form.
pub fn trace_pdf_exact_iso(gen: &ShapeGenerator, sigma2: f64, y: f64) -> Result<f64> {
    if !(sigma2 > 0.0) {
        return Err(Error::Domain(format!("scale must be > 0, got {sigma2}")));
    }
    if !(y > 0.0) {
        return Err(Error::Domain(format!("trace value must be > 0, got {y}")));
    }
    let u = y / sigma2;
    if u >= gen.support_end() {
        return Ok(0.0);
    }
    let half_nm = 0.5 * gen.n() * gen.m() as f64;
    let h = gen.h_eval(u)?;
    Ok(h * ((half_nm - 1.0) * u.ln() - gen.gamma0_ln()).exp() / sigma2)
}

/// `sigma2` if the scale matrix is `sigma2 * I` within floating tolerance.
fn isotropic_scale(sigma: &SpdMatrix) -> Option<f64> {
    let m = sigma.dim();
    let s = sigma.mat()[(0, 0)];
    for i in 0..m {
        for j in 0..m {
            let expect = if i == j { s } else { 0.0 };
            if (sigma.mat()[(i, j)] - expect).abs() > 1e-12 * s.abs() {
                return None;
            }
        }
    }
    Some(s)
}

/// `E[(tr X)^r]`.
///
/// For nonnegative integer `r` this is a single finite zonal layer of weight
/// `r` times a gamma/radial-moment ratio (the expansion of `(tr X)^r` into
/// zonal polynomials integrates term by term).  For non-integer `r` the
/// moment is available for isotropic scale via the radial representation.
pub fn trace_moment(
    params: &WgdParams,
    r: f64,
    table: &mut ZonalTable,
) -> Result<SeriesValue<f64>> {
    let m = params.m();
    let n = params.n();
    check_table(table, m)?;
    let gen = params.generator();
    if r == 0.0 {
        return Ok(SeriesValue {
            value: 1.0,
            terms_used: 1,
            last_layer_magnitude: 0.0,
            converged: true,
        });
    }
    let rounded = r.round();
    if (r - rounded).abs() < 1e-9 && rounded >= 0.0 {
        let ri = rounded as usize;
        let rf = rounded;
        let half_nm = 0.5 * n * m as f64;
        let gk = gen.gamma_k_ln(0.5 * n, ri as u32)?;
        let common =
            ln_gamma(half_nm) + gk.ln_value - gen.gamma0_ln() - ln_gamma(half_nm + rf);
        let arg = ScaledEigs::new(&params.sigma().eigenvalues().to_vec());
        let value = signed_layer(table, ri, m, &arg, |kappa| {
            let (ps, pl) = ln_gen_pochhammer(0.5 * n, kappa);
            Ok(SignLn::new(ps, pl + common))
        })?;
        return Ok(SeriesValue {
            value,
            terms_used: ri + 1,
            last_layer_magnitude: 0.0,
            converged: true,
        });
    }
    if let Some(s2) = isotropic_scale(params.sigma()) {
        let mf = m as f64;
        let shifted = gen.gamma_k_ln(0.5 * n + r / mf, 0)?;
        let value = (r * s2.ln() + shifted.ln_value - gen.gamma0_ln()).exp();
        return Ok(SeriesValue {
            value,
            terms_used: 1,
            last_layer_magnitude: 0.0,
            converged: true,
        });
    }
    Err(Error::Domain(
        "non-integer trace moments are available only for an isotropic scale".into(),
    ))
}

/// The trace-moment series in its compact displayed form: an infinite k-sum
/// with `Γ(nm/2+k+r)/Γ(nm/2+k)` growth and no shape-derivative factors.  It
/// diverges for every shape with unbounded support and is kept only so the
/// divergence can be demonstrated.
pub fn trace_moment_literal(
    params: &WgdParams,
    r: f64,
    table: &mut ZonalTable,
    trunc: &Truncation,
) -> Result<SeriesValue<f64>> {
    let m = params.m();
    let n = params.n();
    check_table(table, m)?;
    let gen = params.generator();
    let half_nm = 0.5 * n * m as f64;
    let pref = ln_gamma(half_nm) - 0.5 * n * params.sigma().ln_det() - gen.gamma0_ln();
    let inv_eigs: Vec<f64> = params.sigma().eigenvalues().iter().map(|e| 1.0 / e).collect();
    let arg = ScaledEigs::new(&inv_eigs);
    let mut accum: LayerAccum<f64> = LayerAccum::new(*trunc, SeriesOptions::default());
    for k in 0..=trunc.max_degree {
        let kf = k as f64;
        let common = ln_gamma(half_nm + kf + r) - ln_gamma(kf + 1.0) - ln_gamma(half_nm + kf);
        let layer = signed_layer(table, k, m, &arg, |kappa| {
            let (ps, pl) = ln_gen_pochhammer(0.5 * n, kappa);
            Ok(SignLn::new(ps, pl + common))
        })?;
        if let LayerStep::Converged = accum.push(layer)? {
            break;
        }
    }
    Ok(accum.finish()?.map(|v| v * pref.exp()))
}

/// `alpha/beta` recovered from the two proportional scale matrices.
fn scale_ratio(x_sigma: &SpdMatrix, w_sigma: &SpdMatrix) -> Result<f64> {
    check_dim(x_sigma.dim(), w_sigma.dim())?;
    let q = x_sigma.trace() / w_sigma.trace();
    let m = x_sigma.dim();
    let mut max_x = 0.0_f64;
    let mut max_diff = 0.0_f64;
    for i in 0..m {
        for j in 0..m {
            max_x = max_x.max(x_sigma.mat()[(i, j)].abs());
            max_diff = max_diff.max((x_sigma.mat()[(i, j)] - q * w_sigma.mat()[(i, j)]).abs());
        }
    }
    if max_diff > 1e-10 * max_x {
        return Err(Error::Domain(
            "ratio densities require proportional scale matrices".into(),
        ));
    }
    Ok(q)
}

struct RatioSetup {
    q: f64,
    a_np: f64,
    ln_pref_base: f64,
}

fn ratio_setup(x_params: &WgdParams, w_sigma: &SpdMatrix, p: f64) -> Result<RatioSetup> {
    let m = x_params.m();
    let mf = m as f64;
    let n = x_params.n();
    if !(p >= mf) {
        return Err(Error::ParameterOutOfRange(format!(
            "second-factor degrees of freedom must satisfy p >= m, got p={p}, m={m}"
        )));
    }
    let q = scale_ratio(x_params.sigma(), w_sigma)?;
    let gen = x_params.generator();
    let half_nm = 0.5 * n * mf;
    let ln_k = ln_gamma(half_nm) - mv_gamma_ln(m, 0.5 * n)? - gen.gamma0_ln();
    let ln_pref_base = ln_k + mv_gamma_ln(m, 0.5 * (n + p))?
        - 0.5 * p * mf * std::f64::consts::LN_2
        - mv_gamma_ln(m, 0.5 * p)?
        + 0.5 * p * mf * q.ln();
    Ok(RatioSetup {
        q,
        a_np: 0.5 * (n + p),
        ln_pref_base,
    })
}

fn ratio_series(
    x_params: &WgdParams,
    setup: &RatioSetup,
    arg: &ScaledEigs,
    ln_pref: f64,
    table: &mut ZonalTable,
    trunc: &Truncation,
) -> Result<SeriesValue<f64>> {
    let m = x_params.m();
    let gen = x_params.generator();
    let s_np = setup.a_np * m as f64;
    let ln_half_q = (0.5 * setup.q).ln();
    let opts = SeriesOptions {
        alternating_guard: true,
        ..SeriesOptions::default()
    };
    let mut accum: LayerAccum<f64> = LayerAccum::new(*trunc, opts);
    for k in 0..=trunc.max_degree {
        let kf = k as f64;
        let sign_k = if k % 2 == 0 { 1.0 } else { -1.0 };
        let gk = gen.gamma_k_ln(setup.a_np, k as u32)?;
        let common =
            kf * ln_half_q - ln_gamma(kf + 1.0) + gk.ln_value - ln_gamma(s_np + kf);
        let layer = signed_layer(table, k, m, arg, |kappa| {
            let (ps, pl) = ln_gen_pochhammer(setup.a_np, kappa);
            Ok(SignLn::new(sign_k * ps, pl + common))
        })?;
        if let LayerStep::Converged = accum.push(layer)? {
            break;
        }
    }
    Ok(accum.finish()?.map(|v| v * ln_pref.exp()))
}

/// Density of the first ratio form `B1 = X^{-1/2} Y X^{-1/2}` where the
/// numerator `Y` is a classical matrix variate with `p` degrees of freedom
/// and scale proportional to that of `X`.
///
/// Evaluated exactly as the alternating series in `(-alpha/(2beta))^k`; the
/// alternating guard raises [`Error::AlternatingSeriesNotConverged`] when the
/// layer magnitudes fail to decrease within the truncation budget (the series
/// has a bounded convergence region for exponential-type shapes).
pub fn ratio_b1_pdf(
    x_params: &WgdParams,
    w_sigma: &SpdMatrix,
    p: f64,
    b1: &SpdMatrix,
    table: &mut ZonalTable,
    trunc: &Truncation,
) -> Result<SeriesValue<f64>> {
    let m = x_params.m();
    check_dim(m, b1.dim())?;
    check_table(table, m)?;
    let setup = ratio_setup(x_params, w_sigma, p)?;
    let mf = m as f64;
    let ln_pref = setup.ln_pref_base + 0.5 * (p - mf - 1.0) * b1.ln_det();
    let arg = ScaledEigs::new(&b1.eigenvalues().to_vec());
    ratio_series(x_params, &setup, &arg, ln_pref, table, trunc)
}

/// Density of the second ratio form `B2 = (X+Y)^{-1/2} X (X+Y)^{-1/2}`,
/// supported on `0 < B2 < I`.  Same series as [`ratio_b1_pdf`] evaluated at
/// the zonal argument `B2^{-1} - I`.
///
/// The determinant prefactor carries `det(B2)^{-(p+m+1)/2}`: the `B2` power
/// inherited from the joint density is `(n-m-1)/2` and the change of
/// variables inside the series contributes `-(n+p)/2`, which together leave
/// an exponent governed by the classical degrees of freedom `p`.  (Swapping
/// `n` for `p` here breaks normalization whenever `n != p`; the scalar
/// exponential case must reduce to a Beta(n/2, p/2) law, which pins the
/// exponent.)
pub fn ratio_b2_pdf(
    x_params: &WgdParams,
    w_sigma: &SpdMatrix,
    p: f64,
    b2: &SpdMatrix,
    table: &mut ZonalTable,
    trunc: &Truncation,
) -> Result<SeriesValue<f64>> {
    let m = x_params.m();
    check_dim(m, b2.dim())?;
    check_table(table, m)?;
    let mu = b2.eigenvalues();
    if mu.iter().any(|&e| e >= 1.0) {
        return Err(Error::Domain(
            "second ratio form needs 0 < B2 < I (all eigenvalues below 1)".into(),
        ));
    }
    let setup = ratio_setup(x_params, w_sigma, p)?;
    let mf = m as f64;
    let mut ln_pref = setup.ln_pref_base;
    for &e in mu {
        ln_pref += -0.5 * (p + mf + 1.0) * e.ln() + 0.5 * (p - mf - 1.0) * (1.0 - e).ln();
    }
    let transformed: Vec<f64> = mu.iter().map(|&e| 1.0 / e - 1.0).collect();
    let arg = ScaledEigs::new(&transformed);
    ratio_series(x_params, &setup, &arg, ln_pref, table, trunc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::ShapeGenerator;
    use crate::matrix::spd_from_entries;
    use crate::quad::{integrate, integrate_zero_inf, QuadOptions};
    use crate::sampling::{mc_estimate, sample_wgd, RngStream};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use nalgebra::DMatrix;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use statrs::distribution::{Continuous, Gamma};

    fn spd(m: usize, entries: &[f64]) -> SpdMatrix {
        spd_from_entries(m, entries, DEFAULT_SYM_TOL).unwrap()
    }

    fn wgd(sigma: SpdMatrix, n: f64, gen: ShapeGenerator) -> WgdParams {
        WgdParams::new(sigma, n, gen).unwrap()
    }

    fn exp_params(sigma: SpdMatrix, n: f64) -> WgdParams {
        let m = sigma.dim();
        wgd(sigma, n, ShapeGenerator::exponential(n, m).unwrap())
    }

    fn tprime_params(sigma: SpdMatrix, n: f64, p: f64) -> WgdParams {
        let m = sigma.dim();
        wgd(sigma, n, ShapeGenerator::t_prime(p, n, m).unwrap())
    }

    fn random_spd(m: usize, rng: &mut ChaCha12Rng) -> SpdMatrix {
        let a = DMatrix::from_fn(m, m, |_, _| rng.random::<f64>() - 0.5);
        let mat = &a * a.transpose() + DMatrix::identity(m, m) * 0.3;
        SpdMatrix::from_dmatrix(mat, DEFAULT_SYM_TOL).unwrap()
    }

    fn random_orthogonal(m: usize, rng: &mut ChaCha12Rng) -> DMatrix<f64> {
        let a = DMatrix::from_fn(m, m, |_, _| rng.random::<f64>() - 0.5);
        a.qr().q()
    }

    // --- determinant moments -------------------------------------------------

    #[test]
    fn det_moment_r_zero_is_one_for_every_shape() {
        let n = 4.0;
        let m = 2;
        let sigma = spd(2, &[1.4, 0.3, 0.3, 0.9]);
        let gens = vec![
            ShapeGenerator::exponential(n, m).unwrap(),
            ShapeGenerator::t_prime(3.0, n, m).unwrap(),
            ShapeGenerator::kummer(1.5, 0.5, n, m).unwrap(),
            ShapeGenerator::sin_gaussian(0.5, 1.0, n, m).unwrap(),
        ];
        for gen in gens {
            let params = wgd(sigma.clone(), n, gen);
            assert_eq!(det_moment(&params, 0.0).unwrap(), 1.0);
            assert_eq!(log_det_expectation(&params, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn det_moment_matches_classical_closed_form() {
        // Scalar case: E[X] = n*sigma = 2 at n=2, sigma=1.
        let p1 = exp_params(spd(1, &[1.0]), 2.0);
        assert_relative_eq!(det_moment(&p1, 1.0).unwrap(), 2.0, max_relative = 1e-12);
        assert_relative_eq!(
            log_det_expectation(&p1, 1.0).unwrap(),
            2.0_f64.ln(),
            max_relative = 1e-12
        );

        // Matrix case against E[det X^r] = 2^{mr} det(S)^r Gamma_m(n/2+r)/Gamma_m(n/2).
        let sigma = spd(2, &[1.3, -0.2, -0.2, 0.8]);
        let (n, r) = (3.0, 2.0);
        let params = exp_params(sigma.clone(), n);
        let expect = (2.0 * r * 2.0_f64.ln()
            + r * sigma.ln_det()
            + mv_gamma_ln(2, 0.5 * n + r).unwrap()
            - mv_gamma_ln(2, 0.5 * n).unwrap())
        .exp();
        assert_relative_eq!(det_moment(&params, r).unwrap(), expect, max_relative = 1e-10);
    }

    #[test]
    fn det_moment_heavy_tail_matches_simulation() {
        let params = tprime_params(SpdMatrix::identity(2), 3.0, 4.0);
        let est = mc_estimate(|x| x.ln_det().exp(), &params, 200_000, 77).unwrap();
        let exact = det_moment(&params, 1.0).unwrap();
        assert!(
            (exact - est.mean).abs() <= 3.0 * est.stderr,
            "det moment {exact} vs MC {} +- {}",
            est.mean,
            est.stderr
        );
    }

    #[test]
    fn det_moment_rejects_out_of_domain_order() {
        let params = exp_params(spd(2, &[1.0, 0.0, 0.0, 1.0]), 3.0);
        // r + n/2 <= (m-1)/2 has no finite multivariate gamma.
        assert!(matches!(
            det_moment(&params, -1.2),
            Err(Error::Domain(_))
        ));
    }

    // --- zonal expectations --------------------------------------------------

    #[test]
    fn zonal_expectation_weight_one_is_mean_trace() {
        let mut table = ZonalTable::new(3);
        let params = exp_params(SpdMatrix::identity(3), 4.0);
        let k1 = Partition::new(vec![1]).unwrap();
        let v = zonal_expectation(&params, &k1, &mut table).unwrap();
        assert_relative_eq!(v, 12.0, max_relative = 1e-10);

        // C_(1) = tr, so the weight-one expectation must agree with the trace moment.
        let sigma = spd(2, &[1.5, 0.4, 0.4, 0.7]);
        let params = tprime_params(sigma, 3.0, 5.0);
        let mut table2 = ZonalTable::new(2);
        let v1 = zonal_expectation(&params, &k1, &mut table2).unwrap();
        let t1 = trace_moment(&params, 1.0, &mut table2).unwrap();
        assert_relative_eq!(v1, t1.value, max_relative = 1e-12);
    }

    #[test]
    fn zonal_expectation_weight_two_matches_simulation() {
        let params = tprime_params(SpdMatrix::identity(2), 3.0, 5.0);
        let kappa = Partition::new(vec![2]).unwrap();
        let mut table = ZonalTable::new(2);
        let exact = zonal_expectation(&params, &kappa, &mut table).unwrap();
        table.ensure_weight(2).unwrap();
        let wt = table.weight(2).unwrap().clone();
        let est = mc_estimate(
            |x| {
                let eigs = x.eigenvalues();
                let vals = wt.eval_all(eigs);
                // First stored partition of weight 2 is (2) in the fixed order.
                vals[wt.parts.iter().position(|p| p.parts() == [2]).unwrap()]
            },
            &params,
            200_000,
            91,
        )
        .unwrap();
        assert!(
            (exact - est.mean).abs() <= 3.0 * est.stderr,
            "zonal expectation {exact} vs MC {} +- {}",
            est.mean,
            est.stderr
        );
    }

    #[test]
    fn zonal_expectation_literal_omits_moment_ratio() {
        let params = exp_params(SpdMatrix::identity(2), 3.0);
        let kappa = Partition::new(vec![1]).unwrap();
        let mut table = ZonalTable::new(2);
        let corrected = zonal_expectation(&params, &kappa, &mut table).unwrap();
        let literal = zonal_expectation_literal(&params, &kappa, &mut table).unwrap();
        assert!((corrected - literal).abs() > 1e-3 * corrected.abs());
    }

    // --- characteristic function --------------------------------------------

    #[test]
    fn cf_at_zero_is_exactly_one() {
        let params = tprime_params(SpdMatrix::identity(2), 3.0, 4.0);
        let mut table = ZonalTable::new(2);
        let t = SymMatrix::zeros(2);
        let v = cf_series(&params, &t, &mut table, &Truncation::default()).unwrap();
        assert_eq!(v.value, Complex64::new(1.0, 0.0));
        assert!(v.converged);
    }

    #[test]
    fn cf_exponential_matches_closed_determinant_form() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let mut table = ZonalTable::new(2);
        let trunc = Truncation::default().with_max_degree(40);
        for _ in 0..12 {
            let sigma = random_spd(2, &mut rng);
            let n = 2.0 + 3.0 * rng.random::<f64>();
            let params = exp_params(sigma.clone(), n);
            let raw = DMatrix::from_fn(2, 2, |_, _| rng.random::<f64>() - 0.5);
            let mut t = SymMatrix::from_dmatrix(0.5 * (&raw + raw.transpose()), 1e-6).unwrap();
            // Rescale so the closed form's expansion parameter stays small.
            let prod_norm = (t.mat() * sigma.mat()).norm() * 2.0;
            if prod_norm > 0.5 {
                t = t.scale(0.5 / prod_norm);
            }
            let series = cf_series(&params, &t, &mut table, &trunc).unwrap();
            let closed = wishart_cf_closed(&sigma, n, &t).unwrap();
            assert!(
                (series.value - closed).norm() <= 1e-8,
                "series {} vs closed {closed}",
                series.value
            );
            // Hermitian symmetry: conjugating the argument conjugates the value.
            let neg = cf_series(&params, &t.scale(-1.0), &mut table, &trunc).unwrap();
            assert!((neg.value - series.value.conj()).norm() <= 1e-10);
        }
    }

    #[test]
    fn cf_heavy_tail_scalar_matches_quadrature() {
        // Scalar heavy-tailed case: only the first p radial moments exist, so
        // the series stops at the last finite order; with a small scale the
        // finite-moment expansion still meets 1e-6.
        let (n, p, s2, tt) = (3.0, 4.0, 0.1, 0.2);
        let params = tprime_params(spd(1, &[s2]), n, p);
        let gen = params.generator();
        let g0 = gen.gamma0_ln();
        let opts = QuadOptions {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            ..QuadOptions::default()
        };
        let dens = |y: f64| ((0.5 * n - 1.0) * (y / s2).ln() - g0).exp()
            * gen.h_eval(y / s2).unwrap()
            / s2;
        let re = integrate_zero_inf(|y| (tt * y).cos() * dens(y), &opts).unwrap();
        let im = integrate_zero_inf(|y| (tt * y).sin() * dens(y), &opts).unwrap();
        let mut table = ZonalTable::new(1);
        let t = SymMatrix::from_dmatrix(DMatrix::from_element(1, 1, tt), 1e-9).unwrap();
        let series = cf_series(&params, &t, &mut table, &Truncation::default()).unwrap();
        let oracle = Complex64::new(re.value, im.value);
        assert!(
            (series.value - oracle).norm() <= 1e-6,
            "series {} vs quadrature {oracle}",
            series.value
        );
    }

    #[test]
    fn wishart_cf_closed_scalar_branch() {
        let sigma = spd(1, &[1.7]);
        let t = SymMatrix::from_dmatrix(DMatrix::from_element(1, 1, 0.4), 1e-9).unwrap();
        let n = 3.0;
        let v = wishart_cf_closed(&sigma, n, &t).unwrap();
        let expect = Complex64::new(1.0, -2.0 * 0.4 * 1.7).powf(-0.5 * n);
        assert!((v - expect).norm() < 1e-12);
    }

    // --- Laplace transform ---------------------------------------------------

    #[test]
    fn laplace_exponential_matches_closed_form_for_all_s() {
        // The layers decay geometrically once 2s exceeds the spectral radius
        // of the inverse scale (about 0.4 here), so the whole grid is inside
        // the convergence domain.
        let sigma = spd(2, &[4.8, 1.6, 1.6, 3.6]);
        let n = 3.0;
        let params = exp_params(sigma.clone(), n);
        let mut table = ZonalTable::new(2);
        let trunc = Truncation::default().with_max_degree(120);
        let mut last = f64::INFINITY;
        for s in [0.3, 1.0, 5.0, 40.0] {
            let v = laplace_series(&params, s, &mut table, &trunc).unwrap();
            let closed_mat = DMatrix::identity(2, 2) + 2.0 * s * sigma.mat();
            let closed = (-0.5 * n * closed_mat.determinant().ln()).exp();
            assert_relative_eq!(v.value, closed, max_relative = 1e-8);
            assert!(v.value < last, "transform must decrease in s");
            last = v.value;
        }
    }

    #[test]
    fn laplace_heavy_tail_scalar_matches_quadrature() {
        // Heavy tails make the expansion asymptotic in 1/s, so a large s is
        // used and the series truncated well before its smallest layer.
        let (n, p, s) = (3.0, 4.0, 150.0);
        let params = tprime_params(spd(1, &[1.0]), n, p);
        let gen = params.generator();
        let g0 = gen.gamma0_ln();
        let opts = QuadOptions {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            ..QuadOptions::default()
        };
        let oracle = integrate_zero_inf(
            |y| ((0.5 * n - 1.0) * y.ln() - g0 - s * y).exp() * gen.h_eval(y).unwrap(),
            &opts,
        )
        .unwrap();
        let mut table = ZonalTable::new(1);
        let v = laplace_series(&params, s, &mut table, &Truncation::default().with_max_degree(40))
            .unwrap();
        assert_relative_eq!(v.value, oracle.value, max_relative = 1e-6);
        // The display's series omits the shape derivatives; it must disagree.
        let lit =
            laplace_series_literal(&params, s, &mut table, &Truncation::default()).unwrap();
        assert!((lit.value - oracle.value).abs() > 1e-3 * oracle.value);
    }

    #[test]
    fn laplace_rejects_nonpositive_argument() {
        let params = exp_params(spd(1, &[1.0]), 2.0);
        let mut table = ZonalTable::new(1);
        assert!(matches!(
            laplace_series(&params, 0.0, &mut table, &Truncation::default()),
            Err(Error::Domain(_))
        ));
    }

    // --- eigenvalue law ------------------------------------------------------

    #[test]
    fn eig_density_identity_scale_collapses_to_radial_form() {
        // At an isotropic scale the orthogonal average collapses the series to
        // h evaluated at the total trace; points stay inside the expansion
        // radius of the heavy-tailed shape.
        let (n, m, p) = (4.0, 2, 6.0);
        let params = tprime_params(SpdMatrix::identity(2), n, p);
        let gen = params.generator();
        let mut table = ZonalTable::new(2);
        let trunc = Truncation::default().with_max_degree(130);
        for lam in [[0.3, 0.15], [0.35, 0.1], [0.25, 0.2]] {
            let got = eig_joint_logpdf(&params, &lam, &mut table, &trunc).unwrap();
            let mf = m as f64;
            let closed = 0.5 * mf * mf * std::f64::consts::PI.ln()
                + ln_gamma(0.5 * n * mf)
                - mv_gamma_ln(m, 0.5 * mf).unwrap()
                - mv_gamma_ln(m, 0.5 * n).unwrap()
                - gen.gamma0_ln()
                + (lam[0] - lam[1]).ln()
                + 0.5 * (n - mf - 1.0) * (lam[0].ln() + lam[1].ln())
                + gen.ln_h(lam[0] + lam[1]).unwrap();
            assert_relative_eq!(got.value, closed, epsilon = 1e-6);
            assert!(got.converged);
        }
    }

    #[test]
    fn eig_density_scalar_case_is_radial_density() {
        let (n, p) = (2.6, 5.0);
        let params = tprime_params(spd(1, &[1.3]), n, p);
        let mut table = ZonalTable::new(1);
        let y = 0.8;
        let trunc = Truncation::default().with_max_degree(150);
        let got = eig_joint_logpdf(&params, &[y], &mut table, &trunc).unwrap();
        let exact = trace_pdf_exact_iso(params.generator(), 1.3, y).unwrap();
        assert_relative_eq!(got.value, exact.ln(), epsilon = 1e-9);
    }

    #[test]
    fn eig_density_invariant_under_orthogonal_conjugation() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let sigma = random_spd(2, &mut rng);
        let n = 4.0;
        let scale = |s: &SpdMatrix| {
            tprime_params(s.clone(), n, 6.0)
        };
        let mut table = ZonalTable::new(2);
        let trunc = Truncation::default().with_max_degree(140);
        // Keep the total eigenvalue mass well inside the expansion radius
        // relative to the spectral radius of the inverse scale.
        let lam = [0.1, 0.04];
        let base = eig_joint_logpdf(&scale(&sigma), &lam, &mut table, &trunc).unwrap();
        let h = random_orthogonal(2, &mut rng);
        let rotated =
            SpdMatrix::from_dmatrix(&h * sigma.mat() * h.transpose(), 1e-7).unwrap();
        let conj = eig_joint_logpdf(&scale(&rotated), &lam, &mut table, &trunc).unwrap();
        assert_abs_diff_eq!(base.value, conj.value, epsilon = 1e-8);
    }

    #[test]
    fn eig_density_edge_cases() {
        let params = tprime_params(SpdMatrix::identity(2), 4.0, 6.0);
        let mut table = ZonalTable::new(2);
        let trunc = Truncation::default();
        // Coincident eigenvalues: zero density, reported as -inf log.
        let v = eig_joint_logpdf(&params, &[0.3, 0.3], &mut table, &trunc).unwrap();
        assert_eq!(v.value, f64::NEG_INFINITY);
        // Ascending order is rejected.
        assert!(matches!(
            eig_joint_logpdf(&params, &[0.2, 0.4], &mut table, &trunc),
            Err(Error::Domain(_))
        ));
        // Shapes without a Taylor expansion are rejected.
        let kum = wgd(
            SpdMatrix::identity(2),
            4.0,
            ShapeGenerator::kummer(1.0, 0.5, 4.0, 2).unwrap(),
        );
        assert!(matches!(
            eig_joint_logpdf(&kum, &[0.4, 0.2], &mut table, &trunc),
            Err(Error::NoTaylorExpansion(_))
        ));
    }

    // --- region probabilities ------------------------------------------------

    #[test]
    fn prob_less_than_scalar_exponential_is_chi_square_cdf() {
        let params = exp_params(spd(1, &[1.0]), 2.0);
        let mut table = ZonalTable::new(1);
        let trunc = Truncation::default().with_max_degree(120);
        for a in [0.5, 2.0, 20.0] {
            let v = prob_less_than(&params, &spd(1, &[a]), &mut table, &trunc).unwrap();
            let expect = 1.0 - (-0.5 * a).exp();
            assert_abs_diff_eq!(v.value, expect, epsilon = 1e-10);
            assert!(v.converged);
        }
    }

    #[test]
    fn prob_less_than_total_mass_and_monotonicity() {
        let params = exp_params(spd(2, &[1.0, 0.2, 0.2, 0.8]), 3.0);
        let mut table = ZonalTable::new(2);
        let trunc = Truncation::default().with_max_degree(220);
        let big = SpdMatrix::scaled_identity(2, 50.0).unwrap();
        let v = prob_less_than(&params, &big, &mut table, &trunc).unwrap();
        assert_abs_diff_eq!(v.value, 1.0, epsilon = 1e-6);

        let mut last = 0.0;
        for a in [1.0, 2.0, 4.0, 8.0] {
            let p = lmax_cdf(&params, a, &mut table, &trunc).unwrap().value;
            assert!(p >= last, "region probability must grow with the region");
            last = p;
        }
    }

    #[test]
    fn prob_less_than_heavy_tail_matches_empirical_frequency() {
        let params = tprime_params(SpdMatrix::identity(2), 3.0, 6.0);
        let mut table = ZonalTable::new(2);
        let trunc = Truncation::default().with_max_degree(240);
        let v = prob_less_than(&params, &SpdMatrix::identity(2), &mut table, &trunc).unwrap();
        assert!(v.converged);

        let n_draws = 100_000;
        let mut rng = RngStream::new(2024).rng();
        let draws = sample_wgd(&params, n_draws, &mut rng).unwrap();
        let hits = draws
            .iter()
            .filter(|x| x.eigenvalues().iter().all(|&e| e < 1.0))
            .count();
        let freq = hits as f64 / n_draws as f64;
        let se = (freq * (1.0 - freq) / n_draws as f64).sqrt();
        assert!(
            (v.value - freq).abs() <= 3.0 * se,
            "series {} vs empirical {freq} +- {se}",
            v.value
        );
    }

    #[test]
    fn lmax_cdf_matches_empirical_wishart_distribution() {
        let params = exp_params(SpdMatrix::identity(2), 3.0);
        let mut table = ZonalTable::new(2);
        let trunc = Truncation::default().with_max_degree(160);
        let n_draws = 100_000;
        let mut rng = RngStream::new(515).rng();
        let draws = sample_wgd(&params, n_draws, &mut rng).unwrap();
        let lmax: Vec<f64> = draws
            .iter()
            .map(|x| x.eigenvalues().iter().cloned().fold(0.0, f64::max))
            .collect();
        for a in [2.0, 5.0, 10.0] {
            let v = lmax_cdf(&params, a, &mut table, &trunc).unwrap();
            let freq = lmax.iter().filter(|&&l| l < a).count() as f64 / n_draws as f64;
            let se = (freq * (1.0 - freq) / n_draws as f64).sqrt().max(1e-6);
            assert!(
                (v.value - freq).abs() <= 3.0 * se,
                "a={a}: series {} vs empirical {freq} +- {se}",
                v.value
            );
        }
    }

    #[test]
    fn region_series_literal_disagrees_with_corrected_form() {
        let params = exp_params(SpdMatrix::identity(2), 3.0);
        let mut table = ZonalTable::new(2);
        let trunc = Truncation::default().with_max_degree(60);
        let corrected = lmax_cdf(&params, 2.0, &mut table, &trunc).unwrap();
        let literal = lmax_cdf_literal(&params, 2.0, &mut table, &trunc).unwrap();
        assert!((corrected.value - literal.value).abs() > 1e-3);
        let a_mat = spd(2, &[2.0, 0.0, 0.0, 2.0]);
        let lit_prob = prob_less_than_literal(&params, &a_mat, &mut table, &trunc).unwrap();
        assert_relative_eq!(lit_prob.value, literal.value, max_relative = 1e-10);
    }

    #[test]
    fn prob_less_than_origin_expansion_and_taylor_requirements() {
        // An entire shape expanded about the origin reaches any region.
        let n = 3.0;
        let hyper = wgd(
            SpdMatrix::identity(1),
            n,
            ShapeGenerator::hypergeom_exp(vec![1.5], vec![2.0, 2.5], 0.5, n, 1).unwrap(),
        );
        let mut table = ZonalTable::new(1);
        let ok = prob_less_than(
            &hyper,
            &spd(1, &[3.0]),
            &mut table,
            &Truncation::default().with_max_degree(60),
        )
        .unwrap();
        assert!(ok.value > 0.0 && ok.value <= 1.0);
        // Shapes without Taylor coefficients cannot use either expansion.
        let kum = wgd(
            SpdMatrix::identity(1),
            n,
            ShapeGenerator::kummer(1.0, 0.5, n, 1).unwrap(),
        );
        assert!(matches!(
            prob_less_than(&kum, &spd(1, &[1.0]), &mut table, &Truncation::default()),
            Err(Error::NoTaylorExpansion(_))
        ));
    }

    // --- trace density and moments -------------------------------------------

    #[test]
    fn trace_density_exponential_is_gamma() {
        let (n, m) = (3.0, 2);
        let params = exp_params(SpdMatrix::identity(m), n);
        let gamma = Gamma::new(0.5 * n * m as f64, 0.5).unwrap();
        let mut table = ZonalTable::new(m);
        let trunc = Truncation::default().with_max_degree(80);
        for y in [1.0, 3.0, 7.0] {
            let series = trace_pdf(&params, y, &mut table, &trunc).unwrap();
            let exact = trace_pdf_exact_iso(params.generator(), 1.0, y).unwrap();
            assert_relative_eq!(series.value, gamma.pdf(y), max_relative = 1e-8);
            assert_relative_eq!(exact, gamma.pdf(y), max_relative = 1e-12);
        }
    }

    #[test]
    fn trace_density_heavy_tail_series_agrees_with_exact_but_literal_does_not() {
        let (n, m, p) = (3.0, 2, 5.0);
        let params = tprime_params(SpdMatrix::identity(m), n, p);
        let mut table = ZonalTable::new(m);
        let trunc = Truncation::default().with_max_degree(80);
        let y = 0.5;
        let series = trace_pdf(&params, y, &mut table, &trunc).unwrap();
        let exact = trace_pdf_exact_iso(params.generator(), 1.0, y).unwrap();
        assert_relative_eq!(series.value, exact, max_relative = 1e-8);
        let literal = trace_pdf_literal(&params, y, &mut table, &trunc).unwrap();
        assert!(
            (literal.value - exact).abs() > 1e-3 * exact,
            "display form should disagree: {} vs {exact}",
            literal.value
        );
    }

    #[test]
    fn trace_density_exact_iso_normalizes_and_matches_beta_prime() {
        let (n, m, p) = (3.0, 2, 5.0);
        let gen = ShapeGenerator::t_prime(p, n, m).unwrap();
        let opts = QuadOptions::default();
        let mass =
            integrate_zero_inf(|y| trace_pdf_exact_iso(&gen, 1.0, y).unwrap(), &opts).unwrap();
        assert_relative_eq!(mass.value, 1.0, max_relative = 1e-8);
        // Closed form: beta-prime(nm/2, p).
        let a = 0.5 * n * m as f64;
        let y = 1.7_f64;
        let expect =
            ((a - 1.0) * y.ln() - (a + p) * (1.0 + y).ln() - ln_gamma(a) - ln_gamma(p)
                + ln_gamma(a + p))
            .exp();
        assert_relative_eq!(
            trace_pdf_exact_iso(&gen, 1.0, y).unwrap(),
            expect,
            max_relative = 1e-12
        );
    }

    #[test]
    fn trace_moment_closed_values() {
        let mut table = ZonalTable::new(2);
        let params = exp_params(SpdMatrix::identity(2), 3.0);
        let r0 = trace_moment(&params, 0.0, &mut table).unwrap();
        assert_eq!(r0.value, 1.0);
        let r1 = trace_moment(&params, 1.0, &mut table).unwrap();
        assert_relative_eq!(r1.value, 6.0, max_relative = 1e-10);
        // tr X is chi-square with nm degrees of freedom at identity scale.
        let r2 = trace_moment(&params, 2.0, &mut table).unwrap();
        assert_relative_eq!(r2.value, 6.0 * 8.0, max_relative = 1e-10);

        // Anisotropic scale: E[tr X] = n tr(S).
        let sigma = spd(2, &[1.5, 0.3, 0.3, 0.6]);
        let aniso = exp_params(sigma.clone(), 3.0);
        let r1a = trace_moment(&aniso, 1.0, &mut table).unwrap();
        assert_relative_eq!(r1a.value, 3.0 * sigma.trace(), max_relative = 1e-10);
    }

    #[test]
    fn trace_moment_heavy_tail_two_oracles() {
        let (n, m, p) = (3.0, 2, 5.0);
        let params = tprime_params(SpdMatrix::identity(m), n, p);
        let mut table = ZonalTable::new(m);
        let r1 = trace_moment(&params, 1.0, &mut table).unwrap();
        // Radial quadrature oracle.
        let gen = params.generator();
        let opts = QuadOptions::default();
        let quad = integrate_zero_inf(
            |y| y * trace_pdf_exact_iso(gen, 1.0, y).unwrap(),
            &opts,
        )
        .unwrap();
        assert_relative_eq!(r1.value, quad.value, max_relative = 1e-8);
        // Simulation oracle.
        let est = mc_estimate(|x| x.trace(), &params, 200_000, 33).unwrap();
        assert!((r1.value - est.mean).abs() <= 3.0 * est.stderr);

        // Non-integer order through the radial representation.
        let r_frac = trace_moment(&params, 1.5, &mut table).unwrap();
        let quad_frac = integrate_zero_inf(
            |y| y.powf(1.5) * trace_pdf_exact_iso(gen, 1.0, y).unwrap(),
            &opts,
        )
        .unwrap();
        assert_relative_eq!(r_frac.value, quad_frac.value, max_relative = 1e-8);

        // Non-integer order with anisotropic scale is not representable.
        let aniso = tprime_params(spd(2, &[1.0, 0.3, 0.3, 0.7]), n, p);
        assert!(matches!(
            trace_moment(&aniso, 1.5, &mut table),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn trace_moment_literal_series_diverges() {
        let params = exp_params(SpdMatrix::identity(1), 2.0);
        let mut table = ZonalTable::new(1);
        let r = trace_moment_literal(&params, 1.0, &mut table, &Truncation::default());
        assert!(matches!(r, Err(Error::DivergenceSuspected { .. })));
    }

    // --- ratio densities -----------------------------------------------------

    #[test]
    fn ratio_b1_scalar_equal_scales_is_beta_prime() {
        let (n, p) = (2.0, 3.0);
        let x_params = exp_params(spd(1, &[1.0]), n);
        let w_sigma = spd(1, &[1.0]);
        let mut table = ZonalTable::new(1);
        // Geometric convergence ratio is b itself, so b = 0.9 needs ~400 layers.
        let trunc = Truncation::default().with_max_degree(420);
        for b in [0.3, 0.6, 0.9] {
            let v = ratio_b1_pdf(&x_params, &w_sigma, p, &spd(1, &[b]), &mut table, &trunc)
                .unwrap();
            let (a1, b1) = (0.5 * p, 0.5 * n);
            let expect = ((a1 - 1.0) * b.ln() - (a1 + b1) * (1.0 + b).ln() - ln_gamma(a1)
                - ln_gamma(b1)
                + ln_gamma(a1 + b1))
            .exp();
            assert_relative_eq!(v.value, expect, max_relative = 1e-8);
        }
        // Outside the convergence region the alternating guard must fire.
        let far = ratio_b1_pdf(&x_params, &w_sigma, p, &spd(1, &[2.5]), &mut table, &trunc);
        assert!(matches!(
            far,
            Err(Error::AlternatingSeriesNotConverged { .. }) | Err(Error::DivergenceSuspected { .. })
        ));
    }

    #[test]
    fn ratio_b1_scalar_unequal_scales_matches_convolution() {
        // X has twice the scale of the classical factor: q = 2.
        let (n, p) = (2.0, 3.0);
        let x_params = exp_params(spd(1, &[2.0]), n);
        let w_sigma = spd(1, &[1.0]);
        let mut table = ZonalTable::new(1);
        let trunc = Truncation::default().with_max_degree(160);
        let fx = |x: f64| {
            // Radial density of the scalar variate with scale 2.
            trace_pdf_exact_iso(x_params.generator(), 2.0, x).unwrap()
        };
        let fy = |y: f64| {
            let gamma = Gamma::new(0.5 * p, 0.5).unwrap();
            gamma.pdf(y)
        };
        let opts = QuadOptions {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            ..QuadOptions::default()
        };
        let b = 0.2;
        let oracle = integrate_zero_inf(|x| x * fy(b * x) * fx(x), &opts).unwrap();
        let v = ratio_b1_pdf(&x_params, &w_sigma, p, &spd(1, &[b]), &mut table, &trunc).unwrap();
        assert_relative_eq!(v.value, oracle.value, max_relative = 1e-6);
    }

    #[test]
    fn ratio_b2_scalar_power_shape_window_mass_and_pointwise() {
        // The alternating series runs in powers of 1/v - 1, which blows up as
        // v -> 0; in double precision the cancellation there destroys all
        // accuracy, so the series is validated on a window whose left edge
        // keeps the expansion argument moderate.  A cubic power-exponential
        // numerator keeps the expansion entire over the whole window.
        let (n, p) = (8.0, 5.0);
        let x_params = wgd(
            spd(1, &[1.0]),
            n,
            ShapeGenerator::power(1.0, 3.0, n, 1).unwrap(),
        );
        let w_sigma = spd(1, &[1.0]);
        let trunc = Truncation::default().with_max_degree(160);
        let pdf = |v: f64| {
            let mut table = ZonalTable::new(1);
            ratio_b2_pdf(&x_params, &w_sigma, p, &spd(1, &[v]), &mut table, &trunc)
                .unwrap()
                .value
        };
        // Change-of-variables convolution oracle for V = X / (X + Y).
        let gen = x_params.generator();
        let fx = |x: f64| trace_pdf_exact_iso(gen, 1.0, x).unwrap();
        let fy = |y: f64| Gamma::new(0.5 * p, 0.5).unwrap().pdf(y);
        let tight = QuadOptions {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            ..QuadOptions::default()
        };
        let oracle_pdf = |v: f64| {
            integrate_zero_inf(|t| t * fx(v * t) * fy((1.0 - v) * t), &tight)
                .unwrap()
                .value
        };
        // The oracle is a genuine density over all of (0, 1).
        let opts = QuadOptions::default();
        let full = integrate(oracle_pdf, 1e-9, 1.0 - 1e-9, &opts).unwrap();
        assert_relative_eq!(full.value, 1.0, max_relative = 1e-8);
        // Series and oracle agree in aggregate over the window...
        let (lo, hi) = (0.08, 0.999);
        let mass_series = integrate(pdf, lo, hi, &opts).unwrap();
        let mass_oracle = integrate(oracle_pdf, lo, hi, &opts).unwrap();
        assert_relative_eq!(mass_series.value, mass_oracle.value, max_relative = 1e-6);
        // ... and pointwise in the bulk and the right tail.
        for v in [0.15, 0.7] {
            assert_relative_eq!(pdf(v), oracle_pdf(v), max_relative = 1e-6);
        }
    }

    #[test]
    fn ratio_density_input_validation() {
        let x_params = exp_params(spd(1, &[1.0]), 2.0);
        let mut table = ZonalTable::new(1);
        let trunc = Truncation::default();
        // Non-proportional scales are impossible in the scalar case, so test
        // the m=2 validation path.
        let x2 = exp_params(spd(2, &[1.0, 0.0, 0.0, 1.0]), 3.0);
        let skew = spd(2, &[1.0, 0.2, 0.2, 0.7]);
        let mut table2 = ZonalTable::new(2);
        assert!(matches!(
            ratio_b1_pdf(&x2, &skew, 3.0, &SpdMatrix::identity(2), &mut table2, &trunc),
            Err(Error::Domain(_))
        ));
        // p below the dimension is rejected.
        assert!(matches!(
            ratio_b1_pdf(&x_params, &spd(1, &[1.0]), 0.5, &spd(1, &[0.3]), &mut table, &trunc),
            Err(Error::ParameterOutOfRange(_))
        ));
        // B2 with an eigenvalue at or above 1 is outside the support.
        assert!(matches!(
            ratio_b2_pdf(&x_params, &spd(1, &[1.0]), 3.0, &spd(1, &[1.2]), &mut table, &trunc),
            Err(Error::Domain(_))
        ));
    }
}
