use std::collections::HashMap;
use std::path::Path;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, ToPrimitive, Zero};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::partition::{
    monomial_at_ones, partitions_of, raising_moves, sym_group_dim, zonal_at_identity_ln,
    Partition,
};
use crate::series::{LayerAccum, LayerStep, SeriesOptions, SeriesValue, Truncation};

/// Coefficient tables are rejected beyond this weight when partitions may
/// have three or more rows: the partition count (and with it build cost)
/// grows polynomially of increasing degree in the weight.
pub const MAX_TABLE_WEIGHT: usize = 64;

/// Tables restricted to two-row partitions stay cheap (`k/2 + 1`
/// partitions per weight) and their monomial coefficients are bounded by
/// `C_kappa(I_2) <= 2^k`, comfortably inside f64 range, so they may grow
/// much further. Slowly converging expansions near the edge of a
/// convergence domain need several hundred layers at dimension two.
pub const MAX_TABLE_WEIGHT_TWO_ROW: usize = 512;

/// Version tag of the table construction; cached tables carrying a
/// different tag are refused.
pub const TABLE_VERSION: &str = "zonal-monomial-v1";

/// Zonal polynomials of one weight, expanded over monomial symmetric
/// polynomials. `parts` lists the partitions (at most `max_len` rows) in
/// reverse-lexicographic order; `coeffs[i]` holds the sparse expansion of
/// the polynomial indexed by `parts[i]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightTable {
    pub k: usize,
    pub parts: Vec<Partition>,
    pub coeffs: Vec<Vec<(usize, f64)>>,
}

impl WeightTable {
    /// Monomial symmetric polynomial values for every partition of this
    /// weight at the given eigenvalues (zero where the partition has more
    /// rows than there are eigenvalues).
    fn monomials(&self, eigs: &[f64]) -> Vec<f64> {
        let m = eigs.len();
        // powers[i][e] = eigs[i]^e
        let kmax = self.k;
        let mut powers = vec![vec![1.0f64; kmax + 1]; m];
        for (i, &y) in eigs.iter().enumerate() {
            for e in 1..=kmax {
                powers[i][e] = powers[i][e - 1] * y;
            }
        }
        self.parts
            .iter()
            .map(|lambda| {
                if lambda.len() > m {
                    return 0.0;
                }
                let mut exps = vec![0u32; m];
                for (i, &p) in lambda.parts().iter().enumerate() {
                    exps[i] = p;
                }
                // Distinct permutations, enumerated from the ascending start.
                exps.sort_unstable();
                let mut total = 0.0;
                loop {
                    let mut term = 1.0;
                    for (i, &e) in exps.iter().enumerate() {
                        term *= powers[i][e as usize];
                    }
                    total += term;
                    if !next_distinct_permutation(&mut exps) {
                        break;
                    }
                }
                total
            })
            .collect()
    }

    /// Values of every zonal polynomial of this weight at the eigenvalues.
    pub fn eval_all(&self, eigs: &[f64]) -> Vec<f64> {
        let mono = self.monomials(eigs);
        self.coeffs
            .iter()
            .map(|row| row.iter().map(|&(j, c)| c * mono[j]).sum())
            .collect()
    }

    /// Same evaluation at a complex spectrum. Needed for arguments that
    /// arise as products of three positive matrices, whose eigenvalues can
    /// leave the real axis; symmetric functions of a conjugate-closed
    /// spectrum still produce (numerically) real values.
    pub fn eval_all_complex(&self, eigs: &[Complex64]) -> Vec<Complex64> {
        let m = eigs.len();
        let kmax = self.k;
        let one = Complex64::new(1.0, 0.0);
        let mut powers = vec![vec![one; kmax + 1]; m];
        for (i, &y) in eigs.iter().enumerate() {
            for e in 1..=kmax {
                powers[i][e] = powers[i][e - 1] * y;
            }
        }
        let mono: Vec<Complex64> = self
            .parts
            .iter()
            .map(|lambda| {
                if lambda.len() > m {
                    return Complex64::new(0.0, 0.0);
                }
                let mut exps = vec![0u32; m];
                for (i, &p) in lambda.parts().iter().enumerate() {
                    exps[i] = p;
                }
                exps.sort_unstable();
                let mut total = Complex64::new(0.0, 0.0);
                loop {
                    let mut term = one;
                    for (i, &e) in exps.iter().enumerate() {
                        term *= powers[i][e as usize];
                    }
                    total += term;
                    if !next_distinct_permutation(&mut exps) {
                        break;
                    }
                }
                total
            })
            .collect();
        self.coeffs
            .iter()
            .map(|row| row.iter().map(|&(j, c)| c * mono[j]).sum())
            .collect()
    }
}

/// Lexicographic next permutation; from an ascending start this visits
/// every distinct arrangement exactly once.
fn next_distinct_permutation(v: &mut [u32]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Table of zonal polynomial coefficients, grown lazily per weight.
///
/// A table built with `max_len = m` can evaluate polynomials at up to `m`
/// eigenvalues; partitions with more than `m` rows never enter, which
/// keeps high weights affordable for small dimensions. Extension requires
/// `&mut self`, so concurrent growth is excluded by the borrow checker.
#[derive(Debug, Clone)]
pub struct ZonalTable {
    max_len: usize,
    weights: Vec<WeightTable>,
}

impl ZonalTable {
    pub fn new(max_len: usize) -> Self {
        assert!(max_len >= 1, "table needs at least one row");
        ZonalTable {
            max_len,
            weights: Vec::new(),
        }
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn built_to(&self) -> Option<usize> {
        self.weights.len().checked_sub(1)
    }

    /// Largest weight this table will build, which depends on how many
    /// partition rows it admits.
    pub fn max_weight(&self) -> usize {
        if self.max_len <= 2 {
            MAX_TABLE_WEIGHT_TWO_ROW
        } else {
            MAX_TABLE_WEIGHT
        }
    }

    /// Builds all weights up to and including `k`.
    pub fn ensure_weight(&mut self, k: usize) -> Result<()> {
        let cap = self.max_weight();
        if k > cap {
            return Err(Error::ParameterOutOfRange(format!(
                "table weight {k} exceeds the supported maximum {cap} for dimension {}",
                self.max_len
            )));
        }
        while self.weights.len() <= k {
            let next = self.weights.len();
            // Tables of at most two rows use the floating-point build:
            // the recurrence is subtraction-free, so it loses no accuracy,
            // and exact rational arithmetic becomes prohibitively slow at
            // the weights those tables are allowed to reach.
            let table = if self.max_len <= 2 {
                build_weight_f64(next, self.max_len)?
            } else {
                build_weight(next, self.max_len)?
            };
            self.weights.push(table);
        }
        Ok(())
    }

    pub fn weight(&self, k: usize) -> Result<&WeightTable> {
        self.weights.get(k).ok_or_else(|| {
            Error::ParameterOutOfRange(format!("weight {k} not built (call ensure_weight)"))
        })
    }

    fn check_dim(&self, m: usize) -> Result<()> {
        if m > self.max_len {
            return Err(Error::ParameterOutOfRange(format!(
                "table was built for dimension {} but got {m} eigenvalues",
                self.max_len
            )));
        }
        Ok(())
    }

    /// `C_kappa` at the given eigenvalues.
    pub fn zonal(&mut self, kappa: &Partition, eigs: &[f64]) -> Result<f64> {
        self.check_dim(eigs.len())?;
        if kappa.len() > eigs.len() {
            return Ok(0.0);
        }
        let k = kappa.weight();
        self.ensure_weight(k)?;
        let wt = self.weight(k)?;
        let idx = wt
            .parts
            .iter()
            .position(|p| p == kappa)
            .ok_or_else(|| Error::ParameterOutOfRange(format!("partition {kappa} not tabulated")))?;
        let mono = wt.monomials(eigs);
        Ok(wt.coeffs[idx].iter().map(|&(j, c)| c * mono[j]).sum())
    }

    /// `C_kappa` of a symmetric matrix argument through its eigenvalues.
    pub fn zonal_matrix(&mut self, kappa: &Partition, a: &SymMatrix) -> Result<f64> {
        let eigs = a.eigenvalues();
        self.zonal(kappa, &eigs)
    }

    /// All zonal values of one weight at the eigenvalues, in the order of
    /// `weight(k).parts`.
    pub fn eval_weight(&mut self, k: usize, eigs: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(eigs.len())?;
        self.ensure_weight(k)?;
        Ok(self.weight(k)?.eval_all(eigs))
    }

    /// Writes the table as versioned JSON.
    pub fn save(&self, path: &Path) -> Result<()> {
        let repr = CacheRepr {
            version: TABLE_VERSION.to_string(),
            max_len: self.max_len,
            weights: self.weights.clone(),
        };
        let file = std::fs::File::create(path)?;
        serde_json::to_writer(std::io::BufWriter::new(file), &repr)?;
        Ok(())
    }

    /// Reads a cached table, refusing version mismatches and tables that
    /// fail the sum identity spot check.
    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let repr: CacheRepr = serde_json::from_reader(std::io::BufReader::new(file))?;
        if repr.version != TABLE_VERSION {
            return Err(Error::Parse(format!(
                "zonal cache version `{}` does not match `{TABLE_VERSION}`",
                repr.version
            )));
        }
        let table = ZonalTable {
            max_len: repr.max_len,
            weights: repr.weights,
        };
        // Integrity: sum of one weight layer must reproduce the trace power.
        let probe: Vec<f64> = (0..table.max_len)
            .map(|i| 0.9f64 - 0.13 * i as f64 / table.max_len as f64)
            .collect();
        let tr: f64 = probe.iter().sum();
        for wt in &table.weights {
            let total: f64 = wt.eval_all(&probe).iter().sum();
            let expect = tr.powi(wt.k as i32);
            if (total - expect).abs() > 1e-8 * expect.abs().max(1.0) {
                return Err(Error::Parse(format!(
                    "zonal cache failed the sum identity at weight {}",
                    wt.k
                )));
            }
        }
        Ok(table)
    }
}

#[derive(Serialize, Deserialize)]
struct CacheRepr {
    version: String,
    max_len: usize,
    weights: Vec<WeightTable>,
}

/// Builds one weight layer with exact rational arithmetic.
///
/// Coefficients follow the raising-move recurrence over partitions
/// ordered by the dominance-monotone statistic `rho`; each polynomial is
/// then scaled so its value at `l` ones (`l` = number of rows) matches the
/// closed form `2^{2k} k! (l/2)_kappa dim(2 kappa) / (2k)!`. The sum
/// identity over a weight is *not* used here, so it remains an
/// independent check of the construction.
fn build_weight(k: usize, max_len: usize) -> Result<WeightTable> {
    let parts = partitions_of(k, Some(max_len));
    let n = parts.len();
    let mut index: HashMap<&Partition, usize> = HashMap::with_capacity(n);
    for (i, p) in parts.iter().enumerate() {
        index.insert(p, i);
    }
    let rho: Vec<i64> = parts.iter().map(|p| p.rho()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| -rho[i]);

    // Raising moves resolved to indices, shared by every target partition.
    let moves: Vec<Vec<(usize, i64)>> = parts
        .iter()
        .map(|lambda| {
            raising_moves(lambda)
                .into_iter()
                .map(|(mu, f)| (index[&mu], f))
                .collect()
        })
        .collect();

    let mut coeffs: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    for (ki, kappa) in parts.iter().enumerate() {
        let mut c: Vec<BigRational> = vec![BigRational::zero(); n];
        c[ki] = BigRational::one();
        for &li in &order {
            if li == ki || !kappa.dominates(&parts[li]) || parts[li] == *kappa {
                continue;
            }
            let mut acc = BigRational::zero();
            for &(mi, f) in &moves[li] {
                if !c[mi].is_zero() {
                    acc += BigRational::from_integer(BigInt::from(f)) * &c[mi];
                }
            }
            if !acc.is_zero() {
                let denom = BigRational::from_integer(BigInt::from(rho[ki] - rho[li]));
                c[li] = acc / denom;
            }
        }

        let scale = normalizer(kappa, &parts, &c);
        let row: Vec<(usize, f64)> = c
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(j, v)| (j, rational_to_f64(&(v * &scale))))
            .collect();
        coeffs.push(row);
    }

    Ok(WeightTable { k, parts, coeffs })
}

/// Floating-point variant of [`build_weight`]. The raising-move factors
/// `l_i - l_j + 2t` are all positive, so the triangular solve contains no
/// cancellation and stays accurate to a few ulps at any weight; the
/// normalization constant is assembled in log space. Unrenormalized
/// coefficients are bounded by `C_kappa(I_m) <= m^k`, which keeps every
/// intermediate inside f64 range for two-row tables up to the cap.
fn build_weight_f64(k: usize, max_len: usize) -> Result<WeightTable> {
    let parts = partitions_of(k, Some(max_len));
    let n = parts.len();
    let mut index: HashMap<&Partition, usize> = HashMap::with_capacity(n);
    for (i, p) in parts.iter().enumerate() {
        index.insert(p, i);
    }
    let rho: Vec<i64> = parts.iter().map(|p| p.rho()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| -rho[i]);

    let moves: Vec<Vec<(usize, i64)>> = parts
        .iter()
        .map(|lambda| {
            raising_moves(lambda)
                .into_iter()
                .map(|(mu, f)| (index[&mu], f))
                .collect()
        })
        .collect();

    let mut coeffs: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    for (ki, kappa) in parts.iter().enumerate() {
        let mut c = vec![0.0f64; n];
        c[ki] = 1.0;
        for &li in &order {
            if li == ki || !kappa.dominates(&parts[li]) || parts[li] == *kappa {
                continue;
            }
            let mut acc = 0.0f64;
            for &(mi, f) in &moves[li] {
                if c[mi] != 0.0 {
                    acc += f as f64 * c[mi];
                }
            }
            if acc != 0.0 {
                c[li] = acc / (rho[ki] - rho[li]) as f64;
            }
        }

        // Scale so the value at `l` ones matches the closed form, exactly
        // as the rational build does, but through logarithms.
        let l = kappa.len();
        let scale = if k == 0 {
            1.0
        } else {
            let ln_target = zonal_at_identity_ln(kappa, l).expect("l rows fit in I_l");
            let mut at_ones = 0.0f64;
            for (j, v) in c.iter().enumerate() {
                if *v != 0.0 {
                    let count = monomial_at_ones(&parts[j], l);
                    if !count.is_zero() {
                        at_ones += v * count.to_f64().expect("small permutation count");
                    }
                }
            }
            (ln_target - at_ones.ln()).exp()
        };
        let row: Vec<(usize, f64)> = c
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(j, v)| (j, v * scale))
            .collect();
        coeffs.push(row);
    }

    Ok(WeightTable { k, parts, coeffs })
}

/// Exact ratio `C_kappa(I_l) / Ztilde_kappa(1^l)` with `l` the number of
/// rows of `kappa`.
fn normalizer(kappa: &Partition, parts: &[Partition], c: &[BigRational]) -> BigRational {
    let k = kappa.weight();
    if k == 0 {
        return BigRational::one();
    }
    let l = kappa.len();

    // C_kappa(I_l) = 2^{2k} k! (l/2)_kappa dim(2 kappa) / (2k)!.
    let mut numer = BigInt::from(1) << (2 * k);
    for i in 2..=k {
        numer *= BigInt::from(i);
    }
    numer *= BigInt::from(sym_group_dim(&kappa.doubled()));
    // (l/2)_kappa = prod_i prod_j ((l - (i-1) + 2j) / 2).
    let mut poch_num = BigInt::one();
    let mut half_powers = 0usize;
    for (i0, &kirow) in kappa.parts().iter().enumerate() {
        for j in 0..kirow as usize {
            poch_num *= BigInt::from(l as i64 - i0 as i64 + 2 * j as i64);
            half_powers += 1;
        }
    }
    numer *= poch_num;
    let mut denom = BigInt::from(1) << half_powers;
    for i in 2..=(2 * k) {
        denom *= BigInt::from(i);
    }
    let target = BigRational::new(numer, denom);

    let mut at_ones = BigRational::zero();
    for (j, v) in c.iter().enumerate() {
        if !v.is_zero() {
            let count = monomial_at_ones(&parts[j], l);
            if !count.is_zero() {
                at_ones += v * BigRational::from_integer(BigInt::from(count));
            }
        }
    }
    target / at_ones
}

fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Scale both sides down; only reachable near the weight cap.
    let shift = 256u32;
    let scaled = (r.numer() << shift) / r.denom();
    scaled.to_f64().map(|v| v / 2f64.powi(shift as i32)).unwrap_or(f64::NAN)
}

/// Hypergeometric function of a matrix argument
/// `pFq(a; b; X) = sum_k sum_kappa (a_1)_kappa ... / ((b_1)_kappa ... k!) C_kappa(X)`.
///
/// Requires `p <= q + 1`; for `p == q + 1` the spectral radius of `X` must
/// be below 1. Each `b_j` must exceed `(m-1)/2` so no denominator symbol
/// vanishes.
pub fn hypergeom_matrix(
    a: &[f64],
    b: &[f64],
    x: &SymMatrix,
    table: &mut ZonalTable,
    trunc: &Truncation,
) -> Result<SeriesValue<f64>> {
    let m = x.dim();
    if a.len() > b.len() + 1 {
        return Err(Error::ParameterOutOfRange(format!(
            "hypergeometric series with p={} > q+1={} diverges",
            a.len(),
            b.len() + 1
        )));
    }
    let eigs = x.eigenvalues();
    if a.len() == b.len() + 1 {
        let radius = eigs.iter().fold(0.0f64, |r, &e| r.max(e.abs()));
        if radius >= 1.0 {
            return Err(Error::ParameterOutOfRange(format!(
                "spectral radius {radius} >= 1 outside the convergence domain"
            )));
        }
    }
    for &bj in b {
        if bj <= (m as f64 - 1.0) / 2.0 {
            return Err(Error::Domain(format!(
                "denominator parameter {bj} must exceed (m-1)/2 = {}",
                (m as f64 - 1.0) / 2.0
            )));
        }
    }

    let opts = SeriesOptions {
        strict_truncation: true,
        ..SeriesOptions::default()
    };
    let mut accum = LayerAccum::new(*trunc, opts);
    let mut ln_kfac = 0.0f64;
    for k in 0..=trunc.max_degree {
        if k > 0 {
            ln_kfac += (k as f64).ln();
        }
        let values = table.eval_weight(k, &eigs)?;
        let wt = table.weight(k)?;
        let mut layer = 0.0;
        for (i, kappa) in wt.parts.iter().enumerate() {
            if kappa.len() > m || values[i] == 0.0 {
                continue;
            }
            let mut coef = 1.0;
            for &ai in a {
                coef *= crate::partition::gen_pochhammer(ai, kappa);
            }
            for &bj in b {
                coef /= crate::partition::gen_pochhammer(bj, kappa);
            }
            layer += coef * values[i];
        }
        layer *= (-ln_kfac).exp();
        if accum.push(layer)? == LayerStep::Converged {
            break;
        }
    }
    accum.finish()
}
