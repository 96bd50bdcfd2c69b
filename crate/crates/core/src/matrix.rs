use nalgebra::DMatrix;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Default absolute tolerance for symmetry validation.
pub const DEFAULT_SYM_TOL: f64 = 1e-8;

/// Symmetric matrix with exactly mirrored storage: after construction
/// `a[(i,j)] == a[(j,i)]` holds bitwise, whatever rounding the input had.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    mat: DMatrix<f64>,
}

impl SymMatrix {
    /// Validates symmetry within `tol` (largest absolute mirror gap), then
    /// stores the exactly symmetrized matrix.
    pub fn from_dmatrix(mat: DMatrix<f64>, tol: f64) -> Result<Self> {
        let (r, c) = mat.shape();
        if r != c {
            return Err(Error::DimensionMismatch {
                expected: r,
                got: c,
            });
        }
        for i in 0..r {
            for j in (i + 1)..r {
                let asym = (mat[(i, j)] - mat[(j, i)]).abs();
                if !(asym <= tol) {
                    return Err(Error::NotSymmetric {
                        row: i,
                        col: j,
                        asymmetry: asym,
                    });
                }
            }
        }
        let mut m = mat;
        for i in 0..r {
            for j in (i + 1)..r {
                let v = 0.5 * (m[(i, j)] + m[(j, i)]);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(SymMatrix { mat: m })
    }

    pub fn from_rows(rows: &[Vec<f64>], tol: f64) -> Result<Self> {
        let m = rows.len();
        for row in rows {
            if row.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: row.len(),
                });
            }
        }
        let mat = DMatrix::from_fn(m, m, |i, j| rows[i][j]);
        Self::from_dmatrix(mat, tol)
    }

    /// Row-major flat storage of length `m*m`.
    pub fn from_flat(m: usize, data: &[f64], tol: f64) -> Result<Self> {
        if data.len() != m * m {
            return Err(Error::DimensionMismatch {
                expected: m * m,
                got: data.len(),
            });
        }
        let mat = DMatrix::from_fn(m, m, |i, j| data[i * m + j]);
        Self::from_dmatrix(mat, tol)
    }

    pub fn identity(m: usize) -> Self {
        SymMatrix {
            mat: DMatrix::identity(m, m),
        }
    }

    pub fn scaled_identity(m: usize, c: f64) -> Self {
        SymMatrix {
            mat: DMatrix::identity(m, m) * c,
        }
    }

    pub fn zeros(m: usize) -> Self {
        SymMatrix {
            mat: DMatrix::zeros(m, m),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn mat(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.mat[(i, j)]).collect())
            .collect()
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let m = self.dim();
        let mut out = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                out.push(self.mat[(i, j)]);
            }
        }
        out
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .mat
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
        ev
    }

    /// Eigen decomposition with eigenvalues descending and matching columns.
    pub fn eigen(&self) -> (Vec<f64>, DMatrix<f64>) {
        let se = self.mat.clone().symmetric_eigen();
        let m = self.dim();
        let mut idx: Vec<usize> = (0..m).collect();
        idx.sort_by(|&a, &b| se.eigenvalues[b].partial_cmp(&se.eigenvalues[a]).unwrap());
        let vals: Vec<f64> = idx.iter().map(|&i| se.eigenvalues[i]).collect();
        let vecs = DMatrix::from_fn(m, m, |r, c| se.eigenvectors[(r, idx[c])]);
        (vals, vecs)
    }

    /// `tr(self * other)` using symmetry.
    pub fn trace_product(&self, other: &SymMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let m = self.dim();
        let mut acc = 0.0;
        for i in 0..m {
            for j in 0..m {
                acc += self.mat[(i, j)] * other.mat[(j, i)];
            }
        }
        Ok(acc)
    }

    pub fn scale(&self, c: f64) -> SymMatrix {
        SymMatrix {
            mat: &self.mat * c,
        }
    }

    pub fn add(&self, other: &SymMatrix) -> Result<SymMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(SymMatrix {
            mat: &self.mat + &other.mat,
        })
    }
}

impl Serialize for SymMatrix {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            m: usize,
            rows: Vec<Vec<f64>>,
        }
        Repr {
            m: self.dim(),
            rows: self.to_rows(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for SymMatrix {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            m: usize,
            rows: Vec<Vec<f64>>,
        }
        let repr = Repr::deserialize(de)?;
        if repr.rows.len() != repr.m {
            return Err(D::Error::custom(format!(
                "matrix declares m={} but has {} rows",
                repr.m,
                repr.rows.len()
            )));
        }
        SymMatrix::from_rows(&repr.rows, DEFAULT_SYM_TOL).map_err(D::Error::custom)
    }
}

/// Symmetric positive definite matrix with cached Cholesky factor,
/// log-determinant, inverse, and eigen decomposition.
#[derive(Debug, Clone)]
pub struct SpdMatrix {
    sym: SymMatrix,
    chol_l: DMatrix<f64>,
    inv: DMatrix<f64>,
    ln_det: f64,
    eig_vals: Vec<f64>,
    eig_vecs: DMatrix<f64>,
}

impl SpdMatrix {
    pub fn new(sym: SymMatrix) -> Result<Self> {
        let m = sym.dim();
        let a = sym.mat();
        // Hand-rolled lower Cholesky so a failure reports the offending
        // leading minor (1-based).
        let mut l = DMatrix::zeros(m, m);
        for j in 0..m {
            let mut d = a[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > 0.0) || !d.is_finite() {
                let ev = sym.eigenvalues();
                let min_ev = *ev.last().unwrap_or(&f64::NAN);
                return Err(Error::NotPositiveDefinite {
                    index: j + 1,
                    eigenvalue: min_ev,
                });
            }
            let dj = d.sqrt();
            l[(j, j)] = dj;
            for i in (j + 1)..m {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / dj;
            }
        }
        let ln_det = 2.0 * (0..m).map(|i| l[(i, i)].ln()).sum::<f64>();
        let (eig_vals, eig_vecs) = sym.eigen();

        // Inverse through the Cholesky factor, then exact symmetrization.
        let linv = l
            .clone()
            .try_inverse()
            .ok_or(Error::SingularMatrix)?;
        let mut inv = linv.transpose() * &linv;
        for i in 0..m {
            for j in (i + 1)..m {
                let v = 0.5 * (inv[(i, j)] + inv[(j, i)]);
                inv[(i, j)] = v;
                inv[(j, i)] = v;
            }
        }

        Ok(SpdMatrix {
            sym,
            chol_l: l,
            inv,
            ln_det,
            eig_vals,
            eig_vecs,
        })
    }

    pub fn from_dmatrix(mat: DMatrix<f64>, tol: f64) -> Result<Self> {
        Self::new(SymMatrix::from_dmatrix(mat, tol)?)
    }

    pub fn identity(m: usize) -> Self {
        Self::new(SymMatrix::identity(m)).expect("identity is SPD")
    }

    pub fn scaled_identity(m: usize, c: f64) -> Result<Self> {
        Self::new(SymMatrix::scaled_identity(m, c))
    }

    pub fn dim(&self) -> usize {
        self.sym.dim()
    }

    pub fn sym(&self) -> &SymMatrix {
        &self.sym
    }

    pub fn mat(&self) -> &DMatrix<f64> {
        self.sym.mat()
    }

    /// Lower Cholesky factor `L` with `L L' = self`.
    pub fn chol_l(&self) -> &DMatrix<f64> {
        &self.chol_l
    }

    pub fn inv_mat(&self) -> &DMatrix<f64> {
        &self.inv
    }

    pub fn ln_det(&self) -> f64 {
        self.ln_det
    }

    pub fn trace(&self) -> f64 {
        self.sym.trace()
    }

    /// Eigenvalues in descending order; all strictly positive.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eig_vals
    }

    pub fn inverse(&self) -> SpdMatrix {
        SpdMatrix::from_dmatrix(self.inv.clone(), 1e-6)
            .expect("inverse of an SPD matrix is SPD")
    }

    /// Symmetric square root via the spectral decomposition.
    pub fn sqrt(&self) -> SpdMatrix {
        let m = self.dim();
        let d = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                self.eig_vals[i].sqrt()
            } else {
                0.0
            }
        });
        let s = &self.eig_vecs * d * self.eig_vecs.transpose();
        SpdMatrix::from_dmatrix(s, 1e-6).expect("square root of an SPD matrix is SPD")
    }

    /// `tr(self^{-1} X)`.
    pub fn trace_inv_product(&self, x: &SymMatrix) -> Result<f64> {
        if self.dim() != x.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        let m = self.dim();
        let mut acc = 0.0;
        for i in 0..m {
            for j in 0..m {
                acc += self.inv[(i, j)] * x.mat()[(j, i)];
            }
        }
        Ok(acc)
    }

    /// Symmetrized similarity `self^{-1/2} X self^{-1/2}`; shares the
    /// eigenvalues of `self^{-1} X` but is exactly symmetric.
    pub fn whiten(&self, x: &SymMatrix) -> Result<SymMatrix> {
        if self.dim() != x.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        // self^{-1/2} through the inverse of the spectral square root.
        let m = self.dim();
        let d = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                1.0 / self.eig_vals[i].sqrt()
            } else {
                0.0
            }
        });
        let s_inv_half = &self.eig_vecs * d * self.eig_vecs.transpose();
        let w = &s_inv_half * x.mat() * &s_inv_half;
        SymMatrix::from_dmatrix(w, 1e-6)
    }

    /// Congruence `self^{1/2} X self^{1/2}`.
    pub fn color(&self, x: &SymMatrix) -> Result<SymMatrix> {
        if self.dim() != x.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        let h = self.sqrt();
        let w = h.mat() * x.mat() * h.mat();
        SymMatrix::from_dmatrix(w, 1e-6)
    }
}

impl Serialize for SpdMatrix {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        self.sym.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for SpdMatrix {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let sym = SymMatrix::deserialize(de)?;
        SpdMatrix::new(sym).map_err(D::Error::custom)
    }
}

/// Builds an SPD matrix from row-major entries, validating symmetry within
/// `tol` and positive definiteness.
pub fn spd_from_entries(m: usize, entries: &[f64], tol: f64) -> Result<SpdMatrix> {
    SpdMatrix::new(SymMatrix::from_flat(m, entries, tol)?)
}

/// Symmetric square root of an SPD matrix.
pub fn sqrt_spd(x: &SpdMatrix) -> SpdMatrix {
    x.sqrt()
}

/// Log of the multivariate gamma function
/// `Gamma_m(a) = pi^{m(m-1)/4} prod_{i=1}^m Gamma(a - (i-1)/2)`.
pub fn mv_gamma_ln(m: usize, a: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::ParameterOutOfRange("m must be positive".into()));
    }
    if !(a > (m as f64 - 1.0) / 2.0) {
        return Err(Error::Domain(format!(
            "multivariate gamma needs a > (m-1)/2; a={a}, m={m}"
        )));
    }
    let mut acc = (m * (m - 1)) as f64 / 4.0 * std::f64::consts::PI.ln();
    for i in 0..m {
        acc += ln_gamma(a - i as f64 / 2.0);
    }
    Ok(acc)
}

/// Log of the multivariate beta function
/// `B_m(a,b) = Gamma_m(a) Gamma_m(b) / Gamma_m(a+b)`.
pub fn mv_beta_ln(m: usize, a: f64, b: f64) -> Result<f64> {
    Ok(mv_gamma_ln(m, a)? + mv_gamma_ln(m, b)? - mv_gamma_ln(m, a + b)?)
}
