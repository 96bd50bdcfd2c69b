use std::fmt;

use num::bigint::BigUint;
use num::traits::One;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Integer partition: non-increasing positive parts. The empty partition
/// (weight 0) is allowed and indexes the constant term of every series.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        for w in parts.windows(2) {
            if w[0] < w[1] {
                return Err(Error::ParameterOutOfRange(format!(
                    "partition parts must be non-increasing, got {parts:?}"
                )));
            }
        }
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::ParameterOutOfRange(
                "partition parts must be positive".into(),
            ));
        }
        Ok(Partition(parts))
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    /// Part at 1-based row `i`, zero beyond the length.
    pub fn part(&self, i: usize) -> u32 {
        if i >= 1 && i <= self.0.len() {
            self.0[i - 1]
        } else {
            0
        }
    }

    pub fn weight(&self) -> usize {
        self.0.iter().map(|&p| p as usize).sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Partition with every part doubled.
    pub fn doubled(&self) -> Partition {
        Partition(self.0.iter().map(|&p| 2 * p).collect())
    }

    /// `self` dominates `other`: every prefix sum is at least as large.
    /// Only meaningful for equal weights; callers compare within one layer.
    pub fn dominates(&self, other: &Partition) -> bool {
        let mut a = 0u64;
        let mut b = 0u64;
        let rows = self.0.len().max(other.0.len());
        for i in 1..=rows {
            a += self.part(i) as u64;
            b += other.part(i) as u64;
            if a < b {
                return false;
            }
        }
        true
    }

    /// `rho = sum_i k_i (k_i - i)`, strictly monotone under dominance.
    pub fn rho(&self) -> i64 {
        self.0
            .iter()
            .enumerate()
            .map(|(i0, &k)| k as i64 * (k as i64 - (i0 as i64 + 1)))
            .sum()
    }

    /// Multiplicities of each distinct part value, largest first.
    pub fn multiplicities(&self) -> Vec<(u32, usize)> {
        let mut out: Vec<(u32, usize)> = Vec::new();
        for &p in &self.0 {
            match out.last_mut() {
                Some((v, c)) if *v == p => *c += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// All partitions of `k` in reverse-lexicographic order, optionally capped
/// at `max_len` parts. `partitions_of(0, _)` is the single empty partition.
pub fn partitions_of(k: usize, max_len: Option<usize>) -> Vec<Partition> {
    let cap = max_len.unwrap_or(k.max(1));
    let mut out = Vec::new();
    let mut current: Vec<u32> = Vec::new();
    fn rec(remaining: usize, max_part: usize, cap: usize, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        if cur.len() == cap {
            return;
        }
        let hi = remaining.min(max_part);
        // Feasibility: the remaining slots must be able to absorb the rest.
        for p in (1..=hi).rev() {
            let slots_left = cap - cur.len() - 1;
            if remaining - p > slots_left * p {
                break;
            }
            cur.push(p as u32);
            rec(remaining - p, p, cap, cur, out);
            cur.pop();
        }
    }
    rec(k, k, cap, &mut current, &mut out);
    out
}

/// Generalized Pochhammer symbol
/// `(b)_kappa = prod_i (b - (i-1)/2)_{k_i}` with rising factorials.
/// Zeros are permitted; the result may be 0 for half-integer `b`.
pub fn gen_pochhammer(b: f64, kappa: &Partition) -> f64 {
    let mut acc = 1.0;
    for (i0, &ki) in kappa.parts().iter().enumerate() {
        let base = b - i0 as f64 / 2.0;
        for j in 0..ki {
            acc *= base + j as f64;
        }
    }
    acc
}

/// Sign and log-magnitude of the generalized Pochhammer symbol; sign is 0
/// when the product vanishes.
pub fn ln_gen_pochhammer(b: f64, kappa: &Partition) -> (f64, f64) {
    let mut sign = 1.0f64;
    let mut ln = 0.0f64;
    for (i0, &ki) in kappa.parts().iter().enumerate() {
        let base = b - i0 as f64 / 2.0;
        for j in 0..ki {
            let f = base + j as f64;
            if f == 0.0 {
                return (0.0, f64::NEG_INFINITY);
            }
            sign *= f.signum();
            ln += f.abs().ln();
        }
    }
    (sign, ln)
}

/// Log of the partition-indexed multivariate gamma
/// `Gamma_m(a, kappa) = pi^{m(m-1)/4} prod_{i=1}^m Gamma(a + k_i - (i-1)/2)`.
pub fn gamma_m_partition_ln(m: usize, a: f64, kappa: &Partition) -> Result<f64> {
    if m == 0 {
        return Err(Error::ParameterOutOfRange("m must be positive".into()));
    }
    if kappa.len() > m {
        return Err(Error::ParameterOutOfRange(format!(
            "partition {kappa} has more than m={m} parts"
        )));
    }
    let mut acc = (m * (m - 1)) as f64 / 4.0 * std::f64::consts::PI.ln();
    for i in 1..=m {
        let arg = a + kappa.part(i) as f64 - (i as f64 - 1.0) / 2.0;
        if !(arg > 0.0) {
            return Err(Error::Domain(format!(
                "gamma argument {arg} <= 0 in partition-indexed gamma (row {i})"
            )));
        }
        acc += ln_gamma(arg);
    }
    Ok(acc)
}

/// Dimension of the symmetric-group irreducible labelled by `nu` (a
/// partition of N), by the hook length formula, as an exact integer.
pub fn sym_group_dim(nu: &Partition) -> BigUint {
    let n = nu.weight();
    let mut numer = BigUint::one();
    for i in 2..=n {
        numer *= BigUint::from(i);
    }
    let rows = nu.len();
    // Column lengths (conjugate partition).
    let cols = nu.part(1) as usize;
    let mut conj = vec![0u32; cols];
    for r in 1..=rows {
        for c in 0..nu.part(r) as usize {
            conj[c] += 1;
        }
    }
    let mut denom = BigUint::one();
    for r in 1..=rows {
        for c in 1..=nu.part(r) as usize {
            let hook = (nu.part(r) as i64 - c as i64) + (conj[c - 1] as i64 - r as i64) + 1;
            denom *= BigUint::from(hook as u64);
        }
    }
    numer / denom
}

/// Log of `sym_group_dim`, stable for large weights.
pub fn sym_group_dim_ln(nu: &Partition) -> f64 {
    let n = nu.weight();
    let mut acc = ln_gamma(n as f64 + 1.0);
    let rows = nu.len();
    let cols = nu.part(1) as usize;
    let mut conj = vec![0u32; cols];
    for r in 1..=rows {
        for c in 0..nu.part(r) as usize {
            conj[c] += 1;
        }
    }
    for r in 1..=rows {
        for c in 1..=nu.part(r) as usize {
            let hook = (nu.part(r) as f64 - c as f64) + (conj[c - 1] as f64 - r as f64) + 1.0;
            acc -= hook.ln();
        }
    }
    acc
}

/// Number of distinct arrangements of `lambda` into `p` slots, i.e. the
/// value of the monomial symmetric polynomial at `p` ones.
pub fn monomial_at_ones(lambda: &Partition, p: usize) -> BigUint {
    if lambda.len() > p {
        return BigUint::ZERO;
    }
    let mut numer = BigUint::one();
    for i in 2..=p {
        numer *= BigUint::from(i);
    }
    let mut denom = BigUint::one();
    for (_, mult) in lambda.multiplicities() {
        for i in 2..=mult {
            denom *= BigUint::from(i);
        }
    }
    for i in 2..=(p - lambda.len()) {
        denom *= BigUint::from(i);
    }
    numer / denom
}

/// Log of the zonal polynomial at the identity,
/// `C_kappa(I_m) = 2^{2k} k! (m/2)_kappa dim(2 kappa) / (2k)!`.
/// Returns `None` when the value vanishes (more parts than `m`).
pub fn zonal_at_identity_ln(kappa: &Partition, m: usize) -> Option<f64> {
    if kappa.len() > m {
        return None;
    }
    let k = kappa.weight() as f64;
    if kappa.is_empty() {
        return Some(0.0);
    }
    let (sign, lnp) = ln_gen_pochhammer(m as f64 / 2.0, kappa);
    if sign <= 0.0 {
        return None;
    }
    let ln = 2.0 * k * std::f64::consts::LN_2 + ln_gamma(k + 1.0) + lnp
        + sym_group_dim_ln(&kappa.doubled())
        - ln_gamma(2.0 * k + 1.0);
    Some(ln)
}

/// Raising moves for the zonal recurrence: take `t` units from row `j` to
/// an earlier row `i`, yielding `(sorted partition, l_i - l_j + 2t)`.
/// Every `(i, j, t)` triple contributes its own term.
pub(crate) fn raising_moves(lambda: &Partition) -> Vec<(Partition, i64)> {
    let parts = lambda.parts();
    let p = parts.len();
    let mut out = Vec::new();
    for i in 0..p {
        for j in (i + 1)..p {
            for t in 1..=parts[j] {
                let factor = parts[i] as i64 - parts[j] as i64 + 2 * t as i64;
                let mut v: Vec<u32> = parts.to_vec();
                v[i] += t;
                v[j] -= t;
                v.retain(|&x| x > 0);
                v.sort_unstable_by(|a, b| b.cmp(a));
                out.push((Partition(v), factor));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::traits::ToPrimitive;
    use approx::assert_relative_eq;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn partitions_of_four_in_reverse_lex_order() {
        let got: Vec<String> = partitions_of(4, None).iter().map(|p| p.to_string()).collect();
        assert_eq!(got, vec!["(4)", "(3,1)", "(2,2)", "(2,1,1)", "(1,1,1,1)"]);
    }

    #[test]
    fn partitions_capped_at_two_parts() {
        let got: Vec<String> = partitions_of(6, Some(2)).iter().map(|p| p.to_string()).collect();
        assert_eq!(got, vec!["(6)", "(5,1)", "(4,2)", "(3,3)"]);
    }

    #[test]
    fn partition_counts() {
        assert_eq!(partitions_of(0, None).len(), 1);
        assert_eq!(partitions_of(8, None).len(), 22);
        assert_eq!(partitions_of(10, Some(3)).len(), 14);
    }

    #[test]
    fn invalid_partitions_rejected() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(Partition::new(vec![2, 0]).is_err());
    }

    #[test]
    fn gen_pochhammer_small_cases() {
        // (b)_(2,1) = b(b+1) * (b - 1/2).
        assert_relative_eq!(
            gen_pochhammer(1.5, &p(&[2, 1])),
            1.5 * 2.5 * 1.0,
            max_relative = 1e-14
        );
        // Half-integer zeros are allowed.
        assert_eq!(gen_pochhammer(0.5, &p(&[1, 1])), 0.0);
        assert_eq!(gen_pochhammer(2.0, &p(&[])), 1.0);
    }

    #[test]
    fn ln_gen_pochhammer_matches_direct() {
        let kappa = p(&[3, 2, 1]);
        let direct = gen_pochhammer(2.3, &kappa);
        let (sign, ln) = ln_gen_pochhammer(2.3, &kappa);
        assert_relative_eq!(sign * ln.exp(), direct, max_relative = 1e-13);
    }

    #[test]
    fn partition_indexed_gamma_factorizes() {
        // Gamma_m(a, kappa) = (a)_kappa * Gamma_m(a).
        let kappa = p(&[2, 1]);
        let (m, a) = (3usize, 2.4f64);
        let lhs = gamma_m_partition_ln(m, a, &kappa).unwrap();
        let rhs = gen_pochhammer(a, &kappa).ln() + crate::matrix::mv_gamma_ln(m, a).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-13);
    }

    #[test]
    fn gamma_partition_domain_error() {
        // a + k_2 - 1/2 = 0.5 - 0.5 = 0 for the second row.
        assert!(gamma_m_partition_ln(2, 0.5, &p(&[1])).is_err());
    }

    #[test]
    fn rho_and_dominance() {
        assert_eq!(p(&[2]).rho(), 2);
        assert_eq!(p(&[1, 1]).rho(), -1);
        assert!(p(&[2]).dominates(&p(&[1, 1])));
        assert!(p(&[3, 1]).dominates(&p(&[2, 2])));
        assert!(!p(&[2, 2]).dominates(&p(&[3, 1])));
        // Incomparable pair.
        assert!(!p(&[3, 1, 1, 1]).dominates(&p(&[2, 2, 2])));
        assert!(!p(&[2, 2, 2]).dominates(&p(&[3, 1, 1, 1])));
    }

    #[test]
    fn hook_length_dimensions() {
        assert_eq!(sym_group_dim(&p(&[4])).to_u64(), Some(1));
        assert_eq!(sym_group_dim(&p(&[2, 2])).to_u64(), Some(2));
        assert_eq!(sym_group_dim(&p(&[2, 1])).to_u64(), Some(2));
        assert_eq!(sym_group_dim(&p(&[1, 1, 1])).to_u64(), Some(1));
        assert_eq!(sym_group_dim(&p(&[3, 2])).to_u64(), Some(5));
        // Sum of squares of dimensions = n!.
        let total: u64 = partitions_of(5, None)
            .iter()
            .map(|nu| sym_group_dim(nu).to_u64().unwrap().pow(2))
            .sum();
        assert_eq!(total, 120);
    }

    #[test]
    fn dim_ln_matches_exact() {
        let nu = p(&[6, 4, 2]);
        let exact = sym_group_dim(&nu).to_f64().unwrap();
        assert_relative_eq!(sym_group_dim_ln(&nu).exp(), exact, max_relative = 1e-12);
    }

    #[test]
    fn monomial_at_ones_counts_arrangements() {
        assert_eq!(monomial_at_ones(&p(&[2, 1]), 2).to_u64(), Some(2));
        assert_eq!(monomial_at_ones(&p(&[1, 1]), 3).to_u64(), Some(3));
        assert_eq!(monomial_at_ones(&p(&[2, 2, 1]), 2).to_u64(), Some(0));
    }

    #[test]
    fn zonal_identity_closed_form_hand_values() {
        // C_(2)(I_2) = 8/3 and C_(1,1)(I_2) = 4/3.
        assert_relative_eq!(
            zonal_at_identity_ln(&p(&[2]), 2).unwrap().exp(),
            8.0 / 3.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            zonal_at_identity_ln(&p(&[1, 1]), 2).unwrap().exp(),
            4.0 / 3.0,
            max_relative = 1e-12
        );
        // C_(1)(I_m) = m.
        assert_relative_eq!(
            zonal_at_identity_ln(&p(&[1]), 5).unwrap().exp(),
            5.0,
            max_relative = 1e-12
        );
        assert!(zonal_at_identity_ln(&p(&[1, 1, 1]), 2).is_none());
    }

    #[test]
    fn raising_moves_from_ones() {
        let moves = raising_moves(&p(&[1, 1]));
        assert_eq!(moves.len(), 1);
        assert_eq!(moves[0].0, p(&[2]));
        assert_eq!(moves[0].1, 2);
    }
}
