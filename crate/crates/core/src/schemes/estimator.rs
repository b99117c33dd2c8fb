//! Pluggable noise estimators. The bounds maps are parametric in a few
//! growth functions; the only hard requirement is monotonicity, which is
//! what downwards-closedness of the model needs. Estimators never touch
//! secret material.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::model::SchemeKind;
use crate::rational::{rat, rat_from_big, Rat};

/// Two-argument noise growth (cipher-cipher multiplies and the TFHE
/// product family).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Growth2 {
    /// f(e1, e2) = e1 * e2
    Product,
    /// f(e1, e2) = c * e1 * e2
    ScaledProduct(Rat),
    /// f(e1, e2) = lin*(e1 + e2) + prod*e1*e2 + konst
    Affine { lin: Rat, prod: Rat, konst: Rat },
    /// Grid lookup, rounded up to the next grid point; out of range is
    /// undefined (reported as noise overflow).
    Table(GrowthTable),
}

impl Growth2 {
    pub fn eval(&self, e1: &Rat, e2: &Rat) -> Option<Rat> {
        match self {
            Growth2::Product => Some(e1 * e2),
            Growth2::ScaledProduct(c) => Some(c * e1 * e2),
            Growth2::Affine { lin, prod, konst } => {
                Some(lin * (e1 + e2) + prod * e1 * e2 + konst)
            }
            Growth2::Table(t) => t.eval(e1, e2),
        }
    }
}

/// Tabulated growth over an ascending grid of noise values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthTable {
    pub grid: Vec<Rat>,
    /// values[i][j] = f(grid[i], grid[j])
    pub values: Vec<Vec<Rat>>,
}

impl GrowthTable {
    fn ceil_index(&self, x: &Rat) -> Option<usize> {
        self.grid.iter().position(|g| g >= x)
    }

    pub fn eval(&self, e1: &Rat, e2: &Rat) -> Option<Rat> {
        let i = self.ceil_index(e1)?;
        let j = self.ceil_index(e2)?;
        Some(self.values[i][j].clone())
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.grid.is_empty() || self.values.len() != self.grid.len() {
            return Err("growth table shape mismatch".into());
        }
        for row in &self.values {
            if row.len() != self.grid.len() {
                return Err("growth table shape mismatch".into());
            }
        }
        for w in self.grid.windows(2) {
            if w[0] >= w[1] {
                return Err("growth table grid must be strictly ascending".into());
            }
        }
        let n = self.grid.len();
        for i in 0..n {
            for j in 0..n {
                if i + 1 < n && self.values[i][j] > self.values[i + 1][j] {
                    return Err(format!(
                        "growth table not monotone: f({}, {}) = {} > f({}, {}) = {}",
                        crate::rational::display(&self.grid[i + 1]),
                        crate::rational::display(&self.grid[j]),
                        crate::rational::display(&self.values[i + 1][j]),
                        crate::rational::display(&self.grid[i]),
                        crate::rational::display(&self.grid[j]),
                        crate::rational::display(&self.values[i][j]),
                    ));
                }
                if j + 1 < n && self.values[i][j] > self.values[i][j + 1] {
                    return Err("growth table not monotone in the second argument".into());
                }
            }
        }
        Ok(())
    }
}

/// The growth functions one scheme instance runs with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoiseEstimator {
    pub name: String,
    /// Cipher-cipher multiply growth f.
    pub mul_cc: Growth2,
    /// Plain-cipher multiply growth g: eps -> c_pc * eps.
    pub c_pc: Rat,
    /// Modswitch rounding correction B_r.
    pub b_r: Rat,
    /// Modswitch cap l_w as a fraction of q_w.
    pub ms_cap_ratio: Rat,
    /// TFHE RGSW-RGSW growth f'.
    pub tfhe_box: Growth2,
    /// TFHE external product growth g (RGSW x LWE).
    pub tfhe_ext_lwe: Growth2,
    /// TFHE external product growth g' (RGSW x RLWE).
    pub tfhe_ext_rlwe: Growth2,
}

impl NoiseEstimator {
    pub fn mul_pc(&self, eps: &Rat) -> Rat {
        &self.c_pc * eps
    }
}

/// Knobs accepted from the scheme configuration; `None` keeps the default.
#[derive(Debug, Clone, Default)]
pub struct EstimatorOptions {
    pub c_pc: Option<Rat>,
    pub c_cc: Option<Rat>,
    pub b_r: Option<Rat>,
    pub ms_cap_ratio: Option<Rat>,
    pub table: Option<GrowthTable>,
}

/// Parameter view the estimator defaults are computed from.
#[derive(Debug, Clone)]
pub struct EstimatorParams {
    pub scheme: SchemeKind,
    pub t: BigInt,
    pub d: usize,
    /// Largest modulus (BGV: top of chain; BFV/TFHE: the single q).
    pub q_top: BigInt,
    pub err_width: u8,
}

fn sanity_grid() -> Vec<Rat> {
    use crate::rational::ratio;
    alloc::vec![
        ratio(1, 4),
        ratio(1, 2),
        rat(1),
        rat(2),
        ratio(5, 2),
        rat(10),
        rat(1000),
        rat(1) * rat(1 << 20),
    ]
}

fn check_monotone(g: &Growth2) -> Result<(), String> {
    if let Growth2::Table(t) = g {
        return t.validate();
    }
    let grid = sanity_grid();
    for a in &grid {
        for b in &grid {
            for a2 in &grid {
                if a2 < a {
                    continue;
                }
                let lo = g.eval(a, b);
                let hi = g.eval(a2, b);
                if let (Some(lo), Some(hi)) = (lo, hi) {
                    if hi < lo {
                        return Err("growth function is not monotone".into());
                    }
                    if lo.is_negative() {
                        return Err("growth function produces negative noise".into());
                    }
                }
            }
        }
    }
    Ok(())
}

/// Build a named estimator for a scheme.
///
/// `worst_case` uses f(e1, e2) = e1*e2 for BGV (the most conservative
/// product rule), an affine-product bound for BFV whose constants come
/// from the toy scheme's worst-case expansion, and plain products for the
/// TFHE growths. `scaled_worst_case` multiplies the cipher-cipher growth
/// by c_cc (default d), which provably dominates the toy ring expansion.
/// `custom_table` takes a user grid validated for monotonicity.
pub fn make_estimator(
    name: &str,
    params: &EstimatorParams,
    opts: &EstimatorOptions,
) -> Result<NoiseEstimator, String> {
    let t = rat_from_big(params.t.clone());
    let d = rat(params.d as i64);
    let q = rat_from_big(params.q_top.clone());
    let w = rat(i64::from(params.err_width.max(1)));

    let c_pc = opts.c_pc.clone().unwrap_or_else(|| &t * &d);
    if !c_pc.is_positive() {
        return Err("c_pc must be positive".into());
    }
    let b_r = opts.b_r.clone().unwrap_or_else(|| &t * (rat(1) + &d / rat(2)));
    let ms_cap_ratio = opts.ms_cap_ratio.clone().unwrap_or_else(|| {
        Rat::new(BigInt::one(), BigInt::from(2))
    });

    let bfv_affine = |scale: &Rat| -> Growth2 {
        // linear term: ring expansion times the plaintext magnitude bound;
        // product term: the tensor cross-noise after rescaling;
        // constant: wrap and rounding corrections plus relinearization
        let lin = &d * &t / rat(2) * scale;
        let prod = &d * (&q / &t) * scale;
        let konst = (&d * &t * &t * &t / rat(4)
            + &t * &d * &d / rat(2)
            + &t * rat(params.q_top.bits() as i64) * &d * &w)
            / &q
            * scale;
        Growth2::Affine { lin, prod, konst }
    };

    let (mul_cc, tfhe_growth) = match name {
        "worst_case" => {
            let cc = match params.scheme {
                SchemeKind::Bgv => Growth2::Product,
                SchemeKind::Bfv => bfv_affine(&rat(1)),
                SchemeKind::Tfhe => Growth2::Product,
            };
            (cc, Growth2::Product)
        }
        "scaled_worst_case" => {
            let c_cc = opts.c_cc.clone().unwrap_or_else(|| d.clone());
            if !c_cc.is_positive() {
                return Err("c_cc must be positive".into());
            }
            let cc = match params.scheme {
                SchemeKind::Bgv => {
                    // ring expansion on the residual product, the
                    // message-cross terms, and the key-switch addition
                    let b_ks = &t * &c_cc * &w * rat(params.q_top.bits() as i64);
                    Growth2::Affine {
                        lin: &c_cc * &t / rat(2),
                        prod: c_cc.clone(),
                        konst: b_ks,
                    }
                }
                SchemeKind::Bfv => bfv_affine(&c_cc),
                SchemeKind::Tfhe => Growth2::ScaledProduct(c_cc.clone()),
            };
            (cc, Growth2::ScaledProduct(c_cc))
        }
        "custom_table" => {
            let table = opts
                .table
                .clone()
                .ok_or_else(|| "custom_table estimator needs a table".to_string())?;
            table.validate()?;
            (Growth2::Table(table.clone()), Growth2::Table(table))
        }
        other => return Err(format!("unknown estimator `{other}`")),
    };

    check_monotone(&mul_cc)?;
    if b_r.is_negative() || ms_cap_ratio.is_negative() || ms_cap_ratio.is_zero() {
        return Err("b_r must be >= 0 and ms_cap_ratio positive".into());
    }

    Ok(NoiseEstimator {
        name: name.to_string(),
        mul_cc,
        c_pc,
        b_r,
        ms_cap_ratio,
        tfhe_box: tfhe_growth.clone(),
        tfhe_ext_lwe: tfhe_growth.clone(),
        tfhe_ext_rlwe: tfhe_growth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn params(scheme: SchemeKind) -> EstimatorParams {
        EstimatorParams {
            scheme,
            t: BigInt::from(16),
            d: 16,
            q_top: BigInt::from(1u64 << 40),
            err_width: 1,
        }
    }

    #[test]
    fn worst_case_is_the_plain_product() {
        let est = make_estimator("worst_case", &params(SchemeKind::Bgv), &Default::default())
            .unwrap();
        assert_eq!(est.mul_cc.eval(&rat(3), &rat(5)).unwrap(), rat(15));
        // multiplicative identity
        for x in [rat(1), rat(7), ratio(22, 7)] {
            assert_eq!(est.mul_cc.eval(&rat(1), &x).unwrap(), x);
        }
    }

    #[test]
    fn default_pc_growth_is_t_times_d() {
        let est = make_estimator("worst_case", &params(SchemeKind::Bgv), &Default::default())
            .unwrap();
        assert_eq!(est.mul_pc(&rat(2)), rat(2 * 16 * 16));
    }

    #[test]
    fn default_b_r() {
        let est = make_estimator("worst_case", &params(SchemeKind::Bgv), &Default::default())
            .unwrap();
        assert_eq!(est.b_r, rat(16 * 9)); // t*(1 + d/2) = 16*9
    }

    #[test]
    fn scaled_variant_dominates_the_ring_expansion() {
        let est = make_estimator(
            "scaled_worst_case",
            &params(SchemeKind::Bgv),
            &Default::default(),
        )
        .unwrap();
        // d*e1*e2 + (d*t/2)*(e1+e2) + t*d*w*bits(q)
        let want = rat(16 * 15) + rat(16 * 8) * rat(8) + rat(16 * 16 * 40);
        assert_eq!(est.mul_cc.eval(&rat(3), &rat(5)).unwrap(), want);
    }

    #[test]
    fn non_monotone_table_rejected() {
        // f(2,2) = 3 < f(1,2) = 4 decreases in the first argument
        let table = GrowthTable {
            grid: alloc::vec![rat(1), rat(2)],
            values: alloc::vec![
                alloc::vec![rat(2), rat(4)],
                alloc::vec![rat(2), rat(3)],
            ],
        };
        let mut opts = EstimatorOptions::default();
        opts.table = Some(table);
        let err = make_estimator("custom_table", &params(SchemeKind::Bgv), &opts).unwrap_err();
        assert!(err.contains("monotone"), "{err}");
    }

    #[test]
    fn table_lookup_rounds_up_and_overflows_off_grid() {
        let table = GrowthTable {
            grid: alloc::vec![rat(1), rat(2), rat(4)],
            values: alloc::vec![
                alloc::vec![rat(1), rat(2), rat(4)],
                alloc::vec![rat(2), rat(4), rat(8)],
                alloc::vec![rat(4), rat(8), rat(16)],
            ],
        };
        table.validate().unwrap();
        assert_eq!(table.eval(&ratio(3, 2), &rat(1)).unwrap(), rat(2));
        assert_eq!(table.eval(&rat(5), &rat(1)), None);
    }

    #[test]
    fn unknown_name_rejected() {
        assert!(make_estimator("best_case", &params(SchemeKind::Bgv), &Default::default()).is_err());
    }
}
