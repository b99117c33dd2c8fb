//! Scheme configuration files: a JSON document naming the scheme, its
//! parameters, the noise estimator, and (optionally) a seed for oracle
//! mode. The field set is frozen by `docs/scheme-config.schema.json` and
//! the golden tests. Moduli may be written as JSON numbers or as decimal
//! strings (they routinely exceed 2^53).

use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use num_bigint::BigInt;
use num_traits::Signed;
use serde::Deserialize;

use ila_core::model::{SchemeKind, SchemeModel};
use ila_core::rational::Rat;
use ila_core::refscheme::{self, TfheParams, ToyParams};
use ila_core::schemes::{
    build_bfv, build_bgv, build_tfhe, make_estimator, EstimatorOptions, EstimatorParams,
    GrowthTable,
};

/// A JSON integer that may be written as a number or a decimal string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum BigIntField {
    Num(i64),
    Text(String),
}

impl BigIntField {
    pub fn to_bigint(&self) -> Result<BigInt> {
        match self {
            BigIntField::Num(n) => Ok(BigInt::from(*n)),
            BigIntField::Text(s) => s
                .trim()
                .parse::<BigInt>()
                .with_context(|| format!("bad integer literal `{s}`")),
        }
    }
}

/// Rationals are written `"a"` or `"a/b"`.
pub fn parse_rational(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (numer, denom) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let n: BigInt = numer
        .parse()
        .with_context(|| format!("bad rational `{s}`"))?;
    let d: BigInt = denom
        .parse()
        .with_context(|| format!("bad rational `{s}`"))?;
    if !d.is_positive() {
        bail!("rational `{s}` needs a positive denominator");
    }
    Ok(Rat::new(n, d))
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct EstimatorOptionsConfig {
    #[serde(default)]
    pub c_pc: Option<String>,
    #[serde(default)]
    pub c_cc: Option<String>,
    #[serde(default)]
    pub b_r: Option<String>,
    #[serde(default)]
    pub ms_cap_ratio: Option<String>,
    /// Custom growth table: ascending grid plus a value matrix.
    #[serde(default)]
    pub table_grid: Option<Vec<String>>,
    #[serde(default)]
    pub table_values: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorConfig {
    pub name: String,
    #[serde(default)]
    pub options: EstimatorOptionsConfig,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            name: "worst_case".into(),
            options: Default::default(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    /// "bgv", "bfv", or "tfhe".
    pub scheme: String,
    pub t: BigIntField,
    pub d: usize,
    /// Moduli listed from the top of the chain down: q_L, ..., q_0.
    pub modulus_chain: Vec<BigIntField>,
    #[serde(default)]
    pub estimator: EstimatorConfig,
    /// Enables oracle mode (key generation / simulation) when present.
    #[serde(default)]
    pub seed: Option<u64>,
    /// Toy-scheme error width (centered binomial).
    #[serde(default = "default_err_width")]
    pub err_width: u8,
    /// Override for the declared fresh-cipher noise bound ("a" or "a/b").
    #[serde(default)]
    pub fresh_noise: Option<String>,
    /// TFHE only: the post-bootstrap noise counter eps_b.
    #[serde(default)]
    pub pbs_noise: Option<String>,
}

fn default_err_width() -> u8 {
    1
}

impl SchemeConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read scheme config {}", path.display()))?;
        let cfg: SchemeConfig = serde_json::from_str(&text)
            .with_context(|| format!("bad scheme config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn kind(&self) -> Result<SchemeKind> {
        match self.scheme.as_str() {
            "bgv" => Ok(SchemeKind::Bgv),
            "bfv" => Ok(SchemeKind::Bfv),
            "tfhe" => Ok(SchemeKind::Tfhe),
            other => bail!("unknown scheme `{other}` (expected bgv, bfv, or tfhe)"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let kind = self.kind()?;
        if self.modulus_chain.is_empty() {
            bail!("modulus_chain must be non-empty");
        }
        // config lists the chain top-down; check it is strictly decreasing
        let moduli: Result<Vec<BigInt>> =
            self.modulus_chain.iter().map(|m| m.to_bigint()).collect();
        let moduli = moduli?;
        for w in moduli.windows(2) {
            if w[0] <= w[1] {
                bail!("modulus_chain must be strictly decreasing (q_L first)");
            }
        }
        match kind {
            SchemeKind::Bfv | SchemeKind::Tfhe if moduli.len() != 1 => {
                bail!("{} takes a single modulus", self.scheme)
            }
            _ => {}
        }
        Ok(())
    }

    /// Chain in internal order q_0 < ... < q_L.
    pub fn chain_ascending(&self) -> Result<Vec<BigInt>> {
        let mut moduli: Vec<BigInt> = self
            .modulus_chain
            .iter()
            .map(|m| m.to_bigint())
            .collect::<Result<_>>()?;
        moduli.reverse();
        Ok(moduli)
    }

    fn estimator_options(&self) -> Result<EstimatorOptions> {
        let o = &self.estimator.options;
        let mut opts = EstimatorOptions::default();
        if let Some(s) = &o.c_pc {
            opts.c_pc = Some(parse_rational(s)?);
        }
        if let Some(s) = &o.c_cc {
            opts.c_cc = Some(parse_rational(s)?);
        }
        if let Some(s) = &o.b_r {
            opts.b_r = Some(parse_rational(s)?);
        }
        if let Some(s) = &o.ms_cap_ratio {
            opts.ms_cap_ratio = Some(parse_rational(s)?);
        }
        match (&o.table_grid, &o.table_values) {
            (Some(grid), Some(values)) => {
                let grid = grid
                    .iter()
                    .map(|s| parse_rational(s))
                    .collect::<Result<Vec<_>>>()?;
                let values = values
                    .iter()
                    .map(|row| row.iter().map(|s| parse_rational(s)).collect())
                    .collect::<Result<Vec<Vec<_>>>>()?;
                opts.table = Some(GrowthTable { grid, values });
            }
            (None, None) => {}
            _ => bail!("table_grid and table_values must be given together"),
        }
        Ok(opts)
    }

    /// Build the scheme model. `seed` overrides the config seed; `None`
    /// for both means static mode (no key material anywhere).
    pub fn build_model(&self, seed_override: Option<u64>) -> Result<SchemeModel> {
        let kind = self.kind()?;
        let chain = self.chain_ascending()?;
        let t = self.t.to_bigint()?;
        let seed = seed_override.or(self.seed);
        let est_params = EstimatorParams {
            scheme: kind,
            t: t.clone(),
            d: if kind == SchemeKind::Tfhe { 1 } else { self.d },
            q_top: chain.last().unwrap().clone(),
            err_width: self.err_width,
        };
        let est = make_estimator(&self.estimator.name, &est_params, &self.estimator_options()?)
            .map_err(|e| anyhow::anyhow!("estimator: {e}"))?;
        match kind {
            SchemeKind::Bgv | SchemeKind::Bfv => {
                let params = ToyParams {
                    t,
                    d: self.d,
                    chain,
                    err_width: self.err_width,
                };
                params.validate().map_err(|e| anyhow::anyhow!(e))?;
                let mut model = if kind == SchemeKind::Bgv {
                    let keys = seed.map(|s| Arc::new(refscheme::bgv::keygen(&params, s)));
                    build_bgv(params, est, keys)
                } else {
                    let keys = seed.map(|s| Arc::new(refscheme::bfv::keygen(&params, s)));
                    build_bfv(params, est, keys)
                };
                if let Some(s) = &self.fresh_noise {
                    model.fresh_noise = parse_rational(s)?;
                }
                Ok(model)
            }
            SchemeKind::Tfhe => {
                let fresh = match &self.fresh_noise {
                    Some(s) => parse_rational(s)?,
                    None => Rat::from_integer(t.clone()),
                };
                let pbs = match &self.pbs_noise {
                    Some(s) => parse_rational(s)?,
                    None => fresh.clone(),
                };
                let params = TfheParams {
                    t,
                    q: chain[0].clone(),
                    fresh_noise: fresh,
                    pbs_noise: pbs,
                };
                Ok(build_tfhe(params, est, seed.is_some()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_minimal_bgv() {
        let cfg: SchemeConfig = serde_json::from_str(
            r#"{
                "scheme": "bgv", "t": 16, "d": 16,
                "modulus_chain": ["35184372088833", "33554433"],
                "estimator": {"name": "worst_case"}
            }"#,
        )
        .unwrap();
        cfg.validate().unwrap();
        let model = cfg.build_model(None).unwrap();
        assert!(model.oracle.is_none());
        assert_eq!(model.chain.len(), 2);
        assert!(model.chain[0] < model.chain[1]);
    }

    #[test]
    fn unknown_fields_rejected() {
        let r: Result<SchemeConfig, _> = serde_json::from_str(
            r#"{"scheme": "bgv", "t": 16, "d": 16, "modulus_chain": [17], "bogus": 1}"#,
        );
        assert!(r.is_err());
    }

    #[test]
    fn increasing_chain_rejected() {
        let cfg: SchemeConfig = serde_json::from_str(
            r#"{"scheme": "bgv", "t": 16, "d": 16, "modulus_chain": [33554433, 35184372088833]}"#,
        )
        .unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("3/2").unwrap(), Rat::new(3.into(), 2.into()));
        assert_eq!(parse_rational("7").unwrap(), Rat::from_integer(7.into()));
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn seed_enables_oracle() {
        let cfg: SchemeConfig = serde_json::from_str(
            r#"{"scheme": "bgv", "t": 16, "d": 16, "modulus_chain": ["33554433"], "seed": 7}"#,
        )
        .unwrap();
        let model = cfg.build_model(None).unwrap();
        assert!(model.oracle.is_some());
    }
}
