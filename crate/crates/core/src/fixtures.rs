//! Published reference values, embedded at compile time.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::evolve::BoundaryClassVector;
use crate::multipoly::{Polynomial, VarSet};
use crate::recursion_gen::{mixed_name, RecursionSystem};

const SOURCE: &str = include_str!("../fixtures/reference_values.toml");

#[derive(Clone, Debug, Deserialize)]
pub struct Fixtures {
    pub version: u32,
    pub d2: EntropyReference,
    pub d3: DimensionReference,
    pub d4: DimensionReference,
    pub sierpinski_gasket: SierpinskiReference,
}

#[derive(Clone, Debug, Deserialize)]
pub struct StageRow {
    pub n: usize,
    pub c: Vec<String>,
    #[serde(rename = "M")]
    pub total: String,
}

#[derive(Clone, Debug, Deserialize)]
pub struct DimensionReference {
    pub classes: Vec<String>,
    pub stages: Vec<StageRow>,
    pub ratio_digits: usize,
    /// Rows for stages 1, 2, ...; columns `r_0..r_d`.
    pub ratios: Vec<Vec<String>>,
    pub epsilon_digits: Option<usize>,
    /// `eps(n+1)/eps(n)^2` for `n = 1, 2, ...` as printed.
    pub epsilon_ratios: Option<Vec<String>>,
    pub ratio_limit: String,
    pub entropy_prefix: String,
    pub entropy_k: usize,
    pub entropy_min_certified: usize,
    pub recursion: Option<BTreeMap<String, String>>,
    pub mixed_recursion: Option<BTreeMap<String, String>>,
    pub ratio_forms: Option<BTreeMap<String, String>>,
    pub appendix: Option<AppendixReference>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct EntropyReference {
    pub entropy_prefix: String,
    pub entropy_k: usize,
}

#[derive(Clone, Debug, Deserialize)]
pub struct SierpinskiReference {
    pub entropy: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct AppendixReference {
    pub omega_difference: String,
    pub contraction_leading: String,
}

pub fn reference() -> &'static Fixtures {
    static CELL: OnceLock<Fixtures> = OnceLock::new();
    CELL.get_or_init(|| toml::from_str(SOURCE).expect("embedded reference values parse"))
}

fn parse_int(s: &str) -> Result<BigInt> {
    s.parse().map_err(|_| Error::Integrity(format!("reference value `{s}` is not an integer")))
}

impl DimensionReference {
    pub fn d(&self) -> usize {
        self.classes.len() - 2
    }

    /// Class vector at stage `n`, checked against the listed total.
    pub fn stage_vector(&self, n: usize) -> Result<BoundaryClassVector> {
        let row = self
            .stages
            .iter()
            .find(|r| r.n == n)
            .ok_or_else(|| Error::InvalidArgument(format!("no reference stage {n}")))?;
        let counts = row.c.iter().map(|s| parse_int(s)).collect::<Result<Vec<_>>>()?;
        let v = BoundaryClassVector::new(self.d(), n, counts);
        if v.total() != &parse_int(&row.total)? {
            return Err(Error::Integrity(format!("reference stage {n} total disagrees with its classes")));
        }
        Ok(v)
    }

    fn class_vars(&self) -> VarSet {
        VarSet::new(self.classes.iter().cloned())
    }

    /// The printed recursion, re-expressed over `c0..c{d+1}`.
    pub fn recursion_system(&self) -> Result<Option<RecursionSystem>> {
        let Some(table) = &self.recursion else { return Ok(None) };
        let vars = self.class_vars();
        let renames: Vec<(String, String)> =
            self.classes.iter().enumerate().map(|(k, name)| (name.clone(), format!("c{k}"))).collect();
        let renames: Vec<(&str, &str)> = renames.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let get = |key: &str| -> Result<Polynomial> {
            let text = table.get(key).ok_or_else(|| Error::Integrity(format!("reference recursion lacks `{key}`")))?;
            Ok(Polynomial::parse(text, &vars)?.rename(&renames))
        };
        let classes = self.classes.iter().map(|name| get(name)).collect::<Result<Vec<_>>>()?;
        let total = get("M")?;
        RecursionSystem::new(self.d(), classes, total).map(Some)
    }

    /// Printed pre-expansion recursion for the class called `key`, over the
    /// generated mixed-count names.
    pub fn mixed_recursion(&self, key: &str) -> Result<Option<Polynomial>> {
        let Some(text) = self.mixed_recursion.as_ref().and_then(|t| t.get(key)) else { return Ok(None) };
        let names = d3_mixed_names();
        let vars = VarSet::new(names.iter().map(|(short, _)| short.to_string()));
        let renames: Vec<(&str, &str)> = names.iter().map(|(a, b)| (*a, b.as_str())).collect();
        Ok(Some(Polynomial::parse(text, &vars)?.rename(&renames)))
    }

    /// Printed ratio form `key` over `r0..r{d}`.
    pub fn ratio_form(&self, key: &str) -> Result<Option<Polynomial>> {
        let Some(text) = self.ratio_forms.as_ref().and_then(|t| t.get(key)) else { return Ok(None) };
        let vars = VarSet::new(["alpha", "beta", "gamma", "omega"]);
        let p = Polynomial::parse(text, &vars)?;
        Ok(Some(p.rename(&[("alpha", "r0"), ("beta", "r1"), ("gamma", "r2"), ("omega", "r3")])))
    }
}

/// Short names of the TH_3 mixed counts and the generated name of each.
pub fn d3_mixed_names() -> Vec<(&'static str, String)> {
    [("M", 0, 0), ("P", 1, 0), ("Q", 2, 0), ("R", 3, 0), ("f", 4, 0), ("X", 0, 1), ("Y", 1, 1), ("W", 2, 1), ("g", 3, 1)]
        .into_iter()
        .map(|(short, a, b)| (short, mixed_name(a, b)))
        .collect()
}

/// Gap-variable names used for TH_3 in print: `g1, g2, g3` are `a, b, c`.
pub fn d3_gap_renames() -> [(&'static str, &'static str); 3] {
    [("g1", "a"), ("g2", "b"), ("g3", "c")]
}
