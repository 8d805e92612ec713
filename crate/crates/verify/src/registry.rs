//! The claim registry: a TOML document of identities and congruence claims.

use std::fmt;
use std::path::Path;

use qseries_core::congruence::{ClaimKind, CongruenceCheck, Offset, PrimeCondition};
use qseries_core::expr::parse_qexpr;
use qseries_core::named::SeriesName;
use serde::Deserialize;

pub const BUILTIN: &str = include_str!("../data/registry.toml");

#[derive(Debug)]
pub enum RegistryError {
    Io(std::io::Error),
    Toml(toml::de::Error),
    Invalid { id: String, reason: String },
    DuplicateId(String),
}

impl fmt::Display for RegistryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegistryError::Io(e) => write!(f, "cannot read registry: {}", e),
            RegistryError::Toml(e) => write!(f, "registry is not valid TOML: {}", e),
            RegistryError::Invalid { id, reason } => write!(f, "record '{}': {}", id, reason),
            RegistryError::DuplicateId(id) => write!(f, "duplicate record id '{}'", id),
        }
    }
}

impl std::error::Error for RegistryError {}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentityRecord {
    pub id: String,
    pub paper_label: String,
    pub lhs: String,
    pub rhs: String,
    pub modulus: Option<u64>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PrimeRecord {
    pub min_p: u64,
    pub legendre: Option<i64>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "lowercase")]
pub enum Reading {
    #[default]
    Printed,
    Corrected,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum ClaimSuite {
    Congruences,
    Intermediates,
    Corrections,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClaimRecord {
    pub id: String,
    pub paper_label: String,
    pub suite: ClaimSuite,
    #[serde(default)]
    pub reading: Reading,
    pub series: String,
    pub kind: String,
    pub stride: u64,
    pub offset: [i64; 3],
    #[serde(default)]
    pub stride_pow: u32,
    #[serde(default)]
    pub offset_pow: u32,
    pub modulus: Option<u64>,
    pub rhs: Option<String>,
    pub prime: Option<PrimeRecord>,
    pub max_alpha: Option<u32>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    #[serde(default)]
    identity: Vec<IdentityRecord>,
    #[serde(default)]
    claim: Vec<ClaimRecord>,
}

/// A validated claim with its registry metadata.
#[derive(Clone, Debug)]
pub struct Claim {
    pub check: CongruenceCheck,
    pub paper_label: String,
    pub suite: ClaimSuite,
    pub reading: Reading,
}

#[derive(Clone, Debug, Default)]
pub struct Registry {
    pub identities: Vec<IdentityRecord>,
    pub claims: Vec<Claim>,
}

impl Registry {
    pub fn builtin() -> Registry {
        Registry::parse(BUILTIN).expect("the bundled registry is valid")
    }

    pub fn load(path: &Path) -> Result<Registry, RegistryError> {
        let text = std::fs::read_to_string(path).map_err(RegistryError::Io)?;
        Registry::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Registry, RegistryError> {
        let doc: Document = toml::from_str(text).map_err(RegistryError::Toml)?;
        let mut seen = std::collections::BTreeSet::new();
        for id in doc
            .identity
            .iter()
            .map(|r| &r.id)
            .chain(doc.claim.iter().map(|r| &r.id))
        {
            if !seen.insert(id.clone()) {
                return Err(RegistryError::DuplicateId(id.clone()));
            }
        }
        for r in &doc.identity {
            for side in [&r.lhs, &r.rhs] {
                parse_qexpr(side).map_err(|e| invalid(&r.id, format!("{}: {}", side, e)))?;
            }
            if let Some(m) = r.modulus {
                check_modulus(&r.id, m)?;
            }
        }
        let claims = doc
            .claim
            .iter()
            .map(to_claim)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Registry {
            identities: doc.identity,
            claims,
        })
    }

    pub fn claim(&self, id: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.check.id == id)
    }
}

fn invalid(id: &str, reason: String) -> RegistryError {
    RegistryError::Invalid {
        id: id.into(),
        reason,
    }
}

fn check_modulus(id: &str, m: u64) -> Result<(), RegistryError> {
    if m < 2 || !m.is_power_of_two() || m > 1 << 30 {
        return Err(invalid(id, format!("modulus {} is not a power of two", m)));
    }
    Ok(())
}

fn to_claim(r: &ClaimRecord) -> Result<Claim, RegistryError> {
    let series: SeriesName = r
        .series
        .parse()
        .map_err(|e| invalid(&r.id, format!("{}", e)))?;
    let kind = match r.kind.as_str() {
        "series-congruence" => ClaimKind::SeriesCongruence,
        "ap-vanishing" => ClaimKind::ApVanishing,
        "j-family" => ClaimKind::JFamily,
        other => return Err(invalid(&r.id, format!("unknown kind '{}'", other))),
    };
    if r.stride == 0 {
        return Err(invalid(&r.id, "stride must be positive".into()));
    }
    if r.offset[2] <= 0 {
        return Err(invalid(&r.id, "offset denominator must be positive".into()));
    }
    if let Some(m) = r.modulus {
        check_modulus(&r.id, m)?;
    }
    match (kind, &r.rhs) {
        (ClaimKind::SeriesCongruence, None) => {
            return Err(invalid(&r.id, "series congruence needs rhs".into()))
        }
        (ClaimKind::SeriesCongruence, Some(_)) => {}
        (_, Some(_)) => return Err(invalid(&r.id, "only series congruences take rhs".into())),
        (_, None) => {}
    }
    if kind != ClaimKind::SeriesCongruence && r.modulus.is_none() {
        return Err(invalid(&r.id, "vanishing claims need a modulus".into()));
    }
    if kind == ClaimKind::JFamily && r.prime.is_none() {
        return Err(invalid(&r.id, "j-families need a prime condition".into()));
    }
    let prime = r.prime.map(|p| match p.legendre {
        Some(xi) => PrimeCondition::Legendre { min_p: p.min_p, xi },
        None => PrimeCondition::Any { min_p: p.min_p },
    });
    if let Some(rhs) = &r.rhs {
        // templates are checked with a sample prime
        let sample = qseries_core::congruence::fill_template(rhs, Some(5));
        parse_qexpr(&sample).map_err(|e| invalid(&r.id, format!("rhs: {}", e)))?;
    }
    let [u, v, w] = r.offset;
    Ok(Claim {
        check: CongruenceCheck {
            id: r.id.clone(),
            label: r.paper_label.clone(),
            series,
            kind,
            stride: r.stride,
            offset: Offset::new(u, v, w),
            stride_pow: r.stride_pow,
            offset_pow: r.offset_pow,
            modulus: r.modulus,
            rhs: r.rhs.clone(),
            prime,
            max_alpha: r.max_alpha,
        },
        paper_label: r.paper_label.clone(),
        suite: r.suite,
        reading: r.reading,
    })
}
