//! Self-contained JSON instances (group, system, elements, check settings) and
//! their seeded random generation.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::crossed::{CPElement, ElementSpec};
use crate::error::{Error, Result};
use crate::group::{GroupSpec, GroupTable};
use crate::rng::SeededRng;
use crate::system::{ActionSpec, AlgebraSpec, DynamicalSystem, SystemSpec};
use crate::verify::{run_all, CheckConfig, CheckReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub group: GroupSpec,
    pub system: SystemSpec,
    #[serde(default)]
    pub elements: Vec<ElementSpec>,
    #[serde(default)]
    pub config: CheckConfig,
    #[serde(default)]
    pub seed: u64,
}

/// A validated instance, ready for [`run_all`].
#[derive(Debug, Clone)]
pub struct Instance {
    pub system: Arc<DynamicalSystem>,
    pub elements: Vec<CPElement>,
    pub config: CheckConfig,
}

impl InstanceSpec {
    pub fn build(&self) -> Result<Instance> {
        let group = self.group.build().map_err(|e| e.at("group"))?;
        let system = Arc::new(self.system.build(group).map_err(|e| e.at("system"))?);
        let elements = self
            .elements
            .iter()
            .enumerate()
            .map(|(i, e)| e.build(&system).map_err(|err| err.at(&format!("elements[{i}]"))))
            .collect::<Result<Vec<_>>>()?;
        if !(self.config.tol_scale.is_finite() && self.config.tol_scale > 0.0) {
            return Err(Error::invalid("tol_scale must be positive and finite").at("config.tol_scale"));
        }
        if let Some(supports) = &self.config.supports {
            for (k, support) in supports.iter().enumerate() {
                if let Some(g) = support.iter().find(|&&g| g >= system.order()) {
                    return Err(Error::invalid(format!("group element {g} out of range"))
                        .at(&format!("config.supports[{k}]")));
                }
            }
        }
        let config = CheckConfig {
            seed: self.seed,
            ..self.config.clone()
        };
        Ok(Instance { system, elements, config })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    /// Build and run every check; the report carries this spec as its instance.
    pub fn run(&self) -> Result<CheckReport> {
        let inst = self.build()?;
        let mut report = run_all(&inst.system, &inst.elements, &inst.config)?;
        report.instance = serde_json::to_value(self).expect("instance serializes");
        Ok(report)
    }
}

/// Parse UTF-8 JSON into a validated spec. Syntax and schema errors carry the
/// JSON path and position; validation errors carry the path of the offending field.
pub fn parse_instance(text: &[u8]) -> Result<InstanceSpec> {
    let mut de = serde_json::Deserializer::from_slice(text);
    let spec: InstanceSpec = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let err = Error::Parse {
            message: inner.to_string(),
        };
        if path == "." { err } else { err.at(&path) }
    })?;
    de.end().map_err(|e| Error::Parse { message: e.to_string() })?;
    spec.build()?;
    Ok(spec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    /// Full matrix algebra with the trivial action.
    FullTrivial,
    /// Full matrix algebra, action conjugate to the regular representation.
    FullRegular,
    /// Block-diagonal algebra over C_n with the cyclic shift.
    DiagonalShift,
}

/// Shape of random instances. Ranges are inclusive `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Profile {
    /// Group order range.
    pub n: [usize; 2],
    /// Matrix size range (block size for the diagonal kind).
    pub d: [usize; 2],
    pub kinds: Vec<SystemKind>,
    /// Also draw C_2×C_2 and S_3 when their order is in range.
    pub noncyclic: bool,
    /// Use this group instead of drawing one; `n` is then ignored.
    pub group: Option<GroupSpec>,
    pub elements: usize,
    pub config: CheckConfig,
}

impl Default for Profile {
    fn default() -> Self {
        Profile {
            n: [1, 6],
            d: [1, 3],
            kinds: vec![SystemKind::FullTrivial, SystemKind::FullRegular, SystemKind::DiagonalShift],
            noncyclic: true,
            group: None,
            elements: 2,
            config: CheckConfig::default(),
        }
    }
}

impl Profile {
    /// Parse inline JSON; missing fields take their defaults.
    pub fn from_json(text: &str) -> Result<Self> {
        let profile: Profile =
            serde_json::from_str(text).map_err(|e| Error::Parse { message: e.to_string() }.at("profile"))?;
        profile.validate()?;
        Ok(profile)
    }

    fn validate(&self) -> Result<()> {
        let [nlo, nhi] = self.n;
        let [dlo, dhi] = self.d;
        if nlo == 0 || nlo > nhi {
            return Err(Error::invalid(format!("bad group order range {:?}", self.n)).at("profile.n"));
        }
        if dlo == 0 || dlo > dhi {
            return Err(Error::invalid(format!("bad dimension range {:?}", self.d)).at("profile.d"));
        }
        if self.kinds.is_empty() {
            return Err(Error::invalid("no system kinds").at("profile.kinds"));
        }
        Ok(())
    }
}

fn cyclic_spec(n: usize) -> GroupSpec {
    GroupSpec::Cyclic { n }
}

fn klein_spec() -> GroupSpec {
    GroupSpec::Product {
        factors: vec![cyclic_spec(2), cyclic_spec(2)],
    }
}

fn s3_spec() -> GroupSpec {
    GroupSpec::Table {
        table: GroupTable::symmetric(3).expect("S_3").rows(),
    }
}

/// Deterministic random instance. Coefficients have entries uniform in
/// [0,1)+i[0,1) before projection into the algebra.
pub fn random_instance(seed: u64, profile: &Profile) -> Result<InstanceSpec> {
    profile.validate()?;
    let mut rng = SeededRng::new(seed);
    let kind = profile.kinds[rng.below(profile.kinds.len())];
    let [nlo, nhi] = profile.n;
    let mut groups: Vec<(usize, GroupSpec)> = (nlo..=nhi).map(|n| (n, cyclic_spec(n))).collect();
    if profile.noncyclic && kind != SystemKind::DiagonalShift {
        if (nlo..=nhi).contains(&4) {
            groups.push((4, klein_spec()));
        }
        if (nlo..=nhi).contains(&6) {
            groups.push((6, s3_spec()));
        }
    }
    let (n, group) = match &profile.group {
        Some(spec) => (spec.build().map_err(|e| e.at("profile.group"))?.order(), spec.clone()),
        None => groups.swap_remove(rng.below(groups.len())),
    };
    let d = rng.between(profile.d[0], profile.d[1]);
    let system = match kind {
        SystemKind::FullTrivial => SystemSpec {
            dim: d,
            algebra: AlgebraSpec::Full,
            action: ActionSpec::Trivial,
        },
        SystemKind::FullRegular => {
            let copies = d.div_ceil(n);
            SystemSpec {
                dim: n * copies,
                algebra: AlgebraSpec::Full,
                action: ActionSpec::RegularConjugated {
                    copies,
                    seed: rng.next_u64(),
                },
            }
        }
        SystemKind::DiagonalShift => SystemSpec {
            dim: d,
            algebra: AlgebraSpec::Diagonal { blocks: n },
            action: ActionSpec::Shift,
        },
    };
    let ds = Arc::new(system.build(group.build()?)?);
    let elements = (0..profile.elements)
        .map(|_| {
            let coeffs = (0..n).map(|g| (g.to_string(), ds.random_element(&mut rng))).collect();
            ElementSpec { coeffs }
        })
        .collect();
    Ok(InstanceSpec {
        group,
        system,
        elements,
        config: profile.config.clone(),
        seed,
    })
}
