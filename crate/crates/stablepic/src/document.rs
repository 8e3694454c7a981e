//! JSON documents for modules and differential tables.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use stablepic_core::may::{may_generators, DifferentialTable};
use stablepic_core::milnor::{HopfAlgebra, Profile};
use stablepic_core::module::{ActionSpec, GradedModule, ModuleSpec};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDoc {
    pub profile: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDoc {
    pub op: String,
    pub src: usize,
    pub dst: Vec<usize>,
}

/// A module given by degrees of basis vectors and the actions of named operations.
///
/// Basis ids are global, ordered by degree and then by position in `generators`.
/// Operations that appear neither in `actions` nor in `zero_ops` are left for completion
/// from the declared ones; when nothing is declared every action is zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleDocument {
    pub algebra: AlgebraDoc,
    pub generators: Vec<i32>,
    #[serde(default)]
    pub actions: Vec<ActionDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub zero_ops: Vec<String>,
}

impl ModuleDocument {
    pub fn profile(&self) -> Result<Profile, CliError> {
        Ok(Profile::new(self.algebra.profile.clone())?)
    }

    pub fn to_spec(&self) -> Result<ModuleSpec, CliError> {
        Ok(ModuleSpec {
            profile: self.profile()?,
            degrees: self.generators.clone(),
            actions: self
                .actions
                .iter()
                .map(|a| ActionSpec { op: a.op.clone(), src: a.src, dst: a.dst.clone() })
                .collect(),
            zero_ops: self.zero_ops.clone(),
        })
    }

    pub fn load(&self) -> Result<GradedModule, CliError> {
        Ok(self.to_spec()?.load()?)
    }

    pub fn load_with(&self, alg: Arc<HopfAlgebra>) -> Result<GradedModule, CliError> {
        Ok(self.to_spec()?.load_with(alg)?)
    }

    /// Writes out the action of every indecomposable of the algebra, so that loading the
    /// document reproduces `m` exactly.
    pub fn from_module(m: &GradedModule) -> Self {
        let alg = m.algebra();
        let mut generators = Vec::new();
        let mut offset = std::collections::BTreeMap::new();
        for d in m.degrees() {
            offset.insert(d, generators.len());
            generators.extend(std::iter::repeat_n(d, m.dim_in(d)));
        }
        let mut actions = Vec::new();
        let mut zero_ops = Vec::new();
        for &g in alg.generators() {
            let op = alg.format_basis(g);
            let deg = alg.degree(g);
            let before = actions.len();
            for d in m.degrees() {
                let Some(mat) = m.action(g, d) else { continue };
                for i in 0..m.dim_in(d) {
                    let dst: Vec<usize> =
                        (0..m.dim_in(d + deg)).filter(|&j| mat.get(i, j)).map(|j| offset[&(d + deg)] + j).collect();
                    if !dst.is_empty() {
                        actions.push(ActionDoc { op: op.clone(), src: offset[&d] + i, dst });
                    }
                }
            }
            if actions.len() == before {
                zero_ops.push(op);
            }
        }
        ModuleDocument {
            algebra: AlgebraDoc { profile: alg.profile().bounds().to_vec() },
            generators,
            actions,
            zero_ops,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntryDoc {
    pub page: usize,
    pub source: String,
    pub target: String,
}

/// Higher May differentials as a list of `{page, source, target}` polynomial strings.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TableDocument {
    pub entries: Vec<TableEntryDoc>,
}

impl TableDocument {
    pub fn to_table(&self, profile: &Profile) -> Result<DifferentialTable, CliError> {
        let gens = may_generators(profile);
        let mut table = DifferentialTable::new();
        for e in &self.entries {
            table.push(&gens, e.page, &e.source, &e.target)?;
        }
        Ok(table)
    }

    pub fn from_table(profile: &Profile, table: &DifferentialTable) -> Self {
        let gens = may_generators(profile);
        TableDocument {
            entries: table
                .entries
                .iter()
                .map(|e| TableEntryDoc { page: e.page, source: e.source.format(&gens), target: e.target.format(&gens) })
                .collect(),
        }
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|source| CliError::Parse { path: path.to_path_buf(), source })
}

pub fn read_module(path: &Path) -> Result<GradedModule, CliError> {
    read_json::<ModuleDocument>(path)?.load()
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}
