//! Fixture file format: JSON, rationals as `"p/q"` strings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

/// Sparse vector keyed by basis label, coefficients as rational strings.
pub type SparseSpec = BTreeMap<String, String>;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureFile {
    pub version: u32,
    #[serde(default = "default_field")]
    pub field: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub algebras: BTreeMap<String, AlgebraSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub morphisms: BTreeMap<String, MorphismSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub modules: BTreeMap<String, FiltModuleSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub towers: BTreeMap<String, TowerSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub quivers: BTreeMap<String, QuiverSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub quiver_modules: BTreeMap<String, QuiverModuleSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pipelines: Vec<PipelineRequest>,
}

fn default_field() -> String {
    "Q".into()
}

impl FixtureFile {
    pub fn section_count(&self) -> usize {
        [
            self.algebras.len(),
            self.morphisms.len(),
            self.modules.len(),
            self.towers.len(),
            self.quivers.len(),
            self.quiver_modules.len(),
            self.pipelines.len(),
        ]
        .iter()
        .filter(|&&n| n > 0)
        .count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DegreeSpec {
    Single(i32),
    Bi([i32; 2]),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisEntry {
    pub label: String,
    pub deg: DegreeSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductSpec {
    pub left: String,
    pub right: String,
    pub value: SparseSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdempotentSpec {
    pub label: String,
    pub value: SparseSpec,
}

/// Either a named built-in or explicit structure tables. Products not listed
/// are zero, except that the unit, if it is a single basis element, is
/// filled in automatically when `unit_products` is set.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<i32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub basis: Vec<BasisEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub unit: SparseSpec,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub unit_products: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub products: Vec<ProductSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub differential: BTreeMap<String, SparseSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub idempotents: Vec<IdempotentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<i32>>,
}

/// A dga morphism: `builtin: "projection"` between truncated polynomial
/// algebras, or an explicit matrix (target rows x source columns).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismSpec {
    pub source: String,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntrySpec {
    pub row: usize,
    pub col: usize,
    pub value: SparseSpec,
}

/// `⊕ {l_i} e_{v_i} A` with `d(g_j) = Σ g_i x_ij`; summands are `[shift, idempotent label]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiltModuleSpec {
    pub algebra: String,
    pub summands: Vec<(i32, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub entries: Vec<EntrySpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stages: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub maps: Vec<String>,
}

/// Arrows are `[name, source, target]`; relation terms are `[coefficient, [arrows...]]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuiverSpec {
    pub vertices: Vec<String>,
    pub arrows: Vec<(String, String, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relations: Vec<Vec<(String, Vec<String>)>>,
}

/// `simple` or `projective` at a vertex, or explicit spaces and arrow matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuiverModuleSpec {
    pub quiver: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simple: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projective: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<BTreeMap<String, usize>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub maps: BTreeMap<String, Vec<Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "pipeline", rename_all = "lowercase", deny_unknown_fields)]
pub enum PipelineRequest {
    /// Γ-formality, or weighted Sub when weights are given here or on the algebra.
    Formality {
        algebra: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<i32>>,
    },
    /// Resolutions of a family of quiver modules and their Ext algebra.
    Ext {
        family: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<i32>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        compare: Option<String>,
    },
    Hull {
        module: String,
    },
    /// Segment equivalence along a morphism; `lift` lists modules over the target to lift.
    Lift {
        morphism: String,
        segment: [i32; 2],
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        probes: Vec<String>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        lift: Vec<String>,
    },
    Tower {
        tower: String,
        segment: [i32; 2],
        window: i32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        shifts: Option<[i32; 2]>,
    },
    Tstructure {
        module: String,
    },
}

impl PipelineRequest {
    pub fn name(&self) -> &'static str {
        match self {
            PipelineRequest::Formality { .. } => "formality",
            PipelineRequest::Ext { .. } => "ext",
            PipelineRequest::Hull { .. } => "hull",
            PipelineRequest::Lift { .. } => "lift",
            PipelineRequest::Tower { .. } => "tower",
            PipelineRequest::Tstructure { .. } => "tstructure",
        }
    }
}

pub const PIPELINES: [&str; 6] = ["formality", "ext", "hull", "lift", "tower", "tstructure"];

/// JSON Schema of the fixture format.
pub const SCHEMA: &str = include_str!("schema.json");
