//! JSON documents for noise models and stabilizer codes.
//!
//! Noise model:
//!
//! ```json
//! {"d": 2, "n": 3, "form": "markov",
//!  "initial": [0.9, 0.0333, 0.0333, 0.0334],
//!  "transition": [[...], [...], [...], [...]]}
//! ```
//!
//! `single_letter` (form `iid`) and `initial` list probabilities of the single-site
//! labels `[i, j]` in the order `i * d + j`; `transition[u][v]` is `P(v|u)` in the same
//! order. Form `explicit` takes `table`, an object whose keys are label sequences
//! written as JSON, e.g. `"[[0,0],[1,0]]"`; labels absent from the table have
//! probability zero.
//!
//! Code: `{"d": 2, "n": 3, "stabilizer_basis": [[0,1,0,1,0,0], [0,0,0,1,0,1]]}` with
//! vectors in interleaved coordinates `(x1, z1, ..., xn, zn)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{DistributionForm, PauliDistribution};
use crate::zd_symplectic::{symplectic_form, Register, Subspace, ZdVec};

fn schema(field: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        field: field.into(),
        message: message.into(),
    }
}

fn parse_error(e: serde_json::Error) -> Error {
    // serde reports missing and mistyped fields as "missing field `x`" / "invalid type ..."
    let text = e.to_string();
    let field = text
        .split('`')
        .nth(1)
        .filter(|_| text.starts_with("missing field") || text.starts_with("unknown field"))
        .unwrap_or("document");
    schema(field, text.clone())
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NoiseModelDoc {
    pub d: u32,
    pub n: usize,
    pub form: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub single_letter: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transition: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<BTreeMap<String, f64>>,
}

fn register(d: u32, n: usize) -> Result<Register> {
    if d < 2 {
        return Err(schema("d", format!("{d} is not a qudit dimension")));
    }
    if n == 0 {
        return Err(schema("n", "must be positive"));
    }
    Register::new(d, n)
}

fn required<T>(field: &str, value: Option<T>) -> Result<T> {
    value.ok_or_else(|| schema(field, "required for this form"))
}

fn parse_label_sequence(key: &str, reg: Register) -> Result<usize> {
    let field = format!("table[{key}]");
    let pairs: Vec<[u32; 2]> =
        serde_json::from_str(key).map_err(|e| schema(&field, format!("label sequence is not [[i, j], ...]: {e}")))?;
    if pairs.len() != reg.n {
        return Err(schema(&field, format!("expected {} labels, found {}", reg.n, pairs.len())));
    }
    let sites: Vec<(u32, u32)> = pairs.iter().map(|p| (p[0], p[1])).collect();
    let x = ZdVec::from_sites(reg.d, &sites).map_err(|e| schema(&field, e.to_string()))?;
    Ok(x.index())
}

impl NoiseModelDoc {
    pub fn into_distribution(self) -> Result<PauliDistribution> {
        let reg = register(self.d, self.n)?;
        match self.form.as_str() {
            "iid" => PauliDistribution::iid(reg, required("single_letter", self.single_letter)?),
            "markov" => PauliDistribution::markov(
                reg,
                required("initial", self.initial)?,
                required("transition", self.transition)?,
            ),
            "explicit" => {
                let entries = required("table", self.table)?;
                let mut table = vec![0.0; reg.num_labels()?];
                for (key, p) in entries {
                    table[parse_label_sequence(&key, reg)?] = p;
                }
                PauliDistribution::explicit(reg, table)
            }
            other => Err(schema("form", format!("`{other}` is not one of iid, markov, explicit"))),
        }
    }

    pub fn from_distribution(dist: &PauliDistribution) -> Result<Self> {
        let reg = dist.register();
        let mut doc = Self {
            d: reg.d,
            n: reg.n,
            ..Self::default()
        };
        match dist.form() {
            DistributionForm::Iid(single) => {
                doc.form = "iid".into();
                doc.single_letter = Some(single.clone());
            }
            DistributionForm::Markov { initial, transition } => {
                doc.form = "markov".into();
                doc.initial = Some(initial.clone());
                doc.transition = Some(transition.clone());
            }
            DistributionForm::Explicit(table) => {
                doc.form = "explicit".into();
                let mut entries = BTreeMap::new();
                for (idx, &p) in table.iter().enumerate() {
                    if p > 0.0 {
                        let x = ZdVec::from_index(reg.d, reg.n, idx);
                        let pairs: Vec<[u32; 2]> = (0..reg.n).map(|i| x.site(i).into()).collect();
                        entries.insert(serde_json::to_string(&pairs).expect("labels serialize"), p);
                    }
                }
                doc.table = Some(entries);
            }
        }
        Ok(doc)
    }
}

pub fn parse_noise_model(text: &str) -> Result<PauliDistribution> {
    let doc: NoiseModelDoc = serde_json::from_str(text).map_err(parse_error)?;
    doc.into_distribution()
}

pub fn noise_model_to_json(dist: &PauliDistribution) -> Result<String> {
    let doc = NoiseModelDoc::from_distribution(dist)?;
    Ok(serde_json::to_string_pretty(&doc).expect("noise documents serialize"))
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CodeDoc {
    pub d: u32,
    pub n: usize,
    pub stabilizer_basis: Vec<Vec<u32>>,
}

impl CodeDoc {
    /// The span of the listed vectors. Fails if two listed vectors have nonzero
    /// symplectic form, naming them by position in the list.
    pub fn into_subspace(self) -> Result<Subspace> {
        register(self.d, self.n)?;
        let mut vectors = Vec::with_capacity(self.stabilizer_basis.len());
        for (i, coords) in self.stabilizer_basis.into_iter().enumerate() {
            let field = format!("stabilizer_basis[{i}]");
            if coords.len() != 2 * self.n {
                return Err(schema(&field, format!("expected {} coordinates, found {}", 2 * self.n, coords.len())));
            }
            vectors.push(ZdVec::new(self.d, coords).map_err(|e| schema(&field, e.to_string()))?);
        }
        for i in 0..vectors.len() {
            for j in i + 1..vectors.len() {
                let f = symplectic_form(&vectors[i], &vectors[j])?;
                if f != 0 {
                    return Err(schema(
                        "stabilizer_basis",
                        format!("vectors {i} and {j} have symplectic form {f}, so the code is not self-orthogonal"),
                    ));
                }
            }
        }
        Subspace::span(self.d, self.n, &vectors).map_err(|e| schema("d", e.to_string()))
    }
}

pub fn parse_code(text: &str) -> Result<Subspace> {
    let doc: CodeDoc = serde_json::from_str(text).map_err(parse_error)?;
    doc.into_subspace()
}

pub fn code_to_json(l: &Subspace) -> String {
    let doc = CodeDoc {
        d: l.d(),
        n: l.n(),
        stabilizer_basis: l.basis().iter().map(|v| v.coords().to_vec()).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("code documents serialize")
}
