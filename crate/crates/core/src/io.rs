//! JSON instance files.
//!
//! ```json
//! { "vertices": ["1", "2"],
//!   "arcs": [{"id": "a", "tail": "1", "head": "2"}],
//!   "alpha": {"1": 1, "2": 1},
//!   "matrices": {"a": [[["1", "1", "0", "1"]]]},
//!   "sigma": {"1": 1, "2": -1} }
//! ```
//!
//! Each entry is `[re_num, re_den, im_num, im_den]`; integers may be JSON
//! strings or numbers. Output is canonical: reduced fractions as strings,
//! maps in sorted key order.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ExactMatrix, GaussRat};
use crate::quiver::{Quiver, Representation, Weight};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntToken {
    Str(String),
    Num(i64),
}

impl IntToken {
    fn to_bigint(&self) -> Result<BigInt> {
        match self {
            IntToken::Num(v) => Ok(BigInt::from(*v)),
            IntToken::Str(s) => s.trim().parse::<BigInt>().map_err(|_| Error::NonRational(format!("`{s}` is not an integer"))),
        }
    }

    fn to_label(&self) -> String {
        match self {
            IntToken::Num(v) => v.to_string(),
            IntToken::Str(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcSpec {
    pub id: IntToken,
    pub tail: IntToken,
    pub head: IntToken,
}

pub type MatrixSpec = Vec<Vec<[IntToken; 4]>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub vertices: Vec<IntToken>,
    #[serde(default)]
    pub arcs: Vec<ArcSpec>,
    pub alpha: BTreeMap<String, i64>,
    #[serde(default)]
    pub matrices: BTreeMap<String, MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<BTreeMap<String, i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<BTreeMap<String, i64>>,
    /// Square matrices of a linear pencil, used by the coarse DM command.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pencil: Option<Vec<MatrixSpec>>,
}

/// A parsed, validated instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub rep: Representation,
    pub sigma: Option<Weight>,
    pub tau: Option<Weight>,
    pub pencil: Option<Vec<ExactMatrix>>,
}

fn rational(num: &IntToken, den: &IntToken) -> Result<BigRational> {
    let n = num.to_bigint()?;
    let d = den.to_bigint()?;
    if d.is_zero() {
        return Err(Error::NonRational(format!("zero denominator in {}/0", n)));
    }
    Ok(BigRational::new(n, d))
}

fn parse_matrix(spec: &MatrixSpec, rows: usize, cols: usize, what: &str) -> Result<ExactMatrix> {
    if spec.len() != rows {
        return Err(Error::Shape(format!("{what}: {} rows, expected {rows}", spec.len())));
    }
    let mut out = Vec::with_capacity(rows);
    for (r, row) in spec.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::Shape(format!("{what}: row {r} has {} entries, expected {cols}", row.len())));
        }
        let mut parsed = Vec::with_capacity(cols);
        for e in row {
            parsed.push(GaussRat::new(rational(&e[0], &e[1])?, rational(&e[2], &e[3])?));
        }
        out.push(parsed);
    }
    ExactMatrix::from_rows(out, cols)
}

fn write_matrix(m: &ExactMatrix) -> MatrixSpec {
    (0..m.rows())
        .map(|r| {
            m.row(r)
                .iter()
                .map(|z| {
                    [
                        IntToken::Str(z.re.numer().to_string()),
                        IntToken::Str(z.re.denom().to_string()),
                        IntToken::Str(z.im.numer().to_string()),
                        IntToken::Str(z.im.denom().to_string()),
                    ]
                })
                .collect()
        })
        .collect()
}

fn weight_from(q: &Quiver, map: &BTreeMap<String, i64>, what: &str) -> Result<Weight> {
    let mut w = vec![0i64; q.n_vertices()];
    for (k, v) in map {
        let i = q.vertex_index(k).ok_or_else(|| Error::DanglingVertex(format!("{k} (in {what})")))?;
        w[i] = *v;
    }
    Ok(Weight(w))
}

fn weight_to(q: &Quiver, w: &Weight) -> BTreeMap<String, i64> {
    (0..q.n_vertices()).map(|i| (q.vertex_name(i).to_string(), w.get(i))).collect()
}

impl InstanceFile {
    pub fn into_instance(&self) -> Result<Instance> {
        let vertices: Vec<String> = self.vertices.iter().map(IntToken::to_label).collect();
        let arcs: Vec<(String, String, String)> =
            self.arcs.iter().map(|a| (a.id.to_label(), a.tail.to_label(), a.head.to_label())).collect();
        let q = Quiver::new(&vertices, &arcs)?;
        let mut alpha = vec![None; q.n_vertices()];
        for (k, &v) in &self.alpha {
            let i = q.vertex_index(k).ok_or_else(|| Error::DanglingVertex(format!("{k} (in alpha)")))?;
            if v < 0 {
                return Err(Error::Shape(format!("alpha({k}) = {v} is negative")));
            }
            alpha[i] = Some(v as usize);
        }
        let alpha: Vec<usize> = alpha
            .into_iter()
            .enumerate()
            .map(|(i, a)| a.ok_or_else(|| Error::Shape(format!("alpha missing for vertex `{}`", q.vertex_name(i)))))
            .collect::<Result<_>>()?;
        for key in self.matrices.keys() {
            if q.arc_index(key).is_none() {
                return Err(Error::DanglingVertex(format!("matrix for unknown arc `{key}`")));
            }
        }
        let mut mats = Vec::with_capacity(q.n_arcs());
        for a in q.arcs() {
            let spec = self.matrices.get(&a.id).ok_or_else(|| Error::Shape(format!("missing matrix for arc `{}`", a.id)))?;
            mats.push(parse_matrix(spec, alpha[a.head], alpha[a.tail], &format!("arc `{}`", a.id))?);
        }
        let sigma = self.sigma.as_ref().map(|m| weight_from(&q, m, "sigma")).transpose()?;
        let tau = self.tau.as_ref().map(|m| weight_from(&q, m, "tau")).transpose()?;
        let pencil = match &self.pencil {
            None => None,
            Some(list) => {
                let n = list.first().map_or(0, |m| m.len());
                let mats = list
                    .iter()
                    .enumerate()
                    .map(|(k, m)| parse_matrix(m, n, n, &format!("pencil matrix {k}")))
                    .collect::<Result<Vec<_>>>()?;
                Some(mats)
            }
        };
        let rep = Representation::new(q, alpha, mats)?;
        Ok(Instance { rep, sigma, tau, pencil })
    }
}

impl Instance {
    pub fn from_json(text: &str) -> Result<Instance> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.into_instance()
    }

    pub fn to_file(&self) -> InstanceFile {
        let q = self.rep.quiver();
        InstanceFile {
            vertices: q.vertex_names().iter().cloned().map(IntToken::Str).collect(),
            arcs: q
                .arcs()
                .iter()
                .map(|a| ArcSpec {
                    id: IntToken::Str(a.id.clone()),
                    tail: IntToken::Str(q.vertex_name(a.tail).to_string()),
                    head: IntToken::Str(q.vertex_name(a.head).to_string()),
                })
                .collect(),
            alpha: (0..q.n_vertices()).map(|i| (q.vertex_name(i).to_string(), self.rep.alpha().get(i) as i64)).collect(),
            matrices: q.arcs().iter().enumerate().map(|(k, a)| (a.id.clone(), write_matrix(self.rep.matrix(k)))).collect(),
            sigma: self.sigma.as_ref().map(|w| weight_to(q, w)),
            tau: self.tau.as_ref().map(|w| weight_to(q, w)),
            pencil: self.pencil.as_ref().map(|ms| ms.iter().map(write_matrix).collect()),
        }
    }

    /// Canonical pretty-printed JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("instance serialization")
    }
}
