//! JSON input documents and deterministic JSON / text output.

use std::collections::BTreeMap;
use std::io;

use serde::{Deserialize, Serialize, Serializer};
use serde_json::ser::Formatter;
use serde_json::Value;

use crate::error::{ensure, Error, Result};
use crate::kernel::{Matrix, TolerancePolicy};
use crate::subspace::Subspace;

pub(crate) fn ser_matrix<S: Serializer>(m: &Matrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    m.to_rows().serialize(s)
}

/// A subspace is written as the list of its orthonormal basis vectors, the
/// same shape the input format accepts for spanning sets.
pub(crate) fn ser_subspace<S: Serializer>(x: &Subspace, s: S) -> std::result::Result<S::Ok, S::Error> {
    x.basis().transpose().to_rows().serialize(s)
}

/// Optional tolerance overrides inside an input document.
#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub profile: Option<String>,
    pub rank_rel: Option<f64>,
    pub rank_abs: Option<f64>,
    pub angle_tol: Option<f64>,
    pub subspace_tol: Option<f64>,
}

impl ToleranceOverrides {
    pub fn apply(&self, base: TolerancePolicy) -> Result<TolerancePolicy> {
        let mut t = match &self.profile {
            Some(p) => TolerancePolicy::profile(p)?,
            None => base,
        };
        if let Some(v) = self.rank_rel {
            t.rank_rel = v;
        }
        if let Some(v) = self.rank_abs {
            t.rank_abs = v;
        }
        if let Some(v) = self.angle_tol {
            t.angle_tol = v;
        }
        if let Some(v) = self.subspace_tol {
            t.subspace_tol = v;
        }
        t.validate()?;
        Ok(t)
    }
}

/// `{"ambient_dim": n, "subspaces": {"M": [[..], ..], "N": .., "K": .., "M1": ..},
/// "S": .., "U": .., "C": .., "epsilon": .., "tolerances": {..}}`.
/// Rows of each spanning set need not be independent.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PairInput {
    pub ambient_dim: usize,
    pub subspaces: BTreeMap<String, Vec<Vec<f64>>>,
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<Vec<f64>>>,
    #[serde(rename = "U", default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<Vec<f64>>>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
}

impl PairInput {
    pub fn parse(text: &str) -> Result<Self> {
        let input: PairInput =
            serde_json::from_str(text).map_err(|e| Error::Input(format!("bad input document: {e}")))?;
        input.check()?;
        Ok(input)
    }

    fn check(&self) -> Result<()> {
        let n = self.ambient_dim;
        for key in ["M", "N"] {
            ensure!(self.subspaces.contains_key(key), Input, "subspace `{key}` is required");
        }
        for (name, rows) in &self.subspaces {
            for (i, r) in rows.iter().enumerate() {
                ensure!(
                    r.len() == n,
                    Input,
                    "subspace `{name}` row {i} has length {}, expected ambient_dim = {n}",
                    r.len()
                );
            }
        }
        for (name, m) in [("S", &self.s), ("U", &self.u)] {
            if let Some(rows) = m {
                ensure!(
                    rows.len() == n,
                    Input,
                    "matrix `{name}` has {} rows, expected {n}",
                    rows.len()
                );
                ensure!(
                    rows.iter().all(|r| r.len() == n),
                    Input,
                    "matrix `{name}` must be {n} x {n}"
                );
            }
        }
        Ok(())
    }

    pub fn subspace(&self, name: &str, tol: &TolerancePolicy) -> Result<Option<Subspace>> {
        self.subspaces
            .get(name)
            .map(|rows| Subspace::from_spanning(rows, self.ambient_dim, tol))
            .transpose()
    }

    pub fn require(&self, name: &str, tol: &TolerancePolicy) -> Result<Subspace> {
        self.subspace(name, tol)?
            .ok_or_else(|| Error::Input(format!("subspace `{name}` is required for this command")))
    }

    fn square(&self, name: &str, rows: &Option<Vec<Vec<f64>>>) -> Result<Matrix> {
        let rows = rows
            .as_ref()
            .ok_or_else(|| Error::Input(format!("matrix `{name}` is required for this command")))?;
        if rows.is_empty() {
            return Ok(Matrix::zeros(0, 0));
        }
        Matrix::from_rows(rows)
    }

    pub fn s_matrix(&self) -> Result<Matrix> {
        self.square("S", &self.s)
    }

    pub fn u_matrix(&self) -> Result<Matrix> {
        self.square("U", &self.u)
    }

    /// Input document for a pair and optional complement, as emitted with certificates.
    pub fn from_subspaces(pairs: &[(&str, &Subspace)]) -> Self {
        let ambient_dim = pairs.first().map_or(0, |(_, s)| s.ambient_dim());
        PairInput {
            ambient_dim,
            subspaces: pairs
                .iter()
                .map(|(k, s)| (k.to_string(), s.basis().transpose().to_rows()))
                .collect(),
            s: None,
            u: None,
            c: None,
            epsilon: None,
            tolerances: None,
        }
    }
}

/// Pretty JSON formatter printing every float with 17 significant digits.
struct Fixed17 {
    inner: serde_json::ser::PrettyFormatter<'static>,
}

impl Formatter for Fixed17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{}", fmt_f64(value))
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        write!(w, "{}", fmt_f64(value as f64))
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// `{:.16e}`: 17 significant digits, round-trips every finite `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        // Avoid printing -0.
        return format!("{:.16e}", 0.0);
    }
    format!("{v:.16e}")
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let fmt = Fixed17 {
        inner: serde_json::ser::PrettyFormatter::new(),
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut out, fmt);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Numerical(format!("cannot serialize output: {e}")))?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

/// Line-oriented `key.path: value` rendering of the same document.
pub fn to_text<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Numerical(format!("cannot serialize output: {e}")))?;
    let mut out = String::new();
    flatten("", &v, &mut out);
    Ok(out)
}

fn flatten(path: &str, v: &Value, out: &mut String) {
    let child = |k: &str| {
        if path.is_empty() {
            k.to_string()
        } else {
            format!("{path}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(&child(k), x, out);
            }
        }
        Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            out.push_str(&format!("{path}: [{}]\n", parts.join(", ")));
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str(&format!("{path}: []\n"));
            }
            for (i, x) in items.iter().enumerate() {
                flatten(&child(&i.to_string()), x, out);
            }
        }
        other => out.push_str(&format!("{path}: {}\n", scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => fmt_f64(n.as_f64().unwrap()),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
