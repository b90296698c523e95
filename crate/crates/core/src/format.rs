//! File formats: instance documents (JSON or CSV), fan files, and canonical
//! JSON rendering.
//!
//! Rationals are always written as strings (`"7/3"`, `"-2"`); floats appear
//! only in fields that are explicitly float renderings.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, Rational, RationalMatrix};
use crate::lb::SubdivisionFan;
use crate::poly::HPolyhedron;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    #[serde(default = "default_schema")]
    pub schema: u32,
    #[serde(rename = "A")]
    pub a: Vec<Vec<String>>,
    pub b: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feasible_point: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

/// A parsed instance: the polyhedron plus the optional extras of the file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub polyhedron: HPolyhedron,
    pub feasible_point: Option<Vec<Rational>>,
    pub metadata: Metadata,
}

fn parse_all(values: &[String]) -> Result<Vec<Rational>> {
    values.iter().map(|s| parse_rational(s)).collect()
}

pub fn render_all(values: &[Rational]) -> Vec<String> {
    values.iter().map(format_rational).collect()
}

impl InstanceDocument {
    pub fn from_polyhedron(p: &HPolyhedron, metadata: Option<Metadata>) -> Self {
        InstanceDocument {
            schema: SCHEMA_VERSION,
            a: p.a().row_iter().map(render_all).collect(),
            b: render_all(p.b()),
            feasible_point: None,
            metadata,
        }
    }

    /// Validates shape and parses every rational exactly. Structural
    /// problems are `Parse` / `DimensionMismatch`; a rank-deficient system is
    /// `NotPointed`.
    pub fn into_instance(self) -> Result<Instance> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "unsupported schema version {}",
                self.schema
            )));
        }
        let width = self.a.first().map_or(0, Vec::len);
        if let Some(i) = self.a.iter().position(|r| r.len() != width) {
            return Err(Error::DimensionMismatch(format!(
                "row {i} of A has the wrong length"
            )));
        }
        let rows = self
            .a
            .iter()
            .map(|r| parse_all(r))
            .collect::<Result<Vec<_>>>()?;
        let a = RationalMatrix::from_rows(rows)?;
        let b = parse_all(&self.b)?;
        let polyhedron = HPolyhedron::new(a, b)?;
        let feasible_point = self.feasible_point.as_deref().map(parse_all).transpose()?;
        if let Some(x) = &feasible_point {
            if x.len() != polyhedron.dim() {
                return Err(Error::DimensionMismatch(
                    "feasible_point has the wrong length".into(),
                ));
            }
        }
        Ok(Instance {
            polyhedron,
            feasible_point,
            metadata: self.metadata.unwrap_or_default(),
        })
    }
}

pub fn parse_instance_json(text: &str) -> Result<Instance> {
    let doc: InstanceDocument =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.into_instance()
}

/// CSV instances: one constraint per record, the first `n` fields are the
/// row of `A` and the last is `b`. Lines starting with `#` are comments.
pub fn parse_instance_csv(text: &str) -> Result<Instance> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut a = Vec::new();
    let mut b = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        if record.len() < 2 {
            return Err(Error::Parse(
                "a CSV record needs at least two fields".into(),
            ));
        }
        let fields: Vec<String> = record.iter().map(str::to_string).collect();
        let (row, rhs) = fields.split_at(fields.len() - 1);
        a.push(row.to_vec());
        b.push(rhs[0].clone());
    }
    InstanceDocument {
        schema: SCHEMA_VERSION,
        a,
        b,
        feasible_point: None,
        metadata: None,
    }
    .into_instance()
}

/// Chooses the parser by extension: `.csv` is CSV, everything else JSON.
pub fn parse_instance(path_hint: &str, text: &str) -> Result<Instance> {
    if path_hint.to_ascii_lowercase().ends_with(".csv") {
        parse_instance_csv(text)
    } else {
        parse_instance_json(text)
    }
}

/// A point file: a JSON array of rational strings.
pub fn parse_point(text: &str) -> Result<Vec<Rational>> {
    let values: Vec<String> =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    parse_all(&values)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanDocument {
    pub rays: Vec<Vec<String>>,
    pub cones: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalized_rays: Option<Vec<Vec<String>>>,
}

impl FanDocument {
    pub fn from_fan(fan: &SubdivisionFan, normalized: Option<&[Vec<Rational>]>) -> Self {
        FanDocument {
            rays: fan.rays.iter().map(|r| render_all(r)).collect(),
            cones: fan.cones.clone(),
            normalized_rays: normalized.map(|rs| rs.iter().map(|r| render_all(r)).collect()),
        }
    }

    pub fn parse_rays(&self) -> Result<RationalMatrix> {
        let rows = self
            .rays
            .iter()
            .map(|r| parse_all(r))
            .collect::<Result<Vec<_>>>()?;
        RationalMatrix::from_rows(rows)
    }
}

/// Pretty-printed JSON with keys in sorted order (object maps are
/// `BTreeMap`-backed), followed by a newline.
pub fn canonical_json(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// A rational as `{"exact": "p/q", "float": f}`.
pub fn rational_value(q: &Rational) -> Value {
    serde_json::json!({
        "exact": format_rational(q),
        "float": crate::exact::to_f64(q),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};

    const SQUARE: &str =
        r#"{"A": [["1","0"],["0","1"],["-1","0"],["0","-1"]], "b": ["1","1","0","0"]}"#;

    #[test]
    fn json_instance() {
        let inst = parse_instance_json(SQUARE).unwrap();
        assert_eq!(inst.polyhedron.num_rows(), 4);
        assert_eq!(inst.feasible_point, None);
        let doc = InstanceDocument::from_polyhedron(&inst.polyhedron, None);
        let again = parse_instance_json(&serde_json::to_string(&doc).unwrap()).unwrap();
        assert_eq!(again, inst);
    }

    #[test]
    fn csv_instance() {
        let text = "# square\n1,0,1\n0,1,1\n-1,0,0\n0,-1,1/2\n";
        let inst = parse_instance_csv(text).unwrap();
        assert_eq!(inst.polyhedron.b()[3], ratio(1, 2));
        assert_eq!(inst.polyhedron.row(2), &[int(-1), int(0)]);
    }

    #[test]
    fn malformed_instances() {
        assert!(matches!(parse_instance_json("{"), Err(Error::Parse(_))));
        let ragged = r#"{"A": [["1","0"],["1"]], "b": ["1","1"]}"#;
        assert!(matches!(
            parse_instance_json(ragged),
            Err(Error::DimensionMismatch(_))
        ));
        let bad = r#"{"A": [["1","0"],["0","1/0"]], "b": ["1","1"]}"#;
        assert!(matches!(parse_instance_json(bad), Err(Error::Parse(_))));
        let line = r#"{"A": [["1","0"],["-1","0"]], "b": ["1","1"]}"#;
        assert!(matches!(
            parse_instance_json(line),
            Err(Error::NotPointed { .. })
        ));
    }

    #[test]
    fn canonical_rendering_sorts_keys() {
        let v: Value = serde_json::from_str(r#"{"b": 1, "a": {"d": 2, "c": 0.1}}"#).unwrap();
        let s = canonical_json(&v);
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(canonical_json(&back), s);
    }
}
