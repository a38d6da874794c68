//! The emitted artifact: a set of named series sharing one x axis.
//!
//! CSV has a header row `x,<series...>` and one row per x value. JSON holds
//! `{"meta": {parameters, command, version, seed}, "series": [...]}` with the
//! x-axis name stored as the parameter `"x"`. Numbers are written in the
//! shortest decimal form that parses back to the same `f64`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Meta {
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub command: String,
    pub version: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Series {
    pub name: String,
    pub points: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub meta: Meta,
    pub series: Vec<Series>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("report format error: {0}")]
pub struct FormatError(pub String);

fn fail<T>(msg: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError(msg.into()))
}

impl Report {
    pub fn x_name(&self) -> &str {
        self.meta.parameters.get("x").and_then(|v| v.as_str()).unwrap_or("x")
    }

    /// Looks a series up by name.
    pub fn series(&self, name: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.name == name)
    }

    /// All values must be finite, and for CSV all series must share x values.
    fn check(&self, same_x: bool) -> Result<(), FormatError> {
        if self.series.is_empty() {
            return fail("no series");
        }
        for s in &self.series {
            if let Some(p) = s.points.iter().find(|p| !p[0].is_finite() || !p[1].is_finite()) {
                return fail(format!("series {} has a non-finite point {:?}", s.name, p));
            }
        }
        if same_x {
            let xs = |s: &Series| s.points.iter().map(|p| p[0].to_bits()).collect::<Vec<_>>();
            let first = xs(&self.series[0]);
            if self.series.iter().any(|s| xs(s) != first) {
                return fail("series do not share one x axis");
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String, FormatError> {
        self.check(true)?;
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![self.x_name().to_string()];
        header.extend(self.series.iter().map(|s| s.name.clone()));
        w.write_record(&header).map_err(|e| FormatError(e.to_string()))?;
        for (i, p) in self.series[0].points.iter().enumerate() {
            let mut row = vec![fmt_f64(p[0])];
            row.extend(self.series.iter().map(|s| fmt_f64(s.points[i][1])));
            w.write_record(&row).map_err(|e| FormatError(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| FormatError(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| FormatError(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String, FormatError> {
        self.check(false)?;
        let mut s = serde_json::to_string_pretty(self).map_err(|e| FormatError(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    /// Reads a CSV file back. Only the x-axis name survives in `meta`.
    pub fn parse_csv(text: &str) -> Result<Report, FormatError> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header = r.headers().map_err(|e| FormatError(e.to_string()))?.clone();
        if header.len() < 2 {
            return fail("need an x column and at least one series");
        }
        let mut series: Vec<Series> = header
            .iter()
            .skip(1)
            .map(|name| Series {
                name: name.to_string(),
                points: Vec::new(),
            })
            .collect();
        for rec in r.records() {
            let rec = rec.map_err(|e| FormatError(e.to_string()))?;
            let nums = rec
                .iter()
                .map(|f| f.parse::<f64>().map_err(|e| FormatError(format!("bad number {f:?}: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            for (s, &y) in series.iter_mut().zip(&nums[1..]) {
                s.points.push([nums[0], y]);
            }
        }
        let mut parameters = BTreeMap::new();
        parameters.insert("x".to_string(), serde_json::Value::from(&header[0]));
        Ok(Report {
            meta: Meta {
                parameters,
                command: String::new(),
                version: String::new(),
                seed: 0,
            },
            series,
        })
    }

    pub fn parse_json(text: &str) -> Result<Report, FormatError> {
        serde_json::from_str(text).map_err(|e| FormatError(e.to_string()))
    }
}

/// Shortest round-trip decimal form.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}
