//! The JSON input document.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use pbox_core::rational::format_rational;
use pbox_core::{parse_rational, Domain, ModelError, PBox, Rational};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PBoxDocument {
    pub domain: Vec<String>,
    pub lower: Vec<Value>,
    pub upper: Vec<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

/// Reads a number given as a JSON string (`"1/5"`, `"0.2"`) or a JSON
/// number literal, exactly.
pub fn value_to_rational(v: &Value, what: &str, index: usize) -> Result<Rational, CliError> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => {
            return Err(CliError::Parse(format!(
                "{what}[{index}]: expected a number or string, found {other}"
            )))
        }
    };
    parse_rational(&text).map_err(|e| CliError::Parse(format!("{what}[{index}]: {e}")))
}

pub fn parse_list(text: &str, what: &str) -> Result<Vec<Rational>, CliError> {
    text.split(',')
        .enumerate()
        .map(|(i, s)| {
            parse_rational(s).map_err(|e| CliError::Parse(format!("{what}[{}]: {e}", i + 1)))
        })
        .collect()
}

impl PBoxDocument {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_pbox(pbox: &PBox, name: Option<String>) -> Self {
        let render = |v: &[Rational]| v.iter().map(|x| Value::String(format_rational(x))).collect();
        PBoxDocument {
            domain: pbox.domain().labels().to_vec(),
            lower: render(pbox.low()),
            upper: render(pbox.up()),
            name,
            description: None,
        }
    }

    pub fn values(&self) -> Result<(Vec<Rational>, Vec<Rational>), CliError> {
        let conv = |vs: &[Value], what: &str| -> Result<Vec<Rational>, CliError> {
            vs.iter()
                .enumerate()
                .map(|(i, v)| value_to_rational(v, what, i + 1))
                .collect()
        };
        Ok((conv(&self.lower, "lower")?, conv(&self.upper, "upper")?))
    }

    pub fn domain(&self) -> Result<Domain, CliError> {
        Domain::new(self.domain.iter().cloned()).map_err(CliError::Invalid)
    }

    /// Builds the p-box; invariant violations are [`CliError::Invalid`].
    pub fn to_pbox(&self) -> Result<PBox, CliError> {
        let (low, up) = self.values()?;
        PBox::new(self.domain()?, low, up).map_err(CliError::Invalid)
    }

    pub fn label(&self) -> &str {
        self.name.as_deref().unwrap_or("p-box")
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Invalid(e)
    }
}
