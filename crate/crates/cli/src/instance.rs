//! Channel and input-distribution files.
//!
//! ```toml
//! input_alphabet = ["0", "1"]
//! output_alphabet = ["0", "1"]
//! matrix = [[0.9, 0.1], [0.1, 0.9]]
//! input_dist = [0.5, 0.5]   # optional
//! ```
//!
//! The same fields are accepted as JSON when the file name ends in `.json`.
//! Two shorthands skip the file entirely: `bsc:<p>` and `noiseless:<k>`.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use resolvability::{Alphabet, Channel, Distribution};
use serde::Deserialize;

use crate::HarnessError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    input_alphabet: Vec<String>,
    output_alphabet: Vec<String>,
    matrix: Vec<Vec<f64>>,
    input_dist: Option<Vec<f64>>,
}

/// Where the input distribution comes from.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum InputSpec {
    /// The instance's `input_dist` field.
    #[default]
    File,
    Uniform,
    Explicit(Vec<f64>),
}

impl FromStr for InputSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "file" => Ok(InputSpec::File),
            "uniform" => Ok(InputSpec::Uniform),
            list => list
                .split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}")))
                .collect::<Result<Vec<_>, _>>()
                .map(InputSpec::Explicit),
        }
    }
}

/// A validated channel with an optional input distribution.
#[derive(Debug, Clone)]
pub struct Instance {
    pub channel: Channel,
    pub input_dist: Option<Distribution>,
}

impl Instance {
    /// Resolves the single-letter input distribution.
    pub fn input(&self, spec: &InputSpec) -> Result<Distribution, HarnessError> {
        let alphabet = self.channel.input().clone();
        match spec {
            InputSpec::File => self
                .input_dist
                .clone()
                .ok_or_else(|| HarnessError::Config("instance has no input_dist; pass --input uniform".into())),
            InputSpec::Uniform => Ok(Distribution::uniform(alphabet)),
            InputSpec::Explicit(v) => Ok(Distribution::new(alphabet, v.clone())?),
        }
    }
}

/// Loads `source`, which is either a shorthand or a file path.
pub fn load_instance(source: &str) -> Result<Instance, HarnessError> {
    if let Some(p) = source.strip_prefix("bsc:") {
        let p = parse_num(source, p)?;
        return Ok(Instance {
            channel: Channel::bsc(p)?,
            input_dist: None,
        });
    }
    if let Some(k) = source.strip_prefix("noiseless:") {
        let k = k.parse::<usize>().map_err(|e| HarnessError::Parse {
            origin: source.into(),
            msg: e.to_string(),
        })?;
        return Ok(Instance {
            channel: Channel::identity(Alphabet::numeric(k)?),
            input_dist: None,
        });
    }
    let path = Path::new(source);
    let text = fs::read_to_string(path).map_err(|e| HarnessError::Io {
        path: source.into(),
        source: e,
    })?;
    let json = path.extension().is_some_and(|e| e == "json");
    parse_instance(&text, json).map_err(|e| match e {
        HarnessError::Parse { msg, .. } => HarnessError::Parse {
            origin: source.into(),
            msg,
        },
        other => other,
    })
}

fn parse_num(source: &str, v: &str) -> Result<f64, HarnessError> {
    v.parse::<f64>().map_err(|e| HarnessError::Parse {
        origin: source.into(),
        msg: e.to_string(),
    })
}

/// Parses instance text as TOML, or JSON when `json` is set.
pub fn parse_instance(text: &str, json: bool) -> Result<Instance, HarnessError> {
    let file: InstanceFile = if json {
        serde_json::from_str(text).map_err(|e| HarnessError::Parse {
            origin: "<json>".into(),
            msg: e.to_string(),
        })?
    } else {
        toml::from_str(text).map_err(|e| HarnessError::Parse {
            origin: "<toml>".into(),
            msg: e.to_string(),
        })?
    };
    let input = Alphabet::new(file.input_alphabet)?;
    let output = Alphabet::new(file.output_alphabet)?;
    let channel = Channel::new(input.clone(), output, file.matrix)?;
    let input_dist = file.input_dist.map(|v| Distribution::new(input, v)).transpose()?;
    Ok(Instance { channel, input_dist })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BSC: &str = r#"
input_alphabet = ["0", "1"]
output_alphabet = ["0", "1"]
matrix = [[0.9, 0.1], [0.1, 0.9]]
"#;

    #[test]
    fn well_formed_bsc() {
        let inst = parse_instance(BSC, false).unwrap();
        assert_eq!(inst.channel.input().len(), 2);
        assert_eq!(inst.channel.row(1), &[0.1, 0.9]);
        assert!(inst.input_dist.is_none());
        let p = inst.input(&InputSpec::Uniform).unwrap();
        assert_eq!(p.mass(), &[0.5, 0.5]);
        assert!(inst.input(&InputSpec::File).is_err());
    }

    #[test]
    fn bad_row_is_named() {
        let text = BSC.replace("[0.1, 0.9]", "[0.1, 0.88]");
        let err = parse_instance(&text, false).unwrap_err().to_string();
        assert!(err.contains("row 1"), "{err}");
    }

    #[test]
    fn json_and_integers() {
        let text = r#"{"input_alphabet": ["a"], "output_alphabet": ["x", "y"],
                       "matrix": [[1, 0]], "input_dist": [1]}"#;
        let inst = parse_instance(text, true).unwrap();
        assert_eq!(inst.channel.row(0), &[1.0, 0.0]);
        assert_eq!(inst.input_dist.unwrap().mass(), &[1.0]);
    }

    #[test]
    fn toml_errors_carry_position() {
        let err = parse_instance("input_alphabet = [\"0\"\nmatrix = 3", false).unwrap_err();
        assert!(err.to_string().contains("line"), "{err}");
    }

    #[test]
    fn input_spec_parsing() {
        assert_eq!("uniform".parse::<InputSpec>().unwrap(), InputSpec::Uniform);
        assert_eq!(
            "0.25, 0.75".parse::<InputSpec>().unwrap(),
            InputSpec::Explicit(vec![0.25, 0.75])
        );
        assert!("0.2,x".parse::<InputSpec>().is_err());
    }

    #[test]
    fn shorthands() {
        assert_eq!(load_instance("bsc:0.1").unwrap().channel.prob(0, 1), 0.1);
        assert_eq!(load_instance("noiseless:3").unwrap().channel.output().len(), 3);
        assert!(load_instance("bsc:x").is_err());
    }
}
