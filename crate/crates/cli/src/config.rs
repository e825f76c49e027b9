use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use graphlog::graph::io::{self, GraphData};
use graphlog::solvers::SolverConfig;
use graphlog::spaces::{potential_generate, PotentialClass};
use graphlog::{GraphFamilySpec, Potential, PotentialFamilySpec, WeightedGraph};
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};

use crate::Failure;

/// A run document. Every section is optional in the file; flags fill or
/// override fields after loading.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub graph: Option<GraphSource>,
    #[serde(default)]
    pub potential: Option<PotentialSource>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub outputs: Outputs,
}

/// A family spec string, or a path to a graph document. Strings ending in
/// `.json` are paths.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    Family(GraphFamilySpec),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlinePotential {
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSource {
    Family(PotentialFamilySpec),
    Inline(InlinePotential),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    pub dir: PathBuf,
    pub csv: bool,
    pub json: bool,
    pub dot: bool,
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            csv: true,
            json: true,
            dot: false,
        }
    }
}

impl GraphSource {
    pub fn parse(s: &str) -> Result<Self, Failure> {
        if s.ends_with(".json") {
            Ok(GraphSource::File(PathBuf::from(s)))
        } else {
            s.parse().map(GraphSource::Family).map_err(Failure::config)
        }
    }
}

impl fmt::Display for GraphSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSource::Family(spec) => write!(f, "{spec}"),
            GraphSource::File(path) => write!(f, "{}", path.display()),
        }
    }
}

impl fmt::Display for PotentialSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialSource::Family(spec) => write!(f, "{spec}"),
            PotentialSource::Inline(p) => write!(f, "inline:{}", p.values.len()),
        }
    }
}

impl Serialize for GraphSource {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GraphSource {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        GraphSource::parse(&s).map_err(|f| de::Error::custom(f.message))
    }
}

impl Serialize for PotentialSource {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            PotentialSource::Family(spec) => s.collect_str(spec),
            PotentialSource::Inline(p) => p.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for PotentialSource {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::String(s) => s
                .parse()
                .map(PotentialSource::Family)
                .map_err(de::Error::custom),
            v @ serde_json::Value::Object(_) => serde_json::from_value(v)
                .map(PotentialSource::Inline)
                .map_err(de::Error::custom),
            other => Err(de::Error::custom(format!(
                "potential must be a spec string or {{\"values\": [...]}}, found {other}"
            ))),
        }
    }
}

pub fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::config(format!("{}: {e}", path.display())))
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)
            .map_err(|e| Failure::config(format!("{}: {e}", parent.display())))?;
    }
    fs::write(path, contents).map_err(|e| Failure::config(format!("{}: {e}", path.display())))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = read_file(path)?;
        serde_json::from_str(&text)
            .map_err(|e| Failure::config(format!("{}: {e}", path.display())))
    }

    /// Builds the graph and the potential and checks (A1) against it.
    pub fn instance(&self) -> Result<(WeightedGraph, Potential), Failure> {
        let source = self
            .graph
            .as_ref()
            .ok_or_else(|| Failure::config("no graph given; use --graph or the config 'graph' field"))?;
        let (graph, carried) = load_graph(source)?;
        let potential = match (&self.potential, carried) {
            (Some(PotentialSource::Family(spec)), _) => {
                potential_generate(spec, &graph).map_err(Failure::config)?
            }
            (Some(PotentialSource::Inline(p)), _) => inline_potential(&graph, p)?,
            (None, Some(values)) => Potential::from_values(&graph, values).map_err(Failure::config)?,
            (None, None) => {
                return Err(Failure::config(
                    "no potential given; use --potential, the config 'potential' field or a graph file with 'a' values",
                ))
            }
        };
        Ok((graph, potential))
    }
}

fn inline_potential(graph: &WeightedGraph, p: &InlinePotential) -> Result<Potential, Failure> {
    match p.a0 {
        Some(a0) => Potential::new(graph, p.values.clone(), a0, PotentialClass::A2, None),
        None => Potential::from_values(graph, p.values.clone()),
    }
    .map_err(Failure::config)
}

/// The graph of a source, with the potential values a graph file carries.
pub fn load_graph(source: &GraphSource) -> Result<(WeightedGraph, Option<Vec<f64>>), Failure> {
    match source {
        GraphSource::Family(spec) => Ok((spec.generate().map_err(Failure::config)?, None)),
        GraphSource::File(path) => {
            let GraphData { graph, potential, .. } = load_graph_data(path)?;
            Ok((graph, potential))
        }
    }
}

pub fn load_graph_data(path: &Path) -> Result<GraphData, Failure> {
    io::from_json(&read_file(path)?)
        .map_err(|e| Failure::config(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_named() {
        let err = serde_json::from_str::<RunConfig>(r#"{"graph":"path:4","solvr":{}}"#).unwrap_err();
        assert!(err.to_string().contains("solvr"), "{err}");
        let err = serde_json::from_str::<RunConfig>(r#"{"potential":{"values":[0],"ao":0}}"#).unwrap_err();
        assert!(err.to_string().contains("ao"), "{err}");
        let err = serde_json::from_str::<RunConfig>(r#"{"outputs":{"svg":true}}"#).unwrap_err();
        assert!(err.to_string().contains("svg"), "{err}");
    }

    #[test]
    fn sources_parse_and_round_trip() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{"graph":"cycle:6","potential":{"values":[0,0,0,0,0,1],"a0":-0.5},"outputs":{"dot":true}}"#,
        )
        .unwrap();
        assert_eq!(cfg.graph, Some(GraphSource::Family("cycle:6".parse().unwrap())));
        assert!(cfg.outputs.dot && cfg.outputs.csv);
        let (g, a) = cfg.instance().unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(a.a0(), -0.5);
        let text = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back.potential, cfg.potential);
        assert_eq!(
            GraphSource::parse("g.json").unwrap(),
            GraphSource::File(PathBuf::from("g.json"))
        );
    }

    #[test]
    fn declared_a0_must_bound_values() {
        let cfg: RunConfig =
            serde_json::from_str(r#"{"graph":"path:3","potential":{"values":[0,-0.6,0],"a0":-0.5}}"#).unwrap();
        let err = cfg.instance().unwrap_err();
        assert!(err.message.contains("(A1)"), "{}", err.message);
    }
}
