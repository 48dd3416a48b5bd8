//! `KIND:PARAMS` synthetic graph requests and their generation.

use serde::{Deserialize, Serialize};

use imcp_core::rng::{stream_rng, tag};
use imcp_core::synth;
use imcp_core::DirectedGraph;

use crate::experiment::ExperimentError;

/// A synthetic input in place of an edge-list file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SyntheticSpec {
    /// `erdos_renyi:n=100,p=0.05` — directed G(n, p).
    ErdosRenyi { n: usize, p: f64 },
    /// `two_block:n=300,p_in=0.05,p_out=0.005` — planted two communities.
    TwoBlock { n: usize, p_in: f64, p_out: f64 },
    /// `collaboration:n=400,papers=600` — overlapping co-author cliques,
    /// expanded to both directions.
    Collaboration { n: usize, papers: usize },
}

impl SyntheticSpec {
    /// Parse `kind:key=value,...`.
    pub fn parse(text: &str) -> Result<Self, ExperimentError> {
        let usage = |msg: String| ExperimentError::Usage(msg);
        let (kind, params) = text
            .split_once(':')
            .ok_or_else(|| usage(format!("synthetic spec '{text}' needs KIND:PARAMS")))?;
        let mut map = std::collections::BTreeMap::new();
        for part in params.split(',') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| usage(format!("bad synthetic parameter '{part}'")))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |key: &str| -> Result<f64, ExperimentError> {
            map.get(key)
                .ok_or_else(|| usage(format!("synthetic '{kind}' needs parameter '{key}'")))?
                .parse::<f64>()
                .map_err(|_| usage(format!("cannot parse synthetic parameter '{key}'")))
        };
        let spec = match kind {
            "erdos_renyi" => SyntheticSpec::ErdosRenyi {
                n: get("n")? as usize,
                p: get("p")?,
            },
            "two_block" => SyntheticSpec::TwoBlock {
                n: get("n")? as usize,
                p_in: get("p_in")?,
                p_out: get("p_out")?,
            },
            "collaboration" => SyntheticSpec::Collaboration {
                n: get("n")? as usize,
                papers: get("papers")? as usize,
            },
            other => return Err(usage(format!("unknown synthetic kind '{other}'"))),
        };
        match &spec {
            SyntheticSpec::ErdosRenyi { n, .. }
            | SyntheticSpec::TwoBlock { n, .. }
            | SyntheticSpec::Collaboration { n, .. } => {
                if *n < 1 {
                    return Err(usage("synthetic graphs need n >= 1".into()));
                }
            }
        }
        Ok(spec)
    }

    pub fn dataset_name(&self) -> String {
        match self {
            SyntheticSpec::ErdosRenyi { n, p } => format!("erdos_renyi_n{n}_p{p}"),
            SyntheticSpec::TwoBlock { n, p_in, p_out } => {
                format!("two_block_n{n}_pin{p_in}_pout{p_out}")
            }
            SyntheticSpec::Collaboration { n, papers } => {
                format!("collaboration_n{n}_papers{papers}")
            }
        }
    }

    /// Generate the unweighted graph; probabilities are validated here.
    pub fn generate(&self, master_seed: u64) -> Result<DirectedGraph, ExperimentError> {
        let mut rng = stream_rng(master_seed, &[tag::SYNTHETIC]);
        let graph = match *self {
            SyntheticSpec::ErdosRenyi { n, p } => {
                let pairs = synth::erdos_renyi(n, p, &mut rng)
                    .map_err(|e| ExperimentError::Usage(e.to_string()))?;
                synth::graph_from_pairs(n, &pairs)?
            }
            SyntheticSpec::TwoBlock { n, p_in, p_out } => {
                let (pairs, _) = synth::two_block(n, p_in, p_out, &mut rng)
                    .map_err(|e| ExperimentError::Usage(e.to_string()))?;
                synth::graph_from_pairs(n, &pairs)?
            }
            SyntheticSpec::Collaboration { n, papers } => {
                let undirected = synth::collaboration(n, papers, &mut rng);
                let pairs = synth::undirected_to_directed(&undirected);
                synth::graph_from_pairs(n, &pairs)?
            }
        };
        Ok(graph)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_kinds() {
        assert_eq!(
            SyntheticSpec::parse("erdos_renyi:n=10,p=0.5").unwrap(),
            SyntheticSpec::ErdosRenyi { n: 10, p: 0.5 }
        );
        assert_eq!(
            SyntheticSpec::parse("two_block:n=20,p_in=0.4,p_out=0.02").unwrap(),
            SyntheticSpec::TwoBlock {
                n: 20,
                p_in: 0.4,
                p_out: 0.02
            }
        );
        assert_eq!(
            SyntheticSpec::parse("collaboration:n=50,papers=80").unwrap(),
            SyntheticSpec::Collaboration { n: 50, papers: 80 }
        );
    }

    #[test]
    fn rejects_malformed_requests() {
        assert!(SyntheticSpec::parse("erdos_renyi").is_err());
        assert!(SyntheticSpec::parse("mystery:n=5").is_err());
        assert!(SyntheticSpec::parse("erdos_renyi:n=5").is_err());
        assert!(SyntheticSpec::parse("erdos_renyi:n=5,p=nope").is_err());
    }

    #[test]
    fn invalid_probability_is_a_usage_error() {
        let spec = SyntheticSpec::parse("erdos_renyi:n=5,p=1.5").unwrap();
        assert!(matches!(spec.generate(1), Err(ExperimentError::Usage(_))));
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = SyntheticSpec::parse("two_block:n=30,p_in=0.3,p_out=0.01").unwrap();
        let a = spec.generate(9).unwrap();
        let b = spec.generate(9).unwrap();
        assert_eq!(a, b);
    }
}
