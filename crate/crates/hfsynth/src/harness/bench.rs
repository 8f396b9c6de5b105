//! Size and depth measurements of the constructions over parameter grids.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::adder::{AdderSpec, Variant};
use crate::circuit::{to_netlist, Circuit};
use crate::error::{Error, Result};
use crate::transducer::{compile_moore, toy_machine, MooreMachine};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Construction {
    Adder { variant: Variant, k: usize },
    Moore(MooreMachine),
}

impl Construction {
    pub fn id(&self) -> String {
        match self {
            Construction::Adder { variant, .. } => format!("adder-{variant}"),
            Construction::Moore(_) => "moore".to_string(),
        }
    }

    pub fn build(&self, n: usize) -> Result<Circuit> {
        match self {
            Construction::Adder { variant, k } => AdderSpec::new(n, *k, *variant)?.build(),
            Construction::Moore(m) => compile_moore(m, n),
        }
    }

    fn params(&self) -> (usize, usize, usize) {
        match self {
            Construction::Adder { k, .. } => (*k, 0, 2),
            Construction::Moore(m) => (0, m.num_states(), m.input_bits()),
        }
    }
}

impl FromStr for Construction {
    type Err = Error;

    /// `prefix:K`, `sorting:K` or `toy`.
    fn from_str(s: &str) -> Result<Construction> {
        if s == "toy" {
            return Ok(Construction::Moore(toy_machine()));
        }
        let bad = || Error::InvalidParameters(format!("unknown construction {s:?}; expected prefix:K, sorting:K or toy"));
        let (name, k) = s.split_once(':').ok_or_else(bad)?;
        let k = k.parse().map_err(|_| bad())?;
        Ok(Construction::Adder {
            variant: name.parse()?,
            k,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    pub id: String,
    pub n: usize,
    pub k: usize,
    pub states: usize,
    pub input_bits: usize,
    pub size: usize,
    pub depth: usize,
    pub build_ms: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchTable {
    pub records: Vec<BenchRecord>,
    /// The time budget ran out before the grid was complete.
    pub truncated: bool,
}

impl BenchTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,n,k,size,depth,build_ms\n");
        for r in &self.records {
            writeln!(out, "{},{},{},{},{},{:.3}", r.id, r.n, r.k, r.size, r.depth, r.build_ms).expect("write to string");
        }
        out
    }

    pub fn sizes(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.size as f64).collect()
    }

    pub fn depths(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.depth as f64).collect()
    }
}

/// Builds the construction for every `n` of the grid, stopping once `budget` is spent.
pub fn bench_scaling(construction: &Construction, grid: &[usize], budget: Option<Duration>) -> Result<BenchTable> {
    let start = Instant::now();
    let (k, states, input_bits) = construction.params();
    let mut table = BenchTable::default();
    for &n in grid {
        if budget.is_some_and(|b| start.elapsed() > b) {
            table.truncated = true;
            break;
        }
        let t = Instant::now();
        let c = construction.build(n)?;
        let build_ms = t.elapsed().as_secs_f64() * 1e3;
        table.records.push(BenchRecord {
            id: construction.id(),
            n,
            k,
            states,
            input_bits,
            size: c.size(),
            depth: c.depth(),
            build_ms,
        });
    }
    Ok(table)
}

/// Gate count and depth recomputed from a serialized netlist, independently of [`Circuit`].
pub fn netlist_metrics(bytes: &[u8]) -> Result<(usize, usize)> {
    let v: serde_json::Value = serde_json::from_slice(bytes)?;
    let malformed = |what: &str| Error::Parse {
        pos: 0,
        msg: format!("netlist without {what}"),
    };
    let nodes = v["nodes"].as_array().ok_or_else(|| malformed("nodes"))?;
    let outputs = v["outputs"].as_array().ok_or_else(|| malformed("outputs"))?;
    let mut depth = vec![0usize; nodes.len()];
    let mut used = vec![false; nodes.len()];
    for o in outputs {
        let i = o.as_u64().ok_or_else(|| malformed("output indices"))? as usize;
        *used.get_mut(i).ok_or_else(|| malformed("valid outputs"))? = true;
    }
    let args = |node: &serde_json::Value| -> Vec<usize> {
        node["args"]
            .as_array()
            .map(|a| a.iter().filter_map(|x| x.as_u64()).map(|x| x as usize).collect())
            .unwrap_or_default()
    };
    for i in (0..nodes.len()).rev() {
        if used[i] {
            for a in args(&nodes[i]) {
                used[a] = true;
            }
        }
    }
    let mut size = 0;
    for (i, node) in nodes.iter().enumerate() {
        let logic = matches!(node["op"].as_str(), Some("and" | "or" | "not"));
        let d = args(node).iter().map(|&a| depth[a]).max().unwrap_or(0);
        depth[i] = d + logic as usize;
        if logic && used[i] {
            size += 1;
        }
    }
    let max_depth = outputs
        .iter()
        .filter_map(|o| o.as_u64())
        .map(|o| depth[o as usize])
        .max()
        .unwrap_or(0);
    Ok((size, max_depth))
}

/// Gate count and depth of a circuit as seen through its netlist.
pub fn circuit_netlist_metrics(c: &Circuit) -> (usize, usize) {
    netlist_metrics(&to_netlist(c)).expect("emitted netlists parse")
}
