//! Line-oriented edge-list format.
//!
//! ```text
//! #multiplex k=2 n=6
//! @model 0 IC
//! @model 1 LT
//! !member 1 4
//! 0 0 1 0.5
//! 1 5 2
//! @theta 1 2 0.6
//! ```
//!
//! Edge lines are `<layer> <src> <dst> [<p_or_w>]`; a missing weight means
//! `1 / in-degree(dst)`. Layers without a `@model` line are IC. Any other line
//! starting with `#` is a comment.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::network::{LayerSpec, ModelKind, MultiplexNetwork, NodeId};

pub fn load_multiplex(path: impl AsRef<Path>) -> Result<MultiplexNetwork> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_multiplex(&text)
}

pub fn save_multiplex(net: &MultiplexNetwork, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_edge_list(net)).map_err(|e| Error::io(path, e))
}

pub fn parse_multiplex(text: &str) -> Result<MultiplexNetwork> {
    let mut header: Option<(usize, usize)> = None;
    let mut models: BTreeMap<usize, ModelKind> = BTreeMap::new();
    let mut specs: Vec<LayerSpec> = Vec::new();
    let mut edge_lines: Vec<HashMap<(NodeId, NodeId), usize>> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line: line_no, message };

        if header.is_none() {
            if let Some(rest) = line.strip_prefix("#multiplex") {
                let (k, n) = parse_header(rest).map_err(err)?;
                if k == 0 {
                    return Err(err("header declares zero layers".into()));
                }
                header = Some((k, n));
                specs = (0..k).map(|_| LayerSpec::new(ModelKind::IC)).collect();
                edge_lines = vec![HashMap::new(); k];
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            return Err(err("expected `#multiplex k=<int> n=<int>` header".into()));
        }
        if line.starts_with('#') {
            continue;
        }
        let (k, n) = header.unwrap();
        let fields: Vec<&str> = line.split_whitespace().collect();

        let layer_of = |s: &str| -> Result<usize> {
            let l: usize = s.parse().map_err(|_| err(format!("bad layer id `{s}`")))?;
            if l >= k {
                return Err(err(format!("layer {l} out of range (k={k})")));
            }
            Ok(l)
        };
        let node_of = |s: &str| -> Result<NodeId> {
            let v: NodeId = s.parse().map_err(|_| err(format!("bad node id `{s}`")))?;
            if v as usize >= n {
                return Err(err(format!("node {v} out of range (n={n})")));
            }
            Ok(v)
        };
        let real_of = |s: &str| -> Result<f64> {
            let x: f64 = s.parse().map_err(|_| err(format!("bad number `{s}`")))?;
            if !x.is_finite() {
                return Err(err(format!("non-finite number `{s}`")));
            }
            Ok(x)
        };

        match fields[0] {
            "@model" => {
                if fields.len() != 3 {
                    return Err(err("expected `@model <layer> IC|LT`".into()));
                }
                let l = layer_of(fields[1])?;
                let kind: ModelKind = fields[2].parse().map_err(err)?;
                if models.insert(l, kind).is_some() {
                    return Err(err(format!("model of layer {l} declared twice")));
                }
                specs[l].model = kind;
            }
            "@theta" => {
                if fields.len() != 4 {
                    return Err(err("expected `@theta <layer> <node> <zeta>`".into()));
                }
                let l = layer_of(fields[1])?;
                let v = node_of(fields[2])?;
                let zeta = real_of(fields[3])?;
                if !(0.0..=1.0).contains(&zeta) {
                    return Err(err(format!("threshold {zeta} outside [0, 1]")));
                }
                specs[l].thresholds.insert(v, zeta);
            }
            "!member" => {
                if fields.len() != 3 {
                    return Err(err("expected `!member <layer> <node>`".into()));
                }
                let l = layer_of(fields[1])?;
                let v = node_of(fields[2])?;
                specs[l].members.insert(v);
            }
            _ => {
                if !(3..=4).contains(&fields.len()) {
                    return Err(err("expected `<layer> <src> <dst> [<p_or_w>]`".into()));
                }
                let l = layer_of(fields[0])?;
                let src = node_of(fields[1])?;
                let dst = node_of(fields[2])?;
                if src == dst {
                    return Err(err(format!("self-loop on node {src}")));
                }
                let w = fields.get(3).map(|s| real_of(s)).transpose()?;
                if let Some(w) = w {
                    if w < 0.0 {
                        return Err(err(format!("negative weight {w}")));
                    }
                }
                if let Some(prev) = edge_lines[l].insert((src, dst), line_no) {
                    return Err(err(format!("duplicate edge {src}->{dst} (first on line {prev})")));
                }
                specs[l].edges.push((src, dst, w));
            }
        }
    }

    let (_, n) = header.ok_or(Error::Parse {
        line: 0,
        message: "missing `#multiplex` header".into(),
    })?;

    // IC probabilities are only known to be probabilities once models are fixed
    for (l, spec) in specs.iter().enumerate() {
        if spec.model == ModelKind::IC {
            for &(src, dst, w) in &spec.edges {
                if let Some(p) = w {
                    if p > 1.0 {
                        let line = edge_lines[l][&(src, dst)];
                        return Err(Error::Parse {
                            line,
                            message: format!("IC probability {p} outside [0, 1]"),
                        });
                    }
                }
            }
            if let Some((&v, _)) = spec.thresholds.iter().next() {
                return Err(Error::Parse {
                    line: 0,
                    message: format!("threshold for node {v} given on IC layer {l}"),
                });
            }
        }
    }

    MultiplexNetwork::new(n, specs)
}

fn parse_header(rest: &str) -> std::result::Result<(usize, usize), String> {
    let mut k = None;
    let mut n = None;
    for tok in rest.split_whitespace() {
        if let Some(v) = tok.strip_prefix("k=") {
            k = Some(v.parse::<usize>().map_err(|_| format!("bad layer count `{v}`"))?);
        } else if let Some(v) = tok.strip_prefix("n=") {
            n = Some(v.parse::<usize>().map_err(|_| format!("bad node count `{v}`"))?);
        } else {
            return Err(format!("unexpected header token `{tok}`"));
        }
    }
    match (k, n) {
        (Some(k), Some(n)) => Ok((k, n)),
        _ => Err("header must declare both k=<int> and n=<int>".into()),
    }
}

/// Canonical serialization: every member, weight and threshold is explicit,
/// so `parse_multiplex(to_edge_list(net)) == net`.
pub fn to_edge_list(net: &MultiplexNetwork) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "#multiplex k={} n={}", net.num_layers(), net.num_nodes());
    for layer in net.layers() {
        let _ = writeln!(out, "@model {} {}", layer.id(), layer.model());
    }
    for layer in net.layers() {
        for v in layer.members() {
            let _ = writeln!(out, "!member {} {}", layer.id(), v);
        }
    }
    for layer in net.layers() {
        for e in layer.edges() {
            let _ = writeln!(out, "{} {} {} {}", layer.id(), e.src, e.dst, e.weight);
        }
    }
    for layer in net.layers() {
        if layer.model() == ModelKind::LT {
            for v in layer.members() {
                let zeta = layer.threshold(v).unwrap();
                let _ = writeln!(out, "@theta {} {} {}", layer.id(), v, zeta);
            }
        }
    }
    out
}
