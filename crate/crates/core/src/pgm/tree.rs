use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::correlation::{and_count, column_bits, GroupPartition};
use crate::error::{Error, Result};
use crate::network::NodeId;
use crate::propagation::StatusDataset;

/// Laplace pseudo-count used when nothing else is configured.
pub const DEFAULT_ALPHA: f64 = 1.0;

/// Observed values of tree variables.
pub type Evidence = BTreeMap<NodeId, bool>;

/// Plug-in mutual information (natural log) of two binary columns with
/// pseudo-count `alpha` added to each of the four joint cells.
pub fn mutual_information(d: &StatusDataset, a: NodeId, b: NodeId, alpha: f64) -> f64 {
    let ba = column_bits(d, a as usize);
    let bb = column_bits(d, b as usize);
    let n11 = and_count(&ba, &bb);
    mi_from_counts(d.num_rows(), d.column_sum(a as usize), d.column_sum(b as usize), n11, alpha)
}

fn mi_from_counts(m: usize, na: usize, nb: usize, n11: usize, alpha: f64) -> f64 {
    let n10 = na - n11;
    let n01 = nb - n11;
    let n00 = m + n11 - na - nb;
    let total = m as f64 + 4.0 * alpha;
    let p = |c: usize| (c as f64 + alpha) / total;
    let joint = [[p(n00), p(n01)], [p(n10), p(n11)]];
    let pa = [joint[0][0] + joint[0][1], joint[1][0] + joint[1][1]];
    let pb = [joint[0][0] + joint[1][0], joint[0][1] + joint[1][1]];
    let mut mi = 0.0;
    for x in 0..2 {
        for y in 0..2 {
            let pxy = joint[x][y];
            if pxy > 0.0 {
                mi += pxy * (pxy / (pa[x] * pb[y])).ln();
            }
        }
    }
    mi.max(0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeEdge {
    pub parent: NodeId,
    pub child: NodeId,
    pub mutual_information: f64,
}

/// Tree-structured Bayesian network over group representatives.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChowLiuTree {
    /// Tree variables, ascending.
    pub variables: Vec<NodeId>,
    pub root: Option<NodeId>,
    /// Oriented away from the root, in Kruskal acceptance order.
    pub edges: Vec<TreeEdge>,
    /// Per variable (aligned with `variables`): parent index, if any.
    parent: Vec<Option<usize>>,
    /// Per variable: `P(v=1)` for the root, `[P(v=1|parent=0), P(v=1|parent=1)]` otherwise.
    cpt: Vec<[f64; 2]>,
    pub partition: GroupPartition,
    pub alpha: f64,
    /// Number of pairwise mutual-information evaluations made while fitting.
    pub mi_evaluations: usize,
    pub num_rows: usize,
}

#[derive(Serialize)]
struct CptJson {
    node: NodeId,
    parent: Option<NodeId>,
    p_active_given_parent: [f64; 2],
}

impl ChowLiuTree {
    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn variable_index(&self, v: NodeId) -> Option<usize> {
        self.variables.binary_search(&v).ok()
    }

    pub fn parent_of(&self, v: NodeId) -> Option<NodeId> {
        let i = self.variable_index(v)?;
        self.parent[i].map(|p| self.variables[p])
    }

    /// `P(v = 1 | parent = pv)`; the root ignores `pv`.
    pub fn cpt(&self, v: NodeId, parent_value: bool) -> Option<f64> {
        let i = self.variable_index(v)?;
        Some(self.cpt[i][parent_value as usize])
    }

    pub fn total_mutual_information(&self) -> f64 {
        self.edges.iter().map(|e| e.mutual_information).sum()
    }

    /// Joint probability of a full assignment (indexed like `variables`).
    pub fn joint(&self, assignment: &[bool]) -> f64 {
        (0..self.variables.len())
            .map(|i| {
                let pv = self.parent[i].is_some_and(|p| assignment[p]);
                let p1 = self.cpt[i][pv as usize];
                if assignment[i] {
                    p1
                } else {
                    1.0 - p1
                }
            })
            .product()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let cpts: Vec<CptJson> = self
            .variables
            .iter()
            .enumerate()
            .map(|(i, &v)| CptJson {
                node: v,
                parent: self.parent[i].map(|p| self.variables[p]),
                p_active_given_parent: self.cpt[i],
            })
            .collect();
        serde_json::json!({
            "root": self.root,
            "edges": self.edges.iter().map(|e| [e.parent, e.child]).collect::<Vec<_>>(),
            "cpts": cpts,
            "mi_per_edge": self.edges.iter().map(|e| e.mutual_information).collect::<Vec<_>>(),
            "mi_units": "nats",
            "alpha": self.alpha,
            "mi_evaluations": self.mi_evaluations,
            "num_rows": self.num_rows,
            "group_partition": self.partition,
        })
    }
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = x;
        while self.0[c] != r {
            let next = self.0[c];
            self.0[c] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Maximum mutual-information spanning tree over the partition's
/// representatives (Kruskal, ties broken by the lexicographically smaller
/// pair), rooted at the lowest id, with smoothed conditional tables.
pub fn chow_liu_fit(d: &StatusDataset, partition: &GroupPartition, alpha: f64) -> Result<ChowLiuTree> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidConfig(format!("smoothing must be >= 0, got {alpha}")));
    }
    if partition.membership.len() != d.num_nodes() {
        return Err(Error::Domain("partition does not match the dataset".into()));
    }
    let m = d.num_rows();
    let variables = partition.variables();
    let q = variables.len();
    let bits: Vec<Vec<u64>> = variables.iter().map(|&v| column_bits(d, v as usize)).collect();
    let ones: Vec<usize> = variables.iter().map(|&v| d.column_sum(v as usize)).collect();

    let pairs: Vec<(usize, usize)> = (0..q).flat_map(|i| (i + 1..q).map(move |j| (i, j))).collect();
    let mut weighted: Vec<(f64, usize, usize)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let n11 = and_count(&bits[i], &bits[j]);
            (mi_from_counts(m, ones[i], ones[j], n11, alpha), i, j)
        })
        .collect();
    let mi_evaluations = weighted.len();
    weighted.sort_by(|a, b| b.0.total_cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));

    let mut dsu = Dsu((0..q).collect());
    let mut adj = vec![Vec::new(); q];
    let mut accepted = Vec::new();
    for &(w, i, j) in &weighted {
        if dsu.union(i, j) {
            adj[i].push((j, w));
            adj[j].push((i, w));
            accepted.push((i, j, w));
            if accepted.len() + 1 == q {
                break;
            }
        }
    }

    let mut parent = vec![None; q];
    if q > 0 {
        let mut seen = vec![false; q];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &(v, _) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = Some(u);
                    stack.push(v);
                }
            }
        }
    }
    let edges = accepted
        .iter()
        .map(|&(i, j, w)| {
            let (p, c) = if parent[j] == Some(i) { (i, j) } else { (j, i) };
            TreeEdge {
                parent: variables[p],
                child: variables[c],
                mutual_information: w,
            }
        })
        .collect();

    let cpt = (0..q)
        .map(|i| match parent[i] {
            None => {
                let p1 = (ones[i] as f64 + alpha) / (m as f64 + 2.0 * alpha);
                [p1, p1]
            }
            Some(p) => {
                let n_p1 = ones[p];
                let n_p0 = m - n_p1;
                let n_11 = and_count(&bits[p], &bits[i]);
                let n_01 = ones[i] - n_11;
                [
                    (n_01 as f64 + alpha) / (n_p0 as f64 + 2.0 * alpha),
                    (n_11 as f64 + alpha) / (n_p1 as f64 + 2.0 * alpha),
                ]
            }
        })
        .collect();

    Ok(ChowLiuTree {
        root: variables.first().copied(),
        variables,
        edges,
        parent,
        cpt,
        partition: partition.clone(),
        alpha,
        mi_evaluations,
        num_rows: m,
    })
}

/// Reusable inference buffers for one tree.
pub struct TreeInference<'a> {
    tree: &'a ChowLiuTree,
    children: Vec<Vec<usize>>,
    /// Variables ordered so that parents precede children.
    order: Vec<usize>,
}

impl<'a> TreeInference<'a> {
    pub fn new(tree: &'a ChowLiuTree) -> Self {
        let q = tree.variables.len();
        let mut children = vec![Vec::new(); q];
        for (i, p) in tree.parent.iter().enumerate() {
            if let Some(p) = p {
                children[*p].push(i);
            }
        }
        let mut order = Vec::with_capacity(q);
        if q > 0 {
            order.push(0);
            let mut k = 0;
            while k < order.len() {
                order.extend(children[order[k]].iter().copied());
                k += 1;
            }
        }
        TreeInference { tree, children, order }
    }

    /// `P(v = 1 | evidence)` for every variable. `evidence[i]` refers to
    /// `tree.variables[i]`.
    pub fn posteriors(&self, evidence: &[Option<bool>]) -> Result<Vec<f64>> {
        self.run(evidence).map(|(post, _)| post)
    }

    /// `P(v = 1 | evidence on every other variable)` for every variable, so
    /// a variable's own observation is left out of its query.
    pub fn cavity_posteriors(&self, evidence: &[Option<bool>]) -> Result<Vec<f64>> {
        self.run(evidence).map(|(_, cavity)| cavity)
    }

    fn run(&self, evidence: &[Option<bool>]) -> Result<(Vec<f64>, Vec<f64>)> {
        let q = self.tree.variables.len();
        let cpt = &self.tree.cpt;
        let like = |i: usize| match evidence[i] {
            None => [1.0, 1.0],
            Some(false) => [1.0, 0.0],
            Some(true) => [0.0, 1.0],
        };
        let trans = |c: usize, pv: usize, xc: usize| if xc == 1 { cpt[c][pv] } else { 1.0 - cpt[c][pv] };

        // upward: lambda[i] = local evidence times messages from children;
        // up[i] = message i sends to its parent
        let mut lambda = vec![[0.0f64; 2]; q];
        let mut from_kids = vec![[1.0f64; 2]; q];
        let mut up = vec![[0.0f64; 2]; q];
        for &i in self.order.iter().rev() {
            let mut l = [1.0, 1.0];
            for &c in &self.children[i] {
                l = normalize([l[0] * up[c][0], l[1] * up[c][1]]);
            }
            from_kids[i] = l;
            let e = like(i);
            lambda[i] = normalize([l[0] * e[0], l[1] * e[1]]);
            if self.tree.parent[i].is_some() {
                let mut msg = [0.0; 2];
                for (pv, slot) in msg.iter_mut().enumerate() {
                    *slot = trans(i, pv, 0) * lambda[i][0] + trans(i, pv, 1) * lambda[i][1];
                }
                up[i] = normalize(msg);
            }
        }

        // downward: pi[i] = prior of i given evidence outside its subtree
        let mut pi = vec![[0.0f64; 2]; q];
        let mut post = vec![0.0; q];
        let mut cavity = vec![0.0; q];
        for &i in &self.order {
            pi[i] = match self.tree.parent[i] {
                None => [1.0 - cpt[i][0], cpt[i][0]],
                Some(_) => pi[i],
            };
            let b = [pi[i][0] * lambda[i][0], pi[i][1] * lambda[i][1]];
            let z = b[0] + b[1];
            if z <= 0.0 || !z.is_finite() {
                return Err(Error::ImpossibleEvidence);
            }
            post[i] = b[1] / z;
            let c = [pi[i][0] * from_kids[i][0], pi[i][1] * from_kids[i][1]];
            cavity[i] = c[1] / (c[0] + c[1]);

            let kids = &self.children[i];
            if kids.is_empty() {
                continue;
            }
            // prefix/suffix products of child messages to exclude one child at a time
            let base = {
                let e = like(i);
                [pi[i][0] * e[0], pi[i][1] * e[1]]
            };
            let mut suffix = vec![[1.0f64, 1.0f64]; kids.len() + 1];
            for k in (0..kids.len()).rev() {
                let u = up[kids[k]];
                suffix[k] = normalize([suffix[k + 1][0] * u[0], suffix[k + 1][1] * u[1]]);
            }
            let mut prefix = [1.0f64, 1.0f64];
            for (k, &c) in kids.iter().enumerate() {
                let excl = normalize([
                    base[0] * prefix[0] * suffix[k + 1][0],
                    base[1] * prefix[1] * suffix[k + 1][1],
                ]);
                let mut msg = [0.0; 2];
                for (xc, slot) in msg.iter_mut().enumerate() {
                    *slot = trans(c, 0, xc) * excl[0] + trans(c, 1, xc) * excl[1];
                }
                pi[c] = normalize(msg);
                let u = up[c];
                prefix = normalize([prefix[0] * u[0], prefix[1] * u[1]]);
            }
        }
        Ok((post, cavity))
    }
}

fn normalize(x: [f64; 2]) -> [f64; 2] {
    let s = x[0] + x[1];
    if s > 0.0 {
        [x[0] / s, x[1] / s]
    } else {
        x
    }
}

/// Exact `P(query = 1 | evidence)` on the tree.
pub fn tree_condition(tree: &ChowLiuTree, query: NodeId, evidence: &Evidence) -> Result<f64> {
    let qi = tree
        .variable_index(query)
        .ok_or_else(|| Error::Domain(format!("node {query} is not a tree variable")))?;
    let mut ev = vec![None; tree.variables.len()];
    for (&v, &x) in evidence {
        let i = tree
            .variable_index(v)
            .ok_or_else(|| Error::Domain(format!("evidence on node {v}, which is not a tree variable")))?;
        ev[i] = Some(x);
    }
    if let Some(x) = ev[qi] {
        return Ok(if x { 1.0 } else { 0.0 });
    }
    Ok(TreeInference::new(tree).posteriors(&ev)?[qi])
}
