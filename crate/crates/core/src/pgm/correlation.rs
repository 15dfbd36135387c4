use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::NodeId;
use crate::propagation::StatusDataset;

/// Sample Pearson correlation between the changing (non-constant) columns
/// of a status dataset. Any pair involving a constant column is undefined.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationMatrix {
    num_nodes: usize,
    /// Position of each node among the changing columns.
    index: Vec<Option<usize>>,
    changing: Vec<NodeId>,
    values: Vec<f64>,
}

impl CorrelationMatrix {
    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// Nodes whose column has nonzero variance, ascending.
    pub fn changing(&self) -> &[NodeId] {
        &self.changing
    }

    pub fn is_constant(&self, v: NodeId) -> bool {
        self.index[v as usize].is_none()
    }

    /// `None` marks an undefined entry.
    pub fn get(&self, x: NodeId, y: NodeId) -> Option<f64> {
        let i = self.index[x as usize]?;
        let j = self.index[y as usize]?;
        Some(self.values[i * self.changing.len() + j])
    }
}

/// Column `v` packed as a bitset over rows.
pub(crate) fn column_bits(d: &StatusDataset, v: usize) -> Vec<u64> {
    let mut bits = vec![0u64; d.num_rows().div_ceil(64)];
    for r in 0..d.num_rows() {
        if d.get(r, v) == 1 {
            bits[r / 64] |= 1 << (r % 64);
        }
    }
    bits
}

pub(crate) fn and_count(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}

pub fn pearson_matrix(d: &StatusDataset) -> Result<CorrelationMatrix> {
    let m = d.num_rows();
    if m < 2 {
        return Err(Error::Domain(format!("correlation needs at least 2 rows, got {m}")));
    }
    let n = d.num_nodes();
    let mut index = vec![None; n];
    let mut changing = Vec::new();
    let mut bits = Vec::new();
    let mut ones = Vec::new();
    for (v, slot) in index.iter_mut().enumerate() {
        let s = d.column_sum(v);
        if s != 0 && s != m {
            *slot = Some(changing.len());
            changing.push(v as NodeId);
            bits.push(column_bits(d, v));
            ones.push(s as f64);
        }
    }
    let c = changing.len();
    let mf = m as f64;
    let mut values = vec![0.0; c * c];
    for i in 0..c {
        values[i * c + i] = 1.0;
        for j in i + 1..c {
            // binary columns: m·Σ(x-x̄)(y-ȳ) = m·n_xy - n_x·n_y
            let nxy = and_count(&bits[i], &bits[j]) as f64;
            let num = mf * nxy - ones[i] * ones[j];
            let den = ((mf * ones[i] - ones[i] * ones[i]) * (mf * ones[j] - ones[j] * ones[j])).sqrt();
            let q = (num / den).clamp(-1.0, 1.0);
            values[i * c + j] = q;
            values[j * c + i] = q;
        }
    }
    Ok(CorrelationMatrix {
        num_nodes: n,
        index,
        changing,
        values,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    Correlated,
    AlwaysActive,
    NeverActive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Group {
    pub kind: GroupKind,
    pub members: Vec<NodeId>,
    pub representative: NodeId,
}

/// A disjoint cover of all nodes by groups, each with a representative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupPartition {
    pub groups: Vec<Group>,
    /// Group index of every node.
    pub membership: Vec<usize>,
}

impl GroupPartition {
    pub fn group_of(&self, v: NodeId) -> &Group {
        &self.groups[self.membership[v as usize]]
    }

    /// `f(v)`.
    pub fn representative_of(&self, v: NodeId) -> NodeId {
        self.group_of(v).representative
    }

    /// Representatives of correlated groups, ascending. These are the tree
    /// variables; constant groups are resolved without the tree.
    pub fn variables(&self) -> Vec<NodeId> {
        let mut vars: Vec<NodeId> = self
            .groups
            .iter()
            .filter(|g| g.kind == GroupKind::Correlated)
            .map(|g| g.representative)
            .collect();
        vars.sort_unstable();
        vars
    }
}

/// Single pass in ascending id order: each ungrouped changing node opens a
/// group and absorbs every ungrouped node with correlation above `xi`.
/// Constant columns go to an always-active and a never-active group.
pub fn variable_grouping(d: &StatusDataset, q: &CorrelationMatrix, xi: f64) -> Result<GroupPartition> {
    if !(xi > 0.0 && xi <= 1.0) {
        return Err(Error::InvalidConfig(format!("grouping threshold must be in (0, 1], got {xi}")));
    }
    if q.num_nodes() != d.num_nodes() {
        return Err(Error::Domain("correlation matrix does not match the dataset".into()));
    }
    let n = d.num_nodes();
    let m = d.num_rows();
    let mut groups = Vec::new();
    let mut membership = vec![usize::MAX; n];

    for &x in q.changing() {
        if membership[x as usize] != usize::MAX {
            continue;
        }
        let gid = groups.len();
        let mut members = vec![x];
        membership[x as usize] = gid;
        for &y in q.changing() {
            if membership[y as usize] == usize::MAX && q.get(x, y).is_some_and(|c| c > xi) {
                membership[y as usize] = gid;
                members.push(y);
            }
        }
        members.sort_unstable();
        let representative = closest_to_centroid(d, &members);
        groups.push(Group {
            kind: GroupKind::Correlated,
            members,
            representative,
        });
    }

    for kind in [GroupKind::AlwaysActive, GroupKind::NeverActive] {
        let target = if kind == GroupKind::AlwaysActive { m } else { 0 };
        let members: Vec<NodeId> = (0..n)
            .filter(|&v| membership[v] == usize::MAX && d.column_sum(v) == target)
            .map(|v| v as NodeId)
            .collect();
        if let Some(&representative) = members.first() {
            for &v in &members {
                membership[v as usize] = groups.len();
            }
            groups.push(Group {
                kind,
                members,
                representative,
            });
        }
    }
    debug_assert!(membership.iter().all(|&g| g != usize::MAX));
    Ok(GroupPartition { groups, membership })
}

/// Member whose column is nearest (Euclidean) to the group's mean column;
/// ties go to the lower id.
fn closest_to_centroid(d: &StatusDataset, members: &[NodeId]) -> NodeId {
    let m = d.num_rows();
    let k = members.len() as f64;
    let centroid: Vec<f64> = (0..m)
        .map(|r| members.iter().map(|&v| d.get(r, v as usize) as f64).sum::<f64>() / k)
        .collect();
    let mut best = (f64::INFINITY, members[0]);
    for &v in members {
        let dist: f64 = (0..m)
            .map(|r| (d.get(r, v as usize) as f64 - centroid[r]).powi(2))
            .sum();
        if dist < best.0 {
            best = (dist, v);
        }
    }
    best.1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dataset(cols: &[&[u8]]) -> StatusDataset {
        let m = cols[0].len();
        let rows: Vec<Vec<u8>> = (0..m).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
        StatusDataset::from_rows(&rows).unwrap()
    }

    #[test]
    fn pearson_basic_cases() {
        let d = dataset(&[&[1, 0, 1, 0], &[1, 0, 1, 0], &[0, 1, 0, 1], &[1, 1, 1, 1], &[1, 1, 0, 0]]);
        let q = pearson_matrix(&d).unwrap();
        assert_eq!(q.get(0, 1), Some(1.0));
        assert_eq!(q.get(0, 2), Some(-1.0));
        assert_eq!(q.get(0, 3), None);
        assert_eq!(q.get(3, 3), None);
        assert_eq!(q.get(0, 4), Some(0.0));
        assert_eq!(q.get(4, 0), q.get(0, 4));
        assert!(q.is_constant(3));
        assert_eq!(q.changing(), &[0, 1, 2, 4]);
    }

    #[test]
    fn pearson_needs_two_rows() {
        let d = dataset(&[&[1]]);
        assert!(pearson_matrix(&d).is_err());
    }

    #[test]
    fn duplicated_columns_form_one_group() {
        let d = dataset(&[&[1, 0, 1, 1, 0], &[1, 0, 1, 1, 0], &[1, 0, 1, 1, 0]]);
        let q = pearson_matrix(&d).unwrap();
        let p = variable_grouping(&d, &q, 0.999).unwrap();
        assert_eq!(p.groups.len(), 1);
        assert_eq!(p.groups[0].members, vec![0, 1, 2]);
        assert_eq!(p.groups[0].representative, 0);
    }

    #[test]
    fn orthogonal_columns_are_singletons() {
        // Walsh-like columns with zero pairwise correlation
        let d = dataset(&[&[1, 1, 0, 0], &[1, 0, 1, 0], &[1, 0, 0, 1]]);
        let q = pearson_matrix(&d).unwrap();
        for x in 0..3 {
            for y in 0..3 {
                if x != y {
                    assert!(q.get(x, y).unwrap().abs() < 0.34);
                }
            }
        }
        let p = variable_grouping(&d, &q, 0.9).unwrap();
        assert_eq!(p.groups.len(), 3);
        assert_eq!(p.variables(), vec![0, 1, 2]);
    }

    #[test]
    fn constant_columns_get_special_groups() {
        let d = dataset(&[&[0, 0, 0], &[1, 0, 1], &[1, 1, 1], &[0, 0, 0], &[1, 1, 1]]);
        let q = pearson_matrix(&d).unwrap();
        let p = variable_grouping(&d, &q, 0.9).unwrap();
        assert_eq!(p.group_of(0).kind, GroupKind::NeverActive);
        assert_eq!(p.group_of(3).members, vec![0, 3]);
        assert_eq!(p.representative_of(3), 0);
        assert_eq!(p.group_of(4).kind, GroupKind::AlwaysActive);
        assert_eq!(p.representative_of(4), 2);
        assert_eq!(p.variables(), vec![1]);
        assert!(variable_grouping(&d, &q, 0.0).is_err());
    }

    #[test]
    fn representative_is_nearest_the_centroid() {
        // column 1 sits between 0 and 2
        let d = dataset(&[
            &[1, 1, 1, 0, 0, 0, 0, 0],
            &[1, 1, 1, 1, 0, 0, 0, 0],
            &[1, 1, 1, 1, 1, 0, 0, 0],
        ]);
        let q = pearson_matrix(&d).unwrap();
        let p = variable_grouping(&d, &q, 0.5).unwrap();
        assert_eq!(p.groups.len(), 1);
        assert_eq!(p.groups[0].representative, 1);
    }
}
