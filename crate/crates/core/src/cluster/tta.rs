use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::matrix::DistanceMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterParams {
    pub max_leaf: usize,
    pub theta_split: f64,
    pub theta_out: f64,
    pub passes: usize,
    pub seed: u64,
}

impl Default for ClusterParams {
    fn default() -> Self {
        ClusterParams {
            max_leaf: 4,
            theta_split: 0.35,
            theta_out: 0.75,
            passes: 3,
            seed: 0,
        }
    }
}

impl ClusterParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_leaf == 0 {
            return Err(Error::Usage("max_leaf must be at least 1".into()));
        }
        if !(0.0 < self.theta_split && self.theta_split < self.theta_out && self.theta_out <= 1.0) {
            return Err(Error::Usage(format!(
                "need 0 < theta_split < theta_out <= 1, got {} and {}",
                self.theta_split, self.theta_out
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Internal,
    Leaf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterNode {
    pub id: String,
    pub kind: NodeKind,
    pub medoid: Option<String>,
    pub members: Vec<String>,
    pub outliers: Vec<String>,
    pub children: Vec<ClusterNode>,
}

impl ClusterNode {
    pub fn is_leaf(&self) -> bool {
        self.kind == NodeKind::Leaf
    }

    /// Pre-order traversal.
    pub fn walk(&self) -> Vec<&ClusterNode> {
        let mut out = vec![self];
        for c in &self.children {
            out.extend(c.walk());
        }
        out
    }

    pub fn leaves(&self) -> Vec<&ClusterNode> {
        self.walk().into_iter().filter(|n| n.is_leaf()).collect()
    }

    fn remove_member(&mut self, term: &str) {
        self.members.retain(|m| m != term);
        self.outliers.retain(|m| m != term);
        for c in &mut self.children {
            c.remove_member(term);
        }
        self.children.retain(|c| !c.members.is_empty());
    }
}

/// Objective after each refinement pass of one split; the first value is
/// the objective of the initial assignment.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PassTrace {
    pub objectives: BTreeMap<String, Vec<f64>>,
}

/// Member with least total distance to the others; ties go to the
/// lexicographically smallest term.
pub fn medoid(matrix: &DistanceMatrix, members: &[String]) -> Option<String> {
    let idx: Vec<usize> = members.iter().filter_map(|m| matrix.index_of(m)).collect();
    let mut best: Option<(f64, &String)> = None;
    for &i in &idx {
        let total: f64 = idx.iter().map(|&j| matrix.get(i, j)).sum();
        let term = &matrix.terms()[i];
        best = match best {
            Some((bt, bm)) if bt < total || (bt == total && bm <= term) => Some((bt, bm)),
            _ => Some((total, term)),
        };
    }
    best.map(|(_, m)| m.clone())
}

/// Fills in the medoid of every node.
pub fn label_concepts(root: &mut ClusterNode, matrix: &DistanceMatrix) {
    root.medoid = medoid(matrix, &root.members);
    for c in &mut root.children {
        label_concepts(c, matrix);
    }
}

pub fn tta_cluster(matrix: &DistanceMatrix, params: &ClusterParams) -> Result<ClusterNode> {
    tta_cluster_traced(matrix, params).map(|(root, _)| root)
}

pub fn tta_cluster_traced(matrix: &DistanceMatrix, params: &ClusterParams) -> Result<(ClusterNode, PassTrace)> {
    if matrix.is_empty() {
        return Err(Error::EmptyInput("distance matrix has no terms"));
    }
    params.validate()?;
    let mut all: Vec<usize> = (0..matrix.len()).collect();
    all.sort_by(|&a, &b| matrix.terms()[a].cmp(&matrix.terms()[b]));
    let mut trace = PassTrace::default();
    let mut root = Builder { matrix, params, trace: &mut trace }.node("C".into(), all);
    label_concepts(&mut root, matrix);
    Ok((root, trace))
}

/// Moves members whose distance to every group and to every co-member is
/// at least `theta_out` into the node's outlier set.
pub fn isolate_outliers(node: &ClusterNode, matrix: &DistanceMatrix, theta_out: f64) -> ClusterNode {
    let groups: Vec<Vec<usize>> = node
        .children
        .iter()
        .map(|c| c.members.iter().filter_map(|m| matrix.index_of(m)).collect())
        .collect();
    let mut out = node.clone();
    for i in find_outliers(matrix, &groups, theta_out) {
        let term = &matrix.terms()[i];
        for c in &mut out.children {
            c.remove_member(term);
        }
        out.children.retain(|c| !c.members.is_empty());
        out.outliers.push(term.clone());
    }
    out.outliers.sort();
    label_concepts(&mut out, matrix);
    out
}

fn mean_to(matrix: &DistanceMatrix, i: usize, group: &[usize]) -> Option<f64> {
    let others: Vec<f64> = group.iter().filter(|&&j| j != i).map(|&j| matrix.get(i, j)).collect();
    if others.is_empty() {
        None
    } else {
        Some(others.iter().sum::<f64>() / others.len() as f64)
    }
}

fn find_outliers(matrix: &DistanceMatrix, groups: &[Vec<usize>], theta_out: f64) -> Vec<usize> {
    let everyone: Vec<usize> = groups.iter().flatten().copied().collect();
    let mut out: Vec<usize> = everyone
        .iter()
        .copied()
        .filter(|&i| {
            let nearest_group = groups
                .iter()
                .filter_map(|g| mean_to(matrix, i, g))
                .fold(f64::INFINITY, f64::min);
            let nearest_member = everyone
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| matrix.get(i, j))
                .fold(f64::INFINITY, f64::min);
            nearest_group >= theta_out && nearest_member >= theta_out
        })
        .collect();
    if out.len() == everyone.len() {
        out.clear();
    }
    out
}

fn node_seed(seed: u64, id: &str) -> u64 {
    id.bytes()
        .fold(seed ^ 0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

struct Builder<'a> {
    matrix: &'a DistanceMatrix,
    params: &'a ClusterParams,
    trace: &'a mut PassTrace,
}

impl Builder<'_> {
    fn names(&self, idx: &[usize]) -> Vec<String> {
        let mut v: Vec<String> = idx.iter().map(|&i| self.matrix.terms()[i].clone()).collect();
        v.sort();
        v
    }

    fn leaf(&self, id: String, members: &[usize]) -> ClusterNode {
        ClusterNode {
            id,
            kind: NodeKind::Leaf,
            medoid: None,
            members: self.names(members),
            outliers: Vec::new(),
            children: Vec::new(),
        }
    }

    fn diameter(&self, members: &[usize]) -> f64 {
        let mut d: f64 = 0.0;
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                d = d.max(self.matrix.get(i, j));
            }
        }
        d
    }

    /// Tight nodes are leaves, and so are small nodes without a pair
    /// farther apart than the midpoint of the two thresholds.
    fn is_leaf(&self, members: &[usize]) -> bool {
        let d = self.diameter(members);
        let p = self.params;
        d <= p.theta_split || (members.len() <= p.max_leaf && d < (p.theta_split + p.theta_out) / 2.0)
    }

    /// `members` is sorted by term.
    fn node(&mut self, id: String, members: Vec<usize>) -> ClusterNode {
        if members.len() <= 1 || self.is_leaf(&members) {
            return self.leaf(id, &members);
        }
        let mut side = self.split(&members);
        self.refine(&id, &members, &mut side);
        let groups: Vec<Vec<usize>> = (0..2)
            .map(|k| members.iter().zip(&side).filter(|(_, &s)| s == k).map(|(&m, _)| m).collect())
            .collect();
        let outliers = find_outliers(self.matrix, &groups, self.params.theta_out);
        let mut children = Vec::new();
        for group in groups {
            let kept: Vec<usize> = group.into_iter().filter(|i| !outliers.contains(i)).collect();
            if kept.is_empty() {
                continue;
            }
            let child_id = if id == "C" {
                format!("C{}", children.len() + 1)
            } else {
                format!("{id}.{}", children.len() + 1)
            };
            children.push(self.node(child_id, kept));
        }
        ClusterNode {
            id,
            kind: NodeKind::Internal,
            medoid: None,
            members: self.names(&members),
            outliers: self.names(&outliers),
            children,
        }
    }

    /// Seeds the farthest pair, then grows both sides by repeatedly taking
    /// the unassigned member closest to any assigned one.
    fn split(&self, members: &[usize]) -> Vec<usize> {
        let n = members.len();
        let m = self.matrix;
        let (mut sa, mut sb, mut far) = (0, 1, f64::NEG_INFINITY);
        for a in 0..n {
            for b in a + 1..n {
                let d = m.get(members[a], members[b]);
                if d > far {
                    (sa, sb, far) = (a, b, d);
                }
            }
        }
        const UNSET: usize = usize::MAX;
        let mut side = vec![UNSET; n];
        side[sa] = 0;
        side[sb] = 1;
        let mut near: Vec<(f64, usize)> = (0..n)
            .map(|u| {
                let da = m.get(members[u], members[sa]);
                let db = m.get(members[u], members[sb]);
                if db < da {
                    (db, 1)
                } else {
                    (da, 0)
                }
            })
            .collect();
        for _ in 2..n {
            let u = (0..n)
                .filter(|&u| side[u] == UNSET)
                .min_by(|&a, &b| near[a].0.total_cmp(&near[b].0).then(near[a].1.cmp(&near[b].1)).then(a.cmp(&b)))
                .expect("unassigned member remains");
            side[u] = near[u].1;
            for v in 0..n {
                if side[v] == UNSET {
                    let d = m.get(members[u], members[v]);
                    if d < near[v].0 || (d == near[v].0 && side[u] < near[v].1) {
                        near[v] = (d, side[u]);
                    }
                }
            }
        }
        side
    }

    /// Each visited member moves to the other side when that side is nearer
    /// on average and the move lowers the objective, the sum over members of
    /// mean distance to their own side.
    fn refine(&mut self, id: &str, members: &[usize], side: &mut [usize]) {
        let m = self.matrix;
        let n = members.len();
        let mut size = [0usize; 2];
        let mut sum = [0.0f64; 2];
        for a in 0..n {
            size[side[a]] += 1;
            for b in a + 1..n {
                if side[a] == side[b] {
                    sum[side[a]] += m.get(members[a], members[b]);
                }
            }
        }
        let objective = |size: &[usize; 2], sum: &[f64; 2]| -> f64 {
            (0..2)
                .filter(|&k| size[k] > 1)
                .map(|k| 2.0 * sum[k] / (size[k] - 1) as f64)
                .sum()
        };
        let mut history = vec![objective(&size, &sum)];
        let mut rng = ChaCha8Rng::seed_from_u64(node_seed(self.params.seed, id));
        let mut order: Vec<usize> = (0..n).collect();
        for _ in 0..self.params.passes {
            order.shuffle(&mut rng);
            let mut moved = false;
            for &a in &order {
                let own = side[a];
                let other = 1 - own;
                if size[own] == 1 {
                    continue;
                }
                let mut to = [0.0f64; 2];
                for b in 0..n {
                    if b != a {
                        to[side[b]] += m.get(members[a], members[b]);
                    }
                }
                let mean_own = to[own] / (size[own] - 1) as f64;
                let mean_other = to[other] / size[other] as f64;
                if mean_other >= mean_own {
                    continue;
                }
                let mut new_size = size;
                let mut new_sum = sum;
                new_size[own] -= 1;
                new_size[other] += 1;
                new_sum[own] -= to[own];
                new_sum[other] += to[other];
                if objective(&new_size, &new_sum) < objective(&size, &sum) - 1e-12 {
                    side[a] = other;
                    size = new_size;
                    sum = new_sum;
                    moved = true;
                }
            }
            history.push(objective(&size, &sum));
            if !moved {
                break;
            }
        }
        self.trace.objectives.insert(id.to_string(), history);
    }
}
