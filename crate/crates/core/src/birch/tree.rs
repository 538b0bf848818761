use std::collections::HashSet;
use std::fmt::Write as _;

use super::cf::{cf_from_point, ClusteringFeature};
use crate::error::{Error, Result};
use crate::linalg::{check_dims, squared_distance};
use crate::scalar::Scalar;

/// A leaf-level subcluster together with the ids of the items it absorbed.
#[derive(Clone, Debug, PartialEq)]
pub struct LeafEntry<T> {
    pub cf: ClusteringFeature<T>,
    pub members: Vec<usize>,
}

#[derive(Clone, Debug)]
enum NodeKind<T> {
    Leaf(Vec<LeafEntry<T>>),
    Internal(Vec<usize>),
}

#[derive(Clone, Debug)]
struct Node<T> {
    cf: ClusteringFeature<T>,
    kind: NodeKind<T>,
}

/// Height-balanced CF-tree with leaf radius threshold `T` and branching
/// factor `B` (bounding both internal fan-out and entries per leaf).
#[derive(Clone, Debug)]
pub struct CfTree<T> {
    nodes: Vec<Node<T>>,
    root: Option<usize>,
    threshold: T,
    branching: usize,
    dim: Option<usize>,
    ids: HashSet<usize>,
}

/// Summary of a successful structural audit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeAudit {
    pub height: usize,
    pub leaves: usize,
    pub entries: usize,
    pub items: usize,
}

impl<T: Scalar> CfTree<T> {
    pub fn new(threshold: T, branching: usize) -> Result<Self> {
        if threshold <= T::zero() || !threshold.is_finite() {
            return Err(Error::domain(format!(
                "birch threshold must be positive and finite, got {threshold}"
            )));
        }
        if branching < 2 {
            return Err(Error::domain(format!(
                "birch branching factor must be >= 2, got {branching}"
            )));
        }
        Ok(Self {
            nodes: Vec::new(),
            root: None,
            threshold,
            branching,
            dim: None,
            ids: HashSet::new(),
        })
    }

    pub fn threshold(&self) -> T {
        self.threshold
    }

    pub fn branching(&self) -> usize {
        self.branching
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Inserts item `id` at position `x`.
    pub fn insert(&mut self, x: &[T], id: usize) -> Result<()> {
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!(
                "non-finite coordinate {i} in item {id}"
            )));
        }
        match self.dim {
            Some(d) => check_dims(d, x.len())?,
            None if x.is_empty() => return Err(Error::domain("cannot insert a 0-dim point")),
            None => {}
        }
        if self.ids.contains(&id) {
            return Err(Error::domain(format!("item id {id} inserted twice")));
        }
        self.ids.insert(id);
        self.dim = Some(x.len());
        let point = cf_from_point(x);

        let Some(root) = self.root else {
            self.nodes.push(Node {
                cf: point.clone(),
                kind: NodeKind::Leaf(vec![LeafEntry {
                    cf: point,
                    members: vec![id],
                }]),
            });
            self.root = Some(self.nodes.len() - 1);
            return Ok(());
        };

        let mut path = vec![root];
        loop {
            let node = &self.nodes[*path.last().unwrap()];
            match &node.kind {
                NodeKind::Internal(children) => {
                    let next = nearest_by(children.iter().map(|&c| &self.nodes[c].cf), x);
                    path.push(children[next]);
                }
                NodeKind::Leaf(_) => break,
            }
        }

        for &n in &path {
            self.nodes[n].cf.absorb(&point);
        }
        let leaf = *path.last().unwrap();
        let threshold = self.threshold;
        let NodeKind::Leaf(entries) = &mut self.nodes[leaf].kind else {
            unreachable!("descent ends at a leaf")
        };
        let nearest = nearest_by(entries.iter().map(|e| &e.cf), x);
        if entries[nearest].cf.merged_radius(&point) <= threshold {
            entries[nearest].cf.absorb(&point);
            entries[nearest].members.push(id);
        } else {
            entries.push(LeafEntry {
                cf: point,
                members: vec![id],
            });
        }

        self.split_upward(&path);
        Ok(())
    }

    fn split_upward(&mut self, path: &[usize]) {
        let mut level = path.len() - 1;
        loop {
            let node = path[level];
            if self.fanout(node) <= self.branching {
                return;
            }
            let sibling = self.split_node(node);
            if level == 0 {
                let mut cf = self.nodes[node].cf.clone();
                cf.absorb(&self.nodes[sibling].cf);
                self.nodes.push(Node {
                    cf,
                    kind: NodeKind::Internal(vec![node, sibling]),
                });
                self.root = Some(self.nodes.len() - 1);
                return;
            }
            level -= 1;
            let parent = path[level];
            let NodeKind::Internal(children) = &mut self.nodes[parent].kind else {
                unreachable!("parent of a node is internal")
            };
            let pos = children
                .iter()
                .position(|&c| c == node)
                .expect("child listed");
            children.insert(pos + 1, sibling);
        }
    }

    fn fanout(&self, node: usize) -> usize {
        match &self.nodes[node].kind {
            NodeKind::Leaf(e) => e.len(),
            NodeKind::Internal(c) => c.len(),
        }
    }

    /// Splits `node` in place by farthest-pair seeding and returns the new
    /// right sibling.
    fn split_node(&mut self, node: usize) -> usize {
        let kind = std::mem::replace(&mut self.nodes[node].kind, NodeKind::Internal(Vec::new()));
        let (left_kind, right_kind) = match kind {
            NodeKind::Leaf(entries) => {
                let centroids: Vec<Vec<T>> = entries.iter().map(|e| e.cf.centroid()).collect();
                let go_right = partition_by_farthest_pair(&centroids);
                let (mut l, mut r) = (Vec::new(), Vec::new());
                for (e, right) in entries.into_iter().zip(go_right) {
                    if right {
                        r.push(e)
                    } else {
                        l.push(e)
                    }
                }
                (NodeKind::Leaf(l), NodeKind::Leaf(r))
            }
            NodeKind::Internal(children) => {
                let centroids: Vec<Vec<T>> = children
                    .iter()
                    .map(|&c| self.nodes[c].cf.centroid())
                    .collect();
                let go_right = partition_by_farthest_pair(&centroids);
                let (mut l, mut r) = (Vec::new(), Vec::new());
                for (c, right) in children.into_iter().zip(go_right) {
                    if right {
                        r.push(c)
                    } else {
                        l.push(c)
                    }
                }
                (NodeKind::Internal(l), NodeKind::Internal(r))
            }
        };
        let left_cf = self.sum_cf(&left_kind);
        let right_cf = self.sum_cf(&right_kind);
        self.nodes[node] = Node {
            cf: left_cf,
            kind: left_kind,
        };
        self.nodes.push(Node {
            cf: right_cf,
            kind: right_kind,
        });
        self.nodes.len() - 1
    }

    fn sum_cf(&self, kind: &NodeKind<T>) -> ClusteringFeature<T> {
        let mut it: Box<dyn Iterator<Item = &ClusteringFeature<T>>> = match kind {
            NodeKind::Leaf(e) => Box::new(e.iter().map(|e| &e.cf)),
            NodeKind::Internal(c) => Box::new(c.iter().map(|&c| &self.nodes[c].cf)),
        };
        let mut acc = it.next().expect("split halves are non-empty").clone();
        for cf in it {
            acc.absorb(cf);
        }
        acc
    }

    /// All leaf entries, left to right.
    pub fn leaf_entries(&self) -> Vec<LeafEntry<T>> {
        let mut out = Vec::new();
        if let Some(root) = self.root {
            self.collect_entries(root, &mut out);
        }
        out
    }

    fn collect_entries(&self, node: usize, out: &mut Vec<LeafEntry<T>>) {
        match &self.nodes[node].kind {
            NodeKind::Leaf(e) => out.extend(e.iter().cloned()),
            NodeKind::Internal(c) => c.iter().for_each(|&c| self.collect_entries(c, out)),
        }
    }

    /// Checks every structural invariant of the tree: fan-out bounds, leaf
    /// radius `<= T`, parent CF equal to the sum of its children (`rel_tol`
    /// relative), uniform leaf depth, and each inserted id appearing exactly once.
    pub fn audit(&self, rel_tol: f64) -> std::result::Result<TreeAudit, String> {
        let Some(root) = self.root else {
            return Ok(TreeAudit {
                height: 0,
                leaves: 0,
                entries: 0,
                items: 0,
            });
        };
        let mut state = AuditState {
            leaf_depth: None,
            leaves: 0,
            entries: 0,
            seen: HashSet::new(),
        };
        self.audit_node(root, 1, rel_tol, &mut state)?;
        if state.seen != self.ids {
            return Err(format!(
                "membership mismatch: {} ids in leaves, {} inserted",
                state.seen.len(),
                self.ids.len()
            ));
        }
        Ok(TreeAudit {
            height: state.leaf_depth.unwrap_or(0),
            leaves: state.leaves,
            entries: state.entries,
            items: state.seen.len(),
        })
    }

    fn audit_node(
        &self,
        node: usize,
        depth: usize,
        rel_tol: f64,
        st: &mut AuditState,
    ) -> std::result::Result<(), String> {
        let n = &self.nodes[node];
        let slack = T::lit(1e-9);
        match &n.kind {
            NodeKind::Leaf(entries) => {
                if entries.is_empty() || entries.len() > self.branching {
                    return Err(format!("leaf {node} holds {} entries", entries.len()));
                }
                match st.leaf_depth {
                    None => st.leaf_depth = Some(depth),
                    Some(d) if d != depth => {
                        return Err(format!("leaf {node} at depth {depth}, expected {d}"))
                    }
                    _ => {}
                }
                st.leaves += 1;
                st.entries += entries.len();
                for e in entries {
                    if e.cf.n != e.members.len() {
                        return Err(format!(
                            "entry count {} != members {}",
                            e.cf.n,
                            e.members.len()
                        ));
                    }
                    if e.cf.radius() > self.threshold + slack {
                        return Err(format!(
                            "entry radius {} exceeds threshold {}",
                            e.cf.radius(),
                            self.threshold
                        ));
                    }
                    for &m in &e.members {
                        if !st.seen.insert(m) {
                            return Err(format!("id {m} appears twice"));
                        }
                    }
                }
                cf_close(&n.cf, entries.iter().map(|e| &e.cf), rel_tol)
                    .map_err(|e| format!("leaf {node}: {e}"))
            }
            NodeKind::Internal(children) => {
                if children.is_empty() || children.len() > self.branching {
                    return Err(format!("internal {node} has {} children", children.len()));
                }
                for &c in children {
                    self.audit_node(c, depth + 1, rel_tol, st)?;
                }
                cf_close(&n.cf, children.iter().map(|&c| &self.nodes[c].cf), rel_tol)
                    .map_err(|e| format!("internal {node}: {e}"))
            }
        }
    }

    /// Indented text rendering, one line per node or entry.
    pub fn render(&self) -> String {
        let mut out = String::new();
        match self.root {
            None => out.push_str("(empty)\n"),
            Some(r) => self.render_node(r, 0, &mut out),
        }
        out
    }

    fn render_node(&self, node: usize, indent: usize, out: &mut String) {
        let n = &self.nodes[node];
        let pad = "  ".repeat(indent);
        let label = match n.kind {
            NodeKind::Leaf(_) => "leaf",
            NodeKind::Internal(_) => "node",
        };
        let _ = writeln!(
            out,
            "{pad}{label} n={} c={}",
            n.cf.n,
            fmt_vec(&n.cf.centroid())
        );
        match &n.kind {
            NodeKind::Leaf(entries) => {
                for e in entries {
                    let _ = writeln!(
                        out,
                        "{pad}  entry n={} r={:.4} c={} members={:?}",
                        e.cf.n,
                        e.cf.radius().as_f64(),
                        fmt_vec(&e.cf.centroid()),
                        e.members
                    );
                }
            }
            NodeKind::Internal(children) => {
                for &c in children {
                    self.render_node(c, indent + 1, out);
                }
            }
        }
    }
}

struct AuditState {
    leaf_depth: Option<usize>,
    leaves: usize,
    entries: usize,
    seen: HashSet<usize>,
}

fn fmt_vec<T: Scalar>(v: &[T]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{:.4}", x.as_f64())).collect();
    format!("[{}]", parts.join(", "))
}

fn cf_close<'a, T: Scalar>(
    parent: &ClusteringFeature<T>,
    mut children: impl Iterator<Item = &'a ClusteringFeature<T>>,
    rel_tol: f64,
) -> std::result::Result<(), String> {
    let mut sum = children.next().ok_or("no children")?.clone();
    for c in children {
        sum.absorb(c);
    }
    if sum.n != parent.n {
        return Err(format!("count {} != sum of children {}", parent.n, sum.n));
    }
    let close = |a: T, b: T| {
        let (a, b) = (a.as_f64(), b.as_f64());
        (a - b).abs() <= rel_tol * a.abs().max(b.abs()).max(1.0)
    };
    if !close(parent.ss, sum.ss) || !parent.ls.iter().zip(&sum.ls).all(|(&a, &b)| close(a, b)) {
        return Err("CF differs from sum of children".into());
    }
    Ok(())
}

/// Index of the CF whose centroid is nearest `x`; ties go to the lowest index.
fn nearest_by<'a, T: Scalar>(
    cfs: impl Iterator<Item = &'a ClusteringFeature<T>>,
    x: &[T],
) -> usize {
    let mut best = 0;
    let mut best_d = T::infinity();
    for (i, cf) in cfs.enumerate() {
        let d = squared_distance(&cf.centroid(), x);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// Seeds two groups with the farthest pair of centroids (first maximal pair
/// in `(i, j)` order) and sends every other item to the nearer seed, ties to
/// the first. Returns `true` for items in the second group.
fn partition_by_farthest_pair<T: Scalar>(centroids: &[Vec<T>]) -> Vec<bool> {
    let n = centroids.len();
    let (mut si, mut sj, mut best) = (0, 1, T::neg_infinity());
    for i in 0..n {
        for j in (i + 1)..n {
            let d = squared_distance(&centroids[i], &centroids[j]);
            if d > best {
                (si, sj, best) = (i, j, d);
            }
        }
    }
    (0..n)
        .map(|k| {
            if k == si {
                false
            } else if k == sj {
                true
            } else {
                squared_distance(&centroids[k], &centroids[sj])
                    < squared_distance(&centroids[k], &centroids[si])
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructor_validation() {
        assert!(CfTree::<f64>::new(0.0, 50).is_err());
        assert!(CfTree::<f64>::new(f64::NAN, 50).is_err());
        assert!(CfTree::<f64>::new(1.0, 1).is_err());
    }

    #[test]
    fn empty_tree() {
        let t = CfTree::<f64>::new(1.0, 3).unwrap();
        assert!(t.leaf_entries().is_empty());
        assert_eq!(t.audit(1e-9).unwrap().items, 0);
        assert_eq!(t.render(), "(empty)\n");
    }

    #[test]
    fn first_insert() {
        let mut t = CfTree::new(1.0, 3).unwrap();
        t.insert(&[1.0, 2.0], 7).unwrap();
        let e = t.leaf_entries();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].members, vec![7]);
    }

    #[test]
    fn close_pair_merges() {
        // Pair at distance 2 has merged radius 1 <= T.
        let mut t = CfTree::new(1.0, 3).unwrap();
        t.insert(&[0.0, 0.0], 0).unwrap();
        t.insert(&[2.0, 0.0], 1).unwrap();
        let e = t.leaf_entries();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].cf.n, 2);
        // Slightly farther apart: radius 1.0005 > T.
        let mut t = CfTree::new(1.0, 3).unwrap();
        t.insert(&[0.0, 0.0], 0).unwrap();
        t.insert(&[2.001, 0.0], 1).unwrap();
        assert_eq!(t.leaf_entries().len(), 2);
    }

    #[test]
    fn three_distant_points_split_with_b2() {
        let mut t = CfTree::new(0.1, 2).unwrap();
        t.insert(&[0.0, 0.0], 0).unwrap();
        t.insert(&[10.0, 0.0], 1).unwrap();
        t.insert(&[0.0, 10.0], 2).unwrap();
        let audit = t.audit(1e-12).unwrap();
        assert_eq!(audit.leaves, 2);
        assert_eq!(audit.height, 2);
        // Farthest pair is (1, 2); item 0 ties and joins the first seed.
        let members: Vec<Vec<usize>> = t.leaf_entries().into_iter().map(|e| e.members).collect();
        assert_eq!(members, vec![vec![0], vec![1], vec![2]]);
        let rendered = t.render();
        assert!(rendered.starts_with("node n=3"));
        assert_eq!(rendered.lines().count(), 6);
    }

    #[test]
    fn duplicate_id_and_bad_point_rejected() {
        let mut t = CfTree::new(1.0, 3).unwrap();
        t.insert(&[0.0], 1).unwrap();
        assert!(t.insert(&[1.0], 1).is_err());
        assert!(t.insert(&[f64::NAN], 2).is_err());
        assert!(t.insert(&[1.0, 2.0], 3).is_err());
    }

    #[test]
    fn deep_tree_stays_balanced() {
        let mut s = crate::rng::derive_stream(21, 0);
        let mut t = CfTree::new(0.05, 3).unwrap();
        for id in 0..300 {
            t.insert(&[s.normal() * 5.0, s.normal() * 5.0], id).unwrap();
        }
        let a = t.audit(1e-9).unwrap();
        assert!(a.height >= 4);
        assert_eq!(a.items, 300);
    }
}
