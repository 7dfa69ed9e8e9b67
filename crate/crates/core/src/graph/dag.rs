//! The merged attack DAG: deduplicated union of many attack CFGs with
//! per-edge provenance.

use std::collections::{BTreeMap, BTreeSet};

use super::{AttackCfg, GraphError, NodeKey, StepNode};

/// Provenance tag carried by edges added from classifier predictions rather
/// than from a corpus attack.
pub const PREDICTED_PROVENANCE: &str = "predicted";

/// Union of attack CFGs. Nodes are deduplicated by [`NodeKey`]; every edge
/// records the set of attack ids that contributed it. Acyclic by
/// construction everywhere except [`AttackDag::from_raw_parts`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AttackDag {
    nodes: BTreeMap<NodeKey, StepNode>,
    edges: BTreeMap<(NodeKey, NodeKey), BTreeSet<String>>,
    origin: Vec<String>,
}

/// Merges attack CFGs into one DAG.
///
/// Nodes that share a key must carry identical feature vectors; the retained
/// representative (for id/description) is the one from the smallest
/// `(attack_id, node_id)` pair, which makes the result independent of input
/// order. Edge provenance is the set of contributing attack ids.
pub fn merge_cfgs(cfgs: &[AttackCfg]) -> Result<AttackDag, GraphError> {
    let mut sorted: Vec<&AttackCfg> = cfgs.iter().collect();
    sorted.sort();

    let mut nodes: BTreeMap<NodeKey, StepNode> = BTreeMap::new();
    let mut source: BTreeMap<NodeKey, (String, String)> = BTreeMap::new();
    let mut edges: BTreeMap<(NodeKey, NodeKey), BTreeSet<String>> = BTreeMap::new();
    let mut origin: BTreeSet<String> = BTreeSet::new();

    for cfg in &sorted {
        origin.insert(cfg.attack_id.clone());
        for node in cfg.nodes() {
            let key = node.key();
            match nodes.get(&key) {
                None => {
                    nodes.insert(key.clone(), node.clone());
                    source.insert(key, (cfg.attack_id.clone(), node.id.clone()));
                }
                Some(existing) => {
                    if existing.features != node.features {
                        let (first, _) = &source[&key];
                        return Err(GraphError::DuplicateNodeConflict {
                            key,
                            first: first.clone(),
                            second: cfg.attack_id.clone(),
                        });
                    }
                    let candidate = (cfg.attack_id.clone(), node.id.clone());
                    if candidate < source[&key] {
                        nodes.insert(key.clone(), node.clone());
                        source.insert(key, candidate);
                    }
                }
            }
        }
        for (src_id, dst_id) in cfg.edges() {
            let src = cfg.node(src_id).expect("validated endpoint").key();
            let dst = cfg.node(dst_id).expect("validated endpoint").key();
            edges.entry((src, dst)).or_default().insert(cfg.attack_id.clone());
        }
    }

    let dag = AttackDag {
        nodes,
        edges,
        origin: origin.into_iter().collect(),
    };
    if let Some(cycle) = dag.first_cycle() {
        return Err(GraphError::CycleIntroduced(cycle));
    }
    Ok(dag)
}

impl AttackDag {
    pub fn empty() -> Self {
        AttackDag::default()
    }

    /// Assembles a DAG without any validation. Intended for diagnostics and
    /// tests that need to inspect deliberately broken graphs; everything else
    /// should go through [`merge_cfgs`].
    pub fn from_raw_parts(
        nodes: BTreeMap<NodeKey, StepNode>,
        edges: BTreeMap<(NodeKey, NodeKey), BTreeSet<String>>,
        origin: Vec<String>,
    ) -> Self {
        AttackDag { nodes, edges, origin }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (&NodeKey, &StepNode)> {
        self.nodes.iter()
    }

    pub fn node(&self, key: &NodeKey) -> Option<&StepNode> {
        self.nodes.get(key)
    }

    pub fn edges(&self) -> impl Iterator<Item = (&(NodeKey, NodeKey), &BTreeSet<String>)> {
        self.edges.iter()
    }

    pub fn contains_node(&self, key: &NodeKey) -> bool {
        self.nodes.contains_key(key)
    }

    pub fn contains_edge(&self, from: &NodeKey, to: &NodeKey) -> bool {
        self.edges.contains_key(&(from.clone(), to.clone()))
    }

    /// Contributing attack ids, sorted.
    pub fn origin(&self) -> &[String] {
        &self.origin
    }

    pub fn successors(&self, key: &NodeKey) -> Vec<&NodeKey> {
        self.edges
            .range((key.clone(), min_key())..)
            .take_while(|((src, _), _)| src == key)
            .map(|((_, dst), _)| dst)
            .collect()
    }

    /// Returns `Ok(())` when acyclic, otherwise every elementary cycle, each
    /// anchored at (and starting from) its smallest node key, in sorted
    /// order. Exhaustive enumeration: intended for corpus-sized graphs.
    pub fn validate_acyclic(&self) -> Result<(), Vec<Vec<NodeKey>>> {
        let mut cycles = Vec::new();
        for start in self.nodes.keys() {
            let mut path = vec![start.clone()];
            let mut on_path: BTreeSet<&NodeKey> = BTreeSet::new();
            on_path.insert(start);
            self.cycle_dfs(start, start, &mut path, &mut on_path, &mut cycles);
        }
        if cycles.is_empty() {
            Ok(())
        } else {
            Err(cycles)
        }
    }

    fn cycle_dfs<'a>(
        &'a self,
        start: &'a NodeKey,
        current: &'a NodeKey,
        path: &mut Vec<NodeKey>,
        on_path: &mut BTreeSet<&'a NodeKey>,
        cycles: &mut Vec<Vec<NodeKey>>,
    ) {
        for succ in self.successors(current) {
            if succ == start {
                cycles.push(path.clone());
            } else if succ > start && !on_path.contains(succ) {
                path.push(succ.clone());
                on_path.insert(succ);
                self.cycle_dfs(start, succ, path, on_path, cycles);
                on_path.remove(succ);
                path.pop();
            }
        }
    }

    /// First cycle found by an iterative three-color DFS, or `None` when the
    /// graph is acyclic. Cheaper than full enumeration; used by merge.
    pub(super) fn first_cycle(&self) -> Option<Vec<NodeKey>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Color {
            White,
            Gray,
            Black,
        }
        let mut color: BTreeMap<&NodeKey, Color> =
            self.nodes.keys().map(|k| (k, Color::White)).collect();
        let mut stack: Vec<&NodeKey> = Vec::new();

        for root in self.nodes.keys() {
            if color[root] != Color::White {
                continue;
            }
            // (node, next-successor index) frames
            let mut frames: Vec<(&NodeKey, usize)> = vec![(root, 0)];
            color.insert(root, Color::Gray);
            stack.push(root);
            while let Some((node, idx)) = frames.last_mut() {
                let succs = self.successors(node);
                if *idx >= succs.len() {
                    color.insert(node, Color::Black);
                    stack.pop();
                    frames.pop();
                    continue;
                }
                let succ = succs[*idx];
                *idx += 1;
                match color[succ] {
                    Color::Gray => {
                        let pos = stack.iter().position(|k| *k == succ).expect("on stack");
                        return Some(stack[pos..].iter().map(|k| (*k).clone()).collect());
                    }
                    Color::White => {
                        color.insert(succ, Color::Gray);
                        stack.push(succ);
                        frames.push((succ, 0));
                    }
                    Color::Black => {}
                }
            }
        }
        None
    }

    /// Deterministic topological order: Kahn's algorithm, always popping the
    /// smallest ready key. On a cyclic graph the order is partial (shorter
    /// than the node count).
    pub fn topo_order(&self) -> Vec<NodeKey> {
        let mut indegree: BTreeMap<&NodeKey, usize> =
            self.nodes.keys().map(|k| (k, 0)).collect();
        for (_, dst) in self.edges.keys() {
            if let Some(d) = indegree.get_mut(dst) {
                *d += 1;
            }
        }
        let mut ready: BTreeSet<&NodeKey> = indegree
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&k, _)| k)
            .collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(&key) = ready.iter().next() {
            ready.remove(key);
            order.push(key.clone());
            for succ in self.successors(key) {
                let d = indegree.get_mut(succ).expect("known node");
                *d -= 1;
                if *d == 0 {
                    ready.insert(succ);
                }
            }
        }
        order
    }

    /// Returns a new DAG with the candidate edge added under the
    /// "predicted" provenance tag. Rejects unknown endpoints, existing
    /// edges, and edges that would close a cycle.
    pub fn apply_predicted_edge(&self, from: &NodeKey, to: &NodeKey) -> Result<AttackDag, GraphError> {
        for key in [from, to] {
            if !self.contains_node(key) {
                return Err(GraphError::UnknownNode(key.clone()));
            }
        }
        if self.contains_edge(from, to) {
            return Err(GraphError::EdgeExists { from: from.clone(), to: to.clone() });
        }
        if from == to || self.reaches(to, from) {
            return Err(GraphError::WouldCreateCycle { from: from.clone(), to: to.clone() });
        }
        let mut next = self.clone();
        next.edges.insert(
            (from.clone(), to.clone()),
            BTreeSet::from([PREDICTED_PROVENANCE.to_string()]),
        );
        Ok(next)
    }

    /// Directed reachability `from -> ... -> to`.
    fn reaches(&self, from: &NodeKey, to: &NodeKey) -> bool {
        if from == to {
            return true;
        }
        let mut seen: BTreeSet<&NodeKey> = BTreeSet::new();
        let mut stack = vec![from];
        while let Some(node) = stack.pop() {
            for succ in self.successors(node) {
                if succ == to {
                    return true;
                }
                if seen.insert(succ) {
                    stack.push(succ);
                }
            }
        }
        false
    }
}

fn min_key() -> NodeKey {
    NodeKey { label: String::new(), layer: super::Layer::Application }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::BitVector;
    use crate::graph::{Layer, StepNode};

    fn node(id: &str, label: &str) -> StepNode {
        StepNode::new(id, label, Layer::Network, "", BitVector::zeros(4)).unwrap()
    }

    fn chain(attack_id: &str, labels: &[&str]) -> AttackCfg {
        let nodes: Vec<StepNode> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| node(&format!("n{i}"), l))
            .collect();
        let edges = (1..labels.len())
            .map(|i| (format!("n{}", i - 1), format!("n{i}")))
            .collect();
        AttackCfg::new(attack_id, attack_id, "DoS", None, nodes, edges).unwrap()
    }

    fn key(label: &str) -> NodeKey {
        NodeKey::new(label, Layer::Network)
    }

    #[test]
    fn merge_of_nothing_is_empty() {
        let dag = merge_cfgs(&[]).unwrap();
        assert_eq!(dag.node_count(), 0);
        assert_eq!(dag.edge_count(), 0);
    }

    #[test]
    fn merge_two_chains_sharing_one_key() {
        let a = chain("a", &["one", "two", "shared"]);
        let b = chain("b", &["shared", "four", "five"]);
        let dag = merge_cfgs(&[a, b]).unwrap();
        assert_eq!(dag.node_count(), 5);
        assert_eq!(dag.edge_count(), 4);
        let rev = merge_cfgs(&[chain("b", &["shared", "four", "five"]), chain("a", &["one", "two", "shared"])])
            .unwrap();
        assert_eq!(dag, rev);
    }

    #[test]
    fn merge_records_provenance_per_edge() {
        let a = chain("a", &["x", "y"]);
        let b = chain("b", &["x", "y"]);
        let dag = merge_cfgs(&[a, b]).unwrap();
        assert_eq!(dag.node_count(), 2);
        assert_eq!(dag.edge_count(), 1);
        let prov = dag.edges().next().unwrap().1;
        assert_eq!(prov.iter().cloned().collect::<Vec<_>>(), ["a", "b"]);
    }

    #[test]
    fn merge_rejects_feature_conflicts() {
        let a = chain("a", &["x", "y"]);
        let mut n = node("n0", "x");
        n.features = BitVector::parse("1111").unwrap();
        let b = AttackCfg::new("b", "b", "DoS", None, vec![n], vec![]).unwrap();
        let err = merge_cfgs(&[a, b]).unwrap_err();
        assert!(matches!(err, GraphError::DuplicateNodeConflict { first, second, .. }
            if first == "a" && second == "b"));
    }

    #[test]
    fn merge_rejects_cyclic_union() {
        let a = chain("a", &["x", "y"]);
        let b = chain("b", &["y", "x"]);
        let err = merge_cfgs(&[a, b]).unwrap_err();
        match err {
            GraphError::CycleIntroduced(cycle) => assert_eq!(cycle.len(), 2),
            other => panic!("expected cycle error, got {other:?}"),
        }
    }

    #[test]
    fn validate_acyclic_reports_forced_cycle() {
        let a = node("a", "a");
        let b = node("b", "b");
        let nodes = BTreeMap::from([(a.key(), a.clone()), (b.key(), b.clone())]);
        let edges = BTreeMap::from([
            ((a.key(), b.key()), BTreeSet::from(["x".to_string()])),
            ((b.key(), a.key()), BTreeSet::from(["x".to_string()])),
        ]);
        let dag = AttackDag::from_raw_parts(nodes, edges, vec!["x".to_string()]);
        let cycles = dag.validate_acyclic().unwrap_err();
        assert_eq!(cycles, vec![vec![key("a"), key("b")]]);
    }

    #[test]
    fn validate_acyclic_ok_on_empty() {
        assert!(AttackDag::empty().validate_acyclic().is_ok());
    }

    #[test]
    fn predicted_edge_rules() {
        let dag = merge_cfgs(&[chain("a", &["a", "b", "c"])]).unwrap();
        // skip edge a->c is fine and tagged
        let with = dag.apply_predicted_edge(&key("a"), &key("c")).unwrap();
        let prov = with.edges().find(|((s, d), _)| s == &key("a") && d == &key("c")).unwrap().1;
        assert_eq!(prov.iter().cloned().collect::<Vec<_>>(), [PREDICTED_PROVENANCE]);
        // back edge closes a cycle
        assert!(matches!(
            dag.apply_predicted_edge(&key("b"), &key("a")),
            Err(GraphError::WouldCreateCycle { .. })
        ));
        assert!(matches!(
            dag.apply_predicted_edge(&key("a"), &key("b")),
            Err(GraphError::EdgeExists { .. })
        ));
        assert!(matches!(
            dag.apply_predicted_edge(&key("a"), &key("zz")),
            Err(GraphError::UnknownNode(_))
        ));
    }

    #[test]
    fn topo_order_is_lexicographic_kahn() {
        let dag = merge_cfgs(&[chain("a", &["m", "z"]), chain("b", &["a", "z"])]).unwrap();
        let order: Vec<String> = dag.topo_order().into_iter().map(|k| k.label).collect();
        assert_eq!(order, ["a", "m", "z"]);
    }
}
