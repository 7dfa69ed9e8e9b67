//! Simple-path enumeration between two DAG nodes.

use super::{AttackDag, GraphError, NodeKey, DEFAULT_PATH_BUDGET};
use std::collections::BTreeSet;

impl AttackDag {
    /// All simple directed paths `from -> ... -> to` with at most `max_len`
    /// edges, in lexicographic node-key-sequence order. Capped at
    /// [`DEFAULT_PATH_BUDGET`] node expansions.
    pub fn enumerate_paths(
        &self,
        from: &NodeKey,
        to: &NodeKey,
        max_len: usize,
    ) -> Result<Vec<Vec<NodeKey>>, GraphError> {
        self.enumerate_paths_with_budget(from, to, max_len, DEFAULT_PATH_BUDGET)
    }

    /// As [`enumerate_paths`](Self::enumerate_paths) with an explicit cap on
    /// node expansions.
    pub fn enumerate_paths_with_budget(
        &self,
        from: &NodeKey,
        to: &NodeKey,
        max_len: usize,
        budget: usize,
    ) -> Result<Vec<Vec<NodeKey>>, GraphError> {
        for key in [from, to] {
            if !self.contains_node(key) {
                return Err(GraphError::UnknownNode(key.clone()));
            }
        }
        // The only simple path from a node to itself is the zero-length one.
        if from == to {
            return Ok(vec![vec![from.clone()]]);
        }
        let mut out = Vec::new();
        let mut path = vec![from.clone()];
        let mut on_path = BTreeSet::from([from.clone()]);
        let mut used = 0usize;
        self.path_dfs(from, to, max_len, budget, &mut used, &mut path, &mut on_path, &mut out)?;
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn path_dfs(
        &self,
        current: &NodeKey,
        to: &NodeKey,
        max_len: usize,
        budget: usize,
        used: &mut usize,
        path: &mut Vec<NodeKey>,
        on_path: &mut BTreeSet<NodeKey>,
        out: &mut Vec<Vec<NodeKey>>,
    ) -> Result<(), GraphError> {
        if path.len() > max_len {
            return Ok(());
        }
        // Successors come back key-sorted, so paths are emitted in
        // lexicographic order without a final sort.
        for succ in self.successors(current) {
            *used += 1;
            if *used > budget {
                return Err(GraphError::PathBudgetExceeded { budget });
            }
            if succ == to {
                let mut found = path.clone();
                found.push(to.clone());
                out.push(found);
                continue;
            }
            if on_path.contains(succ) {
                continue;
            }
            path.push(succ.clone());
            on_path.insert(succ.clone());
            self.path_dfs(succ, to, max_len, budget, used, path, on_path, out)?;
            on_path.remove(succ);
            path.pop();
        }
        Ok(())
    }
}
