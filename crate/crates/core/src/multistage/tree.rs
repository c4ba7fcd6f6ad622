//! The tree of observable histories rooted at the initial state.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::game::{MultiStageGame, Player};

/// Largest tree built before giving up.
pub const MAX_HISTORY_NODES: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryNode {
    pub stage: usize,
    pub state: usize,
    pub parent: Option<usize>,
    /// Action pair played at the parent to reach this node.
    pub action: Option<(usize, usize)>,
    /// Children are contiguous, ordered by `(a1, a2)` with `a2` fastest.
    pub first_child: Option<usize>,
}

/// Every history `hᵏ` of a game, stored breadth first so each stage is a
/// contiguous block of node indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryTree {
    nodes: Vec<HistoryNode>,
    stage_ranges: Vec<Range<usize>>,
}

impl HistoryTree {
    pub fn build(g: &MultiStageGame) -> Result<Self> {
        let mut expected: usize = 1;
        let mut total: usize = 1;
        for stage in &g.stages()[..g.horizon()] {
            expected = expected
                .saturating_mul(stage.num_actions(Player::Defender) * stage.num_actions(Player::User));
            total = total.saturating_add(expected);
        }
        if total > MAX_HISTORY_NODES {
            return Err(GameError::TooLarge(format!(
                "history tree would have {total} nodes, limit is {MAX_HISTORY_NODES}"
            )));
        }

        let mut nodes = vec![HistoryNode {
            stage: 0,
            state: g.initial_state(),
            parent: None,
            action: None,
            first_child: None,
        }];
        let mut stage_ranges = vec![0..1];
        for k in 0..g.horizon() {
            let stage = g.stage(k);
            let (n1, n2) = (stage.num_actions(Player::Defender), stage.num_actions(Player::User));
            let start = nodes.len();
            for h in stage_ranges[k].clone() {
                nodes[h].first_child = Some(nodes.len());
                let x = nodes[h].state;
                for a1 in 0..n1 {
                    for a2 in 0..n2 {
                        let next = stage.transition(x, a1, a2)?;
                        nodes.push(HistoryNode {
                            stage: k + 1,
                            state: next,
                            parent: Some(h),
                            action: Some((a1, a2)),
                            first_child: None,
                        });
                    }
                }
            }
            stage_ranges.push(start..nodes.len());
        }
        Ok(HistoryTree {
            nodes,
            stage_ranges,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: usize) -> &HistoryNode {
        &self.nodes[i]
    }

    pub fn nodes(&self) -> &[HistoryNode] {
        &self.nodes
    }

    /// Node indices of stage `k`.
    pub fn stage_nodes(&self, k: usize) -> Range<usize> {
        self.stage_ranges[k].clone()
    }

    /// Child reached from `node` by `(a1, a2)`, given the stage's user action count.
    pub fn child(&self, node: usize, a1: usize, a2: usize, num_user_actions: usize) -> Option<usize> {
        self.nodes[node]
            .first_child
            .map(|c| c + a1 * num_user_actions + a2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{StageGame, TypeSpace};

    #[test]
    fn sizes_and_states() {
        let s0 = StageGame::new(["s"], ["A", "B"], ["a", "b"], 1, 1).with_transition(|_, a1, a2| a1 + a2);
        let s1 = StageGame::new(["0", "1", "2"], ["A"], ["a", "b"], 1, 1).with_transition(|x, _, _| x);
        let s2 = StageGame::new(["0", "1", "2"], ["A"], ["a"], 1, 1);
        let g = MultiStageGame::new(
            TypeSpace::singleton(),
            TypeSpace::singleton(),
            vec![1.0],
            vec![1.0],
            vec![s0, s1, s2],
            0,
        )
        .unwrap();
        let t = HistoryTree::build(&g).unwrap();
        assert_eq!(t.len(), 1 + 4 + 8);
        assert_eq!(t.stage_nodes(1), 1..5);
        let c = t.child(0, 1, 1, 2).unwrap();
        assert_eq!(t.node(c).state, 2);
        assert_eq!(t.node(c).action, Some((1, 1)));
        assert_eq!(t.node(c).parent, Some(0));
    }
}
