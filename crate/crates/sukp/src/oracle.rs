//! Exact solvers for small instances, used as ground truth by tests and the
//! acceptance suite, plus a solution verifier.

use crate::eval::{is_feasible_items, total_profit_items, ItemSolution};
use crate::instance::SukpInstance;
use thiserror::Error;

/// Result of an exact solve.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult {
    pub optimum: f64,
    /// Lexicographically smallest optimal loading vector.
    pub witness: ItemSolution,
    /// Subsets examined (enumeration) or nodes visited (branch-and-bound).
    pub explored: u64,
}

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("instance has {items} items, exact method limited to {limit}")]
    TooLarge { items: usize, limit: usize },
}

const BRUTEFORCE_LIMIT: usize = 24;
const BRANCH_BOUND_LIMIT: usize = 40;

/// Enumerates all item subsets and returns the maximum-profit feasible one.
///
/// Ties are broken toward the lexicographically smallest loading vector so
/// that witnesses are reproducible.
pub fn exact_bruteforce(inst: &SukpInstance) -> Result<ExactResult, OracleError> {
    let m = inst.item_count();
    if m > BRUTEFORCE_LIMIT {
        return Err(OracleError::TooLarge {
            items: m,
            limit: BRUTEFORCE_LIMIT,
        });
    }
    let n = inst.element_count();
    let blocks = n.div_ceil(64);
    let item_masks: Vec<Vec<u64>> = (0..m)
        .map(|i| {
            let mut mask = vec![0u64; blocks];
            for &j in inst.item_elements(i) {
                mask[j / 64] |= 1 << (j % 64);
            }
            mask
        })
        .collect();

    let mut best_profit = 0.0;
    let mut best_bits = vec![false; m];
    let mut union = vec![0u64; blocks];
    for subset in 0u64..1 << m {
        union.fill(0);
        let mut profit = 0.0;
        for (i, mask) in item_masks.iter().enumerate() {
            if subset >> i & 1 == 1 {
                profit += inst.profit(i);
                for (w, &im) in union.iter_mut().zip(mask) {
                    *w |= im;
                }
            }
        }
        let mut weight = 0.0;
        for (b, word) in union.iter().enumerate() {
            let mut word = *word;
            while word != 0 {
                let j = b * 64 + word.trailing_zeros() as usize;
                weight += inst.weight(j);
                word &= word - 1;
            }
        }
        if weight <= inst.capacity() {
            let better = profit > best_profit || {
                profit == best_profit && {
                    let bits: Vec<bool> = (0..m).map(|i| subset >> i & 1 == 1).collect();
                    bits < best_bits
                }
            };
            if better {
                best_profit = profit;
                best_bits = (0..m).map(|i| subset >> i & 1 == 1).collect();
            }
        }
    }
    Ok(ExactResult {
        optimum: best_profit,
        witness: ItemSolution::new(best_bits),
        explored: 1 << m,
    })
}

struct BbSearch<'a> {
    inst: &'a SukpInstance,
    bits: Vec<bool>,
    covered: Vec<bool>,
    weight: f64,
    profit: f64,
    best_profit: f64,
    best_bits: Vec<bool>,
    explored: u64,
}

impl BbSearch<'_> {
    /// Weight an item would add given the current covered set.
    fn marginal_weight(&self, item: usize) -> f64 {
        self.inst
            .item_elements(item)
            .iter()
            .filter(|&&j| !self.covered[j])
            .map(|&j| self.inst.weight(j))
            .sum()
    }

    fn dfs(&mut self, depth: usize) {
        self.explored += 1;
        let m = self.inst.item_count();
        if depth == m {
            // Include branches are capacity-checked, so the path is feasible.
            if self.profit > self.best_profit {
                self.best_profit = self.profit;
                self.best_bits = self.bits.clone();
            }
            return;
        }
        // Admissible bound: remaining profits of items that still fit on
        // their own. Once an item's marginal weight overflows it can only
        // shrink by loading others, which raises the total at least as much.
        let mut bound = self.profit;
        for i in depth..m {
            if self.weight + self.marginal_weight(i) <= self.inst.capacity() {
                bound += self.inst.profit(i);
            }
        }
        if bound <= self.best_profit {
            return;
        }

        // Exclude first: leaves are visited in lexicographic order, so the
        // first optimum found is the lexicographically smallest one.
        self.dfs(depth + 1);

        let delta = self.marginal_weight(depth);
        if self.weight + delta <= self.inst.capacity() {
            let newly: Vec<usize> = self
                .inst
                .item_elements(depth)
                .iter()
                .copied()
                .filter(|&j| !self.covered[j])
                .collect();
            self.bits[depth] = true;
            self.weight += delta;
            self.profit += self.inst.profit(depth);
            for &j in &newly {
                self.covered[j] = true;
            }
            self.dfs(depth + 1);
            for &j in &newly {
                self.covered[j] = false;
            }
            self.profit -= self.inst.profit(depth);
            self.weight -= delta;
            self.bits[depth] = false;
        }
    }
}

/// Depth-first include/exclude search with profit-sum pruning. Agrees with
/// [`exact_bruteforce`] (optimum and witness) on every instance both accept.
pub fn exact_branch_bound(inst: &SukpInstance) -> Result<ExactResult, OracleError> {
    let m = inst.item_count();
    if m > BRANCH_BOUND_LIMIT {
        return Err(OracleError::TooLarge {
            items: m,
            limit: BRANCH_BOUND_LIMIT,
        });
    }
    let mut search = BbSearch {
        inst,
        bits: vec![false; m],
        covered: vec![false; inst.element_count()],
        weight: 0.0,
        profit: 0.0,
        best_profit: 0.0,
        best_bits: vec![false; m],
        explored: 0,
    };
    search.dfs(0);
    Ok(ExactResult {
        optimum: search.best_profit,
        witness: ItemSolution::new(search.best_bits),
        explored: search.explored,
    })
}

/// True iff `sol` is feasible and its recomputed profit equals the claim.
pub fn verify_solution(inst: &SukpInstance, sol: &ItemSolution, claimed_profit: f64) -> bool {
    sol.len() == inst.item_count()
        && is_feasible_items(inst, sol)
        && total_profit_items(inst, sol) == claimed_profit
}
