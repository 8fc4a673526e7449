//! Greedy repair-and-optimization operators.
//!
//! Every operator takes a candidate loading vector (feasible or not), clears
//! it, and rebuilds a feasible solution in two passes: first over the
//! candidate's selected objects, then over the rest. The self-adjusting
//! operators re-rank after every successful load because loading one object
//! changes the remaining objects' relative densities; the static baseline
//! ranks once by the static density and never again.
//!
//! - [`isro`]: item loading, ranked by RVDI.
//! - [`esro`]: element loading, ranked by RVDE, followed by item derivation
//!   and a delete/refill cycle that removes elements covered by no complete
//!   item.
//! - [`static_greedy_repair`]: item loading, ranked once by AVDI.
//!
//! All ties break toward the lower index, so repairs are deterministic.
//!
//! Density bookkeeping note: per-item unloaded-weight sums are recomputed
//! from scratch for the items touched by each load rather than updated by
//! subtraction, so the ranked values are bit-identical to the pure
//! [`eval`](crate::eval) functions.

use crate::eval::{
    is_feasible_elements, is_feasible_items, total_profit_items, DensityTable, ElementSolution,
    ItemSolution,
};
use crate::instance::SukpInstance;
use thiserror::Error;

/// A repaired, feasible solution.
///
/// `solution` is the loading vector in the operator's own encoding;
/// `derived` is the companion vector (covered elements for item loading, the
/// complete-item vector for element loading); `objective` is the repaired
/// solution's profit.
#[derive(Debug, Clone, PartialEq)]
pub struct RepairOutcome {
    pub solution: Vec<bool>,
    pub derived: Vec<bool>,
    pub objective: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum RepairError {
    #[error("candidate has {got} bits, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

fn check_len(expected: usize, got: usize) -> Result<(), RepairError> {
    if expected == got {
        Ok(())
    } else {
        Err(RepairError::DimensionMismatch { expected, got })
    }
}

/// Index of the first maximum, i.e. ties prefer the lower object index when
/// the slice is kept in ascending index order.
fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// State shared by the item-loading operators.
struct ItemLoader<'a> {
    inst: &'a SukpInstance,
    table: &'a DensityTable,
    selected: Vec<bool>,
    loaded: Vec<bool>,
    loaded_weight: f64,
    /// Per item: UWE sum of its unloaded elements (the RVDI denominator).
    rwi: Vec<f64>,
}

impl<'a> ItemLoader<'a> {
    fn new(inst: &'a SukpInstance, table: &'a DensityTable) -> Self {
        let rwi = (0..inst.item_count())
            .map(|i| inst.item_elements(i).iter().map(|&j| table.uwe()[j]).sum())
            .collect();
        ItemLoader {
            inst,
            table,
            selected: vec![false; inst.item_count()],
            loaded: vec![false; inst.element_count()],
            loaded_weight: 0.0,
            rwi,
        }
    }

    fn rvdi(&self, item: usize) -> f64 {
        if self.rwi[item] == 0.0 {
            f64::INFINITY
        } else {
            self.inst.profit(item) / self.rwi[item]
        }
    }

    fn marginal_weight(&self, item: usize) -> f64 {
        self.inst
            .item_elements(item)
            .iter()
            .filter(|&&j| !self.loaded[j])
            .map(|&j| self.inst.weight(j))
            .sum()
    }

    fn refresh_rwi(&mut self, item: usize) {
        let sum: f64 = self
            .inst
            .item_elements(item)
            .iter()
            .filter(|&&k| !self.loaded[k])
            .map(|&k| self.table.uwe()[k])
            .sum();
        self.rwi[item] = sum;
    }

    /// Loads `item` if the union stays within capacity; returns whether the
    /// loaded-element set changed.
    fn try_load(&mut self, item: usize) -> bool {
        let delta = self.marginal_weight(item);
        if self.loaded_weight + delta > self.inst.capacity() {
            return false;
        }
        self.selected[item] = true;
        self.loaded_weight += delta;
        let inst = self.inst;
        let mut changed = false;
        for &j in inst.item_elements(item) {
            if !self.loaded[j] {
                self.loaded[j] = true;
                changed = true;
                for &i in inst.items_of_element(j) {
                    self.refresh_rwi(i);
                }
            }
        }
        changed
    }

    /// One greedy pass: repeatedly take the highest-RVDI member, load it if
    /// it fits, and drop it from the pass. Densities are refreshed only when
    /// a load changed the knapsack.
    fn self_adjusting_pass(&mut self, mut remaining: Vec<usize>) {
        let mut densities: Vec<f64> = remaining.iter().map(|&i| self.rvdi(i)).collect();
        while !remaining.is_empty() {
            let pos = argmax(&densities);
            let item = remaining.remove(pos);
            densities.remove(pos);
            if self.try_load(item) {
                for (d, &i) in densities.iter_mut().zip(&remaining) {
                    *d = self.rvdi(i);
                }
            }
        }
    }

    /// One pass in descending static AVDI order (ties by lower index).
    fn static_pass(&mut self, mut members: Vec<usize>) {
        members.sort_by(|&a, &b| {
            self.table.avdi()[b]
                .partial_cmp(&self.table.avdi()[a])
                .unwrap()
                .then(a.cmp(&b))
        });
        for item in members {
            self.try_load(item);
        }
    }

    fn finish(self) -> RepairOutcome {
        let objective = total_profit_items(self.inst, &ItemSolution::new(self.selected.clone()));
        RepairOutcome {
            solution: self.selected,
            derived: self.loaded,
            objective,
        }
    }
}

fn split_candidate(bits: &[bool]) -> (Vec<usize>, Vec<usize>) {
    let ones = bits
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i))
        .collect();
    let zeros = bits
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| (!b).then_some(i))
        .collect();
    (ones, zeros)
}

/// Item-based self-adjusting repair and optimization.
///
/// The candidate's selected items form the first greedy pass, the rest the
/// second; each pass repeatedly loads the highest-RVDI member that fits.
pub fn isro(
    inst: &SukpInstance,
    table: &DensityTable,
    candidate: &ItemSolution,
) -> Result<RepairOutcome, RepairError> {
    check_len(inst.item_count(), candidate.len())?;
    let (s1, s2) = split_candidate(&candidate.bits);
    let mut loader = ItemLoader::new(inst, table);
    loader.self_adjusting_pass(s1);
    loader.self_adjusting_pass(s2);
    let out = loader.finish();
    debug_assert!(is_feasible_items(
        inst,
        &ItemSolution::new(out.solution.clone())
    ));
    Ok(out)
}

/// Static-density baseline: the same two-pass structure as [`isro`] but
/// ranked once by AVDI with no recomputation.
pub fn static_greedy_repair(
    inst: &SukpInstance,
    table: &DensityTable,
    candidate: &ItemSolution,
) -> Result<RepairOutcome, RepairError> {
    check_len(inst.item_count(), candidate.len())?;
    let (s1, s2) = split_candidate(&candidate.bits);
    let mut loader = ItemLoader::new(inst, table);
    loader.static_pass(s1);
    loader.static_pass(s2);
    let out = loader.finish();
    debug_assert!(is_feasible_items(
        inst,
        &ItemSolution::new(out.solution.clone())
    ));
    Ok(out)
}

/// State for the element-loading operator.
struct ElementLoader<'a> {
    inst: &'a SukpInstance,
    in_knapsack: Vec<bool>,
    weight: f64,
    complete: Vec<bool>,
    /// Per item: weight sum of its unloaded elements (the RVDE denominator).
    outside_weight: Vec<f64>,
}

impl<'a> ElementLoader<'a> {
    fn new(inst: &'a SukpInstance) -> Self {
        let outside_weight = (0..inst.item_count())
            .map(|i| inst.item_elements(i).iter().map(|&j| inst.weight(j)).sum())
            .collect();
        ElementLoader {
            inst,
            in_knapsack: vec![false; inst.element_count()],
            weight: 0.0,
            complete: vec![false; inst.item_count()],
            outside_weight,
        }
    }

    fn rvde(&self, element: usize) -> f64 {
        let mut acc = 0.0;
        for &i in self.inst.items_of_element(element) {
            if self.outside_weight[i] > 0.0 {
                acc += self.inst.profit(i) / self.outside_weight[i];
            }
        }
        acc
    }

    fn refresh_outside_weight(&mut self, item: usize) {
        let sum: f64 = self
            .inst
            .item_elements(item)
            .iter()
            .filter(|&&k| !self.in_knapsack[k])
            .map(|&k| self.inst.weight(k))
            .sum();
        self.outside_weight[item] = sum;
    }

    fn try_load(&mut self, element: usize) -> bool {
        if self.weight + self.inst.weight(element) > self.inst.capacity() {
            return false;
        }
        self.in_knapsack[element] = true;
        self.weight += self.inst.weight(element);
        let inst = self.inst;
        for &i in inst.items_of_element(element) {
            self.refresh_outside_weight(i);
        }
        true
    }

    fn greedy_pass(&mut self, mut remaining: Vec<usize>) {
        let mut densities: Vec<f64> = remaining.iter().map(|&j| self.rvde(j)).collect();
        while !remaining.is_empty() {
            let pos = argmax(&densities);
            let element = remaining.remove(pos);
            densities.remove(pos);
            if self.try_load(element) {
                for (d, &j) in densities.iter_mut().zip(&remaining) {
                    *d = self.rvde(j);
                }
            }
        }
    }

    /// Marks items that became complete; returns whether any did.
    fn derive_items(&mut self) -> bool {
        let mut any = false;
        for i in 0..self.inst.item_count() {
            if !self.complete[i]
                && self
                    .inst
                    .item_elements(i)
                    .iter()
                    .all(|&j| self.in_knapsack[j])
            {
                self.complete[i] = true;
                any = true;
            }
        }
        any
    }

    /// Removes loaded elements covered by no complete item; returns how many
    /// were removed.
    fn delete_dangling(&mut self) -> usize {
        let inst = self.inst;
        let mut removed = Vec::new();
        for j in 0..inst.element_count() {
            if self.in_knapsack[j] && !inst.items_of_element(j).iter().any(|&i| self.complete[i]) {
                self.in_knapsack[j] = false;
                removed.push(j);
            }
        }
        if removed.is_empty() {
            return 0;
        }
        self.weight = self
            .in_knapsack
            .iter()
            .enumerate()
            .filter(|&(_, &b)| b)
            .map(|(j, _)| inst.weight(j))
            .sum();
        for &j in &removed {
            for &i in inst.items_of_element(j) {
                self.refresh_outside_weight(i);
            }
        }
        removed.len()
    }

    fn outside_elements(&self) -> Vec<usize> {
        (0..self.inst.element_count())
            .filter(|&j| !self.in_knapsack[j])
            .collect()
    }
}

/// Element-based self-adjusting repair and optimization.
///
/// Two greedy RVDE passes load elements; items whose elements are all loaded
/// form the complete set. Loaded elements covered by no complete item are
/// deleted, freed capacity is refilled greedily from the outside elements,
/// and the cycle repeats while refills complete new items. Each cycle grows
/// the complete-item set, so the loop runs at most once per item.
pub fn esro(
    inst: &SukpInstance,
    table: &DensityTable,
    candidate: &ElementSolution,
) -> Result<RepairOutcome, RepairError> {
    check_len(inst.element_count(), candidate.len())?;
    let _ = table;
    let (s1, s2) = split_candidate(&candidate.bits);
    let mut loader = ElementLoader::new(inst);
    loader.greedy_pass(s1);
    loader.greedy_pass(s2);
    loader.derive_items();
    let mut cycles = 0usize;
    while loader.delete_dangling() > 0 {
        cycles += 1;
        debug_assert!(
            cycles <= inst.item_count() + 1,
            "delete/refill must terminate"
        );
        loader.greedy_pass(loader.outside_elements());
        if !loader.derive_items() {
            // No refill completed an item, so the refilled elements dangle;
            // drop them and stop rather than refilling the same set again.
            loader.delete_dangling();
            break;
        }
    }
    let objective = total_profit_items(inst, &ItemSolution::new(loader.complete.clone()));
    let out = RepairOutcome {
        solution: loader.in_knapsack,
        derived: loader.complete,
        objective,
    };
    debug_assert!(is_feasible_elements(
        inst,
        &ElementSolution::new(out.solution.clone())
    ));
    Ok(out)
}
