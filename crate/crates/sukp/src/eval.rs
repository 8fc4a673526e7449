//! Objective and feasibility evaluation for both solution encodings, plus the
//! static and self-adjusting value-density measures the repair operators rank
//! by.
//!
//! Item encoding: a binary vector over items; the knapsack holds the union of
//! the selected items' elements. Element encoding: a binary vector over
//! elements; profit is earned only by items whose elements are all selected,
//! and a feasible element solution may not contain elements outside every
//! selected item.
//!
//! Density measures:
//! - `UWE`: element weight divided by its frequency (number of containing
//!   items).
//! - `AVDI`: item profit over the sum of its elements' UWEs (static).
//! - `RVDI`: item profit over the sum of UWEs of its elements *not yet
//!   loaded*; rises as the knapsack fills, which is what makes the repair
//!   operators self-adjusting.
//! - `AVE`/`RVDE`: the element-side analogues, apportioning item profits over
//!   element weights (all of them for AVE, only the unloaded ones for RVDE).

use crate::instance::SukpInstance;

/// Binary loading vector over items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemSolution {
    pub bits: Vec<bool>,
}

impl ItemSolution {
    pub fn new(bits: Vec<bool>) -> Self {
        ItemSolution { bits }
    }

    pub fn zeros(m: usize) -> Self {
        ItemSolution {
            bits: vec![false; m],
        }
    }

    pub fn ones(m: usize) -> Self {
        ItemSolution {
            bits: vec![true; m],
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn selected(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }
}

/// Binary loading vector over elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementSolution {
    pub bits: Vec<bool>,
}

impl ElementSolution {
    pub fn new(bits: Vec<bool>) -> Self {
        ElementSolution { bits }
    }

    pub fn zeros(n: usize) -> Self {
        ElementSolution {
            bits: vec![false; n],
        }
    }

    pub fn ones(n: usize) -> Self {
        ElementSolution {
            bits: vec![true; n],
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn selected(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(j, &b)| b.then_some(j))
    }
}

/// Static densities precomputed once per instance.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityTable {
    /// Per element: number of items containing it (>= 1 on valid instances).
    fe: Vec<usize>,
    /// Per element: weight / frequency.
    uwe: Vec<f64>,
    /// Per item: profit over the sum of its elements' UWEs.
    avdi: Vec<f64>,
    /// Per element: absolute value, item profits apportioned by weight.
    ave: Vec<f64>,
}

impl DensityTable {
    pub fn fe(&self) -> &[usize] {
        &self.fe
    }

    pub fn uwe(&self) -> &[f64] {
        &self.uwe
    }

    pub fn avdi(&self) -> &[f64] {
        &self.avdi
    }

    pub fn ave(&self) -> &[f64] {
        &self.ave
    }
}

/// Builds the static density table: FE, UWE, AVDI, and AVE.
pub fn build_density_table(inst: &SukpInstance) -> DensityTable {
    let m = inst.item_count();
    let n = inst.element_count();
    let fe: Vec<usize> = (0..n).map(|j| inst.items_of_element(j).len()).collect();
    let uwe: Vec<f64> = (0..n)
        .map(|j| inst.weight(j) / fe[j].max(1) as f64)
        .collect();
    let avdi: Vec<f64> = (0..m)
        .map(|i| {
            let denom: f64 = inst.item_elements(i).iter().map(|&j| uwe[j]).sum();
            if denom == 0.0 {
                f64::INFINITY
            } else {
                inst.profit(i) / denom
            }
        })
        .collect();
    // Item profit spread over its elements proportionally to weight; items
    // whose weight sum is zero cannot apportion and contribute nothing.
    let mut ave = vec![0.0; n];
    for i in 0..m {
        let sum_w: f64 = inst.item_elements(i).iter().map(|&k| inst.weight(k)).sum();
        if sum_w == 0.0 {
            continue;
        }
        let share = inst.profit(i) / sum_w;
        for &j in inst.item_elements(i) {
            ave[j] += share * inst.weight(j);
        }
    }
    DensityTable { fe, uwe, avdi, ave }
}

/// Elements belonging to at least one selected item, as a mask.
pub fn covered_elements(inst: &SukpInstance, sol: &ItemSolution) -> Vec<bool> {
    assert_eq!(sol.len(), inst.item_count(), "item solution length");
    let mut covered = vec![false; inst.element_count()];
    for i in sol.selected() {
        for &j in inst.item_elements(i) {
            covered[j] = true;
        }
    }
    covered
}

/// Weight of the union of the selected items' elements.
pub fn total_weight_items(inst: &SukpInstance, sol: &ItemSolution) -> f64 {
    let covered = covered_elements(inst, sol);
    covered
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c)
        .map(|(j, _)| inst.weight(j))
        .sum()
}

/// Sum of profits over the selected items.
pub fn total_profit_items(inst: &SukpInstance, sol: &ItemSolution) -> f64 {
    assert_eq!(sol.len(), inst.item_count(), "item solution length");
    sol.selected().map(|i| inst.profit(i)).sum()
}

/// Capacity check for the item encoding; the bound is inclusive.
pub fn is_feasible_items(inst: &SukpInstance, sol: &ItemSolution) -> bool {
    total_weight_items(inst, sol) <= inst.capacity()
}

/// Self-adjusting value density of an item: profit over the UWE sum of its
/// elements outside `loaded`. `+inf` when every element is already loaded
/// (the item then costs nothing and must rank first).
pub fn rvdi(inst: &SukpInstance, table: &DensityTable, item: usize, loaded: &[bool]) -> f64 {
    debug_assert_eq!(loaded.len(), inst.element_count());
    let denom: f64 = inst
        .item_elements(item)
        .iter()
        .filter(|&&j| !loaded[j])
        .map(|&j| table.uwe[j])
        .sum();
    if denom == 0.0 {
        f64::INFINITY
    } else {
        inst.profit(item) / denom
    }
}

/// Self-adjusting value density of an *unloaded* element: the sum over its
/// items of profit divided by the item's unloaded weight. Items whose
/// unloaded weight is zero are excluded (possible only with zero-weight
/// elements).
pub fn rvde(inst: &SukpInstance, table: &DensityTable, element: usize, loaded: &[bool]) -> f64 {
    debug_assert_eq!(loaded.len(), inst.element_count());
    debug_assert!(!loaded[element], "RVDE is defined for outside elements");
    let _ = table;
    let mut acc = 0.0;
    for &i in inst.items_of_element(element) {
        let denom: f64 = inst
            .item_elements(i)
            .iter()
            .filter(|&&k| !loaded[k])
            .map(|&k| inst.weight(k))
            .sum();
        debug_assert!(
            denom > 0.0 || inst.weight(element) == 0.0,
            "outside element implies positive unloaded weight unless weightless"
        );
        if denom > 0.0 {
            acc += inst.profit(i) / denom;
        }
    }
    acc
}

/// Profit of an element solution: the sum of profits of items whose elements
/// are all selected.
pub fn total_profit_elements(inst: &SukpInstance, sol: &ElementSolution) -> f64 {
    assert_eq!(sol.len(), inst.element_count(), "element solution length");
    (0..inst.item_count())
        .filter(|&i| inst.item_elements(i).iter().all(|&j| sol.bits[j]))
        .map(|i| inst.profit(i))
        .sum()
}

/// Feasibility for the element encoding: total selected weight within
/// capacity, and every selected element belongs to at least one fully
/// selected item.
pub fn is_feasible_elements(inst: &SukpInstance, sol: &ElementSolution) -> bool {
    assert_eq!(sol.len(), inst.element_count(), "element solution length");
    let weight: f64 = sol.selected().map(|j| inst.weight(j)).sum();
    if weight > inst.capacity() {
        return false;
    }
    let complete = items_from_elements(inst, sol);
    sol.selected()
        .all(|j| inst.items_of_element(j).iter().any(|&i| complete.bits[i]))
}

/// The item vector derived from an element solution: item `i` is set iff all
/// its elements are selected.
pub fn items_from_elements(inst: &SukpInstance, sol: &ElementSolution) -> ItemSolution {
    assert_eq!(sol.len(), inst.element_count(), "element solution length");
    ItemSolution::new(
        (0..inst.item_count())
            .map(|i| inst.item_elements(i).iter().all(|&j| sol.bits[j]))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::generate_instance;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    /// The shared-element motif: U1 = {e1,e3,e4}, U2 = {e1,e4,e5}, plus a
    /// third item covering e2 so that no element is orphaned.
    fn motif() -> SukpInstance {
        let rows = vec![
            vec![true, false, true, true, false],
            vec![true, false, false, true, true],
            vec![false, true, false, false, false],
        ];
        SukpInstance::from_membership(
            20.0,
            vec![10.0, 8.0, 3.0],
            vec![4.0, 7.0, 5.0, 6.0, 2.0],
            &rows,
        )
    }

    fn naive_weight(inst: &SukpInstance, sol: &ItemSolution) -> f64 {
        let union: BTreeSet<usize> = sol
            .selected()
            .flat_map(|i| inst.item_elements(i).iter().copied())
            .collect();
        union.iter().map(|&j| inst.weight(j)).sum()
    }

    fn naive_profit_items(inst: &SukpInstance, sol: &ItemSolution) -> f64 {
        (0..inst.item_count())
            .filter(|&i| sol.bits[i])
            .map(|i| inst.profit(i))
            .sum()
    }

    fn naive_profit_elements(inst: &SukpInstance, sol: &ElementSolution) -> f64 {
        let selected: BTreeSet<usize> = sol.selected().collect();
        (0..inst.item_count())
            .filter(|&i| inst.item_elements(i).iter().all(|j| selected.contains(j)))
            .map(|i| inst.profit(i))
            .sum()
    }

    #[test]
    fn covered_elements_cases() {
        let inst = motif();
        assert!(covered_elements(&inst, &ItemSolution::zeros(3))
            .iter()
            .all(|&c| !c));
        // Selecting U1 and U2 covers e1, e3, e4, e5.
        let sol = ItemSolution::new(vec![true, true, false]);
        assert_eq!(
            covered_elements(&inst, &sol),
            vec![true, false, true, true, true]
        );
        assert!(covered_elements(&inst, &ItemSolution::ones(3))
            .iter()
            .all(|&c| c));
    }

    #[test]
    fn weights_and_profits_match_naive_recomputation() {
        let (inst, _) = generate_instance(10, 12, 0.3, 0.8, 42).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let sol = ItemSolution::new((0..10).map(|_| rng.gen::<bool>()).collect());
            assert_eq!(total_weight_items(&inst, &sol), naive_weight(&inst, &sol));
            assert_eq!(
                total_profit_items(&inst, &sol),
                naive_profit_items(&inst, &sol)
            );
            let esol = ElementSolution::new((0..12).map(|_| rng.gen::<bool>()).collect());
            assert_eq!(
                total_profit_elements(&inst, &esol),
                naive_profit_elements(&inst, &esol)
            );
        }
    }

    #[test]
    fn weight_equality_exhaustive_on_small_instance() {
        let (inst, _) = generate_instance(10, 12, 0.25, 0.75, 11).unwrap();
        for mask in 0u32..1 << 10 {
            let sol = ItemSolution::new((0..10).map(|i| mask >> i & 1 == 1).collect());
            assert_eq!(total_weight_items(&inst, &sol), naive_weight(&inst, &sol));
        }
    }

    #[test]
    fn single_item_weight_is_its_element_sum() {
        let inst = motif();
        let sol = ItemSolution::new(vec![true, false, false]);
        assert_eq!(total_weight_items(&inst, &sol), 4.0 + 5.0 + 6.0);
        assert_eq!(total_profit_items(&inst, &sol), 10.0);
    }

    #[test]
    fn feasibility_bound_is_inclusive() {
        let inst = motif();
        assert!(is_feasible_items(&inst, &ItemSolution::zeros(3)));
        // All items cover every element: weight 24 > capacity 20.
        assert!(!is_feasible_items(&inst, &ItemSolution::ones(3)));
        // U1 alone weighs 15; shrink capacity to exactly 15 to hit the bound.
        let tight = SukpInstance::from_membership(
            15.0,
            vec![10.0, 8.0, 3.0],
            vec![4.0, 7.0, 5.0, 6.0, 2.0],
            &[
                vec![true, false, true, true, false],
                vec![true, false, false, true, true],
                vec![false, true, false, false, false],
            ],
        );
        assert!(is_feasible_items(
            &tight,
            &ItemSolution::new(vec![true, false, false])
        ));
    }

    #[test]
    fn density_table_hand_computations() {
        // Two items sharing a single element of weight 4: FE = 2, UWE = 2,
        // AVDI = p / 2.
        let inst = SukpInstance::from_membership(
            4.0,
            vec![6.0, 10.0],
            vec![4.0],
            &[vec![true], vec![true]],
        );
        let table = build_density_table(&inst);
        assert_eq!(table.fe(), &[2]);
        assert_eq!(table.uwe(), &[2.0]);
        assert_eq!(table.avdi(), &[3.0, 5.0]);

        // Element in exactly one item keeps its full weight as UWE.
        let inst = motif();
        let table = build_density_table(&inst);
        assert_eq!(table.fe(), &[2, 1, 1, 2, 1]);
        assert_eq!(table.uwe()[1], 7.0);
        assert_eq!(table.uwe()[0], 2.0);

        // AVE with equal weights over k elements: p_i / k per element.
        let inst = SukpInstance::from_membership(
            12.0,
            vec![9.0],
            vec![4.0, 4.0, 4.0],
            &[vec![true, true, true]],
        );
        let table = build_density_table(&inst);
        assert_eq!(table.ave(), &[3.0, 3.0, 3.0]);
    }

    #[test]
    fn rvdi_reduces_to_avdi_on_empty_knapsack() {
        let (inst, _) = generate_instance(15, 18, 0.25, 0.8, 5).unwrap();
        let table = build_density_table(&inst);
        let empty = vec![false; inst.element_count()];
        for i in 0..inst.item_count() {
            assert_eq!(rvdi(&inst, &table, i, &empty), table.avdi()[i]);
        }
    }

    #[test]
    fn rvdi_counts_only_outside_elements() {
        let inst = motif();
        let table = build_density_table(&inst);
        // e1 and e4 loaded: U2 only has e5 left, so RVDI = p2 / uwe(e5).
        let loaded = vec![true, false, false, true, false];
        assert_eq!(rvdi(&inst, &table, 1, &loaded), 8.0 / 2.0);
        // Everything the item owns loaded: +inf.
        let loaded = vec![true, false, true, true, true];
        assert_eq!(rvdi(&inst, &table, 0, &loaded), f64::INFINITY);
        assert_eq!(rvdi(&inst, &table, 1, &loaded), f64::INFINITY);
    }

    #[test]
    fn rvdi_is_monotone_in_loaded_set() {
        let (inst, _) = generate_instance(12, 14, 0.3, 0.8, 21).unwrap();
        let table = build_density_table(&inst);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let small: Vec<bool> = (0..14).map(|_| rng.gen::<f64>() < 0.3).collect();
            let mut big = small.clone();
            for b in big.iter_mut() {
                if !*b && rng.gen::<f64>() < 0.3 {
                    *b = true;
                }
            }
            for i in 0..12 {
                assert!(rvdi(&inst, &table, i, &big) >= rvdi(&inst, &table, i, &small));
            }
        }
    }

    #[test]
    fn rvde_reduces_to_ave_over_weight_on_empty_knapsack() {
        let (inst, _) = generate_instance(15, 18, 0.25, 0.8, 9).unwrap();
        let table = build_density_table(&inst);
        let empty = vec![false; inst.element_count()];
        for j in 0..inst.element_count() {
            let lhs = rvde(&inst, &table, j, &empty) * inst.weight(j);
            let rhs = table.ave()[j];
            assert!(
                (lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0),
                "element {j}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn rvde_hand_cases() {
        let inst = motif();
        let table = build_density_table(&inst);
        // e5 is only in U2; with e1 and e4 loaded its RVDE is p2 / w(e5).
        let loaded = vec![true, false, false, true, false];
        assert_eq!(rvde(&inst, &table, 4, &loaded), 8.0 / 2.0);

        // A weightless element whose only item has zero unloaded weight is
        // worth nothing.
        let inst =
            SukpInstance::from_membership(5.0, vec![7.0], vec![0.0, 5.0], &[vec![true, true]]);
        let table = build_density_table(&inst);
        let loaded = vec![false, true];
        assert_eq!(rvde(&inst, &table, 0, &loaded), 0.0);
    }

    #[test]
    fn element_profit_counts_only_complete_items() {
        let inst = motif();
        assert_eq!(
            total_profit_elements(&inst, &ElementSolution::zeros(5)),
            0.0
        );
        assert_eq!(
            total_profit_elements(&inst, &ElementSolution::ones(5)),
            21.0
        );
        // Exactly U1's elements: only U1 is complete.
        let sol = ElementSolution::new(vec![true, false, true, true, false]);
        assert_eq!(total_profit_elements(&inst, &sol), 10.0);
    }

    #[test]
    fn element_feasibility_rejects_dangling_elements() {
        let inst = motif();
        assert!(is_feasible_elements(&inst, &ElementSolution::zeros(5)));
        // One full item within capacity.
        let full_u1 = ElementSolution::new(vec![true, false, true, true, false]);
        assert!(is_feasible_elements(&inst, &full_u1));
        // A proper nonempty subset of U1 dangles.
        let partial = ElementSolution::new(vec![true, false, true, false, false]);
        assert!(!is_feasible_elements(&inst, &partial));
    }

    #[test]
    fn items_from_elements_cases() {
        let inst = motif();
        assert_eq!(
            items_from_elements(&inst, &ElementSolution::zeros(5)).bits,
            vec![false, false, false]
        );
        assert_eq!(
            items_from_elements(&inst, &ElementSolution::ones(5)).bits,
            vec![true, true, true]
        );
        let full_u1 = ElementSolution::new(vec![true, false, true, true, false]);
        assert_eq!(
            items_from_elements(&inst, &full_u1).bits,
            vec![true, false, false]
        );
    }

    #[test]
    fn element_profit_equals_item_profit_of_derived_vector() {
        let (inst, _) = generate_instance(12, 14, 0.3, 0.8, 33).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..300 {
            let sol = ElementSolution::new((0..14).map(|_| rng.gen::<bool>()).collect());
            let derived = items_from_elements(&inst, &sol);
            assert_eq!(
                total_profit_elements(&inst, &sol),
                total_profit_items(&inst, &derived)
            );
        }
    }
}
