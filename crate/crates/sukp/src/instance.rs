//! SUKP instance data model, canonical text format, and seeded generator.
//!
//! An instance couples an item set with an element set through a membership
//! relation: each item is a nonempty subset of the elements, and each element
//! belongs to at least one item. Items carry profits, elements carry weights,
//! and the knapsack capacity bounds the weight of the union of the selected
//! items' elements.
//!
//! # Canonical file format
//!
//! UTF-8 text with LF line endings:
//!
//! ```text
//! SUKP1
//! m n
//! C
//! p_1 p_2 ... p_m
//! w_1 w_2 ... w_n
//! <m membership rows, n characters each, '0'/'1'>
//! # key=value            (optional trailing metadata comments)
//! ```
//!
//! Metadata keys understood by the parser: `name`, `density`,
//! `capacity_ratio`, `seed`. Unknown comment lines are ignored.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use thiserror::Error;

/// A set-union knapsack instance.
///
/// Membership is stored in both directions so that iterating the elements of
/// an item and the items containing an element are both cheap.
#[derive(Debug, Clone, PartialEq)]
pub struct SukpInstance {
    capacity: f64,
    profits: Vec<f64>,
    weights: Vec<f64>,
    /// Per item, the sorted indices of its elements.
    items: Vec<Vec<usize>>,
    /// Per element, the sorted indices of the items containing it.
    element_items: Vec<Vec<usize>>,
}

impl SukpInstance {
    /// Assembles an instance from its parts without validating invariants.
    ///
    /// `rows[i]` is the membership row of item `i`; use [`validate_instance`]
    /// to check the result.
    ///
    /// # Panics
    ///
    /// Panics if `rows.len() != profits.len()` or any row length differs from
    /// `weights.len()` (caller bugs, not data errors).
    pub fn from_membership(
        capacity: f64,
        profits: Vec<f64>,
        weights: Vec<f64>,
        rows: &[Vec<bool>],
    ) -> Self {
        assert_eq!(rows.len(), profits.len(), "one membership row per item");
        let m = profits.len();
        let n = weights.len();
        let mut items = Vec::with_capacity(m);
        let mut element_items = vec![Vec::new(); n];
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "membership row {i} has wrong length");
            let elems: Vec<usize> = (0..n).filter(|&j| row[j]).collect();
            for &j in &elems {
                element_items[j].push(i);
            }
            items.push(elems);
        }
        SukpInstance {
            capacity,
            profits,
            weights,
            items,
            element_items,
        }
    }

    pub fn item_count(&self) -> usize {
        self.items.len()
    }

    pub fn element_count(&self) -> usize {
        self.weights.len()
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub fn profits(&self) -> &[f64] {
        &self.profits
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn profit(&self, item: usize) -> f64 {
        self.profits[item]
    }

    pub fn weight(&self, element: usize) -> f64 {
        self.weights[element]
    }

    /// Sorted element indices of item `i`.
    pub fn item_elements(&self, item: usize) -> &[usize] {
        &self.items[item]
    }

    /// Sorted indices of the items containing element `j`.
    pub fn items_of_element(&self, element: usize) -> &[usize] {
        &self.element_items[element]
    }

    pub fn contains(&self, item: usize, element: usize) -> bool {
        self.items[item].binary_search(&element).is_ok()
    }

    /// Sum of all element weights.
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Number of true membership entries.
    pub fn membership_size(&self) -> usize {
        self.items.iter().map(Vec::len).sum()
    }

    fn membership_row(&self, item: usize) -> Vec<bool> {
        let mut row = vec![false; self.element_count()];
        for &j in &self.items[item] {
            row[j] = true;
        }
        row
    }
}

/// Metadata attached to generated instances and carried in trailing comments.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceMeta {
    /// `sukp{m}_{n}_{a}_{b}` when produced by [`generate_instance`].
    pub name: String,
    /// Membership density `a` in (0, 1].
    pub density: f64,
    /// Capacity-to-total-weight ratio `b` in (0, 1].
    pub capacity_ratio: f64,
    pub seed: Option<u64>,
}

impl InstanceMeta {
    /// The generator's naming scheme: `sukp{m}_{n}_{a}_{b}` with two-decimal
    /// fractions, e.g. `sukp100_85_0.10_0.75`.
    pub fn standard_name(m: usize, n: usize, density: f64, capacity_ratio: f64) -> String {
        format!("sukp{}_{}_{:.2}_{:.2}", m, n, density, capacity_ratio)
    }
}

/// A single invariant violation found by [`validate_instance`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Item `item` contains no elements.
    EmptyItem { item: usize },
    /// Element `element` belongs to no item.
    OrphanElement { element: usize },
    /// Capacity exceeds the sum of all element weights.
    CapacityExceedsTotal { capacity: f64, total_weight: f64 },
    /// A profit is negative or not finite.
    BadProfit { item: usize, value: f64 },
    /// A weight is negative or not finite.
    BadWeight { element: usize, value: f64 },
    /// The capacity is negative or not finite.
    BadCapacity { value: f64 },
}

impl Violation {
    /// Stable machine-readable code for the violation kind.
    pub fn code(&self) -> &'static str {
        match self {
            Violation::EmptyItem { .. } => "empty-item",
            Violation::OrphanElement { .. } => "orphan-element",
            Violation::CapacityExceedsTotal { .. } => "capacity-exceeds-total",
            Violation::BadProfit { .. } => "bad-profit",
            Violation::BadWeight { .. } => "bad-weight",
            Violation::BadCapacity { .. } => "bad-capacity",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyItem { item } => write!(f, "empty-item({item})"),
            Violation::OrphanElement { element } => write!(f, "orphan-element({element})"),
            Violation::CapacityExceedsTotal {
                capacity,
                total_weight,
            } => write!(
                f,
                "capacity-exceeds-total(capacity={capacity}, total={total_weight})"
            ),
            Violation::BadProfit { item, value } => write!(f, "bad-profit({item}, {value})"),
            Violation::BadWeight { element, value } => write!(f, "bad-weight({element}, {value})"),
            Violation::BadCapacity { value } => write!(f, "bad-capacity({value})"),
        }
    }
}

/// Checks every instance invariant, returning all violations found.
///
/// Violations are data, not failures: an empty list means the instance
/// is valid.
pub fn validate_instance(inst: &SukpInstance) -> Vec<Violation> {
    let mut out = Vec::new();
    if !(inst.capacity.is_finite() && inst.capacity >= 0.0) {
        out.push(Violation::BadCapacity {
            value: inst.capacity,
        });
    }
    for (i, &p) in inst.profits.iter().enumerate() {
        if !(p.is_finite() && p >= 0.0) {
            out.push(Violation::BadProfit { item: i, value: p });
        }
    }
    for (j, &w) in inst.weights.iter().enumerate() {
        if !(w.is_finite() && w >= 0.0) {
            out.push(Violation::BadWeight {
                element: j,
                value: w,
            });
        }
    }
    for (i, elems) in inst.items.iter().enumerate() {
        if elems.is_empty() {
            out.push(Violation::EmptyItem { item: i });
        }
    }
    for (j, its) in inst.element_items.iter().enumerate() {
        if its.is_empty() {
            out.push(Violation::OrphanElement { element: j });
        }
    }
    let total = inst.total_weight();
    if inst.capacity.is_finite() && inst.capacity > total {
        out.push(Violation::CapacityExceedsTotal {
            capacity: inst.capacity,
            total_weight: total,
        });
    }
    out
}

/// Error from [`parse_instance`], carrying the offending line number.
#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("line {line}: expected header `SUKP1`, found `{found}`")]
    BadHeader { line: usize, found: String },
    #[error("line {line}: unexpected end of input, expected {expected}")]
    UnexpectedEnd { line: usize, expected: &'static str },
    #[error("line {line}: expected `m n` as two positive integers, found `{found}`")]
    BadDimensions { line: usize, found: String },
    #[error("line {line}: invalid {what} `{token}`")]
    BadNumber {
        line: usize,
        what: &'static str,
        token: String,
    },
    #[error("line {line}: expected {expected} {what} values, found {got}")]
    WrongCount {
        line: usize,
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("line {line}: membership row for item {item} has length {got}, expected {expected}")]
    BadRowLength {
        line: usize,
        item: usize,
        expected: usize,
        got: usize,
    },
    #[error("line {line}: membership row for item {item} contains `{ch}` (only '0'/'1' allowed)")]
    BadCell { line: usize, item: usize, ch: char },
    #[error("line {line}: unexpected content after membership rows: `{found}`")]
    TrailingContent { line: usize, found: String },
    #[error("line {line}: invalid instance: {violation}")]
    Invalid { line: usize, violation: Violation },
}

/// Parses the canonical text format.
///
/// The returned instance satisfies every invariant; structural violations are
/// reported as [`ParseError::Invalid`] with the most relevant line number.
/// Metadata is returned when the trailing comments carry a complete
/// `name`/`density`/`capacity_ratio` triple.
pub fn parse_instance(text: &str) -> Result<(SukpInstance, Option<InstanceMeta>), ParseError> {
    let lines: Vec<&str> = text
        .lines()
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .collect();
    let mut no = 0usize; // index of the next line to consume

    let mut next = |expected: &'static str| -> Result<(usize, &str), ParseError> {
        while no < lines.len() && lines[no].trim().is_empty() {
            no += 1;
        }
        if no >= lines.len() {
            return Err(ParseError::UnexpectedEnd {
                line: lines.len() + 1,
                expected,
            });
        }
        no += 1;
        Ok((no, lines[no - 1]))
    };

    let (line, header) = next("header `SUKP1`")?;
    if header.trim() != "SUKP1" {
        return Err(ParseError::BadHeader {
            line,
            found: header.trim().to_string(),
        });
    }

    let (dim_line, dims) = next("`m n` dimensions")?;
    let mut parts = dims.split_whitespace();
    let (m, n) = match (parts.next(), parts.next(), parts.next()) {
        (Some(a), Some(b), None) => match (a.parse::<usize>(), b.parse::<usize>()) {
            (Ok(m), Ok(n)) if m >= 1 && n >= 1 => (m, n),
            _ => {
                return Err(ParseError::BadDimensions {
                    line: dim_line,
                    found: dims.trim().to_string(),
                })
            }
        },
        _ => {
            return Err(ParseError::BadDimensions {
                line: dim_line,
                found: dims.trim().to_string(),
            })
        }
    };

    let (cap_line, cap_text) = next("capacity")?;
    let capacity = cap_text
        .trim()
        .parse::<f64>()
        .map_err(|_| ParseError::BadNumber {
            line: cap_line,
            what: "capacity",
            token: cap_text.trim().to_string(),
        })?;

    let parse_vec = |line: usize, text: &str, what: &'static str, expected: usize| {
        let mut out = Vec::with_capacity(expected);
        for tok in text.split_whitespace() {
            let v = tok.parse::<f64>().map_err(|_| ParseError::BadNumber {
                line,
                what,
                token: tok.to_string(),
            })?;
            out.push(v);
        }
        if out.len() != expected {
            return Err(ParseError::WrongCount {
                line,
                what,
                expected,
                got: out.len(),
            });
        }
        Ok(out)
    };

    let (p_line, p_text) = next("profits")?;
    let profits = parse_vec(p_line, p_text, "profit", m)?;
    let (w_line, w_text) = next("weights")?;
    let weights = parse_vec(w_line, w_text, "weight", n)?;

    let mut rows = Vec::with_capacity(m);
    let mut row_lines = Vec::with_capacity(m);
    for i in 0..m {
        let (line, row_text) = next("membership row")?;
        let row_text = row_text.trim();
        if row_text.chars().count() != n {
            return Err(ParseError::BadRowLength {
                line,
                item: i,
                expected: n,
                got: row_text.chars().count(),
            });
        }
        let mut row = Vec::with_capacity(n);
        for ch in row_text.chars() {
            match ch {
                '0' => row.push(false),
                '1' => row.push(true),
                _ => return Err(ParseError::BadCell { line, item: i, ch }),
            }
        }
        rows.push(row);
        row_lines.push(line);
    }

    // Remaining lines must be comments or blank.
    let mut meta_name = None;
    let mut meta_density = None;
    let mut meta_ratio = None;
    let mut meta_seed = None;
    for (idx, raw) in lines.iter().enumerate().skip(no) {
        let t = raw.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(comment) = t.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                let (key, value) = (key.trim(), value.trim());
                match key {
                    "name" => meta_name = Some(value.to_string()),
                    "density" => meta_density = value.parse::<f64>().ok(),
                    "capacity_ratio" => meta_ratio = value.parse::<f64>().ok(),
                    "seed" => meta_seed = value.parse::<u64>().ok(),
                    _ => {}
                }
            }
            continue;
        }
        return Err(ParseError::TrailingContent {
            line: idx + 1,
            found: t.to_string(),
        });
    }

    let inst = SukpInstance::from_membership(capacity, profits, weights, &rows);
    if let Some(v) = validate_instance(&inst).into_iter().next() {
        let line = match &v {
            Violation::EmptyItem { item } => row_lines[*item],
            Violation::OrphanElement { .. } => w_line,
            Violation::CapacityExceedsTotal { .. } => cap_line,
            Violation::BadProfit { .. } => p_line,
            Violation::BadWeight { .. } => w_line,
            Violation::BadCapacity { .. } => cap_line,
        };
        return Err(ParseError::Invalid { line, violation: v });
    }

    let meta = match (meta_name, meta_density, meta_ratio) {
        (Some(name), Some(density), Some(capacity_ratio)) => Some(InstanceMeta {
            name,
            density,
            capacity_ratio,
            seed: meta_seed,
        }),
        _ => None,
    };
    Ok((inst, meta))
}

/// Serializes to the canonical format; output always parses back to an equal
/// instance. Numbers are printed with the shortest representation that
/// round-trips through `f64`.
pub fn serialize_instance(inst: &SukpInstance, meta: Option<&InstanceMeta>) -> String {
    let mut out = String::new();
    out.push_str("SUKP1\n");
    out.push_str(&format!("{} {}\n", inst.item_count(), inst.element_count()));
    out.push_str(&format!("{}\n", inst.capacity));
    out.push_str(&join_numbers(&inst.profits));
    out.push('\n');
    out.push_str(&join_numbers(&inst.weights));
    out.push('\n');
    for i in 0..inst.item_count() {
        let row = inst.membership_row(i);
        out.extend(row.iter().map(|&b| if b { '1' } else { '0' }));
        out.push('\n');
    }
    if let Some(meta) = meta {
        out.push_str(&format!("# name={}\n", meta.name));
        out.push_str(&format!("# density={}\n", meta.density));
        out.push_str(&format!("# capacity_ratio={}\n", meta.capacity_ratio));
        if let Some(seed) = meta.seed {
            out.push_str(&format!("# seed={}\n", seed));
        }
    }
    out
}

fn join_numbers(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Error from [`generate_instance`].
#[derive(Debug, Error, PartialEq)]
pub enum GenerateError {
    #[error("item and element counts must be at least 1")]
    ZeroDimension,
    #[error("density {0} outside (0, 1]")]
    DensityOutOfRange(f64),
    #[error("capacity ratio {0} outside (0, 1]")]
    RatioOutOfRange(f64),
    #[error("density {density} targets {target} entries but a valid relation needs {required}")]
    DensityTooLow {
        density: f64,
        target: usize,
        required: usize,
    },
}

/// Profit range for generated items.
const PROFIT_RANGE: std::ops::RangeInclusive<u32> = 1..=500;
/// Weight range for generated elements.
const WEIGHT_RANGE: std::ops::RangeInclusive<u32> = 1..=100;

/// Generates a random instance named `sukp{m}_{n}_{a}_{b}`.
///
/// The membership relation first receives one entry per row and per column
/// (random permutation matching), then independent fills bring the expected
/// entry count to `density * m * n`. Capacity is
/// `round(capacity_ratio * total_weight)`. Deterministic for a fixed seed.
pub fn generate_instance(
    m: usize,
    n: usize,
    density: f64,
    capacity_ratio: f64,
    seed: u64,
) -> Result<(SukpInstance, InstanceMeta), GenerateError> {
    if m == 0 || n == 0 {
        return Err(GenerateError::ZeroDimension);
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(GenerateError::DensityOutOfRange(density));
    }
    if !(capacity_ratio > 0.0 && capacity_ratio <= 1.0) {
        return Err(GenerateError::RatioOutOfRange(capacity_ratio));
    }
    let target = (density * (m * n) as f64).round() as usize;
    let required = m.max(n);
    if target < required {
        return Err(GenerateError::DensityTooLow {
            density,
            target,
            required,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let profits: Vec<f64> = (0..m).map(|_| rng.gen_range(PROFIT_RANGE) as f64).collect();
    let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(WEIGHT_RANGE) as f64).collect();

    let mut rows = vec![vec![false; n]; m];
    let mut row_order: Vec<usize> = (0..m).collect();
    let mut col_order: Vec<usize> = (0..n).collect();
    row_order.shuffle(&mut rng);
    col_order.shuffle(&mut rng);
    // One entry per row and per column: walk both permutations cyclically.
    for t in 0..required {
        rows[row_order[t % m]][col_order[t % n]] = true;
    }

    let placed = required;
    let free_cells = m * n - placed;
    if free_cells > 0 && target > placed {
        let fill_p = (target - placed) as f64 / free_cells as f64;
        for row in rows.iter_mut() {
            for cell in row.iter_mut() {
                if !*cell && rng.gen::<f64>() < fill_p {
                    *cell = true;
                }
            }
        }
    }

    let total: f64 = weights.iter().sum();
    let capacity = (capacity_ratio * total).round();
    let inst = SukpInstance::from_membership(capacity, profits, weights, &rows);
    debug_assert!(validate_instance(&inst).is_empty());
    let meta = InstanceMeta {
        name: InstanceMeta::standard_name(m, n, density, capacity_ratio),
        density,
        capacity_ratio,
        seed: Some(seed),
    };
    Ok((inst, meta))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "SUKP1\n1 1\n3\n5\n3\n1\n";

    #[test]
    fn parses_minimal_instance() {
        let (inst, meta) = parse_instance(MINIMAL).unwrap();
        assert_eq!(inst.item_count(), 1);
        assert_eq!(inst.element_count(), 1);
        assert_eq!(inst.capacity(), 3.0);
        assert_eq!(inst.profits(), &[5.0]);
        assert_eq!(inst.weights(), &[3.0]);
        assert_eq!(inst.item_elements(0), &[0]);
        assert!(meta.is_none());
    }

    #[test]
    fn serializes_minimal_instance() {
        let (inst, _) = parse_instance(MINIMAL).unwrap();
        assert_eq!(serialize_instance(&inst, None), MINIMAL);
    }

    #[test]
    fn roundtrips_generated_instance() {
        let (inst, meta) = generate_instance(100, 85, 0.10, 0.75, 1).unwrap();
        let text = serialize_instance(&inst, Some(&meta));
        let (back, back_meta) = parse_instance(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(back_meta.as_ref(), Some(&meta));
    }

    #[test]
    fn rejects_empty_item_row() {
        let text = "SUKP1\n2 2\n3\n5 4\n3 2\n10\n00\n";
        match parse_instance(text) {
            Err(ParseError::Invalid {
                line,
                violation: Violation::EmptyItem { item },
            }) => {
                assert_eq!(item, 1);
                assert_eq!(line, 7);
            }
            other => panic!("expected empty-item error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_orphan_element() {
        let text = "SUKP1\n2 2\n3\n5 4\n3 2\n10\n10\n";
        match parse_instance(text) {
            Err(ParseError::Invalid {
                violation: Violation::OrphanElement { element },
                ..
            }) => assert_eq!(element, 1),
            other => panic!("expected orphan-element error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_capacity_above_total_weight() {
        let text = "SUKP1\n1 1\n9\n5\n3\n1\n";
        match parse_instance(text) {
            Err(ParseError::Invalid {
                line,
                violation: Violation::CapacityExceedsTotal { .. },
            }) => assert_eq!(line, 3),
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_row_length_with_line_number() {
        let text = "SUKP1\n2 3\n3\n5 4\n3 2 1\n101\n01\n";
        match parse_instance(text) {
            Err(ParseError::BadRowLength {
                line, item, got, ..
            }) => {
                assert_eq!((line, item, got), (7, 1, 2));
            }
            other => panic!("expected row-length error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_header_and_garbage() {
        assert!(matches!(
            parse_instance("SUKP9\n1 1\n3\n5\n3\n1\n"),
            Err(ParseError::BadHeader { line: 1, .. })
        ));
        assert!(matches!(
            parse_instance("SUKP1\n1 1\n3\n5\n3\n1\nstray\n"),
            Err(ParseError::TrailingContent { line: 7, .. })
        ));
    }

    #[test]
    fn preserves_fractional_capacity() {
        let text = "SUKP1\n1 1\n2.5\n5\n3\n1\n";
        let (inst, _) = parse_instance(text).unwrap();
        assert_eq!(inst.capacity(), 2.5);
        assert_eq!(serialize_instance(&inst, None), text);
    }

    #[test]
    fn generator_satisfies_structural_postconditions() {
        let (inst, meta) = generate_instance(4, 6, 0.5, 0.75, 7).unwrap();
        assert_eq!(inst.item_count(), 4);
        assert_eq!(inst.element_count(), 6);
        for i in 0..4 {
            assert!(!inst.item_elements(i).is_empty());
        }
        for j in 0..6 {
            assert!(!inst.items_of_element(j).is_empty());
        }
        assert_eq!(inst.capacity(), (0.75 * inst.total_weight()).round());
        assert!(inst.membership_size() >= 6);
        assert_eq!(meta.name, "sukp4_6_0.50_0.75");
        assert!(validate_instance(&inst).is_empty());
    }

    #[test]
    fn generator_minimal_case() {
        let (inst, _) = generate_instance(1, 1, 1.0, 1.0, 0).unwrap();
        assert_eq!(inst.item_elements(0), &[0]);
        assert_eq!(inst.capacity(), inst.weights()[0]);
    }

    #[test]
    fn generator_is_deterministic() {
        let (a, ma) = generate_instance(30, 25, 0.2, 0.8, 99).unwrap();
        let (b, mb) = generate_instance(30, 25, 0.2, 0.8, 99).unwrap();
        assert_eq!(
            serialize_instance(&a, Some(&ma)),
            serialize_instance(&b, Some(&mb))
        );
    }

    #[test]
    fn generator_rejects_bad_parameters() {
        assert!(matches!(
            generate_instance(4, 6, 0.1, 0.75, 0),
            Err(GenerateError::DensityTooLow { .. })
        ));
        assert!(matches!(
            generate_instance(0, 6, 0.5, 0.75, 0),
            Err(GenerateError::ZeroDimension)
        ));
        assert!(matches!(
            generate_instance(4, 6, 0.0, 0.75, 0),
            Err(GenerateError::DensityOutOfRange(_))
        ));
        assert!(matches!(
            generate_instance(4, 6, 0.5, 1.25, 0),
            Err(GenerateError::RatioOutOfRange(_))
        ));
    }

    #[test]
    fn validate_reports_violations_as_data() {
        let (inst, _) = generate_instance(5, 5, 0.4, 0.9, 3).unwrap();
        assert!(validate_instance(&inst).is_empty());

        // Orphan element: nobody contains element 1.
        let inst =
            SukpInstance::from_membership(2.0, vec![5.0], vec![3.0, 4.0], &[vec![true, false]]);
        let violations = validate_instance(&inst);
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0], Violation::OrphanElement { element: 1 });
        assert_eq!(violations[0].code(), "orphan-element");

        // Capacity above total weight.
        let inst = SukpInstance::from_membership(9.0, vec![5.0], vec![3.0], &[vec![true]]);
        let violations = validate_instance(&inst);
        assert_eq!(
            violations,
            vec![Violation::CapacityExceedsTotal {
                capacity: 9.0,
                total_weight: 3.0
            }]
        );
    }
}
