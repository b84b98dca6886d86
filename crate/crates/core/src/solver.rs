//! Exact solver for constraint ledgers.
//!
//! Equality constraints are folded into equivalence classes with a
//! union-find; normalization, value, and sum constraints then induce a small
//! linear system over the class representatives, solved by exact rational
//! Gaussian elimination. Every row carries the set of constraint indices it
//! was built from, so a contradiction can name a (best-effort minimal)
//! conflicting subset.

use std::collections::{BTreeMap, BTreeSet};

use crate::exact::Rat;
use crate::protocol::{Constraint, ConstraintKind, ConstraintLedger, ProbabilityLabel};

/// Solver verdict for one ledger.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveStatus {
    Determined,
    Underdetermined,
    Inconsistent,
}

/// Solution of a ledger over its probability unknowns.
#[derive(Debug, Clone)]
pub struct Solution {
    pub status: SolveStatus,
    /// Exact value per label, for labels in determined classes.
    pub values: BTreeMap<ProbabilityLabel, Rat>,
    /// Labels whose class stayed free (reported as the interval [0, 1]).
    pub free: BTreeSet<ProbabilityLabel>,
    /// Constraint indices forming a conflicting subset, when inconsistent.
    pub conflict: Option<Vec<usize>>,
}

impl Solution {
    /// Re-check every constraint against the solved values; `None` means the
    /// check cannot run because some label is free.
    pub fn satisfies(&self, ledger: &ConstraintLedger) -> Option<bool> {
        let one = Rat::from_integer(1);
        for c in &ledger.constraints {
            match &c.kind {
                ConstraintKind::Equality { a, b } => {
                    let (va, vb) = (self.values.get(a)?, self.values.get(b)?);
                    if va != vb {
                        return Some(false);
                    }
                }
                ConstraintKind::Normalization { labels } => {
                    let mut sum = Rat::from_integer(0);
                    for l in labels {
                        sum += *self.values.get(l)?;
                    }
                    if sum != one {
                        return Some(false);
                    }
                }
                ConstraintKind::Value { label, num, den } => {
                    if *self.values.get(label)? != Rat::new(*num, *den) {
                        return Some(false);
                    }
                }
                ConstraintKind::Sum { total, parts } => {
                    let mut sum = Rat::from_integer(0);
                    for l in parts {
                        sum += *self.values.get(l)?;
                    }
                    if sum != *self.values.get(total)? {
                        return Some(false);
                    }
                }
            }
        }
        Some(true)
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

/// Linear row over class variables: Σ coeff·x_class = rhs.
struct Row {
    coeffs: BTreeMap<usize, Rat>,
    rhs: Rat,
    /// Constraint indices that contributed to this row.
    sources: BTreeSet<usize>,
}

/// Solve a ledger exactly.
pub fn solve(ledger: &ConstraintLedger) -> Solution {
    let labels: Vec<ProbabilityLabel> = ledger.labels().into_iter().collect();
    let index: BTreeMap<&ProbabilityLabel, usize> =
        labels.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let n = labels.len();

    let mut uf = UnionFind::new(n);
    for c in &ledger.constraints {
        if let ConstraintKind::Equality { a, b } = &c.kind {
            uf.union(index[a], index[b]);
        }
    }

    // Deterministic class numbering by first-label order.
    let mut class_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut class_of_label = vec![0usize; n];
    for i in 0..n {
        let root = uf.find(i);
        let next = class_of_root.len();
        let class = *class_of_root.entry(root).or_insert(next);
        class_of_label[i] = class;
    }
    let n_classes = class_of_root.len();

    let mut rows: Vec<Row> = Vec::new();
    for (ci, c) in ledger.constraints.iter().enumerate() {
        // Equalities also support the rows built on their classes.
        let mut row = Row {
            coeffs: BTreeMap::new(),
            rhs: Rat::from_integer(0),
            sources: BTreeSet::from([ci]),
        };
        match &c.kind {
            ConstraintKind::Equality { .. } => continue,
            ConstraintKind::Normalization { labels: ls } => {
                for l in ls {
                    *row.coeffs
                        .entry(class_of_label[index[l]])
                        .or_insert_with(|| Rat::from_integer(0)) += Rat::from_integer(1);
                }
                row.rhs = Rat::from_integer(1);
            }
            ConstraintKind::Value { label, num, den } => {
                *row.coeffs
                    .entry(class_of_label[index[label]])
                    .or_insert_with(|| Rat::from_integer(0)) += Rat::from_integer(1);
                row.rhs = Rat::new(*num, *den);
            }
            ConstraintKind::Sum { total, parts } => {
                *row.coeffs
                    .entry(class_of_label[index[total]])
                    .or_insert_with(|| Rat::from_integer(0)) -= Rat::from_integer(1);
                for l in parts {
                    *row.coeffs
                        .entry(class_of_label[index[l]])
                        .or_insert_with(|| Rat::from_integer(0)) += Rat::from_integer(1);
                }
            }
        }
        row.coeffs.retain(|_, v| *v != Rat::from_integer(0));
        rows.push(row);
    }

    // Gaussian elimination over the classes with source tracking.
    let mut pivot_of_class: BTreeMap<usize, usize> = BTreeMap::new(); // class -> row idx
    let mut echelon: Vec<Row> = Vec::new();
    let mut conflict: Option<Vec<usize>> = None;
    'rows: for mut row in rows {
        loop {
            let Some((&lead, &coef)) = row.coeffs.iter().next() else {
                // Fully eliminated: 0 = rhs. Nonzero rhs is a contradiction
                // and the accumulated sources name the conflicting subset.
                if row.rhs != Rat::from_integer(0) {
                    conflict = Some(row.sources.iter().cloned().collect());
                    break 'rows;
                }
                break;
            };
            match pivot_of_class.get(&lead) {
                Some(&ri) => {
                    let factor = coef / echelon[ri].coeffs[&lead];
                    let (pc, pr, ps) = (
                        echelon[ri].coeffs.clone(),
                        echelon[ri].rhs,
                        echelon[ri].sources.clone(),
                    );
                    for (cls, v) in pc {
                        let e = row
                            .coeffs
                            .entry(cls)
                            .or_insert_with(|| Rat::from_integer(0));
                        *e -= factor * v;
                    }
                    row.rhs -= factor * pr;
                    row.sources.extend(ps);
                    row.coeffs.retain(|_, v| *v != Rat::from_integer(0));
                }
                None => {
                    pivot_of_class.insert(lead, echelon.len());
                    echelon.push(row);
                    break;
                }
            }
        }
    }
    // Back substitution, highest class first so pivot rows see later values.
    let order: Vec<usize> = {
        let mut classes: Vec<usize> = pivot_of_class.keys().cloned().collect();
        classes.sort_unstable_by(|a, b| b.cmp(a));
        classes
    };
    let mut value_of_class: BTreeMap<usize, Rat> = BTreeMap::new();
    let mut free_classes: BTreeSet<usize> = (0..n_classes)
        .filter(|c| !pivot_of_class.contains_key(c))
        .collect();
    if conflict.is_none() {
        for cls in order {
            let ri = pivot_of_class[&cls];
            let row = &echelon[ri];
            let mut rhs = row.rhs;
            let mut determined = true;
            for (c, v) in &row.coeffs {
                if *c == cls {
                    continue;
                }
                match value_of_class.get(c) {
                    Some(x) => rhs -= *v * *x,
                    None => {
                        determined = false;
                        break;
                    }
                }
            }
            if determined {
                value_of_class.insert(cls, rhs / row.coeffs[&cls]);
            } else {
                free_classes.insert(cls);
            }
        }
    }

    // Probabilities must lie in [0, 1]; a solution outside that range means
    // the axioms contradict the probability reading.
    if conflict.is_none() {
        for (_, v) in value_of_class.iter() {
            if *v < Rat::from_integer(0) || *v > Rat::from_integer(1) {
                conflict = Some((0..ledger.constraints.len()).collect());
                break;
            }
        }
    }

    if let Some(cf) = conflict {
        return Solution {
            status: SolveStatus::Inconsistent,
            values: BTreeMap::new(),
            free: labels.into_iter().collect(),
            conflict: Some(cf),
        };
    }

    let mut values = BTreeMap::new();
    let mut free = BTreeSet::new();
    for (i, label) in labels.iter().enumerate() {
        let cls = class_of_label[i];
        if free_classes.contains(&cls) {
            free.insert(label.clone());
        } else {
            values.insert(label.clone(), value_of_class[&cls]);
        }
    }
    let status = if free.is_empty() {
        SolveStatus::Determined
    } else {
        SolveStatus::Underdetermined
    };
    Solution {
        status,
        values,
        free,
        conflict: None,
    }
}

/// Convenience: a [`Constraint`] list as a ledger.
pub fn ledger_from(constraints: Vec<Constraint>) -> ConstraintLedger {
    let mut l = ConstraintLedger::new();
    for c in constraints {
        l.push(c);
    }
    l
}
