//! Multiple-choice knapsack over per-layer profit-cost classes.
//!
//! Class `i` offers items `j = 0..profits[i].len()` with cost `j` and profit
//! `profits[i][j]`; exactly one item is taken per class.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::LayerId;

/// Largest number of combinations `verify_allocation` will enumerate.
pub const BRUTE_FORCE_LIMIT: f64 = 1e6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AllocationRow {
    pub layer: LayerId,
    pub budget: usize,
    pub profit: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetAllocation {
    pub rows: Vec<AllocationRow>,
}

impl BudgetAllocation {
    pub fn budgets(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.budget).collect()
    }

    pub fn total_cost(&self) -> usize {
        self.rows.iter().map(|r| r.budget).sum()
    }

    /// Summed right to left, the same association the solver uses.
    pub fn total_profit(&self) -> f64 {
        self.rows.iter().rev().fold(0.0, |acc, r| r.profit + acc)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("layer,budget,profit\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{}", r.layer, r.budget, r.profit);
        }
        out
    }
}

fn check_classes(profits: &[Vec<f64>]) -> Result<()> {
    for (i, class) in profits.iter().enumerate() {
        if class.is_empty() {
            return Err(Error::Domain(format!("class {i} has no zero-cost item")));
        }
        if class.iter().any(|p| !p.is_finite()) {
            return Err(Error::Domain(format!("class {i} has a non-finite profit")));
        }
    }
    Ok(())
}

/// Exact DP over capacity. Among optimal selections the one with the smallest
/// total cost wins, then the lexicographically smallest budget vector.
pub fn solve_mckp(profits: &[Vec<f64>], l: usize) -> Result<BudgetAllocation> {
    check_classes(profits)?;
    let k = profits.len();
    // suf[i][b]: best profit from classes i.. with total cost at most b
    let mut suf = vec![vec![0.0f64; l + 1]; k + 1];
    for i in (0..k).rev() {
        for b in 0..=l {
            let mut best = f64::NEG_INFINITY;
            for j in 0..profits[i].len().min(b + 1) {
                best = best.max(profits[i][j] + suf[i + 1][b - j]);
            }
            suf[i][b] = best;
        }
    }
    let target = suf[0].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut rem = suf[0].iter().position(|&v| v == target).unwrap();
    let mut rows = Vec::with_capacity(k);
    for i in 0..k {
        let j = (0..profits[i].len().min(rem + 1))
            .find(|&j| profits[i][j] + suf[i + 1][rem - j] == suf[i][rem])
            .unwrap();
        rows.push(AllocationRow {
            layer: i,
            budget: j,
            profit: profits[i][j],
        });
        rem -= j;
    }
    Ok(BudgetAllocation { rows })
}

/// Best value over every feasible selection, or `None` above the limit.
pub fn brute_force_mckp(profits: &[Vec<f64>], l: usize) -> Option<f64> {
    let choices: Vec<usize> = profits.iter().map(|c| c.len().min(l + 1)).collect();
    let combos: f64 = choices.iter().map(|&c| c as f64).product();
    if profits.len() as f64 * combos > BRUTE_FORCE_LIMIT || choices.contains(&0) {
        return None;
    }
    let mut best = f64::NEG_INFINITY;
    let mut idx = vec![0usize; profits.len()];
    loop {
        if idx.iter().sum::<usize>() <= l {
            let v = idx
                .iter()
                .enumerate()
                .rev()
                .fold(0.0, |acc, (i, &j)| profits[i][j] + acc);
            best = best.max(v);
        }
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return Some(best);
            }
            idx[pos] += 1;
            if idx[pos] < choices[pos] {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Feasible, consistent with the table, and (when enumerable) optimal.
pub fn verify_allocation(alloc: &BudgetAllocation, profits: &[Vec<f64>], l: usize) -> bool {
    if check_classes(profits).is_err() || alloc.rows.len() != profits.len() {
        return false;
    }
    for (i, row) in alloc.rows.iter().enumerate() {
        if row.layer != i || row.budget >= profits[i].len() || row.profit != profits[i][row.budget] {
            return false;
        }
    }
    if alloc.total_cost() > l {
        return false;
    }
    match brute_force_mckp(profits, l) {
        Some(best) => alloc.total_profit() == best,
        None => true,
    }
}
