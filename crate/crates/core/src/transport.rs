//! Exact balanced transportation solver.
//!
//! Primal network simplex on the bipartite supply/demand graph: the basis is
//! a spanning tree of `m + n - 1` cells, potentials come from the tree, and
//! each pivot pushes flow around the unique cycle closed by the entering
//! cell. Degenerate stalls switch pricing to Bland's rule.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const PRICING_TOL: f64 = 1e-12;
const BALANCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportPlan {
    /// `flow[i][j]`: mass moved from supply `i` to demand `j`.
    pub flow: Vec<Vec<f64>>,
    pub cost: f64,
    /// Dual potentials certifying optimality: `row[i] + col[j] <= cost[i][j]`
    /// holds exactly for every cell.
    pub row_potential: Vec<f64>,
    pub col_potential: Vec<f64>,
    /// Dual objective of the potentials, a lower bound on any feasible cost.
    pub dual_bound: f64,
    pub pivots: usize,
}

impl TransportPlan {
    pub fn row_sums(&self) -> Vec<f64> {
        self.flow.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let n = self.flow.first().map_or(0, Vec::len);
        (0..n).map(|j| self.flow.iter().map(|r| r[j]).sum()).collect()
    }
}

fn check_masses(masses: &[f64]) -> Result<f64> {
    let sum: f64 = masses.iter().sum();
    if masses.iter().any(|&w| !w.is_finite() || w < 0.0) {
        return Err(Error::UnnormalizedWeights { sum });
    }
    Ok(sum)
}

/// Minimum-cost plan moving `supply` onto `demand` under `cost`
/// (`cost[i][j]`, `supply.len()` rows by `demand.len()` columns).
/// Total supply and demand must agree.
pub fn solve(supply: &[f64], demand: &[f64], cost: &[Vec<f64>]) -> Result<TransportPlan> {
    let (m, n) = (supply.len(), demand.len());
    if m == 0 || n == 0 {
        return Err(Error::EmptyEmbedding);
    }
    let total_supply = check_masses(supply)?;
    let total_demand = check_masses(demand)?;
    if (total_supply - total_demand).abs() > BALANCE_TOL {
        return Err(Error::UnnormalizedWeights { sum: total_supply });
    }
    assert!(
        cost.len() == m && cost.iter().all(|r| r.len() == n),
        "cost matrix must be {m}x{n}"
    );

    let mut tableau = Tableau::northwest_corner(supply, demand);
    let mut pivots = 0;
    let mut degenerate_streak = 0;
    let max_pivots = 50 * (m + n) * (m + n) + 1000;
    loop {
        let (u, v) = tableau.potentials(cost);
        let bland = degenerate_streak > m + n;
        let Some(entering) = tableau.entering(cost, &u, &v, bland) else {
            break;
        };
        let moved = tableau.pivot(entering);
        pivots += 1;
        degenerate_streak = if moved > 0.0 { 0 } else { degenerate_streak + 1 };
        if pivots >= max_pivots {
            break;
        }
    }

    let (u, _) = tableau.potentials(cost);
    // Tighten column potentials so that the dual is feasible by construction.
    let v: Vec<f64> = (0..n)
        .map(|j| {
            (0..m)
                .map(|i| cost[i][j] - u[i])
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let dual_bound = supply.iter().zip(&u).map(|(a, p)| a * p).sum::<f64>()
        + demand.iter().zip(&v).map(|(b, p)| b * p).sum::<f64>();

    let flow = tableau.flow;
    let cost_total = flow
        .iter()
        .zip(cost)
        .flat_map(|(fr, cr)| fr.iter().zip(cr).map(|(f, c)| f * c))
        .sum();
    Ok(TransportPlan {
        flow,
        cost: cost_total,
        row_potential: u,
        col_potential: v,
        dual_bound,
        pivots,
    })
}

struct Tableau {
    m: usize,
    n: usize,
    flow: Vec<Vec<f64>>,
    basic: Vec<Vec<bool>>,
    basis: Vec<(usize, usize)>,
}

impl Tableau {
    fn northwest_corner(supply: &[f64], demand: &[f64]) -> Self {
        let (m, n) = (supply.len(), demand.len());
        let mut a = supply.to_vec();
        let mut b = demand.to_vec();
        let mut flow = vec![vec![0.0; n]; m];
        let mut basic = vec![vec![false; n]; m];
        let mut basis = Vec::with_capacity(m + n - 1);
        let (mut i, mut j) = (0, 0);
        loop {
            let q = a[i].min(b[j]).max(0.0);
            flow[i][j] = q;
            basic[i][j] = true;
            basis.push((i, j));
            a[i] -= q;
            b[j] -= q;
            if i == m - 1 && j == n - 1 {
                break;
            }
            if j == n - 1 || (i < m - 1 && a[i] <= b[j]) {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self {
            m,
            n,
            flow,
            basic,
            basis,
        }
    }

    /// Tree neighbours; nodes `0..m` are rows, `m..m+n` columns.
    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.m + self.n];
        for &(i, j) in &self.basis {
            adj[i].push(self.m + j);
            adj[self.m + j].push(i);
        }
        adj
    }

    fn potentials(&self, cost: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
        let (m, n) = (self.m, self.n);
        let adj = self.adjacency();
        let mut pot = vec![f64::NAN; m + n];
        pot[0] = 0.0;
        let mut queue = VecDeque::from([0]);
        while let Some(node) = queue.pop_front() {
            for &next in &adj[node] {
                if pot[next].is_nan() {
                    let c = if node < m {
                        cost[node][next - m]
                    } else {
                        cost[next][node - m]
                    };
                    pot[next] = c - pot[node];
                    queue.push_back(next);
                }
            }
        }
        let v = pot.split_off(m);
        (pot, v)
    }

    fn entering(&self, cost: &[Vec<f64>], u: &[f64], v: &[f64], bland: bool) -> Option<(usize, usize)> {
        let mut best: Option<((usize, usize), f64)> = None;
        for i in 0..self.m {
            for j in 0..self.n {
                if self.basic[i][j] {
                    continue;
                }
                let reduced = cost[i][j] - u[i] - v[j];
                let scale = 1.0 + cost[i][j].abs();
                if reduced < -PRICING_TOL * scale {
                    if bland {
                        return Some((i, j));
                    }
                    if best.is_none_or(|(_, r)| reduced < r) {
                        best = Some(((i, j), reduced));
                    }
                }
            }
        }
        best.map(|(cell, _)| cell)
    }

    /// Brings `(i, j)` into the basis; returns the mass shifted around the cycle.
    fn pivot(&mut self, (ei, ej): (usize, usize)) -> f64 {
        let m = self.m;
        let adj = self.adjacency();
        // Path through the tree from column ej to row ei.
        let start = m + ej;
        let mut parent = vec![usize::MAX; m + self.n];
        parent[start] = start;
        let mut queue = VecDeque::from([start]);
        while let Some(node) = queue.pop_front() {
            if node == ei {
                break;
            }
            for &next in &adj[node] {
                if parent[next] == usize::MAX {
                    parent[next] = node;
                    queue.push_back(next);
                }
            }
        }
        let mut cells = Vec::new();
        let mut node = ei;
        while node != start {
            let up = parent[node];
            cells.push(if node < m { (node, up - m) } else { (up, node - m) });
            node = up;
        }
        // Walking from the row end, cells alternate -, +, -, ... and the path
        // has odd length, so both ends are donors.
        let (leaving_idx, theta) = cells
            .iter()
            .enumerate()
            .step_by(2)
            .map(|(k, &(i, j))| (k, self.flow[i][j]))
            .fold((usize::MAX, f64::INFINITY), |acc, (k, f)| {
                if f < acc.1 || (f == acc.1 && cells[k] < cells[acc.0]) {
                    (k, f)
                } else {
                    acc
                }
            });
        let theta = theta.max(0.0);

        self.flow[ei][ej] += theta;
        for (k, &(i, j)) in cells.iter().enumerate() {
            let f = &mut self.flow[i][j];
            if k % 2 == 0 {
                *f = (*f - theta).max(0.0);
            } else {
                *f += theta;
            }
        }
        let (li, lj) = cells[leaving_idx];
        self.flow[li][lj] = 0.0;
        self.basic[li][lj] = false;
        self.basic[ei][ej] = true;
        let slot = self.basis.iter().position(|&c| c == (li, lj)).expect("leaving cell is basic");
        self.basis[slot] = (ei, ej);
        theta
    }
}
