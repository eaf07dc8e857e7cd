//! Small dense linear programs solved with a two-phase tableau simplex.
//!
//! Problem sizes here are tiny (a handful of directions in at most a few
//! dimensions), so a dense tableau with Bland's anti-cycling rule is exact
//! enough and easy to audit.

use crate::error::{GeometryError, Result};

/// Pivot elements smaller than this are treated as zero.
const PIVOT_TOL: f64 = 1e-12;

/// Phase-one residual above which a program is declared infeasible.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone)]
struct Constraint {
    coeffs: Vec<f64>,
    relation: Relation,
    rhs: f64,
}

/// A linear program over `num_vars` variables. Variables are nonnegative
/// unless marked free.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    num_vars: usize,
    sense: Sense,
    objective: Vec<f64>,
    free: Vec<bool>,
    constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

impl LinearProgram {
    pub fn new(num_vars: usize, sense: Sense) -> Self {
        Self {
            num_vars,
            sense,
            objective: vec![0.0; num_vars],
            free: vec![false; num_vars],
            constraints: Vec::new(),
        }
    }

    pub fn set_objective(&mut self, coeffs: &[f64]) -> &mut Self {
        assert_eq!(coeffs.len(), self.num_vars);
        self.objective.copy_from_slice(coeffs);
        self
    }

    pub fn set_free(&mut self, var: usize) -> &mut Self {
        self.free[var] = true;
        self
    }

    pub fn add_constraint(&mut self, coeffs: &[f64], relation: Relation, rhs: f64) -> &mut Self {
        assert_eq!(coeffs.len(), self.num_vars);
        self.constraints.push(Constraint {
            coeffs: coeffs.to_vec(),
            relation,
            rhs,
        });
        self
    }

    pub fn solve(&self) -> Result<LpSolution> {
        // Column layout: split originals (x+ then x- for free vars), then
        // one slack/surplus per inequality row.
        let mut col_of = Vec::with_capacity(self.num_vars);
        let mut ncols = 0usize;
        for &is_free in &self.free {
            col_of.push((ncols, if is_free { Some(ncols + 1) } else { None }));
            ncols += if is_free { 2 } else { 1 };
        }
        let structural = ncols;
        let num_slack = self
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();
        let m = self.constraints.len();
        let total = structural + num_slack;

        let mut a = vec![vec![0.0; total]; m];
        let mut b = vec![0.0; m];
        let mut slack_idx = structural;
        for (i, c) in self.constraints.iter().enumerate() {
            for (j, &v) in c.coeffs.iter().enumerate() {
                let (pos, neg) = col_of[j];
                a[i][pos] = v;
                if let Some(neg) = neg {
                    a[i][neg] = -v;
                }
            }
            match c.relation {
                Relation::Le => {
                    a[i][slack_idx] = 1.0;
                    slack_idx += 1;
                }
                Relation::Ge => {
                    a[i][slack_idx] = -1.0;
                    slack_idx += 1;
                }
                Relation::Eq => {}
            }
            b[i] = c.rhs;
            if b[i] < 0.0 {
                b[i] = -b[i];
                a[i].iter_mut().for_each(|v| *v = -*v);
            }
        }

        let sign = match self.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut cost = vec![0.0; total];
        for (j, &v) in self.objective.iter().enumerate() {
            let (pos, neg) = col_of[j];
            cost[pos] = sign * v;
            if let Some(neg) = neg {
                cost[neg] = -sign * v;
            }
        }

        let mut tab = Tableau::with_artificials(a, b);
        tab.run_phase_one()?;
        tab.run_phase_two(&cost)?;

        let values = tab.primal(total);
        let x: Vec<f64> = col_of
            .iter()
            .map(|&(pos, neg)| values[pos] - neg.map_or(0.0, |n| values[n]))
            .collect();
        let objective = self.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(LpSolution { x, objective })
    }
}

/// Tableau in canonical form: `rows[i]` holds the constraint row (last entry
/// is the right-hand side), `basis[i]` the basic column of row `i`.
struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    num_real: usize,
    /// Columns at or beyond this index are artificial.
    artificial_start: usize,
    width: usize,
}

impl Tableau {
    fn with_artificials(a: Vec<Vec<f64>>, b: Vec<f64>) -> Self {
        let m = a.len();
        let num_real = a.first().map_or(0, |r| r.len());
        let width = num_real + m + 1;
        let mut rows = Vec::with_capacity(m);
        for (i, (row, rhs)) in a.into_iter().zip(b).enumerate() {
            let mut full = vec![0.0; width];
            full[..num_real].copy_from_slice(&row);
            full[num_real + i] = 1.0;
            full[width - 1] = rhs;
            rows.push(full);
        }
        Self {
            rows,
            basis: (num_real..num_real + m).collect(),
            num_real,
            artificial_start: num_real,
            width,
        }
    }

    fn width(&self) -> usize {
        self.width
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        self.rows[r].iter_mut().for_each(|v| *v /= p);
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                row.iter_mut().zip(&pivot_row).for_each(|(v, p)| *v -= f * p);
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Reduced costs for `cost` (length = width - 1, zero on disallowed columns).
    fn reduced_costs(&self, cost: &[f64]) -> (Vec<f64>, f64) {
        let w = self.width();
        let mut red = cost.to_vec();
        let mut obj = 0.0;
        for (row, &bv) in self.rows.iter().zip(&self.basis) {
            let cb = cost[bv];
            if cb != 0.0 {
                for j in 0..w - 1 {
                    red[j] -= cb * row[j];
                }
                obj += cb * row[w - 1];
            }
        }
        (red, obj)
    }

    /// Minimizes `cost` over columns `< allowed` with Bland's rule.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> Result<()> {
        let rhs = self.width() - 1;
        let max_iter = 50_000;
        for _ in 0..max_iter {
            let (red, _) = self.reduced_costs(cost);
            let entering = (0..allowed).find(|&j| red[j] < -PIVOT_TOL && !self.basis.contains(&j));
            let Some(c) = entering else {
                return Ok(());
            };
            let mut best: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c] > PIVOT_TOL {
                    let ratio = row[rhs] / row[c];
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - 1e-15
                                || ((ratio - br).abs() <= 1e-15 && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return Err(GeometryError::Unbounded),
            }
        }
        Err(GeometryError::InternalInconsistency(
            "simplex iteration limit reached".into(),
        ))
    }

    fn run_phase_one(&mut self) -> Result<()> {
        let w = self.width();
        let mut cost = vec![0.0; w - 1];
        cost[self.artificial_start..].iter_mut().for_each(|c| *c = 1.0);
        self.optimize(&cost, w - 1)?;
        let (_, residual) = self.reduced_costs(&cost);
        if residual > FEASIBILITY_TOL {
            return Err(GeometryError::Infeasible);
        }
        // Drive remaining (zero-valued) artificials out of the basis; rows
        // where that is impossible are redundant and get dropped.
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.artificial_start {
                let col = (0..self.num_real).find(|&j| self.rows[i][j].abs() > 1e-9);
                match col {
                    Some(j) => {
                        self.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        self.rows.remove(i);
                        self.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
        Ok(())
    }

    fn run_phase_two(&mut self, cost: &[f64]) -> Result<()> {
        let w = self.width();
        let mut full = vec![0.0; w - 1];
        full[..cost.len()].copy_from_slice(cost);
        // artificial columns are never allowed to re-enter
        self.optimize(&full, self.num_real)
    }

    fn primal(&self, n: usize) -> Vec<f64> {
        let rhs = self.width() - 1;
        let mut x = vec![0.0; n];
        for (row, &bv) in self.rows.iter().zip(&self.basis) {
            if bv < n {
                x[bv] = row[rhs];
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18  ->  (2, 6), 36
        let mut lp = LinearProgram::new(2, Sense::Maximize);
        lp.set_objective(&[3.0, 5.0])
            .add_constraint(&[1.0, 0.0], Relation::Le, 4.0)
            .add_constraint(&[0.0, 2.0], Relation::Le, 12.0)
            .add_constraint(&[3.0, 2.0], Relation::Le, 18.0);
        let sol = lp.solve().unwrap();
        assert!((sol.objective - 36.0).abs() < 1e-12);
        assert!((sol.x[0] - 2.0).abs() < 1e-12);
        assert!((sol.x[1] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn equality_and_free_variables() {
        // min x - y, x + y = 1, y free, y <= 3. x = 1 - y >= 0 binds first,
        // so the optimum is y = 1 with objective -1.
        let mut lp = LinearProgram::new(2, Sense::Minimize);
        lp.set_objective(&[1.0, -1.0])
            .set_free(1)
            .add_constraint(&[1.0, 1.0], Relation::Eq, 1.0)
            .add_constraint(&[0.0, 1.0], Relation::Le, 3.0);
        let sol = lp.solve().unwrap();
        assert!((sol.objective + 1.0).abs() < 1e-12);
        assert!((sol.x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn negative_free_optimum() {
        // min y, y >= -2, y free
        let mut lp = LinearProgram::new(1, Sense::Minimize);
        lp.set_objective(&[1.0])
            .set_free(0)
            .add_constraint(&[1.0], Relation::Ge, -2.0);
        let sol = lp.solve().unwrap();
        assert!((sol.x[0] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1, Sense::Minimize);
        lp.add_constraint(&[1.0], Relation::Le, -1.0);
        assert_eq!(lp.solve(), Err(GeometryError::Infeasible));

        let mut lp = LinearProgram::new(1, Sense::Maximize);
        lp.set_objective(&[1.0]).add_constraint(&[1.0], Relation::Ge, 0.0);
        assert_eq!(lp.solve(), Err(GeometryError::Unbounded));
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(2, Sense::Maximize);
        lp.set_objective(&[1.0, 0.0])
            .add_constraint(&[1.0, 1.0], Relation::Eq, 1.0)
            .add_constraint(&[2.0, 2.0], Relation::Eq, 2.0);
        let sol = lp.solve().unwrap();
        assert!((sol.x[0] - 1.0).abs() < 1e-12);
    }
}
