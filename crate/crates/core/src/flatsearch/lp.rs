//! Exact two-phase tableau simplex for `min cᵀz, Az = b, z ≥ 0` with `b ≥ 0`.
//!
//! Bland's rule throughout, so degenerate pivots cannot cycle. The artificial
//! columns stay in the tableau after phase 1 (barred from re-entering): they
//! hold `B⁻¹`, from which the simplex multipliers `y = c_B B⁻¹` are read.

use num_traits::{Signed, Zero};

use crate::seqvec::Rat;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct LpSolution {
    pub z: Vec<Rat>,
    /// Optimal solution of the dual `max bᵀy, Aᵀy ≤ c`.
    pub y: Vec<Rat>,
    pub value: Rat,
    pub pivots: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LpFailure {
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rat>>,
    obj: Vec<Rat>,
    basis: Vec<usize>,
    width: usize,
    pivots: usize,
}

impl Tableau {
    fn rhs(&self) -> usize {
        self.width
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut Vec<Rat>| {
            let f = row[c].clone();
            if !f.is_zero() {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    if !pv.is_zero() {
                        *v -= &f * pv;
                    }
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Runs to optimality over the columns `< allowed`.
    fn optimize(&mut self, allowed: usize) -> Result<(), LpFailure> {
        loop {
            let Some(c) = (0..allowed).find(|&j| self.obj[j].is_negative()) else {
                return Ok(());
            };
            let rhs = self.rhs();
            let mut best: Option<(Rat, usize)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[rhs] / &row[c];
                    let better = match &best {
                        None => true,
                        Some((b, bi)) => ratio < *b || (ratio == *b && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((ratio, i));
                    }
                }
            }
            let (_, r) = best.ok_or(LpFailure::Unbounded)?;
            self.pivot(r, c);
        }
    }

    fn set_objective(&mut self, costs: &[Rat]) {
        let rhs = self.rhs();
        let mut obj: Vec<Rat> = costs.to_vec();
        obj.push(Rat::zero());
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &costs[self.basis[i]];
            if !cb.is_zero() {
                for j in 0..=rhs {
                    obj[j] -= cb * &row[j];
                }
            }
        }
        self.obj = obj;
    }
}

pub(crate) fn solve(a: &[Vec<Rat>], b: &[Rat], c: &[Rat]) -> Result<LpSolution, LpFailure> {
    let m = a.len();
    let n = c.len();
    debug_assert!(b.iter().all(|v| !v.is_negative()));
    let width = n + m;
    let rows: Vec<Vec<Rat>> = (0..m)
        .map(|i| {
            let mut row = a[i].clone();
            row.extend((0..m).map(|k| if k == i { Rat::from_integer(1.into()) } else { Rat::zero() }));
            row.push(b[i].clone());
            row
        })
        .collect();
    let mut t = Tableau { rows, obj: Vec::new(), basis: (n..n + m).collect(), width, pivots: 0 };

    let mut phase1: Vec<Rat> = vec![Rat::zero(); n];
    phase1.extend((0..m).map(|_| Rat::from_integer(1.into())));
    t.set_objective(&phase1);
    t.optimize(width)?;
    if !t.obj[width].is_zero() {
        return Err(LpFailure::Infeasible);
    }
    for r in 0..m {
        if t.basis[r] >= n {
            if let Some(j) = (0..n).find(|&j| !t.rows[r][j].is_zero()) {
                t.pivot(r, j);
            }
        }
    }

    let mut costs = c.to_vec();
    costs.extend((0..m).map(|_| Rat::zero()));
    t.set_objective(&costs);
    t.optimize(n)?;

    let mut z = vec![Rat::zero(); n];
    for (r, &bv) in t.basis.iter().enumerate() {
        if bv < n {
            z[bv] = t.rows[r][width].clone();
        }
    }
    let y = (0..m)
        .map(|i| {
            t.basis
                .iter()
                .enumerate()
                .map(|(r, &bv)| &costs[bv] * &t.rows[r][n + i])
                .fold(Rat::zero(), |acc, v| acc + v)
        })
        .collect();
    let value = c.iter().zip(&z).map(|(ci, zi)| ci * zi).fold(Rat::zero(), |acc, v| acc + v);
    Ok(LpSolution { z, y, value, pivots: t.pivots })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqvec::rat;

    fn r(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| rat(x, 1)).collect()
    }

    #[test]
    fn small_program_and_duality() {
        // min −x1 − x2  s.t. x1 + 2x2 + s1 = 4, 3x1 + x2 + s2 = 6
        let a = vec![r(&[1, 2, 1, 0]), r(&[3, 1, 0, 1])];
        let b = r(&[4, 6]);
        let c = r(&[-1, -1, 0, 0]);
        let s = solve(&a, &b, &c).unwrap();
        assert_eq!(s.z[..2], [rat(8, 5), rat(6, 5)]);
        assert_eq!(s.value, rat(-14, 5));
        let dual: Rat = s.y.iter().zip(&b).map(|(y, b)| y * b).sum();
        assert_eq!(dual, s.value);
        for j in 0..4 {
            let col: Rat = (0..2).map(|i| &a[i][j] * &s.y[i]).sum();
            assert!(col <= c[j]);
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        // x1 + x2 = 1 and x1 + x2 = 2
        let a = vec![r(&[1, 1]), r(&[1, 1])];
        assert_eq!(solve(&a, &r(&[1, 2]), &r(&[0, 0])), Err(LpFailure::Infeasible));
        // min −x1, x1 − x2 = 0
        let a = vec![r(&[1, -1])];
        assert_eq!(solve(&a, &r(&[0]), &r(&[-1, 0])), Err(LpFailure::Unbounded));
    }

    #[test]
    fn redundant_rows() {
        let a = vec![r(&[1, 1, 0]), r(&[2, 2, 0]), r(&[0, 1, 1])];
        let s = solve(&a, &r(&[1, 2, 1]), &r(&[1, 2, 0])).unwrap();
        assert_eq!(s.value, rat(1, 1));
    }
}
