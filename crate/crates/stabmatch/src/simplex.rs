//! Dense two-phase simplex over exact rationals.
//!
//! Solves `min c.x  s.t.  A x = b, x >= 0`. Instances here are tiny (one
//! column per edge, one row per node), so a dense tableau is the right
//! tool. Entering column: most negative reduced cost, switching permanently
//! to Bland's rule after a run of degenerate pivots so cycling is
//! impossible; leaving row: exact minimum-ratio test with ties broken by
//! the smallest basic variable index.
//!
//! On infeasibility the phase-1 simplex multipliers are returned: a vector
//! `y` with `y.A_j <= 0` for every column `j` and `y.b > 0`, i.e. the
//! Farkas certificate of `{Ax = b, x >= 0}`.

use crate::rat::Rat;

#[derive(Debug, Clone)]
pub struct StandardLp {
    pub ncols: usize,
    pub rows: Vec<(Vec<Rat>, Rat)>,
    /// Minimized objective, one coefficient per column.
    pub objective: Vec<Rat>,
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal { x: Vec<Rat>, value: Rat },
    Infeasible { farkas: Vec<Rat> },
    Unbounded,
}

struct Tableau {
    /// rows x (ncols + nrows artificials), plus rhs kept separately.
    t: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    basis: Vec<usize>,
    obj: Vec<Rat>,
    /// Negated objective value; transforms like an ordinary row.
    obj_rhs: Rat,
    /// Columns allowed to enter (artificials are banned in phase 2).
    enter_limit: usize,
    degenerate_run: u32,
    bland: bool,
}

const STALL_LIMIT: u32 = 40;
const MAX_PIVOTS: u64 = 200_000;

impl Tableau {
    fn width(&self) -> usize {
        self.t.first().map_or(0, Vec::len)
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let pivot = self.t[pr][pc].clone();
        debug_assert!(pivot.is_positive());
        if pivot != Rat::one() {
            for x in self.t[pr].iter_mut() {
                if !x.is_zero() {
                    *x = &*x / &pivot;
                }
            }
            self.rhs[pr] = &self.rhs[pr] / &pivot;
        }
        let width = self.width();
        let (pivot_row, pivot_rhs) = (self.t[pr].clone(), self.rhs[pr].clone());
        for i in 0..self.t.len() {
            if i == pr {
                continue;
            }
            let f = self.t[i][pc].clone();
            if f.is_zero() {
                continue;
            }
            for j in 0..width {
                if !pivot_row[j].is_zero() {
                    self.t[i][j] = &self.t[i][j] - &(&f * &pivot_row[j]);
                }
            }
            self.rhs[i] = &self.rhs[i] - &(&f * &pivot_rhs);
        }
        let f = self.obj[pc].clone();
        if !f.is_zero() {
            for j in 0..width {
                if !pivot_row[j].is_zero() {
                    self.obj[j] = &self.obj[j] - &(&f * &pivot_row[j]);
                }
            }
            self.obj_rhs = &self.obj_rhs - &(&f * &pivot_rhs);
        }
        self.basis[pr] = pc;
    }

    fn entering(&self) -> Option<usize> {
        if self.bland {
            (0..self.enter_limit).find(|&j| self.obj[j].is_negative())
        } else {
            let mut best: Option<usize> = None;
            for j in 0..self.enter_limit {
                if self.obj[j].is_negative()
                    && best.is_none_or(|b| self.obj[j] < self.obj[b])
                {
                    best = Some(j);
                }
            }
            best
        }
    }

    fn leaving(&self, pc: usize) -> Option<usize> {
        let mut best: Option<(Rat, usize)> = None;
        for i in 0..self.t.len() {
            if !self.t[i][pc].is_positive() {
                continue;
            }
            let ratio = &self.rhs[i] / &self.t[i][pc];
            match &best {
                None => best = Some((ratio, i)),
                Some((r, bi)) => {
                    if ratio < *r || (ratio == *r && self.basis[i] < self.basis[*bi]) {
                        best = Some((ratio, i));
                    }
                }
            }
        }
        best.map(|(_, i)| i)
    }

    /// Runs pivots until optimal (`Ok`) or unbounded (`Err`).
    fn optimize(&mut self) -> Result<(), ()> {
        let mut pivots: u64 = 0;
        while let Some(pc) = self.entering() {
            let Some(pr) = self.leaving(pc) else {
                return Err(());
            };
            let before = self.obj_rhs.clone();
            self.pivot(pr, pc);
            if self.obj_rhs == before {
                self.degenerate_run += 1;
                if self.degenerate_run >= STALL_LIMIT {
                    self.bland = true;
                }
            } else {
                self.degenerate_run = 0;
            }
            pivots += 1;
            assert!(pivots < MAX_PIVOTS, "simplex pivot budget exceeded");
        }
        Ok(())
    }
}

pub fn solve(lp: &StandardLp) -> LpOutcome {
    let nrows = lp.rows.len();
    let ncols = lp.ncols;
    debug_assert!(lp.objective.len() == ncols);
    debug_assert!(lp.rows.iter().all(|(r, _)| r.len() == ncols));

    // Normalize to b >= 0, remembering flipped rows for the certificate.
    let mut flipped = vec![false; nrows];
    let mut t: Vec<Vec<Rat>> = Vec::with_capacity(nrows);
    let mut rhs: Vec<Rat> = Vec::with_capacity(nrows);
    for (i, (coeffs, b)) in lp.rows.iter().enumerate() {
        let mut row: Vec<Rat> = Vec::with_capacity(ncols + nrows);
        if b.is_negative() {
            flipped[i] = true;
            row.extend(coeffs.iter().map(|c| -c));
            rhs.push(-b);
        } else {
            row.extend(coeffs.iter().cloned());
            rhs.push(b.clone());
        }
        row.extend((0..nrows).map(|j| {
            if j == i {
                Rat::one()
            } else {
                Rat::zero()
            }
        }));
        t.push(row);
    }

    // Phase 1: minimize the sum of artificials.
    let mut obj = vec![Rat::zero(); ncols + nrows];
    let mut obj_rhs = Rat::zero();
    for i in 0..nrows {
        for j in 0..ncols {
            obj[j] = &obj[j] - &t[i][j];
        }
        obj_rhs = &obj_rhs - &rhs[i];
    }
    let mut tab = Tableau {
        t,
        rhs,
        basis: (ncols..ncols + nrows).collect(),
        obj,
        obj_rhs,
        enter_limit: ncols,
        degenerate_run: 0,
        bland: false,
    };
    tab.optimize().expect("phase 1 is bounded below by zero");

    let infeasibility = -tab.obj_rhs.clone();
    if infeasibility.is_positive() {
        // y_i = 1 - reduced cost of artificial column i, undoing row flips.
        let farkas = (0..nrows)
            .map(|i| {
                let yi = Rat::one() - &tab.obj[ncols + i];
                if flipped[i] {
                    -yi
                } else {
                    yi
                }
            })
            .collect();
        return LpOutcome::Infeasible { farkas };
    }

    // Drive leftover artificials out of the basis; a row with no structural
    // coefficient is redundant and dropped.
    let mut row = 0;
    while row < tab.t.len() {
        if tab.basis[row] >= ncols {
            match (0..ncols).find(|&j| !tab.t[row][j].is_zero()) {
                Some(j) => {
                    // rhs is zero here, so the pivot is degenerate but sign-safe
                    if tab.t[row][j].is_negative() {
                        let width = tab.width();
                        for k in 0..width {
                            if !tab.t[row][k].is_zero() {
                                tab.t[row][k] = -&tab.t[row][k];
                            }
                        }
                        tab.rhs[row] = -&tab.rhs[row];
                    }
                    tab.pivot(row, j);
                    row += 1;
                }
                None => {
                    tab.t.remove(row);
                    tab.rhs.remove(row);
                    tab.basis.remove(row);
                }
            }
        } else {
            row += 1;
        }
    }

    // Phase 2 on the real objective.
    let width = tab.width();
    tab.obj = vec![Rat::zero(); width];
    tab.obj[..ncols].clone_from_slice(&lp.objective);
    tab.obj_rhs = Rat::zero();
    for (i, &bv) in tab.basis.iter().enumerate() {
        let c = lp.objective[bv].clone();
        if c.is_zero() {
            continue;
        }
        for j in 0..width {
            if !tab.t[i][j].is_zero() {
                tab.obj[j] = &tab.obj[j] - &(&c * &tab.t[i][j]);
            }
        }
        tab.obj_rhs = &tab.obj_rhs - &(&c * &tab.rhs[i]);
    }
    tab.enter_limit = ncols;
    tab.degenerate_run = 0;
    tab.bland = false;
    if tab.optimize().is_err() {
        return LpOutcome::Unbounded;
    }

    let mut x = vec![Rat::zero(); ncols];
    for (i, &bv) in tab.basis.iter().enumerate() {
        if bv < ncols {
            x[bv] = tab.rhs[i].clone();
        }
    }
    let value = -tab.obj_rhs;
    LpOutcome::Optimal { x, value }
}
