//! Multigrid-preconditioned conjugate gradients for `(M + kappa L) u = b` on
//! masked cell grids.
//!
//! Every level keeps a ring of inactive cells around its border, so stencil
//! loops never leave the array. Inactive cells are identity rows with zero
//! right-hand side and stay zero.

use crate::error::{Error, Result};
use rayon::prelude::*;

/// Levels stop coarsening below this many cells per side.
const COARSEST: usize = 8;
const COARSEST_SWEEPS: usize = 30;

#[derive(Clone, Debug)]
pub(crate) struct Level {
    pub nx: usize,
    pub ny: usize,
    /// Mass (identity part) per cell.
    pub m: Vec<f64>,
    /// Diagonal of `L`.
    pub l: Vec<f64>,
    /// Coupling to the right neighbour.
    pub cx: Vec<f64>,
    /// Coupling to the upper neighbour.
    pub cy: Vec<f64>,
    pub active: Vec<bool>,
}

impl Level {
    pub fn new(nx: usize, ny: usize) -> Self {
        let n = nx * ny;
        Level { nx, ny, m: vec![1.0; n], l: vec![0.0; n], cx: vec![0.0; n], cy: vec![0.0; n], active: vec![false; n] }
    }

    fn apply(&self, kappa: f64, x: &[f64], y: &mut [f64]) {
        let nx = self.nx;
        y.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
            if j == 0 || j + 1 == self.ny {
                return;
            }
            for i in 1..nx - 1 {
                let k = j * nx + i;
                let off = self.cx[k] * x[k + 1]
                    + self.cx[k - 1] * x[k - 1]
                    + self.cy[k] * x[k + nx]
                    + self.cy[k - nx] * x[k - nx];
                row[i] = (self.m[k] + kappa * self.l[k]) * x[k] - kappa * off;
            }
        });
    }

    fn residual(&self, kappa: f64, x: &[f64], b: &[f64], r: &mut [f64]) {
        self.apply(kappa, x, r);
        r.par_iter_mut().zip(b).for_each(|(ri, bi)| *ri = bi - *ri);
    }

    /// Gauss-Seidel on the cells with `(i + j) % 2 == color`.
    fn smooth(&self, kappa: f64, x: &mut [f64], b: &[f64], color: usize) {
        let nx = self.nx;
        for j in 1..self.ny - 1 {
            let start = 1 + (j + 1 + color) % 2;
            for i in (start..nx - 1).step_by(2) {
                let k = j * nx + i;
                if !self.active[k] {
                    continue;
                }
                let off = self.cx[k] * x[k + 1]
                    + self.cx[k - 1] * x[k - 1]
                    + self.cy[k] * x[k + nx]
                    + self.cy[k - nx] * x[k - nx];
                x[k] = (b[k] + kappa * off) / (self.m[k] + kappa * self.l[k]);
            }
        }
    }

    /// Coarse cell `I` aggregates fine cells `2I - 1` and `2I`. The Laplacian
    /// part of the Galerkin product is halved, which matches rediscretizing
    /// on the doubled spacing.
    fn coarsen(&self) -> Level {
        let (ncx, ncy) = ((self.nx + 3) / 2, (self.ny + 3) / 2);
        let mut c = Level::new(ncx, ncy);
        let fine = |i: isize, j: isize| -> Option<usize> {
            (i >= 0 && j >= 0 && (i as usize) < self.nx && (j as usize) < self.ny).then(|| j as usize * self.nx + i as usize)
        };
        for jc in 0..ncy {
            for ic in 0..ncx {
                let kc = jc * ncx + ic;
                let (i0, j0) = (2 * ic as isize - 1, 2 * jc as isize - 1);
                let mut mass = 0.0;
                let mut diag = 0.0;
                let mut any = false;
                for (di, dj) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                    if let Some(k) = fine(i0 + di, j0 + dj) {
                        if self.active[k] {
                            any = true;
                            mass += self.m[k];
                            diag += self.l[k];
                        }
                    }
                }
                if !any {
                    continue;
                }
                for dj in 0..2 {
                    if let Some(k) = fine(i0, j0 + dj) {
                        diag -= 2.0 * self.cx[k];
                    }
                }
                for di in 0..2 {
                    if let Some(k) = fine(i0 + di, j0) {
                        diag -= 2.0 * self.cy[k];
                    }
                }
                let mut cx = 0.0;
                let mut cy = 0.0;
                for d in 0..2 {
                    if let Some(k) = fine(i0 + 1, j0 + d) {
                        cx += self.cx[k];
                    }
                    if let Some(k) = fine(i0 + d, j0 + 1) {
                        cy += self.cy[k];
                    }
                }
                c.active[kc] = true;
                c.m[kc] = mass;
                c.l[kc] = 0.5 * diag;
                c.cx[kc] = 0.5 * cx;
                c.cy[kc] = 0.5 * cy;
            }
        }
        c
    }
}

struct Work {
    x: Vec<f64>,
    b: Vec<f64>,
    r: Vec<f64>,
}

pub(crate) struct Multigrid {
    pub levels: Vec<Level>,
    work: Vec<Work>,
}

#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct SolveStats {
    pub iterations: usize,
}

/// Fixed-size blocks keep the summation order, and so the result, independent
/// of scheduling.
const DOT_BLOCK: usize = 8192;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let parts: Vec<f64> = a
        .par_chunks(DOT_BLOCK)
        .zip(b.par_chunks(DOT_BLOCK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
        .collect();
    parts.iter().sum()
}

impl Multigrid {
    pub fn new(fine: Level) -> Self {
        let mut levels = vec![fine];
        while let Some(last) = levels.last() {
            if last.nx.min(last.ny) <= COARSEST {
                break;
            }
            let next = last.coarsen();
            levels.push(next);
        }
        let work = levels
            .iter()
            .map(|l| {
                let n = l.nx * l.ny;
                Work { x: vec![0.0; n], b: vec![0.0; n], r: vec![0.0; n] }
            })
            .collect();
        Multigrid { levels, work }
    }

    /// Symmetric V(1,1) cycle from a zero start; `work[k].b` holds the
    /// right side and `work[k].x` receives the result.
    fn vcycle(&mut self, k: usize, kappa: f64) {
        let (head, tail) = self.work.split_at_mut(k + 1);
        let w = &mut head[k];
        let lv = &self.levels[k];
        w.x.iter_mut().for_each(|v| *v = 0.0);
        if k + 1 == self.levels.len() {
            for _ in 0..COARSEST_SWEEPS {
                lv.smooth(kappa, &mut w.x, &w.b, 0);
                lv.smooth(kappa, &mut w.x, &w.b, 1);
                lv.smooth(kappa, &mut w.x, &w.b, 1);
                lv.smooth(kappa, &mut w.x, &w.b, 0);
            }
            return;
        }
        lv.smooth(kappa, &mut w.x, &w.b, 0);
        lv.smooth(kappa, &mut w.x, &w.b, 1);
        lv.residual(kappa, &w.x, &w.b, &mut w.r);
        let cw = &mut tail[0];
        let cl = &self.levels[k + 1];
        cw.b.iter_mut().for_each(|v| *v = 0.0);
        for j in 1..lv.ny - 1 {
            for i in 1..lv.nx - 1 {
                let kf = j * lv.nx + i;
                if lv.active[kf] {
                    cw.b[j.div_ceil(2) * cl.nx + i.div_ceil(2)] += w.r[kf];
                }
            }
        }
        self.vcycle(k + 1, kappa);
        let (head, tail) = self.work.split_at_mut(k + 1);
        let (w, cw) = (&mut head[k], &tail[0]);
        let lv = &self.levels[k];
        let cnx = self.levels[k + 1].nx;
        for j in 1..lv.ny - 1 {
            for i in 1..lv.nx - 1 {
                let kf = j * lv.nx + i;
                if lv.active[kf] {
                    w.x[kf] += cw.x[j.div_ceil(2) * cnx + i.div_ceil(2)];
                }
            }
        }
        lv.smooth(kappa, &mut w.x, &w.b, 1);
        lv.smooth(kappa, &mut w.x, &w.b, 0);
    }

    fn precondition(&mut self, kappa: f64, r: &[f64], z: &mut [f64]) {
        self.work[0].b.copy_from_slice(r);
        self.vcycle(0, kappa);
        z.copy_from_slice(&self.work[0].x);
    }

    /// Preconditioned CG on the finest level, warm-started from `x`.
    pub fn solve(&mut self, kappa: f64, b: &[f64], x: &mut [f64], tol: f64, max_iter: usize) -> Result<SolveStats> {
        let n = b.len();
        let bnorm = dot(b, b).sqrt();
        if bnorm == 0.0 {
            x.iter_mut().for_each(|v| *v = 0.0);
            return Ok(SolveStats::default());
        }
        let mut r = vec![0.0; n];
        self.levels[0].residual(kappa, x, b, &mut r);
        let mut rnorm = dot(&r, &r).sqrt();
        if rnorm <= tol * bnorm {
            return Ok(SolveStats { iterations: 0 });
        }
        let mut z = vec![0.0; n];
        self.precondition(kappa, &r, &mut z);
        let mut p = z.clone();
        let mut q = vec![0.0; n];
        let mut rz = dot(&r, &z);
        for it in 1..=max_iter {
            self.levels[0].apply(kappa, &p, &mut q);
            let alpha = rz / dot(&p, &q);
            x.par_iter_mut().zip(&p).for_each(|(xi, pi)| *xi += alpha * pi);
            r.par_iter_mut().zip(&q).for_each(|(ri, qi)| *ri -= alpha * qi);
            rnorm = dot(&r, &r).sqrt();
            if rnorm <= tol * bnorm {
                return Ok(SolveStats { iterations: it });
            }
            self.precondition(kappa, &r, &mut z);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            p.par_iter_mut().zip(&z).for_each(|(pi, zi)| *pi = zi + beta * *pi);
        }
        Err(Error::Numeric { msg: format!("conjugate gradients did not reach {tol:e} in {max_iter} iterations"), residual: rnorm / bnorm })
    }
}
