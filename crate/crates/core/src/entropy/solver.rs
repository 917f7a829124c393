//! Maximizes `G(σ) = ‖√ρ √(I⊗σ)‖₁` over density matrices `σ`.
//!
//! `σ = XX†/tr(XX†)` turns the constrained problem into an unconstrained
//! one over `X`, which L-BFGS handles well even when the optimum sits on the
//! boundary of the state space. Every iterate carries a Frank–Wolfe upper
//! bound `G/2 + λ_max(W)`, where `W` is the supergradient.

use std::collections::VecDeque;

use nalgebra::DVector;

use crate::linalg::{apply_spectral, eigh, eigvalsh, Mat, C64};

const MEMORY: usize = 8;
const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACK: usize = 50;
/// Eigenvalues of `ρ` below this fraction of the largest are treated as zero.
const SUPPORT_REL: f64 = 1e-14;
/// Same for the reduced operator `S†(I⊗σ)S`.
const PINV_REL: f64 = 1e-15;

pub(crate) struct Problem {
    /// `V √Λ` over the support of `ρ`, so that `ρ = S S†`.
    support: Mat,
    d_a: usize,
    d_b: usize,
    eta: f64,
}

pub(crate) struct Outcome {
    pub sigma: Mat,
    pub objective: f64,
    pub upper: f64,
    pub iterations: usize,
    pub last_improvement: f64,
    pub converged: bool,
    pub history: Vec<f64>,
}

fn bits(g: f64) -> f64 {
    2.0 * g.log2()
}

struct Point {
    x: DVector<f64>,
    sigma: Mat,
    g: f64,
    w: Mat,
}

impl Problem {
    pub fn new(rho: &Mat, d_a: usize, d_b: usize, eta: f64) -> Self {
        let (vals, vecs) = eigh(rho);
        let cut = vals.first().copied().unwrap_or(0.0).max(0.0) * SUPPORT_REL;
        let rank = vals.iter().take_while(|&&l| l > cut).count().max(1);
        let mut support = vecs.columns(0, rank).into_owned();
        for (k, mut col) in support.column_iter_mut().enumerate() {
            col *= C64::new(vals[k].max(0.0).sqrt(), 0.0);
        }
        Self { support, d_a, d_b, eta }
    }

    fn regularize(&self, sigma: &Mat) -> Mat {
        let d = self.d_b as f64;
        sigma.scale(1.0 - self.eta) + Mat::identity(self.d_b, self.d_b).scale(self.eta / d)
    }

    fn lifted(&self, sigma_reg: &Mat) -> Mat {
        let tau = Mat::identity(self.d_a, self.d_a).kronecker(sigma_reg);
        self.support.adjoint() * tau * &self.support
    }

    /// `G` at an already regularized `σ`.
    pub fn objective(&self, sigma_reg: &Mat) -> f64 {
        eigvalsh(&self.lifted(sigma_reg)).iter().map(|l| l.max(0.0).sqrt()).sum()
    }

    /// `G` and the supergradient `W = ½ tr_A[S M^{-1/2} S†]`, `M = S†(I⊗σ)S`, at a regularized `σ`.
    fn value_and_gradient(&self, sigma_reg: &Mat) -> (f64, Mat) {
        let (vals, vecs) = eigh(&self.lifted(sigma_reg));
        let top = vals.first().copied().unwrap_or(0.0).max(0.0);
        let g = vals.iter().map(|l| l.max(0.0).sqrt()).sum();
        let cut = top * PINV_REL;
        let inv_sqrt = apply_spectral(&vals, &vecs, |l| C64::new(if l > cut { 1.0 / l.sqrt() } else { 0.0 }, 0.0));
        let k = &self.support * inv_sqrt * self.support.adjoint();
        let db = self.d_b;
        let mut w = Mat::zeros(db, db);
        for a in 0..self.d_a {
            w += k.view((a * db, a * db), (db, db));
        }
        (g, w.scale(0.5))
    }

    fn to_matrix(&self, x: &DVector<f64>) -> Mat {
        Mat::from_fn(self.d_b, self.d_b, |r, c| {
            let k = 2 * (c * self.d_b + r);
            C64::new(x[k], x[k + 1])
        })
    }

    fn to_vector(&self, m: &Mat) -> DVector<f64> {
        let mut x = DVector::zeros(2 * self.d_b * self.d_b);
        for c in 0..self.d_b {
            for r in 0..self.d_b {
                let k = 2 * (c * self.d_b + r);
                x[k] = m[(r, c)].re;
                x[k + 1] = m[(r, c)].im;
            }
        }
        x
    }

    /// Unit-trace `σ = XX†/tr(XX†)` and the scale `tr(XX†)`.
    fn sigma_of(&self, x: &DVector<f64>) -> (Mat, f64) {
        let m = self.to_matrix(x);
        let s = &m * m.adjoint();
        let t = s.trace().re;
        (s.unscale(t), t)
    }

    fn point(&self, x: DVector<f64>) -> Point {
        let (sigma, _) = self.sigma_of(&x);
        let (g, w) = self.value_and_gradient(&self.regularize(&sigma));
        Point { x, sigma, g, w }
    }

    fn trial(&self, x: &DVector<f64>) -> f64 {
        let (sigma, t) = self.sigma_of(x);
        if !(t.is_finite() && t > 0.0) {
            return f64::NEG_INFINITY;
        }
        self.objective(&self.regularize(&sigma))
    }

    /// Gradient of `G(σ_reg(X))` in the real coordinates of `X`.
    fn gradient(&self, p: &Point) -> DVector<f64> {
        let m = self.to_matrix(&p.x);
        let t = m.norm_squared();
        let c = (&p.w * &p.sigma).trace().re;
        let shifted = &p.w - Mat::identity(self.d_b, self.d_b).scale(c);
        self.to_vector(&(shifted * m).scale(2.0 * (1.0 - self.eta) / t))
    }

    fn upper_bound(&self, p: &Point) -> f64 {
        let top = eigvalsh(&p.w).first().copied().unwrap_or(0.0);
        (p.g / 2.0 + top).max(p.g)
    }

    /// Exact line search along the segment towards the top eigenvector of `W`.
    fn frank_wolfe(&self, p: &Point) -> Option<Point> {
        let (_, vecs) = eigh(&p.w);
        let v = vecs.column(0).into_owned();
        let vertex = &v * v.adjoint();
        let at = |a: f64| self.objective(&self.regularize(&(p.sigma.scale(1.0 - a) + vertex.scale(a))));
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut m1 = hi - phi * (hi - lo);
        let mut m2 = lo + phi * (hi - lo);
        let (mut f1, mut f2) = (at(m1), at(m2));
        for _ in 0..60 {
            if f1 < f2 {
                lo = m1;
                m1 = m2;
                f1 = f2;
                m2 = lo + phi * (hi - lo);
                f2 = at(m2);
            } else {
                hi = m2;
                m2 = m1;
                f2 = f1;
                m1 = hi - phi * (hi - lo);
                f1 = at(m1);
            }
        }
        let mut best = (0.5 * (lo + hi), at(0.5 * (lo + hi)));
        let end = at(1.0);
        if end > best.1 {
            best = (1.0, end);
        }
        if best.1 <= p.g {
            return None;
        }
        let sigma = p.sigma.scale(1.0 - best.0) + vertex.scale(best.0);
        let (vals, vecs) = eigh(&sigma);
        let root = apply_spectral(&vals, &vecs, |l| C64::new(l.max(0.0).sqrt(), 0.0));
        let next = self.point(self.to_vector(&root));
        (next.g > p.g).then_some(next)
    }

    pub fn solve(&self, tol: f64, max_iter: usize) -> Outcome {
        let start = Mat::identity(self.d_b, self.d_b).unscale((self.d_b as f64).sqrt());
        let mut cur = self.point(self.to_vector(&start));
        let mut grad = self.gradient(&cur);
        let mut history = vec![bits(cur.g)];
        let mut memory: VecDeque<(DVector<f64>, DVector<f64>, f64)> = VecDeque::new();
        let mut last_improvement = f64::INFINITY;
        let mut upper = self.upper_bound(&cur);
        let mut converged = false;
        let mut iterations = 0;

        while iterations < max_iter {
            if bits(upper) - bits(cur.g) <= tol {
                converged = true;
                break;
            }
            iterations += 1;

            let mut dir = two_loop(&grad, &memory);
            let mut slope = dir.dot(&grad);
            if !(slope > 0.0) {
                memory.clear();
                dir = grad.clone();
                slope = dir.dot(&grad);
            }
            if memory.is_empty() {
                // scale the first step so it moves X by about 10% of its norm
                let s = 0.1 * cur.x.norm() / dir.norm().max(f64::MIN_POSITIVE);
                dir *= s;
                slope *= s;
            }

            let mut step = 1.0;
            let mut accepted = None;
            for _ in 0..MAX_BACKTRACK {
                let x = &cur.x + &dir * step;
                let f = self.trial(&x);
                if f >= cur.g + ARMIJO * step * slope && f > cur.g {
                    accepted = Some(x);
                    break;
                }
                step *= 0.5;
            }

            let next = match accepted {
                Some(mut x) => {
                    let n = x.norm();
                    if !(0.5..=2.0).contains(&n) {
                        x.unscale_mut(n);
                        memory.clear();
                    }
                    Some(self.point(x))
                }
                None => {
                    memory.clear();
                    self.frank_wolfe(&cur)
                }
            };
            let Some(next) = next else {
                // no ascent direction left at working precision
                converged = bits(upper) - bits(cur.g) <= tol.sqrt();
                last_improvement = 0.0;
                break;
            };

            let next_grad = self.gradient(&next);
            let s = &next.x - &cur.x;
            let y = &grad - &next_grad;
            let sy = s.dot(&y);
            if sy > 1e-14 * s.norm() * y.norm() && sy > 0.0 {
                if memory.len() == MEMORY {
                    memory.pop_front();
                }
                memory.push_back((s, y, 1.0 / sy));
            }

            last_improvement = bits(next.g) - bits(cur.g);
            history.push(bits(next.g));
            cur = next;
            grad = next_grad;
            upper = self.upper_bound(&cur);
            if last_improvement < tol {
                converged = true;
                break;
            }
        }

        Outcome {
            sigma: self.regularize(&cur.sigma),
            objective: cur.g,
            upper,
            iterations,
            last_improvement,
            converged,
            history,
        }
    }
}

/// L-BFGS two-loop recursion for minimizing `−G`, returning an ascent direction.
fn two_loop(grad: &DVector<f64>, memory: &VecDeque<(DVector<f64>, DVector<f64>, f64)>) -> DVector<f64> {
    let mut q = -grad;
    let mut alphas = Vec::with_capacity(memory.len());
    for (s, y, rho) in memory.iter().rev() {
        let a = rho * s.dot(&q);
        q.axpy(-a, y, 1.0);
        alphas.push(a);
    }
    if let Some((s, y, _)) = memory.back() {
        q *= s.dot(y) / y.dot(y);
    }
    for ((s, y, rho), a) in memory.iter().zip(alphas.into_iter().rev()) {
        let b = rho * y.dot(&q);
        q.axpy(a - b, s, 1.0);
    }
    -q
}
