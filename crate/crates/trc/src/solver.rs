//! ADMM solver for tensor completion under a tensor-ring model whose cores
//! are regularized by the tubal nuclear norm, plus weighted anisotropic TV:
//!
//!   min ½‖X − ℱ(G)‖²_F + λ‖D(X)‖₁ + Σₙ ‖Gₙ‖_TNN   s.t.  P(X) = P(T)
//!
//! split with auxiliaries Z (TV carrier), Y = D(Z), and M (per-core TNN
//! carrier). One iteration runs G → M → [prune] → Z → Y → X → duals → β.
//!
//! [`Solver`] works at face value on whatever data it is given; [`solve`] is
//! the entry point that additionally pins the problem to an internal working
//! scale (see [`WORK_RMS`]) where the fixed-weight TNN term is neither
//! dominant nor inert, then maps the result back to caller units.

use crate::error::{Error, Result};
use crate::tensor::{Mask, Tensor};
use crate::tr::{self, TRChain};
use crate::tsvd;
use crate::tv::{self, DiffStack, DtDSpectrum};
use nalgebra::Cholesky;

/// Observed-entry rms the solver normalizes its internal problem to. At this
/// scale (that of a raw standard-normal chain) the unit-weight TNN term
/// performs rank selection without either flattening the signal (small data)
/// or going inert (large data). λ is co-scaled, so the fit:TV balance is
/// exactly preserved; only the intentionally scale-dependent TNN coupling is
/// pinned to its working regime.
pub const WORK_RMS: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PenaltyRule {
    Multiplicative,
    ResidualDriven,
}

impl std::str::FromStr for PenaltyRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "multiplicative" => Ok(PenaltyRule::Multiplicative),
            "residual-driven" => Ok(PenaltyRule::ResidualDriven),
            other => Err(Error::InvalidArgument(format!("unknown penalty rule '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// TV trade-off λ ≥ 0.
    pub lambda: f64,
    /// Initial penalties [β₁, β₂, β₃], all positive.
    pub beta: [f64; 3],
    /// TV weights, one per mode (zero disables that mode).
    pub weights: Vec<f64>,
    /// Initial bond ranks, one per mode.
    pub tr_ranks: Vec<usize>,
    pub maxiter: usize,
    /// Relative-change stopping bound, > 0.
    pub epsilon: f64,
    /// Multiplicative penalty growth κ ≥ 1.
    pub kappa: f64,
    pub beta_cap: f64,
    /// [η₁, η₂] for the residual-driven rule.
    pub eta: [f64; 2],
    pub penalty_rule: PenaltyRule,
    pub prune: bool,
    pub prune_tol: f64,
    pub prune_interval: usize,
    /// Seed for the core initialization.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            lambda: 3e-4,
            beta: [0.001, 0.001, 0.8],
            weights: Vec::new(),
            tr_ranks: Vec::new(),
            maxiter: 400,
            epsilon: 5e-4,
            kappa: 1.01,
            beta_cap: 10.0,
            eta: [1.1, 0.9],
            penalty_rule: PenaltyRule::Multiplicative,
            prune: false,
            prune_tol: 1e-3,
            prune_interval: 10,
            seed: 0,
        }
    }
}

impl SolverConfig {
    fn validate(&self, order: usize) -> Result<()> {
        if self.lambda < 0.0 {
            return Err(Error::InvalidArgument(format!("lambda {} < 0", self.lambda)));
        }
        if self.beta.iter().any(|&b| b <= 0.0) {
            return Err(Error::InvalidArgument(format!("beta {:?} not positive", self.beta)));
        }
        if self.weights.len() != order {
            return Err(Error::DimMismatch(format!(
                "{} weights for order {}",
                self.weights.len(),
                order
            )));
        }
        if self.tr_ranks.len() != order || self.tr_ranks.iter().any(|&r| r == 0) {
            return Err(Error::InvalidArgument(format!(
                "ranks {:?} invalid for order {}",
                self.tr_ranks, order
            )));
        }
        if self.maxiter == 0 || self.prune_interval == 0 {
            return Err(Error::InvalidArgument("maxiter and prune_interval must be ≥ 1".into()));
        }
        if self.epsilon <= 0.0 {
            return Err(Error::InvalidArgument(format!("epsilon {} ≤ 0", self.epsilon)));
        }
        if self.kappa < 1.0 {
            return Err(Error::InvalidArgument(format!("kappa {} < 1", self.kappa)));
        }
        if self.beta_cap <= 0.0 || self.prune_tol < 0.0 {
            return Err(Error::InvalidArgument("beta_cap/prune_tol out of range".into()));
        }
        Ok(())
    }
}

/// One history record per iteration, serializable as a CSV row.
#[derive(Debug, Clone)]
pub struct HistoryRow {
    pub iter: usize,
    pub relchange: f64,
    pub zeta: [f64; 3],
    pub objective: f64,
    pub ranks: Vec<usize>,
}

pub const HISTORY_HEADER: &str = "iter,relchange,zeta1,zeta2,zeta3,objective,ranks";

impl HistoryRow {
    pub fn csv_row(&self) -> String {
        let ranks: Vec<String> = self.ranks.iter().map(|r| r.to_string()).collect();
        format!(
            "{},{:e},{:e},{:e},{:e},{:e},{}",
            self.iter,
            self.relchange,
            self.zeta[0],
            self.zeta[1],
            self.zeta[2],
            self.objective,
            ranks.join("-")
        )
    }
}

/// Full ADMM state. Fields are public so the individual update steps can be
/// exercised and inspected from tests; `step`/`run` keep them consistent.
pub struct Solver {
    pub cfg: SolverConfig,
    /// Current penalties (grow over iterations).
    pub beta: [f64; 3],
    t: Tensor,
    mask: Mask,
    pub x: Tensor,
    pub chain: TRChain,
    pub m: Vec<Tensor>,
    pub z: Tensor,
    pub y: DiffStack,
    pub lam1: Tensor,
    pub lam2: DiffStack,
    pub lam3: Vec<Tensor>,
    spectrum: DtDSpectrum,
    zeta_prev: Option<[f64; 3]>,
    iter: usize,
    history: Vec<HistoryRow>,
}

impl Solver {
    /// Build the initial state: x = z = zero-filled observation, cores
    /// standard normal, M = cores, Y = D(Z), duals zero.
    pub fn new(t: Tensor, mask: Mask, cfg: SolverConfig) -> Result<Solver> {
        cfg.validate(t.order())?;
        if t.dims() != mask.dims() {
            return Err(Error::DimMismatch(format!(
                "data dims {:?} vs mask dims {:?}",
                t.dims(),
                mask.dims()
            )));
        }
        if !t.is_finite() {
            return Err(Error::NonFinite("solver input".into()));
        }
        let x = mask.zero_fill(&t)?;
        let chain = tr::random_chain(t.dims(), &cfg.tr_ranks, cfg.seed)?;
        let m: Vec<Tensor> = chain.cores().to_vec();
        let lam3: Vec<Tensor> = chain.cores().iter().map(|c| Tensor::zeros(c.dims().to_vec())).collect();
        let z = x.clone();
        let y = tv::apply_d(&z, &cfg.weights)?;
        let lam2 = y.zeros_like();
        let lam1 = Tensor::zeros(t.dims().to_vec());
        let spectrum = tv::dtd_spectrum(t.dims(), &cfg.weights)?;
        let beta = cfg.beta;
        Ok(Solver {
            cfg,
            beta,
            t,
            mask,
            x,
            chain,
            m,
            z,
            y,
            lam1,
            lam2,
            lam3,
            spectrum,
            zeta_prev: None,
            iter: 0,
            history: Vec::new(),
        })
    }

    pub fn target(&self) -> &Tensor {
        &self.t
    }

    pub fn mask(&self) -> &Mask {
        &self.mask
    }

    pub fn iterations(&self) -> usize {
        self.iter
    }

    pub fn history(&self) -> &[HistoryRow] {
        &self.history
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.chain.ranks()
    }

    /// Gauss-Seidel sweep over the cores: each solves its regularized
    /// least-squares subproblem against the subchain of the *current* chain,
    /// via a Cholesky factorization (the system matrix AᵀA + β₃I is SPD).
    pub fn update_g(&mut self) -> Result<()> {
        let b3 = self.beta[2];
        for n in 0..self.chain.len() {
            let a = tr::subchain_matrix(&self.chain, n)?;
            let xn = self.x.unfold_circular(n)?;
            let mut rhs = xn * &a;
            rhs += tr::core_unfold_2(&self.lam3[n])?;
            let mut m2 = tr::core_unfold_2(&self.m[n])?;
            m2 *= b3;
            rhs += m2;
            let mut lhs = a.transpose() * &a;
            for i in 0..lhs.nrows() {
                lhs[(i, i)] += b3;
            }
            let chol = Cholesky::new(lhs)
                .ok_or_else(|| Error::InvalidArgument("core system not SPD".into()))?;
            let gt = chol.solve(&rhs.transpose());
            let shape = {
                let d = self.chain.core(n).dims();
                [d[0], d[1], d[2]]
            };
            self.chain.cores_mut()[n] = tr::core_fold_2(&gt.transpose(), &shape)?;
        }
        Ok(())
    }

    /// Proximal step on each TNN carrier: Mₙ = t_svt(Gₙ − Λ₃ⁿ/β₃, 1/β₃),
    /// with the DFT along the mode-size axis (cores permuted 1,3,2 first).
    pub fn update_m(&mut self) -> Result<()> {
        let b3 = self.beta[2];
        let tau = 1.0 / b3;
        for n in 0..self.chain.len() {
            let mut l = self.chain.core(n).clone();
            l.axpy(-1.0 / b3, &self.lam3[n]);
            let lp = l.permute(&[0, 2, 1]);
            let shrunk = tsvd::t_svt(&lp, tau)?;
            self.m[n] = shrunk.permute(&[0, 2, 1]);
        }
        Ok(())
    }

    /// Remove bond indices whose joint slice energy in M is ≤ prune_tol
    /// times the strongest (always keeping at least one). Keep-sets for all
    /// bonds are decided on the pre-prune M, then applied in one pass to
    /// chain, M and Λ₃.
    pub fn prune_ranks(&mut self) {
        let n = self.chain.len();
        if n < 2 {
            return;
        }
        let mut keeps: Vec<Vec<usize>> = Vec::with_capacity(n);
        for bond in 0..n {
            let next = (bond + 1) % n;
            let r = self.m[bond].dims()[2];
            let mut e = vec![0.0f64; r];
            for (idx, slot) in e.iter_mut().enumerate() {
                *slot = mode3_slice_norm(&self.m[bond], idx) + mode0_slice_norm(&self.m[next], idx);
            }
            let max = e.iter().copied().fold(0.0, f64::max);
            let thr = self.cfg.prune_tol * max;
            let mut keep: Vec<usize> = (0..r).filter(|&i| e[i] > thr).collect();
            if keep.is_empty() {
                let arg = e
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal))
                    .map(|(i, _)| i)
                    .unwrap_or(0);
                keep = vec![arg];
            }
            keeps.push(keep);
        }
        for bond in 0..n {
            let next = (bond + 1) % n;
            let keep = &keeps[bond];
            if keep.len() == self.m[bond].dims()[2] {
                continue;
            }
            self.chain.cores_mut()[bond] = select_mode3(self.chain.core(bond), keep);
            self.m[bond] = select_mode3(&self.m[bond], keep);
            self.lam3[bond] = select_mode3(&self.lam3[bond], keep);
            self.chain.cores_mut()[next] = select_mode0(self.chain.core(next), keep);
            self.m[next] = select_mode0(&self.m[next], keep);
            self.lam3[next] = select_mode0(&self.lam3[next], keep);
        }
    }

    /// Z solves (β₁I + β₂D*D)Z = D*(Λ₂ + β₂Y) + β₁X − Λ₁ in the Fourier
    /// domain. (The + before β₂Y is the stationarity condition of the Z
    /// subproblem for the coupling ⟨Λ₂, Y − D(Z)⟩.)
    pub fn update_z(&mut self) -> Result<()> {
        let mut carrier = self.lam2.clone();
        for (c, yc) in carrier.components_mut().iter_mut().zip(self.y.components()) {
            if let (Some(c), Some(yc)) = (c.as_mut(), yc.as_ref()) {
                c.axpy(self.beta[1], yc);
            }
        }
        let mut j = tv::apply_d_adjoint(&carrier)?;
        j.axpy(self.beta[0], &self.x);
        j.axpy(-1.0, &self.lam1);
        self.z = tv::solve_z(&j, self.beta[0], self.beta[1], &self.spectrum)?;
        Ok(())
    }

    /// Shrinkage on the difference stack: Y = sth(D(Z) − Λ₂/β₂, λ/β₂).
    pub fn update_y(&mut self) -> Result<()> {
        let b2 = self.beta[1];
        let thr = self.cfg.lambda / b2;
        let mut dz = tv::apply_d(&self.z, &self.cfg.weights)?;
        for (c, l2c) in dz.components_mut().iter_mut().zip(self.lam2.components()) {
            if let (Some(c), Some(l2c)) = (c.as_mut(), l2c.as_ref()) {
                for (v, l) in c.data_mut().iter_mut().zip(l2c.data()) {
                    *v = tsvd::sth(*v - l / b2, thr);
                }
            }
        }
        self.y = dz;
        Ok(())
    }

    /// X takes the observed entries verbatim and the stationarity solution
    /// (ℛ_g + Λ₁ + β₁Z)/(1 + β₁) elsewhere. Returns ℛ_g for reuse.
    pub fn update_x(&mut self) -> Result<Tensor> {
        let rg = tr::tr_reconstruct(&self.chain)?;
        let b1 = self.beta[0];
        let denom = 1.0 + b1;
        let data = self.x.data_mut();
        for (lin, v) in data.iter_mut().enumerate() {
            if self.mask.is_observed(lin) {
                *v = self.t.data()[lin];
            } else {
                *v = (rg.data()[lin] + self.lam1.data()[lin] + b1 * self.z.data()[lin]) / denom;
            }
        }
        Ok(rg)
    }

    /// Gradient-ascent steps on all three multiplier blocks.
    pub fn update_duals(&mut self) -> Result<()> {
        let [b1, b2, b3] = self.beta;
        for ((l, zv), xv) in self.lam1.data_mut().iter_mut().zip(self.z.data()).zip(self.x.data()) {
            *l += b1 * (zv - xv);
        }
        let dz = tv::apply_d(&self.z, &self.cfg.weights)?;
        for ((l2c, yc), dzc) in self
            .lam2
            .components_mut()
            .iter_mut()
            .zip(self.y.components())
            .zip(dz.components())
        {
            if let (Some(l2c), Some(yc), Some(dzc)) = (l2c.as_mut(), yc.as_ref(), dzc.as_ref()) {
                for ((l, yv), dv) in l2c.data_mut().iter_mut().zip(yc.data()).zip(dzc.data()) {
                    *l += b2 * (yv - dv);
                }
            }
        }
        for (n, l3) in self.lam3.iter_mut().enumerate() {
            for ((l, mv), gv) in
                l3.data_mut().iter_mut().zip(self.m[n].data()).zip(self.chain.core(n).data())
            {
                *l += b3 * (mv - gv);
            }
        }
        Ok(())
    }

    /// Residuals ζ = [‖Z−X‖, ‖Y−D(Z)‖ (stacked), Σₙ‖Mₙ−Gₙ‖].
    pub fn zeta(&self) -> Result<[f64; 3]> {
        let z1 = self.z.sub(&self.x).frobenius_norm();
        let dz = tv::apply_d(&self.z, &self.cfg.weights)?;
        let mut z2sq = 0.0;
        for (yc, dzc) in self.y.components().iter().zip(dz.components()) {
            if let (Some(yc), Some(dzc)) = (yc.as_ref(), dzc.as_ref()) {
                let d = yc.sub(dzc).frobenius_norm();
                z2sq += d * d;
            }
        }
        let mut z3 = 0.0;
        for (n, m) in self.m.iter().enumerate() {
            z3 += m.sub(self.chain.core(n)).frobenius_norm();
        }
        Ok([z1, z2sq.sqrt(), z3])
    }

    /// Penalty growth: multiplicative β ← min(κβ, cap), or the residual-
    /// driven rule (grow by η₁ only when ζ failed to shrink by factor η₂).
    pub fn update_beta(&mut self, zeta: [f64; 3]) {
        match self.cfg.penalty_rule {
            PenaltyRule::Multiplicative => {
                for b in &mut self.beta {
                    *b = (self.cfg.kappa * *b).min(self.cfg.beta_cap);
                }
            }
            PenaltyRule::ResidualDriven => {
                if let Some(prev) = self.zeta_prev {
                    for i in 0..3 {
                        if zeta[i] > self.cfg.eta[1] * prev[i] {
                            self.beta[i] = (self.cfg.eta[0] * self.beta[i]).min(self.cfg.beta_cap);
                        }
                    }
                }
                self.zeta_prev = Some(zeta);
            }
        }
    }

    /// ½‖X − ℛ_g‖² + λ‖D(X)‖₁ (omitted when λ = 0) + Σₙ TNN(Gₙ permuted).
    pub fn objective(&self, rg: Option<&Tensor>) -> Result<f64> {
        let owned;
        let rg = match rg {
            Some(r) => r,
            None => {
                owned = tr::tr_reconstruct(&self.chain)?;
                &owned
            }
        };
        let fit = self.x.sub(rg).frobenius_norm();
        let mut val = 0.5 * fit * fit;
        if self.cfg.lambda > 0.0 {
            val += self.cfg.lambda * tv::apply_d(&self.x, &self.cfg.weights)?.l1();
        }
        for g in self.chain.cores() {
            val += tsvd::tnn(&g.permute(&[0, 2, 1]))?;
        }
        Ok(val)
    }

    /// One full iteration; returns the relative change of X.
    pub fn step(&mut self) -> Result<f64> {
        self.iter += 1;
        let x_last = self.x.clone();
        self.update_g()?;
        self.update_m()?;
        if self.cfg.prune && self.iter % self.cfg.prune_interval == 0 {
            self.prune_ranks();
        }
        self.update_z()?;
        self.update_y()?;
        let rg = self.update_x()?;
        self.update_duals()?;
        let zeta = self.zeta()?;
        self.update_beta(zeta);
        if !self.x.is_finite() {
            return Err(Error::NonFinite(format!("solver state at iteration {}", self.iter)));
        }
        let rel = self.x.sub(&x_last).frobenius_norm() / x_last.frobenius_norm().max(1e-300);
        let objective = self.objective(Some(&rg))?;
        self.history.push(HistoryRow {
            iter: self.iter,
            relchange: rel,
            zeta,
            objective,
            ranks: self.chain.ranks(),
        });
        Ok(rel)
    }

    /// Iterate to the relative-change bound or maxiter; true iff converged.
    pub fn run(&mut self) -> Result<bool> {
        for _ in 0..self.cfg.maxiter {
            let rel = self.step()?;
            if rel < self.cfg.epsilon {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

fn mode3_slice_norm(t: &Tensor, idx: usize) -> f64 {
    let (r0, i1) = (t.dims()[0], t.dims()[1]);
    let plane = r0 * i1;
    let slice = &t.data()[idx * plane..(idx + 1) * plane];
    slice.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn mode0_slice_norm(t: &Tensor, idx: usize) -> f64 {
    let r0 = t.dims()[0];
    let mut acc = 0.0;
    let mut lin = idx;
    while lin < t.numel() {
        let v = t.data()[lin];
        acc += v * v;
        lin += r0;
    }
    acc.sqrt()
}

fn select_mode3(t: &Tensor, keep: &[usize]) -> Tensor {
    let (r0, i1) = (t.dims()[0], t.dims()[1]);
    let plane = r0 * i1;
    let mut data = Vec::with_capacity(plane * keep.len());
    for &k in keep {
        data.extend_from_slice(&t.data()[k * plane..(k + 1) * plane]);
    }
    Tensor::new(vec![r0, i1, keep.len()], data).expect("mode-3 selection")
}

fn select_mode0(t: &Tensor, keep: &[usize]) -> Tensor {
    let (r0, i1, r1) = (t.dims()[0], t.dims()[1], t.dims()[2]);
    let mut data = Vec::with_capacity(keep.len() * i1 * r1);
    for col in 0..i1 * r1 {
        let base = col * r0;
        for &k in keep {
            data.push(t.data()[base + k]);
        }
    }
    Tensor::new(vec![keep.len(), i1, r1], data).expect("mode-0 selection")
}

/// Scale factor that maps the observed entries of t to rms [`WORK_RMS`];
/// 1 when nothing is observed or the observed block is zero.
pub fn working_scale(t: &Tensor, mask: &Mask) -> f64 {
    if mask.count() == 0 {
        return 1.0;
    }
    let mut sq = 0.0;
    for (lin, &v) in t.data().iter().enumerate() {
        if mask.is_observed(lin) {
            sq += v * v;
        }
    }
    let rms = (sq / mask.count() as f64).sqrt();
    if rms > 0.0 {
        WORK_RMS / rms
    } else {
        1.0
    }
}

/// Result of [`solve`]: the completed tensor in caller units (observed
/// entries copied bit-for-bit from the input), the per-iteration history in
/// working units, and the termination status.
pub struct SolveOutput {
    pub x: Tensor,
    pub history: Vec<HistoryRow>,
    pub converged: bool,
    pub iterations: usize,
}

/// Complete the missing entries of t under the given observation mask.
///
/// Internally the problem is rescaled so the observed entries have rms
/// [`WORK_RMS`] and λ is co-scaled by the same factor; the returned tensor is
/// mapped back to caller units with the observed entries substituted from t.
pub fn solve(t: &Tensor, mask: &Mask, cfg: &SolverConfig) -> Result<SolveOutput> {
    if !t.is_finite() {
        return Err(Error::NonFinite("solve input".into()));
    }
    let c = working_scale(t, mask);
    let mut tw = t.clone();
    tw.scale(c);
    let mut cfg_w = cfg.clone();
    cfg_w.lambda *= c;
    let mut solver = Solver::new(tw, mask.clone(), cfg_w)?;
    let converged = solver.run()?;
    let mut x = solver.x.clone();
    x.scale(1.0 / c);
    for (lin, v) in x.data_mut().iter_mut().enumerate() {
        if mask.is_observed(lin) {
            *v = t.data()[lin];
        }
    }
    Ok(SolveOutput {
        x,
        history: std::mem::take(&mut solver.history),
        converged,
        iterations: solver.iter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::make_mask;
    use crate::tr::{random_chain, tr_reconstruct};

    fn small_problem() -> (Tensor, Mask, SolverConfig) {
        let chain = random_chain(&[4, 4, 4], &[2, 2, 2], 3).unwrap();
        let truth = tr_reconstruct(&chain).unwrap();
        let mask = make_mask(&[4, 4, 4], 0.7, 5).unwrap();
        let t = mask.zero_fill(&truth).unwrap();
        let cfg = SolverConfig {
            lambda: 0.0,
            weights: vec![0.0, 0.0, 0.0],
            tr_ranks: vec![2, 2, 2],
            maxiter: 30,
            epsilon: 1e-9,
            seed: 7,
            ..SolverConfig::default()
        };
        (t, mask, cfg)
    }

    #[test]
    fn update_g_fixed_point() {
        let (_, mask, mut cfg) = small_problem();
        cfg.tr_ranks = vec![2, 2, 2];
        let chain = random_chain(&[4, 4, 4], &[2, 2, 2], 9).unwrap();
        let x = tr_reconstruct(&chain).unwrap();
        let mut s = Solver::new(x.clone(), mask, cfg).unwrap();
        s.x = x;
        s.chain = chain.clone();
        s.m = chain.cores().to_vec();
        for l in &mut s.lam3 {
            *l = Tensor::zeros(l.dims().to_vec());
        }
        s.update_g().unwrap();
        for n in 0..3 {
            let d = s.chain.core(n).sub(chain.core(n)).frobenius_norm();
            assert!(d < 1e-10, "core {n} moved by {d}");
        }
    }

    #[test]
    fn fully_observed_returns_input() {
        let truth = Tensor::from_fn(vec![4, 4, 4], |i| (i[0] + 2 * i[1] + 3 * i[2]) as f64 + 1.0);
        let mask = make_mask(&[4, 4, 4], 1.0, 1).unwrap();
        let cfg = SolverConfig {
            lambda: 0.0,
            weights: vec![0.0, 0.0, 0.0],
            tr_ranks: vec![2, 2, 2],
            maxiter: 2,
            epsilon: 1e-6,
            ..SolverConfig::default()
        };
        let out = solve(&truth, &mask, &cfg).unwrap();
        assert!(out.converged);
        assert_eq!(out.x.data(), truth.data());
    }

    #[test]
    fn observed_entries_bitwise_after_every_step() {
        let (t, mask, cfg) = small_problem();
        let c = working_scale(&t, &mask);
        let mut tw = t.clone();
        tw.scale(c);
        let mut s = Solver::new(tw.clone(), mask.clone(), cfg).unwrap();
        for _ in 0..5 {
            s.step().unwrap();
            for lin in 0..t.numel() {
                if mask.is_observed(lin) {
                    assert_eq!(s.x.data()[lin], tw.data()[lin]);
                }
            }
        }
    }
}
