//! Scalar fusion tower on the (1|2) chain.
//!
//! A joint eigenvector of the commuting family is determined by its node
//! values x_a = t₁(ξ_a), and every fused eigenvalue t_n(λ) is then a fixed
//! polynomial in λ built from those numbers by the same interpolation ladder
//! that produces the fused transfer matrices. The ladder works for *any*
//! candidate vector x, which is what the closure-equation solvers exploit:
//! they treat the x_a as unknowns and demand the functional relations that
//! only true eigenvalue tuples satisfy.

use std::sync::Mutex;

use crate::chain::ChainParams;
use crate::fusion::f_coeff;
use crate::gl12::require_gl12;
use crate::sov::eigenvalue_poly;
use crate::{Result, C64};

const ONE: C64 = C64::new(1.0, 0.0);

/// Scalar column tower t_n(λ) determined by candidate node values x_a.
pub struct ScalarTower<'a> {
    pub params: &'a ChainParams,
    pub xs: Vec<C64>,
    /// nodes[n−1][a] = t_n(ξ_a + η); levels are filled lazily.
    nodes: Mutex<Vec<Vec<C64>>>,
}

impl<'a> ScalarTower<'a> {
    pub fn new(params: &'a ChainParams, xs: &[C64]) -> Result<ScalarTower<'a>> {
        require_gl12(params.sig)?;
        if xs.len() != params.n_sites() {
            return Err(crate::Error::Argument(format!(
                "expected {} node values, got {}",
                params.n_sites(),
                xs.len()
            )));
        }
        Ok(ScalarTower {
            params,
            xs: xs.to_vec(),
            nodes: Mutex::new(Vec::new()),
        })
    }

    /// Asymptotic constant of the height-n column in closed form. With twist
    /// eigenvalues (k₁; k₂, k₃) the symmetrized weight sums collapse to
    /// k₁ − k₂ − k₃ at height one and k₁^{n−2}(k₁−k₂)(k₁−k₃) from height two
    /// on, because at most one odd box fits in each graded symmetric column
    /// beyond the strip.
    pub fn inf(&self, n: usize) -> C64 {
        let k = &self.params.twist.diag;
        let (k1, k2, k3) = (k[0], k[1], k[2]);
        match n {
            0 => ONE,
            1 => k1 - k2 - k3,
            _ => k1.powu(n as u32 - 2) * (k1 - k2) * (k1 - k3),
        }
    }

    /// t_n(λ) by the interpolation ladder.
    pub fn t(&self, n: usize, lambda: C64) -> Result<C64> {
        match n {
            0 => Ok(ONE),
            1 => Ok(eigenvalue_poly(self.params, &self.xs, lambda)),
            _ => {
                let nodes = self.node_level(n - 1)?;
                Ok(self.from_nodes(n, lambda, &nodes))
            }
        }
    }

    fn from_nodes(&self, n: usize, lambda: C64, lower_nodes: &[C64]) -> C64 {
        let params = self.params;
        let xi = &params.xi;
        let mut bracket = self.inf(n) * params.d_poly(lambda);
        for a in 0..xi.len() {
            bracket += f_coeff(xi, params.eta, a, n, lambda) * lower_nodes[a] * self.xs[a];
        }
        let mut pref = ONE;
        for r in 1..n {
            pref *= params.d_poly(lambda + params.eta * r as f64);
        }
        bracket * pref
    }

    fn node_level(&self, n: usize) -> Result<Vec<C64>> {
        debug_assert!(n >= 1);
        let shift = self.params.eta;
        {
            let guard = self.nodes.lock().unwrap();
            if guard.len() >= n {
                return Ok(guard[n - 1].clone());
            }
        }
        let mut have = self.nodes.lock().unwrap().len();
        while have < n {
            let level = if have == 0 {
                (0..self.params.n_sites())
                    .map(|a| eigenvalue_poly(self.params, &self.xs, self.params.xi[a] + shift))
                    .collect()
            } else {
                let lower = self.nodes.lock().unwrap()[have - 1].clone();
                (0..self.params.n_sites())
                    .map(|a| self.from_nodes(have + 1, self.params.xi[a] + shift, &lower))
                    .collect()
            };
            let mut guard = self.nodes.lock().unwrap();
            if guard.len() == have {
                guard.push(level);
            }
            have = guard.len();
        }
        Ok(self.nodes.lock().unwrap()[n - 1].clone())
    }

    /// Signed defect of the height-three closure relation at λ:
    /// k₂k₃·d(λ)·t₃(λ) − k₁·[t₂(λ)t₂(λ+η) − t₃(λ)t₁(λ+η)].
    ///
    /// True eigenvalue tuples make this vanish identically in λ; it is the
    /// scalar shadow of the boundary relation that ties the height-three
    /// column to the 2×2 rectangle.
    pub fn closure_defect(&self, lambda: C64) -> Result<C64> {
        let k = &self.params.twist.diag;
        let (k1, k2, k3) = (k[0], k[1], k[2]);
        let eta = self.params.eta;
        let t3 = self.t(3, lambda)?;
        let t2 = self.t(2, lambda)?;
        let t2s = self.t(2, lambda + eta)?;
        let t1s = self.t(1, lambda + eta)?;
        Ok(k2 * k3 * self.params.d_poly(lambda) * t3 - k1 * (t2 * t2s - t3 * t1s))
    }

    /// Closure defect normalized by the magnitude of its constituent terms.
    pub fn closure_residual(&self, lambda: C64) -> Result<f64> {
        let k = &self.params.twist.diag;
        let (k1, k2, k3) = (k[0], k[1], k[2]);
        let eta = self.params.eta;
        let t3 = self.t(3, lambda)?;
        let t2 = self.t(2, lambda)?;
        let t2s = self.t(2, lambda + eta)?;
        let t1s = self.t(1, lambda + eta)?;
        let lhs = k2 * k3 * self.params.d_poly(lambda) * t3;
        let m1 = k1 * t2 * t2s;
        let m2 = k1 * t3 * t1s;
        let scale = lhs.norm().max(m1.norm()).max(m2.norm()).max(1.0);
        Ok((lhs - (m1 - m2)).norm() / scale)
    }

    /// Signed defect of the width-two square relation at λ:
    /// t₃(λ)t₃(λ−η) − t₂(λ)t₄(λ−η). This is the determinant form of the
    /// 2×3 rectangle, which lies outside the (1|2) fat hook and therefore
    /// vanishes on true eigenvalue tuples.
    pub fn null_defect(&self, lambda: C64) -> Result<C64> {
        let eta = self.params.eta;
        let t3 = self.t(3, lambda)?;
        let t3m = self.t(3, lambda - eta)?;
        let t2 = self.t(2, lambda)?;
        let t4m = self.t(4, lambda - eta)?;
        Ok(t3 * t3m - t2 * t4m)
    }

    /// Square-relation defect normalized by the magnitude of its terms.
    pub fn null_residual(&self, lambda: C64) -> Result<f64> {
        let eta = self.params.eta;
        let t3 = self.t(3, lambda)?;
        let t3m = self.t(3, lambda - eta)?;
        let t2 = self.t(2, lambda)?;
        let t4m = self.t(4, lambda - eta)?;
        let m1 = t3 * t3m;
        let m2 = t2 * t4m;
        let scale = m1.norm().max(m2.norm()).max(1.0);
        Ok((m1 - m2).norm() / scale)
    }
}
