//! Fused transfer matrices: graded (anti)symmetrizers, the interpolation
//! ladder for the one-row and one-column towers, rectangular transfer
//! matrices through determinant identities, and the scalar structure riding
//! along (asymptotic characters, central zeros, Berezinian).
//!
//! Two independent evaluation routes are kept deliberately separate:
//!
//! * the projector route contracts a product of shifted monodromies with a
//!   graded symmetrizer or antisymmetrizer over the auxiliary slots;
//! * the interpolation route reconstructs the same operator polynomial from
//!   its values at the inhomogeneity nodes, its forced zeros and its leading
//!   asymptotics, never touching a projector.
//!
//! Agreement of the two is a structural test of the whole hierarchy, so
//! nothing in this module funnels one route through the other.

use std::sync::Mutex;

use crate::chain::ChainParams;
use crate::graded::{embed_contiguous_even, partial_supertrace_front, permutation, Signature};
use crate::linalg::{kron_power, rel_residual};
use crate::{C64, CMat, CVec, Error, Result};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Largest dense dimension the projector-based routines are allowed to build.
const DENSE_CAP: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectorKind {
    Symmetric,
    Antisymmetric,
}

/// Graded symmetrizer / antisymmetrizer on n local factors, built by the
/// fusion recursion
/// P±(n) = (1/n) · [P±(n−1) ⊗ 1] · [(n−1)·Id ± P_{1,n}] · [1 ⊗ P±(n−1)],
/// which telescopes from P±(1) = Id.
pub fn projector(sig: Signature, n: usize, kind: ProjectorKind) -> Result<CMat> {
    let d = sig.dim();
    if n == 0 {
        return Err(Error::Argument("projector needs at least one factor".into()));
    }
    if d.pow(n as u32) > DENSE_CAP {
        return Err(Error::Capacity(format!(
            "projector on {n} factors of dimension {d} exceeds the dense cap"
        )));
    }
    let mut p = CMat::eye(d);
    for a in 2..=n {
        let front = embed_contiguous_even(sig, &p, 0, 1);
        let back = embed_contiguous_even(sig, &p, 1, 0);
        let swap = permutation(sig, a, 0, a - 1)?;
        let dim = d.pow(a as u32);
        let mut middle = CMat::eye(dim) * C64::new((a - 1) as f64, 0.0);
        match kind {
            ProjectorKind::Symmetric => middle += &swap,
            ProjectorKind::Antisymmetric => middle -= &swap,
        }
        p = front.dot(&middle).dot(&back) / C64::new(a as f64, 0.0);
    }
    Ok(p)
}

fn multichoose(m: usize, k: usize) -> usize {
    // number of k-multisets from m symbols = C(m+k−1, k)
    if k == 0 {
        return 1;
    }
    if m == 0 {
        return 0;
    }
    binom(m + k - 1, k)
}

fn binom(a: usize, b: usize) -> usize {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    let mut acc: usize = 1;
    for i in 0..b {
        acc = acc * (a - i) / (i + 1);
    }
    acc
}

/// Rank of the graded (anti)symmetrizer on n factors of C^{m|k}: the graded
/// symmetric power mixes symmetric even with antisymmetric odd directions
/// (and vice versa).
pub fn projector_rank(sig: Signature, n: usize, kind: ProjectorKind) -> usize {
    let mut acc = 0;
    for i in 0..=n {
        let j = n - i;
        acc += match kind {
            ProjectorKind::Symmetric => multichoose(sig.m, i) * binom(sig.n, j),
            ProjectorKind::Antisymmetric => binom(sig.m, i) * multichoose(sig.n, j),
        };
    }
    acc
}

/// Leading asymptotic constant of a fused tower: str(P± K^{⊗n}). Invariant
/// under even similarity of K, so it is evaluated on the eigenvalues.
pub fn asymptotic_constant(sig: Signature, eigs: &CVec, n: usize, kind: ProjectorKind) -> Result<C64> {
    if n == 0 {
        return Ok(ONE);
    }
    let d = sig.dim();
    let p = projector(sig, n, kind)?;
    let dim = d.pow(n as u32);
    let mut acc = ZERO;
    for x in 0..dim {
        let digits = crate::graded::digits_of(d, n, x);
        let weight = if sig.multi_parity(&digits) == 1 { -1.0 } else { 1.0 };
        let mut kpow = ONE;
        for &k in &digits {
            kpow *= eigs[k];
        }
        acc += p[[x, x]] * kpow * weight;
    }
    Ok(acc)
}

/// Character of the saturated rectangle of width M and height N+k (even
/// eigenvalues x, odd eigenvalues y): Π x_i^k · Π_{ij}(x_i − y_j).
pub fn saturated_character_tall(x: &[C64], y: &[C64], k: usize) -> C64 {
    let mut acc = ONE;
    for xi in x {
        acc *= xi.powu(k as u32);
    }
    for xi in x {
        for yj in y {
            acc *= xi - yj;
        }
    }
    acc
}

/// Character of the saturated rectangle of width M+k and height N:
/// Π (−y_j)^k · Π_{ij}(x_i − y_j).
pub fn saturated_character_wide(x: &[C64], y: &[C64], k: usize) -> C64 {
    let mut acc = ONE;
    for yj in y {
        acc *= (-yj).powu(k as u32);
    }
    for xi in x {
        for yj in y {
            acc *= xi - yj;
        }
    }
    acc
}

/// Superdeterminant of a diagonalizable even twist: Π x_i / Π y_j.
pub fn sdet(x: &[C64], y: &[C64]) -> C64 {
    let num: C64 = x.iter().product();
    let den: C64 = y.iter().product();
    num / den
}

/// |χ_tall(k) − (−1)^{kN}·sdet^k·χ_wide(k)| — the two saturated-rectangle
/// characters describe the same boundary tower.
pub fn character_relation_residual(x: &[C64], y: &[C64], k: usize) -> f64 {
    let tall = saturated_character_tall(x, y, k);
    let wide = saturated_character_wide(x, y, k);
    let sign = if (k * y.len()) % 2 == 1 { -ONE } else { ONE };
    let rhs = sign * sdet(x, y).powu(k as u32) * wide;
    (tall - rhs).norm() / tall.norm().max(1.0)
}

/// Lagrange basis polynomial Π_{b≠a}(λ−ξ_b)/(ξ_a−ξ_b).
pub fn lagrange(xi: &[C64], a: usize, lambda: C64) -> C64 {
    let mut acc = ONE;
    for (b, &x) in xi.iter().enumerate() {
        if b != a {
            acc *= (lambda - x) / (xi[a] - x);
        }
    }
    acc
}

/// Node coefficient of the height-m column interpolation:
/// f_a^{(m)}(λ) = lagrange_a(λ) · Π_b Π_{r=1}^{m−1} (ξ_a − ξ_b + rη)^{−1}.
pub fn f_coeff(xi: &[C64], eta: C64, a: usize, m: usize, lambda: C64) -> C64 {
    let mut acc = lagrange(xi, a, lambda);
    for &x in xi {
        for r in 1..m {
            acc /= xi[a] - x + eta * r as f64;
        }
    }
    acc
}

/// Node coefficient of the width-m row interpolation (shifts go down).
pub fn g_coeff(xi: &[C64], eta: C64, a: usize, m: usize, lambda: C64) -> C64 {
    let mut acc = lagrange(xi, a, lambda);
    for &x in xi {
        for r in 1..m {
            acc /= xi[a] - x - eta * r as f64;
        }
    }
    acc
}

/// Fused transfer-matrix tower over a fixed chain. Node values are cached
/// level by level; every public evaluation is a plain function of λ.
pub struct TransferTower<'a> {
    pub params: &'a ChainParams,
    t1_nodes: Vec<CMat>,
    col_nodes: Mutex<Vec<Vec<CMat>>>,
    row_nodes: Mutex<Vec<Vec<CMat>>>,
    col_inf: Mutex<Vec<C64>>,
    row_inf: Mutex<Vec<C64>>,
}

impl<'a> TransferTower<'a> {
    pub fn new(params: &'a ChainParams) -> Result<Self> {
        let mut t1_nodes = Vec::with_capacity(params.n_sites());
        for a in 0..params.n_sites() {
            t1_nodes.push(params.transfer_at_node(a)?);
        }
        let strk = params.twist.supertrace();
        Ok(TransferTower {
            params,
            t1_nodes,
            col_nodes: Mutex::new(Vec::new()),
            row_nodes: Mutex::new(Vec::new()),
            col_inf: Mutex::new(vec![ONE, strk]),
            row_inf: Mutex::new(vec![ONE, strk]),
        })
    }

    /// T₁(ξ_a) (0-based node index).
    pub fn t1_node(&self, a: usize) -> &CMat {
        &self.t1_nodes[a]
    }

    /// The ordinary transfer matrix, evaluated directly.
    pub fn t1(&self, lambda: C64) -> Result<CMat> {
        self.params.transfer(lambda)
    }

    /// Asymptotic constant of the column tower of height n.
    pub fn column_inf(&self, n: usize) -> Result<C64> {
        self.tower_inf(n, ProjectorKind::Symmetric)
    }

    /// Asymptotic constant of the row tower of width n.
    pub fn row_inf(&self, n: usize) -> Result<C64> {
        self.tower_inf(n, ProjectorKind::Antisymmetric)
    }

    fn tower_inf(&self, n: usize, kind: ProjectorKind) -> Result<C64> {
        let cache = match kind {
            ProjectorKind::Symmetric => &self.col_inf,
            ProjectorKind::Antisymmetric => &self.row_inf,
        };
        let mut guard = cache.lock().unwrap();
        while guard.len() <= n {
            let next = guard.len();
            let v = asymptotic_constant(self.params.sig, &self.params.twist.diag, next, kind)?;
            guard.push(v);
        }
        Ok(guard[n])
    }

    /// Column tower T_n(λ) (a single column of n boxes) via interpolation.
    pub fn column(&self, n: usize, lambda: C64) -> Result<CMat> {
        self.tower(n, lambda, ProjectorKind::Symmetric)
    }

    /// Row tower T_{(n)}(λ) (a single row of n boxes) via interpolation.
    pub fn row(&self, n: usize, lambda: C64) -> Result<CMat> {
        self.tower(n, lambda, ProjectorKind::Antisymmetric)
    }

    fn tower(&self, n: usize, lambda: C64, kind: ProjectorKind) -> Result<CMat> {
        match n {
            0 => Ok(CMat::eye(self.params.dim())),
            1 => self.t1(lambda),
            _ => {
                let nodes = self.node_level(n - 1, kind)?;
                self.tower_from_nodes(n, lambda, kind, &nodes)
            }
        }
    }

    /// The interpolation formula for the height-n (width-n) tower, given the
    /// shifted node values of level n−1.
    fn tower_from_nodes(
        &self,
        n: usize,
        lambda: C64,
        kind: ProjectorKind,
        lower_nodes: &[CMat],
    ) -> Result<CMat> {
        let params = self.params;
        let xi = &params.xi;
        let eta = match kind {
            ProjectorKind::Symmetric => params.eta,
            ProjectorKind::Antisymmetric => -params.eta,
        };
        let dim = params.dim();
        let inf = self.tower_inf(n, kind)?;
        let mut bracket = CMat::eye(dim) * (inf * params.d_poly(lambda));
        for a in 0..xi.len() {
            let fa = match kind {
                ProjectorKind::Symmetric => f_coeff(xi, params.eta, a, n, lambda),
                ProjectorKind::Antisymmetric => g_coeff(xi, params.eta, a, n, lambda),
            };
            bracket += &(lower_nodes[a].dot(&self.t1_nodes[a]) * fa);
        }
        let mut pref = ONE;
        for r in 1..n {
            pref *= params.d_poly(lambda + eta * r as f64);
        }
        Ok(bracket * pref)
    }

    /// Node values T_n(ξ_a + η) (column) or T_{(n)}(ξ_a − η) (row) for all a.
    fn node_level(&self, n: usize, kind: ProjectorKind) -> Result<Vec<CMat>> {
        debug_assert!(n >= 1);
        let cache = match kind {
            ProjectorKind::Symmetric => &self.col_nodes,
            ProjectorKind::Antisymmetric => &self.row_nodes,
        };
        let shift = match kind {
            ProjectorKind::Symmetric => self.params.eta,
            ProjectorKind::Antisymmetric => -self.params.eta,
        };
        {
            let guard = cache.lock().unwrap();
            if guard.len() >= n {
                return Ok(guard[n - 1].clone());
            }
        }
        let mut have = cache.lock().unwrap().len();
        while have < n {
            let level = if have == 0 {
                let mut v = Vec::with_capacity(self.params.n_sites());
                for a in 0..self.params.n_sites() {
                    v.push(self.t1(self.params.xi[a] + shift)?);
                }
                v
            } else {
                let lower = cache.lock().unwrap()[have - 1].clone();
                let mut v = Vec::with_capacity(self.params.n_sites());
                for a in 0..self.params.n_sites() {
                    v.push(self.tower_from_nodes(have + 1, self.params.xi[a] + shift, kind, &lower)?);
                }
                v
            };
            let mut guard = cache.lock().unwrap();
            if guard.len() == have {
                guard.push(level);
            }
            have = guard.len();
        }
        Ok(cache.lock().unwrap()[n - 1].clone())
    }

    /// Rectangular fused transfer matrix T_b^{(a)}(λ) for the a×b rectangle
    /// (width a, height b). Boundary values: a=0 or b=0 give the identity
    /// (but (0,0) is rejected); rectangles strictly outside the fat hook
    /// (a > m and b > n) vanish identically.
    pub fn rect(&self, a: usize, b: usize, lambda: C64) -> Result<CMat> {
        let sig = self.params.sig;
        let dim = self.params.dim();
        match (a, b) {
            (0, 0) => Err(Error::Argument("rectangle (0,0) is not a representation".into())),
            (0, _) | (_, 0) => Ok(CMat::eye(dim)),
            _ if a > sig.m && b > sig.n => Ok(CMat::zeros((dim, dim))),
            (1, _) => self.column(b, lambda),
            (_, 1) => self.row(a, lambda),
            _ if a <= b => self.rect_from_columns(a, b, lambda),
            _ => self.rect_from_rows(a, b, lambda),
        }
    }

    /// a×a determinant over the column tower:
    /// T_b^{(a)}(λ) = det_{1≤i,j≤a}[ T_{b+i−j}(λ − (i−1)η) ].
    pub fn rect_from_columns(&self, a: usize, b: usize, lambda: C64) -> Result<CMat> {
        let eta = self.params.eta;
        let mut entries: Vec<Vec<Option<CMat>>> = Vec::with_capacity(a);
        for i in 1..=a {
            let mut row = Vec::with_capacity(a);
            for j in 1..=a {
                let order = b as i64 + i as i64 - j as i64;
                row.push(self.tower_entry(order, lambda - eta * (i - 1) as f64, ProjectorKind::Symmetric)?);
            }
            entries.push(row);
        }
        Ok(self.matrix_det(&entries))
    }

    /// b×b determinant over the row tower:
    /// T_b^{(a)}(λ) = det_{1≤i,j≤b}[ T_{(a+i−j)}(λ + (i−1)η) ].
    pub fn rect_from_rows(&self, a: usize, b: usize, lambda: C64) -> Result<CMat> {
        let eta = self.params.eta;
        let mut entries: Vec<Vec<Option<CMat>>> = Vec::with_capacity(b);
        for i in 1..=b {
            let mut row = Vec::with_capacity(b);
            for j in 1..=b {
                let order = a as i64 + i as i64 - j as i64;
                row.push(self.tower_entry(order, lambda + eta * (i - 1) as f64, ProjectorKind::Antisymmetric)?);
            }
            entries.push(row);
        }
        Ok(self.matrix_det(&entries))
    }

    /// Tower entry for determinant rows: None encodes the zero matrix (for
    /// negative order), order 0 is the identity.
    fn tower_entry(&self, order: i64, lambda: C64, kind: ProjectorKind) -> Result<Option<CMat>> {
        if order < 0 {
            return Ok(None);
        }
        if order == 0 {
            return Ok(Some(CMat::eye(self.params.dim())));
        }
        Ok(Some(self.tower(order as usize, lambda, kind)?))
    }

    /// Determinant of a small matrix of mutually commuting matrices, by
    /// Leibniz expansion.
    fn matrix_det(&self, entries: &[Vec<Option<CMat>>]) -> CMat {
        let k = entries.len();
        let dim = self.params.dim();
        let mut acc = CMat::zeros((dim, dim));
        let mut perm: Vec<usize> = (0..k).collect();
        permute_fold(&mut perm, 0, 1.0, &mut |sigma, sign| {
            let mut term: Option<CMat> = None;
            for (i, &j) in sigma.iter().enumerate() {
                match &entries[i][j] {
                    None => return,
                    Some(m) => {
                        term = Some(match term {
                            None => m.clone(),
                            Some(t) => t.dot(m),
                        });
                    }
                }
            }
            if let Some(t) = term {
                acc += &(t * C64::new(sign, 0.0));
            }
        });
        acc
    }

    /// Independent projector route for the pure towers: supertrace over n
    /// auxiliary slots of P± · K^{⊗n} · M_n ⋯ M_1, the k-th monodromy shifted
    /// by ±(k−1)η.
    pub fn projector_route(&self, n: usize, kind: ProjectorKind, lambda: C64) -> Result<CMat> {
        let params = self.params;
        let sig = params.sig;
        let d = sig.dim();
        let n_sites = params.n_sites();
        let total = n + n_sites;
        if d.pow(total as u32) > DENSE_CAP {
            return Err(Error::Capacity(format!(
                "projector route on {n}+{n_sites} slots exceeds the dense cap"
            )));
        }
        let p_small = projector(sig, n, kind)?;
        let p_embed = embed_contiguous_even(sig, &p_small, 0, n_sites);
        let k_embed = embed_contiguous_even(sig, &kron_power(&params.twist.k, n), 0, n_sites);
        let step = match kind {
            ProjectorKind::Symmetric => params.eta,
            ProjectorKind::Antisymmetric => -params.eta,
        };
        let mut prod: Option<CMat> = None;
        for k in 0..n {
            let z = lambda + step * k as f64;
            let mut mono: Option<CMat> = None;
            for a in (0..n_sites).rev() {
                let r = crate::graded::r_embedded(sig, total, k, n + a, params.eta, z - params.xi[a])?;
                mono = Some(match mono {
                    None => r,
                    Some(mm) => mm.dot(&r),
                });
            }
            let m = mono.expect("chain has at least one site");
            prod = Some(match prod {
                None => m,
                Some(acc) => m.dot(&acc),
            });
        }
        let core = p_embed.dot(&k_embed).dot(&prod.expect("n >= 1")).dot(&p_embed);
        partial_supertrace_front(sig, n, n_sites, &core)
    }

    /// Central zeros of the a×b rectangle:
    /// Z_b^{(a)}(λ) = Π_n (λ−ξ_n)^{−1} Π_{l=1}^{b} Π_{m=1}^{a} (λ−ξ_n+η(l−m)).
    pub fn central_zeros(&self, a: usize, b: usize, lambda: C64) -> C64 {
        let eta = self.params.eta;
        let mut acc = ONE;
        for &x in &self.params.xi {
            acc /= lambda - x;
            for l in 1..=b {
                for m in 1..=a {
                    acc *= lambda - x + eta * (l as f64 - m as f64);
                }
            }
        }
        acc
    }

    /// Berezinian of the chain:
    /// Ber(λ) = (det K_even / det K_odd) · a(λ) ·
    ///          Π_{k=1}^{m−1} d(λ−kη) / Π_{l=1−m}^{n−m} d(λ+lη).
    pub fn berezinian(&self, lambda: C64) -> Result<C64> {
        let params = self.params;
        let sig = params.sig;
        if !params.twist.invertible {
            return Err(Error::Parameter("Berezinian needs an invertible twist".into()));
        }
        let det_even: C64 = params.twist.diag.iter().take(sig.m).product();
        let det_odd: C64 = params.twist.diag.iter().skip(sig.m).product();
        let mut acc = det_even / det_odd * params.a_poly(lambda);
        for k in 1..sig.m {
            acc *= params.d_poly(lambda - params.eta * k as f64);
        }
        for l in (1 - sig.m as i64)..=(sig.n as i64 - sig.m as i64) {
            acc /= params.d_poly(lambda + params.eta * l as f64);
        }
        Ok(acc)
    }

    /// Residual of the boundary identity joining the two saturated towers:
    /// (−1)^n · Ber(λ) · T_n^{(m+1)}(λ+η) = T_{n+1}^{(m)}(λ).
    pub fn inner_boundary_residual(&self, lambda: C64) -> Result<f64> {
        let sig = self.params.sig;
        let lhs_mat = self.rect(sig.m + 1, sig.n, lambda + self.params.eta)?;
        let sign = if sig.n % 2 == 1 { -ONE } else { ONE };
        let scale = sign * self.berezinian(lambda)?;
        let rhs = self.rect(sig.m, sig.n + 1, lambda)?;
        Ok(rel_residual(&(lhs_mat * scale), &rhs))
    }

    /// Residual of the bilinear (Hirota) identity at rectangle (a,b):
    /// T_b^{(a)}(λ−η)T_b^{(a)}(λ) = T_{b+1}^{(a)}(λ−η)T_{b−1}^{(a)}(λ)
    ///                             + T_b^{(a−1)}(λ−η)T_b^{(a+1)}(λ).
    pub fn bilinear_residual(&self, a: usize, b: usize, lambda: C64) -> Result<f64> {
        if a == 0 || b == 0 {
            return Err(Error::Argument("bilinear identity needs a ≥ 1 and b ≥ 1".into()));
        }
        let eta = self.params.eta;
        let lhs = self.rect(a, b, lambda - eta)?.dot(&self.rect(a, b, lambda)?);
        let up = self.rect(a, b + 1, lambda - eta)?.dot(&self.rect(a, b - 1, lambda)?);
        let side = self.rect_or_identity(a - 1, b, lambda - eta)?.dot(&self.rect(a + 1, b, lambda)?);
        Ok(rel_residual(&lhs, &(up + side)))
    }

    fn rect_or_identity(&self, a: usize, b: usize, lambda: C64) -> Result<CMat> {
        if a == 0 || b == 0 {
            Ok(CMat::eye(self.params.dim()))
        } else {
            self.rect(a, b, lambda)
        }
    }

    /// Residual between the two determinant presentations of T_b^{(a)}.
    pub fn two_form_residual(&self, a: usize, b: usize, lambda: C64) -> Result<f64> {
        let cols = self.rect_from_columns(a, b, lambda)?;
        let rows = self.rect_from_rows(a, b, lambda)?;
        Ok(rel_residual(&cols, &rows))
    }
}

/// Enumerate permutations with signs (Heap-style recursion on positions).
fn permute_fold(perm: &mut Vec<usize>, k: usize, sign: f64, f: &mut impl FnMut(&[usize], f64)) {
    let n = perm.len();
    if k == n {
        f(perm, sign);
        return;
    }
    for i in k..n {
        let s = if i == k { sign } else { -sign };
        perm.swap(k, i);
        permute_fold(perm, k + 1, s, f);
        perm.swap(k, i);
    }
}
