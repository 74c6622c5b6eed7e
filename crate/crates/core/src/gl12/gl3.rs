//! Bosonic mirror of the singular-twist (1|2) chain.
//!
//! When the twist has a vanishing first eigenvalue, the height-three tower
//! vanishes identically and the graded chain behaves like a three-boson one:
//! the (1|2) transfer matrix with twist K̂ = diag(0, k₂, k₃) at parameter η
//! has the same spectrum as the (3|0) transfer matrix with twist −K̂ at
//! parameter −η (same inhomogeneities), and the height-two tower of the
//! graded chain mirrors the width-two tower of the bosonic one.

use crate::chain::{ChainParams, Twist};
use crate::fusion::TransferTower;
use crate::gl12::require_gl12;
use crate::graded::Signature;
use crate::linalg::{eig, multiset_match_distance};
use crate::{CMat, Error, Result, C64};

/// The bosonic partner chain: signature (3|0), twist −K̂, parameter −η.
pub fn mirror_params(params: &ChainParams) -> Result<ChainParams> {
    require_gl12(params.sig)?;
    let kd = &params.twist.diag;
    let kscale = kd.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    if kd[0].norm() > 1e-12 * kscale {
        return Err(Error::Parameter(
            "the bosonic mirror exists for the singular twist only".into(),
        ));
    }
    let sig3 = Signature::new(3, 0)?;
    let k = Twist::diagonal(sig3, &[-kd[0], -kd[1], -kd[2]])?;
    ChainParams::new(sig3, -params.eta, params.xi.clone(), k)
}

fn spectrum_distance(a: &CMat, b: &CMat) -> Result<f64> {
    let (ea, _) = eig(a)?;
    let (eb, _) = eig(b)?;
    let scale = ea
        .iter()
        .chain(eb.iter())
        .map(|z| z.norm())
        .fold(1.0_f64, f64::max);
    let ea: Vec<C64> = ea.to_vec();
    let eb: Vec<C64> = eb.to_vec();
    Ok(multiset_match_distance(&ea, &eb) / scale)
}

/// Normalized eigenvalue-multiset distance between the graded transfer
/// matrix and its bosonic mirror at the same spectral parameter.
pub fn t1_isospectrality_residual(
    params: &ChainParams,
    mirror: &ChainParams,
    lambda: C64,
) -> Result<f64> {
    spectrum_distance(&params.transfer(lambda)?, &mirror.transfer(lambda)?)
}

/// Normalized eigenvalue-multiset distance between the graded height-two
/// tower and the bosonic width-two tower at the same spectral parameter.
pub fn t2_isospectrality_residual(
    params: &ChainParams,
    mirror: &ChainParams,
    lambda: C64,
) -> Result<f64> {
    let graded = TransferTower::new(params)?;
    let bosonic = TransferTower::new(mirror)?;
    spectrum_distance(&graded.column(2, lambda)?, &bosonic.row(2, lambda)?)
}
