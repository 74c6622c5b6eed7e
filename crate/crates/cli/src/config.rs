//! Run configuration. JSON in, JSON out: complex numbers are `[re, im]`
//! pairs, unknown fields are rejected with serde's line/column diagnostics,
//! and the *effective* configuration (defaults resolved, drawn sample points
//! recorded) is what gets persisted — a run is replayable from its own
//! artifacts alone.

use serde::{Deserialize, Serialize};
use sovlab_core::chain::{ChainParams, Twist};
use sovlab_core::graded::Signature;
use sovlab_core::hubbard::{HBranch, HubbardParams, HubbardTwist};
use sovlab_core::linalg::inv;
use sovlab_core::{C64, CMat};

use crate::CliError;

pub type CPair = [f64; 2];

pub fn to_c(p: CPair) -> C64 {
    C64::new(p[0], p[1])
}

pub fn from_c(z: C64) -> CPair {
    [z.re, z.im]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelSpec {
    Gl {
        m: usize,
        n: usize,
    },
    Hubbard {
        #[serde(default)]
        branch: BranchSpec,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchSpec {
    #[default]
    Principal,
    Shifted,
}

impl From<BranchSpec> for HBranch {
    fn from(b: BranchSpec) -> HBranch {
        match b {
            BranchSpec::Principal => HBranch::Principal,
            BranchSpec::Shifted => HBranch::Shifted,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TwistSpec {
    /// Diagonal twist given by its eigenvalue list.
    Diagonal { eigenvalues: Vec<CPair> },
    /// Explicit matrix entries, row by row.
    Matrix { entries: Vec<Vec<CPair>> },
    /// Eigenvalue list conjugated by an optional similarity W: K = W D W⁻¹.
    Eigenvalues {
        values: Vec<CPair>,
        similarity: Option<Vec<Vec<CPair>>>,
    },
    /// Hubbard twist family a ∈ {1,2,3,4} with parameters (α, β, γ).
    Hubbard {
        family: usize,
        alpha: CPair,
        beta: CPair,
        gamma: CPair,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceSpec {
    /// All-ones product covector.
    #[default]
    Ones,
    /// Seeded random product covector (falls back to further draws until the
    /// rank certificate clears the tolerance).
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Bound every verification residual must clear.
    pub residual: f64,
    /// Lower bound on σ_min/σ_max for rank certificates.
    pub rank: f64,
    /// Distance under which two solution tuples count as one root.
    pub clustering: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            residual: 1e-8,
            rank: 1e-8,
            clustering: 1e-6,
        }
    }
}

/// On-disk configuration: everything optional, unknown fields rejected.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub model: Option<ModelSpec>,
    pub sites: Option<usize>,
    pub eta: Option<CPair>,
    pub inhomogeneities: Option<Vec<CPair>>,
    pub twist: Option<TwistSpec>,
    pub source: Option<SourceSpec>,
    pub tolerances: Option<Tolerances>,
    pub samples: Option<usize>,
    pub probes: Option<Vec<CPair>>,
    pub seed: Option<u64>,
    pub output: Option<String>,
}

/// Effective configuration: every field concrete. This is what the report
/// embeds and what `config.json` persists; feeding it back reproduces the
/// run bit for bit (timings aside).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub sites: usize,
    pub eta: CPair,
    pub inhomogeneities: Vec<CPair>,
    pub twist: TwistSpec,
    pub source: SourceSpec,
    pub tolerances: Tolerances,
    pub samples: usize,
    /// Sample points, consumed in order by the command's checks. Left
    /// empty in a fresh config; the persisted effective config carries every
    /// point that was actually used, drawn or supplied.
    pub probes: Vec<CPair>,
    pub seed: u64,
    pub output: String,
}

/// Flag-level overrides (flags beat file values; `SOVLAB_SEED` is the
/// fallback when neither the flag nor the file provides a seed).
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub out: Option<String>,
}

impl RawConfig {
    pub fn resolve(self, ov: &Overrides) -> Result<RunConfig, CliError> {
        let model = self.model.unwrap_or(ModelSpec::Gl { m: 1, n: 2 });
        let sites = self.sites.unwrap_or(2);
        if sites == 0 {
            return Err(CliError::Config("sites must be at least 1".into()));
        }
        let (eta, inhomogeneities, twist) = match &model {
            ModelSpec::Gl { m, n } => {
                let d = m + n;
                if *m == 0 || d == 0 {
                    return Err(CliError::Config(format!(
                        "unsupported gl signature ({m}|{n})"
                    )));
                }
                let eta = self.eta.unwrap_or([0.7, 0.2]);
                let xi = self.inhomogeneities.unwrap_or_else(|| {
                    (0..sites)
                        .map(|a| if a == 0 { [0.0, 0.0] } else { [1.1 * a as f64, -0.3 * a as f64] })
                        .collect()
                });
                let twist = self.twist.unwrap_or_else(|| {
                    if (*m, *n) == (1, 2) {
                        TwistSpec::Diagonal {
                            eigenvalues: vec![[1.3, 0.0], [-0.8, 0.5], [0.0, 2.1]],
                        }
                    } else {
                        TwistSpec::Diagonal {
                            eigenvalues: (0..d)
                                .map(|i| [1.2 + 1.3 * i as f64, -0.6])
                                .collect(),
                        }
                    }
                });
                (eta, xi, twist)
            }
            ModelSpec::Hubbard { .. } => {
                let eta = self.eta.unwrap_or([0.4, -0.6]);
                let xi = self.inhomogeneities.unwrap_or_else(|| {
                    (0..sites)
                        .map(|a| [0.45 * (a as f64 + 1.0), 0.2])
                        .collect()
                });
                let twist = self.twist.unwrap_or(TwistSpec::Hubbard {
                    family: 1,
                    alpha: [0.9, 0.3],
                    beta: [-0.7, 0.6],
                    gamma: [0.5, -0.8],
                });
                (eta, xi, twist)
            }
        };
        if inhomogeneities.len() != sites {
            return Err(CliError::Config(format!(
                "{} inhomogeneities listed for {} sites",
                inhomogeneities.len(),
                sites
            )));
        }
        let seed = ov
            .seed
            .or(self.seed)
            .or_else(|| {
                std::env::var("SOVLAB_SEED")
                    .ok()
                    .and_then(|s| s.parse().ok())
            })
            .unwrap_or(7);
        let mut tolerances = self.tolerances.unwrap_or_default();
        if let Some(t) = ov.tol {
            tolerances.residual = t;
        }
        Ok(RunConfig {
            model,
            sites,
            eta,
            inhomogeneities,
            twist,
            source: self.source.unwrap_or_default(),
            tolerances,
            samples: self.samples.unwrap_or(10),
            probes: self.probes.unwrap_or_default(),
            seed,
            output: ov
                .out
                .clone()
                .or(self.output)
                .unwrap_or_else(|| "runs".into()),
        })
    }
}

pub fn load_raw(path: Option<&std::path::Path>) -> Result<RawConfig, CliError> {
    match path {
        None => Ok(RawConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| {
                CliError::Config(format!("cannot read config {}: {e}", p.display()))
            })?;
            serde_json::from_str(&text).map_err(|e| {
                CliError::Config(format!("malformed config {}: {e}", p.display()))
            })
        }
    }
}

impl RunConfig {
    pub fn signature(&self) -> Result<Signature, CliError> {
        match self.model {
            ModelSpec::Gl { m, n } => Signature::new(m, n)
                .map_err(|e| CliError::Config(format!("invalid signature: {e}"))),
            ModelSpec::Hubbard { .. } => Err(CliError::Config(
                "this command needs a gl model, the config selects the hubbard chain".into(),
            )),
        }
    }

    pub fn xi(&self) -> Vec<C64> {
        self.inhomogeneities.iter().map(|&p| to_c(p)).collect()
    }

    /// The graded chain described by the config.
    pub fn chain_params(&self) -> Result<ChainParams, CliError> {
        let sig = self.signature()?;
        let d = sig.dim();
        let twist = match &self.twist {
            TwistSpec::Diagonal { eigenvalues } => {
                let entries: Vec<C64> = eigenvalues.iter().map(|&p| to_c(p)).collect();
                if entries.len() != d {
                    return Err(CliError::Config(format!(
                        "twist lists {} eigenvalues, the local space has dimension {d}",
                        entries.len()
                    )));
                }
                Twist::diagonal(sig, &entries)
                    .map_err(|e| CliError::Config(format!("invalid twist: {e}")))?
            }
            TwistSpec::Matrix { entries } => {
                let k = matrix_from(entries, d)?;
                Twist::new(sig, k).map_err(|e| CliError::Config(format!("invalid twist: {e}")))?
            }
            TwistSpec::Eigenvalues { values, similarity } => {
                let vals: Vec<C64> = values.iter().map(|&p| to_c(p)).collect();
                if vals.len() != d {
                    return Err(CliError::Config(format!(
                        "twist lists {} eigenvalues, the local space has dimension {d}",
                        vals.len()
                    )));
                }
                match similarity {
                    None => Twist::diagonal(sig, &vals)
                        .map_err(|e| CliError::Config(format!("invalid twist: {e}")))?,
                    Some(w_entries) => {
                        let w = matrix_from(w_entries, d)?;
                        let w_inv = inv(&w).map_err(|e| {
                            CliError::Config(format!("twist similarity is singular: {e}"))
                        })?;
                        let mut diag = CMat::zeros((d, d));
                        for (i, &v) in vals.iter().enumerate() {
                            diag[[i, i]] = v;
                        }
                        let k = w.dot(&diag).dot(&w_inv);
                        Twist::new(sig, k)
                            .map_err(|e| CliError::Config(format!("invalid twist: {e}")))?
                    }
                }
            }
            TwistSpec::Hubbard { .. } => {
                return Err(CliError::Config(
                    "a hubbard twist family cannot dress a gl chain".into(),
                ))
            }
        };
        ChainParams::new(sig, to_c(self.eta), self.xi(), twist)
            .map_err(|e| CliError::Config(format!("invalid chain: {e}")))
    }

    /// The Hubbard chain described by the config.
    pub fn hubbard_params(&self) -> Result<HubbardParams, CliError> {
        let branch = match self.model {
            ModelSpec::Hubbard { branch } => HBranch::from(branch),
            ModelSpec::Gl { .. } => {
                return Err(CliError::Config(
                    "this command needs the hubbard model, the config selects a gl chain".into(),
                ))
            }
        };
        let twist = self.hubbard_twist()?;
        HubbardParams::new(to_c(self.eta), self.xi(), twist, branch)
            .map_err(|e| CliError::Config(format!("invalid chain: {e}")))
    }

    pub fn hubbard_twist(&self) -> Result<HubbardTwist, CliError> {
        match &self.twist {
            TwistSpec::Hubbard {
                family,
                alpha,
                beta,
                gamma,
            } => HubbardTwist::new(*family, to_c(*alpha), to_c(*beta), to_c(*gamma))
                .map_err(|e| CliError::Config(format!("invalid twist: {e}"))),
            _ => Err(CliError::Config(
                "the hubbard chain needs a twist of the form \
                 {\"hubbard\": {\"family\": .., \"alpha\": .., \"beta\": .., \"gamma\": ..}}"
                    .into(),
            )),
        }
    }
}

fn matrix_from(entries: &[Vec<CPair>], d: usize) -> Result<CMat, CliError> {
    if entries.len() != d || entries.iter().any(|row| row.len() != d) {
        return Err(CliError::Config(format!(
            "matrix entries must form a {d}x{d} grid"
        )));
    }
    let mut k = CMat::zeros((d, d));
    for (i, row) in entries.iter().enumerate() {
        for (j, &p) in row.iter().enumerate() {
            k[[i, j]] = to_c(p);
        }
    }
    Ok(k)
}
