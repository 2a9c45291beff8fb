//! Certificates, witnesses, and their replay verification.
//!
//! A certificate records the pruned substitution tree: one record per
//! visited node carrying its permutation path, its status under the node
//! rule, and the cumulative rescaling factor. Verification recomputes every
//! node form along its path from the input form alone and checks that each
//! recorded status is forced by the node rule, that expanded nodes are
//! completely covered, and that the claimed verdict follows from the leaf
//! statuses. Nothing in a certificate is trusted; it only guides the replay.

use super::{node_rule, NodeRule, SearchConfig};
use crate::form::{Form, SimplexPoint};
use crate::util::serde_ratio;
use crate::wds::{substitute_step, wds_matrix, Permutation, RatMatrix};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

/// Status of one visited node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeStatus {
    /// All children present (or referenced through a duplicate).
    Expanded,
    /// Complete monomials, all coefficients positive: the cell is strictly
    /// positive and needs no further subdivision.
    PosComplete,
    /// No negative coefficient: the cell is nonnegative.
    Nonneg,
    /// Mixed signs at the depth cap or node budget: undecided cell.
    Frontier,
    /// The indexed pure-power coefficient is negative, so the input form is
    /// negative at that cell vertex (1-based variable index).
    NegativeAxis(usize),
    /// Same content-normalized form as an earlier node; its subtree is
    /// shared (index into the node list).
    DedupOf(usize),
}

/// One node of the certificate tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub path: Vec<Permutation>,
    pub status: NodeStatus,
    /// Cumulative positive scale s with `node_form(y) = s * f(A y)`.
    #[serde(with = "serde_ratio")]
    pub scale: BigRational,
}

/// An exact zero of the input form found at a cell vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub point: SimplexPoint,
    pub path: Vec<Permutation>,
    /// 1-based vertex index within the cell.
    pub vertex: usize,
}

/// Verdict tag carried by certificates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    PositiveDefinite,
    PositiveSemidefinite,
    NotPsd,
    Undetermined,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            VerdictKind::PositiveDefinite => "positive_definite",
            VerdictKind::PositiveSemidefinite => "positive_semidefinite",
            VerdictKind::NotPsd => "not_psd",
            VerdictKind::Undetermined => "undetermined",
        };
        f.write_str(s)
    }
}

/// Replayable record of a pruned substitution tree search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// Content hash of the canonical input form serialization.
    pub digest: String,
    pub config: SearchConfig,
    pub claimed: VerdictKind,
    pub budget_exhausted: bool,
    pub nodes: Vec<NodeRecord>,
    pub zeros: Vec<ZeroRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    /// The form is strictly negative at the point (refutes PSD).
    NegativeVertex,
    /// The form vanishes at the point (refutes PD).
    Zero,
}

/// An exact rational simplex point with the exact value of the input form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub point: SimplexPoint,
    #[serde(with = "serde_ratio")]
    pub value: BigRational,
    pub path: Vec<Permutation>,
}

/// True iff the witness replays exactly: the recorded value matches an
/// exact re-evaluation and its sign matches the claim.
pub fn verify_witness(f: &Form, w: &Witness) -> bool {
    if w.point.n() != f.n() {
        return false;
    }
    let value = f.evaluate_point(&w.point);
    if value != w.value {
        return false;
    }
    match w.kind {
        WitnessKind::NegativeVertex => value.is_negative(),
        WitnessKind::Zero => value.is_zero(),
    }
}

/// Reasons a certificate fails to replay.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyError {
    DigestMismatch,
    MalformedPath { index: usize, reason: String },
    DuplicateNode { index: usize },
    UnknownParent { index: usize },
    ParentNotExpanded { index: usize },
    ScaleMismatch { index: usize },
    StatusMismatch { index: usize, recorded: NodeStatus },
    DedupInvalid { index: usize, reason: String },
    CoverIncomplete { index: usize },
    ZeroMismatch,
    ClaimNotEntailed(String),
}

impl fmt::Display for VerifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyError::DigestMismatch => write!(f, "digest does not match the input form"),
            VerifyError::MalformedPath { index, reason } => {
                write!(f, "node {index}: malformed path: {reason}")
            }
            VerifyError::DuplicateNode { index } => write!(f, "node {index}: duplicate path"),
            VerifyError::UnknownParent { index } => write!(f, "node {index}: parent not present"),
            VerifyError::ParentNotExpanded { index } => {
                write!(f, "node {index}: parent is not an expanded node")
            }
            VerifyError::ScaleMismatch { index } => {
                write!(f, "node {index}: recorded scale does not replay")
            }
            VerifyError::StatusMismatch { index, recorded } => {
                write!(f, "node {index}: recorded status {recorded:?} does not replay")
            }
            VerifyError::DedupInvalid { index, reason } => {
                write!(f, "node {index}: invalid duplicate reference: {reason}")
            }
            VerifyError::CoverIncomplete { index } => {
                write!(f, "node {index}: expanded without all children present")
            }
            VerifyError::ZeroMismatch => write!(f, "recorded zeros do not replay"),
            VerifyError::ClaimNotEntailed(reason) => {
                write!(f, "claimed verdict does not follow: {reason}")
            }
        }
    }
}

impl std::error::Error for VerifyError {}

struct ReplayNode {
    form: Form,
    scale: BigRational,
    matrix: RatMatrix,
    status: NodeStatus,
}

/// Replays a certificate against the input form. `Ok(())` means every node
/// status recomputes, expanded nodes are covered, recorded zeros replay,
/// and the claimed verdict follows from the leaf multiset.
pub fn verify_certificate(f: &Form, cert: &Certificate) -> Result<(), VerifyError> {
    if cert.digest != f.digest() {
        return Err(VerifyError::DigestMismatch);
    }
    let cfg = &cert.config;
    if cert.nodes.is_empty() {
        return Err(VerifyError::ClaimNotEntailed("no nodes recorded".into()));
    }

    let n = f.n();
    let mut by_path: HashMap<Vec<Permutation>, usize> = HashMap::new();
    let mut replayed: Vec<ReplayNode> = Vec::with_capacity(cert.nodes.len());
    let mut zeros_expected: Vec<ZeroRecord> = Vec::new();
    let mut tally_pos = 0usize;
    let mut tally_nonneg = 0usize;
    let mut tally_frontier = 0usize;
    let mut witnesses = 0usize;

    for (index, rec) in cert.nodes.iter().enumerate() {
        for theta in &rec.path {
            if theta.n() != n {
                return Err(VerifyError::MalformedPath {
                    index,
                    reason: format!("permutation of {} elements in a {n}-variable search", theta.n()),
                });
            }
        }
        if by_path.insert(rec.path.clone(), index).is_some() {
            return Err(VerifyError::DuplicateNode { index });
        }

        let (form, scale, matrix) = if rec.path.is_empty() {
            if index != 0 {
                return Err(VerifyError::MalformedPath { index, reason: "second root".into() });
            }
            (f.clone(), BigRational::one(), RatMatrix::identity(n))
        } else {
            let parent_path = &rec.path[..rec.path.len() - 1];
            let parent_index = *by_path
                .get(parent_path)
                .ok_or(VerifyError::UnknownParent { index })?;
            let parent = &replayed[parent_index];
            if parent.status != NodeStatus::Expanded {
                return Err(VerifyError::ParentNotExpanded { index });
            }
            let theta = rec.path.last().expect("nonempty path");
            let sub = substitute_step(&parent.form, theta)
                .map_err(|e| VerifyError::MalformedPath { index, reason: e.to_string() })?;
            let scale = &parent.scale * &sub.scale;
            let matrix = parent.matrix.mul(&wds_matrix(theta));
            (sub.form, scale, matrix)
        };
        if scale != rec.scale {
            return Err(VerifyError::ScaleMismatch { index });
        }

        let depth = rec.path.len() as u32;
        let rule = node_rule(&form, depth, cfg);
        let ok = match rec.status {
            NodeStatus::Expanded => matches!(rule, NodeRule::Expand { .. }),
            NodeStatus::PosComplete => matches!(rule, NodeRule::PosComplete),
            NodeStatus::Nonneg => match rule {
                NodeRule::Nonneg { .. } => true,
                // A nonneg node that would normally be expanded may be cut
                // short by budget exhaustion; it is still soundly nonneg.
                NodeRule::Expand { nonneg: true } => cert.budget_exhausted,
                _ => false,
            },
            NodeStatus::Frontier => match rule {
                NodeRule::Frontier => true,
                NodeRule::Expand { nonneg: false } => cert.budget_exhausted,
                _ => false,
            },
            NodeStatus::NegativeAxis(i) => matches!(rule, NodeRule::NegativeAxis(j) if j == i),
            NodeStatus::DedupOf(target) => {
                if !cfg.dedupe {
                    return Err(VerifyError::DedupInvalid {
                        index,
                        reason: "deduplication disabled in the echoed config".into(),
                    });
                }
                if target >= index {
                    return Err(VerifyError::DedupInvalid {
                        index,
                        reason: "reference does not point backward".into(),
                    });
                }
                if replayed[target].form.content_normalized() != form.content_normalized() {
                    return Err(VerifyError::DedupInvalid {
                        index,
                        reason: "referenced node has a different form".into(),
                    });
                }
                true
            }
        };
        if !ok {
            return Err(VerifyError::StatusMismatch { index, recorded: rec.status });
        }

        match rec.status {
            NodeStatus::PosComplete => tally_pos += 1,
            NodeStatus::Frontier => tally_frontier += 1,
            NodeStatus::NegativeAxis(_) => witnesses += 1,
            NodeStatus::Nonneg => {
                tally_nonneg += 1;
                if cfg.collect_zeros {
                    for &i in &form.sign_summary().zero_axis_powers {
                        zeros_expected.push(ZeroRecord {
                            point: SimplexPoint::new(matrix.column(i - 1))
                                .expect("stochastic columns"),
                            path: rec.path.clone(),
                            vertex: i,
                        });
                    }
                }
            }
            _ => {}
        }
        replayed.push(ReplayNode { form, scale, matrix, status: rec.status });
    }

    // Cover: every expanded node needs all n! children (any status,
    // including duplicate references), except under a refutation claim
    // where the first counterexample ends the search.
    if cert.claimed != VerdictKind::NotPsd {
        let has_expanded = cert.nodes.iter().any(|r| r.status == NodeStatus::Expanded);
        if has_expanded {
            // A certificate shorter than one full fan-out cannot cover; this
            // also keeps the permutation enumeration within sane sizes.
            let fanout: u128 =
                (2..=n as u128).fold(1u128, |acc, k| acc.saturating_mul(k));
            if (cert.nodes.len() as u128) < fanout {
                let index = cert
                    .nodes
                    .iter()
                    .position(|r| r.status == NodeStatus::Expanded)
                    .expect("expanded node present");
                return Err(VerifyError::CoverIncomplete { index });
            }
            let perms = Permutation::all(n);
            for (index, rec) in cert.nodes.iter().enumerate() {
                if rec.status != NodeStatus::Expanded {
                    continue;
                }
                let mut child = rec.path.clone();
                for theta in &perms {
                    child.push(theta.clone());
                    let present = by_path.contains_key(&child);
                    child.pop();
                    if !present {
                        return Err(VerifyError::CoverIncomplete { index });
                    }
                }
            }
        }
    }

    zeros_expected.sort_by(|a, b| a.point.cmp(&b.point));
    zeros_expected.dedup_by(|a, b| a.point == b.point);
    if cert.zeros != zeros_expected {
        return Err(VerifyError::ZeroMismatch);
    }

    let entail = |claim: bool, reason: &str| -> Result<(), VerifyError> {
        if claim {
            Ok(())
        } else {
            Err(VerifyError::ClaimNotEntailed(reason.into()))
        }
    };
    match cert.claimed {
        VerdictKind::PositiveDefinite => {
            entail(witnesses == 0, "negative vertex recorded")?;
            entail(tally_frontier == 0, "frontier nodes remain")?;
            entail(tally_nonneg == 0, "a cell is only nonnegative")?;
            entail(cert.zeros.is_empty(), "exact zeros recorded")?;
            entail(tally_pos > 0, "no positive cells recorded")
        }
        VerdictKind::PositiveSemidefinite => {
            entail(witnesses == 0, "negative vertex recorded")?;
            entail(tally_frontier == 0, "frontier nodes remain")?;
            entail(
                tally_nonneg > 0,
                "all cells are strictly positive, the claim should be stronger",
            )
        }
        VerdictKind::NotPsd => entail(witnesses > 0, "no negative vertex recorded"),
        VerdictKind::Undetermined => {
            entail(witnesses == 0, "a refutation was recorded")?;
            entail(tally_frontier > 0, "nothing left undecided")
        }
    }
}
