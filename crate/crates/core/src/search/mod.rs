//! Pruned search over the substitution tree with the three-way decision:
//! positive definite, positive semidefinite, or not PSD with an exact
//! counterexample.
//!
//! Node rule, applied to the (primitive, integer) form at each cell:
//!
//! 1. a negative pure-power coefficient means the input form is negative at
//!    that cell vertex: emit the exact witness and stop;
//! 2. complete monomials with all-positive coefficients: the cell is
//!    strictly positive, prune (children of such forms stay all-positive
//!    complete, so deeper expansion is redundant);
//! 3. all coefficients nonnegative: the cell is nonnegative, prune,
//!    recording exact zeros at vertices whose pure-power coefficient is
//!    absent (optionally keep subdividing zero-free nonneg cells when
//!    chasing a strict-positivity cover);
//! 4. otherwise subdivide into the n! children, up to the depth cap and
//!    node budget.
//!
//! An all-nonnegative cover certifies PSD at any depth; a strictly positive
//! complete cover certifies PD; a single negative vertex refutes PSD. A
//! search that exhausts depth or budget returns `Undetermined` honestly;
//! the step-count bounds say how deep the search would have to go for a
//! guaranteed decision, which is astronomically beyond desk scale.

mod certificate;

pub use certificate::{
    verify_certificate, verify_witness, Certificate, NodeRecord, NodeStatus, VerdictKind,
    VerifyError, Witness, WitnessKind, ZeroRecord,
};

use crate::form::{Form, SignCategory};
use crate::wds::{wds_children, wds_matrix, Permutation, RatMatrix};
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{mpsc, Mutex};

/// Default cap on the number of node forms materialized in one search.
pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Traversal {
    #[serde(rename = "depth-first")]
    DepthFirst,
    #[serde(rename = "breadth-first")]
    BreadthFirst,
}

/// Search knobs, echoed verbatim into certificates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub max_depth: u32,
    /// Key nodes by their content-normalized form and share identical
    /// subtrees as backward references.
    pub dedupe: bool,
    /// 0 runs the deterministic sequential engine; k > 0 distributes the
    /// root subtrees over k workers.
    pub parallel_workers: usize,
    pub traversal: Traversal,
    pub collect_zeros: bool,
    pub node_budget: usize,
    /// Keep subdividing zero-free all-nonnegative cells, chasing a strictly
    /// positive cover instead of settling for a nonnegative one.
    pub expand_nonneg: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_depth: 8,
            dedupe: false,
            parallel_workers: 0,
            traversal: Traversal::DepthFirst,
            collect_zeros: true,
            node_budget: DEFAULT_NODE_BUDGET,
            expand_nonneg: false,
        }
    }
}

/// Outcome of a search.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// Strictly positive on the whole simplex (away from the origin).
    PositiveDefinite { certificate: Certificate },
    /// Nonnegative on the whole simplex; `definitely_not_pd` is set when an
    /// exact zero was recorded.
    PositiveSemidefinite {
        certificate: Certificate,
        zeros: Vec<ZeroRecord>,
        definitely_not_pd: bool,
    },
    /// Negative somewhere: the witness point evaluates below zero exactly.
    NotPsd { witness: Witness, certificate: Certificate },
    /// Depth or budget ran out with mixed-sign cells left.
    Undetermined {
        frontier: usize,
        depth_reached: u32,
        budget_exhausted: bool,
        certificate: Certificate,
    },
}

impl Verdict {
    pub fn kind(&self) -> VerdictKind {
        match self {
            Verdict::PositiveDefinite { .. } => VerdictKind::PositiveDefinite,
            Verdict::PositiveSemidefinite { .. } => VerdictKind::PositiveSemidefinite,
            Verdict::NotPsd { .. } => VerdictKind::NotPsd,
            Verdict::Undetermined { .. } => VerdictKind::Undetermined,
        }
    }

    pub fn certificate(&self) -> &Certificate {
        match self {
            Verdict::PositiveDefinite { certificate }
            | Verdict::PositiveSemidefinite { certificate, .. }
            | Verdict::NotPsd { certificate, .. }
            | Verdict::Undetermined { certificate, .. } => certificate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchError {
    NodeBudgetExceeded { needed: u128, budget: usize },
}

impl fmt::Display for SearchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchError::NodeBudgetExceeded { needed, budget } => {
                write!(f, "expansion needs {needed} nodes, over the budget of {budget}")
            }
        }
    }
}

impl std::error::Error for SearchError {}

/// What the node rule dictates for a form at a given depth. `Expand` keeps
/// the nonneg flag so budget cuts can downgrade it soundly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum NodeRule {
    NegativeAxis(usize),
    PosComplete,
    Nonneg { zero_axes: bool },
    Expand { nonneg: bool },
    Frontier,
}

pub(crate) fn node_rule(form: &Form, depth: u32, cfg: &SearchConfig) -> NodeRule {
    let summary = form.sign_summary();
    if let Some(&i) = summary.negative_axis_powers.iter().next() {
        return NodeRule::NegativeAxis(i);
    }
    match summary.category {
        SignCategory::AllPositiveComplete => NodeRule::PosComplete,
        SignCategory::AllNonnegative => {
            let zero_axes = !summary.zero_axis_powers.is_empty();
            if cfg.expand_nonneg && !zero_axes && depth < cfg.max_depth {
                NodeRule::Expand { nonneg: true }
            } else {
                NodeRule::Nonneg { zero_axes }
            }
        }
        SignCategory::Mixed => {
            if depth < cfg.max_depth {
                NodeRule::Expand { nonneg: false }
            } else {
                NodeRule::Frontier
            }
        }
        // All-negative complete forms always carry negative pure powers.
        SignCategory::AllNegativeComplete => unreachable!("caught by the axis check"),
    }
}

struct NodeTask {
    path: Vec<Permutation>,
    form: Form,
    scale: BigRational,
    matrix: RatMatrix,
}

#[derive(Default)]
struct SubtreeOut {
    records: Vec<NodeRecord>,
    zeros: Vec<ZeroRecord>,
    witness: Option<Witness>,
    pos_complete: usize,
    nonneg: usize,
    frontier: usize,
    deepest: u32,
    budget_hit: bool,
}

struct Shared<'a> {
    cfg: &'a SearchConfig,
    counter: &'a AtomicUsize,
    cancel: &'a AtomicBool,
}

fn make_witness(task: &NodeTask, axis: usize) -> Witness {
    let point = crate::form::SimplexPoint::new(task.matrix.column(axis - 1))
        .expect("stochastic columns are simplex points");
    let coef = task.form.axis_coefficient(axis).expect("negative axis present").clone();
    let value = BigRational::from(coef) / &task.scale;
    Witness { kind: WitnessKind::NegativeVertex, point, value, path: task.path.clone() }
}

fn collect_zeros(out: &mut SubtreeOut, task: &NodeTask) {
    for &i in &task.form.sign_summary().zero_axis_powers {
        out.zeros.push(ZeroRecord {
            point: crate::form::SimplexPoint::new(task.matrix.column(i - 1))
                .expect("stochastic columns are simplex points"),
            path: task.path.clone(),
            vertex: i,
        });
    }
}

/// Runs the node rule over a worklist of independent subtrees. The caller
/// has already counted the initial tasks against the shared budget.
fn run_subtree(initial: Vec<NodeTask>, shared: &Shared<'_>) -> SubtreeOut {
    let cfg = shared.cfg;
    let mut out = SubtreeOut::default();
    let mut dedupe_seen: HashMap<String, usize> = HashMap::new();
    let mut queue: VecDeque<NodeTask> = initial.into();

    while let Some(task) = match cfg.traversal {
        Traversal::DepthFirst => queue.pop_back(),
        Traversal::BreadthFirst => queue.pop_front(),
    } {
        if shared.cancel.load(Ordering::Relaxed) {
            break;
        }
        let depth = task.path.len() as u32;
        out.deepest = out.deepest.max(depth);

        if cfg.dedupe {
            let key = task.form.content_normalized().emit();
            match dedupe_seen.get(&key) {
                Some(&target) => {
                    out.records.push(NodeRecord {
                        path: task.path,
                        status: NodeStatus::DedupOf(target),
                        scale: task.scale,
                    });
                    continue;
                }
                None => {
                    dedupe_seen.insert(key, out.records.len());
                }
            }
        }

        let rule = node_rule(&task.form, depth, cfg);
        match rule {
            NodeRule::NegativeAxis(i) => {
                let witness = make_witness(&task, i);
                out.records.push(NodeRecord {
                    path: task.path,
                    status: NodeStatus::NegativeAxis(i),
                    scale: task.scale,
                });
                out.witness = Some(witness);
                shared.cancel.store(true, Ordering::Relaxed);
                break;
            }
            NodeRule::PosComplete => {
                out.pos_complete += 1;
                out.records.push(NodeRecord {
                    path: task.path,
                    status: NodeStatus::PosComplete,
                    scale: task.scale,
                });
            }
            NodeRule::Nonneg { .. } => {
                out.nonneg += 1;
                if cfg.collect_zeros {
                    collect_zeros(&mut out, &task);
                }
                out.records.push(NodeRecord {
                    path: task.path,
                    status: NodeStatus::Nonneg,
                    scale: task.scale,
                });
            }
            NodeRule::Frontier => {
                out.frontier += 1;
                out.records.push(NodeRecord {
                    path: task.path,
                    status: NodeStatus::Frontier,
                    scale: task.scale,
                });
            }
            NodeRule::Expand { nonneg } => {
                let fanout = factorial_usize(task.form.n());
                let granted = {
                    let prev = shared.counter.load(Ordering::Relaxed);
                    if prev.saturating_add(fanout) <= cfg.node_budget {
                        shared.counter.fetch_add(fanout, Ordering::Relaxed);
                        true
                    } else {
                        false
                    }
                };
                if !granted {
                    out.budget_hit = true;
                    if nonneg {
                        out.nonneg += 1;
                        if cfg.collect_zeros {
                            collect_zeros(&mut out, &task);
                        }
                        out.records.push(NodeRecord {
                            path: task.path,
                            status: NodeStatus::Nonneg,
                            scale: task.scale,
                        });
                    } else {
                        out.frontier += 1;
                        out.records.push(NodeRecord {
                            path: task.path,
                            status: NodeStatus::Frontier,
                            scale: task.scale,
                        });
                    }
                    continue;
                }
                let children = wds_children(&task.form);
                out.records.push(NodeRecord {
                    path: task.path.clone(),
                    status: NodeStatus::Expanded,
                    scale: task.scale.clone(),
                });
                let make_task = |(theta, sub): (Permutation, crate::wds::Substituted)| {
                    let mut path = task.path.clone();
                    let matrix = task.matrix.mul(&wds_matrix(&theta));
                    path.push(theta);
                    NodeTask { path, form: sub.form, scale: &task.scale * &sub.scale, matrix }
                };
                match cfg.traversal {
                    // Stack pops from the back: push in reverse so children
                    // come out in lexicographic order.
                    Traversal::DepthFirst => {
                        for child in children.into_iter().rev().map(make_task) {
                            queue.push_back(child);
                        }
                    }
                    Traversal::BreadthFirst => {
                        for child in children.into_iter().map(make_task) {
                            queue.push_back(child);
                        }
                    }
                }
            }
        }
    }
    out
}

/// n!, saturating: anything beyond usize is over every budget anyway.
fn factorial_usize(n: usize) -> usize {
    let mut acc: u128 = 1;
    for k in 2..=n as u128 {
        acc = acc.saturating_mul(k);
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

fn root_task(f: &Form) -> NodeTask {
    NodeTask {
        path: Vec::new(),
        form: f.clone(),
        scale: BigRational::one(),
        matrix: RatMatrix::identity(f.n()),
    }
}

/// Decides positivity of the form on the simplex (equivalently on the
/// nonnegative orthant) under the given configuration.
pub fn classify(f: &Form, cfg: &SearchConfig) -> Verdict {
    let counter = AtomicUsize::new(1); // the root form
    let cancel = AtomicBool::new(false);
    let shared = Shared { cfg, counter: &counter, cancel: &cancel };
    let out = if cfg.parallel_workers == 0 {
        run_subtree(vec![root_task(f)], &shared)
    } else {
        run_parallel(f, &shared)
    };
    assemble(f, cfg, out)
}

/// Parallel driver: the root is classified in place; its children become
/// independent subtree tasks distributed over the workers. The verdict kind
/// is schedule-independent; a counterexample certificate keeps the root and
/// the finding subtree only.
fn run_parallel(f: &Form, shared: &Shared<'_>) -> SubtreeOut {
    let cfg = shared.cfg;
    let root = root_task(f);
    let rule = node_rule(&root.form, 0, cfg);
    if !matches!(rule, NodeRule::Expand { .. }) {
        return run_subtree(vec![root], shared);
    }
    let nonneg_expand = matches!(rule, NodeRule::Expand { nonneg: true });
    let fanout = factorial_usize(f.n());
    {
        let prev = shared.counter.load(Ordering::Relaxed);
        if prev.saturating_add(fanout) > cfg.node_budget {
            // Degenerate budget; fall back to the sequential cut.
            let mut out = SubtreeOut { budget_hit: true, ..Default::default() };
            if nonneg_expand {
                out.nonneg = 1;
                if cfg.collect_zeros {
                    collect_zeros(&mut out, &root);
                }
                out.records.push(NodeRecord {
                    path: Vec::new(),
                    status: NodeStatus::Nonneg,
                    scale: root.scale,
                });
            } else {
                out.frontier = 1;
                out.records.push(NodeRecord {
                    path: Vec::new(),
                    status: NodeStatus::Frontier,
                    scale: root.scale,
                });
            }
            return out;
        }
        shared.counter.fetch_add(fanout, Ordering::Relaxed);
    }

    let root_record =
        NodeRecord { path: Vec::new(), status: NodeStatus::Expanded, scale: root.scale.clone() };
    let tasks: Vec<(usize, NodeTask)> = wds_children(f)
        .into_iter()
        .enumerate()
        .map(|(i, (theta, sub))| {
            let matrix = root.matrix.mul(&wds_matrix(&theta));
            (
                i,
                NodeTask {
                    path: vec![theta],
                    form: sub.form,
                    scale: &root.scale * &sub.scale,
                    matrix,
                },
            )
        })
        .collect();

    let queue = Mutex::new(tasks.into_iter().collect::<VecDeque<_>>());
    let (tx, rx) = mpsc::channel::<(usize, SubtreeOut)>();
    let workers = cfg.parallel_workers.min(fanout);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let queue = &queue;
            let shared_ref = &*shared;
            scope.spawn(move || loop {
                let next = queue.lock().expect("queue lock").pop_front();
                let Some((index, task)) = next else { break };
                if shared_ref.cancel.load(Ordering::Relaxed) {
                    break;
                }
                let out = run_subtree(vec![task], shared_ref);
                if tx.send((index, out)).is_err() {
                    break;
                }
            });
        }
        drop(tx);

        let mut slots: Vec<Option<SubtreeOut>> = (0..fanout).map(|_| None).collect();
        for (index, out) in rx {
            slots[index] = Some(out);
        }

        // Subtree-local duplicate references shift by the records already
        // merged ahead of them.
        let shift_dedups = |records: &mut [NodeRecord], offset: usize| {
            for rec in records {
                if let NodeStatus::DedupOf(j) = rec.status {
                    rec.status = NodeStatus::DedupOf(j + offset);
                }
            }
        };

        // A refutation anywhere wins; keep the lowest finding subtree.
        if let Some(finder) = slots
            .iter()
            .position(|s| s.as_ref().is_some_and(|o| o.witness.is_some()))
        {
            let mut sub = slots[finder].take().expect("checked");
            shift_dedups(&mut sub.records, 1);
            let mut records = vec![root_record.clone()];
            records.append(&mut sub.records);
            return SubtreeOut { records, ..sub };
        }

        let mut merged = SubtreeOut {
            records: vec![root_record.clone()],
            ..Default::default()
        };
        for slot in slots.into_iter() {
            // Every subtree completed (no cancellation happened).
            let mut sub = slot.expect("all subtrees reported");
            shift_dedups(&mut sub.records, merged.records.len());
            merged.records.extend(sub.records);
            merged.zeros.extend(sub.zeros);
            merged.pos_complete += sub.pos_complete;
            merged.nonneg += sub.nonneg;
            merged.frontier += sub.frontier;
            merged.deepest = merged.deepest.max(sub.deepest);
            merged.budget_hit |= sub.budget_hit;
        }
        merged
    })
}

fn assemble(f: &Form, cfg: &SearchConfig, mut out: SubtreeOut) -> Verdict {
    out.zeros.sort_by(|a, b| a.point.cmp(&b.point));
    out.zeros.dedup_by(|a, b| a.point == b.point);
    let claimed = if out.witness.is_some() {
        VerdictKind::NotPsd
    } else if out.frontier > 0 {
        VerdictKind::Undetermined
    } else if out.nonneg > 0 {
        VerdictKind::PositiveSemidefinite
    } else {
        VerdictKind::PositiveDefinite
    };
    let certificate = Certificate {
        digest: f.digest(),
        config: cfg.clone(),
        claimed,
        budget_exhausted: out.budget_hit,
        nodes: out.records,
        zeros: out.zeros.clone(),
    };
    match claimed {
        VerdictKind::NotPsd => Verdict::NotPsd {
            witness: out.witness.expect("claimed refutation"),
            certificate,
        },
        VerdictKind::Undetermined => Verdict::Undetermined {
            frontier: out.frontier,
            depth_reached: out.deepest,
            budget_exhausted: out.budget_hit,
            certificate,
        },
        VerdictKind::PositiveSemidefinite => {
            let definitely_not_pd = !out.zeros.is_empty();
            Verdict::PositiveSemidefinite { certificate, zeros: out.zeros, definitely_not_pd }
        }
        VerdictKind::PositiveDefinite => Verdict::PositiveDefinite { certificate },
    }
}

/// All `n!^m` substituted forms at exactly depth m, with their paths, in
/// lexicographic path order.
pub fn expand_to_depth(
    f: &Form,
    depth: u32,
    node_budget: usize,
) -> Result<Vec<(Vec<Permutation>, Form)>, SearchError> {
    let fanout = factorial_usize(f.n()) as u128;
    let mut total: u128 = 1;
    for _ in 0..depth {
        total = total.saturating_mul(fanout);
        if total > node_budget as u128 {
            return Err(SearchError::NodeBudgetExceeded { needed: total, budget: node_budget });
        }
    }
    let mut result = Vec::with_capacity(total as usize);
    let mut path: Vec<Permutation> = Vec::new();
    expand_rec(f, depth, &mut path, &mut result);
    Ok(result)
}

fn expand_rec(
    current: &Form,
    remaining: u32,
    path: &mut Vec<Permutation>,
    out: &mut Vec<(Vec<Permutation>, Form)>,
) {
    if remaining == 0 {
        out.push((path.clone(), current.clone()));
        return;
    }
    for (theta, sub) in wds_children(current) {
        path.push(theta);
        expand_rec(&sub.form, remaining - 1, path, out);
        path.pop();
    }
}
