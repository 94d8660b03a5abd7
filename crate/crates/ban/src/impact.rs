//! Impact of a single added synchronous transition on the asynchronous
//! dynamics, and whole-network sensitivity.
//!
//! Adding the transition `x ⇀ y` to the SIG yields the augmented graph.
//! The classifier computes ground truth from both graphs and then matches
//! the four printed impact cases; a transition matching none of them gets
//! the `Extended` label so a taxonomy gap surfaces as a reported artifact
//! rather than a crash.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::config::Config;
use crate::cycles;
use crate::dynamics::{
    compare_attractors, PreservationReport, SigAttractorStatus, Transition, TransitionGraph,
    Variant,
};
use crate::error::{Error, Result};
use crate::network::{Limits, Network, Sign};
use crate::sequential::{normal_transitions, SequentialisationVerdict};

/// Impact of one synchronous transition `x ⇀ y` on the asynchronous
/// attractor landscape.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ImpactLabel {
    /// `x` transient and every attractor reachable from `y` was already
    /// reachable from `x`.
    NoImpact,
    /// `x` transient and `y` reaches an attractor `x` could not.
    F,
    /// `x` recurrent, `y` transient, and `y` reaches exactly the attractor
    /// of `x`: the attractor grows.
    G,
    /// Both endpoints recurrent in distinct attractors: the attractor of
    /// `x` is destroyed.
    D,
    /// None of the four cases; the shape says which gap was hit.
    Extended(ExtendedShape),
}

/// The only two shapes a valid synchronous transition can take outside the
/// four printed cases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ExtendedShape {
    /// Both endpoints recurrent in the same attractor.
    SameAttractor,
    /// `x` recurrent, `y` transient, and `y` does not reach exactly the
    /// attractor of `x`.
    RecurrentToTransientDiverging,
}

impl ImpactLabel {
    pub fn name(&self) -> &'static str {
        match self {
            ImpactLabel::NoImpact => "none",
            ImpactLabel::F => "F",
            ImpactLabel::G => "G",
            ImpactLabel::D => "D",
            ImpactLabel::Extended(ExtendedShape::SameAttractor) => "extended:same-attractor",
            ImpactLabel::Extended(ExtendedShape::RecurrentToTransientDiverging) => {
                "extended:diverging"
            }
        }
    }

    pub fn has_impact(&self) -> bool {
        !matches!(self, ImpactLabel::NoImpact)
    }
}

/// Full classification record for one transition.
#[derive(Clone, Debug, Serialize)]
pub struct ImpactReport {
    pub transition: Transition,
    pub label: ImpactLabel,
    pub x_recurrent: bool,
    pub y_recurrent: bool,
    /// Attractors of the SIG reachable from `x`, by index.
    pub aa_x: Vec<usize>,
    /// Attractors of the SIG reachable from `y`, by index.
    pub aa_y: Vec<usize>,
    /// Attractor correspondence between the SIG and the augmented graph.
    pub evidence: PreservationReport,
    /// True iff the two graphs have the same recurrent configurations and
    /// every configuration reaches the same attractor sets in both.
    pub semantically_silent: bool,
}

impl ImpactReport {
    /// SIG attractor indices destroyed by the transition.
    pub fn destroyed(&self) -> Vec<usize> {
        self.evidence
            .sig_status
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == SigAttractorStatus::Destroyed)
            .map(|(i, _)| i)
            .collect()
    }

    /// SIG attractor indices strictly grown by the transition.
    pub fn grown(&self) -> Vec<usize> {
        self.evidence
            .sig_status
            .iter()
            .enumerate()
            .filter(|(_, s)| matches!(s, SigAttractorStatus::Grown(_)))
            .map(|(i, _)| i)
            .collect()
    }
}

fn impact_label(
    x_recurrent: bool,
    y_recurrent: bool,
    aa_x: &[usize],
    aa_y: &[usize],
) -> ImpactLabel {
    let extra: Vec<usize> = aa_y.iter().filter(|a| !aa_x.contains(a)).copied().collect();
    match (x_recurrent, y_recurrent) {
        (false, _) => {
            if extra.is_empty() {
                ImpactLabel::NoImpact
            } else {
                ImpactLabel::F
            }
        }
        (true, true) => {
            if extra.is_empty() {
                ImpactLabel::Extended(ExtendedShape::SameAttractor)
            } else {
                ImpactLabel::D
            }
        }
        (true, false) => {
            if aa_y == aa_x {
                ImpactLabel::G
            } else {
                ImpactLabel::Extended(ExtendedShape::RecurrentToTransientDiverging)
            }
        }
    }
}

/// Classify the impact of adding `t` to the SIG.
///
/// ```
/// use ban::dynamics::Transition;
/// use ban::expr::parse_network;
/// use ban::impact::classify_impact;
/// use ban::network::Limits;
///
/// let net = parse_network("0: x0 & !x1\n1: !x0 & x1\n").unwrap();
/// let t = Transition::new(&net, "11".parse().unwrap(), "00".parse().unwrap()).unwrap();
/// let report = classify_impact(&net, t, &Limits::default()).unwrap();
/// assert_eq!(report.label.name(), "F");
/// assert!(!report.x_recurrent);
/// ```
pub fn classify_impact(net: &Network, t: Transition, limits: &Limits) -> Result<ImpactReport> {
    let sig = TransitionGraph::build(net, Variant::Sig, limits)?;
    classify_impact_in(net, &sig, t, limits)
}

/// Same as [`classify_impact`] with a prebuilt SIG.
pub fn classify_impact_in(
    net: &Network,
    sig: &TransitionGraph,
    t: Transition,
    limits: &Limits,
) -> Result<ImpactReport> {
    let t = Transition::new(net, t.from, t.to)?;
    if !t.is_synchronous() {
        return Err(Error::InvalidTransition {
            from: t.from.to_string(),
            to: t.to.to_string(),
            reason: "impact is defined for synchronous transitions".to_string(),
        });
    }
    let aug = TransitionGraph::build(net, Variant::Augmented(t), limits)?;
    let rx = sig.reachability(&t.from);
    let ry = sig.reachability(&t.to);
    let label = impact_label(
        rx.is_recurrent(),
        ry.is_recurrent(),
        &rx.reachable_attractors,
        &ry.reachable_attractors,
    );
    let evidence = compare_attractors(sig, &aug, t);
    let semantically_silent = graphs_agree(net.size(), sig, &aug);
    Ok(ImpactReport {
        transition: t,
        label,
        x_recurrent: rx.is_recurrent(),
        y_recurrent: ry.is_recurrent(),
        aa_x: rx.reachable_attractors,
        aa_y: ry.reachable_attractors,
        evidence,
        semantically_silent,
    })
}

/// True iff the SIG and the augmented graph have the same attractor
/// decomposition and every configuration reaches the same attractors, up to
/// attractor renumbering.
fn graphs_agree(n: usize, sig: &TransitionGraph, aug: &TransitionGraph) -> bool {
    if sig.attractors().len() != aug.attractors().len() {
        return false;
    }
    // Match attractors by configuration set.
    let mut map = vec![usize::MAX; sig.attractors().len()];
    for (i, a) in sig.attractors().iter().enumerate() {
        match aug.attractors().iter().position(|b| b.configs == a.configs) {
            Some(j) => map[i] = j,
            None => return false,
        }
    }
    Config::all(n).all(|x| {
        let in_sig: Vec<usize> = sig
            .reachability(&x)
            .reachable_attractors
            .iter()
            .map(|&a| map[a])
            .collect();
        let mut in_sig = in_sig;
        in_sig.sort_unstable();
        in_sig == aug.reachability(&x).reachable_attractors
    })
}

/// Network-level sensitivity classes, strongest last.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Sensitivity {
    F,
    G,
    D,
    M,
}

impl Sensitivity {
    pub fn name(&self) -> &'static str {
        match self {
            Sensitivity::F => "F",
            Sensitivity::G => "G",
            Sensitivity::D => "D",
            Sensitivity::M => "M",
        }
    }
}

/// Sensitivity verdict for a whole network.
#[derive(Clone, Debug, Serialize)]
pub struct SensitivityReport {
    /// Hex truth-table id of the network.
    pub network: String,
    pub normal_count: usize,
    /// Count of normal transitions per impact label name.
    pub per_label: BTreeMap<String, usize>,
    pub sensitivities: BTreeSet<Sensitivity>,
    /// Reciprocal D-impact pairs between the same two attractors.
    pub merge_pairs: Vec<(Transition, Transition)>,
    /// One witnessing transition per sensitivity present.
    pub witnesses: BTreeMap<Sensitivity, Transition>,
    pub very_sensitive: bool,
    /// Every classified normal transition.
    pub reports: Vec<ImpactReport>,
}

/// Classify the sensitivity of a network from its normal transitions.
pub fn classify_sensitivity(net: &Network, limits: &Limits) -> Result<SensitivityReport> {
    let verdicts = normal_transitions(net, limits)?;
    classify_sensitivity_from(net, &verdicts, limits)
}

/// Same as [`classify_sensitivity`] with the normal transitions already
/// enumerated.
pub fn classify_sensitivity_from(
    net: &Network,
    normal: &[SequentialisationVerdict],
    limits: &Limits,
) -> Result<SensitivityReport> {
    let sig = TransitionGraph::build(net, Variant::Sig, limits)?;
    let mut reports = Vec::with_capacity(normal.len());
    for v in normal {
        reports.push(classify_impact_in(net, &sig, v.transition, limits)?);
    }
    let mut per_label: BTreeMap<String, usize> = BTreeMap::new();
    for r in &reports {
        *per_label.entry(r.label.name().to_string()).or_default() += 1;
    }
    let mut sensitivities = BTreeSet::new();
    let mut witnesses = BTreeMap::new();
    for r in &reports {
        let s = match r.label {
            ImpactLabel::F => Sensitivity::F,
            ImpactLabel::G => Sensitivity::G,
            _ => continue,
        };
        sensitivities.insert(s);
        witnesses.entry(s).or_insert(r.transition);
    }
    // D-impact transitions go to M when a reciprocal partner connects the
    // same two attractors the other way, and to D otherwise.
    let d_reports: Vec<&ImpactReport> = reports
        .iter()
        .filter(|r| r.label == ImpactLabel::D)
        .collect();
    let att = |x: &Config| sig.attractor_of(x).expect("recurrent endpoint");
    let mut merge_pairs = Vec::new();
    let mut in_pair = vec![false; d_reports.len()];
    for i in 0..d_reports.len() {
        for j in 0..d_reports.len() {
            if i == j {
                continue;
            }
            let (a, b) = (d_reports[i].transition, d_reports[j].transition);
            if att(&a.from) == att(&b.to) && att(&a.to) == att(&b.from) {
                in_pair[i] = true;
                if i < j {
                    merge_pairs.push((a, b));
                }
            }
        }
    }
    for (k, r) in d_reports.iter().enumerate() {
        let s = if in_pair[k] {
            Sensitivity::M
        } else {
            Sensitivity::D
        };
        sensitivities.insert(s);
        witnesses.entry(s).or_insert(r.transition);
    }
    let very_sensitive =
        sensitivities.contains(&Sensitivity::D) || sensitivities.contains(&Sensitivity::M);
    Ok(SensitivityReport {
        network: net.id(),
        normal_count: normal.len(),
        per_label,
        sensitivities,
        merge_pairs,
        witnesses,
        very_sensitive,
        reports,
    })
}

/// Outcome of the structural-prerequisite checks.
#[derive(Clone, Debug, Serialize)]
pub struct StructuralReport {
    pub has_critical_cycle: bool,
    pub min_critical_size: Option<usize>,
    pub has_negative_cycle: bool,
    pub hamiltonian_exception: bool,
    /// Sensitivity present implies a critical cycle.
    pub item1_ok: bool,
    /// G, D or M implies a short critical cycle and a negative cycle.
    pub item2_ok: bool,
    /// F implies a short critical cycle, unless the Hamiltonian exception.
    pub item3_ok: bool,
    /// An unstable asynchronous attractor implies a negative cycle.
    pub unstable_needs_negative_ok: bool,
}

impl StructuralReport {
    pub fn all_ok(&self) -> bool {
        self.item1_ok && self.item2_ok && self.item3_ok && self.unstable_needs_negative_ok
    }
}

/// Check the structural necessary conditions for sensitivity on a monotone
/// network.
pub fn check_structural_prerequisites(
    net: &Network,
    report: &SensitivityReport,
    limits: &Limits,
) -> Result<StructuralReport> {
    let structure = net.signed_structure();
    if !structure.is_monotone() {
        return Err(Error::NonMonotoneNetwork {
            arcs: structure.non_monotone_arcs(),
        });
    }
    let n = net.size();
    let criticals = cycles::critical_cycles(net)?;
    let min_critical = criticals.first().map(|c| c.length);
    let has_short_critical = min_critical.is_some_and(|l| l < n);
    let adj = structure.adjacency();
    let has_negative_cycle = cycles::simple_cycles(&adj).iter().any(|nodes| {
        let arcs: Vec<(usize, usize)> = (0..nodes.len())
            .map(|k| (nodes[k], nodes[(k + 1) % nodes.len()]))
            .collect();
        structure.walk_sign(&arcs) == Some(-1)
    });
    let hamiltonian_exception = criticals.iter().any(|c| c.is_hamiltonian(n))
        && (0..n).all(|i| structure.sign(i, i) == Some(Sign::Positive));
    let s = &report.sensitivities;
    let item1_ok = s.is_empty() || !criticals.is_empty();
    let needs_item2 =
        s.contains(&Sensitivity::G) || s.contains(&Sensitivity::D) || s.contains(&Sensitivity::M);
    let item2_ok = !needs_item2 || (has_short_critical && has_negative_cycle);
    let item3_ok = !s.contains(&Sensitivity::F) || has_short_critical || hamiltonian_exception;
    let sig = TransitionGraph::build(net, Variant::Sig, limits)?;
    let has_unstable_attractor = sig
        .attractors()
        .iter()
        .any(|a| a.kind == crate::dynamics::AttractorKind::Unstable);
    let unstable_needs_negative_ok = !has_unstable_attractor || has_negative_cycle;
    Ok(StructuralReport {
        has_critical_cycle: !criticals.is_empty(),
        min_critical_size: min_critical,
        has_negative_cycle,
        hamiltonian_exception,
        item1_ok,
        item2_ok,
        item3_ok,
        unstable_needs_negative_ok,
    })
}

/// True iff no augmented attractor swallows two distinct SIG attractors:
/// one added transition is not enough to merge attractors.
pub fn never_merges(report: &ImpactReport) -> bool {
    report.evidence.contains_sig.iter().all(|v| v.len() <= 1)
}
