//! Transition graphs over the configuration space and their attractor
//! decomposition.
//!
//! The asynchronous graph (SIG) carries the size-1 elementary transitions,
//! the elementary graph (EIG) all of them, and an augmented SIG is the SIG
//! plus exactly one synchronous transition. Attractors are the terminal
//! strongly connected components.

use serde::Serialize;

use crate::config::{mask_to_indices, Config};
use crate::error::{Error, Result};
use crate::network::{Limits, Network};

/// An elementary transition `x → y` with `∅ ≠ Δ(x,y) ⊆ U(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Transition {
    pub from: Config,
    pub to: Config,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TransitionKind {
    Asynchronous,
    Synchronous,
}

impl Transition {
    /// Validate `∅ ≠ Δ(from,to) ⊆ U(from)` against the network.
    pub fn new(net: &Network, from: Config, to: Config) -> Result<Self> {
        let diff = from.diff_mask(&to)?;
        if diff == 0 {
            return Err(Error::InvalidTransition {
                from: from.to_string(),
                to: to.to_string(),
                reason: "endpoints are equal".to_string(),
            });
        }
        let unstable = net.unstable_mask(&from);
        if diff & !unstable != 0 {
            return Err(Error::InvalidTransition {
                from: from.to_string(),
                to: to.to_string(),
                reason: format!(
                    "changed automata {:?} are not all unstable",
                    mask_to_indices(diff & !unstable)
                ),
            });
        }
        Ok(Transition { from, to })
    }

    pub fn changed_mask(&self) -> u32 {
        self.from.bits() ^ self.to.bits()
    }

    pub fn changed(&self) -> Vec<usize> {
        mask_to_indices(self.changed_mask())
    }

    pub fn size(&self) -> usize {
        self.changed_mask().count_ones() as usize
    }

    pub fn kind(&self) -> TransitionKind {
        if self.size() == 1 {
            TransitionKind::Asynchronous
        } else {
            TransitionKind::Synchronous
        }
    }

    pub fn is_synchronous(&self) -> bool {
        self.size() >= 2
    }
}

/// All elementary transitions leaving `x`, sizes capped at `max_size`,
/// ordered by size then by target.
pub fn outgoing_transitions(net: &Network, x: &Config, max_size: Option<usize>) -> Vec<Transition> {
    let unstable = net.unstable_mask(x);
    let cap = max_size.unwrap_or(net.size());
    let mut out: Vec<Transition> = subsets_of(unstable)
        .filter(|w| w.count_ones() as usize <= cap)
        .map(|w| Transition {
            from: *x,
            to: x.flip_mask(w),
        })
        .collect();
    out.sort_by_key(|t| (t.size(), t.to));
    out
}

/// Nonempty subsets of a bit mask.
pub fn subsets_of(mask: u32) -> impl Iterator<Item = u32> {
    let mut sub = 0u32;
    let mut done = mask == 0;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        sub = sub.wrapping_sub(mask) & mask;
        if sub == 0 {
            done = true;
            return None;
        }
        Some(sub)
    })
}

/// Which transition graph to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Sig,
    Eig,
    /// The SIG plus one synchronous transition.
    Augmented(Transition),
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Sig => "sig",
            Variant::Eig => "eig",
            Variant::Augmented(_) => "sig+1",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AttractorKind {
    Stable,
    Unstable,
}

/// A terminal strongly connected component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attractor {
    pub configs: Vec<Config>,
    pub kind: AttractorKind,
}

impl Attractor {
    pub fn contains(&self, x: &Config) -> bool {
        self.configs.binary_search(x).is_ok()
    }
}

/// An explicit transition graph over `{0,1}^n` with its SCC partition and
/// attractor decomposition.
pub struct TransitionGraph {
    n: usize,
    variant: Variant,
    edges: Vec<Vec<u32>>,
    edge_count: usize,
    scc_id: Vec<u32>,
    scc_count: usize,
    /// Attractor index per node, if the node is recurrent.
    attractor_of: Vec<Option<u32>>,
    attractors: Vec<Attractor>,
}

impl TransitionGraph {
    /// Build the requested graph and decompose it.
    ///
    /// ```
    /// use ban::dynamics::{TransitionGraph, Variant};
    /// use ban::expr::parse_network;
    /// use ban::network::Limits;
    ///
    /// let net = parse_network("0: x0 & !x1\n1: !x0 & x1\n").unwrap();
    /// let sig = TransitionGraph::build(&net, Variant::Sig, &Limits::default()).unwrap();
    /// assert_eq!(sig.attractors().len(), 3);
    /// assert!(sig.attractor_of(&"11".parse().unwrap()).is_none());
    /// ```
    pub fn build(net: &Network, variant: Variant, limits: &Limits) -> Result<Self> {
        let n = net.size();
        match variant {
            Variant::Sig | Variant::Augmented(_) => limits.check_sig(n)?,
            Variant::Eig => limits.check_eig(n)?,
        }
        let size = 1usize << n;
        let mut edges: Vec<Vec<u32>> = vec![Vec::new(); size];
        for x in Config::all(n) {
            let unstable = net.unstable_mask(&x);
            match variant {
                Variant::Sig | Variant::Augmented(_) => {
                    for i in mask_to_indices(unstable) {
                        edges[x.bits() as usize].push(x.bits() ^ (1 << i));
                    }
                }
                Variant::Eig => {
                    for w in subsets_of(unstable) {
                        edges[x.bits() as usize].push(x.bits() ^ w);
                    }
                }
            }
        }
        if let Variant::Augmented(t) = variant {
            // Re-validate against this network.
            let t = Transition::new(net, t.from, t.to)?;
            if !t.is_synchronous() {
                return Err(Error::InvalidTransition {
                    from: t.from.to_string(),
                    to: t.to.to_string(),
                    reason: "augmenting transition must be synchronous".to_string(),
                });
            }
            edges[t.from.bits() as usize].push(t.to.bits());
        }
        for adj in &mut edges {
            adj.sort_unstable();
        }
        let edge_count = edges.iter().map(Vec::len).sum();
        let (scc_id, scc_count) = tarjan_scc(&edges);
        // Terminal SCCs: no edge leaving the component.
        let mut terminal = vec![true; scc_count];
        for (u, adj) in edges.iter().enumerate() {
            for &v in adj {
                if scc_id[u] != scc_id[v as usize] {
                    terminal[scc_id[u] as usize] = false;
                }
            }
        }
        let mut members: Vec<Vec<Config>> = vec![Vec::new(); scc_count];
        for x in Config::all(n) {
            members[scc_id[x.bits() as usize] as usize].push(x);
        }
        let mut terminal_sccs = Vec::new();
        for (scc, configs) in members.into_iter().enumerate() {
            if !terminal[scc] {
                continue;
            }
            let mut configs = configs;
            configs.sort();
            terminal_sccs.push((scc, configs));
        }
        // Attractors are numbered by their smallest configuration.
        terminal_sccs.sort_by(|a, b| a.1.cmp(&b.1));
        let mut attractors = Vec::new();
        let mut attractor_index = vec![None; scc_count];
        for (scc, configs) in terminal_sccs {
            // No graph variant has self-loops, so a terminal singleton is a
            // stable configuration.
            let kind = if configs.len() == 1 {
                debug_assert_eq!(net.unstable_mask(&configs[0]), 0);
                AttractorKind::Stable
            } else {
                AttractorKind::Unstable
            };
            attractor_index[scc] = Some(attractors.len() as u32);
            attractors.push(Attractor { configs, kind });
        }
        let attractor_of = scc_id
            .iter()
            .map(|&scc| attractor_index[scc as usize])
            .collect();
        Ok(TransitionGraph {
            n,
            variant,
            edges,
            edge_count,
            scc_id,
            scc_count,
            attractor_of,
            attractors,
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn successors(&self, x: &Config) -> impl Iterator<Item = Config> + '_ {
        let n = self.n;
        self.edges[x.bits() as usize]
            .iter()
            .map(move |&b| Config::new(n, b))
    }

    pub fn edges(&self) -> impl Iterator<Item = (Config, Config)> + '_ {
        let n = self.n;
        self.edges.iter().enumerate().flat_map(move |(u, adj)| {
            adj.iter()
                .map(move |&v| (Config::new(n, u as u32), Config::new(n, v)))
        })
    }

    pub fn scc_count(&self) -> usize {
        self.scc_count
    }

    pub fn scc_of(&self, x: &Config) -> u32 {
        self.scc_id[x.bits() as usize]
    }

    pub fn attractors(&self) -> &[Attractor] {
        &self.attractors
    }

    /// Attractor index of `x`, if `x` is recurrent.
    pub fn attractor_of(&self, x: &Config) -> Option<usize> {
        self.attractor_of[x.bits() as usize].map(|a| a as usize)
    }

    pub fn is_recurrent(&self, x: &Config) -> bool {
        self.attractor_of(x).is_some()
    }

    /// All recurrent configurations, sorted.
    pub fn recurrent_configs(&self) -> Vec<Config> {
        let mut out: Vec<Config> = self
            .attractors
            .iter()
            .flat_map(|a| a.configs.iter().copied())
            .collect();
        out.sort();
        out
    }

    pub fn transient_count(&self) -> usize {
        (1usize << self.n)
            - self
                .attractors
                .iter()
                .map(|a| a.configs.len())
                .sum::<usize>()
    }

    /// Forward-reachable node set from `z` (including `z`), as a bit vector
    /// over node ids.
    fn forward_set(&self, z: &Config) -> Vec<bool> {
        let mut seen = vec![false; 1 << self.n];
        let mut queue = vec![z.bits()];
        seen[z.bits() as usize] = true;
        while let Some(u) = queue.pop() {
            for &v in &self.edges[u as usize] {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    queue.push(v);
                }
            }
        }
        seen
    }

    /// Full reachability report for `z`.
    pub fn reachability(&self, z: &Config) -> ReachabilitySets {
        let forward = self.forward_set(z);
        let mut orbit = Vec::new();
        let mut reachable = vec![false; self.attractors.len()];
        for x in Config::all(self.n) {
            if forward[x.bits() as usize] {
                orbit.push(x);
                if let Some(a) = self.attractor_of(&x) {
                    reachable[a] = true;
                }
            }
        }
        orbit.sort();
        // Backward set by reverse BFS.
        let mut rev: Vec<Vec<u32>> = vec![Vec::new(); 1 << self.n];
        for (u, adj) in self.edges.iter().enumerate() {
            for &v in adj {
                rev[v as usize].push(u as u32);
            }
        }
        let mut seen = vec![false; 1 << self.n];
        let mut queue = vec![z.bits()];
        seen[z.bits() as usize] = true;
        while let Some(u) = queue.pop() {
            for &v in &rev[u as usize] {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    queue.push(v);
                }
            }
        }
        let mut backward: Vec<Config> = Config::all(self.n)
            .filter(|x| seen[x.bits() as usize])
            .collect();
        backward.sort();
        ReachabilitySets {
            configuration: *z,
            orbit,
            backward,
            reachable_attractors: reachable
                .iter()
                .enumerate()
                .filter(|(_, &r)| r)
                .map(|(a, _)| a)
                .collect(),
            attractor: self.attractor_of(z),
        }
    }

    /// Basin of attractor `a`: configurations reaching it, the attractor
    /// itself excluded.
    pub fn basin(&self, a: usize) -> Vec<Config> {
        let seed = self.attractors[a].configs[0];
        let sets = self.reachability(&seed);
        sets.backward
            .into_iter()
            .filter(|x| !self.attractors[a].contains(x))
            .collect()
    }
}

/// Orbit, backward set and reachable attractors of one configuration.
#[derive(Clone, Debug)]
pub struct ReachabilitySets {
    pub configuration: Config,
    /// `O(z) = {y : z →* y}`, sorted.
    pub orbit: Vec<Config>,
    /// `B(z) = {y : y →* z}`, sorted.
    pub backward: Vec<Config>,
    /// Indices into the graph's attractor list, sorted.
    pub reachable_attractors: Vec<usize>,
    /// Attractor of `z` when `z` is recurrent.
    pub attractor: Option<usize>,
}

impl ReachabilitySets {
    pub fn is_recurrent(&self) -> bool {
        self.attractor.is_some()
    }
}

/// Iterative Tarjan over an adjacency list; returns (scc id per node, scc
/// count). Ids are assigned in emission order, so an edge between distinct
/// components always goes from a higher id to a lower one.
pub fn tarjan_scc(edges: &[Vec<u32>]) -> (Vec<u32>, usize) {
    let n = edges.len();
    const UNSET: u32 = u32::MAX;
    let mut index = vec![UNSET; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut scc_id = vec![UNSET; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut next_index = 0u32;
    let mut scc_count = 0u32;
    // Explicit DFS frames: (node, next edge position).
    let mut frames: Vec<(u32, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        frames.push((root as u32, 0));
        while let Some(&mut (v, ref mut edge_pos)) = frames.last_mut() {
            let v = v as usize;
            if *edge_pos == 0 {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v as u32);
                on_stack[v] = true;
            }
            let mut descended = false;
            while *edge_pos < edges[v].len() {
                let w = edges[v][*edge_pos] as usize;
                *edge_pos += 1;
                if index[w] == UNSET {
                    frames.push((w as u32, 0));
                    descended = true;
                    break;
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            }
            if descended {
                continue;
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w as usize] = false;
                    scc_id[w as usize] = scc_count;
                    if w as usize == v {
                        break;
                    }
                }
                scc_count += 1;
            }
            frames.pop();
            if let Some(&mut (parent, _)) = frames.last_mut() {
                let p = parent as usize;
                low[p] = low[p].min(low[v]);
            }
        }
    }
    (scc_id, scc_count as usize)
}

/// Correspondence between the attractors of the SIG and of the SIG augmented
/// with one synchronous transition.
#[derive(Clone, Debug, Serialize)]
pub struct PreservationReport {
    pub transition: Transition,
    /// Status of each SIG attractor in the augmented graph.
    pub sig_status: Vec<SigAttractorStatus>,
    /// For each augmented attractor, the SIG attractors it contains.
    pub contains_sig: Vec<Vec<usize>>,
    /// True iff every augmented attractor contains a SIG-recurrent
    /// configuration.
    pub no_attractor_from_scratch: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SigAttractorStatus {
    /// Present, as a set, among the augmented attractors.
    Preserved,
    /// Strictly contained in the given augmented attractor.
    Grown(usize),
    /// All of its configurations are transient in the augmented graph.
    Destroyed,
    /// Some configurations recurrent, some not, or split across attractors.
    Partial,
}

/// Check that adding one synchronous transition cannot create an attractor
/// from scratch, and map the attractors of both graphs onto each other.
pub fn check_attractor_preservation(
    net: &Network,
    t: Transition,
    limits: &Limits,
) -> Result<PreservationReport> {
    let sig = TransitionGraph::build(net, Variant::Sig, limits)?;
    let aug = TransitionGraph::build(net, Variant::Augmented(t), limits)?;
    Ok(compare_attractors(&sig, &aug, t))
}

pub fn compare_attractors(
    sig: &TransitionGraph,
    aug: &TransitionGraph,
    t: Transition,
) -> PreservationReport {
    let mut sig_status = Vec::new();
    for a in sig.attractors() {
        let in_aug: Vec<Option<usize>> = a.configs.iter().map(|x| aug.attractor_of(x)).collect();
        let status = if in_aug.iter().all(Option::is_none) {
            SigAttractorStatus::Destroyed
        } else if let Some(target) = in_aug[0] {
            if in_aug.iter().all(|&b| b == Some(target)) {
                if aug.attractors()[target].configs == a.configs {
                    SigAttractorStatus::Preserved
                } else {
                    SigAttractorStatus::Grown(target)
                }
            } else {
                SigAttractorStatus::Partial
            }
        } else {
            SigAttractorStatus::Partial
        };
        sig_status.push(status);
    }
    let contains_sig: Vec<Vec<usize>> = aug
        .attractors()
        .iter()
        .map(|b| {
            sig.attractors()
                .iter()
                .enumerate()
                .filter(|(_, a)| a.configs.iter().all(|x| b.contains(x)))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    let sig_recurrent = sig.recurrent_configs();
    let no_attractor_from_scratch = aug.attractors().iter().all(|b| {
        b.configs
            .iter()
            .any(|x| sig_recurrent.binary_search(x).is_ok())
    });
    PreservationReport {
        transition: t,
        sig_status,
        contains_sig,
        no_attractor_from_scratch,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples::{free_net, widget_net};

    #[test]
    fn stable_configuration_has_no_outgoing() {
        let net = free_net();
        assert!(outgoing_transitions(&net, &"00".parse().unwrap(), None).is_empty());
    }

    #[test]
    fn free_net_outgoing_at_11() {
        let net = free_net();
        let ts = outgoing_transitions(&net, &"11".parse().unwrap(), None);
        let repr: Vec<(String, usize)> = ts.iter().map(|t| (t.to.to_string(), t.size())).collect();
        assert_eq!(
            repr,
            vec![
                ("01".to_string(), 1),
                ("10".to_string(), 1),
                ("00".to_string(), 2)
            ]
        );
    }

    #[test]
    fn widget_outgoing_at_1100() {
        let net = widget_net();
        let ts = outgoing_transitions(&net, &"1100".parse().unwrap(), None);
        let masks: Vec<u32> = ts.iter().map(|t| t.changed_mask()).collect();
        assert_eq!(masks, vec![0b01, 0b10, 0b11]);
    }

    #[test]
    fn free_net_sig_attractors() {
        let net = free_net();
        let g = TransitionGraph::build(&net, Variant::Sig, &Limits::default()).unwrap();
        let stable: Vec<String> = g
            .attractors()
            .iter()
            .map(|a| {
                assert_eq!(a.kind, AttractorKind::Stable);
                a.configs[0].to_string()
            })
            .collect();
        assert_eq!(stable, vec!["00", "01", "10"]);
        assert!(!g.is_recurrent(&"11".parse().unwrap()));
        assert_eq!(g.transient_count(), 1);
    }

    #[test]
    fn widget_sig_attractors() {
        let net = widget_net();
        let g = TransitionGraph::build(&net, Variant::Sig, &Limits::default()).unwrap();
        assert_eq!(g.attractors().len(), 2);
        let stable: Vec<&Attractor> = g
            .attractors()
            .iter()
            .filter(|a| a.kind == AttractorKind::Stable)
            .collect();
        assert_eq!(stable.len(), 1);
        assert_eq!(stable[0].configs[0].to_string(), "0000");
        let unstable: Vec<&Attractor> = g
            .attractors()
            .iter()
            .filter(|a| a.kind == AttractorKind::Unstable)
            .collect();
        assert_eq!(unstable.len(), 1);
        assert_eq!(unstable[0].configs.len(), 12);
        for x in &unstable[0].configs {
            assert!(x.bit(0) || x.bit(1), "{x} should satisfy x0 | x1 = 1");
        }
    }

    #[test]
    fn free_net_reachability() {
        let net = free_net();
        let g = TransitionGraph::build(&net, Variant::Sig, &Limits::default()).unwrap();
        let r = g.reachability(&"11".parse().unwrap());
        assert!(!r.is_recurrent());
        let reached: Vec<String> = r
            .reachable_attractors
            .iter()
            .map(|&a| g.attractors()[a].configs[0].to_string())
            .collect();
        assert_eq!(reached, vec!["01", "10"]);
        // 00 has an empty basin.
        let zero = g.reachability(&"00".parse().unwrap());
        assert_eq!(zero.backward, vec!["00".parse().unwrap()]);
        assert!(zero.is_recurrent());
        assert_eq!(zero.orbit, vec!["00".parse().unwrap()]);
    }

    #[test]
    fn sig_subgraph_of_eig_and_augmented_offset() {
        let net = free_net();
        let limits = Limits::default();
        let sig = TransitionGraph::build(&net, Variant::Sig, &limits).unwrap();
        let eig = TransitionGraph::build(&net, Variant::Eig, &limits).unwrap();
        let sig_edges: Vec<_> = sig.edges().collect();
        let eig_edges: Vec<_> = eig.edges().collect();
        for e in &sig_edges {
            assert!(eig_edges.contains(e));
        }
        let t = Transition::new(&net, "11".parse().unwrap(), "00".parse().unwrap()).unwrap();
        let aug = TransitionGraph::build(&net, Variant::Augmented(t), &limits).unwrap();
        assert_eq!(aug.edge_count(), sig.edge_count() + 1);
    }

    #[test]
    fn augmented_rejects_invalid_transition() {
        let net = free_net();
        let from: Config = "00".parse().unwrap();
        let to: Config = "11".parse().unwrap();
        assert!(Transition::new(&net, from, to).is_err());
    }

    #[test]
    fn preservation_free_net() {
        let net = free_net();
        let t = Transition::new(&net, "11".parse().unwrap(), "00".parse().unwrap()).unwrap();
        let rep = check_attractor_preservation(&net, t, &Limits::default()).unwrap();
        assert!(rep.no_attractor_from_scratch);
        assert!(rep
            .sig_status
            .iter()
            .all(|s| *s == SigAttractorStatus::Preserved));
    }

    #[test]
    fn preservation_widget_destroys_unstable() {
        let net = widget_net();
        let t = Transition::new(&net, "1100".parse().unwrap(), "0000".parse().unwrap()).unwrap();
        let rep = check_attractor_preservation(&net, t, &Limits::default()).unwrap();
        assert!(rep.no_attractor_from_scratch);
        let destroyed = rep
            .sig_status
            .iter()
            .filter(|s| **s == SigAttractorStatus::Destroyed)
            .count();
        let preserved = rep
            .sig_status
            .iter()
            .filter(|s| **s == SigAttractorStatus::Preserved)
            .count();
        assert_eq!((destroyed, preserved), (1, 1));
    }

    #[test]
    fn unstable_attractors_never_singletons() {
        // Spot check on the widget EIG as well.
        let net = widget_net();
        let g = TransitionGraph::build(&net, Variant::Eig, &Limits::default()).unwrap();
        for a in g.attractors() {
            if a.kind == AttractorKind::Unstable {
                assert!(a.configs.len() >= 2);
            }
        }
    }
}
