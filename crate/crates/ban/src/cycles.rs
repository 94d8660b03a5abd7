//! Critical cycles: structural cycles whose nodes are all unstable and whose
//! arcs are all frustrated at some configuration.
//!
//! The canonical enumeration works on simple cycles. Any critical closed
//! arc-disjoint walk contains a simple critical cycle, so simple cycles are a
//! complete basis for the existence and Hamiltonicity questions asked
//! downstream.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::network::{Network, SignedStructure};

/// A critical cycle with one witnessing configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriticalCycle {
    /// Cycle nodes in traversal order, smallest node first.
    pub nodes: Vec<usize>,
    /// Arcs in traversal order.
    pub arcs: Vec<(usize, usize)>,
    pub length: usize,
    /// Product of the arc signs, `+1` or `-1`.
    pub sign: i8,
    /// A configuration at which the cycle is critical.
    pub witness: Config,
}

impl CriticalCycle {
    /// Rotation-invariant identity: the sorted arc list.
    pub fn arc_key(&self) -> Vec<(usize, usize)> {
        let mut key = self.arcs.clone();
        key.sort_unstable();
        key
    }

    pub fn is_hamiltonian(&self, n: usize) -> bool {
        self.nodes.len() == n
    }
}

/// Simple directed cycles of an adjacency list, self-loops included.
///
/// Johnson's blocking scheme, restricted to cycles through the least node of
/// each strongly connected remainder. Cycles come out as node sequences with
/// the smallest node first.
pub fn simple_cycles(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut cycles = Vec::new();
    for (v, succ) in adj.iter().enumerate() {
        if succ.contains(&v) {
            cycles.push(vec![v]);
        }
    }
    let mut finder = CycleFinder {
        adj,
        blocked: vec![false; n],
        block_map: vec![BTreeSet::new(); n],
        path: Vec::new(),
        cycles: &mut cycles,
        root: 0,
    };
    for root in 0..n {
        finder.root = root;
        finder.blocked.iter_mut().for_each(|b| *b = false);
        finder.block_map.iter_mut().for_each(|s| s.clear());
        finder.circuit(root);
    }
    cycles.sort();
    cycles
}

struct CycleFinder<'a> {
    adj: &'a [Vec<usize>],
    blocked: Vec<bool>,
    block_map: Vec<BTreeSet<usize>>,
    path: Vec<usize>,
    cycles: &'a mut Vec<Vec<usize>>,
    root: usize,
}

impl CycleFinder<'_> {
    fn circuit(&mut self, v: usize) -> bool {
        let mut found = false;
        self.path.push(v);
        self.blocked[v] = true;
        for idx in 0..self.adj[v].len() {
            let w = self.adj[v][idx];
            // Only explore nodes >= root; every cycle is found from its
            // smallest node. Skip self-loops, collected separately.
            if w < self.root || w == v {
                continue;
            }
            if w == self.root {
                if self.path.len() >= 2 {
                    self.cycles.push(self.path.clone());
                }
                found = true;
            } else if !self.blocked[w] && self.circuit(w) {
                found = true;
            }
        }
        if found {
            self.unblock(v);
        } else {
            for idx in 0..self.adj[v].len() {
                let w = self.adj[v][idx];
                if w >= self.root && w != v {
                    self.block_map[w].insert(v);
                }
            }
        }
        self.path.pop();
        found
    }

    fn unblock(&mut self, v: usize) {
        self.blocked[v] = false;
        let waiting: Vec<usize> = self.block_map[v].iter().copied().collect();
        self.block_map[v].clear();
        for w in waiting {
            if self.blocked[w] {
                self.unblock(w);
            }
        }
    }
}

fn cycle_arcs(nodes: &[usize]) -> Vec<(usize, usize)> {
    (0..nodes.len())
        .map(|k| (nodes[k], nodes[(k + 1) % nodes.len()]))
        .collect()
}

fn require_monotone(structure: &SignedStructure) -> Result<()> {
    let bad = structure.non_monotone_arcs();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::NonMonotoneNetwork { arcs: bad })
    }
}

/// All cycles of the structure that are critical at `x`: the simple cycles
/// of `H_x = (U(x), FRUS(x) ∩ U(x)×U(x))`.
pub fn x_critical_cycles(net: &Network, x: &Config) -> Result<Vec<CriticalCycle>> {
    let structure = net.signed_structure();
    x_critical_cycles_in(net, &structure, x)
}

/// Same as [`x_critical_cycles`] with a precomputed structure.
pub fn x_critical_cycles_in(
    net: &Network,
    structure: &SignedStructure,
    x: &Config,
) -> Result<Vec<CriticalCycle>> {
    require_monotone(structure)?;
    let n = net.size();
    let unstable = net.unstable_mask(x);
    let frus = structure.frustration(x)?;
    let mut adj = vec![Vec::new(); n];
    for &(j, i) in frus.arcs() {
        if unstable & (1 << j) != 0 && unstable & (1 << i) != 0 {
            adj[j].push(i);
        }
    }
    let cycles = simple_cycles(&adj)
        .into_iter()
        .map(|nodes| {
            let arcs = cycle_arcs(&nodes);
            let sign = structure.walk_sign(&arcs).expect("monotone cycle arcs");
            CriticalCycle {
                length: arcs.len(),
                nodes,
                arcs,
                sign,
                witness: *x,
            }
        })
        .collect();
    Ok(cycles)
}

/// Critical cycles of the whole network: the union over all configurations,
/// deduplicated by arc set, each keeping its first witness in configuration
/// order.
///
/// ```
/// use ban::cycles::critical_cycles;
/// use ban::expr::parse_network;
///
/// let net = parse_network("0: x0 & !x1\n1: !x0 & x1\n").unwrap();
/// let cycles = critical_cycles(&net).unwrap();
/// assert_eq!(cycles.len(), 1);
/// assert_eq!((cycles[0].length, cycles[0].sign), (2, 1));
/// assert_eq!(cycles[0].witness.to_string(), "11");
/// ```
pub fn critical_cycles(net: &Network) -> Result<Vec<CriticalCycle>> {
    let structure = net.signed_structure();
    require_monotone(&structure)?;
    let mut seen: BTreeSet<Vec<(usize, usize)>> = BTreeSet::new();
    let mut out = Vec::new();
    let mut configs: Vec<Config> = Config::all(net.size()).collect();
    configs.sort();
    for x in configs {
        for cycle in x_critical_cycles_in(net, &structure, &x)? {
            if seen.insert(cycle.arc_key()) {
                out.push(cycle);
            }
        }
    }
    out.sort_by(|a, b| (a.length, &a.nodes).cmp(&(b.length, &b.nodes)));
    Ok(out)
}

/// Length of the shortest critical cycle, `None` when the network has none.
pub fn min_critical_size(net: &Network) -> Result<Option<usize>> {
    Ok(critical_cycles(net)?.first().map(|c| c.length))
}
