//! Boolean automata networks and their signed interaction structure.
//!
//! A network of size `n` is a family of `n` local functions
//! `f_i : {0,1}^n → {0,1}`, stored as canonical truth tables. The structure
//! is the digraph with an arc `(j, i)` whenever `f_i` effectively depends on
//! input `j`; local monotony lets each arc carry a sign.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::{mask_to_indices, Config, HARD_CEILING};
use crate::error::{Error, Result};
use crate::expr::Expr;

/// Default ceiling for analyses that only materialize the asynchronous graph.
pub const SIG_CEILING: usize = 16;
/// Default ceiling for analyses that enumerate synchronous transitions.
pub const EIG_CEILING: usize = 10;

/// Soft size limits for graph-level work. The hard ceiling of
/// [`HARD_CEILING`] cannot be raised.
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub sig: usize,
    pub eig: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            sig: SIG_CEILING,
            eig: EIG_CEILING,
        }
    }
}

impl Limits {
    pub fn with_max(max_n: usize) -> Self {
        let capped = max_n.min(HARD_CEILING);
        Limits {
            sig: capped,
            eig: capped,
        }
    }

    pub fn check_sig(&self, n: usize) -> Result<()> {
        if n > self.sig {
            Err(Error::SizeCeiling {
                n,
                limit: self.sig,
                what: "SIG",
            })
        } else {
            Ok(())
        }
    }

    pub fn check_eig(&self, n: usize) -> Result<()> {
        if n > self.eig {
            Err(Error::SizeCeiling {
                n,
                limit: self.eig,
                what: "EIG",
            })
        } else {
            Ok(())
        }
    }
}

/// A Boolean automata network: `n` local transition functions over `{0,1}^n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Network {
    n: usize,
    /// `tables[i][x.bits()]` is `f_i(x)`.
    tables: Vec<Vec<bool>>,
}

impl Network {
    /// Build from raw truth tables; `tables[i]` must have `2^n` entries.
    pub fn from_tables(tables: Vec<Vec<bool>>) -> Result<Self> {
        let n = tables.len();
        if n == 0 || n > HARD_CEILING {
            return Err(Error::SizeCeiling {
                n,
                limit: HARD_CEILING,
                what: "hard",
            });
        }
        let expected = 1usize << n;
        for (i, t) in tables.iter().enumerate() {
            if t.len() != expected {
                return Err(Error::BadTable {
                    index: i,
                    got: t.len(),
                    expected,
                });
            }
        }
        Ok(Network { n, tables })
    }

    /// Build from per-automaton expressions; `exprs[i]` defines `f_i`.
    pub fn from_expressions(n: usize, exprs: &[Expr]) -> Result<Self> {
        if n == 0 || n > HARD_CEILING || exprs.len() != n {
            return Err(Error::SizeCeiling {
                n: exprs.len().max(n),
                limit: HARD_CEILING,
                what: "hard",
            });
        }
        for e in exprs {
            if let Some(v) = e.max_var() {
                if v >= n {
                    return Err(Error::IndexOutOfRange { index: v, n });
                }
            }
        }
        let tables = exprs
            .iter()
            .map(|e| Config::all(n).map(|x| e.eval(&x)).collect())
            .collect();
        Ok(Network { n, tables })
    }

    /// Compact constructor for tests and enumeration: bit `x` of `masks[i]`
    /// is `f_i` at the configuration with id `x`. Only usable for `n ≤ 5`.
    pub fn from_table_masks(n: usize, masks: &[u32]) -> Result<Self> {
        assert!(n <= 5 && masks.len() == n);
        let tables = masks
            .iter()
            .map(|&m| (0..1u32 << n).map(|x| (m >> x) & 1 == 1).collect())
            .collect();
        Network::from_tables(tables)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// `f_i(x)`.
    pub fn eval(&self, i: usize, x: &Config) -> bool {
        self.tables[i][x.bits() as usize]
    }

    pub fn table(&self, i: usize) -> &[bool] {
        &self.tables[i]
    }

    /// The instability set `U(x) = {i : f_i(x) ≠ x_i}` as a bit mask.
    pub fn unstable_mask(&self, x: &Config) -> u32 {
        let mut mask = 0u32;
        for i in 0..self.n {
            if self.eval(i, x) != x.bit(i) {
                mask |= 1 << i;
            }
        }
        mask
    }

    /// Full instability report at `x`.
    pub fn instabilities(&self, x: &Config) -> Result<InstabilityReport> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: self.n,
            });
        }
        Ok(InstabilityReport {
            configuration: *x,
            unstable_mask: self.unstable_mask(x),
            n: self.n,
        })
    }

    /// The signed interaction structure, by exhaustive scan of `{0,1}^n`.
    pub fn signed_structure(&self) -> SignedStructure {
        let mut arcs = BTreeMap::new();
        for i in 0..self.n {
            for j in 0..self.n {
                let mut increasing = false;
                let mut decreasing = false;
                // Scan each pair {x, x̄^j} once, from the side where x_j = 0.
                for x in Config::all(self.n) {
                    if x.bit(j) {
                        continue;
                    }
                    let low = self.eval(i, &x);
                    let high = self.eval(i, &x.flip_one(j));
                    if low != high {
                        if high {
                            increasing = true;
                        } else {
                            decreasing = true;
                        }
                    }
                }
                let sign = match (increasing, decreasing) {
                    (false, false) => continue, // no arc
                    (true, false) => Sign::Positive,
                    (false, true) => Sign::Negative,
                    (true, true) => Sign::NonMonotone,
                };
                arcs.insert((j, i), sign);
            }
        }
        SignedStructure { n: self.n, arcs }
    }

    /// Local monotony check: true iff every arc of the structure is signed.
    pub fn is_locally_monotone(&self) -> (bool, Vec<(usize, usize)>) {
        let structure = self.signed_structure();
        let violations = structure.non_monotone_arcs();
        (violations.is_empty(), violations)
    }

    /// Frustrated arcs at `x`, per the sign-product rule. Undefined (an
    /// error) on non-monotone networks.
    pub fn frustrations(&self, x: &Config) -> Result<FrustrationSet> {
        self.signed_structure().frustration(x)
    }

    /// Render the network in the text format: one `i: expr` line per
    /// automaton, with the expression in disjunctive normal form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("n = {}\n", self.n));
        for i in 0..self.n {
            out.push_str(&format!("{}: {}\n", i, self.dnf(i)));
        }
        out
    }

    fn dnf(&self, i: usize) -> String {
        let minterms: Vec<String> = Config::all(self.n)
            .filter(|x| self.eval(i, x))
            .map(|x| {
                (0..self.n)
                    .map(|j| {
                        if x.bit(j) {
                            format!("x{j}")
                        } else {
                            format!("!x{j}")
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(" & ")
            })
            .collect();
        if minterms.is_empty() {
            "0".to_string()
        } else if minterms.len() == 1 << self.n {
            "1".to_string()
        } else {
            minterms.join(" | ")
        }
    }

    /// Stable id: the truth tables in hex, automaton by automaton.
    pub fn id(&self) -> String {
        let mut id = format!("n{}", self.n);
        for t in &self.tables {
            id.push(':');
            let mut nibble = 0u8;
            for (k, &b) in t.iter().enumerate() {
                nibble |= (b as u8) << (k % 4);
                if k % 4 == 3 || k == t.len() - 1 {
                    id.push_str(&format!("{nibble:x}"));
                    nibble = 0;
                }
            }
        }
        id
    }
}

impl fmt::Debug for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Network[{}]", self.id())
    }
}

/// Instability set of a configuration: `U(x)`, its complement, and the
/// momentum `u(x) = |U(x)|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InstabilityReport {
    configuration: Config,
    unstable_mask: u32,
    n: usize,
}

impl InstabilityReport {
    pub fn configuration(&self) -> Config {
        self.configuration
    }

    pub fn unstable_mask(&self) -> u32 {
        self.unstable_mask
    }

    pub fn unstable(&self) -> Vec<usize> {
        mask_to_indices(self.unstable_mask)
    }

    pub fn stable(&self) -> Vec<usize> {
        mask_to_indices(!self.unstable_mask & ((1 << self.n) - 1))
    }

    pub fn momentum(&self) -> usize {
        self.unstable_mask.count_ones() as usize
    }

    pub fn is_stable_configuration(&self) -> bool {
        self.unstable_mask == 0
    }
}

/// Sign of an interaction arc.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Positive,
    Negative,
    NonMonotone,
}

impl Sign {
    /// Numeric value for sign products; `None` for non-monotone arcs.
    pub fn value(&self) -> Option<i8> {
        match self {
            Sign::Positive => Some(1),
            Sign::Negative => Some(-1),
            Sign::NonMonotone => None,
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Sign::Positive => "+",
            Sign::Negative => "-",
            Sign::NonMonotone => "±",
        }
    }
}

/// The signed structure `G = (V, A)`. Absent arcs carry sign 0 and are simply
/// not stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedStructure {
    n: usize,
    arcs: BTreeMap<(usize, usize), Sign>,
}

impl SignedStructure {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> impl Iterator<Item = ((usize, usize), Sign)> + '_ {
        self.arcs.iter().map(|(&a, &s)| (a, s))
    }

    pub fn sign(&self, j: usize, i: usize) -> Option<Sign> {
        self.arcs.get(&(j, i)).copied()
    }

    pub fn has_arc(&self, j: usize, i: usize) -> bool {
        self.arcs.contains_key(&(j, i))
    }

    /// In-neighbourhood of `i`.
    pub fn in_neighbours(&self, i: usize) -> Vec<usize> {
        self.arcs
            .keys()
            .filter(|&&(_, head)| head == i)
            .map(|&(j, _)| j)
            .collect()
    }

    pub fn non_monotone_arcs(&self) -> Vec<(usize, usize)> {
        self.arcs
            .iter()
            .filter(|(_, &s)| s == Sign::NonMonotone)
            .map(|(&a, _)| a)
            .collect()
    }

    pub fn is_monotone(&self) -> bool {
        self.arcs.values().all(|&s| s != Sign::NonMonotone)
    }

    fn require_monotone(&self) -> Result<()> {
        let bad = self.non_monotone_arcs();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::NonMonotoneNetwork { arcs: bad })
        }
    }

    /// `FRUS(x)`: arcs `(j,i)` with `s(x_j)·s(x_i) = −sign(j,i)`.
    pub fn frustration(&self, x: &Config) -> Result<FrustrationSet> {
        self.require_monotone()?;
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: self.n,
            });
        }
        let frustrated = self
            .arcs
            .iter()
            .filter(|(&(j, i), &sign)| {
                x.state_sign(j) * x.state_sign(i) == -sign.value().expect("monotone")
            })
            .map(|(&a, _)| a)
            .collect();
        Ok(FrustrationSet {
            configuration: *x,
            frustrated,
        })
    }

    /// Sign of a directed path or cycle given as an arc list. `None` if an
    /// arc is absent or unsigned.
    pub fn walk_sign(&self, arcs: &[(usize, usize)]) -> Option<i8> {
        arcs.iter()
            .try_fold(1i8, |acc, &(j, i)| Some(acc * self.sign(j, i)?.value()?))
    }

    /// Adjacency list view (tail → heads), loops included.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(j, i) in self.arcs.keys() {
            adj[j].push(i);
        }
        adj
    }
}

/// The frustrated-arc set of a configuration of a monotone network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrustrationSet {
    configuration: Config,
    frustrated: Vec<(usize, usize)>,
}

impl FrustrationSet {
    pub fn configuration(&self) -> Config {
        self.configuration
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.frustrated
    }

    pub fn contains(&self, j: usize, i: usize) -> bool {
        self.frustrated.contains(&(j, i))
    }

    /// Frustrated arcs incoming `i`, as a tail mask. Used by the layer
    /// construction and the instability lemma checks.
    pub fn incoming_mask(&self, i: usize) -> u32 {
        self.frustrated
            .iter()
            .filter(|&&(_, head)| head == i)
            .fold(0u32, |m, &(j, _)| m | (1 << j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    use crate::samples::free_net;

    fn net(n: usize, defs: &[&str]) -> Network {
        let exprs: Vec<Expr> = defs.iter().map(|d| parse_expr(d).unwrap()).collect();
        Network::from_expressions(n, &exprs).unwrap()
    }

    #[test]
    fn negation_truth_table() {
        let net = net(1, &["!x0"]);
        assert!(net.eval(0, &Config::new(1, 0)));
        assert!(!net.eval(0, &Config::new(1, 1)));
    }

    #[test]
    fn xor_truth_table() {
        let net = net(2, &["x0 ^ x1", "x1"]);
        let vals: Vec<bool> = ["00", "01", "10", "11"]
            .iter()
            .map(|s| net.eval(0, &s.parse().unwrap()))
            .collect();
        assert_eq!(vals, vec![false, true, true, false]);
    }

    #[test]
    fn widget_h2_table() {
        // h_2 = !x0 & x1 from the four-automaton widget.
        let net = net(4, &["0", "0", "!x0 & x1", "0"]);
        assert!(net.eval(2, &"0100".parse().unwrap()));
        assert!(!net.eval(2, &"1100".parse().unwrap()));
    }

    #[test]
    fn variable_out_of_range_rejected() {
        let e = parse_expr("x3").unwrap();
        assert!(matches!(
            Network::from_expressions(2, &[e.clone(), e]),
            Err(Error::IndexOutOfRange { index: 3, n: 2 })
        ));
    }

    #[test]
    fn instabilities_free_net() {
        let net = free_net();
        let rep = net.instabilities(&"11".parse().unwrap()).unwrap();
        assert_eq!(rep.unstable(), vec![0, 1]);
        assert_eq!(rep.momentum(), 2);
        let stable = net.instabilities(&"00".parse().unwrap()).unwrap();
        assert!(stable.is_stable_configuration());
        assert_eq!(stable.stable(), vec![0, 1]);
    }

    #[test]
    fn instabilities_widget_at_1100() {
        let net = net(
            4,
            &["x2 | (x0 & !x1)", "x3 | (!x0 & x1)", "!x0 & x1", "x0 & !x1"],
        );
        let rep = net.instabilities(&"1100".parse().unwrap()).unwrap();
        // f_0 = 0, f_1 = 0, f_2 = 0, f_3 = 1 at 1100; x = 1100.
        assert_eq!(rep.unstable(), vec![0, 1]);
    }

    #[test]
    fn signed_structure_free_net() {
        let s = free_net().signed_structure();
        assert_eq!(s.sign(0, 0), Some(Sign::Positive));
        assert_eq!(s.sign(1, 0), Some(Sign::Negative));
        assert_eq!(s.sign(0, 1), Some(Sign::Negative));
        assert_eq!(s.sign(1, 1), Some(Sign::Positive));
        assert_eq!(s.arcs().count(), 4);
        assert!(s.is_monotone());
    }

    #[test]
    fn xor_arc_is_non_monotone() {
        let n = net(2, &["x0 ^ x1", "x1"]);
        let s = n.signed_structure();
        assert_eq!(s.sign(1, 0), Some(Sign::NonMonotone));
        assert_eq!(s.sign(0, 0), Some(Sign::NonMonotone));
        let (mono, viol) = n.is_locally_monotone();
        assert!(!mono);
        assert!(viol.contains(&(0, 0)) && viol.contains(&(1, 0)));
    }

    #[test]
    fn constant_function_has_no_incoming_arcs() {
        let n = net(2, &["1", "x1"]);
        let s = n.signed_structure();
        assert!(s.in_neighbours(0).is_empty());
    }

    #[test]
    fn frustrations_free_net_at_11() {
        let net = free_net();
        let frus = net.frustrations(&"11".parse().unwrap()).unwrap();
        assert!(frus.contains(1, 0) && frus.contains(0, 1));
        assert!(!frus.contains(0, 0) && !frus.contains(1, 1));
        assert_eq!(frus.arcs().len(), 2);
    }

    #[test]
    fn negative_loop_frustrated_at_zero() {
        let net = net(1, &["!x0"]);
        let frus = net.frustrations(&Config::new(1, 0)).unwrap();
        assert_eq!(frus.arcs(), &[(0, 0)]);
    }

    #[test]
    fn frustration_rejects_non_monotone() {
        let n = net(2, &["x0 ^ x1", "x1"]);
        assert!(matches!(
            n.frustrations(&"00".parse().unwrap()),
            Err(Error::NonMonotoneNetwork { .. })
        ));
    }

    #[test]
    fn isolated_cycle_stable_node_not_frustrated() {
        // Two-automaton copy cycle: i unstable iff its incoming arc is
        // frustrated.
        let n = net(2, &["x1", "x0"]);
        for x in Config::all(2) {
            let u = n.unstable_mask(&x);
            let frus = n.frustrations(&x).unwrap();
            assert_eq!(frus.contains(1, 0), u & 1 != 0);
            assert_eq!(frus.contains(0, 1), u & 2 != 0);
        }
    }

    #[test]
    fn text_roundtrip() {
        let n = free_net();
        let text = n.to_text();
        let reparsed = crate::expr::parse_network(&text).unwrap();
        assert_eq!(n, reparsed);
    }
}
